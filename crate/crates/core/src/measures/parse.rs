//! A small cursor for the compact base-measure and functional notation,
//! e.g. `0.5*uniform(0,1)+0.5*delta(0.3)` or `2*id+indicator(0,0.5)`.

use crate::error::{Error, Result};

pub(crate) struct Cursor<'a> {
    what: &'static str,
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(what: &'static str, src: &'a str) -> Self {
        Self { what, src, pos: 0 }
    }

    pub fn error(&self, msg: impl Into<String>) -> Error {
        Error::parse(
            self.what,
            format!("{} (at column {} of `{}`)", msg.into(), self.pos + 1, self.src),
        )
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.src.len()
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    pub fn starts_number(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '.' || c == '-' || c == '+')
    }

    pub fn ident(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .char_indices()
            .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_'))
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 || !rest.starts_with(|c: char| c.is_ascii_alphabetic()) {
            return Err(self.error("expected a name"));
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    pub fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let bytes = self.rest().as_bytes();
        let mut i = 0;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            i += 1;
        }
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = &self.rest()[..i];
        let value: f64 = text
            .parse()
            .map_err(|_| self.error(format!("expected a number, found `{text}`")))?;
        if !value.is_finite() {
            return Err(self.error("number must be finite"));
        }
        self.pos += i;
        Ok(value)
    }

    /// Parses `( n1, n2, ... )`; `;` splits the list into groups.
    pub fn arg_groups(&mut self) -> Result<Vec<Vec<f64>>> {
        self.expect('(')?;
        let mut groups = vec![Vec::new()];
        if self.eat(')') {
            return Ok(vec![]);
        }
        loop {
            groups.last_mut().unwrap().push(self.number()?);
            if self.eat(',') {
                continue;
            }
            if self.eat(';') {
                groups.push(Vec::new());
                continue;
            }
            self.expect(')')?;
            return Ok(groups);
        }
    }

    pub fn args(&mut self) -> Result<Vec<f64>> {
        let groups = self.arg_groups()?;
        if groups.len() > 1 {
            return Err(self.error("unexpected `;`"));
        }
        Ok(groups.into_iter().next().unwrap_or_default())
    }
}

/// Formats a float so that parsing it back gives the same bits.
pub(crate) fn fmt_num(x: f64) -> String {
    format!("{x}")
}
