//! Name lookup for the checks.

use crate::error::{Error, Result};

use super::checks::*;
use super::report::{CheckParams, CheckReport};

/// A registered check.
#[derive(Clone, Copy)]
pub struct CheckSpec {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub summary: &'static str,
    /// Fills defaults and validates preconditions.
    pub prepare: fn(&CheckParams) -> Result<CheckParams>,
    /// Runs a prepared parameter record.
    pub run: fn(&CheckParams) -> Result<CheckReport>,
}

impl std::fmt::Debug for CheckSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CheckSpec").field("name", &self.name).finish()
    }
}

impl CheckSpec {
    /// `prepare` followed by `run`.
    pub fn execute(&self, params: &CheckParams) -> Result<CheckReport> {
        (self.run)(&(self.prepare)(params)?)
    }

    fn answers_to(&self, name: &str) -> bool {
        let bare = name.strip_prefix("check_").unwrap_or(name);
        self.name == name || self.name.strip_prefix("check_") == Some(bare) || self.aliases.contains(&name)
    }
}

static REGISTRY: [CheckSpec; 16] = [
    CheckSpec {
        name: "check_eq2",
        aliases: &[],
        summary: "order-theta transform E[(1+zP(g))^-theta] equals the Gamma-process Laplace functional exp(-psi(z))",
        prepare: prepare_eq2,
        run: run_eq2,
    },
    CheckSpec {
        name: "check_eq14",
        aliases: &[],
        summary: "order-q transform equals the Beta-Gamma (thetaH, theta-q) Laplace functional, for every theta, q > 0",
        prepare: prepare_eq14,
        run: run_eq14,
    },
    CheckSpec {
        name: "check_eq15",
        aliases: &["cs_eq15"],
        summary: "for theta > q the order-q transform is the Beta(q, theta-q) mixture of exp(-psi(uz))",
        prepare: prepare_eq15,
        run: run_eq15,
    },
    CheckSpec {
        name: "check_eq17",
        aliases: &["cs_eq17"],
        summary: "order-one transform for every theta > 0, including 0 < theta < 1",
        prepare: prepare_eq17,
        run: run_eq17,
    },
    CheckSpec {
        name: "check_eq10",
        aliases: &[],
        summary: "Beta-Gamma Laplace functional is the urn mixture of posterior Beta-Gamma ((theta+n)H_n, n+d) functionals",
        prepare: prepare_eq10,
        run: run_eq10,
    },
    CheckSpec {
        name: "check_eq11",
        aliases: &[],
        summary: "joint Laplace transform of (T, mu(g)) under the Gamma process",
        prepare: prepare_eq11,
        run: run_eq11,
    },
    CheckSpec {
        name: "check_eq12",
        aliases: &[],
        summary: "Gamma-ratio times E[(T+z mu(g))^-q] under the posterior Gamma process equals the posterior Beta-Gamma functional",
        prepare: prepare_eq12,
        run: run_eq12,
    },
    CheckSpec {
        name: "check_partition_invariance",
        aliases: &["partition_expansion"],
        summary: "exact Ewens-weighted partition expansion agrees across admissible depths n",
        prepare: prepare_partition_invariance,
        run: run_partition_invariance,
    },
    CheckSpec {
        name: "check_eq18",
        aliases: &[],
        summary: "Beta-Gamma functional equals U(mu_theta(g) + sum_j G_j g(Y*_j)) in law",
        prepare: prepare_eq18,
        run: run_eq18,
    },
    CheckSpec {
        name: "check_eq19",
        aliases: &[],
        summary: "mu_{theta,theta-1}(g) equals U_{1,theta}(mu_theta(g) + T_1 g(Y_1)) in law",
        prepare: prepare_eq19,
        run: run_eq19,
    },
    CheckSpec {
        name: "check_eq20",
        aliases: &[],
        summary: "Gamma-process fixed point mu_theta(g) = U_{theta,1}(mu_theta(g) + T_1 g(Y_1)) in law",
        prepare: prepare_eq20,
        run: run_eq20,
    },
    CheckSpec {
        name: "check_eq21",
        aliases: &[],
        summary: "Beta-Gamma process is a Dirichlet process scaled by an independent Gamma(q)",
        prepare: prepare_eq21,
        run: run_eq21,
    },
    CheckSpec {
        name: "check_prop23",
        aliases: &[],
        summary: "constraint T_theta U + sum_j G_j g(Y*_j) = T_{theta+n} U in law for a Beta-distributed mean",
        prepare: prepare_prop23,
        run: run_prop23,
    },
    CheckSpec {
        name: "check_prop24",
        aliases: &[],
        summary: "arcsine base: P(id) ~ Beta(theta+1/2, theta+1/2) and mu_{theta,-(theta+1)}(id) ~ Gamma(theta+1/2)",
        prepare: prepare_prop24,
        run: run_prop24,
    },
    CheckSpec {
        name: "check_remark25",
        aliases: &[],
        summary: "stable representation T_1^p/(T_1^p + T_theta tau_p^p) of U_{1,theta}",
        prepare: prepare_remark25,
        run: run_remark25,
    },
    CheckSpec {
        name: "check_gamma_identity",
        aliases: &[],
        summary: "T^-q = Gamma(q)^-1 int_0^inf v^(q-1) exp(-vT) dv",
        prepare: prepare_gamma_identity,
        run: run_gamma_identity,
    },
];

pub fn registry() -> &'static [CheckSpec] {
    &REGISTRY
}

/// Looks a check up by its name, its name without the `check_` prefix, or
/// an alias.
pub fn find_check(name: &str) -> Result<&'static CheckSpec> {
    REGISTRY
        .iter()
        .find(|c| c.answers_to(name))
        .ok_or_else(|| Error::UnknownCheck {
            name: name.to_string(),
            known: REGISTRY.iter().map(|c| c.name).collect::<Vec<_>>().join(", "),
        })
}

/// One line per check: name and summary.
pub fn list_checks() -> String {
    let width = REGISTRY.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for c in &REGISTRY {
        out.push_str(&format!("{:width$}  {}\n", c.name, c.summary));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listing() {
        let text = list_checks();
        assert!(text.contains("check_eq2 "));
        assert!(text.contains("check_prop24"));
        assert!(text.lines().count() >= 12);
    }

    #[test]
    fn lookup() {
        assert_eq!(find_check("check_eq2").unwrap().name, "check_eq2");
        assert_eq!(find_check("eq2").unwrap().name, "check_eq2");
        assert_eq!(find_check("cs_eq15").unwrap().name, "check_eq15");
        match find_check("check_eq99") {
            Err(Error::UnknownCheck { known, .. }) => assert!(known.contains("check_remark25")),
            other => panic!("{other:?}"),
        }
    }
}
