use crate::error::{Error, Result};

/// A set partition of `{0, .., n-1}` (items are zero-based).
///
/// Cells are stored in canonical order: each cell sorted, cells ordered by
/// their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    cells: Vec<Vec<usize>>,
    n: usize,
}

impl Partition {
    pub fn new(mut cells: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = cells.iter().map(Vec::len).sum();
        let mut seen = vec![false; n];
        for cell in &mut cells {
            if cell.is_empty() {
                return Err(Error::InvalidParameter("partition cells must be nonempty".into()));
            }
            cell.sort_unstable();
            for &i in cell.iter() {
                if i >= n || seen[i] {
                    return Err(Error::InvalidParameter(format!(
                        "cells must be disjoint and cover 0..{n}"
                    )));
                }
                seen[i] = true;
            }
        }
        cells.sort_unstable_by_key(|c| c[0]);
        Ok(Self { cells, n })
    }

    /// Builds the partition whose cells are the items sharing a label.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut cells: Vec<Vec<usize>> = Vec::new();
        let mut slot: Vec<Option<usize>> = Vec::new();
        for (i, &l) in labels.iter().enumerate() {
            if l >= slot.len() {
                slot.resize(l + 1, None);
            }
            match slot[l] {
                Some(c) => cells[c].push(i),
                None => {
                    slot[l] = Some(cells.len());
                    cells.push(vec![i]);
                }
            }
        }
        Self {
            cells,
            n: labels.len(),
        }
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    /// Number of items `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of cells `n(p)`.
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// Cell sizes `e_{j,n}` in cell order.
    pub fn sizes(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    /// Sizes sorted in decreasing order; partitions with the same profile
    /// share their Ewens probability.
    pub fn size_profile(&self) -> Vec<usize> {
        let mut s = self.sizes();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }
}

/// Observed values `Y_1..Y_n` with their distinct values `Y*` and the
/// partition induced by equality. Values are equal iff bitwise equal.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSet {
    values: Vec<f64>,
    uniques: Vec<f64>,
    partition: Partition,
}

impl ObservationSet {
    pub fn new(values: Vec<f64>) -> Self {
        let mut uniques: Vec<f64> = Vec::new();
        let labels: Vec<usize> = values
            .iter()
            .map(
                |v| match uniques.iter().position(|u| u.to_bits() == v.to_bits()) {
                    Some(j) => j,
                    None => {
                        uniques.push(*v);
                        uniques.len() - 1
                    }
                },
            )
            .collect();
        let partition = Partition::from_labels(&labels);
        Self {
            values,
            uniques,
            partition,
        }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Distinct values in order of first appearance.
    pub fn uniques(&self) -> &[f64] {
        &self.uniques
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// Multiplicity of each distinct value, aligned with [`Self::uniques`].
    pub fn counts(&self) -> Vec<usize> {
        self.partition.sizes()
    }
}
