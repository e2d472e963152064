//! Truncated real sequences indexed `1..=N`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeqKind {
    Moment,
    FreeCumulant,
    BooleanCumulant,
}

/// `values[k]` holds the entry of index `k + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeqN<T = f64> {
    pub kind: SeqKind,
    pub values: Vec<T>,
}

impl<T: Scalar> SeqN<T> {
    pub fn new(kind: SeqKind, values: Vec<T>) -> Self {
        SeqN { kind, values }
    }

    pub fn moments(values: Vec<T>) -> Self {
        Self::new(SeqKind::Moment, values)
    }

    pub fn free_cumulants(values: Vec<T>) -> Self {
        Self::new(SeqKind::FreeCumulant, values)
    }

    pub fn boolean_cumulants(values: Vec<T>) -> Self {
        Self::new(SeqKind::BooleanCumulant, values)
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// Entry of index `n` (1-based).
    pub fn get(&self, n: usize) -> &T {
        &self.values[n - 1]
    }

    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n > self.order() {
            return Err(Error::InsufficientOrder {
                need: n,
                have: self.order(),
            });
        }
        Ok(Self::new(self.kind, self.values[..n].to_vec()))
    }

    pub fn expect_kind(&self, kind: SeqKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::InvalidArgument(format!(
                "expected {kind:?} sequence, got {:?}",
                self.kind
            )));
        }
        Ok(())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(
            self.kind,
            self.values.iter().map(|v| v.clone() * c.clone()).collect(),
        )
    }

    /// Zero every odd-indexed entry.
    pub fn even_part(&self) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| if k % 2 == 0 { T::zero() } else { v.clone() })
            .collect();
        Self::new(self.kind, values)
    }

    pub fn to_f64(&self) -> SeqN<f64> {
        SeqN::new(self.kind, self.values.iter().map(Scalar::to_f64).collect())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        crate::scalar::max_abs_diff(&self.values, &other.values)
    }
}

impl SeqN<f64> {
    /// Largest odd-indexed entry in absolute value.
    pub fn max_odd_abs(&self) -> f64 {
        self.values
            .iter()
            .step_by(2)
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }
}

/// Determinant test of Hankel positive semidefiniteness for a moment sequence
/// (with `m_0 = 1`), using every leading principal minor the data supports.
///
/// Returns the smallest pivot of an LDLᵀ factorisation; negative pivots beyond
/// rounding mean the sequence cannot come from a probability measure.
pub fn hankel_min_pivot(m: &SeqN<f64>) -> f64 {
    let size = m.order() / 2 + 1;
    let at = |k: usize| if k == 0 { 1.0 } else { m.values[k - 1] };
    let mut a: Vec<Vec<f64>> = (0..size)
        .map(|i| (0..size).map(|j| at(i + j)).collect())
        .collect();
    let mut min_pivot = f64::INFINITY;
    for k in 0..size {
        let p = a[k][k];
        min_pivot = min_pivot.min(p);
        if p.abs() < 1e-300 {
            break;
        }
        for i in k + 1..size {
            let f = a[i][k] / p;
            for j in k..size {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    min_pivot
}
