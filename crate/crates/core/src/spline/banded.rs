//! LDLᵀ factorisation of symmetric positive-definite pentadiagonal matrices.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Symmetric pentadiagonal matrix stored by its three lower diagonals.
#[derive(Debug, Clone)]
pub(crate) struct Pentadiagonal<T> {
    pub diag: Vec<T>,
    pub sub1: Vec<T>,
    pub sub2: Vec<T>,
}

impl<T: Real> Pentadiagonal<T> {
    pub fn zeros(n: usize) -> Self {
        Pentadiagonal {
            diag: vec![T::zero(); n],
            sub1: vec![T::zero(); n.saturating_sub(1)],
            sub2: vec![T::zero(); n.saturating_sub(2)],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn factor(&self) -> Result<BandedLdl<T>> {
        let n = self.len();
        let mut d = vec![T::zero(); n];
        let mut l1 = vec![T::zero(); n.saturating_sub(1)];
        let mut l2 = vec![T::zero(); n.saturating_sub(2)];
        for i in 0..n {
            let mut di = self.diag[i];
            if i >= 1 {
                di = di - l1[i - 1] * l1[i - 1] * d[i - 1];
            }
            if i >= 2 {
                di = di - l2[i - 2] * l2[i - 2] * d[i - 2];
            }
            if !(di > T::zero()) || !di.is_finite() {
                return Err(Error::NumericalFailure(format!(
                    "non-positive pivot {di} at row {i} of banded system"
                )));
            }
            d[i] = di;
            if i + 1 < n {
                let mut a = self.sub1[i];
                if i >= 1 {
                    a = a - l2[i - 1] * l1[i - 1] * d[i - 1];
                }
                l1[i] = a / di;
            }
            if i + 2 < n {
                l2[i] = self.sub2[i] / di;
            }
        }
        Ok(BandedLdl { d, l1, l2 })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct BandedLdl<T> {
    d: Vec<T>,
    l1: Vec<T>,
    l2: Vec<T>,
}

impl<T: Real> BandedLdl<T> {
    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        let n = self.d.len();
        let mut z = rhs.to_vec();
        for i in 0..n {
            if i >= 1 {
                z[i] = z[i] - self.l1[i - 1] * z[i - 1];
            }
            if i >= 2 {
                z[i] = z[i] - self.l2[i - 2] * z[i - 2];
            }
        }
        for (zi, di) in z.iter_mut().zip(&self.d) {
            *zi = *zi / *di;
        }
        for i in (0..n).rev() {
            if i + 1 < n {
                z[i] = z[i] - self.l1[i] * z[i + 1];
            }
            if i + 2 < n {
                z[i] = z[i] - self.l2[i] * z[i + 2];
            }
        }
        z
    }
}
