//! Banded LU without pivoting.
//!
//! Used for the Shortley–Weller matrix, which is a nonsingular M-matrix and
//! therefore factors stably without row exchanges.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        Self {
            n,
            lower,
            upper,
            data: vec![0.0; n * (lower + upper + 1)],
        }
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.lower >= i && j <= i + self.upper);
        i * (self.lower + self.upper + 1) + (j + self.lower - i)
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.slot(i, j);
        self.data[k] = v;
    }

    #[cfg(test)]
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.lower);
                let hi = (i + self.upper).min(self.n - 1);
                (lo..=hi).map(|j| self.data[self.slot(i, j)] * x[j]).sum()
            })
            .collect()
    }

    pub fn factor(mut self) -> Result<BandedLu> {
        let n = self.n;
        let width = self.lower + self.upper + 1;
        for k in 0..n {
            let pivot = self.data[self.slot(k, k)];
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::SingularPivot { row: k, pivot });
            }
            let row_end = (k + self.upper).min(n - 1);
            let rows_end = (k + self.lower).min(n - 1);
            let pivot_row = k * width + (self.lower); // slot(k, k)
            for i in k + 1..=rows_end {
                let ik = self.slot(i, k);
                let a = self.data[ik];
                if a == 0.0 {
                    continue;
                }
                let l = a / pivot;
                self.data[ik] = l;
                let base_i = self.slot(i, k + 1);
                let base_k = pivot_row + 1;
                let len = row_end - k;
                for t in 0..len {
                    self.data[base_i + t] -= l * self.data[base_k + t];
                }
            }
        }
        Ok(BandedLu { lu: self })
    }
}

#[derive(Debug, Clone)]
pub struct BandedLu {
    lu: BandedMatrix,
}

impl BandedLu {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let m = &self.lu;
        let n = m.n;
        let mut x = rhs.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(m.lower);
            let acc: f64 = (lo..i).map(|j| m.data[m.slot(i, j)] * x[j]).sum();
            x[i] -= acc;
        }
        for i in (0..n).rev() {
            let hi = (i + m.upper).min(n - 1);
            let acc: f64 = (i + 1..=hi).map(|j| m.data[m.slot(i, j)] * x[j]).sum();
            x[i] = (x[i] - acc) / m.data[m.slot(i, i)];
        }
        x
    }
}
