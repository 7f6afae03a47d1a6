//! A small banded LU solver with partial pivoting (LAPACK `dgbsv` layout).
//!
//! The mode-wise boundary-value problems assemble into matrices with two
//! super-diagonals and at most five sub-diagonals (the wide rows come from
//! one-sided boundary stencils), so a dense solve would be wasteful.

use crate::{Error, Result};

pub struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row-major band storage with `2*kl + ku + 1` diagonals: entry
    /// (i, j) lives at `data[kl + ku + i - j][j]` for |i − j| in band.
    data: Vec<Vec<f64>>,
}

impl Banded {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        Banded {
            n,
            kl,
            ku,
            data: vec![vec![0.0; n]; 2 * kl + ku + 1],
        }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(j <= i + self.ku && i <= j + self.kl, "({i},{j}) outside band");
        self.data[self.kl + self.ku + i - j][j] += v;
    }

    /// LU-factor in place and solve A x = rhs. Partial pivoting confined
    /// to the band (standard banded elimination).
    pub fn solve(mut self, mut rhs: Vec<f64>) -> Result<Vec<f64>> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        assert_eq!(rhs.len(), n);
        let kv = kl + ku; // top fill row index offset
        // Elimination with partial pivoting among the kl+1 candidate rows.
        for col in 0..n {
            // Find pivot among rows col..=min(col+kl, n-1).
            let last = (col + kl).min(n - 1);
            let mut piv_row = col;
            let mut piv_val = self.entry(col, col).abs();
            for r in col + 1..=last {
                let v = self.entry(r, col).abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = r;
                }
            }
            if piv_val == 0.0 || !piv_val.is_finite() {
                return Err(Error::SolverFailure(format!(
                    "banded LU: zero or non-finite pivot at column {col} (|pivot| = {piv_val:e})"
                )));
            }
            if piv_row != col {
                // Swap rows; all nonzero support of either row at this
                // stage sits within columns col..=col+kv, which both rows
                // can store.
                let jmax = (col + kv).min(n - 1);
                for j in col..=jmax {
                    let a = self.entry(col, j);
                    let b = self.entry(piv_row, j);
                    self.set(col, j, b);
                    self.set(piv_row, j, a);
                }
                rhs.swap(col, piv_row);
            }
            let pivot = self.entry(col, col);
            for r in col + 1..=last {
                let factor = self.entry(r, col) / pivot;
                if factor == 0.0 {
                    continue;
                }
                self.set(r, col, 0.0);
                let jmax = (col + kv).min(n - 1);
                for j in col + 1..=jmax {
                    let v = self.entry(col, j);
                    if v != 0.0 {
                        let cur = self.entry(r, j);
                        self.set(r, j, cur - factor * v);
                    }
                }
                rhs[r] -= factor * rhs[col];
            }
        }
        // Back substitution.
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let jmax = (i + kv).min(n - 1);
            let mut acc = rhs[i];
            for j in i + 1..=jmax {
                acc -= self.entry(i, j) * x[j];
            }
            x[i] = acc / self.entry(i, i);
        }
        Ok(x)
    }

    #[inline]
    fn in_band_storage(&self, i: usize, j: usize) -> bool {
        // Storage covers kl subdiagonals and kl+ku superdiagonals (fill).
        j + self.kl >= i && j <= i + self.kl + self.ku
    }

    #[inline]
    fn entry(&self, i: usize, j: usize) -> f64 {
        if self.in_band_storage(i, j) {
            self.data[self.kl + self.ku + i - j][j]
        } else {
            0.0
        }
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(self.in_band_storage(i, j));
        self.data[self.kl + self.ku + i - j][j] = v;
    }
}
