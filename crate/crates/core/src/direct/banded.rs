//! Pentadiagonal matrices and their LU factorisation without pivoting.

use crate::error::{Error, Result};

pub(crate) const HALF_BAND: usize = 2;
const WIDTH: usize = 2 * HALF_BAND + 1;

/// Row `i` stores `A[i][i + k - 2]` in slot `k`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Banded {
    rows: Vec<[f64; WIDTH]>,
}

impl Banded {
    pub fn zeros(n: usize) -> Self {
        Banded {
            rows: vec![[0.0; WIDTH]; n],
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = j + HALF_BAND - i;
        self.rows[i][k] = value;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + HALF_BAND < i || j > i + HALF_BAND || j >= self.len() {
            return 0.0;
        }
        self.rows[i][j + HALF_BAND - i]
    }

    #[cfg(test)]
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let lo = i.saturating_sub(HALF_BAND);
                let hi = (i + HALF_BAND).min(n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// `c I + s A`.
    pub fn shifted(&self, c: f64, s: f64) -> Self {
        let mut out = self.clone();
        for row in &mut out.rows {
            for v in row.iter_mut() {
                *v *= s;
            }
            row[HALF_BAND] += c;
        }
        out
    }

    pub fn factor(mut self) -> Result<BandedLu> {
        let n = self.len();
        let scale = self.rows.iter().flat_map(|r| r.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            let pivot = self.get(i, i);
            if !(pivot.abs() > 1e-14 * scale) {
                return Err(Error::InvalidParameter {
                    name: "dt",
                    reason: format!("implicit system is singular at row {i}"),
                });
            }
            for r in i + 1..(i + HALF_BAND + 1).min(n) {
                let factor = self.get(r, i) / pivot;
                self.set(r, i, factor);
                for c in i + 1..(i + HALF_BAND + 1).min(n) {
                    let v = self.get(r, c) - factor * self.get(i, c);
                    self.set(r, c, v);
                }
            }
        }
        Ok(BandedLu { lu: self })
    }
}

/// Packed unit-lower / upper factors.
#[derive(Debug, Clone)]
pub(crate) struct BandedLu {
    lu: Banded,
}

impl BandedLu {
    pub fn solve(&self, rhs: &mut [f64]) {
        let n = self.lu.len();
        for i in 0..n {
            let lo = i.saturating_sub(HALF_BAND);
            let s: f64 = (lo..i).map(|j| self.lu.get(i, j) * rhs[j]).sum();
            rhs[i] -= s;
        }
        for i in (0..n).rev() {
            let hi = (i + HALF_BAND).min(n - 1);
            let s: f64 = (i + 1..=hi).map(|j| self.lu.get(i, j) * rhs[j]).sum();
            rhs[i] = (rhs[i] - s) / self.lu.get(i, i);
        }
    }
}
