//! Banded complex LU with partial pivoting, for the finite-difference oracle.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Sparse matrix assembled entry by entry, later factored as a band.
#[derive(Debug, Clone, Default)]
pub struct BandBuilder {
    n: usize,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl BandBuilder {
    pub fn new(n: usize) -> Self {
        Self { n, entries: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Adds `v` to entry (i, j).
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(i < self.n && j < self.n, "entry ({i}, {j}) outside {0}x{0}", self.n);
        *self.entries.entry((i, j)).or_default() += v;
    }

    pub fn factor(&self) -> Result<BandLu> {
        let mut kl = 0;
        let mut ku = 0;
        for &(i, j) in self.entries.keys() {
            if i > j {
                kl = kl.max(i - j);
            } else {
                ku = ku.max(j - i);
            }
        }
        let mut m = BandMatrix::zeros(self.n, kl, ku);
        for (&(i, j), &v) in &self.entries {
            *m.at_mut(i, j) = v;
        }
        m.factor()
    }
}

/// Band storage with room for the fill produced by row interchanges:
/// row i keeps columns i-kl ..= i+kl+ku.
#[derive(Debug, Clone)]
struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<Complex64>,
}

impl BandMatrix {
    fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![Complex64::new(0.0, 0.0); n * width] }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.kl + self.ku);
        i * self.width + (j + self.kl - i)
    }

    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[self.idx(i, j)]
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        let k = self.idx(i, j);
        &mut self.data[k]
    }

    fn last_col(&self, i: usize) -> usize {
        (i + self.kl + self.ku).min(self.n - 1)
    }

    fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        let mut perm = vec![0usize; n];
        let scale = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let p = (k..=last_row)
                .max_by(|&a, &b| self.at(a, k).norm().total_cmp(&self.at(b, k).norm()))
                .unwrap_or(k);
            let piv = self.at(p, k);
            if !(piv.norm() > scale * f64::EPSILON * 1e-4) {
                return Err(Error::SingularDiscretization);
            }
            perm[k] = p;
            if p != k {
                for j in k..=self.last_col(k) {
                    let a = self.idx(k, j);
                    let b = self.idx(p, j);
                    self.data.swap(a, b);
                }
            }
            let last = self.last_col(k);
            for i in k + 1..=last_row {
                let f = self.at(i, k) / piv;
                *self.at_mut(i, k) = f;
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..=last {
                    let u = self.at(k, j);
                    *self.at_mut(i, j) -= f * u;
                }
            }
        }
        Ok(BandLu { m: self, perm })
    }
}

/// Factored band matrix.
#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    perm: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let m = &self.m;
        let n = m.n;
        assert_eq!(b.len(), n);
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.perm[k]);
            let xk = x[k];
            for i in k + 1..=(k + m.kl).min(n - 1) {
                x[i] -= m.at(i, k) * xk;
            }
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..=m.last_col(i) {
                acc -= m.at(i, j) * x[j];
            }
            x[i] = acc / m.at(i, i);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tridiagonal_with_pivoting() {
        // zero diagonal entries force row interchanges
        let n = 50;
        let mut b = BandBuilder::new(n);
        let mut dense = vec![vec![c(0.0, 0.0); n]; n];
        for i in 0..n {
            let d = if i % 3 == 0 { c(0.0, 0.0) } else { c(2.0, 0.5) };
            b.add(i, i, d);
            dense[i][i] = d;
            if i + 1 < n {
                b.add(i, i + 1, c(1.0, -1.0));
                b.add(i + 1, i, c(-1.0, 0.25));
                dense[i][i + 1] = c(1.0, -1.0);
                dense[i + 1][i] = c(-1.0, 0.25);
            }
        }
        let rhs: Vec<_> = (0..n).map(|i| c(i as f64, 1.0)).collect();
        let x = b.factor().unwrap().solve(&rhs);
        for i in 0..n {
            let r: Complex64 = (0..n).map(|j| dense[i][j] * x[j]).sum();
            assert!((r - rhs[i]).norm() < 1e-11 * (1.0 + rhs[i].norm()));
        }
    }

    #[test]
    fn wide_asymmetric_band() {
        let n = 30;
        let mut b = BandBuilder::new(n);
        let mut dense = vec![vec![c(0.0, 0.0); n]; n];
        for i in 0..n {
            for j in i.saturating_sub(4)..(i + 2).min(n) {
                let v = c(((i * 7 + j * 3) % 11) as f64 - 5.0, ((i + j) % 3) as f64);
                b.add(i, j, v);
                dense[i][j] = v;
            }
        }
        let rhs: Vec<_> = (0..n).map(|i| c(1.0, -(i as f64))).collect();
        let x = b.factor().unwrap().solve(&rhs);
        for i in 0..n {
            let r: Complex64 = (0..n).map(|j| dense[i][j] * x[j]).sum();
            assert!((r - rhs[i]).norm() < 1e-9 * (1.0 + rhs[i].norm()));
        }
    }

    #[test]
    fn singular_is_reported() {
        let mut b = BandBuilder::new(3);
        b.add(0, 0, c(1.0, 0.0));
        b.add(1, 0, c(1.0, 0.0));
        b.add(2, 2, c(1.0, 0.0));
        assert!(matches!(b.factor(), Err(Error::SingularDiscretization)));
    }
}
