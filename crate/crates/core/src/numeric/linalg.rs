//! Fixed-size 4×4 complex linear algebra.

use num_complex::Complex64;

use super::Scalar;
use crate::error::{Error, Result};

pub type Mat4<S> = [[S; 4]; 4];
pub type Vec4<S> = [S; 4];

pub fn identity<S: Scalar>() -> Mat4<S> {
    let mut m = [[S::zero(); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = S::one();
    }
    m
}

pub fn matmul<S: Scalar>(a: &Mat4<S>, b: &Mat4<S>) -> Mat4<S> {
    let mut c = [[S::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = S::zero();
            for k in 0..4 {
                acc = acc + a[i][k] * b[k][j];
            }
            c[i][j] = acc;
        }
    }
    c
}

pub fn matvec<S: Scalar>(a: &Mat4<S>, x: &Vec4<S>) -> Vec4<S> {
    let mut y = [S::zero(); 4];
    for i in 0..4 {
        for k in 0..4 {
            y[i] = y[i] + a[i][k] * x[k];
        }
    }
    y
}

pub fn to_c64<S: Scalar>(m: &Mat4<S>) -> Mat4<Complex64> {
    m.map(|row| row.map(S::to_c64))
}

pub fn from_c64<S: Scalar>(m: &Mat4<Complex64>) -> Mat4<S> {
    m.map(|row| row.map(S::from_c64))
}

/// Largest entrywise modulus.
pub fn max_abs(m: &Mat4<Complex64>) -> f64 {
    m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Matrix 1-norm (largest column sum).
pub fn norm1<S: Scalar>(m: &Mat4<S>) -> f64 {
    (0..4)
        .map(|j| (0..4).map(|i| m[i][j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn vnorm1<S: Scalar>(v: &Vec4<S>) -> f64 {
    v.iter().map(|z| z.abs()).sum()
}

/// LU factorisation with partial pivoting, `P·A = L·U`.
#[derive(Debug, Clone)]
pub struct Lu4<S> {
    lu: Mat4<S>,
    perm: [usize; 4],
}

impl<S: Scalar> Lu4<S> {
    pub fn factor(a: &Mat4<S>) -> Result<Self> {
        let mut lu = *a;
        let mut perm = [0, 1, 2, 3];
        for k in 0..4 {
            let p = (k..4)
                .max_by(|&i, &j| lu[i][k].abs().total_cmp(&lu[j][k].abs()))
                .unwrap_or(k);
            let piv = lu[p][k].abs();
            if piv == 0.0 || !piv.is_finite() {
                return Err(Error::NearSingular { cond: f64::INFINITY, limit: 0.0 });
            }
            lu.swap(k, p);
            perm.swap(k, p);
            for i in k + 1..4 {
                let f = lu[i][k] / lu[k][k];
                lu[i][k] = f;
                for j in k + 1..4 {
                    lu[i][j] = lu[i][j] - f * lu[k][j];
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &Vec4<S>) -> Vec4<S> {
        let mut y = [S::zero(); 4];
        for i in 0..4 {
            let mut acc = b[self.perm[i]];
            for j in 0..i {
                acc = acc - self.lu[i][j] * y[j];
            }
            y[i] = acc;
        }
        for i in (0..4).rev() {
            let mut acc = y[i];
            for j in i + 1..4 {
                acc = acc - self.lu[i][j] * y[j];
            }
            y[i] = acc / self.lu[i][i];
        }
        y
    }

    /// Solves `Aᴴ·x = b`.
    pub fn solve_adjoint(&self, b: &Vec4<S>) -> Vec4<S> {
        // Aᴴ = Uᴴ Lᴴ P
        let mut w = [S::zero(); 4];
        for i in 0..4 {
            let mut acc = b[i];
            for j in 0..i {
                acc = acc - self.lu[j][i].conj() * w[j];
            }
            w[i] = acc / self.lu[i][i].conj();
        }
        for i in (0..4).rev() {
            let mut acc = w[i];
            for j in i + 1..4 {
                acc = acc - self.lu[j][i].conj() * w[j];
            }
            w[i] = acc;
        }
        let mut x = [S::zero(); 4];
        for i in 0..4 {
            x[self.perm[i]] = w[i];
        }
        x
    }

    /// Lower estimate of ‖A⁻¹‖₁ (Hager's method with Higham's
    /// alternating-sign safeguard).
    pub fn inverse_norm1_estimate(&self) -> f64 {
        let n = 4.0;
        let mut x = [S::from_f64(1.0 / n); 4];
        let mut est = 0.0;
        let mut last_j = usize::MAX;
        for iter in 0..5 {
            let y = self.solve(&x);
            let new_est = vnorm1(&y);
            if iter > 0 && new_est <= est {
                break;
            }
            est = new_est;
            let xi = y.map(|v| {
                let a = v.abs();
                if a == 0.0 {
                    S::one()
                } else {
                    S::from_c64(v.to_c64() / a)
                }
            });
            let z = self.solve_adjoint(&xi);
            let (j, zmax) = z
                .iter()
                .map(|v| v.abs())
                .enumerate()
                .fold((0, 0.0), |acc, (i, a)| if a > acc.1 { (i, a) } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * *b).re()).sum();
            if iter > 0 && (zmax <= ztx || j == last_j) {
                break;
            }
            last_j = j;
            x = [S::zero(); 4];
            x[j] = S::one();
        }
        let alt: Vec4<S> = std::array::from_fn(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            S::from_f64(sign * (1.0 + i as f64 / (n - 1.0)))
        });
        let alt_est = 2.0 * vnorm1(&self.solve(&alt)) / (3.0 * n);
        est.max(alt_est)
    }
}

/// Result of an equilibrated solve.
#[derive(Debug, Clone, Copy)]
pub struct Solution<S> {
    pub x: Vec4<S>,
    /// 1-norm condition estimate of the row/column equilibrated matrix.
    pub cond: f64,
}

fn pow2_scale(m: f64) -> f64 {
    if m == 0.0 || !m.is_finite() {
        1.0
    } else {
        2f64.powi(-(m.log2().round() as i32))
    }
}

/// Solves `A·x = b` after scaling rows and columns by powers of two.
/// Fails with `NearSingular` when the condition estimate of the scaled
/// matrix exceeds `cond_limit`.
pub fn solve_equilibrated<S: Scalar>(a: &Mat4<S>, b: &Vec4<S>, cond_limit: f64) -> Result<Solution<S>> {
    let mut scaled = *a;
    let mut r = [1.0; 4];
    for (i, row) in scaled.iter_mut().enumerate() {
        r[i] = pow2_scale(row.iter().map(|z| z.abs()).fold(0.0, f64::max));
        for z in row.iter_mut() {
            *z = *z * S::from_f64(r[i]);
        }
    }
    let mut c = [1.0; 4];
    for j in 0..4 {
        c[j] = pow2_scale((0..4).map(|i| scaled[i][j].abs()).fold(0.0, f64::max));
        for row in scaled.iter_mut() {
            row[j] = row[j] * S::from_f64(c[j]);
        }
    }
    let lu = Lu4::factor(&scaled).map_err(|_| Error::NearSingular { cond: f64::INFINITY, limit: cond_limit })?;
    let cond = norm1(&scaled) * lu.inverse_norm1_estimate();
    if !(cond <= cond_limit) {
        return Err(Error::NearSingular { cond, limit: cond_limit });
    }
    let rb: Vec4<S> = std::array::from_fn(|i| b[i] * S::from_f64(r[i]));
    let y = lu.solve(&rb);
    let x = std::array::from_fn(|j| y[j] * S::from_f64(c[j]));
    Ok(Solution { x, cond })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Cdd;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample() -> Mat4<Complex64> {
        [
            [c(0.0, 1.0), c(2.0, 0.0), c(-1.0, 0.5), c(0.3, 0.0)],
            [c(4.0, 0.0), c(1.0, -1.0), c(0.0, 0.0), c(2.0, 2.0)],
            [c(1e-3, 0.0), c(0.0, 0.0), c(5.0, 1.0), c(-1.0, 0.0)],
            [c(2.0, 0.0), c(0.0, 3.0), c(1.0, 0.0), c(0.0, 0.0)],
        ]
    }

    fn exact_inverse_norm1(a: &Mat4<Complex64>) -> f64 {
        let lu = Lu4::factor(a).unwrap();
        (0..4)
            .map(|j| {
                let mut e = [Complex64::new(0.0, 0.0); 4];
                e[j] = Complex64::new(1.0, 0.0);
                vnorm1(&lu.solve(&e))
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn solve_has_small_residual() {
        let a = sample();
        let b = [c(1.0, 0.0), c(0.0, -2.0), c(3.0, 0.0), c(0.5, 0.5)];
        let sol = solve_equilibrated(&a, &b, 1e12).unwrap();
        let r = matvec(&a, &sol.x);
        for i in 0..4 {
            assert!((r[i] - b[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn adjoint_solve() {
        let a = sample();
        let lu = Lu4::factor(&a).unwrap();
        let b = [c(1.0, 1.0), c(0.0, 0.0), c(-1.0, 2.0), c(0.0, 1.0)];
        let x = lu.solve_adjoint(&b);
        for i in 0..4 {
            let mut acc = c(0.0, 0.0);
            for k in 0..4 {
                acc += a[k][i].conj() * x[k];
            }
            assert!((acc - b[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn condition_estimate_is_tight_lower_bound() {
        let a = sample();
        let exact = exact_inverse_norm1(&a);
        let est = Lu4::factor(&a).unwrap().inverse_norm1_estimate();
        assert!(est <= exact * (1.0 + 1e-12));
        assert!(est >= exact / 4.0);
    }

    #[test]
    fn singular_matrix_rejected() {
        let mut a = sample();
        a[3] = a[0];
        let b = [c(1.0, 0.0); 4];
        assert!(matches!(solve_equilibrated(&a, &b, 1e12), Err(Error::NearSingular { .. })));
    }

    #[test]
    fn equilibration_hides_bad_scaling() {
        let mut a = sample();
        for z in a[1].iter_mut() {
            *z *= 1e15;
        }
        let b = [c(1.0, 0.0); 4];
        let sol = solve_equilibrated(&a, &b, 1e12).unwrap();
        assert!(sol.cond < 1e4);
    }

    #[test]
    fn extended_precision_solve() {
        let a: Mat4<Cdd> = from_c64(&sample());
        let b = [Cdd::one(), Cdd::zero(), Cdd::zero(), Cdd::one()];
        let sol = solve_equilibrated(&a, &b, 1e30).unwrap();
        let r = matvec(&a, &sol.x);
        for i in 0..4 {
            assert!((r[i] - b[i]).abs() < 1e-29);
        }
    }
}
