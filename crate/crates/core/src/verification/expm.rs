//! Matrix exponential by scaling and squaring of a truncated Taylor series.

use crate::error::{Error, Result};
use crate::numeric::linalg::{self, Mat4};
use crate::numeric::Scalar;

const MAX_TERMS: usize = 60;

/// Power of two r with D⁻¹AD, D = diag(1, r, r², r³), roughly balanced
/// for a companion matrix whose last row holds the polynomial coefficients.
fn balancing_radius<S: Scalar>(a: &Mat4<S>) -> f64 {
    let r = (0..4)
        .map(|j| a[3][j].abs().powf(1.0 / (4 - j) as f64))
        .fold(0.0, f64::max);
    if r > 0.0 && r.is_finite() {
        2f64.powi(r.log2().round() as i32)
    } else {
        1.0
    }
}

/// e^{x·A}, computed on the balanced matrix D⁻¹AD and transformed back.
/// Accurate to working precision (relative, normwise after balancing) when
/// the balanced ‖x·A‖ is moderate; fails with `Overflow` beyond `limit`.
pub fn expm_series_oracle<S: Scalar>(companion: &Mat4<S>, x: f64, limit: f64) -> Result<Mat4<S>> {
    let r = balancing_radius(companion);
    let xs = S::from_f64(x);
    let mut a = *companion;
    for i in 0..4 {
        for j in 0..4 {
            a[i][j] = a[i][j] * xs * S::from_f64(r.powi(j as i32 - i as i32));
        }
    }
    let norm = linalg::norm1(&a);
    if !(norm <= limit) {
        return Err(Error::Overflow { exponent: norm, limit });
    }
    let mut squarings = 0;
    let mut scaled_norm = norm;
    while scaled_norm > 0.5 {
        scaled_norm /= 2.0;
        squarings += 1;
    }
    let scale = S::from_f64(0.5f64.powi(squarings));
    let b = a.map(|row| row.map(|e| e * scale));
    let mut sum = linalg::identity::<S>();
    let mut term = linalg::identity::<S>();
    for k in 1..=MAX_TERMS {
        term = linalg::matmul(&term, &b);
        let inv_k = S::one() / S::from_f64(k as f64);
        term = term.map(|row| row.map(|e| e * inv_k));
        for i in 0..4 {
            for j in 0..4 {
                sum[i][j] = sum[i][j] + term[i][j];
            }
        }
        if linalg::norm1(&term) <= S::UNIT_ROUNDOFF * 1e-2 * linalg::norm1(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = linalg::matmul(&sum, &sum);
    }
    for i in 0..4 {
        for j in 0..4 {
            sum[i][j] = sum[i][j] * S::from_f64(r.powi(i as i32 - j as i32));
        }
    }
    Ok(sum)
}

/// max |a_ij − b_ij| / max |b_ij| after the similarity diag(1, r, r², r³),
/// which evens out the λ^{i−j} scaling of companion-matrix exponentials.
pub fn balanced_rel_diff<S: Scalar>(a: &Mat4<S>, b: &Mat4<S>, r: f64) -> f64 {
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let w = r.powi(j as i32 - i as i32);
            num = num.max((a[i][j] - b[i][j]).abs() * w);
            den = den.max(b[i][j].abs() * w);
        }
    }
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}
