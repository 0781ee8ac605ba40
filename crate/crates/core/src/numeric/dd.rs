//! Complex double-double arithmetic.
//!
//! Addition and multiplication come from `twofloat`. Its division and
//! transcendental functions are only good to about 1e-16..1e-18, so
//! division, exp, sin/cos and sqrt are implemented here, the latter by
//! argument reduction plus Taylor series carried out in double-double.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use twofloat::{consts, TwoFloat};

use super::Scalar;

/// Complex number with double-double real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cdd {
    pub re: TwoFloat,
    pub im: TwoFloat,
}

const EXP_TERMS: usize = 27;
const TRIG_TERMS: usize = 15;

fn dd(x: f64) -> TwoFloat {
    TwoFloat::from(x)
}

fn to_f64(x: TwoFloat) -> f64 {
    x.hi() + x.lo()
}

fn is_negative(x: TwoFloat) -> bool {
    x.hi() < 0.0
}

fn dd_abs(x: TwoFloat) -> TwoFloat {
    if is_negative(x) {
        -x
    } else {
        x
    }
}

/// Long division with two correction steps.
pub(crate) fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    dd(q1) + q2 + q3
}

pub(crate) fn dd_exp(x: TwoFloat) -> TwoFloat {
    let hi = x.hi();
    if hi > 709.0 {
        return TwoFloat::INFINITY;
    }
    if hi < -745.0 {
        return dd(0.0);
    }
    let k = (hi / consts::LN_2.hi()).round();
    let r = x - consts::LN_2 * k;
    let mut p = dd(1.0);
    for n in (1..=EXP_TERMS).rev() {
        p = r * p / (n as f64) + 1.0;
    }
    // split the power of two so that 2^k stays representable near the limits
    let k = k as i32;
    let half = k / 2;
    p * 2f64.powi(half) * 2f64.powi(k - half)
}

pub(crate) fn dd_cosh_sinh(x: TwoFloat) -> (TwoFloat, TwoFloat) {
    if dd_abs(x).hi() < 0.5 {
        let x2 = x * x;
        let mut c = dd(1.0);
        let mut s = dd(1.0);
        for j in (1..=TRIG_TERMS).rev() {
            let n = 2 * j;
            c = x2 * c / ((n * (n - 1)) as f64) + 1.0;
            s = x2 * s / ((n * (n + 1)) as f64) + 1.0;
        }
        (c, x * s)
    } else {
        let e = dd_exp(x);
        let ei = dd_exp(-x);
        ((e + ei) / 2.0, (e - ei) / 2.0)
    }
}

/// (cos x, sin x)
pub(crate) fn dd_cos_sin(x: TwoFloat) -> (TwoFloat, TwoFloat) {
    let k = (x.hi() / consts::FRAC_PI_2.hi()).round();
    let r = x - consts::FRAC_PI_2 * k;
    let r2 = r * r;
    let mut c = dd(1.0);
    let mut s = dd(1.0);
    for j in (1..=TRIG_TERMS).rev() {
        let n = 2 * j;
        c = dd(1.0) - r2 * c / ((n * (n - 1)) as f64);
        s = dd(1.0) - r2 * s / ((n * (n + 1)) as f64);
    }
    let s = r * s;
    match (k as i64).rem_euclid(4) {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    }
}

pub(crate) fn dd_sqrt(x: TwoFloat) -> TwoFloat {
    let hi = x.hi();
    if hi <= 0.0 {
        return dd(0.0);
    }
    let y = dd(hi.sqrt());
    y + (x - y * y) / (hi.sqrt() * 2.0)
}

impl Cdd {
    pub fn new(re: TwoFloat, im: TwoFloat) -> Self {
        Self { re, im }
    }
}

impl Add for Cdd {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Cdd {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Cdd {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Div for Cdd {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        // Smith's scaling keeps the intermediate squares in range
        if dd_abs(o.re).hi() >= dd_abs(o.im).hi() {
            let r = dd_div(o.im, o.re);
            let den = o.re + o.im * r;
            Self::new(dd_div(self.re + self.im * r, den), dd_div(self.im - self.re * r, den))
        } else {
            let r = dd_div(o.re, o.im);
            let den = o.re * r + o.im;
            Self::new(dd_div(self.re * r + self.im, den), dd_div(self.im * r - self.re, den))
        }
    }
}

impl Neg for Cdd {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Scalar for Cdd {
    // 2^-104 is the nominal double-double unit roundoff; the kernels lose a
    // few bits more, so round it up.
    const UNIT_ROUNDOFF: f64 = 1e-31;

    fn from_c64(z: Complex64) -> Self {
        Self::new(dd(z.re), dd(z.im))
    }

    fn to_c64(self) -> Complex64 {
        Complex64::new(to_f64(self.re), to_f64(self.im))
    }

    fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    fn sqrt(self) -> Self {
        if self.re.hi() == 0.0 && self.im.hi() == 0.0 {
            return Self::zero();
        }
        let r = dd_sqrt(self.re * self.re + self.im * self.im);
        if !is_negative(self.re) {
            let t = dd_sqrt((r + self.re) / 2.0);
            Self::new(t, dd_div(self.im, t * 2.0))
        } else {
            let t = dd_sqrt((r - self.re) / 2.0);
            let re = dd_div(dd_abs(self.im), t * 2.0);
            let im = if is_negative(self.im) { -t } else { t };
            Self::new(re, im)
        }
    }

    fn exp(self) -> Self {
        let e = dd_exp(self.re);
        let (c, s) = dd_cos_sin(self.im);
        Self::new(e * c, e * s)
    }

    fn cosh_sinh(self) -> (Self, Self) {
        let (ch, sh) = dd_cosh_sinh(self.re);
        let (c, s) = dd_cos_sin(self.im);
        (Self::new(ch * c, sh * s), Self::new(sh * c, ch * s))
    }

    fn cos_sin(self) -> (Self, Self) {
        let (c, s) = dd_cos_sin(self.re);
        let (ch, sh) = dd_cosh_sinh(self.im);
        (Self::new(c * ch, -(s * sh)), Self::new(s * ch, c * sh))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use astro_float::{BigFloat, Consts, RoundingMode};

    const P: usize = 256;
    const RM: RoundingMode = RoundingMode::ToEven;

    fn big(x: TwoFloat) -> BigFloat {
        BigFloat::from_f64(x.hi(), P).add(&BigFloat::from_f64(x.lo(), P), P, RM)
    }

    fn rel_err(got: TwoFloat, want: &BigFloat) -> f64 {
        let diff = big(got).sub(want, P, RM).abs();
        let q = diff.div(&want.abs(), P, RM);
        q.to_string().parse::<f64>().unwrap()
    }

    fn args() -> Vec<TwoFloat> {
        // arguments that are not plain doubles
        [-40.3, -7.1, -0.61, -0.2, 0.013, 0.37, 1.9, 3.3, 11.875, 26.5, 36.1, 90.0]
            .iter()
            .map(|&x| dd(x) + dd(x) / 7.0)
            .collect()
    }

    #[test]
    fn exp_matches_oracle() {
        let mut cc = Consts::new().unwrap();
        for x in args() {
            let want = big(x).exp(P, RM, &mut cc);
            assert!(rel_err(dd_exp(x), &want) < 1e-30, "exp({x:?})");
        }
    }

    #[test]
    fn hyperbolic_matches_oracle() {
        let mut cc = Consts::new().unwrap();
        for x in args() {
            let (c, s) = dd_cosh_sinh(x);
            let bx = big(x);
            assert!(rel_err(c, &bx.cosh(P, RM, &mut cc)) < 1e-30, "cosh({x:?})");
            assert!(rel_err(s, &bx.sinh(P, RM, &mut cc)) < 1e-30, "sinh({x:?})");
        }
    }

    #[test]
    fn trig_matches_oracle() {
        let mut cc = Consts::new().unwrap();
        for x in args() {
            let (c, s) = dd_cos_sin(x);
            let bx = big(x);
            // absolute error: near zeros of sin/cos relative error is not meaningful
            let ec = rel_err(c, &bx.cos(P, RM, &mut cc)) * c.hi().abs();
            let es = rel_err(s, &bx.sin(P, RM, &mut cc)) * s.hi().abs();
            assert!(ec < 1e-30 && es < 1e-30, "cos/sin({x:?}): {ec:e} {es:e}");
        }
    }

    #[test]
    fn division_matches_oracle() {
        let xs = args();
        for (a, b) in xs.iter().zip(xs.iter().rev()) {
            let want = big(*a).div(&big(*b), P, RM);
            assert!(rel_err(dd_div(*a, *b), &want) < 1e-31);
        }
    }

    #[test]
    fn sqrt_matches_oracle() {
        for x in args().into_iter().map(dd_abs) {
            let want = big(x).sqrt(P, RM);
            assert!(rel_err(dd_sqrt(x), &want) < 1e-31);
        }
    }

    #[test]
    fn complex_sqrt_squares_back() {
        for (re, im) in [(3.0, 4.0), (-3.0, 4.0), (-3.0, -4.0), (1e-3, -7.0), (-5.0, 0.0)] {
            let z = Cdd::from_c64(Complex64::new(re, im));
            let r = Scalar::sqrt(z);
            let back = (r * r - z).to_c64().norm();
            assert!(back < 1e-30 * z.abs());
            assert_eq!(
                r.to_c64().re.signum(),
                Complex64::new(re, im).sqrt().re.signum()
            );
        }
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = Cdd::from_c64(Complex64::new(1.25, -3.5));
        let b = Cdd::from_c64(Complex64::new(-0.3, 7.0)) * Cdd::from_c64(Complex64::new(1.0 / 3.0, 0.0));
        let q = (a * b) / b;
        assert!((q - a).abs() < 1e-31 * a.abs());
    }
}
