//! Shared numerical machinery: the evaluation policy, the complex scalar
//! abstraction used by the closed-form pipelines, and small dense and banded
//! linear solvers.

mod dd;
pub mod band;
pub mod linalg;

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

pub use dd::Cdd;

/// Floating-point format used to evaluate the transfer functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// IEEE double.
    Double,
    /// Double-double (about 32 significant digits). The interface matrices
    /// mix cosh(λℓ0)-sized and O(1) entries, and the transfer function is
    /// recovered through cancellation between them. Double precision loses
    /// roughly log10(e^{2 Re(λ1) ℓ0}) digits, which is 1e-8 relative at
    /// 50 Hz and 1e-4 at 200 Hz for the reference beam.
    #[default]
    DoubleDouble,
}

/// Thresholds shared by both beam models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    /// Frequencies below this (Hz) are rejected as degenerate.
    pub nu_floor: f64,
    /// Kernels switch to power series when max |λ·x| is below this.
    pub series_threshold: f64,
    /// Largest admissible |Re(λ·x)| before exp would overflow.
    pub overflow_limit: f64,
    /// |a² − b| below `repeated_root_tol · max(|a|², |b|)` counts as a
    /// repeated root.
    pub repeated_root_tol: f64,
    /// Multiplicative nudge applied to s when the roots coincide.
    pub repeated_root_nudge: f64,
    /// Condition-number limit for a double-precision solve. Extended
    /// precision scales it by the ratio of unit roundoffs.
    pub cond_limit: f64,
    pub precision: Precision,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            nu_floor: 1e-3,
            series_threshold: 1.0,
            overflow_limit: 700.0,
            repeated_root_tol: 1e-10,
            repeated_root_nudge: 1e-9,
            cond_limit: 1e12,
            precision: Precision::DoubleDouble,
        }
    }
}

impl NumericPolicy {
    pub fn double() -> Self {
        Self { precision: Precision::Double, ..Self::default() }
    }

    /// Lower bound on |s| in rad/s.
    pub fn s_floor(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.nu_floor
    }

    /// Condition limit for a solve carried out in scalar type `S`.
    pub fn cond_limit_for<S: Scalar>(&self) -> f64 {
        self.cond_limit * (f64::EPSILON / 2.0) / S::UNIT_ROUNDOFF
    }
}

/// Complex field used by the closed-form kernels, generic over precision.
pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const UNIT_ROUNDOFF: f64;

    fn from_c64(z: Complex64) -> Self;
    fn to_c64(self) -> Complex64;
    fn conj(self) -> Self;
    /// Principal square root; a zero imaginary part is treated as +0.
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn cosh_sinh(self) -> (Self, Self);
    fn cos_sin(self) -> (Self, Self);

    fn from_f64(x: f64) -> Self {
        Self::from_c64(Complex64::new(x, 0.0))
    }

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    /// Modulus, rounded to double.
    fn abs(self) -> f64 {
        self.to_c64().norm()
    }

    fn re(self) -> f64 {
        self.to_c64().re
    }

    fn powi(self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }
}

/// Replaces a negative-zero imaginary part by +0 so that principal roots
/// land on a fixed side of the branch cut.
pub fn canonical(z: Complex64) -> Complex64 {
    Complex64::new(z.re + 0.0, z.im + 0.0)
}

impl Scalar for Complex64 {
    const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

    fn from_c64(z: Complex64) -> Self {
        z
    }

    fn to_c64(self) -> Complex64 {
        self
    }

    fn conj(self) -> Self {
        Complex64::conj(&self)
    }

    fn sqrt(self) -> Self {
        Complex64::sqrt(canonical(self))
    }

    fn exp(self) -> Self {
        Complex64::exp(self)
    }

    fn cosh_sinh(self) -> (Self, Self) {
        (self.cosh(), self.sinh())
    }

    fn cos_sin(self) -> (Self, Self) {
        (self.cos(), self.sin())
    }
}
