//! Independent checks of the closed-form transfer functions: a series
//! matrix exponential, a finite-difference solution of the boundary value
//! problem, and residuals of the reconstructed field.

pub mod expm;
pub mod fd;

use std::fmt;

use num_complex::Complex64;

pub use expm::{balanced_rel_diff, expm_series_oracle};
pub use fd::fd_bvp_oracle;

use crate::beam_model::{BeamParams, DerivedParams, ModelKind, OutputKind};
use crate::error::Result;
use crate::euler_bernoulli::{eb_field, eb_interface_matrix, eb_solve_boundary, EbInterfaceSystem};
use crate::numeric::{Cdd, NumericPolicy, Precision, Scalar};
use crate::timoshenko::{tb_field, tb_interface_matrix, tb_solve_boundary, tb_transfer_in, InterfaceSystem};

pub const POINTS_PER_SEGMENT: usize = 24;
/// Largest accepted residual of the closed-form solution.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Largest accepted deviation between the two curvature expressions.
pub const H2_TOL: f64 = 1e-9;

/// Largest relative violations of the governing equations, the boundary
/// conditions and the interface conditions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResidualReport {
    pub ode: f64,
    /// Boundary values relative to the largest sampled magnitude of the same quantity.
    pub bc: f64,
    /// Continuity relative to sampled magnitudes; force balance relative to |U|.
    pub interface: f64,
    pub samples: usize,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.ode.max(self.bc).max(self.interface)
    }
}

impl fmt::Display for ResidualReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ode={:.3e} bc={:.3e} interface={:.3e} samples={}",
            self.ode, self.bc, self.interface, self.samples
        )
    }
}

/// num/den with 0/0 = 0, so an identically zero solution reports zero.
fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn sample_points(p: &BeamParams, extra: &[f64]) -> Vec<(f64, bool)> {
    let n = POINTS_PER_SEGMENT;
    let mut pts = Vec::with_capacity(2 * n + extra.len());
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        pts.push((p.ell0 * t, true));
        pts.push((p.ell0 + (p.ell - p.ell0) * t, false));
    }
    pts.extend(extra.iter().map(|&x| (x, x <= p.ell0)));
    pts
}

fn sf<S: Scalar>(x: f64) -> S {
    S::from_f64(x)
}

/// Residuals of the Timoshenko field obtained from `sys` with force U.
/// `sys` may be deliberately altered to test the detector.
pub fn tb_residuals<S: Scalar>(
    p: &BeamParams,
    dp: &DerivedParams,
    sys: &InterfaceSystem<S>,
    u: S,
    extra: &[f64],
    policy: &NumericPolicy,
) -> Result<ResidualReport> {
    let bu = tb_solve_boundary(sys, u, policy)?;
    let s = sys.wn.s;
    let s2 = s * s;
    let (k, ei, rho, irho) = (sf::<S>(dp.k_shear_rigidity), sf::<S>(dp.ei), sf::<S>(dp.rho), sf::<S>(dp.i_rho));
    let pts = sample_points(p, extra);
    let mut ode: f64 = 0.0;
    let (mut max_w, mut max_psi, mut max_dpsi): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for &(x, left) in &pts {
        let f = tb_field(p, sys, &bu, x, left, policy)?;
        let t = [k * ei * f.w[4], (rho * ei + k * irho) * s2 * f.w[2], (k + irho * s2) * rho * s2 * f.w[0]];
        ode = ode.max(ratio((t[0] - t[1] + t[2]).abs(), t.iter().map(|v| v.abs()).sum()));
        let e = [k * f.w[2], k * f.dpsi, rho * s2 * f.w[0]];
        ode = ode.max(ratio((e[0] - e[1] - e[2]).abs(), e.iter().map(|v| v.abs()).sum()));
        max_w = max_w.max(f.w[0].abs());
        max_psi = max_psi.max(f.psi.abs());
        max_dpsi = max_dpsi.max(f.dpsi.abs());
    }
    let f0 = tb_field(p, sys, &bu, 0.0, true, policy)?;
    let fl = tb_field(p, sys, &bu, p.ell, false, policy)?;
    let bc = ratio(f0.w[0].abs().max(fl.w[0].abs()), max_w)
        .max(ratio(f0.dpsi.abs().max(fl.dpsi.abs()), max_dpsi));
    let a = tb_field(p, sys, &bu, p.ell0, true, policy)?;
    let b = tb_field(p, sys, &bu, p.ell0, false, policy)?;
    let attach = sf::<S>(p.mass) * s2 + sf::<S>(p.damping) * s + sf::<S>(p.stiffness);
    let force = k * (a.w[1] - b.w[1]) + attach * a.w[0] - u;
    let interface = ratio((a.w[0] - b.w[0]).abs(), max_w)
        .max(ratio((a.psi - b.psi).abs(), max_psi))
        .max(ratio((a.dpsi - b.dpsi).abs(), max_dpsi))
        .max(ratio(force.abs(), u.abs()));
    Ok(ResidualReport { ode, bc, interface, samples: pts.len() })
}

/// Residuals of the Euler–Bernoulli field obtained from `sys` with force U.
pub fn eb_residuals<S: Scalar>(
    p: &BeamParams,
    dp: &DerivedParams,
    sys: &EbInterfaceSystem<S>,
    u: S,
    extra: &[f64],
    policy: &NumericPolicy,
) -> Result<ResidualReport> {
    let bu = eb_solve_boundary(sys, u, policy)?;
    let s = sys.g.s;
    let s2 = s * s;
    let (ei, rho) = (sf::<S>(dp.ei), sf::<S>(dp.rho));
    let pts = sample_points(p, extra);
    let mut ode: f64 = 0.0;
    let mut max = [0.0f64; 4];
    for &(x, left) in &pts {
        let w = eb_field(p, sys, &bu, x, left, policy)?;
        let t = [s2 * w[0], ei / rho * w[4]];
        ode = ode.max(ratio((t[0] + t[1]).abs(), t[0].abs() + t[1].abs()));
        for j in 0..4 {
            max[j] = max[j].max(w[j].abs());
        }
    }
    let w0 = eb_field(p, sys, &bu, 0.0, true, policy)?;
    let wl = eb_field(p, sys, &bu, p.ell, false, policy)?;
    let bc = ratio(w0[0].abs().max(wl[0].abs()), max[0]).max(ratio(w0[2].abs().max(wl[2].abs()), max[2]));
    let a = eb_field(p, sys, &bu, p.ell0, true, policy)?;
    let b = eb_field(p, sys, &bu, p.ell0, false, policy)?;
    let attach = sf::<S>(p.mass) * s2 + sf::<S>(p.damping) * s + sf::<S>(p.stiffness);
    let force = ei * (a[3] - b[3]) + u - attach * a[0];
    let mut interface = ratio(force.abs(), u.abs());
    for j in 0..3 {
        interface = interface.max(ratio((a[j] - b[j]).abs(), max[j]));
    }
    Ok(ResidualReport { ode, bc, interface, samples: pts.len() })
}

fn residual_check_in<S: Scalar>(
    model: ModelKind,
    p: &BeamParams,
    dp: &DerivedParams,
    s: Complex64,
    ellk: f64,
    u: Complex64,
    policy: &NumericPolicy,
) -> Result<ResidualReport> {
    let u = S::from_c64(u);
    match model {
        ModelKind::Timoshenko => {
            let sys = tb_interface_matrix::<S>(p, dp, s, policy)?;
            tb_residuals(p, dp, &sys, u, &[ellk], policy)
        }
        ModelKind::EulerBernoulli => {
            let sys = eb_interface_matrix::<S>(p, dp, s, policy)?;
            eb_residuals(p, dp, &sys, u, &[ellk], policy)
        }
    }
}

/// Residuals for force U, evaluated in the policy's precision.
pub fn residual_check_with_input(
    model: ModelKind,
    p: &BeamParams,
    dp: &DerivedParams,
    s: Complex64,
    ellk: f64,
    u: Complex64,
    policy: &NumericPolicy,
) -> Result<ResidualReport> {
    match policy.precision {
        Precision::Double => residual_check_in::<Complex64>(model, p, dp, s, ellk, u, policy),
        Precision::DoubleDouble => residual_check_in::<Cdd>(model, p, dp, s, ellk, u, policy),
    }
}

/// Residuals for unit force.
pub fn residual_check(
    model: ModelKind,
    p: &BeamParams,
    dp: &DerivedParams,
    s: Complex64,
    ellk: f64,
    policy: &NumericPolicy,
) -> Result<ResidualReport> {
    residual_check_with_input(model, p, dp, s, ellk, Complex64::new(1.0, 0.0), policy)
}

fn h2_in<S: Scalar>(
    p: &BeamParams,
    dp: &DerivedParams,
    s: Complex64,
    ellk: f64,
    u: Complex64,
    policy: &NumericPolicy,
) -> Result<f64> {
    let (h2, _) = tb_transfer_in::<S>(p, dp, s, ellk, OutputKind::Curvature, policy)?;
    let sys = tb_interface_matrix::<S>(p, dp, s, policy)?;
    let u = S::from_c64(u);
    let bu = tb_solve_boundary(&sys, u, policy)?;
    let f = tb_field(p, &sys, &bu, ellk, ellk <= p.ell0, policy)?;
    let y = h2 * u;
    Ok(ratio((y - (f.w[2] - sys.aux.v1 * f.w[0])).abs(), y.abs()))
}

/// |H2·U − (W″ − (ρs²/K)W)| / |H2·U| at the sensor, W being the field for force U.
pub fn h2_consistency_with_input(
    p: &BeamParams,
    dp: &DerivedParams,
    s: Complex64,
    ellk: f64,
    u: Complex64,
    policy: &NumericPolicy,
) -> Result<f64> {
    match policy.precision {
        Precision::Double => h2_in::<Complex64>(p, dp, s, ellk, u, policy),
        Precision::DoubleDouble => h2_in::<Cdd>(p, dp, s, ellk, u, policy),
    }
}

pub fn h2_consistency(
    p: &BeamParams,
    dp: &DerivedParams,
    s: Complex64,
    ellk: f64,
    policy: &NumericPolicy,
) -> Result<f64> {
    h2_consistency_with_input(p, dp, s, ellk, Complex64::new(1.0, 0.0), policy)
}
