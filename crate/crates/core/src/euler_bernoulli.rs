//! Laplace-domain transfer functions of the Euler–Bernoulli beam.

use num_complex::Complex64;

use crate::beam_model::{BeamParams, DerivedParams, OutputKind, TransferValue};
use crate::error::Result;
use crate::numeric::linalg::Mat4;
use crate::numeric::{Cdd, NumericPolicy, Precision, Scalar};
use crate::timoshenko::{check_floor, check_overflow, check_sensor, last_inverse_column, BoundaryUnknowns};

/// γ, the principal fourth root of −ρs²/EI, together with γ⁴ itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EbWavenumber<S = Complex64> {
    pub s: S,
    pub gamma: S,
    /// −ρs²/EI, computed directly rather than as γ⁴.
    pub gamma4: S,
}

/// The four matrix-exponential kernels at one (x, s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZKernel4<S = Complex64> {
    pub z1: S,
    pub z2: S,
    pub z3: S,
    pub z4: S,
}

impl<S: Scalar> ZKernel4<S> {
    pub fn as_array(&self) -> [S; 4] {
        [self.z1, self.z2, self.z3, self.z4]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EbInterfaceSystem<S = Complex64> {
    pub mt: Mat4<S>,
    /// 2/EI; the right-hand side is (0, 0, 0, rhs_scale·U).
    pub rhs_scale: S,
    /// (ms² + ds + ϰ)/EI
    pub vt: S,
    pub g: EbWavenumber<S>,
}

fn sf<S: Scalar>(x: f64) -> S {
    S::from_f64(x)
}

pub fn eb_gamma<S: Scalar>(dp: &DerivedParams, s: Complex64, policy: &NumericPolicy) -> Result<EbWavenumber<S>> {
    check_floor(s, policy)?;
    let s = S::from_c64(s);
    let gamma4 = -(sf::<S>(dp.rho) * s * s) / sf(dp.ei);
    Ok(EbWavenumber { s, gamma: gamma4.sqrt().sqrt(), gamma4 })
}

const MAX_SERIES_TERMS: usize = 100;

fn series<S: Scalar>(x: f64, g4: S) -> [S; 4] {
    // z̃_j = 2 Σ x^{4k+j-1} γ^{4k} / (4k+j-1)!
    let x = sf::<S>(x);
    let mut f = [sf::<S>(2.0), x * sf(2.0), x * x, x * x * x / sf(3.0)];
    let mut z = f;
    let x4 = x * x * x * x;
    for k in 1..MAX_SERIES_TERMS {
        let mut converged = true;
        for j in 0..4 {
            let n = (4 * k + j) as f64;
            f[j] = f[j] * g4 * x4 / sf(n * (n - 1.0) * (n - 2.0) * (n - 3.0));
            z[j] = z[j] + f[j];
            if f[j].abs() > S::UNIT_ROUNDOFF * 1e-2 * z[j].abs() {
                converged = false;
            }
        }
        if converged {
            break;
        }
    }
    z
}

pub fn eb_z<S: Scalar>(x: f64, g: &EbWavenumber<S>, policy: &NumericPolicy) -> Result<ZKernel4<S>> {
    let gx = g.gamma * sf(x);
    let igx = gx * S::from_c64(Complex64::new(0.0, 1.0));
    check_overflow(&[gx, igx], policy)?;
    let z = if gx.abs() < policy.series_threshold {
        series(x, g.gamma4)
    } else {
        let (ch, sh) = gx.cosh_sinh();
        let (co, si) = gx.cos_sin();
        let g2 = g.gamma * g.gamma;
        [ch + co, (sh + si) / g.gamma, (ch - co) / g2, (sh - si) / (g2 * g.gamma)]
    };
    Ok(ZKernel4 { z1: z[0], z2: z[1], z3: z[2], z4: z[3] })
}

fn expm_from<S: Scalar>(z: &ZKernel4<S>, g4: S) -> Mat4<S> {
    let ZKernel4 { z1, z2, z3, z4 } = *z;
    let half = sf::<S>(0.5);
    [
        [z1, z2, z3, z4],
        [g4 * z4, z1, z2, z3],
        [g4 * z3, g4 * z4, z1, z2],
        [g4 * z2, g4 * z3, g4 * z4, z1],
    ]
    .map(|row| row.map(|e| e * half))
}

pub fn eb_expm<S: Scalar>(x: f64, g: &EbWavenumber<S>, policy: &NumericPolicy) -> Result<Mat4<S>> {
    Ok(expm_from(&eb_z(x, g, policy)?, g.gamma4))
}

/// Companion matrix of `W'''' = −(ρs²/EI) W`.
pub fn eb_companion(dp: &DerivedParams, s: Complex64) -> Mat4<Complex64> {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    [[z, o, z, z], [z, z, o, z], [z, z, z, o], [-(s * s) * dp.rho / dp.ei, z, z, z]]
}

pub fn eb_interface_matrix<S: Scalar>(
    p: &BeamParams,
    dp: &DerivedParams,
    s: Complex64,
    policy: &NumericPolicy,
) -> Result<EbInterfaceSystem<S>> {
    let g = eb_gamma::<S>(dp, s, policy)?;
    let zl = eb_z(p.ell0, &g, policy)?;
    let zr = eb_z(p.ell0 - p.ell, &g, policy)?;
    let ei = sf::<S>(dp.ei);
    let vt = (sf::<S>(p.mass) * g.s * g.s + sf::<S>(p.damping) * g.s + sf::<S>(p.stiffness)) / ei;
    let g4 = g.gamma4;
    let mt = [
        [zl.z2, zl.z4, -zr.z2, -zr.z4],
        [zl.z1, zl.z3, -zr.z1, -zr.z3],
        [g4 * zl.z4, zl.z2, -(g4 * zr.z4), -zr.z2],
        [vt * zl.z2 - g4 * zl.z3, vt * zl.z4 - zl.z1, g4 * zr.z3, zr.z1],
    ];
    Ok(EbInterfaceSystem { mt, rhs_scale: sf::<S>(2.0) / ei, vt, g })
}

pub fn eb_solve_boundary<S: Scalar>(
    sys: &EbInterfaceSystem<S>,
    u: S,
    policy: &NumericPolicy,
) -> Result<BoundaryUnknowns<S>> {
    let (y, _) = last_inverse_column(&sys.mt, policy)?;
    let f = sys.rhs_scale * u;
    Ok(BoundaryUnknowns { w1_0: y[0] * f, w3_0: y[1] * f, w1_l: y[2] * f, w3_l: y[3] * f })
}

pub fn eb_transfer_in<S: Scalar>(
    p: &BeamParams,
    dp: &DerivedParams,
    s: Complex64,
    ellk: f64,
    kind: OutputKind,
    policy: &NumericPolicy,
) -> Result<(S, TransferValue)> {
    check_sensor(p, ellk)?;
    let sys = eb_interface_matrix::<S>(p, dp, s, policy)?;
    let (y, cond) = last_inverse_column(&sys.mt, policy)?;
    let (x, ya, yb) = if ellk <= p.ell0 { (ellk, y[0], y[1]) } else { (ellk - p.ell, y[2], y[3]) };
    let z = eb_z(x, &sys.g, policy)?;
    let ei = sf::<S>(dp.ei);
    let h = match kind {
        OutputKind::Displacement => (z.z2 * ya + z.z4 * yb) / ei,
        OutputKind::Curvature => (sys.g.gamma4 * z.z4 * ya + z.z2 * yb) / ei,
    };
    Ok((h, TransferValue { h: h.to_c64(), perturbed: false, cond }))
}

/// H̃1 (displacement) or H̃2 (w″) at the sensor for unit input.
pub fn eb_transfer(
    p: &BeamParams,
    dp: &DerivedParams,
    s: Complex64,
    ellk: f64,
    kind: OutputKind,
    policy: &NumericPolicy,
) -> Result<TransferValue> {
    match policy.precision {
        Precision::Double => eb_transfer_in::<Complex64>(p, dp, s, ellk, kind, policy).map(|r| r.1),
        Precision::DoubleDouble => eb_transfer_in::<Cdd>(p, dp, s, ellk, kind, policy).map(|r| r.1),
    }
}

/// W and its first four derivatives at x.
pub fn eb_field<S: Scalar>(
    p: &BeamParams,
    sys: &EbInterfaceSystem<S>,
    bu: &BoundaryUnknowns<S>,
    x: f64,
    left: bool,
    policy: &NumericPolicy,
) -> Result<[S; 5]> {
    let (xr, w1, w3) = if left { (x, bu.w1_0, bu.w3_0) } else { (x - p.ell, bu.w1_l, bu.w3_l) };
    let z = eb_z(xr, &sys.g, policy)?;
    let e = expm_from(&z, sys.g.gamma4);
    let mut w = [S::zero(); 5];
    for i in 0..4 {
        w[i] = e[i][1] * w1 + e[i][3] * w3;
    }
    // derivative of the last row: ½γ⁴(z̃1, z̃2, z̃3, z̃4)
    w[4] = sys.g.gamma4 * (z.z2 * w1 + z.z4 * w3) * sf(0.5);
    Ok(w)
}
