//! Laplace-domain transfer functions of the Timoshenko beam.
//!
//! The deflection obeys `W'''' = 2a W'' - b W`, whose companion matrix has
//! the closed-form exponential built from the kernels `z1..z7` below.

use num_complex::Complex64;

use crate::beam_model::{BeamParams, DerivedParams, OutputKind, TransferValue};
use crate::error::{Error, Result};
use crate::numeric::linalg::{self, Mat4, Vec4};
use crate::numeric::{Cdd, NumericPolicy, Precision, Scalar};

/// Coefficients and characteristic roots of the fourth-order ODE at one s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TbWavenumbers<S = Complex64> {
    /// Laplace variable actually used (differs from the request when perturbed).
    pub s: S,
    pub a: S,
    pub b: S,
    pub lambda1: S,
    pub lambda2: S,
    /// λ1², λ2² and their difference, kept separately to avoid re-squaring.
    pub lambda1_sq: S,
    pub lambda2_sq: S,
    pub diff: S,
    pub perturbed: bool,
}

impl<S: Scalar> TbWavenumbers<S> {
    /// Same coefficients with the roots replaced, e.g. by another branch.
    pub fn with_roots(&self, lambda1: S, lambda2: S) -> Self {
        let p = lambda1 * lambda1;
        let q = lambda2 * lambda2;
        Self { lambda1, lambda2, lambda1_sq: p, lambda2_sq: q, diff: p - q, ..*self }
    }

    /// λ1²·λ2², which equals b.
    pub fn l(&self) -> S {
        self.lambda1_sq * self.lambda2_sq
    }
}

/// The seven matrix-exponential kernels at one (x, s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZKernel7<S = Complex64> {
    pub z1: S,
    pub z2: S,
    pub z3: S,
    pub z4: S,
    pub z5: S,
    pub z6: S,
    pub z7: S,
}

impl<S: Scalar> ZKernel7<S> {
    pub fn as_array(&self) -> [S; 7] {
        [self.z1, self.z2, self.z3, self.z4, self.z5, self.z6, self.z7]
    }
}

/// Scalars of the interface conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TbAux<S = Complex64> {
    /// EI/(K + Iρ s²)
    pub u: S,
    /// K/EI − ρs²/K
    pub v: S,
    /// ρs²/K
    pub v1: S,
    /// (ms² + ds + ϰ)/K
    pub v2: S,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceSystem<S = Complex64> {
    pub m: Mat4<S>,
    /// (λ1² − λ2²)/K; the right-hand side is (0, 0, 0, rhs_scale·U).
    pub rhs_scale: S,
    pub aux: TbAux<S>,
    pub wn: TbWavenumbers<S>,
}

/// W′ and W‴ at both ends (W and W″ vanish there).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryUnknowns<S = Complex64> {
    pub w1_0: S,
    pub w3_0: S,
    pub w1_l: S,
    pub w3_l: S,
}

impl<S: Scalar> BoundaryUnknowns<S> {
    pub fn as_array(&self) -> Vec4<S> {
        [self.w1_0, self.w3_0, self.w1_l, self.w3_l]
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn sf<S: Scalar>(x: f64) -> S {
    S::from_f64(x)
}

pub(crate) fn check_floor(s: Complex64, policy: &NumericPolicy) -> Result<()> {
    let abs_s = s.norm();
    if !(abs_s >= policy.s_floor()) {
        return Err(Error::DegenerateFrequency { abs_s, floor: policy.s_floor() });
    }
    Ok(())
}

fn coeffs_at<S: Scalar>(dp: &DerivedParams, s: S) -> Result<(S, S, S)> {
    let s2 = s * s;
    let k = sf::<S>(dp.k_shear_rigidity);
    let ei = sf::<S>(dp.ei);
    let shear = k + sf::<S>(dp.i_rho) * s2;
    if shear.abs() <= 1e-12 * dp.k_shear_rigidity {
        let z = s.to_c64();
        return Err(Error::ShearPole { re: z.re, im: z.im });
    }
    let a = s2 / sf(2.0) * (sf::<S>(dp.rho) / k + sf::<S>(dp.i_rho) / ei);
    let b = shear * sf::<S>(dp.rho) * s2 / (k * ei);
    let disc = a * a - b;
    Ok((a, b, disc))
}

/// Wavenumbers a, b, λ1, λ2 at s. λ1, λ2 are principal roots of a ± √(a²−b);
/// the smaller of λ1², λ2² is recovered from b to avoid cancellation.
pub fn tb_coeffs<S: Scalar>(dp: &DerivedParams, s: Complex64, policy: &NumericPolicy) -> Result<TbWavenumbers<S>> {
    check_floor(s, policy)?;
    let mut s_used = S::from_c64(s);
    let mut perturbed = false;
    let (mut a, mut b, mut disc) = coeffs_at(dp, s_used)?;
    let repeated = |a: S, b: S, disc: S| disc.abs() < policy.repeated_root_tol * (a.abs().powi(2)).max(b.abs());
    if repeated(a, b, disc) {
        s_used = s_used * sf::<S>(1.0 + policy.repeated_root_nudge);
        (a, b, disc) = coeffs_at(dp, s_used)?;
        perturbed = true;
        if repeated(a, b, disc) {
            return Err(Error::RepeatedRoot { re: s.re, im: s.im });
        }
    }
    let r = disc.sqrt();
    let plus = a + r;
    let minus = a - r;
    let (p, q) = if plus.abs() >= minus.abs() { (plus, b / plus) } else { (b / minus, minus) };
    Ok(TbWavenumbers {
        s: s_used,
        a,
        b,
        lambda1: p.sqrt(),
        lambda2: q.sqrt(),
        lambda1_sq: p,
        lambda2_sq: q,
        diff: r + r,
        perturbed,
    })
}

pub(crate) fn check_overflow<S: Scalar>(args: &[S], policy: &NumericPolicy) -> Result<()> {
    for z in args {
        let e = z.re().abs();
        if !(e <= policy.overflow_limit) {
            return Err(Error::Overflow { exponent: e, limit: policy.overflow_limit });
        }
    }
    Ok(())
}

const MAX_SERIES_TERMS: usize = 200;

fn kernels<S: Scalar>(x: f64, wn: &TbWavenumbers<S>, policy: &NumericPolicy) -> Result<[S; 7]> {
    let (p, q) = (wn.lambda1_sq, wn.lambda2_sq);
    let l1x = wn.lambda1 * sf(x);
    let l2x = wn.lambda2 * sf(x);
    check_overflow(&[l1x, l2x], policy)?;
    if l1x.abs().max(l2x.abs()) < policy.series_threshold {
        return Ok(series(x, p, q, wn.diff));
    }
    let (c1, sh1) = l1x.cosh_sinh();
    let (c2, sh2) = l2x.cosh_sinh();
    let s1 = sh1 / wn.lambda1;
    let s2 = sh2 / wn.lambda2;
    Ok([
        p * c2 - q * c1,
        p * s2 - q * s1,
        c1 - c2,
        s1 - s2,
        p * s1 - q * s2,
        p * c1 - q * c2,
        p * p * s1 - q * q * s2,
    ])
}

/// Power series in x with D_k = p^k − q^k = (p − q)·h_{k−1}(p, q), so no
/// difference of nearly equal numbers is ever formed.
fn series<S: Scalar>(x: f64, p: S, q: S, diff: S) -> [S; 7] {
    let x = sf::<S>(x);
    let x2 = x * x;
    let pq = p * q;
    // d[k] = D_k
    let mut d = vec![S::zero(), diff];
    let mut h = S::one();
    let mut qk = S::one();
    let mut push_next = |d: &mut Vec<S>| {
        qk = qk * q;
        h = p * h + qk;
        d.push(diff * h);
    };
    push_next(&mut d);
    let mut z = [S::zero(); 7];
    let mut fe = S::one(); // x^{2k}/(2k)!
    let mut fo = x; // x^{2k+1}/(2k+1)!
    z[0] = diff;
    z[1] = x * diff;
    for k in 0..MAX_SERIES_TERMS {
        while d.len() < k + 3 {
            push_next(&mut d);
        }
        let mut terms = [S::zero(); 7];
        if k >= 2 {
            terms[0] = -(pq * fe * d[k - 1]);
            terms[1] = -(pq * fo * d[k - 1]);
        }
        terms[2] = fe * d[k];
        terms[3] = fo * d[k];
        terms[4] = fo * d[k + 1];
        terms[5] = fe * d[k + 1];
        terms[6] = fo * d[k + 2];
        let mut converged = k >= 2;
        for (zi, t) in z.iter_mut().zip(terms) {
            *zi = *zi + t;
            if t.abs() > S::UNIT_ROUNDOFF * 1e-2 * zi.abs() {
                converged = false;
            }
        }
        if converged {
            break;
        }
        let n = (2 * k + 2) as f64;
        fe = fe * x2 / sf((n - 1.0) * n);
        fo = fo * x2 / sf(n * (n + 1.0));
    }
    z
}

/// The seven kernels at signed position x.
pub fn tb_z<S: Scalar>(x: f64, wn: &TbWavenumbers<S>, policy: &NumericPolicy) -> Result<ZKernel7<S>> {
    let z = kernels(x, wn, policy)?;
    Ok(ZKernel7 { z1: z[0], z2: z[1], z3: z[2], z4: z[3], z5: z[4], z6: z[5], z7: z[6] })
}

fn expm_from<S: Scalar>(z: &[S; 7], wn: &TbWavenumbers<S>) -> Mat4<S> {
    let l = wn.l();
    let [z1, z2, z3, z4, z5, z6, z7] = *z;
    let m = [
        [z1, z2, z3, z4],
        [-(l * z4), z1, z5, z3],
        [-(l * z3), -(l * z4), z6, z5],
        [-(l * z5), -(l * z3), z7, z6],
    ];
    let f = S::one() / wn.diff;
    m.map(|row| row.map(|e| e * f))
}

/// e^{x𝒜} for the companion matrix of the fourth-order ODE.
pub fn tb_expm<S: Scalar>(x: f64, wn: &TbWavenumbers<S>, policy: &NumericPolicy) -> Result<Mat4<S>> {
    Ok(expm_from(&kernels(x, wn, policy)?, wn))
}

/// Companion matrix 𝒜 of `W'''' = 2a W'' − b W`.
pub fn tb_companion(dp: &DerivedParams, s: Complex64) -> Mat4<Complex64> {
    let s2 = s * s;
    let k = dp.k_shear_rigidity;
    let a = s2 / 2.0 * (dp.rho / k + dp.i_rho / dp.ei);
    let b = (k + dp.i_rho * s2) * dp.rho * s2 / (k * dp.ei);
    let z = c(0.0);
    let o = c(1.0);
    [[z, o, z, z], [z, z, o, z], [z, z, z, o], [-b, z, a * 2.0, z]]
}

pub fn tb_aux<S: Scalar>(p: &BeamParams, dp: &DerivedParams, s: S) -> TbAux<S> {
    let s2 = s * s;
    let k = sf::<S>(dp.k_shear_rigidity);
    let ei = sf::<S>(dp.ei);
    let rs2 = sf::<S>(dp.rho) * s2;
    TbAux {
        u: ei / (k + sf::<S>(dp.i_rho) * s2),
        v: k / ei - rs2 / k,
        v1: rs2 / k,
        v2: (sf::<S>(p.mass) * s2 + sf::<S>(p.damping) * s + sf::<S>(p.stiffness)) / k,
    }
}

/// Interface matrix M, entry for entry.
pub fn tb_interface_matrix<S: Scalar>(
    p: &BeamParams,
    dp: &DerivedParams,
    s: Complex64,
    policy: &NumericPolicy,
) -> Result<InterfaceSystem<S>> {
    let wn = tb_coeffs::<S>(dp, s, policy)?;
    let aux = tb_aux(p, dp, wn.s);
    let zl = tb_z(p.ell0, &wn, policy)?;
    let zr = tb_z(p.ell0 - p.ell, &wn, policy)?;
    let l = wn.l();
    let TbAux { v, v1, v2, .. } = aux;
    let m = [
        [zl.z2, zl.z4, -zr.z2, -zr.z4],
        [
            v * zl.z1 - l * zl.z3,
            v * zl.z3 + zl.z6,
            l * zr.z3 - v * zr.z1,
            -zr.z6 - v * zr.z3,
        ],
        [
            v1 * zl.z2 + l * zl.z4,
            v1 * zl.z4 - zl.z5,
            -(l * zr.z4) - v1 * zr.z2,
            zr.z5 - v1 * zr.z4,
        ],
        [zl.z1 + v2 * zl.z2, zl.z3 + v2 * zl.z4, -zr.z1, -zr.z3],
    ];
    Ok(InterfaceSystem { m, rhs_scale: wn.diff / sf(dp.k_shear_rigidity), aux, wn })
}

/// Fourth column of M⁻¹, obtained by a solve, with the condition estimate.
pub(crate) fn last_inverse_column<S: Scalar>(m: &Mat4<S>, policy: &NumericPolicy) -> Result<(Vec4<S>, f64)> {
    let e4 = [S::zero(), S::zero(), S::zero(), S::one()];
    let sol = linalg::solve_equilibrated(m, &e4, policy.cond_limit_for::<S>())?;
    Ok((sol.x, sol.cond))
}

/// Boundary unknowns for force amplitude U.
pub fn tb_solve_boundary<S: Scalar>(
    sys: &InterfaceSystem<S>,
    u: S,
    policy: &NumericPolicy,
) -> Result<BoundaryUnknowns<S>> {
    let (y, _) = last_inverse_column(&sys.m, policy)?;
    let f = sys.rhs_scale * u;
    Ok(BoundaryUnknowns { w1_0: y[0] * f, w3_0: y[1] * f, w1_l: y[2] * f, w3_l: y[3] * f })
}

pub(crate) fn check_sensor(p: &BeamParams, ellk: f64) -> Result<()> {
    if !(ellk >= 0.0 && ellk <= p.ell) {
        return Err(Error::SensorOutOfRange { ellk, ell: p.ell });
    }
    Ok(())
}

/// H1 or H2 at s in scalar type S.
pub fn tb_transfer_in<S: Scalar>(
    p: &BeamParams,
    dp: &DerivedParams,
    s: Complex64,
    ellk: f64,
    kind: OutputKind,
    policy: &NumericPolicy,
) -> Result<(S, TransferValue)> {
    check_sensor(p, ellk)?;
    let sys = tb_interface_matrix::<S>(p, dp, s, policy)?;
    let (y, cond) = last_inverse_column(&sys.m, policy)?;
    let (x, ya, yb) = if ellk <= p.ell0 { (ellk, y[0], y[1]) } else { (ellk - p.ell, y[2], y[3]) };
    let z = tb_z(x, &sys.wn, policy)?;
    let k = sf::<S>(dp.k_shear_rigidity);
    let h = match kind {
        OutputKind::Displacement => (z.z2 * ya + z.z4 * yb) / k,
        OutputKind::Curvature => {
            let rs2 = sf::<S>(dp.rho) * sys.wn.s * sys.wn.s;
            let l = sys.wn.l();
            ((-(l * k * z.z4) - rs2 * z.z2) * ya + (k * z.z5 - rs2 * z.z4) * yb) / (k * k)
        }
    };
    Ok((h, TransferValue { h: h.to_c64(), perturbed: sys.wn.perturbed, cond }))
}

/// H1 (displacement) or H2 (ψ′) at the sensor for unit input.
pub fn tb_transfer(
    p: &BeamParams,
    dp: &DerivedParams,
    s: Complex64,
    ellk: f64,
    kind: OutputKind,
    policy: &NumericPolicy,
) -> Result<TransferValue> {
    match policy.precision {
        Precision::Double => tb_transfer_in::<Complex64>(p, dp, s, ellk, kind, policy).map(|r| r.1),
        Precision::DoubleDouble => tb_transfer_in::<Cdd>(p, dp, s, ellk, kind, policy).map(|r| r.1),
    }
}

/// W and its first four derivatives plus Ψ = u(W‴ + vW′) and its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TbField<S = Complex64> {
    pub w: [S; 5],
    pub psi: S,
    pub dpsi: S,
}

/// Field at x reconstructed from the boundary unknowns; `left` selects the
/// segment (needed at x = ℓ0, where W‴ jumps).
pub fn tb_field<S: Scalar>(
    p: &BeamParams,
    sys: &InterfaceSystem<S>,
    bu: &BoundaryUnknowns<S>,
    x: f64,
    left: bool,
    policy: &NumericPolicy,
) -> Result<TbField<S>> {
    let (xr, w1, w3) = if left { (x, bu.w1_0, bu.w3_0) } else { (x - p.ell, bu.w1_l, bu.w3_l) };
    let z = kernels(xr, &sys.wn, policy)?;
    let e = expm_from(&z, &sys.wn);
    let l = sys.wn.l();
    let f = S::one() / sys.wn.diff;
    let mut w = [S::zero(); 5];
    for i in 0..4 {
        w[i] = e[i][1] * w1 + e[i][3] * w3;
    }
    // derivative of the last row of e^{x𝒜}
    w[4] = (-(l * z[4]) * w1 + z[6] * w3) * f;
    let TbAux { u, v, .. } = sys.aux;
    Ok(TbField { w, psi: u * (w[3] + v * w[1]), dpsi: u * (w[4] + v * w[2]) })
}
