//! Second-order finite-difference solution of the two-segment boundary
//! value problem, independent of the closed-form kernels.
//!
//! Both models are discretized in displacement form with unknowns (W, W″)
//! per node, so the stiff shear coupling of the Timoshenko equations never
//! enters a difference quotient. The node at ℓ0 is duplicated; the two
//! copies are tied together by the interface conditions, with one-sided
//! three-point derivatives where a slope is needed.

use num_complex::Complex64;

use crate::beam_model::{BeamParams, DerivedParams, ModelKind, OutputKind};
use crate::error::{Error, Result};
use crate::numeric::band::BandBuilder;

pub const MIN_NODES: usize = 500;

struct Grid {
    n1: usize,
    n2: usize,
    h1: f64,
    h2: f64,
}

impl Grid {
    fn new(p: &BeamParams, n_nodes: usize) -> Self {
        let n1 = ((n_nodes as f64 * p.ell0 / p.ell).round() as usize).clamp(2, n_nodes - 2);
        let n2 = n_nodes - n1;
        Self { n1, n2, h1: p.ell0 / n1 as f64, h2: (p.ell - p.ell0) / n2 as f64 }
    }

    fn dim(&self) -> usize {
        2 * (self.n1 + self.n2 + 2)
    }

    /// Column of variable `v` at node `i` of segment `seg` (0 left, 1 right).
    fn col(&self, seg: usize, i: usize, v: usize) -> usize {
        if seg == 0 {
            2 * i + v
        } else {
            2 * (self.n1 + 1) + 2 * i + v
        }
    }
}

/// Rows are appended in node order so the matrix stays banded.
struct Assembler {
    a: BandBuilder,
    rhs: Vec<Complex64>,
    row: usize,
}

impl Assembler {
    fn new(n: usize) -> Self {
        Self { a: BandBuilder::new(n), rhs: vec![Complex64::new(0.0, 0.0); n], row: 0 }
    }

    fn push(&mut self, entries: &[(usize, Complex64)], rhs: Complex64) {
        for &(j, v) in entries {
            self.a.add(self.row, j, v);
        }
        self.rhs[self.row] = rhs;
        self.row += 1;
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Stencil of a one-sided derivative at a segment end, scaled by 2h:
/// forward (−3, 4, −1) at the left end, backward (3, −4, 1) at the right end.
fn one_sided(g: &Grid, seg: usize, at_right_end: bool, v: usize, factor: Complex64) -> [(usize, Complex64); 3] {
    let (n, h) = if seg == 0 { (g.n1, g.h1) } else { (g.n2, g.h2) };
    let f = factor / (2.0 * h);
    if at_right_end {
        [(g.col(seg, n, v), f * 3.0), (g.col(seg, n - 1, v), f * -4.0), (g.col(seg, n - 2, v), f)]
    } else {
        [(g.col(seg, 0, v), f * -3.0), (g.col(seg, 1, v), f * 4.0), (g.col(seg, 2, v), -f)]
    }
}

fn cat(parts: &[&[(usize, Complex64)]]) -> Vec<(usize, Complex64)> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

fn interior_tb(asm: &mut Assembler, g: &Grid, seg: usize, i: usize, dp: &DerivedParams, s2: Complex64) {
    let h = if seg == 0 { g.h1 } else { g.h2 };
    let w = |k: usize| g.col(seg, k, 0);
    let m = |k: usize| g.col(seg, k, 1);
    let k = dp.k_shear_rigidity;
    let kei = k * dp.ei;
    // W'' − M = 0, times h²
    asm.push(&[(w(i - 1), c(1.0)), (w(i), c(-2.0)), (w(i + 1), c(1.0)), (m(i), c(-h * h))], c(0.0));
    // KEI·M'' − (ρEI + KIρ)s²M + (K + Iρs²)ρs²W = 0, times h²/(KEI)
    let c2 = s2 * (dp.rho * dp.ei + k * dp.i_rho);
    let c0 = (s2 * dp.i_rho + k) * dp.rho * s2;
    asm.push(
        &[(m(i - 1), c(1.0)), (m(i), c(-2.0) - c2 * h * h / kei), (m(i + 1), c(1.0)), (w(i), c0 * h * h / kei)],
        c(0.0),
    );
}

fn interior_eb(asm: &mut Assembler, g: &Grid, seg: usize, i: usize, dp: &DerivedParams, s2: Complex64) {
    let h = if seg == 0 { g.h1 } else { g.h2 };
    let w = |k: usize| g.col(seg, k, 0);
    let m = |k: usize| g.col(seg, k, 1);
    // W'' − M = 0, times h²
    asm.push(&[(w(i - 1), c(1.0)), (w(i), c(-2.0)), (w(i + 1), c(1.0)), (m(i), c(-h * h))], c(0.0));
    // s²W + (EI/ρ)M'' = 0, times ρh²/EI
    asm.push(
        &[(m(i - 1), c(1.0)), (m(i), c(-2.0)), (m(i + 1), c(1.0)), (w(i), s2 * dp.rho * h * h / dp.ei)],
        c(0.0),
    );
}

/// Nodal values (W, second variable) on both segments for unit force.
struct Solution {
    g: Grid,
    x: Vec<Complex64>,
}

fn solve(model: ModelKind, p: &BeamParams, dp: &DerivedParams, s: Complex64, n_nodes: usize) -> Result<Solution> {
    let g = Grid::new(p, n_nodes);
    let mut asm = Assembler::new(g.dim());
    let s2 = s * s;
    let attach = s2 * p.mass + s * p.damping + p.stiffness;
    let one = c(1.0);
    let (l, r) = (g.n1, 0);

    // left end: W = 0 and W″ = 0, which for Timoshenko is Ψ′ = W″ − (ρs²/K)W = 0
    asm.push(&[(g.col(0, 0, 0), one)], c(0.0));
    asm.push(&[(g.col(0, 0, 1), one)], c(0.0));
    for i in 1..g.n1 {
        match model {
            ModelKind::Timoshenko => interior_tb(&mut asm, &g, 0, i, dp, s2),
            ModelKind::EulerBernoulli => interior_eb(&mut asm, &g, 0, i, dp, s2),
        }
    }

    // interface
    let w_l = g.col(0, l, 0);
    let w_r = g.col(1, r, 0);
    let v_l = g.col(0, l, 1);
    let v_r = g.col(1, r, 1);
    asm.push(&[(w_l, one), (w_r, -one)], c(0.0));
    asm.push(&[(v_l, one), (v_r, -one)], c(0.0));
    match model {
        ModelKind::Timoshenko => {
            // K(W′(ℓ0−) − W′(ℓ0+)) + (ms² + ds + ϰ)W(ℓ0) = U, divided by K
            let mut row = cat(&[&one_sided(&g, 0, true, 0, one), &one_sided(&g, 1, false, 0, -one)]);
            row.push((w_l, attach / dp.k_shear_rigidity));
            asm.push(&row, c(1.0 / dp.k_shear_rigidity));
            // Ψ continuous means W‴ + vW′ is; with the force row this fixes the jump of W‴
            let v = dp.k_shear_rigidity / dp.ei - dp.rho * s2 / dp.k_shear_rigidity;
            let mut row = cat(&[&one_sided(&g, 0, true, 1, one), &one_sided(&g, 1, false, 1, -one)]);
            row.push((w_l, -v * attach / dp.k_shear_rigidity));
            asm.push(&row, -v / dp.k_shear_rigidity);
        }
        ModelKind::EulerBernoulli => {
            // W′ continuous
            asm.push(&cat(&[&one_sided(&g, 0, true, 0, one), &one_sided(&g, 1, false, 0, -one)]), c(0.0));
            // (ms² + ds + ϰ)W(ℓ0) = EI(W‴(ℓ0−) − W‴(ℓ0+)) + U, divided by EI
            let mut row = cat(&[&one_sided(&g, 0, true, 1, one), &one_sided(&g, 1, false, 1, -one)]);
            row.push((w_l, -attach / dp.ei));
            asm.push(&row, c(-1.0 / dp.ei));
        }
    }

    for i in 1..g.n2 {
        match model {
            ModelKind::Timoshenko => interior_tb(&mut asm, &g, 1, i, dp, s2),
            ModelKind::EulerBernoulli => interior_eb(&mut asm, &g, 1, i, dp, s2),
        }
    }
    // right end
    asm.push(&[(g.col(1, g.n2, 0), one)], c(0.0));
    asm.push(&[(g.col(1, g.n2, 1), one)], c(0.0));
    debug_assert_eq!(asm.row, g.dim());

    let x = asm.a.factor()?.solve(&asm.rhs);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularDiscretization);
    }
    Ok(Solution { g, x })
}

impl Solution {
    fn value(&self, seg: usize, i: usize, v: usize) -> Complex64 {
        self.x[self.g.col(seg, i, v)]
    }

    /// Linear interpolation of a nodal quantity at x.
    fn at(&self, p: &BeamParams, x: f64, q: impl Fn(usize, usize) -> Complex64) -> Complex64 {
        let (seg, t, n) = if x <= p.ell0 {
            (0, x / self.g.h1, self.g.n1)
        } else {
            (1, (x - p.ell0) / self.g.h2, self.g.n2)
        };
        let i = (t.floor() as usize).min(n - 1);
        let frac = t - i as f64;
        q(seg, i) * (1.0 - frac) + q(seg, i + 1) * frac
    }
}

/// Discrete transfer function at the sensor for unit force.
pub fn fd_bvp_oracle(
    model: ModelKind,
    p: &BeamParams,
    dp: &DerivedParams,
    s: Complex64,
    ellk: f64,
    kind: OutputKind,
    n_nodes: usize,
) -> Result<Complex64> {
    if n_nodes < MIN_NODES {
        return Err(Error::InvalidSpec(format!("finite-difference oracle needs at least {MIN_NODES} nodes")));
    }
    if !(0.0..=p.ell).contains(&ellk) {
        return Err(Error::SensorOutOfRange { ellk, ell: p.ell });
    }
    let sol = solve(model, p, dp, s, n_nodes)?;
    Ok(match (model, kind) {
        (_, OutputKind::Displacement) => sol.at(p, ellk, |seg, i| sol.value(seg, i, 0)),
        (ModelKind::Timoshenko, OutputKind::Curvature) => {
            let v1 = dp.rho * s * s / dp.k_shear_rigidity;
            sol.at(p, ellk, |seg, i| sol.value(seg, i, 1) - v1 * sol.value(seg, i, 0))
        }
        (ModelKind::EulerBernoulli, OutputKind::Curvature) => sol.at(p, ellk, |seg, i| sol.value(seg, i, 1)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_few_nodes_rejected() {
        let p = BeamParams::reference();
        let r = fd_bvp_oracle(
            ModelKind::Timoshenko,
            &p,
            &p.derive(),
            Complex64::new(0.0, 10.0),
            p.ellk,
            OutputKind::Displacement,
            100,
        );
        assert!(matches!(r, Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn grid_splits_proportionally() {
        let p = BeamParams::reference();
        let g = Grid::new(&p, 4000);
        assert_eq!(g.n1 + g.n2, 4000);
        assert!((g.h1 - g.h2).abs() < 1e-3 * g.h1);
    }
}
