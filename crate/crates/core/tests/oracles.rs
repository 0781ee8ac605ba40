mod common;

use beamtf::beam_model::{BeamParams, ModelKind, OutputKind};
use beamtf::error::Error;
use beamtf::euler_bernoulli::{eb_companion, eb_expm, eb_gamma};
use beamtf::numeric::linalg::from_c64;
use beamtf::numeric::{Cdd, NumericPolicy, Scalar};
use beamtf::response::transfer;
use beamtf::timoshenko::{tb_coeffs, tb_companion, tb_expm};
use beamtf::verification::{balanced_rel_diff, expm_series_oracle, fd_bvp_oracle};
use num_complex::Complex64;
use proptest::prelude::*;

const ELL: f64 = 1.905;
const SERIES_LIMIT: f64 = 1e4;

fn tb_gap(s: Complex64, x: f64) -> f64 {
    let pol = NumericPolicy::default();
    let dp = BeamParams::reference().derive();
    let wn = tb_coeffs::<Cdd>(&dp, s, &pol).unwrap();
    let e = tb_expm(x, &wn, &pol).unwrap();
    let o = expm_series_oracle(&from_c64::<Cdd>(&tb_companion(&dp, s)), x, SERIES_LIMIT).unwrap();
    balanced_rel_diff(&e, &o, wn.lambda1.abs().max(wn.lambda2.abs()))
}

fn eb_gap(s: Complex64, x: f64) -> f64 {
    let pol = NumericPolicy::default();
    let dp = BeamParams::reference().derive();
    let g = eb_gamma::<Cdd>(&dp, s, &pol).unwrap();
    let e = eb_expm(x, &g, &pol).unwrap();
    let o = expm_series_oracle(&from_c64::<Cdd>(&eb_companion(&dp, s)), x, SERIES_LIMIT).unwrap();
    balanced_rel_diff(&e, &o, g.gamma.abs())
}

#[test]
fn closed_form_exponentials_match_series_on_grid() {
    for nu in [1.0, 10.0, 100.0] {
        for x in [0.1 * ELL, 0.5 * ELL, ELL] {
            let s = common::s_hz(nu);
            assert!(tb_gap(s, x) <= 1e-9, "timoshenko nu={nu} x={x}");
            assert!(eb_gap(s, x) <= 1e-9, "euler nu={nu} x={x}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_exponentials_match_series(re in -20.0f64..20.0, nu in 1.0f64..250.0, x in -ELL..ELL) {
        let s = Complex64::new(re, 2.0 * std::f64::consts::PI * nu);
        prop_assert!(tb_gap(s, x) <= 1e-9);
        prop_assert!(eb_gap(s, x) <= 1e-9);
    }
}

#[test]
fn series_oracle_refuses_huge_arguments() {
    let dp = BeamParams::reference().derive();
    let a = tb_companion(&dp, common::s_hz(100.0));
    assert!(matches!(expm_series_oracle(&a, 1e6, 50.0), Err(Error::Overflow { .. })));
}

fn fd_gap(model: ModelKind, kind: OutputKind, nu: f64, n: usize) -> f64 {
    let p = BeamParams::reference();
    let dp = p.derive();
    let s = common::s_hz(nu);
    let h = transfer(model, &p, &dp, s, p.ellk, kind, &NumericPolicy::default()).unwrap().h;
    let f = fd_bvp_oracle(model, &p, &dp, s, p.ellk, kind, n).unwrap();
    common::rel(f, h)
}

#[test]
fn displacement_at_seven_hz_matches_finite_differences() {
    for model in [ModelKind::Timoshenko, ModelKind::EulerBernoulli] {
        let e = fd_gap(model, OutputKind::Displacement, 7.0, 4000);
        assert!(e <= 1e-3, "{model}: {e:e}");
    }
}

#[test]
fn finite_differences_converge_at_second_order() {
    for model in [ModelKind::Timoshenko, ModelKind::EulerBernoulli] {
        for kind in [OutputKind::Displacement, OutputKind::Curvature] {
            for nu in [7.0, 60.0] {
                let ratio = fd_gap(model, kind, nu, 1000) / fd_gap(model, kind, nu, 2000);
                assert!((3.6..=4.4).contains(&ratio), "{model} {kind} at {nu} Hz: ratio {ratio}");
            }
        }
    }
}

#[test]
fn sensor_off_the_attachment() {
    let p = BeamParams::reference();
    let dp = p.derive();
    let s = common::s_hz(7.0);
    for ellk in [0.3, 1.7] {
        for model in [ModelKind::Timoshenko, ModelKind::EulerBernoulli] {
            for kind in [OutputKind::Displacement, OutputKind::Curvature] {
                let h = transfer(model, &p, &dp, s, ellk, kind, &NumericPolicy::default()).unwrap().h;
                let f = fd_bvp_oracle(model, &p, &dp, s, ellk, kind, 4000).unwrap();
                assert!(common::rel(f, h) <= 1e-3, "{model} {kind} at {ellk} m");
            }
        }
    }
}
