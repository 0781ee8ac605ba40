//! Frequency sweeps and modal-peak extraction along s = 2πiν.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beam_model::{BeamParams, DerivedParams, ModelKind, OutputKind, TransferValue};
use crate::error::{Error, Result};
use crate::euler_bernoulli::eb_transfer;
use crate::numeric::NumericPolicy;
use crate::timoshenko::tb_transfer;

/// Transfer function of either model at complex s.
pub fn transfer(
    model: ModelKind,
    p: &BeamParams,
    dp: &DerivedParams,
    s: Complex64,
    ellk: f64,
    kind: OutputKind,
    policy: &NumericPolicy,
) -> Result<TransferValue> {
    match model {
        ModelKind::Timoshenko => tb_transfer(p, dp, s, ellk, kind, policy),
        ModelKind::EulerBernoulli => eb_transfer(p, dp, s, ellk, kind, policy),
    }
}

pub fn s_of_hz(nu: f64) -> Complex64 {
    Complex64::new(0.0, 2.0 * PI * nu)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

impl std::str::FromStr for Spacing {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "linear" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            _ => Err(format!("unknown spacing `{s}` (expected linear or log)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub model: ModelKind,
    pub kind: OutputKind,
    pub nu_min: f64,
    pub nu_max: f64,
    pub n_points: usize,
    pub spacing: Spacing,
}

impl SweepSpec {
    pub fn validate(&self, policy: &NumericPolicy) -> Result<()> {
        if self.n_points < 2 {
            return Err(Error::InvalidSpec(format!("need at least 2 points, got {}", self.n_points)));
        }
        if !(self.nu_min >= policy.nu_floor) {
            return Err(Error::InvalidSpec(format!(
                "nu_min = {} Hz is below the frequency floor {} Hz",
                self.nu_min, policy.nu_floor
            )));
        }
        if !(self.nu_min < self.nu_max && self.nu_max.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "empty frequency range [{}, {}]",
                self.nu_min, self.nu_max
            )));
        }
        Ok(())
    }

    /// Grid points, ascending, with both endpoints exact.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.n_points;
        let last = (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.nu_min;
                }
                if i == n - 1 {
                    return self.nu_max;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.nu_min + (self.nu_max - self.nu_min) * t,
                    Spacing::Log => (self.nu_min.ln() + (self.nu_max.ln() - self.nu_min.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

/// Outcome of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SampleStatus {
    Ok,
    Perturbed,
    NearSingular,
    Overflow,
    DegenerateFrequency,
    RepeatedRoot,
    ShearPole,
}

impl SampleStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SampleStatus::Ok => "ok",
            SampleStatus::Perturbed => "perturbed",
            SampleStatus::NearSingular => "near_singular",
            SampleStatus::Overflow => "overflow",
            SampleStatus::DegenerateFrequency => "degenerate_frequency",
            SampleStatus::RepeatedRoot => "repeated_root",
            SampleStatus::ShearPole => "shear_pole",
        }
    }

    fn from_guard(e: &Error) -> Option<Self> {
        Some(match e {
            Error::NearSingular { .. } | Error::SingularDiscretization => SampleStatus::NearSingular,
            Error::Overflow { .. } => SampleStatus::Overflow,
            Error::DegenerateFrequency { .. } => SampleStatus::DegenerateFrequency,
            Error::RepeatedRoot { .. } => SampleStatus::RepeatedRoot,
            Error::ShearPole { .. } => SampleStatus::ShearPole,
            _ => return None,
        })
    }
}

impl fmt::Display for SampleStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// |H|, dB and phase of one evaluated point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Response {
    pub h: Complex64,
    pub mag: f64,
    pub mag_db: f64,
    /// Principal argument in (−π, π].
    pub phase: f64,
}

impl Response {
    pub fn new(h: Complex64) -> Self {
        let mag = h.norm();
        let mut phase = h.arg();
        if phase <= -PI {
            phase = PI;
        }
        Self { h, mag, mag_db: 20.0 * mag.log10(), phase }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferSample {
    pub nu: f64,
    pub status: SampleStatus,
    /// None when a numeric guard fired.
    pub value: Option<Response>,
}

/// Evaluates one frequency; guard errors become a status, other errors pass through.
pub fn sample(
    model: ModelKind,
    kind: OutputKind,
    p: &BeamParams,
    dp: &DerivedParams,
    ellk: f64,
    nu: f64,
    policy: &NumericPolicy,
) -> Result<TransferSample> {
    match transfer(model, p, dp, s_of_hz(nu), ellk, kind, policy) {
        Ok(v) => Ok(TransferSample {
            nu,
            status: if v.perturbed { SampleStatus::Perturbed } else { SampleStatus::Ok },
            value: Some(Response::new(v.h)),
        }),
        Err(e) => match SampleStatus::from_guard(&e) {
            Some(status) => Ok(TransferSample { nu, status, value: None }),
            None => Err(e),
        },
    }
}

fn check_params(p: &BeamParams, ellk: f64) -> Result<()> {
    let v = p.validate();
    if !v.is_empty() {
        return Err(Error::Validation(v));
    }
    if !(0.0..=p.ell).contains(&ellk) {
        return Err(Error::SensorOutOfRange { ellk, ell: p.ell });
    }
    Ok(())
}

/// Samples on the spec grid in ascending ν. Evaluation is parallel; the
/// result does not depend on scheduling.
pub fn sweep(
    spec: &SweepSpec,
    p: &BeamParams,
    dp: &DerivedParams,
    ellk: f64,
    policy: &NumericPolicy,
) -> Result<Vec<TransferSample>> {
    spec.validate(policy)?;
    check_params(p, ellk)?;
    spec.grid()
        .into_par_iter()
        .map(|nu| sample(spec.model, spec.kind, p, dp, ellk, nu, policy))
        .collect()
}

/// Serial reference implementation of [`sweep`].
pub fn sweep_serial(
    spec: &SweepSpec,
    p: &BeamParams,
    dp: &DerivedParams,
    ellk: f64,
    policy: &NumericPolicy,
) -> Result<Vec<TransferSample>> {
    spec.validate(policy)?;
    check_params(p, ellk)?;
    spec.grid()
        .into_iter()
        .map(|nu| sample(spec.model, spec.kind, p, dp, ellk, nu, policy))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalPeak {
    pub nu_peak: f64,
    pub mag_peak: f64,
    /// Golden-section refinement reached the target width.
    pub refined: bool,
}

pub const DEFAULT_COARSE_POINTS: usize = 5000;
pub const PEAK_WIDTH_HZ: f64 = 1e-7;

/// Local maxima of |H(2πiν)| in `range`, ascending.
#[allow(clippy::too_many_arguments)]
pub fn find_peaks(
    model: ModelKind,
    kind: OutputKind,
    p: &BeamParams,
    dp: &DerivedParams,
    ellk: f64,
    range: (f64, f64),
    coarse_n: usize,
    policy: &NumericPolicy,
) -> Result<Vec<ModalPeak>> {
    let (lo, hi) = range;
    let spec = SweepSpec { model, kind, nu_min: lo, nu_max: hi, n_points: coarse_n, spacing: Spacing::Linear };
    spec.validate(policy)?;
    check_params(p, ellk)?;
    let grid = spec.grid();
    let mags: Vec<f64> = grid
        .par_iter()
        .map(|&nu| sample(model, kind, p, dp, ellk, nu, policy).map(|s| s.value.map_or(f64::NAN, |v| v.mag)))
        .collect::<Result<_>>()?;
    let mag_at = |nu: f64| -> f64 {
        match transfer(model, p, dp, s_of_hz(nu), ellk, kind, policy) {
            Ok(v) => v.h.norm(),
            Err(_) => f64::NAN,
        }
    };
    let brackets: Vec<(f64, f64)> = (1..grid.len() - 1)
        .filter(|&i| mags[i] > mags[i - 1] && mags[i] >= mags[i + 1])
        .map(|i| (grid[i - 1], grid[i + 1]))
        .collect();
    if brackets.is_empty() {
        return Err(Error::EmptyRange { lo, hi });
    }
    Ok(brackets
        .into_par_iter()
        .map(|(a, b)| golden_max(&mag_at, a, b, PEAK_WIDTH_HZ))
        .collect())
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximisation on [a, b]; every probe stays inside.
pub fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, width: f64) -> ModalPeak {
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut refined = true;
    while b - a > width {
        if !(f1.is_finite() && f2.is_finite()) {
            refined = false;
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    let (nu_peak, mag_peak) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    ModalPeak { nu_peak, mag_peak, refined }
}
