use thiserror::Error;

use crate::beam_model::Violation;

/// Failures raised by the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate frequency: |s| = {abs_s:.3e} rad/s is below the floor {floor:.3e} rad/s")]
    DegenerateFrequency { abs_s: f64, floor: f64 },

    #[error("repeated characteristic root at s = {re:.6e}{im:+.6e}i")]
    RepeatedRoot { re: f64, im: f64 },

    #[error("s = {re:.6e}{im:+.6e}i is a pole of the shear coupling K + I_rho s^2")]
    ShearPole { re: f64, im: f64 },

    #[error("exponent overflow: |Re(lambda x)| = {exponent:.3e} exceeds {limit}")]
    Overflow { exponent: f64, limit: f64 },

    #[error("interface matrix is near singular (condition estimate {cond:.3e}, limit {limit:.3e})")]
    NearSingular { cond: f64, limit: f64 },

    #[error("no local maximum of |H| in [{lo}, {hi}] Hz")]
    EmptyRange { lo: f64, hi: f64 },

    #[error("finite-difference system is singular")]
    SingularDiscretization,

    #[error("invalid sweep: {0}")]
    InvalidSpec(String),

    #[error("sensor position {ellk} m lies outside [0, {ell}] m")]
    SensorOutOfRange { ellk: f64, ell: f64 },

    #[error("invalid parameters: {}", format_violations(.0))]
    Validation(Vec<Violation>),
}

impl Error {
    /// Guard errors are numerical hazards at a particular frequency, as
    /// opposed to bad input.
    pub fn is_numeric_guard(&self) -> bool {
        matches!(
            self,
            Error::DegenerateFrequency { .. }
                | Error::RepeatedRoot { .. }
                | Error::ShearPole { .. }
                | Error::Overflow { .. }
                | Error::NearSingular { .. }
                | Error::SingularDiscretization
        )
    }
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
