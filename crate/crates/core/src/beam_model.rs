//! Physical parameters of the beam and its attachment.
//!
//! Everything is stored in SI base units. Unit conversion from the mixed
//! units used in configuration files happens in [`crate::config`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Shear correction factor of a rectangular cross-section.
pub const RECTANGULAR_SHEAR_FACTOR: f64 = 5.0 / 6.0;

/// Beam, attachment and sensor parameters in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamParams {
    /// Beam length, m.
    pub ell: f64,
    /// Attachment (actuator) position, m.
    pub ell0: f64,
    /// Sensor position, m.
    pub ellk: f64,
    /// Density, kg/m³.
    pub rho0: f64,
    /// Cross-section area, m².
    pub area: f64,
    /// Young's modulus, Pa.
    pub youngs: f64,
    /// Shear modulus, Pa.
    pub shear_modulus: f64,
    /// Area moment of inertia, m⁴.
    pub inertia: f64,
    /// Dimensionless shear correction factor.
    pub k_shear: f64,
    /// Attached mass, kg.
    pub mass: f64,
    /// Spring stiffness of the attachment, N/m.
    pub stiffness: f64,
    /// Viscous damping coefficient at the attachment, N·s/m.
    pub damping: f64,
}

impl BeamParams {
    /// The aluminium test beam with shaker attachment used throughout the
    /// examples: ℓ = 1.905 m, ℓ0 = 1.4 m, A = 2.25 cm², m = 0.1 kg,
    /// ϰ = 7 N/mm, ρ0 = 2700 kg/m³, E = 69 GPa, G = 25.5 GPa,
    /// I = 1.6875e-10 m⁴, colocated sensor and d = 0.025 N·s/m.
    pub fn reference() -> Self {
        Self {
            ell: 1.905,
            ell0: 1.4,
            ellk: 1.4,
            rho0: 2700.0,
            area: 2.25e-4,
            youngs: 69e9,
            shear_modulus: 25.5e9,
            inertia: 1.6875e-10,
            k_shear: RECTANGULAR_SHEAR_FACTOR,
            mass: 0.1,
            stiffness: 7000.0,
            damping: 0.025,
        }
    }

    pub fn with_damping(mut self, d: f64) -> Self {
        self.damping = d;
        self
    }

    pub fn with_sensor(mut self, ellk: f64) -> Self {
        self.ellk = ellk;
        self
    }

    /// Every violated invariant, one entry per field. Empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let positive = [
            ("ell", self.ell),
            ("rho0", self.rho0),
            ("area", self.area),
            ("youngs", self.youngs),
            ("shear_modulus", self.shear_modulus),
            ("inertia", self.inertia),
            ("k_shear", self.k_shear),
            ("mass", self.mass),
            ("stiffness", self.stiffness),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                out.push(Violation::new(field, format!("must be finite and > 0, got {value}")));
            }
        }
        if !(self.damping.is_finite() && self.damping >= 0.0) {
            out.push(Violation::new(
                "damping",
                format!("must be finite and >= 0, got {}", self.damping),
            ));
        }
        if !(self.ell0.is_finite() && self.ell0 > 0.0 && self.ell0 < self.ell) {
            out.push(Violation::new(
                "ell0",
                format!("must lie strictly inside (0, {}), got {}", self.ell, self.ell0),
            ));
        }
        if !(self.ellk.is_finite() && self.ellk >= 0.0 && self.ellk <= self.ell) {
            out.push(Violation::new(
                "ellk",
                format!("must lie in [0, {}], got {}", self.ell, self.ellk),
            ));
        }
        out
    }

    pub fn derive(&self) -> DerivedParams {
        derive_params(self)
    }
}

/// One violated invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl Violation {
    pub fn new(field: &'static str, message: String) -> Self {
        Self { field, message }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Constants derived from [`BeamParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// Linear density ρ = ρ0·A, kg/m.
    pub rho: f64,
    /// Mass moment of inertia of the cross-section Iρ = ρ0·I, kg·m.
    pub i_rho: f64,
    /// Shear rigidity K = k·G·A, N.
    pub k_shear_rigidity: f64,
    /// Bending stiffness EI, N·m².
    pub ei: f64,
}

pub fn derive_params(p: &BeamParams) -> DerivedParams {
    DerivedParams {
        rho: p.rho0 * p.area,
        i_rho: p.rho0 * p.inertia,
        k_shear_rigidity: p.k_shear * p.shear_modulus * p.area,
        ei: p.youngs * p.inertia,
    }
}

pub fn validate(p: &BeamParams) -> Vec<Violation> {
    p.validate()
}

/// Transfer function value at one point of the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferValue {
    pub h: num_complex::Complex64,
    /// s was nudged off a repeated characteristic root.
    pub perturbed: bool,
    /// Condition estimate of the equilibrated interface matrix.
    pub cond: f64,
}

/// Which measured quantity the transfer function maps the force to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    /// Transversal displacement w(ℓk).
    Displacement,
    /// ψ′(ℓk) for Timoshenko, w″(ℓk) for Euler–Bernoulli.
    Curvature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Timoshenko,
    #[serde(alias = "euler", alias = "euler-bernoulli")]
    EulerBernoulli,
}

impl fmt::Display for OutputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputKind::Displacement => "displacement",
            OutputKind::Curvature => "curvature",
        })
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Timoshenko => "timoshenko",
            ModelKind::EulerBernoulli => "euler",
        })
    }
}

impl FromStr for OutputKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "displacement" => Ok(OutputKind::Displacement),
            "curvature" => Ok(OutputKind::Curvature),
            _ => Err(format!("unknown output `{s}` (expected displacement or curvature)")),
        }
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "timoshenko" => Ok(ModelKind::Timoshenko),
            "euler" | "euler-bernoulli" | "eulerbernoulli" => Ok(ModelKind::EulerBernoulli),
            _ => Err(format!("unknown model `{s}` (expected timoshenko or euler)")),
        }
    }
}
