//! Counterdiabatic driving for finite-dimensional Hamiltonians.
//!
//! A parameterized Hamiltonian `H(λ(t))` with nondegenerate spectrum
//! `H|n(t)⟩ = ε_n(t)|n(t)⟩` is supplemented by the counterdiabatic term
//!
//! ```text
//! H₁(t) = iħ Σ_n Σ_{m≠n} |m⟩⟨m|∂ₜH|n⟩⟨n| / (ε_n − ε_m) = iħ Σ_n ∂ₜP_n P_n
//! ```
//!
//! so that the dynamics generated by `H + H₁` follows every adiabatic eigenstate
//! exactly. The module tracks gauge-fixed eigenframes along a path, builds both
//! forms of `H₁`, propagates the Schrödinger equation, and evaluates two-point
//! measurement work statistics together with the cost of the driving.

mod evolve;
mod geometry;
mod linalg;
mod path;
mod spectral;
mod work;

use core::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub use evolve::{
    evolve_tdse, evolve_unitary, Trajectory, UnitaryTrajectory, NORM_TOLERANCE, STEP_WARNING,
};
pub use geometry::{geometric_tensor, predicted_variance_excess, GeometricTensor};
pub use linalg::{commutator, exp_hermitian, hermitian_eigen, hermiticity_defect};
pub use path::{AffinePath, HamiltonianPath, Ramp, Schedule};
pub use spectral::{
    adiabatic_state, adiabatic_states, cd_term, cd_term_projector, commutator_check,
    counterdiabatic_hamiltonian, projector_rates, spectral_frame, spectral_path, uniform_grid,
    CommutatorCheck, SpectralFrame, DEGENERACY_THRESHOLD,
};
pub use work::{
    cd_cost_metrics, work_distribution, CostMetrics, CostSample, UcdRoute, WorkDistribution,
    WorkMode, WorkPoint,
};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[derive(Clone, Debug, PartialEq)]
pub enum CdError {
    /// Adjacent levels closer than the degeneracy threshold. `time` is `None` for
    /// queries at a parameter point rather than along the schedule.
    Degenerate {
        time: Option<f64>,
        lower: usize,
        upper: usize,
        gap: f64,
    },
    NotHermitian {
        time: f64,
        defect: f64,
    },
    NormDrift {
        time: f64,
        drift: f64,
    },
    InvalidOccupations(&'static str),
    InvalidInput(&'static str),
}

impl fmt::Display for CdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Degenerate {
                time,
                lower,
                upper,
                gap,
            } => {
                write!(f, "levels {lower} and {upper} are degenerate (gap {gap:e})")?;
                if let Some(t) = time {
                    write!(f, " at t = {t:e}")?;
                }
                Ok(())
            }
            Self::NotHermitian { time, defect } => {
                write!(
                    f,
                    "Hamiltonian not Hermitian at t = {time:e} (defect {defect:e})"
                )
            }
            Self::NormDrift { time, drift } => {
                write!(f, "norm drifted by {drift:e} at t = {time:e}")
            }
            Self::InvalidOccupations(msg) => write!(f, "invalid occupations: {msg}"),
            Self::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl core::error::Error for CdError {}
