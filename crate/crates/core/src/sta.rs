//! Friction-free strokes by reverse engineering the scaling factor.
//!
//! A trajectory b(t) with b(0)=1, b(τ)=b_τ and vanishing ḃ, b̈ at both ends is
//! fixed first; the trap modulation that produces it follows from the Ermakov
//! equation as ω²(t) = ω₀²/b⁴ − b̈/b. Alternatively a smooth reference ramp
//! ω(t) can be corrected by the local counterdiabatic frequency Ω(t).

use alloc::boxed::Box;
use core::fmt;

#[allow(unused_imports)]
use crate::prelude::*;

use crate::blend::smoothstep5;
use crate::ermakov::{
    solve_ermakov, ErmakovError, FrequencyProtocol, ProtocolKind, ScalingPoint, SolverSettings,
};

#[derive(Clone, Debug, PartialEq)]
pub enum StaError {
    InvalidBoundary(&'static str),
    NonMonotonic,
    /// The reference ramp reaches ω² ≤ 0, where ω, ω̇, ω̈ are undefined.
    InvertedReference {
        t: f64,
        omega_sq: f64,
    },
    /// The reference protocol has no two continuous derivatives.
    NotSmooth(&'static str),
    Ermakov(ErmakovError),
}

impl fmt::Display for StaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidBoundary(msg) => write!(f, "invalid boundary conditions: {msg}"),
            Self::NonMonotonic => write!(f, "scaling trajectory is not monotonic"),
            Self::InvertedReference { t, omega_sq } => write!(
                f,
                "reference trap inverted at t = {t:e} (omega^2 = {omega_sq:e})"
            ),
            Self::NotSmooth(msg) => write!(f, "reference not twice differentiable: {msg}"),
            Self::Ermakov(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for StaError {}

impl From<ErmakovError> for StaError {
    fn from(e: ErmakovError) -> Self {
        Self::Ermakov(e)
    }
}

/// Target of a shortcut stroke: b(0)=1, b(τ)=b_τ, ḃ and b̈ zero at both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StaBoundaryConditions {
    pub b_tau: f64,
    pub tau: f64,
}

impl StaBoundaryConditions {
    /// Boundary conditions for a stroke ω_start → ω_end, b_τ = √(ω_start/ω_end).
    pub fn for_stroke(omega_start: f64, omega_end: f64, tau: f64) -> Self {
        Self {
            b_tau: (omega_start / omega_end).sqrt(),
            tau,
        }
    }
}

/// b(t) = 1 + (b_τ − 1)(10s³ − 15s⁴ + 6s⁵), s = t/τ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolynomialScaling {
    b_tau: f64,
    tau: f64,
}

impl PolynomialScaling {
    pub(crate) fn new_unchecked(b_tau: f64, tau: f64) -> Self {
        Self { b_tau, tau }
    }

    pub fn b_tau(&self) -> f64 {
        self.b_tau
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// b and its first four time derivatives at `t` (clamped to `[0, τ]`).
    pub fn derivatives(&self, t: f64) -> [f64; 5] {
        let s = (t / self.tau).clamp(0.0, 1.0);
        let g = smoothstep5(s);
        let amp = self.b_tau - 1.0;
        let mut out = [0.0; 5];
        out[0] = (1.0 - g[0]) + g[0] * self.b_tau;
        let mut scale = amp;
        for k in 1..5 {
            scale /= self.tau;
            out[k] = scale * g[k];
        }
        out
    }

    pub fn eval(&self, t: f64) -> ScalingPoint {
        let d = self.derivatives(t);
        ScalingPoint {
            t,
            b: d[0],
            bdot: d[1],
            bddot: d[2],
        }
    }
}

/// Degree-5 polynomial scaling trajectory meeting all six boundary conditions.
pub fn polynomial_scaling(bc: StaBoundaryConditions) -> Result<PolynomialScaling, StaError> {
    if !(bc.b_tau > 0.0 && bc.b_tau.is_finite()) {
        return Err(StaError::InvalidBoundary("b_tau must be positive"));
    }
    if !(bc.tau > 0.0 && bc.tau.is_finite()) {
        return Err(StaError::InvalidBoundary("tau must be positive"));
    }
    let traj = PolynomialScaling::new_unchecked(bc.b_tau, bc.tau);
    // the blend is monotone; confirm numerically so that b never crosses zero
    let n = 1000;
    let sign = (bc.b_tau - 1.0).signum();
    let mut prev = 1.0;
    for k in 1..=n {
        let b = traj.derivatives(bc.tau * k as f64 / n as f64)[0];
        if b <= 0.0 || sign * (b - prev) < -1e-15 {
            return Err(StaError::NonMonotonic);
        }
        prev = b;
    }
    Ok(traj)
}

/// The modulation ω²(t) = ω₀²/b⁴ − b̈/b that realizes `trajectory` exactly.
pub fn inverse_engineer_frequency(
    trajectory: &PolynomialScaling,
    omega0: f64,
) -> Result<FrequencyProtocol, StaError> {
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return Err(StaError::InvalidBoundary("omega0 must be positive"));
    }
    let b_tau = trajectory.b_tau;
    let omega_f = omega0 / (b_tau * b_tau);
    let protocol = FrequencyProtocol::from_parts(
        trajectory.tau,
        omega0,
        omega_f,
        ProtocolKind::PolynomialSta { b_tau },
    )?;
    debug_assert!(protocol.omega_sq(0.0) > 0.0 && protocol.omega_sq(trajectory.tau) > 0.0);
    Ok(protocol)
}

/// Shortcut stroke ω_start → ω_end of duration τ built from the polynomial ansatz.
pub fn sta_stroke(
    omega_start: f64,
    omega_end: f64,
    tau: f64,
) -> Result<FrequencyProtocol, StaError> {
    if !(omega_end > 0.0 && omega_end.is_finite()) {
        return Err(StaError::InvalidBoundary("omega_end must be positive"));
    }
    let traj = polynomial_scaling(StaBoundaryConditions::for_stroke(
        omega_start,
        omega_end,
        tau,
    ))?;
    inverse_engineer_frequency(&traj, omega_start)
}

/// Local counterdiabatic modification Ω² = ω² − (3/4)(ω̇/ω)² + ω̈/(2ω) of a
/// smooth reference ramp. The returned protocol keeps the reference's ω₀ as the
/// frequency of the initial equilibrium state.
pub fn local_cd_frequency(reference: &FrequencyProtocol) -> Result<FrequencyProtocol, StaError> {
    match reference.kind() {
        ProtocolKind::SuddenQuench => {
            return Err(StaError::NotSmooth("sudden quench is discontinuous"))
        }
        ProtocolKind::LocalCd { .. } => {
            return Err(StaError::NotSmooth(
                "nested local-CD protocols are not supported",
            ))
        }
        ProtocolKind::Sampled { spline } if spline.values().len() < 4 => {
            return Err(StaError::NotSmooth(
                "sampled reference needs at least 4 samples",
            ))
        }
        _ => {}
    }
    let n = 10_000;
    for k in 0..=n {
        let t = reference.tau() * k as f64 / n as f64;
        let omega_sq = reference.omega_sq(t);
        if !(omega_sq > 0.0) {
            return Err(StaError::InvertedReference { t, omega_sq });
        }
    }
    Ok(FrequencyProtocol::from_parts(
        reference.tau(),
        reference.omega0(),
        reference.omega_final(),
        ProtocolKind::LocalCd {
            reference: Box::new(reference.clone()),
        },
    )?)
}

/// Terminal friction diagnostic of a stroke.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StaVerification {
    pub q_star_final: f64,
    pub friction: f64,
    pub b_final: f64,
    pub bdot_final: f64,
    pub threshold: f64,
    pub passed: bool,
}

pub const DEFAULT_STA_THRESHOLD: f64 = 1e-6;

/// Re-solves the Ermakov equation and checks |Q*(τ) − 1| ≤ `threshold`.
pub fn verify_sta(
    protocol: &FrequencyProtocol,
    settings: &SolverSettings,
    threshold: f64,
) -> Result<StaVerification, StaError> {
    let solution = solve_ermakov(protocol, settings)?;
    let last = solution.len() - 1;
    let q = solution.q_star_final()?;
    let friction = (q - 1.0).abs();
    Ok(StaVerification {
        q_star_final: q,
        friction,
        b_final: solution.b()[last],
        bdot_final: solution.bdot()[last],
        threshold,
        passed: friction <= threshold,
    })
}
