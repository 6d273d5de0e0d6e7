//! Canonical thermodynamics of the working media.
//!
//! The harmonically trapped rational Calogero-Sutherland gas has the ideal-Bose
//! spectrum rigidly shifted by ħωλN(N−1)/2, so its canonical partition function
//! is `Z_CS = exp(−βħωλN(N−1)/2) · Z_Bose(N)` with `Z_Bose` from the standard
//! recursion over cycle lengths. A single oscillator is the N = 1 case.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use crate::prelude::*;

#[derive(Clone, Debug, PartialEq)]
pub enum MediaError {
    InvalidParameter(&'static str),
    /// The brute-force oracle enumerates occupations and is limited to N ≤ 4.
    OracleTooLarge {
        n: usize,
    },
}

impl fmt::Display for MediaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Self::OracleTooLarge { n } => {
                write!(f, "occupation oracle supports N <= 4 (got {n})")
            }
        }
    }
}

impl core::error::Error for MediaError {}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MediumKind {
    SingleOscillator,
    /// N bosons in one dimension with inverse-square pair interaction of strength λ.
    CalogeroSutherland {
        n: usize,
        lambda: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MediumSpec {
    kind: MediumKind,
    mass: f64,
    hbar: f64,
}

impl MediumSpec {
    pub fn single_oscillator() -> Self {
        Self {
            kind: MediumKind::SingleOscillator,
            mass: 1.0,
            hbar: 1.0,
        }
    }

    pub fn calogero_sutherland(n: usize, lambda: f64) -> Result<Self, MediaError> {
        if n < 1 {
            return Err(MediaError::InvalidParameter("particle number must be >= 1"));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(MediaError::InvalidParameter("lambda must be >= 0"));
        }
        Ok(Self {
            kind: MediumKind::CalogeroSutherland { n, lambda },
            mass: 1.0,
            hbar: 1.0,
        })
    }

    /// Same medium in other units.
    pub fn with_units(self, mass: f64, hbar: f64) -> Result<Self, MediaError> {
        if !(mass > 0.0 && hbar > 0.0 && mass.is_finite() && hbar.is_finite()) {
            return Err(MediaError::InvalidParameter(
                "mass and hbar must be positive",
            ));
        }
        Ok(Self { mass, hbar, ..self })
    }

    pub fn kind(&self) -> MediumKind {
        self.kind
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn particles(&self) -> usize {
        match self.kind {
            MediumKind::SingleOscillator => 1,
            MediumKind::CalogeroSutherland { n, .. } => n,
        }
    }

    pub fn lambda(&self) -> f64 {
        match self.kind {
            MediumKind::SingleOscillator => 0.0,
            MediumKind::CalogeroSutherland { lambda, .. } => lambda,
        }
    }

    /// The same medium with a different particle number (λ and units kept).
    pub fn with_particles(&self, n: usize) -> Result<Self, MediaError> {
        Ok(Self {
            kind: MediumSpec::calogero_sutherland(n, self.lambda())?.kind,
            ..*self
        })
    }
}

/// Canonical equilibrium state at inverse temperature β in a trap of frequency ω.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalState {
    beta: f64,
    omega: f64,
    medium: MediumSpec,
}

impl ThermalState {
    pub fn new(beta: f64, omega: f64, medium: MediumSpec) -> Result<Self, MediaError> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(MediaError::InvalidParameter("beta must be positive"));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(MediaError::InvalidParameter("omega must be positive"));
        }
        Ok(Self {
            beta,
            omega,
            medium,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn medium(&self) -> &MediumSpec {
        &self.medium
    }
}

/// (ħω/2) coth(βħω/2), with asymptotic branches at both ends.
pub fn oscillator_energy(beta: f64, omega: f64, hbar: f64) -> f64 {
    let quantum = hbar * omega;
    let x = beta * quantum;
    if x > 40.0 {
        0.5 * quantum * (1.0 + 2.0 * (-x).exp())
    } else if x < 1e-6 {
        1.0 / beta + quantum * x / 12.0
    } else {
        0.5 * quantum / (0.5 * x).tanh()
    }
}

/// Mean energy of the canonical state.
pub fn thermal_energy(state: &ThermalState) -> f64 {
    let hbar = state.medium.hbar;
    match state.medium.kind {
        MediumKind::SingleOscillator => oscillator_energy(state.beta, state.omega, hbar),
        MediumKind::CalogeroSutherland { n, lambda } => {
            cs_partition_function(n, lambda, state.beta, state.omega, hbar).energy
        }
    }
}

/// ln Z and E = −∂_β ln Z of the Calogero-Sutherland gas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsThermo {
    pub ln_z: f64,
    pub energy: f64,
}

impl CsThermo {
    pub fn partition_function(&self) -> f64 {
        self.ln_z.exp()
    }
}

/// Canonical recursion Z_N = (1/N) Σ_k z(kβ) Z_{N−k} with the derivative carried
/// alongside. Energies are measured from the N-particle zero-point energy and
/// rescaled by (1 − e^{−βħω})^N to keep the recursion in range.
pub fn cs_partition_function(n: usize, lambda: f64, beta: f64, omega: f64, hbar: f64) -> CsThermo {
    let quantum = hbar * omega;
    let x = beta * quantum;
    let scale = -(-x).exp_m1();
    // per cycle length k: scaled single-particle factor and its x-derivative
    let mut zk = Vec::with_capacity(n);
    let mut dzk = Vec::with_capacity(n);
    for k in 1..=n {
        let kf = k as f64;
        let one_minus = -(-kf * x).exp_m1();
        let qk = (-kf * x).exp();
        let s_k = scale.powi(k as i32);
        zk.push(s_k / one_minus);
        dzk.push(-kf * qk / (one_minus * one_minus) * s_k);
    }
    let mut y = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    y[0] = 1.0;
    for m in 1..=n {
        let mut acc_y = 0.0;
        let mut acc_v = 0.0;
        for k in 1..=m {
            acc_y += zk[k - 1] * y[m - k];
            acc_v += dzk[k - 1] * y[m - k] + zk[k - 1] * v[m - k];
        }
        y[m] = acc_y / m as f64;
        v[m] = acc_v / m as f64;
    }
    let nf = n as f64;
    let excitation = -v[n] / y[n];
    let shift = lambda * nf * (nf - 1.0) / 2.0;
    CsThermo {
        ln_z: y[n].ln() - nf * scale.ln() - x * (0.5 * nf + shift),
        energy: quantum * (0.5 * nf + shift + excitation),
    }
}

/// Result of the brute-force occupation sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleEnergy {
    pub energy: f64,
    /// Upper bound on the relative Boltzmann weight of the discarded configurations.
    pub tail_bound: f64,
    /// `false` when the tail bound exceeds 10⁻¹⁴.
    pub truncation_ok: bool,
}

pub const ORACLE_TAIL_TOLERANCE: f64 = 1e-14;

// Discarded configurations have some nᵢ > n_max; overcounting them as distinguishable
// particles bounds their weight by N e^{−x(n_max+1)} / (1 − e^{−x})^N.
fn oracle_tail_bound(n: usize, x: f64, n_max: usize) -> f64 {
    let nf = n as f64;
    nf * (-x * (n_max as f64 + 1.0)).exp() / (-(-x).exp_m1()).powi(n as i32)
}

/// Smallest occupation cutoff for which the oracle's tail bound drops below 10⁻¹⁴.
pub fn oracle_cutoff(n: usize, beta: f64, omega: f64, hbar: f64) -> usize {
    let x = beta * hbar * omega;
    let mut n_max = 8;
    while oracle_tail_bound(n, x, n_max) > ORACLE_TAIL_TOLERANCE {
        n_max += 8;
    }
    n_max
}

// Counts sorted occupation tuples by total excitation. The innermost occupation
// sweeps a contiguous range of totals, recorded as a difference array.
fn enumerate_sorted(depth: usize, min: usize, n_max: usize, total: usize, diff: &mut [i64]) {
    if depth == 1 {
        diff[total + min] += 1;
        diff[total + n_max + 1] -= 1;
        return;
    }
    for occ in min..=n_max {
        enumerate_sorted(depth - 1, occ, n_max, total + occ, diff);
    }
}

/// Canonical energy by explicit enumeration of bosonic occupations
/// n₁ ≤ … ≤ n_N ≤ n_max of the shifted spectrum ħω(Σnᵢ + N/2 + λN(N−1)/2).
pub fn cs_oracle(
    n: usize,
    lambda: f64,
    beta: f64,
    omega: f64,
    hbar: f64,
    n_max: usize,
) -> Result<OracleEnergy, MediaError> {
    if n == 0 {
        return Err(MediaError::InvalidParameter("particle number must be >= 1"));
    }
    if n > 4 {
        return Err(MediaError::OracleTooLarge { n });
    }
    let x = beta * hbar * omega;
    let mut diff = vec![0i64; n * n_max + 2];
    enumerate_sorted(n, 0, n_max, 0, &mut diff);
    let mut z = 0.0;
    let mut m_sum = 0.0;
    let mut count = 0i64;
    for (total, step) in diff.iter().take(n * n_max + 1).enumerate() {
        count += step;
        if count == 0 {
            continue;
        }
        let w = count as f64 * (-x * total as f64).exp();
        z += w;
        m_sum += w * total as f64;
    }
    let nf = n as f64;
    let tail_bound = oracle_tail_bound(n, x, n_max) / z;
    Ok(OracleEnergy {
        energy: hbar * omega * (m_sum / z + 0.5 * nf + lambda * nf * (nf - 1.0) / 2.0),
        tail_bound,
        truncation_ok: tail_bound <= ORACLE_TAIL_TOLERANCE,
    })
}
