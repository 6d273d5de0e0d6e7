//! Four-stroke quantum Otto cycle A → B → C → D → A.
//!
//! A is the Gibbs state at (ω₁, β_c). The compression stroke A → B raises the trap
//! frequency to ω₂, the hot isochore B → C thermalizes at β_h, the expansion
//! C → D returns to ω₁ and the cold isochore D → A closes the cycle. Isochores
//! are modelled as instantaneous Gibbs-state replacement; their durations only
//! enter the cycle time. Work and heat are counted positive when they flow into
//! the medium.

use core::fmt;

#[allow(unused_imports)]
use crate::prelude::*;

use crate::ermakov::{
    q_star_sudden, solve_ermakov, ErmakovError, FrequencyProtocol, SolverSettings,
};
use crate::media::{thermal_energy, MediaError, MediumSpec, ThermalState};
use crate::sta::{sta_stroke, StaError};

#[derive(Clone, Debug, PartialEq)]
pub enum OttoError {
    InvalidSpec(&'static str),
    Ermakov(ErmakovError),
    Sta(StaError),
    Media(MediaError),
    /// Many-particle ratios need both cycles to run as engines.
    NotAnEngine {
        particles: usize,
    },
}

impl fmt::Display for OttoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidSpec(msg) => write!(f, "invalid cycle: {msg}"),
            Self::Ermakov(e) => write!(f, "{e}"),
            Self::Sta(e) => write!(f, "{e}"),
            Self::Media(e) => write!(f, "{e}"),
            Self::NotAnEngine { particles } => {
                write!(
                    f,
                    "cycle with {particles} particle(s) does not operate as an engine"
                )
            }
        }
    }
}

impl core::error::Error for OttoError {}

impl From<ErmakovError> for OttoError {
    fn from(e: ErmakovError) -> Self {
        Self::Ermakov(e)
    }
}

impl From<StaError> for OttoError {
    fn from(e: StaError) -> Self {
        Self::Sta(e)
    }
}

impl From<MediaError> for OttoError {
    fn from(e: MediaError) -> Self {
        Self::Media(e)
    }
}

/// Relative mismatch allowed between a protocol's endpoint frequencies and the
/// cycle's ω₁, ω₂ (sampled protocols recover them through a square root).
const ENDPOINT_TOLERANCE: f64 = 1e-9;

fn same_frequency(a: f64, b: f64) -> bool {
    (a - b).abs() <= ENDPOINT_TOLERANCE * b
}

#[derive(Clone, Debug, PartialEq)]
pub struct CycleSpec {
    omega_cold: f64,
    omega_hot: f64,
    beta_cold: f64,
    beta_hot: f64,
    compression: FrequencyProtocol,
    expansion: FrequencyProtocol,
    tau_hot_isochore: f64,
    tau_cold_isochore: f64,
    medium: MediumSpec,
}

impl CycleSpec {
    /// `omega_cold` = ω₁ < ω₂ = `omega_hot`; `beta_cold` > `beta_hot`. The
    /// compression protocol must run ω₁ → ω₂ and the expansion ω₂ → ω₁.
    pub fn new(
        omega_cold: f64,
        omega_hot: f64,
        beta_cold: f64,
        beta_hot: f64,
        compression: FrequencyProtocol,
        expansion: FrequencyProtocol,
        medium: MediumSpec,
    ) -> Result<Self, OttoError> {
        if !(omega_cold > 0.0 && omega_cold.is_finite() && omega_hot.is_finite()) {
            return Err(OttoError::InvalidSpec(
                "frequencies must be positive and finite",
            ));
        }
        if omega_hot <= omega_cold {
            return Err(OttoError::InvalidSpec("omega_hot must exceed omega_cold"));
        }
        if !(beta_hot > 0.0 && beta_cold.is_finite()) {
            return Err(OttoError::InvalidSpec(
                "inverse temperatures must be positive and finite",
            ));
        }
        if beta_cold <= beta_hot {
            return Err(OttoError::InvalidSpec("beta_cold must exceed beta_hot"));
        }
        if !same_frequency(compression.omega0(), omega_cold)
            || !same_frequency(compression.omega_final(), omega_hot)
        {
            return Err(OttoError::InvalidSpec(
                "compression must run from omega_cold to omega_hot",
            ));
        }
        if !same_frequency(expansion.omega0(), omega_hot)
            || !same_frequency(expansion.omega_final(), omega_cold)
        {
            return Err(OttoError::InvalidSpec(
                "expansion must run from omega_hot to omega_cold",
            ));
        }
        Ok(Self {
            omega_cold,
            omega_hot,
            beta_cold,
            beta_hot,
            compression,
            expansion,
            tau_hot_isochore: 0.0,
            tau_cold_isochore: 0.0,
            medium,
        })
    }

    /// Cycle with polynomial shortcut strokes of equal duration in both directions.
    pub fn shortcut(
        omega_cold: f64,
        omega_hot: f64,
        beta_cold: f64,
        beta_hot: f64,
        stroke_time: f64,
        medium: MediumSpec,
    ) -> Result<Self, OttoError> {
        let compression = sta_stroke(omega_cold, omega_hot, stroke_time)?;
        let expansion = sta_stroke(omega_hot, omega_cold, stroke_time)?;
        Self::new(
            omega_cold,
            omega_hot,
            beta_cold,
            beta_hot,
            compression,
            expansion,
            medium,
        )
    }

    /// Durations of the hot (B → C) and cold (D → A) thermalization strokes.
    pub fn with_isochores(self, tau_hot: f64, tau_cold: f64) -> Result<Self, OttoError> {
        if !(tau_hot >= 0.0 && tau_cold >= 0.0 && tau_hot.is_finite() && tau_cold.is_finite()) {
            return Err(OttoError::InvalidSpec("isochore durations must be >= 0"));
        }
        Ok(Self {
            tau_hot_isochore: tau_hot,
            tau_cold_isochore: tau_cold,
            ..self
        })
    }

    pub fn with_medium(self, medium: MediumSpec) -> Self {
        Self { medium, ..self }
    }

    pub fn omega_cold(&self) -> f64 {
        self.omega_cold
    }

    pub fn omega_hot(&self) -> f64 {
        self.omega_hot
    }

    pub fn beta_cold(&self) -> f64 {
        self.beta_cold
    }

    pub fn beta_hot(&self) -> f64 {
        self.beta_hot
    }

    pub fn compression(&self) -> &FrequencyProtocol {
        &self.compression
    }

    pub fn expansion(&self) -> &FrequencyProtocol {
        &self.expansion
    }

    pub fn medium(&self) -> &MediumSpec {
        &self.medium
    }

    pub fn cycle_time(&self) -> f64 {
        self.compression.tau()
            + self.tau_hot_isochore
            + self.expansion.tau()
            + self.tau_cold_isochore
    }
}

/// Final nonadiabatic factors of the two unitary strokes. They depend only on the
/// protocols, so one solve serves every medium and temperature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrokeFactors {
    pub compression: f64,
    pub expansion: f64,
}

pub fn stroke_factors(
    spec: &CycleSpec,
    settings: &SolverSettings,
) -> Result<StrokeFactors, OttoError> {
    let compression = solve_ermakov(&spec.compression, settings)?.q_star_final()?;
    let expansion = solve_ermakov(&spec.expansion, settings)?.q_star_final()?;
    Ok(StrokeFactors {
        compression,
        expansion,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleReport {
    pub energy_a: f64,
    pub energy_b: f64,
    pub energy_c: f64,
    pub energy_d: f64,
    /// W₁ = ⟨H⟩_B − ⟨H⟩_A.
    pub work_compression: f64,
    /// W₃ = ⟨H⟩_D − ⟨H⟩_C.
    pub work_expansion: f64,
    /// Q₂ = ⟨H⟩_C − ⟨H⟩_B.
    pub heat_hot: f64,
    /// Q₄ = ⟨H⟩_A − ⟨H⟩_D, fixed by the first law so the four terms cancel exactly.
    pub heat_cold: f64,
    pub q_star_compression: f64,
    pub q_star_expansion: f64,
    pub q_star_sudden: f64,
    pub efficiency: f64,
    /// −(W₁ + W₃) / τ_c.
    pub power: f64,
    pub cycle_time: f64,
    pub eta_otto: f64,
    pub eta_carnot: f64,
    pub eta_curzon_ahlborn: f64,
    pub eta_sudden: f64,
    pub eta_nonadiabatic_bound: f64,
    /// Q₂ > 0 and net work output > 0.
    pub is_engine: bool,
    /// Whether the slow-driving cycle at these temperatures is an engine at all
    /// (β_h ω₂ < β_c ω₁ for the oscillator).
    pub adiabatic_engine: bool,
}

impl CycleReport {
    /// W₁ + W₃ + Q₂ + Q₄ summed in that order; zero by construction.
    pub fn first_law_residual(&self) -> f64 {
        self.work_compression + self.work_expansion + self.heat_hot + self.heat_cold
    }

    pub fn work_output(&self) -> f64 {
        -(self.work_compression + self.work_expansion)
    }
}

/// Finite-time efficiency from the corner energies and stroke factors:
/// η = 1 − (ω₁/ω₂)(Q_CD ⟨H⟩_C − (ω₂/ω₁)⟨H⟩_A)/(⟨H⟩_C − Q_AB (ω₂/ω₁)⟨H⟩_A).
pub fn finite_time_efficiency(
    omega_cold: f64,
    omega_hot: f64,
    energy_a: f64,
    energy_c: f64,
    factors: StrokeFactors,
) -> f64 {
    let r = omega_hot / omega_cold;
    let numerator = factors.expansion * energy_c - r * energy_a;
    let denominator = energy_c - factors.compression * r * energy_a;
    1.0 - numerator / (r * denominator)
}

/// Cycle energetics for given stroke factors.
pub fn evaluate_cycle(spec: &CycleSpec, factors: StrokeFactors) -> Result<CycleReport, OttoError> {
    let (w1, w2) = (spec.omega_cold, spec.omega_hot);
    let r = w2 / w1;
    let energy_a = thermal_energy(&ThermalState::new(spec.beta_cold, w1, spec.medium)?);
    let energy_c = thermal_energy(&ThermalState::new(spec.beta_hot, w2, spec.medium)?);
    let energy_b = factors.compression * r * energy_a;
    let energy_d = factors.expansion * energy_c / r;

    let work_compression = energy_b - energy_a;
    let work_expansion = energy_d - energy_c;
    let heat_hot = energy_c - energy_b;
    let heat_cold = -(work_compression + work_expansion + heat_hot);

    let q_sq = q_star_sudden(w1, w2)?;
    let sudden = StrokeFactors {
        compression: q_sq,
        expansion: q_sq,
    };
    let cycle_time = spec.cycle_time();
    let eta_carnot = 1.0 - spec.beta_hot / spec.beta_cold;
    let work_output = -(work_compression + work_expansion);
    let adiabatic_heat = energy_c - r * energy_a;
    let adiabatic_output = energy_a + energy_c - r * energy_a - energy_c / r;

    Ok(CycleReport {
        energy_a,
        energy_b,
        energy_c,
        energy_d,
        work_compression,
        work_expansion,
        heat_hot,
        heat_cold,
        q_star_compression: factors.compression,
        q_star_expansion: factors.expansion,
        q_star_sudden: q_sq,
        efficiency: finite_time_efficiency(w1, w2, energy_a, energy_c, factors),
        power: work_output / cycle_time,
        cycle_time,
        eta_otto: 1.0 - w1 / w2,
        eta_carnot,
        eta_curzon_ahlborn: 1.0 - (1.0 - eta_carnot).sqrt(),
        eta_sudden: finite_time_efficiency(w1, w2, energy_a, energy_c, sudden),
        eta_nonadiabatic_bound: 1.0 - factors.expansion / r,
        is_engine: heat_hot > 0.0 && work_output > 0.0,
        adiabatic_engine: adiabatic_heat > 0.0 && adiabatic_output > 0.0,
    })
}

pub fn run_cycle(spec: &CycleSpec, settings: &SolverSettings) -> Result<CycleReport, OttoError> {
    evaluate_cycle(spec, stroke_factors(spec, settings)?)
}

/// Outcome of checking a report against the finite-time efficiency bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundsReport {
    pub tolerance: f64,
    /// η ≥ η_sq − ε.
    pub above_sudden: bool,
    /// η ≤ η_O + ε.
    pub below_otto: bool,
    /// η ≤ 1 − Q*_CD ω₁/ω₂ + ε.
    pub below_nonadiabatic_bound: bool,
    /// Q*_AB ≤ Q*_sq + ε; `None` when the compression is not monotonic.
    pub compression_below_sudden: Option<bool>,
    pub expansion_below_sudden: Option<bool>,
    pub first_law_closed: bool,
}

impl BoundsReport {
    pub fn all_passed(&self) -> bool {
        self.above_sudden
            && self.below_otto
            && self.below_nonadiabatic_bound
            && self.compression_below_sudden != Some(false)
            && self.expansion_below_sudden != Some(false)
            && self.first_law_closed
    }
}

pub fn bounds_report(
    report: &CycleReport,
    compression_monotonic: bool,
    expansion_monotonic: bool,
    tolerance: f64,
) -> BoundsReport {
    let eta = report.efficiency;
    let below_sudden = |q: f64| q <= report.q_star_sudden + tolerance;
    BoundsReport {
        tolerance,
        above_sudden: eta >= report.eta_sudden - tolerance,
        below_otto: eta <= report.eta_otto + tolerance,
        below_nonadiabatic_bound: eta <= report.eta_nonadiabatic_bound + tolerance,
        compression_below_sudden: compression_monotonic
            .then(|| below_sudden(report.q_star_compression)),
        expansion_below_sudden: expansion_monotonic.then(|| below_sudden(report.q_star_expansion)),
        first_law_closed: report.first_law_residual() == 0.0,
    }
}

/// Bounds check using the monotonicity of the cycle's own protocols.
pub fn check_bounds(spec: &CycleSpec, report: &CycleReport, tolerance: f64) -> BoundsReport {
    bounds_report(
        report,
        spec.compression.is_monotonic(),
        spec.expansion.is_monotonic(),
        tolerance,
    )
}

/// Many-particle performance relative to N independent single particles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupremacyRatios {
    /// P^(N,λ) / (N · P^(1,λ)).
    pub power_ratio: f64,
    /// η^(N,λ) / η^(1,λ).
    pub efficiency_ratio: f64,
    pub many: CycleReport,
    pub single: CycleReport,
}

pub fn supremacy_ratios_with(
    spec: &CycleSpec,
    factors: StrokeFactors,
) -> Result<SupremacyRatios, OttoError> {
    let n = spec.medium.particles();
    let many = evaluate_cycle(spec, factors)?;
    let single_medium = spec.medium.with_particles(1)?;
    let single = evaluate_cycle(&spec.clone().with_medium(single_medium), factors)?;
    if !many.is_engine {
        return Err(OttoError::NotAnEngine { particles: n });
    }
    if !single.is_engine {
        return Err(OttoError::NotAnEngine { particles: 1 });
    }
    Ok(SupremacyRatios {
        power_ratio: many.power / (n as f64 * single.power),
        efficiency_ratio: many.efficiency / single.efficiency,
        many,
        single,
    })
}

/// Runs the cycle for its configured medium and for one particle of the same medium
/// with identical protocols, temperatures and cycle time.
pub fn supremacy_ratios(
    spec: &CycleSpec,
    settings: &SolverSettings,
) -> Result<SupremacyRatios, OttoError> {
    supremacy_ratios_with(spec, stroke_factors(spec, settings)?)
}
