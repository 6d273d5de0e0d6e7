//! JSON run configuration. See `docs/CONFIG.md` for the full schema.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use frictionless_core::cd::{AffinePath, CMatrix, Ramp, Schedule};
use frictionless_core::ermakov::{FrequencyProtocol, SolverSettings, StepControl};
use frictionless_core::media::MediumSpec;
use frictionless_core::otto::CycleSpec;
use frictionless_core::sta::{local_cd_frequency, sta_stroke};
use num_complex::Complex64;
use serde::Deserialize;

use crate::output::Format;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Stroke,
    StaDesign,
    Cycle,
    Sweep,
    Cd,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Stroke => "stroke",
            Scenario::StaDesign => "sta-design",
            Scenario::Cycle => "cycle",
            Scenario::Sweep => "sweep",
            Scenario::Cd => "cd",
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional; when present it must agree with the scenario given on the command line.
    pub scenario: Option<Scenario>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
    pub stroke: Option<StrokeConfig>,
    pub sta_design: Option<StaDesignConfig>,
    pub cycle: Option<CycleConfig>,
    pub sweep: Option<SweepConfig>,
    pub cd: Option<CdConfig>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| anyhow!("invalid config: {e}"))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub steps: Option<usize>,
    pub step: Option<f64>,
    pub tolerance: Option<f64>,
    pub b_min: Option<f64>,
    pub b_max: Option<f64>,
}

impl SolverConfig {
    pub fn settings(&self) -> Result<SolverSettings> {
        let defaults = SolverSettings::default();
        let control = match (self.steps, self.step, self.tolerance) {
            (None, None, None) => defaults.control,
            (Some(n), None, None) => StepControl::Steps(n),
            (None, Some(h), None) => StepControl::Step(h),
            (None, None, Some(tol)) => StepControl::Tolerance(tol),
            _ => bail!("solver: give at most one of `steps`, `step`, `tolerance`"),
        };
        Ok(SolverSettings {
            control,
            b_min: self.b_min.unwrap_or(defaults.b_min),
            b_max: self.b_max.unwrap_or(defaults.b_max),
        })
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

/// A complete frequency protocol for the `stroke` scenario.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProtocolConfig {
    Constant {
        omega: f64,
        tau: f64,
    },
    Linear {
        omega_start: f64,
        omega_end: f64,
        tau: f64,
    },
    Smooth {
        omega_start: f64,
        omega_end: f64,
        tau: f64,
    },
    Quench {
        omega_start: f64,
        omega_end: f64,
        tau: f64,
    },
    Sta {
        omega_start: f64,
        omega_end: f64,
        tau: f64,
    },
    LocalCd {
        omega_start: f64,
        omega_end: f64,
        tau: f64,
        #[serde(default)]
        reference: ReferenceRamp,
    },
    Sampled {
        tau: f64,
        omega_sq: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceRamp {
    #[default]
    Smooth,
    Linear,
}

fn reference_protocol(
    shape: ReferenceRamp,
    w0: f64,
    w1: f64,
    tau: f64,
) -> Result<FrequencyProtocol> {
    Ok(match shape {
        ReferenceRamp::Smooth => FrequencyProtocol::smooth_ramp(w0, w1, tau)?,
        ReferenceRamp::Linear => FrequencyProtocol::linear_ramp(w0, w1, tau)?,
    })
}

impl ProtocolConfig {
    pub fn build(&self) -> Result<FrequencyProtocol> {
        use ProtocolConfig::*;
        Ok(match *self {
            Constant { omega, tau } => FrequencyProtocol::constant(omega, tau)?,
            Linear {
                omega_start,
                omega_end,
                tau,
            } => FrequencyProtocol::linear_ramp(omega_start, omega_end, tau)?,
            Smooth {
                omega_start,
                omega_end,
                tau,
            } => FrequencyProtocol::smooth_ramp(omega_start, omega_end, tau)?,
            Quench {
                omega_start,
                omega_end,
                tau,
            } => FrequencyProtocol::sudden_quench(omega_start, omega_end, tau)?,
            Sta {
                omega_start,
                omega_end,
                tau,
            } => sta_stroke(omega_start, omega_end, tau)?,
            LocalCd {
                omega_start,
                omega_end,
                tau,
                reference,
            } => local_cd_frequency(&reference_protocol(reference, omega_start, omega_end, tau)?)?,
            Sampled { tau, ref omega_sq } => FrequencyProtocol::sampled(tau, omega_sq.clone())?,
        })
    }

    /// Sets a sweepable parameter (`omega_start`, `omega_end`, `tau`).
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        use ProtocolConfig::*;
        let slot = match (self, name) {
            (Constant { tau, .. } | Sampled { tau, .. }, "tau") => tau,
            (Constant { omega, .. }, "omega_start" | "omega_end") => omega,
            (
                Linear { omega_start, .. }
                | Smooth { omega_start, .. }
                | Quench { omega_start, .. }
                | Sta { omega_start, .. }
                | LocalCd { omega_start, .. },
                "omega_start",
            ) => omega_start,
            (
                Linear { omega_end, .. }
                | Smooth { omega_end, .. }
                | Quench { omega_end, .. }
                | Sta { omega_end, .. }
                | LocalCd { omega_end, .. },
                "omega_end",
            ) => omega_end,
            (
                Linear { tau, .. }
                | Smooth { tau, .. }
                | Quench { tau, .. }
                | Sta { tau, .. }
                | LocalCd { tau, .. },
                "tau",
            ) => tau,
            (p, _) => bail!(
                "axis `{name}` does not apply to a `{}` protocol",
                p.kind_name()
            ),
        };
        *slot = value;
        Ok(())
    }

    pub fn kind_name(&self) -> &'static str {
        use ProtocolConfig::*;
        match self {
            Constant { .. } => "constant",
            Linear { .. } => "linear",
            Smooth { .. } => "smooth",
            Quench { .. } => "quench",
            Sta { .. } => "sta",
            LocalCd { .. } => "local_cd",
            Sampled { .. } => "sampled",
        }
    }

    /// (ω_start, ω_end, τ); sampled protocols report the square roots of their end samples.
    pub fn endpoints(&self) -> (f64, f64, f64) {
        use ProtocolConfig::*;
        match *self {
            Constant { omega, tau } => (omega, omega, tau),
            Linear {
                omega_start,
                omega_end,
                tau,
            }
            | Smooth {
                omega_start,
                omega_end,
                tau,
            }
            | Quench {
                omega_start,
                omega_end,
                tau,
            }
            | Sta {
                omega_start,
                omega_end,
                tau,
            }
            | LocalCd {
                omega_start,
                omega_end,
                tau,
                ..
            } => (omega_start, omega_end, tau),
            Sampled { tau, ref omega_sq } => (
                omega_sq.first().copied().unwrap_or(f64::NAN).sqrt(),
                omega_sq.last().copied().unwrap_or(f64::NAN).sqrt(),
                tau,
            ),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct MediumConfig {
    pub model: MediumModel,
    #[serde(default = "one")]
    pub particles: usize,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "unit")]
    pub mass: f64,
    #[serde(default = "unit")]
    pub hbar: f64,
}

impl Default for MediumConfig {
    fn default() -> Self {
        Self {
            model: MediumModel::SingleOscillator,
            particles: 1,
            lambda: 0.0,
            mass: 1.0,
            hbar: 1.0,
        }
    }
}

fn one() -> usize {
    1
}

fn unit() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MediumModel {
    SingleOscillator,
    CalogeroSutherland,
}

impl MediumConfig {
    pub fn build(&self) -> Result<MediumSpec> {
        let base = match self.model {
            MediumModel::SingleOscillator => MediumSpec::single_oscillator(),
            MediumModel::CalogeroSutherland => {
                MediumSpec::calogero_sutherland(self.particles, self.lambda)?
            }
        };
        Ok(base.with_units(self.mass, self.hbar)?)
    }
}

/// Initial thermal state for the optional energy column of the `stroke` scenario.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialStateConfig {
    pub beta: f64,
    #[serde(default)]
    pub medium: MediumConfig,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrokeConfig {
    pub protocol: ProtocolConfig,
    /// Number of equally spaced output times on [0, τ], endpoints included.
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub initial: Option<InitialStateConfig>,
}

fn default_samples() -> usize {
    101
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignMethod {
    #[default]
    Polynomial,
    LocalCd,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaDesignConfig {
    pub omega_start: f64,
    pub omega_end: f64,
    pub tau: f64,
    #[serde(default)]
    pub method: DesignMethod,
    /// Reference ramp for the local counterdiabatic method.
    #[serde(default)]
    pub reference: ReferenceRamp,
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub threshold: Option<f64>,
}

impl StaDesignConfig {
    pub fn protocol(&self) -> Result<FrequencyProtocol> {
        Ok(match self.method {
            DesignMethod::Polynomial => sta_stroke(self.omega_start, self.omega_end, self.tau)?,
            DesignMethod::LocalCd => local_cd_frequency(&reference_protocol(
                self.reference,
                self.omega_start,
                self.omega_end,
                self.tau,
            )?)?,
        })
    }
}

/// One unitary stroke of the cycle; its endpoint frequencies come from the cycle.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrokeSpec {
    Linear {
        tau: f64,
    },
    Smooth {
        tau: f64,
    },
    Quench {
        tau: f64,
    },
    Sta {
        tau: f64,
    },
    LocalCd {
        tau: f64,
        #[serde(default)]
        reference: ReferenceRamp,
    },
    /// Explicit ω² samples; the first and last must match the cycle frequencies.
    Sampled {
        tau: f64,
        omega_sq: Vec<f64>,
    },
}

impl StrokeSpec {
    pub fn tau(&self) -> f64 {
        match *self {
            StrokeSpec::Linear { tau }
            | StrokeSpec::Smooth { tau }
            | StrokeSpec::Quench { tau }
            | StrokeSpec::Sta { tau }
            | StrokeSpec::LocalCd { tau, .. }
            | StrokeSpec::Sampled { tau, .. } => tau,
        }
    }

    pub fn set_tau(&mut self, value: f64) {
        match self {
            StrokeSpec::Linear { tau }
            | StrokeSpec::Smooth { tau }
            | StrokeSpec::Quench { tau }
            | StrokeSpec::Sta { tau }
            | StrokeSpec::LocalCd { tau, .. }
            | StrokeSpec::Sampled { tau, .. } => *tau = value,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            StrokeSpec::Linear { .. } => "linear",
            StrokeSpec::Smooth { .. } => "smooth",
            StrokeSpec::Quench { .. } => "quench",
            StrokeSpec::Sta { .. } => "sta",
            StrokeSpec::LocalCd { .. } => "local_cd",
            StrokeSpec::Sampled { .. } => "sampled",
        }
    }

    pub fn build(&self, omega_start: f64, omega_end: f64) -> Result<FrequencyProtocol> {
        let tau = self.tau();
        Ok(match self {
            StrokeSpec::Linear { .. } => {
                FrequencyProtocol::linear_ramp(omega_start, omega_end, tau)?
            }
            StrokeSpec::Smooth { .. } => {
                FrequencyProtocol::smooth_ramp(omega_start, omega_end, tau)?
            }
            StrokeSpec::Quench { .. } => {
                FrequencyProtocol::sudden_quench(omega_start, omega_end, tau)?
            }
            StrokeSpec::Sta { .. } => sta_stroke(omega_start, omega_end, tau)?,
            StrokeSpec::LocalCd { reference, .. } => local_cd_frequency(&reference_protocol(
                *reference,
                omega_start,
                omega_end,
                tau,
            )?)?,
            StrokeSpec::Sampled { omega_sq, .. } => {
                FrequencyProtocol::sampled(tau, omega_sq.clone())?
            }
        })
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsochoreConfig {
    #[serde(default)]
    pub hot: f64,
    #[serde(default)]
    pub cold: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CycleConfig {
    pub omega_cold: f64,
    pub omega_hot: f64,
    pub beta_cold: f64,
    pub beta_hot: f64,
    pub compression: StrokeSpec,
    pub expansion: StrokeSpec,
    #[serde(default)]
    pub isochores: IsochoreConfig,
    #[serde(default)]
    pub medium: MediumConfig,
}

impl CycleConfig {
    pub fn spec(&self) -> Result<CycleSpec> {
        let compression = self
            .compression
            .build(self.omega_cold, self.omega_hot)
            .context("compression stroke")?;
        let expansion = self
            .expansion
            .build(self.omega_hot, self.omega_cold)
            .context("expansion stroke")?;
        let spec = CycleSpec::new(
            self.omega_cold,
            self.omega_hot,
            self.beta_cold,
            self.beta_hot,
            compression,
            expansion,
            self.medium.build()?,
        )?;
        Ok(spec.with_isochores(self.isochores.hot, self.isochores.cold)?)
    }

    pub const AXES: &'static [&'static str] = &[
        "omega_cold",
        "omega_hot",
        "beta_cold",
        "beta_hot",
        "tau",
        "tau_compression",
        "tau_expansion",
        "tau_hot",
        "tau_cold",
        "particles",
        "lambda",
    ];

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "omega_cold" => self.omega_cold = value,
            "omega_hot" => self.omega_hot = value,
            "beta_cold" => self.beta_cold = value,
            "beta_hot" => self.beta_hot = value,
            "tau" => {
                self.compression.set_tau(value);
                self.expansion.set_tau(value);
            }
            "tau_compression" => self.compression.set_tau(value),
            "tau_expansion" => self.expansion.set_tau(value),
            "tau_hot" => self.isochores.hot = value,
            "tau_cold" => self.isochores.cold = value,
            "particles" => self.medium.particles = as_count(value)?,
            "lambda" => self.medium.lambda = value,
            _ => bail!("unknown cycle axis `{name}`"),
        }
        Ok(())
    }
}

fn as_count(value: f64) -> Result<usize> {
    if value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
        Ok(value as usize)
    } else {
        bail!("particle number must be a positive integer, got {value}")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisScale {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub name: String,
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
    #[serde(default)]
    pub scale: AxisScale,
}

impl AxisConfig {
    /// Explicit `values`, or `count` points from `start` to `stop` inclusive.
    pub fn points(&self) -> Result<Vec<f64>> {
        let name = &self.name;
        let points = match (&self.values, self.start, self.stop, self.count) {
            (Some(values), None, None, None) => values.clone(),
            (None, Some(start), Some(stop), Some(count)) => {
                if count == 0 {
                    bail!("axis `{name}`: count must be at least 1");
                }
                if self.scale == AxisScale::Log && !(start > 0.0 && stop > 0.0) {
                    bail!("axis `{name}`: log scale needs positive start and stop");
                }
                (0..count)
                    .map(|i| {
                        if i == 0 {
                            return start;
                        }
                        if i == count - 1 {
                            return stop;
                        }
                        let s = i as f64 / (count - 1) as f64;
                        match self.scale {
                            AxisScale::Linear => start + (stop - start) * s,
                            AxisScale::Log => (start.ln() + (stop.ln() - start.ln()) * s).exp(),
                        }
                    })
                    .collect()
            }
            _ => bail!("axis `{name}`: give either `values` or `start`, `stop` and `count`"),
        };
        if points.is_empty() {
            bail!("axis `{name}` has no values");
        }
        if points.iter().any(|v| !v.is_finite()) {
            bail!("axis `{name}` has a non-finite value");
        }
        Ok(points)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Base cycle; axes override its fields.
    pub cycle: Option<CycleConfig>,
    /// Base stroke protocol; axes override `omega_start`, `omega_end`, `tau`.
    pub stroke: Option<ProtocolConfig>,
    pub axes: Vec<AxisConfig>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RampConfig {
    #[default]
    Smooth,
    Linear,
}

impl From<RampConfig> for Ramp {
    fn from(r: RampConfig) -> Self {
        match r {
            RampConfig::Smooth => Ramp::Smooth,
            RampConfig::Linear => Ramp::Linear,
        }
    }
}

/// Matrix entry: a real number or `{"re": .., "im": ..}`.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex {
        re: f64,
        #[serde(default)]
        im: f64,
    },
}

impl From<Entry> for Complex64 {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Real(re) => Complex64::new(re, 0.0),
            Entry::Complex { re, im } => Complex64::new(re, im),
        }
    }
}

fn matrix(rows: &[Vec<Entry>], what: &str) -> Result<CMatrix> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        bail!("{what} must be a square, nonempty list of rows");
    }
    Ok(CMatrix::from_fn(d, d, |i, j| rows[i][j].into()))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PathConfig {
    /// H = (ħ/2)(Δσˣ + λσᶻ).
    Qubit {
        delta: f64,
        lambda_start: f64,
        lambda_end: f64,
    },
    /// H = H₀ + Σ_μ λ^μ(t) V_μ.
    Affine {
        offset: Vec<Vec<Entry>>,
        generators: Vec<Vec<Vec<Entry>>>,
        start: Vec<f64>,
        end: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CdReport {
    #[default]
    Summary,
    Work,
    Cost,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteConfig {
    #[default]
    Construction,
    Tdse,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CdConfig {
    pub path: PathConfig,
    pub tau: f64,
    #[serde(default)]
    pub ramp: RampConfig,
    #[serde(default = "unit")]
    pub hbar: f64,
    /// Initial level populations; defaults to the ground state.
    pub occupations: Option<Vec<f64>>,
    /// Number of equally spaced measurement times on [0, τ], endpoints included.
    #[serde(default = "default_cd_samples")]
    pub samples: usize,
    #[serde(default)]
    pub report: CdReport,
    #[serde(default)]
    pub route: RouteConfig,
    /// Integration intervals used by the chosen route for each measurement time.
    #[serde(default = "default_cd_steps")]
    pub steps: usize,
}

fn default_cd_samples() -> usize {
    51
}

fn default_cd_steps() -> usize {
    2000
}

impl CdConfig {
    pub fn path(&self) -> Result<AffinePath> {
        let ramp = self.ramp.into();
        Ok(match &self.path {
            PathConfig::Qubit {
                delta,
                lambda_start,
                lambda_end,
            } => AffinePath::qubit_sweep(
                *delta,
                *lambda_start,
                *lambda_end,
                self.tau,
                ramp,
                self.hbar,
            )?,
            PathConfig::Affine {
                offset,
                generators,
                start,
                end,
            } => {
                let offset = matrix(offset, "offset")?;
                let generators = generators
                    .iter()
                    .map(|g| matrix(g, "generator"))
                    .collect::<Result<Vec<_>>>()?;
                let schedule = Schedule::new(start.clone(), end.clone(), self.tau, ramp)?;
                AffinePath::new(offset, generators, schedule, self.hbar)?
            }
        })
    }

    pub fn occupations(&self, dimension: usize) -> Vec<f64> {
        self.occupations.clone().unwrap_or_else(|| {
            let mut p = vec![0.0; dimension];
            p[0] = 1.0;
            p
        })
    }
}
