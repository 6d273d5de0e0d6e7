use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::linalg::hermiticity_defect;
use super::{CMatrix, CdError};
use crate::blend::smoothstep5;

/// A parameterized Hermitian schedule `t ↦ H(λ(t))` on `[0, duration]`.
pub trait HamiltonianPath {
    fn dimension(&self) -> usize;
    fn duration(&self) -> f64;
    fn parameter_count(&self) -> usize;
    fn hbar(&self) -> f64;

    /// λ(t). Implementations should stay smooth slightly beyond `[0, duration]`
    /// because projector derivatives are taken by centered differences.
    fn parameters(&self, t: f64) -> Vec<f64>;

    /// λ̇(t); the default is an eighth-order centered difference.
    fn parameter_rates(&self, t: f64) -> Vec<f64> {
        let h = 1e-3 * self.duration();
        let mut rates = vec![0.0; self.parameter_count()];
        for (offset, weight) in CENTERED_FIRST_DERIVATIVE {
            let p = self.parameters(t + offset * h);
            for (r, v) in rates.iter_mut().zip(p) {
                *r += weight * v / h;
            }
        }
        rates
    }

    fn hamiltonian_at(&self, parameters: &[f64]) -> CMatrix;

    /// ∂H/∂λ^μ at the given parameter point.
    fn gradient_at(&self, parameters: &[f64], index: usize) -> CMatrix;

    fn hamiltonian(&self, t: f64) -> CMatrix {
        self.hamiltonian_at(&self.parameters(t))
    }

    /// Ḣ = Σ_μ (∂H/∂λ^μ) λ̇^μ.
    fn hamiltonian_rate(&self, t: f64) -> CMatrix {
        let params = self.parameters(t);
        let rates = self.parameter_rates(t);
        let d = self.dimension();
        let mut out = CMatrix::zeros(d, d);
        for (mu, rate) in rates.iter().enumerate() {
            if *rate != 0.0 {
                out += self.gradient_at(&params, mu) * Complex64::from(*rate);
            }
        }
        out
    }
}

/// Offsets and weights of the eighth-order centered first-derivative stencil.
pub(crate) const CENTERED_FIRST_DERIVATIVE: [(f64, f64); 8] = [
    (-4.0, 1.0 / 280.0),
    (-3.0, -4.0 / 105.0),
    (-2.0, 1.0 / 5.0),
    (-1.0, -4.0 / 5.0),
    (1.0, 4.0 / 5.0),
    (2.0, -1.0 / 5.0),
    (3.0, 4.0 / 105.0),
    (4.0, -1.0 / 280.0),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ramp {
    /// Quintic smoothstep: λ̇ and λ̈ vanish at both ends, so H₁(0) = H₁(τ) = 0.
    Smooth,
    Linear,
}

/// Straight-line interpolation between two parameter points.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    start: Vec<f64>,
    end: Vec<f64>,
    duration: f64,
    ramp: Ramp,
}

impl Schedule {
    pub fn new(start: Vec<f64>, end: Vec<f64>, duration: f64, ramp: Ramp) -> Result<Self, CdError> {
        if start.len() != end.len() || start.is_empty() {
            return Err(CdError::InvalidInput(
                "schedule endpoints must have equal, nonzero length",
            ));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(CdError::InvalidInput("schedule duration must be positive"));
        }
        if start.iter().chain(&end).any(|v| !v.is_finite()) {
            return Err(CdError::InvalidInput("schedule endpoints must be finite"));
        }
        Ok(Self {
            start,
            end,
            duration,
            ramp,
        })
    }

    pub fn start(&self) -> &[f64] {
        &self.start
    }

    pub fn end(&self) -> &[f64] {
        &self.end
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn ramp(&self) -> Ramp {
        self.ramp
    }

    /// Same shape stretched to a new duration.
    pub fn with_duration(&self, duration: f64) -> Result<Self, CdError> {
        Self::new(self.start.clone(), self.end.clone(), duration, self.ramp)
    }

    // Blend weight and its time derivative. The polynomial is used as-is outside
    // [0, τ] so that stencils straddling the endpoints remain smooth.
    fn weight(&self, t: f64) -> (f64, f64) {
        let s = t / self.duration;
        match self.ramp {
            Ramp::Smooth => {
                let g = smoothstep5(s);
                (g[0], g[1] / self.duration)
            }
            Ramp::Linear => (s, 1.0 / self.duration),
        }
    }

    pub fn parameters(&self, t: f64) -> Vec<f64> {
        let (g, _) = self.weight(t);
        self.start
            .iter()
            .zip(&self.end)
            .map(|(a, b)| (1.0 - g) * a + g * b)
            .collect()
    }

    pub fn rates(&self, t: f64) -> Vec<f64> {
        let (_, dg) = self.weight(t);
        self.start
            .iter()
            .zip(&self.end)
            .map(|(a, b)| dg * (b - a))
            .collect()
    }
}

/// `H(λ) = H₀ + Σ_μ λ^μ G_μ` with constant Hermitian `H₀`, `G_μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinePath {
    offset: CMatrix,
    generators: Vec<CMatrix>,
    schedule: Schedule,
    hbar: f64,
}

impl AffinePath {
    pub fn new(
        offset: CMatrix,
        generators: Vec<CMatrix>,
        schedule: Schedule,
        hbar: f64,
    ) -> Result<Self, CdError> {
        let d = offset.nrows();
        if d < 2 || offset.ncols() != d {
            return Err(CdError::InvalidInput(
                "Hamiltonian must be square with dimension >= 2",
            ));
        }
        if generators.len() != schedule.start.len() {
            return Err(CdError::InvalidInput(
                "one generator per schedule parameter required",
            ));
        }
        if generators.iter().any(|g| g.nrows() != d || g.ncols() != d) {
            return Err(CdError::InvalidInput(
                "generator dimensions differ from the Hamiltonian",
            ));
        }
        for m in core::iter::once(&offset).chain(&generators) {
            let defect = hermiticity_defect(m);
            if !(defect <= 1e-12) {
                return Err(CdError::NotHermitian { time: 0.0, defect });
            }
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(CdError::InvalidInput("hbar must be positive"));
        }
        Ok(Self {
            offset,
            generators,
            schedule,
            hbar,
        })
    }

    /// Two-level sweep `H = (ħ/2)(Δσˣ + λ(t)σᶻ)` with λ running from
    /// `lambda_start` to `lambda_end`.
    pub fn qubit_sweep(
        delta: f64,
        lambda_start: f64,
        lambda_end: f64,
        duration: f64,
        ramp: Ramp,
        hbar: f64,
    ) -> Result<Self, CdError> {
        let half = 0.5 * hbar;
        let c = |v: f64| Complex64::new(v, 0.0);
        let zero = c(0.0);
        let sigma_x =
            CMatrix::from_row_slice(2, 2, &[zero, c(half * delta), c(half * delta), zero]);
        let sigma_z = CMatrix::from_row_slice(2, 2, &[c(half), zero, zero, c(-half)]);
        let schedule = Schedule::new(vec![lambda_start], vec![lambda_end], duration, ramp)?;
        Self::new(sigma_x, vec![sigma_z], schedule, hbar)
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn offset(&self) -> &CMatrix {
        &self.offset
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn with_duration(&self, duration: f64) -> Result<Self, CdError> {
        Ok(Self {
            schedule: self.schedule.with_duration(duration)?,
            ..self.clone()
        })
    }
}

impl HamiltonianPath for AffinePath {
    fn dimension(&self) -> usize {
        self.offset.nrows()
    }

    fn duration(&self) -> f64 {
        self.schedule.duration
    }

    fn parameter_count(&self) -> usize {
        self.generators.len()
    }

    fn hbar(&self) -> f64 {
        self.hbar
    }

    fn parameters(&self, t: f64) -> Vec<f64> {
        self.schedule.parameters(t)
    }

    fn parameter_rates(&self, t: f64) -> Vec<f64> {
        self.schedule.rates(t)
    }

    fn hamiltonian_at(&self, parameters: &[f64]) -> CMatrix {
        let mut h = self.offset.clone();
        for (g, &p) in self.generators.iter().zip(parameters) {
            h += g * Complex64::from(p);
        }
        h
    }

    fn gradient_at(&self, _parameters: &[f64], index: usize) -> CMatrix {
        self.generators[index].clone()
    }
}
