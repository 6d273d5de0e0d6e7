use alloc::vec::Vec;

use num_complex::Complex64;

#[allow(unused_imports)]
use crate::prelude::*;

use super::linalg::{exp_from_eigen, hermitian_eigen, hermiticity_defect};
use super::spectral::uniform_grid;
use super::{CMatrix, CVector, CdError};

/// Steps with ‖H‖Δt/ħ above this are flagged as coarse.
pub const STEP_WARNING: f64 = 0.1;

/// Largest tolerated deviation of the state norm (or of U†U from 1).
pub const NORM_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CVector>,
    pub max_norm_drift: f64,
    /// Set when some step exceeded [`STEP_WARNING`].
    pub coarse_steps: bool,
}

impl Trajectory {
    pub fn final_state(&self) -> &CVector {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryTrajectory {
    pub times: Vec<f64>,
    pub unitaries: Vec<CMatrix>,
    pub coarse_steps: bool,
}

impl UnitaryTrajectory {
    pub fn final_unitary(&self) -> &CMatrix {
        self.unitaries
            .last()
            .expect("trajectory holds the identity")
    }

    /// Largest relative deviation between iħ (dU/dt) U† (centered differences
    /// at interior grid points) and the generator itself.
    pub fn generator_residual<G>(&self, mut generator: G, hbar: f64) -> Result<f64, CdError>
    where
        G: FnMut(f64) -> Result<CMatrix, CdError>,
    {
        let mut worst: f64 = 0.0;
        for k in 1..self.unitaries.len().saturating_sub(1) {
            let dt = self.times[k + 1] - self.times[k - 1];
            let du = (&self.unitaries[k + 1] - &self.unitaries[k - 1]) / Complex64::from(dt);
            let recovered = du * self.unitaries[k].adjoint() * Complex64::new(0.0, hbar);
            let h = generator(self.times[k])?;
            let scale = h.norm().max(f64::MIN_POSITIVE);
            worst = worst.max((recovered - &h).norm() / scale);
        }
        Ok(worst)
    }
}

struct Stepper {
    dt: f64,
    hbar: f64,
    coarse: bool,
}

impl Stepper {
    fn step<G>(&mut self, generator: &mut G, t_mid: f64) -> Result<CMatrix, CdError>
    where
        G: FnMut(f64) -> Result<CMatrix, CdError>,
    {
        let h = generator(t_mid)?;
        let defect = hermiticity_defect(&h);
        if !(defect <= 1e-12) {
            return Err(CdError::NotHermitian {
                time: t_mid,
                defect,
            });
        }
        let (values, vectors) = hermitian_eigen(&h);
        let scale = values.iter().map(|e| e.abs()).fold(0.0, f64::max);
        if scale * self.dt / self.hbar > STEP_WARNING {
            self.coarse = true;
        }
        Ok(exp_from_eigen(&values, &vectors, self.dt / self.hbar))
    }
}

fn validate(duration: f64, steps: usize, hbar: f64) -> Result<(), CdError> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(CdError::InvalidInput("duration must be positive"));
    }
    if steps == 0 {
        return Err(CdError::InvalidInput("at least one step is required"));
    }
    if !(hbar > 0.0) {
        return Err(CdError::InvalidInput("hbar must be positive"));
    }
    Ok(())
}

/// Solves iħ ∂ₜψ = H(t)ψ on `[0, duration]`. Each step applies the exact
/// exponential of the generator at the interval midpoint.
pub fn evolve_tdse<G>(
    mut generator: G,
    initial: &CVector,
    duration: f64,
    steps: usize,
    hbar: f64,
) -> Result<Trajectory, CdError>
where
    G: FnMut(f64) -> Result<CMatrix, CdError>,
{
    validate(duration, steps, hbar)?;
    if (initial.norm() - 1.0).abs() > 1e-12 {
        return Err(CdError::InvalidInput("initial state must be normalized"));
    }
    let times = uniform_grid(duration, steps);
    let mut stepper = Stepper {
        dt: duration / steps as f64,
        hbar,
        coarse: false,
    };
    let mut states = Vec::with_capacity(steps + 1);
    states.push(initial.clone());
    let mut max_drift: f64 = 0.0;
    for k in 0..steps {
        let t_mid = 0.5 * (times[k] + times[k + 1]);
        let u = stepper.step(&mut generator, t_mid)?;
        let next = u * &states[k];
        let drift = (next.norm() - 1.0).abs();
        if drift > NORM_TOLERANCE {
            return Err(CdError::NormDrift {
                time: times[k + 1],
                drift,
            });
        }
        max_drift = max_drift.max(drift);
        states.push(next);
    }
    Ok(Trajectory {
        times,
        states,
        max_norm_drift: max_drift,
        coarse_steps: stepper.coarse,
    })
}

/// Propagator U(t, 0) on the grid, obtained by evolving every basis state.
pub fn evolve_unitary<G>(
    mut generator: G,
    dimension: usize,
    duration: f64,
    steps: usize,
    hbar: f64,
) -> Result<UnitaryTrajectory, CdError>
where
    G: FnMut(f64) -> Result<CMatrix, CdError>,
{
    validate(duration, steps, hbar)?;
    let times = uniform_grid(duration, steps);
    let mut stepper = Stepper {
        dt: duration / steps as f64,
        hbar,
        coarse: false,
    };
    let identity = CMatrix::identity(dimension, dimension);
    let mut unitaries = Vec::with_capacity(steps + 1);
    unitaries.push(identity.clone());
    for k in 0..steps {
        let t_mid = 0.5 * (times[k] + times[k + 1]);
        let next = stepper.step(&mut generator, t_mid)? * &unitaries[k];
        let defect = (next.adjoint() * &next - &identity).norm();
        if defect > NORM_TOLERANCE {
            return Err(CdError::NormDrift {
                time: times[k + 1],
                drift: defect,
            });
        }
        unitaries.push(next);
    }
    Ok(UnitaryTrajectory {
        times,
        unitaries,
        coarse_steps: stepper.coarse,
    })
}
