//! Scaling dynamics of a scale-invariant trapped gas.
//!
//! Under a modulation ω(t) of the trap the state evolves by a dilation with
//! scaling factor `b(t)`, the solution of the Ermakov equation
//!
//! ```text
//! b̈ + ω²(t) b = ω₀² b⁻³,   b(0) = 1, ḃ(0) = 0.
//! ```
//!
//! The nonadiabatic factor Q*(t) compares the mean energy reached by the
//! actual dynamics with the adiabatic value ω(t)/ω₀ · E₀.

mod protocol;
mod spline;

use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use crate::prelude::*;

pub use protocol::{FrequencyProtocol, ProtocolKind};
pub use spline::UniformSpline;

#[derive(Clone, Debug, PartialEq)]
pub enum ErmakovError {
    InvalidProtocol(&'static str),
    /// `b` left the configured window (or became non-finite) at time `t`.
    Diverged {
        t: f64,
        b: f64,
    },
    /// Q* and the adiabatic reference need a real trap frequency; ω²(t) ≤ 0 here.
    UndefinedQStar {
        t: f64,
        omega_sq: f64,
    },
    OutOfRange {
        t: f64,
    },
    InvalidSettings(&'static str),
    NotConverged {
        tolerance: f64,
        steps: usize,
    },
}

impl fmt::Display for ErmakovError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidProtocol(msg) => write!(f, "invalid protocol: {msg}"),
            Self::Diverged { t, b } => {
                write!(f, "Ermakov solution diverged at t = {t:e} (b = {b:e})")
            }
            Self::UndefinedQStar { t, omega_sq } => write!(
                f,
                "Q* undefined at t = {t:e}: inverted trap (omega^2 = {omega_sq:e})"
            ),
            Self::OutOfRange { t } => write!(f, "time {t:e} outside the solved interval"),
            Self::InvalidSettings(msg) => write!(f, "invalid solver settings: {msg}"),
            Self::NotConverged { tolerance, steps } => {
                write!(f, "tolerance {tolerance:e} not reached with {steps} steps")
            }
        }
    }
}

impl core::error::Error for ErmakovError {}

/// Step-size selection for [`solve_ermakov`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepControl {
    /// Fixed step; rounded down so that the grid ends exactly at τ.
    Step(f64),
    /// Fixed number of steps.
    Steps(usize),
    /// Step doubling until the terminal (b, ḃ/ω₀) changes by less than the tolerance.
    Tolerance(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverSettings {
    pub control: StepControl,
    pub b_min: f64,
    pub b_max: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            control: StepControl::Steps(10_000),
            b_min: 1e-6,
            b_max: 1e6,
        }
    }
}

impl SolverSettings {
    pub fn with_steps(steps: usize) -> Self {
        Self {
            control: StepControl::Steps(steps),
            ..Self::default()
        }
    }
}

/// State of the scaling factor at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingPoint {
    pub t: f64,
    pub b: f64,
    pub bdot: f64,
    pub bddot: f64,
}

/// Grid solution of the Ermakov equation for one protocol.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingSolution {
    protocol: FrequencyProtocol,
    step: f64,
    b: Vec<f64>,
    bdot: Vec<f64>,
    bddot: Vec<f64>,
}

#[inline]
fn ermakov_rhs(omega0_sq: f64, omega_sq: f64, b: f64) -> f64 {
    omega0_sq / (b * b * b) - omega_sq * b
}

fn integrate(
    protocol: &FrequencyProtocol,
    steps: usize,
    settings: &SolverSettings,
) -> Result<ScalingSolution, ErmakovError> {
    let h = protocol.tau() / steps as f64;
    let w0 = protocol.omega0() * protocol.omega0();
    let mut b = Vec::with_capacity(steps + 1);
    let mut bdot = Vec::with_capacity(steps + 1);
    let mut bddot = Vec::with_capacity(steps + 1);
    let (mut x, mut v) = (1.0_f64, 0.0_f64);
    b.push(x);
    bdot.push(v);
    bddot.push(ermakov_rhs(w0, protocol.omega_sq_right(0.0), x));
    for k in 0..steps {
        let t = k as f64 * h;
        let w_start = protocol.omega_sq_right(t);
        let w_mid = protocol.omega_sq(t + 0.5 * h);
        let w_end = protocol.omega_sq(t + h);

        let k1x = v;
        let k1v = ermakov_rhs(w0, w_start, x);
        let k2x = v + 0.5 * h * k1v;
        let k2v = ermakov_rhs(w0, w_mid, x + 0.5 * h * k1x);
        let k3x = v + 0.5 * h * k2v;
        let k3v = ermakov_rhs(w0, w_mid, x + 0.5 * h * k2x);
        let k4x = v + h * k3v;
        let k4v = ermakov_rhs(w0, w_end, x + h * k3x);
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

        if !(x.is_finite() && v.is_finite()) || x < settings.b_min || x > settings.b_max {
            return Err(ErmakovError::Diverged { t: t + h, b: x });
        }
        b.push(x);
        bdot.push(v);
        bddot.push(ermakov_rhs(w0, w_end, x));
    }
    Ok(ScalingSolution {
        protocol: protocol.clone(),
        step: h,
        b,
        bdot,
        bddot,
    })
}

/// Integrates the Ermakov equation with fixed-step classical RK4 on (b, ḃ).
pub fn solve_ermakov(
    protocol: &FrequencyProtocol,
    settings: &SolverSettings,
) -> Result<ScalingSolution, ErmakovError> {
    if !(settings.b_min > 0.0 && settings.b_max > settings.b_min) {
        return Err(ErmakovError::InvalidSettings("need 0 < b_min < b_max"));
    }
    let tau = protocol.tau();
    match settings.control {
        StepControl::Steps(n) if n >= 1 => integrate(protocol, n, settings),
        StepControl::Step(h) if h > 0.0 && h.is_finite() => {
            let n = (tau / h).ceil().max(1.0) as usize;
            integrate(protocol, n, settings)
        }
        StepControl::Tolerance(tol) if tol > 0.0 && tol < 1.0 => {
            const MAX_STEPS: usize = 1 << 21;
            let scale = protocol.omega0();
            let mut n = 256;
            let mut coarse = integrate(protocol, n, settings)?;
            loop {
                let fine = integrate(protocol, 2 * n, settings)?;
                let (cb, cv) = coarse.terminal();
                let (fb, fv) = fine.terminal();
                let diff = (cb - fb).abs().max((cv - fv).abs() / scale);
                if diff <= tol {
                    return Ok(fine);
                }
                n *= 2;
                if n > MAX_STEPS {
                    return Err(ErmakovError::NotConverged {
                        tolerance: tol,
                        steps: n,
                    });
                }
                coarse = fine;
            }
        }
        StepControl::Steps(_) => Err(ErmakovError::InvalidSettings("steps must be >= 1")),
        StepControl::Step(_) => Err(ErmakovError::InvalidSettings("step must be positive")),
        StepControl::Tolerance(_) => Err(ErmakovError::InvalidSettings(
            "tolerance must lie in (0, 1)",
        )),
    }
}

impl ScalingSolution {
    pub fn protocol(&self) -> &FrequencyProtocol {
        &self.protocol
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn time(&self, k: usize) -> f64 {
        if k + 1 == self.b.len() {
            self.protocol.tau()
        } else {
            k as f64 * self.step
        }
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn bdot(&self) -> &[f64] {
        &self.bdot
    }

    pub fn bddot(&self) -> &[f64] {
        &self.bddot
    }

    pub fn point(&self, k: usize) -> ScalingPoint {
        ScalingPoint {
            t: self.time(k),
            b: self.b[k],
            bdot: self.bdot[k],
            bddot: self.bddot[k],
        }
    }

    fn terminal(&self) -> (f64, f64) {
        let n = self.b.len() - 1;
        (self.b[n], self.bdot[n])
    }

    /// Scaling state at an arbitrary `t ∈ [0, τ]`. Between grid points b and ḃ
    /// come from quintic Hermite interpolation of (b, ḃ, b̈); b̈ is re-evaluated
    /// from the equation of motion.
    pub fn at(&self, t: f64) -> Result<ScalingPoint, ErmakovError> {
        let tau = self.protocol.tau();
        if !(t >= 0.0 && t <= tau * (1.0 + 1e-12)) {
            return Err(ErmakovError::OutOfRange { t });
        }
        let t = t.min(tau);
        let h = self.step;
        let last = self.b.len() - 1;
        let pos = t / h;
        let k = (pos.floor() as usize).min(last - 1);
        let a = pos - k as f64;
        let w0 = self.protocol.omega0() * self.protocol.omega0();
        if a.abs() < 1e-12 || (k + 1 == last && (tau - t).abs() <= 1e-12 * tau) {
            let idx = if a.abs() < 1e-12 { k } else { last };
            let b = self.b[idx];
            let bddot = ermakov_rhs(w0, self.protocol.omega_sq(t), b);
            return Ok(ScalingPoint {
                t,
                b,
                bdot: self.bdot[idx],
                bddot,
            });
        }
        let (f0, d0, s0) = (self.b[k], self.bdot[k] * h, self.bddot[k] * h * h);
        let (f1, d1, s1) = (
            self.b[k + 1],
            self.bdot[k + 1] * h,
            self.bddot[k + 1] * h * h,
        );
        let a2 = a * a;
        let a3 = a2 * a;
        let a4 = a3 * a;
        let a5 = a4 * a;
        let b = f0 * (1.0 - 10.0 * a3 + 15.0 * a4 - 6.0 * a5)
            + d0 * (a - 6.0 * a3 + 8.0 * a4 - 3.0 * a5)
            + s0 * 0.5 * (a2 - 3.0 * a3 + 3.0 * a4 - a5)
            + s1 * 0.5 * (a3 - 2.0 * a4 + a5)
            + d1 * (-4.0 * a3 + 7.0 * a4 - 3.0 * a5)
            + f1 * (10.0 * a3 - 15.0 * a4 + 6.0 * a5);
        let db = f0 * (-30.0 * a2 + 60.0 * a3 - 30.0 * a4)
            + d0 * (1.0 - 18.0 * a2 + 32.0 * a3 - 15.0 * a4)
            + s0 * 0.5 * (2.0 * a - 9.0 * a2 + 12.0 * a3 - 5.0 * a4)
            + s1 * 0.5 * (3.0 * a2 - 8.0 * a3 + 5.0 * a4)
            + d1 * (-12.0 * a2 + 28.0 * a3 - 15.0 * a4)
            + f1 * (30.0 * a2 - 60.0 * a3 + 30.0 * a4);
        let bddot = ermakov_rhs(w0, self.protocol.omega_sq(t), b);
        Ok(ScalingPoint {
            t,
            b,
            bdot: db / h,
            bddot,
        })
    }

    /// Nonadiabatic factor Q*(t).
    pub fn q_star(&self, t: f64) -> Result<f64, ErmakovError> {
        let p = self.at(t)?;
        let omega_sq = self.protocol.omega_sq(t);
        q_star_from(self.protocol.omega0(), omega_sq, p)
    }

    /// Q* at grid point `k`.
    pub fn q_star_at(&self, k: usize) -> Result<f64, ErmakovError> {
        let p = self.point(k);
        q_star_from(self.protocol.omega0(), self.protocol.omega_sq(p.t), p)
    }

    /// Q* at the end of the stroke.
    pub fn q_star_final(&self) -> Result<f64, ErmakovError> {
        self.q_star_at(self.b.len() - 1)
    }

    /// Largest violation of the Ermakov equation on the grid, with b̈ obtained
    /// by fourth-order finite differences of the stored ḃ.
    pub fn ermakov_residual(&self) -> f64 {
        let n = self.b.len();
        if n < 5 {
            return 0.0;
        }
        let h = self.step;
        let v = &self.bdot;
        let w0 = self.protocol.omega0() * self.protocol.omega0();
        let mut worst = 0.0_f64;
        for k in 0..n {
            let dv = if k == 0 {
                (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h)
            } else if k == 1 {
                (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / (12.0 * h)
            } else if k == n - 2 {
                (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] - v[n - 5])
                    / (12.0 * h)
            } else if k == n - 1 {
                (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4]
                    + 3.0 * v[n - 5])
                    / (12.0 * h)
            } else {
                (v[k - 2] - 8.0 * v[k - 1] + 8.0 * v[k + 1] - v[k + 2]) / (12.0 * h)
            };
            let omega_sq = if k == 0 {
                self.protocol.omega_sq_right(0.0)
            } else {
                self.protocol.omega_sq(self.time(k))
            };
            let r = (dv - ermakov_rhs(w0, omega_sq, self.b[k])).abs();
            worst = worst.max(r);
        }
        worst
    }
}

fn q_star_from(omega0: f64, omega_sq: f64, p: ScalingPoint) -> Result<f64, ErmakovError> {
    if !(omega_sq > 0.0) {
        return Err(ErmakovError::UndefinedQStar { t: p.t, omega_sq });
    }
    let w = omega_sq.sqrt();
    let w0sq = omega0 * omega0;
    let b2 = p.b * p.b;
    Ok(omega0 / w * (0.5 / b2 + omega_sq * b2 / (2.0 * w0sq) + p.bdot * p.bdot / (2.0 * w0sq)))
}

/// Nonadiabatic factor of a sudden quench, (ω₁² + ω₂²)/(2ω₁ω₂).
pub fn q_star_sudden(omega1: f64, omega2: f64) -> Result<f64, ErmakovError> {
    if !(omega1 > 0.0 && omega2 > 0.0 && omega1.is_finite() && omega2.is_finite()) {
        return Err(ErmakovError::InvalidProtocol(
            "frequencies must be positive",
        ));
    }
    Ok((omega1 * omega1 + omega2 * omega2) / (2.0 * omega1 * omega2))
}

/// Adiabatic scaling factor b_ad = √(ω₀/ω(t)) and energy ratio 1/b_ad² = ω(t)/ω₀.
pub fn adiabatic_reference(
    protocol: &FrequencyProtocol,
    t: f64,
) -> Result<(f64, f64), ErmakovError> {
    let omega_sq = protocol.omega_sq(t);
    if !(omega_sq > 0.0) {
        return Err(ErmakovError::UndefinedQStar { t, omega_sq });
    }
    let ratio = omega_sq.sqrt() / protocol.omega0();
    Ok(((1.0 / ratio).sqrt(), ratio))
}

/// Initial data that fixes the nonadiabatic mean energy of the gas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialMoments {
    /// ⟨H(0)⟩.
    pub energy: f64,
    /// Σᵢ⟨rᵢ²(0)⟩.
    pub position_sq: f64,
    /// Σᵢ⟨{rᵢ, pᵢ}(0)⟩.
    pub squeezing: f64,
    pub mass: f64,
    pub hbar: f64,
}

impl InitialMoments {
    /// Thermal state of the harmonic class: no squeezing and Σ⟨r²⟩ = E₀/(mω₀²).
    pub fn thermal(energy: f64, omega0: f64, mass: f64, hbar: f64) -> Self {
        Self {
            energy,
            position_sq: energy / (mass * omega0 * omega0),
            squeezing: 0.0,
            mass,
            hbar,
        }
    }
}

/// ⟨H(t)⟩ = E₀/b² − (m/2)(b b̈ − ḃ²) Σ⟨r²(0)⟩ + (ḃ/2b) Σ⟨{r, p}(0)⟩.
pub fn nonadiabatic_energy(
    solution: &ScalingSolution,
    t: f64,
    moments: &InitialMoments,
) -> Result<f64, ErmakovError> {
    let p = solution.at(t)?;
    Ok(moments.energy / (p.b * p.b)
        - 0.5 * moments.mass * (p.b * p.bddot - p.bdot * p.bdot) * moments.position_sq
        + p.bdot / (2.0 * p.b) * moments.squeezing)
}

#[cfg(test)]
mod tests;
