use alloc::boxed::Box;
use alloc::vec::Vec;

#[allow(unused_imports)]
use crate::prelude::*;

use super::spline::UniformSpline;
use super::ErmakovError;
use crate::blend::smoothstep5;
use crate::sta::PolynomialScaling;

/// How ω²(t) is represented.
#[derive(Clone, Debug, PartialEq)]
pub enum ProtocolKind {
    /// ω(t) = ω₀ throughout.
    Constant,
    /// ω² linear in t between the endpoints.
    LinearRamp,
    /// ω² follows the quintic smoothstep between the endpoints; ω̇ and ω̈ vanish at both ends.
    SmoothRamp,
    /// ω² = ω₀² at t = 0 and ω_f² for every t > 0.
    SuddenQuench,
    /// Inverse-engineered frequency ω² = ω₀²/b⁴ − b̈/b for the polynomial scaling ansatz.
    PolynomialSta { b_tau: f64 },
    /// Local counterdiabatic frequency Ω² built from a smooth reference ramp.
    LocalCd { reference: Box<FrequencyProtocol> },
    /// Uniformly sampled ω² values with natural cubic-spline interpolation.
    Sampled { spline: UniformSpline },
}

/// A trap-frequency-squared schedule ω²(t) on `[0, τ]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyProtocol {
    tau: f64,
    omega0: f64,
    omega_f: f64,
    kind: ProtocolKind,
}

fn check_positive(value: f64, what: &'static str) -> Result<(), ErmakovError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ErmakovError::InvalidProtocol(what))
    }
}

impl FrequencyProtocol {
    pub(crate) fn from_parts(
        tau: f64,
        omega0: f64,
        omega_f: f64,
        kind: ProtocolKind,
    ) -> Result<Self, ErmakovError> {
        check_positive(tau, "duration must be positive and finite")?;
        check_positive(omega0, "initial frequency must be positive")?;
        check_positive(omega_f, "final frequency must be positive")?;
        Ok(Self {
            tau,
            omega0,
            omega_f,
            kind,
        })
    }

    pub fn constant(omega: f64, tau: f64) -> Result<Self, ErmakovError> {
        Self::from_parts(tau, omega, omega, ProtocolKind::Constant)
    }

    pub fn linear_ramp(omega0: f64, omega_f: f64, tau: f64) -> Result<Self, ErmakovError> {
        Self::from_parts(tau, omega0, omega_f, ProtocolKind::LinearRamp)
    }

    pub fn smooth_ramp(omega0: f64, omega_f: f64, tau: f64) -> Result<Self, ErmakovError> {
        Self::from_parts(tau, omega0, omega_f, ProtocolKind::SmoothRamp)
    }

    /// Sudden change ω₀ → ω_f right after t = 0, held for a stroke of length `tau`.
    pub fn sudden_quench(omega0: f64, omega_f: f64, tau: f64) -> Result<Self, ErmakovError> {
        Self::from_parts(tau, omega0, omega_f, ProtocolKind::SuddenQuench)
    }

    /// ω² samples on a uniform grid covering `[0, tau]`, endpoints included.
    pub fn sampled(tau: f64, omega_sq: Vec<f64>) -> Result<Self, ErmakovError> {
        if omega_sq.len() < 2 {
            return Err(ErmakovError::InvalidProtocol(
                "sampled protocol needs at least two samples",
            ));
        }
        if omega_sq.iter().any(|v| !v.is_finite()) {
            return Err(ErmakovError::InvalidProtocol("sampled ω² must be finite"));
        }
        let first = omega_sq[0];
        let last = omega_sq[omega_sq.len() - 1];
        if first <= 0.0 || last <= 0.0 {
            return Err(ErmakovError::InvalidProtocol(
                "endpoint ω² must be positive",
            ));
        }
        Self::from_parts(
            tau,
            first.sqrt(),
            last.sqrt(),
            ProtocolKind::Sampled {
                spline: UniformSpline::new(tau, omega_sq),
            },
        )
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn omega_final(&self) -> f64 {
        self.omega_f
    }

    pub fn kind(&self) -> &ProtocolKind {
        &self.kind
    }

    /// Short machine-readable name of the protocol kind.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ProtocolKind::Constant => "constant",
            ProtocolKind::LinearRamp => "linear",
            ProtocolKind::SmoothRamp => "smooth",
            ProtocolKind::SuddenQuench => "quench",
            ProtocolKind::PolynomialSta { .. } => "sta",
            ProtocolKind::LocalCd { .. } => "local_cd",
            ProtocolKind::Sampled { .. } => "sampled",
        }
    }

    /// ω²(t); `t` is clamped to `[0, τ]`.
    pub fn omega_sq(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.tau);
        match &self.kind {
            ProtocolKind::SuddenQuench if t == 0.0 => self.omega0 * self.omega0,
            ProtocolKind::Sampled { spline } => spline.eval(t),
            ProtocolKind::LocalCd { reference } => local_cd_omega_sq(reference, t),
            _ => self
                .analytic_derivatives(t)
                .map(|d| d[0])
                .unwrap_or(f64::NAN),
        }
    }

    /// ω² as seen by the integrator inside a step starting at `t`. Differs from
    /// [`omega_sq`](Self::omega_sq) only at the discontinuity of a sudden quench.
    pub(crate) fn omega_sq_right(&self, t: f64) -> f64 {
        match self.kind {
            ProtocolKind::SuddenQuench => self.omega_f * self.omega_f,
            _ => self.omega_sq(t),
        }
    }

    /// (ω², dω²/dt, d²ω²/dt²) for the kinds with closed-form derivatives.
    pub(crate) fn analytic_derivatives(&self, t: f64) -> Option<[f64; 3]> {
        let w0 = self.omega0 * self.omega0;
        let wf = self.omega_f * self.omega_f;
        let t = t.clamp(0.0, self.tau);
        match &self.kind {
            ProtocolKind::Constant => Some([w0, 0.0, 0.0]),
            ProtocolKind::LinearRamp => {
                let rate = (wf - w0) / self.tau;
                Some([w0 + rate * t, rate, 0.0])
            }
            ProtocolKind::SmoothRamp => {
                let g = smoothstep5(t / self.tau);
                let d = wf - w0;
                Some([
                    w0 + d * g[0],
                    d * g[1] / self.tau,
                    d * g[2] / (self.tau * self.tau),
                ])
            }
            ProtocolKind::SuddenQuench => {
                if t == 0.0 {
                    Some([w0, 0.0, 0.0])
                } else {
                    Some([wf, 0.0, 0.0])
                }
            }
            ProtocolKind::PolynomialSta { b_tau } => {
                let [b, b1, b2, b3, b4] =
                    PolynomialScaling::new_unchecked(*b_tau, self.tau).derivatives(t);
                let b_inv = 1.0 / b;
                let w0b4 = w0 * b_inv.powi(4);
                let u = w0b4 - b2 * b_inv;
                let du = -4.0 * w0b4 * b_inv * b1 - b3 * b_inv + b2 * b1 * b_inv * b_inv;
                let ddu =
                    20.0 * w0b4 * b_inv * b_inv * b1 * b1 - 4.0 * w0b4 * b_inv * b2 - b4 * b_inv
                        + (2.0 * b3 * b1 + b2 * b2) * b_inv * b_inv
                        - 2.0 * b2 * b1 * b1 * b_inv.powi(3);
                Some([u, du, ddu])
            }
            ProtocolKind::LocalCd { .. } | ProtocolKind::Sampled { .. } => None,
        }
    }

    /// (ω², dω²/dt, d²ω²/dt²): analytic where available, centered differences
    /// with step τ/10⁴ on sampled protocols. `None` for kinds without two
    /// derivatives (sudden quench, nested local-CD protocols).
    pub fn omega_sq_derivatives(&self, t: f64) -> Option<[f64; 3]> {
        match &self.kind {
            ProtocolKind::SuddenQuench | ProtocolKind::LocalCd { .. } => None,
            ProtocolKind::Sampled { spline } => {
                let h = self.tau * 1e-4;
                // one-sided near the ends so the stencil stays inside [0, τ]
                let c = t.clamp(h, self.tau - h);
                let lo = spline.eval(c - h);
                let mid = spline.eval(c);
                let hi = spline.eval(c + h);
                Some([
                    spline.eval(t),
                    (hi - lo) / (2.0 * h),
                    (hi - 2.0 * mid + lo) / (h * h),
                ])
            }
            _ => self.analytic_derivatives(t),
        }
    }

    /// Whether ω²(t) never changes direction over the stroke (checked on a
    /// 2001-point grid for kinds without a closed-form answer).
    pub fn is_monotonic(&self) -> bool {
        match self.kind {
            ProtocolKind::Constant
            | ProtocolKind::LinearRamp
            | ProtocolKind::SmoothRamp
            | ProtocolKind::SuddenQuench => true,
            _ => {
                let n = 2000;
                let mut rising = false;
                let mut falling = false;
                let mut prev = self.omega_sq(0.0);
                for k in 1..=n {
                    let cur = self.omega_sq(self.tau * k as f64 / n as f64);
                    let scale = 1e-12 * (prev.abs() + cur.abs());
                    if cur > prev + scale {
                        rising = true;
                    } else if cur < prev - scale {
                        falling = true;
                    }
                    prev = cur;
                }
                !(rising && falling)
            }
        }
    }

    /// Smallest ω² on a grid of `points` samples.
    pub fn min_omega_sq(&self, points: usize) -> f64 {
        let n = points.max(2) - 1;
        (0..=n)
            .map(|k| self.omega_sq(self.tau * k as f64 / n as f64))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Ω² = ω² − (3/4)(ω̇/ω)² + ω̈/(2ω), written in terms of u = ω².
pub(crate) fn local_cd_omega_sq(reference: &FrequencyProtocol, t: f64) -> f64 {
    match reference.omega_sq_derivatives(t) {
        Some([u, du, ddu]) => {
            let w = u.sqrt();
            let wdot = du / (2.0 * w);
            let wddot = ddu / (2.0 * w) - du * du / (4.0 * u * w);
            u - 0.75 * (wdot / w) * (wdot / w) + wddot / (2.0 * w)
        }
        None => f64::NAN,
    }
}
