use alloc::vec::Vec;

#[allow(unused_imports)]
use crate::prelude::*;

use super::evolve::evolve_unitary;
use super::path::HamiltonianPath;
use super::spectral::{
    adiabatic_states, cd_term_in_frame, counterdiabatic_hamiltonian, eigensystem, projector_rates,
    spectral_frame,
};
use super::{CMatrix, CdError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WorkMode {
    /// Two-point measurement under H + H₁; the second measurement uses the
    /// eigenbasis of H + H₁ at the measurement time.
    Counterdiabatic,
    /// Transition probabilities δ_kn along the adiabatic trajectory of H.
    Adiabatic,
}

/// How U_CD(t, 0) is obtained in counterdiabatic mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UcdRoute {
    /// U_CD = Σ_m |ψ_m^ad(t)⟩⟨m(0)| with phases integrated on `steps` intervals.
    Construction { steps: usize },
    /// Midpoint-exponential propagation of H + H₁ with `steps` steps.
    Tdse { steps: usize },
}

/// Transition n → k of the two-point measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorkPoint {
    pub initial_level: usize,
    pub final_level: usize,
    /// E_k(t) − E_n(0).
    pub work: f64,
    /// p_n⁰ · p_{n→k}.
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorkDistribution {
    pub time: f64,
    pub initial_occupations: Vec<f64>,
    /// All d² transitions, ordered by initial then final level.
    pub points: Vec<WorkPoint>,
}

impl WorkDistribution {
    pub fn total_probability(&self) -> f64 {
        self.points.iter().map(|p| p.probability).sum()
    }

    pub fn mean(&self) -> f64 {
        self.points.iter().map(|p| p.probability * p.work).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.probability * p.work * p.work)
            .sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.points
            .iter()
            .map(|p| p.probability * (p.work - mean) * (p.work - mean))
            .sum()
    }
}

pub(crate) fn validate_occupations(occupations: &[f64], dimension: usize) -> Result<(), CdError> {
    if occupations.len() != dimension {
        return Err(CdError::InvalidOccupations(
            "one occupation per level required",
        ));
    }
    if occupations.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
        return Err(CdError::InvalidOccupations(
            "occupations must be nonnegative",
        ));
    }
    let total: f64 = occupations.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(CdError::InvalidOccupations("occupations must sum to 1"));
    }
    Ok(())
}

/// Work distribution at time `t` for a state diagonal in the initial energy basis.
pub fn work_distribution<P: HamiltonianPath + ?Sized>(
    path: &P,
    occupations: &[f64],
    t: f64,
    mode: WorkMode,
    route: UcdRoute,
) -> Result<WorkDistribution, CdError> {
    let d = path.dimension();
    validate_occupations(occupations, d)?;
    if !(t >= 0.0 && t <= path.duration()) {
        return Err(CdError::InvalidInput("measurement time outside the path"));
    }
    let mut points = Vec::with_capacity(d * d);
    match mode {
        WorkMode::Adiabatic => {
            let (initial, _) = eigensystem(&path.hamiltonian(0.0), Some(0.0))?;
            let (current, _) = eigensystem(&path.hamiltonian(t), Some(t))?;
            for n in 0..d {
                for (k, energy) in current.iter().enumerate() {
                    points.push(WorkPoint {
                        initial_level: n,
                        final_level: k,
                        work: energy - initial[n],
                        probability: if k == n { occupations[n] } else { 0.0 },
                    });
                }
            }
        }
        WorkMode::Counterdiabatic => {
            let start = spectral_frame(&counterdiabatic_hamiltonian(path, 0.0)?, 0.0, None)?;
            let end = spectral_frame(&counterdiabatic_hamiltonian(path, t)?, t, None)?;
            let propagator = if t == 0.0 {
                CMatrix::identity(d, d)
            } else {
                match route {
                    UcdRoute::Construction { steps } => {
                        let bare = spectral_frame(&path.hamiltonian(0.0), 0.0, None)?;
                        adiabatic_states(path, t, steps)? * bare.vectors().adjoint()
                    }
                    UcdRoute::Tdse { steps } => {
                        let traj = evolve_unitary(
                            |s| counterdiabatic_hamiltonian(path, s),
                            d,
                            t,
                            steps,
                            path.hbar(),
                        )?;
                        traj.final_unitary().clone()
                    }
                }
            };
            let amplitudes = end.vectors().adjoint() * propagator * start.vectors();
            for n in 0..d {
                for k in 0..d {
                    points.push(WorkPoint {
                        initial_level: n,
                        final_level: k,
                        work: end.energies()[k] - start.energies()[n],
                        probability: occupations[n] * amplitudes[(k, n)].norm_sqr(),
                    });
                }
            }
        }
    }
    Ok(WorkDistribution {
        time: t,
        initial_occupations: occupations.to_vec(),
        points,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostSample {
    pub time: f64,
    /// ‖H₁‖² = (ħ²/2) Σ_n tr Ṗ_n².
    pub hs_norm_sq: f64,
    /// ΔH²_CD = Σ_n p_n⁰ ⟨n(t)|H₁²(t)|n(t)⟩.
    pub variance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostMetrics {
    pub samples: Vec<CostSample>,
    /// Trapezoidal ∫ ‖H₁‖ dt over the sampled times.
    pub integrated_norm: f64,
}

pub fn cd_cost_metrics<P: HamiltonianPath + ?Sized>(
    path: &P,
    occupations: &[f64],
    times: &[f64],
) -> Result<CostMetrics, CdError> {
    let d = path.dimension();
    validate_occupations(occupations, d)?;
    let hbar = path.hbar();
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        let rates = projector_rates(path, t)?;
        let trace: f64 = rates.iter().map(|r| (r * r).trace().re).sum();
        let (energies, vectors) = eigensystem(&path.hamiltonian(t), Some(t))?;
        let h1 = cd_term_in_frame(&energies, &vectors, &path.hamiltonian_rate(t), hbar);
        let variance = (0..d)
            .map(|n| {
                let image = &h1 * vectors.column(n);
                occupations[n] * image.norm_squared()
            })
            .sum();
        samples.push(CostSample {
            time: t,
            hs_norm_sq: 0.5 * hbar * hbar * trace,
            variance,
        });
    }
    let integrated_norm = samples
        .windows(2)
        .map(|w| {
            0.5 * (w[1].time - w[0].time)
                * (w[0].hs_norm_sq.max(0.0).sqrt() + w[1].hs_norm_sq.max(0.0).sqrt())
        })
        .sum();
    Ok(CostMetrics {
        samples,
        integrated_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::super::geometry::predicted_variance_excess;
    use super::super::path::{AffinePath, Ramp, Schedule};
    use super::super::spectral::cd_term;
    use super::*;
    use alloc::vec;

    fn qubit(tau: f64) -> AffinePath {
        AffinePath::qubit_sweep(1.0, -3.0, 2.0, tau, Ramp::Smooth, 1.0).unwrap()
    }

    const ROUTE: UcdRoute = UcdRoute::Construction { steps: 400 };

    #[test]
    fn initial_distribution_is_a_delta_at_zero() {
        let path = qubit(1.0);
        for mode in [WorkMode::Adiabatic, WorkMode::Counterdiabatic] {
            let w = work_distribution(&path, &[0.7, 0.3], 0.0, mode, ROUTE).unwrap();
            for p in &w.points {
                if p.probability > 0.0 {
                    assert!(p.work.abs() < 1e-15);
                }
            }
            assert!((w.total_probability() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn endpoint_distributions_coincide() {
        let path = qubit(1.0);
        let occ = [0.8, 0.2];
        let ad = work_distribution(&path, &occ, 1.0, WorkMode::Adiabatic, ROUTE).unwrap();
        for route in [ROUTE, UcdRoute::Tdse { steps: 3000 }] {
            let cd = work_distribution(&path, &occ, 1.0, WorkMode::Counterdiabatic, route).unwrap();
            for (a, b) in ad.points.iter().zip(&cd.points) {
                assert!((a.probability - b.probability).abs() < 1e-8);
                assert!((a.work - b.work).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn interior_mean_matches_and_variance_exceeds() {
        let path = qubit(1.0);
        let occ = [0.9, 0.1];
        for t in [0.2, 0.5, 0.8] {
            let ad = work_distribution(&path, &occ, t, WorkMode::Adiabatic, ROUTE).unwrap();
            let cd = work_distribution(&path, &occ, t, WorkMode::Counterdiabatic, ROUTE).unwrap();
            assert!((ad.mean() - cd.mean()).abs() < 1e-10);
            let excess = cd.variance() - ad.variance();
            let predicted = predicted_variance_excess(&path, &occ, t).unwrap();
            assert!(excess > 0.0);
            assert!(
                (excess - predicted).abs() <= 1e-8 * predicted,
                "{excess} vs {predicted}"
            );
        }
    }

    #[test]
    fn tdse_route_agrees_with_construction() {
        let path = qubit(2.0);
        let occ = [0.6, 0.4];
        let a = work_distribution(&path, &occ, 0.7, WorkMode::Counterdiabatic, ROUTE).unwrap();
        let b = work_distribution(
            &path,
            &occ,
            0.7,
            WorkMode::Counterdiabatic,
            UcdRoute::Tdse { steps: 4000 },
        )
        .unwrap();
        for (x, y) in a.points.iter().zip(&b.points) {
            assert!((x.probability - y.probability).abs() < 1e-7);
        }
    }

    #[test]
    fn metrics_agree_and_scale() {
        let path = qubit(1.0);
        let slow = qubit(2.0);
        let occ = [1.0, 0.0];
        let s = [0.0, 0.25, 0.5, 0.9];
        let fast_times: Vec<f64> = s.to_vec();
        let slow_times: Vec<f64> = s.iter().map(|v| 2.0 * v).collect();
        let a = cd_cost_metrics(&path, &occ, &fast_times).unwrap();
        let b = cd_cost_metrics(&slow, &occ, &slow_times).unwrap();
        for (x, y) in a.samples.iter().zip(&b.samples).skip(1) {
            let h1 = cd_term(&path, x.time).unwrap();
            assert!((x.hs_norm_sq - (&h1 * &h1).trace().re).abs() < 1e-10 * x.hs_norm_sq);
            assert!((x.hs_norm_sq / y.hs_norm_sq - 4.0).abs() < 1e-6);
            assert!((x.variance / y.variance - 4.0).abs() < 1e-9);
        }
        assert!(a.samples[0].hs_norm_sq.abs() < 1e-12 && a.samples[0].variance == 0.0);
        assert!(a.integrated_norm > 0.0);
        // ground state of a qubit: ΔH² equals the full HS norm split evenly
        for x in &a.samples[1..] {
            assert!((x.variance - 0.5 * x.hs_norm_sq).abs() < 1e-9 * x.variance);
        }
    }

    #[test]
    fn static_path_costs_nothing() {
        let s = Schedule::new(vec![0.4], vec![0.4], 1.0, Ramp::Smooth).unwrap();
        let q = qubit(1.0);
        let path = AffinePath::new(q.offset().clone(), q.generators().to_vec(), s, 1.0).unwrap();
        let m = cd_cost_metrics(&path, &[0.5, 0.5], &[0.0, 0.5, 1.0]).unwrap();
        assert!(m
            .samples
            .iter()
            .all(|x| x.hs_norm_sq.abs() < 1e-20 && x.variance == 0.0));
    }

    #[test]
    fn rejects_bad_occupations() {
        let path = qubit(1.0);
        for occ in [vec![0.5, 0.6], vec![1.2, -0.2], vec![1.0]] {
            assert!(matches!(
                work_distribution(&path, &occ, 0.5, WorkMode::Adiabatic, ROUTE),
                Err(CdError::InvalidOccupations(_))
            ));
        }
        assert!(work_distribution(&path, &[1.0, 0.0], 1.5, WorkMode::Adiabatic, ROUTE).is_err());
    }
}
