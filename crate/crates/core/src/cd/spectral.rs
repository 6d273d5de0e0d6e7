use alloc::vec::Vec;

use num_complex::Complex64;

#[allow(unused_imports)]
use crate::prelude::*;

use super::linalg::{commutator, hermitian_eigen, hermiticity_defect};
use super::path::{HamiltonianPath, CENTERED_FIRST_DERIVATIVE};
use super::{CMatrix, CVector, CdError};

/// Adjacent eigenvalues closer than this fraction of max |ε| are treated as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

/// Step of the projector differences, as a fraction of the path duration.
const PROJECTOR_STEP: f64 = 1e-3;

/// Instantaneous eigensystem of `H(t)` with ascending energies.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFrame {
    time: f64,
    energies: Vec<f64>,
    vectors: CMatrix,
}

impl SpectralFrame {
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Eigenvectors as columns, in the order of [`Self::energies`].
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn dimension(&self) -> usize {
        self.energies.len()
    }

    pub fn state(&self, level: usize) -> CVector {
        self.vectors.column(level).into_owned()
    }

    pub fn projector(&self, level: usize) -> CMatrix {
        let v = self.vectors.column(level);
        v * v.adjoint()
    }

    /// max_n ‖H|n⟩ − ε_n|n⟩‖.
    pub fn residual(&self, h: &CMatrix) -> f64 {
        (0..self.dimension())
            .map(|n| {
                let v = self.vectors.column(n);
                (h * v - v * Complex64::from(self.energies[n])).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest entry of |V†V − 1|.
    pub fn orthonormality_defect(&self) -> f64 {
        let d = self.dimension();
        let gram = self.vectors.adjoint() * &self.vectors - CMatrix::identity(d, d);
        gram.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn check_gaps(energies: &[f64], time: Option<f64>) -> Result<(), CdError> {
    let scale = energies.iter().map(|e| e.abs()).fold(0.0, f64::max);
    for (lower, pair) in energies.windows(2).enumerate() {
        let gap = pair[1] - pair[0];
        if !(gap > DEGENERACY_THRESHOLD * scale) || scale == 0.0 {
            return Err(CdError::Degenerate {
                time,
                lower,
                upper: lower + 1,
                gap,
            });
        }
    }
    Ok(())
}

pub(crate) fn eigensystem(h: &CMatrix, time: Option<f64>) -> Result<(Vec<f64>, CMatrix), CdError> {
    let defect = hermiticity_defect(h);
    if !(defect <= 1e-12) {
        return Err(CdError::NotHermitian {
            time: time.unwrap_or(f64::NAN),
            defect,
        });
    }
    let (energies, vectors) = hermitian_eigen(h);
    check_gaps(&energies, time)?;
    Ok((energies, vectors))
}

/// Diagonalizes `h` and fixes the phase of every eigenvector: relative to
/// `previous` by making ⟨n(t_prev)|n(t)⟩ real and positive, otherwise by making the
/// largest-magnitude component real and positive.
pub fn spectral_frame(
    h: &CMatrix,
    time: f64,
    previous: Option<&SpectralFrame>,
) -> Result<SpectralFrame, CdError> {
    let (energies, mut vectors) = eigensystem(h, Some(time))?;
    for n in 0..energies.len() {
        let reference = match previous {
            Some(prev) => prev.vectors.column(n).dotc(&vectors.column(n)),
            None => Complex64::new(0.0, 0.0),
        };
        let phase = if reference.norm() > 1e-12 {
            reference / reference.norm()
        } else {
            let col = vectors.column(n);
            let mut best = col[0];
            for z in col.iter() {
                if z.norm() > best.norm() {
                    best = *z;
                }
            }
            best / best.norm()
        };
        let fix = phase.conj();
        for z in vectors.column_mut(n).iter_mut() {
            *z *= fix;
        }
    }
    Ok(SpectralFrame {
        time,
        energies,
        vectors,
    })
}

/// Gauge-chained frames on the given time grid.
pub fn spectral_path<P: HamiltonianPath + ?Sized>(
    path: &P,
    times: &[f64],
) -> Result<Vec<SpectralFrame>, CdError> {
    let mut frames: Vec<SpectralFrame> = Vec::with_capacity(times.len());
    for &t in times {
        let frame = spectral_frame(&path.hamiltonian(t), t, frames.last())?;
        frames.push(frame);
    }
    Ok(frames)
}

/// `steps + 1` equally spaced times on `[0, end]`, with the last one exactly `end`.
pub fn uniform_grid(end: f64, steps: usize) -> Vec<f64> {
    let steps = steps.max(1);
    (0..=steps)
        .map(|k| {
            if k == steps {
                end
            } else {
                end * k as f64 / steps as f64
            }
        })
        .collect()
}

pub(crate) fn cd_term_in_frame(
    energies: &[f64],
    vectors: &CMatrix,
    hdot: &CMatrix,
    hbar: f64,
) -> CMatrix {
    let d = energies.len();
    let rate = vectors.adjoint() * hdot * vectors;
    let coupling = CMatrix::from_fn(d, d, |m, n| {
        if m == n {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, hbar) * rate[(m, n)] / (energies[n] - energies[m])
        }
    });
    vectors * coupling * vectors.adjoint()
}

/// H₁(t) from the off-diagonal sum over eigenstates.
pub fn cd_term<P: HamiltonianPath + ?Sized>(path: &P, t: f64) -> Result<CMatrix, CdError> {
    let (energies, vectors) = eigensystem(&path.hamiltonian(t), Some(t))?;
    Ok(cd_term_in_frame(
        &energies,
        &vectors,
        &path.hamiltonian_rate(t),
        path.hbar(),
    ))
}

/// Ṗ_n(t) for every level, by eighth-order centered differences of the
/// gauge-invariant projectors.
pub fn projector_rates<P: HamiltonianPath + ?Sized>(
    path: &P,
    t: f64,
) -> Result<Vec<CMatrix>, CdError> {
    let d = path.dimension();
    let h = PROJECTOR_STEP * path.duration();
    let mut rates = alloc::vec![CMatrix::zeros(d, d); d];
    for (offset, weight) in CENTERED_FIRST_DERIVATIVE {
        let (_, vectors) = eigensystem(&path.hamiltonian(t + offset * h), Some(t + offset * h))?;
        let w = Complex64::from(weight / h);
        for (n, rate) in rates.iter_mut().enumerate() {
            let v = vectors.column(n);
            *rate += v * v.adjoint() * w;
        }
    }
    Ok(rates)
}

/// H₁(t) = iħ Σ_n Ṗ_n P_n.
pub fn cd_term_projector<P: HamiltonianPath + ?Sized>(
    path: &P,
    t: f64,
) -> Result<CMatrix, CdError> {
    let d = path.dimension();
    let frame = spectral_frame(&path.hamiltonian(t), t, None)?;
    let rates = projector_rates(path, t)?;
    let mut out = CMatrix::zeros(d, d);
    for (n, rate) in rates.iter().enumerate() {
        out += rate * frame.projector(n);
    }
    Ok(out * Complex64::new(0.0, path.hbar()))
}

/// H(t) + H₁(t).
pub fn counterdiabatic_hamiltonian<P: HamiltonianPath + ?Sized>(
    path: &P,
    t: f64,
) -> Result<CMatrix, CdError> {
    let h = path.hamiltonian(t);
    let (energies, vectors) = eigensystem(&h, Some(t))?;
    Ok(h + cd_term_in_frame(&energies, &vectors, &path.hamiltonian_rate(t), path.hbar()))
}

/// Norms of H₁ and of [H, H + H₁] at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutatorCheck {
    pub cd_norm: f64,
    pub commutator_norm: f64,
}

pub fn commutator_check<P: HamiltonianPath + ?Sized>(
    path: &P,
    t: f64,
) -> Result<CommutatorCheck, CdError> {
    let h = path.hamiltonian(t);
    let h1 = cd_term(path, t)?;
    let total = &h + &h1;
    Ok(CommutatorCheck {
        cd_norm: h1.norm(),
        commutator_norm: commutator(&h, &total).norm(),
    })
}

// Composite Simpson on an even number of uniform intervals, trapezoid otherwise.
fn integrate_uniform(values: &[f64], step: f64) -> f64 {
    let intervals = values.len() - 1;
    if intervals == 0 {
        return 0.0;
    }
    if intervals.is_multiple_of(2) {
        let mut acc = values[0] + values[intervals];
        for (k, v) in values.iter().enumerate().take(intervals).skip(1) {
            acc += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        acc * step / 3.0
    } else {
        let inner: f64 = values[1..intervals].iter().sum();
        (0.5 * (values[0] + values[intervals]) + inner) * step
    }
}

/// Adiabatic states |ψ_n^ad(t)⟩ = exp(−(i/ħ)∫ε_n − ∫⟨n|∂n⟩)|n(t)⟩ for all levels,
/// as columns. The integrals use `steps` uniform intervals on `[0, t]`; the
/// geometric term is accumulated from the phases of successive frame overlaps.
pub fn adiabatic_states<P: HamiltonianPath + ?Sized>(
    path: &P,
    t: f64,
    steps: usize,
) -> Result<CMatrix, CdError> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(CdError::InvalidInput("time must be >= 0"));
    }
    let steps = if t == 0.0 { 1 } else { steps.max(1) };
    let grid = uniform_grid(t, steps);
    let frames = spectral_path(path, &grid)?;
    let d = path.dimension();
    let last = frames.last().expect("grid is nonempty");
    let mut out = last.vectors.clone();
    let dt = t / steps as f64;
    for n in 0..d {
        let energies: Vec<f64> = frames.iter().map(|f| f.energies[n]).collect();
        let dynamical = integrate_uniform(&energies, dt) / path.hbar();
        let geometric: f64 = frames
            .windows(2)
            .map(|w| w[0].vectors.column(n).dotc(&w[1].vectors.column(n)).arg())
            .sum();
        let phase = Complex64::from_polar(1.0, -dynamical - geometric);
        for z in out.column_mut(n).iter_mut() {
            *z *= phase;
        }
    }
    Ok(out)
}

pub fn adiabatic_state<P: HamiltonianPath + ?Sized>(
    path: &P,
    level: usize,
    t: f64,
    steps: usize,
) -> Result<CVector, CdError> {
    if level >= path.dimension() {
        return Err(CdError::InvalidInput("level exceeds the dimension"));
    }
    Ok(adiabatic_states(path, t, steps)?.column(level).into_owned())
}
