use alloc::vec::Vec;

use num_complex::Complex64;

use super::path::HamiltonianPath;
use super::spectral::eigensystem;
use super::work::validate_occupations;
use super::{CMatrix, CVector, CdError};

/// Quantum geometric tensor of one eigenstate at a parameter point.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricTensor {
    pub level: usize,
    /// Q_μν = ⟨∂_μ n|(1 − |n⟩⟨n|)|∂_ν n⟩, Hermitian in (μ, ν).
    pub tensor: CMatrix,
}

impl GeometricTensor {
    pub fn component(&self, mu: usize, nu: usize) -> Complex64 {
        self.tensor[(mu, nu)]
    }

    /// g_μν = Re Q_μν.
    pub fn metric(&self, mu: usize, nu: usize) -> f64 {
        self.tensor[(mu, nu)].re
    }

    /// Fidelity susceptibility along parameter `mu`.
    pub fn fidelity_susceptibility(&self, mu: usize) -> f64 {
        self.metric(mu, mu)
    }

    /// g_μν v^μ v^ν.
    pub fn metric_along(&self, direction: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (mu, a) in direction.iter().enumerate() {
            for (nu, b) in direction.iter().enumerate() {
                acc += self.metric(mu, nu) * a * b;
            }
        }
        acc
    }
}

fn tensors_at<P: HamiltonianPath + ?Sized>(
    path: &P,
    parameters: &[f64],
    time: Option<f64>,
) -> Result<Vec<GeometricTensor>, CdError> {
    let d = path.dimension();
    let count = path.parameter_count();
    let (energies, vectors) = eigensystem(&path.hamiltonian_at(parameters), time)?;
    let couplings: Vec<CMatrix> = (0..count)
        .map(|mu| vectors.adjoint() * path.gradient_at(parameters, mu) * &vectors)
        .collect();
    let mut out = Vec::with_capacity(d);
    for n in 0..d {
        // components of |∂_μ n⟩ in the eigenbasis; the n-th entry is zero
        let derivs: Vec<CVector> = couplings
            .iter()
            .map(|c| {
                CVector::from_fn(d, |m, _| {
                    if m == n {
                        Complex64::new(0.0, 0.0)
                    } else {
                        c[(m, n)] / (energies[n] - energies[m])
                    }
                })
            })
            .collect();
        let tensor = CMatrix::from_fn(count, count, |mu, nu| derivs[mu].dotc(&derivs[nu]));
        out.push(GeometricTensor { level: n, tensor });
    }
    Ok(out)
}

/// Q_μν for `level` from the perturbative sum
/// |∂_μ n⟩ = Σ_{m≠n} |m⟩⟨m|∂_μH|n⟩ / (ε_n − ε_m).
pub fn geometric_tensor<P: HamiltonianPath + ?Sized>(
    path: &P,
    level: usize,
    parameters: &[f64],
) -> Result<GeometricTensor, CdError> {
    if level >= path.dimension() {
        return Err(CdError::InvalidInput("level exceeds the dimension"));
    }
    if parameters.len() != path.parameter_count() {
        return Err(CdError::InvalidInput("wrong number of parameters"));
    }
    Ok(tensors_at(path, parameters, None)?.swap_remove(level))
}

/// ħ² Σ_n p_n⁰ g^(n)_μν λ̇^μ λ̇^ν at time `t`: the excess of the counterdiabatic
/// work variance over the adiabatic one.
pub fn predicted_variance_excess<P: HamiltonianPath + ?Sized>(
    path: &P,
    occupations: &[f64],
    t: f64,
) -> Result<f64, CdError> {
    validate_occupations(occupations, path.dimension())?;
    let rates = path.parameter_rates(t);
    let tensors = tensors_at(path, &path.parameters(t), Some(t))?;
    let hbar = path.hbar();
    Ok(hbar
        * hbar
        * tensors
            .iter()
            .zip(occupations)
            .map(|(g, p)| p * g.metric_along(&rates))
            .sum::<f64>())
}
