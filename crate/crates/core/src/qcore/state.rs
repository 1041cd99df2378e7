use ndarray::{Array1, Array2};

use super::fock::{check_truncation, FockSpace};
use super::linalg::{eigh, hermiticity_defect};
use super::tolerance;
use crate::{Error, Result, C64};

/// Normalised pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Array1<C64>,
}

impl StateVector {
    /// Normalises `amplitudes`; fails on a zero or non-finite vector.
    pub fn new(amplitudes: Array1<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::invalid("state", format!("norm {norm} cannot be normalised")));
        }
        Ok(Self { amplitudes: amplitudes.mapv(|z| z / norm) })
    }

    /// Fock state `|n⟩`.
    pub fn basis(dim: usize, n: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::DimensionMismatch(format!("level {n} outside dimension {dim}")));
        }
        let mut v = Array1::zeros(dim);
        v[n] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Array1<C64> {
        self.amplitudes
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.iter().zip(other.amplitudes.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// `⟨ψ|op|ψ⟩`
    pub fn expectation(&self, op: &Array2<C64>) -> C64 {
        let v = op.dot(&self.amplitudes);
        self.amplitudes.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|ψ⟩⟨ψ|`
    pub fn to_density(&self) -> DensityMatrix {
        let n = self.dim();
        let el = Array2::from_shape_fn((n, n), |(i, j)| self.amplitudes[i] * self.amplitudes[j].conj());
        DensityMatrix { elements: el }
    }
}

/// Coherent state `|α⟩` in `space`. The space must satisfy the truncation
/// rule for `|α|`; the truncated vector is renormalised.
pub fn coherent_state(alpha: C64, space: &FockSpace) -> Result<StateVector> {
    check_truncation(alpha.norm(), space.dim())?;
    let mut amps = Array1::<C64>::zeros(space.dim());
    amps[0] = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 1..space.dim() {
        amps[n] = amps[n - 1] * alpha / (n as f64).sqrt();
    }
    StateVector::new(amps)
}

/// Measured deviations from a physical density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

impl InvariantReport {
    pub fn satisfied(&self) -> bool {
        self.hermiticity_defect <= tolerance::HERMITICITY
            && self.trace_defect <= tolerance::TRACE
            && self.min_eigenvalue >= tolerance::POSITIVITY
    }
}

/// Density matrix that is Hermitian, unit-trace and positive semidefinite
/// within the crate tolerances.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    elements: Array2<C64>,
}

impl DensityMatrix {
    /// Validates the invariants; use [`DensityMatrix::from_pure`] for
    /// projectors.
    pub fn new(elements: Array2<C64>) -> Result<Self> {
        let rho = Self::from_elements_unchecked(elements)?;
        let report = rho.invariants()?;
        if !report.satisfied() {
            return Err(Error::invalid(
                "density matrix",
                format!(
                    "hermiticity {:.3e}, trace defect {:.3e}, min eigenvalue {:.3e}",
                    report.hermiticity_defect, report.trace_defect, report.min_eigenvalue
                ),
            ));
        }
        Ok(rho)
    }

    /// Shape check only. Intended for intermediate integrator states.
    pub fn from_elements_unchecked(elements: Array2<C64>) -> Result<Self> {
        if elements.nrows() != elements.ncols() || elements.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!("density matrix of shape {:?}", elements.shape())));
        }
        Ok(Self { elements })
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        psi.to_density()
    }

    /// `|ψ⟩⟨ψ|` for the Fock state `|n⟩`.
    pub fn basis(dim: usize, n: usize) -> Result<Self> {
        Ok(StateVector::basis(dim, n)?.to_density())
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn elements(&self) -> &Array2<C64> {
        &self.elements
    }

    pub fn into_elements(self) -> Array2<C64> {
        self.elements
    }

    pub fn trace(&self) -> C64 {
        self.elements.diag().sum()
    }

    /// `Tr(ρ·op)`
    pub fn expectation(&self, op: &Array2<C64>) -> C64 {
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.elements[[i, j]] * op[[j, i]];
            }
        }
        acc
    }

    /// `⟨ψ|ρ|ψ⟩`, real by construction.
    pub fn population(&self, psi: &StateVector) -> f64 {
        let v = self.elements.dot(psi.amplitudes());
        psi.amplitudes().iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum::<C64>().re
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        self.elements.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn invariants(&self) -> Result<InvariantReport> {
        let min_eigenvalue = eigh(&self.hermitized().elements)?.values[0];
        Ok(InvariantReport {
            hermiticity_defect: hermiticity_defect(&self.elements),
            trace_defect: (self.trace() - C64::new(1.0, 0.0)).norm(),
            min_eigenvalue,
        })
    }

    /// `(ρ + ρ†)/2`
    pub fn hermitized(&self) -> Self {
        let n = self.dim();
        let el = Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (self.elements[[i, j]] + self.elements[[j, i]].conj()));
        Self { elements: el }
    }
}
