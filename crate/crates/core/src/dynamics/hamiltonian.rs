use std::fmt;
use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView1};

use crate::qcore::hermiticity_defect;
use crate::{Error, Result, C64};

/// Scalar time dependence of one Hamiltonian term.
#[derive(Clone)]
pub enum Modulation {
    Constant,
    /// `e^{i·f·t}`
    Phase(f64),
    /// `cos(f·t)`
    Cos(f64),
    /// Arbitrary coefficient with a declared fastest angular frequency,
    /// used only for step-size limits.
    Custom {
        coefficient: Arc<dyn Fn(f64) -> C64 + Send + Sync>,
        frequency: f64,
    },
}

impl Modulation {
    pub fn at(&self, t: f64) -> C64 {
        match self {
            Modulation::Constant => C64::new(1.0, 0.0),
            Modulation::Phase(f) => C64::from_polar(1.0, f * t),
            Modulation::Cos(f) => C64::new((f * t).cos(), 0.0),
            Modulation::Custom { coefficient, .. } => coefficient(t),
        }
    }

    pub fn frequency(&self) -> f64 {
        match self {
            Modulation::Constant => 0.0,
            Modulation::Phase(f) | Modulation::Cos(f) => f.abs(),
            Modulation::Custom { frequency, .. } => frequency.abs(),
        }
    }
}

impl fmt::Debug for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulation::Constant => write!(f, "Constant"),
            Modulation::Phase(w) => write!(f, "Phase({w})"),
            Modulation::Cos(w) => write!(f, "Cos({w})"),
            Modulation::Custom { frequency, .. } => write!(f, "Custom {{ frequency: {frequency} }}"),
        }
    }
}

/// `H(t) = H₀ + Σ_k c_k(t) A_k` in rad/s. Individual terms need not be
/// Hermitian; their sum must be.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    dim: usize,
    constant: Array2<C64>,
    terms: Vec<(Array2<C64>, Modulation)>,
}

impl Hamiltonian {
    pub fn zero(dim: usize) -> Self {
        Self { dim, constant: Array2::zeros((dim, dim)), terms: Vec::new() }
    }

    pub fn constant(h: Array2<C64>) -> Self {
        Self { dim: h.nrows(), constant: h, terms: Vec::new() }
    }

    pub fn with_term(mut self, op: Array2<C64>, modulation: Modulation) -> Result<Self> {
        if op.dim() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch(format!(
                "term of shape {:?} added to a {}-level Hamiltonian",
                op.shape(),
                self.dim
            )));
        }
        match modulation {
            Modulation::Constant => self.constant = self.constant + op,
            m => self.terms.push((op, m)),
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    /// Dense `H(t)`.
    pub fn at(&self, t: f64) -> Array2<C64> {
        let mut h = self.constant.clone();
        self.add_terms_into(t, &mut h);
        h
    }

    pub(crate) fn add_terms_into(&self, t: f64, h: &mut Array2<C64>) {
        for (op, m) in &self.terms {
            let c = m.at(t);
            h.zip_mut_with(op, |a, &b| *a += c * b);
        }
    }

    pub(crate) fn constant_part(&self) -> &Array2<C64> {
        &self.constant
    }

    /// `H(t)ψ` without forming `H(t)`.
    pub fn apply(&self, t: f64, psi: ArrayView1<C64>) -> Array1<C64> {
        let mut out = self.constant.dot(&psi);
        for (op, m) in &self.terms {
            let c = m.at(t);
            out.scaled_add(c, &op.dot(&psi));
        }
        out
    }

    /// Largest modulation frequency.
    pub fn max_frequency(&self) -> f64 {
        self.terms.iter().map(|(_, m)| m.frequency()).fold(0.0, f64::max)
    }

    /// Hermiticity defect of `H(t)` relative to its largest entry.
    pub(crate) fn check_hermitian(&self, t: f64) -> Result<()> {
        let h = self.at(t);
        let scale = h.iter().fold(1.0f64, |m, z| m.max(z.norm()));
        let defect = hermiticity_defect(&h);
        if defect > 1e-8 * scale {
            return Err(Error::NotHermitian { defect });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{max_abs, pauli_x, pauli_z};

    #[test]
    fn terms_sum_to_snapshot() {
        let h = Hamiltonian::constant(pauli_z()).with_term(pauli_x(), Modulation::Cos(2.0)).unwrap();
        let t = 0.4;
        let expect = pauli_z() + pauli_x().mapv(|z| z * (0.8f64).cos());
        assert!(max_abs(&(&h.at(t) - &expect)) < 1e-15);
        let psi = Array1::from(vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.9)]);
        let applied = h.apply(t, psi.view());
        let dense = expect.dot(&psi);
        assert!((&applied - &dense).iter().all(|z| z.norm() < 1e-15));
        assert_eq!(h.max_frequency(), 2.0);
    }

    #[test]
    fn rejects_mismatched_term() {
        let h = Hamiltonian::zero(3);
        assert!(h.with_term(pauli_x(), Modulation::Constant).is_err());
    }
}
