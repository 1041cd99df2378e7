use ndarray::Array2;

use crate::{Error, Result, C64};

/// Minimum Fock dimension for a computation involving amplitude `alpha`:
/// `ceil(|α|² + 10|α| + 10)`.
///
/// The Poisson tail beyond this cutoff carries less than 1e-10 probability
/// for |α| ≤ 6.
pub fn required_dim(alpha_abs: f64) -> usize {
    let a = alpha_abs.abs();
    (a * a + 10.0 * a + 10.0).ceil() as usize
}

/// Error unless `dim` satisfies [`required_dim`] for `alpha_abs`.
pub fn check_truncation(alpha_abs: f64, dim: usize) -> Result<()> {
    let required = required_dim(alpha_abs);
    if dim < required {
        return Err(Error::TruncationTooSmall { alpha: alpha_abs.abs(), dim, required });
    }
    Ok(())
}

/// Ladder operators of a single bosonic mode truncated to `dim` levels.
#[derive(Clone, Debug)]
pub struct FockSpace {
    dim: usize,
    lowering: Array2<C64>,
    raising: Array2<C64>,
    number: Array2<C64>,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let mut lowering = Array2::<C64>::zeros((dim, dim));
        for n in 1..dim {
            lowering[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
        }
        let raising = lowering.t().mapv(|z| z.conj());
        let number = Array2::from_diag(&ndarray::Array1::from_iter((0..dim).map(|n| C64::new(n as f64, 0.0))));
        Ok(Self { dim, lowering, raising, number })
    }

    /// Smallest space satisfying the truncation rule for `alpha_abs`, but
    /// never smaller than `min_dim`.
    pub fn for_amplitude(alpha_abs: f64, min_dim: usize) -> Result<Self> {
        Self::new(required_dim(alpha_abs).max(min_dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `â`
    pub fn lowering(&self) -> &Array2<C64> {
        &self.lowering
    }

    /// `â†`
    pub fn raising(&self) -> &Array2<C64> {
        &self.raising
    }

    /// `n̂ = â†â`
    pub fn number(&self) -> &Array2<C64> {
        &self.number
    }

    pub fn identity(&self) -> Array2<C64> {
        Array2::eye(self.dim)
    }

    /// Phonon parity `exp(iπn̂)`.
    pub fn parity(&self) -> Array2<C64> {
        Array2::from_diag(&ndarray::Array1::from_iter(
            (0..self.dim).map(|n| C64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)),
        ))
    }

    /// `â†â†ââ = n̂(n̂−1)`, exact in the truncated space.
    pub fn kerr(&self) -> Array2<C64> {
        Array2::from_diag(&ndarray::Array1::from_iter(
            (0..self.dim).map(|n| C64::new((n * n.saturating_sub(1)) as f64, 0.0)),
        ))
    }

    /// `â†² + â²`
    pub fn two_phonon(&self) -> Array2<C64> {
        let a2 = self.lowering.dot(&self.lowering);
        let ad2 = self.raising.dot(&self.raising);
        a2 + ad2
    }

    /// `â† + â`
    pub fn position(&self) -> Array2<C64> {
        &self.lowering + &self.raising
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_tiny_dimension() {
        assert!(matches!(FockSpace::new(1), Err(Error::InvalidDimension(1))));
        assert!(FockSpace::new(2).is_ok());
    }

    #[test]
    fn dim3_entries() {
        let s = FockSpace::new(3).unwrap();
        let a = s.lowering();
        let nonzero: Vec<_> =
            a.indexed_iter().filter(|(_, z)| z.norm() > 0.0).map(|((i, j), z)| (i, j, z.re)).collect();
        assert_eq!(nonzero.len(), 2);
        assert_eq!((nonzero[0].0, nonzero[0].1), (0, 1));
        assert!((nonzero[0].2 - 1.0).abs() < 1e-15);
        assert_eq!((nonzero[1].0, nonzero[1].1), (1, 2));
        assert!((nonzero[1].2 - 2f64.sqrt()).abs() < 1e-15);
        let diag: Vec<f64> = s.number().diag().iter().map(|z| z.re).collect();
        assert_eq!(diag, vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn number_is_raising_times_lowering() {
        let s = FockSpace::new(17).unwrap();
        let n = s.raising().dot(s.lowering());
        // √n·√n rounds to within one ulp of n.
        let diff = (&n - s.number()).mapv(|z| z.norm()).fold(0.0f64, |m, &v| m.max(v));
        assert!(diff < 1e-14);
        let kerr = s.raising().dot(s.raising()).dot(s.lowering()).dot(s.lowering());
        let diff = (&kerr - &s.kerr()).mapv(|z| z.norm()).fold(0.0f64, |m, &v| m.max(v));
        assert!(diff < 1e-12);
    }

    #[test]
    fn commutator_is_identity_below_cutoff() {
        let s = FockSpace::new(50).unwrap();
        let comm = s.lowering().dot(s.raising()) - s.raising().dot(s.lowering());
        let mut worst = 0.0f64;
        for i in 0..49 {
            for j in 0..50 {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((comm[[i, j]] - C64::new(expect, 0.0)).norm());
            }
        }
        assert!(worst < 1e-12, "worst = {worst}");
    }

    #[test]
    fn truncation_rule() {
        assert_eq!(required_dim(0.0), 10);
        assert_eq!(required_dim(2.0), 34);
        assert_eq!(required_dim(6.0), 106);
        assert!(check_truncation(2.0, 33).is_err());
        assert!(check_truncation(2.0, 34).is_ok());
    }
}
