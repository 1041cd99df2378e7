use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2};

use crate::{Error, Result, C64};

/// Conjugate transpose.
pub fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

/// `[a, b] = ab − ba`
pub fn commutator(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    a.dot(b) - b.dot(a)
}

/// Largest entry modulus.
pub fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// `max |m − m†|`
pub fn hermiticity_defect(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    worst
}

pub fn identity(dim: usize) -> Array2<C64> {
    Array2::eye(dim)
}

/// Pauli matrices in the qubit basis `(|0⟩, |1⟩)`.
pub fn pauli_x() -> Array2<C64> {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    ndarray::array![[o, l], [l, o]]
}

pub fn pauli_y() -> Array2<C64> {
    let o = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    ndarray::array![[o, -i], [i, o]]
}

/// `diag(−1, 1)`: the excited state `|1⟩` sits at `+1`.
pub fn pauli_z() -> Array2<C64> {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    ndarray::array![[-l, o], [o, l]]
}

/// Eigen-decomposition of a Hermitian matrix, ascending eigenvalues.
/// Column `k` of `vectors` belongs to `values[k]`.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Array1<f64>,
    pub vectors: Array2<C64>,
}

/// Hermitian eigensolver. Fails with [`Error::NotHermitian`] when
/// `‖m − m†‖_max` exceeds `1e-8·max(1, ‖m‖_max)`.
pub fn eigh(m: &Array2<C64>) -> Result<Eigh> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch(format!("eigh on {}x{}", n, m.ncols())));
    }
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let defect = hermiticity_defect(m);
    if defect > 1e-8 * max_abs(m).max(1.0) || !defect.is_finite() {
        return Err(Error::NotHermitian { defect });
    }
    let dm = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[[i, j]] + m[[j, i]].conj()));
    let se = SymmetricEigen::new(dm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = Array1::from_iter(order.iter().map(|&k| se.eigenvalues[k]));
    let vectors = Array2::from_shape_fn((n, n), |(i, c)| se.eigenvectors[(i, order[c])]);
    Ok(Eigh { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hermitian(n: usize, seed: u64) -> Array2<C64> {
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let raw = Array2::from_shape_fn((n, n), |_| C64::new(next(), next()));
        (&raw + &dagger(&raw)) * C64::new(0.5, 0.0)
    }

    #[test]
    fn paulis_anticommute() {
        let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
        let i2 = C64::new(0.0, 2.0);
        // σz = diag(−1, 1) flips the usual sign: [σx, σy] = −2iσz.
        let c = commutator(&x, &y);
        assert!(max_abs(&(&c + &(z.mapv(|v| v * i2)))) < 1e-15);
        assert!(max_abs(&(x.dot(&z) + z.dot(&x))) < 1e-15);
    }

    #[test]
    fn eigh_reconstructs() {
        for seed in 1..5 {
            let h = random_hermitian(12, seed);
            let e = eigh(&h).unwrap();
            let d = Array2::from_diag(&e.values.mapv(|v| C64::new(v, 0.0)));
            let back = e.vectors.dot(&d).dot(&dagger(&e.vectors));
            assert!(max_abs(&(&back - &h)) < 1e-12);
            let unit = dagger(&e.vectors).dot(&e.vectors);
            assert!(max_abs(&(&unit - &identity(12))) < 1e-12);
            assert!(e.values.windows(2).into_iter().all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let mut h = random_hermitian(4, 9);
        h[[0, 1]] += C64::new(1e-3, 0.0);
        assert!(matches!(eigh(&h), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eigh_of_sigma_x() {
        let e = eigh(&pauli_x()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }
}
