use ndarray::{Array1, Array2};

use super::hamiltonian::h2;
use super::MechanicalParams;
use crate::qcore::{check_truncation, eigh, FockSpace, StateVector};
use crate::{Error, Result, C64};

/// Even and odd cat states `𝒩±(|α⟩ ± |−α⟩)`.
#[derive(Clone, Debug)]
pub struct CatBasis {
    pub alpha: f64,
    pub even: StateVector,
    pub odd: StateVector,
    /// `𝒩₊ = (2 + 2e^{−2α²})^{−1/2}`
    pub norm_even: f64,
    /// `𝒩₋ = (2 − 2e^{−2α²})^{−1/2}`
    pub norm_odd: f64,
}

pub fn cat_basis(params: &MechanicalParams, space: &FockSpace) -> Result<CatBasis> {
    params.validate()?;
    cat_basis_for_alpha(params.alpha(), space)
}

/// Cat pair for a real amplitude `alpha > 0`.
pub fn cat_basis_for_alpha(alpha: f64, space: &FockSpace) -> Result<CatBasis> {
    if !(alpha > 0.0) {
        return Err(Error::DegenerateBasis);
    }
    check_truncation(alpha, space.dim())?;
    let dim = space.dim();
    // Amplitudes of |α⟩ without its e^{−α²/2} prefactor, which normalisation
    // removes anyway.
    let mut coh = Array1::<f64>::zeros(dim);
    coh[0] = 1.0;
    for n in 1..dim {
        coh[n] = coh[n - 1] * alpha / (n as f64).sqrt();
    }
    let even = Array1::from_iter(coh.iter().enumerate().map(|(n, &c)| C64::new(if n % 2 == 0 { c } else { 0.0 }, 0.0)));
    let odd = Array1::from_iter(coh.iter().enumerate().map(|(n, &c)| C64::new(if n % 2 == 1 { c } else { 0.0 }, 0.0)));
    let overlap = (-2.0 * alpha * alpha).exp();
    Ok(CatBasis {
        alpha,
        even: StateVector::new(even)?,
        odd: StateVector::new(odd)?,
        norm_even: (2.0 + 2.0 * overlap).powf(-0.5),
        norm_odd: (2.0 - 2.0 * overlap).powf(-0.5),
    })
}

/// Eigenstructure of the undriven cat Hamiltonian.
///
/// `h2 = −D(â†² − α²)(â² − α²) + Dα⁴`, so the cat pair is the top of the
/// spectrum at `Dα⁴` and the first excited manifold sits about `4Dα²`
/// below it. The report therefore describes the two highest eigenvalues of
/// `h2`, i.e. the two lowest of `−h2`.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    /// Eigenvalues of `h2`, ascending, rad/s.
    pub eigenvalues: Array1<f64>,
    /// Energies of the cat pair (highest, second highest).
    pub pair_energies: [f64; 2],
    /// Weight of each pair eigenvector inside `span{|C₊⟩, |C₋⟩}`.
    pub overlaps: [f64; 2],
    /// `|E_pair,0 − E_pair,1|`
    pub splitting: f64,
    /// Distance from the pair to the next eigenvalue.
    pub gap: f64,
    /// `4Dα²`
    pub predicted_gap: f64,
}

pub fn spectrum_check(params: &MechanicalParams, space: &FockSpace) -> Result<SpectrumReport> {
    let cats = cat_basis(params, space)?;
    let h = h2(params, space, false, 0.0);
    let e = eigh(&h)?;
    let n = e.values.len();
    if n < 3 {
        return Err(Error::InvalidDimension(n));
    }
    let overlap = |col: usize| -> f64 {
        let v = StateVector::new(e.vectors.column(col).to_owned()).expect("eigenvectors are normalised");
        cats.even.inner(&v).norm_sqr() + cats.odd.inner(&v).norm_sqr()
    };
    let (top, second, third) = (n - 1, n - 2, n - 3);
    Ok(SpectrumReport {
        pair_energies: [e.values[top], e.values[second]],
        overlaps: [overlap(top), overlap(second)],
        splitting: (e.values[top] - e.values[second]).abs(),
        gap: e.values[second] - e.values[third],
        predicted_gap: 4.0 * params.duffing * cats.alpha * cats.alpha,
        eigenvalues: e.values,
    })
}

/// `dim×2` isometry whose columns are the given states.
pub(crate) fn isometry(states: [&StateVector; 2]) -> Array2<C64> {
    let dim = states[0].dim();
    let mut p = Array2::<C64>::zeros((dim, 2));
    for (c, s) in states.iter().enumerate() {
        p.column_mut(c).assign(s.amplitudes());
    }
    p
}
