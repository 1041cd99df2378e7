use ndarray::{Array1, Array2};

use super::state::DensityMatrix;
use crate::{Error, Result, C64};

/// Rectangular grid over `β = x + ip`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
}

impl PhaseGrid {
    /// `[-extent, extent]²` with `n` points per axis.
    pub fn square(extent: f64, n: usize) -> Self {
        Self { x_min: -extent, x_max: extent, nx: n, p_min: -extent, p_max: extent, np: n }
    }

    fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.np < 2 {
            return Err(Error::invalid("grid", "at least two points per axis"));
        }
        if !(self.x_max > self.x_min && self.p_max > self.p_min) {
            return Err(Error::invalid("grid", "empty range"));
        }
        Ok(())
    }

    pub fn xs(&self) -> Array1<f64> {
        Array1::linspace(self.x_min, self.x_max, self.nx)
    }

    pub fn ps(&self) -> Array1<f64> {
        Array1::linspace(self.p_min, self.p_max, self.np)
    }

    /// Smallest distance from the origin to the grid boundary.
    fn half_extent(&self) -> f64 {
        (-self.x_min).min(self.x_max).min(-self.p_min).min(self.p_max)
    }
}

/// Wigner function sampled on a [`PhaseGrid`]; `values[[i, j]]` is at
/// `(xs[i], ps[j])`.
#[derive(Clone, Debug)]
pub struct WignerMap {
    pub xs: Array1<f64>,
    pub ps: Array1<f64>,
    pub values: Array2<f64>,
    /// Set when the grid does not reach `√⟨n⟩ + 3` in every direction.
    pub grid_too_small: bool,
}

impl WignerMap {
    /// Trapezoidal `∫W dx dp`.
    pub fn integral(&self) -> f64 {
        let wx = trapezoid_weights(&self.xs);
        let wp = trapezoid_weights(&self.ps);
        let mut acc = 0.0;
        for (i, a) in wx.iter().enumerate() {
            for (j, b) in wp.iter().enumerate() {
                acc += a * b * self.values[[i, j]];
            }
        }
        acc
    }
}

fn trapezoid_weights(axis: &Array1<f64>) -> Vec<f64> {
    let n = axis.len();
    (0..n)
        .map(|k| {
            let left = if k > 0 { axis[k] - axis[k - 1] } else { 0.0 };
            let right = if k + 1 < n { axis[k + 1] - axis[k] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect()
}

/// `W(β) = (2/π) Tr[ρ D(β) Π D(−β)] = (2/π) Tr[ρ D(2β) Π]`.
pub fn wigner(rho: &DensityMatrix, grid: &PhaseGrid) -> Result<WignerMap> {
    grid.validate()?;
    let dim = rho.dim();
    let el = rho.elements();
    let mean_n: f64 = (0..dim).map(|n| n as f64 * el[[n, n]].re).sum();
    let grid_too_small = grid.half_extent() < mean_n.max(0.0).sqrt() + 3.0;

    let xs = grid.xs();
    let ps = grid.ps();
    let mut values = Array2::<f64>::zeros((grid.nx, grid.np));
    let mut disp = Array2::<C64>::zeros((dim, dim));
    for (i, &x) in xs.iter().enumerate() {
        for (j, &p) in ps.iter().enumerate() {
            displacement_into(C64::new(2.0 * x, 2.0 * p), &mut disp);
            // Tr[ρ D Π] = Σ_{k,l} ρ_{lk} D_{kl} (−1)^l
            let mut acc = C64::new(0.0, 0.0);
            for l in 0..dim {
                let mut col = C64::new(0.0, 0.0);
                for k in 0..dim {
                    col += el[[l, k]] * disp[[k, l]];
                }
                if l % 2 == 0 {
                    acc += col;
                } else {
                    acc -= col;
                }
            }
            values[[i, j]] = std::f64::consts::FRAC_2_PI * acc.re;
        }
    }
    Ok(WignerMap { xs, ps, values, grid_too_small })
}

/// Upper-left `dim×dim` block of the untruncated `D(γ)`. Column 0 is the
/// coherent state `|γ⟩`; column `l` follows from `D â† = (â† − γ*) D`.
fn displacement_into(gamma: C64, out: &mut Array2<C64>) {
    let dim = out.nrows();
    out[[0, 0]] = C64::new((-0.5 * gamma.norm_sqr()).exp(), 0.0);
    for k in 1..dim {
        out[[k, 0]] = out[[k - 1, 0]] * gamma / (k as f64).sqrt();
    }
    let gc = gamma.conj();
    for l in 1..dim {
        let inv = 1.0 / (l as f64).sqrt();
        for k in 0..dim {
            let up = if k > 0 { out[[k - 1, l - 1]] * (k as f64).sqrt() } else { C64::new(0.0, 0.0) };
            out[[k, l]] = (up - gc * out[[k, l - 1]]) * inv;
        }
    }
}
