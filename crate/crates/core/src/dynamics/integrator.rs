//! Adaptive RK4 with step doubling, applied to the Lindblad and Schrödinger
//! equations, plus an exact propagator for small constant generators.

use nalgebra::DMatrix;
use ndarray::linalg::{general_mat_mul, general_mat_vec_mul};
use ndarray::{Array2, ArrayView1, ArrayView2, ArrayViewMut1, ArrayViewMut2};
use serde::Serialize;

use super::hamiltonian::Hamiltonian;
use super::{DensityTrajectory, SpaceKind};
use crate::qcore::{dagger, eigh, DensityMatrix, StateVector};
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegratorOptions {
    /// Local error target, used as both absolute and relative tolerance.
    pub tol: f64,
    /// Upper bound on the internal step, s.
    pub max_step: Option<f64>,
    /// Verify the density-matrix invariants at every output time.
    pub check_invariants: bool,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_step: None, check_invariants: true }
    }
}

impl IntegratorOptions {
    pub fn new(tol: f64) -> Result<Self> {
        let o = Self { tol, ..Self::default() };
        o.validate()?;
        Ok(o)
    }

    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = Some(match self.max_step {
            Some(h) => h.min(max_step),
            None => max_step,
        });
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1e-12..=1e-4).contains(&self.tol) {
            return Err(Error::invalid("tolerance", format!("{} is outside [1e-12, 1e-4]", self.tol)));
        }
        if let Some(h) = self.max_step {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::invalid("max_step", format!("{h} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub smallest_step: f64,
}

pub(crate) fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::invalid("times", "empty time grid"));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("times", "non-finite time"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("times", "grid must be strictly increasing"));
    }
    Ok(())
}

struct Workspace {
    k1: Vec<C64>,
    k1_mid: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
    full: Vec<C64>,
    mid: Vec<C64>,
    half: Vec<C64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        let z = || vec![C64::new(0.0, 0.0); n];
        Self { k1: z(), k1_mid: z(), k2: z(), k3: z(), k4: z(), tmp: z(), full: z(), mid: z(), half: z() }
    }
}

/// One classical RK4 step given `k1 = f(t, y)`.
#[allow(clippy::too_many_arguments)]
fn rk4<F: FnMut(f64, &[C64], &mut [C64])>(
    rhs: &mut F,
    t: f64,
    y: &[C64],
    k1: &[C64],
    h: f64,
    out: &mut [C64],
    k2: &mut [C64],
    k3: &mut [C64],
    k4: &mut [C64],
    tmp: &mut [C64],
) {
    let hh = 0.5 * h;
    for i in 0..y.len() {
        tmp[i] = y[i] + k1[i] * hh;
    }
    rhs(t + hh, tmp, k2);
    for i in 0..y.len() {
        tmp[i] = y[i] + k2[i] * hh;
    }
    rhs(t + hh, tmp, k3);
    for i in 0..y.len() {
        tmp[i] = y[i] + k3[i] * h;
    }
    rhs(t + h, tmp, k4);
    let h6 = h / 6.0;
    for i in 0..y.len() {
        out[i] = y[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * h6;
    }
}

/// Integrates `y' = rhs(t, y)` through `times`, calling `emit` at each grid
/// point (including the first). Steps are RK4 with step doubling; accepted
/// steps keep the Richardson-extrapolated value.
pub(crate) fn integrate_flat<F, O>(
    y0: Vec<C64>,
    times: &[f64],
    opts: &IntegratorOptions,
    mut rhs: F,
    mut emit: O,
) -> Result<IntegratorStats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    O: FnMut(usize, f64, &[C64]) -> Result<()>,
{
    opts.validate()?;
    validate_times(times)?;
    let n = y0.len();
    let mut y = y0;
    let mut ws = Workspace::new(n);
    let mut stats = IntegratorStats { smallest_step: f64::INFINITY, ..Default::default() };
    let t0 = times[0];
    let span = times[times.len() - 1] - t0;
    let max_step = opts.max_step.unwrap_or(f64::INFINITY).min(if span > 0.0 { span } else { 1.0 });
    let mut h = max_step.min(span / 100.0).max(f64::MIN_POSITIVE);
    let mut t = t0;
    emit(0, t0, &y)?;
    let mut k1_valid = false;
    let tol = opts.tol;

    for (idx, &target) in times.iter().enumerate().skip(1) {
        while t < target {
            let remaining = target - t;
            let clipped = h * 1.000_001 >= remaining;
            let step = if clipped { remaining } else { h };
            if step < 1e-13 * t.abs().max(span) || step == 0.0 {
                return Err(Error::StepUnderflow { time: t, step });
            }
            if !k1_valid {
                rhs(t, &y, &mut ws.k1);
                stats.rhs_evals += 1;
                k1_valid = true;
            }
            let Workspace { k1, k1_mid, k2, k3, k4, tmp, full, mid, half } = &mut ws;
            rk4(&mut rhs, t, &y, k1, step, full, k2, k3, k4, tmp);
            rk4(&mut rhs, t, &y, k1, 0.5 * step, mid, k2, k3, k4, tmp);
            rhs(t + 0.5 * step, mid, k1_mid);
            rk4(&mut rhs, t + 0.5 * step, mid, k1_mid, 0.5 * step, half, k2, k3, k4, tmp);
            stats.rhs_evals += 10;

            let mut err = 0.0f64;
            for i in 0..n {
                let e = (half[i] - full[i]).norm() / 15.0 / (tol * (1.0 + half[i].norm()));
                err = if e.is_nan() { f64::INFINITY } else { err.max(e) };
            }
            if err <= 1.0 {
                for i in 0..n {
                    y[i] = half[i] + (half[i] - full[i]) / 15.0;
                }
                t = if clipped { target } else { t + step };
                k1_valid = false;
                stats.accepted += 1;
                stats.smallest_step = stats.smallest_step.min(step);
                let factor = if err == 0.0 { 4.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 4.0) };
                if !clipped || factor < 1.0 {
                    h = (step * factor).min(max_step);
                }
            } else {
                stats.rejected += 1;
                let factor = if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.1) } else { 0.1 };
                h = step * factor;
            }
        }
        emit(idx, target, &y)?;
    }
    if stats.smallest_step == f64::INFINITY {
        stats.smallest_step = 0.0;
    }
    Ok(stats)
}

fn check_jumps(dim: usize, jumps: &[(Array2<C64>, f64)]) -> Result<()> {
    for (op, rate) in jumps {
        if op.dim() != (dim, dim) {
            return Err(Error::DimensionMismatch(format!(
                "jump operator of shape {:?} in a {}-level system",
                op.shape(),
                dim
            )));
        }
        if !(rate.is_finite() && *rate >= 0.0) {
            return Err(Error::invalid("rate", format!("{rate} must be non-negative")));
        }
    }
    Ok(())
}

fn checked_state(elements: Array2<C64>, time: f64, check: bool) -> Result<DensityMatrix> {
    let rho = DensityMatrix::from_elements_unchecked(elements)?;
    if check {
        let report = rho.invariants()?;
        if !report.satisfied() {
            return Err(Error::InvariantViolation { time, detail: format!("{report:?}") });
        }
    }
    Ok(rho)
}

/// Integrates `ρ̇ = −i[H(t), ρ] + Σ γ (LρL† − ½{L†L, ρ})`.
pub fn lindblad_integrate(
    h: &Hamiltonian,
    jumps: &[(Array2<C64>, f64)],
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &IntegratorOptions,
    space: SpaceKind,
) -> Result<DensityTrajectory> {
    let d = h.dim();
    if rho0.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} under a {d}-level Hamiltonian",
            rho0.dim()
        )));
    }
    check_jumps(d, jumps)?;
    validate_times(times)?;
    h.check_hermitian(times[0])?;

    let minus_i = C64::new(0.0, -1.0);
    let mut g = Array2::<C64>::zeros((d, d));
    let mut scaled = Vec::new();
    for (op, rate) in jumps.iter().filter(|(_, r)| *r > 0.0) {
        let l = op.mapv(|z| z * rate.sqrt());
        let ld = dagger(&l);
        g = g + ld.dot(&l);
        scaled.push((l, ld));
    }
    // −iH₀ − ½G
    let m_const = h.constant_part().mapv(|z| z * minus_i) - g.mapv(|z| z * 0.5);
    let mut m = m_const.clone();
    let mut hbuf = Array2::<C64>::zeros((d, d));
    let mut k = Array2::<C64>::zeros((d, d));
    let mut lr = Array2::<C64>::zeros((d, d));
    let time_dependent = !h.is_constant();

    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
        let rho = ArrayView2::from_shape((d, d), y).expect("square state");
        if time_dependent {
            hbuf.fill(C64::new(0.0, 0.0));
            h.add_terms_into(t, &mut hbuf);
            m.assign(&m_const);
            m.scaled_add(minus_i, &hbuf);
        }
        general_mat_mul(C64::new(1.0, 0.0), &m, &rho, C64::new(0.0, 0.0), &mut k);
        let mut out = ArrayViewMut2::from_shape((d, d), dy).expect("square state");
        for i in 0..d {
            for j in 0..d {
                out[[i, j]] = k[[i, j]] + k[[j, i]].conj();
            }
        }
        for (l, ld) in &scaled {
            general_mat_mul(C64::new(1.0, 0.0), l, &rho, C64::new(0.0, 0.0), &mut lr);
            general_mat_mul(C64::new(1.0, 0.0), &lr, ld, C64::new(1.0, 0.0), &mut out);
        }
    };

    let mut states = Vec::with_capacity(times.len());
    let y0 = rho0.elements().iter().copied().collect::<Vec<_>>();
    let check = opts.check_invariants;
    let stats = integrate_flat(y0, times, opts, rhs, |_, t, y| {
        let el = Array2::from_shape_vec((d, d), y.to_vec()).expect("square state");
        states.push(checked_state(el, t, check)?);
        Ok(())
    })?;
    Ok(DensityTrajectory { times: times.to_vec(), states, space, stats })
}

/// Lindblad evolution for a constant `h`, integrated in the interaction
/// picture of its eigenbasis. There the right-hand side is of the order of
/// the jump rates only, so a large spread of energies does not drive the
/// accumulated error, unlike [`lindblad_integrate`].
pub fn lindblad_integrate_eigenframe(
    h: &Array2<C64>,
    jumps: &[(Array2<C64>, f64)],
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &IntegratorOptions,
    space: SpaceKind,
) -> Result<DensityTrajectory> {
    let d = h.nrows();
    if rho0.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} under a {d}-level Hamiltonian",
            rho0.dim()
        )));
    }
    check_jumps(d, jumps)?;
    validate_times(times)?;
    let eig = eigh(h)?;
    let v = eig.vectors;
    let vd = dagger(&v);
    // Only energy differences enter; centring keeps the phases small.
    let e0 = 0.5 * (eig.values[0] + eig.values[d - 1]);
    let energies = eig.values.mapv(|e| e - e0);

    let mut g = Array2::<C64>::zeros((d, d));
    let mut scaled = Vec::new();
    for (op, rate) in jumps.iter().filter(|(_, r)| *r > 0.0) {
        let l = vd.dot(&op.mapv(|z| z * rate.sqrt())).dot(&v);
        g = g + dagger(&l).dot(&l);
        scaled.push(l);
    }
    let t0 = times[0];
    let phases = |t: f64| energies.mapv(|e| C64::from_polar(1.0, e * (t - t0)));
    let mut lt = Array2::<C64>::zeros((d, d));
    let mut gt = Array2::<C64>::zeros((d, d));
    let mut k = Array2::<C64>::zeros((d, d));
    let mut lr = Array2::<C64>::zeros((d, d));

    // σ = e^{iEτ} V†ρV e^{−iEτ}; every operator X picks up X_jk e^{i(E_j−E_k)τ}.
    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
        let sigma = ArrayView2::from_shape((d, d), y).expect("square state");
        let p = phases(t);
        for i in 0..d {
            for j in 0..d {
                gt[[i, j]] = g[[i, j]] * p[i] * p[j].conj();
            }
        }
        general_mat_mul(C64::new(-0.5, 0.0), &gt, &sigma, C64::new(0.0, 0.0), &mut k);
        let mut out = ArrayViewMut2::from_shape((d, d), dy).expect("square state");
        for i in 0..d {
            for j in 0..d {
                out[[i, j]] = k[[i, j]] + k[[j, i]].conj();
            }
        }
        for l in &scaled {
            for i in 0..d {
                for j in 0..d {
                    lt[[i, j]] = l[[i, j]] * p[i] * p[j].conj();
                }
            }
            general_mat_mul(C64::new(1.0, 0.0), &lt, &sigma, C64::new(0.0, 0.0), &mut lr);
            general_mat_mul(C64::new(1.0, 0.0), &lr, &dagger(&lt), C64::new(1.0, 0.0), &mut out);
        }
    };

    let mut states = Vec::with_capacity(times.len());
    let y0 = vd.dot(rho0.elements()).dot(&v).iter().copied().collect::<Vec<_>>();
    let check = opts.check_invariants;
    let stats = integrate_flat(y0, times, opts, rhs, |_, t, y| {
        let p = phases(t);
        let sigma = Array2::from_shape_fn((d, d), |(i, j)| y[i * d + j] * p[i].conj() * p[j]);
        states.push(checked_state(v.dot(&sigma).dot(&vd), t, check)?);
        Ok(())
    })?;
    Ok(DensityTrajectory { times: times.to_vec(), states, space, stats })
}

/// Pure-state trajectory.
#[derive(Clone, Debug)]
pub struct StateTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// Largest `|‖ψ‖ − 1|` seen before renormalising the outputs.
    pub max_norm_defect: f64,
    pub stats: IntegratorStats,
}

impl StateTrajectory {
    /// `|⟨φ|ψ(t)⟩|²` along the trajectory.
    pub fn populations(&self, phi: &StateVector) -> Vec<f64> {
        self.states.iter().map(|s| phi.inner(s).norm_sqr()).collect()
    }
}

/// Integrates `iψ̇ = H(t)ψ`.
pub fn schrodinger_integrate(
    h: &Hamiltonian,
    psi0: &StateVector,
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<StateTrajectory> {
    let d = h.dim();
    if psi0.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} under a {d}-level Hamiltonian",
            psi0.dim()
        )));
    }
    validate_times(times)?;
    h.check_hermitian(times[0])?;
    let mut hbuf = h.constant_part().clone();
    let time_dependent = !h.is_constant();
    let minus_i = C64::new(0.0, -1.0);
    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
        if time_dependent {
            hbuf.assign(h.constant_part());
            h.add_terms_into(t, &mut hbuf);
        }
        let x = ArrayView1::from(y);
        let mut out = ArrayViewMut1::from(dy);
        general_mat_vec_mul(minus_i, &hbuf, &x, C64::new(0.0, 0.0), &mut out);
    };
    let mut states = Vec::with_capacity(times.len());
    let mut max_norm_defect = 0.0f64;
    let y0 = psi0.amplitudes().to_vec();
    let stats = integrate_flat(y0, times, opts, rhs, |_, _, y| {
        let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        max_norm_defect = max_norm_defect.max((norm - 1.0).abs());
        states.push(StateVector::new(ndarray::Array1::from(y.to_vec()))?);
        Ok(())
    })?;
    Ok(StateTrajectory { times: times.to_vec(), states, max_norm_defect, stats })
}

/// Row-major superoperator of the Lindblad generator for constant `h`.
fn liouvillian(h: &Array2<C64>, jumps: &[(Array2<C64>, f64)]) -> DMatrix<C64> {
    let d = h.nrows();
    let n = d * d;
    let mut l = DMatrix::<C64>::zeros(n, n);
    // left(A): Aρ  ->  A[i,k] δ_{jl};  right(B): ρB  ->  δ_{ik} B[l,j]
    let add_left = |l: &mut DMatrix<C64>, a: &Array2<C64>, c: C64| {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    l[(i * d + j, k * d + j)] += c * a[[i, k]];
                }
            }
        }
    };
    let add_right = |l: &mut DMatrix<C64>, b: &Array2<C64>, c: C64| {
        for i in 0..d {
            for j in 0..d {
                for q in 0..d {
                    l[(i * d + j, i * d + q)] += c * b[[q, j]];
                }
            }
        }
    };
    let i = C64::new(0.0, 1.0);
    add_left(&mut l, h, -i);
    add_right(&mut l, h, i);
    for (op, rate) in jumps {
        let ld = dagger(op);
        let ldl = ld.dot(op);
        let r = C64::new(*rate, 0.0);
        add_left(&mut l, &ldl, -0.5 * r);
        add_right(&mut l, &ldl, -0.5 * r);
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    for e in 0..d {
                        // (LρL†)[a,b] = Σ L[a,c] ρ[c,e] L†[e,b]
                        l[(a * d + b, c * d + e)] += r * op[[a, c]] * ld[[e, b]];
                    }
                }
            }
        }
    }
    l
}

/// Exact solution `ρ(t) = exp(𝓛(t − t₀))ρ₀` for a constant generator, via a
/// matrix exponential of the superoperator. Meant as an oracle for small
/// systems.
pub fn lindblad_exact(
    h: &Array2<C64>,
    jumps: &[(Array2<C64>, f64)],
    rho0: &DensityMatrix,
    times: &[f64],
) -> Result<DensityTrajectory> {
    let d = h.nrows();
    if d > 12 {
        return Err(Error::invalid("dimension", "the exact propagator is for small systems only"));
    }
    if rho0.dim() != d {
        return Err(Error::DimensionMismatch("state and Hamiltonian differ".into()));
    }
    check_jumps(d, jumps)?;
    validate_times(times)?;
    let l = liouvillian(h, jumps);
    let v0 = nalgebra::DVector::from_iterator(d * d, rho0.elements().iter().copied());
    let mut states = Vec::with_capacity(times.len());
    for &t in times {
        let prop = (&l * C64::new(t - times[0], 0.0)).exp();
        let v = prop * &v0;
        let el = Array2::from_shape_fn((d, d), |(i, j)| v[i * d + j]);
        states.push(DensityMatrix::from_elements_unchecked(el)?);
    }
    Ok(DensityTrajectory { times: times.to_vec(), states, space: SpaceKind::Qubit, stats: IntegratorStats::default() })
}
