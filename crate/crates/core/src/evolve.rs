//! Integration of the vectorized master equation
//! `d/dt vec(rho) = L(t) vec(rho)` and steady-state extraction.
//!
//! With piecewise-constant rates the time-ordered propagator factorizes
//! exactly into ordinary exponentials applied in chronological order, one
//! per constant segment; that is the default `Expm` method. A classical
//! fixed-step fourth-order Runge-Kutta integrator is kept alongside for
//! cross-validation.
//!
//! Trace, Hermiticity, and positivity of the evolving state are recorded
//! as diagnostics at every output point, never silently corrected.

use ndarray::{Array1, Array2};
use ndarray_linalg::SVD;
use num_complex::Complex64 as C64;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{expm, herm_eig, herm_eigvals, one_norm, PSD_EIG_TOL};
use crate::liouvillian::Liouvillian;
use crate::operator::Operator;

/// Column-stacking `vec` operation: `v[j*n + i] = m[i, j]`.
pub fn vectorize(m: &Array2<C64>) -> Result<Array1<C64>> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::DimMismatch(r, c));
    }
    let mut v = Array1::from_elem(r * c, C64::new(0.0, 0.0));
    for j in 0..c {
        for i in 0..r {
            v[j * r + i] = m[[i, j]];
        }
    }
    Ok(v)
}

/// Inverse of [`vectorize`]; the length must be a perfect square.
pub fn unvectorize(v: &Array1<C64>) -> Result<Array2<C64>> {
    let len = v.len();
    let n = (len as f64).sqrt().round() as usize;
    if n * n != len {
        return Err(Error::Numerical(format!(
            "vector length {len} is not a perfect square"
        )));
    }
    let mut m = Array2::from_elem((n, n), C64::new(0.0, 0.0));
    for j in 0..n {
        for i in 0..n {
            m[[i, j]] = v[j * n + i];
        }
    }
    Ok(m)
}

/// Uniform output grid `0, dt_out, 2 dt_out, ..., <= t_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    dt_out: f64,
}

impl TimeGrid {
    pub fn new(t_max: f64, dt_out: f64) -> Result<Self> {
        if !(t_max > 0.0) || !(dt_out > 0.0) {
            return Err(Error::Numerical(format!(
                "time grid requires t_max > 0 and dt_out > 0 (got {t_max}, {dt_out})"
            )));
        }
        Ok(TimeGrid { t_max, dt_out })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn dt_out(&self) -> f64 {
        self.dt_out
    }

    pub fn times(&self) -> Vec<f64> {
        let n = (self.t_max / self.dt_out + 1e-9).floor() as usize;
        (0..=n).map(|k| k as f64 * self.dt_out).collect()
    }
}

/// Integration method for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Per-segment matrix exponentials; exact for piecewise-constant rates.
    Expm,
    /// Fixed-step classical Runge-Kutta. `step: None` picks
    /// `min(dt_out, 0.4 / |L|_1)`; an explicit step above that bound is
    /// rejected.
    Rk4 { step: Option<f64> },
}

/// Per-output-point health record of the evolving density matrix.
#[derive(Debug, Clone, Copy)]
pub struct Diagnostics {
    /// `|Tr rho - 1|`
    pub trace_dev: f64,
    /// smallest eigenvalue of the Hermitian part
    pub min_eigenvalue: f64,
    /// `max |rho - rho^dag|`
    pub hermiticity_defect: f64,
}

/// Time grid, per-time vectorized states, and diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<Array1<C64>>,
    diagnostics: Vec<Diagnostics>,
    state_dim: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Array1<C64>] {
        &self.states
    }

    pub fn diagnostics(&self) -> &[Diagnostics] {
        &self.diagnostics
    }

    /// Dimension `2^N` of the density matrices.
    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn n_sites(&self) -> usize {
        self.state_dim.trailing_zeros() as usize
    }

    /// Density matrix at output point `k`.
    pub fn rho(&self, k: usize) -> Operator {
        let m = unvectorize(&self.states[k]).expect("states hold square matrices");
        Operator::from_array(m).expect("state dimension is a power of two")
    }
}

fn validate_initial_state(rho0: &Operator, dim: usize) -> Result<()> {
    if rho0.dim() != dim {
        return Err(Error::DimMismatch(rho0.dim(), dim));
    }
    let defect = rho0.hermiticity_defect();
    if defect > 1e-9 {
        return Err(Error::InvalidState(format!(
            "initial state is not Hermitian (defect {defect:.3e})"
        )));
    }
    let tr = rho0.trace();
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
        return Err(Error::InvalidState(format!(
            "initial state has trace {tr} instead of 1"
        )));
    }
    let herm = hermitian_part(rho0.as_array());
    let w = herm_eigvals(&Operator::from_array(herm)?)?;
    if let Some(&bad) = w.iter().find(|&&x| x < -PSD_EIG_TOL) {
        return Err(Error::InvalidState(format!(
            "initial state has negative eigenvalue {bad:.3e}"
        )));
    }
    Ok(())
}

fn hermitian_part(m: &Array2<C64>) -> Array2<C64> {
    let half = C64::new(0.5, 0.0);
    (m + &m.t().mapv(|z| z.conj())).mapv(|z| z * half)
}

fn diagnose(state: &Array1<C64>) -> Result<Diagnostics> {
    let rho = unvectorize(state)?;
    let n = rho.nrows();
    let trace: C64 = rho.diag().iter().sum();
    let mut herm_defect = 0.0f64;
    for i in 0..n {
        for j in i..n {
            herm_defect = herm_defect.max((rho[[i, j]] - rho[[j, i]].conj()).norm());
        }
    }
    let herm = Operator::from_array(hermitian_part(&rho))?;
    let w = herm_eigvals(&herm)?;
    Ok(Diagnostics {
        trace_dev: (trace - C64::new(1.0, 0.0)).norm(),
        min_eigenvalue: w.last().copied().unwrap_or(0.0),
        hermiticity_defect: herm_defect,
    })
}

fn segment_index_at(l: &Liouvillian, t: f64) -> Result<usize> {
    l.segments()
        .iter()
        .position(|s| t < s.t_end)
        .ok_or(Error::ProfileCoverage {
            name: "liouvillian".into(),
            t,
        })
}

/// Integrate the master equation over the output grid.
///
/// `Expm` advances by `exp(L dt)` within each constant segment, applied in
/// chronological order across segment boundaries. `Rk4` uses a fixed
/// substep, never stepping across a boundary.
pub fn evolve(
    l: &Liouvillian,
    rho0: &Operator,
    grid: &TimeGrid,
    method: Method,
) -> Result<Trajectory> {
    validate_initial_state(rho0, l.state_dim())?;
    if l.coverage_end() < grid.t_max() {
        return Err(Error::ProfileCoverage {
            name: "liouvillian".into(),
            t: grid.t_max(),
        });
    }
    let times = grid.times();
    let time_eps = 1e-12 * grid.t_max().max(1.0);

    // step bound for rk4 over the segments the grid will touch
    let rk4_step = match method {
        Method::Expm => None,
        Method::Rk4 { step } => {
            let bound = l
                .segments()
                .iter()
                .filter(|s| s.t_start < grid.t_max())
                .map(|s| 0.4 / one_norm(s.matrix.as_array()))
                .fold(f64::INFINITY, f64::min)
                .min(grid.dt_out());
            match step {
                Some(h) => {
                    if !(h > 0.0) || h > bound * (1.0 + 1e-12) {
                        return Err(Error::StepSizeViolation { h, bound });
                    }
                    Some(h)
                }
                None => Some(bound),
            }
        }
    };

    let mut propagators: HashMap<(usize, i64), Array2<C64>> = HashMap::new();
    let mut state = vectorize(rho0.as_array())?;
    let mut out_states = Vec::with_capacity(times.len());
    let mut diagnostics = Vec::with_capacity(times.len());
    out_states.push(state.clone());
    diagnostics.push(diagnose(&state)?);

    for pair in times.windows(2) {
        let (mut t, t_stop) = (pair[0], pair[1]);
        while t_stop - t > time_eps {
            let idx = segment_index_at(l, t)?;
            let seg = &l.segments()[idx];
            let t_next = seg.t_end.min(t_stop);
            let dt = t_next - t;
            if dt > time_eps {
                match rk4_step {
                    None => {
                        // quantize dt so reused grid steps share one exponential
                        let key = (idx, (dt * 1e12).round() as i64);
                        if !propagators.contains_key(&key) {
                            let scaled = seg.matrix.as_array().mapv(|z| z * dt);
                            propagators.insert(key, expm(&scaled)?);
                        }
                        state = propagators[&key].dot(&state);
                    }
                    Some(h) => {
                        let n_sub = ((dt / h) - 1e-12).ceil().max(1.0) as usize;
                        let h_eff = dt / n_sub as f64;
                        let m = seg.matrix.as_array();
                        for _ in 0..n_sub {
                            state = rk4_step_once(m, &state, h_eff);
                        }
                    }
                }
            }
            t = t_next;
        }
        out_states.push(state.clone());
        diagnostics.push(diagnose(&state)?);
    }

    Ok(Trajectory {
        times,
        states: out_states,
        diagnostics,
        state_dim: l.state_dim(),
    })
}

fn rk4_step_once(m: &Array2<C64>, y: &Array1<C64>, h: f64) -> Array1<C64> {
    let hc = C64::new(h, 0.0);
    let half = C64::new(0.5, 0.0);
    let k1 = m.dot(y);
    let k2 = m.dot(&(y + &(&k1 * (hc * half))));
    let k3 = m.dot(&(y + &(&k2 * (hc * half))));
    let k4 = m.dot(&(y + &(&k3 * hc)));
    let sixth = hc * C64::new(1.0 / 6.0, 0.0);
    y + &((&(&k1 + &k4) + &(&(&k2 + &k3) * C64::new(2.0, 0.0))) * sixth)
}

/// Unique trace-one stationary state of a time-independent generator,
/// from the null space of its supermatrix. A null space of dimension
/// other than one (disconnected or purely coherent systems) is reported,
/// not resolved.
pub fn steady_state(l: &Liouvillian) -> Result<Operator> {
    if !l.is_time_independent() {
        return Err(Error::Numerical(
            "steady_state requires a time-independent Liouvillian".into(),
        ));
    }
    let m = l.segments()[0].matrix.as_array();
    let (_, sv, vt) = m.svd(false, true)?;
    let smax = sv.first().copied().unwrap_or(0.0);
    let tol = 1e-10 * smax.max(1.0);
    let null_dim = sv.iter().filter(|&&s| s <= tol).count();
    if null_dim != 1 {
        return Err(Error::DegenerateSteadyState(null_dim));
    }
    let vt = vt.expect("requested right singular vectors");
    // null vector = conjugated last row of V^H (singular values descend)
    let v: Array1<C64> = vt.row(sv.len() - 1).mapv(|z| z.conj());
    let raw = unvectorize(&v)?;
    let herm = hermitian_part(&raw);
    let trace: f64 = herm.diag().iter().map(|z| z.re).sum();
    if trace.abs() < 1e-10 {
        return Err(Error::Numerical(
            "null vector of the Liouvillian is traceless".into(),
        ));
    }
    let normalized = herm.mapv(|z| z / trace);

    let residual = m
        .dot(&vectorize(&normalized)?)
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > 1e-9 {
        return Err(Error::Numerical(format!(
            "steady-state residual {residual:.3e} exceeds 1e-9"
        )));
    }

    // clip round-off negatives, renormalize
    let (w, u) = herm_eig(&Operator::from_array(normalized)?)?;
    if let Some(&bad) = w.iter().find(|&&x| x < -PSD_EIG_TOL) {
        return Err(Error::NotPositiveSemidefinite(bad));
    }
    let clipped: Vec<f64> = w.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let mut scaled = u.as_array().clone();
    for (k, &x) in clipped.iter().enumerate() {
        let factor = C64::new(x / total, 0.0);
        scaled.column_mut(k).mapv_inplace(|z| z * factor);
    }
    let rho = scaled.dot(&u.as_array().t().mapv(|z| z.conj()));
    Operator::from_array(hermitian_part(&rho))
}
