//! Superoperator assembly for the vectorized master equation.
//!
//! Under column stacking, `vec(A X B) = (B^T kron A) vec(X)`, so the
//! coherent part of the generator is
//!
//! ```text
//! L_0 = -i (I kron H  -  H^T kron I)
//! ```
//!
//! and each reservoir attachment with rate `Gamma(t)` and Fermi factor `f`
//! contributes `-1/2 Gamma(t) [ f L+_ij + (1 - f) L-_ij ]`.
//!
//! The dissipators `L+-_ij` are built twice, by independent routes:
//!
//! * [`build_dissipator`] - the production path: explicit tensor products
//!   of single-site Pauli matrices over the 2N factors of the
//!   superoperator space, written out separately for `i = j`, `i < j`,
//!   `i > j`.
//! * [`oracle_dissipator`] - direct matrix products of the jump operators
//!   `S_i`, vectorized numerically. Shares nothing with the recipe beyond
//!   the Kronecker primitive.
//!
//! For `i = j` the result is an ordinary GKSL dissipator with jump
//! operator `S_i^dag` (the `+`/filling channel) or `S_i` (the
//! `-`/emptying channel).

use num_complex::Complex64 as C64;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, rate_at, ModelSpec};
use crate::operator::{kron_chain, pauli, system_jump, Operator, Pauli, SiteIndex};

/// Filling (`Plus`, weight `f`) or emptying (`Minus`, weight `1 - f`)
/// channel of a dissipator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DissipatorSign {
    Plus,
    Minus,
}

/// Superoperator of `rho -> A rho B` under column stacking.
fn sandwich(a: &Operator, b: &Operator) -> Operator {
    b.transpose().kron(a)
}

/// Coherent part `L_0`; acting on `vec(rho)` it equals `vec(-i [H, rho])`.
pub fn build_coherent(h: &Operator) -> Result<Operator> {
    let defect = h.hermiticity_defect();
    if defect > crate::operator::HERMITICITY_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let id = Operator::identity(h.dim())?;
    let comm = &sandwich(h, &id) - &sandwich(&id, h);
    Ok(comm.scale(C64::new(0.0, -1.0)))
}

/// `vec(I)^dag L`, the worst column sum over diagonal rows. Zero for any
/// trace-preserving generator.
pub fn trace_preservation_defect(l: &Operator) -> f64 {
    let dim2 = l.dim();
    let d = (dim2 as f64).sqrt().round() as usize;
    assert_eq!(d * d, dim2, "superoperator dimension must be a perfect square");
    let m = l.as_array();
    let mut worst = 0.0f64;
    for c in 0..dim2 {
        let mut s = C64::new(0.0, 0.0);
        for k in 0..d {
            s += m[[k * d + k, c]];
        }
        worst = worst.max(s.norm());
    }
    worst
}

fn push_repeated(which: Pauli, count: usize, out: &mut Vec<Operator>) {
    for _ in 0..count {
        out.push(pauli(which));
    }
}

/// Dissipator via the explicit Pauli-string tensor recipe on the 2N-factor
/// superoperator space. The left N factors act on the column index of the
/// vectorized density matrix, the right N on the row index.
pub fn build_dissipator(
    i: SiteIndex,
    j: SiteIndex,
    sign: DissipatorSign,
    n: usize,
) -> Result<Operator> {
    let iv = i.check(n)?.get();
    let jv = j.check(n)?.get();
    // "raise" is the channel's sigma_pm, "lower" its sigma_mp
    let (raise, lower) = match sign {
        DissipatorSign::Plus => (Pauli::Plus, Pauli::Minus),
        DissipatorSign::Minus => (Pauli::Minus, Pauli::Plus),
    };
    let lower_raise = &pauli(lower) * &pauli(raise);

    if iv == jv {
        let mut f1 = Vec::with_capacity(2 * n);
        push_repeated(Pauli::Identity, n + iv - 1, &mut f1);
        f1.push(lower_raise.clone());
        push_repeated(Pauli::Identity, n - iv, &mut f1);

        let mut f2 = Vec::with_capacity(2 * n);
        push_repeated(Pauli::Identity, iv - 1, &mut f2);
        f2.push(lower_raise);
        push_repeated(Pauli::Identity, 2 * n - iv, &mut f2);

        let mut f3 = Vec::with_capacity(2 * n);
        for _ in 0..2 {
            push_repeated(Pauli::Identity, iv - 1, &mut f3);
            f3.push(pauli(raise));
            push_repeated(Pauli::Z, n - iv, &mut f3);
        }

        let t12 = &kron_chain(&f1)? + &kron_chain(&f2)?;
        return Ok(&t12 + &kron_chain(&f3)?.scale(C64::new(-2.0, 0.0)));
    }

    // hopping-like terms pick up the channel sign
    let chan = match sign {
        DissipatorSign::Plus => C64::new(1.0, 0.0),
        DissipatorSign::Minus => C64::new(-1.0, 0.0),
    };
    let (lo, hi) = (iv.min(jv), iv.max(jv));
    // i < j leads with sigma_mp on site i; i > j leads with sigma_pm on
    // site j
    let (lead, trail) = if iv < jv { (lower, raise) } else { (raise, lower) };

    let mut f1 = Vec::with_capacity(2 * n);
    push_repeated(Pauli::Identity, n + lo - 1, &mut f1);
    f1.push(pauli(lead));
    push_repeated(Pauli::Z, hi - lo - 1, &mut f1);
    f1.push(pauli(trail));
    push_repeated(Pauli::Identity, n - hi, &mut f1);

    let mut f2 = Vec::with_capacity(2 * n);
    push_repeated(Pauli::Identity, lo - 1, &mut f2);
    f2.push(pauli(lead));
    push_repeated(Pauli::Z, hi - lo - 1, &mut f2);
    f2.push(pauli(trail));
    push_repeated(Pauli::Identity, 2 * n - hi, &mut f2);

    let mut f3 = Vec::with_capacity(2 * n);
    for &site in &[iv, jv] {
        push_repeated(Pauli::Identity, site - 1, &mut f3);
        f3.push(pauli(raise));
        push_repeated(Pauli::Z, n - site, &mut f3);
    }
    let mut f4 = Vec::with_capacity(2 * n);
    for &site in &[jv, iv] {
        push_repeated(Pauli::Identity, site - 1, &mut f4);
        f4.push(pauli(raise));
        push_repeated(Pauli::Z, n - site, &mut f4);
    }

    let hop = (&kron_chain(&f1)? + &kron_chain(&f2)?).scale(chan);
    let cross = &kron_chain(&f3)? + &kron_chain(&f4)?;
    Ok(&hop - &cross)
}

/// Independent construction of the same dissipator from jump-operator
/// matrix products:
///
/// ```text
/// Plus:  rho -> S_i S_j+ rho - S_i+ rho S_j + rho S_j S_i+ - S_j+ rho S_i
/// Minus: rho -> S_i+ S_j rho - S_i rho S_j+ + rho S_j+ S_i - S_j rho S_i+
/// ```
pub fn oracle_dissipator(
    i: SiteIndex,
    j: SiteIndex,
    sign: DissipatorSign,
    n: usize,
) -> Result<Operator> {
    let si = system_jump(i, n)?;
    let sj = system_jump(j, n)?;
    let id = Operator::identity(si.dim())?;
    let m = match sign {
        DissipatorSign::Plus => {
            &(&sandwich(&(&si * &sj.dag()), &id) - &sandwich(&si.dag(), &sj))
                + &(&sandwich(&id, &(&sj * &si.dag())) - &sandwich(&sj.dag(), &si))
        }
        DissipatorSign::Minus => {
            &(&sandwich(&(&si.dag() * &sj), &id) - &sandwich(&si, &sj.dag()))
                + &(&sandwich(&id, &(&sj.dag() * &si)) - &sandwich(&sj, &si.dag()))
        }
    };
    Ok(m)
}

/// Time-resolved generator: list of `(interval, matrix)` pairs over which
/// the piecewise-constant rates are frozen. Immutable and shareable.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dim: usize,
    segments: Vec<Segment>,
}

#[derive(Debug, Clone)]
pub struct Segment {
    pub t_start: f64,
    /// Exclusive end; `f64::INFINITY` for an unbounded tail.
    pub t_end: f64,
    pub matrix: Operator,
}

impl Liouvillian {
    /// A time-independent generator on `[0, inf)`.
    pub fn from_constant(matrix: Operator) -> Result<Self> {
        Self::from_segments(vec![Segment {
            t_start: 0.0,
            t_end: f64::INFINITY,
            matrix,
        }])
    }

    /// Segments must start at 0, be contiguous, and share a dimension
    /// that is an even power of two.
    pub fn from_segments(segments: Vec<Segment>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::Numerical("Liouvillian needs at least one segment".into()))?;
        if first.t_start != 0.0 {
            return Err(Error::Numerical("first segment must start at t = 0".into()));
        }
        let dim = first.matrix.dim();
        if dim.trailing_zeros() % 2 != 0 {
            return Err(Error::Numerical(format!(
                "superoperator dimension {dim} is not a power of four"
            )));
        }
        let mut prev_end = 0.0;
        for (k, seg) in segments.iter().enumerate() {
            if seg.matrix.dim() != dim {
                return Err(Error::DimMismatch(seg.matrix.dim(), dim));
            }
            if k > 0 && seg.t_start != prev_end {
                return Err(Error::Numerical(format!(
                    "segment {k} starts at {} but previous ends at {prev_end}",
                    seg.t_start
                )));
            }
            if seg.t_end <= seg.t_start {
                return Err(Error::Numerical(format!(
                    "segment {k} has nonpositive length"
                )));
            }
            prev_end = seg.t_end;
        }
        Ok(Liouvillian { dim, segments })
    }

    /// Superoperator dimension, `4^N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the density matrices acted upon, `2^N`.
    pub fn state_dim(&self) -> usize {
        1 << (self.dim.trailing_zeros() / 2)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_time_independent(&self) -> bool {
        self.segments.len() == 1
    }

    pub fn coverage_end(&self) -> f64 {
        self.segments.last().map(|s| s.t_end).unwrap_or(0.0)
    }

    pub fn matrix_at(&self, t: f64) -> Result<&Operator> {
        self.segments
            .iter()
            .find(|s| s.t_start <= t && t < s.t_end)
            .map(|s| &s.matrix)
            .ok_or(Error::ProfileCoverage {
                name: "liouvillian".into(),
                t,
            })
    }
}

/// Sum of dissipator contributions at fixed rates; `rates[k]` pairs with
/// `reservoirs()[k]`.
fn dissipative_part(
    spec: &ModelSpec,
    rates: &[f64],
    cache: &mut HashMap<(usize, usize), (Operator, Operator)>,
) -> Result<Operator> {
    let n = spec.n_sites();
    let dim = 1usize << (2 * n);
    let mut total = Operator::zeros(dim)?;
    for (att, &rate) in spec.reservoirs().iter().zip(rates) {
        if rate == 0.0 {
            continue;
        }
        let key = (att.jump_sites.0.get(), att.jump_sites.1.get());
        if !cache.contains_key(&key) {
            let plus = build_dissipator(att.jump_sites.0, att.jump_sites.1, DissipatorSign::Plus, n)?;
            let minus =
                build_dissipator(att.jump_sites.0, att.jump_sites.1, DissipatorSign::Minus, n)?;
            cache.insert(key, (plus, minus));
        }
        let (plus, minus) = &cache[&key];
        let f = att.fermi;
        let weighted = &plus.scale(C64::new(f, 0.0)) + &minus.scale(C64::new(1.0 - f, 0.0));
        total = &total + &weighted.scale(C64::new(-0.5 * rate, 0.0));
    }
    Ok(total)
}

/// Generator frozen at time `t`:
/// `L(t) = L_0 - 1/2 sum_n Gamma_n(t) [ f_n L+ + (1 - f_n) L- ]`.
pub fn assemble_at(spec: &ModelSpec, t: f64) -> Result<Operator> {
    let l0 = build_coherent(&build_hamiltonian(spec)?)?;
    let rates = spec
        .reservoirs()
        .iter()
        .map(|att| rate_at(att, t))
        .collect::<Result<Vec<f64>>>()?;
    let mut cache = HashMap::new();
    Ok(&l0 + &dissipative_part(spec, &rates, &mut cache)?)
}

/// Segmented generator covering `[0, horizon]`. Segment boundaries are the
/// union of all profile step times; within each segment the rates are
/// constant, so the time-ordered propagator factorizes into ordinary
/// exponentials.
pub fn assemble(spec: &ModelSpec, horizon: f64) -> Result<Liouvillian> {
    if !(horizon > 0.0) {
        return Err(Error::Numerical("assemble horizon must be positive".into()));
    }
    for att in spec.reservoirs() {
        if att.profile.coverage_end() < horizon {
            return Err(Error::ProfileCoverage {
                name: att.name.clone(),
                t: horizon,
            });
        }
    }
    let mut starts: Vec<f64> = vec![0.0];
    for att in spec.reservoirs() {
        for &(t, _) in att.profile.steps() {
            if t > 0.0 && t < horizon {
                starts.push(t);
            }
        }
    }
    starts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    starts.dedup();

    let coverage = spec.profile_coverage_end();
    let l0 = build_coherent(&build_hamiltonian(spec)?)?;
    let mut cache = HashMap::new();
    let mut segments = Vec::with_capacity(starts.len());
    for (k, &t0) in starts.iter().enumerate() {
        let t1 = starts.get(k + 1).copied().unwrap_or(coverage);
        let rates = spec
            .reservoirs()
            .iter()
            .map(|att| rate_at(att, t0))
            .collect::<Result<Vec<f64>>>()?;
        let matrix = &l0 + &dissipative_part(spec, &rates, &mut cache)?;
        segments.push(Segment {
            t_start: t0,
            t_end: t1,
            matrix,
        });
    }
    Liouvillian::from_segments(segments)
}
