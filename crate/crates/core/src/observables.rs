//! Derived quantities: occupations, cross-populations, partial trace,
//! two-qubit extraction, concurrence, linear entropy, and
//! sudden-death detection on concurrence series.
//!
//! The two-qubit encoding fixes qubit A to the first molecule (|0> = dot 1
//! occupied, |1> = dot 2 occupied) and qubit B to the second (|0> = dot 3,
//! |1> = dot 4), so the two-particle subspace maps as
//!
//! ```text
//! |1010> -> |00>    |1001> -> |01>    |0110> -> |10>    |0101> -> |11>
//! ```
//!
//! Concurrence is invariant under this relabeling choice.

use ndarray::Array2;
use ndarray_linalg::Eig;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{herm_eigvals, matrix_sqrt_psd};
use crate::operator::{kron_chain, number_op, pauli, FockLabel, Operator, Pauli, SiteIndex};

/// Weight allowed outside the two-qubit subspace before
/// [`extract_two_qubit`] refuses; more leakage than this signals particle
/// non-conservation in the model, not round-off.
pub const SUBSPACE_LEAK_TOL: f64 = 1e-6;

/// Concurrence below this is "dead".
pub const DEATH_TOL: f64 = 1e-6;
/// Concurrence above this ends a death interval.
pub const REBIRTH_TOL: f64 = 1e-4;
/// A death interval must span at least this many grid steps; shorter dips
/// are zero crossings, not sudden deaths.
pub const MIN_DEATH_STEPS: usize = 2;

/// Reduced density matrix over the kept sites (ascending site order),
/// tracing out the rest.
pub fn partial_trace(rho: &Operator, keep: &[SiteIndex]) -> Result<Operator> {
    let d = rho.n_sites();
    if keep.is_empty() {
        return Err(Error::InvalidModel("partial_trace keep set is empty".into()));
    }
    let mut kept: Vec<usize> = keep.iter().map(|s| s.get()).collect();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::InvalidModel("partial_trace keep set has duplicates".into()));
    }
    if let Some(&bad) = kept.iter().find(|&&s| s > d) {
        return Err(Error::SiteOutOfRange { index: bad, total: d });
    }
    let traced: Vec<usize> = (1..=d).filter(|s| !kept.contains(s)).collect();

    // bit position (from MSB) of site s in a D-site index
    let bit_of = |index: usize, s: usize| (index >> (d - s)) & 1;
    let dim_out = 1usize << kept.len();
    let dim_env = 1usize << traced.len();
    let m = rho.as_array();
    let mut out = Array2::from_elem((dim_out, dim_out), C64::new(0.0, 0.0));
    for r in 0..dim_out {
        for c in 0..dim_out {
            let mut acc = C64::new(0.0, 0.0);
            for e in 0..dim_env {
                let mut full_r = 0usize;
                let mut full_c = 0usize;
                for s in 1..=d {
                    let (br, bc) = if let Some(pos) = kept.iter().position(|&k| k == s) {
                        let shift = kept.len() - 1 - pos;
                        ((r >> shift) & 1, (c >> shift) & 1)
                    } else {
                        let pos = traced.iter().position(|&t| t == s).unwrap();
                        let shift = traced.len() - 1 - pos;
                        let b = (e >> shift) & 1;
                        (b, b)
                    };
                    full_r = (full_r << 1) | br;
                    full_c = (full_c << 1) | bc;
                }
                // silence the unused helper warning while keeping the
                // convention documented in one place
                debug_assert_eq!(bit_of(full_r, 1), full_r >> (d - 1));
                acc += m[[full_r, full_c]];
            }
            out[[r, c]] = acc;
        }
    }
    Operator::from_array(out)
}

/// `<N_i> = Tr(N_i rho)`, read off the diagonal (site occupied means index
/// bit 0 in the `[occupied, empty]` per-site ordering).
pub fn occupation(rho: &Operator, site: SiteIndex) -> Result<f64> {
    let n = rho.n_sites();
    let s = site.check(n)?.get();
    let m = rho.as_array();
    let mut acc = 0.0;
    for k in 0..rho.dim() {
        if (k >> (n - s)) & 1 == 0 {
            acc += m[[k, k]].re;
        }
    }
    Ok(acc)
}

/// Projector products selecting one two-particle Fock state each:
/// `(P_1001, P_0110, P_1010, P_0101)` with
/// `P_1001 = <N_1 (I - N_2)(I - N_3) N_4>` and cyclic relabelings.
pub fn cross_populations(rho: &Operator) -> Result<[f64; 4]> {
    if rho.dim() != 16 {
        return Err(Error::DimMismatch(rho.dim(), 16));
    }
    let patterns = ["1001", "0110", "1010", "0101"];
    let id = Operator::identity(16)?;
    let mut out = [0.0f64; 4];
    for (slot, pattern) in patterns.iter().enumerate() {
        let mut proj = id.clone();
        for (k, ch) in pattern.chars().enumerate() {
            let ni = number_op(SiteIndex::new(k + 1)?, 4)?;
            let factor = if ch == '1' { ni } else { &id - &ni };
            proj = &proj * &factor;
        }
        out[slot] = (&proj * rho).trace().re;
    }
    Ok(out)
}

/// 4x4 density matrix on the two-qubit subspace, in the basis
/// `|00>, |01>, |10>, |11>` of the encoding described at module level.
#[derive(Debug, Clone)]
pub struct TwoQubitState {
    matrix: Array2<C64>,
    discarded_weight: f64,
}

impl TwoQubitState {
    /// Validate Hermiticity (1e-8), unit trace (1e-8), and positivity
    /// (eigenvalues above -1e-7).
    pub fn new(matrix: Array2<C64>) -> Result<Self> {
        if matrix.dim() != (4, 4) {
            return Err(Error::DimMismatch(matrix.nrows(), 4));
        }
        let op = Operator::from_array(matrix.clone())?;
        let defect = op.hermiticity_defect();
        if defect > 1e-8 {
            return Err(Error::NotHermitian(defect));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
            return Err(Error::InvalidState(format!(
                "two-qubit state has trace {tr} instead of 1"
            )));
        }
        let w = herm_eigvals(&op.hermitian_part())?;
        if let Some(&bad) = w.iter().find(|&&x| x < -1e-7) {
            return Err(Error::NotPositiveSemidefinite(bad));
        }
        Ok(TwoQubitState {
            matrix,
            discarded_weight: 0.0,
        })
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    /// Weight outside the two-qubit subspace that renormalization dropped.
    pub fn discarded_weight(&self) -> f64 {
        self.discarded_weight
    }
}

/// Basis indices of `|1010>, |1001>, |0110>, |0101>` in the 16-dim space,
/// ordered to map onto `|00>, |01>, |10>, |11>`.
fn two_qubit_indices() -> [usize; 4] {
    ["1010", "1001", "0110", "0101"]
        .map(|s| FockLabel::parse(s).expect("static label").basis_index())
}

/// Extract and renormalize the two-qubit block of a 16-dim density
/// matrix. Errors when the weight outside the subspace exceeds
/// [`SUBSPACE_LEAK_TOL`] - the shipped Hamiltonians conserve the molecule
/// particle numbers, so leakage indicates a modeling bug.
pub fn extract_two_qubit(rho: &Operator) -> Result<TwoQubitState> {
    if rho.dim() != 16 {
        return Err(Error::DimMismatch(rho.dim(), 16));
    }
    let idx = two_qubit_indices();
    let m = rho.as_array();
    let weight: f64 = idx.iter().map(|&k| m[[k, k]].re).sum();
    let leakage = (rho.trace().re - weight).max(0.0);
    if leakage > SUBSPACE_LEAK_TOL {
        return Err(Error::SubspaceLeakage(leakage, SUBSPACE_LEAK_TOL));
    }
    let mut block = Array2::from_elem((4, 4), C64::new(0.0, 0.0));
    for (r, &ir) in idx.iter().enumerate() {
        for (c, &ic) in idx.iter().enumerate() {
            block[[r, c]] = m[[ir, ic]] / weight;
        }
    }
    let mut state = TwoQubitState::new(block)?;
    state.discarded_weight = leakage;
    Ok(state)
}

/// `(sigma_y kron sigma_y) conj(rho) (sigma_y kron sigma_y)`.
fn spin_flip(rho: &Array2<C64>) -> Array2<C64> {
    let yy = kron_chain(&[pauli(Pauli::Y), pauli(Pauli::Y)])
        .expect("static chain")
        .into_array();
    yy.dot(&rho.mapv(|z| z.conj())).dot(&yy)
}

fn concurrence_from_sorted(lambda: &[f64]) -> f64 {
    let c = lambda[0] - lambda[1] - lambda[2] - lambda[3];
    c.clamp(0.0, 1.0)
}

/// Wootters concurrence, from the square roots of the eigenvalues of
/// `rho rho~` in decreasing order: `C = max(0, l1 - l2 - l3 - l4)`.
pub fn concurrence(state: &TwoQubitState) -> f64 {
    let rho = state.matrix();
    let product = rho.dot(&spin_flip(rho));
    let (eigs, _) = product.eig().expect("4x4 eigenvalue computation");
    let mut lambda: Vec<f64> = eigs.iter().map(|z| z.re.max(0.0).sqrt()).collect();
    lambda.sort_by(|a, b| b.partial_cmp(a).unwrap());
    concurrence_from_sorted(&lambda)
}

/// Cross-check route through the auxiliary operator
/// `R = sqrt( sqrt(rho) rho~ sqrt(rho) )`; the concurrence is the same
/// combination of the eigenvalues of `R`. Agrees with [`concurrence`]
/// within 1e-8.
pub fn concurrence_r_operator(state: &TwoQubitState) -> Result<f64> {
    let rho = Operator::from_array(state.matrix().clone())?.hermitian_part();
    let sqrt_rho = matrix_sqrt_psd(&rho)?;
    let flipped = Operator::from_array(spin_flip(rho.as_array()))?;
    let sandwich = (&(&sqrt_rho * &flipped) * &sqrt_rho).hermitian_part();
    let r = matrix_sqrt_psd(&sandwich)?;
    let lambda = herm_eigvals(&r)?;
    let clipped: Vec<f64> = lambda.iter().map(|&x| x.max(0.0)).collect();
    Ok(concurrence_from_sorted(&clipped))
}

/// `S = 1 - Tr(rho^2)`; zero for pure states, `1 - 1/d` at the maximally
/// mixed state.
pub fn linear_entropy(rho: &Operator) -> f64 {
    let m = rho.as_array();
    let n = rho.dim();
    let mut tr_sq = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            tr_sq += m[[i, j]] * m[[j, i]];
        }
    }
    1.0 - tr_sq.re
}

/// A maximal interval over which the concurrence vanished; `rebirth` is
/// `None` when the series ends while still dead (open right endpoint).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeathInterval {
    pub death: f64,
    pub rebirth: Option<f64>,
}

/// Scan a concurrence series on a uniform grid for sudden deaths: maximal
/// runs below [`DEATH_TOL`] spanning at least [`MIN_DEATH_STEPS`] grid
/// steps, each extending until the concurrence first exceeds
/// [`REBIRTH_TOL`]. Endpoints are reported at grid resolution.
pub fn detect_sudden_death(times: &[f64], concurrence: &[f64]) -> Vec<DeathInterval> {
    assert_eq!(times.len(), concurrence.len(), "series length mismatch");
    let n = concurrence.len();
    let mut out = Vec::new();
    let mut k = 0;
    while k < n {
        if concurrence[k] >= DEATH_TOL {
            k += 1;
            continue;
        }
        // contiguous dead run
        let mut m = k;
        while m < n && concurrence[m] < DEATH_TOL {
            m += 1;
        }
        if m - k >= MIN_DEATH_STEPS + 1 {
            // qualified death; rebirth at the first sample above REBIRTH_TOL
            let mut j = m;
            while j < n && concurrence[j] <= REBIRTH_TOL {
                j += 1;
            }
            let rebirth = (j < n).then(|| times[j]);
            out.push(DeathInterval {
                death: times[k],
                rebirth,
            });
            if rebirth.is_none() {
                break;
            }
            k = j;
        } else {
            // touch, not an interval
            k = m;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr2, Array1};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn site(i: usize) -> SiteIndex {
        SiteIndex::new(i).unwrap()
    }

    fn pure(label: &str) -> Operator {
        FockLabel::parse(label).unwrap().projector()
    }

    fn pure_from_vec(v: &Array1<C64>) -> Operator {
        let n = v.len();
        let mut m = Array2::from_elem((n, n), c(0.0, 0.0));
        for i in 0..n {
            for j in 0..n {
                m[[i, j]] = v[i] * v[j].conj();
            }
        }
        Operator::from_array(m).unwrap()
    }

    #[test]
    fn partial_trace_of_product_state() {
        let a = pure("1");
        let b = pure("0");
        let ab = a.kron(&b);
        let kept = partial_trace(&ab, &[site(1)]).unwrap();
        assert!(kept.max_abs_diff(&a) < 1e-15);
        let kept2 = partial_trace(&ab, &[site(2)]).unwrap();
        assert!(kept2.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn partial_trace_of_entangled_pair_is_mixed() {
        // (|10> + |01>)/sqrt2 -> I/2 on either site
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = Array1::from_elem(4, c(0.0, 0.0));
        v[FockLabel::parse("10").unwrap().basis_index()] = c(s, 0.0);
        v[FockLabel::parse("01").unwrap().basis_index()] = c(s, 0.0);
        let rho = pure_from_vec(&v);
        let reduced = partial_trace(&rho, &[site(1)]).unwrap();
        let half_id = Operator::identity(2).unwrap().scale(c(0.5, 0.0));
        assert!(reduced.max_abs_diff(&half_id) < 1e-15);
    }

    #[test]
    fn partial_trace_composition() {
        // deterministic pseudo-random 5-site density matrix
        let d = 32;
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let b = Array2::from_shape_fn((d, d), |_| c(next(), next()));
        let bb = b.dot(&b.t().mapv(|z| z.conj()));
        let tr: f64 = bb.diag().iter().map(|z| z.re).sum();
        let rho = Operator::from_array(bb.mapv(|z| z / tr)).unwrap();

        let keep1234 = partial_trace(&rho, &[site(1), site(2), site(3), site(4)]).unwrap();
        assert!((keep1234.trace().re - 1.0).abs() < 1e-12);
        assert!(keep1234.trace().im.abs() < 1e-12);

        // tracing site 5, then site 4 of the remainder, equals keeping 1..3
        let step = partial_trace(&keep1234, &[site(1), site(2), site(3)]).unwrap();
        let direct = partial_trace(&rho, &[site(1), site(2), site(3)]).unwrap();
        assert!(step.max_abs_diff(&direct) < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_keep_sets() {
        let rho = pure("10");
        assert!(partial_trace(&rho, &[]).is_err());
        assert!(partial_trace(&rho, &[site(3)]).is_err());
        assert!(partial_trace(&rho, &[site(1), site(1)]).is_err());
    }

    #[test]
    fn occupation_of_fock_state() {
        let rho = pure("1001");
        let expect = [1.0, 0.0, 0.0, 1.0];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(occupation(&rho, site(i + 1)).unwrap(), e);
        }
        let mixed = Operator::identity(16).unwrap().scale(c(1.0 / 16.0, 0.0));
        for i in 1..=4 {
            assert!((occupation(&mixed, site(i)).unwrap() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn cross_populations_of_fock_states() {
        assert_eq!(cross_populations(&pure("1001")).unwrap(), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(cross_populations(&pure("0110")).unwrap(), [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(cross_populations(&pure("1010")).unwrap(), [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(cross_populations(&pure("0101")).unwrap(), [0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn cross_populations_equal_diagonal_entries() {
        // pseudo-random Hermitian PSD on 16 dims
        let d = 16;
        let mut seed = 0xc0ffee123456789u64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let b = Array2::from_shape_fn((d, d), |_| c(next(), next()));
        let bb = b.dot(&b.t().mapv(|z| z.conj()));
        let tr: f64 = bb.diag().iter().map(|z| z.re).sum();
        let rho = Operator::from_array(bb.mapv(|z| z / tr)).unwrap();

        let pops = cross_populations(&rho).unwrap();
        let labels = ["1001", "0110", "1010", "0101"];
        for (slot, label) in labels.iter().enumerate() {
            let k = FockLabel::parse(label).unwrap().basis_index();
            let diag = rho.as_array()[[k, k]].re;
            assert!((pops[slot] - diag).abs() < 1e-12);
        }
        let sum: f64 = pops.iter().sum();
        assert!(sum <= 1.0 + 1e-9);
    }

    #[test]
    fn extract_two_qubit_basis_mapping() {
        let state = extract_two_qubit(&pure("1001")).unwrap();
        // |1001> -> |01><01|
        assert!((state.matrix()[[1, 1]] - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(state.discarded_weight(), 0.0);

        // Bell combination maps linearly
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = Array1::from_elem(16, c(0.0, 0.0));
        v[FockLabel::parse("1001").unwrap().basis_index()] = c(s, 0.0);
        v[FockLabel::parse("0110").unwrap().basis_index()] = c(s, 0.0);
        let bell = extract_two_qubit(&pure_from_vec(&v)).unwrap();
        let m = bell.matrix();
        assert!((m[[1, 1]].re - 0.5).abs() < 1e-12);
        assert!((m[[2, 2]].re - 0.5).abs() < 1e-12);
        assert!((m[[1, 2]].re - 0.5).abs() < 1e-12);

        // uniform mixture over the subspace -> I/4
        let idx = two_qubit_indices();
        let mut mm = Array2::from_elem((16, 16), c(0.0, 0.0));
        for &k in &idx {
            mm[[k, k]] = c(0.25, 0.0);
        }
        let mixed = extract_two_qubit(&Operator::from_array(mm).unwrap()).unwrap();
        for r in 0..4 {
            for cc in 0..4 {
                let expect = if r == cc { 0.25 } else { 0.0 };
                assert!((mixed.matrix()[[r, cc]] - c(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn extract_two_qubit_rejects_leakage() {
        match extract_two_qubit(&pure("1100")) {
            Err(Error::SubspaceLeakage(leak, tol)) => {
                assert!(leak > 0.99);
                assert_eq!(tol, SUBSPACE_LEAK_TOL);
            }
            other => panic!("expected leakage error, got {other:?}"),
        }
    }

    fn two_qubit_pure(amplitudes: [C64; 4]) -> TwoQubitState {
        let mut m = Array2::from_elem((4, 4), c(0.0, 0.0));
        for i in 0..4 {
            for j in 0..4 {
                m[[i, j]] = amplitudes[i] * amplitudes[j].conj();
            }
        }
        TwoQubitState::new(m).unwrap()
    }

    #[test]
    fn concurrence_of_bell_and_product_states() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = two_qubit_pure([c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)]);
        assert!((concurrence(&bell) - 1.0).abs() < 1e-12);
        assert!((concurrence_r_operator(&bell).unwrap() - 1.0).abs() < 1e-8);

        let product = two_qubit_pure([c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(concurrence(&product) < 1e-12);
        assert!(concurrence_r_operator(&product).unwrap() < 1e-7);
    }

    #[test]
    fn concurrence_of_werner_state() {
        // p |Phi+><Phi+| + (1-p) I/4 at p = 1/2 has C = (3p - 1)/2 = 1/4
        let p = 0.5;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi_plus = [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        let mut m = Array2::from_elem((4, 4), c(0.0, 0.0));
        for i in 0..4 {
            for j in 0..4 {
                m[[i, j]] = phi_plus[i] * phi_plus[j].conj() * p;
            }
            m[[i, i]] += c((1.0 - p) / 4.0, 0.0);
        }
        let werner = TwoQubitState::new(m).unwrap();
        let via_product = concurrence(&werner);
        let via_r = concurrence_r_operator(&werner).unwrap();
        assert!((via_product - 0.25).abs() < 1e-10, "{via_product}");
        assert!((via_r - 0.25).abs() < 1e-10, "{via_r}");
        assert!((via_product - via_r).abs() < 1e-8);
    }

    #[test]
    fn concurrence_invariant_under_qubit_relabeling() {
        // swap |0> <-> |1> on qubit A: conjugation by X kron I
        let state = two_qubit_pure([c(0.5, 0.0), c(0.5, 0.0), c(0.35, 0.35), c(-0.2, 0.45)]);
        let x_i = kron_chain(&[pauli(Pauli::X), pauli(Pauli::Identity)])
            .unwrap()
            .into_array();
        let relabeled = TwoQubitState::new(x_i.dot(state.matrix()).dot(&x_i)).unwrap();
        assert!((concurrence(&state) - concurrence(&relabeled)).abs() < 1e-10);
    }

    #[test]
    fn linear_entropy_limits() {
        assert!(linear_entropy(&pure("1001")).abs() < 1e-12);
        let mixed = Operator::identity(4).unwrap().scale(c(0.25, 0.0));
        assert!((linear_entropy(&mixed) - 0.75).abs() < 1e-15);
        // S = 0 iff the top eigenvalue is 1
        let w = herm_eigvals(&mixed).unwrap();
        assert!((w[0] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn sudden_death_ignores_touches() {
        let dt = 0.01;
        let times: Vec<f64> = (0..2000).map(|k| k as f64 * dt).collect();
        let c_series: Vec<f64> = times.iter().map(|t| t.cos().abs()).collect();
        assert!(detect_sudden_death(&times, &c_series).is_empty());
    }

    #[test]
    fn sudden_death_finds_interval_and_rebirth() {
        let times: Vec<f64> = (0..12).map(|k| k as f64).collect();
        let mut series = vec![0.5; 12];
        for s in series.iter_mut().take(8).skip(3) {
            *s = 0.0;
        }
        // limbo value below the rebirth threshold does not end the interval
        series[8] = 5e-5;
        let deaths = detect_sudden_death(&times, &series);
        assert_eq!(
            deaths,
            vec![DeathInterval {
                death: 3.0,
                rebirth: Some(9.0)
            }]
        );
    }

    #[test]
    fn sudden_death_short_dip_is_skipped() {
        let times: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let mut series = vec![0.3; 10];
        series[4] = 0.0;
        series[5] = 0.0;
        assert!(detect_sudden_death(&times, &series).is_empty());
    }

    #[test]
    fn sudden_death_open_right_endpoint() {
        let times: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let mut series = vec![0.3; 10];
        for s in series.iter_mut().skip(6) {
            *s = 0.0;
        }
        let deaths = detect_sudden_death(&times, &series);
        assert_eq!(
            deaths,
            vec![DeathInterval {
                death: 6.0,
                rebirth: None
            }]
        );
    }

    #[test]
    fn sudden_death_multiple_intervals() {
        let times: Vec<f64> = (0..20).map(|k| k as f64).collect();
        let mut series = vec![0.4; 20];
        for s in series.iter_mut().take(6).skip(2) {
            *s = 0.0;
        }
        for s in series.iter_mut().take(15).skip(10) {
            *s = 0.0;
        }
        let deaths = detect_sudden_death(&times, &series);
        assert_eq!(deaths.len(), 2);
        assert_eq!(deaths[0].death, 2.0);
        assert_eq!(deaths[0].rebirth, Some(6.0));
        assert_eq!(deaths[1].death, 10.0);
        assert_eq!(deaths[1].rebirth, Some(15.0));
    }

    #[test]
    fn two_qubit_state_validation() {
        let not_normalized = Array2::from_diag_elem(4, c(1.0, 0.0));
        assert!(TwoQubitState::new(not_normalized).is_err());
        let fine = Array2::from_diag_elem(4, c(0.25, 0.0));
        assert!(TwoQubitState::new(fine).is_ok());
    }
}
