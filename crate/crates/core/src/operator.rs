//! Dense complex operators on registers of two-level sites, with the
//! fermionic ladder operators built from Pauli strings.
//!
//! Per-site basis ordering is `[occupied, empty]`, so the occupation
//! projector is `P+ = sigma_+ sigma_- = diag(1, 0)`. Site 1 is the leftmost
//! (slowest-varying) tensor factor; a `FockLabel` therefore maps its first
//! bit to the most significant bit of the basis index, with occupied = 0.
//!
//! The fermionic operators are Pauli strings:
//!
//! ```text
//! d_m = sigma_z^(m-1 factors) (x) sigma_-^(m) (x) I^(D-m factors)
//! S_i = I^(i-1 factors)       (x) sigma_-^(i) (x) sigma_z^(N-i factors)
//! ```
//!
//! `d_m` carries its parity string on the left and is the global ladder
//! operator; `S_i` carries it on the right and acts as the jump operator of
//! a subsystem block. Both families satisfy `{a_m, a_l^dag} = delta_ml I`.

use ndarray::{linalg::kron, Array1, Array2};
use num_complex::Complex64 as C64;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Tolerance below which a matrix is accepted as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex square matrix of dimension `2^L`, `L >= 1`.
///
/// The universal carrier for Hamiltonians, jump operators, density matrices
/// and (at dimension `4^N`) vectorized superoperators. Values are immutable
/// after construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    data: Array2<C64>,
}

impl Operator {
    /// Wrap a square matrix whose dimension is a power of two.
    pub fn from_array(data: Array2<C64>) -> Result<Self> {
        let (r, c) = data.dim();
        if r != c {
            return Err(Error::DimMismatch(r, c));
        }
        if r < 2 || !r.is_power_of_two() {
            return Err(Error::DimNotPowerOfTwo(r));
        }
        Ok(Operator { data })
    }

    /// Like [`Operator::from_array`], additionally verifying Hermiticity
    /// within [`HERMITICITY_TOL`].
    pub fn hermitian_from_array(data: Array2<C64>) -> Result<Self> {
        let op = Self::from_array(data)?;
        let defect = op.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(op)
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::from_array(Array2::from_elem((dim, dim), ZERO))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_array(Array2::from_diag_elem(dim, ONE))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// Number of two-level sites, i.e. `log2(dim)`.
    pub fn n_sites(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn as_array(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<C64> {
        self.data
    }

    /// Conjugate transpose.
    pub fn dag(&self) -> Operator {
        Operator {
            data: self.data.t().mapv(|z| z.conj()),
        }
    }

    pub fn transpose(&self) -> Operator {
        Operator {
            data: self.data.t().to_owned(),
        }
    }

    pub fn conjugate(&self) -> Operator {
        Operator {
            data: self.data.mapv(|z| z.conj()),
        }
    }

    pub fn trace(&self) -> C64 {
        self.data.diag().iter().sum()
    }

    pub fn scale(&self, c: C64) -> Operator {
        Operator {
            data: self.data.mapv(|z| z * c),
        }
    }

    /// Kronecker product, `self` as the left (coarse) factor.
    pub fn kron(&self, other: &Operator) -> Operator {
        Operator {
            data: kron(&self.data, &other.data),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim(), other.dim(), "operator dimension mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `(A + A^dag) / 2`.
    pub fn hermitian_part(&self) -> Operator {
        let half = C64::new(0.5, 0.0);
        Operator {
            data: (&self.data + &self.data.t().mapv(|z| z.conj())).mapv(|z| z * half),
        }
    }

    /// `max |A - A^dag|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[[i, j]] - self.data[[j, i]].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &Array1<C64>) -> Array1<C64> {
        assert_eq!(self.dim(), v.len(), "operator/vector dimension mismatch");
        self.data.dot(v)
    }
}

macro_rules! op_binop {
    ($trait:ident, $method:ident, $f:expr) => {
        impl $trait for &Operator {
            type Output = Operator;
            fn $method(self, rhs: &Operator) -> Operator {
                assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
                Operator {
                    data: $f(&self.data, &rhs.data),
                }
            }
        }
    };
}

op_binop!(Add, add, |a: &Array2<C64>, b: &Array2<C64>| a + b);
op_binop!(Sub, sub, |a: &Array2<C64>, b: &Array2<C64>| a - b);
op_binop!(Mul, mul, |a: &Array2<C64>, b: &Array2<C64>| a.dot(b));

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator {
            data: self.data.mapv(|z| -z),
        }
    }
}

/// `{A, B} = AB + BA`.
pub fn anticommutator(a: &Operator, b: &Operator) -> Operator {
    &(a * b) + &(b * a)
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    &(a * b) - &(b * a)
}

/// 1-based site label. Site ordering fixes the direction of the
/// Jordan-Wigner parity strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteIndex(usize);

impl SiteIndex {
    pub fn new(value: usize) -> Result<Self> {
        if value == 0 {
            return Err(Error::ZeroSiteIndex);
        }
        Ok(SiteIndex(value))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Check the index against a declared register size.
    pub fn check(self, total: usize) -> Result<Self> {
        if self.0 > total {
            return Err(Error::SiteOutOfRange {
                index: self.0,
                total,
            });
        }
        Ok(self)
    }
}

impl fmt::Display for SiteIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Occupation pattern of a register, e.g. `|1001>`; leftmost flag = site 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FockLabel {
    bits: Vec<bool>,
}

impl FockLabel {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidState("empty Fock label".into()));
        }
        Ok(FockLabel { bits })
    }

    /// Parse a bitstring such as `"1001"` (1 = occupied).
    pub fn parse(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidState(format!(
                    "invalid character '{other}' in Fock label"
                ))),
            })
            .collect::<Result<Vec<bool>>>()?;
        Self::new(bits)
    }

    pub fn n_sites(&self) -> usize {
        self.bits.len()
    }

    pub fn occupied(&self, site: SiteIndex) -> bool {
        self.bits[site.get() - 1]
    }

    /// Row index of this label in the tensor-product basis. Site 1 is the
    /// most significant bit; per-site index 0 means occupied, so the index
    /// bit is the negation of the occupation flag.
    pub fn basis_index(&self) -> usize {
        self.bits
            .iter()
            .fold(0usize, |acc, &occ| (acc << 1) | usize::from(!occ))
    }

    pub fn basis_vector(&self) -> Array1<C64> {
        let dim = 1usize << self.n_sites();
        let mut v = Array1::from_elem(dim, ZERO);
        v[self.basis_index()] = ONE;
        v
    }

    /// `|label><label|`.
    pub fn projector(&self) -> Operator {
        let dim = 1usize << self.n_sites();
        let mut m = Array2::from_elem((dim, dim), ZERO);
        let k = self.basis_index();
        m[[k, k]] = ONE;
        Operator { data: m }
    }
}

impl fmt::Display for FockLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Single-site matrices in the `[occupied, empty]` basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
    Plus,
    Minus,
    Identity,
    /// Occupation projector `P+ = sigma_+ sigma_- = diag(1, 0)`.
    PPlus,
}

/// The 2x2 matrix for a single site; `sigma_pm = (sigma_x +- i sigma_y)/2`.
pub fn pauli(which: Pauli) -> Operator {
    let i = C64::new(0.0, 1.0);
    let rows = match which {
        Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
        Pauli::Y => [[ZERO, -i], [i, ZERO]],
        Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        Pauli::Plus => [[ZERO, ONE], [ZERO, ZERO]],
        Pauli::Minus => [[ZERO, ZERO], [ONE, ZERO]],
        Pauli::Identity => [[ONE, ZERO], [ZERO, ONE]],
        Pauli::PPlus => [[ONE, ZERO], [ZERO, ZERO]],
    };
    let mut m = Array2::from_elem((2, 2), ZERO);
    for (r, row) in rows.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            m[[r, c]] = v;
        }
    }
    Operator { data: m }
}

/// Kronecker product of the factors in order; the left factor carries the
/// lowest site index.
pub fn kron_chain(factors: &[Operator]) -> Result<Operator> {
    let (first, rest) = factors.split_first().ok_or(Error::EmptyKron)?;
    let mut acc = first.clone();
    for f in rest {
        acc = acc.kron(f);
    }
    Ok(acc)
}

fn repeated(which: Pauli, count: usize, out: &mut Vec<Operator>) {
    for _ in 0..count {
        out.push(pauli(which));
    }
}

/// Fermionic annihilation operator
/// `d_m = sigma_z^(m-1) (x) sigma_- (x) I^(D-m)` on a register of `total`
/// sites.
pub fn annihilator(m: SiteIndex, total: usize) -> Result<Operator> {
    let m = m.check(total)?.get();
    let mut factors = Vec::with_capacity(total);
    repeated(Pauli::Z, m - 1, &mut factors);
    factors.push(pauli(Pauli::Minus));
    repeated(Pauli::Identity, total - m, &mut factors);
    kron_chain(&factors)
}

/// `d_m^dag`.
pub fn creator(m: SiteIndex, total: usize) -> Result<Operator> {
    Ok(annihilator(m, total)?.dag())
}

/// Subsystem jump operator
/// `S_i = I^(i-1) (x) sigma_- (x) sigma_z^(N-i)`; the right-sided parity
/// string keeps `{S_i, S_j^dag} = delta_ij I` within the block.
pub fn system_jump(i: SiteIndex, n: usize) -> Result<Operator> {
    let i = i.check(n)?.get();
    let mut factors = Vec::with_capacity(n);
    repeated(Pauli::Identity, i - 1, &mut factors);
    factors.push(pauli(Pauli::Minus));
    repeated(Pauli::Z, n - i, &mut factors);
    kron_chain(&factors)
}

/// Occupation-number operator `N_i = I^(i-1) (x) P+ (x) I^(N-i)`;
/// a Hermitian, idempotent projector onto "site i occupied".
pub fn number_op(i: SiteIndex, n: usize) -> Result<Operator> {
    let i = i.check(n)?.get();
    let mut factors = Vec::with_capacity(n);
    repeated(Pauli::Identity, i - 1, &mut factors);
    factors.push(pauli(Pauli::PPlus));
    repeated(Pauli::Identity, n - i, &mut factors);
    kron_chain(&factors)
}
