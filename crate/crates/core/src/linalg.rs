//! Eigendecomposition, principal square root, and matrix exponential for
//! the dense operators used throughout the crate. Backed by LAPACK via
//! `ndarray-linalg`; the exponential is scaling-and-squaring with Pade
//! approximants (Higham 2005).

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, Inverse, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator::{Operator, HERMITICITY_TOL};

/// Eigenvalues of a nominally positive-semidefinite matrix are clipped to
/// zero down to this bound; anything below it is an error.
pub const PSD_EIG_TOL: f64 = 1e-9;

/// Eigendecomposition of a Hermitian operator, eigenvalues sorted in
/// descending order with the eigenvector columns reordered to match.
/// Satisfies `A = U diag(w) U^dag`.
pub fn herm_eig(a: &Operator) -> Result<(Vec<f64>, Operator)> {
    let defect = a.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let (w, v) = a.as_array().eigh(UPLO::Lower)?;
    // LAPACK returns ascending order
    let n = w.len();
    let mut w_desc = Vec::with_capacity(n);
    let mut u = Array2::from_elem((n, n), C64::new(0.0, 0.0));
    for k in 0..n {
        let src = n - 1 - k;
        w_desc.push(w[src]);
        u.column_mut(k).assign(&v.column(src));
    }
    Ok((w_desc, Operator::from_array(u)?))
}

/// Eigenvalues only, descending.
pub fn herm_eigvals(a: &Operator) -> Result<Vec<f64>> {
    let defect = a.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let (w, _) = a.as_array().eigh(UPLO::Lower)?;
    let mut vals: Vec<f64> = w.to_vec();
    vals.reverse();
    Ok(vals)
}

/// Principal square root of a positive-semidefinite Hermitian operator.
/// Eigenvalues in `[-PSD_EIG_TOL, 0)` are clipped to zero; smaller ones are
/// rejected.
pub fn matrix_sqrt_psd(a: &Operator) -> Result<Operator> {
    let (w, u) = herm_eig(a)?;
    if let Some(&bad) = w.iter().find(|&&x| x < -PSD_EIG_TOL) {
        return Err(Error::NotPositiveSemidefinite(bad));
    }
    let roots: Vec<C64> = w
        .iter()
        .map(|&x| C64::new(x.max(0.0).sqrt(), 0.0))
        .collect();
    Ok(reconstruct(&roots, &u))
}

/// `U diag(vals) U^dag`.
fn reconstruct(vals: &[C64], u: &Operator) -> Operator {
    let mut scaled = u.as_array().clone();
    for (k, &v) in vals.iter().enumerate() {
        scaled.column_mut(k).mapv_inplace(|z| z * v);
    }
    let m = scaled.dot(&u.as_array().t().mapv(|z| z.conj()));
    Operator::from_array(m).expect("square power-of-two preserved")
}

/// `exp(scale * A)` for an arbitrary complex square matrix.
pub fn matrix_exp(a: &Operator, scale: C64) -> Result<Operator> {
    let scaled = a.as_array().mapv(|z| z * scale);
    Operator::from_array(expm(&scaled)?)
}

/// Maximum absolute column sum.
pub fn one_norm(m: &Array2<C64>) -> f64 {
    let mut worst = 0.0f64;
    for col in m.columns() {
        let s: f64 = col.iter().map(|z| z.norm()).sum();
        worst = worst.max(s);
    }
    worst
}

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068;
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120., 60., 12., 1.];
const B5: [f64; 6] = [30240., 15120., 3360., 420., 30., 1.];
const B7: [f64; 8] = [17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.];
const B9: [f64; 10] = [
    17643225600.,
    8821612800.,
    2075673600.,
    302702400.,
    30270240.,
    2162160.,
    110880.,
    3960.,
    90.,
    1.,
];
const B13: [f64; 14] = [
    64764752532480000.,
    32382376266240000.,
    7771770303897600.,
    1187353796428800.,
    129060195264000.,
    10559470521600.,
    670442572800.,
    33522128640.,
    1323241920.,
    40840800.,
    960960.,
    16380.,
    182.,
    1.,
];

fn eye(n: usize) -> Array2<C64> {
    Array2::from_diag(&Array1::from_elem(n, C64::new(1.0, 0.0)))
}

/// Scaling-and-squaring Pade matrix exponential.
pub(crate) fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    let norm = one_norm(a);
    if norm == 0.0 {
        return Ok(eye(n));
    }

    // even powers shared by all orders
    let a2 = a.dot(a);
    let (u, v, squarings) = if norm <= THETA_3 {
        let (u, v) = pade_low(a, &a2, None, None, &B3);
        (u, v, 0)
    } else if norm <= THETA_5 {
        let a4 = a2.dot(&a2);
        let (u, v) = pade_low(a, &a2, Some(&a4), None, &B5);
        (u, v, 0)
    } else if norm <= THETA_7 || norm <= THETA_9 {
        let a4 = a2.dot(&a2);
        let a6 = a4.dot(&a2);
        let b: &[f64] = if norm <= THETA_7 { &B7 } else { &B9 };
        let (u, v) = pade_low(a, &a2, Some(&a4), Some(&a6), b);
        (u, v, 0)
    } else {
        let s = ((norm / THETA_13).log2().ceil() as i32).max(0);
        let scale = C64::new((2.0f64).powi(-s), 0.0);
        let a_s = a.mapv(|z| z * scale);
        let a2s = a_s.dot(&a_s);
        let a4s = a2s.dot(&a2s);
        let a6s = a4s.dot(&a2s);
        let (u, v) = pade13(&a_s, &a2s, &a4s, &a6s);
        (u, v, s)
    };

    let numer = &v + &u;
    let denom = &v - &u;
    let mut r = denom.inv()?.dot(&numer);
    for _ in 0..squarings {
        r = r.dot(&r);
    }
    Ok(r)
}

/// Pade orders 3-9: U = A * (odd-coefficient polynomial in A^2),
/// V = even-coefficient polynomial in A^2.
fn pade_low(
    a: &Array2<C64>,
    a2: &Array2<C64>,
    a4: Option<&Array2<C64>>,
    a6: Option<&Array2<C64>>,
    b: &[f64],
) -> (Array2<C64>, Array2<C64>) {
    let n = a.nrows();
    let id = eye(n);
    let powers: [Option<&Array2<C64>>; 4] = [Some(&id), Some(a2), a4, a6];
    let mut odd = Array2::from_elem((n, n), C64::new(0.0, 0.0));
    let mut even = odd.clone();
    for (k, p) in powers.iter().enumerate() {
        if let Some(p) = p {
            if 2 * k + 1 < b.len() {
                odd = odd + p.mapv(|z| z * b[2 * k + 1]);
            }
            if 2 * k < b.len() {
                even = even + p.mapv(|z| z * b[2 * k]);
            }
        }
    }
    // order 9 needs A^8 * b9 and A^8 * b8; reuse a4^2 lazily
    if b.len() == 10 {
        let a8 = a4.unwrap().dot(a4.unwrap());
        odd = odd + a8.mapv(|z| z * b[9]);
        even = even + a8.mapv(|z| z * b[8]);
    }
    (a.dot(&odd), even)
}

fn pade13(
    a: &Array2<C64>,
    a2: &Array2<C64>,
    a4: &Array2<C64>,
    a6: &Array2<C64>,
) -> (Array2<C64>, Array2<C64>) {
    let n = a.nrows();
    let id = eye(n);
    let b = &B13;
    let u_high = a6.dot(
        &(a6.mapv(|z| z * b[13]) + a4.mapv(|z| z * b[11]) + a2.mapv(|z| z * b[9])),
    );
    let u_low = a6.mapv(|z| z * b[7])
        + a4.mapv(|z| z * b[5])
        + a2.mapv(|z| z * b[3])
        + id.mapv(|z| z * b[1]);
    let u = a.dot(&(u_high + u_low));
    let v_high = a6.dot(
        &(a6.mapv(|z| z * b[12]) + a4.mapv(|z| z * b[10]) + a2.mapv(|z| z * b[8])),
    );
    let v = v_high
        + a6.mapv(|z| z * b[6])
        + a4.mapv(|z| z * b[4])
        + a2.mapv(|z| z * b[2])
        + id.mapv(|z| z * b[0]);
    (u, v)
}
