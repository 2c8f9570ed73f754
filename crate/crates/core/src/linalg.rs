//! Thin dense helpers over `faer` used by the engine and the AHT oracle.

use faer::linalg::matmul::matmul;
use faer::traits::Conjugate;
use faer::{Accum, Mat, MatRef, Par, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

pub type CMat = Mat<C64>;

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn identity(d: usize) -> CMat {
    Mat::from_fn(d, d, |i, j| if i == j { ONE } else { C64::default() })
}

pub fn adjoint(m: MatRef<'_, C64>) -> CMat {
    m.adjoint().to_owned()
}

/// `a · b`, single-threaded (parallelism lives at the realization level).
pub fn mul<A, B>(a: MatRef<'_, A>, b: MatRef<'_, B>) -> CMat
where
    A: Conjugate<Canonical = C64>,
    B: Conjugate<Canonical = C64>,
{
    let mut c = Mat::zeros(a.nrows(), b.ncols());
    matmul(c.as_mut(), Accum::Replace, a, b, ONE, Par::Seq);
    c
}

/// `c ← a · b` reusing `c`'s storage.
pub fn mul_into<A, B>(c: &mut CMat, a: MatRef<'_, A>, b: MatRef<'_, B>)
where
    A: Conjugate<Canonical = C64>,
    B: Conjugate<Canonical = C64>,
{
    matmul(c.as_mut(), Accum::Replace, a, b, ONE, Par::Seq);
}

pub fn trace(m: MatRef<'_, C64>) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

pub fn max_abs_diff(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

pub fn is_hermitian(m: MatRef<'_, C64>, tol: f64) -> bool {
    m.nrows() == m.ncols()
        && (0..m.nrows()).all(|i| (0..=i).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol))
}

/// `max |U†U − 𝟙|`.
pub fn unitarity_error(u: MatRef<'_, C64>) -> f64 {
    let g = mul(u.adjoint(), u);
    max_abs_diff(g.as_ref(), identity(u.nrows()).as_ref())
}

/// `(M + M†)/2`.
pub fn hermitian_part(m: MatRef<'_, C64>) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eig(h: MatRef<'_, C64>) -> Result<(Vec<f64>, CMat)> {
    let evd = h.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Linalg(format!("{e:?}")))?;
    let s = evd.S().column_vector().iter().map(|x| x.re).collect();
    Ok((s, evd.U().to_owned()))
}

pub fn hermitian_eigenvalues(h: MatRef<'_, C64>) -> Result<Vec<f64>> {
    let v = h.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Linalg(format!("{e:?}")))?;
    Ok(v)
}

/// `V · diag(f(λ)) · V†`.
pub fn spectral_map(vals: &[f64], vecs: MatRef<'_, C64>, f: impl Fn(f64) -> C64) -> CMat {
    let d = vecs.nrows();
    let fv: Vec<C64> = vals.iter().map(|&x| f(x)).collect();
    let scaled = Mat::from_fn(d, d, |i, j| vecs[(i, j)] * fv[j]);
    mul(scaled.as_ref(), vecs.adjoint())
}

/// Operator 2-norm (largest singular value).
pub fn op_norm(m: MatRef<'_, C64>) -> Result<f64> {
    let s = m.singular_values().map_err(|e| Error::Linalg(format!("{e:?}")))?;
    Ok(s.first().copied().unwrap_or(0.0))
}

/// `P† M P` for a Pauli string `P`, as a signed permutation of entries.
pub fn pauli_conjugate(m: MatRef<'_, C64>, p: &PauliString) -> CMat {
    let (xm, zm) = p.dense_masks();
    let sign = |a: usize| if (a & zm).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
    Mat::from_fn(m.nrows(), m.ncols(), |a, b| m[(a ^ xm, b ^ xm)] * (sign(a) * sign(b)))
}

/// `P · M` (row permutation with phases).
pub fn pauli_left_mul(p: &PauliString, m: MatRef<'_, C64>) -> CMat {
    let d = m.nrows();
    let mut out = Mat::zeros(d, m.ncols());
    for r in 0..d {
        let (target, amp) = p.act_on_basis(r);
        for c in 0..m.ncols() {
            out[(target, c)] = amp * m[(r, c)];
        }
    }
    out
}

/// Dense matrix of a single Pauli string (including its phase).
pub fn pauli_matrix(p: &PauliString) -> CMat {
    pauli_left_mul(p, identity(1 << p.n_qubits()).as_ref())
}
