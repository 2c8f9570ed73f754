use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use faer::Mat;
use num_complex::Complex64 as C64;

use super::string::PauliString;
use crate::error::{Error, Result};

/// Coefficients at or below this magnitude are dropped.
pub const PRUNE_TOL: f64 = 1e-12;

/// Default cap on the qubit count for dense conversion.
pub const DEFAULT_DENSE_CAP: usize = 12;

/// A complex-weighted sum of bare Pauli strings on a fixed number of qubits.
#[derive(Clone, PartialEq, Default)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<PauliString, C64>,
}

impl std::fmt::Debug for PauliSum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut m = f.debug_map();
        for (k, v) in &self.terms {
            m.entry(&k.to_string(), v);
        }
        m.finish()
    }
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        PauliSum { n, terms: BTreeMap::new() }
    }

    /// Single term `coeff · p`; the phase of `p` is folded into the coefficient.
    pub fn from_string(p: PauliString, coeff: C64) -> Self {
        let mut s = PauliSum::zero(p.n_qubits());
        s.add_term(p, coeff);
        s
    }

    pub fn from_real(p: PauliString, coeff: f64) -> Self {
        Self::from_string(p, C64::new(coeff, 0.0))
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, &C64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, p: &PauliString) -> C64 {
        self.terms.get(&p.bare()).copied().unwrap_or_default()
    }

    /// Adds `coeff · p` in place; prunes the entry if it cancels.
    pub fn add_term(&mut self, p: PauliString, coeff: C64) {
        assert_eq!(p.n_qubits(), self.n, "term size mismatch");
        let c = coeff * p.phase().to_complex();
        let key = p.bare();
        let e = self.terms.entry(key).or_default();
        *e += c;
        if e.norm() <= PRUNE_TOL {
            self.terms.remove(&key);
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = PauliSum::zero(self.n);
        for (k, v) in &self.terms {
            out.add_term(*k, v * c);
        }
        out
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(*k, *v);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = PauliSum::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.mul_unchecked(b), ca * cb);
            }
        }
        Ok(out)
    }

    /// `[a, b] = ab − ba`; only anticommuting pairs contribute `2·ab`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = PauliSum::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if !a.commutes_with(b) {
                    out.add_term(a.mul_unchecked(b), ca * cb * 2.0);
                }
            }
        }
        Ok(out)
    }

    /// `g† h g`: every term anticommuting with `g` flips sign.
    pub fn conjugate(&self, g: &PauliString) -> Result<Self> {
        if g.n_qubits() != self.n {
            return Err(Error::Dimension { left: self.n, right: g.n_qubits() });
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, v)| (*k, if k.commutes_with(g) { *v } else { -*v }))
            .collect();
        Ok(PauliSum { n: self.n, terms })
    }

    /// True iff every coefficient magnitude is at most `tol`.
    pub fn equals_zero(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.norm() <= tol)
    }

    /// Largest coefficient magnitude (0 for the empty sum).
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Drops terms with magnitude `<= tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        PauliSum {
            n: self.n,
            terms: self.terms.iter().filter(|(_, c)| c.norm() > tol).map(|(k, v)| (*k, *v)).collect(),
        }
    }

    /// Sum restricted to terms accepted by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&PauliString) -> bool) -> Self {
        PauliSum {
            n: self.n,
            terms: self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (*k, *v)).collect(),
        }
    }

    /// Coefficient-wise distance `max_k |a_k − b_k|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok((self - other)?.max_abs())
    }

    /// Dense `2^N × 2^N` matrix, site 1 the most significant tensor factor.
    pub fn to_matrix(&self) -> Result<Mat<C64>> {
        self.to_matrix_capped(DEFAULT_DENSE_CAP)
    }

    pub fn to_matrix_capped(&self, cap: usize) -> Result<Mat<C64>> {
        if self.n > cap {
            return Err(Error::Resource(format!("{} qubits exceeds dense cap of {cap}", self.n)));
        }
        let d = 1usize << self.n;
        let mut m = Mat::<C64>::zeros(d, d);
        for (p, c) in &self.terms {
            for b in 0..d {
                let (row, amp) = p.act_on_basis(b);
                m[(row, b)] += c * amp;
            }
        }
        Ok(m)
    }
}

impl<'a> Add<&'a PauliSum> for &'a PauliSum {
    type Output = Result<PauliSum>;
    fn add(self, rhs: &'a PauliSum) -> Result<PauliSum> {
        self.try_add(rhs)
    }
}

impl<'a> Sub<&'a PauliSum> for &'a PauliSum {
    type Output = Result<PauliSum>;
    fn sub(self, rhs: &'a PauliSum) -> Result<PauliSum> {
        self.try_add(&-rhs)
    }
}

impl<'a> Mul<&'a PauliSum> for &'a PauliSum {
    type Output = Result<PauliSum>;
    fn mul(self, rhs: &'a PauliSum) -> Result<PauliSum> {
        self.try_mul(rhs)
    }
}

impl Neg for &PauliSum {
    type Output = PauliSum;
    fn neg(self) -> PauliSum {
        self.scale_real(-1.0)
    }
}

/// Panics on a size mismatch; intended for accumulating sums built on one chain.
impl AddAssign<&PauliSum> for PauliSum {
    fn add_assign(&mut self, rhs: &PauliSum) {
        assert_eq!(self.n, rhs.n, "term size mismatch");
        for (k, v) in &rhs.terms {
            self.add_term(*k, *v);
        }
    }
}

impl FromIterator<(PauliString, C64)> for PauliSum {
    /// Panics on an empty iterator (the qubit count is taken from the first term).
    fn from_iter<I: IntoIterator<Item = (PauliString, C64)>>(iter: I) -> Self {
        let mut it = iter.into_iter().peekable();
        let n = it.peek().expect("empty term list").0.n_qubits();
        let mut s = PauliSum::zero(n);
        for (p, c) in it {
            s.add_term(p, c);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString as P;

    fn ps(w: &str, c: f64) -> PauliSum {
        PauliSum::from_real(P::from_letters(w).unwrap(), c)
    }

    #[test]
    fn commutator_z_x_is_2iy() {
        let c = ps("Z", 1.0).commutator(&ps("X", 1.0)).unwrap();
        assert_eq!(c, PauliSum::from_string(P::from_letters("Y").unwrap(), C64::new(0.0, 2.0)));
    }

    #[test]
    fn self_commutator_vanishes() {
        let a = (&ps("XY", 0.3) + &ps("ZZ", -1.2)).unwrap();
        assert!(a.commutator(&a).unwrap().is_empty());
    }

    #[test]
    fn even_overlap_commutes() {
        assert!(ps("XX", 1.0).commutator(&ps("ZZ", 1.0)).unwrap().is_empty());
    }

    #[test]
    fn conjugation_rules() {
        let z = ps("Z", 1.0);
        assert_eq!(z.conjugate(&P::from_letters("X").unwrap()).unwrap(), ps("Z", -1.0));
        let h = ps("XXII", 1.0);
        let g = P::from_letters("IYIY").unwrap();
        assert_eq!(h.conjugate(&g).unwrap(), ps("XXII", -1.0));
        assert_eq!(h.conjugate(&P::identity(4)).unwrap(), h);
    }

    #[test]
    fn equals_zero_tolerance() {
        assert!(!ps("Z", 1e-9).equals_zero(1e-12));
        assert!(PauliSum::zero(3).equals_zero(1e-12));
        assert!(ps("Z", 1e-9).equals_zero(1e-8));
    }

    #[test]
    fn dense_conversion() {
        let z = ps("Z", 1.0).to_matrix().unwrap();
        assert_eq!(z[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(z[(1, 1)], C64::new(-1.0, 0.0));
        assert_eq!(z[(0, 1)], C64::new(0.0, 0.0));
        let empty = PauliSum::zero(2).to_matrix().unwrap();
        assert!(empty.col_iter().all(|c| c.iter().all(|x| x.norm() == 0.0)));
        assert!(matches!(PauliSum::zero(13).to_matrix(), Err(Error::Resource(_))));
    }

    #[test]
    fn mismatched_sizes_error() {
        assert!(ps("Z", 1.0).commutator(&ps("ZZ", 1.0)).is_err());
        assert!(ps("Z", 1.0).conjugate(&P::identity(2)).is_err());
    }
}
