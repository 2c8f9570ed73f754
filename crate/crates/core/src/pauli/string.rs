use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Maximum number of qubits a [`PauliString`] can address (one bit per site in a `u64`).
pub const MAX_QUBITS: usize = 64;

/// Single-site Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

/// Phase `i^k`, `k` in `0..4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u32) -> Self {
        Phase((k % 4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn to_complex(self) -> C64 {
        match self.0 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }

    pub fn conj(self) -> Self {
        Phase((4 - self.0) % 4)
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// An `n`-qubit Pauli operator `phase · σ₁ ⊗ … ⊗ σₙ`.
///
/// Letters are stored as X/Z bitmasks with site `i` (0-based) at bit `i`;
/// `Y` sets both bits. Equality and hashing include the phase, so bare
/// strings (phase `+1`) serve as map keys for [`crate::pauli::PauliSum`].
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: u8,
    x: u64,
    z: u64,
    phase: Phase,
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    /// Identity on `n` qubits.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_QUBITS, "qubit count {n} out of range");
        PauliString { n: n as u8, x: 0, z: 0, phase: Phase::ONE }
    }

    pub fn from_masks(n: usize, x: u64, z: u64) -> Self {
        assert!(n >= 1 && n <= MAX_QUBITS, "qubit count {n} out of range");
        let m = mask(n);
        PauliString { n: n as u8, x: x & m, z: z & m, phase: Phase::ONE }
    }

    /// Bare string from `(site, letter)` pairs, sites 0-based.
    pub fn from_sites(n: usize, sites: &[(usize, Letter)]) -> Self {
        let mut p = PauliString::identity(n);
        for &(i, l) in sites {
            assert!(i < n, "site {i} out of range for {n} qubits");
            p.set(i, l);
        }
        p
    }

    /// Bare string from a letter word such as `"XIZY"` (site 1 first).
    pub fn from_letters(word: &str) -> Result<Self> {
        let letters: Vec<Letter> = word
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| Letter::from_char(c).ok_or_else(|| Error::Parse(format!("bad Pauli letter `{c}`"))))
            .collect::<Result<_>>()?;
        if letters.is_empty() || letters.len() > MAX_QUBITS {
            return Err(Error::Parse(format!("word `{word}` has unsupported length")));
        }
        let mut p = PauliString::identity(letters.len());
        for (i, l) in letters.into_iter().enumerate() {
            p.set(i, l);
        }
        Ok(p)
    }

    pub fn n_qubits(&self) -> usize {
        self.n as usize
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    /// Same letters, phase `+1`.
    pub fn bare(self) -> Self {
        self.with_phase(Phase::ONE)
    }

    pub fn letter(&self, site: usize) -> Letter {
        Letter::from_bits(self.x >> site & 1 == 1, self.z >> site & 1 == 1)
    }

    pub fn set(&mut self, site: usize, letter: Letter) {
        let (bx, bz) = letter.bits();
        let b = 1u64 << site;
        self.x = if bx { self.x | b } else { self.x & !b };
        self.z = if bz { self.z | b } else { self.z & !b };
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.n_qubits()).map(move |i| self.letter(i))
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension { left: self.n_qubits(), right: other.n_qubits() });
        }
        Ok(())
    }

    /// Exact product `self · other` with accumulated phase.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        // σ(x,z) = i^{xz} X^x Z^z; moving Z^{z1} past X^{x2} costs (-1)^{z1·x2}.
        let (x1, z1, x2, z2) = (self.x, self.z, other.x, other.z);
        let x = x1 ^ x2;
        let z = z1 ^ z2;
        let k = (x1 & z1).count_ones() + (x2 & z2).count_ones() + 2 * (z1 & x2).count_ones() + 4 * 64
            - (x & z).count_ones();
        PauliString {
            n: self.n,
            x,
            z,
            phase: self.phase * other.phase * Phase::from_exponent(k),
        }
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Hermitian adjoint: letters unchanged, phase conjugated.
    pub fn adjoint(&self) -> Self {
        self.with_phase(self.phase.conj())
    }

    /// Site-wise tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let n = self.n_qubits() + other.n_qubits();
        assert!(n <= MAX_QUBITS);
        let s = self.n_qubits();
        PauliString {
            n: n as u8,
            x: self.x | other.x << s,
            z: self.z | other.z << s,
            phase: self.phase * other.phase,
        }
    }

    /// Masks in dense-basis bit order: site 0 is the most significant bit of a basis index.
    pub fn dense_masks(&self) -> (usize, usize) {
        let n = self.n_qubits();
        let rev = |m: u64| -> usize { (m.reverse_bits() >> (64 - n)) as usize };
        (rev(self.x), rev(self.z))
    }

    /// Column action on the computational basis: `P|b⟩ = amp · |target⟩`.
    pub fn act_on_basis(&self, b: usize) -> (usize, C64) {
        let (xm, zm) = self.dense_masks();
        let k = self.phase.exponent() as u32 + (self.x & self.z).count_ones() + 2 * (b & zm).count_ones();
        (b ^ xm, Phase::from_exponent(k).to_complex())
    }

    /// Position key used for display ordering (site 1 first, I < X < Y < Z).
    fn order_key(&self) -> impl Iterator<Item = Letter> + '_ {
        self.letters()
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.order_key().cmp(other.order_key()))
            .then_with(|| self.phase.cmp(&other.phase))
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Sparse display: `"Y1 X2 Z3"`, `"I"` for the identity; non-trivial phases prefixed.
impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase.exponent() {
            1 => write!(f, "i·")?,
            2 => write!(f, "-")?,
            3 => write!(f, "-i·")?,
            _ => {}
        }
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for (i, l) in self.letters().enumerate() {
            if l != Letter::I {
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{}{}", l.as_char(), i + 1)?;
                first = false;
            }
        }
        Ok(())
    }
}

impl PauliString {
    /// Parses the sparse display form (`"Y1 X2 Z3"` or `"I"`) of a bare string.
    pub fn parse_sparse(n: usize, text: &str) -> Result<Self> {
        let mut p = PauliString::identity(n);
        let text = text.trim();
        if text == "I" {
            return Ok(p);
        }
        for tok in text.split_whitespace() {
            let mut chars = tok.chars();
            let l = chars
                .next()
                .and_then(Letter::from_char)
                .ok_or_else(|| Error::Parse(format!("bad Pauli token `{tok}`")))?;
            let site: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::Parse(format!("bad site index in `{tok}`")))?;
            if site == 0 || site > n {
                return Err(Error::Parse(format!("site {site} out of range 1..={n}")));
            }
            if p.letter(site - 1) != Letter::I {
                return Err(Error::Parse(format!("site {site} repeated in `{text}`")));
            }
            p.set(site - 1, l);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(w: &str) -> PauliString {
        PauliString::from_letters(w).unwrap()
    }

    #[test]
    fn single_qubit_products() {
        assert_eq!(s("X").multiply(&s("Y")).unwrap(), s("Z").with_phase(Phase::I));
        assert_eq!(s("Y").multiply(&s("X")).unwrap(), s("Z").with_phase(Phase::MINUS_I));
        assert_eq!(s("Z").multiply(&s("Z")).unwrap(), s("I"));
        assert_eq!(s("Y").multiply(&s("Z")).unwrap(), s("X").with_phase(Phase::I));
        assert_eq!(s("Z").multiply(&s("X")).unwrap(), s("Y").with_phase(Phase::I));
    }

    #[test]
    fn disjoint_supports_commute() {
        let p = s("XI").multiply(&s("IY")).unwrap();
        assert_eq!(p, s("XY"));
        assert!(s("XI").commutes_with(&s("IY")));
    }

    #[test]
    fn size_mismatch_is_dimension_error() {
        assert!(matches!(s("X").multiply(&s("XX")), Err(Error::Dimension { .. })));
    }

    #[test]
    fn sparse_display_round_trip() {
        let p = s("YXZI");
        assert_eq!(p.to_string(), "Y1 X2 Z3");
        assert_eq!(PauliString::parse_sparse(4, "Y1 X2 Z3").unwrap(), p);
        assert_eq!(PauliString::parse_sparse(4, "I").unwrap(), PauliString::identity(4));
        assert!(PauliString::parse_sparse(2, "X3").is_err());
    }

    #[test]
    fn basis_action_matches_letters() {
        // Y|0> = i|1>, Y|1> = -i|0>
        let y = s("Y");
        assert_eq!(y.act_on_basis(0), (1, C64::new(0.0, 1.0)));
        assert_eq!(y.act_on_basis(1), (0, C64::new(0.0, -1.0)));
        // site 1 is the most significant bit
        let xi = s("XI");
        assert_eq!(xi.act_on_basis(0b00).0, 0b10);
    }
}
