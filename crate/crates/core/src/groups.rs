//! Decoupling groups, control paths and Pauli-group sampling.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliString};

/// A finite decoupling group given as bare Pauli strings; element 0 is the identity.
/// Products close on the set up to a phase.
#[derive(Clone, Debug, PartialEq)]
pub struct DDGroup {
    name: String,
    elements: Vec<PauliString>,
    /// `table[i][j] = k` with `g_i g_j ∝ g_k`.
    table: Vec<Vec<usize>>,
}

impl DDGroup {
    /// Validates identity-first, closure and involution.
    pub fn new(name: impl Into<String>, elements: Vec<PauliString>) -> Result<Self> {
        let name = name.into();
        let first = elements.first().ok_or_else(|| Error::Parameter("empty group".into()))?;
        if !first.is_identity() {
            return Err(Error::Parameter(format!("group {name}: element 0 must be the identity")));
        }
        let n = first.n_qubits();
        let elements: Vec<PauliString> = elements.into_iter().map(|g| g.bare()).collect();
        for g in &elements {
            if g.n_qubits() != n {
                return Err(Error::Dimension { left: n, right: g.n_qubits() });
            }
        }
        let index = |p: &PauliString| elements.iter().position(|g| *g == p.bare());
        let mut table = vec![vec![0; elements.len()]; elements.len()];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                table[i][j] = index(&a.multiply(b)?).ok_or_else(|| {
                    Error::Parameter(format!("group {name} not closed: {a} · {b} not an element"))
                })?;
            }
            // Pauli strings square to the identity, so involution holds by construction.
        }
        Ok(DDGroup { name, elements, table })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.elements[0].n_qubits()
    }

    pub fn elements(&self) -> &[PauliString] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &PauliString {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &PauliString) -> Option<usize> {
        self.elements.iter().position(|g| *g == p.bare())
    }

    /// Index of `g_i g_j` (up to phase).
    pub fn product_index(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }
}

impl fmt::Display for DDGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {{", self.name)?;
        for (i, g) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "}}")
    }
}

/// A traversal order of group indices (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(Vec<usize>);

impl Path {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &i in &order {
            if i >= order.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Parameter(format!("{order:?} is not a permutation")));
            }
        }
        Ok(Path(order))
    }

    pub fn identity(len: usize) -> Self {
        Path((0..len).collect())
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn starts_with_identity(&self) -> bool {
        self.0.first() == Some(&0)
    }

    /// Parses `path=[0,1,2,3]` or a bare `[0,1,2,3]`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let t = t.strip_prefix("path=").unwrap_or(t).trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("path literal `{text}` must look like [0,1,2,3]")))?;
        let order = inner
            .split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad path entry `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        Path::new(order)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "path=[{}]", parts.join(","))
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_paths(n: usize) -> Vec<Path> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Path>) {
        if prefix.len() == used.len() {
            out.push(Path(prefix.clone()));
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EfficientKind {
    XY,
    XZ,
    ZY,
    Odd,
}

impl EfficientKind {
    pub const ALL: [EfficientKind; 4] = [EfficientKind::XY, EfficientKind::XZ, EfficientKind::ZY, EfficientKind::Odd];

    pub fn name(self) -> &'static str {
        match self {
            EfficientKind::XY => "GXY",
            EfficientKind::XZ => "GXZ",
            EfficientKind::ZY => "GZY",
            EfficientKind::Odd => "GODD",
        }
    }
}

/// Four-element group acting with perpendicular axes on odd and even sites.
///
/// Element order: `{𝟙, A_odd, A_odd B_even, B_even}` for `XY`/`XZ`/`ZY`, and
/// `{𝟙, X_odd, Y_odd, Z_odd}` for the odd-site-only group.
pub fn efficient_group(kind: EfficientKind, n: usize) -> Result<DDGroup> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::Parameter(format!("efficient groups need an even qubit count ≥ 2, got {n}")));
    }
    // Odd sites (1-based) are 0-based even indices.
    let on = |parity: usize, l: Letter| -> PauliString {
        let sites: Vec<(usize, Letter)> = (0..n).filter(|i| i % 2 == parity).map(|i| (i, l)).collect();
        PauliString::from_sites(n, &sites)
    };
    let id = PauliString::identity(n);
    let elements = match kind {
        EfficientKind::Odd => vec![id, on(0, Letter::X), on(0, Letter::Y), on(0, Letter::Z)],
        _ => {
            let (a, b) = match kind {
                EfficientKind::XY => (Letter::X, Letter::Y),
                EfficientKind::XZ => (Letter::X, Letter::Z),
                _ => (Letter::Z, Letter::Y),
            };
            let odd = on(0, a);
            let even = on(1, b);
            vec![id, odd, odd.multiply(&even)?.bare(), even]
        }
    };
    DDGroup::new(kind.name(), elements)
}

const NESTED_LETTERS: [Letter; 4] = [Letter::I, Letter::Z, Letter::X, Letter::Y];

/// Largest nesting depth accepted (4^m elements on 2m qubits).
pub const NESTED_MAX_M: usize = 6;

/// `⊗_k {𝟙, Z, X, Y}` on the even sites `2, 4, …, 2m` of an `n`-qubit chain
/// (`n = 2m` or `2m + 1`), ordered as the columns of the Gray-code matrix `M`.
pub fn nested_group_on(m: usize, n: usize) -> Result<DDGroup> {
    if m == 0 {
        return Err(Error::Parameter("nesting depth must be ≥ 1".into()));
    }
    if m > NESTED_MAX_M {
        return Err(Error::Resource(format!("nested group with m={m} has 4^{m} elements (max m={NESTED_MAX_M})")));
    }
    if n != 2 * m && n != 2 * m + 1 {
        return Err(Error::Parameter(format!("nested group of depth {m} acts on {} or {} qubits", 2 * m, 2 * m + 1)));
    }
    let elements = (0..1usize << (2 * m)).map(|j| nested_element(m, n, gray_digits(m, j))).collect();
    DDGroup::new(format!("NESTED({m})"), elements)
}

pub fn nested_group(m: usize) -> Result<DDGroup> {
    nested_group_on(m, 2 * m)
}

fn plain_digits(m: usize, j: usize) -> Vec<usize> {
    (0..m).map(|k| (j >> (2 * k)) & 3).collect()
}

/// Reflected base-4 Gray code: digit `k` (row `k+1`, least significant first) is
/// reflected whenever the next more significant plain digit is odd.
fn gray_digits(m: usize, j: usize) -> Vec<usize> {
    let d = plain_digits(m, j);
    (0..m).map(|k| if k + 1 < m && d[k + 1] % 2 == 1 { 3 - d[k] } else { d[k] }).collect()
}

fn nested_element(_m: usize, n: usize, digits: Vec<usize>) -> PauliString {
    let sites: Vec<(usize, Letter)> =
        digits.iter().enumerate().map(|(k, &d)| (2 * k + 1, NESTED_LETTERS[d])).collect();
    PauliString::from_sites(n, &sites)
}

/// Column order of `M′` (plain counting, row 1 fastest) in terms of `M` indices.
pub fn m_prime_path(m: usize) -> Result<Path> {
    let g = nested_group(m)?;
    let order = (0..1usize << (2 * m))
        .map(|j| {
            let p = nested_element(m, 2 * m, plain_digits(m, j));
            g.index_of(&p).expect("M′ column is a group element")
        })
        .collect();
    Path::new(order)
}

/// The eight-element Hadamard-type group on eight qubits.
pub fn hadamard_group_8() -> DDGroup {
    const WORDS: [&str; 8] = [
        "IIIIIIII", "IIZZYYXX", "IZYXIZYX", "IZXYYXZI", "IYIYXZXZ", "IYZXZXIY", "IXYZXIZY", "IXXIZYYZ",
    ];
    let elements = WORDS.iter().map(|w| PauliString::from_letters(w).expect("valid word")).collect();
    DDGroup::new("G8", elements).expect("G8 closes")
}

/// Uniform draw from the `4^n` bare Pauli strings (independent uniform letter per site).
pub fn sample_pauli_group_element<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PauliString {
    let mut p = PauliString::identity(n);
    for i in 0..n {
        p.set(i, Letter::ALL[rng.random_range(0..4)]);
    }
    p
}

/// `Q_r = 3^r · C(m, r)`: pulses of the nested group rotating exactly `r` qubits.
pub fn count_simultaneous_rotations(m: u32, r: u32) -> Result<u128> {
    if r > m {
        return Err(Error::Parameter(format!("r={r} outside 0..={m}")));
    }
    let mut binom: u128 = 1;
    for k in 0..r as u128 {
        binom = binom * (m as u128 - k) / (k + 1);
    }
    Ok(3u128.pow(r) * binom)
}

/// Resolves `GXY`, `GXZ`, `GZY`, `GODD`, `NESTED(m)` or `G8` on `n` qubits.
pub fn parse_group(name: &str, n: usize) -> Result<DDGroup> {
    let t = name.trim().to_ascii_uppercase();
    let kind = match t.as_str() {
        "GXY" => Some(EfficientKind::XY),
        "GXZ" => Some(EfficientKind::XZ),
        "GZY" => Some(EfficientKind::ZY),
        "GODD" => Some(EfficientKind::Odd),
        _ => None,
    };
    if let Some(k) = kind {
        return efficient_group(k, n);
    }
    if t == "G8" {
        if n != 8 {
            return Err(Error::Parameter(format!("G8 acts on 8 qubits, chain has {n}")));
        }
        return Ok(hadamard_group_8());
    }
    if let Some(inner) = t.strip_prefix("NESTED(").and_then(|s| s.strip_suffix(')')) {
        let m: usize = inner.trim().parse().map_err(|_| Error::Parse(format!("bad nesting depth in `{name}`")))?;
        return nested_group_on(m, n);
    }
    Err(Error::Parse(format!("unknown group `{name}`")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(w: &str) -> PauliString {
        PauliString::from_letters(w).unwrap()
    }

    #[test]
    fn zy_on_four() {
        let g = efficient_group(EfficientKind::ZY, 4).unwrap();
        assert_eq!(g.elements(), &[s("IIII"), s("ZIZI"), s("ZYZY"), s("IYIY")]);
    }

    #[test]
    fn xy_on_two() {
        let g = efficient_group(EfficientKind::XY, 2).unwrap();
        assert_eq!(g.elements(), &[s("II"), s("XI"), s("XY"), s("IY")]);
        assert!(efficient_group(EfficientKind::XY, 5).is_err());
    }

    #[test]
    fn nested_small() {
        let g = nested_group(1).unwrap();
        assert_eq!(g.elements(), &[s("II"), s("IZ"), s("IX"), s("IY")]);
        let g2 = nested_group(2).unwrap();
        assert_eq!(g2.len(), 16);
        assert_eq!(*g2.element(1), s("IZII"));
        // Row 1 of M: 1 Z X Y Y X Z 1 1 Z X Y Y X Z 1; row 2: 1111 ZZZZ XXXX YYYY.
        let row1: String = g2.elements().iter().map(|e| e.letter(1).as_char()).collect();
        let row2: String = g2.elements().iter().map(|e| e.letter(3).as_char()).collect();
        assert_eq!(row1, "IZXYYXZIIZXYYXZI");
        assert_eq!(row2, "IIIIZZZZXXXXYYYY");
        assert!(matches!(nested_group(7), Err(Error::Resource(_))));
    }

    #[test]
    fn m_prime() {
        let p = m_prime_path(2).unwrap();
        assert_eq!(&p.order()[..4], &[0, 1, 2, 3]);
        assert_eq!(p.order()[4], 7);
        assert_eq!(m_prime_path(1).unwrap(), Path::identity(4));
    }

    #[test]
    fn g8() {
        let g = hadamard_group_8();
        assert_eq!(*g.element(1), s("IIZZYYXX"));
        assert!(g.element(0).is_identity());
    }

    #[test]
    fn rotation_counts() {
        let total: u128 = (0..=2).map(|r| count_simultaneous_rotations(2, r).unwrap()).sum();
        assert_eq!(total, 16);
        for m in 1..6 {
            assert_eq!(count_simultaneous_rotations(m, 0).unwrap(), 1);
        }
        let best = (0..=4).max_by_key(|&r| count_simultaneous_rotations(4, r).unwrap()).unwrap();
        assert_eq!(best, 3);
        assert!(count_simultaneous_rotations(2, 3).is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20).map(|_| sample_pauli_group_element(6, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(1), draw(1));
        assert_ne!(draw(1), draw(2));
    }

    #[test]
    fn names_and_paths() {
        assert_eq!(parse_group("gzy", 4).unwrap().name(), "GZY");
        assert_eq!(parse_group("NESTED(2)", 5).unwrap().n_qubits(), 5);
        assert!(parse_group("G8", 4).is_err());
        assert!(parse_group("GQQ", 4).is_err());
        let p = Path::parse("path=[0,2,1,3]").unwrap();
        assert_eq!(p.order(), &[0, 2, 1, 3]);
        assert_eq!(Path::parse(&p.to_string()).unwrap(), p);
        assert!(Path::parse("[0,0,1,2]").is_err());
        assert_eq!(all_paths(4).len(), 24);
        assert_eq!(all_paths(3)[1].order(), &[0, 2, 1]);
    }
}
