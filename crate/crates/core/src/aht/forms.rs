//! Closed-form Magnus terms for the efficient four-element groups on a
//! nearest-neighbour chain `Σ δ_i Z_i/2 + J Σ (X_iX_{i+1} + Y_iY_{i+1} + α Z_iZ_{i+1})`.
//!
//! Site indices in this file are 1-based, matching the usual chain notation.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::groups::Path;
use crate::pauli::{Letter, PauliString, PauliSum};

#[derive(Clone, Debug, PartialEq)]
pub struct FormParams {
    pub n: usize,
    pub j: f64,
    pub alpha: f64,
    pub dt: f64,
    /// One-body offsets `δ_i`; empty means all zero.
    pub deltas: Vec<f64>,
}

impl FormParams {
    pub fn new(n: usize, j: f64, alpha: f64, dt: f64) -> Self {
        FormParams { n, j, alpha, dt, deltas: Vec::new() }
    }

    pub fn with_deltas(mut self, deltas: Vec<f64>) -> Self {
        self.deltas = deltas;
        self
    }

    /// `δ_i` for a 1-based site; zero outside the chain.
    fn d(&self, i: usize) -> f64 {
        if i == 0 || i > self.n {
            0.0
        } else {
            self.deltas.get(i - 1).copied().unwrap_or(0.0)
        }
    }
}

/// The three symmetrized protocols with closed second-order forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol2 {
    Sdd,
    Pcdd2,
    Pscpd2,
}

/// The two control paths of `G_XY` used for the one-body analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XyPath {
    /// `{𝟙, X₁Y₂…, X₁X₃…, Y₂Y₄…}`.
    Path1,
    /// `{𝟙, X₁X₃…, X₁Y₂…, Y₂Y₄…}`.
    Path2,
}

impl XyPath {
    /// As an order over the `G_XY` elements `[𝟙, X_odd, X_odd·Y_even, Y_even]`.
    pub fn path(self) -> Path {
        match self {
            XyPath::Path1 => Path::new(vec![0, 2, 1, 3]).expect("static"),
            XyPath::Path2 => Path::new(vec![0, 1, 2, 3]).expect("static"),
        }
    }
}

/// Accumulates real-coefficient terms on 1-based sites.
struct Builder {
    n: usize,
    sum: PauliSum,
}

impl Builder {
    fn new(n: usize) -> Self {
        Builder { n, sum: PauliSum::zero(n) }
    }

    /// Adds `c · Π σ` when every site is inside the chain.
    fn add(&mut self, c: f64, sites: &[(usize, char)]) {
        if sites.iter().any(|&(s, _)| s == 0 || s > self.n) {
            return;
        }
        let letters: Vec<(usize, Letter)> =
            sites.iter().map(|&(s, l)| (s - 1, Letter::from_char(l).expect("static letter"))).collect();
        self.sum.add_term(PauliString::from_sites(self.n, &letters), C64::new(c, 0.0));
    }

    fn finish(self) -> PauliSum {
        self.sum
    }
}

fn check(p: &FormParams) -> Result<()> {
    if p.n < 4 || p.n % 2 != 0 {
        return Err(Error::Parameter(format!("closed forms need an even chain of ≥ 4 sites, got {}", p.n)));
    }
    if !p.deltas.is_empty() && p.deltas.len() != p.n {
        return Err(Error::Parameter(format!("{} offsets for {} sites", p.deltas.len(), p.n)));
    }
    Ok(())
}

/// Three-body sum `c·Σ_{i=1}^{N−2} (a_i b_{i+1} c_{i+2} + c_i b_{i+1} a_{i+2})`.
fn three_body(b: &mut Builder, c: f64, outer: char, middle: char, other: char) {
    for i in 1..=b.n - 2 {
        b.add(c, &[(i, outer), (i + 1, middle), (i + 2, other)]);
        b.add(c, &[(i, other), (i + 1, middle), (i + 2, outer)]);
    }
}

/// First-order PDD results: the axis is the letter of the middle operator.
/// `'x'`: `±J²αΔt Σ(YXZ + ZXY)`, `'y'`: `±J²αΔt Σ(XYZ + ZYX)`, `'z'`: `±J²Δt Σ(XZY + YZX)`.
pub fn h1_pdd(axis: char, sign: f64, p: &FormParams) -> Result<PauliSum> {
    check(p)?;
    let mut b = Builder::new(p.n);
    let j2 = p.j * p.j * p.dt * sign;
    match axis {
        'x' => three_body(&mut b, j2 * p.alpha, 'Y', 'X', 'Z'),
        'y' => three_body(&mut b, j2 * p.alpha, 'X', 'Y', 'Z'),
        'z' => three_body(&mut b, j2, 'X', 'Z', 'Y'),
        _ => return Err(Error::Parameter(format!("unknown axis `{axis}`"))),
    }
    Ok(b.finish())
}

/// All six first-order PDD forms, labelled e.g. `+x`, `-z`.
pub fn h1_pdd_family(p: &FormParams) -> Result<Vec<(String, PauliSum)>> {
    let mut out = Vec::new();
    for axis in ['x', 'y', 'z'] {
        for sign in [1.0, -1.0] {
            let tag = format!("{}{axis}", if sign > 0.0 { '+' } else { '-' });
            out.push((tag, h1_pdd(axis, sign, p)?));
        }
    }
    Ok(out)
}

/// First-order PDD term with one-body offsets for a path flipping the Ising
/// term every slot:
/// `∓JΔt[Σ_odd (δ_i+δ_{i+1})/2·Y_iX_{i+1} + Σ_even (δ_i+δ_{i+1})/2·X_iY_{i+1}] ± J²Δt Σ(XZY + YZX)`.
pub fn h1_zeeman(sign: f64, p: &FormParams) -> Result<PauliSum> {
    check(p)?;
    let mut b = Builder::new(p.n);
    for i in 1..p.n {
        let c = -sign * p.j * p.dt * (p.d(i) + p.d(i + 1)) / 2.0;
        if i % 2 == 1 {
            b.add(c, &[(i, 'Y'), (i + 1, 'X')]);
        } else {
            b.add(c, &[(i, 'X'), (i + 1, 'Y')]);
        }
    }
    three_body(&mut b, sign * p.j * p.j * p.dt, 'X', 'Z', 'Y');
    Ok(b.finish())
}

/// `D_z = (2/3)Σ(X_iX_{i+2} + Y_iY_{i+2} − 2Z_iZ_{i+2})`, `D_x` with `x ↔ z`.
fn d_term(b: &mut Builder, c: f64, axis: char) {
    let (p, q, r) = if axis == 'z' { ('X', 'Y', 'Z') } else { ('Y', 'Z', 'X') };
    for i in 1..=b.n - 2 {
        b.add(c * 2.0 / 3.0, &[(i, p), (i + 2, p)]);
        b.add(c * 2.0 / 3.0, &[(i, q), (i + 2, q)]);
        b.add(-c * 4.0 / 3.0, &[(i, r), (i + 2, r)]);
    }
}

/// `Q_z = (1/3)Σ[X_iX_{i+2}(2Y_{i+1}Y_{i+3} − Z_{i+1}Z_{i+3}) + Y_iY_{i+2}(2X_{i+1}X_{i+3} − Z_{i+1}Z_{i+3})
/// − Z_iZ_{i+2}(X_{i+1}X_{i+3} + Y_{i+1}Y_{i+3})]`; `Q_x` is the image under `X → Y → Z → X`
/// relabelled as in its definition.
fn q_term(b: &mut Builder, c: f64, axis: char) {
    // (outer pair, inner pair, weight)
    let table: [(char, char, f64); 6] = if axis == 'z' {
        [('X', 'Y', 2.0), ('X', 'Z', -1.0), ('Y', 'X', 2.0), ('Y', 'Z', -1.0), ('Z', 'X', -1.0), ('Z', 'Y', -1.0)]
    } else {
        [('Y', 'Z', 2.0), ('Y', 'X', -1.0), ('Z', 'Y', 2.0), ('Z', 'X', -1.0), ('X', 'Y', -1.0), ('X', 'Z', -1.0)]
    };
    for i in 1..=b.n - 3 {
        for &(o, m, w) in &table {
            b.add(c * w / 3.0, &[(i, o), (i + 1, m), (i + 2, o), (i + 3, m)]);
        }
    }
}

/// `Y₁Y₂ + Y_{N−1}Y_N + 2Σ_{i=2}^{N−2} Y_iY_{i+1}`.
fn yy_chain(b: &mut Builder, c: f64) {
    for i in 1..b.n {
        let w = if i == 1 || i == b.n - 1 { 1.0 } else { 2.0 };
        b.add(c * w, &[(i, 'Y'), (i + 1, 'Y')]);
    }
}

/// `L_a` and `L_b`: three-body one-body-offset terms.
fn l_term(b: &mut Builder, c: f64, which: char, p: &FormParams) {
    let d = |i| p.d(i);
    for i in 1..=p.n - 2 {
        let l = if i % 2 == 1 { 'Y' } else { 'X' };
        let (c1, c2) = match (which, i % 2 == 1) {
            ('a', _) => (d(i) - d(i + 1), -(d(i + 1) - d(i + 2))),
            (_, true) => (-(2.0 * d(i) + d(i + 1)), -(d(i + 1) + 2.0 * d(i + 2))),
            (_, false) => (d(i) + 2.0 * d(i + 1), 2.0 * d(i + 1) + d(i + 2)),
        };
        b.add(c * c1, &[(i, l), (i + 1, l), (i + 2, 'Z')]);
        b.add(c * c2, &[(i, 'Z'), (i + 1, l), (i + 2, l)]);
    }
}

/// Second-order closed forms for `G_XY`, with one-body offsets as given in `p`.
pub fn appendix_forms(path: XyPath, proto: Protocol2, p: &FormParams) -> Result<PauliSum> {
    check(p)?;
    let (j, al, dt) = (p.j, p.alpha, p.dt);
    let a = j * j * dt * dt * al;
    let mut b = Builder::new(p.n);
    match (path, proto) {
        (XyPath::Path1, Protocol2::Sdd) => {
            l_term(&mut b, -a / 3.0, 'a', p);
            d_term(&mut b, -2.0 * j * a, 'z');
            q_term(&mut b, -2.0 * j * a, 'z');
            yy_chain(&mut b, 2.0 * j * a * al);
            for i in 1..=p.n - 3 {
                b.add(-4.0 * j * a * al, &[(i, 'Z'), (i + 1, 'X'), (i + 2, 'X'), (i + 3, 'Z')]);
            }
        }
        (XyPath::Path1, Protocol2::Pcdd2) => {
            l_term(&mut b, -a / 3.0, 'a', p);
            d_term(&mut b, -2.0 * j * a, 'z');
            q_term(&mut b, -2.0 * j * a, 'z');
        }
        (XyPath::Path1, Protocol2::Pscpd2) => {
            l_term(&mut b, a / 6.0, 'b', p);
            d_term(&mut b, j * a, 'x');
            q_term(&mut b, j * a, 'x');
        }
        (XyPath::Path2, Protocol2::Sdd) => {
            let d = |i| p.d(i);
            let n = p.n;
            // one-body part; the J² factor restores units and matches the Magnus sum
            let z = j * j * dt * dt;
            b.add(z * (d(1) + d(2)), &[(1, 'Z')]);
            for i in (3..n).step_by(2) {
                b.add(z * (d(i - 1) + 2.0 * d(i) + d(i + 1)), &[(i, 'Z')]);
            }
            if n % 2 == 1 {
                b.add(z * (d(n - 1) + d(n)), &[(n, 'Z')]);
            }
            for i in 1..n {
                let w = if i % 2 == 1 { d(i + 1) } else { d(i) };
                b.add(j / 2.0 * dt * dt * (d(i) + d(i + 1)) * w, &[(i, 'Y'), (i + 1, 'Y')]);
            }
            l_term(&mut b, -a / 3.0, 'b', p);
            for i in (2..=n - 2).step_by(2) {
                b.add(-a / al * (-2.0) * (d(i) + d(i + 1) + d(i + 2)), &[(i, 'X'), (i + 1, 'Z'), (i + 2, 'X')]);
                b.add(-a / al * (d(i) + d(i + 2)), &[(i, 'Y'), (i + 1, 'Z'), (i + 2, 'Y')]);
            }
            d_term(&mut b, -2.0 * j * a, 'x');
            q_term(&mut b, -2.0 * j * a, 'x');
            yy_chain(&mut b, 2.0 * j * a / al);
            for i in 1..=n - 3 {
                b.add(-4.0 * j * a / al, &[(i, 'X'), (i + 1, 'Z'), (i + 2, 'Z'), (i + 3, 'X')]);
            }
        }
        (XyPath::Path2, Protocol2::Pcdd2) => {
            l_term(&mut b, -a / 3.0, 'b', p);
            d_term(&mut b, -2.0 * j * a, 'x');
            q_term(&mut b, -2.0 * j * a, 'x');
        }
        (XyPath::Path2, Protocol2::Pscpd2) => {
            l_term(&mut b, a / 6.0, 'a', p);
            d_term(&mut b, j * a, 'z');
            q_term(&mut b, j * a, 'z');
        }
    }
    Ok(b.finish())
}

/// The displayed `δ = 0` second-order results on Path 1.
pub fn display_h2(proto: Protocol2, p: &FormParams) -> Result<PauliSum> {
    let (j, al, dt) = (p.j, p.alpha, p.dt);
    let pre = j.powi(3) * dt * dt * al;
    let mut b = Builder::new(p.n);
    check(p)?;
    match proto {
        Protocol2::Sdd => {
            d_term(&mut b, -2.0 * pre, 'z');
            yy_chain(&mut b, 2.0 * pre * al);
            q_term(&mut b, -2.0 * pre, 'z');
            for i in 1..=p.n - 3 {
                b.add(-4.0 * pre * al, &[(i, 'Z'), (i + 1, 'X'), (i + 2, 'X'), (i + 3, 'Z')]);
            }
        }
        Protocol2::Pcdd2 => {
            d_term(&mut b, -2.0 * pre, 'z');
            q_term(&mut b, -2.0 * pre, 'z');
        }
        Protocol2::Pscpd2 => {
            d_term(&mut b, pre, 'x');
            q_term(&mut b, pre, 'x');
        }
    }
    Ok(b.finish())
}

/// Finite-width zeroth order for PDD on `G_ZY` along the identity path,
/// coefficient `−Jτ(1−cos β)/(2βΔt)` per bond. Odd sites are pulsed about `Z`
/// and even sites about `Y`, so the bond operators alternate: `Y_iX_{i+1} +
/// X_iZ_{i+1}` for odd `i`, the mirror image `X_iY_{i+1} + Z_iX_{i+1}` for even `i`.
pub fn finite_width_h0(p: &FormParams, tau: f64, beta: f64) -> Result<PauliSum> {
    finite_width(p, tau, beta, true)
}

/// Same coefficient, but with `Y_iX_{i+1} + X_iZ_{i+1}` on every bond.
pub fn finite_width_h0_uniform(p: &FormParams, tau: f64, beta: f64) -> Result<PauliSum> {
    finite_width(p, tau, beta, false)
}

fn finite_width(p: &FormParams, tau: f64, beta: f64, alternate: bool) -> Result<PauliSum> {
    if p.n < 2 {
        return Err(Error::Parameter("chain too short".into()));
    }
    if !(beta > 0.0) || !(tau >= 0.0) {
        return Err(Error::Parameter(format!("need β > 0 and τ ≥ 0, got β={beta}, τ={tau}")));
    }
    let c = -p.j * tau * (1.0 - beta.cos()) / (2.0 * beta * p.dt);
    let mut b = Builder::new(p.n);
    for i in 1..p.n {
        if alternate && i % 2 == 0 {
            b.add(c, &[(i, 'X'), (i + 1, 'Y')]);
            b.add(c, &[(i, 'Z'), (i + 1, 'X')]);
        } else {
            b.add(c, &[(i, 'Y'), (i + 1, 'X')]);
            b.add(c, &[(i, 'X'), (i + 1, 'Z')]);
        }
    }
    Ok(b.finish())
}
