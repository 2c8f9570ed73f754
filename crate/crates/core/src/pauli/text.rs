//! Human-readable term listings such as `+2.0·J²αΔt · Y1 X2 Z3`.
//!
//! A [`SymbolicSum`] is a list of real coefficients times a monomial in
//! `J`, `α` and `Δt`, each attached to a bare Pauli string. It is produced
//! from numeric [`PauliSum`]s by probing how each coefficient scales when
//! one parameter is doubled.

use std::fmt;

use num_complex::Complex64 as C64;

use super::string::PauliString;
use super::sum::PauliSum;
use crate::error::{Error, Result};

const SUPERSCRIPTS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

/// Exponents of `J`, `α` and `Δt`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub j: i32,
    pub alpha: i32,
    pub dt: i32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { j: 0, alpha: 0, dt: 0 };

    pub fn new(j: i32, alpha: i32, dt: i32) -> Self {
        Monomial { j, alpha, dt }
    }

    pub fn eval(&self, p: Params) -> f64 {
        p.j.powi(self.j) * p.alpha.powi(self.alpha) * p.dt.powi(self.dt)
    }

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }
}

fn superscript(e: i32) -> String {
    if e == 1 {
        return String::new();
    }
    let mut s = String::new();
    if e < 0 {
        s.push('⁻');
    }
    for d in e.unsigned_abs().to_string().bytes() {
        s.push(SUPERSCRIPTS[(d - b'0') as usize]);
    }
    s
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (sym, e) in [("J", self.j), ("α", self.alpha), ("Δt", self.dt)] {
            if e != 0 {
                write!(f, "{sym}{}", superscript(e))?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut m = Monomial::ONE;
        let mut rest = s.trim();
        while !rest.is_empty() {
            let (slot, tail) = if let Some(t) = rest.strip_prefix("Δt") {
                (&mut m.dt, t)
            } else if let Some(t) = rest.strip_prefix('J') {
                (&mut m.j, t)
            } else if let Some(t) = rest.strip_prefix('α') {
                (&mut m.alpha, t)
            } else {
                return Err(Error::Parse(format!("unexpected symbol in monomial `{s}`")));
            };
            let mut neg = false;
            let mut digits = String::new();
            let mut consumed = 0;
            for c in tail.chars() {
                if c == '⁻' && digits.is_empty() && !neg {
                    neg = true;
                } else if let Some(d) = SUPERSCRIPTS.iter().position(|&x| x == c) {
                    digits.push((b'0' + d as u8) as char);
                } else {
                    break;
                }
                consumed += c.len_utf8();
            }
            let e: i32 = if digits.is_empty() {
                if neg {
                    return Err(Error::Parse(format!("dangling minus in `{s}`")));
                }
                1
            } else {
                digits.parse().map_err(|_| Error::Parse(format!("bad exponent in `{s}`")))?
            };
            *slot += if neg { -e } else { e };
            rest = &tail[consumed..];
        }
        Ok(m)
    }
}

/// Parameter point at which a symbolic sum is evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    pub j: f64,
    pub alpha: f64,
    pub dt: f64,
}

impl Params {
    pub fn new(j: f64, alpha: f64, dt: f64) -> Self {
        Params { j, alpha, dt }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicTerm {
    pub coeff: f64,
    pub monomial: Monomial,
    pub string: PauliString,
}

impl fmt::Display for SymbolicTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+?}", self.coeff)?;
        if !self.monomial.is_one() {
            write!(f, "·{}", self.monomial)?;
        }
        write!(f, " · {}", self.string)
    }
}

/// Real-coefficient symbolic operator; the term order is the string order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SymbolicSum {
    pub n_qubits: usize,
    pub terms: Vec<SymbolicTerm>,
}

impl SymbolicSum {
    pub fn evaluate(&self, p: Params) -> PauliSum {
        let mut out = PauliSum::zero(self.n_qubits);
        for t in &self.terms {
            out.add_term(t.string, C64::new(t.coeff * t.monomial.eval(p), 0.0));
        }
        out
    }

    /// Attaches one fixed monomial to every coefficient of `h` evaluated at `p`.
    pub fn with_monomial(h: &PauliSum, monomial: Monomial, p: Params) -> Result<Self> {
        let scale = monomial.eval(p);
        let terms = h
            .iter()
            .map(|(s, c)| {
                real_part(s, *c).map(|re| SymbolicTerm {
                    coeff: snap(re / scale),
                    monomial,
                    string: *s,
                })
            })
            .collect::<Result<_>>()?;
        Ok(SymbolicSum { n_qubits: h.n_qubits(), terms })
    }

    /// Recovers a per-term monomial by evaluating `f` at `p` and at `p` with
    /// each of `J`, `α`, `Δt` doubled in turn. Every coefficient must scale as
    /// an integer power of each parameter.
    pub fn fit(f: impl Fn(Params) -> Result<PauliSum>, p: Params) -> Result<Self> {
        let base = f(p)?;
        let probes = [
            f(Params { j: 2.0 * p.j, ..p })?,
            f(Params { alpha: 2.0 * p.alpha, ..p })?,
            f(Params { dt: 2.0 * p.dt, ..p })?,
        ];
        let mut terms = Vec::with_capacity(base.len());
        for (s, c) in base.iter() {
            let c0 = real_part(s, *c)?;
            let mut exps = [0i32; 3];
            for (k, probe) in probes.iter().enumerate() {
                let ck = real_part(s, probe.coefficient(s))?;
                let ratio = ck / c0;
                if ratio <= 0.0 {
                    return Err(Error::Domain(format!("coefficient of {s} is not a monomial")));
                }
                let e = ratio.log2();
                if (e - e.round()).abs() > 1e-6 {
                    return Err(Error::Domain(format!(
                        "coefficient of {s} scales with non-integer power {e:.6}"
                    )));
                }
                exps[k] = e.round() as i32;
            }
            let monomial = Monomial::new(exps[0], exps[1], exps[2]);
            terms.push(SymbolicTerm { coeff: snap(c0 / monomial.eval(p)), monomial, string: *s });
        }
        Ok(SymbolicSum { n_qubits: base.n_qubits(), terms })
    }

    pub fn parse(n_qubits: usize, text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            terms.push(parse_term(n_qubits, line)?);
        }
        Ok(SymbolicSum { n_qubits, terms })
    }
}

impl fmt::Display for SymbolicSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return writeln!(f, "0");
        }
        for t in &self.terms {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

fn parse_term(n: usize, line: &str) -> Result<SymbolicTerm> {
    let (head, string) = line
        .split_once(" · ")
        .ok_or_else(|| Error::Parse(format!("missing ` · ` separator in `{line}`")))?;
    let (coeff, monomial) = match head.split_once('·') {
        Some((c, m)) => (c, m.parse()?),
        None => (head, Monomial::ONE),
    };
    let coeff = coeff
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("bad coefficient in `{line}`")))?;
    Ok(SymbolicTerm { coeff, monomial, string: PauliString::parse_sparse(n, string.trim())? })
}

fn real_part(s: &PauliString, c: C64) -> Result<f64> {
    if c.im.abs() > 1e-9 * c.norm().max(1e-300) && c.im.abs() > 1e-14 {
        return Err(Error::Domain(format!("coefficient of {s} is not real: {c}")));
    }
    Ok(c.re)
}

/// Rounds to a nearby fraction with a small denominator, if one is close.
fn snap(x: f64) -> f64 {
    for den in 1..=12 {
        let num = (x * den as f64).round();
        let q = num / den as f64;
        if (x - q).abs() <= 1e-9 * x.abs().max(1.0) {
            return q;
        }
    }
    x
}
