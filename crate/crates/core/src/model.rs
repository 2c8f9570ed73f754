//! Heisenberg-chain drift Hamiltonians and the Magnus-convergence diagnostic.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::pauli::{Letter, PauliString, PauliSum};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingRange {
    #[default]
    NearestNeighbor,
    CubicDecay,
}

/// Frame in which `linear_terms` are interpreted: Larmor frequencies ω_i in the
/// lab frame, offsets δ_i in the rotating frame. The Hamiltonian form is the same.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Lab,
    #[default]
    Rotating,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinChainParams {
    pub n_qubits: usize,
    #[serde(default = "one")]
    pub j: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    /// Empty means all zero; otherwise one entry per site.
    #[serde(default)]
    pub linear_terms: Vec<f64>,
    #[serde(default)]
    pub coupling_range: CouplingRange,
    #[serde(default)]
    pub frame: Frame,
}

fn one() -> f64 {
    1.0
}

impl SpinChainParams {
    /// Isotropic-in-XY nearest-neighbour chain without one-body terms.
    pub fn nn(n_qubits: usize, j: f64, alpha: f64) -> Self {
        SpinChainParams {
            n_qubits,
            j,
            alpha,
            linear_terms: Vec::new(),
            coupling_range: CouplingRange::NearestNeighbor,
            frame: Frame::Rotating,
        }
    }

    pub fn with_linear_terms(mut self, terms: Vec<f64>) -> Self {
        self.linear_terms = terms;
        self
    }

    pub fn cubic(mut self) -> Self {
        self.coupling_range = CouplingRange::CubicDecay;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 2 {
            return Err(Error::Parameter(format!("chain needs at least 2 qubits, got {}", self.n_qubits)));
        }
        if self.n_qubits > crate::pauli::MAX_QUBITS {
            return Err(Error::Parameter(format!("at most {} qubits supported", crate::pauli::MAX_QUBITS)));
        }
        if !self.linear_terms.is_empty() && self.linear_terms.len() != self.n_qubits {
            return Err(Error::Parameter(format!(
                "{} linear terms for {} qubits",
                self.linear_terms.len(),
                self.n_qubits
            )));
        }
        if !(self.j.is_finite() && self.alpha.is_finite() && self.linear_terms.iter().all(|x| x.is_finite())) {
            return Err(Error::Parameter("non-finite model parameter".into()));
        }
        Ok(())
    }
}

/// `Σ_i c_i Z_i/2 + Σ_{i<j} w_ij J (X_iX_j + Y_iY_j + α Z_iZ_j)` with open boundaries,
/// `w_ij = 1` for neighbours only or `1/(j−i)³` for the cubic model.
pub fn build_hamiltonian(p: &SpinChainParams) -> Result<PauliSum> {
    p.validate()?;
    let n = p.n_qubits;
    let mut h = PauliSum::zero(n);
    for (i, &c) in p.linear_terms.iter().enumerate() {
        h.add_term(PauliString::from_sites(n, &[(i, Letter::Z)]), C64::new(c / 2.0, 0.0));
    }
    for i in 0..n {
        for j in i + 1..n {
            let w = match p.coupling_range {
                CouplingRange::NearestNeighbor if j == i + 1 => 1.0,
                CouplingRange::NearestNeighbor => continue,
                CouplingRange::CubicDecay => 1.0 / ((j - i) as f64).powi(3),
            };
            for (l, k) in [(Letter::X, 1.0), (Letter::Y, 1.0), (Letter::Z, p.alpha)] {
                h.add_term(PauliString::from_sites(n, &[(i, l), (j, l)]), C64::new(w * k * p.j, 0.0));
            }
        }
    }
    Ok(h)
}

/// `κ = ‖H‖₂ = max |eig(H)|` by dense diagonalization.
pub fn spectral_norm(h: &PauliSum) -> Result<f64> {
    if !h.is_hermitian(1e-12) {
        return Err(Error::Domain("spectral norm requested for a non-Hermitian sum".into()));
    }
    if h.is_empty() {
        return Ok(0.0);
    }
    let m = h.to_matrix()?;
    let ev = linalg::hermitian_eigenvalues(m.as_ref())?;
    Ok(ev.iter().fold(0.0f64, |a, x| a.max(x.abs())))
}

/// `κ·T_c`; values below one satisfy the usual Magnus convergence guideline.
pub fn convergence_ratio(h: &PauliSum, t_c: f64) -> Result<f64> {
    if !(t_c > 0.0) {
        return Err(Error::Parameter(format!("cycle time must be positive, got {t_c}")));
    }
    Ok(spectral_norm(h)? * t_c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(w: &str) -> PauliString {
        PauliString::from_letters(w).unwrap()
    }

    #[test]
    fn two_site_heisenberg() {
        let h = build_hamiltonian(&SpinChainParams::nn(2, 1.0, 1.0)).unwrap();
        assert_eq!(h.len(), 3);
        for w in ["XX", "YY", "ZZ"] {
            assert_eq!(h.coefficient(&s(w)), C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn cubic_next_nearest_weight() {
        let h = build_hamiltonian(&SpinChainParams::nn(3, 1.0, 1.0).cubic()).unwrap();
        assert_eq!(h.coefficient(&s("XIX")).re, 1.0 / 8.0);
    }

    #[test]
    fn chemical_shift_terms() {
        let p = SpinChainParams::nn(4, 1.0, 1.0).with_linear_terms(vec![10.0, 0.0, 10.0, 0.0]);
        let h = build_hamiltonian(&p).unwrap();
        assert_eq!(h.coefficient(&s("ZIII")).re, 5.0);
        assert_eq!(h.coefficient(&s("IIZI")).re, 5.0);
        assert_eq!(h.coefficient(&s("IZII")).re, 0.0);
        assert_eq!(h.len(), 2 + 9);
    }

    #[test]
    fn too_short_chain_rejected() {
        assert!(matches!(build_hamiltonian(&SpinChainParams::nn(1, 1.0, 1.0)), Err(Error::Parameter(_))));
    }

    #[test]
    fn norms() {
        let z = PauliSum::from_real(s("Z"), 0.5);
        assert!((spectral_norm(&z).unwrap() - 0.5).abs() < 1e-14);
        assert_eq!(spectral_norm(&PauliSum::zero(3)).unwrap(), 0.0);
        let y = PauliSum::from_string(s("Y"), C64::new(0.0, 1.0));
        assert!(matches!(spectral_norm(&y), Err(Error::Domain(_))));
        assert!((convergence_ratio(&PauliSum::from_real(s("Z"), 2.0), 0.4).unwrap() - 0.8).abs() < 1e-14);
    }
}
