//! Average-Hamiltonian theory for piecewise-constant toggled Hamiltonians:
//! Magnus terms up to second order, a numeric effective-Hamiltonian oracle,
//! order-of-convergence fits and the closed forms they are checked against.

pub mod forms;
mod rh2;

use faer::linalg::solvers::Solve;
use num_complex::Complex64 as C64;

pub use rh2::{build_rh2_completion_table, half_pcdd2_block, relabeled_h2, verify_cancellation};

use crate::engine::{evolve_toggling, PropagatorCache, Sampling};
use crate::error::{Error, Result};
use crate::groups::DDGroup;
use crate::linalg::{self, CMat};
use crate::pauli::PauliSum;
use crate::schedule::Schedule;

/// Tolerance for "this Magnus term vanishes".
pub const ZERO_TOL: f64 = 1e-12;

/// Eigenphases closer than this to `±π` make the logarithm ambiguous.
pub const BRANCH_TOL: f64 = 1e-6;

/// Per-slot toggled Hamiltonians `H_k = g_k† H₀ g_k`, each lasting `dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct ToggledSequence {
    hamiltonians: Vec<PauliSum>,
    dt: f64,
}

impl ToggledSequence {
    pub fn hamiltonians(&self) -> &[PauliSum] {
        &self.hamiltonians
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.hamiltonians.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hamiltonians.is_empty()
    }

    /// Total duration `T = n·Δt`.
    pub fn duration(&self) -> f64 {
        self.dt * self.len() as f64
    }

    pub fn reversed(&self) -> Self {
        let mut h = self.hamiltonians.clone();
        h.reverse();
        ToggledSequence { hamiltonians: h, dt: self.dt }
    }

    /// Slots `range` as a sequence of its own.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        ToggledSequence { hamiltonians: self.hamiltonians[range].to_vec(), dt: self.dt }
    }

    fn n_qubits(&self) -> usize {
        self.hamiltonians[0].n_qubits()
    }
}

/// Toggled sequence for 0-based group indices `labels`.
pub fn toggled(h0: &PauliSum, group: &DDGroup, labels: &[usize], dt: f64) -> Result<ToggledSequence> {
    if labels.is_empty() {
        return Err(Error::Parameter("empty label sequence".into()));
    }
    if h0.n_qubits() != group.n_qubits() {
        return Err(Error::Dimension { left: h0.n_qubits(), right: group.n_qubits() });
    }
    let conj: Vec<PauliSum> = group.elements().iter().map(|g| h0.conjugate(g)).collect::<Result<_>>()?;
    let hamiltonians = labels
        .iter()
        .map(|&l| {
            conj.get(l)
                .cloned()
                .ok_or_else(|| Error::Parameter(format!("label {l} outside group of order {}", group.len())))
        })
        .collect::<Result<_>>()?;
    Ok(ToggledSequence { hamiltonians, dt })
}

/// Toggled sequence of the first `n_slots` frames of a compiled schedule
/// (borders included).
pub fn toggled_schedule(h0: &PauliSum, schedule: &Schedule) -> Result<ToggledSequence> {
    let hamiltonians = schedule.frames()[..schedule.n_slots()]
        .iter()
        .map(|f| h0.conjugate(f))
        .collect::<Result<_>>()?;
    Ok(ToggledSequence { hamiltonians, dt: schedule.dt })
}

fn sum_all(n: usize, items: impl IntoIterator<Item = PauliSum>) -> PauliSum {
    let mut acc = PauliSum::zero(n);
    for x in items {
        acc += &x;
    }
    acc
}

/// `S_l = Σ_{k<l} H_k` for `l = 0…n`.
fn prefix_sums(seq: &ToggledSequence) -> Vec<PauliSum> {
    let mut out = Vec::with_capacity(seq.len() + 1);
    let mut acc = PauliSum::zero(seq.n_qubits());
    out.push(acc.clone());
    for h in &seq.hamiltonians {
        acc += h;
        out.push(acc.clone());
    }
    out
}

/// `(Δt/T)·Σ_k H_k`.
pub fn magnus0(seq: &ToggledSequence) -> Result<PauliSum> {
    nonempty(seq)?;
    let raw = sum_all(seq.n_qubits(), seq.hamiltonians.iter().cloned());
    Ok(raw.scale_real(1.0 / seq.len() as f64))
}

/// `Σ_{l>k} [H_l, H_k]` without prefactor.
fn magnus1_raw(seq: &ToggledSequence) -> Result<PauliSum> {
    let s = prefix_sums(seq);
    let mut acc = PauliSum::zero(seq.n_qubits());
    for (l, h) in seq.hamiltonians.iter().enumerate().skip(1) {
        acc += &h.commutator(&s[l])?;
    }
    Ok(acc)
}

/// `−i(Δt)²/(2T)·Σ_{l>k} [H_l, H_k]`.
pub fn magnus1(seq: &ToggledSequence) -> Result<PauliSum> {
    nonempty(seq)?;
    let raw = magnus1_raw(seq)?;
    Ok(raw.scale(C64::new(0.0, -seq.dt / (2.0 * seq.len() as f64))))
}

/// First-order term of a four-slot cycle with vanishing zeroth order, written
/// with the two adjacent commutators only: `−i(Δt)²/(2T){[H₄,H₃] + [H₂,H₁]}`.
pub fn magnus1_four_slot(seq: &ToggledSequence) -> Result<PauliSum> {
    if seq.len() != 4 {
        return Err(Error::Parameter(format!("four-slot form needs 4 slots, got {}", seq.len())));
    }
    if !magnus0(seq)?.equals_zero(ZERO_TOL) {
        return Err(Error::Domain("four-slot form requires a vanishing zeroth order".into()));
    }
    let h = &seq.hamiltonians;
    let raw = (&h[3].commutator(&h[2])? + &h[1].commutator(&h[0])?)?;
    Ok(raw.scale(C64::new(0.0, -seq.dt / 8.0)))
}

/// Second-order term
/// `−(Δt)³/(6T)·{Σ_{m>l>k}([H_m,[H_l,H_k]] + [[H_m,H_l],H_k]) + ½Σ_{l>k}([H_l,[H_l,H_k]] + [[H_l,H_k],H_k])}`.
pub fn magnus2(seq: &ToggledSequence) -> Result<PauliSum> {
    nonempty(seq)?;
    let n = seq.n_qubits();
    let h = &seq.hamiltonians;
    let s = prefix_sums(seq);
    let total = s.last().expect("nonempty").clone();
    // C_m = Σ_{l<m} [H_l, S_l]
    let mut c = PauliSum::zero(n);
    let mut triple = PauliSum::zero(n);
    let mut pair = PauliSum::zero(n);
    for m in 0..h.len() {
        let r = (&total - &s[m + 1])?; // Σ_{l>m} H_l
        // Σ_{l<m} [H_m,[H_l,H_k]] with k<l
        triple += &h[m].commutator(&c)?;
        // Σ_{j>m} [[H_j,H_m], S_m]
        triple += &r.commutator(&h[m])?.commutator(&s[m])?;
        // ½ terms: [H_m,[H_m,S_m]] and [[R_m,H_m],H_m]
        pair += &h[m].commutator(&h[m].commutator(&s[m])?)?;
        pair += &r.commutator(&h[m])?.commutator(&h[m])?;
        c += &h[m].commutator(&s[m])?;
    }
    let raw = (&triple + &pair.scale_real(0.5))?;
    Ok(raw.scale_real(-seq.dt * seq.dt / (6.0 * seq.len() as f64)))
}

/// Second-order term of a four-slot cycle with vanishing zeroth order:
/// `−(Δt)³/(6T){[(2H₁+H₂),[H₁,H₂]] + [(2H₄+H₃),[H₄,H₃]]}`.
pub fn magnus2_four_slot(seq: &ToggledSequence) -> Result<PauliSum> {
    if seq.len() != 4 {
        return Err(Error::Parameter(format!("four-slot form needs 4 slots, got {}", seq.len())));
    }
    if !magnus0(seq)?.equals_zero(ZERO_TOL) {
        return Err(Error::Domain("four-slot form requires a vanishing zeroth order".into()));
    }
    let h = &seq.hamiltonians;
    let a = (&h[0].scale_real(2.0) + &h[1])?.commutator(&h[0].commutator(&h[1])?)?;
    let b = (&h[3].scale_real(2.0) + &h[2])?.commutator(&h[3].commutator(&h[2])?)?;
    Ok((&a + &b)?.scale_real(-seq.dt * seq.dt / 24.0))
}

/// Magnus term of order `order` (0, 1 or 2).
pub fn magnus(seq: &ToggledSequence, order: usize) -> Result<PauliSum> {
    match order {
        0 => magnus0(seq),
        1 => magnus1(seq),
        2 => magnus2(seq),
        _ => Err(Error::Parameter(format!("Magnus order {order} not implemented"))),
    }
}

/// Order-`order` term of a concatenation of subsequences whose lower orders all
/// vanish: the duration-weighted sum of the per-block terms.
pub fn supercycle_magnus(blocks: &[ToggledSequence], order: usize) -> Result<PauliSum> {
    if blocks.is_empty() {
        return Err(Error::Parameter("no subsequences".into()));
    }
    let total: f64 = blocks.iter().map(|b| b.duration()).sum();
    let mut acc = PauliSum::zero(blocks[0].n_qubits());
    for (i, b) in blocks.iter().enumerate() {
        for lower in 0..order {
            let m = magnus(b, lower)?;
            if !m.equals_zero(ZERO_TOL) {
                return Err(Error::Domain(format!(
                    "subsequence {i} has a nonzero order-{lower} term (max |c| = {:.3e})",
                    m.max_abs()
                )));
            }
        }
        acc += &magnus(b, order)?.scale_real(b.duration() / total);
    }
    Ok(acc)
}

/// `H_eff = i·log(U)/T` on the principal branch.
///
/// Uses the Cayley transform `K = i(𝟙+U)⁻¹(𝟙−U)`, which is Hermitian with
/// eigenvalues `tan(φ/2)` for eigenphases `e^{iφ}` of `U`.
pub fn numeric_effective_hamiltonian(u: faer::MatRef<'_, C64>, t: f64) -> Result<CMat> {
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("duration must be positive, got {t}")));
    }
    let d = u.nrows();
    if u.ncols() != d {
        return Err(Error::Dimension { left: d, right: u.ncols() });
    }
    let id = linalg::identity(d);
    let plus = faer::Mat::from_fn(d, d, |i, j| id[(i, j)] + u[(i, j)]);
    let minus = faer::Mat::from_fn(d, d, |i, j| id[(i, j)] - u[(i, j)]);
    let x = plus.partial_piv_lu().solve(minus.as_ref());
    // 𝟙+U singular: an eigenphase sits exactly on the branch cut
    if (0..d).any(|i| (0..d).any(|j| !x[(i, j)].re.is_finite() || !x[(i, j)].im.is_finite())) {
        return Err(Error::BranchAmbiguity { phase: std::f64::consts::PI, tol: BRANCH_TOL });
    }
    let k = faer::Mat::from_fn(d, d, |i, j| x[(i, j)] * C64::new(0.0, 1.0));
    let k = linalg::hermitian_part(k.as_ref());
    let (vals, vecs) = linalg::hermitian_eig(k.as_ref())?;
    let mut phases = Vec::with_capacity(d);
    for &lam in &vals {
        if !lam.is_finite() {
            return Err(Error::BranchAmbiguity { phase: std::f64::consts::PI, tol: BRANCH_TOL });
        }
        let phi = 2.0 * lam.atan();
        if std::f64::consts::PI - phi.abs() < BRANCH_TOL {
            return Err(Error::BranchAmbiguity { phase: phi, tol: BRANCH_TOL });
        }
        phases.push(phi);
    }
    Ok(linalg::spectral_map(&phases, vecs.as_ref(), |phi| C64::new(-phi / t, 0.0)))
}

/// `i·log(Ũ(T))/T` for the whole schedule.
pub fn schedule_effective_hamiltonian(schedule: &Schedule, cache: &PropagatorCache) -> Result<CMat> {
    let ev = evolve_toggling(schedule, cache, Sampling::Slots(schedule.n_slots()))?;
    let (_, u) = ev.samples.last().expect("final sample");
    numeric_effective_hamiltonian(u.as_ref(), schedule.horizon())
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Parameter("slope fit needs at least two matching points".into()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::Domain("log-log fit needs positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Result of a convergence-order fit.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderFit {
    pub dts: Vec<f64>,
    /// `‖H_eff(Δt)‖₂` over one period of the label sequence.
    pub norms: Vec<f64>,
    /// Slope of `log‖H_eff‖` against `log Δt`; `None` when `H_eff ≡ 0`.
    pub slope: Option<f64>,
}

/// Fits `‖H_eff‖ ∝ Δt^slope` for one period of `labels` (0-based group indices).
///
/// `H_eff` is normalized by the period `T = nΔt`, so a term of order
/// `(Δt)^k` in `H̄` shows up as slope `k`.
pub fn convergence_order_fit(labels: &[usize], group: &DDGroup, h0: &PauliSum, dts: &[f64]) -> Result<OrderFit> {
    if dts.len() < 2 {
        return Err(Error::Parameter("need at least two Δt values".into()));
    }
    let cache = PropagatorCache::new(h0)?;
    let mut norms = Vec::with_capacity(dts.len());
    for &dt in dts {
        let l: Vec<usize> = labels.iter().copied().chain(std::iter::once(labels[0])).collect();
        let s = Schedule::from_parts("fit", group, dt, l, None, None)?;
        let h = schedule_effective_hamiltonian(&s, &cache)?;
        norms.push(linalg::op_norm(h.as_ref())?);
    }
    let slope = if norms.iter().all(|&x| x < 1e-13) { None } else { Some(log_log_slope(dts, &norms)?) };
    Ok(OrderFit { dts: dts.to_vec(), norms, slope })
}

fn nonempty(seq: &ToggledSequence) -> Result<()> {
    if seq.is_empty() {
        return Err(Error::Parameter("empty toggled sequence".into()));
    }
    Ok(())
}
