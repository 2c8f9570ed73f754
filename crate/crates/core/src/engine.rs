//! Exact propagation of compiled schedules, pulse-error models, fidelities and
//! Monte-Carlo aggregation over protocol realizations.
//!
//! Evolution is carried in the logical (toggling) frame. A slot spent in frame
//! `F` contributes `F† e^{−iH₀Δt} F`; since `F` is a Pauli string this is a signed
//! permutation of the one cached exponential, so a slot costs a single dense
//! multiply.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path as FsPath;
use std::sync::{Arc, Mutex, RwLock};

use faer::Mat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::DDGroup;
use crate::linalg::{self, CMat};
use crate::pauli::{Letter, PauliString, PauliSum, DEFAULT_DENSE_CAP};
use crate::schedule::{generate_realization, ProtocolSpec, Schedule};

/// Largest accepted flip-angle error.
pub const MAX_EPSILON: f64 = 0.1;

/// Where a finite-width pulse sits inside its slot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseTiming {
    /// `(Δt−τ)` free evolution, then the pulse ending on the slot boundary.
    #[default]
    EndOfSlot,
    /// `(Δt−τ)/2` free, pulse, `(Δt−τ)/2` free.
    Centered,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ErrorModel {
    #[default]
    Ideal,
    /// Rectangular pulses of duration `tau` and angle `beta = Ωτ`, drift on throughout.
    FiniteWidth {
        tau: f64,
        #[serde(default = "default_beta")]
        beta: f64,
        #[serde(default)]
        timing: PulseTiming,
    },
    /// Systematic over-rotation `π(1+ε)` of every nontrivial single-qubit factor.
    FlipAngle { epsilon: f64 },
}

fn default_beta() -> f64 {
    std::f64::consts::PI
}

impl ErrorModel {
    pub fn validate(&self, dt: f64) -> Result<()> {
        match *self {
            ErrorModel::Ideal => Ok(()),
            ErrorModel::FiniteWidth { tau, beta, .. } => {
                if !(tau >= 0.0 && tau < dt) {
                    return Err(Error::Parameter(format!("pulse width τ={tau} must lie in [0, Δt={dt})")));
                }
                if !beta.is_finite() {
                    return Err(Error::Parameter("non-finite rotation angle β".into()));
                }
                Ok(())
            }
            ErrorModel::FlipAngle { epsilon } => {
                if !(epsilon.abs() <= MAX_EPSILON) {
                    return Err(Error::Parameter(format!("flip-angle error |ε|={epsilon} exceeds {MAX_EPSILON}")));
                }
                Ok(())
            }
        }
    }

    pub fn is_ideal(&self) -> bool {
        match *self {
            ErrorModel::Ideal => true,
            ErrorModel::FiniteWidth { tau, beta, .. } => tau == 0.0 && beta == std::f64::consts::PI,
            ErrorModel::FlipAngle { epsilon } => epsilon == 0.0,
        }
    }
}

/// `exp(−i h t)` by spectral decomposition.
pub fn expm_hermitian(h: faer::MatRef<'_, C64>, t: f64) -> Result<CMat> {
    if !linalg::is_hermitian(h, 1e-12) {
        return Err(Error::Domain("matrix exponential of a non-Hermitian generator".into()));
    }
    let (vals, vecs) = linalg::hermitian_eig(h)?;
    Ok(linalg::spectral_map(&vals, vecs.as_ref(), |x| C64::from_polar(1.0, -x * t)))
}

/// Dense unitaries for one drift Hamiltonian: free evolution over arbitrary
/// durations and finite-width pulses keyed by their Pauli string.
pub struct PropagatorCache {
    h0: PauliSum,
    h0_mat: CMat,
    vals: Vec<f64>,
    vecs: CMat,
    free: RwLock<HashMap<u64, Arc<CMat>>>,
    pulses: Mutex<HashMap<(u64, u64, u64, u64), Arc<CMat>>>,
}

impl PropagatorCache {
    pub fn new(h0: &PauliSum) -> Result<Self> {
        Self::with_cap(h0, DEFAULT_DENSE_CAP)
    }

    pub fn with_cap(h0: &PauliSum, max_qubits: usize) -> Result<Self> {
        let h0_mat = h0.to_matrix_capped(max_qubits)?;
        if !linalg::is_hermitian(h0_mat.as_ref(), 1e-12) {
            return Err(Error::Domain("drift Hamiltonian is not Hermitian".into()));
        }
        let (vals, vecs) = linalg::hermitian_eig(h0_mat.as_ref())?;
        Ok(PropagatorCache {
            h0: h0.clone(),
            h0_mat,
            vals,
            vecs,
            free: RwLock::new(HashMap::new()),
            pulses: Mutex::new(HashMap::new()),
        })
    }

    pub fn dim(&self) -> usize {
        self.h0_mat.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.h0.n_qubits()
    }

    pub fn hamiltonian(&self) -> &PauliSum {
        &self.h0
    }

    /// `exp(−iH₀·duration)`.
    pub fn free(&self, duration: f64) -> Arc<CMat> {
        let key = duration.to_bits();
        if let Some(u) = self.free.read().expect("cache lock").get(&key) {
            return u.clone();
        }
        let u = Arc::new(linalg::spectral_map(&self.vals, self.vecs.as_ref(), |x| C64::from_polar(1.0, -x * duration)));
        self.free.write().expect("cache lock").entry(key).or_insert(u).clone()
    }

    /// `exp(−i(H₀ + (β/τ)Σ_s σ_s/2)τ)` for the letters of `p`.
    pub fn finite_pulse(&self, p: &PauliString, tau: f64, beta: f64) -> Result<Arc<CMat>> {
        let key = (p.x_mask(), p.z_mask(), tau.to_bits(), beta.to_bits());
        if let Some(u) = self.pulses.lock().expect("cache lock").get(&key) {
            return Ok(u.clone());
        }
        let n = self.n_qubits();
        let mut hc = PauliSum::zero(n);
        for s in 0..n {
            let l = p.letter(s);
            if l != Letter::I {
                hc.add_term(PauliString::from_sites(n, &[(s, l)]), C64::new(beta / (2.0 * tau), 0.0));
            }
        }
        let total = (&self.h0 + &hc)?;
        let u = Arc::new(expm_hermitian(total.to_matrix()?.as_ref(), tau)?);
        Ok(self.pulses.lock().expect("cache lock").entry(key).or_insert(u).clone())
    }
}

/// Sample grid for an evolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// `t = 0` and every `stride` slots.
    Slots(usize),
    /// Every `Δt/s` (bang-bang only).
    Substeps(usize),
}

impl Sampling {
    fn validate(&self, n_slots: usize) -> Result<()> {
        match *self {
            Sampling::Slots(0) | Sampling::Substeps(0) => Err(Error::Parameter("sampling stride must be ≥ 1".into())),
            Sampling::Slots(s) if s > n_slots => {
                Err(Error::Parameter(format!("sampling stride {s} exceeds horizon of {n_slots} slots")))
            }
            _ => Ok(()),
        }
    }
}

/// Propagators at the sample times plus a count of dense multiplications.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub samples: Vec<(f64, CMat)>,
    pub multiplies: usize,
}

/// Bang-bang evolution of the logical propagator `Ũ`.
pub fn evolve_toggling(schedule: &Schedule, cache: &PropagatorCache, sampling: Sampling) -> Result<Evolution> {
    check_dims(schedule, cache)?;
    sampling.validate(schedule.n_slots())?;
    let (stride, sub) = match sampling {
        Sampling::Slots(s) => (s, 1),
        Sampling::Substeps(s) => (1, s),
    };
    let step = cache.free(schedule.dt / sub as f64);
    let mut u = linalg::identity(cache.dim());
    let mut samples = vec![(0.0, u.clone())];
    let mut multiplies = 0;
    let mut scratch = Mat::zeros(cache.dim(), cache.dim());
    for k in 0..schedule.n_slots() {
        let f = schedule.frame(k);
        for s in 1..=sub {
            conj_step(&mut u, &mut scratch, &step, f);
            multiplies += 1;
            if sub > 1 || (k + 1) % stride == 0 {
                let t = schedule.dt * (k as f64 + s as f64 / sub as f64);
                samples.push((t, u.clone()));
            }
        }
    }
    Ok(Evolution { samples, multiplies })
}

/// A physical-frame sample: `U`, the ideal control propagator `U_c`, and `Ũ = U_c†U`.
#[derive(Clone, Debug)]
pub struct PhysicalSample {
    pub time: f64,
    pub u: CMat,
    pub u_c: CMat,
    pub logical: CMat,
}

/// Evolution with imperfect pulses. The pulse `P_{k+1}` closes slot `k`; the
/// initial pulse `P_0`, when nontrivial, is applied before the clock starts.
pub fn evolve_physical(
    schedule: &Schedule,
    cache: &PropagatorCache,
    model: &ErrorModel,
    stride: usize,
) -> Result<Vec<PhysicalSample>> {
    check_dims(schedule, cache)?;
    model.validate(schedule.dt)?;
    Sampling::Slots(stride).validate(schedule.n_slots())?;
    let stepper = Stepper::new(cache, model, schedule.dt)?;
    let mut u = stepper.initial(schedule.frame(0))?;
    let mut out = Vec::new();
    let mut push = |k: usize, logical: &CMat| {
        let f = schedule.frame(k);
        out.push(PhysicalSample {
            time: schedule.dt * k as f64,
            u: linalg::pauli_left_mul(f, logical.as_ref()),
            u_c: linalg::pauli_matrix(f),
            logical: logical.clone(),
        });
    };
    push(0, &u);
    for k in 0..schedule.n_slots() {
        u = stepper.slot(&u, schedule.frame(k), schedule.frame(k + 1))?;
        if (k + 1) % stride == 0 {
            push(k + 1, &u);
        }
    }
    Ok(out)
}

/// `F_e = |Tr U / d|²`.
pub fn entanglement_fidelity(u: faer::MatRef<'_, C64>) -> f64 {
    let d = u.nrows() as f64;
    (linalg::trace(u) / d).norm_sqr().min(1.0)
}

/// `(d·F_e + 1)/(d + 1)`.
pub fn average_fidelity(f_e: f64, d: usize) -> f64 {
    let d = d as f64;
    (d * f_e + 1.0) / (d + 1.0)
}

/// `|⟨ψ|U|ψ⟩|²`.
pub fn pure_state_fidelity(u: faer::MatRef<'_, C64>, psi: &[C64]) -> Result<f64> {
    if psi.len() != u.nrows() {
        return Err(Error::Dimension { left: u.nrows(), right: psi.len() });
    }
    let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("state has squared norm {norm}, expected 1")));
    }
    let mut amp = C64::default();
    for i in 0..psi.len() {
        let row: C64 = (0..psi.len()).map(|j| u[(i, j)] * psi[j]).sum();
        amp += psi[i].conj() * row;
    }
    Ok(amp.norm_sqr().min(1.0))
}

fn check_dims(schedule: &Schedule, cache: &PropagatorCache) -> Result<()> {
    if schedule.n_qubits() != cache.n_qubits() {
        return Err(Error::Dimension { left: schedule.n_qubits(), right: cache.n_qubits() });
    }
    Ok(())
}

/// `u ← F† S F u` with one dense multiply.
fn conj_step(u: &mut CMat, scratch: &mut CMat, step: &CMat, f: &PauliString) {
    if f.is_identity() {
        linalg::mul_into(scratch, step.as_ref(), u.as_ref());
        std::mem::swap(u, scratch);
    } else {
        let fu = linalg::pauli_left_mul(f, u.as_ref());
        linalg::mul_into(scratch, step.as_ref(), fu.as_ref());
        *u = linalg::pauli_left_mul(&f.adjoint(), scratch.as_ref());
    }
}

/// Applies `Π_s exp(−iπ(1+ε)σ_s/2)` over the letters of `p` from the left,
/// without the global phase `(−i)` per site, i.e. `σ_s cos(πε/2) − i sin(πε/2)`,
/// so that `ε = 0` is exactly the ideal Pauli pulse.
fn apply_flip_pulse(p: &PauliString, epsilon: f64, m: &CMat) -> CMat {
    let a = C64::new(0.0, -(epsilon * std::f64::consts::FRAC_PI_2).sin());
    let b = C64::new((epsilon * std::f64::consts::FRAC_PI_2).cos(), 0.0);
    let n = p.n_qubits();
    let mut out = m.clone();
    for s in 0..n {
        let l = p.letter(s);
        if l == Letter::I {
            continue;
        }
        let sigma = PauliString::from_sites(n, &[(s, l)]);
        let sm = linalg::pauli_left_mul(&sigma, out.as_ref());
        out = Mat::from_fn(out.nrows(), out.ncols(), |i, j| a * out[(i, j)] + b * sm[(i, j)]);
    }
    out
}

/// Slot propagation in the logical frame for any error model.
struct Stepper<'a> {
    cache: &'a PropagatorCache,
    model: ErrorModel,
    /// Free evolution preceding the pulse (whole slot when ideal).
    pre: Arc<CMat>,
    /// Free evolution following the pulse (centered timing only).
    post: Option<Arc<CMat>>,
}

impl<'a> Stepper<'a> {
    fn new(cache: &'a PropagatorCache, model: &ErrorModel, dt: f64) -> Result<Self> {
        model.validate(dt)?;
        let (pre, post) = match *model {
            ErrorModel::FiniteWidth { tau, timing: PulseTiming::Centered, .. } => {
                let half = cache.free((dt - tau) / 2.0);
                (half.clone(), Some(half))
            }
            ErrorModel::FiniteWidth { tau, .. } => (cache.free(dt - tau), None),
            _ => (cache.free(dt), None),
        };
        Ok(Stepper { cache, model: *model, pre, post })
    }

    fn ideal(&self) -> bool {
        matches!(self.model, ErrorModel::Ideal)
    }

    /// `A(P)·m`: pulse `P` (possibly trivial) acting after the pre-pulse free evolution.
    fn pulse_after_free(&self, p: &PauliString, m: &CMat) -> Result<CMat> {
        let y = linalg::mul(self.pre.as_ref().as_ref(), m.as_ref());
        let z = self.pulse(p, &y)?;
        Ok(match &self.post {
            Some(post) => linalg::mul(post.as_ref().as_ref(), z.as_ref()),
            None => z,
        })
    }

    fn pulse(&self, p: &PauliString, m: &CMat) -> Result<CMat> {
        let trivial = p.bare().is_identity();
        Ok(match self.model {
            ErrorModel::Ideal => linalg::pauli_left_mul(p, m.as_ref()),
            ErrorModel::FlipAngle { epsilon } => {
                if trivial {
                    m.clone()
                } else {
                    apply_flip_pulse(p, epsilon, m)
                }
            }
            ErrorModel::FiniteWidth { tau, beta, .. } => {
                if tau == 0.0 {
                    let w = (beta / 2.0).cos();
                    let s = (beta / 2.0).sin();
                    // exp(−iβσ/2) per site: cos − i sin σ
                    if trivial {
                        m.clone()
                    } else if (beta - std::f64::consts::PI).abs() < 1e-15 {
                        linalg::pauli_left_mul(&p.bare(), m.as_ref())
                    } else {
                        let n = p.n_qubits();
                        let mut out = m.clone();
                        for site in 0..n {
                            let l = p.letter(site);
                            if l == Letter::I {
                                continue;
                            }
                            let sm = linalg::pauli_left_mul(&PauliString::from_sites(n, &[(site, l)]), out.as_ref());
                            out = Mat::from_fn(out.nrows(), out.ncols(), |i, j| {
                                out[(i, j)] * w + sm[(i, j)] * C64::new(0.0, -s)
                            });
                        }
                        out
                    }
                } else if trivial {
                    linalg::mul(self.cache.free(tau).as_ref().as_ref(), m.as_ref())
                } else {
                    linalg::mul(self.cache.finite_pulse(&p.bare(), tau, beta)?.as_ref().as_ref(), m.as_ref())
                }
            }
        })
    }

    /// `Ũ(0) = F_0† · pulse(F_0)`.
    fn initial(&self, f0: &PauliString) -> Result<CMat> {
        let id = linalg::identity(self.cache.dim());
        if self.ideal() || f0.is_identity() {
            return Ok(id);
        }
        let p = self.pulse(f0, &id)?;
        Ok(linalg::pauli_left_mul(&f0.adjoint(), p.as_ref()))
    }

    /// `Ũ ← F_{k+1}† A(P_{k+1}) F_k Ũ`.
    fn slot(&self, u: &CMat, f_k: &PauliString, f_next: &PauliString) -> Result<CMat> {
        let fu = linalg::pauli_left_mul(f_k, u.as_ref());
        if self.ideal() {
            let y = linalg::mul(self.pre.as_ref().as_ref(), fu.as_ref());
            return Ok(linalg::pauli_left_mul(&f_k.adjoint(), y.as_ref()));
        }
        let p = f_next.multiply(&f_k.adjoint())?;
        let z = self.pulse_after_free(&p, &fu)?;
        Ok(linalg::pauli_left_mul(&f_next.adjoint(), z.as_ref()))
    }
}

/// Fidelity samples for a set of realizations of one protocol.
#[derive(Clone, Debug, PartialEq)]
pub struct FidelityTrace {
    pub name: String,
    /// Sample times in units of `1/J`.
    pub sample_times: Vec<f64>,
    /// `per_realization[r][i]` is the fidelity of realization `r` at time `i`.
    pub per_realization: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub stddev: Vec<f64>,
    pub n_realizations: usize,
    pub seed: u64,
}

impl FidelityTrace {
    pub fn from_realizations(name: impl Into<String>, times: Vec<f64>, per: Vec<Vec<f64>>, seed: u64) -> Self {
        let n = per.len();
        let mut mean = vec![0.0; times.len()];
        let mut stddev = vec![0.0; times.len()];
        for i in 0..times.len() {
            let m = per.iter().map(|r| r[i]).sum::<f64>() / n as f64;
            mean[i] = m;
            if n > 1 {
                let v = per.iter().map(|r| (r[i] - m).powi(2)).sum::<f64>() / (n - 1) as f64;
                stddev[i] = v.sqrt();
            }
        }
        FidelityTrace { name: name.into(), sample_times: times, per_realization: per, mean, stddev, n_realizations: n, seed }
    }

    pub fn len(&self) -> usize {
        self.sample_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample_times.is_empty()
    }

    /// Standard error of the mean at sample `i`.
    pub fn stderr(&self, i: usize) -> f64 {
        self.stddev[i] / (self.n_realizations as f64).sqrt()
    }

    /// Index of the sample closest to `t`.
    pub fn index_near(&self, t: f64) -> usize {
        let mut best = 0;
        for (i, &s) in self.sample_times.iter().enumerate() {
            if (s - t).abs() < (self.sample_times[best] - t).abs() {
                best = i;
            }
        }
        best
    }

    /// CSV with columns `time_J, mean, stddev, n`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let err = |e: csv::Error| Error::Parse(e.to_string());
        wr.write_record(["time_J", "mean", "stddev", "n"]).map_err(err)?;
        for i in 0..self.len() {
            wr.write_record([
                format!("{:.16e}", self.sample_times[i]),
                format!("{:.16e}", self.mean[i]),
                format!("{:.16e}", self.stddev[i]),
                self.n_realizations.to_string(),
            ])
            .map_err(err)?;
        }
        wr.flush().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(())
    }

    /// Per-realization matrix: one row per realization, one column per sample.
    pub fn write_realizations_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let err = |e: csv::Error| Error::Parse(e.to_string());
        let header: Vec<String> = self.sample_times.iter().map(|t| format!("{t:.16e}")).collect();
        wr.write_record(&header).map_err(err)?;
        for row in &self.per_realization {
            wr.write_record(row.iter().map(|f| format!("{f:.16e}"))).map_err(err)?;
        }
        wr.flush().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(())
    }

    /// Reads the summary CSV written by [`write_csv`](Self::write_csv).
    /// Per-realization data is not stored there and comes back empty.
    pub fn read_csv<R: Read>(name: impl Into<String>, r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let headers = rd.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        let cols: Vec<&str> = headers.iter().collect();
        if cols != ["time_J", "mean", "stddev", "n"] {
            return Err(Error::Parse(format!("unexpected CSV header {cols:?}")));
        }
        let mut t = FidelityTrace {
            name: name.into(),
            sample_times: vec![],
            per_realization: vec![],
            mean: vec![],
            stddev: vec![],
            n_realizations: 0,
            seed: 0,
        };
        for rec in rd.records() {
            let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
            let num = |i: usize| -> Result<f64> {
                rec[i].trim().parse().map_err(|_| Error::Parse(format!("bad number `{}`", &rec[i])))
            };
            t.sample_times.push(num(0)?);
            t.mean.push(num(1)?);
            t.stddev.push(num(2)?);
            t.n_realizations = rec[3].trim().parse().map_err(|_| Error::Parse(format!("bad count `{}`", &rec[3])))?;
        }
        if t.is_empty() {
            return Err(Error::Parse("empty trace".into()));
        }
        Ok(t)
    }

    pub fn read_csv_file(path: &FsPath) -> Result<Self> {
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(name, f)
    }
}

/// One Monte-Carlo experiment: a protocol, a drift Hamiltonian and a sampling grid.
#[derive(Clone, Debug)]
pub struct MonteCarloConfig {
    pub spec: ProtocolSpec,
    pub group: DDGroup,
    pub dt: f64,
    pub horizon_slots: usize,
    pub sampling: Sampling,
    pub error_model: ErrorModel,
    pub n_realizations: usize,
    /// Coupling `J` used to express times as `J·t`.
    pub j: f64,
    /// Byte budget for cached chunk propagators.
    pub chunk_cache_bytes: usize,
}

impl MonteCarloConfig {
    pub fn new(spec: ProtocolSpec, group: DDGroup, dt: f64, horizon_slots: usize) -> Self {
        let stride = group.len();
        MonteCarloConfig {
            spec,
            group,
            dt,
            horizon_slots,
            sampling: Sampling::Slots(stride),
            error_model: ErrorModel::Ideal,
            n_realizations: 1,
            j: 1.0,
            chunk_cache_bytes: 512 << 20,
        }
    }
}

/// Evaluates `n_realizations` independent realizations; results are indexed by
/// realization, so the outcome does not depend on thread scheduling.
pub fn monte_carlo(cfg: &MonteCarloConfig, cache: &PropagatorCache) -> Result<FidelityTrace> {
    if cfg.n_realizations == 0 {
        return Err(Error::Parameter("n_realizations must be ≥ 1".into()));
    }
    if cfg.group.n_qubits() != cache.n_qubits() {
        return Err(Error::Dimension { left: cfg.group.n_qubits(), right: cache.n_qubits() });
    }
    cfg.error_model.validate(cfg.dt)?;
    cfg.sampling.validate(cfg.horizon_slots)?;
    if matches!(cfg.sampling, Sampling::Substeps(_)) && !matches!(cfg.error_model, ErrorModel::Ideal) {
        return Err(Error::Parameter("intra-slot sampling requires ideal pulses".into()));
    }
    let randomized = cfg.spec.kind.is_randomized();
    let runs = if randomized { cfg.n_realizations } else { 1 };
    let words = WordCache::new(cfg.chunk_cache_bytes / (16 * cache.dim() * cache.dim()).max(1));
    let per: Vec<(Vec<f64>, Vec<f64>)> = (0..runs as u64)
        .into_par_iter()
        .map(|r| {
            let s = generate_realization(&cfg.spec, &cfg.group, cfg.dt, cfg.horizon_slots, r)?;
            realization_fidelities(&s, cfg, cache, &words)
        })
        .collect::<Result<_>>()?;
    let times: Vec<f64> = per[0].0.iter().map(|t| t * cfg.j).collect();
    let mut rows: Vec<Vec<f64>> = per.into_iter().map(|(_, f)| f).collect();
    if !randomized {
        let row = rows[0].clone();
        rows = vec![row; cfg.n_realizations];
    }
    Ok(FidelityTrace::from_realizations(cfg.spec.name(), times, rows, cfg.spec.seed))
}

/// Shared cache of chunk propagators keyed by their label word.
struct WordCache {
    map: RwLock<HashMap<Vec<usize>, Arc<CMat>>>,
    capacity: usize,
}

impl WordCache {
    fn new(capacity: usize) -> Self {
        WordCache { map: RwLock::new(HashMap::new()), capacity }
    }

    fn get_or(&self, key: &[usize], build: impl FnOnce() -> Result<CMat>) -> Result<Arc<CMat>> {
        if let Some(m) = self.map.read().expect("cache lock").get(key) {
            return Ok(m.clone());
        }
        let m = Arc::new(build()?);
        let mut w = self.map.write().expect("cache lock");
        if w.len() < self.capacity {
            w.insert(key.to_vec(), m.clone());
        }
        Ok(m)
    }
}

/// Fidelities of one realization at the configured sample times.
///
/// Between samples the frames of an embedded schedule share one border `b`,
/// so the chunk propagator is `b† C(word) b` where `C` depends only on the
/// group labels and is cached across realizations.
fn realization_fidelities(
    s: &Schedule,
    cfg: &MonteCarloConfig,
    cache: &PropagatorCache,
    words: &WordCache,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if let Sampling::Substeps(_) = cfg.sampling {
        let ev = evolve_toggling(s, cache, cfg.sampling)?;
        return Ok(ev.samples.iter().map(|(t, u)| (*t, entanglement_fidelity(u.as_ref()))).unzip());
    }
    let Sampling::Slots(stride) = cfg.sampling else { unreachable!() };
    let stepper = Stepper::new(cache, &cfg.error_model, cfg.dt)?;
    let labels = s.toggling_labels();
    let mut u = stepper.initial(s.frame(0))?;
    let mut times = vec![0.0];
    let mut fids = vec![entanglement_fidelity(u.as_ref())];
    let mut a = 0;
    while a + stride <= s.n_slots() {
        let b = a + stride;
        let border = s.borders().map(|bs| bs[a]);
        let uniform = s.borders().is_none_or(|bs| bs[a..b].iter().all(|x| *x == bs[a]));
        if uniform {
            let word = &labels[a..b];
            let g = |k: usize| cfg.group.element(word[k]);
            let x = match border {
                Some(bd) => linalg::pauli_left_mul(&bd, u.as_ref()),
                None => u.clone(),
            };
            if stepper.ideal() {
                let c = words.get_or(word, || Ok(ideal_word(&stepper, word.len(), g)))?;
                let y = linalg::mul(c.as_ref().as_ref(), x.as_ref());
                u = match border {
                    Some(bd) => linalg::pauli_left_mul(&bd.adjoint(), y.as_ref()),
                    None => y,
                };
            } else {
                let y = if word.len() > 1 {
                    let c = words.get_or(word, || faulty_word(&stepper, word.len(), g))?;
                    linalg::mul(c.as_ref().as_ref(), x.as_ref())
                } else {
                    x
                };
                // Back to the full frame of slot b−1, then the closing slot.
                let y = match border {
                    Some(bd) => linalg::pauli_left_mul(&bd.adjoint(), y.as_ref()),
                    None => y,
                };
                let f_last = s.frame(b - 1);
                let f_next = s.frame(b);
                let p = f_next.multiply(&f_last.adjoint())?;
                let fy = linalg::pauli_left_mul(f_last, y.as_ref());
                let z = stepper.pulse_after_free(&p, &fy)?;
                u = linalg::pauli_left_mul(&f_next.adjoint(), z.as_ref());
            }
        } else {
            for k in a..b {
                u = stepper.slot(&u, s.frame(k), s.frame(k + 1))?;
            }
        }
        a = b;
        times.push(cfg.dt * a as f64);
        fids.push(entanglement_fidelity(u.as_ref()));
    }
    Ok((times, fids))
}

/// `Π_k g_k† U₀ g_k` over the word (later slots to the left).
fn ideal_word<'g>(stepper: &Stepper<'_>, len: usize, g: impl Fn(usize) -> &'g PauliString) -> CMat {
    let u0 = stepper.pre.as_ref();
    let mut m = linalg::pauli_conjugate(u0.as_ref(), g(0));
    let mut scratch = Mat::zeros(m.nrows(), m.ncols());
    for k in 1..len {
        conj_step(&mut m, &mut scratch, u0, g(k));
    }
    m
}

/// `Π_{k<len−1} g_{k+1}† A(g_{k+1} g_k†) g_k`: all slots of the word except the
/// closing one, whose exit frame depends on the next border.
fn faulty_word<'g>(stepper: &Stepper<'_>, len: usize, g: impl Fn(usize) -> &'g PauliString) -> Result<CMat> {
    let mut m = linalg::identity(stepper.cache.dim());
    for k in 0..len - 1 {
        m = stepper.slot(&m, g(k), g(k + 1))?;
    }
    Ok(m)
}
