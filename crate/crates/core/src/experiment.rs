//! Config-driven experiments: a TOML file in, one CSV per curve plus a
//! manifest out.
//!
//! ```toml
//! name = "fig2_right"
//! seed = 7
//! n_realizations = 100
//! dt = 0.1            # 1/J
//! horizon = 40.0      # J·T
//! group = "GZY"
//!
//! [system]
//! n_qubits = 8
//! alpha = 1.0
//!
//! [[curve]]
//! protocol = "SRPD"
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::aht::build_rh2_completion_table;
use crate::engine::{monte_carlo, ErrorModel, FidelityTrace, MonteCarloConfig, PropagatorCache, Sampling};
use crate::error::{Error, Result};
use crate::groups::{m_prime_path, parse_group, DDGroup, Path};
use crate::model::{build_hamiltonian, SpinChainParams};
use crate::pauli::PauliSum;
use crate::schedule::{parse_labels, BorderSource, CompletionTable, ProtocolKind, ProtocolSpec};
use crate::search::{greedy_search, SearchConfig};

/// Where fidelities are recorded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingKind {
    /// Every `|𝒢|` slots, or every `stride` slots when given.
    #[default]
    CycleBoundaries,
    /// Every `stride` slots (default 1).
    Slots,
    /// `stride` samples per slot (ideal pulses only).
    IntraSlot,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    pub protocol: String,
    /// Display name and file stem; defaults to the protocol name.
    pub label: Option<String>,
    /// `[0,2,1,3]`, `1324`, `M`, `M'`, `path1`, `path2` or `random`.
    pub path: Option<String>,
    pub path_seed: Option<u64>,
    pub group: Option<String>,
    pub error_model: Option<ErrorModel>,
    /// `same_group` or `pauli_group`.
    pub border: Option<String>,
    pub border_at_start: Option<bool>,
    /// Label stream for `ALGOR_REPLAY`; without one the greedy search is run.
    pub replay: Option<String>,
    pub replay_file: Option<PathBuf>,
    /// Completion table for `RH2`; built on the fly when absent.
    pub rh2_table: Option<PathBuf>,
    pub seed: Option<u64>,
    pub n_realizations: Option<usize>,
    pub sampling: Option<SamplingKind>,
    pub stride: Option<usize>,
    /// Emit `D = F(ideal) − F(model)` instead of `F(model)`; negative where
    /// the pulse errors help.
    #[serde(default)]
    pub difference: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    BetaOverPi,
    Tau,
    Epsilon,
}

/// Fidelity at one time as a function of an error-model parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub protocol: String,
    pub label: Option<String>,
    pub path: Option<String>,
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    /// Base model whose parameter is swept.
    pub error_model: ErrorModel,
    /// Evaluation time `J·T`.
    pub at: f64,
    pub seed: Option<u64>,
    pub n_realizations: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub n_realizations: usize,
    /// Slot length in units of `1/J`.
    pub dt: f64,
    /// Total time `J·T`.
    pub horizon: f64,
    #[serde(default)]
    pub sampling: SamplingKind,
    pub stride: Option<usize>,
    /// Also write every realization's trace.
    #[serde(default)]
    pub save_realizations: bool,
    pub group: String,
    pub system: SpinChainParams,
    #[serde(default)]
    pub error_model: ErrorModel,
    #[serde(default, rename = "curve")]
    pub curves: Vec<CurveConfig>,
    #[serde(default, rename = "sweep")]
    pub sweeps: Vec<SweepConfig>,
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let at = e.span().map(|s| line_of(text, s.start)).map(|l| format!("line {l}")).unwrap_or_default();
            Error::config(at, e.message().to_string())
        })
    }

    pub fn load(path: &FsPath) -> Result<(Self, String)> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg = Self::from_toml(&text).map_err(|e| match e {
            Error::Config { path: at, message } => Error::config(format!("{}:{at}", path.display()), message),
            other => other,
        })?;
        Ok((cfg, text))
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::config("dt", "must be positive"));
        }
        if !(self.horizon > 0.0) {
            return Err(Error::config("horizon", "must be positive"));
        }
        if self.n_realizations == 0 {
            return Err(Error::config("n_realizations", "must be ≥ 1"));
        }
        if self.curves.is_empty() && self.sweeps.is_empty() {
            return Err(Error::config("curve", "no curves or sweeps defined"));
        }
        self.system.validate().map_err(|e| Error::config("system", e.to_string()))?;
        let mut seen = BTreeMap::new();
        for (i, c) in self.curves.iter().enumerate() {
            if let Some(prev) = seen.insert(curve_label(c), i) {
                return Err(Error::config(format!("curve[{i}].label"), format!("duplicates curve[{prev}]")));
            }
        }
        Ok(())
    }

    /// `horizon / (J·dt)`, which must be a whole number of slots.
    fn slots_for(&self, jt: f64, field: &str) -> Result<usize> {
        let x = jt / (self.system.j * self.dt);
        let n = x.round();
        if n < 1.0 || (x - n).abs() > 1e-9 * n.max(1.0) {
            return Err(Error::config(field, format!("J·T={jt} is not a whole number of slots (J·Δt={})", self.system.j * self.dt)));
        }
        Ok(n as usize)
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn curve_label(c: &CurveConfig) -> String {
    c.label.clone().unwrap_or_else(|| c.protocol.trim().to_string())
}

/// Git-style content hash: SHA-256 of `"blob <len>\0" ‖ bytes`, hex encoded.
pub fn blob_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// File stem for a curve label.
pub fn file_stem(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect();
    if s.is_empty() { "curve".into() } else { s }
}

/// One computed curve.
#[derive(Clone, Debug)]
pub struct CurveResult {
    pub label: String,
    pub protocol: String,
    pub trace: FidelityTrace,
}

/// One computed sweep: `(value, trace at the evaluation time)`.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub label: String,
    pub parameter: SweepParameter,
    pub points: Vec<(f64, f64, f64, usize)>,
}

impl SweepResult {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let e = |e: csv::Error| Error::Parse(format!("csv: {e}"));
        let col = match self.parameter {
            SweepParameter::BetaOverPi => "beta_over_pi",
            SweepParameter::Tau => "tau",
            SweepParameter::Epsilon => "epsilon",
        };
        wr.write_record([col, "mean", "stddev", "n"]).map_err(e)?;
        for &(v, m, s, n) in &self.points {
            wr.write_record([format!("{v:.16e}"), format!("{m:.16e}"), format!("{s:.16e}"), n.to_string()]).map_err(e)?;
        }
        wr.flush().map_err(|e| Error::Parse(format!("csv: {e}")))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub label: String,
    pub protocol: String,
    pub file: String,
    pub n_realizations: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub seed: u64,
    pub config_hash: String,
    pub wall_time_s: f64,
    pub version: String,
    pub curves: Vec<ManifestEntry>,
    #[serde(default)]
    pub sweeps: Vec<ManifestEntry>,
}

/// Shared state while running one config.
struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    base_dir: PathBuf,
    h0: PauliSum,
    cache: PropagatorCache,
    rh2: OnceLock<Arc<CompletionTable>>,
    /// Resolve everything but skip searches, table builds and propagation.
    dry: bool,
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a ExperimentConfig, base_dir: &FsPath) -> Result<Self> {
        cfg.validate()?;
        let h0 = build_hamiltonian(&cfg.system)?;
        let cache = PropagatorCache::new(&h0)?;
        Ok(Runner { cfg, base_dir: base_dir.to_path_buf(), h0, cache, rh2: OnceLock::new(), dry: false })
    }

    fn group(&self, name: Option<&str>, field: &str) -> Result<DDGroup> {
        let name = name.unwrap_or(&self.cfg.group);
        parse_group(name, self.cfg.system.n_qubits).map_err(|e| match e {
            Error::Resource(m) => Error::Resource(m),
            other => Error::config(field, other.to_string()),
        })
    }

    fn path(&self, text: Option<&str>, seed: Option<u64>, group: &DDGroup, field: &str) -> Result<Option<Path>> {
        let Some(t) = text.map(str::trim) else { return Ok(None) };
        let n = group.len();
        let bad = |m: String| Error::config(field, m);
        let p = match t.to_ascii_lowercase().as_str() {
            "m" | "identity" => Path::identity(n),
            "m'" | "mprime" | "m_prime" => {
                let m = (1..=8).find(|&m| 1usize << (2 * m) == n).ok_or_else(|| bad(format!("M' path needs a nested group, got order {n}")))?;
                m_prime_path(m)?
            }
            "path1" => crate::aht::forms::XyPath::Path1.path(),
            "path2" => crate::aht::forms::XyPath::Path2.path(),
            "random" => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(self.cfg.seed));
                let mut rest: Vec<usize> = (1..n).collect();
                rest.shuffle(&mut rng);
                Path::new(std::iter::once(0).chain(rest).collect())?
            }
            _ if t.starts_with('[') => Path::parse(t).map_err(|e| bad(e.to_string()))?,
            _ => {
                let labels = parse_labels(t).map_err(|e| bad(e.to_string()))?;
                Path::new(labels.iter().map(|l| l.wrapping_sub(1)).collect()).map_err(|e| bad(e.to_string()))?
            }
        };
        if p.len() != n {
            return Err(bad(format!("path has {} entries, group has {n}", p.len())));
        }
        Ok(Some(p))
    }

    fn rh2_table(&self, file: Option<&PathBuf>, group: &DDGroup, field: &str) -> Result<Arc<CompletionTable>> {
        if let Some(f) = file {
            let p = self.base_dir.join(f);
            let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
            return Ok(Arc::new(CompletionTable::from_text(&text).map_err(|e| Error::config(field, e.to_string()))?));
        }
        if let Some(t) = self.rh2.get() {
            return Ok(t.clone());
        }
        let t = Arc::new(build_rh2_completion_table(group, &self.h0)?);
        Ok(self.rh2.get_or_init(|| t).clone())
    }

    fn sampling(&self, kind: SamplingKind, stride: Option<usize>, group: &DDGroup) -> Sampling {
        match kind {
            SamplingKind::CycleBoundaries => Sampling::Slots(stride.unwrap_or(group.len())),
            SamplingKind::Slots => Sampling::Slots(stride.unwrap_or(1)),
            SamplingKind::IntraSlot => Sampling::Substeps(stride.unwrap_or(1)),
        }
    }

    fn spec(&self, i: usize, c: &CurveConfig, group: &DDGroup, horizon_slots: usize) -> Result<ProtocolSpec> {
        let field = |f: &str| format!("curve[{i}].{f}");
        let kind: ProtocolKind = c.protocol.parse().map_err(|e: Error| Error::config(field("protocol"), e.to_string()))?;
        let mut spec = ProtocolSpec::new(kind).with_seed(c.seed.unwrap_or(self.cfg.seed));
        if let Some(p) = self.path(c.path.as_deref(), c.path_seed, group, &field("path"))? {
            spec = spec.with_path(p);
        }
        if let Some(b) = &c.border {
            let src = match b.trim().to_ascii_lowercase().as_str() {
                "same_group" | "group" => BorderSource::SameGroup,
                "pauli_group" | "pauli" => BorderSource::PauliGroup,
                other => return Err(Error::config(field("border"), format!("unknown border source `{other}`"))),
            };
            spec = spec.with_border(src);
        }
        if let Some(at) = c.border_at_start {
            spec.border_at_start = at;
        }
        if kind == ProtocolKind::AlgorReplay {
            let stream = match (&c.replay, &c.replay_file) {
                (Some(s), _) => parse_labels(s).map_err(|e| Error::config(field("replay"), e.to_string()))?,
                (None, Some(f)) => {
                    let p = self.base_dir.join(f);
                    let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
                    parse_labels(&text).map_err(|e| Error::config(field("replay_file"), e.to_string()))?
                }
                (None, None) if self.dry => vec![1; group.len()],
                (None, None) => {
                    let cycles = (horizon_slots + 1).div_ceil(group.len());
                    let sc = SearchConfig::new(group.clone(), self.h0.clone(), self.cfg.dt, cycles);
                    greedy_search(&sc)?.stream
                }
            };
            spec = spec.with_replay(stream);
        }
        if kind == ProtocolKind::Rh2 && !(self.dry && c.rh2_table.is_none()) {
            spec = spec.with_rh2_table(self.rh2_table(c.rh2_table.as_ref(), group, &field("rh2_table"))?);
        }
        Ok(spec)
    }

    fn curve(&self, i: usize, c: &CurveConfig) -> Result<CurveResult> {
        let field = |f: &str| format!("curve[{i}].{f}");
        let group = self.group(c.group.as_deref(), &field("group"))?;
        let slots = self.cfg.slots_for(self.cfg.horizon, "horizon")?;
        let spec = self.spec(i, c, &group, slots)?;
        let model = c.error_model.unwrap_or(self.cfg.error_model);
        model.validate(self.cfg.dt).map_err(|e| Error::config(field("error_model"), e.to_string()))?;
        let kind = c.sampling.unwrap_or(self.cfg.sampling);
        let mut mc = MonteCarloConfig::new(spec, group.clone(), self.cfg.dt / self.cfg.system.j, slots);
        mc.sampling = self.sampling(kind, c.stride.or(self.cfg.stride), &group);
        mc.error_model = model;
        mc.n_realizations = c.n_realizations.unwrap_or(self.cfg.n_realizations);
        mc.j = self.cfg.system.j;
        let label = curve_label(c);
        if self.dry {
            let n = mc.n_realizations;
            return Ok(CurveResult { label: label.clone(), protocol: c.protocol.clone(), trace: FidelityTrace::from_realizations(label, vec![0.0], vec![vec![1.0]; n], 0) });
        }
        log::info!("curve {label}: {} realizations over {slots} slots", mc.n_realizations);
        let mut trace = monte_carlo(&mc, &self.cache)?;
        if c.difference {
            let mut ideal = mc.clone();
            ideal.error_model = ErrorModel::Ideal;
            let base = monte_carlo(&ideal, &self.cache)?;
            let rows = trace
                .per_realization
                .iter()
                .zip(&base.per_realization)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| y - x).collect())
                .collect();
            trace = FidelityTrace::from_realizations(label.clone(), trace.sample_times.clone(), rows, trace.seed);
        }
        trace.name = label.clone();
        Ok(CurveResult { label, protocol: c.protocol.clone(), trace })
    }

    fn sweep(&self, i: usize, s: &SweepConfig) -> Result<SweepResult> {
        let field = |f: &str| format!("sweep[{i}].{f}");
        let group = self.group(None, &field("group"))?;
        let slots = self.cfg.slots_for(s.at, &field("at"))?;
        let c = CurveConfig {
            protocol: s.protocol.clone(),
            path: s.path.clone(),
            seed: s.seed,
            ..Default::default()
        };
        let spec = self.spec(i, &c, &group, slots)?;
        let mut points = Vec::with_capacity(s.values.len());
        for &v in &s.values {
            let model = match (s.parameter, s.error_model) {
                (SweepParameter::BetaOverPi, ErrorModel::FiniteWidth { tau, timing, .. }) => {
                    ErrorModel::FiniteWidth { tau, beta: v * std::f64::consts::PI, timing }
                }
                (SweepParameter::Tau, ErrorModel::FiniteWidth { beta, timing, .. }) => {
                    ErrorModel::FiniteWidth { tau: v, beta, timing }
                }
                (SweepParameter::Epsilon, ErrorModel::FlipAngle { .. }) => ErrorModel::FlipAngle { epsilon: v },
                (p, m) => return Err(Error::config(field("parameter"), format!("{p:?} cannot be swept on {m:?}"))),
            };
            model.validate(self.cfg.dt).map_err(|e| Error::config(field("values"), e.to_string()))?;
            if self.dry {
                continue;
            }
            let mut mc = MonteCarloConfig::new(spec.clone(), group.clone(), self.cfg.dt / self.cfg.system.j, slots);
            mc.sampling = Sampling::Slots(slots);
            mc.error_model = model;
            mc.n_realizations = s.n_realizations.unwrap_or(self.cfg.n_realizations);
            mc.j = self.cfg.system.j;
            let t = monte_carlo(&mc, &self.cache)?;
            let last = t.len() - 1;
            points.push((v, t.mean[last], t.stddev[last], t.n_realizations));
        }
        Ok(SweepResult { label: s.label.clone().unwrap_or_else(|| format!("{}_sweep", s.protocol)), parameter: s.parameter, points })
    }
}

/// Computes every curve and sweep of `cfg`; relative file references resolve
/// against `base_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, base_dir: &FsPath) -> Result<(Vec<CurveResult>, Vec<SweepResult>)> {
    let r = Runner::new(cfg, base_dir)?;
    let curves = cfg.curves.iter().enumerate().map(|(i, c)| r.curve(i, c)).collect::<Result<Vec<_>>>()?;
    let sweeps = cfg.sweeps.iter().enumerate().map(|(i, s)| r.sweep(i, s)).collect::<Result<Vec<_>>>()?;
    Ok((curves, sweeps))
}

/// One line per planned curve or sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanEntry {
    pub label: String,
    pub protocol: String,
    pub n_realizations: usize,
}

/// Validates `cfg` fully (protocols, groups, paths, error models, slot
/// counts, replay files) without propagating anything.
pub fn check_experiment(cfg: &ExperimentConfig, base_dir: &FsPath) -> Result<Vec<PlanEntry>> {
    let mut r = Runner::new(cfg, base_dir)?;
    r.dry = true;
    let mut out = Vec::new();
    for (i, c) in cfg.curves.iter().enumerate() {
        let res = r.curve(i, c)?;
        out.push(PlanEntry { label: res.label, protocol: res.protocol, n_realizations: res.trace.n_realizations });
    }
    for (i, s) in cfg.sweeps.iter().enumerate() {
        let res = r.sweep(i, s)?;
        out.push(PlanEntry { label: res.label, protocol: s.protocol.clone(), n_realizations: s.n_realizations.unwrap_or(cfg.n_realizations) });
    }
    Ok(out)
}

fn write_file(path: &FsPath, f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Runs the config at `config_path` and writes CSVs and `manifest.toml` into `out_dir`.
pub fn run_file(config_path: &FsPath, out_dir: &FsPath) -> Result<Manifest> {
    let start = Instant::now();
    let (cfg, text) = ExperimentConfig::load(config_path)?;
    let base = config_path.parent().unwrap_or(FsPath::new("."));
    let (curves, sweeps) = run_experiment(&cfg, base)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut manifest = Manifest {
        name: cfg.name.clone(),
        seed: cfg.seed,
        config_hash: blob_hash(text.as_bytes()),
        wall_time_s: 0.0,
        version: env!("CARGO_PKG_VERSION").to_string(),
        curves: Vec::new(),
        sweeps: Vec::new(),
    };
    for c in &curves {
        let file = format!("{}.csv", file_stem(&c.label));
        write_file(&out_dir.join(&file), |b| c.trace.write_csv(b))?;
        if cfg.save_realizations {
            let f = format!("{}.realizations.csv", file_stem(&c.label));
            write_file(&out_dir.join(f), |b| c.trace.write_realizations_csv(b))?;
        }
        manifest.curves.push(ManifestEntry {
            label: c.label.clone(),
            protocol: c.protocol.clone(),
            file,
            n_realizations: c.trace.n_realizations,
            seed: c.trace.seed,
        });
    }
    for (s, sc) in sweeps.iter().zip(&cfg.sweeps) {
        let file = format!("{}.sweep.csv", file_stem(&s.label));
        write_file(&out_dir.join(&file), |b| s.write_csv(b))?;
        manifest.sweeps.push(ManifestEntry {
            label: s.label.clone(),
            protocol: sc.protocol.clone(),
            file,
            n_realizations: sc.n_realizations.unwrap_or(cfg.n_realizations),
            seed: sc.seed.unwrap_or(cfg.seed),
        });
    }
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    let text = toml::to_string(&manifest).map_err(|e| Error::Parse(format!("manifest: {e}")))?;
    let mpath = out_dir.join("manifest.toml");
    fs::write(&mpath, text).map_err(|e| Error::io(&mpath, e))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
name = "small"
seed = 3
n_realizations = 4
dt = 0.1
horizon = 1.6
group = "GZY"

[system]
n_qubits = 4

[[curve]]
protocol = "PDD"

[[curve]]
protocol = "RPD"
"#;

    #[test]
    fn blob_hash_matches_git() {
        // `printf 'hello\n' | git hash-object --stdin` with sha256 object format
        assert_eq!(blob_hash(b"hello\n"), "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4");
    }

    #[test]
    fn parses_and_runs() {
        let cfg = ExperimentConfig::from_toml(SMALL).unwrap();
        let (curves, _) = run_experiment(&cfg, FsPath::new(".")).unwrap();
        assert_eq!(curves.len(), 2);
        assert_eq!(curves[0].trace.len(), 5);
        assert!(curves[0].trace.stddev.iter().all(|&s| s == 0.0));
        assert_eq!(curves[1].trace.n_realizations, 4);
    }

    #[test]
    fn unknown_field_is_config_error() {
        let bad = SMALL.replace("seed = 3", "sead = 3");
        assert!(matches!(ExperimentConfig::from_toml(&bad), Err(Error::Config { .. })));
    }

    #[test]
    fn fractional_horizon_rejected() {
        let bad = SMALL.replace("horizon = 1.6", "horizon = 1.65");
        let cfg = ExperimentConfig::from_toml(&bad).unwrap();
        let err = run_experiment(&cfg, FsPath::new(".")).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "horizon"), "{err}");
    }
}
