//! Compilation of decoupling protocols into per-slot toggling frames and the
//! equivalent physical pulse stream.
//!
//! Slot `k` (free evolution over `[kΔt, (k+1)Δt]`) is spent in frame `F_k`, so the
//! toggled Hamiltonian is `F_k† H₀ F_k`. The pulse at `t_k` is `P_k = F_k F_{k−1}†`
//! (`P_0 = F_0`), and the control propagator is `U_c(t_n) = F_n` up to phase.
//! A schedule over `n` slots stores `n + 1` frames; the last one is entered at the
//! horizon and fixes `P_n`.

mod labels;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use labels::{
    cdd_labels, format_labels, h2_labels, opt_seq_lines, parse_labels, pdd_labels, scpd_labels, sdd_labels,
    to_group_indices, MAX_LEVEL,
};

use crate::error::{Error, Result};
use crate::groups::{sample_pauli_group_element, DDGroup, Path};
use crate::pauli::PauliString;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    Pdd,
    Sdd,
    Cdd,
    Pcdd(u32),
    Scpd,
    Pscpd(u32),
    H2,
    Ph2,
    Nrd,
    Emd1,
    Emd2,
    Rpd,
    Srpd,
    PseudoRpd,
    Esdd,
    Epcdd(u32),
    Epscpd(u32),
    Rh2,
    Eh2,
    AlgorReplay,
}

impl ProtocolKind {
    pub fn is_randomized(self) -> bool {
        use ProtocolKind::*;
        matches!(self, Nrd | Emd1 | Emd2 | Rpd | Srpd | PseudoRpd | Esdd | Epcdd(_) | Epscpd(_) | Rh2 | Eh2)
    }

    /// Kinds whose labels follow a fixed control path.
    pub fn uses_path(self) -> bool {
        use ProtocolKind::*;
        matches!(
            self,
            Pdd | Sdd | Cdd | Pcdd(_) | Scpd | Pscpd(_) | H2 | Ph2 | Emd1 | Emd2 | Esdd | Epcdd(_) | Epscpd(_) | Eh2
        )
    }

    /// Border source used by embedded kinds when none is configured.
    pub fn default_border(self) -> Option<BorderSource> {
        use ProtocolKind::*;
        match self {
            Emd1 => Some(BorderSource::SameGroup),
            Emd2 | Esdd | Epcdd(_) | Epscpd(_) | Eh2 => Some(BorderSource::PauliGroup),
            _ => None,
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ProtocolKind::*;
        match self {
            Pdd => write!(f, "PDD"),
            Sdd => write!(f, "SDD"),
            Cdd => write!(f, "CDD"),
            Pcdd(l) => write!(f, "PCDD{l}"),
            Scpd => write!(f, "SCPD"),
            Pscpd(m) => write!(f, "PSCPD{m}"),
            H2 => write!(f, "H2"),
            Ph2 => write!(f, "PH2"),
            Nrd => write!(f, "NRD"),
            Emd1 => write!(f, "EMD1"),
            Emd2 => write!(f, "EMD2"),
            Rpd => write!(f, "RPD"),
            Srpd => write!(f, "SRPD"),
            PseudoRpd => write!(f, "PSEUDO_RPD"),
            Esdd => write!(f, "ESDD"),
            Epcdd(l) => write!(f, "EPCDD{l}"),
            Epscpd(m) => write!(f, "EPSCPD{m}"),
            Rh2 => write!(f, "RH2"),
            Eh2 => write!(f, "EH2"),
            AlgorReplay => write!(f, "ALGOR_REPLAY"),
        }
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    /// Accepts names such as `PDD`, `PCDD2`, `PCDD(2)`, `EPSCPD_2`, `PSEUDO-RPD`.
    fn from_str(s: &str) -> Result<Self> {
        use ProtocolKind::*;
        let t: String = s
            .trim()
            .to_ascii_uppercase()
            .chars()
            .filter(|c| !matches!(c, '(' | ')' | '_' | '-' | ' '))
            .collect();
        let level = |prefix: &str| -> Option<Result<u32>> {
            t.strip_prefix(prefix).filter(|r| !r.is_empty()).map(|r| {
                r.parse::<u32>()
                    .ok()
                    .filter(|&l| (1..=MAX_LEVEL).contains(&l))
                    .ok_or_else(|| Error::Parse(format!("bad level in protocol `{s}`")))
            })
        };
        Ok(match t.as_str() {
            "PDD" => Pdd,
            "SDD" => Sdd,
            "CDD" => Cdd,
            "SCPD" => Scpd,
            "H2" => H2,
            "PH2" => Ph2,
            "NRD" => Nrd,
            "EMD1" => Emd1,
            "EMD2" => Emd2,
            "RPD" => Rpd,
            "SRPD" => Srpd,
            "PSEUDORPD" => PseudoRpd,
            "ESDD" => Esdd,
            "RH2" => Rh2,
            "EH2" => Eh2,
            "ALGOR" | "ALGORREPLAY" => AlgorReplay,
            _ => {
                // Longest prefixes first: EPSCPD before PSCPD, EPCDD before PCDD.
                if let Some(l) = level("EPSCPD") {
                    Epscpd(l?)
                } else if let Some(l) = level("PSCPD") {
                    Pscpd(l?)
                } else if let Some(l) = level("EPCDD") {
                    Epcdd(l?)
                } else if let Some(l) = level("PCDD") {
                    Pcdd(l?)
                } else {
                    return Err(Error::Parse(format!("unknown protocol `{s}`")));
                }
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BorderSource {
    SameGroup,
    PauliGroup,
}

/// For each of the 24 starting paths of a four-element group, a 24-slot
/// sequence (1-based group-index labels) beginning with that path.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompletionTable {
    entries: BTreeMap<Vec<usize>, Vec<usize>>,
}

impl CompletionTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a completion; the block must be 24 labels starting with `start`.
    pub fn insert(&mut self, block: Vec<usize>) -> Result<()> {
        if block.len() != 24 || block.iter().any(|&l| !(1..=4).contains(&l)) {
            return Err(Error::Parameter(format!("not a 24-slot block: {}", format_labels(&block))));
        }
        self.entries.insert(block[..4].to_vec(), block);
        Ok(())
    }

    pub fn get(&self, start: &[usize]) -> Option<&[usize]> {
        self.entries.get(start).map(|v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn starts(&self) -> impl Iterator<Item = &[usize]> {
        self.entries.keys().map(|k| k.as_slice())
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[usize]> {
        self.entries.values().map(|v| v.as_slice())
    }

    /// One block per line in dash notation.
    pub fn to_text(&self) -> String {
        self.entries.values().map(|b| format_labels(b) + "\n").collect()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut t = CompletionTable::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            t.insert(parse_labels(line)?)?;
        }
        Ok(t)
    }
}

/// Everything needed to compile one protocol.
#[derive(Clone, Debug)]
pub struct ProtocolSpec {
    pub kind: ProtocolKind,
    /// Control path for fixed-path kinds; identity order when `None`.
    pub path: Option<Path>,
    pub seed: u64,
    /// Overrides [`ProtocolKind::default_border`].
    pub border: Option<BorderSource>,
    /// Whether embedded kinds also draw a border for the first block.
    pub border_at_start: bool,
    /// Label stream (1-based group indices) for `AlgorReplay`.
    pub replay: Option<Vec<usize>>,
    /// Completion table for `Rh2`.
    pub rh2_table: Option<Arc<CompletionTable>>,
}

impl ProtocolSpec {
    pub fn new(kind: ProtocolKind) -> Self {
        ProtocolSpec { kind, path: None, seed: 0, border: None, border_at_start: true, replay: None, rh2_table: None }
    }

    pub fn with_path(mut self, path: Path) -> Self {
        self.path = Some(path);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_border(mut self, border: BorderSource) -> Self {
        self.border = Some(border);
        self
    }

    pub fn with_replay(mut self, labels: Vec<usize>) -> Self {
        self.replay = Some(labels);
        self
    }

    pub fn with_rh2_table(mut self, table: Arc<CompletionTable>) -> Self {
        self.rh2_table = Some(table);
        self
    }

    pub fn name(&self) -> String {
        self.kind.to_string()
    }

    /// Generator for realization `r`: ChaCha8 seeded with `seed`, stream `r`.
    pub fn rng(&self, realization: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(realization);
        rng
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pulse {
    /// Bare Pauli string applied at this boundary.
    pub op: PauliString,
    pub is_identity: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub dt: f64,
    pub name: String,
    /// `n_slots + 1` group indices (frame without border).
    labels: Vec<usize>,
    /// `n_slots + 1` frames `g_label · border`.
    frames: Vec<PauliString>,
    /// Per-slot border elements for embedded kinds.
    borders: Option<Vec<PauliString>>,
    pulses: Vec<Pulse>,
    /// Repetition period in slots for cyclic deterministic kinds.
    period: Option<usize>,
}

impl Schedule {
    /// Builds a schedule from `n_slots + 1` group indices and optional borders.
    pub fn from_parts(
        name: impl Into<String>,
        group: &DDGroup,
        dt: f64,
        labels: Vec<usize>,
        borders: Option<Vec<PauliString>>,
        period: Option<usize>,
    ) -> Result<Self> {
        if labels.len() < 2 {
            return Err(Error::Parameter("a schedule needs at least one slot".into()));
        }
        if !(dt > 0.0) {
            return Err(Error::Parameter(format!("Δt must be positive, got {dt}")));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= group.len()) {
            return Err(Error::Parameter(format!("label {bad} outside group of order {}", group.len())));
        }
        if let Some(b) = &borders {
            if b.len() != labels.len() {
                return Err(Error::Parameter("border list length differs from label list".into()));
            }
        }
        let frames: Vec<PauliString> = labels
            .iter()
            .enumerate()
            .map(|(k, &l)| {
                let g = *group.element(l);
                match &borders {
                    Some(b) => g.multiply(&b[k]).map(|p| p.bare()),
                    None => Ok(g),
                }
            })
            .collect::<Result<_>>()?;
        let mut pulses = Vec::with_capacity(frames.len());
        pulses.push(Pulse { op: frames[0], is_identity: frames[0].is_identity() });
        for w in frames.windows(2) {
            let op = w[1].multiply(&w[0].adjoint())?.bare();
            pulses.push(Pulse { op, is_identity: op.is_identity() });
        }
        Ok(Schedule { dt, name: name.into(), labels, frames, borders, pulses, period })
    }

    pub fn n_slots(&self) -> usize {
        self.frames.len() - 1
    }

    pub fn n_qubits(&self) -> usize {
        self.frames[0].n_qubits()
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.n_slots() as f64
    }

    /// Group index of the frame during each of the `n_slots` slots.
    pub fn toggling_labels(&self) -> &[usize] {
        &self.labels[..self.n_slots()]
    }

    /// Frames for slots `0..=n_slots`.
    pub fn frames(&self) -> &[PauliString] {
        &self.frames
    }

    pub fn frame(&self, k: usize) -> &PauliString {
        &self.frames[k]
    }

    pub fn borders(&self) -> Option<&[PauliString]> {
        self.borders.as_deref()
    }

    /// Pulses at `t_0 … t_n` (`n_slots + 1` entries).
    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn period(&self) -> Option<usize> {
        self.period
    }

    /// `P_c(t_n) = U_c(t_n)†`, as a bare string.
    pub fn frame_correction(&self, n: usize) -> Result<PauliString> {
        self.frames
            .get(n)
            .map(|f| f.adjoint().bare())
            .ok_or_else(|| Error::Parameter(format!("slot {n} beyond horizon {}", self.n_slots())))
    }

    /// Product of the pulse stream up to `t_n` (inclusive), bare.
    pub fn control_propagator(&self, n: usize) -> PauliString {
        let mut u = PauliString::identity(self.n_qubits());
        for p in &self.pulses[..=n] {
            u = p.op.multiply(&u).expect("same size").bare();
        }
        u
    }

    /// 1-based group-index labels of the first `n_slots` slots, dash notation.
    pub fn label_string(&self) -> String {
        let l: Vec<usize> = self.toggling_labels().iter().map(|g| g + 1).collect();
        format_labels(&l)
    }
}

/// Compiles `spec` for `horizon_slots` slots. Randomized kinds draw from `rng`;
/// deterministic kinds ignore it.
pub fn generate<R: Rng + ?Sized>(
    spec: &ProtocolSpec,
    group: &DDGroup,
    dt: f64,
    horizon_slots: usize,
    rng: &mut R,
) -> Result<Schedule> {
    use ProtocolKind::*;
    if horizon_slots == 0 {
        return Err(Error::Parameter("horizon must contain at least one slot".into()));
    }
    let n = group.len();
    let len = horizon_slots + 1;
    let path = match &spec.path {
        Some(p) => {
            labels::check_path(group, p)?;
            p.clone()
        }
        None => Path::identity(n),
    };
    if spec.kind.uses_path() && !path.starts_with_identity() {
        return Err(Error::Parameter(format!("{} requires a path starting with the identity element", spec.kind)));
    }
    let name = spec.name();
    let periodic = |unit: Vec<usize>| -> Result<(Vec<usize>, usize)> {
        let g = to_group_indices(&unit, &path)?;
        Ok(((0..len).map(|k| g[k % g.len()]).collect(), g.len()))
    };
    let needs_four = |what: &str| -> Result<()> {
        if n != 4 {
            return Err(Error::Parameter(format!("{what} is defined for four-element groups, got order {n}")));
        }
        Ok(())
    };

    let (labels, borders, period) = match spec.kind {
        Pdd => {
            let (l, p) = periodic(pdd_labels(n))?;
            (l, None, Some(p))
        }
        Sdd => {
            let (l, p) = periodic(sdd_labels(n))?;
            (l, None, Some(p))
        }
        Pcdd(level) => {
            let (l, p) = periodic(cdd_labels(level, group, &path)?)?;
            (l, None, Some(p))
        }
        Pscpd(m) => {
            let (l, p) = periodic(scpd_labels(m, n)?)?;
            (l, None, Some(p))
        }
        H2 | Ph2 => {
            needs_four("H2")?;
            let (l, p) = periodic(h2_labels())?;
            (l, None, Some(p))
        }
        Cdd => {
            let level = level_for(len, n, 1)?;
            (to_group_indices(&cdd_labels(level, group, &path)?[..len], &path)?, None, None)
        }
        Scpd => {
            let level = level_for(len, n, 2)?;
            (to_group_indices(&scpd_labels(level, n)?[..len], &path)?, None, None)
        }
        AlgorReplay => {
            let stream = spec
                .replay
                .as_ref()
                .ok_or_else(|| Error::Parameter("ALGOR_REPLAY needs a replay label stream".into()))?;
            if stream.len() < len {
                return Err(Error::Parameter(format!(
                    "replay stream has {} slots, horizon needs {len}",
                    stream.len()
                )));
            }
            let l = stream[..len]
                .iter()
                .map(|&x| x.checked_sub(1).filter(|&g| g < n))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Parameter("replay label outside the group".into()))?;
            (l, None, None)
        }
        Nrd => ((0..len).map(|_| rng.random_range(0..n)).collect(), None, None),
        Rpd | PseudoRpd | Srpd => {
            let mut l = Vec::with_capacity(len + 2 * n);
            while l.len() < len {
                let mut perm: Vec<usize> = (0..n).collect();
                if spec.kind == PseudoRpd {
                    perm[1..].shuffle(rng);
                } else {
                    perm.shuffle(rng);
                }
                l.extend_from_slice(&perm);
                if spec.kind == Srpd {
                    l.extend(perm.iter().rev());
                }
            }
            l.truncate(len);
            (l, None, None)
        }
        Rh2 => {
            needs_four("RH2")?;
            let table = spec
                .rh2_table
                .as_ref()
                .ok_or_else(|| Error::config("rh2_table", "RH2 requires a completion table"))?;
            let mut l = Vec::with_capacity(len + 24);
            while l.len() < len {
                let mut start: Vec<usize> = (1..=4).collect();
                start.shuffle(rng);
                l.extend(rh2_block(&start, table)?.iter().map(|x| x - 1));
            }
            l.truncate(len);
            (l, None, None)
        }
        Emd1 | Emd2 | Esdd | Epcdd(_) | Epscpd(_) | Eh2 => {
            let unit = match spec.kind {
                Emd1 | Emd2 => pdd_labels(n),
                Esdd => sdd_labels(n),
                Epcdd(level) => cdd_labels(level, group, &path)?,
                Epscpd(m) => scpd_labels(m, n)?,
                _ => {
                    needs_four("EH2")?;
                    h2_labels()
                }
            };
            let inner = to_group_indices(&unit, &path)?;
            let source = spec.border.or(spec.kind.default_border()).expect("embedded kind");
            let labels: Vec<usize> = (0..len).map(|k| inner[k % inner.len()]).collect();
            let borders = embed(len, inner.len(), source, group, spec.border_at_start, rng);
            (labels, Some(borders), Some(inner.len()))
        }
    };
    // Period is only meaningful for unbordered kinds.
    let period = if borders.is_some() { None } else { period };
    Schedule::from_parts(name, group, dt, labels, borders, period)
}

/// Convenience wrapper drawing from the per-realization generator of `spec`.
pub fn generate_realization(
    spec: &ProtocolSpec,
    group: &DDGroup,
    dt: f64,
    horizon_slots: usize,
    realization: u64,
) -> Result<Schedule> {
    generate(spec, group, dt, horizon_slots, &mut spec.rng(realization))
}

/// Per-slot border elements for `len` slots split into blocks of `block` slots:
/// every block is conjugated by a freshly drawn element. With `at_start == false`
/// the first block keeps the identity border.
pub fn embed<R: Rng + ?Sized>(
    len: usize,
    block: usize,
    source: BorderSource,
    group: &DDGroup,
    at_start: bool,
    rng: &mut R,
) -> Vec<PauliString> {
    let nq = group.n_qubits();
    let mut out = Vec::with_capacity(len);
    let mut b = 0;
    while out.len() < len {
        let g = if b == 0 && !at_start {
            PauliString::identity(nq)
        } else {
            match source {
                BorderSource::SameGroup => *group.element(rng.random_range(0..group.len())),
                BorderSource::PauliGroup => sample_pauli_group_element(nq, rng),
            }
        };
        out.extend(std::iter::repeat_n(g, block.min(len - out.len())));
        b += 1;
    }
    out
}

/// The stored 24-slot completion for a starting path (1-based labels).
pub fn rh2_block<'a>(start: &[usize], table: &'a CompletionTable) -> Result<&'a [usize]> {
    table
        .get(start)
        .ok_or_else(|| Error::config("rh2_table", format!("no completion for start {}", format_labels(start))))
}

/// Smallest level whose sequence covers `len` slots (`factor·n^level ≥ len`).
fn level_for(len: usize, n: usize, factor: usize) -> Result<u32> {
    let mut level = 1u32;
    let mut size = factor * n;
    while size < len {
        level += 1;
        size *= n;
        if level > MAX_LEVEL {
            return Err(Error::Resource(format!("horizon of {len} slots needs more than {MAX_LEVEL} levels")));
        }
    }
    Ok(level)
}
