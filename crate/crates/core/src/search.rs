//! Greedy path-by-path sequence construction (ALGOR).
//!
//! Each cycle appends the group path that maximizes the entanglement fidelity
//! of the logical-frame propagator at the end of that cycle.

use std::io::Write;

use faer::Mat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::engine::{entanglement_fidelity, expm_hermitian};
use crate::error::{Error, Result};
use crate::groups::{all_paths, DDGroup};
use crate::linalg;
use crate::pauli::PauliSum;
use crate::schedule::format_labels;

type CMat = Mat<C64>;

/// Candidates are tied when their fitness differs by less than this.
pub const TIE_TOL: f64 = 1e-12;
/// Largest `|𝒢|!` evaluated without complaint.
pub const SOFT_CAP: usize = 24;
/// Hard limit on `|𝒢|!`.
pub const HARD_CAP: usize = 5040;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Fitness {
    #[default]
    EntanglementFidelity,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub group: DDGroup,
    pub h0: PauliSum,
    pub dt: f64,
    /// Number of cycles to commit.
    pub horizon: usize,
    pub fitness: Fitness,
}

impl SearchConfig {
    pub fn new(group: DDGroup, h0: PauliSum, dt: f64, horizon: usize) -> Self {
        SearchConfig { group, h0, dt, horizon, fitness: Fitness::EntanglementFidelity }
    }

    fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Parameter("search horizon must be at least one cycle".into()));
        }
        if !(self.dt > 0.0) {
            return Err(Error::Parameter(format!("Δt must be positive, got {}", self.dt)));
        }
        if self.h0.n_qubits() != self.group.n_qubits() {
            return Err(Error::Dimension { left: self.h0.n_qubits(), right: self.group.n_qubits() });
        }
        Ok(())
    }
}

/// One committed cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchStep {
    pub cycle: usize,
    /// End time of the cycle, `(cycle+1)·|𝒢|·Δt`.
    pub time: f64,
    /// Committed path, 1-based group indices.
    pub path: Vec<usize>,
    pub fitness: f64,
    /// Worst candidate at this step.
    pub worst: f64,
    /// Candidates within [`TIE_TOL`] of the best.
    pub n_tied: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    /// Committed label stream, 1-based group indices.
    pub stream: Vec<usize>,
    pub steps: Vec<SearchStep>,
}

impl SearchResult {
    pub fn dash_notation(&self) -> String {
        format_labels(&self.stream)
    }

    pub fn write_log_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let ioerr = |e: csv::Error| Error::Parse(format!("csv: {e}"));
        wr.write_record(["cycle", "time", "path", "fitness", "worst", "n_tied"]).map_err(ioerr)?;
        for s in &self.steps {
            wr.write_record([
                s.cycle.to_string(),
                format!("{:.16e}", s.time),
                format_labels(&s.path),
                format!("{:.16e}", s.fitness),
                format!("{:.16e}", s.worst),
                s.n_tied.to_string(),
            ])
            .map_err(ioerr)?;
        }
        wr.flush().map_err(|e| Error::Parse(format!("csv: {e}")))?;
        Ok(())
    }
}

/// `|𝒢|!`, or `None` on overflow.
fn factorial(n: usize) -> Option<usize> {
    (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k))
}

/// Candidate paths in lexicographic order, after the size check.
fn candidates(group: &DDGroup) -> Result<Vec<Vec<usize>>> {
    let n = group.len();
    let count = factorial(n).filter(|&c| c <= HARD_CAP).ok_or_else(|| {
        Error::Resource(format!("{n}! candidate paths exceed the search cap of {HARD_CAP}"))
    })?;
    if count > SOFT_CAP {
        log::warn!("greedy search over {count} paths per cycle");
    }
    let mut paths: Vec<Vec<usize>> = all_paths(n).into_iter().map(|p| p.order().to_vec()).collect();
    paths.sort();
    Ok(paths)
}

/// Slot propagators in the logical frame, `g† U₀(Δt) g` for each element.
fn toggled_steps(cfg: &SearchConfig) -> Result<Vec<CMat>> {
    let h = cfg.h0.to_matrix()?;
    let u0 = expm_hermitian(h.as_ref(), cfg.dt)?;
    Ok(cfg.group.elements().iter().map(|g| linalg::pauli_conjugate(u0.as_ref(), g)).collect())
}

/// Fitness of every candidate appended to `u`, sharing prefixes between paths.
fn evaluate(u: &CMat, steps: &[CMat], paths: &[Vec<usize>]) -> Vec<f64> {
    paths
        .par_chunk_by(|a, b| a[0] == b[0])
        .flat_map_iter(|chunk| {
            // stack[k] = propagator after the first k+1 slots of `prev`
            let mut stack: Vec<CMat> = Vec::new();
            let mut prev: &[usize] = &[];
            let mut out = Vec::with_capacity(chunk.len());
            for p in chunk {
                let shared = prev.iter().zip(p).take_while(|(a, b)| a == b).count();
                stack.truncate(shared.min(p.len() - 1));
                while stack.len() < p.len() {
                    let next = linalg::mul(steps[p[stack.len()]].as_ref(), stack.last().unwrap_or(u).as_ref());
                    stack.push(next);
                }
                out.push(entanglement_fidelity(stack[p.len() - 1].as_ref()));
                prev = p;
            }
            out
        })
        .collect()
}

/// Runs the greedy search for `cfg.horizon` cycles.
pub fn greedy_search(cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let paths = candidates(&cfg.group)?;
    let steps = toggled_steps(cfg)?;
    let mut u = linalg::identity(1 << cfg.group.n_qubits());
    let mut result = SearchResult { stream: Vec::new(), steps: Vec::new() };
    let cycle_len = cfg.group.len() as f64 * cfg.dt;
    for cycle in 0..cfg.horizon {
        let fit = evaluate(&u, &steps, &paths);
        let best = fit.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let worst = fit.iter().copied().fold(f64::INFINITY, f64::min);
        // lexicographic tie-break: first candidate within tolerance of the max
        let pick = fit.iter().position(|&f| f >= best - TIE_TOL).expect("at least one candidate");
        let n_tied = fit.iter().filter(|&&f| f >= best - TIE_TOL).count();
        for &g in &paths[pick] {
            u = linalg::mul(steps[g].as_ref(), u.as_ref());
        }
        let path: Vec<usize> = paths[pick].iter().map(|g| g + 1).collect();
        log::debug!("cycle {cycle}: {} F={:.12}", format_labels(&path), fit[pick]);
        result.stream.extend(&path);
        result.steps.push(SearchStep {
            cycle,
            time: (cycle + 1) as f64 * cycle_len,
            path,
            fitness: fit[pick],
            worst,
            n_tied,
        });
    }
    Ok(result)
}

/// Entanglement fidelity after each cycle of a fixed 1-based label stream.
pub fn stream_fidelities(cfg: &SearchConfig, stream: &[usize]) -> Result<Vec<f64>> {
    let steps = toggled_steps(cfg)?;
    let m = cfg.group.len();
    let mut u = linalg::identity(1 << cfg.group.n_qubits());
    let mut out = Vec::with_capacity(stream.len() / m);
    for (k, &l) in stream.iter().enumerate() {
        let g = l
            .checked_sub(1)
            .filter(|&g| g < m)
            .ok_or_else(|| Error::Parameter(format!("label {l} outside 1..={m}")))?;
        u = linalg::mul(steps[g].as_ref(), u.as_ref());
        if (k + 1) % m == 0 {
            out.push(entanglement_fidelity(u.as_ref()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{efficient_group, EfficientKind};
    use crate::model::{build_hamiltonian, SpinChainParams};

    fn cfg(n: usize, alpha: f64, horizon: usize) -> SearchConfig {
        let g = efficient_group(EfficientKind::ZY, n).unwrap();
        let h = build_hamiltonian(&SpinChainParams::nn(n, 1.0, alpha)).unwrap();
        SearchConfig::new(g, h, 0.1, horizon)
    }

    #[test]
    fn prefix_sharing_matches_direct() {
        let c = cfg(4, 1.4, 1);
        let steps = toggled_steps(&c).unwrap();
        let paths = candidates(&c.group).unwrap();
        let u = linalg::identity(16);
        let fast = evaluate(&u, &steps, &paths);
        for (p, f) in paths.iter().zip(&fast) {
            let mut v = u.clone();
            for &g in p {
                v = linalg::mul(steps[g].as_ref(), v.as_ref());
            }
            assert!((entanglement_fidelity(v.as_ref()) - f).abs() < 1e-14);
        }
    }

    #[test]
    fn isotropic_first_cycle_ties() {
        let r = greedy_search(&cfg(4, 1.0, 1)).unwrap();
        assert_eq!(r.steps[0].n_tied, 24);
        assert_eq!(r.stream, vec![1, 2, 3, 4]);
    }

    #[test]
    fn committed_is_argmax_and_replays() {
        let c = cfg(4, 1.0, 4);
        let r = greedy_search(&c).unwrap();
        let replay = stream_fidelities(&c, &r.stream).unwrap();
        for (s, f) in r.steps.iter().zip(&replay) {
            assert!((s.fitness - f).abs() < 1e-12);
            assert!(s.fitness >= s.worst);
        }
        assert_eq!(crate::schedule::parse_labels(&r.dash_notation()).unwrap(), r.stream);
    }

    #[test]
    fn oversized_group_refused() {
        let g = crate::groups::nested_group(3).unwrap();
        let h = build_hamiltonian(&SpinChainParams::nn(g.n_qubits(), 1.0, 1.0)).unwrap();
        let c = SearchConfig::new(g, h, 0.1, 1);
        assert!(matches!(greedy_search(&c), Err(Error::Resource(_))));
    }
}
