//! Completion table for randomized-path supercycles: for every starting path,
//! a 24-slot sequence with vanishing Magnus terms through second order.
//!
//! The preferred completion is the H2 supercycle with its labels permuted so
//! that it opens with the requested path. Where that relabeling does not
//! cancel (less symmetric Hamiltonians), an exhaustive search over three
//! half-PCDD₂ blocks takes over.

use rayon::prelude::*;

use super::{magnus0, magnus1, magnus2, toggled, ZERO_TOL};
use crate::error::{Error, Result};
use crate::groups::{all_paths, DDGroup};
use crate::pauli::PauliSum;
use crate::schedule::{h2_labels, CompletionTable};

/// `(abcd-badc)` for a starting path `abcd` (1-based labels).
pub fn half_pcdd2_block(start: &[usize]) -> Vec<usize> {
    let mut out = start.to_vec();
    out.extend([start[1], start[0], start[3], start[2]]);
    out
}

/// H2 with label `l` replaced by `start[l-1]`; opens with `start`.
pub fn relabeled_h2(start: &[usize]) -> Vec<usize> {
    h2_labels().iter().map(|&l| start[l - 1]).collect()
}

/// Largest coefficient of `H̄⁽⁰⁾`, `H̄⁽¹⁾`, `H̄⁽²⁾` for 1-based `labels` relative
/// to the group's own element order.
pub fn verify_cancellation(h0: &PauliSum, group: &DDGroup, labels: &[usize], dt: f64) -> Result<[f64; 3]> {
    let idx: Vec<usize> = labels
        .iter()
        .map(|&l| l.checked_sub(1).ok_or_else(|| Error::Parameter("labels are 1-based".into())))
        .collect::<Result<_>>()?;
    let seq = toggled(h0, group, &idx, dt)?;
    Ok([magnus0(&seq)?.max_abs(), magnus1(&seq)?.max_abs(), magnus2(&seq)?.max_abs()])
}

/// For each of the 24 starting paths, the relabeled H2 when it cancels, else
/// the lexicographically first pair of further half-PCDD₂ blocks that cancels
/// `H̄⁽²⁾` over the 24 slots. Every entry is verified on the flat sequence.
/// Starts without a completion are omitted and reported through `Err` only
/// when none at all exist.
pub fn build_rh2_completion_table(group: &DDGroup, h0: &PauliSum) -> Result<CompletionTable> {
    if group.len() != 4 {
        return Err(Error::Parameter(format!("completion tables need a four-element group, got {}", group.len())));
    }
    let dt = 0.1;
    let starts: Vec<Vec<usize>> =
        all_paths(4).into_iter().map(|p| p.order().iter().map(|g| g + 1).collect()).collect();
    // Block-level second-order terms; each half-PCDD₂ block already cancels orders 0 and 1.
    let blocks: Vec<(Vec<usize>, PauliSum)> = starts
        .iter()
        .map(|s| {
            let b = half_pcdd2_block(s);
            let idx: Vec<usize> = b.iter().map(|l| l - 1).collect();
            let seq = toggled(h0, group, &idx, dt)?;
            if !magnus0(&seq)?.equals_zero(ZERO_TOL) || !magnus1(&seq)?.equals_zero(ZERO_TOL) {
                return Err(Error::Domain(format!("block {:?} does not cancel first order", b)));
            }
            Ok((b, magnus2(&seq)?))
        })
        .collect::<Result<_>>()?;
    let found: Vec<Option<Vec<usize>>> = (0..blocks.len())
        .into_par_iter()
        .map(|first| -> Result<Option<Vec<usize>>> {
            let h2 = relabeled_h2(&starts[first]);
            if verify_cancellation(h0, group, &h2, dt)?.iter().all(|&x| x <= ZERO_TOL) {
                return Ok(Some(h2));
            }
            log::debug!("relabeled H2 does not cancel for start {:?}; searching", starts[first]);
            for second in 0..blocks.len() {
                let partial = (&blocks[first].1 + &blocks[second].1)?;
                for third in 0..blocks.len() {
                    if !(&partial + &blocks[third].1)?.equals_zero(ZERO_TOL) {
                        continue;
                    }
                    let seq: Vec<usize> =
                        [first, second, third].iter().flat_map(|&b| blocks[b].0.iter().copied()).collect();
                    let m = verify_cancellation(h0, group, &seq, dt)?;
                    if m.iter().all(|&x| x <= ZERO_TOL) {
                        return Ok(Some(seq));
                    }
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    let mut table = CompletionTable::new();
    for (i, seq) in found.into_iter().enumerate() {
        match seq {
            Some(s) => table.insert(s)?,
            None => log::warn!("no completion for start {:?}", starts[i]),
        }
    }
    if table.is_empty() {
        return Err(Error::Domain("no starting path admits a completion".into()));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{efficient_group, EfficientKind};
    use crate::model::{build_hamiltonian, SpinChainParams};

    fn table(alpha: f64) -> (DDGroup, PauliSum, CompletionTable) {
        let g = efficient_group(EfficientKind::ZY, 6).unwrap();
        let h = build_hamiltonian(&SpinChainParams::nn(6, 1.0, alpha)).unwrap();
        let t = build_rh2_completion_table(&g, &h).unwrap();
        (g, h, t)
    }

    #[test]
    fn identity_start_is_h2() {
        let (_, _, t) = table(1.0);
        assert_eq!(t.len(), 24);
        assert_eq!(t.get(&[1, 2, 3, 4]).unwrap(), &h2_labels()[..]);
        assert_eq!(t.get(&[1, 2, 4, 3]).unwrap(), &relabeled_h2(&[1, 2, 4, 3])[..]);
    }

    #[test]
    fn anisotropic_entries_cancel() {
        let (g, h, t) = table(1.3);
        assert_eq!(t.len(), 24);
        for b in t.blocks() {
            let m = verify_cancellation(&h, &g, b, 0.1).unwrap();
            assert!(m.iter().all(|&x| x <= ZERO_TOL), "{m:?}");
        }
    }
}
