//! Toggling-label sequences (1-based, relative to a control path) and the
//! dash notation `(1234-2143-…)`.

use crate::error::{Error, Result};
use crate::groups::{DDGroup, Path};

/// `(1 … n, n … 1)`.
pub fn sdd_labels(n: usize) -> Vec<usize> {
    (1..=n).chain((1..=n).rev()).collect()
}

pub fn pdd_labels(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

/// Largest concatenation / permutation level accepted.
pub const MAX_LEVEL: u32 = 10;

/// Level-`ℓ` concatenated sequence: block `j` of level `ℓ+1` is level `ℓ`
/// with every frame multiplied on the right by `g_{path[j]}`.
pub fn cdd_labels(level: u32, group: &DDGroup, path: &Path) -> Result<Vec<usize>> {
    if level == 0 || level > MAX_LEVEL || (group.len() as f64).powi(level as i32) > 4f64.powi(MAX_LEVEL as i32) {
        return Err(Error::Parameter(format!("concatenation level {level} outside 1..={MAX_LEVEL}")));
    }
    check_path(group, path)?;
    let order = path.order();
    let pos = inverse(order);
    let mut seq: Vec<usize> = order.to_vec(); // group indices
    for _ in 1..level {
        let mut next = Vec::with_capacity(seq.len() * order.len());
        for &outer in order {
            next.extend(seq.iter().map(|&f| group.product_index(f, outer)));
        }
        seq = next;
    }
    Ok(seq.into_iter().map(|g| pos[g] + 1).collect())
}

/// Symmetrized cyclic-permutation sequence of level `m` for a group of order `n`.
///
/// Level 1 is `(1…n, n…1)`. Level 2 is the concatenation over `k` of the PDD
/// cycle rotated right by `k` followed by its reversal. Each further level
/// concatenates the `n` level units rotated right by `k`, for `k = 0 … n−1`.
pub fn scpd_labels(m: u32, n: usize) -> Result<Vec<usize>> {
    if m == 0 || m > MAX_LEVEL || 2.0 * (n as f64).powi(m as i32) > 2.0 * 4f64.powi(MAX_LEVEL as i32) {
        return Err(Error::Parameter(format!("permutation level {m} outside 1..={MAX_LEVEL}")));
    }
    if m == 1 {
        return Ok(sdd_labels(n));
    }
    let rotated = |k: usize| -> Vec<usize> { (0..n).map(|i| (i + n - k) % n + 1).collect() };
    let mut units: Vec<Vec<usize>> = (0..n)
        .map(|k| {
            let p = rotated(k);
            p.iter().chain(p.iter().rev()).copied().collect()
        })
        .collect();
    for _ in 2..m {
        units = (0..n).map(|k| (0..n).flat_map(|i| units[(i + n - k) % n].iter().copied()).collect()).collect();
    }
    Ok(units.concat())
}

/// The 24-slot supercycle cancelling the first three Magnus orders.
pub fn h2_labels() -> Vec<usize> {
    parse_labels("1234-2143-2314-3241-3124-1342").expect("static literal")
}

/// The second and third 24-slot lines of the published greedy-search output.
pub fn opt_seq_lines() -> [Vec<usize>; 3] {
    [
        h2_labels(),
        parse_labels("4312-4213-1423-4132-2431-3421").expect("static literal"),
        parse_labels("4231-2413-4123-4321-3412-1432").expect("static literal"),
    ]
}

/// Maps 1-based path-relative labels to group indices.
pub fn to_group_indices(labels: &[usize], path: &Path) -> Result<Vec<usize>> {
    labels
        .iter()
        .map(|&l| {
            path.order()
                .get(l.wrapping_sub(1))
                .copied()
                .ok_or_else(|| Error::Parameter(format!("label {l} outside 1..={}", path.len())))
        })
        .collect()
}

/// `(1234-2143)` for single-digit labels; `(1,2,…,10-…)` otherwise.
pub fn format_labels(labels: &[usize]) -> String {
    let wide = labels.iter().any(|&l| l > 9);
    let groups: Vec<String> = labels
        .chunks(4)
        .map(|c| {
            let parts: Vec<String> = c.iter().map(|l| l.to_string()).collect();
            parts.join(if wide { "," } else { "" })
        })
        .collect();
    format!("({})", groups.join("-"))
}

/// Inverse of [`format_labels`]; parentheses and whitespace optional.
pub fn parse_labels(text: &str) -> Result<Vec<usize>> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let t = t.trim_start_matches('(').trim_end_matches(')');
    if t.is_empty() {
        return Ok(Vec::new());
    }
    let wide = t.contains(',');
    let mut out = Vec::new();
    for group in t.split('-') {
        if wide {
            for s in group.split(',') {
                out.push(s.parse().map_err(|_| Error::Parse(format!("bad label `{s}` in `{text}`")))?);
            }
        } else {
            for c in group.chars() {
                let d = c.to_digit(10).ok_or_else(|| Error::Parse(format!("bad label `{c}` in `{text}`")))?;
                out.push(d as usize);
            }
        }
    }
    if out.contains(&0) {
        return Err(Error::Parse(format!("labels are 1-based: `{text}`")));
    }
    Ok(out)
}

pub(crate) fn check_path(group: &DDGroup, path: &Path) -> Result<()> {
    if path.len() != group.len() {
        return Err(Error::Parameter(format!(
            "path of length {} for group {} of order {}",
            path.len(),
            group.name(),
            group.len()
        )));
    }
    Ok(())
}

fn inverse(order: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; order.len()];
    for (i, &g) in order.iter().enumerate() {
        inv[g] = i;
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{efficient_group, EfficientKind};

    #[test]
    fn sdd() {
        assert_eq!(format_labels(&sdd_labels(4)), "(1234-4321)");
    }

    #[test]
    fn cdd() {
        let g = efficient_group(EfficientKind::ZY, 4).unwrap();
        let p = Path::identity(4);
        assert_eq!(cdd_labels(1, &g, &p).unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(format_labels(&cdd_labels(2, &g, &p).unwrap()), "(1234-2143-3412-4321)");
        assert_eq!(cdd_labels(3, &g, &p).unwrap().len(), 64);
    }

    #[test]
    fn scpd() {
        assert_eq!(scpd_labels(1, 4).unwrap(), sdd_labels(4));
        assert_eq!(
            format_labels(&scpd_labels(2, 4).unwrap()),
            "(1234-4321-4123-3214-3412-2143-2341-1432)"
        );
        let l3 = scpd_labels(3, 4).unwrap();
        assert_eq!(l3.len(), 128);
        assert_eq!(&l3[..32], &scpd_labels(2, 4).unwrap()[..]);
    }

    #[test]
    fn notation_round_trip() {
        let h2 = h2_labels();
        assert_eq!(format_labels(&h2), "(1234-2143-2314-3241-3124-1342)");
        let wide = vec![1, 12, 3, 4, 16];
        assert_eq!(parse_labels(&format_labels(&wide)).unwrap(), wide);
        assert!(parse_labels("(1204)").is_err());
    }
}
