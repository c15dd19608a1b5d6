//! Faber–Krahn certification on regular trees: among connected vertex sets
//! of a given size, the breadth-first ball has the smallest Dirichlet
//! eigenvalue.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{ball, build_space, Graph, GroundSpace, SpaceSpec, VertexSet};
use crate::operators::dirichlet_eigenvalue;
use crate::rearrange::DiscreteFunction;

use super::{Report, DEFAULT_TOLERANCE};

const MAX_SIZE: usize = 8;
const MAX_DEGREE: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaberKrahnRow {
    pub size: usize,
    pub subsets: usize,
    pub ball_eigenvalue: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// `min_eigenvalue - ball_eigenvalue`.
    pub margin: f64,
    pub minimizer: Vec<usize>,
}

/// Every connected set of `size` vertices that contains vertex 0, in a
/// breadth-first-built tree (children have larger indices than parents).
///
/// Each set is produced once: a vertex enters only after every earlier
/// candidate has been either taken or permanently skipped.
pub fn connected_rooted_subsets(graph: &Graph, size: usize) -> Vec<VertexSet> {
    fn grow(graph: &Graph, set: &mut Vec<usize>, cands: &[usize], size: usize, out: &mut Vec<VertexSet>) {
        if set.len() == size {
            out.push(VertexSet::new(set.iter().copied()));
            return;
        }
        for (i, &v) in cands.iter().enumerate() {
            let mut next: Vec<usize> = cands[i + 1..].to_vec();
            next.extend(graph.neighbors(v).iter().copied().filter(|&w| w > v));
            set.push(v);
            grow(graph, set, &next, size, out);
            set.pop();
        }
    }
    let mut out = Vec::new();
    if size == 0 || graph.vertex_count() == 0 {
        return out;
    }
    let first: Vec<usize> = graph.neighbors(0).to_vec();
    grow(graph, &mut vec![0], &first, size, &mut out);
    out
}

fn tree(degree: usize, max_size: usize) -> Result<GroundSpace> {
    if degree < 3 {
        return Err(Error::TreeDegreeTooSmall(degree));
    }
    if max_size == 0 {
        return Err(Error::Precondition("max_size must be at least 1".into()));
    }
    if max_size > MAX_SIZE || degree > MAX_DEGREE {
        return Err(Error::TooLarge(format!(
            "subset enumeration limited to size <= {MAX_SIZE} and degree <= {MAX_DEGREE}"
        )));
    }
    build_space(&SpaceSpec::Tree {
        degree,
        depth: max_size - 1,
    })
}

/// One row per size `1..=max_size`.
pub fn faber_krahn_table(degree: usize, max_size: usize) -> Result<Vec<FaberKrahnRow>> {
    let space = tree(degree, max_size)?;
    let g = space.graph();
    (1..=max_size)
        .map(|s| {
            let b = dirichlet_eigenvalue(g, &ball(&space, s)?)?;
            let subsets = connected_rooted_subsets(g, s);
            let mut min = (f64::INFINITY, Vec::new());
            let mut max = f64::NEG_INFINITY;
            for set in &subsets {
                let ev = dirichlet_eigenvalue(g, set)?;
                if ev < min.0 {
                    min = (ev, set.as_slice().to_vec());
                }
                max = max.max(ev);
            }
            Ok(FaberKrahnRow {
                size: s,
                subsets: subsets.len(),
                ball_eigenvalue: b,
                min_eigenvalue: min.0,
                max_eigenvalue: max,
                margin: min.0 - b,
                minimizer: min.1,
            })
        })
        .collect()
}

/// Worst `λ1(S) - λ1(ball)` over all connected `S` with `|S| <= max_size`.
pub fn check_faber_krahn(degree: usize, max_size: usize) -> Result<Report> {
    let rows = faber_krahn_table(degree, max_size)?;
    let n = tree(degree, max_size)?.vertex_count();
    let worst = rows
        .iter()
        .min_by(|a, b| a.margin.total_cmp(&b.margin))
        .expect("max_size >= 1");
    let passed = worst.margin >= -DEFAULT_TOLERANCE;
    let notes = rows
        .iter()
        .map(|r| {
            format!(
                "size={} subsets={} ball={:.12} min={:.12} max={:.12}",
                r.size, r.subsets, r.ball_eigenvalue, r.min_eigenvalue, r.max_eigenvalue
            )
        })
        .collect();
    Ok(Report {
        check_name: "faber-krahn".into(),
        instance: format!("tree:{degree} sizes<={max_size}"),
        instances_tested: rows.iter().map(|r| r.subsets as u64).sum(),
        worst_margin: worst.margin,
        witness: Some(
            DiscreteFunction::indicator(n, &VertexSet::new(worst.minimizer.iter().copied()))
                .values()
                .iter()
                .copied()
                .enumerate()
                .filter(|&(_, v)| v > 0.0)
                .collect(),
        ),
        witness_partner: None,
        passed,
        tolerance: DEFAULT_TOLERANCE,
        seed: 0,
        notes,
        elapsed: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sizes() {
        let rows = faber_krahn_table(3, 4).unwrap();
        assert_eq!(rows[0].subsets, 1);
        assert_eq!(rows[0].min_eigenvalue, 3.0);
        assert_eq!(rows[0].max_eigenvalue, 3.0);
        assert_eq!(rows[1].subsets, 3);
        assert!((rows[1].min_eigenvalue - 2.0).abs() < 1e-12);
        assert!((rows[1].max_eigenvalue - 2.0).abs() < 1e-12);
        let star = 3.0 - 3f64.sqrt();
        let path = 3.0 - (1.0 + 5f64.sqrt()) / 2.0;
        assert!((rows[3].ball_eigenvalue - star).abs() < 1e-12);
        assert!((rows[3].min_eigenvalue - star).abs() < 1e-12);
        assert!((rows[3].max_eigenvalue - path).abs() < 1e-12);
    }

    #[test]
    fn subset_counts_are_distinct_and_connected() {
        let space = tree(3, 5).unwrap();
        let subsets = connected_rooted_subsets(space.graph(), 5);
        let mut keys: Vec<Vec<usize>> = subsets.iter().map(|s| s.as_slice().to_vec()).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), subsets.len());
        assert!(subsets.iter().all(|s| s.len() == 5 && space.graph().is_connected_subset(s)));
    }

    #[test]
    fn ball_is_minimal() {
        let r = check_faber_krahn(3, 7).unwrap();
        assert!(r.passed, "{:?}", r.notes);
    }

    #[test]
    fn limits() {
        assert!(matches!(check_faber_krahn(2, 3), Err(Error::TreeDegreeTooSmall(2))));
        assert!(matches!(check_faber_krahn(3, 9), Err(Error::TooLarge(_))));
    }
}
