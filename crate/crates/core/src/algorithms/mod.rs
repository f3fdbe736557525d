//! Fast eccentricity algorithms for Helly graphs.
//!
//! None of these carry a correctness contract on non-Helly input. Wherever
//! a structural guarantee of the Helly analysis can be observed to fail at
//! run time, the algorithm stops with [`AlgoError::NotHelly`] (or
//! [`AlgoError::EmptyGrowth`]) instead of returning a wrong table.

mod center;
mod extract;
mod groups;
mod sqrt;

pub use center::{approx_center, descend_step, find_center, ApproxCenter, Descent};
pub use extract::{
    all_ecc_hyperbolic, extract_center, phase1_partition, phase2_filter, Phase1Partition,
};
pub use groups::{expand_and_merge, Group, GroupSystem};
pub use sqrt::{all_ecc_sqrt, sqrt_state, SqrtState};

use thiserror::Error;

use crate::graph::{Dist, Graph, VertexSet};
use crate::oracles::EccentricityTable;
use groups::{closed_neighborhoods, merge_with, MergeScratch};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgoError {
    #[error("{stage}: grown set of group {group} is empty (input is not Helly, or the group system is invalid)")]
    EmptyGrowth { stage: &'static str, group: usize },
    #[error("{stage}: {detail} (input is not Helly)")]
    NotHelly { stage: &'static str, detail: String },
    #[error("{stage}: group invariant violated: {detail}")]
    Invariant { stage: &'static str, detail: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl AlgoError {
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        match self {
            AlgoError::EmptyGrowth { group, .. } => AlgoError::EmptyGrowth { stage, group },
            other => other,
        }
    }

    pub(crate) fn not_helly(stage: &'static str, detail: impl Into<String>) -> Self {
        AlgoError::NotHelly {
            stage,
            detail: detail.into(),
        }
    }

    /// Stage name of the failure.
    pub fn stage(&self) -> &'static str {
        match self {
            AlgoError::EmptyGrowth { stage, .. }
            | AlgoError::NotHelly { stage, .. }
            | AlgoError::Invariant { stage, .. } => stage,
            AlgoError::InvalidArgument(_) => "arguments",
        }
    }
}

/// Run-time switches shared by the algorithms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Options {
    /// Re-derive every group by brute force after each merge step. Costs a
    /// BFS per constraint; meant for small test instances.
    pub debug_invariants: bool,
}

/// Vertices of eccentricity at most `k`, with their eccentricities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Threshold {
    /// `ecc[v]` is `Some(e(v))` iff `e(v) <= k`.
    pub ecc: Vec<Option<Dist>>,
    /// Radius and center, known iff `rad(G) <= k`.
    pub rad: Option<Dist>,
    pub center: Option<VertexSet>,
}

impl Threshold {
    pub fn is_empty(&self) -> bool {
        self.rad.is_none()
    }

    /// `(v, e(v))` for every vertex found, by increasing id.
    pub fn entries(&self) -> impl Iterator<Item = (usize, Dist)> + '_ {
        self.ecc
            .iter()
            .enumerate()
            .filter_map(|(v, e)| e.map(|e| (v, e)))
    }
}

/// All vertices of eccentricity at most `k`.
///
/// Grows the balls `N^l[x]` of all vertices one step at a time, keeping
/// their pairwise-disjoint intersection groups. The first step at which a
/// single group remains is the radius and that group is the center; from
/// then on the group is `{v : e(v) <= l}`.
pub fn ecc_at_most_k(g: &Graph, k: Dist, opts: Options) -> Result<Threshold, AlgoError> {
    const STAGE: &str = "eccentricity threshold";
    let n = g.n();
    let mut sys = GroupSystem::singletons(n);
    let mut scratch = MergeScratch::new(n);
    let mut mark = vec![usize::MAX; n];
    let rows = opts
        .debug_invariants
        .then(|| (0..n).map(|v| g.bfs(v)).collect::<Vec<_>>());
    let mut out = Threshold {
        ecc: vec![None; n],
        rad: None,
        center: None,
    };

    let mut step: Dist = 0;
    loop {
        if let Some(rows) = &rows {
            sys.check_representation(n, |x, v| rows[x][v] <= step)
                .map_err(|detail| AlgoError::Invariant {
                    stage: STAGE,
                    detail,
                })?;
        }
        if sys.len() == 1 {
            let members = &sys.groups()[0].members;
            if out.rad.is_none() {
                out.rad = Some(step);
                out.center = Some(members.clone());
            }
            for v in members.iter() {
                out.ecc[v].get_or_insert(step);
            }
            if members.len() == n {
                break;
            }
        }
        if step == k {
            break;
        }
        let next = closed_neighborhoods(g, &sys, &mut mark);
        sys = merge_with(&mut scratch, &sys, next).map_err(|e| e.in_stage(STAGE))?;
        step += 1;
    }
    Ok(out)
}

/// `e(v) = d(v, C) + rad` for every vertex, from the exact center.
pub fn ecc_from_center(
    g: &Graph,
    center: &VertexSet,
    rad: Dist,
) -> Result<EccentricityTable, AlgoError> {
    let to_center = g
        .multi_source_bfs(center)
        .map_err(|_| AlgoError::not_helly("eccentricities from center", "center is empty"))?;
    let ecc = to_center.as_slice().iter().map(|&d| d + rad).collect();
    Ok(EccentricityTable::from_ecc(ecc))
}

/// Cheap consistency check of a finished table: the radius must match the
/// descent, and a vertex of largest claimed eccentricity is re-measured by
/// BFS. Catches most wrong tables produced from non-Helly input.
pub(crate) fn certify(
    g: &Graph,
    table: EccentricityTable,
    r: Dist,
    stage: &'static str,
) -> Result<EccentricityTable, AlgoError> {
    if table.rad != r {
        return Err(AlgoError::not_helly(
            stage,
            format!("table radius {} differs from descent radius {r}", table.rad),
        ));
    }
    let far = table.ecc.iter().position(|&e| e == table.diam).unwrap_or(0);
    let actual = g.bfs(far).max();
    if actual != table.diam {
        return Err(AlgoError::not_helly(
            stage,
            format!(
                "vertex {far} has eccentricity {actual}, table says {}",
                table.diam
            ),
        ));
    }
    Ok(table)
}
