//! Center extraction inside a ball `N^k[c]` and the hyperbolicity-driven
//! eccentricity algorithm built on it.
//!
//! For `r = e(c)` and `S_k = N^k[c]`, a vertex `s` of `S_k` is central iff
//! every vertex of the layers `A_{k,i} = L_{r-i}(S_k)`, `k <= i < 2k`, is
//! within `r` of `s`; nearer layers are within `r` of all of `S_k` anyway.
//! Each `A_{k,i}` is handled in two passes of the group system: slices
//! toward `S_k` are intersected down to layer 1, then the resulting groups
//! are grown back out as balls until one group, `Y`, is left.

use super::groups::{closed_neighborhoods, merge_with, MergeScratch};
use super::{
    certify, ecc_at_most_k, ecc_from_center, find_center, AlgoError, Group, GroupSystem, Options,
};
use crate::graph::{Dist, DistanceVector, Graph, Vertex, VertexSet, UNREACHED};
use crate::oracles::{Delta, EccentricityTable};

const PHASE1: &str = "extract: slice refinement";
const PHASE2: &str = "extract: ball growth";

/// Output of the slice refinement: for each group, the far vertices `B_t`
/// and the common part `C_t` of their slices in layer 1 of `S_k`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Phase1Partition {
    pub groups: Vec<(VertexSet, VertexSet)>,
}

impl Phase1Partition {
    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// All far vertices, ascending.
    pub fn far(&self) -> VertexSet {
        self.groups.iter().flat_map(|(b, _)| b.iter()).collect()
    }
}

fn check_range(k: Dist, i: Dist, r: Dist) -> Result<(), AlgoError> {
    if r <= 2 * k || i < k || i >= 2 * k {
        return Err(AlgoError::InvalidArgument(format!(
            "need r > 2k and k <= i < 2k, got k={k} i={i} r={r}"
        )));
    }
    Ok(())
}

/// Partitions `A_{k,i} = L_{r-i}(S_k)` by common slices toward `S_k`.
///
/// `to_sk` is `d(., N^k[c])`. Starting from one singleton group per far
/// vertex, each step moves every group one layer closer to `S_k` through
/// its open neighborhood and merges.
pub fn phase1_partition(
    g: &Graph,
    k: Dist,
    i: Dist,
    r: Dist,
    to_sk: &DistanceVector,
    opts: Options,
) -> Result<Phase1Partition, AlgoError> {
    check_range(k, i, r)?;
    let n = g.n();
    let lambda = r - i;
    let far: Vec<Vertex> = (0..n).filter(|&v| to_sk[v] == lambda).collect();
    if far.is_empty() {
        return Ok(Phase1Partition::default());
    }
    let groups = far
        .iter()
        .enumerate()
        .map(|(t, &b)| Group {
            members: VertexSet::singleton(b),
            constraints: vec![t],
        })
        .collect();
    let mut sys = GroupSystem::new(groups, far.len());
    let rows = opts
        .debug_invariants
        .then(|| far.iter().map(|&b| g.bfs(b)).collect::<Vec<_>>());
    let mut scratch = MergeScratch::new(n);
    let mut mark = vec![usize::MAX; n];

    for j in 0..lambda - 1 {
        if let Some(rows) = &rows {
            check_slices(&sys, rows, to_sk, lambda, j, n)?;
        }
        let target = lambda - (j + 1);
        let next = sys
            .groups()
            .iter()
            .enumerate()
            .map(|(t, group)| {
                let mut out = Vec::new();
                for z in group.members.iter() {
                    for &w in g.neighbors(z) {
                        if to_sk[w] == target && mark[w] != t {
                            mark[w] = t;
                            out.push(w);
                        }
                    }
                }
                for &w in &out {
                    mark[w] = usize::MAX;
                }
                VertexSet::from(out)
            })
            .collect();
        sys = merge_with(&mut scratch, &sys, next).map_err(|e| e.in_stage(PHASE1))?;
    }
    if let Some(rows) = &rows {
        check_slices(&sys, rows, to_sk, lambda, lambda - 1, n)?;
    }

    Ok(Phase1Partition {
        groups: sys
            .into_groups()
            .into_iter()
            .map(|group| {
                let b = group.constraints.iter().map(|&t| far[t]).collect();
                (b, group.members)
            })
            .collect(),
    })
}

fn check_slices(
    sys: &GroupSystem,
    rows: &[DistanceVector],
    to_sk: &DistanceVector,
    lambda: Dist,
    j: Dist,
    n: usize,
) -> Result<(), AlgoError> {
    sys.check_representation(n, |t, v| rows[t][v] == j && to_sk[v] == lambda - j)
        .map_err(|detail| AlgoError::Invariant {
            stage: PHASE1,
            detail,
        })
}

/// `S_{k,i} = {s in S_k : A_{k,i} within distance r of s}`.
///
/// The universe holds every far vertex `a` with target radius `r` and the
/// central vertex `c` with target radius `k + i + 2`. Group `t` starts as
/// `C_t` with constraints `B_t ∪ {c}` and grows by closed neighborhoods for
/// `i + 1` steps.
#[allow(clippy::too_many_arguments)]
pub fn phase2_filter(
    g: &Graph,
    partition: &Phase1Partition,
    c: Vertex,
    k: Dist,
    i: Dist,
    r: Dist,
    s_k: &VertexSet,
    opts: Options,
) -> Result<VertexSet, AlgoError> {
    check_range(k, i, r)?;
    if partition.is_empty() {
        return Ok(s_k.clone());
    }
    let n = g.n();
    let far = partition.far();
    let hub = far.len();
    let index_of = |a: Vertex| far.as_slice().binary_search(&a).unwrap();
    let groups = partition
        .groups
        .iter()
        .map(|(b, z)| {
            let mut constraints: Vec<usize> = b.iter().map(index_of).collect();
            constraints.push(hub);
            Group {
                members: z.clone(),
                constraints,
            }
        })
        .collect();
    let mut sys = GroupSystem::new(groups, hub + 1);

    // Constraint x at step l is the ball of radius alpha(x) - (i+1) + l.
    let rows = opts.debug_invariants.then(|| {
        far.iter()
            .map(|a| (g.bfs(a), r))
            .chain(std::iter::once((g.bfs(c), k + i + 2)))
            .collect::<Vec<_>>()
    });
    let mut scratch = MergeScratch::new(n);
    let mut mark = vec![usize::MAX; n];
    for step in 0..=i + 1 {
        if let Some(rows) = &rows {
            sys.check_representation(n, |x, v| {
                let (row, alpha) = &rows[x];
                row[v] != UNREACHED && row[v] + i < alpha + step
            })
            .map_err(|detail| AlgoError::Invariant {
                stage: PHASE2,
                detail,
            })?;
        }
        if step == i + 1 {
            break;
        }
        let next = closed_neighborhoods(g, &sys, &mut mark);
        sys = merge_with(&mut scratch, &sys, next).map_err(|e| e.in_stage(PHASE2))?;
    }

    match sys.groups() {
        [single] => Ok(single.members.intersection(s_k)),
        _ => Ok(VertexSet::new()),
    }
}

/// `C(G) ∩ N^k[c]` for a central vertex `c` of eccentricity `r`.
pub fn extract_center(
    g: &Graph,
    c: Vertex,
    k: Dist,
    r: Dist,
    opts: Options,
) -> Result<VertexSet, AlgoError> {
    let s_k = g.ball(c, k);
    let found = if r <= 2 * k {
        let t = ecc_at_most_k(g, r, opts).map_err(|e| e.in_stage("extract: threshold"))?;
        t.center.unwrap_or_default().intersection(&s_k)
    } else {
        let to_sk = g
            .multi_source_bfs(&s_k)
            .expect("a ball contains its center");
        let mut found = s_k.clone();
        for i in k..2 * k {
            let partition = phase1_partition(g, k, i, r, &to_sk, opts)?;
            let filtered = phase2_filter(g, &partition, c, k, i, r, &s_k, opts)?;
            found = found.intersection(&filtered);
        }
        found
    };
    if !found.contains(c) {
        return Err(AlgoError::not_helly(
            "extract: center",
            format!("extracted center misses the central vertex {c}"),
        ));
    }
    Ok(found)
}

/// Exact eccentricity table of a Helly graph, in time governed by its
/// hyperbolicity.
///
/// With `delta` known, the center is extracted from `N^{2δ+1}[c]` directly.
/// Otherwise `k = 2, 4, 8, ...` is doubled until the extractions at `k`
/// and `k + 1` agree; the center is connected and contains `c`, so it then
/// lies within `N^k[c]`. A `delta` below the true value is not detected.
pub fn all_ecc_hyperbolic(
    g: &Graph,
    delta: Option<Delta>,
    opts: Options,
) -> Result<EccentricityTable, AlgoError> {
    let (c, r) = find_center(g);
    let center = match delta {
        Some(delta) => extract_center(g, c, delta.half_units() + 1, r, opts)?,
        None => {
            let mut k: Dist = 2;
            loop {
                let here = extract_center(g, c, k, r, opts)?;
                if k >= r || here == extract_center(g, c, k + 1, r, opts)? {
                    break here;
                }
                k *= 2;
            }
        }
    };
    certify(g, ecc_from_center(g, &center, r)?, r, "extract: table")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::all_ecc_bruteforce;

    const DEBUG: Options = Options {
        debug_invariants: true,
    };

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn set(ids: &[Vertex]) -> VertexSet {
        ids.iter().copied().collect()
    }

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn phase1_on_p9() {
        let g = path(9);
        let s1 = g.ball(4, 1);
        assert_eq!(s1, set(&[3, 4, 5]));
        let to_s1 = g.multi_source_bfs(&s1).unwrap();
        let p = phase1_partition(&g, 1, 1, 4, &to_s1, DEBUG).unwrap();
        assert_eq!(
            p.groups,
            vec![(set(&[0]), set(&[2])), (set(&[8]), set(&[6]))]
        );
        let s = phase2_filter(&g, &p, 4, 1, 1, 4, &s1, DEBUG).unwrap();
        assert_eq!(s, set(&[4]));
    }

    #[test]
    fn phase1_single_far_vertex_is_a_slice() {
        // P8 around 3: S_1 = {2,3,4} and L_3(S_1) = {7}. On P7 the same
        // layer is empty.
        let g = path(8);
        let s1 = g.ball(3, 1);
        let to_s1 = g.multi_source_bfs(&s1).unwrap();
        let p = phase1_partition(&g, 1, 1, 4, &to_s1, DEBUG).unwrap();
        let expect = g.slice(7, 2, &to_s1, &g.bfs(7));
        assert_eq!(p.groups, vec![(set(&[7]), expect)]);

        let g = path(7);
        let s1 = g.ball(3, 1);
        let to_s1 = g.multi_source_bfs(&s1).unwrap();
        let p = phase1_partition(&g, 1, 1, 4, &to_s1, DEBUG).unwrap();
        assert!(p.is_empty());
        assert_eq!(phase2_filter(&g, &p, 3, 1, 1, 4, &s1, DEBUG).unwrap(), s1);
    }

    #[test]
    fn ranges_are_validated() {
        let g = path(5);
        let s1 = g.ball(2, 1);
        let to_s1 = g.multi_source_bfs(&s1).unwrap();
        assert!(matches!(
            phase1_partition(&g, 1, 1, 2, &to_s1, DEBUG),
            Err(AlgoError::InvalidArgument(_))
        ));
    }

    #[test]
    fn extract_examples() {
        assert_eq!(extract_center(&path(5), 2, 1, 2, DEBUG).unwrap(), set(&[2]));
        assert_eq!(extract_center(&path(9), 4, 1, 4, DEBUG).unwrap(), set(&[4]));
        assert_eq!(
            extract_center(&complete(4), 0, 1, 1, DEBUG).unwrap(),
            set(&[0, 1, 2, 3])
        );
        assert_eq!(
            extract_center(&path(10), 4, 0, 5, DEBUG).unwrap(),
            set(&[4])
        );
        assert_eq!(
            extract_center(&path(10), 4, 3, 5, DEBUG).unwrap(),
            set(&[4, 5])
        );
    }

    #[test]
    fn hyperbolic_matches_oracle() {
        let g = path(400);
        assert_eq!(
            all_ecc_hyperbolic(&g, None, Options::default()).unwrap(),
            all_ecc_bruteforce(&g)
        );
        assert_eq!(
            all_ecc_hyperbolic(&g, Some(Delta::ZERO), Options::default()).unwrap(),
            all_ecc_bruteforce(&g)
        );

        let mut edges = Vec::new();
        for block in [[0, 1, 2, 3], [3, 4, 5, 6]] {
            for a in 0..4 {
                for b in a + 1..4 {
                    edges.push((block[a], block[b]));
                }
            }
        }
        let g = Graph::from_edges(7, &edges).unwrap();
        let t = all_ecc_hyperbolic(&g, None, DEBUG).unwrap();
        assert_eq!(t.center, set(&[3]));
        assert_eq!(t, all_ecc_bruteforce(&g));
    }

    #[test]
    fn c4_is_flagged() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        assert!(matches!(
            all_ecc_hyperbolic(&g, None, Options::default()),
            Err(AlgoError::NotHelly { .. })
        ));
    }
}
