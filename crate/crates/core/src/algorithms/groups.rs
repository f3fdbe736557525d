//! Disjoint groups of vertices, each the common intersection of a family of
//! growing balls (or slices), and the max-membership merge rule that keeps
//! them disjoint as they grow.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::AlgoError;
use crate::graph::{Graph, Vertex, VertexSet};

/// One group: its vertex set `Z` and the constraint indices `X` it encodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub members: VertexSet,
    pub constraints: Vec<usize>,
}

/// Nonempty, pairwise disjoint groups whose constraint sets cover
/// `0..universe`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSystem {
    groups: Vec<Group>,
    universe: usize,
    step: usize,
}

impl GroupSystem {
    pub fn new(groups: Vec<Group>, universe: usize) -> Self {
        GroupSystem {
            groups,
            universe,
            step: 0,
        }
    }

    /// One singleton group `{x}` per vertex, constraint `x` each.
    pub fn singletons(n: usize) -> Self {
        let groups = (0..n)
            .map(|x| Group {
                members: VertexSet::singleton(x),
                constraints: vec![x],
            })
            .collect();
        Self::new(groups, n)
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn into_groups(self) -> Vec<Group> {
        self.groups
    }

    /// Disjointness, nonemptiness and covering.
    pub fn check_structure(&self, n: usize) -> Result<(), String> {
        let mut owner = vec![usize::MAX; n];
        for (t, group) in self.groups.iter().enumerate() {
            if group.members.is_empty() {
                return Err(format!("group {t} is empty"));
            }
            for v in group.members.iter() {
                if owner[v] != usize::MAX {
                    return Err(format!("vertex {v} lies in groups {} and {t}", owner[v]));
                }
                owner[v] = t;
            }
        }
        let mut covered = vec![false; self.universe];
        for group in &self.groups {
            for &x in &group.constraints {
                covered[x] = true;
            }
        }
        match covered.iter().position(|&c| !c) {
            Some(x) => Err(format!("constraint {x} is not covered")),
            None => Ok(()),
        }
    }

    /// Checks that every group equals the intersection of the sets its
    /// constraints describe; `holds(x, v)` says whether `v` satisfies
    /// constraint `x` at the current step.
    pub fn check_representation(
        &self,
        n: usize,
        holds: impl Fn(usize, Vertex) -> bool,
    ) -> Result<(), String> {
        self.check_structure(n)?;
        for (t, group) in self.groups.iter().enumerate() {
            let expected: VertexSet = (0..n)
                .filter(|&v| group.constraints.iter().all(|&x| holds(x, v)))
                .collect();
            if expected != group.members {
                return Err(format!(
                    "step {}: group {t} is {:?} but its constraints {:?} intersect to {:?}",
                    self.step,
                    group.members.as_slice(),
                    group.constraints,
                    expected.as_slice()
                ));
            }
        }
        Ok(())
    }
}

/// Reusable buffers for [`expand_and_merge`], sized to the vertex count.
#[derive(Debug)]
pub(crate) struct MergeScratch {
    count: Vec<u32>,
    hits: Vec<u32>,
    slot: Vec<usize>,
}

impl MergeScratch {
    pub(crate) fn new(n: usize) -> Self {
        MergeScratch {
            count: vec![0; n],
            hits: vec![0; n],
            slot: vec![usize::MAX; n],
        }
    }
}

/// Replaces each group by its grown set `next_sets[t]`, then merges.
///
/// While grown sets remain, a vertex `u` contained in the largest number of
/// them (smallest id on ties) is selected; the sets containing `u` are
/// removed and their intersection becomes a new group whose constraints are
/// the union of theirs.
pub fn expand_and_merge(
    g: &Graph,
    sys: &GroupSystem,
    next_sets: Vec<VertexSet>,
) -> Result<GroupSystem, AlgoError> {
    let mut scratch = MergeScratch::new(g.n());
    merge_with(&mut scratch, sys, next_sets)
}

pub(crate) fn merge_with(
    scratch: &mut MergeScratch,
    sys: &GroupSystem,
    next_sets: Vec<VertexSet>,
) -> Result<GroupSystem, AlgoError> {
    assert_eq!(next_sets.len(), sys.groups.len(), "one grown set per group");
    if let Some(t) = next_sets.iter().position(|s| s.is_empty()) {
        return Err(AlgoError::EmptyGrowth {
            stage: "expand-and-merge",
            group: t,
        });
    }

    // Inverted index: for each touched vertex, the sets containing it.
    let mut touched: Vec<Vertex> = Vec::new();
    for set in &next_sets {
        for v in set.iter() {
            if scratch.count[v] == 0 {
                touched.push(v);
            }
            scratch.count[v] += 1;
        }
    }
    let mut offsets = Vec::with_capacity(touched.len() + 1);
    offsets.push(0usize);
    for (i, &v) in touched.iter().enumerate() {
        scratch.slot[v] = i;
        offsets.push(offsets[i] + scratch.count[v] as usize);
    }
    let mut fill = offsets[..touched.len()].to_vec();
    let mut containing = vec![0usize; offsets[touched.len()]];
    for (t, set) in next_sets.iter().enumerate() {
        for v in set.iter() {
            let i = scratch.slot[v];
            containing[fill[i]] = t;
            fill[i] += 1;
        }
    }

    let mut heap: BinaryHeap<(u32, Reverse<Vertex>)> = touched
        .iter()
        .map(|&v| (scratch.count[v], Reverse(v)))
        .collect();
    let mut alive = vec![true; next_sets.len()];
    let mut groups = Vec::new();
    let mut chosen = Vec::new();

    while let Some((c, Reverse(u))) = heap.pop() {
        if c == 0 || scratch.count[u] != c {
            continue;
        }
        let i = scratch.slot[u];
        chosen.clear();
        chosen.extend(
            containing[offsets[i]..offsets[i + 1]]
                .iter()
                .copied()
                .filter(|&t| alive[t]),
        );
        debug_assert_eq!(chosen.len() as u32, c);

        let need = chosen.len() as u32;
        let mut members = Vec::new();
        let mut constraints = Vec::new();
        for &t in &chosen {
            for v in next_sets[t].iter() {
                scratch.hits[v] += 1;
                if scratch.hits[v] == need {
                    members.push(v);
                }
            }
            constraints.extend_from_slice(&sys.groups[t].constraints);
        }
        for &t in &chosen {
            alive[t] = false;
            for v in next_sets[t].iter() {
                scratch.hits[v] = 0;
                scratch.count[v] -= 1;
                if scratch.count[v] > 0 {
                    heap.push((scratch.count[v], Reverse(v)));
                }
            }
        }
        members.sort_unstable();
        constraints.sort_unstable();
        constraints.dedup();
        groups.push(Group {
            members: VertexSet::from_sorted(members),
            constraints,
        });
    }

    for &v in &touched {
        scratch.slot[v] = usize::MAX;
    }
    Ok(GroupSystem {
        groups,
        universe: sys.universe,
        step: sys.step + 1,
    })
}

/// Closed neighborhood `N[Z]` of each group.
pub(crate) fn closed_neighborhoods(
    g: &Graph,
    sys: &GroupSystem,
    mark: &mut [usize],
) -> Vec<VertexSet> {
    sys.groups
        .iter()
        .enumerate()
        .map(|(t, group)| {
            let mut out = Vec::new();
            for z in group.members.iter() {
                for &w in std::iter::once(&z).chain(g.neighbors(z)) {
                    if mark[w] != t {
                        mark[w] = t;
                        out.push(w);
                    }
                }
            }
            for &w in &out {
                mark[w] = usize::MAX;
            }
            out.into()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[Vertex]) -> VertexSet {
        ids.iter().copied().collect()
    }

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn two_groups() -> GroupSystem {
        GroupSystem::new(
            vec![
                Group {
                    members: set(&[0]),
                    constraints: vec![0],
                },
                Group {
                    members: set(&[2]),
                    constraints: vec![1],
                },
            ],
            2,
        )
    }

    #[test]
    fn disjoint_sets_stay_separate() {
        let g = path(4);
        let out = expand_and_merge(&g, &two_groups(), vec![set(&[0, 1]), set(&[2])]).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out.step(), 1);
        assert_eq!(out.groups()[0].members, set(&[0, 1]));
        assert_eq!(out.groups()[1].members, set(&[2]));
        out.check_structure(4).unwrap();
    }

    #[test]
    fn overlapping_sets_merge() {
        let g = path(4);
        let out = expand_and_merge(&g, &two_groups(), vec![set(&[0, 1]), set(&[1, 2])]).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.groups()[0].members, set(&[1]));
        assert_eq!(out.groups()[0].constraints, vec![0, 1]);
    }

    #[test]
    fn empty_growth_is_reported() {
        let g = path(4);
        let err =
            expand_and_merge(&g, &two_groups(), vec![set(&[0]), VertexSet::new()]).unwrap_err();
        assert_eq!(
            err,
            AlgoError::EmptyGrowth {
                stage: "expand-and-merge",
                group: 1
            }
        );
    }

    #[test]
    fn first_step_on_p5() {
        // Closed neighborhoods of the five singletons on P5 are
        // {0,1} {0,1,2} {1,2,3} {2,3,4} {3,4}. Vertices 1, 2 and 3 each lie
        // in three sets; 1 wins the tie, taking sets 0..=2 with intersection
        // {1}. The remaining {2,3,4} and {3,4} meet in {3,4}.
        let g = path(5);
        let sys = GroupSystem::singletons(5);
        let mut mark = vec![usize::MAX; 5];
        let next = closed_neighborhoods(&g, &sys, &mut mark);
        let out = expand_and_merge(&g, &sys, next).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out.groups()[0].members, set(&[1]));
        assert_eq!(out.groups()[0].constraints, vec![0, 1, 2]);
        assert_eq!(out.groups()[1].members, set(&[3, 4]));
        assert_eq!(out.groups()[1].constraints, vec![3, 4]);
        let d: Vec<_> = (0..5).map(|v| g.bfs(v)).collect();
        out.check_representation(5, |x, v| d[x][v] <= 1).unwrap();
    }

    #[test]
    fn representation_check_catches_mismatch() {
        let sys = two_groups();
        assert!(sys.check_representation(4, |x, v| v == 2 * x).is_ok());
        assert!(sys.check_representation(4, |x, v| v <= 2 * x).is_err());
        let broken = GroupSystem::new(
            vec![Group {
                members: set(&[1]),
                constraints: vec![0],
            }],
            2,
        );
        assert!(broken
            .check_structure(4)
            .unwrap_err()
            .contains("constraint 1"));
    }
}
