//! All eccentricities in `O(m sqrt n)`.
//!
//! Small radius is handled by the threshold routine. For large radius the
//! center lies in a small ball `S` around a central vertex, and only the far
//! layers `A` around `S` can exclude a vertex of `S` from the center. A
//! thin layer `L` between `S` and `A` summarizes each far vertex by one
//! "distant gate" in `L`, which turns the center test into `|L|` distance
//! checks per vertex of `S`.

use rayon::prelude::*;

use super::{certify, ecc_at_most_k, ecc_from_center, find_center, AlgoError, Options};
use crate::graph::{layers_of, Dist, DistanceVector, Graph, Vertex, VertexSet};
use crate::oracles::{ceil_sqrt, EccentricityTable};

const STAGE: &str = "sqrt: distant gates";

/// Intermediate data of the large-radius branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqrtState {
    pub c: Vertex,
    pub r: Dist,
    pub s: Dist,
    /// `S = N^{2s+3}[c]`.
    pub ball: VertexSet,
    /// `d(., S)`.
    pub to_ball: DistanceVector,
    /// Union of the layers of `S` with index above `r - 4s - 6`.
    pub far: VertexSet,
    pub band_index: Dist,
    /// The smallest layer among indices `1..=r - 4s - 6`.
    pub band: VertexSet,
    /// Distinct values of `d(a, L)` over `a` in `far`, ascending.
    pub depths: Vec<Dist>,
    /// `(a, gate of a, d(a, L))` for every `a` in `far`.
    pub gates: Vec<(Vertex, Vertex, Dist)>,
    /// `captured[t][j] = |N^{r - depths[j]}[band[t]] ∩ S|`.
    pub captured: Vec<Vec<usize>>,
    /// `reach[t]`: largest `d(a, L)` among vertices gated by `band[t]`, or 0.
    pub reach: Vec<Dist>,
    pub center: VertexSet,
}

impl SqrtState {
    /// Checks `N^r[a] ∩ S = N^{r - d(a,L)}[a*] ∩ S` for every gate by direct
    /// BFS from both ends.
    pub fn check_gates(&self, g: &Graph) -> Result<(), String> {
        for &(a, gate, depth) in &self.gates {
            let from_a = g.bfs(a);
            let from_gate = g.bfs(gate);
            let radius = self.r.checked_sub(depth);
            for v in self.ball.iter() {
                let by_a = from_a[v] <= self.r;
                let by_gate = radius.is_some_and(|rad| from_gate[v] <= rad);
                if by_a != by_gate {
                    return Err(format!(
                        "gate {gate} of far vertex {a} disagrees on ball vertex {v}"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Per band vertex: distances to the far zone and to `S`, and the
/// cumulative count of `S` by distance.
struct BandRow {
    to_far: Vec<Dist>,
    to_ball: Vec<Dist>,
    within: Vec<usize>,
}

impl BandRow {
    fn new(row: DistanceVector, far: &VertexSet, ball: &VertexSet) -> Self {
        let to_far = far.iter().map(|a| row[a]).collect();
        let to_ball: Vec<Dist> = ball.iter().map(|v| row[v]).collect();
        // Counting sort of S by distance, kept as prefix counts.
        let top = to_ball.iter().copied().max().unwrap_or(0) as usize;
        let mut within = vec![0usize; top + 1];
        for &d in &to_ball {
            within[d as usize] += 1;
        }
        for d in 1..within.len() {
            within[d] += within[d - 1];
        }
        BandRow {
            to_far,
            to_ball,
            within,
        }
    }

    fn count_within(&self, radius: Option<Dist>) -> usize {
        match radius {
            None => 0,
            Some(rad) => self.within[(rad as usize).min(self.within.len() - 1)],
        }
    }
}

/// Large-radius branch: the center from a central vertex `c` of
/// eccentricity `r`, which must exceed `5s + 6`.
pub fn sqrt_state(g: &Graph, c: Vertex, r: Dist, opts: Options) -> Result<SqrtState, AlgoError> {
    let s = ceil_sqrt(g.n());
    if r <= 5 * s + 6 {
        return Err(AlgoError::InvalidArgument(format!(
            "radius {r} is not above 5*{s}+6"
        )));
    }
    let ball = g.ball(c, 2 * s + 3);
    let to_ball = g
        .multi_source_bfs(&ball)
        .expect("a ball contains its center");
    let layers = layers_of(&to_ball);
    let last_band = (r - 4 * s - 6).min(layers.len() as Dist - 1);
    if last_band < 1 {
        return Err(AlgoError::not_helly(
            STAGE,
            "the band between S and A is empty",
        ));
    }
    let (band_index, band) = (1..=last_band)
        .map(|i| (i, &layers[i as usize]))
        .min_by_key(|(i, layer)| (layer.len(), *i))
        .map(|(i, layer)| (i, layer.clone()))
        .unwrap();
    if band.len() > s as usize {
        return Err(AlgoError::not_helly(
            STAGE,
            format!(
                "smallest band layer {band_index} has {} > {s} vertices",
                band.len()
            ),
        ));
    }
    let far: VertexSet = layers
        .iter()
        .skip((r - 4 * s - 6) as usize + 1)
        .flat_map(|layer| layer.iter())
        .collect();

    let rows: Vec<BandRow> = band
        .as_slice()
        .par_iter()
        .map(|&u| BandRow::new(g.bfs(u), &far, &ball))
        .collect();

    let depth_of: Vec<Dist> = (0..far.len())
        .map(|j| rows.iter().map(|row| row.to_far[j]).min().unwrap_or(0))
        .collect();
    let mut depths = depth_of.clone();
    depths.sort_unstable();
    depths.dedup();
    let captured: Vec<Vec<usize>> = rows
        .iter()
        .map(|row| {
            depths
                .iter()
                .map(|&i| row.count_within(r.checked_sub(i)))
                .collect()
        })
        .collect();

    let mut reach = vec![0; band.len()];
    let mut gates = Vec::with_capacity(far.len());
    for (j, a) in far.iter().enumerate() {
        let depth = depth_of[j];
        let slot = depths.binary_search(&depth).unwrap();
        let mut best: Option<usize> = None;
        for (t, row) in rows.iter().enumerate() {
            if row.to_far[j] == depth && best.is_none_or(|b| captured[t][slot] > captured[b][slot])
            {
                best = Some(t);
            }
        }
        let t = best.ok_or_else(|| {
            AlgoError::not_helly(STAGE, format!("far vertex {a} has no projection"))
        })?;
        reach[t] = reach[t].max(depth);
        gates.push((a, band.as_slice()[t], depth));
    }

    let center: VertexSet = ball
        .iter()
        .enumerate()
        .filter(|&(k, _)| {
            rows.iter()
                .zip(&reach)
                .all(|(row, &q)| r.checked_sub(q).is_some_and(|lim| row.to_ball[k] <= lim))
        })
        .map(|(_, v)| v)
        .collect();

    let state = SqrtState {
        c,
        r,
        s,
        ball,
        to_ball,
        far,
        band_index,
        band,
        depths,
        gates,
        captured,
        reach,
        center,
    };
    if opts.debug_invariants {
        state
            .check_gates(g)
            .map_err(|detail| AlgoError::not_helly(STAGE, detail))?;
    }
    if !state.center.contains(c) {
        return Err(AlgoError::not_helly(
            STAGE,
            format!("computed center misses the central vertex {c}"),
        ));
    }
    Ok(state)
}

/// Exact eccentricity table of a Helly graph.
pub fn all_ecc_sqrt(g: &Graph, opts: Options) -> Result<EccentricityTable, AlgoError> {
    let (c, r) = find_center(g);
    let s = ceil_sqrt(g.n());
    if r <= 5 * s + 6 {
        let t = ecc_at_most_k(g, 10 * s + 12, opts).map_err(|e| e.in_stage("sqrt: threshold"))?;
        if t.rad != Some(r) {
            return Err(AlgoError::not_helly(
                "sqrt: threshold",
                format!(
                    "threshold radius {:?} differs from descent radius {r}",
                    t.rad
                ),
            ));
        }
        let ecc: Option<Vec<Dist>> = t.ecc.into_iter().collect();
        let table = ecc.map(EccentricityTable::from_ecc).ok_or_else(|| {
            AlgoError::not_helly(
                "sqrt: threshold",
                "some eccentricity exceeds twice the radius",
            )
        })?;
        return certify(g, table, r, "sqrt: threshold");
    }
    let state = sqrt_state(g, c, r, opts)?;
    certify(g, ecc_from_center(g, &state.center, r)?, r, STAGE)
}
