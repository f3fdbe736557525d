//! Brute-force ground truth and executable metric characterizations of
//! Helly graphs. Everything here is exponential or polynomial of high
//! degree and guarded by explicit caps; the fast algorithms are tested
//! against these.

mod params;

pub(crate) use params::ceil_sqrt;
pub use params::{
    hyperbolicity_exact, kappa_exact, parameter_inequality_report, parameter_report,
    pseudoconvexity_beta, BetaWitness, Delta, Hyperbolicity, InequalityVerdict, Kappa, ParamInputs,
    ParamReport, Pseudoconvexity, Status,
};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Dist, Graph, GraphError, Vertex, VertexSet, UNREACHED};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what}: graph has {n} vertices, above the cap of {cap} (raise it with {flag})")]
    CapExceeded {
        what: &'static str,
        n: usize,
        cap: usize,
        flag: &'static str,
    },
    #[error("subset must be nonempty")]
    EmptySubset,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Size limits for the exponential and high-degree polynomial scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Subset enumeration for Helly verification (2^n subsets).
    pub subsets: usize,
    /// Quadruple scan for exact hyperbolicity.
    pub quadruples: usize,
    /// Ball/interval scan for pseudoconvexity.
    pub pseudoconvex: usize,
    /// Subset enumeration for center diameters.
    pub kappa: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            subsets: 16,
            quadruples: 150,
            pseudoconvex: 40,
            kappa: 14,
        }
    }
}

// Masks are u64 and per-subset rows are u8.
const HARD_SUBSET_LIMIT: usize = 24;

pub(crate) fn check_cap(
    g: &Graph,
    cap: usize,
    what: &'static str,
    flag: &'static str,
) -> Result<(), OracleError> {
    if g.n() > cap {
        Err(OracleError::CapExceeded {
            what,
            n: g.n(),
            cap,
            flag,
        })
    } else {
        Ok(())
    }
}

/// All-pairs distances from one BFS per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<Dist>,
}

impl DistanceMatrix {
    pub fn new(g: &Graph) -> Self {
        let n = g.n();
        let rows: Vec<Vec<Dist>> = (0..n)
            .into_par_iter()
            .map(|s| g.bfs(s).into_vec())
            .collect();
        DistanceMatrix {
            n,
            data: rows.concat(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: Vertex, v: Vertex) -> Dist {
        self.data[u * self.n + v]
    }

    pub fn row(&self, u: Vertex) -> &[Dist] {
        &self.data[u * self.n..(u + 1) * self.n]
    }
}

/// Eccentricity of every vertex together with radius, diameter and center.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EccentricityTable {
    pub rad: Dist,
    pub diam: Dist,
    pub ecc: Vec<Dist>,
    pub center: VertexSet,
}

impl EccentricityTable {
    pub fn from_ecc(ecc: Vec<Dist>) -> Self {
        let rad = ecc.iter().copied().min().unwrap_or(0);
        let diam = ecc.iter().copied().max().unwrap_or(0);
        let center = ecc
            .iter()
            .enumerate()
            .filter(|&(_, &e)| e == rad)
            .map(|(v, _)| v)
            .collect();
        EccentricityTable {
            rad,
            diam,
            ecc,
            center,
        }
    }
}

/// Reference eccentricities: one BFS per vertex.
pub fn all_ecc_bruteforce(g: &Graph) -> EccentricityTable {
    let ecc = (0..g.n()).into_par_iter().map(|s| g.bfs(s).max()).collect();
    EccentricityTable::from_ecc(ecc)
}

/// Eccentricities with respect to a vertex subset `M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubsetEccReport {
    pub subset: VertexSet,
    pub ecc: Vec<Dist>,
    pub rad: Dist,
    pub diam: Dist,
    pub center: VertexSet,
}

pub fn subset_ecc(subset: &VertexSet, dm: &DistanceMatrix) -> Result<SubsetEccReport, OracleError> {
    if subset.is_empty() {
        return Err(OracleError::EmptySubset);
    }
    let ecc: Vec<Dist> = (0..dm.n())
        .map(|v| subset.iter().map(|u| dm.get(u, v)).max().unwrap())
        .collect();
    let rad = *ecc.iter().min().unwrap();
    let diam = subset.iter().map(|v| ecc[v]).max().unwrap();
    let center = (0..dm.n()).filter(|&v| ecc[v] == rad).collect();
    Ok(SubsetEccReport {
        subset: subset.clone(),
        ecc,
        rad,
        diam,
        center,
    })
}

/// `e_M(v)` for every nonempty subset `M` (as a bitmask) and every `v`,
/// laid out as `rows[mask * n + v]`. Row 0 is all zeros.
pub(crate) fn subset_ecc_rows(dm: &DistanceMatrix) -> Vec<u8> {
    let n = dm.n();
    assert!(n <= HARD_SUBSET_LIMIT);
    let count = 1usize << n;
    let mut rows = vec![0u8; count * n];
    for mask in 1..count {
        let low = mask.trailing_zeros() as usize;
        let prev = mask & (mask - 1);
        for v in 0..n {
            let d = dm.get(low, v) as u8;
            rows[mask * n + v] = rows[prev * n + v].max(d);
        }
    }
    rows
}

pub(crate) fn mask_to_set(mask: usize, n: usize) -> VertexSet {
    VertexSet::from_sorted((0..n).filter(|&v| mask >> v & 1 == 1).collect())
}

/// Outcome of the subset radius-law test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum HellyVerdict {
    Helly,
    NotHelly {
        witness: VertexSet,
        rad_m: Dist,
        diam_m: Dist,
    },
}

impl HellyVerdict {
    pub fn is_helly(&self) -> bool {
        matches!(self, HellyVerdict::Helly)
    }
}

/// Helly test by enumeration: `G` is Helly iff every nonempty `M`
/// satisfies `rad_M = floor((diam_M + 1) / 2)`. The witness is the
/// violating subset with the smallest bitmask.
pub fn helly_check_subsets(g: &Graph, cap: usize) -> Result<HellyVerdict, OracleError> {
    check_cap(
        g,
        cap.min(HARD_SUBSET_LIMIT),
        "subset Helly check",
        "--cap-subsets",
    )?;
    let dm = DistanceMatrix::new(g);
    let n = g.n();
    let rows = subset_ecc_rows(&dm);
    for mask in 1..1usize << n {
        let row = &rows[mask * n..(mask + 1) * n];
        let rad = *row.iter().min().unwrap();
        let diam = (0..n)
            .filter(|&v| mask >> v & 1 == 1)
            .map(|v| row[v])
            .max()
            .unwrap();
        if rad != diam.div_ceil(2) {
            return Ok(HellyVerdict::NotHelly {
                witness: mask_to_set(mask, n),
                rad_m: rad as Dist,
                diam_m: diam as Dist,
            });
        }
    }
    Ok(HellyVerdict::Helly)
}

/// Pass/fail outcome with the offending vertices on failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail {
        witness: Vec<Vertex>,
        detail: String,
    },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// Equal-radii Helly test for radius `k`: every maximal family of
/// pairwise intersecting `k`-balls (a maximal clique of the `2k`-th
/// distance power) must have a common vertex.
pub fn helly_check_equal_radii(g: &Graph, k: Dist, cap: usize) -> Result<Verdict, OracleError> {
    check_cap(g, cap.min(64), "equal-radii Helly check", "--cap-subsets")?;
    let n = g.n();
    let dm = DistanceMatrix::new(g);
    let mut power = vec![0u64; n];
    let mut covers = vec![0u64; n];
    for u in 0..n {
        for v in 0..n {
            if u != v && dm.get(u, v) <= 2 * k {
                power[u] |= 1 << v;
            }
            if dm.get(u, v) <= k {
                covers[u] |= 1 << v;
            }
        }
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut worst: Option<Vec<Vertex>> = None;
    let mut on_clique = |clique: u64| {
        if covers.iter().any(|&c| c & clique == clique) {
            return;
        }
        let members: Vec<Vertex> = (0..n).filter(|&v| clique >> v & 1 == 1).collect();
        if worst.as_ref().is_none_or(|w| members < *w) {
            worst = Some(members);
        }
    };
    maximal_cliques(&power, 0, all, 0, &mut on_clique);
    Ok(match worst {
        None => Verdict::Pass,
        Some(witness) => Verdict::Fail {
            detail: format!("pairwise intersecting {k}-balls with empty intersection"),
            witness,
        },
    })
}

/// Bron–Kerbosch with pivoting over 64-bit vertex masks.
fn maximal_cliques(adj: &[u64], r: u64, p: u64, x: u64, emit: &mut impl FnMut(u64)) {
    if p == 0 {
        if x == 0 {
            emit(r);
        }
        return;
    }
    let pivot = {
        let px = p | x;
        (0..adj.len())
            .filter(|&u| px >> u & 1 == 1)
            .max_by_key(|&u| (adj[u] & p).count_ones())
            .unwrap()
    };
    let mut candidates = p & !adj[pivot];
    let (mut p, mut x) = (p, x);
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        candidates &= candidates - 1;
        maximal_cliques(adj, r | 1 << v, p & adj[v], x & adj[v], emit);
        p &= !(1 << v);
        x |= 1 << v;
    }
}

/// Every non-central vertex must have a neighbor of strictly smaller
/// eccentricity.
pub fn unimodality_check(g: &Graph, table: &EccentricityTable) -> Verdict {
    let stuck = (0..g.n()).find(|&v| {
        table.ecc[v] > table.rad && g.neighbors(v).iter().all(|&u| table.ecc[u] >= table.ecc[v])
    });
    match stuck {
        None => Verdict::Pass,
        Some(v) => Verdict::Fail {
            witness: vec![v],
            detail: format!(
                "vertex {v} is a non-central local minimum (ecc {})",
                table.ecc[v]
            ),
        },
    }
}

/// `e(v) = d(v, C(G)) + rad(G)` for every vertex.
pub fn center_formula_check(g: &Graph, table: &EccentricityTable) -> Verdict {
    let to_center = match g.multi_source_bfs(&table.center) {
        Ok(d) => d,
        Err(_) => {
            return Verdict::Fail {
                witness: Vec::new(),
                detail: "empty center".into(),
            }
        }
    };
    match (0..g.n()).find(|&v| table.ecc[v] != to_center[v] + table.rad) {
        None => Verdict::Pass,
        Some(v) => Verdict::Fail {
            witness: vec![v],
            detail: format!(
                "ecc {} differs from d(v, C) + rad = {}",
                table.ecc[v],
                to_center[v] + table.rad
            ),
        },
    }
}

/// Distances inside the subgraph induced by `members`, from `source`.
pub(crate) fn induced_bfs(g: &Graph, inside: &[bool], source: Vertex) -> Vec<Dist> {
    let mut dist = vec![UNREACHED; g.n()];
    let mut queue = vec![source];
    dist[source] = 0;
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        for &w in g.neighbors(v) {
            if inside[w] && dist[w] == UNREACHED {
                dist[w] = dist[v] + 1;
                queue.push(w);
            }
        }
    }
    dist
}

/// The center must induce a connected, distance-preserving subgraph.
pub fn center_isometry_check(g: &Graph, table: &EccentricityTable) -> Verdict {
    let inside = table.center.mask(g.n());
    for c in table.center.iter() {
        let global = g.bfs(c);
        let local = induced_bfs(g, &inside, c);
        if let Some(other) = table.center.iter().find(|&o| local[o] != global[o]) {
            let detail = if local[other] == UNREACHED {
                format!("center vertices {c} and {other} are disconnected inside the center")
            } else {
                format!(
                    "d_C({c},{other}) = {} but d_G = {}",
                    local[other], global[other]
                )
            };
            return Verdict::Fail {
                witness: vec![c, other],
                detail,
            };
        }
    }
    Verdict::Pass
}
