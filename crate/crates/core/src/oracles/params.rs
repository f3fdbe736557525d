//! Exact metric parameters (hyperbolicity, ball pseudoconvexity, center
//! diameters over all subsets) and the inequalities that tie them together
//! on Helly graphs.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{
    all_ecc_bruteforce, check_cap, induced_bfs, mask_to_set, subset_ecc_rows, Caps, DistanceMatrix,
    OracleError, HARD_SUBSET_LIMIT,
};
use crate::graph::{Dist, Graph, Vertex, VertexSet};

/// A non-negative half-integer, stored as twice its value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Delta(u32);

impl Delta {
    pub const ZERO: Delta = Delta(0);

    pub fn from_half_units(half_units: u32) -> Self {
        Delta(half_units)
    }

    pub fn half_units(self) -> u32 {
        self.0
    }

    /// Smallest integer at least `2 * self + 1`.
    pub fn center_radius_bound(self) -> Dist {
        self.0 + 1
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for Delta {
    type Err = String;

    /// Accepts `3`, `3/2`, `1.5` and `1.0`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || format!("invalid half-integer {s:?}");
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad())?;
            return match den.trim() {
                "1" => Ok(Delta(num * 2)),
                "2" => Ok(Delta(num)),
                _ => Err(bad()),
            };
        }
        if let Some((whole, frac)) = s.split_once('.') {
            let whole: u32 = whole.parse().map_err(|_| bad())?;
            return match frac.trim_end_matches('0') {
                "" => Ok(Delta(whole * 2)),
                "5" => Ok(Delta(whole * 2 + 1)),
                _ => Err(bad()),
            };
        }
        s.parse::<u32>().map(|v| Delta(v * 2)).map_err(|_| bad())
    }
}

impl Serialize for Delta {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Delta", 2)?;
        st.serialize_field("half_units", &self.0)?;
        st.serialize_field("display", &self.to_string())?;
        st.end()
    }
}

/// Exact Gromov hyperbolicity with a quadruple attaining it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hyperbolicity {
    pub delta: Delta,
    /// Lexicographically smallest maximizing quadruple (absent when n < 4).
    pub witness: Option<[Vertex; 4]>,
    /// `d(a,b)+d(c,d)`, `d(a,c)+d(b,d)`, `d(a,d)+d(b,c)` for the witness.
    pub sums: Option<[Dist; 3]>,
}

pub(crate) fn pairing_sums(dm: &DistanceMatrix, [a, b, c, d]: [Vertex; 4]) -> [Dist; 3] {
    [
        dm.get(a, b) + dm.get(c, d),
        dm.get(a, c) + dm.get(b, d),
        dm.get(a, d) + dm.get(b, c),
    ]
}

/// Twice the hyperbolicity of a single quadruple: largest minus
/// second-largest pairing sum.
pub(crate) fn quadruple_half_units(sums: [Dist; 3]) -> u32 {
    let mut s = sums;
    s.sort_unstable();
    s[2] - s[1]
}

/// Four-point scan over all quadruples, `O(n^4)`.
pub fn hyperbolicity_exact(g: &Graph, cap: usize) -> Result<Hyperbolicity, OracleError> {
    check_cap(g, cap, "exact hyperbolicity", "--cap-quadruples")?;
    let n = g.n();
    if n < 4 {
        return Ok(Hyperbolicity {
            delta: Delta::ZERO,
            witness: None,
            sums: None,
        });
    }
    let dm = DistanceMatrix::new(g);
    let best = (0..n - 3)
        .into_par_iter()
        .map(|a| {
            let mut best: Option<(u32, [Vertex; 4])> = None;
            for b in a + 1..n {
                let ab = dm.get(a, b);
                for c in b + 1..n {
                    let (ac, bc) = (dm.get(a, c), dm.get(b, c));
                    for d in c + 1..n {
                        let sums = [ab + dm.get(c, d), ac + dm.get(b, d), dm.get(a, d) + bc];
                        let h = quadruple_half_units(sums);
                        if best.is_none_or(|(bh, _)| h > bh) {
                            best = Some((h, [a, b, c, d]));
                        }
                    }
                }
            }
            best
        })
        .reduce(|| None, pick_better);
    let (h, quad) = best.expect("at least one quadruple");
    Ok(Hyperbolicity {
        delta: Delta(h),
        witness: Some(quad),
        sums: Some(pairing_sums(&dm, quad)),
    })
}

fn pick_better<W: Ord>(x: Option<(u32, W)>, y: Option<(u32, W)>) -> Option<(u32, W)> {
    match (x, y) {
        (None, y) => y,
        (x, None) => x,
        (Some(x), Some(y)) => {
            if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

/// Ball `N^radius[center]` with `x, y` inside and `z` on a shortest
/// `x`–`y` path outside it, as far from both ends as `beta` says.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BetaWitness {
    pub center: Vertex,
    pub radius: Dist,
    pub x: Vertex,
    pub y: Vertex,
    pub z: Vertex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pseudoconvexity {
    pub beta: Dist,
    /// `None` when every ball is convex.
    pub witness: Option<BetaWitness>,
}

/// Smallest `beta` making every ball `beta`-pseudoconvex.
///
/// For fixed `v, x, y, z` the ball radii that contain `x, y` but miss `z`
/// are `max(1, d(v,x), d(v,y)) <= r < d(v,z)`, so only the smallest such
/// radius is examined and the scan is `O(n^4)`.
pub fn pseudoconvexity_beta(g: &Graph, cap: usize) -> Result<Pseudoconvexity, OracleError> {
    check_cap(g, cap, "pseudoconvexity", "--cap-pseudoconvex")?;
    let n = g.n();
    let dm = DistanceMatrix::new(g);
    let best = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut best: Option<(u32, BetaWitness)> = None;
            for x in 0..n {
                for y in x + 1..n {
                    let radius = dm.get(v, x).max(dm.get(v, y)).max(1);
                    let dxy = dm.get(x, y);
                    for z in 0..n {
                        let (zx, zy) = (dm.get(z, x), dm.get(z, y));
                        if zx + zy != dxy || dm.get(v, z) <= radius {
                            continue;
                        }
                        let w = BetaWitness {
                            center: v,
                            radius,
                            x,
                            y,
                            z,
                        };
                        best = pick_better(best, Some((zx.min(zy), w)));
                    }
                }
            }
            best
        })
        .reduce(|| None, pick_better);
    Ok(match best {
        None => Pseudoconvexity {
            beta: 0,
            witness: None,
        },
        Some((beta, w)) => Pseudoconvexity {
            beta,
            witness: Some(w),
        },
    })
}

/// Largest center diameter over all nonempty vertex subsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Kappa {
    pub kappa: Dist,
    /// Maximizing subset with the smallest bitmask.
    pub witness: VertexSet,
    pub witness_center: VertexSet,
    /// First subset whose center is not an isometric subgraph, if any.
    pub helly_violation: Option<VertexSet>,
}

/// `max_M diam(C_M(G))`, measuring distances in `G`; the induced center
/// diameter is recomputed and any mismatch is reported as a violation.
pub fn kappa_exact(g: &Graph, cap: usize) -> Result<Kappa, OracleError> {
    check_cap(g, cap.min(HARD_SUBSET_LIMIT), "kappa", "--cap-kappa")?;
    let n = g.n();
    let dm = DistanceMatrix::new(g);
    let rows = subset_ecc_rows(&dm);
    let mut best: Option<(u32, usize)> = None;
    let mut violation = None;
    let mut inside = vec![false; n];
    for mask in 1..1usize << n {
        let row = &rows[mask * n..(mask + 1) * n];
        let rad = *row.iter().min().unwrap();
        let center: Vec<Vertex> = (0..n).filter(|&v| row[v] == rad).collect();
        let mut diam = 0;
        for (i, &u) in center.iter().enumerate() {
            for &w in &center[i + 1..] {
                diam = diam.max(dm.get(u, w));
            }
        }
        if best.is_none_or(|(b, _)| diam > b) {
            best = Some((diam, mask));
        }
        if violation.is_none() {
            for &c in &center {
                inside[c] = true;
            }
            let isometric = center.iter().all(|&u| {
                let local = induced_bfs(g, &inside, u);
                center.iter().all(|&w| local[w] == dm.get(u, w))
            });
            for &c in &center {
                inside[c] = false;
            }
            if !isometric {
                violation = Some(mask_to_set(mask, n));
            }
        }
    }
    let (kappa, mask) = best.unwrap();
    let row = &rows[mask * n..(mask + 1) * n];
    let rad = *row.iter().min().unwrap();
    Ok(Kappa {
        kappa,
        witness: mask_to_set(mask, n),
        witness_center: (0..n).filter(|&v| row[v] == rad).collect(),
        helly_violation: violation,
    })
}

/// Inputs to the parameter inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamInputs {
    pub delta: Delta,
    pub beta: Dist,
    pub kappa: Option<Dist>,
    /// Diameter of `C(G)`.
    pub center_diam: Dist,
    /// Radius of `C(G)` measured inside the center.
    pub center_rad: Dist,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InequalityVerdict {
    pub inequality: &'static str,
    pub lhs: String,
    pub rhs: String,
    pub status: Status,
}

fn half(h: u32) -> String {
    Delta(h).to_string()
}

pub(crate) fn ceil_sqrt(n: usize) -> u32 {
    let mut s = (n as f64).sqrt() as u32;
    while (s as usize) * (s as usize) < n {
        s += 1;
    }
    while s > 0 && ((s - 1) as usize) * ((s - 1) as usize) >= n {
        s -= 1;
    }
    s
}

/// Evaluates every inequality among the parameters that does not need the
/// largest isometric grid. All comparisons are done in half-units.
pub fn parameter_inequality_report(p: &ParamInputs) -> Vec<InequalityVerdict> {
    let h = p.delta.half_units();
    let s = ceil_sqrt(p.n);
    let mut out = Vec::new();
    let mut push = |inequality: &'static str, lhs: Option<u32>, rhs: Option<u32>| {
        let status = match (lhs, rhs) {
            (Some(l), Some(r)) if l <= r => Status::Pass,
            (Some(_), Some(_)) => Status::Fail,
            _ => Status::Skipped,
        };
        out.push(InequalityVerdict {
            inequality,
            lhs: lhs.map_or("-".into(), half),
            rhs: rhs.map_or("-".into(), half),
            status,
        });
    };
    let kappa = p.kappa.map(|k| 2 * k);
    let beta = 2 * p.beta;
    push("kappa <= 2*delta + 1", kappa, Some(2 * h + 2));
    push(
        "beta <= max(0, 2*delta - 1)",
        Some(beta),
        Some(2 * h.saturating_sub(1)),
    );
    push(
        "kappa <= max(3, 2*beta + 1)",
        kappa,
        Some(6.max(2 * (2 * p.beta + 1))),
    );
    push("beta <= kappa + 1", Some(beta), kappa.map(|k| k + 2));
    push("delta <= beta + 1", Some(h), Some(beta + 2));
    push("delta <= kappa/2 + 1", Some(h), p.kappa.map(|k| k + 2));
    push("delta <= ceil(sqrt(n)) + 1", Some(h), Some(2 * s + 2));
    push(
        "diam(C(G)) <= 2*ceil(sqrt(n)) + 3",
        Some(p.center_diam.saturating_mul(2)),
        Some(2 * (2 * s + 3)),
    );
    push(
        "diam(C(G)) <= 2*delta + 1",
        Some(p.center_diam.saturating_mul(2)),
        Some(2 * h + 2),
    );
    push(
        "rad(C(G)) <= delta + 1",
        Some(p.center_rad.saturating_mul(2)),
        Some(h + 2),
    );
    out
}

/// Exact parameters plus inequality verdicts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParamReport {
    pub hyperbolicity: Hyperbolicity,
    pub pseudoconvexity: Pseudoconvexity,
    /// `None` when `n` is above the kappa cap.
    pub kappa: Option<Kappa>,
    pub center_diam: Dist,
    pub center_rad: Dist,
    pub verdicts: Vec<InequalityVerdict>,
}

impl ParamReport {
    pub fn violations(&self) -> impl Iterator<Item = &InequalityVerdict> {
        self.verdicts.iter().filter(|v| v.status == Status::Fail)
    }
}

/// Computes delta, beta and (for small graphs) kappa, then evaluates the
/// inequalities. Delta and beta respect their caps strictly; kappa is
/// reported as absent above its cap.
pub fn parameter_report(g: &Graph, caps: &Caps) -> Result<ParamReport, OracleError> {
    let hyperbolicity = hyperbolicity_exact(g, caps.quadruples)?;
    let pseudoconvexity = pseudoconvexity_beta(g, caps.pseudoconvex)?;
    let kappa = if g.n() <= caps.kappa.min(HARD_SUBSET_LIMIT) {
        Some(kappa_exact(g, caps.kappa)?)
    } else {
        None
    };
    let table = all_ecc_bruteforce(g);
    let (center_diam, center_rad) = center_shape(g, &table.center);
    let verdicts = parameter_inequality_report(&ParamInputs {
        delta: hyperbolicity.delta,
        beta: pseudoconvexity.beta,
        kappa: kappa.as_ref().map(|k| k.kappa),
        center_diam,
        center_rad,
        n: g.n(),
    });
    Ok(ParamReport {
        hyperbolicity,
        pseudoconvexity,
        kappa,
        center_diam,
        center_rad,
        verdicts,
    })
}

/// Diameter and radius of the subgraph induced by `center`; a
/// disconnected center has diameter `UNREACHED`.
fn center_shape(g: &Graph, center: &VertexSet) -> (Dist, Dist) {
    let inside = center.mask(g.n());
    let mut diam = 0;
    let mut rad = Dist::MAX;
    for c in center.iter() {
        let local = induced_bfs(g, &inside, c);
        let ecc = center.iter().map(|w| local[w]).max().unwrap_or(0);
        diam = diam.max(ecc);
        rad = rad.min(ecc);
    }
    if rad == Dist::MAX {
        rad = 0;
    }
    (diam, rad)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(Vertex, Vertex)]) -> Graph {
        Graph::from_edges(n, edges).unwrap()
    }

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        graph(n, &edges)
    }

    fn c4() -> Graph {
        graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])
    }

    fn k4() -> Graph {
        graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    fn king3() -> Graph {
        let mut edges = Vec::new();
        for a in 0..9usize {
            for b in a + 1..9 {
                if (a % 3).abs_diff(b % 3) <= 1 && (a / 3).abs_diff(b / 3) <= 1 {
                    edges.push((a, b));
                }
            }
        }
        graph(9, &edges)
    }

    /// Independent four-point oracle: every ordered quadruple, every pairing.
    fn delta_by_definition(g: &Graph) -> u32 {
        let n = g.n();
        let d: Vec<Vec<Dist>> = (0..n).map(|v| g.bfs(v).into_vec()).collect();
        let mut best = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for e in 0..n {
                        let mut s = [d[a][b] + d[c][e], d[a][c] + d[b][e], d[a][e] + d[b][c]];
                        s.sort();
                        best = best.max(s[2] - s[1]);
                    }
                }
            }
        }
        best
    }

    #[test]
    fn delta_parsing_and_display() {
        assert_eq!("1/2".parse::<Delta>().unwrap(), Delta(1));
        assert_eq!("1.5".parse::<Delta>().unwrap(), Delta(3));
        assert_eq!("2".parse::<Delta>().unwrap(), Delta(4));
        assert_eq!("2.0".parse::<Delta>().unwrap(), Delta(4));
        assert_eq!("4/1".parse::<Delta>().unwrap(), Delta(8));
        assert!("1/3".parse::<Delta>().is_err());
        assert!("0.25".parse::<Delta>().is_err());
        assert_eq!(Delta(3).to_string(), "3/2");
        assert_eq!(Delta(4).to_string(), "2");
        assert_eq!(Delta(1).center_radius_bound(), 2);
    }

    #[test]
    fn hyperbolicity_values() {
        assert_eq!(
            hyperbolicity_exact(&path(7), 150).unwrap().delta,
            Delta::ZERO
        );
        let h = hyperbolicity_exact(&c4(), 150).unwrap();
        assert_eq!(h.delta, Delta(2));
        assert_eq!(h.witness, Some([0, 1, 2, 3]));
        assert_eq!(h.sums, Some([2, 4, 2]));
        // The four edge midpoints of the king grid induce an isometric C4.
        let h = hyperbolicity_exact(&king3(), 150).unwrap();
        assert_eq!(h.delta, Delta(2));
        assert_eq!(h.delta.half_units(), delta_by_definition(&king3()));
        assert_eq!(h.witness, Some([1, 3, 5, 7]));
        assert_eq!(quadruple_half_units(h.sums.unwrap()), 2);
        assert_eq!(hyperbolicity_exact(&path(3), 150).unwrap().witness, None);
        assert!(matches!(
            hyperbolicity_exact(&path(200), 150),
            Err(OracleError::CapExceeded { .. })
        ));
    }

    #[test]
    fn beta_values() {
        assert_eq!(pseudoconvexity_beta(&path(6), 40).unwrap().beta, 0);
        let p = pseudoconvexity_beta(&c4(), 40).unwrap();
        assert_eq!(p.beta, 1);
        assert_eq!(
            p.witness,
            Some(BetaWitness {
                center: 0,
                radius: 1,
                x: 1,
                y: 3,
                z: 2
            })
        );
        // N[1] holds 3 and 5, whose midpoint 7 lies outside it.
        let p = pseudoconvexity_beta(&king3(), 40).unwrap();
        assert_eq!(p.beta, 1);
        assert_eq!(p.witness.unwrap().z, 7);
    }

    #[test]
    fn kappa_values() {
        let k = kappa_exact(&path(5), 14).unwrap();
        assert_eq!(k.kappa, 1);
        assert_eq!(k.witness.as_slice(), &[0, 1]);
        assert_eq!(k.witness_center.as_slice(), &[0, 1]);
        assert_eq!(k.helly_violation, None);
        assert_eq!(kappa_exact(&k4(), 14).unwrap().kappa, 1);
        assert_eq!(kappa_exact(&path(2), 14).unwrap().kappa, 1);
        let k = kappa_exact(&c4(), 14).unwrap();
        assert_eq!(k.kappa, 2);
    }

    #[test]
    fn inequality_report_on_small_examples() {
        for g in [path(6), k4(), king3()] {
            let report = parameter_report(&g, &Caps::default()).unwrap();
            assert_eq!(report.violations().count(), 0, "{report:?}");
        }
        let report = parameter_report(&king3(), &Caps::default()).unwrap();
        assert_eq!(report.pseudoconvexity.beta, 1);
        assert!(report.kappa.unwrap().kappa <= 3);
    }

    #[test]
    fn inequality_report_flags_violations_and_skips() {
        let verdicts = parameter_inequality_report(&ParamInputs {
            delta: Delta::ZERO,
            beta: 0,
            kappa: None,
            center_diam: 3,
            center_rad: 2,
            n: 9,
        });
        let status = |name: &str| {
            verdicts
                .iter()
                .find(|v| v.inequality == name)
                .unwrap()
                .status
        };
        assert_eq!(status("kappa <= 2*delta + 1"), Status::Skipped);
        assert_eq!(status("diam(C(G)) <= 2*delta + 1"), Status::Fail);
        assert_eq!(status("rad(C(G)) <= delta + 1"), Status::Fail);
        assert_eq!(status("delta <= ceil(sqrt(n)) + 1"), Status::Pass);
    }

    #[test]
    fn integer_square_root() {
        for n in 0..2000usize {
            let s = ceil_sqrt(n) as usize;
            assert!(s * s >= n && (s == 0 || (s - 1) * (s - 1) < n), "n={n}");
        }
    }
}
