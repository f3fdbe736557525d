use crate::graph::{Dist, DistanceVector, Graph, Vertex, UNREACHED};

/// Result of one descent probe from a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Descent {
    /// No neighbor has smaller eccentricity; on Helly graphs the vertex is
    /// central and this is the radius.
    Central { ecc: Dist },
    /// Smallest-id neighbor with strictly smaller eccentricity.
    Better { vertex: Vertex, ecc: Dist },
}

/// Looks for a neighbor of `v` whose eccentricity is `e(v) - 1`.
///
/// Each neighbor is probed with a BFS that stops as soon as it reaches a
/// vertex at distance `e(v)`, so a probe costs at most one full BFS.
pub fn descend_step(g: &Graph, v: Vertex, from_v: &DistanceVector) -> Descent {
    let ecc = from_v.max();
    if ecc == 0 {
        return Descent::Central { ecc };
    }
    let mut dist = vec![UNREACHED; g.n()];
    let mut queue = Vec::with_capacity(g.n());
    for &u in g.neighbors(v) {
        if let Some(e) = g.eccentricity_within(u, ecc - 1, &mut dist, &mut queue) {
            return Descent::Better { vertex: u, ecc: e };
        }
    }
    Descent::Central { ecc }
}

/// A vertex of small eccentricity with its BFS row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxCenter {
    pub vertex: Vertex,
    pub ecc: Dist,
    pub dist: DistanceVector,
    pub rounds: usize,
}

/// Iterated double sweep. From the current vertex `c`, take a farthest
/// vertex `u`, a farthest vertex `w` from `u`, and the smallest-id vertex
/// at distance `floor(d(u,w)/2)` from `u` on a shortest `u`–`w` path. The
/// midpoint replaces `c` only if its eccentricity is strictly smaller.
pub fn approx_center(g: &Graph) -> ApproxCenter {
    let mut best = ApproxCenter {
        vertex: 0,
        ecc: 0,
        dist: g.bfs(0),
        rounds: 0,
    };
    best.ecc = best.dist.max();
    for _ in 0..g.n() {
        let u = best.dist.farthest();
        let from_u = g.bfs(u);
        let w = from_u.farthest();
        let from_w = g.bfs(w);
        let total = from_u[w];
        let half = total / 2;
        let mid = (0..g.n())
            .find(|&x| from_u[x] == half && from_w[x] == total - half)
            .expect("a shortest path has a vertex at every distance");
        let from_mid = g.bfs(mid);
        let ecc = from_mid.max();
        if ecc >= best.ecc {
            break;
        }
        best = ApproxCenter {
            vertex: mid,
            ecc,
            dist: from_mid,
            rounds: best.rounds + 1,
        };
    }
    best
}

/// A central vertex and the radius: approximate, then descend until no
/// neighbor improves.
pub fn find_center(g: &Graph) -> (Vertex, Dist) {
    let start = approx_center(g);
    let (mut c, mut row) = (start.vertex, start.dist);
    for _ in 0..g.n() {
        match descend_step(g, c, &row) {
            Descent::Central { ecc } => return (c, ecc),
            Descent::Better { vertex, .. } => {
                c = vertex;
                row = g.bfs(c);
            }
        }
    }
    (c, row.max())
}
