//! Immutable undirected graphs in compressed adjacency form, plus the
//! distance primitives every other module is built on.
//!
//! Vertices are dense integers `0..n`. All set-valued results are sorted
//! ascending, so anything derived from them is reproducible bit for bit.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::Index;

use serde::Serialize;
use thiserror::Error;

/// Dense vertex identifier.
pub type Vertex = usize;

/// Hop count.
pub type Dist = u32;

/// Marker for vertices a search has not reached.
pub const UNREACHED: Dist = Dist::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: u64 },
    #[error("line {line}: duplicate edge {u} {v} (first seen on line {first_line})")]
    DuplicateEdge {
        line: usize,
        u: u64,
        v: u64,
        first_line: usize,
    },
    #[error("graph is disconnected: vertex {vertex} is not reachable from vertex {root}")]
    Disconnected { vertex: u64, root: u64 },
    #[error("graph has no vertices")]
    Empty,
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("source set is empty")]
    EmptySourceSet,
}

/// Sorted, duplicate-free set of vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn singleton(v: Vertex) -> Self {
        Self(vec![v])
    }

    /// Wraps a vector the caller guarantees to be strictly increasing.
    pub fn from_sorted(ids: Vec<Vertex>) -> Self {
        debug_assert!(
            ids.windows(2).all(|w| w[0] < w[1]),
            "ids not strictly increasing"
        );
        Self(ids)
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        Self(
            mask.iter()
                .enumerate()
                .filter_map(|(v, &inside)| inside.then_some(v))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }

    pub fn first(&self) -> Option<Vertex> {
        self.0.first().copied()
    }

    /// Membership bitmap over `0..n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.0 {
            mask[v] = true;
        }
        mask
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        VertexSet(out)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.intersection(other).len() == self.len()
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        let mut ids: Vec<Vertex> = iter.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        Self(ids)
    }
}

impl From<Vec<Vertex>> for VertexSet {
    fn from(ids: Vec<Vertex>) -> Self {
        ids.into_iter().collect()
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a Vertex;
    type IntoIter = std::slice::Iter<'a, Vertex>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Hop distances from a source vertex or a source set to every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceVector {
    sources: VertexSet,
    dist: Vec<Dist>,
}

impl DistanceVector {
    pub fn sources(&self) -> &VertexSet {
        &self.sources
    }

    pub fn as_slice(&self) -> &[Dist] {
        &self.dist
    }

    pub fn into_vec(self) -> Vec<Dist> {
        self.dist
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    /// Largest entry: the eccentricity of the source (set).
    pub fn max(&self) -> Dist {
        self.dist.iter().copied().max().unwrap_or(0)
    }

    /// Smallest-id vertex attaining [`DistanceVector::max`].
    pub fn farthest(&self) -> Vertex {
        let max = self.max();
        self.dist.iter().position(|&d| d == max).unwrap_or(0)
    }

    /// Minimum distance to any member of `set`.
    pub fn min_over(&self, set: &VertexSet) -> Option<Dist> {
        set.iter().map(|v| self.dist[v]).min()
    }
}

impl Index<Vertex> for DistanceVector {
    type Output = Dist;

    fn index(&self, v: Vertex) -> &Dist {
        &self.dist[v]
    }
}

/// Simple, undirected, connected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<Vertex>,
    labels: Vec<u64>,
}

impl Graph {
    /// Builds a graph on `0..n` from an edge list, rejecting loops,
    /// repeated edges and disconnected inputs.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut seen: HashMap<(Vertex, Vertex), usize> = HashMap::with_capacity(edges.len());
        for (idx, &(u, v)) in edges.iter().enumerate() {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop {
                    line: idx + 1,
                    vertex: u as u64,
                });
            }
            let key = (u.min(v), u.max(v));
            if let Some(&first) = seen.get(&key) {
                return Err(GraphError::DuplicateEdge {
                    line: idx + 1,
                    u: u as u64,
                    v: v as u64,
                    first_line: first,
                });
            }
            seen.insert(key, idx + 1);
        }
        let g = Self::assemble(n, edges, (0..n as u64).collect());
        g.ensure_connected()?;
        Ok(g)
    }

    fn assemble(n: usize, edges: &[(Vertex, Vertex)], labels: Vec<u64>) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0; offsets[n]];
        for &(u, v) in edges {
            targets[fill[u]] = v;
            fill[u] += 1;
            targets[fill[v]] = u;
            fill[v] += 1;
        }
        for v in 0..n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Graph {
            offsets,
            targets,
            labels,
        }
    }

    fn ensure_connected(&self) -> Result<(), GraphError> {
        let dist = self.bfs(0);
        match dist.as_slice().iter().position(|&d| d == UNREACHED) {
            Some(v) => Err(GraphError::Disconnected {
                vertex: self.labels[v],
                root: self.labels[0],
            }),
            None => Ok(()),
        }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Original input identifier of each vertex.
    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn has_identity_labels(&self) -> bool {
        self.labels.iter().enumerate().all(|(i, &l)| l == i as u64)
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet((0..self.n()).collect())
    }

    /// Edges `(u, v)` with `u < v`, ordered by `(u, v)`.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Serializes to the edge-list text format.
    ///
    /// Lines are ordered by larger endpoint, then smaller endpoint. When every
    /// vertex other than 0 has a smaller neighbor, reloading the text yields
    /// the same vertex numbering.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        if self.n() == 1 {
            out.push_str("0\n");
            return out;
        }
        for v in 0..self.n() {
            for &u in self.neighbors(v).iter().take_while(|&&u| u < v) {
                let _ = writeln!(out, "{u} {v}");
            }
        }
        out
    }

    pub fn bfs(&self, source: Vertex) -> DistanceVector {
        let mut dist = vec![UNREACHED; self.n()];
        let mut queue = Vec::with_capacity(self.n());
        self.bfs_fill(&[source], &mut dist, &mut queue);
        DistanceVector {
            sources: VertexSet::singleton(source),
            dist,
        }
    }

    /// `d(v, S)` for every vertex `v`.
    pub fn multi_source_bfs(&self, sources: &VertexSet) -> Result<DistanceVector, GraphError> {
        if sources.is_empty() {
            return Err(GraphError::EmptySourceSet);
        }
        let mut dist = vec![UNREACHED; self.n()];
        let mut queue = Vec::with_capacity(self.n());
        self.bfs_fill(sources.as_slice(), &mut dist, &mut queue);
        Ok(DistanceVector {
            sources: sources.clone(),
            dist,
        })
    }

    /// Plain BFS into caller-owned buffers. `dist` must be all `UNREACHED`.
    pub(crate) fn bfs_fill(&self, sources: &[Vertex], dist: &mut [Dist], queue: &mut Vec<Vertex>) {
        queue.clear();
        for &s in sources {
            dist[s] = 0;
            queue.push(s);
        }
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            let next = dist[v] + 1;
            for &w in self.neighbors(v) {
                if dist[w] == UNREACHED {
                    dist[w] = next;
                    queue.push(w);
                }
            }
        }
    }

    /// Eccentricity of `source` if it is at most `limit`, `None` as soon as
    /// some vertex is found beyond `limit`.
    pub(crate) fn eccentricity_within(
        &self,
        source: Vertex,
        limit: Dist,
        dist: &mut [Dist],
        queue: &mut Vec<Vertex>,
    ) -> Option<Dist> {
        queue.clear();
        dist[source] = 0;
        queue.push(source);
        let mut head = 0;
        let mut ecc = 0;
        let mut result = Some(0);
        'outer: while head < queue.len() {
            let v = queue[head];
            head += 1;
            let next = dist[v] + 1;
            for &w in self.neighbors(v) {
                if dist[w] == UNREACHED {
                    if next > limit {
                        result = None;
                        break 'outer;
                    }
                    dist[w] = next;
                    ecc = next;
                    queue.push(w);
                }
            }
        }
        let result = result.map(|_| ecc);
        for &v in queue.iter() {
            dist[v] = UNREACHED;
        }
        result
    }

    /// BFS layers `L_i(S)` for `i = 0..=max d(., S)`.
    pub fn layers(&self, sources: &VertexSet) -> Result<Vec<VertexSet>, GraphError> {
        let dist = self.multi_source_bfs(sources)?;
        Ok(layers_of(&dist))
    }

    /// Closed ball `N^r[v]`.
    pub fn ball(&self, v: Vertex, radius: Dist) -> VertexSet {
        let dist = self.bfs(v);
        VertexSet((0..self.n()).filter(|&u| dist[u] <= radius).collect())
    }

    /// Slice `L(v, j, S)`: vertices at distance `j` from `v` lying on a
    /// shortest path from `v` to `S`. Empty when `j > d(v, S)`.
    pub fn slice(
        &self,
        v: Vertex,
        j: Dist,
        to_set: &DistanceVector,
        from_v: &DistanceVector,
    ) -> VertexSet {
        let total = to_set[v];
        if j > total {
            return VertexSet::new();
        }
        VertexSet(
            (0..self.n())
                .filter(|&u| from_v[u] == j && to_set[u] == total - j)
                .collect(),
        )
    }

    /// Metric interval `I(x, y)`.
    pub fn interval(&self, x: Vertex, y: Vertex) -> VertexSet {
        let dx = self.bfs(x);
        let dy = self.bfs(y);
        let total = dx[y];
        VertexSet((0..self.n()).filter(|&w| dx[w] + dy[w] == total).collect())
    }
}

/// Groups vertices by their entry in `dist`.
pub fn layers_of(dist: &DistanceVector) -> Vec<VertexSet> {
    let depth = dist.max() as usize;
    let mut layers = vec![Vec::new(); depth + 1];
    for (v, &d) in dist.as_slice().iter().enumerate() {
        layers[d as usize].push(v);
    }
    layers.into_iter().map(VertexSet).collect()
}

/// Metric projection of a vertex onto a set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    pub members: VertexSet,
    pub distance: Dist,
}

/// `Pr(a, L)` and `d(a, L)`, given `rows[t] = bfs(targets[t])`.
///
/// # Panics
/// If `targets` is empty or `rows` is not aligned with it.
pub fn projection(a: Vertex, targets: &VertexSet, rows: &[DistanceVector]) -> Projection {
    assert!(!targets.is_empty(), "projection onto an empty set");
    assert_eq!(targets.len(), rows.len(), "one distance row per target");
    let distance = rows.iter().map(|row| row[a]).min().unwrap();
    let members = targets
        .iter()
        .zip(rows)
        .filter(|(_, row)| row[a] == distance)
        .map(|(u, _)| u)
        .collect();
    Projection {
        members: VertexSet(members),
        distance,
    }
}

/// Parses the edge-list text format.
///
/// Each non-comment line holds two whitespace-separated vertex ids. A line
/// with a single id declares an isolated vertex (only meaningful for the
/// one-vertex graph). Ids are renumbered in order of first appearance.
pub fn load_graph(text: &str) -> Result<Graph, GraphError> {
    let mut ids: HashMap<u64, Vertex> = HashMap::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    let mut seen: HashMap<(Vertex, Vertex), usize> = HashMap::new();

    let mut intern = |raw: u64, labels: &mut Vec<u64>| -> Vertex {
        *ids.entry(raw).or_insert_with(|| {
            labels.push(raw);
            labels.len() - 1
        })
    };

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let parse = |tok: &str| {
            tok.parse::<u64>().map_err(|_| GraphError::Parse {
                line: lineno,
                message: format!("expected a non-negative integer, found {tok:?}"),
            })
        };
        match tokens.as_slice() {
            [single] => {
                let raw = parse(single)?;
                intern(raw, &mut labels);
            }
            [a, b] => {
                let (ra, rb) = (parse(a)?, parse(b)?);
                if ra == rb {
                    return Err(GraphError::SelfLoop {
                        line: lineno,
                        vertex: ra,
                    });
                }
                let (u, v) = (intern(ra, &mut labels), intern(rb, &mut labels));
                let key = (u.min(v), u.max(v));
                if let Some(&first_line) = seen.get(&key) {
                    return Err(GraphError::DuplicateEdge {
                        line: lineno,
                        u: ra,
                        v: rb,
                        first_line,
                    });
                }
                seen.insert(key, lineno);
                edges.push((u, v));
            }
            _ => {
                return Err(GraphError::Parse {
                    line: lineno,
                    message: format!("expected \"u v\", found {} fields", tokens.len()),
                })
            }
        }
    }
    if labels.is_empty() {
        return Err(GraphError::Empty);
    }
    let g = Graph::assemble(labels.len(), &edges, labels);
    g.ensure_connected()?;
    Ok(g)
}
