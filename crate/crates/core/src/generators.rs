//! Seeded graph families: Helly instances and non-Helly controls.
//!
//! Every generator numbers vertices so that each vertex other than 0 has a
//! smaller neighbor, which keeps ids stable through an edge-list round trip.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::oracles::{helly_check_subsets, Caps};

/// Largest vertex count any generator will emit.
pub const MAX_VERTICES: usize = 5_000_000;

const MAX_BLOCK: usize = 4;
const HELLY_ATTEMPTS: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("cannot parse generator spec {text:?}: {message}")]
    Parse { text: String, message: String },
    #[error("{0}")]
    Unsatisfiable(String),
}

/// A graph family with its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenSpec {
    Path { n: usize },
    Complete { n: usize },
    RandomTree { n: usize, seed: u64 },
    KingGrid { w: usize, h: usize },
    RectGrid { w: usize, h: usize },
    BlockGraph { n: usize, seed: u64 },
    Caterpillar { spine: usize, legs: usize },
    Cone(Box<GenSpec>),
    StrongProduct(Box<GenSpec>, Box<GenSpec>),
    RandomHellySmall { n: usize, seed: u64 },
}

/// What is known about a generated graph before any check runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenMeta {
    pub family: String,
    pub n: usize,
    pub m: usize,
    pub expected_helly: bool,
    /// Side length (in edges) of a square rectilinear grid embedded
    /// isometrically by construction.
    pub gamma_lower_bound: Option<usize>,
    pub note: String,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub graph: Graph,
    pub meta: GenMeta,
}

impl GenSpec {
    /// Parses `name(arg, ...)`. Seeds omitted from random families default
    /// to `seed`.
    pub fn parse_with_seed(text: &str, seed: u64) -> Result<Self, GenError> {
        let mut p = Parser { text, pos: 0, seed };
        let spec = p.spec()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("trailing input"));
        }
        Ok(spec)
    }

    fn family(&self) -> &'static str {
        match self {
            GenSpec::Path { .. } => "path",
            GenSpec::Complete { .. } => "complete",
            GenSpec::RandomTree { .. } => "random-tree",
            GenSpec::KingGrid { .. } => "king-grid",
            GenSpec::RectGrid { .. } => "rect-grid",
            GenSpec::BlockGraph { .. } => "block-graph",
            GenSpec::Caterpillar { .. } => "caterpillar",
            GenSpec::Cone(_) => "cone",
            GenSpec::StrongProduct(..) => "strong-product",
            GenSpec::RandomHellySmall { .. } => "random-helly-small",
        }
    }

    /// Vertex count, or `None` on overflow.
    pub fn vertex_count(&self) -> Option<usize> {
        match self {
            GenSpec::Path { n }
            | GenSpec::Complete { n }
            | GenSpec::RandomTree { n, .. }
            | GenSpec::BlockGraph { n, .. }
            | GenSpec::RandomHellySmall { n, .. } => Some(*n),
            GenSpec::KingGrid { w, h } | GenSpec::RectGrid { w, h } => w.checked_mul(*h),
            GenSpec::Caterpillar { spine, legs } => spine.checked_mul(legs.checked_add(1)?),
            GenSpec::Cone(base) => base.vertex_count()?.checked_add(1),
            GenSpec::StrongProduct(a, b) => a.vertex_count()?.checked_mul(b.vertex_count()?),
        }
    }

    /// Builds the graph.
    pub fn generate(&self) -> Result<Generated, GenError> {
        self.validate()?;
        let (graph, expected_helly, gamma, note) = self.build()?;
        debug_assert!((1..graph.n()).all(|v| graph.neighbors(v)[0] < v));
        let meta = GenMeta {
            family: self.to_string(),
            n: graph.n(),
            m: graph.m(),
            expected_helly,
            gamma_lower_bound: gamma,
            note,
        };
        Ok(Generated { graph, meta })
    }

    fn validate(&self) -> Result<(), GenError> {
        let fail = |msg: String| Err(GenError::Unsatisfiable(msg));
        match self {
            GenSpec::Path { n }
            | GenSpec::Complete { n }
            | GenSpec::RandomTree { n, .. }
            | GenSpec::BlockGraph { n, .. }
            | GenSpec::RandomHellySmall { n, .. }
                if *n == 0 =>
            {
                return fail(format!("{}: size must be at least 1", self.family()));
            }
            GenSpec::KingGrid { w, h } | GenSpec::RectGrid { w, h } if *w == 0 || *h == 0 => {
                return fail(format!("{}: sides must be at least 1", self.family()));
            }
            GenSpec::Caterpillar { spine: 0, .. } => {
                return fail("caterpillar: spine must be at least 1".into());
            }
            GenSpec::RandomHellySmall { n, .. } if *n > Caps::default().subsets => {
                return fail(format!(
                    "random-helly-small: n={n} exceeds the subset oracle cap {}",
                    Caps::default().subsets
                ));
            }
            GenSpec::Cone(base) => base.validate()?,
            GenSpec::StrongProduct(a, b) => {
                a.validate()?;
                b.validate()?;
            }
            _ => {}
        }
        match self.vertex_count() {
            Some(n) if n <= MAX_VERTICES => Ok(()),
            _ => fail(format!("{self}: more than {MAX_VERTICES} vertices")),
        }
    }

    fn build(&self) -> Result<(Graph, bool, Option<usize>, String), GenError> {
        let graph = |n: usize, edges: Vec<(Vertex, Vertex)>| {
            Graph::from_edges(n, &edges).expect("generators emit simple connected graphs")
        };
        Ok(match *self {
            GenSpec::Path { n } => (
                graph(n, (1..n).map(|v| (v - 1, v)).collect()),
                true,
                None,
                "tree".into(),
            ),
            GenSpec::Complete { n } => {
                let edges = (0..n).flat_map(|v| (0..v).map(move |u| (u, v))).collect();
                (graph(n, edges), true, None, "complete graph".into())
            }
            GenSpec::RandomTree { n, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let edges = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
                (
                    graph(n, edges),
                    true,
                    None,
                    "tree, uniform attachment".into(),
                )
            }
            GenSpec::KingGrid { w, h } => (
                graph(w * h, grid_edges(w, h, true)),
                true,
                None,
                "strong product of two paths".into(),
            ),
            GenSpec::RectGrid { w, h } => {
                let side = w.min(h) - 1;
                let (helly, note) = if side == 0 {
                    (true, "a path")
                } else {
                    (
                        false,
                        "Cartesian product of two paths; contains an induced C4",
                    )
                };
                (
                    graph(w * h, grid_edges(w, h, false)),
                    helly,
                    Some(side),
                    note.into(),
                )
            }
            GenSpec::BlockGraph { n, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut edges = Vec::new();
                let mut count = 1;
                while count < n {
                    let cut = rng.gen_range(0..count);
                    let size = rng.gen_range(1..=MAX_BLOCK).min(n - count);
                    let block: Vec<Vertex> =
                        std::iter::once(cut).chain(count..count + size).collect();
                    for (i, &a) in block.iter().enumerate() {
                        for &b in &block[i + 1..] {
                            edges.push((a, b));
                        }
                    }
                    count += size;
                }
                (
                    graph(n, edges),
                    true,
                    None,
                    "cliques glued at cut vertices".into(),
                )
            }
            GenSpec::Caterpillar { spine, legs } => {
                let mut edges: Vec<_> = (1..spine).map(|v| (v - 1, v)).collect();
                for v in 0..spine {
                    for leg in 0..legs {
                        edges.push((v, spine + v * legs + leg));
                    }
                }
                (graph(spine * (legs + 1), edges), true, None, "tree".into())
            }
            GenSpec::Cone(ref base) => {
                let built = base.generate()?;
                let g = built.graph;
                let apex = g.n();
                let mut edges: Vec<_> = g.edges().collect();
                edges.extend((0..apex).map(|v| (v, apex)));
                let note = format!("cone over {}", built.meta.family);
                (
                    graph(apex + 1, edges),
                    built.meta.expected_helly,
                    None,
                    note,
                )
            }
            GenSpec::StrongProduct(ref a, ref b) => {
                let (ga, gb) = (a.generate()?, b.generate()?);
                let note = format!(
                    "strong product of {} and {}",
                    ga.meta.family, gb.meta.family
                );
                let helly = ga.meta.expected_helly && gb.meta.expected_helly;
                let g = strong_product(&ga.graph, &gb.graph);
                (g, helly, None, note)
            }
            GenSpec::RandomHellySmall { n, seed } => (
                random_helly(n, seed)?,
                true,
                None,
                "random graph certified Helly".into(),
            ),
        })
    }
}

fn grid_edges(w: usize, h: usize, diagonals: bool) -> Vec<(Vertex, Vertex)> {
    let id = |x: usize, y: usize| y * w + x;
    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if x + 1 < w {
                edges.push((id(x, y), id(x + 1, y)));
            }
            if y + 1 < h {
                edges.push((id(x, y), id(x, y + 1)));
                if diagonals {
                    if x + 1 < w {
                        edges.push((id(x, y), id(x + 1, y + 1)));
                    }
                    if x > 0 {
                        edges.push((id(x, y), id(x - 1, y + 1)));
                    }
                }
            }
        }
    }
    edges
}

/// Vertex `(a, b)` is numbered `a * |B| + b`.
pub fn strong_product(ga: &Graph, gb: &Graph) -> Graph {
    let nb = gb.n();
    let mut edges = Vec::new();
    for a in 0..ga.n() {
        for b in 0..nb {
            let v = a * nb + b;
            for &a2 in std::iter::once(&a).chain(ga.neighbors(a)) {
                for &b2 in std::iter::once(&b).chain(gb.neighbors(b)) {
                    let w = a2 * nb + b2;
                    if v < w {
                        edges.push((v, w));
                    }
                }
            }
        }
    }
    Graph::from_edges(ga.n() * nb, &edges).expect("strong product of connected graphs")
}

fn random_helly(n: usize, seed: u64) -> Result<Graph, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = Caps::default().subsets;
    for _ in 0..HELLY_ATTEMPTS {
        let p: f64 = rng.gen_range(0.15..0.95);
        let mut edges = Vec::new();
        for v in 1..n {
            for u in 0..v {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        let Ok(g) = Graph::from_edges(n, &edges) else {
            continue;
        };
        if helly_check_subsets(&g, cap).is_ok_and(|v| v.is_helly()) {
            return Ok(bfs_relabel(&g));
        }
    }
    Err(GenError::Unsatisfiable(format!(
        "random-helly-small({n},{seed}): no Helly sample in {HELLY_ATTEMPTS} attempts"
    )))
}

/// Renumbers vertices in BFS order from vertex 0.
fn bfs_relabel(g: &Graph) -> Graph {
    let dist = g.bfs(0);
    let mut order: Vec<Vertex> = (0..g.n()).collect();
    order.sort_by_key(|&v| (dist[v], v));
    let mut new_id = vec![0; g.n()];
    for (i, &v) in order.iter().enumerate() {
        new_id[v] = i;
    }
    let edges: Vec<_> = g.edges().map(|(u, v)| (new_id[u], new_id[v])).collect();
    Graph::from_edges(g.n(), &edges).expect("relabeling preserves validity")
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.family();
        match self {
            GenSpec::Path { n } | GenSpec::Complete { n } => write!(f, "{name}({n})"),
            GenSpec::RandomTree { n, seed }
            | GenSpec::BlockGraph { n, seed }
            | GenSpec::RandomHellySmall { n, seed } => write!(f, "{name}({n},{seed})"),
            GenSpec::KingGrid { w, h } | GenSpec::RectGrid { w, h } => write!(f, "{name}({w},{h})"),
            GenSpec::Caterpillar { spine, legs } => write!(f, "{name}({spine},{legs})"),
            GenSpec::Cone(base) => write!(f, "{name}({base})"),
            GenSpec::StrongProduct(a, b) => write!(f, "{name}({a},{b})"),
        }
    }
}

impl FromStr for GenSpec {
    type Err = GenError;

    fn from_str(text: &str) -> Result<Self, GenError> {
        GenSpec::parse_with_seed(text, 0)
    }
}

enum Arg {
    Int(u64),
    Spec(GenSpec),
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    seed: u64,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> GenError {
        GenError::Parse {
            text: self.text.to_string(),
            message: format!("{message} at byte {}", self.pos),
        }
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &str {
        self.skip_ws();
        let start = self.pos;
        while self.text[self.pos..].starts_with(&f) {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn arg(&mut self) -> Result<Arg, GenError> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            let digits = self.take_while(|c| c.is_ascii_digit());
            digits
                .parse()
                .map(Arg::Int)
                .map_err(|_| self.error("number too large"))
        } else {
            self.spec().map(Arg::Spec)
        }
    }

    fn spec(&mut self) -> Result<GenSpec, GenError> {
        let name = self
            .take_while(|c| c.is_ascii_lowercase() || c == '-')
            .to_string();
        if name.is_empty() {
            return Err(self.error("expected a family name"));
        }
        if !self.eat('(') {
            return Err(self.error("expected '('"));
        }
        let mut args = Vec::new();
        if !self.eat(')') {
            loop {
                args.push(self.arg()?);
                if self.eat(')') {
                    break;
                }
                if !self.eat(',') {
                    return Err(self.error("expected ',' or ')'"));
                }
            }
        }
        self.build(&name, args)
    }

    fn build(&self, name: &str, args: Vec<Arg>) -> Result<GenSpec, GenError> {
        let mut ints = Vec::new();
        let mut specs = Vec::new();
        for arg in args {
            match arg {
                Arg::Int(v) => ints.push(v),
                Arg::Spec(s) => specs.push(s),
            }
        }
        let size = |v: u64| usize::try_from(v).map_err(|_| self.error("size too large"));
        let seed = self.seed;
        let spec = match (name, ints.as_slice(), specs.len()) {
            ("path", &[n], 0) => GenSpec::Path { n: size(n)? },
            ("complete", &[n], 0) => GenSpec::Complete { n: size(n)? },
            ("random-tree", &[n], 0) => GenSpec::RandomTree { n: size(n)?, seed },
            ("random-tree", &[n, seed], 0) => GenSpec::RandomTree { n: size(n)?, seed },
            ("king-grid", &[w, h], 0) => GenSpec::KingGrid {
                w: size(w)?,
                h: size(h)?,
            },
            ("rect-grid", &[w, h], 0) => GenSpec::RectGrid {
                w: size(w)?,
                h: size(h)?,
            },
            ("block-graph", &[n], 0) => GenSpec::BlockGraph { n: size(n)?, seed },
            ("block-graph", &[n, seed], 0) => GenSpec::BlockGraph { n: size(n)?, seed },
            ("caterpillar", &[spine], 0) => GenSpec::Caterpillar {
                spine: size(spine)?,
                legs: 1,
            },
            ("caterpillar", &[spine, legs], 0) => GenSpec::Caterpillar {
                spine: size(spine)?,
                legs: size(legs)?,
            },
            ("random-helly-small", &[n], 0) => GenSpec::RandomHellySmall { n: size(n)?, seed },
            ("random-helly-small", &[n, seed], 0) => {
                GenSpec::RandomHellySmall { n: size(n)?, seed }
            }
            ("cone", &[], 1) => GenSpec::Cone(Box::new(specs.pop().unwrap())),
            ("strong-product", &[], 2) => {
                let b = specs.pop().unwrap();
                let a = specs.pop().unwrap();
                GenSpec::StrongProduct(Box::new(a), Box::new(b))
            }
            _ => {
                return Err(GenError::Parse {
                    text: self.text.to_string(),
                    message: format!("unknown family or wrong arguments: {name}"),
                })
            }
        };
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_graph;

    fn gen(text: &str) -> Generated {
        text.parse::<GenSpec>().unwrap().generate().unwrap()
    }

    #[test]
    fn king_grid_counts() {
        let g = gen("king-grid(3,3)");
        assert_eq!((g.meta.n, g.meta.m), (9, 20));
        assert!(g.meta.expected_helly);
    }

    #[test]
    fn rect_grid_is_c4() {
        let g = gen("rect-grid(2,2)");
        assert_eq!((g.meta.n, g.meta.m), (4, 4));
        assert!(!g.meta.expected_helly);
        assert_eq!(g.meta.gamma_lower_bound, Some(1));
        assert!(gen("rect-grid(1,5)").meta.expected_helly);
    }

    #[test]
    fn path_and_trees() {
        let g = gen("path(5)");
        assert_eq!(
            g.graph.edges().collect::<Vec<_>>(),
            vec![(0, 1), (1, 2), (2, 3), (3, 4)]
        );
        let t = gen("random-tree(50,7)");
        assert_eq!(t.meta.m, 49);
        let c = gen("caterpillar(5)");
        assert_eq!((c.meta.n, c.meta.m), (10, 9));
    }

    #[test]
    fn composite_specs() {
        let g = gen("strong-product(random-tree(30,1),path(5))");
        assert_eq!(g.meta.n, 150);
        assert_eq!(g.meta.family, "strong-product(random-tree(30,1),path(5))");
        let k = gen("strong-product(path(3),path(3))");
        assert_eq!(k.graph, gen("king-grid(3,3)").graph);
        let cone = gen("cone(rect-grid(3,3))");
        assert_eq!((cone.meta.n, cone.meta.m), (10, 12 + 9));
        assert!(!cone.meta.expected_helly);
        assert_eq!(gen("cone(complete(3))").graph, gen("complete(4)").graph);
    }

    #[test]
    fn block_graph_sizes() {
        let g = gen("block-graph(100,3)");
        assert_eq!(g.meta.n, 100);
        assert_eq!(gen("block-graph(1)").meta.m, 0);
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = gen("random-tree(200,9)").graph.to_edge_list();
        assert_eq!(a, gen("random-tree(200, 9)").graph.to_edge_list());
        assert_ne!(a, gen("random-tree(200,10)").graph.to_edge_list());
        let spec = GenSpec::parse_with_seed("random-tree(200)", 9).unwrap();
        assert_eq!(spec.generate().unwrap().graph.to_edge_list(), a);
    }

    #[test]
    fn edge_list_round_trip_keeps_ids() {
        for text in [
            "random-tree(40,2)",
            "block-graph(40,2)",
            "king-grid(4,3)",
            "cone(path(6))",
            "strong-product(path(3),block-graph(7,1))",
            "caterpillar(6,2)",
            "random-helly-small(9,4)",
            "path(1)",
        ] {
            let g = gen(text).graph;
            assert_eq!(load_graph(&g.to_edge_list()).unwrap(), g, "{text}");
        }
    }

    #[test]
    fn random_helly_small_is_helly() {
        let g = gen("random-helly-small(10,5)");
        assert!(helly_check_subsets(&g.graph, 16).unwrap().is_helly());
    }

    #[test]
    fn bad_specs() {
        for text in [
            "path",
            "path(0)",
            "paths(3)",
            "king-grid(3)",
            "path(3) x",
            "cone(3)",
            "random-helly-small(40)",
        ] {
            let parsed = text.parse::<GenSpec>();
            assert!(
                parsed.is_err() || parsed.unwrap().generate().is_err(),
                "{text}"
            );
        }
    }
}
