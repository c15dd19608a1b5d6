//! Ground spaces: finite graphs paired with a symmetrization order.
//!
//! A ground space is the discrete stand-in for a model space with its
//! exhaustion by balls about the origin. The order's initial segments are the
//! discrete balls. Spaces that are truncations of an infinite graph (the line
//! and the regular tree) carry an *ambient degree* per vertex: the degree the
//! vertex has in the infinite graph. Missing edges lead to an implicit
//! exterior where every function vanishes, which makes Dirichlet spectra and
//! energies exact for functions supported in the truncation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted set of vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    pub fn full(n: usize) -> Self {
        VertexSet((0..n).collect())
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        VertexSet(
            mask.iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i))
                .collect(),
        )
    }

    /// Set whose members are the one bits of `bits`.
    pub fn from_bits(bits: u64) -> Self {
        VertexSet((0..64).filter(|&i| bits >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.0 {
            if v < n {
                m[v] = true;
            }
        }
        m
    }

    pub fn is_subset_of(&self, n: usize) -> bool {
        self.0.last().is_none_or(|&v| v < n)
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter)
    }
}

/// Finite simple undirected graph with optional ambient degrees and labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    neighbors: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    ambient_degree: Vec<usize>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and indices out of range.
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidGraph("graph must have at least one vertex".into()));
        }
        let mut neighbors = vec![Vec::new(); vertex_count];
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for {vertex_count} vertices"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        for &(a, b) in &list {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
        }
        let ambient_degree = neighbors.iter().map(Vec::len).collect();
        Ok(Graph {
            neighbors,
            edges: list,
            ambient_degree,
            labels: None,
        })
    }

    pub fn single_vertex() -> Self {
        Graph::new(1, []).expect("one vertex is a valid graph")
    }

    /// Declares the degree each vertex has in the infinite graph this one truncates.
    pub fn with_ambient_degrees(mut self, ambient: Vec<usize>) -> Result<Self> {
        if ambient.len() != self.vertex_count() {
            return Err(Error::LengthMismatch {
                expected: self.vertex_count(),
                actual: ambient.len(),
            });
        }
        for (v, &d) in ambient.iter().enumerate() {
            if d < self.degree(v) {
                return Err(Error::InvalidGraph(format!(
                    "ambient degree {d} of vertex {v} is below its degree {}",
                    self.degree(v)
                )));
            }
        }
        self.ambient_degree = ambient;
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.vertex_count() {
            return Err(Error::LengthMismatch {
                expected: self.vertex_count(),
                actual: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn ambient_degree(&self, v: usize) -> usize {
        self.ambient_degree[v]
    }

    /// Number of edges from `v` into the implicit exterior.
    pub fn exterior_degree(&self, v: usize) -> usize {
        self.ambient_degree[v] - self.neighbors[v].len()
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        match &self.labels {
            Some(l) => l.iter().position(|s| s == label),
            None => label.parse().ok().filter(|&v: &usize| v < self.vertex_count()),
        }
    }

    /// Whether the subgraph induced by `set` is connected (empty sets count as connected).
    pub fn is_connected_subset(&self, set: &VertexSet) -> bool {
        let Some(start) = set.iter().next() else {
            return true;
        };
        let mask = set.mask(self.vertex_count());
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![start];
        seen[start] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if mask[w] && !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == set.len()
    }
}

/// Enumeration of the vertices; its initial segments are the discrete balls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Order {
    perm: Vec<usize>,
    rank: Vec<usize>,
}

impl Order {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut rank = vec![usize::MAX; n];
        for (j, &v) in perm.iter().enumerate() {
            if v >= n {
                return Err(Error::InvalidOrder {
                    vertex_count: n,
                    reason: format!("vertex {v} out of range"),
                });
            }
            if rank[v] != usize::MAX {
                return Err(Error::InvalidOrder {
                    vertex_count: n,
                    reason: format!("vertex {v} repeated"),
                });
            }
            rank[v] = j;
        }
        Ok(Order { perm, rank })
    }

    pub fn identity(n: usize) -> Self {
        Order {
            perm: (0..n).collect(),
            rank: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// The vertices `v_0, v_1, ...`.
    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn vertex(&self, j: usize) -> usize {
        self.perm[j]
    }

    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    /// `{v_0, ..., v_{j-1}}`.
    pub fn initial_segment(&self, j: usize) -> Result<VertexSet> {
        if j > self.len() {
            return Err(Error::BallOutOfRange {
                j,
                vertex_count: self.len(),
            });
        }
        Ok(VertexSet::new(self.perm[..j].iter().copied()))
    }
}

/// Declarative description of a ground space, used by config files and the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SpaceSpec {
    /// Segment `-n..=n` of the integer line.
    Line { n: usize },
    /// The cycle `Z_m`.
    Cycle { m: usize },
    /// Ball of radius `depth` in the `degree`-regular tree.
    Tree { degree: usize, depth: usize },
    /// One-skeleton of the octahedron.
    Octahedron,
    /// The hypercube `Z_2^dim`.
    Hypercube { dim: usize },
    /// The discrete torus `Z_m^dims`.
    Torus { m: usize, dims: usize },
    Custom {
        #[serde(default)]
        n: Option<usize>,
        edges: Vec<(usize, usize)>,
        #[serde(default)]
        order: Option<Vec<usize>>,
        #[serde(default)]
        ambient_degree: Option<Vec<usize>>,
    },
}

impl FromStr for SpaceSpec {
    type Err = Error;

    /// Parses the shorthand `line:N`, `cycle:M`, `tree:M,D`, `octahedron`,
    /// `cube`, `hypercube:D` or `torus:M,D`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let nums = || -> Result<Vec<usize>> {
            args.split(',')
                .filter(|a| !a.is_empty())
                .map(|a| {
                    a.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Parse(format!("bad number {a:?} in {s:?}: {e}")))
                })
                .collect()
        };
        let want = |k: usize| -> Result<Vec<usize>> {
            let v = nums()?;
            if v.len() != k {
                return Err(Error::Parse(format!(
                    "{kind} expects {k} argument(s), got {:?}",
                    args
                )));
            }
            Ok(v)
        };
        match kind {
            "line" => Ok(SpaceSpec::Line { n: want(1)?[0] }),
            "cycle" => Ok(SpaceSpec::Cycle { m: want(1)?[0] }),
            "tree" => {
                let v = want(2)?;
                Ok(SpaceSpec::Tree {
                    degree: v[0],
                    depth: v[1],
                })
            }
            "octahedron" => Ok(SpaceSpec::Octahedron),
            "cube" => Ok(SpaceSpec::Hypercube { dim: 3 }),
            "hypercube" => Ok(SpaceSpec::Hypercube { dim: want(1)?[0] }),
            "torus" => {
                let v = want(2)?;
                Ok(SpaceSpec::Torus { m: v[0], dims: v[1] })
            }
            _ => Err(Error::Parse(format!("unknown space {s:?}"))),
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Line { n } => write!(f, "line:{n}"),
            SpaceSpec::Cycle { m } => write!(f, "cycle:{m}"),
            SpaceSpec::Tree { degree, depth } => write!(f, "tree:{degree},{depth}"),
            SpaceSpec::Octahedron => write!(f, "octahedron"),
            SpaceSpec::Hypercube { dim } => write!(f, "hypercube:{dim}"),
            SpaceSpec::Torus { m, dims } => write!(f, "torus:{m},{dims}"),
            SpaceSpec::Custom { edges, .. } => write!(f, "custom:{}e", edges.len()),
        }
    }
}

/// A graph with its symmetrization order; the origin is the first vertex of the order.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundSpace {
    graph: Graph,
    order: Order,
    name: String,
}

impl GroundSpace {
    pub fn new(graph: Graph, order: Order) -> Result<Self> {
        if order.len() != graph.vertex_count() {
            return Err(Error::InvalidOrder {
                vertex_count: graph.vertex_count(),
                reason: format!("order has {} entries", order.len()),
            });
        }
        Ok(GroundSpace {
            graph,
            order,
            name: String::from("custom"),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Short description used in report instance labels.
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn origin(&self) -> usize {
        self.order.vertex(0)
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Same graph, different order.
    pub fn with_order(&self, order: Order) -> Result<Self> {
        Ok(GroundSpace::new(self.graph.clone(), order)?.with_name(self.name.clone()))
    }
}

pub fn build_space(spec: &SpaceSpec) -> Result<GroundSpace> {
    let graph = build_graph(spec)?;
    let order = canonical_order(spec)?;
    Ok(GroundSpace::new(graph, order)?.with_name(spec.to_string()))
}

fn build_graph(spec: &SpaceSpec) -> Result<Graph> {
    match *spec {
        SpaceSpec::Line { n } => {
            let count = 2 * n + 1;
            let labels = (0..count).map(|i| (i as i64 - n as i64).to_string()).collect();
            Graph::new(count, (0..count - 1).map(|i| (i, i + 1)))?
                .with_ambient_degrees(vec![2; count])?
                .with_labels(labels)
        }
        SpaceSpec::Cycle { m } => {
            if m < 3 {
                return Err(Error::CycleTooSmall(m));
            }
            Graph::new(m, (0..m).map(|i| (i, (i + 1) % m)))
        }
        SpaceSpec::Tree { degree, depth } => {
            if degree < 3 {
                return Err(Error::TreeDegreeTooSmall(degree));
            }
            let (words, edges) = tree_words(degree, depth);
            let count = words.len();
            let labels = words
                .iter()
                .map(|w| {
                    let mut s = String::from("r");
                    for c in w {
                        s.push_str(&c.to_string());
                    }
                    s
                })
                .collect();
            Graph::new(count, edges)?
                .with_ambient_degrees(vec![degree; count])?
                .with_labels(labels)
        }
        SpaceSpec::Octahedron => {
            let labels = ["+z", "+x", "+y", "-x", "-y", "-z"];
            let edges = (0..6)
                .flat_map(|a| (a + 1..6).map(move |b| (a, b)))
                .filter(|&(a, b)| octahedron_antipode(a) != b);
            Graph::new(6, edges)?.with_labels(labels.iter().map(|s| s.to_string()).collect())
        }
        SpaceSpec::Hypercube { dim } => {
            if dim == 0 || dim > 20 {
                return Err(Error::InvalidGraph(format!("hypercube dimension {dim} unsupported")));
            }
            let count = 1usize << dim;
            let edges = (0..count).flat_map(|v| {
                (0..dim)
                    .map(move |b| (v, v ^ (1 << b)))
                    .filter(|&(a, b)| a < b)
            });
            let labels = (0..count).map(|v| format!("{v:0dim$b}")).collect();
            Graph::new(count, edges)?.with_labels(labels)
        }
        SpaceSpec::Torus { m, dims } => {
            if m < 3 {
                return Err(Error::CycleTooSmall(m));
            }
            let cycle = build_graph(&SpaceSpec::Cycle { m })?;
            let mut g = cycle.clone();
            for _ in 1..dims.max(1) {
                g = cartesian_product(&g, &cycle)?;
            }
            Ok(g)
        }
        SpaceSpec::Custom {
            n,
            ref edges,
            ref ambient_degree,
            ..
        } => {
            let count = n.unwrap_or_else(|| {
                edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(1)
            });
            let g = Graph::new(count, edges.iter().copied())?;
            match ambient_degree {
                Some(d) => g.with_ambient_degrees(d.clone()),
                None => Ok(g),
            }
        }
    }
}

/// Antipodal vertex in the octahedron labelling `+z,+x,+y,-x,-y,-z`.
pub fn octahedron_antipode(v: usize) -> usize {
    [5, 3, 4, 1, 2, 0][v]
}

/// Path words of the depth-`depth` ball in `T_degree`, in breadth-first order
/// with children sorted by (parent position, child index).
fn tree_words(degree: usize, depth: usize) -> (Vec<Vec<usize>>, Vec<(usize, usize)>) {
    let mut words = vec![Vec::new()];
    let mut edges = Vec::new();
    let mut level = vec![0usize];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &p in &level {
            let children = if words[p].is_empty() { degree } else { degree - 1 };
            for c in 0..children {
                let mut w = words[p].clone();
                w.push(c);
                words.push(w);
                let id = words.len() - 1;
                edges.push((p, id));
                next.push(id);
            }
        }
        level = next;
    }
    (words, edges)
}

pub fn canonical_order(spec: &SpaceSpec) -> Result<Order> {
    match spec {
        SpaceSpec::Line { n } => {
            let n = *n;
            let mut perm = vec![n];
            for k in 1..=n {
                perm.push(n + k);
                perm.push(n - k);
            }
            Order::new(perm)
        }
        SpaceSpec::Cycle { m } => {
            if *m < 3 {
                return Err(Error::CycleTooSmall(*m));
            }
            Order::new(cycle_order(*m))
        }
        SpaceSpec::Tree { degree, depth } => {
            if *degree < 3 {
                return Err(Error::TreeDegreeTooSmall(*degree));
            }
            // Vertices are numbered breadth-first already.
            Ok(Order::identity(tree_words(*degree, *depth).0.len()))
        }
        SpaceSpec::Octahedron => {
            // v0, a triangle through v0, then antipodes in reverse.
            let head = [0usize, 1, 2];
            let perm = head
                .iter()
                .copied()
                .chain(head.iter().rev().map(|&v| octahedron_antipode(v)))
                .collect();
            Order::new(perm)
        }
        SpaceSpec::Hypercube { dim } => Ok(Order::identity(1usize << dim)),
        SpaceSpec::Torus { m, dims } => Order::new(torus_graded_order(*m, *dims, false)),
        SpaceSpec::Custom { order, .. } => match order {
            Some(p) => Order::new(p.clone()),
            None => {
                let g = build_graph(spec)?;
                Ok(Order::identity(g.vertex_count()))
            }
        },
    }
}

/// `0, 1, -1, 2, -2, ...` reduced mod `m`.
fn cycle_order(m: usize) -> Vec<usize> {
    let mut perm = vec![0];
    let mut k = 1;
    while perm.len() < m {
        perm.push(k % m);
        if perm.len() < m {
            perm.push(m - k);
        }
        k += 1;
    }
    perm
}

/// Coordinates of a torus vertex, most significant first.
pub fn torus_coordinates(v: usize, m: usize, dims: usize) -> Vec<usize> {
    let mut c = vec![0; dims];
    let mut x = v;
    for slot in c.iter_mut().rev() {
        *slot = x % m;
        x /= m;
    }
    c
}

/// Candidate torus orders built from the cycle order on each coordinate.
/// Sorted by total rank, ties broken lexicographically (`reverse_ties`
/// flips the tie-break to the last coordinate first).
pub fn torus_graded_order(m: usize, dims: usize, reverse_ties: bool) -> Vec<usize> {
    let cyc_rank = rank_of(&cycle_order(m));
    let count = m.pow(dims as u32);
    let mut verts: Vec<usize> = (0..count).collect();
    verts.sort_by_key(|&v| {
        let mut r: Vec<usize> = torus_coordinates(v, m, dims).iter().map(|&c| cyc_rank[c]).collect();
        if reverse_ties {
            r.reverse();
        }
        (r.iter().sum::<usize>(), r)
    });
    verts
}

/// Lexicographic order of cycle ranks, first coordinate most significant.
pub fn torus_lex_order(m: usize, dims: usize) -> Vec<usize> {
    let cyc_rank = rank_of(&cycle_order(m));
    let count = m.pow(dims as u32);
    let mut verts: Vec<usize> = (0..count).collect();
    verts.sort_by_key(|&v| {
        torus_coordinates(v, m, dims)
            .iter()
            .map(|&c| cyc_rank[c])
            .collect::<Vec<_>>()
    });
    verts
}

fn rank_of(perm: &[usize]) -> Vec<usize> {
    let mut r = vec![0; perm.len()];
    for (j, &v) in perm.iter().enumerate() {
        r[v] = j;
    }
    r
}

fn cartesian_product(a: &Graph, b: &Graph) -> Result<Graph> {
    let nb = b.vertex_count();
    let count = a.vertex_count() * nb;
    let mut edges = Vec::with_capacity(a.edge_count() * nb + b.edge_count() * a.vertex_count());
    for &(x, x2) in a.edges() {
        for y in 0..nb {
            edges.push((x * nb + y, x2 * nb + y));
        }
    }
    for x in 0..a.vertex_count() {
        for &(y, y2) in b.edges() {
            edges.push((x * nb + y, x * nb + y2));
        }
    }
    let ambient = (0..count)
        .map(|v| a.ambient_degree(v / nb) + b.ambient_degree(v % nb))
        .collect();
    let labels = (0..count)
        .map(|v| format!("({},{})", a.label(v / nb), b.label(v % nb)))
        .collect();
    Graph::new(count, edges)?
        .with_ambient_degrees(ambient)?
        .with_labels(labels)
}

/// Cartesian product `M x N` where only `M` is symmetrized. Vertex `(x, y)`
/// has index `x * |N| + y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpace {
    m_space: GroundSpace,
    n_graph: Graph,
    graph: Graph,
}

impl ProductSpace {
    pub fn m_space(&self) -> &GroundSpace {
        &self.m_space
    }

    pub fn n_graph(&self) -> &Graph {
        &self.n_graph
    }

    /// The product graph itself.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn m_count(&self) -> usize {
        self.m_space.vertex_count()
    }

    pub fn n_count(&self) -> usize {
        self.n_graph.vertex_count()
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        x * self.n_count() + y
    }

    pub fn split(&self, v: usize) -> (usize, usize) {
        (v / self.n_count(), v % self.n_count())
    }

    /// Vertices of the fiber over `y`, listed in the M order.
    pub fn fiber(&self, y: usize) -> impl Iterator<Item = usize> + '_ {
        self.m_space
            .order()
            .as_slice()
            .iter()
            .map(move |&x| self.index(x, y))
    }

    /// The vertex `(v_rank, y)`.
    pub fn at_rank(&self, rank: usize, y: usize) -> usize {
        self.index(self.m_space.order().vertex(rank), y)
    }

    pub fn rank_of(&self, v: usize) -> usize {
        self.m_space.order().rank(v / self.n_count())
    }
}

pub fn product(m_space: &GroundSpace, n_graph: &Graph) -> ProductSpace {
    let graph = cartesian_product(m_space.graph(), n_graph).expect("product of valid graphs is valid");
    ProductSpace {
        m_space: m_space.clone(),
        n_graph: n_graph.clone(),
        graph,
    }
}

/// The first `j` vertices of the space's order.
pub fn ball(space: &GroundSpace, j: usize) -> Result<VertexSet> {
    space.order().initial_segment(j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels_of(space: &GroundSpace, set: &VertexSet) -> Vec<String> {
        let mut l: Vec<String> = set.iter().map(|v| space.graph().label(v)).collect();
        l.sort();
        l
    }

    #[test]
    fn cycle_four_edges() {
        let s = build_space(&SpaceSpec::Cycle { m: 4 }).unwrap();
        assert_eq!(s.graph().edges(), &[(0, 1), (0, 3), (1, 2), (2, 3)]);
    }

    #[test]
    fn small_tree() {
        let s = build_space(&SpaceSpec::Tree { degree: 3, depth: 1 }).unwrap();
        assert_eq!(s.vertex_count(), 4);
        assert_eq!(s.graph().edge_count(), 3);
        assert_eq!(s.graph().ambient_degree(1), 3);
        assert_eq!(s.graph().label(2), "r1");
    }

    #[test]
    fn octahedron_combinatorics() {
        let s = build_space(&SpaceSpec::Octahedron).unwrap();
        let g = s.graph();
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.edge_count(), 12);
        for v in 0..6 {
            let non: Vec<usize> = (0..6).filter(|&w| w != v && !g.is_adjacent(v, w)).collect();
            assert_eq!(non, vec![octahedron_antipode(v)]);
        }
        let o = s.order().as_slice();
        assert_eq!(o[0], 0);
        assert_eq!(o[5], octahedron_antipode(0));
        assert!(o[1..5].iter().all(|&v| g.is_adjacent(0, v)));
    }

    #[test]
    fn degenerate_specs_rejected() {
        assert_eq!(build_space(&SpaceSpec::Cycle { m: 2 }).unwrap_err(), Error::CycleTooSmall(2));
        assert_eq!(
            build_space(&SpaceSpec::Tree { degree: 2, depth: 3 }).unwrap_err(),
            Error::TreeDegreeTooSmall(2)
        );
        let bad = SpaceSpec::Custom {
            n: Some(3),
            edges: vec![(0, 1), (1, 2)],
            order: Some(vec![0, 0, 2]),
            ambient_degree: None,
        };
        assert!(matches!(build_space(&bad), Err(Error::InvalidOrder { .. })));
        assert!(Graph::new(2, [(0, 0)]).is_err());
        assert!(Graph::new(2, [(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn line_and_cycle_orders() {
        let s = build_space(&SpaceSpec::Line { n: 2 }).unwrap();
        let labels: Vec<String> = s.order().as_slice().iter().map(|&v| s.graph().label(v)).collect();
        assert_eq!(labels, ["0", "1", "-1", "2", "-2"]);
        assert_eq!(canonical_order(&SpaceSpec::Cycle { m: 4 }).unwrap().as_slice(), &[0, 1, 3, 2]);
    }

    #[test]
    fn tree_order_starts_with_unit_ball() {
        let s = build_space(&SpaceSpec::Tree { degree: 3, depth: 2 }).unwrap();
        let b = ball(&s, 4).unwrap();
        let root = s.origin();
        assert!(b.contains(root));
        assert!(b.iter().filter(|&v| v != root).all(|v| s.graph().is_adjacent(root, v)));
    }

    #[test]
    fn products() {
        let c3 = build_space(&SpaceSpec::Cycle { m: 3 }).unwrap();
        let p = product(&c3, &Graph::single_vertex());
        assert_eq!(p.graph().edges(), c3.graph().edges());

        let l1 = build_space(&SpaceSpec::Line { n: 1 }).unwrap();
        let grid = product(&l1, l1.graph());
        assert_eq!(grid.vertex_count(), 9);
        assert_eq!(grid.graph().edge_count(), 12);

        let c4 = build_space(&SpaceSpec::Cycle { m: 4 }).unwrap();
        let torus = product(&c4, c4.graph());
        assert_eq!(torus.vertex_count(), 16);
        assert!((0..16).all(|v| torus.graph().degree(v) == 4));
    }

    #[test]
    fn balls() {
        let s = build_space(&SpaceSpec::Line { n: 2 }).unwrap();
        assert!(ball(&s, 0).unwrap().is_empty());
        assert_eq!(labels_of(&s, &ball(&s, 3).unwrap()), ["-1", "0", "1"]);
        assert_eq!(ball(&s, 5).unwrap(), VertexSet::full(5));
        assert!(ball(&s, 6).is_err());
    }

    #[test]
    fn line_and_cycle_balls_are_intervals() {
        for spec in [SpaceSpec::Line { n: 6 }, SpaceSpec::Cycle { m: 9 }, SpaceSpec::Cycle { m: 10 }] {
            let s = build_space(&spec).unwrap();
            for j in 1..=s.vertex_count() {
                assert!(s.graph().is_connected_subset(&ball(&s, j).unwrap()), "{spec} j={j}");
            }
        }
    }

    #[test]
    fn tree_balls_connected_and_rooted() {
        let s = build_space(&SpaceSpec::Tree { degree: 4, depth: 3 }).unwrap();
        for j in 1..=s.vertex_count() {
            let b = ball(&s, j).unwrap();
            assert!(b.contains(s.origin()));
            assert!(s.graph().is_connected_subset(&b));
        }
    }

    #[test]
    fn shorthand_round_trip() {
        for s in ["line:5", "cycle:8", "tree:3,2", "octahedron", "hypercube:3", "torus:3,2"] {
            let spec: SpaceSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert_eq!("cube".parse::<SpaceSpec>().unwrap(), SpaceSpec::Hypercube { dim: 3 });
        assert!("tree:3".parse::<SpaceSpec>().is_err());
        assert!("blob".parse::<SpaceSpec>().is_err());
    }

    #[test]
    fn json_spec() {
        let spec: SpaceSpec = serde_json::from_str(r#"{"type":"tree","degree":3,"depth":2}"#).unwrap();
        assert_eq!(spec, SpaceSpec::Tree { degree: 3, depth: 2 });
        let custom: SpaceSpec =
            serde_json::from_str(r#"{"type":"custom","edges":[[0,1],[1,2]],"order":[1,0,2]}"#).unwrap();
        let s = build_space(&custom).unwrap();
        assert_eq!(s.origin(), 1);
    }

    #[test]
    fn torus_orders_are_bijections() {
        for o in [torus_graded_order(3, 2, false), torus_graded_order(3, 2, true), torus_lex_order(3, 2)] {
            let ord = Order::new(o).unwrap();
            assert_eq!(ord.vertex(0), 0);
        }
        let t = build_space(&SpaceSpec::Torus { m: 3, dims: 2 }).unwrap();
        assert_eq!(t.vertex_count(), 9);
        assert!((0..9).all(|v| t.graph().degree(v) == 4));
    }
}
