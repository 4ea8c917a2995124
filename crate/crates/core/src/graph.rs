//! Mixed graphs: simple graphs whose edges are either undirected or directed.
//!
//! Vertices are `1..=n`. Edges are addressed by their position in the edge
//! list ([`EdgeId`], 0-based); that order is the column order of every
//! incidence matrix, and vertex order is the row order.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing header line `n <count>`")]
    MissingHeader,
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge between {0} and {1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("edge id {0} out of range")]
    EdgeOutOfRange(EdgeId),
    #[error("component has {vertices} vertices but {edges} edges")]
    NotSquare { vertices: usize, edges: usize },
    #[error("vertices {0} and {1} are not adjacent")]
    NotAdjacent(Vertex, Vertex),
    #[error("more than {0} simple cycles")]
    CycleBudgetExceeded(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Undirected,
    /// From `u` (tail) to `v` (head).
    Directed,
}

/// An edge record. Undirected edges are stored with `u < v`; directed edges
/// keep `u` as the tail and `v` as the head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
    pub orientation: Orientation,
}

impl Edge {
    pub fn undirected(u: Vertex, v: Vertex) -> Self {
        Edge {
            u: u.min(v),
            v: u.max(v),
            orientation: Orientation::Undirected,
        }
    }

    pub fn directed(tail: Vertex, head: Vertex) -> Self {
        Edge {
            u: tail,
            v: head,
            orientation: Orientation::Directed,
        }
    }

    pub fn is_directed(&self) -> bool {
        self.orientation == Orientation::Directed
    }

    /// Tail of the edge. Undirected edges are treated as pointing from the
    /// smaller to the larger index.
    pub fn tail(&self) -> Vertex {
        self.u
    }

    pub fn head(&self) -> Vertex {
        self.v
    }

    pub fn touches(&self, x: Vertex) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint opposite `x`. `x` must be an endpoint.
    pub fn other(&self, x: Vertex) -> Vertex {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    fn key(&self) -> (Vertex, Vertex) {
        (self.u.min(self.v), self.u.max(self.v))
    }
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct MixedGraph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(Vertex, EdgeId)>>,
}

impl TryFrom<RawGraph> for MixedGraph {
    type Error = GraphError;
    fn try_from(raw: RawGraph) -> Result<Self, GraphError> {
        MixedGraph::from_edges(raw.n, raw.edges)
    }
}

impl From<MixedGraph> for RawGraph {
    fn from(g: MixedGraph) -> Self {
        RawGraph {
            n: g.n,
            edges: g.edges,
        }
    }
}

impl MixedGraph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        MixedGraph {
            n,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n + 1],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self, GraphError> {
        let mut g = MixedGraph::new(n);
        for e in edges {
            g.push_edge(e)?;
        }
        Ok(g)
    }

    pub fn add_undirected(&mut self, u: Vertex, v: Vertex) -> Result<EdgeId, GraphError> {
        self.push_edge(Edge::undirected(u, v))
    }

    pub fn add_directed(&mut self, tail: Vertex, head: Vertex) -> Result<EdgeId, GraphError> {
        self.push_edge(Edge::directed(tail, head))
    }

    pub fn push_edge(&mut self, edge: Edge) -> Result<EdgeId, GraphError> {
        for x in [edge.u, edge.v] {
            if x == 0 || x > self.n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: x,
                    n: self.n,
                });
            }
        }
        if edge.u == edge.v {
            return Err(GraphError::SelfLoop(edge.u));
        }
        let edge = match edge.orientation {
            Orientation::Undirected => Edge::undirected(edge.u, edge.v),
            Orientation::Directed => edge,
        };
        if self.edge_between(edge.u, edge.v).is_some() {
            let (a, b) = edge.key();
            return Err(GraphError::DuplicateEdge(a, b));
        }
        let id = self.edges.len();
        self.adjacency[edge.u].push((edge.v, id));
        self.adjacency[edge.v].push((edge.u, id));
        self.edges.push(edge);
        Ok(id)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.n
    }

    /// `(neighbor, edge id)` pairs in insertion order.
    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_between(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        self.adjacency
            .get(u)?
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, id)| id)
    }

    /// Forgets every orientation.
    pub fn underlying(&self) -> MixedGraph {
        self.map_edges(|e| Edge::undirected(e.u, e.v))
    }

    /// Reverses every directed edge.
    pub fn reversed(&self) -> MixedGraph {
        self.map_edges(|e| match e.orientation {
            Orientation::Directed => Edge::directed(e.v, e.u),
            Orientation::Undirected => *e,
        })
    }

    /// Renames vertex `v` to `perm[v - 1]`, keeping edge order.
    pub fn relabeled(&self, perm: &[Vertex]) -> MixedGraph {
        assert_eq!(perm.len(), self.n, "permutation length must equal n");
        self.map_edges(|e| Edge {
            u: perm[e.u - 1],
            v: perm[e.v - 1],
            orientation: e.orientation,
        })
    }

    fn map_edges(&self, f: impl Fn(&Edge) -> Edge) -> MixedGraph {
        MixedGraph::from_edges(self.n, self.edges.iter().map(f))
            .expect("edge map preserves simplicity")
    }

    pub fn is_all_undirected(&self) -> bool {
        self.edges.iter().all(|e| !e.is_directed())
    }

    /// Vertex sets of the connected components, each sorted, ordered by
    /// smallest vertex.
    pub fn connected_components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.n + 1];
        let mut out = Vec::new();
        for s in self.vertices() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &(y, _) in self.neighbors(x) {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Subgraph induced on `keep` (sorted ascending); vertex `keep[i]` becomes
    /// `i + 1`. Returns the subgraph and, for each of its edges, the parent
    /// edge id.
    pub fn induced_subgraph(&self, keep: &[Vertex]) -> (MixedGraph, Vec<EdgeId>) {
        let mut index = vec![0usize; self.n + 1];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i + 1;
        }
        let mut sub = MixedGraph::new(keep.len());
        let mut parent = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            if index[e.u] != 0 && index[e.v] != 0 {
                sub.push_edge(Edge {
                    u: index[e.u],
                    v: index[e.v],
                    orientation: e.orientation,
                })
                .expect("induced subgraph of a simple graph is simple");
                parent.push(id);
            }
        }
        (sub, parent)
    }

    /// Serializes in the edge-list text format accepted by [`parse_graph`].
    pub fn to_text(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for e in &self.edges {
            let arrow = if e.is_directed() { "->" } else { "--" };
            let _ = writeln!(s, "e {} {} {}", e.u, e.v, arrow);
        }
        s
    }

    /// Enumerates all simple cycles (length ≥ 3) as canonical closed walks.
    /// Fails once more than `limit` cycles have been found.
    pub fn simple_cycles(&self, limit: usize) -> Result<Vec<MixedWalk>, GraphError> {
        let mut cycles = Vec::new();
        let mut on_path = vec![false; self.n + 1];
        for start in self.vertices() {
            let mut path = vec![start];
            on_path[start] = true;
            self.extend_cycles(start, &mut path, &mut on_path, &mut cycles, limit)?;
            on_path[start] = false;
        }
        Ok(cycles)
    }

    fn extend_cycles(
        &self,
        start: Vertex,
        path: &mut Vec<Vertex>,
        on_path: &mut [bool],
        out: &mut Vec<MixedWalk>,
        limit: usize,
    ) -> Result<(), GraphError> {
        let last = *path.last().unwrap();
        for &(next, _) in self.neighbors(last) {
            if next == start && path.len() >= 3 && path[1] < last {
                if out.len() == limit {
                    return Err(GraphError::CycleBudgetExceeded(limit));
                }
                let mut vs = path.clone();
                vs.push(start);
                out.push(MixedWalk::from_vertices(self, &vs).expect("path edges exist"));
            } else if next > start && !on_path[next] {
                on_path[next] = true;
                path.push(next);
                self.extend_cycles(start, path, on_path, out, limit)?;
                path.pop();
                on_path[next] = false;
            }
        }
        Ok(())
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

/// Parses the edge-list format:
///
/// ```text
/// # comment
/// n 4
/// e 1 2 ->
/// e 1 4 --
/// e 3 4 <-
/// ```
///
/// `--` is undirected, `->` points from the first to the second vertex and
/// `<-` from the second to the first. Edge order in the file is preserved.
pub fn parse_graph(text: &str) -> Result<MixedGraph, GraphError> {
    let mut graph: Option<MixedGraph> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "n" => {
                if graph.is_some() {
                    return Err(parse_error(line_no, "repeated header"));
                }
                if fields.len() != 2 {
                    return Err(parse_error(line_no, "expected `n <count>`"));
                }
                let n = fields[1].parse::<usize>().map_err(|_| {
                    parse_error(line_no, format!("bad vertex count `{}`", fields[1]))
                })?;
                graph = Some(MixedGraph::new(n));
            }
            "e" => {
                let g = graph
                    .as_mut()
                    .ok_or_else(|| parse_error(line_no, "edge before header"))?;
                if fields.len() != 4 {
                    return Err(parse_error(line_no, "expected `e <u> <v> --|->|<-`"));
                }
                let vertex = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| parse_error(line_no, format!("bad vertex `{s}`")))
                };
                let (u, v) = (vertex(fields[1])?, vertex(fields[2])?);
                let edge = match fields[3] {
                    "--" => Edge::undirected(u, v),
                    "->" => Edge::directed(u, v),
                    "<-" => Edge::directed(v, u),
                    other => return Err(parse_error(line_no, format!("bad edge kind `{other}`"))),
                };
                g.push_edge(edge).map_err(|err| match err {
                    GraphError::DuplicateEdge(..)
                    | GraphError::SelfLoop(_)
                    | GraphError::VertexOutOfRange { .. } => parse_error(line_no, err.to_string()),
                    other => other,
                })?;
            }
            other => return Err(parse_error(line_no, format!("unknown record `{other}`"))),
        }
    }
    graph.ok_or(GraphError::MissingHeader)
}

impl FromStr for MixedGraph {
    type Err = GraphError;
    fn from_str(s: &str) -> Result<Self, GraphError> {
        parse_graph(s)
    }
}

/// A vertex subset paired with an edge subset of a parent graph.
///
/// Edges may have endpoints outside `vertices`; those endpoints only affect
/// which incidence rows are selected, never connectivity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Substructure {
    pub vertices: BTreeSet<Vertex>,
    pub edges: BTreeSet<EdgeId>,
}

impl Substructure {
    pub fn new(
        vertices: impl IntoIterator<Item = Vertex>,
        edges: impl IntoIterator<Item = EdgeId>,
    ) -> Self {
        Substructure {
            vertices: vertices.into_iter().collect(),
            edges: edges.into_iter().collect(),
        }
    }

    pub fn is_square(&self) -> bool {
        self.vertices.len() == self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty()
    }
}

/// Splits `s` into connected pieces of its vertex/edge incidence structure.
///
/// An edge links to an endpoint only when that endpoint is in `s.vertices`, so
/// an edge with no endpoint inside forms a component on its own. Components
/// are ordered by smallest vertex; vertex-free components come last.
pub fn components(s: &Substructure, g: &MixedGraph) -> Vec<Substructure> {
    let verts: Vec<Vertex> = s.vertices.iter().copied().collect();
    let pos: BTreeMap<Vertex, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..verts.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &id in &s.edges {
        let e = g.edge(id);
        if let (Some(&i), Some(&j)) = (pos.get(&e.u), pos.get(&e.v)) {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut by_root: BTreeMap<usize, Substructure> = BTreeMap::new();
    for (i, &v) in verts.iter().enumerate() {
        let r = find(&mut parent, i);
        by_root.entry(r).or_default().vertices.insert(v);
    }
    let mut loose = Vec::new();
    for &id in &s.edges {
        let e = g.edge(id);
        let inside = pos.get(&e.u).or_else(|| pos.get(&e.v));
        match inside {
            Some(&i) => {
                let r = find(&mut parent, i);
                by_root.get_mut(&r).unwrap().edges.insert(id);
            }
            None => loose.push(Substructure::new([], [id])),
        }
    }
    // union-find roots are the smallest index in each class, so map order is
    // smallest-vertex order
    by_root.into_values().chain(loose).collect()
}

/// One step of a walk: which edge, and whether it was traversed from
/// `edge.u` to `edge.v` (tail to head for directed edges).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkStep {
    pub edge: EdgeId,
    pub along: bool,
}

/// A walk `v₀ v₁ … v_k`; closed when `v₀ = v_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixedWalk {
    pub vertices: Vec<Vertex>,
    pub steps: Vec<WalkStep>,
}

impl MixedWalk {
    /// Builds the walk through consecutive adjacent vertices.
    pub fn from_vertices(g: &MixedGraph, vertices: &[Vertex]) -> Result<Self, GraphError> {
        let mut steps = Vec::with_capacity(vertices.len().saturating_sub(1));
        for w in vertices.windows(2) {
            let id = g
                .edge_between(w[0], w[1])
                .ok_or(GraphError::NotAdjacent(w[0], w[1]))?;
            steps.push(WalkStep {
                edge: id,
                along: g.edge(id).u == w[0],
            });
        }
        Ok(MixedWalk {
            vertices: vertices.to_vec(),
            steps,
        })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.vertices.first() == self.vertices.last()
    }

    pub fn reversed(&self) -> MixedWalk {
        MixedWalk {
            vertices: self.vertices.iter().rev().copied().collect(),
            steps: self
                .steps
                .iter()
                .rev()
                .map(|s| WalkStep {
                    edge: s.edge,
                    along: !s.along,
                })
                .collect(),
        }
    }

    /// Concatenation; `other` must start where `self` ends.
    pub fn concat(&self, other: &MixedWalk) -> MixedWalk {
        assert_eq!(
            self.vertices.last(),
            other.vertices.first(),
            "walks do not meet"
        );
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices[1..]);
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        MixedWalk { vertices, steps }
    }

    /// Forward directed, backward directed and undirected step counts.
    pub fn direction_counts(&self, g: &MixedGraph) -> (usize, usize, usize) {
        let (mut fwd, mut back, mut und) = (0, 0, 0);
        for s in &self.steps {
            if !g.edge(s.edge).is_directed() {
                und += 1;
            } else if s.along {
                fwd += 1;
            } else {
                back += 1;
            }
        }
        (fwd, back, und)
    }

    /// The edge ids in traversal order.
    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.steps.iter().map(|s| s.edge)
    }
}

/// Canonical closed walk around a cycle given by its vertices in cyclic
/// order: starts at the smallest vertex and heads to its smaller cycle
/// neighbor first.
pub fn canonical_cycle(g: &MixedGraph, cyclic: &[Vertex]) -> Result<MixedWalk, GraphError> {
    let k = cyclic.len();
    let (start_pos, _) = cyclic
        .iter()
        .enumerate()
        .min_by_key(|&(_, &v)| v)
        .expect("cycle must be nonempty");
    let next = cyclic[(start_pos + 1) % k];
    let prev = cyclic[(start_pos + k - 1) % k];
    let mut vs: Vec<Vertex> = if next <= prev {
        (0..k).map(|i| cyclic[(start_pos + i) % k]).collect()
    } else {
        (0..k).map(|i| cyclic[(start_pos + k - i) % k]).collect()
    };
    vs.push(vs[0]);
    MixedWalk::from_vertices(g, &vs)
}

/// `(forward − backward) mod 6` over the directed steps of `w`.
pub fn walk_class(w: &MixedWalk, g: &MixedGraph) -> u8 {
    let (fwd, back, _) = w.direction_counts(g);
    (fwd as i64 - back as i64).rem_euclid(6) as u8
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentKind {
    RootlessTree { root: Vertex },
    Unicyclic { cycle: MixedWalk },
    Other,
}

/// Classifies a square component as a rootless tree, a unicyclic graph, or
/// neither.
pub fn classify_component(c: &Substructure, g: &MixedGraph) -> Result<ComponentKind, GraphError> {
    if !c.is_square() {
        return Err(GraphError::NotSquare {
            vertices: c.vertices.len(),
            edges: c.edges.len(),
        });
    }
    if c.vertices.is_empty() {
        return Ok(ComponentKind::Other);
    }
    let mut external = Vec::new();
    let mut internal = Vec::new();
    for &id in &c.edges {
        let e = g.edge(id);
        match (c.vertices.contains(&e.u), c.vertices.contains(&e.v)) {
            (true, true) => internal.push(id),
            (true, false) => external.push(e.v),
            (false, true) => external.push(e.u),
            (false, false) => return Ok(ComponentKind::Other),
        }
    }
    let local = Substructure::new(c.vertices.iter().copied(), internal.iter().copied());
    if components(&local, g).len() != 1 {
        return Ok(ComponentKind::Other);
    }
    match external.as_slice() {
        [root] => Ok(ComponentKind::RootlessTree { root: *root }),
        [] => {
            let cyc = cycle_vertices(g, &c.vertices, &internal);
            Ok(ComponentKind::Unicyclic {
                cycle: canonical_cycle(g, &cyc)?,
            })
        }
        _ => Ok(ComponentKind::Other),
    }
}

/// For a connected unicyclic edge set, strips pendant vertices and returns
/// the cycle vertices in cyclic order.
pub(crate) fn cycle_vertices(
    g: &MixedGraph,
    vertices: &BTreeSet<Vertex>,
    edges: &[EdgeId],
) -> Vec<Vertex> {
    let mut deg: BTreeMap<Vertex, usize> = vertices.iter().map(|&v| (v, 0)).collect();
    let mut alive: BTreeSet<EdgeId> = edges.iter().copied().collect();
    for &id in edges {
        let e = g.edge(id);
        *deg.get_mut(&e.u).unwrap() += 1;
        *deg.get_mut(&e.v).unwrap() += 1;
    }
    let mut leaves: Vec<Vertex> = deg
        .iter()
        .filter(|&(_, &d)| d == 1)
        .map(|(&v, _)| v)
        .collect();
    while let Some(leaf) = leaves.pop() {
        let id = *alive.iter().find(|&&id| g.edge(id).touches(leaf)).unwrap();
        alive.remove(&id);
        deg.insert(leaf, 0);
        let other = g.edge(id).other(leaf);
        let d = deg.get_mut(&other).unwrap();
        *d -= 1;
        if *d == 1 {
            leaves.push(other);
        }
    }
    let start = *deg.iter().find(|&(_, &d)| d == 2).map(|(v, _)| v).unwrap();
    let mut order = vec![start];
    let mut prev_edge = None;
    let mut cur = start;
    loop {
        let id = *alive
            .iter()
            .find(|&&id| Some(id) != prev_edge && g.edge(id).touches(cur))
            .unwrap();
        let next = g.edge(id).other(cur);
        if next == start {
            break;
        }
        order.push(next);
        prev_edge = Some(id);
        cur = next;
    }
    order
}
