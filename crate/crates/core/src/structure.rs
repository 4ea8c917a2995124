//! Cycle classes, rootless-tree and unicyclic determinant units, square
//! substructure classification, and the six-part labelings that witness
//! singularity of `L` and `Q`.
//!
//! For a cycle traversed in its canonical direction let `a`/`b` count the
//! directed edges pointing along/against the traversal and `c` the undirected
//! edges. The `Φ` class depends on `(a − b) mod 6` and governs `|det S|`; the
//! `Ψ` class also uses the parity of `c` and governs `|det T|`:
//!
//! | class | `(a−b) mod 6`     | `|det|²` |
//! |-------|-------------------|----------|
//! | Φ₁    | 1, 5              | 1        |
//! | Φ₂    | 2, 4              | 3        |
//! | Φ₃    | 3                 | 4        |
//! | Φ₄    | 0                 | 0        |
//!
//! Ψ₁/Ψ₂ take residues {1,2,4,5} with `c` odd/even, Ψ₃/Ψ₄ take {0,3} with `c`
//! odd/even; squared moduli are again 1, 3, 4, 0.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::permutation_sign;
use crate::eisenstein::EisensteinInt;
use crate::graph::{
    canonical_cycle, classify_component, components, ComponentKind, Edge, EdgeId, GraphError,
    MixedGraph, MixedWalk, Substructure, Vertex,
};
use crate::matrix::IncidenceKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("walk is not a simple cycle")]
    NotACycle,
    #[error("component is not a rootless tree")]
    NotRootlessTree,
    #[error("substructure has {vertices} vertices but {edges} edges")]
    NotSquare { vertices: usize, edges: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PhiClass {
    #[serde(rename = "Φ1")]
    Phi1,
    #[serde(rename = "Φ2")]
    Phi2,
    #[serde(rename = "Φ3")]
    Phi3,
    #[serde(rename = "Φ4")]
    Phi4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PsiClass {
    #[serde(rename = "Ψ1")]
    Psi1,
    #[serde(rename = "Ψ2")]
    Psi2,
    #[serde(rename = "Ψ3")]
    Psi3,
    #[serde(rename = "Ψ4")]
    Psi4,
}

impl PhiClass {
    pub fn from_residue(residue: u8) -> Self {
        match residue % 6 {
            1 | 5 => PhiClass::Phi1,
            2 | 4 => PhiClass::Phi2,
            3 => PhiClass::Phi3,
            _ => PhiClass::Phi4,
        }
    }

    /// `|det S(C)|²` for a cycle of this class.
    pub fn det_norm(self) -> u32 {
        match self {
            PhiClass::Phi1 => 1,
            PhiClass::Phi2 => 3,
            PhiClass::Phi3 => 4,
            PhiClass::Phi4 => 0,
        }
    }
}

impl PsiClass {
    pub fn from_residue(residue: u8, undirected: usize) -> Self {
        let odd = undirected % 2 == 1;
        match (residue % 6, odd) {
            (0 | 3, true) => PsiClass::Psi3,
            (0 | 3, false) => PsiClass::Psi4,
            (_, true) => PsiClass::Psi1,
            (_, false) => PsiClass::Psi2,
        }
    }

    /// `|det T(C)|²` for a cycle of this class.
    pub fn det_norm(self) -> u32 {
        match self {
            PsiClass::Psi1 => 1,
            PsiClass::Psi2 => 3,
            PsiClass::Psi3 => 4,
            PsiClass::Psi4 => 0,
        }
    }
}

impl fmt::Display for PhiClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = *self as u8 + 1;
        write!(f, "Φ{k}")
    }
}

impl fmt::Display for PsiClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = *self as u8 + 1;
        write!(f, "Ψ{k}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleClassReport {
    /// Traversal order, first vertex repeated at the end.
    pub vertices: Vec<Vertex>,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub phi: PhiClass,
    pub psi: PsiClass,
}

impl CycleClassReport {
    pub fn residue(&self) -> u8 {
        (self.a as i64 - self.b as i64).rem_euclid(6) as u8
    }
}

fn check_simple_cycle(cyc: &MixedWalk) -> Result<(), StructureError> {
    if !cyc.is_closed() || cyc.len() < 3 {
        return Err(StructureError::NotACycle);
    }
    let mut vs = cyc.vertices[..cyc.len()].to_vec();
    vs.sort_unstable();
    vs.dedup();
    if vs.len() != cyc.len() {
        return Err(StructureError::NotACycle);
    }
    Ok(())
}

/// Counts `a, b, c` along the walk's traversal and assigns the Φ and Ψ classes.
pub fn classify_cycle(cyc: &MixedWalk, g: &MixedGraph) -> Result<CycleClassReport, StructureError> {
    check_simple_cycle(cyc)?;
    let (a, b, c) = cyc.direction_counts(g);
    let residue = (a as i64 - b as i64).rem_euclid(6) as u8;
    Ok(CycleClassReport {
        vertices: cyc.vertices.clone(),
        a,
        b,
        c,
        phi: PhiClass::from_residue(residue),
        psi: PsiClass::from_residue(residue, c),
    })
}

/// The substructure spanned by a closed walk.
pub fn cycle_substructure(cyc: &MixedWalk) -> Substructure {
    Substructure::new(cyc.vertices.iter().copied(), cyc.edge_ids())
}

/// For each vertex reachable from `root` through `edges`, the edge by which a
/// breadth-first search first reached it. `root` itself is not included.
pub(crate) fn edges_toward(
    g: &MixedGraph,
    edges: &std::collections::BTreeSet<EdgeId>,
    roots: &[Vertex],
) -> BTreeMap<Vertex, EdgeId> {
    let mut reached: BTreeMap<Vertex, EdgeId> = BTreeMap::new();
    let mut seen: std::collections::BTreeSet<Vertex> = roots.iter().copied().collect();
    let mut queue: VecDeque<Vertex> = roots.iter().copied().collect();
    while let Some(x) = queue.pop_front() {
        for &(y, id) in g.neighbors(x) {
            if edges.contains(&id) && seen.insert(y) {
                reached.insert(y, id);
                queue.push_back(y);
            }
        }
    }
    reached
}

fn rootless_root(c: &Substructure, g: &MixedGraph) -> Result<Vertex, StructureError> {
    match classify_component(c, g)? {
        ComponentKind::RootlessTree { root } => Ok(root),
        _ => Err(StructureError::NotRootlessTree),
    }
}

/// Directed edges pointing away from / toward the root, and undirected edges
/// whose canonical direction (smaller to larger index) points away from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RootedCounts {
    pub directed_away: usize,
    pub directed_toward: usize,
    pub undirected_away: usize,
}

pub fn rooted_counts(c: &Substructure, g: &MixedGraph) -> Result<RootedCounts, StructureError> {
    let root = rootless_root(c, g)?;
    let parent_edge = edges_toward(g, &c.edges, &[root]);
    let mut counts = RootedCounts {
        directed_away: 0,
        directed_toward: 0,
        undirected_away: 0,
    };
    for (&child, &id) in &parent_edge {
        let e = g.edge(id);
        let away = e.head() == child;
        match (e.is_directed(), away) {
            (true, true) => counts.directed_away += 1,
            (true, false) => counts.directed_toward += 1,
            (false, true) => counts.undirected_away += 1,
            (false, false) => {}
        }
    }
    Ok(counts)
}

/// `(−ω̄)^α · (−1)^β` where `α` counts directed edges pointing away from the
/// root and `β` undirected edges whose canonical direction points away.
///
/// This is the product of the `S` entries along the vertex→parent-edge
/// matching; `det S[c]` equals it times [`assignment_sign`].
pub fn det_unit_rootless_tree_s(
    c: &Substructure,
    g: &MixedGraph,
) -> Result<EisensteinInt, StructureError> {
    let k = rooted_counts(c, g)?;
    let u = (-EisensteinInt::omega_bar()).pow(k.directed_away as u32);
    Ok(if k.undirected_away % 2 == 1 { -u } else { u })
}

/// `ω^τ` where `τ` counts directed edges pointing toward the root.
pub fn det_unit_rootless_tree_t(
    c: &Substructure,
    g: &MixedGraph,
) -> Result<EisensteinInt, StructureError> {
    let k = rooted_counts(c, g)?;
    Ok(EisensteinInt::omega_pow(k.directed_toward as i64))
}

/// Sign of the bijection `rows → cols` given by `assignment`, relative to the
/// ascending orders of both sets.
pub fn assignment_sign(assignment: &BTreeMap<Vertex, EdgeId>) -> i8 {
    let mut cols: Vec<EdgeId> = assignment.values().copied().collect();
    cols.sort_unstable();
    let perm: Vec<usize> = assignment
        .values()
        .map(|e| cols.binary_search(e).expect("edge present"))
        .collect();
    permutation_sign(&perm)
}

/// Vertex → edge matching inside one nonsingular-shaped component: tree
/// vertices take the edge toward the root (or the cycle), cycle vertices take
/// the next cycle edge in canonical direction.
pub fn component_assignment(
    c: &Substructure,
    kind: &ComponentKind,
    g: &MixedGraph,
) -> BTreeMap<Vertex, EdgeId> {
    match kind {
        ComponentKind::RootlessTree { root } => edges_toward(g, &c.edges, &[*root]),
        ComponentKind::Unicyclic { cycle } => {
            let cyc_vertices = &cycle.vertices[..cycle.len()];
            let cyc_edges: std::collections::BTreeSet<EdgeId> = cycle.edge_ids().collect();
            let rest: std::collections::BTreeSet<EdgeId> =
                c.edges.difference(&cyc_edges).copied().collect();
            let mut map = edges_toward(g, &rest, cyc_vertices);
            for (v, step) in cyc_vertices.iter().zip(&cycle.steps) {
                map.insert(*v, step.edge);
            }
            map
        }
        ComponentKind::Other => BTreeMap::new(),
    }
}

/// Determinant of the component's incidence block with columns arranged by
/// `component_assignment` (so the assignment sits on the diagonal).
///
/// Rootless tree: product of the diagonal. Unicyclic: the diagonal product
/// plus the single competing matching that turns the cycle the other way,
/// which as a `k`-cycle carries the sign `(−1)^(k−1)`.
pub fn component_block_value(
    kind: &ComponentKind,
    assignment: &BTreeMap<Vertex, EdgeId>,
    g: &MixedGraph,
    inc: IncidenceKind,
) -> EisensteinInt {
    let diag: EisensteinInt = assignment
        .iter()
        .map(|(&v, &id)| inc.entry(g, v, id))
        .product();
    match kind {
        ComponentKind::RootlessTree { .. } => diag,
        ComponentKind::Unicyclic { cycle } => {
            let k = cycle.len();
            let cyc = &cycle.vertices[..k];
            let mut tree_part = EisensteinInt::one();
            for (&v, &id) in assignment {
                if !cyc.contains(&v) {
                    tree_part *= &inc.entry(g, v, id);
                }
            }
            let forward: EisensteinInt = (0..k)
                .map(|i| inc.entry(g, cycle.vertices[i], cycle.steps[i].edge))
                .product();
            let turned: EisensteinInt = (0..k)
                .map(|i| inc.entry(g, cycle.vertices[i + 1], cycle.steps[i].edge))
                .product();
            let combined = if k % 2 == 1 {
                &forward + &turned
            } else {
                &forward - &turned
            };
            &tree_part * &combined
        }
        ComponentKind::Other => EisensteinInt::zero(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Eligibility {
    Both,
    SiOnly,
    SiiOnly,
    Neither,
}

/// Decomposition summary of a square substructure.
///
/// `det S[s] = sign · unit_s` and `det T[s] = sign · unit_t` exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubstructureClass {
    /// Every component is a rootless tree or a unicyclic graph outside Φ₄.
    pub si: bool,
    /// Every component is a rootless tree or a unicyclic graph outside Ψ₄.
    pub sii: bool,
    pub gamma1: u32,
    pub gamma2: u32,
    pub tau1: u32,
    pub tau2: u32,
    pub unit_s: EisensteinInt,
    pub unit_t: EisensteinInt,
    pub sign: i8,
    pub components: Vec<ComponentKind>,
}

impl SubstructureClass {
    pub fn eligibility(&self) -> Eligibility {
        match (self.si, self.sii) {
            (true, true) => Eligibility::Both,
            (true, false) => Eligibility::SiOnly,
            (false, true) => Eligibility::SiiOnly,
            (false, false) => Eligibility::Neither,
        }
    }

    /// `3^γ₁ · 4^γ₂` when SI-eligible, else 0.
    pub fn weight_s(&self) -> u64 {
        if self.si {
            3u64.pow(self.gamma1) * 4u64.pow(self.gamma2)
        } else {
            0
        }
    }

    /// `3^τ₁ · 4^τ₂` when SII-eligible, else 0.
    pub fn weight_t(&self) -> u64 {
        if self.sii {
            3u64.pow(self.tau1) * 4u64.pow(self.tau2)
        } else {
            0
        }
    }

    fn degenerate(components: Vec<ComponentKind>) -> Self {
        SubstructureClass {
            si: false,
            sii: false,
            gamma1: 0,
            gamma2: 0,
            tau1: 0,
            tau2: 0,
            unit_s: EisensteinInt::zero(),
            unit_t: EisensteinInt::zero(),
            sign: 1,
            components,
        }
    }
}

/// Splits a square substructure into components and accumulates the cycle
/// class counts and determinant units.
pub fn classify_substructure(
    s: &Substructure,
    g: &MixedGraph,
) -> Result<SubstructureClass, StructureError> {
    if !s.is_square() {
        return Err(StructureError::NotSquare {
            vertices: s.vertices.len(),
            edges: s.edges.len(),
        });
    }
    let comps = components(s, g);
    let mut kinds = Vec::with_capacity(comps.len());
    for c in &comps {
        if !c.is_square() {
            return Ok(SubstructureClass::degenerate(kinds));
        }
        let kind = classify_component(c, g)?;
        if kind == ComponentKind::Other {
            kinds.push(kind);
            return Ok(SubstructureClass::degenerate(kinds));
        }
        kinds.push(kind);
    }
    let mut out = SubstructureClass {
        si: true,
        sii: true,
        gamma1: 0,
        gamma2: 0,
        tau1: 0,
        tau2: 0,
        unit_s: EisensteinInt::one(),
        unit_t: EisensteinInt::one(),
        sign: 1,
        components: Vec::new(),
    };
    let mut assignment = BTreeMap::new();
    for (c, kind) in comps.iter().zip(&kinds) {
        if let ComponentKind::Unicyclic { cycle } = kind {
            let rep = classify_cycle(cycle, g)?;
            match rep.phi {
                PhiClass::Phi2 => out.gamma1 += 1,
                PhiClass::Phi3 => out.gamma2 += 1,
                PhiClass::Phi4 => out.si = false,
                PhiClass::Phi1 => {}
            }
            match rep.psi {
                PsiClass::Psi2 => out.tau1 += 1,
                PsiClass::Psi3 => out.tau2 += 1,
                PsiClass::Psi4 => out.sii = false,
                PsiClass::Psi1 => {}
            }
        }
        let local = component_assignment(c, kind, g);
        out.unit_s *= &component_block_value(kind, &local, g, IncidenceKind::S);
        out.unit_t *= &component_block_value(kind, &local, g, IncidenceKind::T);
        assignment.extend(local);
    }
    if !out.si {
        out.unit_s = EisensteinInt::zero();
    }
    if !out.sii {
        out.unit_t = EisensteinInt::zero();
    }
    out.sign = assignment_sign(&assignment);
    out.components = kinds;
    Ok(out)
}

/// A vertex labeling by residues mod 6.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SPLabeling {
    /// `labels[v − 1]` is the part of vertex `v`.
    pub labels: Vec<u8>,
}

impl SPLabeling {
    pub fn label(&self, v: Vertex) -> u8 {
        self.labels[v - 1]
    }

    /// Vertices grouped by label `0..6`.
    pub fn parts(&self) -> [Vec<Vertex>; 6] {
        let mut parts: [Vec<Vertex>; 6] = Default::default();
        for (i, &l) in self.labels.iter().enumerate() {
            parts[l as usize].push(i + 1);
        }
        parts
    }
}

/// Result of label propagation: a consistent labeling, or a cycle whose
/// increments do not sum to zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelingOutcome {
    Labeled(SPLabeling),
    Conflict(MixedWalk),
}

impl LabelingOutcome {
    pub fn labeling(self) -> Option<SPLabeling> {
        match self {
            LabelingOutcome::Labeled(l) => Some(l),
            LabelingOutcome::Conflict(_) => None,
        }
    }
}

/// Label increments for one edge traversed from `edge.u` to `edge.v`
/// (`along = true`) or the other way.
pub type Increment = fn(&Edge, bool) -> u8;

fn sp_increment(e: &Edge, along: bool) -> u8 {
    match (e.is_directed(), along) {
        (false, _) => 0,
        (true, true) => 1,
        (true, false) => 5,
    }
}

fn quasi_increment(e: &Edge, along: bool) -> u8 {
    match (e.is_directed(), along) {
        (false, _) => 3,
        (true, true) => 2,
        (true, false) => 4,
    }
}

/// Breadth-first propagation from the smallest vertex of every component,
/// starting at label 0.
pub fn propagate_labels(g: &MixedGraph, increment: Increment) -> LabelingOutcome {
    let n = g.vertex_count();
    let mut label: Vec<Option<u8>> = vec![None; n + 1];
    let mut parent: Vec<Option<Vertex>> = vec![None; n + 1];
    for s in g.vertices() {
        if label[s].is_some() {
            continue;
        }
        label[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            let lx = label[x].unwrap();
            for &(y, id) in g.neighbors(x) {
                let e = g.edge(id);
                let want = (lx + increment(e, e.u == x)) % 6;
                match label[y] {
                    None => {
                        label[y] = Some(want);
                        parent[y] = Some(x);
                        queue.push_back(y);
                    }
                    Some(ly) if ly != want => {
                        return LabelingOutcome::Conflict(conflict_cycle(g, &parent, x, y));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    LabelingOutcome::Labeled(SPLabeling {
        labels: label[1..].iter().map(|l| l.unwrap()).collect(),
    })
}

/// The cycle closed by the non-tree edge `x—y` in the BFS forest.
fn conflict_cycle(g: &MixedGraph, parent: &[Option<Vertex>], x: Vertex, y: Vertex) -> MixedWalk {
    let path_to_root = |mut v: Vertex| {
        let mut p = vec![v];
        while let Some(u) = parent[v] {
            p.push(u);
            v = u;
        }
        p
    };
    let px = path_to_root(x);
    let py = path_to_root(y);
    let lca = *px.iter().find(|v| py.contains(v)).expect("same BFS tree");
    let mut cyc: Vec<Vertex> = px.iter().copied().take_while(|&v| v != lca).collect();
    cyc.push(lca);
    let tail: Vec<Vertex> = py.iter().copied().take_while(|&v| v != lca).collect();
    cyc.extend(tail.into_iter().rev());
    canonical_cycle(g, &cyc).expect("conflict cycle follows graph edges")
}

/// SP partition by propagation: undirected edges keep the label, directed
/// edges add one from tail to head.
pub fn sp_analysis(g: &MixedGraph) -> LabelingOutcome {
    propagate_labels(g, sp_increment)
}

pub fn sp_labeling(g: &MixedGraph) -> Option<SPLabeling> {
    sp_analysis(g).labeling()
}

/// Propagation with `+3` across undirected edges, `+2` along and `+4` against
/// directed edges. These increments solve `ξ* T = 0` edgewise for
/// `ξ_v = ω^label(v)`.
pub fn quasi_analysis(g: &MixedGraph) -> LabelingOutcome {
    propagate_labels(g, quasi_increment)
}

pub fn quasi_null_labeling(g: &MixedGraph) -> Option<SPLabeling> {
    quasi_analysis(g).labeling()
}

/// `ξ_v = ω̄^label(v)`; satisfies `ξ* S = 0` and therefore `L ξ = 0`.
pub fn null_vector_from_sp(lab: &SPLabeling) -> Vec<EisensteinInt> {
    lab.labels
        .iter()
        .map(|&l| EisensteinInt::omega_pow(-(l as i64)))
        .collect()
}

/// `ξ_v = ω^label(v)`; satisfies `ξ* T = 0` and therefore `Q ξ = 0`.
pub fn null_vector_from_quasi(lab: &SPLabeling) -> Vec<EisensteinInt> {
    lab.labels
        .iter()
        .map(|&l| EisensteinInt::omega_pow(l as i64))
        .collect()
}

/// Checks a labeling against the SP rules edge by edge.
pub fn is_valid_sp_labeling(g: &MixedGraph, lab: &SPLabeling) -> bool {
    is_valid_labeling(g, lab, sp_increment)
}

pub fn is_valid_quasi_labeling(g: &MixedGraph, lab: &SPLabeling) -> bool {
    is_valid_labeling(g, lab, quasi_increment)
}

fn is_valid_labeling(g: &MixedGraph, lab: &SPLabeling, increment: Increment) -> bool {
    lab.labels.len() == g.vertex_count()
        && g.edges()
            .iter()
            .all(|e| (lab.label(e.u) + increment(e, true)) % 6 == lab.label(e.v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;
    use crate::linalg::det;
    use crate::matrix::{build_l, build_q, build_s, edge_set, vertex_set};
    use num_bigint::BigInt;

    fn e(a: i64, b: i64) -> EisensteinInt {
        EisensteinInt::new(a, b)
    }

    fn full(g: &MixedGraph) -> Substructure {
        Substructure::new(g.vertices(), 0..g.edge_count())
    }

    fn block_det(g: &MixedGraph, s: &Substructure, inc: IncidenceKind) -> EisensteinInt {
        let m = inc.build(g);
        det(&m
            .submatrix(
                &vertex_set(s.vertices.iter().copied()),
                &edge_set(s.edges.iter().copied()),
            )
            .unwrap())
        .unwrap()
    }

    #[test]
    fn cycle_class_examples() {
        let c4 = parse_graph("n 4\ne 1 2 --\ne 2 3 --\ne 3 4 --\ne 4 1 --").unwrap();
        let w = canonical_cycle(&c4, &[1, 2, 3, 4]).unwrap();
        let r = classify_cycle(&w, &c4).unwrap();
        assert_eq!(
            (r.a, r.b, r.c, r.phi, r.psi),
            (0, 0, 4, PhiClass::Phi4, PsiClass::Psi4)
        );

        let c3 = parse_graph("n 3\ne 1 2 ->\ne 2 3 ->\ne 3 1 ->").unwrap();
        let w = canonical_cycle(&c3, &[1, 2, 3]).unwrap();
        let r = classify_cycle(&w, &c3).unwrap();
        assert_eq!(
            (r.a, r.b, r.c, r.phi, r.psi),
            (3, 0, 0, PhiClass::Phi3, PsiClass::Psi4)
        );
        assert_eq!(
            block_det(&c3, &full(&c3), IncidenceKind::S).norm(),
            BigInt::from(4)
        );
        assert!(block_det(&c3, &full(&c3), IncidenceKind::T).is_zero());

        let sq = parse_graph("n 4\ne 1 2 ->\ne 3 2 ->\ne 3 4 --\ne 1 4 --").unwrap();
        let w = MixedWalk::from_vertices(&sq, &[1, 2, 3, 4, 1]).unwrap();
        let r = classify_cycle(&w, &sq).unwrap();
        assert_eq!(
            (r.a, r.b, r.c, r.phi, r.psi),
            (1, 1, 2, PhiClass::Phi4, PsiClass::Psi4)
        );
    }

    #[test]
    fn classes_are_direction_invariant() {
        let g = parse_graph("n 5\ne 1 2 ->\ne 2 3 ->\ne 4 3 --\ne 4 5 ->\ne 1 5 <-").unwrap();
        let w = canonical_cycle(&g, &[1, 2, 3, 4, 5]).unwrap();
        let fwd = classify_cycle(&w, &g).unwrap();
        let back = classify_cycle(&w.reversed(), &g).unwrap();
        assert_eq!((fwd.a, fwd.b), (back.b, back.a));
        assert_eq!((fwd.phi, fwd.psi), (back.phi, back.psi));
        // rotate the start vertex
        let rot = MixedWalk::from_vertices(&g, &[3, 4, 5, 1, 2, 3]).unwrap();
        let r = classify_cycle(&rot, &g).unwrap();
        assert_eq!((r.phi, r.psi), (fwd.phi, fwd.psi));
    }

    #[test]
    fn classify_cycle_rejects_non_cycles() {
        let g = parse_graph("n 3\ne 1 2 --\ne 2 3 --\ne 1 3 --").unwrap();
        let open = MixedWalk::from_vertices(&g, &[1, 2, 3]).unwrap();
        assert_eq!(classify_cycle(&open, &g), Err(StructureError::NotACycle));
        let back = MixedWalk::from_vertices(&g, &[1, 2, 1]).unwrap();
        assert_eq!(classify_cycle(&back, &g), Err(StructureError::NotACycle));
        let figure = MixedWalk::from_vertices(&g, &[1, 2, 3, 1, 2, 3, 1]).unwrap();
        assert_eq!(classify_cycle(&figure, &g), Err(StructureError::NotACycle));
    }

    #[test]
    fn rootless_tree_units() {
        // root 1 → leaf 2
        let g = parse_graph("n 2\ne 1 2 ->").unwrap();
        let c = Substructure::new([2], [0]);
        assert_eq!(det_unit_rootless_tree_s(&c, &g).unwrap(), e(-1, 1));
        assert_eq!(det_unit_rootless_tree_t(&c, &g).unwrap(), e(1, 0));
        assert_eq!(block_det(&g, &c, IncidenceKind::T), e(1, 0));
        // leaf 1 → root 2
        let c = Substructure::new([1], [0]);
        assert_eq!(det_unit_rootless_tree_t(&c, &g).unwrap(), e(0, 1));
        assert_eq!(block_det(&g, &c, IncidenceKind::T), e(0, 1));

        // undirected path 1—2—3—4 hanging from root 4: canonical directions point at the root
        let p = parse_graph("n 4\ne 1 2 --\ne 2 3 --\ne 3 4 --").unwrap();
        let c = Substructure::new([1, 2, 3], [0, 1, 2]);
        assert_eq!(det_unit_rootless_tree_s(&c, &p).unwrap(), e(1, 0));

        // star hanging from leaf 4; the arc 2 → 1 points toward the root
        let star = parse_graph("n 4\ne 2 1 ->\ne 1 3 --\ne 1 4 --").unwrap();
        let c = Substructure::new([1, 2, 3], [0, 1, 2]);
        assert_eq!(det_unit_rootless_tree_t(&c, &star).unwrap(), e(0, 1));
        // the root must be reached by exactly one edge
        let c = Substructure::new([2, 3, 4], [0, 1, 2]);
        assert_eq!(
            det_unit_rootless_tree_t(&c, &star),
            Err(StructureError::NotRootlessTree)
        );

        let not_tree = parse_graph("n 3\ne 1 2 --\ne 2 3 --\ne 1 3 --").unwrap();
        assert_eq!(
            det_unit_rootless_tree_s(&full(&not_tree), &not_tree),
            Err(StructureError::NotRootlessTree)
        );
    }

    #[test]
    fn rootless_tree_units_match_determinants() {
        let g = parse_graph("n 6\ne 1 2 ->\ne 3 2 --\ne 2 4 <-\ne 4 5 ->\ne 6 4 --").unwrap();
        for root in [1, 3, 5, 6] {
            let c = Substructure::new((1..=6).filter(|&v| v != root), 0..5);
            let local = component_assignment(&c, &ComponentKind::RootlessTree { root }, &g);
            let sign = assignment_sign(&local);
            for (inc, unit) in [
                (IncidenceKind::S, det_unit_rootless_tree_s(&c, &g).unwrap()),
                (IncidenceKind::T, det_unit_rootless_tree_t(&c, &g).unwrap()),
            ] {
                assert!(unit.is_unit());
                let d = block_det(&g, &c, inc);
                let want = if sign < 0 { -unit.clone() } else { unit };
                assert_eq!(d, want, "root {root} {inc:?}");
            }
        }
    }

    #[test]
    fn substructure_examples() {
        let g = parse_graph("n 3\ne 1 2 ->\ne 2 3 --").unwrap();
        let tree = Substructure::new([2, 3], [0, 1]);
        let k = classify_substructure(&tree, &g).unwrap();
        assert_eq!(k.eligibility(), Eligibility::Both);
        assert_eq!((k.gamma1, k.gamma2, k.tau1, k.tau2), (0, 0, 0, 0));
        assert!(k.unit_s.is_unit() && k.unit_t.is_unit());

        let c3 = parse_graph("n 3\ne 1 2 ->\ne 2 3 ->\ne 3 1 ->").unwrap();
        let k = classify_substructure(&full(&c3), &c3).unwrap();
        assert_eq!(k.eligibility(), Eligibility::SiOnly);
        assert_eq!(k.gamma2, 1);
        assert_eq!(k.unit_s.norm(), BigInt::from(4));
        assert!(k.unit_t.is_zero());
        assert_eq!(k.weight_s(), 4);

        let c4 = parse_graph("n 4\ne 1 2 --\ne 2 3 --\ne 3 4 --\ne 4 1 --").unwrap();
        let k = classify_substructure(&full(&c4), &c4).unwrap();
        assert!(!k.si);
        assert!(block_det(&c4, &full(&c4), IncidenceKind::S).is_zero());

        assert!(matches!(
            classify_substructure(&Substructure::new([1], [0, 1]), &c4),
            Err(StructureError::NotSquare { .. })
        ));
        // a loose edge makes the block singular
        let k = classify_substructure(&Substructure::new([1], [1]), &c4).unwrap();
        assert_eq!(k.eligibility(), Eligibility::Neither);
    }

    #[test]
    fn substructure_units_equal_determinants() {
        let g = parse_graph(
            "n 6\ne 1 2 ->\ne 2 3 ->\ne 3 1 <-\ne 3 4 --\ne 4 5 ->\ne 5 6 --\ne 6 4 ->",
        )
        .unwrap();
        let m = g.edge_count();
        for vs in crate::combinatorics::k_subsets(6, 4) {
            for es in crate::combinatorics::k_subsets(m, 4) {
                let s = Substructure::new(vs.iter().map(|v| v + 1), es.iter().copied());
                let k = classify_substructure(&s, &g).unwrap();
                for (inc, unit, weight) in [
                    (IncidenceKind::S, &k.unit_s, k.weight_s()),
                    (IncidenceKind::T, &k.unit_t, k.weight_t()),
                ] {
                    let d = block_det(&g, &s, inc);
                    let want = if k.sign < 0 {
                        -unit.clone()
                    } else {
                        unit.clone()
                    };
                    assert_eq!(d, want, "{s:?} {inc:?}");
                    assert_eq!(d.norm(), BigInt::from(weight));
                }
            }
        }
    }

    #[test]
    fn sp_labeling_examples() {
        let diamond = parse_graph("n 4\ne 1 2 ->\ne 1 3 ->\ne 1 4 --\ne 2 3 --\ne 4 3 ->").unwrap();
        let lab = sp_labeling(&diamond).unwrap();
        assert_eq!(lab.labels, vec![0, 1, 1, 0]);
        assert!(is_valid_sp_labeling(&diamond, &lab));

        // triangle with one arrow: Φ1
        let tri = parse_graph("n 3\ne 1 2 ->\ne 2 3 --\ne 1 3 --").unwrap();
        match sp_analysis(&tri) {
            LabelingOutcome::Conflict(cycle) => {
                let r = classify_cycle(&cycle, &tri).unwrap();
                assert_ne!(r.phi, PhiClass::Phi4);
            }
            LabelingOutcome::Labeled(_) => panic!("expected conflict"),
        }
        assert!(!det(&build_l(&tri)).unwrap().is_zero());

        let empty = MixedGraph::new(3);
        assert_eq!(sp_labeling(&empty).unwrap().labels, vec![0, 0, 0]);
        assert_eq!(
            null_vector_from_sp(&sp_labeling(&empty).unwrap()),
            vec![e(1, 0); 3]
        );
    }

    #[test]
    fn null_vector_kills_s_and_l() {
        let diamond = parse_graph("n 4\ne 1 2 ->\ne 1 3 ->\ne 1 4 --\ne 2 3 --\ne 4 3 ->").unwrap();
        let xi = null_vector_from_sp(&sp_labeling(&diamond).unwrap());
        let s = build_s(&diamond);
        let conj_xi: Vec<EisensteinInt> = xi.iter().map(EisensteinInt::conj).collect();
        let row = s.adjoint().mul_vec(&xi).unwrap();
        assert!(row.iter().all(EisensteinInt::is_zero));
        // ξ* S as a row vector
        for j in 0..s.cols() {
            let v: EisensteinInt = (0..s.rows()).map(|i| &conj_xi[i] * &s[(i, j)]).sum();
            assert!(v.is_zero());
        }
        assert!(build_l(&diamond)
            .mul_vec(&xi)
            .unwrap()
            .iter()
            .all(EisensteinInt::is_zero));
    }

    #[test]
    fn quasi_labeling_examples() {
        let sq = parse_graph("n 4\ne 1 2 ->\ne 3 2 ->\ne 3 4 --\ne 1 4 --").unwrap();
        let lab = quasi_null_labeling(&sq).unwrap();
        assert!(is_valid_quasi_labeling(&sq, &lab));
        let xi = null_vector_from_quasi(&lab);
        assert!(build_q(&sq)
            .mul_vec(&xi)
            .unwrap()
            .iter()
            .all(EisensteinInt::is_zero));

        let edge = parse_graph("n 2\ne 1 2 --").unwrap();
        assert_eq!(quasi_null_labeling(&edge).unwrap().labels, vec![0, 3]);
        assert!(det(&build_q(&edge)).unwrap().is_zero());

        let c3 = parse_graph("n 3\ne 1 2 --\ne 2 3 --\ne 1 3 --").unwrap();
        assert!(quasi_null_labeling(&c3).is_none());
        assert_eq!(det(&build_q(&c3)).unwrap(), e(4, 0));
    }

    #[test]
    fn labeling_parts() {
        let lab = SPLabeling {
            labels: vec![0, 1, 1, 0, 5],
        };
        let parts = lab.parts();
        assert_eq!(parts[0], vec![1, 4]);
        assert_eq!(parts[1], vec![2, 3]);
        assert_eq!(parts[5], vec![5]);
    }
}
