//! Principal and off-diagonal minors of `L` and `Q` evaluated two ways: by
//! exact elimination and by summing over square substructures (principal)
//! or generalized matchings (off-diagonal). Also spanning-tree counts from
//! cofactors.
//!
//! Both evaluations rest on Cauchy–Binet:
//!
//! ```text
//! det L[V₁,V₂] = Σ_{|E₁| = |V₁|} det S[V₁,E₁] · conj(det S[V₂,E₁])
//! ```
//!
//! A term survives only when both incidence blocks are nonsingular. The edge
//! set of such a term splits into components shared by both sides
//! (rootless trees and unicyclic graphs inside `V₁ ∩ V₂`) and bridging trees
//! with exactly one vertex `u ∈ V₁ \ V₂` and one `v ∈ V₂ \ V₁`. A shared block
//! contributes `|det|² = 3^γ₁ 4^γ₂`; a bridging tree contributes the unit
//! carried by its `u`–`v` path (see [`tree_contribution`]).
//!
//! The term also carries the sign `ε = sgn σ₁ · sgn σ₂` of the two
//! vertex→edge bijections (rows sorted ascending on both sides). Without it
//! the sum does not reproduce the determinant, not even in modulus, as soon
//! as two matchings with different bijection parity both survive.
//! [`MinorReport::combinatorial_unsigned`] keeps the sign-free sum for comparison.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::combinatorics::k_subsets;
use crate::eisenstein::{bigint_to_json, EisensteinInt};
use crate::graph::{
    classify_component, components, ComponentKind, EdgeId, GraphError, MixedGraph, MixedWalk,
    Substructure, Vertex,
};
use crate::linalg::{cofactor, det};
use crate::matrix::{vertex_set, ExactMatrix, IncidenceKind, Label, MatrixError};
use crate::structure::{
    assignment_sign, classify_cycle, classify_substructure, component_assignment,
    component_block_value, edges_toward, quasi_analysis, sp_analysis, LabelingOutcome, SPLabeling,
    StructureError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MinorError {
    #[error("vertex sets have sizes {0} and {1}")]
    SizeMismatch(usize, usize),
    #[error("vertex {vertex} out of range 1..={n}")]
    UnknownVertex { vertex: Vertex, n: usize },
    #[error(
        "matching on edges {edges:?} has a component that is neither shared nor a bridging tree"
    )]
    IrregularMatching { edges: Vec<EdgeId> },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn laplacian_name(inc: IncidenceKind) -> &'static str {
    match inc {
        IncidenceKind::S => "L",
        IncidenceKind::T => "Q",
    }
}

fn check_vertices(g: &MixedGraph, vs: &BTreeSet<Vertex>) -> Result<(), MinorError> {
    let n = g.vertex_count();
    match vs.iter().find(|&&v| v == 0 || v > n) {
        Some(&vertex) => Err(MinorError::UnknownVertex { vertex, n }),
        None => Ok(()),
    }
}

/// `Σ_{E₁} det A[V₁,E₁] · conj(det A[V₂,E₁])` over all column subsets of size
/// `|V₁|`, with rows and columns in ascending label order.
pub fn cauchy_binet_expand(
    a: &ExactMatrix,
    rows1: &BTreeSet<Label>,
    rows2: &BTreeSet<Label>,
) -> Result<EisensteinInt, MatrixError> {
    if rows1.len() != rows2.len() {
        return Err(MatrixError::SizeMismatch(rows1.len(), rows2.len()));
    }
    let positions = |rows: &BTreeSet<Label>| -> Result<Vec<usize>, MatrixError> {
        let mut p = rows
            .iter()
            .map(|&l| a.row_position(l))
            .collect::<Result<Vec<_>, _>>()?;
        p.sort_by_key(|&i| a.row_labels()[i]);
        Ok(p)
    };
    let r1 = positions(rows1)?;
    let r2 = positions(rows2)?;
    let mut cols: Vec<usize> = (0..a.cols()).collect();
    cols.sort_by_key(|&j| a.col_labels()[j]);
    let subsets: Vec<Vec<usize>> = k_subsets(cols.len(), r1.len())
        .map(|s| s.into_iter().map(|i| cols[i]).collect())
        .collect();
    let terms = subsets
        .par_iter()
        .map(|cs| {
            let d1 = det(&a.select_positions(&r1, cs))?;
            if d1.is_zero() {
                return Ok(EisensteinInt::zero());
            }
            let d2 = if r1 == r2 {
                d1.clone()
            } else {
                det(&a.select_positions(&r2, cs))?
            };
            Ok(&d1 * &d2.conj())
        })
        .collect::<Result<Vec<_>, MatrixError>>()?;
    Ok(terms.into_iter().sum())
}

/// Comparison of an exact minor with its combinatorial expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorReport {
    /// `"L"` or `"Q"`.
    pub matrix: &'static str,
    pub v1: Vec<Vertex>,
    pub v2: Vec<Vertex>,
    pub algebraic: EisensteinInt,
    /// Signed sum over matchings; equals `algebraic` exactly when the
    /// expansion is right.
    pub combinatorial: EisensteinInt,
    /// The same sum with every matching sign taken as `+1`.
    pub combinatorial_unsigned: EisensteinInt,
    /// Number of nonzero terms.
    pub terms: usize,
}

impl MinorReport {
    pub fn norm_algebraic(&self) -> BigInt {
        self.algebraic.norm()
    }

    pub fn norm_combinatorial(&self) -> BigInt {
        self.combinatorial.norm()
    }

    pub fn exact_match(&self) -> bool {
        self.algebraic == self.combinatorial
    }

    pub fn norm_match(&self) -> bool {
        self.norm_algebraic() == self.norm_combinatorial()
    }

    /// Whether the sign-free sum has the same modulus as the determinant.
    pub fn unsigned_norm_match(&self) -> bool {
        self.norm_algebraic() == self.combinatorial_unsigned.norm()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "matrix": self.matrix,
            "V1": self.v1,
            "V2": self.v2,
            "algebraic": self.algebraic,
            "combinatorial": self.combinatorial,
            "combinatorial_unsigned": self.combinatorial_unsigned,
            "norm_algebraic": bigint_to_json(&self.norm_algebraic()),
            "norm_combinatorial": bigint_to_json(&self.norm_combinatorial()),
            "terms": self.terms,
            "match": self.exact_match(),
            "norm_match": self.norm_match(),
        })
    }
}

fn principal_minor(
    g: &MixedGraph,
    v1: &BTreeSet<Vertex>,
    inc: IncidenceKind,
) -> Result<MinorReport, MinorError> {
    check_vertices(g, v1)?;
    let rows = vertex_set(v1.iter().copied());
    let algebraic = det(&inc.laplacian(g).submatrix(&rows, &rows)?)?;
    // edges missing V₁ give zero columns, so only edges touching V₁ matter
    let touching: Vec<EdgeId> = (0..g.edge_count())
        .filter(|&id| {
            let e = g.edge(id);
            v1.contains(&e.u) || v1.contains(&e.v)
        })
        .collect();
    let subsets: Vec<Vec<usize>> = k_subsets(touching.len(), v1.len()).collect();
    let weights = subsets
        .par_iter()
        .map(|idx| {
            let s = Substructure::new(v1.iter().copied(), idx.iter().map(|&i| touching[i]));
            let class = classify_substructure(&s, g)?;
            Ok(match inc {
                IncidenceKind::S => class.weight_s(),
                IncidenceKind::T => class.weight_t(),
            })
        })
        .collect::<Result<Vec<u64>, StructureError>>()?;
    let terms = weights.iter().filter(|&&w| w > 0).count();
    let total: BigInt = weights.into_iter().map(BigInt::from).sum();
    let combinatorial = EisensteinInt::from_int(total);
    Ok(MinorReport {
        matrix: laplacian_name(inc),
        v1: v1.iter().copied().collect(),
        v2: v1.iter().copied().collect(),
        algebraic,
        combinatorial_unsigned: combinatorial.clone(),
        combinatorial,
        terms,
    })
}

/// `det L[V₁]` against `Σ 3^γ₁ 4^γ₂` over SI-eligible square substructures on `V₁`.
pub fn principal_minor_l(g: &MixedGraph, v1: &BTreeSet<Vertex>) -> Result<MinorReport, MinorError> {
    principal_minor(g, v1, IncidenceKind::S)
}

/// `det Q[V₁]` against `Σ 3^τ₁ 4^τ₂` over SII-eligible square substructures on `V₁`.
pub fn principal_minor_q(g: &MixedGraph, v1: &BTreeSet<Vertex>) -> Result<MinorReport, MinorError> {
    principal_minor(g, v1, IncidenceKind::T)
}

/// A component of a matching lying inside `V₁ ∩ V₂`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SharedComponent {
    pub component: Substructure,
    pub kind: ComponentKind,
    /// Block determinant, identical on both sides.
    pub block: EisensteinInt,
}

/// A tree component joining `u ∈ V₁ \ V₂` to `v ∈ V₂ \ V₁`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BridgingTree {
    pub component: Substructure,
    pub u: Vertex,
    pub v: Vertex,
    /// The tree path from `u` to `v`.
    pub path: MixedWalk,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneralizedMatching {
    pub edges: Vec<EdgeId>,
    pub shared: Vec<SharedComponent>,
    pub bridges: Vec<BridgingTree>,
    /// `sgn σ₁ · sgn σ₂` for the two vertex→edge bijections.
    pub sign: i8,
    /// Cycles of norm 3 and norm 4 among the shared components.
    pub gamma1: u32,
    pub gamma2: u32,
}

impl GeneralizedMatching {
    /// `Π tree contributions · 3^γ₁ · 4^γ₂`, without the sign.
    pub fn unsigned_value(&self, g: &MixedGraph, inc: IncidenceKind) -> EisensteinInt {
        let trees: EisensteinInt = self
            .bridges
            .iter()
            .map(|t| tree_contribution(&t.path, g, inc))
            .product();
        let weight = BigInt::from(3u32).pow(self.gamma1) * BigInt::from(4u32).pow(self.gamma2);
        &trees * &EisensteinInt::from_int(weight)
    }

    pub fn value(&self, g: &MixedGraph, inc: IncidenceKind) -> EisensteinInt {
        let v = self.unsigned_value(g, inc);
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }
}

/// Every `E₁` with `|E₁| = |V₁|` for which both `S[V₁,E₁]` and `S[V₂,E₁]` (or
/// the `T` blocks) are nonsingular, decomposed into shared components and
/// bridging trees. Ordered lexicographically by edge ids.
pub fn enumerate_generalized_matchings(
    g: &MixedGraph,
    v1: &BTreeSet<Vertex>,
    v2: &BTreeSet<Vertex>,
    inc: IncidenceKind,
) -> Result<Vec<GeneralizedMatching>, MinorError> {
    if v1.len() != v2.len() {
        return Err(MinorError::SizeMismatch(v1.len(), v2.len()));
    }
    check_vertices(g, v1)?;
    check_vertices(g, v2)?;
    let m = inc.build(g);
    let rows1: Vec<usize> = v1.iter().map(|v| v - 1).collect();
    let rows2: Vec<usize> = v2.iter().map(|v| v - 1).collect();
    let subsets: Vec<Vec<usize>> = k_subsets(g.edge_count(), v1.len()).collect();
    let found = subsets
        .par_iter()
        .map(|es| {
            if det(&m.select_positions(&rows1, es))?.is_zero()
                || det(&m.select_positions(&rows2, es))?.is_zero()
            {
                return Ok(None);
            }
            decompose_matching(g, v1, v2, es, inc).map(Some)
        })
        .collect::<Result<Vec<_>, MinorError>>()?;
    Ok(found.into_iter().flatten().collect())
}

fn decompose_matching(
    g: &MixedGraph,
    v1: &BTreeSet<Vertex>,
    v2: &BTreeSet<Vertex>,
    edges: &[EdgeId],
    inc: IncidenceKind,
) -> Result<GeneralizedMatching, MinorError> {
    let irregular = || MinorError::IrregularMatching {
        edges: edges.to_vec(),
    };
    let union: BTreeSet<Vertex> = v1.union(v2).copied().collect();
    let s = Substructure::new(union, edges.iter().copied());
    let mut out = GeneralizedMatching {
        edges: edges.to_vec(),
        shared: Vec::new(),
        bridges: Vec::new(),
        sign: 1,
        gamma1: 0,
        gamma2: 0,
    };
    let mut sigma1: BTreeMap<Vertex, EdgeId> = BTreeMap::new();
    let mut sigma2: BTreeMap<Vertex, EdgeId> = BTreeMap::new();
    for c in components(&s, g) {
        let only1: Vec<Vertex> = c
            .vertices
            .iter()
            .copied()
            .filter(|v| !v2.contains(v))
            .collect();
        let only2: Vec<Vertex> = c
            .vertices
            .iter()
            .copied()
            .filter(|v| !v1.contains(v))
            .collect();
        match (only1.as_slice(), only2.as_slice()) {
            ([], []) => {
                if !c.is_square() {
                    return Err(irregular());
                }
                let kind = classify_component(&c, g)?;
                if let ComponentKind::Unicyclic { cycle } = &kind {
                    let class = classify_cycle(cycle, g)?;
                    let norm = match inc {
                        IncidenceKind::S => class.phi.det_norm(),
                        IncidenceKind::T => class.psi.det_norm(),
                    };
                    match norm {
                        3 => out.gamma1 += 1,
                        4 => out.gamma2 += 1,
                        _ => {}
                    }
                } else if kind == ComponentKind::Other {
                    return Err(irregular());
                }
                let local = component_assignment(&c, &kind, g);
                let block = component_block_value(&kind, &local, g, inc);
                sigma1.extend(local.iter().map(|(&a, &b)| (a, b)));
                sigma2.extend(local);
                out.shared.push(SharedComponent {
                    component: c,
                    kind,
                    block,
                });
            }
            (&[u], &[v]) => {
                let internal = c.edges.iter().all(|&id| {
                    let e = g.edge(id);
                    c.vertices.contains(&e.u) && c.vertices.contains(&e.v)
                });
                if !internal || c.edges.len() + 1 != c.vertices.len() {
                    return Err(irregular());
                }
                let toward_v = edges_toward(g, &c.edges, &[v]);
                let toward_u = edges_toward(g, &c.edges, &[u]);
                if toward_v.len() + 1 != c.vertices.len() {
                    return Err(irregular());
                }
                let mut path = vec![u];
                let mut x = u;
                while x != v {
                    x = g.edge(toward_v[&x]).other(x);
                    path.push(x);
                }
                sigma1.extend(toward_v);
                sigma2.extend(toward_u);
                out.bridges.push(BridgingTree {
                    component: c,
                    u,
                    v,
                    path: MixedWalk::from_vertices(g, &path)?,
                });
            }
            _ => return Err(irregular()),
        }
    }
    out.sign = assignment_sign(&sigma1) * assignment_sign(&sigma2);
    Ok(out)
}

/// Unit carried by a bridging tree's path from its `V₁`-side end `u` to its
/// `V₂`-side end `v`.
///
/// With `a`/`b` the directed path edges pointing away from `u`/`v` and `c` the
/// undirected ones, this is `(−ω)^(a−b) · (−1)^c` for `S` and `ω^(a−b)` for
/// `T`. It equals [`path_factor`], the product of
/// `A[p_{i−1}, f_i] · conj(A[p_i, f_i])` along the path.
pub fn tree_contribution(path: &MixedWalk, g: &MixedGraph, inc: IncidenceKind) -> EisensteinInt {
    let (a, b, c) = path.direction_counts(g);
    let exp = a as i64 - b as i64;
    match inc {
        IncidenceKind::S => {
            // −ω = ω⁴
            let u = EisensteinInt::omega_pow(4 * exp);
            if c % 2 == 1 {
                -u
            } else {
                u
            }
        }
        IncidenceKind::T => EisensteinInt::omega_pow(exp),
    }
}

pub fn tree_contribution_l(path: &MixedWalk, g: &MixedGraph) -> EisensteinInt {
    tree_contribution(path, g, IncidenceKind::S)
}

pub fn tree_contribution_q(path: &MixedWalk, g: &MixedGraph) -> EisensteinInt {
    tree_contribution(path, g, IncidenceKind::T)
}

/// `Π A[p_{i−1}, f_i] · conj(A[p_i, f_i])` along the path, read directly off
/// the incidence entries.
pub fn path_factor(path: &MixedWalk, g: &MixedGraph, inc: IncidenceKind) -> EisensteinInt {
    path.steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            &inc.entry(g, path.vertices[i], s.edge)
                * &inc.entry(g, path.vertices[i + 1], s.edge).conj()
        })
        .product()
}

fn offdiag_minor(
    g: &MixedGraph,
    v1: &BTreeSet<Vertex>,
    v2: &BTreeSet<Vertex>,
    inc: IncidenceKind,
) -> Result<MinorReport, MinorError> {
    let matchings = enumerate_generalized_matchings(g, v1, v2, inc)?;
    let algebraic = det(&inc.laplacian(g).submatrix(
        &vertex_set(v1.iter().copied()),
        &vertex_set(v2.iter().copied()),
    )?)?;
    let mut combinatorial = EisensteinInt::zero();
    let mut unsigned = EisensteinInt::zero();
    for gm in &matchings {
        let u = gm.unsigned_value(g, inc);
        if gm.sign < 0 {
            combinatorial -= &u;
        } else {
            combinatorial += &u;
        }
        unsigned += &u;
    }
    Ok(MinorReport {
        matrix: laplacian_name(inc),
        v1: v1.iter().copied().collect(),
        v2: v2.iter().copied().collect(),
        algebraic,
        combinatorial,
        combinatorial_unsigned: unsigned,
        terms: matchings.len(),
    })
}

/// `det L[V₁,V₂]` against the signed sum over generalized matchings.
pub fn offdiag_minor_l(
    g: &MixedGraph,
    v1: &BTreeSet<Vertex>,
    v2: &BTreeSet<Vertex>,
) -> Result<MinorReport, MinorError> {
    offdiag_minor(g, v1, v2, IncidenceKind::S)
}

/// `det Q[V₁,V₂]` against the signed sum over generalized matchings.
pub fn offdiag_minor_q(
    g: &MixedGraph,
    v1: &BTreeSet<Vertex>,
    v2: &BTreeSet<Vertex>,
) -> Result<MinorReport, MinorError> {
    offdiag_minor(g, v1, v2, IncidenceKind::T)
}

/// Kirchhoff count of spanning trees of the underlying graph: any principal
/// `(n−1)`-minor of its integer Laplacian. Zero for the empty graph.
pub fn spanning_trees_kirchhoff(g: &MixedGraph) -> BigInt {
    let n = g.vertex_count();
    if n == 0 {
        return BigInt::from(0);
    }
    let lap = crate::matrix::build_l(&g.underlying());
    let drop = vertex_set([1]);
    let minor = lap.delete(&drop, &drop).expect("vertex 1 exists");
    let d = det(&minor).expect("integer elimination is exact");
    debug_assert!(d.is_rational());
    d.a
}

/// Two cofactors with different norms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CofactorWitness {
    pub first: (Vertex, Vertex, BigInt),
    pub second: (Vertex, Vertex, BigInt),
}

/// Cofactor-based spanning-tree count for `L` (requires an SP labeling) or
/// `Q` (requires a quasi labeling).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeCountReport {
    pub matrix: &'static str,
    pub applicable: bool,
    pub labeling: Option<SPLabeling>,
    /// A cycle outside the null class when no labeling exists.
    pub obstruction: Option<MixedWalk>,
    pub connected: bool,
    /// `Some(norm)` when all `n²` cofactor norms coincide.
    pub common_norm: Option<BigInt>,
    pub witness: Option<CofactorWitness>,
    pub kirchhoff: BigInt,
    /// `√common_norm` when applicable and the norm is a perfect square.
    pub count: Option<BigInt>,
}

impl TreeCountReport {
    /// When applicable: cofactor norms agree and equal the squared Kirchhoff count.
    pub fn holds(&self) -> bool {
        !self.applicable || self.common_norm.as_ref() == Some(&(&self.kirchhoff * &self.kirchhoff))
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "matrix": self.matrix,
            "applicable": self.applicable,
            "labeling": self.labeling.as_ref().map(|l| &l.labels),
            "obstruction": self.obstruction.as_ref().map(|w| &w.vertices),
            "connected": self.connected,
            "common_norm": self.common_norm.as_ref().map(bigint_to_json),
            "witness": self.witness.as_ref().map(|w| json!({
                "first": {"row": w.first.0, "col": w.first.1, "norm": bigint_to_json(&w.first.2)},
                "second": {"row": w.second.0, "col": w.second.1, "norm": bigint_to_json(&w.second.2)},
            })),
            "kirchhoff": bigint_to_json(&self.kirchhoff),
            "count": self.count.as_ref().map(bigint_to_json),
            "holds": self.holds(),
        })
    }
}

/// Norms of all `n²` cofactors; `Ok(norm)` when constant, else the first
/// differing pair in row-major order.
pub fn cofactor_norms(m: &ExactMatrix) -> Result<Result<BigInt, CofactorWitness>, MatrixError> {
    let n = m.rows();
    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| (1..=n).map(move |j| (i, j))).collect();
    let norms = pairs
        .par_iter()
        .map(|&(i, j)| cofactor(m, Label::Vertex(i), Label::Vertex(j)).map(|c| c.norm()))
        .collect::<Result<Vec<_>, _>>()?;
    let Some(first) = norms.first() else {
        return Ok(Ok(BigInt::from(0)));
    };
    match norms.iter().position(|x| x != first) {
        None => Ok(Ok(first.clone())),
        Some(k) => Ok(Err(CofactorWitness {
            first: (pairs[0].0, pairs[0].1, first.clone()),
            second: (pairs[k].0, pairs[k].1, norms[k].clone()),
        })),
    }
}

fn tree_count(g: &MixedGraph, inc: IncidenceKind) -> Result<TreeCountReport, MinorError> {
    let outcome = match inc {
        IncidenceKind::S => sp_analysis(g),
        IncidenceKind::T => quasi_analysis(g),
    };
    let (labeling, obstruction) = match outcome {
        LabelingOutcome::Labeled(l) => (Some(l), None),
        LabelingOutcome::Conflict(c) => (None, Some(c)),
    };
    let (common_norm, witness) = match cofactor_norms(&inc.laplacian(g))? {
        Ok(n) => (Some(n), None),
        Err(w) => (None, Some(w)),
    };
    let applicable = labeling.is_some();
    let count = common_norm
        .as_ref()
        .filter(|_| applicable)
        .map(|n| n.sqrt())
        .filter(|r| common_norm.as_ref() == Some(&(r * r)));
    Ok(TreeCountReport {
        matrix: laplacian_name(inc),
        applicable,
        labeling,
        obstruction,
        connected: g.is_connected(),
        common_norm,
        witness,
        kirchhoff: spanning_trees_kirchhoff(g),
        count,
    })
}

pub fn tree_count_via_l(g: &MixedGraph) -> Result<TreeCountReport, MinorError> {
    tree_count(g, IncidenceKind::S)
}

pub fn tree_count_via_q(g: &MixedGraph) -> Result<TreeCountReport, MinorError> {
    tree_count(g, IncidenceKind::T)
}

/// Exhaustive spanning-tree count by testing every `(n−1)`-edge subset for
/// acyclicity. Exponential; a test oracle for [`spanning_trees_kirchhoff`].
pub fn spanning_trees_brute_force(g: &MixedGraph) -> u64 {
    let n = g.vertex_count();
    if n == 0 {
        return 0;
    }
    let mut count = 0;
    for es in k_subsets(g.edge_count(), n - 1) {
        let mut parent: Vec<usize> = (0..=n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let acyclic = es.iter().all(|&id| {
            let e = g.edge(id);
            let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
            parent[a] = b;
            a != b
        });
        if acyclic {
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;
    use crate::matrix::{build_l, build_s, build_t};

    fn e(a: i64, b: i64) -> EisensteinInt {
        EisensteinInt::new(a, b)
    }

    fn set(vs: &[Vertex]) -> BTreeSet<Vertex> {
        vs.iter().copied().collect()
    }

    fn diamond_sp() -> MixedGraph {
        parse_graph("n 4\ne 1 2 ->\ne 1 3 ->\ne 1 4 --\ne 2 3 --\ne 4 3 ->").unwrap()
    }

    fn diamond_non_sp() -> MixedGraph {
        parse_graph("n 4\ne 1 2 ->\ne 3 1 ->\ne 1 4 --\ne 2 3 --\ne 4 3 ->").unwrap()
    }

    fn square_psi4() -> MixedGraph {
        parse_graph("n 4\ne 1 2 ->\ne 3 2 ->\ne 3 4 --\ne 1 4 --").unwrap()
    }

    fn square_non_psi4() -> MixedGraph {
        parse_graph("n 4\ne 1 2 ->\ne 2 3 ->\ne 3 4 --\ne 1 4 --").unwrap()
    }

    #[test]
    fn principal_minor_examples() {
        let r = principal_minor_l(&diamond_sp(), &set(&[2, 3, 4])).unwrap();
        assert_eq!(r.algebraic, e(8, 0));
        assert!(r.exact_match());
        let r = principal_minor_q(&square_psi4(), &set(&[2, 3, 4])).unwrap();
        assert_eq!(r.algebraic, e(4, 0));
        assert!(r.exact_match());
        for v in 1..=4 {
            let r = principal_minor_l(&diamond_sp(), &set(&[v])).unwrap();
            assert_eq!(r.algebraic, e(diamond_sp().degree(v) as i64, 0));
            assert!(r.exact_match());
        }
        let r = principal_minor_l(&diamond_sp(), &set(&[1, 2, 3, 4])).unwrap();
        assert!(r.algebraic.is_zero() && r.exact_match());
    }

    #[test]
    fn unknown_vertices_are_rejected() {
        assert_eq!(
            principal_minor_l(&diamond_sp(), &set(&[5])),
            Err(MinorError::UnknownVertex { vertex: 5, n: 4 })
        );
        assert_eq!(
            offdiag_minor_l(&diamond_sp(), &set(&[1, 2]), &set(&[3])),
            Err(MinorError::SizeMismatch(2, 1))
        );
    }

    #[test]
    fn cauchy_binet_examples() {
        let g = diamond_sp();
        let s = build_s(&g);
        let l = build_l(&g);
        let r1 = vertex_set([1, 2, 3]);
        let r2 = vertex_set([2, 3, 4]);
        let cb = cauchy_binet_expand(&s, &r1, &r2).unwrap();
        assert_eq!(cb, det(&l.submatrix(&r1, &r2).unwrap()).unwrap());
        assert_eq!(cb.norm(), BigInt::from(64));
        assert_eq!(cauchy_binet_expand(&s, &r2, &r2).unwrap(), e(8, 0));
        // 1×1: L(1,2) = −ω for the arc 1 → 2
        let one = cauchy_binet_expand(&s, &vertex_set([1]), &vertex_set([2])).unwrap();
        assert_eq!(one, -EisensteinInt::omega());
        assert!(cauchy_binet_expand(&s, &r1, &vertex_set([1])).is_err());
    }

    #[test]
    fn single_arc_matching() {
        let g = parse_graph("n 2\ne 1 2 ->").unwrap();
        let ms =
            enumerate_generalized_matchings(&g, &set(&[1]), &set(&[2]), IncidenceKind::S).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].bridges.len(), 1);
        assert_eq!(ms[0].bridges[0].path.vertices, vec![1, 2]);
        let s = build_s(&g);
        let oracle = &s[(0, 0)] * &s[(1, 0)].conj();
        assert_eq!(tree_contribution_l(&ms[0].bridges[0].path, &g), oracle);
        let t = build_t(&g);
        let oracle_t = &t[(0, 0)] * &t[(1, 0)].conj();
        assert_eq!(tree_contribution_q(&ms[0].bridges[0].path, &g), oracle_t);
    }

    #[test]
    fn tree_contribution_examples() {
        let und = parse_graph("n 2\ne 1 2 --").unwrap();
        let p = MixedWalk::from_vertices(&und, &[1, 2]).unwrap();
        assert_eq!(tree_contribution_l(&p, &und), e(-1, 0));
        assert_eq!(tree_contribution_q(&p, &und), e(1, 0));

        let two = parse_graph("n 3\ne 1 2 ->\ne 2 3 ->").unwrap();
        let p = MixedWalk::from_vertices(&two, &[1, 2, 3]).unwrap();
        assert_eq!(tree_contribution_l(&p, &two), EisensteinInt::omega().pow(2));
        // 2×2 oracle: S[{1,2},E]·conj(S[{2,3},E])
        let s = build_s(&two);
        let d1 = det(&s
            .submatrix(&vertex_set([1, 2]), &crate::matrix::edge_set([0, 1]))
            .unwrap())
        .unwrap();
        let d2 = det(&s
            .submatrix(&vertex_set([2, 3]), &crate::matrix::edge_set([0, 1]))
            .unwrap())
        .unwrap();
        assert_eq!((&d1 * &d2.conj()).norm(), BigInt::from(1));
        assert_eq!(
            path_factor(&p, &two, IncidenceKind::S),
            tree_contribution_l(&p, &two)
        );

        let sym = parse_graph("n 3\ne 1 2 ->\ne 3 2 ->").unwrap();
        let p = MixedWalk::from_vertices(&sym, &[1, 2, 3]).unwrap();
        assert_eq!(tree_contribution_q(&p, &sym), e(1, 0));
    }

    #[test]
    fn closed_form_matches_path_factor() {
        let g = parse_graph("n 6\ne 1 2 ->\ne 3 2 ->\ne 3 4 --\ne 5 4 ->\ne 5 6 --").unwrap();
        for k in 2..=6 {
            let p = MixedWalk::from_vertices(&g, &(1..=k).collect::<Vec<_>>()).unwrap();
            for inc in [IncidenceKind::S, IncidenceKind::T] {
                assert_eq!(tree_contribution(&p, &g, inc), path_factor(&p, &g, inc));
                assert_eq!(
                    tree_contribution(&p.reversed(), &g, inc),
                    path_factor(&p, &g, inc).conj()
                );
            }
        }
    }

    #[test]
    fn offdiag_examples() {
        let r = offdiag_minor_l(&diamond_sp(), &set(&[2, 3, 4]), &set(&[1, 3, 4])).unwrap();
        assert_eq!(r.norm_algebraic(), BigInt::from(64));
        assert!(r.exact_match());
        let r = offdiag_minor_q(&square_psi4(), &set(&[2, 3, 4]), &set(&[1, 3, 4])).unwrap();
        assert_eq!(r.norm_algebraic(), BigInt::from(16));
        assert!(r.exact_match());
        let same = offdiag_minor_l(&diamond_sp(), &set(&[2, 3]), &set(&[2, 3])).unwrap();
        let p = principal_minor_l(&diamond_sp(), &set(&[2, 3])).unwrap();
        assert_eq!(same.combinatorial, p.combinatorial);
    }

    #[test]
    fn bridging_paths_connect_their_ends() {
        let g = diamond_non_sp();
        let ms =
            enumerate_generalized_matchings(&g, &set(&[1]), &set(&[2]), IncidenceKind::S).unwrap();
        assert!(!ms.is_empty());
        for m in &ms {
            assert_eq!(m.bridges.len(), 1);
            let t = &m.bridges[0];
            assert_eq!(
                (t.path.vertices[0], *t.path.vertices.last().unwrap()),
                (1, 2)
            );
        }
    }

    #[test]
    fn unsigned_sum_can_miss_the_modulus() {
        let tri = parse_graph("n 3\ne 1 2 --\ne 2 3 --\ne 1 3 --").unwrap();
        let r = offdiag_minor_l(&tri, &set(&[2, 3]), &set(&[1, 3])).unwrap();
        assert_eq!(r.norm_algebraic(), BigInt::from(9));
        assert!(r.exact_match());
        assert_eq!(r.combinatorial_unsigned, e(-1, 0));
        assert!(!r.unsigned_norm_match());
    }

    #[test]
    fn offdiag_exhaustive_small() {
        for g in [
            diamond_sp(),
            diamond_non_sp(),
            square_psi4(),
            square_non_psi4(),
        ] {
            for k in 1..=3 {
                for a in k_subsets(4, k) {
                    for b in k_subsets(4, k) {
                        let v1: BTreeSet<Vertex> = a.iter().map(|x| x + 1).collect();
                        let v2: BTreeSet<Vertex> = b.iter().map(|x| x + 1).collect();
                        assert!(offdiag_minor_l(&g, &v1, &v2).unwrap().exact_match());
                        assert!(offdiag_minor_q(&g, &v1, &v2).unwrap().exact_match());
                    }
                }
            }
        }
    }

    #[test]
    fn kirchhoff_counts() {
        assert_eq!(spanning_trees_kirchhoff(&diamond_sp()), BigInt::from(8));
        assert_eq!(spanning_trees_kirchhoff(&square_psi4()), BigInt::from(4));
        let path = parse_graph("n 4\ne 1 2 ->\ne 2 3 --\ne 4 3 ->").unwrap();
        assert_eq!(spanning_trees_kirchhoff(&path), BigInt::from(1));
        assert_eq!(
            spanning_trees_kirchhoff(&MixedGraph::new(3)),
            BigInt::from(0)
        );
        assert_eq!(
            spanning_trees_kirchhoff(&MixedGraph::new(1)),
            BigInt::from(1)
        );
        let k4 =
            parse_graph("n 4\ne 1 2 --\ne 1 3 --\ne 1 4 --\ne 2 3 --\ne 2 4 --\ne 3 4 --").unwrap();
        assert_eq!(spanning_trees_kirchhoff(&k4), BigInt::from(16));
        for g in [diamond_sp(), square_psi4(), k4, path] {
            assert_eq!(
                spanning_trees_kirchhoff(&g),
                BigInt::from(spanning_trees_brute_force(&g))
            );
        }
    }

    #[test]
    fn tree_count_examples() {
        let r = tree_count_via_l(&diamond_sp()).unwrap();
        assert!(r.applicable && r.holds());
        assert_eq!(r.count, Some(BigInt::from(8)));
        assert_eq!(r.common_norm, Some(BigInt::from(64)));

        let r = tree_count_via_l(&diamond_non_sp()).unwrap();
        assert!(!r.applicable);
        let w = r.witness.expect("cofactor norms differ");
        assert_ne!(w.first.2, w.second.2);

        let r = tree_count_via_q(&square_psi4()).unwrap();
        assert!(r.applicable && r.holds());
        assert_eq!(r.count, Some(BigInt::from(4)));

        let r = tree_count_via_q(&square_non_psi4()).unwrap();
        assert!(!r.applicable && r.witness.is_some());

        let edge = parse_graph("n 2\ne 1 2 --").unwrap();
        for r in [
            tree_count_via_l(&edge).unwrap(),
            tree_count_via_q(&edge).unwrap(),
        ] {
            assert!(r.applicable);
            assert_eq!(r.count, Some(BigInt::from(1)));
        }
        assert!(!tree_count_via_q(&diamond_sp()).unwrap().applicable);
    }

    #[test]
    fn principal_minors_nonnegative() {
        let g = diamond_non_sp();
        for k in 1..=4 {
            for a in k_subsets(4, k) {
                let v1: BTreeSet<Vertex> = a.iter().map(|x| x + 1).collect();
                for inc in [IncidenceKind::S, IncidenceKind::T] {
                    let m = inc.laplacian(&g);
                    let d = det(&m
                        .submatrix(
                            &vertex_set(v1.iter().copied()),
                            &vertex_set(v1.iter().copied()),
                        )
                        .unwrap())
                    .unwrap();
                    assert!(d.is_rational() && d.a >= BigInt::from(0));
                }
            }
        }
    }
}
