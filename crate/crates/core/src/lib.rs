//! Exact Hermitian Laplacians of mixed graphs over the Eisenstein integers.
//!
//! A mixed graph has undirected edges and arcs. Its second-kind Hermitian
//! adjacency matrix `N` puts `1` on undirected edges and `ω = (1 + √3 i)/2`
//! from tail to head (`ω̄` back). The crate builds `L = D − N`, `Q = D + N`
//! and their incidence factors `S`, `T` (`S S* = L`, `T T* = Q`) with exact
//! arithmetic in `Z[ω]`, and evaluates their minors both by elimination and by
//! the cycle/tree combinatorics of the graph.

pub mod combinatorics;
pub mod eisenstein;
pub mod graph;
pub mod linalg;
pub mod matrix;
pub mod minors;
pub mod structure;
pub mod verify;

pub use eisenstein::{DivisionError, EisensteinInt};
pub use graph::{
    classify_component, components, parse_graph, ComponentKind, Edge, EdgeId, GraphError,
    MixedGraph, MixedWalk, Orientation, Substructure, Vertex, WalkStep,
};
pub use linalg::{cofactor, det, is_hermitian, rank};
pub use matrix::{
    build_d, build_l, build_n, build_q, build_s, build_t, ExactMatrix, IncidenceKind, Label,
    MatrixError,
};
pub use minors::{
    cauchy_binet_expand, enumerate_generalized_matchings, offdiag_minor_l, offdiag_minor_q,
    principal_minor_l, principal_minor_q, spanning_trees_kirchhoff, tree_contribution_l,
    tree_contribution_q, tree_count_via_l, tree_count_via_q, GeneralizedMatching, MinorError,
    MinorReport, TreeCountReport,
};
pub use structure::{
    classify_cycle, classify_substructure, null_vector_from_quasi, null_vector_from_sp,
    quasi_null_labeling, sp_labeling, CycleClassReport, Eligibility, LabelingOutcome, PhiClass,
    PsiClass, SPLabeling, StructureError, SubstructureClass,
};
pub use verify::{
    enumerate_orientations, generate_psi4_graph, generate_sp_graph, run_sweep, CheckId, CheckTally,
    GraphSource, OrientationMode, SweepReport, SweepSpec, VerifyError,
};
