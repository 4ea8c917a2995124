//! Dense labeled matrices over `Z[ω]` and the graph matrices `N, D, L, Q, S, T`.
//!
//! Entry conventions (with `ω = (1 + √3 i)/2`):
//!
//! ```text
//! N(i,j) = 1 if i—j,  ω if i→j,  ω̄ if j→i,  0 otherwise
//! L = D − N,  Q = D + N           (D = underlying degrees)
//! S column of u—v (u < v):  u ↦ 1,  v ↦ −1
//! S column of u→v:          u ↦ 1,  v ↦ −ω̄
//! T column of u—v:          u ↦ 1,  v ↦ 1
//! T column of u→v:          u ↦ ω,  v ↦ 1
//! ```
//!
//! With these choices `S·S* = L` and `T·T* = Q` hold entrywise.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;
use thiserror::Error;

use crate::eisenstein::EisensteinInt;
use crate::graph::{EdgeId, MixedGraph, Orientation, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("unknown label {0}")]
    UnknownLabel(Label),
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("vertex sets have sizes {0} and {1}")]
    SizeMismatch(usize, usize),
    #[error("internal arithmetic error: {0}")]
    Arithmetic(#[from] crate::eisenstein::DivisionError),
}

/// Row/column label: a vertex (1-based) or an edge id (0-based, rendered 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Vertex(Vertex),
    Edge(EdgeId),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Vertex(v) => write!(f, "v{v}"),
            Label::Edge(e) => write!(f, "e{}", e + 1),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    row_labels: Vec<Label>,
    col_labels: Vec<Label>,
    entries: Vec<EisensteinInt>,
}

impl ExactMatrix {
    pub fn zeros(row_labels: Vec<Label>, col_labels: Vec<Label>) -> Self {
        let len = row_labels.len() * col_labels.len();
        ExactMatrix {
            row_labels,
            col_labels,
            entries: vec![EisensteinInt::zero(); len],
        }
    }

    /// Builds from row-major data; labels default to `v1, v2, …` on both axes.
    pub fn from_rows(rows: Vec<Vec<EisensteinInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        ExactMatrix {
            row_labels: (1..=r).map(Label::Vertex).collect(),
            col_labels: (1..=c).map(Label::Vertex).collect(),
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(
            (1..=n).map(Label::Vertex).collect(),
            (1..=n).map(Label::Vertex).collect(),
        );
        for i in 0..n {
            m[(i, i)] = EisensteinInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn row_labels(&self) -> &[Label] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[Label] {
        &self.col_labels
    }

    pub fn row(&self, i: usize) -> &[EisensteinInt] {
        let c = self.cols();
        &self.entries[i * c..(i + 1) * c]
    }

    pub fn row_position(&self, label: Label) -> Result<usize, MatrixError> {
        self.row_labels
            .iter()
            .position(|&l| l == label)
            .ok_or(MatrixError::UnknownLabel(label))
    }

    pub fn col_position(&self, label: Label) -> Result<usize, MatrixError> {
        self.col_labels
            .iter()
            .position(|&l| l == label)
            .ok_or(MatrixError::UnknownLabel(label))
    }

    pub fn entry(&self, row: Label, col: Label) -> Result<&EisensteinInt, MatrixError> {
        Ok(&self[(self.row_position(row)?, self.col_position(col)?)])
    }

    /// Conjugate transpose `M*`.
    pub fn adjoint(&self) -> ExactMatrix {
        let mut out = ExactMatrix::zeros(self.col_labels.clone(), self.row_labels.clone());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &ExactMatrix) -> Result<ExactMatrix, MatrixError> {
        if self.cols() != rhs.rows() {
            return Err(MatrixError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        let mut out = ExactMatrix::zeros(self.row_labels.clone(), rhs.col_labels.clone());
        for i in 0..self.rows() {
            for k in 0..self.cols() {
                let x = &self[(i, k)];
                if x.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols() {
                    let y = &rhs[(k, j)];
                    if !y.is_zero() {
                        out[(i, j)] += &(x * y);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[EisensteinInt]) -> Result<Vec<EisensteinInt>, MatrixError> {
        if v.len() != self.cols() {
            return Err(MatrixError::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows(),
                self.cols(),
                v.len()
            )));
        }
        Ok((0..self.rows())
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn zip_with(
        &self,
        rhs: &ExactMatrix,
        f: impl Fn(&EisensteinInt, &EisensteinInt) -> EisensteinInt,
    ) -> ExactMatrix {
        assert_eq!((self.rows(), self.cols()), (rhs.rows(), rhs.cols()));
        ExactMatrix {
            row_labels: self.row_labels.clone(),
            col_labels: self.col_labels.clone(),
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    /// Selection by position, keeping the given order.
    pub fn select_positions(&self, rows: &[usize], cols: &[usize]) -> ExactMatrix {
        let mut out = ExactMatrix::zeros(
            rows.iter().map(|&i| self.row_labels[i]).collect(),
            cols.iter().map(|&j| self.col_labels[j]).collect(),
        );
        for (oi, &i) in rows.iter().enumerate() {
            for (oj, &j) in cols.iter().enumerate() {
                out[(oi, oj)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// `A[α, β]`: rows and columns with the given labels, in ascending label order.
    pub fn submatrix(
        &self,
        rows: &BTreeSet<Label>,
        cols: &BTreeSet<Label>,
    ) -> Result<ExactMatrix, MatrixError> {
        let mut rp = rows
            .iter()
            .map(|&l| self.row_position(l))
            .collect::<Result<Vec<_>, _>>()?;
        let mut cp = cols
            .iter()
            .map(|&l| self.col_position(l))
            .collect::<Result<Vec<_>, _>>()?;
        rp.sort_by_key(|&i| self.row_labels[i]);
        cp.sort_by_key(|&j| self.col_labels[j]);
        Ok(self.select_positions(&rp, &cp))
    }

    /// `A(α, β)`: deletes the labeled rows and columns; the rest stay in
    /// ascending label order.
    pub fn delete(
        &self,
        rows: &BTreeSet<Label>,
        cols: &BTreeSet<Label>,
    ) -> Result<ExactMatrix, MatrixError> {
        for &l in rows {
            self.row_position(l)?;
        }
        for &l in cols {
            self.col_position(l)?;
        }
        let keep_rows = self
            .row_labels
            .iter()
            .copied()
            .filter(|l| !rows.contains(l))
            .collect();
        let keep_cols = self
            .col_labels
            .iter()
            .copied()
            .filter(|l| !cols.contains(l))
            .collect();
        self.submatrix(&keep_rows, &keep_cols)
    }

    /// Pretty text with `a+bω` cells, optionally followed by complex renderings.
    pub fn render_text(&self, with_complex: bool) -> String {
        let cell = |x: &EisensteinInt| {
            if with_complex {
                format!("{} ({})", x, x.complex_string())
            } else {
                x.to_string()
            }
        };
        let cells: Vec<Vec<String>> = (0..self.rows())
            .map(|i| self.row(i).iter().map(cell).collect())
            .collect();
        let mut widths: Vec<usize> = self
            .col_labels
            .iter()
            .map(|l| l.to_string().chars().count())
            .collect();
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let label_w = self
            .row_labels
            .iter()
            .map(|l| l.to_string().len())
            .max()
            .unwrap_or(0);
        let mut s = format!("{:label_w$}", "");
        for (l, w) in self.col_labels.iter().zip(&widths) {
            let _ = write!(s, "  {:>w$}", l.to_string(), w = w);
        }
        s.push('\n');
        for (l, row) in self.row_labels.iter().zip(&cells) {
            let _ = write!(s, "{:label_w$}", l.to_string());
            for (c, w) in row.iter().zip(&widths) {
                let pad = w - c.chars().count();
                let _ = write!(s, "  {}{}", " ".repeat(pad), c);
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("matrix serializes")
    }
}

impl std::ops::Index<(usize, usize)> for ExactMatrix {
    type Output = EisensteinInt;
    fn index(&self, (i, j): (usize, usize)) -> &EisensteinInt {
        &self.entries[i * self.cols() + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut EisensteinInt {
        let c = self.cols();
        &mut self.entries[i * c + j]
    }
}

impl std::ops::Add for &ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl std::ops::Sub for &ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_text(false))
    }
}

/// `{rows: [labels], cols: [labels], entries: [[[a, b], …], …]}`, one inner list per row.
impl Serialize for ExactMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ExactMatrix", 3)?;
        st.serialize_field("rows", &self.row_labels)?;
        st.serialize_field("cols", &self.col_labels)?;
        let nested: Vec<&[EisensteinInt]> = (0..self.rows()).map(|i| self.row(i)).collect();
        st.serialize_field("entries", &nested)?;
        st.end()
    }
}

pub fn vertex_labels(g: &MixedGraph) -> Vec<Label> {
    g.vertices().map(Label::Vertex).collect()
}

pub fn edge_labels(g: &MixedGraph) -> Vec<Label> {
    (0..g.edge_count()).map(Label::Edge).collect()
}

pub fn vertex_set(vs: impl IntoIterator<Item = Vertex>) -> BTreeSet<Label> {
    vs.into_iter().map(Label::Vertex).collect()
}

pub fn edge_set(es: impl IntoIterator<Item = EdgeId>) -> BTreeSet<Label> {
    es.into_iter().map(Label::Edge).collect()
}

fn square(g: &MixedGraph) -> ExactMatrix {
    ExactMatrix::zeros(vertex_labels(g), vertex_labels(g))
}

/// Hermitian adjacency matrix of the second kind.
pub fn build_n(g: &MixedGraph) -> ExactMatrix {
    let mut m = square(g);
    for e in g.edges() {
        let (i, j) = (e.u - 1, e.v - 1);
        match e.orientation {
            Orientation::Undirected => {
                m[(i, j)] = EisensteinInt::one();
                m[(j, i)] = EisensteinInt::one();
            }
            Orientation::Directed => {
                m[(i, j)] = EisensteinInt::omega();
                m[(j, i)] = EisensteinInt::omega_bar();
            }
        }
    }
    m
}

/// Diagonal matrix of underlying-graph degrees.
pub fn build_d(g: &MixedGraph) -> ExactMatrix {
    let mut m = square(g);
    for v in g.vertices() {
        m[(v - 1, v - 1)] = EisensteinInt::from_int(g.degree(v) as i64);
    }
    m
}

/// Hermitian Laplacian of the second kind, `D − N`.
pub fn build_l(g: &MixedGraph) -> ExactMatrix {
    &build_d(g) - &build_n(g)
}

/// Hermitian quasi-Laplacian of the second kind, `D + N`.
pub fn build_q(g: &MixedGraph) -> ExactMatrix {
    &build_d(g) + &build_n(g)
}

/// The two nonzero entries `(tail entry, head entry)` of an `S` column.
pub fn s_column(orientation: Orientation) -> (EisensteinInt, EisensteinInt) {
    match orientation {
        Orientation::Undirected => (EisensteinInt::one(), EisensteinInt::from_int(-1)),
        Orientation::Directed => (EisensteinInt::one(), -EisensteinInt::omega_bar()),
    }
}

/// The two nonzero entries `(tail entry, head entry)` of a `T` column.
pub fn t_column(orientation: Orientation) -> (EisensteinInt, EisensteinInt) {
    match orientation {
        Orientation::Undirected => (EisensteinInt::one(), EisensteinInt::one()),
        Orientation::Directed => (EisensteinInt::omega(), EisensteinInt::one()),
    }
}

/// Which incidence matrix: `S` (factor of `L`) or `T` (factor of `Q`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IncidenceKind {
    S,
    T,
}

impl IncidenceKind {
    pub fn column(self, orientation: Orientation) -> (EisensteinInt, EisensteinInt) {
        match self {
            IncidenceKind::S => s_column(orientation),
            IncidenceKind::T => t_column(orientation),
        }
    }

    /// Entry of the incidence matrix at `(vertex, edge)`.
    pub fn entry(self, g: &MixedGraph, v: Vertex, id: EdgeId) -> EisensteinInt {
        let e = g.edge(id);
        let (tail, head) = self.column(e.orientation);
        if v == e.tail() {
            tail
        } else if v == e.head() {
            head
        } else {
            EisensteinInt::zero()
        }
    }

    pub fn build(self, g: &MixedGraph) -> ExactMatrix {
        let mut m = ExactMatrix::zeros(vertex_labels(g), edge_labels(g));
        for (id, e) in g.edges().iter().enumerate() {
            let (tail, head) = self.column(e.orientation);
            m[(e.tail() - 1, id)] = tail;
            m[(e.head() - 1, id)] = head;
        }
        m
    }

    /// The product matrix this incidence matrix factors: `L` for `S`, `Q` for `T`.
    pub fn laplacian(self, g: &MixedGraph) -> ExactMatrix {
        match self {
            IncidenceKind::S => build_l(g),
            IncidenceKind::T => build_q(g),
        }
    }
}

/// Incidence matrix of the second kind (`n × m`).
pub fn build_s(g: &MixedGraph) -> ExactMatrix {
    IncidenceKind::S.build(g)
}

/// Quasi-incidence matrix of the second kind (`n × m`).
pub fn build_t(g: &MixedGraph) -> ExactMatrix {
    IncidenceKind::T.build(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    fn e(a: i64, b: i64) -> EisensteinInt {
        EisensteinInt::new(a, b)
    }

    #[test]
    fn n_of_single_edges() {
        let g = parse_graph("n 2\ne 1 2 --").unwrap();
        let n = build_n(&g);
        assert_eq!(n[(0, 1)], e(1, 0));
        assert_eq!(n[(1, 0)], e(1, 0));
        let g = parse_graph("n 2\ne 1 2 ->").unwrap();
        let n = build_n(&g);
        assert_eq!(n[(0, 1)], e(0, 1));
        assert_eq!(n[(1, 0)], e(1, -1));
    }

    #[test]
    fn edgeless_matrices_are_zero() {
        let g = MixedGraph::new(3);
        for m in [build_n(&g), build_d(&g), build_l(&g), build_q(&g)] {
            assert_eq!(m, ExactMatrix::zeros(vertex_labels(&g), vertex_labels(&g)));
        }
        assert_eq!(build_s(&g).cols(), 0);
    }

    #[test]
    fn s_of_single_directed_edge() {
        let g = parse_graph("n 2\ne 1 2 ->").unwrap();
        let s = build_s(&g);
        assert_eq!(s[(0, 0)], e(1, 0));
        assert_eq!(s[(1, 0)], e(-1, 1));
        let ss = s.mul(&s.adjoint()).unwrap();
        // (1)·conj(−ω̄) = −ω = −n₁₂
        assert_eq!(ss[(0, 1)], e(0, -1));
        assert_eq!(ss, build_l(&g));
    }

    #[test]
    fn s_of_single_undirected_edge() {
        let g = parse_graph("n 2\ne 1 2 --").unwrap();
        let s = build_s(&g);
        assert_eq!((s[(0, 0)].clone(), s[(1, 0)].clone()), (e(1, 0), e(-1, 0)));
        let expected =
            ExactMatrix::from_rows(vec![vec![e(1, 0), e(-1, 0)], vec![e(-1, 0), e(1, 0)]]);
        assert_eq!(s.mul(&s.adjoint()).unwrap(), expected);
    }

    #[test]
    fn s_factors_l_on_directed_path() {
        let g = parse_graph("n 3\ne 1 2 ->\ne 2 3 ->").unwrap();
        let s = build_s(&g);
        assert_eq!(s.mul(&s.adjoint()).unwrap(), build_l(&g));
    }

    #[test]
    fn t_of_single_edges() {
        let g = parse_graph("n 2\ne 1 2 ->").unwrap();
        let t = build_t(&g);
        assert_eq!((t[(0, 0)].clone(), t[(1, 0)].clone()), (e(0, 1), e(1, 0)));
        let tt = t.mul(&t.adjoint()).unwrap();
        assert_eq!(tt[(0, 1)], e(0, 1));
        assert_eq!(tt, build_q(&g));

        let g = parse_graph("n 2\ne 1 2 --").unwrap();
        let t = build_t(&g);
        let ones = ExactMatrix::from_rows(vec![vec![e(1, 0), e(1, 0)], vec![e(1, 0), e(1, 0)]]);
        assert_eq!(t.mul(&t.adjoint()).unwrap(), ones);
    }

    #[test]
    fn column_products_give_minus_n() {
        let g = parse_graph("n 4\ne 1 2 ->\ne 1 3 ->\ne 1 4 --\ne 2 3 --\ne 4 3 ->").unwrap();
        let s = build_s(&g);
        let t = build_t(&g);
        let n = build_n(&g);
        for (id, ed) in g.edges().iter().enumerate() {
            let (u, v) = (ed.u - 1, ed.v - 1);
            assert_eq!(&s[(u, id)] * &s[(v, id)].conj(), -n[(u, v)].clone());
            assert_eq!(&t[(u, id)] * &t[(v, id)].conj(), n[(u, v)].clone());
        }
    }

    #[test]
    fn submatrix_and_delete() {
        let g = parse_graph("n 4\ne 1 2 ->\ne 1 3 ->\ne 1 4 --\ne 2 3 --\ne 4 3 ->").unwrap();
        let l = build_l(&g);
        let all = vertex_set(1..=4);
        assert_eq!(l.submatrix(&all, &all).unwrap(), l);
        let empty = l.submatrix(&BTreeSet::new(), &BTreeSet::new()).unwrap();
        assert_eq!((empty.rows(), empty.cols()), (0, 0));
        let minor = l.delete(&vertex_set([1]), &vertex_set([1])).unwrap();
        assert_eq!(
            minor.row_labels(),
            &[Label::Vertex(2), Label::Vertex(3), Label::Vertex(4)]
        );
        assert_eq!(
            minor,
            l.submatrix(&vertex_set([2, 3, 4]), &vertex_set([2, 3, 4]))
                .unwrap()
        );
        assert_eq!(
            l.submatrix(&vertex_set([9]), &all),
            Err(MatrixError::UnknownLabel(Label::Vertex(9)))
        );
        assert!(l.delete(&vertex_set([5]), &BTreeSet::new()).is_err());
    }

    #[test]
    fn json_and_text_rendering() {
        let g = parse_graph("n 2\ne 1 2 ->").unwrap();
        let s = build_s(&g);
        let j = s.to_json();
        assert_eq!(j["rows"], serde_json::json!(["v1", "v2"]));
        assert_eq!(j["cols"], serde_json::json!(["e1"]));
        assert_eq!(j["entries"], serde_json::json!([[[1, 0]], [[-1, 1]]]));
        let text = s.render_text(false);
        assert!(text.contains("-1+1ω"), "{text}");
        assert!(s.render_text(true).contains("-0.500000+0.866025i"));
    }
}
