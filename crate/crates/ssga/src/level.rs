//! Finite-level Koopman matrices, the filtration, creation operators, and
//! exact verification of the graph-algebra and covariance relations.
//!
//! Everything here is expressed in the orthonormal basis of normalized
//! cylinder indicators `χ_{Z(α)} / √ν(Z(α))`, indexed by the canonical
//! prefix-major order of `E^n`. In that basis the level representation of a
//! word is a 0/1 partial permutation matrix, the creation operator of an
//! edge sends the basis vector of `α` to that of `eα`, and the level
//! embedding is a 0/1 prefix-extension matrix up to a global `1/√p` that
//! cancels from every identity checked here. All checks are exact integer
//! arithmetic: a failure is a bug, not a rounding artifact.

use crate::action::Action;
use crate::cstar::LinComb;
use crate::error::Result;
use crate::graph::{EdgeId, Graph, LevelBasis, VertexId};
use crate::scalar::Scalar;
use crate::word::Word;
use std::collections::BTreeMap;
use std::fmt;

/// A sparse matrix between level spaces, rows in `E^m`, columns in `E^n`,
/// entries complex-rational. Zero entries are never stored, so structural
/// equality is semantic equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelMatrix {
    pub row_level: usize,
    pub col_level: usize,
    pub nrows: usize,
    pub ncols: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl LevelMatrix {
    pub fn zero(row_level: usize, nrows: usize, col_level: usize, ncols: usize) -> Self {
        LevelMatrix {
            row_level,
            col_level,
            nrows,
            ncols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(level: usize, n: usize) -> Self {
        let mut m = Self::zero(level, n, level, n);
        for i in 0..n {
            m.entries.insert((i, i), Scalar::one());
        }
        m
    }

    pub fn set(&mut self, row: usize, col: usize, value: Scalar) {
        assert!(row < self.nrows && col < self.ncols, "entry out of range");
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
    }

    pub fn add_to(&mut self, row: usize, col: usize, value: Scalar) {
        let current = self.get(row, col);
        self.set(row, col, current + value);
    }

    pub fn get(&self, row: usize, col: usize) -> Scalar {
        self.entries
            .get(&(row, col))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of diagonal entries.
    pub fn diagonal_sum(&self) -> Scalar {
        let mut total = Scalar::zero();
        for (&(r, c), v) in &self.entries {
            if r == c {
                total += v.clone();
            }
        }
        total
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> LevelMatrix {
        let mut out = LevelMatrix::zero(self.col_level, self.ncols, self.row_level, self.nrows);
        for (&(r, c), v) in &self.entries {
            out.entries.insert((c, r), v.conj());
        }
        out
    }

    pub fn scale(&self, factor: &Scalar) -> LevelMatrix {
        let mut out = LevelMatrix::zero(self.row_level, self.nrows, self.col_level, self.ncols);
        if factor.is_zero() {
            return out;
        }
        for (&(r, c), v) in &self.entries {
            out.entries.insert((r, c), factor * v);
        }
        out
    }

    pub fn add(&self, other: &LevelMatrix) -> LevelMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut out = self.clone();
        for (&(r, c), v) in &other.entries {
            out.add_to(r, c, v.clone());
        }
        out
    }

    /// Sparse product; requires the inner dimensions to agree.
    pub fn mul(&self, other: &LevelMatrix) -> LevelMatrix {
        assert_eq!(
            self.ncols, other.nrows,
            "inner dimensions must agree ({} vs {})",
            self.ncols, other.nrows
        );
        let mut out = LevelMatrix::zero(self.row_level, self.nrows, other.col_level, other.ncols);
        for (&(r, k), a) in &self.entries {
            // all entries of `other` in row k
            for (&(_, c), b) in other.entries.range((k, 0)..(k + 1, 0)) {
                out.add_to(r, c, a * b);
            }
        }
        out
    }

    /// True when every row and column carries at most one entry, each 1.
    pub fn is_partial_permutation(&self) -> bool {
        let mut rows = std::collections::HashSet::new();
        let mut cols = std::collections::HashSet::new();
        for (&(r, c), v) in &self.entries {
            if *v != Scalar::one() || !rows.insert(r) || !cols.insert(c) {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for LevelMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.nrows {
            for c in 0..self.ncols {
                if c > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Dimensions of the level filtration: the level space has dimension
/// `|E^0| p^n`, and the new orthogonal complement at level `n ≥ 1` has
/// dimension `q_n = |E^0| p^{n-1}(p-1)`, with `q_0 = |E^0|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiltrationDims {
    pub level: usize,
    pub dim: u128,
    pub complement_dim: u128,
}

pub fn filtration_dims(graph: &Graph, n: usize) -> Result<FiltrationDims> {
    let p = graph.constant_degree()? as u128;
    let v = graph.vertex_count() as u128;
    let dim = v * p.pow(n as u32);
    let complement_dim = if n == 0 {
        v
    } else {
        v * p.pow(n as u32 - 1) * (p - 1)
    };
    Ok(FiltrationDims {
        level: n,
        dim,
        complement_dim,
    })
}

/// The level-`n` matrix of a word: entry `(w·α, α) = 1` for every basis path
/// `α` with `r(α) = d(w)`.
pub fn level_matrix(action: &Action, w: &Word, n: usize) -> Result<LevelMatrix> {
    action.graph().constant_degree()?;
    let basis = action.graph().enumerate_level(n);
    koopman_on_basis(action, w, &basis)
}

pub(crate) fn koopman_on_basis(
    action: &Action,
    w: &Word,
    basis: &LevelBasis,
) -> Result<LevelMatrix> {
    let mut m = LevelMatrix::zero(basis.level, basis.len(), basis.level, basis.len());
    let domain = w.domain(action.decls());
    for (col, alpha) in basis.paths.iter().enumerate() {
        if alpha.range() != domain {
            continue;
        }
        let (image, _) = action.act_path(w, alpha)?;
        let row = basis.position(&image).expect("levels are permuted");
        m.set(row, col, Scalar::one());
    }
    Ok(m)
}

/// The level-`n` matrix of a linear combination, `Σ c_i π_n(w_i)`.
pub fn lincomb_level_matrix(action: &Action, x: &LinComb, n: usize) -> Result<LevelMatrix> {
    action.graph().constant_degree()?;
    let basis = action.graph().enumerate_level(n);
    lincomb_on_basis(action, x, &basis)
}

pub(crate) fn lincomb_on_basis(
    action: &Action,
    x: &LinComb,
    basis: &LevelBasis,
) -> Result<LevelMatrix> {
    let mut total = LevelMatrix::zero(basis.level, basis.len(), basis.level, basis.len());
    for (word, coeff) in x.terms() {
        let single = koopman_on_basis(action, word, basis)?;
        total = total.add(&single.scale(coeff));
    }
    Ok(total)
}

/// The 0/1 prefix-extension matrix from level `n` to level `n+1`: entry
/// `(αe, α) = 1` for every extension. The isometric level embedding is this
/// matrix divided by `√p`; the scalar cancels from the intertwining
/// relation, so the 0/1 form lets the check stay exact.
pub fn prefix_extension_matrix(graph: &Graph, n: usize) -> LevelMatrix {
    let from = graph.enumerate_level(n);
    let to = graph.enumerate_level(n + 1);
    let mut m = LevelMatrix::zero(n + 1, to.len(), n, from.len());
    for (col, alpha) in from.paths.iter().enumerate() {
        for &e in graph.range_fiber(alpha.source(graph)) {
            let row = to.position(&alpha.extend(e)).expect("extension enumerated");
            m.set(row, col, Scalar::one());
        }
    }
    m
}

/// Verifies `J_n · π_n(w) = π_{n+1}(w) · J_n` exactly.
pub fn intertwining_check(action: &Action, w: &Word, n: usize) -> Result<bool> {
    action.graph().constant_degree()?;
    let j = prefix_extension_matrix(action.graph(), n);
    let lower = level_matrix(action, w, n)?;
    let upper = level_matrix(action, w, n + 1)?;
    Ok(j.mul(&lower) == upper.mul(&j))
}

/// The creation operator of an edge as a matrix from level `n` to level
/// `n+1`: entry `(eα, α) = 1` for every `α` with `r(α) = s(e)`. In the
/// orthonormal basis the `√p` of the defining formula disappears.
pub fn creation_matrix(graph: &Graph, e: EdgeId, n: usize) -> Result<LevelMatrix> {
    graph.constant_degree()?;
    let from = graph.enumerate_level(n);
    let to = graph.enumerate_level(n + 1);
    Ok(creation_on_bases(graph, e, &from, &to))
}

pub(crate) fn creation_on_bases(
    graph: &Graph,
    e: EdgeId,
    from: &LevelBasis,
    to: &LevelBasis,
) -> LevelMatrix {
    let mut m = LevelMatrix::zero(to.level, to.len(), from.level, from.len());
    let source = graph.source(e);
    for (col, alpha) in from.paths.iter().enumerate() {
        if alpha.range() != source {
            continue;
        }
        let mut edges = vec![e];
        edges.extend_from_slice(alpha.edges());
        let prefixed = crate::graph::Path::from_parts(graph.range(e), edges);
        let row = to.position(&prefixed).expect("prefixed path enumerated");
        m.set(row, col, Scalar::one());
    }
    m
}

/// Diagonal projection onto the paths of `vE^n` (the fiber with range `v`).
pub fn vertex_projection(graph: &Graph, v: VertexId, n: usize) -> LevelMatrix {
    fiber_projection(v, &graph.enumerate_level(n))
}

fn fiber_projection(v: VertexId, basis: &LevelBasis) -> LevelMatrix {
    let mut m = LevelMatrix::zero(basis.level, basis.len(), basis.level, basis.len());
    for (i, alpha) in basis.paths.iter().enumerate() {
        if alpha.range() == v {
            m.set(i, i, Scalar::one());
        }
    }
    m
}

#[derive(Debug, Clone, Default)]
pub struct RelationsReport {
    pub max_level: usize,
    pub checks_run: usize,
    pub failures: Vec<String>,
}

impl RelationsReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the graph-algebra relations at every level `n <= n_max`, exactly:
/// `T_e* T_e` is the projection onto `s(e)E^n`, and for every vertex `u`,
/// `Σ_{r(e)=u} T_e T_e*` is the projection onto `uE^{n+1}`. These depend
/// only on the graph, not on the rule table.
pub fn graph_relations_check(graph: &Graph, n_max: usize) -> Result<RelationsReport> {
    graph.constant_degree()?;
    let mut report = RelationsReport {
        max_level: n_max,
        ..Default::default()
    };
    for n in 0..=n_max {
        let from = graph.enumerate_level(n);
        let to = graph.enumerate_level(n + 1);
        let creations: Vec<LevelMatrix> = graph
            .edges()
            .map(|e| creation_on_bases(graph, e, &from, &to))
            .collect();

        for e in graph.edges() {
            let t = &creations[e.0];
            let lhs = t.adjoint().mul(t);
            let rhs = fiber_projection(graph.source(e), &from);
            report.checks_run += 1;
            if lhs != rhs {
                report.failures.push(format!(
                    "T_{0}* T_{0} is not the source projection at level {n}",
                    graph.edge_name(e)
                ));
            }
        }

        for u in graph.vertices() {
            let mut sum = LevelMatrix::zero(n + 1, to.len(), n + 1, to.len());
            for &e in graph.range_fiber(u) {
                let t = &creations[e.0];
                sum = sum.add(&t.mul(&t.adjoint()));
            }
            let rhs = fiber_projection(u, &to);
            report.checks_run += 1;
            if sum != rhs {
                report.failures.push(format!(
                    "sum of T_e T_e* over {v}E^1 is not the projection onto {v}E^{m} at level {n}",
                    v = graph.vertex_name(u),
                    m = n + 1
                ));
            }
        }
    }
    Ok(report)
}

/// Checks the covariance relations for the given words, exactly, for all
/// `n <= n_max`:
///
/// - `π_{n+1}(w) T_e = T_{w·e} π_n(w|_e)` for every `e ∈ d(w)E^1`, and
///   `π_{n+1}(w) T_e = 0` for edges outside the domain fiber;
/// - `π_n(w) P_v = P_{t(w)} π_n(w)` when `v = d(w)`, and `0` otherwise.
pub fn covariance_check(action: &Action, n_max: usize, words: &[Word]) -> Result<RelationsReport> {
    let graph = action.graph();
    graph.constant_degree()?;
    let decls = action.decls();
    let mut report = RelationsReport {
        max_level: n_max,
        ..Default::default()
    };

    for n in 0..=n_max {
        let from = graph.enumerate_level(n);
        let to = graph.enumerate_level(n + 1);
        let creations: Vec<LevelMatrix> = graph
            .edges()
            .map(|e| creation_on_bases(graph, e, &from, &to))
            .collect();

        for w in words {
            let lower = koopman_on_basis(action, w, &from)?;
            let upper = koopman_on_basis(action, w, &to)?;
            let d = w.domain(decls);
            let t = w.target(decls);

            for e in graph.edges() {
                report.checks_run += 1;
                let lhs = upper.mul(&creations[e.0]);
                if graph.range(e) == d {
                    let (image, rest) = action.act_edge(w, e)?;
                    let rhs = creations[image.0].mul(&koopman_on_basis(action, &rest, &from)?);
                    if lhs != rhs {
                        report.failures.push(format!(
                            "π_{}({}) T_{} ≠ T_{} π_{}(restriction)",
                            n + 1,
                            w.display(decls),
                            graph.edge_name(e),
                            graph.edge_name(image),
                            n
                        ));
                    }
                } else if !lhs.is_zero() {
                    report.failures.push(format!(
                        "π_{}({}) T_{} should vanish off the domain fiber",
                        n + 1,
                        w.display(decls),
                        graph.edge_name(e)
                    ));
                }
            }

            for v in graph.vertices() {
                report.checks_run += 1;
                let pv = fiber_projection(v, &from);
                let lhs = lower.mul(&pv);
                if v == d {
                    let pt = fiber_projection(t, &from);
                    if lhs != pt.mul(&lower) {
                        report.failures.push(format!(
                            "π_{n}({}) P_{} ≠ P_{} π_{n}(...)",
                            w.display(decls),
                            graph.vertex_name(v),
                            graph.vertex_name(t)
                        ));
                    }
                } else if !lhs.is_zero() {
                    report.failures.push(format!(
                        "π_{n}({}) P_{} should vanish",
                        w.display(decls),
                        graph.vertex_name(v)
                    ));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::parse::{parse_lincomb, parse_spec, parse_word};

    fn forest() -> Action {
        parse_spec(include_str!("../fixtures/forest.ssg"))
            .unwrap()
            .into_action()
            .unwrap()
    }

    fn lamplighter() -> Action {
        parse_spec(include_str!("../fixtures/lamplighter.ssg"))
            .unwrap()
            .into_action()
            .unwrap()
    }

    fn bundle() -> Action {
        parse_spec(include_str!("../fixtures/bundle.ssg"))
            .unwrap()
            .into_action()
            .unwrap()
    }

    fn dense(m: &LevelMatrix) -> Vec<Vec<i64>> {
        (0..m.nrows)
            .map(|r| {
                (0..m.ncols)
                    .map(|c| {
                        let v = m.get(r, c);
                        assert!(v.is_real());
                        let (re, _) = v.to_f64_pair();
                        re as i64
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn generator_matrices_at_level_zero() {
        let action = forest();
        let a = parse_word(&action, "a").unwrap();
        let b = parse_word(&action, "b").unwrap();
        let c = parse_word(&action, "c").unwrap();
        assert_eq!(
            dense(&level_matrix(&action, &a, 0).unwrap()),
            vec![vec![0, 0, 0], vec![1, 0, 0], vec![0, 0, 0]]
        );
        assert_eq!(
            dense(&level_matrix(&action, &b, 0).unwrap()),
            vec![vec![0, 0, 0], vec![0, 0, 0], vec![0, 1, 0]]
        );
        assert_eq!(
            dense(&level_matrix(&action, &c, 0).unwrap()),
            vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 0, 0]]
        );
    }

    #[test]
    fn level_one_matrices_have_the_block_substitutions() {
        let action = forest();
        // basis order: e1 e3 | e2 e6 | e4 e5
        let a = parse_word(&action, "a").unwrap();
        let m = level_matrix(&action, &a, 1).unwrap();
        // identity block at block position (v, u)
        assert_eq!(
            dense(&m),
            vec![
                vec![0, 0, 0, 0, 0, 0],
                vec![0, 0, 0, 0, 0, 0],
                vec![1, 0, 0, 0, 0, 0],
                vec![0, 1, 0, 0, 0, 0],
                vec![0, 0, 0, 0, 0, 0],
                vec![0, 0, 0, 0, 0, 0],
            ]
        );

        let b = parse_word(&action, "b").unwrap();
        let m = level_matrix(&action, &b, 1).unwrap();
        // antidiagonal block at block position (w, v)
        assert_eq!(
            dense(&m),
            vec![
                vec![0, 0, 0, 0, 0, 0],
                vec![0, 0, 0, 0, 0, 0],
                vec![0, 0, 0, 0, 0, 0],
                vec![0, 0, 0, 0, 0, 0],
                vec![0, 0, 0, 1, 0, 0],
                vec![0, 0, 1, 0, 0, 0],
            ]
        );

        let c = parse_word(&action, "c").unwrap();
        let m = level_matrix(&action, &c, 1).unwrap();
        // identity block at block position (v, w)
        assert_eq!(
            dense(&m),
            vec![
                vec![0, 0, 0, 0, 0, 0],
                vec![0, 0, 0, 0, 0, 0],
                vec![0, 0, 0, 0, 1, 0],
                vec![0, 0, 0, 0, 0, 1],
                vec![0, 0, 0, 0, 0, 0],
                vec![0, 0, 0, 0, 0, 0],
            ]
        );
    }

    #[test]
    fn matrices_multiply_and_transpose_like_the_words() {
        let action = forest();
        let decls = action.decls();
        let b = parse_word(&action, "b").unwrap();
        let a = parse_word(&action, "a").unwrap();
        let ba = b.compose(decls, &a).unwrap();
        for n in 0..=4 {
            let mb = level_matrix(&action, &b, n).unwrap();
            let ma = level_matrix(&action, &a, n).unwrap();
            let mba = level_matrix(&action, &ba, n).unwrap();
            assert_eq!(mb.mul(&ma), mba);
            assert_eq!(
                level_matrix(&action, &a.inverse(), n).unwrap(),
                ma.adjoint()
            );
            // partial isometry: M M* M = M, and M* M is the projection
            // onto the domain fiber
            assert_eq!(ma.mul(&ma.adjoint()).mul(&ma), ma);
            assert!(ma.is_partial_permutation());
            assert_eq!(
                ma.adjoint().mul(&ma),
                vertex_projection(
                    action.graph(),
                    a.domain(action.decls()),
                    n
                )
            );
        }
    }

    #[test]
    fn block_recursion_structure() {
        // the level-n matrix refines each 1 of the level-(n-1) matrix into
        // the partial permutation of the restriction, and each 0 into zeros
        let action = forest();
        let w = parse_word(&action, "b a").unwrap();
        for n in 1..=4usize {
            let coarse = level_matrix(&action, &w, n - 1).unwrap();
            let fine = level_matrix(&action, &w, n).unwrap();
            let lower = action.graph().enumerate_level(n - 1);
            let p = action.graph().constant_degree().unwrap();
            for (r, c, _) in coarse.entries() {
                let alpha = &lower.paths[c];
                let rest = action.restrict_path(&w, alpha).unwrap();
                // block (r, c) of `fine` equals the fiber block of the restriction
                let dom_fiber = action.graph().range_fiber(alpha.source(action.graph()));
                let img = &lower.paths[r];
                let img_fiber = action.graph().range_fiber(img.source(action.graph()));
                for (bj, &e) in dom_fiber.iter().enumerate() {
                    let (img_e, _) = action.act_edge(&rest, e).unwrap();
                    let bi = img_fiber.iter().position(|&x| x == img_e).unwrap();
                    assert_eq!(fine.get(r * p + bi, c * p + bj), Scalar::one());
                }
            }
        }
    }

    #[test]
    fn lincomb_matrices() {
        let action = forest();
        let units = parse_lincomb(&action, "1*u + 1*v + 1*w").unwrap();
        for n in 0..=3 {
            let m = lincomb_level_matrix(&action, &units, n).unwrap();
            let size = action.graph().enumerate_level(n).len();
            assert_eq!(m, LevelMatrix::identity(n, size));
        }

        let sym = parse_lincomb(&action, "1*a + 1*a^-1").unwrap();
        let m = lincomb_level_matrix(&action, &sym, 0).unwrap();
        assert_eq!(
            dense(&m),
            vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 0]]
        );
        assert_eq!(m, m.adjoint());
    }

    #[test]
    fn unit_matrix_is_fiber_projection() {
        let action = forest();
        let u = parse_word(&action, "u").unwrap();
        for n in 0..=3 {
            let m = level_matrix(&action, &u, n).unwrap();
            assert_eq!(
                m,
                vertex_projection(action.graph(), action.graph().vertex_id("u").unwrap(), n)
            );
        }
    }

    #[test]
    fn filtration_dimensions() {
        let action = forest();
        let graph = action.graph();
        for n in 0..=6usize {
            let dims = filtration_dims(graph, n).unwrap();
            assert_eq!(dims.dim, 3 * (1 << n) as u128);
            assert_eq!(dims.dim as usize, graph.enumerate_level(n).len());
            if n == 0 {
                assert_eq!(dims.complement_dim, 3);
            } else {
                assert_eq!(dims.complement_dim, 3 * (1 << (n - 1)) as u128);
            }
        }
        // dim H_n = q_0 + Σ q_k
        let total: u128 = (0..=6)
            .map(|k| filtration_dims(graph, k).unwrap().complement_dim)
            .sum();
        assert_eq!(total, filtration_dims(graph, 6).unwrap().dim);

        assert!(filtration_dims(bundle().graph(), 1).is_err());
    }

    #[test]
    fn creation_matrix_examples() {
        let action = forest();
        let graph = action.graph();
        let e1 = graph.edge_id("e1").unwrap();
        let t = creation_matrix(graph, e1, 0).unwrap();
        // single 1 at (row e1, col u)
        assert_eq!(t.nnz(), 1);
        let basis1 = graph.enumerate_level(1);
        let row = basis1
            .position(&crate::graph::Path::new(graph, vec![e1]).unwrap())
            .unwrap();
        assert_eq!(t.get(row, 0), Scalar::one());

        let e2 = graph.edge_id("e2").unwrap();
        let t = creation_matrix(graph, e2, 1).unwrap();
        // s(e2) = u, uE^1 = {e1, e3}: entries at (e2e1, e1) and (e2e3, e3)
        assert_eq!(t.nnz(), 2);
        let basis2 = graph.enumerate_level(2);
        let e3 = graph.edge_id("e3").unwrap();
        let r1 = basis2
            .position(&crate::graph::Path::new(graph, vec![e2, e1]).unwrap())
            .unwrap();
        let r2 = basis2
            .position(&crate::graph::Path::new(graph, vec![e2, e3]).unwrap())
            .unwrap();
        let c1 = basis1
            .position(&crate::graph::Path::new(graph, vec![e1]).unwrap())
            .unwrap();
        let c2 = basis1
            .position(&crate::graph::Path::new(graph, vec![e3]).unwrap())
            .unwrap();
        assert_eq!(t.get(r1, c1), Scalar::one());
        assert_eq!(t.get(r2, c2), Scalar::one());
    }

    #[test]
    fn intertwining_holds_on_constant_degree_fixtures() {
        let forest = forest();
        for text in ["a", "b", "c", "c b", "b a"] {
            let w = parse_word(&forest, text).unwrap();
            for n in 0..=3 {
                assert!(intertwining_check(&forest, &w, n).unwrap());
            }
        }
        let lamp = lamplighter();
        for text in ["a", "b", "c"] {
            let w = parse_word(&lamp, text).unwrap();
            for n in 0..=3 {
                assert!(intertwining_check(&lamp, &w, n).unwrap());
            }
        }
        // non-constant degree is rejected up front
        let bundle = bundle();
        let a = parse_word(&bundle, "a").unwrap();
        assert!(matches!(
            intertwining_check(&bundle, &a, 0),
            Err(Error::NonConstantDegree { .. })
        ));
    }

    #[test]
    fn graph_relations_hold() {
        assert!(graph_relations_check(forest().graph(), 4).unwrap().passed());
        assert!(graph_relations_check(lamplighter().graph(), 4)
            .unwrap()
            .passed());
    }

    #[test]
    fn graph_relations_ignore_the_rule_table() {
        // negative control: corrupting the rules cannot break the graph
        // relations, which only see the graph
        let mut spec = parse_spec(include_str!("../fixtures/forest.ssg"))
            .unwrap()
            .into_spec()
            .unwrap();
        for rule in &mut spec.rules {
            rule.image = rule.edge; // nonsense as an action
        }
        assert!(graph_relations_check(&spec.graph, 4).unwrap().passed());
        // while the action itself no longer validates
        assert!(!spec.validate().is_valid());
    }

    #[test]
    fn covariance_holds_for_generators_and_products() {
        let action = forest();
        let mut words: Vec<Word> = action.decls().ids().map(Word::generator).collect();
        words.push(parse_word(&action, "b a").unwrap());
        words.push(parse_word(&action, "c b").unwrap());
        let report = covariance_check(&action, 3, &words).unwrap();
        assert!(report.passed(), "failures: {:?}", report.failures);

        let lamp = lamplighter();
        let words: Vec<Word> = lamp.decls().ids().map(Word::generator).collect();
        assert!(covariance_check(&lamp, 3, &words).unwrap().passed());
    }

    #[test]
    fn diagonal_sum_equals_fixed_count() {
        let action = forest();
        for text in ["u", "c b", "b c", "a"] {
            let w = parse_word(&action, text).unwrap();
            for n in 0..=4 {
                let m = level_matrix(&action, &w, n).unwrap();
                let fixed = crate::orbit::fixed_paths_count(&action, &w, n, 10_000).unwrap();
                assert_eq!(
                    m.diagonal_sum(),
                    Scalar::from_rational(crate::scalar::Rational::from_integer(fixed))
                );
            }
        }
    }
}
