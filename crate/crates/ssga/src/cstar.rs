//! The self-similar trace, operator-norm lower bounds, and the wreath and
//! matrix recursions.
//!
//! The trace of a word is the limit of its normalized fixed-path counts,
//! `lim f_n(w) / (|E^0| p^n)`. The counts obey the transfer recursion over
//! the finite set of restriction states reachable along fixed edges, and
//! the normalized count vector is non-increasing level by level (a fixed
//! `αe` forces a fixed prefix `α`). When that vector stops moving it is a
//! fixed point of the recursion and the limit has been reached exactly, as
//! a rational; otherwise the trace is reported to tolerance, and hitting
//! the level cap is reported as such rather than glossed over.

use crate::action::Action;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, Path};
use crate::level::lincomb_on_basis;
use crate::orbit::TransferSystem;
use crate::scalar::{Rational, Scalar};
use crate::word::{GeneratorDecls, Word};
use num::bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt;

/// A finite complex-linear combination of words, the computational stand-in
/// for an element of the groupoid's convolution algebra. Zero coefficients
/// are pruned on the spot.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinComb {
    terms: BTreeMap<Word, Scalar>,
}

impl LinComb {
    pub fn zero() -> LinComb {
        LinComb::default()
    }

    pub fn from_word(word: Word) -> LinComb {
        let mut terms = BTreeMap::new();
        terms.insert(word, Scalar::one());
        LinComb { terms }
    }

    pub fn add_term(&mut self, word: Word, coeff: Scalar) {
        let entry = self.terms.entry(word.clone()).or_insert_with(Scalar::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&word);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, word: &Word) -> Scalar {
        self.terms.get(word).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &LinComb) -> LinComb {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, factor: &Scalar) -> LinComb {
        let mut out = LinComb::zero();
        if factor.is_zero() {
            return out;
        }
        for (w, c) in &self.terms {
            out.add_term(w.clone(), factor * c);
        }
        out
    }

    /// The adjoint: coefficients conjugated, words inverted.
    pub fn adjoint(&self) -> LinComb {
        let mut out = LinComb::zero();
        for (w, c) in &self.terms {
            out.add_term(w.inverse(), c.conj());
        }
        out
    }

    /// Convolution product: words compose where composable, all other pairs
    /// contribute nothing.
    pub fn mul(&self, decls: &GeneratorDecls, other: &LinComb) -> LinComb {
        let mut out = LinComb::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                if let Ok(product) = w1.compose(decls, w2) {
                    out.add_term(product, c1 * c2);
                }
            }
        }
        out
    }

    pub fn display(&self, action: &Action) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(w, c)| format!("{}*{}", c, action.display_word(w)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convergence {
    /// The normalized state-count vector reached a fixed point of the
    /// transfer recursion; the reported value is the limit, exactly.
    Exact,
    /// Successive levels changed by less than the tolerance for the whole
    /// stability window.
    ToleranceMet,
    /// The level cap was reached first; the value is the last level only.
    CapHit,
}

impl fmt::Display for Convergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convergence::Exact => write!(f, "exact"),
            Convergence::ToleranceMet => write!(f, "tolerance-met"),
            Convergence::CapHit => write!(f, "cap-hit"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TraceParams {
    pub tolerance: f64,
    pub max_level: usize,
    pub stability_window: usize,
    pub state_cap: usize,
}

impl Default for TraceParams {
    fn default() -> Self {
        TraceParams {
            tolerance: 1e-10,
            max_level: 12,
            stability_window: 3,
            state_cap: 100_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TraceResult {
    /// The trace value: the exact limit under [`Convergence::Exact`],
    /// otherwise the last computed level.
    pub value: Scalar,
    /// The per-level sequence `t_n = Tr[x]_n / (|E^0| p^n)`, starting at
    /// `t_0`; each entry is an exact rational.
    pub levels: Vec<Scalar>,
    pub convergence: Convergence,
    pub levels_used: usize,
}

impl TraceResult {
    pub fn is_exact(&self) -> bool {
        matches!(self.convergence, Convergence::Exact)
    }

    pub fn value_f64(&self) -> (f64, f64) {
        self.value.to_f64_pair()
    }
}

/// Computes the self-similar trace of a linear combination.
///
/// Off-diagonal words (`d ≠ t`) have no diagonal entries at any level and
/// contribute exactly zero. For the rest, the transfer recursion runs over
/// the joint restriction-state closure; the per-state counts divided by
/// `p^n` decrease monotonically, so reaching a fixed point means the limit
/// has been attained exactly.
pub fn trace(action: &Action, x: &LinComb, params: &TraceParams) -> Result<TraceResult> {
    let p = action.graph().constant_degree()?;
    let decls = action.decls();
    let vertex_count = Rational::from_integer(BigInt::from(action.graph().vertex_count()));

    let diagonal: Vec<(&Word, &Scalar)> = x
        .terms()
        .filter(|(w, _)| w.domain(decls) == w.target(decls))
        .collect();

    if diagonal.is_empty() {
        return Ok(TraceResult {
            value: Scalar::zero(),
            levels: vec![Scalar::zero()],
            convergence: Convergence::Exact,
            levels_used: 0,
        });
    }

    let roots: Vec<Word> = diagonal.iter().map(|(w, _)| (*w).clone()).collect();
    let system = TransferSystem::build(action, &roots, params.state_cap)?;
    let root_ids: Vec<usize> = roots
        .iter()
        .map(|w| system.state_id(w).expect("roots interned"))
        .collect();

    let level_value = |counts: &[BigInt], level: usize| -> Scalar {
        let denom = Rational::from_integer(BigInt::from(p).pow(level as u32)) * &vertex_count;
        let mut total = Scalar::zero();
        for ((_, coeff), &id) in diagonal.iter().zip(&root_ids) {
            let g = Rational::from_integer(counts[id].clone()) / denom.clone();
            total += *coeff * &Scalar::from_rational(g);
        }
        total
    };

    let mut counts = system.initial_counts();
    let mut levels = vec![level_value(&counts, 0)];
    let mut stable_streak = 0usize;

    for n in 1..=params.max_level {
        let next = system.step(&counts);
        let t_n = level_value(&next, n);
        levels.push(t_n.clone());

        // fixed point of the normalized counts: f_n = p · f_{n-1} everywhere
        let fixed_point = next
            .iter()
            .zip(&counts)
            .all(|(f_n, f_prev)| *f_n == f_prev * BigInt::from(p));
        if fixed_point {
            return Ok(TraceResult {
                value: t_n,
                levels,
                convergence: Convergence::Exact,
                levels_used: n,
            });
        }

        let delta = (t_n.clone() - levels[levels.len() - 2].clone()).modulus();
        if delta < params.tolerance {
            stable_streak += 1;
            if stable_streak >= params.stability_window {
                return Ok(TraceResult {
                    value: t_n,
                    levels,
                    convergence: Convergence::ToleranceMet,
                    levels_used: n,
                });
            }
        } else {
            stable_streak = 0;
        }
        counts = next;
    }

    Ok(TraceResult {
        value: levels.last().cloned().unwrap(),
        levels,
        convergence: Convergence::CapHit,
        levels_used: params.max_level,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct TracePropertyParams {
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub trace: TraceParams,
}

impl Default for TracePropertyParams {
    fn default() -> Self {
        TracePropertyParams {
            samples: 100,
            seed: 1,
            tolerance: 1e-9,
            trace: TraceParams::default(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct TracePropertyReport {
    pub samples: usize,
    pub checks_run: usize,
    pub failures: Vec<String>,
}

impl TracePropertyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Samples random linear combinations and checks the trace laws:
/// `τ(xy) = τ(yx)`, `τ(x*x) ≥ 0`, and `τ(x*) = conj(τ(x))`.
pub fn trace_properties(
    action: &Action,
    params: &TracePropertyParams,
) -> Result<TracePropertyReport> {
    let decls = action.decls();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut report = TracePropertyReport {
        samples: params.samples,
        ..Default::default()
    };

    for sample in 0..params.samples {
        let x = random_lincomb(action, &mut rng, 3);
        let y = random_lincomb(action, &mut rng, 3);

        let xy = trace(action, &x.mul(decls, &y), &params.trace)?;
        let yx = trace(action, &y.mul(decls, &x), &params.trace)?;
        report.checks_run += 1;
        let defect = (xy.value.clone() - yx.value.clone()).modulus();
        if defect >= params.tolerance {
            report.failures.push(format!(
                "sample {sample}: |τ(xy) - τ(yx)| = {defect:e} for x = {}, y = {}",
                x.display(action),
                y.display(action)
            ));
        }

        let xstar_x = trace(action, &x.adjoint().mul(decls, &x), &params.trace)?;
        report.checks_run += 1;
        let (re, im) = xstar_x.value.to_f64_pair();
        if re < -params.tolerance || im.abs() >= params.tolerance {
            report.failures.push(format!(
                "sample {sample}: τ(x*x) = {re}+{im}i is not nonnegative for x = {}",
                x.display(action)
            ));
        }

        let tx = trace(action, &x, &params.trace)?;
        let tx_star = trace(action, &x.adjoint(), &params.trace)?;
        report.checks_run += 1;
        let defect = (tx_star.value.clone() - tx.value.conj()).modulus();
        if defect >= params.tolerance {
            report.failures.push(format!(
                "sample {sample}: |τ(x*) - conj τ(x)| = {defect:e} for x = {}",
                x.display(action)
            ));
        }
    }
    Ok(report)
}

fn random_lincomb(action: &Action, rng: &mut ChaCha8Rng, max_terms: usize) -> LinComb {
    let mut x = LinComb::zero();
    let terms = rng.gen_range(1..=max_terms);
    for _ in 0..terms {
        let word = match action.random_word(rng, 4) {
            Some(w) => w,
            None => continue,
        };
        let re = Rational::new(BigInt::from(rng.gen_range(-4i64..=4)), BigInt::from(2));
        let im = Rational::new(BigInt::from(rng.gen_range(-2i64..=2)), BigInt::from(2));
        let coeff = Scalar::new(re, im);
        if !coeff.is_zero() {
            x.add_term(word, coeff);
        }
    }
    x
}

#[derive(Debug, Clone, Copy)]
pub struct NormParams {
    pub max_level: usize,
    pub power_iters: usize,
    pub tol: f64,
}

impl Default for NormParams {
    fn default() -> Self {
        NormParams {
            max_level: 12,
            power_iters: 1000,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NormBounds {
    /// Running maxima of the level-operator norms: a non-decreasing
    /// sequence of lower bounds for the operator norm, converging to it for
    /// self-adjoint elements.
    pub per_level: Vec<f64>,
    pub stabilized: bool,
}

/// Estimates `‖π_n(x)‖` for `n = 0..=max_level` by power iteration on
/// `π_n(x)* π_n(x)` and returns the running maxima. The level spaces are
/// invariant subspaces, so each value is a true lower bound; no upper bound
/// is certified.
pub fn norm_bounds(action: &Action, x: &LinComb, params: &NormParams) -> Result<NormBounds> {
    action.graph().constant_degree()?;
    let mut per_level = Vec::with_capacity(params.max_level + 1);
    let mut best: f64 = 0.0;
    for n in 0..=params.max_level {
        let basis = action.graph().enumerate_level(n);
        let matrix = lincomb_on_basis(action, x, &basis)?;
        let entries: Vec<(usize, usize, (f64, f64))> = matrix
            .entries()
            .map(|(r, c, v)| (r, c, v.to_f64_pair()))
            .collect();
        let sigma = top_singular_value(
            &entries,
            matrix.nrows,
            matrix.ncols,
            params.power_iters,
            params.tol,
            0x5eed ^ n as u64,
        );
        best = best.max(sigma);
        per_level.push(best);
    }
    let stabilized = per_level.len() >= 2 && {
        let k = per_level.len();
        (per_level[k - 1] - per_level[k - 2]).abs() <= params.tol
    };
    Ok(NormBounds {
        per_level,
        stabilized,
    })
}

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

/// Largest singular value by power iteration on `AᴴA`, with a deterministic
/// seeded start vector.
fn top_singular_value(
    entries: &[(usize, usize, (f64, f64))],
    nrows: usize,
    ncols: usize,
    max_iters: usize,
    tol: f64,
    seed: u64,
) -> f64 {
    if entries.is_empty() || ncols == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<(f64, f64)> = (0..ncols)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    normalize(&mut v);

    let mut rayleigh_prev = f64::INFINITY;
    let mut rayleigh = 0.0;
    for _ in 0..max_iters {
        // z = Aᴴ (A v)
        let mut y = vec![(0.0, 0.0); nrows];
        for &(r, c, a) in entries {
            let t = cmul(a, v[c]);
            y[r].0 += t.0;
            y[r].1 += t.1;
        }
        let mut z = vec![(0.0, 0.0); ncols];
        for &(r, c, a) in entries {
            let t = cmul((a.0, -a.1), y[r]);
            z[c].0 += t.0;
            z[c].1 += t.1;
        }
        // Rayleigh quotient of AᴴA at the unit vector v: Re(v·z)
        rayleigh = v
            .iter()
            .zip(&z)
            .map(|(a, b)| a.0 * b.0 + a.1 * b.1)
            .sum::<f64>()
            .max(0.0);
        let norm_z = z.iter().map(|c| c.0 * c.0 + c.1 * c.1).sum::<f64>().sqrt();
        if norm_z == 0.0 {
            return 0.0;
        }
        for c in &mut z {
            c.0 /= norm_z;
            c.1 /= norm_z;
        }
        v = z;
        if (rayleigh - rayleigh_prev).abs() <= tol * rayleigh.max(1.0) {
            break;
        }
        rayleigh_prev = rayleigh;
    }
    rayleigh.sqrt()
}

fn normalize(v: &mut [(f64, f64)]) {
    let norm = v.iter().map(|c| c.0 * c.0 + c.1 * c.1).sum::<f64>().sqrt();
    if norm > 0.0 {
        for c in v.iter_mut() {
            c.0 /= norm;
            c.1 /= norm;
        }
    }
}

/// The wreath-recursion data of a word: the edge bijection
/// `σ_w : d(w)E^1 → t(w)E^1` and the tuple of restrictions, both indexed by
/// the domain fiber in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WreathRecursion {
    pub domain_fiber: Vec<EdgeId>,
    pub images: Vec<EdgeId>,
    pub restrictions: Vec<Word>,
}

pub fn wreath_recursion(action: &Action, w: &Word) -> Result<WreathRecursion> {
    let domain_fiber = action
        .graph()
        .range_fiber(w.domain(action.decls()))
        .to_vec();
    let mut images = Vec::with_capacity(domain_fiber.len());
    let mut restrictions = Vec::with_capacity(domain_fiber.len());
    for &e in &domain_fiber {
        let (image, rest) = action.act_edge(w, e)?;
        images.push(image);
        restrictions.push(rest);
    }
    Ok(WreathRecursion {
        domain_fiber,
        images,
        restrictions,
    })
}

/// The matrix-recursion image of an algebra element: a `p × p` matrix with
/// linear-combination entries. For a single word the entry at
/// `(g·x, x)` is `g|_x` and all others vanish; rows are indexed by the
/// target fiber and columns by the domain fiber, both in declaration order,
/// and the assignment extends linearly by fiber position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursionMatrix {
    pub size: usize,
    /// Row labels (the target fiber) when all terms share a target.
    pub row_fiber: Option<Vec<EdgeId>>,
    /// Column labels (the domain fiber) when all terms share a domain.
    pub col_fiber: Option<Vec<EdgeId>>,
    pub entries: Vec<Vec<LinComb>>,
}

impl RecursionMatrix {
    pub fn entry(&self, row: usize, col: usize) -> &LinComb {
        &self.entries[row][col]
    }

    /// Positional matrix product with convolution of entries.
    pub fn mul(&self, decls: &GeneratorDecls, other: &RecursionMatrix) -> RecursionMatrix {
        assert_eq!(self.size, other.size);
        let p = self.size;
        let mut entries = vec![vec![LinComb::zero(); p]; p];
        for (i, row) in entries.iter_mut().enumerate() {
            for (k, slot) in row.iter_mut().enumerate() {
                let mut total = LinComb::zero();
                for j in 0..p {
                    total = total.add(&self.entries[i][j].mul(decls, &other.entries[j][k]));
                }
                *slot = total;
            }
        }
        RecursionMatrix {
            size: p,
            row_fiber: self.row_fiber.clone(),
            col_fiber: other.col_fiber.clone(),
            entries,
        }
    }
}

pub fn matrix_recursion_word(action: &Action, w: &Word) -> Result<RecursionMatrix> {
    matrix_recursion(action, &LinComb::from_word(w.clone()))
}

/// Linear extension of the word-level recursion: each term contributes its
/// restriction at fiber position `(index of g·x, index of x)`.
pub fn matrix_recursion(action: &Action, x: &LinComb) -> Result<RecursionMatrix> {
    let p = action.graph().constant_degree()?;
    let decls = action.decls();
    let mut entries = vec![vec![LinComb::zero(); p]; p];
    let mut row_fiber: Option<Vec<EdgeId>> = None;
    let mut col_fiber: Option<Vec<EdgeId>> = None;
    let mut uniform_rows = true;
    let mut uniform_cols = true;

    for (word, coeff) in x.terms() {
        let dom = action.graph().range_fiber(word.domain(decls)).to_vec();
        let tgt = action.graph().range_fiber(word.target(decls)).to_vec();
        for (j, &e) in dom.iter().enumerate() {
            let (image, rest) = action.act_edge(word, e)?;
            let i = tgt
                .iter()
                .position(|&y| y == image)
                .expect("image lies in the target fiber");
            entries[i][j].add_term(rest, coeff.clone());
        }
        match &col_fiber {
            None => col_fiber = Some(dom),
            Some(existing) if *existing != dom => uniform_cols = false,
            _ => {}
        }
        match &row_fiber {
            None => row_fiber = Some(tgt),
            Some(existing) if *existing != tgt => uniform_rows = false,
            _ => {}
        }
    }

    Ok(RecursionMatrix {
        size: p,
        row_fiber: if uniform_rows { row_fiber } else { None },
        col_fiber: if uniform_cols { col_fiber } else { None },
        entries,
    })
}

/// The `k`-fold entrywise iteration of the matrix recursion: a
/// `p^k × p^k` matrix over words, rows indexed by `t(w)E^k` and columns by
/// `d(w)E^k` in prefix-major order. Its support is the fiber block of the
/// level-`k` matrix of `w`, and the entry at `(w·α, α)` is `w|_α`.
#[derive(Debug, Clone)]
pub struct IteratedRecursion {
    pub depth: usize,
    pub rows: Vec<Path>,
    pub cols: Vec<Path>,
    pub entries: BTreeMap<(usize, usize), Word>,
}

impl IteratedRecursion {
    pub fn entry(&self, row: usize, col: usize) -> Option<&Word> {
        self.entries.get(&(row, col))
    }
}

pub fn iterate_recursion(action: &Action, w: &Word, k: usize) -> Result<IteratedRecursion> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "iteration depth must be at least 1".into(),
        ));
    }
    let graph = action.graph();
    graph.constant_degree()?;
    let decls = action.decls();

    let mut rows = vec![Path::vertex(w.target(decls))];
    let mut cols = vec![Path::vertex(w.domain(decls))];
    let mut entries: BTreeMap<(usize, usize), Word> = BTreeMap::new();
    entries.insert((0, 0), w.clone());

    for _ in 0..k {
        let p = graph.constant_degree()?;
        let next_rows: Vec<Path> = rows
            .iter()
            .flat_map(|beta| {
                graph
                    .range_fiber(beta.source(graph))
                    .iter()
                    .map(|&e| beta.extend(e))
                    .collect::<Vec<_>>()
            })
            .collect();
        let next_cols: Vec<Path> = cols
            .iter()
            .flat_map(|alpha| {
                graph
                    .range_fiber(alpha.source(graph))
                    .iter()
                    .map(|&e| alpha.extend(e))
                    .collect::<Vec<_>>()
            })
            .collect();

        let mut next_entries = BTreeMap::new();
        for (&(i, j), word) in &entries {
            let dom_fiber = graph.range_fiber(cols[j].source(graph));
            let img_fiber = graph.range_fiber(rows[i].source(graph));
            for (x_idx, &x) in dom_fiber.iter().enumerate() {
                let (y, rest) = action.act_edge(word, x)?;
                let y_idx = img_fiber
                    .iter()
                    .position(|&e| e == y)
                    .expect("image lies in the block's fiber");
                next_entries.insert((i * p + y_idx, j * p + x_idx), rest);
            }
        }
        rows = next_rows;
        cols = next_cols;
        entries = next_entries;
    }

    Ok(IteratedRecursion {
        depth: k,
        rows,
        cols,
        entries,
    })
}

/// Paths of length `k` with range `v`, in prefix-major order (used to index
/// fiber blocks).
pub fn fiber_level(graph: &Graph, v: crate::graph::VertexId, k: usize) -> Vec<Path> {
    let mut paths = vec![Path::vertex(v)];
    for _ in 0..k {
        paths = paths
            .iter()
            .flat_map(|p| {
                graph
                    .range_fiber(p.source(graph))
                    .iter()
                    .map(|&e| p.extend(e))
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    paths
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::action::Caps;
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

    #[test]
    fn generator_traces_vanish_exactly() {
        let action = forest();
        for name in ["a", "b", "c"] {
            let x = parse_lincomb(&action, &format!("1*{name}")).unwrap();
            let result = trace(&action, &x, &TraceParams::default()).unwrap();
            assert!(result.is_exact(), "{name} should be exact");
            assert!(result.value.is_zero());
        }
    }

    #[test]
    fn unit_traces_are_one_third_exactly() {
        let action = forest();
        for name in ["u", "v", "w"] {
            let x = parse_lincomb(&action, &format!("1*{name}")).unwrap();
            let result = trace(&action, &x, &TraceParams::default()).unwrap();
            assert!(result.is_exact());
            assert_eq!(result.value, Scalar::from_ratio(1, 3));
        }
        let one = parse_lincomb(&action, "1*u + 1*v + 1*w").unwrap();
        let result = trace(&action, &one, &TraceParams::default()).unwrap();
        assert!(result.is_exact());
        assert_eq!(result.value, Scalar::one());
    }

    #[test]
    fn lamplighter_lamp_generator_trace_is_zero() {
        // f_n(b) = 2 for n >= 1 while the denominator is 2·2^n, so the
        // sequence 1, 1/2, 1/4, ... never repeats; the tolerance path
        // reports (essentially) zero once the levels get deep enough for
        // the successive differences 2^-n to fall under the tolerance.
        let action = lamplighter();
        let x = parse_lincomb(&action, "1*b").unwrap();
        let params = TraceParams {
            max_level: 40,
            ..TraceParams::default()
        };
        let result = trace(&action, &x, &params).unwrap();
        assert_eq!(result.convergence, Convergence::ToleranceMet);
        let (re, im) = result.value_f64();
        assert!(re.abs() < 1e-3 && im == 0.0);
        // per-level sequence is non-increasing
        for pair in result.levels.windows(2) {
            let (a, _) = pair[0].to_f64_pair();
            let (b, _) = pair[1].to_f64_pair();
            assert!(b <= a + 1e-15);
        }
    }

    #[test]
    fn empty_lincomb_and_offdiagonal_words_trace_to_zero() {
        let action = forest();
        let zero = LinComb::zero();
        let result = trace(&action, &zero, &TraceParams::default()).unwrap();
        assert!(result.is_exact());
        assert!(result.value.is_zero());

        let x = parse_lincomb(&action, "2*b a - 3*c").unwrap();
        let result = trace(&action, &x, &TraceParams::default()).unwrap();
        assert!(result.is_exact());
        assert!(result.value.is_zero());
    }

    #[test]
    fn trace_is_linear_on_samples() {
        let action = forest();
        let params = TraceParams::default();
        let x = parse_lincomb(&action, "1*u + 1*c b").unwrap();
        let y = parse_lincomb(&action, "1*v - 2*u").unwrap();
        let combo = x.scale(&Scalar::from_int(3)).add(&y);
        let tx = trace(&action, &x, &params).unwrap().value;
        let ty = trace(&action, &y, &params).unwrap().value;
        let tc = trace(&action, &combo, &params).unwrap().value;
        assert_eq!(tc, Scalar::from_int(3) * tx + ty);
    }

    #[test]
    fn trace_rejects_non_constant_degree_and_honors_caps() {
        let action = bundle();
        let x = LinComb::from_word(action.unit_word("u").unwrap());
        assert!(matches!(
            trace(&action, &x, &TraceParams::default()),
            Err(Error::NonConstantDegree { .. })
        ));

        let lamp = lamplighter();
        let x = parse_lincomb(&lamp, "1*b").unwrap();
        let params = TraceParams {
            state_cap: 1,
            ..TraceParams::default()
        };
        assert!(matches!(
            trace(&lamp, &x, &params),
            Err(Error::StateCapExceeded { cap: 1 })
        ));
    }

    #[test]
    fn cap_hit_is_reported_honestly() {
        let lamp = lamplighter();
        let x = parse_lincomb(&lamp, "1*b").unwrap();
        let params = TraceParams {
            max_level: 4,
            tolerance: 1e-30,
            ..TraceParams::default()
        };
        let result = trace(&lamp, &x, &params).unwrap();
        assert_eq!(result.convergence, Convergence::CapHit);
        assert_eq!(result.levels_used, 4);
    }

    #[test]
    fn trace_commutes_on_an_inverse_pair() {
        let action = forest();
        let decls = action.decls();
        let params = TraceParams::default();
        let x = parse_lincomb(&action, "1*a").unwrap();
        let y = parse_lincomb(&action, "1*a^-1").unwrap();
        // a a^-1 is the unit at v, a^-1 a the unit at u; both trace to 1/3
        let xy = trace(&action, &x.mul(decls, &y), &params).unwrap();
        let yx = trace(&action, &y.mul(decls, &x), &params).unwrap();
        assert_eq!(xy.value, Scalar::from_ratio(1, 3));
        assert_eq!(yx.value, Scalar::from_ratio(1, 3));
    }

    #[test]
    fn single_vertex_traces() {
        // the four-state binary automaton has a genuinely fractional trace:
        // the normalized fixed counts of b solve g = (g/8 + 1/8) in the
        // limit, i.e. 1/7, approached but never attained at a finite level,
        // so the tolerance path reports it
        let action = parse_spec(include_str!("../fixtures/grigorchuk.ssg"))
            .unwrap()
            .into_action()
            .unwrap();
        let params = TraceParams {
            max_level: 40,
            ..TraceParams::default()
        };
        let b = parse_lincomb(&action, "1*b").unwrap();
        let result = trace(&action, &b, &params).unwrap();
        assert_eq!(result.convergence, Convergence::ToleranceMet);
        let (re, im) = result.value_f64();
        assert!((re - 1.0 / 7.0).abs() < 1e-9 && im == 0.0);

        // b c d acts as the identity, so its trace saturates immediately
        let bcd = parse_lincomb(&action, "1*b c d").unwrap();
        let result = trace(&action, &bcd, &params).unwrap();
        assert!(result.is_exact());
        assert_eq!(result.value, Scalar::one());

        // a moves every edge: zero, exactly
        let a = parse_lincomb(&action, "1*a").unwrap();
        let result = trace(&action, &a, &params).unwrap();
        assert!(result.is_exact());
        assert!(result.value.is_zero());
    }

    #[test]
    fn isotropy_loop_square_traces_to_zero_exactly() {
        // (c b)^2 fixes both level-1 edges of v but none of its deeper
        // restriction states fix anything, so the count vector hits the
        // zero fixed point at level 2 and exactness fires
        let action = forest();
        let x = parse_lincomb(&action, "1*c b c b").unwrap();
        let result = trace(&action, &x, &TraceParams::default()).unwrap();
        assert!(result.is_exact());
        assert!(result.value.is_zero());
        let expected: Vec<Scalar> = vec![
            Scalar::from_ratio(1, 3),
            Scalar::from_ratio(1, 3),
            Scalar::zero(),
            Scalar::zero(),
        ];
        assert_eq!(result.levels, expected);
    }

    #[test]
    fn trace_properties_hold_on_samples() {
        let action = forest();
        let report = trace_properties(
            &action,
            &TracePropertyParams {
                samples: 40,
                seed: 11,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(report.passed(), "failures: {:?}", report.failures);
    }

    #[test]
    fn norms_of_projections_and_partial_isometries() {
        let action = forest();
        let params = NormParams {
            max_level: 6,
            ..NormParams::default()
        };
        let u = parse_lincomb(&action, "1*u").unwrap();
        let bounds = norm_bounds(&action, &u, &params).unwrap();
        for value in &bounds.per_level {
            assert!((value - 1.0).abs() < 1e-12);
        }

        let a = parse_lincomb(&action, "1*a").unwrap();
        let bounds = norm_bounds(&action, &a, &params).unwrap();
        for value in &bounds.per_level {
            assert!((value - 1.0).abs() < 1e-12);
        }

        // a + a^-1 has norm 1 at level 0 (a symmetric 2x2 permutation block)
        let sym = parse_lincomb(&action, "1*a + 1*a^-1").unwrap();
        let bounds = norm_bounds(&action, &sym, &NormParams { max_level: 0, ..params }).unwrap();
        assert!((bounds.per_level[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn norm_bounds_are_monotone_and_triangle_bounded() {
        let action = forest();
        let x = parse_lincomb(&action, "1*u + 1*a + 1*a^-1 - 0.5*c b").unwrap();
        let bounds = norm_bounds(
            &action,
            &x,
            &NormParams {
                max_level: 8,
                ..NormParams::default()
            },
        )
        .unwrap();
        for pair in bounds.per_level.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-12);
        }
        // triangle inequality over partial isometries: Σ |c_i|
        let cap: f64 = 1.0 + 1.0 + 1.0 + 0.5;
        for value in &bounds.per_level {
            assert!(*value <= cap + 1e-9);
        }
    }

    #[test]
    fn zero_element_has_zero_norm() {
        let action = forest();
        let bounds = norm_bounds(&action, &LinComb::zero(), &NormParams::default()).unwrap();
        assert!(bounds.per_level.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn wreath_recursion_of_the_generators() {
        let action = forest();
        let decls = action.decls();
        let graph = action.graph();
        let names = |edges: &[EdgeId]| -> Vec<&str> {
            edges.iter().map(|&e| graph.edge_name(e)).collect()
        };

        let a = parse_word(&action, "a").unwrap();
        let wr = wreath_recursion(&action, &a).unwrap();
        assert_eq!(names(&wr.domain_fiber), vec!["e1", "e3"]);
        assert_eq!(names(&wr.images), vec!["e2", "e6"]);
        assert_eq!(wr.restrictions[0], parse_word(&action, "u").unwrap());
        assert_eq!(wr.restrictions[1], parse_word(&action, "b").unwrap());

        let b = parse_word(&action, "b").unwrap();
        let wr = wreath_recursion(&action, &b).unwrap();
        assert_eq!(
            wr.restrictions
                .iter()
                .map(|w| w.display(decls))
                .collect::<Vec<_>>(),
            vec!["a", "c"]
        );

        let c = parse_word(&action, "c").unwrap();
        let wr = wreath_recursion(&action, &c).unwrap();
        assert_eq!(
            wr.restrictions
                .iter()
                .map(|w| w.display(decls))
                .collect::<Vec<_>>(),
            vec!["a^-1", "b"]
        );
    }

    #[test]
    fn matrix_recursion_of_the_generators() {
        let action = forest();
        let a = parse_word(&action, "a").unwrap();
        let m = matrix_recursion_word(&action, &a).unwrap();
        // rows e2 e6, cols e1 e3: diagonal (u, b)
        assert_eq!(m.entry(0, 0), &LinComb::from_word(parse_word(&action, "u").unwrap()));
        assert!(m.entry(0, 1).is_zero());
        assert!(m.entry(1, 0).is_zero());
        assert_eq!(m.entry(1, 1), &LinComb::from_word(parse_word(&action, "b").unwrap()));

        // b sends e2 -> e5 with restriction a and e6 -> e4 with restriction c;
        // with rows (e4, e5) and cols (e2, e6) the nonzero entries sit at
        // (e5, e2) = a and (e4, e6) = c
        let b = parse_word(&action, "b").unwrap();
        let m = matrix_recursion_word(&action, &b).unwrap();
        assert!(m.entry(0, 0).is_zero());
        assert_eq!(m.entry(0, 1), &LinComb::from_word(parse_word(&action, "c").unwrap()));
        assert_eq!(m.entry(1, 0), &LinComb::from_word(parse_word(&action, "a").unwrap()));
        assert!(m.entry(1, 1).is_zero());

        let c = parse_word(&action, "c").unwrap();
        let m = matrix_recursion_word(&action, &c).unwrap();
        assert_eq!(
            m.entry(0, 0),
            &LinComb::from_word(parse_word(&action, "a^-1").unwrap())
        );
        assert_eq!(m.entry(1, 1), &LinComb::from_word(parse_word(&action, "b").unwrap()));
    }

    #[test]
    fn unit_recursion_is_diagonal_units() {
        let action = forest();
        let u = parse_word(&action, "u").unwrap();
        let m = matrix_recursion_word(&action, &u).unwrap();
        let graph = action.graph();
        let fiber = graph.range_fiber(graph.vertex_id("u").unwrap());
        for (i, &e) in fiber.iter().enumerate() {
            assert_eq!(
                m.entry(i, i),
                &LinComb::from_word(Word::unit(graph.source(e)))
            );
        }
    }

    #[test]
    fn matrix_recursion_is_a_homomorphism_on_samples() {
        let action = forest();
        let decls = action.decls();
        let caps = Caps::default();
        let pairs = [("b", "a"), ("c", "b"), ("b a", "a^-1"), ("c b", "c b")];
        for (left, right) in pairs {
            let w1 = parse_word(&action, left).unwrap();
            let w2 = parse_word(&action, right).unwrap();
            let Ok(product) = w1.compose(decls, &w2) else {
                continue;
            };
            let lhs = matrix_recursion_word(&action, &product).unwrap();
            let rhs = matrix_recursion_word(&action, &w1)
                .unwrap()
                .mul(decls, &matrix_recursion_word(&action, &w2).unwrap());
            for i in 0..lhs.size {
                for j in 0..lhs.size {
                    let le = lhs.entry(i, j);
                    let re = rhs.entry(i, j);
                    assert_eq!(le.len(), re.len());
                    if le.len() == 1 {
                        let (lw, lc) = le.terms().next().unwrap();
                        let (rw, rc) = re.terms().next().unwrap();
                        assert_eq!(lc, rc);
                        assert!(action.words_equal(lw, rw, caps).unwrap().is_true());
                    }
                }
            }
        }
    }

    #[test]
    fn iterated_recursion_matches_level_blocks() {
        let action = forest();
        let decls = action.decls();
        for text in ["a", "b", "b a"] {
            let w = parse_word(&action, text).unwrap();
            for k in 1..=3usize {
                let iterated = iterate_recursion(&action, &w, k).unwrap();
                // closed form: entry (w·α, α) = w|_α over the domain fiber level
                let dom_paths = fiber_level(action.graph(), w.domain(decls), k);
                assert_eq!(iterated.cols, dom_paths);
                let mut seen = 0;
                for (j, alpha) in dom_paths.iter().enumerate() {
                    let (image, rest) = action.act_path(&w, alpha).unwrap();
                    let i = iterated.rows.iter().position(|r| *r == image).unwrap();
                    let entry = iterated.entry(i, j).unwrap();
                    assert_eq!(entry, &rest);
                    seen += 1;
                }
                assert_eq!(iterated.entries.len(), seen);
            }
        }
    }

    #[test]
    fn iterated_recursion_depth_one_is_the_matrix_recursion() {
        let action = forest();
        let a = parse_word(&action, "a").unwrap();
        let single = matrix_recursion_word(&action, &a).unwrap();
        let iterated = iterate_recursion(&action, &a, 1).unwrap();
        for i in 0..single.size {
            for j in 0..single.size {
                match iterated.entry(i, j) {
                    Some(word) => {
                        assert_eq!(single.entry(i, j), &LinComb::from_word(word.clone()))
                    }
                    None => assert!(single.entry(i, j).is_zero()),
                }
            }
        }
    }
}
