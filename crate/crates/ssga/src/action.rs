//! The action and restriction calculus, rule validation, and the word problem.
//!
//! A rule table gives, for each generator `g` and each edge `e` in the domain
//! fiber `d(g)E^1`, the image edge `g·e` and the restriction word `g|_e`.
//! Acting on longer paths threads restrictions edge by edge:
//! `g·(eξ) = (g·e)(g|_e·ξ)`. Inverses act through the inverted rule rows,
//! `g^{-1}·e = σ_g^{-1}(e)` with restriction `(g|_{g^{-1}·e})^{-1}`, and
//! products accumulate restrictions right to left.
//!
//! Identity testing explores the automaton of restriction states: a word acts
//! as the identity iff it fixes every edge of its domain fiber and all its
//! restrictions along fixed edges do too. When every rule restriction is a
//! single token or a unit, restriction words never grow, the reachable state
//! set is finite and the search always terminates with a definite answer.

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, Path, VertexId};
use crate::word::{GenId, GeneratorDecls, Token, Word};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

/// An unvalidated action specification: graph, generator declarations and
/// raw rule rows, as produced by the parser or assembled in code.
#[derive(Debug, Clone)]
pub struct ActionSpec {
    pub graph: Graph,
    pub decls: GeneratorDecls,
    pub rules: Vec<RawRule>,
}

/// One rule row `g: e -> image | restriction`.
#[derive(Debug, Clone)]
pub struct RawRule {
    pub gen: GenId,
    pub edge: EdgeId,
    pub image: EdgeId,
    pub restriction: RawRestriction,
}

/// A restriction as written in a rule: a unit (vertex) or a token sequence,
/// not yet checked for composability or typing.

#[derive(Debug, Clone)]
pub enum RawRestriction {
    Unit(VertexId),
    Tokens(Vec<Token>),
}

/// A violation found by rule validation, tagged with its generator/edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub generator: Option<String>,
    pub edge: Option<String>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.generator, &self.edge) {
            (Some(g), Some(e)) => write!(f, "generator `{g}`, edge `{e}`: {}", self.message),
            (Some(g), None) => write!(f, "generator `{g}`: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            write!(f, "action is valid")
        } else {
            for (i, v) in self.violations.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "{v}")?;
            }
            Ok(())
        }
    }
}

impl ActionSpec {
    /// Checks that every rule row is total on its domain fiber, bijective
    /// onto the target fiber, and that every restriction is a well-typed
    /// word. Returns all violations at once.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let graph = &self.graph;
        let decls = &self.decls;

        let mut push = |gen: Option<GenId>, edge: Option<EdgeId>, message: String| {
            violations.push(Violation {
                generator: gen.map(|g| decls.name(g).to_string()),
                edge: edge.map(|e| graph.edge_name(e).to_string()),
                message,
            });
        };

        for g in decls.ids() {
            let dom = decls.domain(g);
            let tgt = decls.target(g);
            let dom_fiber = graph.range_fiber(dom);
            let tgt_fiber = graph.range_fiber(tgt);

            let rows: Vec<&RawRule> = self.rules.iter().filter(|r| r.gen == g).collect();
            let mut seen: BTreeMap<EdgeId, &RawRule> = BTreeMap::new();
            for row in rows {
                if graph.range(row.edge) != dom {
                    push(
                        Some(g),
                        Some(row.edge),
                        format!(
                            "rule edge is outside the domain fiber {}E^1",
                            graph.vertex_name(dom)
                        ),
                    );
                    continue;
                }
                if seen.insert(row.edge, row).is_some() {
                    push(Some(g), Some(row.edge), "duplicate rule row".to_string());
                }
            }

            for &e in dom_fiber {
                if !seen.contains_key(&e) {
                    push(
                        Some(g),
                        Some(e),
                        format!(
                            "row not total on {}E^1: no rule for this edge",
                            graph.vertex_name(dom)
                        ),
                    );
                }
            }

            // bijectivity of e -> g·e onto t(g)E^1
            let mut hit: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
            for (&e, row) in &seen {
                if graph.range(row.image) != tgt {
                    push(
                        Some(g),
                        Some(e),
                        format!(
                            "image `{}` lies outside the target fiber {}E^1",
                            graph.edge_name(row.image),
                            graph.vertex_name(tgt)
                        ),
                    );
                } else if let Some(prev) = hit.insert(row.image, e) {
                    push(
                        Some(g),
                        Some(e),
                        format!(
                            "image `{}` already used by rule for `{}` (not injective)",
                            graph.edge_name(row.image),
                            graph.edge_name(prev)
                        ),
                    );
                }
            }
            if seen.len() == dom_fiber.len()
                && hit.len() == seen.len()
                && dom_fiber.len() != tgt_fiber.len()
            {
                push(
                    Some(g),
                    None,
                    format!(
                        "fibers {}E^1 and {}E^1 have different sizes ({} vs {}), no bijection exists",
                        graph.vertex_name(dom),
                        graph.vertex_name(tgt),
                        dom_fiber.len(),
                        tgt_fiber.len()
                    ),
                );
            }

            // restriction typing: d(g|_e) = s(e), t(g|_e) = s(g·e)
            for (&e, row) in &seen {
                let word = match &row.restriction {
                    RawRestriction::Unit(v) => Ok(Word::unit(*v)),
                    RawRestriction::Tokens(tokens) => Word::from_tokens(decls, tokens.clone()),
                };
                let word = match word {
                    Ok(w) => w,
                    Err(err) => {
                        push(Some(g), Some(e), format!("restriction is ill-formed: {err}"));
                        continue;
                    }
                };
                let expected_d = graph.source(e);
                let expected_t = graph.source(row.image);
                let got_d = word.domain(decls);
                let got_t = word.target(decls);
                if got_d != expected_d {
                    push(
                        Some(g),
                        Some(e),
                        format!(
                            "restriction domain is {} but s({}) = {}",
                            graph.vertex_name(got_d),
                            graph.edge_name(e),
                            graph.vertex_name(expected_d)
                        ),
                    );
                }
                if got_t != expected_t {
                    push(
                        Some(g),
                        Some(e),
                        format!(
                            "restriction target is {} but s({}) = {}",
                            graph.vertex_name(got_t),
                            graph.edge_name(row.image),
                            graph.vertex_name(expected_t)
                        ),
                    );
                }
            }
        }

        ValidationReport { violations }
    }

    /// Validates and freezes the rule table into a usable [`Action`].
    pub fn into_action(self) -> Result<Action> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(Error::InvalidAction(report.to_string()));
        }
        let decls = self.decls;
        let mut rules = vec![BTreeMap::new(); decls.len()];
        let mut inverse_rules = vec![BTreeMap::new(); decls.len()];
        for row in self.rules {
            let word = match &row.restriction {
                RawRestriction::Unit(v) => Word::unit(*v),
                RawRestriction::Tokens(tokens) => Word::from_tokens(&decls, tokens.clone())?,
            };
            rules[row.gen.0].insert(row.edge, (row.image, word));
            inverse_rules[row.gen.0].insert(row.image, row.edge);
        }
        Ok(Action {
            graph: self.graph,
            decls,
            rules,
            inverse_rules,
        })
    }
}

/// BFS caps for the word-problem search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub state_cap: usize,
    pub depth_cap: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            state_cap: 100_000,
            depth_cap: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CapHit {
    StateCap(usize),
    DepthCap(usize),
}

impl fmt::Display for CapHit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapHit::StateCap(n) => write!(f, "state cap {n} exceeded"),
            CapHit::DepthCap(n) => write!(f, "depth cap {n} exceeded"),
        }
    }
}

/// A path on which two actions disagree: `path` is where, `image` is where
/// the tested word sends it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub path: Path,
    pub image: Path,
}

/// Outcome of a bounded decision procedure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    True,
    False(Witness),
    Unknown(CapHit),
}

impl Decision {
    pub fn is_true(&self) -> bool {
        matches!(self, Decision::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Decision::False(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Decision::Unknown(_))
    }
}

/// A validated self-similar action: graph, generators and total rule table.
#[derive(Debug, Clone)]
pub struct Action {
    graph: Graph,
    decls: GeneratorDecls,
    rules: Vec<BTreeMap<EdgeId, (EdgeId, Word)>>,
    inverse_rules: Vec<BTreeMap<EdgeId, EdgeId>>,
}

impl Action {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn decls(&self) -> &GeneratorDecls {
        &self.decls
    }

    pub fn generator_word(&self, name: &str) -> Result<Word> {
        Ok(Word::generator(self.decls.id(name)?))
    }

    pub fn unit_word(&self, vertex: &str) -> Result<Word> {
        Ok(Word::unit(self.graph.vertex_id(vertex)?))
    }

    /// The rule row `(g·e, g|_e)` for a plain generator.
    pub fn rule(&self, g: GenId, e: EdgeId) -> Option<&(EdgeId, Word)> {
        self.rules[g.0].get(&e)
    }

    /// Renders a word with generator and vertex names.
    pub fn display_word(&self, w: &Word) -> String {
        w.display_with(
            |tok| self.decls.token_name(tok),
            |v| self.graph.vertex_name(v).to_string(),
        )
    }

    fn act_token(&self, tok: Token, e: EdgeId) -> Result<(EdgeId, Word)> {
        let dom = self.decls.token_domain(tok);
        if self.graph.range(e) != dom {
            return Err(self.non_composable(&Word::Product(vec![tok]), e));
        }
        if !tok.inverse {
            let (image, rest) = self.rules[tok.gen.0]
                .get(&e)
                .expect("validated rule table is total");
            Ok((*image, rest.clone()))
        } else {
            let pre = *self.inverse_rules[tok.gen.0]
                .get(&e)
                .expect("validated rule table is onto");
            let (_, rest) = self.rules[tok.gen.0]
                .get(&pre)
                .expect("validated rule table is total");
            Ok((pre, rest.inverse()))
        }
    }

    fn non_composable(&self, w: &Word, e: EdgeId) -> Error {
        Error::NonComposableAction {
            word_domain: self
                .graph
                .vertex_name(w.domain(&self.decls))
                .to_string(),
            target: format!("edge `{}`", self.graph.edge_name(e)),
            range: self.graph.vertex_name(self.graph.range(e)).to_string(),
        }
    }

    /// `(w·e, w|_e)` for a word acting on a single edge with `r(e) = d(w)`.
    pub fn act_edge(&self, w: &Word, e: EdgeId) -> Result<(EdgeId, Word)> {
        match w {
            Word::Unit(v) => {
                if self.graph.range(e) != *v {
                    return Err(self.non_composable(w, e));
                }
                Ok((e, Word::unit(self.graph.source(e))))
            }
            Word::Product(tokens) => {
                if self.graph.range(e) != w.domain(&self.decls) {
                    return Err(self.non_composable(w, e));
                }
                let mut edge = e;
                let mut restriction = Word::unit(self.graph.source(e));
                for &tok in tokens.iter().rev() {
                    let (image, rest) = self.act_token(tok, edge)?;
                    edge = image;
                    restriction = rest.compose(&self.decls, &restriction)?;
                }
                Ok((edge, restriction))
            }
        }
    }

    /// `(w·ξ, w|_ξ)`: acts edge by edge, threading restrictions. The image
    /// has the same length as `ξ` and range `t(w)`; the returned restriction
    /// is freely reduced.
    pub fn act_path(&self, w: &Word, path: &Path) -> Result<(Path, Word)> {
        if path.range() != w.domain(&self.decls) {
            return Err(Error::NonComposableAction {
                word_domain: self
                    .graph
                    .vertex_name(w.domain(&self.decls))
                    .to_string(),
                target: format!("path `{}`", path.display(&self.graph)),
                range: self.graph.vertex_name(path.range()).to_string(),
            });
        }
        let mut current = w.clone();
        let mut image_edges = Vec::with_capacity(path.len());
        for &e in path.edges() {
            let (image, rest) = self.act_edge(&current, e)?;
            image_edges.push(image);
            current = rest;
        }
        let image = Path::from_parts(w.target(&self.decls), image_edges);
        Ok((image, current))
    }

    /// Just the restriction `w|_ξ`.
    pub fn restrict_path(&self, w: &Word, path: &Path) -> Result<Word> {
        Ok(self.act_path(w, path)?.1)
    }

    /// Decides whether `w` acts as the identity on its domain tree.
    ///
    /// Breadth-first search over restriction states along fixed edges: `w`
    /// is the identity iff `d(w) = t(w)`, every domain edge is fixed, and
    /// every restriction along a fixed edge is again the identity. Any moved
    /// edge yields a concrete witness path. `Unknown` is returned only when
    /// a cap stops the search before the state set closes.
    pub fn is_identity(&self, w: &Word, caps: Caps) -> Result<Decision> {
        if caps.state_cap == 0 || caps.depth_cap == 0 {
            return Err(Error::InvalidCaps);
        }
        let d = w.domain(&self.decls);
        let t = w.target(&self.decls);
        if d != t {
            return Ok(Decision::False(Witness {
                path: Path::vertex(d),
                image: Path::vertex(t),
            }));
        }
        if w.is_unit() {
            return Ok(Decision::True);
        }

        let mut visited: HashSet<Word> = HashSet::new();
        let mut queue: VecDeque<(Word, Path)> = VecDeque::new();
        visited.insert(w.clone());
        queue.push_back((w.clone(), Path::vertex(d)));
        let mut depth_capped = false;

        while let Some((state, alpha)) = queue.pop_front() {
            if alpha.len() >= caps.depth_cap {
                // cannot expand this state, so closure is out of reach
                depth_capped = true;
                continue;
            }
            let fiber = self.graph.range_fiber(state.domain(&self.decls));
            for &e in fiber {
                let (image, rest) = self.act_edge(&state, e)?;
                if image != e {
                    return Ok(Decision::False(Witness {
                        path: alpha.extend(e),
                        image: alpha.extend(image),
                    }));
                }
                if rest.is_unit() {
                    continue;
                }
                if !visited.contains(&rest) {
                    if visited.len() >= caps.state_cap {
                        return Ok(Decision::Unknown(CapHit::StateCap(caps.state_cap)));
                    }
                    visited.insert(rest.clone());
                    queue.push_back((rest, alpha.extend(e)));
                }
            }
        }

        if depth_capped {
            Ok(Decision::Unknown(CapHit::DepthCap(caps.depth_cap)))
        } else {
            Ok(Decision::True)
        }
    }

    /// Decides `w1 = w2` as groupoid elements (equality of actions).
    /// Reduces to `is_identity(w1 · w2^{-1})`; a `False` witness is mapped
    /// back to a path on which the two words act differently.
    pub fn words_equal(&self, w1: &Word, w2: &Word, caps: Caps) -> Result<Decision> {
        let d1 = w1.domain(&self.decls);
        let d2 = w2.domain(&self.decls);
        let t1 = w1.target(&self.decls);
        let t2 = w2.target(&self.decls);
        if d1 != d2 || t1 != t2 {
            return Ok(Decision::False(Witness {
                path: Path::vertex(d1),
                image: Path::vertex(t1),
            }));
        }
        let product = w1.compose(&self.decls, &w2.inverse())?;
        match self.is_identity(&product, caps)? {
            Decision::True => Ok(Decision::True),
            Decision::Unknown(cap) => Ok(Decision::Unknown(cap)),
            Decision::False(witness) => {
                // (w1 w2^-1)·ξ ≠ ξ; then w1 and w2 differ on w2^-1·ξ
                let (path, _) = self.act_path(&w2.inverse(), &witness.path)?;
                let (image, _) = self.act_path(w1, &path)?;
                Ok(Decision::False(Witness { path, image }))
            }
        }
    }
}

/// Parameters for the randomized axiom check.
#[derive(Debug, Clone, Copy)]
pub struct CheckParams {
    pub depth: usize,
    pub samples: usize,
    pub seed: u64,
    pub caps: Caps,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams {
            depth: 4,
            samples: 200,
            seed: 1,
            caps: Caps::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyFailure {
    pub property: String,
    pub detail: String,
}

/// Result of sampling the restriction-calculus identities. The identities
/// are theorems for any valid rule table, so a failure indicates an
/// implementation bug rather than bad input.
#[derive(Debug, Clone, Default)]
pub struct PropertyReport {
    pub samples: usize,
    pub checks_run: usize,
    pub unknowns: usize,
    pub failures: Vec<PropertyFailure>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl Action {
    /// Samples random composable words and paths and asserts the defining
    /// identity `g·(ξη) = (g·ξ)(g|_ξ·η)` together with the four restriction
    /// laws: composition along paths, triviality of unit restrictions, the
    /// product rule `(hg)|_ξ = (h|_{g·ξ})(g|_ξ)`, and the inverse rule
    /// `g^{-1}|_ξ = (g|_{g^{-1}·ξ})^{-1}`.
    pub fn check_properties(&self, params: CheckParams) -> PropertyReport {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut report = PropertyReport {
            samples: params.samples,
            ..PropertyReport::default()
        };

        for _ in 0..params.samples {
            let Some(g) = self.random_word(&mut rng, params.depth) else {
                continue;
            };
            let d = g.domain(&self.decls);
            let t = g.target(&self.decls);
            let xi = self.random_path(&mut rng, d, params.depth.max(1));
            let eta = self.random_path(&mut rng, xi.source(&self.graph), params.depth.max(1));

            self.check_sample(&g, &xi, &eta, t, params, &mut rng, &mut report);
        }
        report
    }

    #[allow(clippy::too_many_arguments)]
    fn check_sample(
        &self,
        g: &Word,
        xi: &Path,
        eta: &Path,
        target: VertexId,
        params: CheckParams,
        rng: &mut ChaCha8Rng,
        report: &mut PropertyReport,
    ) {
        let decls = &self.decls;
        let mut fail = |property: &str, detail: String| {
            report.failures.push(PropertyFailure {
                property: property.to_string(),
                detail,
            });
        };

        // defining identity on a concatenation
        let xi_eta = concat_paths(xi, eta);
        let (img_whole, rest_whole) = self.act_path(g, &xi_eta).expect("composable by sampling");
        let (img_xi, rest_xi) = self.act_path(g, xi).expect("composable by sampling");
        let (img_eta, rest_eta) = self.act_path(&rest_xi, eta).expect("restriction composable");
        report.checks_run += 1;
        if img_whole != concat_paths(&img_xi, &img_eta) {
            fail(
                "defining-identity",
                format!(
                    "g = {}, ξ = {}, η = {}",
                    g.display(decls),
                    xi.display(&self.graph),
                    eta.display(&self.graph)
                ),
            );
        }

        // (1) g|_{ξη} = (g|_ξ)|_η
        report.checks_run += 1;
        match self.words_equal(&rest_whole, &rest_eta, params.caps) {
            Ok(Decision::True) => {}
            Ok(Decision::False(_)) => fail(
                "restriction-composition",
                format!("g = {}, ξη = {}", g.display(decls), xi_eta.display(&self.graph)),
            ),
            Ok(Decision::Unknown(_)) | Err(_) => report.unknowns += 1,
        }

        // (2) unit restriction along any path is the unit at the source
        report.checks_run += 1;
        let unit = Word::unit(xi.range());
        let (unit_img, unit_rest) = self.act_path(&unit, xi).expect("unit acts on its fiber");
        if unit_img != *xi || unit_rest != Word::unit(xi.source(&self.graph)) {
            fail("unit-law", format!("ξ = {}", xi.display(&self.graph)));
        }

        // (3) (hg)|_ξ = (h|_{g·ξ})(g|_ξ) for a random left factor h
        if let Some(h) = self.random_word_from(rng, target, params.depth) {
            if let Ok(hg) = h.compose(decls, g) {
                report.checks_run += 1;
                let lhs = self.restrict_path(&hg, xi).expect("composable");
                let h_at = self.restrict_path(&h, &img_xi).expect("composable");
                let rhs = h_at.compose(decls, &rest_xi).expect("typed by the calculus");
                match self.words_equal(&lhs, &rhs, params.caps) {
                    Ok(Decision::True) => {}
                    Ok(Decision::False(_)) => fail(
                        "product-rule",
                        format!("h = {}, g = {}", h.display(decls), g.display(decls)),
                    ),
                    Ok(Decision::Unknown(_)) | Err(_) => report.unknowns += 1,
                }
            }
        }

        // (4) g^{-1}|_ζ = (g|_{g^{-1}·ζ})^{-1} on a path in the target tree
        let zeta = self.random_path(rng, target, params.depth.max(1));
        report.checks_run += 1;
        let ginv = g.inverse();
        let lhs = self.restrict_path(&ginv, &zeta).expect("composable");
        let (pullback, _) = self.act_path(&ginv, &zeta).expect("composable");
        let rhs = self
            .restrict_path(g, &pullback)
            .expect("composable")
            .inverse();
        match self.words_equal(&lhs, &rhs, params.caps) {
            Ok(Decision::True) => {}
            Ok(Decision::False(_)) => fail(
                "inverse-rule",
                format!("g = {}, ζ = {}", g.display(decls), zeta.display(&self.graph)),
            ),
            Ok(Decision::Unknown(_)) | Err(_) => report.unknowns += 1,
        }

        // inverse coherence: g^{-1}·(g·ξ) = ξ
        report.checks_run += 1;
        let (roundtrip, _) = self.act_path(&ginv, &img_xi).expect("composable");
        if roundtrip != *xi {
            fail("inverse-coherence", format!("g = {}", g.display(decls)));
        }

        // length and range equivariance
        report.checks_run += 1;
        if img_xi.len() != xi.len() || img_xi.range() != target {
            fail("length-range", format!("g = {}", g.display(decls)));
        }
    }

    /// A random freely reduced composable word of length 1..=depth, or None
    /// if the generator set is empty.
    pub(crate) fn random_word(&self, rng: &mut ChaCha8Rng, depth: usize) -> Option<Word> {
        if self.decls.is_empty() {
            return None;
        }
        let g = GenId(rng.gen_range(0..self.decls.len()));
        let start = Token {
            gen: g,
            inverse: rng.gen_bool(0.5),
        };
        self.grow_word(rng, start, depth)
    }

    /// A random word with prescribed domain `d(h) = domain`, so it can sit on
    /// the left of any word whose target is that vertex. The last (earliest
    /// acting) token is fixed and growth prepends later-acting tokens.
    fn random_word_from(&self, rng: &mut ChaCha8Rng, domain: VertexId, depth: usize) -> Option<Word> {
        let candidates: Vec<Token> = self.composable_tokens_with_domain(domain);
        if candidates.is_empty() {
            return None;
        }
        let last = candidates[rng.gen_range(0..candidates.len())];
        let mut tokens = vec![last];
        let len = rng.gen_range(1..=depth.max(1));
        while tokens.len() < len {
            let need = self.decls.token_target(tokens[0]);
            let next: Vec<Token> = self
                .composable_tokens_with_domain(need)
                .into_iter()
                .filter(|t| !t.cancels(tokens[0]))
                .collect();
            if next.is_empty() {
                break;
            }
            tokens.insert(0, next[rng.gen_range(0..next.len())]);
        }
        Word::from_tokens(&self.decls, tokens).ok()
    }

    fn grow_word(&self, rng: &mut ChaCha8Rng, first: Token, depth: usize) -> Option<Word> {
        let mut tokens = vec![first];
        let len = rng.gen_range(1..=depth.max(1));
        while tokens.len() < len {
            let need = self.decls.token_domain(*tokens.last().unwrap());
            let next: Vec<Token> = self
                .composable_tokens_with_target(need)
                .into_iter()
                .filter(|t| !t.cancels(*tokens.last().unwrap()))
                .collect();
            if next.is_empty() {
                break;
            }
            tokens.push(next[rng.gen_range(0..next.len())]);
        }
        Word::from_tokens(&self.decls, tokens).ok()
    }

    fn composable_tokens_with_target(&self, v: VertexId) -> Vec<Token> {
        let mut out = Vec::new();
        for g in self.decls.ids() {
            if self.decls.target(g) == v {
                out.push(Token::new(g));
            }
            if self.decls.domain(g) == v {
                out.push(Token::new(g).inverted());
            }
        }
        out
    }

    fn composable_tokens_with_domain(&self, v: VertexId) -> Vec<Token> {
        let mut out = Vec::new();
        for g in self.decls.ids() {
            if self.decls.domain(g) == v {
                out.push(Token::new(g));
            }
            if self.decls.target(g) == v {
                out.push(Token::new(g).inverted());
            }
        }
        out
    }

    /// A uniform random path below `root` of length 1..=depth.
    fn random_path(&self, rng: &mut ChaCha8Rng, root: VertexId, depth: usize) -> Path {
        let len = rng.gen_range(1..=depth);
        let mut path = Path::vertex(root);
        for _ in 0..len {
            let fiber = self.graph.range_fiber(path.source(&self.graph));
            path = path.extend(fiber[rng.gen_range(0..fiber.len())]);
        }
        path
    }
}

fn concat_paths(xi: &Path, eta: &Path) -> Path {
    let mut edges = xi.edges().to_vec();
    edges.extend_from_slice(eta.edges());
    Path::from_parts(xi.range(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_spec;

    pub(crate) fn forest() -> Action {
        parse_spec(include_str!("../fixtures/forest.ssg"))
            .unwrap()
            .into_action()
            .unwrap()
    }

    pub(crate) fn lamplighter() -> Action {
        parse_spec(include_str!("../fixtures/lamplighter.ssg"))
            .unwrap()
            .into_action()
            .unwrap()
    }

    pub(crate) fn bundle() -> Action {
        parse_spec(include_str!("../fixtures/bundle.ssg"))
            .unwrap()
            .into_action()
            .unwrap()
    }

    fn word(action: &Action, text: &str) -> Word {
        crate::parse::parse_word(action, text).unwrap()
    }

    fn path(action: &Action, names: &[&str]) -> Path {
        let edges = names
            .iter()
            .map(|n| action.graph().edge_id(n).unwrap())
            .collect();
        Path::new(action.graph(), edges).unwrap()
    }

    #[test]
    fn forest_rules_validate() {
        let action = forest();
        assert_eq!(action.decls().len(), 3);
    }

    #[test]
    fn missing_row_is_reported() {
        let mut spec = parse_spec(include_str!("../fixtures/forest.ssg"))
            .unwrap()
            .into_spec()
            .unwrap();
        // drop a's rule for e3
        let a = spec.decls.id("a").unwrap();
        let e3 = spec.graph.edge_id("e3").unwrap();
        spec.rules.retain(|r| !(r.gen == a && r.edge == e3));
        let report = spec.validate();
        assert!(!report.is_valid());
        assert!(report.to_string().contains("row not total on uE^1"));
    }

    #[test]
    fn mistyped_restriction_is_reported() {
        let mut spec = parse_spec(include_str!("../fixtures/forest.ssg"))
            .unwrap()
            .into_spec()
            .unwrap();
        // set a|_{e3} := c, whose domain w differs from s(e3) = v
        let a = spec.decls.id("a").unwrap();
        let c = spec.decls.id("c").unwrap();
        let e3 = spec.graph.edge_id("e3").unwrap();
        for rule in &mut spec.rules {
            if rule.gen == a && rule.edge == e3 {
                rule.restriction = RawRestriction::Tokens(vec![Token::new(c)]);
            }
        }
        let report = spec.validate();
        assert!(!report.is_valid());
        assert!(report.to_string().contains("restriction domain is w"));
    }

    #[test]
    fn generator_acts_per_rule_table() {
        let action = forest();
        let a = word(&action, "a");
        let e1 = action.graph().edge_id("e1").unwrap();
        let (img, rest) = action.act_edge(&a, e1).unwrap();
        assert_eq!(action.graph().edge_name(img), "e2");
        assert_eq!(rest, Word::unit(action.graph().vertex_id("u").unwrap()));

        let e3 = action.graph().edge_id("e3").unwrap();
        let (img, rest) = action.act_edge(&a, e3).unwrap();
        assert_eq!(action.graph().edge_name(img), "e6");
        assert_eq!(rest, word(&action, "b"));
    }

    #[test]
    fn inverse_acts_through_inverted_rules() {
        let action = forest();
        let a_inv = word(&action, "a^-1");
        let e6 = action.graph().edge_id("e6").unwrap();
        let (img, rest) = action.act_edge(&a_inv, e6).unwrap();
        assert_eq!(action.graph().edge_name(img), "e3");
        assert_eq!(rest, word(&action, "b^-1"));
    }

    #[test]
    fn product_accumulates_restrictions() {
        let action = forest();
        let ba = word(&action, "b a");
        let e1 = action.graph().edge_id("e1").unwrap();
        let (img, rest) = action.act_edge(&ba, e1).unwrap();
        // b·(a·e1) = b·e2 = e5; restriction b|_{e2} ∘ a|_{e1} = a ∘ u = a
        assert_eq!(action.graph().edge_name(img), "e5");
        assert_eq!(rest, word(&action, "a"));
    }

    #[test]
    fn path_action_threads_restrictions() {
        let action = forest();
        let a = word(&action, "a");
        let e1e1 = path(&action, &["e1", "e1"]);
        let (img, _) = action.act_path(&a, &e1e1).unwrap();
        assert_eq!(img, path(&action, &["e2", "e1"]));

        let e3 = path(&action, &["e3"]);
        let (img, rest) = action.act_path(&a, &e3).unwrap();
        assert_eq!(img, path(&action, &["e6"]));
        assert_eq!(rest, word(&action, "b"));

        // units act trivially
        let u = action.unit_word("u").unwrap();
        let (img, rest) = action.act_path(&u, &e1e1).unwrap();
        assert_eq!(img, e1e1);
        assert_eq!(rest, Word::unit(action.graph().vertex_id("u").unwrap()));
    }

    #[test]
    fn non_composable_action_is_rejected() {
        let action = forest();
        let a = word(&action, "a"); // d(a) = u
        let e2 = action.graph().edge_id("e2").unwrap(); // r(e2) = v
        assert!(action.act_edge(&a, e2).is_err());
    }

    #[test]
    fn identity_decision_on_units_and_generators() {
        let action = forest();
        let u = action.unit_word("u").unwrap();
        assert!(action.is_identity(&u, Caps::default()).unwrap().is_true());

        let a = word(&action, "a");
        match action.is_identity(&a, Caps::default()).unwrap() {
            Decision::False(w) => {
                // d(a) ≠ t(a), so already the empty path is a witness
                assert_eq!(w.path, Path::vertex(action.graph().vertex_id("u").unwrap()));
            }
            other => panic!("expected False, got {other:?}"),
        }
    }

    #[test]
    fn loop_word_is_not_identity() {
        let action = forest();
        let cb = word(&action, "c b"); // a loop at v
        match action.is_identity(&cb, Caps::default()).unwrap() {
            Decision::False(w) => {
                assert_eq!(w.path, path(&action, &["e2"]));
                assert_eq!(w.image, path(&action, &["e6"]));
            }
            other => panic!("expected False, got {other:?}"),
        }
    }

    #[test]
    fn restriction_identity_from_rules() {
        let action = forest();
        // a|_{e3} = b
        let a = word(&action, "a");
        let e3 = path(&action, &["e3"]);
        let rest = action.restrict_path(&a, &e3).unwrap();
        let b = word(&action, "b");
        assert!(action.words_equal(&rest, &b, Caps::default()).unwrap().is_true());
        // reflexivity and fiber mismatch
        assert!(action.words_equal(&a, &a, Caps::default()).unwrap().is_true());
        assert!(action.words_equal(&a, &b, Caps::default()).unwrap().is_false());
    }

    #[test]
    fn mistyped_image_restriction_is_caught_before_any_matrix_work() {
        // swapping a's restriction at e1 to b is ill-typed
        // (d(b) = v while s(e1) = u): validation rejects it up front
        let mut spec = parse_spec(include_str!("../fixtures/forest.ssg"))
            .unwrap()
            .into_spec()
            .unwrap();
        let a = spec.decls.id("a").unwrap();
        let b = spec.decls.id("b").unwrap();
        let e1 = spec.graph.edge_id("e1").unwrap();
        for rule in &mut spec.rules {
            if rule.gen == a && rule.edge == e1 {
                rule.restriction = RawRestriction::Tokens(vec![Token::new(b)]);
            }
        }
        let report = spec.validate();
        assert!(!report.is_valid());
        assert!(spec.into_action().is_err());
    }

    #[test]
    fn distinct_generators_differ_with_witness() {
        let action = lamplighter();
        let a = word(&action, "a");
        let b = word(&action, "b");
        match action.words_equal(&a, &b, Caps::default()).unwrap() {
            Decision::False(w) => {
                assert_eq!(w.path, path(&action, &["e1"]));
                // a·e1 = e2 while b·e1 = e1
                assert_eq!(w.image, path(&action, &["e2"]));
            }
            other => panic!("expected False, got {other:?}"),
        }
    }

    #[test]
    fn tiny_caps_yield_unknown() {
        let action = lamplighter();
        // a word whose state set has more than one element
        let w = word(&action, "b");
        let caps = Caps {
            state_cap: 1,
            depth_cap: 64,
        };
        assert!(action.is_identity(&w, caps).unwrap().is_unknown());
        // a depth cap of 1 stops before the closure of b's restriction states
        let shallow = Caps {
            state_cap: 100,
            depth_cap: 1,
        };
        match action.is_identity(&w, shallow).unwrap() {
            Decision::Unknown(CapHit::DepthCap(1)) => {}
            other => panic!("expected a depth-cap Unknown, got {other:?}"),
        }
        assert!(action
            .is_identity(&w, Caps { state_cap: 0, depth_cap: 1 })
            .is_err());
    }

    #[test]
    fn single_vertex_automaton_relations() {
        // the four-state binary automaton: all generators are involutions
        // as actions, b c d collapses to the identity, a d has order 4 and
        // a b has order 16 — all decided by the restriction search even
        // though the words are freely reduced and up to 32 tokens long
        let action = parse_spec(include_str!("../fixtures/grigorchuk.ssg"))
            .unwrap()
            .into_action()
            .unwrap();
        let caps = Caps::default();
        let decide = |text: &str| action.is_identity(&word(&action, text), caps).unwrap();
        for text in ["a a", "b b", "c c", "d d", "b c d", "d c b"] {
            assert!(decide(text).is_true(), "{text} should act trivially");
        }
        assert!(decide("a d").is_false());
        assert!(decide("a d a d").is_false());
        assert!(decide("a d a d a d a d").is_true());

        let ab = word(&action, "a b");
        let mut power = ab.clone();
        for _ in 1..16 {
            power = power.compose(action.decls(), &ab).unwrap();
        }
        assert_eq!(power.len(), 32);
        assert!(action.is_identity(&power, caps).unwrap().is_true());
        let half = word(&action, "a b a b a b a b a b a b a b a b");
        assert!(action.is_identity(&half, caps).unwrap().is_false());
    }

    #[test]
    fn axioms_hold_on_all_fixtures() {
        let grigorchuk = parse_spec(include_str!("../fixtures/grigorchuk.ssg"))
            .unwrap()
            .into_action()
            .unwrap();
        for (action, depth) in [
            (forest(), 4),
            (lamplighter(), 5),
            (bundle(), 4),
            (grigorchuk, 5),
        ] {
            let report = action.check_properties(CheckParams {
                depth,
                samples: 200,
                seed: 7,
                caps: Caps::default(),
            });
            assert!(report.passed(), "failures: {:?}", report.failures);
            assert_eq!(report.unknowns, 0);
        }
    }
}
