//! The `.ssg` action-spec text format, plus word and linear-combination
//! syntax used in command-line flags.
//!
//! The format is line oriented; `#` starts a comment and blank lines are
//! skipped. Four kinds of lines, in any order:
//!
//! ```text
//! vertices: u v w
//! edge e1: u -> u          # source -> range
//! generator a: u -> v      # d(a) -> t(a)
//! rule a: e1 -> e2 | u     # a·e1 = e2, a|_{e1} = u
//! ```
//!
//! The restriction after `|` is a space-separated word: generator tokens
//! with optional `^-1` for inverses (leftmost applied last), or a single
//! vertex name for a unit restriction. Grammar errors and unknown names are
//! reported with line and column; whether the rule table itself is a valid
//! self-similar action is checked later by [`ActionSpec::validate`].
//!
//! Identifiers are `[A-Za-z_][A-Za-z0-9_]*` and vertex and generator names
//! must not collide (restriction tokens would otherwise be ambiguous).

use crate::action::{Action, ActionSpec, RawRestriction, RawRule};
use crate::cstar::LinComb;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{rational_from_str, Rational, Scalar};
use crate::word::{GeneratorDecls, Token, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned<T> {
    pub value: T,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeDecl {
    pub name: Spanned<String>,
    pub source: Spanned<String>,
    pub range: Spanned<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorDecl {
    pub name: Spanned<String>,
    pub domain: Spanned<String>,
    pub target: Spanned<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleDecl {
    pub generator: Spanned<String>,
    pub edge: Spanned<String>,
    pub image: Spanned<String>,
    /// Tokens as written, e.g. `["a^-1", "b"]`, or a single vertex name.
    pub restriction: Vec<Spanned<String>>,
}

/// A parsed `.ssg` file: syntactically checked, with source locations kept
/// for later semantic diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecFile {
    pub vertices: Vec<Spanned<String>>,
    pub edges: Vec<EdgeDecl>,
    pub generators: Vec<GeneratorDecl>,
    pub rules: Vec<RuleDecl>,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Splits `s` into whitespace-separated words with 1-based column offsets
/// relative to `base`.
fn split_spanned(s: &str, line: usize, base: usize) -> Vec<Spanned<String>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in s.split_whitespace() {
        let found = s[offset..].find(part).expect("substring present") + offset;
        out.push(Spanned {
            value: part.to_string(),
            line,
            column: base + found + 1,
        });
        offset = found + part.len();
    }
    out
}

fn expect_ident(sp: &Spanned<String>, what: &str) -> Result<()> {
    if is_ident(&sp.value) {
        Ok(())
    } else {
        Err(err(
            sp.line,
            sp.column,
            format!("invalid {what} identifier `{}`", sp.value),
        ))
    }
}

/// Parses `LHS -> RHS` out of a declaration tail.
fn parse_arrow(tail: &str, line: usize, base: usize) -> Result<(Spanned<String>, Spanned<String>)> {
    let Some(pos) = tail.find("->") else {
        return Err(err(line, base + 1, "expected `->`"));
    };
    let left = split_spanned(&tail[..pos], line, base);
    let right = split_spanned(&tail[pos + 2..], line, base + pos + 2);
    match (left.as_slice(), right.as_slice()) {
        ([l], [r]) => Ok((l.clone(), r.clone())),
        ([], _) => Err(err(line, base + 1, "expected a name before `->`")),
        (_, []) => Err(err(line, base + pos + 3, "expected a name after `->`")),
        ([l, extra, ..], _) | (_, [l, extra, ..]) => Err(err(
            extra.line,
            extra.column,
            format!("unexpected token `{}` after `{}`", extra.value, l.value),
        )),
    }
}

/// Parses `.ssg` text into a [`SpecFile`]. Only grammar is checked here.
pub fn parse_spec(text: &str) -> Result<SpecFile> {
    let mut spec = SpecFile {
        vertices: Vec::new(),
        edges: Vec::new(),
        generators: Vec::new(),
        rules: Vec::new(),
    };
    let mut saw_vertices = false;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        if content.trim().is_empty() {
            continue;
        }
        let start = content.len() - content.trim_start().len();
        let trimmed = content.trim();

        if let Some(rest) = trimmed.strip_prefix("vertices:") {
            if saw_vertices {
                return Err(err(line_no, start + 1, "vertices already declared"));
            }
            saw_vertices = true;
            let names = split_spanned(rest, line_no, start + "vertices:".len());
            if names.is_empty() {
                return Err(err(line_no, start + 1, "expected at least one vertex name"));
            }
            for sp in &names {
                expect_ident(sp, "vertex")?;
            }
            spec.vertices = names;
        } else if let Some(rest) = trimmed.strip_prefix("edge ") {
            let (name, tail, tail_base) = parse_name_colon(rest, line_no, start + 5)?;
            expect_ident(&name, "edge")?;
            let (source, range) = parse_arrow(tail, line_no, tail_base)?;
            expect_ident(&source, "vertex")?;
            expect_ident(&range, "vertex")?;
            spec.edges.push(EdgeDecl {
                name,
                source,
                range,
            });
        } else if let Some(rest) = trimmed.strip_prefix("generator ") {
            let (name, tail, tail_base) = parse_name_colon(rest, line_no, start + 10)?;
            expect_ident(&name, "generator")?;
            let (domain, target) = parse_arrow(tail, line_no, tail_base)?;
            expect_ident(&domain, "vertex")?;
            expect_ident(&target, "vertex")?;
            spec.generators.push(GeneratorDecl {
                name,
                domain,
                target,
            });
        } else if let Some(rest) = trimmed.strip_prefix("rule ") {
            let (gen, tail, tail_base) = parse_name_colon(rest, line_no, start + 5)?;
            expect_ident(&gen, "generator")?;
            let Some(bar) = tail.find('|') else {
                return Err(err(line_no, tail_base + 1, "expected `| restriction`"));
            };
            let (edge, image) = parse_arrow(&tail[..bar], line_no, tail_base)?;
            expect_ident(&edge, "edge")?;
            expect_ident(&image, "edge")?;
            let restriction = split_spanned(&tail[bar + 1..], line_no, tail_base + bar + 1);
            if restriction.is_empty() {
                return Err(err(
                    line_no,
                    tail_base + bar + 2,
                    "expected a restriction word after `|`",
                ));
            }
            for sp in &restriction {
                let base = sp.value.strip_suffix("^-1").unwrap_or(&sp.value);
                if !is_ident(base) {
                    return Err(err(
                        sp.line,
                        sp.column,
                        format!("invalid restriction token `{}`", sp.value),
                    ));
                }
            }
            spec.rules.push(RuleDecl {
                generator: gen,
                edge,
                image,
                restriction,
            });
        } else {
            return Err(err(
                line_no,
                start + 1,
                format!(
                    "expected `vertices:`, `edge`, `generator` or `rule`, found `{}`",
                    trimmed.split_whitespace().next().unwrap_or(trimmed)
                ),
            ));
        }
    }

    if !saw_vertices {
        return Err(err(1, 1, "missing `vertices:` declaration"));
    }
    Ok(spec)
}

/// Parses `NAME: tail`, returning the name, the tail and its base offset.
fn parse_name_colon(
    rest: &str,
    line: usize,
    base: usize,
) -> Result<(Spanned<String>, &str, usize)> {
    let Some(colon) = rest.find(':') else {
        return Err(err(line, base + 1, "expected `:` after the name"));
    };
    let names = split_spanned(&rest[..colon], line, base);
    match names.as_slice() {
        [name] => Ok((name.clone(), &rest[colon + 1..], base + colon + 1)),
        [] => Err(err(line, base + 1, "expected a name before `:`")),
        [_, extra, ..] => Err(err(
            extra.line,
            extra.column,
            format!("unexpected token `{}` before `:`", extra.value),
        )),
    }
}

impl SpecFile {
    /// Resolves names into a typed [`ActionSpec`]. Graph-level problems
    /// (duplicate ids, dangling endpoints, empty range fibers) surface as
    /// validation failures; unknown names referenced by generators or rules
    /// are semantic errors located at their source position.
    pub fn into_spec(&self) -> Result<ActionSpec> {
        let vertices: Vec<&str> = self.vertices.iter().map(|s| s.value.as_str()).collect();
        let edge_triples: Vec<(&str, &str, &str)> = self
            .edges
            .iter()
            .map(|e| {
                (
                    e.name.value.as_str(),
                    e.source.value.as_str(),
                    e.range.value.as_str(),
                )
            })
            .collect();
        let graph = Graph::build(&vertices, &edge_triples)?;

        for gen in &self.generators {
            if graph.vertex_id(&gen.name.value).is_ok() {
                return Err(err(
                    gen.name.line,
                    gen.name.column,
                    format!(
                        "generator `{}` collides with a vertex name",
                        gen.name.value
                    ),
                ));
            }
        }

        let mut decl_rows = Vec::new();
        for gen in &self.generators {
            let d = graph.vertex_id(&gen.domain.value).map_err(|_| {
                err(
                    gen.domain.line,
                    gen.domain.column,
                    format!("unknown vertex `{}`", gen.domain.value),
                )
            })?;
            let t = graph.vertex_id(&gen.target.value).map_err(|_| {
                err(
                    gen.target.line,
                    gen.target.column,
                    format!("unknown vertex `{}`", gen.target.value),
                )
            })?;
            decl_rows.push((gen.name.value.clone(), d, t));
        }
        let decls = GeneratorDecls::new(decl_rows)?;

        let mut rules = Vec::new();
        for rule in &self.rules {
            let gen = decls.id(&rule.generator.value).map_err(|_| {
                err(
                    rule.generator.line,
                    rule.generator.column,
                    format!("unknown generator `{}`", rule.generator.value),
                )
            })?;
            let edge = graph.edge_id(&rule.edge.value).map_err(|_| {
                err(
                    rule.edge.line,
                    rule.edge.column,
                    format!("unknown edge `{}`", rule.edge.value),
                )
            })?;
            let image = graph.edge_id(&rule.image.value).map_err(|_| {
                err(
                    rule.image.line,
                    rule.image.column,
                    format!("unknown edge `{}`", rule.image.value),
                )
            })?;
            let restriction = resolve_restriction(&graph, &decls, &rule.restriction)?;
            rules.push(RawRule {
                gen,
                edge,
                image,
                restriction,
            });
        }

        Ok(ActionSpec {
            graph,
            decls,
            rules,
        })
    }

    /// Parses, resolves and validates in one go.
    pub fn into_action(&self) -> Result<Action> {
        self.into_spec()?.into_action()
    }

    /// Canonical text form; `parse_spec(serialize(..))` reproduces the file.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str("vertices:");
        for v in &self.vertices {
            out.push(' ');
            out.push_str(&v.value);
        }
        out.push('\n');
        for e in &self.edges {
            out.push_str(&format!(
                "edge {}: {} -> {}\n",
                e.name.value, e.source.value, e.range.value
            ));
        }
        for g in &self.generators {
            out.push_str(&format!(
                "generator {}: {} -> {}\n",
                g.name.value, g.domain.value, g.target.value
            ));
        }
        for r in &self.rules {
            let restriction: Vec<&str> =
                r.restriction.iter().map(|t| t.value.as_str()).collect();
            out.push_str(&format!(
                "rule {}: {} -> {} | {}\n",
                r.generator.value,
                r.edge.value,
                r.image.value,
                restriction.join(" ")
            ));
        }
        out
    }
}

fn resolve_restriction(
    graph: &Graph,
    decls: &GeneratorDecls,
    tokens: &[Spanned<String>],
) -> Result<RawRestriction> {
    if tokens.len() == 1 && !tokens[0].value.ends_with("^-1") {
        if let Ok(v) = graph.vertex_id(&tokens[0].value) {
            return Ok(RawRestriction::Unit(v));
        }
    }
    let mut resolved = Vec::new();
    for sp in tokens {
        let (base, inverse) = match sp.value.strip_suffix("^-1") {
            Some(base) => (base, true),
            None => (sp.value.as_str(), false),
        };
        let gen = decls.id(base).map_err(|_| {
            err(
                sp.line,
                sp.column,
                format!("unknown generator `{base}` in restriction"),
            )
        })?;
        resolved.push(Token {
            gen,
            inverse,
        });
    }
    Ok(RawRestriction::Tokens(resolved))
}

/// Parses a word given as space-separated tokens: generator names with
/// optional `^-1`, or a single vertex name for a unit.
pub fn parse_word(action: &Action, text: &str) -> Result<Word> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    if parts.is_empty() {
        return Err(err(1, 1, "empty word"));
    }
    let mut factors = Vec::new();
    for part in parts {
        let (base, inverse) = match part.strip_suffix("^-1") {
            Some(base) => (base, true),
            None => (part, false),
        };
        if !inverse {
            if let Ok(v) = action.graph().vertex_id(base) {
                factors.push(Word::unit(v));
                continue;
            }
        }
        let gen = action.decls().id(base)?;
        let token = if inverse {
            Token::new(gen).inverted()
        } else {
            Token::new(gen)
        };
        factors.push(Word::Product(vec![token]));
    }
    let mut word = factors[0].clone();
    for factor in &factors[1..] {
        word = word.compose(action.decls(), factor)?;
    }
    Ok(word)
}

/// Parses a linear combination such as `1*u + 0.5*b a - 2*a^-1`.
///
/// Terms are `+`/`-` separated; each term is an optional rational or decimal
/// coefficient followed by `*` and a word. A bare word means coefficient 1.
pub fn parse_lincomb(action: &Action, text: &str) -> Result<LinComb> {
    let mut result = LinComb::zero();
    let mut term = String::new();
    let mut terms: Vec<(Rational, String)> = Vec::new();
    let mut sign = Rational::from_integer(1.into());

    // split on top-level +/- (a '-' directly after '^' belongs to an inverse marker)
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if (c == '+' || c == '-') && !term.trim_end().ends_with('^') {
            if term.trim().is_empty() && c == '-' {
                sign = -sign;
            } else if term.trim().is_empty() && c == '+' {
                // leading plus, ignore
            } else {
                terms.push((sign.clone(), term.clone()));
                sign = if c == '-' {
                    -Rational::from_integer(1.into())
                } else {
                    Rational::from_integer(1.into())
                };
                term.clear();
            }
            i += 1;
            continue;
        }
        term.push(c);
        i += 1;
    }
    if term.trim().is_empty() {
        return Err(err(1, 1, "empty linear combination"));
    }
    terms.push((sign, term));

    for (sign, body) in terms {
        let (coeff, word_text) = match body.split_once('*') {
            Some((num, rest)) => {
                let coeff = rational_from_str(num).ok_or_else(|| {
                    err(1, 1, format!("invalid coefficient `{}`", num.trim()))
                })?;
                (coeff, rest.to_string())
            }
            None => (Rational::from_integer(1.into()), body),
        };
        if word_text.trim().is_empty() {
            return Err(err(1, 1, "term is missing a word after `*`"));
        }
        let word = parse_word(action, &word_text)?;
        let scalar = Scalar::from_rational(sign * coeff);
        if !scalar.is_zero() {
            result.add_term(word, scalar);
        }
    }
    Ok(result)
}
