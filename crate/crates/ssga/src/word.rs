//! Groupoid words: formal composable products of generator tokens.
//!
//! A word is either a unit (a vertex, acting as the identity on its tree) or
//! a nonempty freely reduced sequence of signed generator tokens. Products
//! apply right to left, as in `d(gh) = d(h)`: in the token list
//! `x1 x2 ... xk` the rightmost token acts first, so adjacent tokens must
//! satisfy `t(x_{i+1}) = d(x_i)`.
//!
//! Free reduction (cancelling adjacent `g g^-1` pairs) is the only normal
//! form; semantic equality of words is decided by the automaton search in
//! [`crate::action`], not by rewriting.

use crate::error::{Error, Result};
use crate::graph::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token {
    pub gen: GenId,
    pub inverse: bool,
}

impl Token {
    pub fn new(gen: GenId) -> Token {
        Token {
            gen,
            inverse: false,
        }
    }

    pub fn inverted(self) -> Token {
        Token {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    pub fn cancels(self, other: Token) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }
}

/// Generator declarations: name and domain/target unit per generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorDecls {
    names: Vec<String>,
    domains: Vec<VertexId>,
    targets: Vec<VertexId>,
}

impl GeneratorDecls {
    pub fn new(decls: Vec<(String, VertexId, VertexId)>) -> Result<GeneratorDecls> {
        let mut names = Vec::new();
        let mut domains = Vec::new();
        let mut targets = Vec::new();
        for (name, d, t) in decls {
            if names.contains(&name) {
                return Err(Error::InvalidAction(format!(
                    "duplicate generator id `{name}`"
                )));
            }
            names.push(name);
            domains.push(d);
            targets.push(t);
        }
        Ok(GeneratorDecls {
            names,
            domains,
            targets,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = GenId> {
        (0..self.names.len()).map(GenId)
    }

    pub fn name(&self, g: GenId) -> &str {
        &self.names[g.0]
    }

    pub fn id(&self, name: &str) -> Result<GenId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(GenId)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// d(g), or t(g) for an inverted token.
    pub fn token_domain(&self, tok: Token) -> VertexId {
        if tok.inverse {
            self.targets[tok.gen.0]
        } else {
            self.domains[tok.gen.0]
        }
    }

    pub fn token_target(&self, tok: Token) -> VertexId {
        if tok.inverse {
            self.domains[tok.gen.0]
        } else {
            self.targets[tok.gen.0]
        }
    }

    pub fn domain(&self, g: GenId) -> VertexId {
        self.domains[g.0]
    }

    pub fn target(&self, g: GenId) -> VertexId {
        self.targets[g.0]
    }

    pub fn token_name(&self, tok: Token) -> String {
        if tok.inverse {
            format!("{}^-1", self.name(tok.gen))
        } else {
            self.name(tok.gen).to_string()
        }
    }
}

/// A groupoid element presented as a word over the generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Word {
    Unit(VertexId),
    Product(Vec<Token>),
}

impl Word {
    pub fn unit(v: VertexId) -> Word {
        Word::Unit(v)
    }

    pub fn generator(g: GenId) -> Word {
        Word::Product(vec![Token::new(g)])
    }

    /// Builds a word from a token sequence, checking composability of
    /// adjacent tokens and freely reducing. An empty (or fully cancelling)
    /// sequence yields the unit at the chain's target.
    pub fn from_tokens(decls: &GeneratorDecls, tokens: Vec<Token>) -> Result<Word> {
        if tokens.is_empty() {
            return Err(Error::InvalidAction(
                "cannot build a word from an empty token sequence without a unit vertex".into(),
            ));
        }
        for i in 0..tokens.len() - 1 {
            let left = tokens[i];
            let right = tokens[i + 1];
            if decls.token_target(right) != decls.token_domain(left) {
                return Err(Error::NonComposableTokens {
                    left: decls.token_name(left),
                    left_domain: format!("{:?}", decls.token_domain(left)),
                    right: decls.token_name(right),
                    right_target: format!("{:?}", decls.token_target(right)),
                });
            }
        }
        let target = decls.token_target(tokens[0]);
        Ok(Self::reduce(tokens, target))
    }

    /// Free reduction of an already-composable token sequence. Cancelling a
    /// composable adjacent pair keeps the remaining sequence composable, so
    /// no re-checking is needed.
    fn reduce(tokens: Vec<Token>, target_if_empty: VertexId) -> Word {
        let mut stack: Vec<Token> = Vec::with_capacity(tokens.len());
        for tok in tokens {
            if stack.last().is_some_and(|&top| top.cancels(tok)) {
                stack.pop();
            } else {
                stack.push(tok);
            }
        }
        if stack.is_empty() {
            Word::Unit(target_if_empty)
        } else {
            Word::Product(stack)
        }
    }

    /// The composition `self ∘ rhs` (rhs acts first); requires `t(rhs) = d(self)`.
    pub fn compose(&self, decls: &GeneratorDecls, rhs: &Word) -> Result<Word> {
        let d_left = self.domain(decls);
        let t_right = rhs.target(decls);
        if d_left != t_right {
            return Err(Error::NonComposableTokens {
                left: self.display(decls),
                left_domain: format!("{:?}", d_left),
                right: rhs.display(decls),
                right_target: format!("{:?}", t_right),
            });
        }
        match (self, rhs) {
            (Word::Unit(_), w) => Ok(w.clone()),
            (w, Word::Unit(_)) => Ok(w.clone()),
            (Word::Product(a), Word::Product(b)) => {
                let mut tokens = a.clone();
                tokens.extend(b.iter().copied());
                Ok(Self::reduce(tokens, self.target(decls)))
            }
        }
    }

    pub fn inverse(&self) -> Word {
        match self {
            Word::Unit(v) => Word::Unit(*v),
            Word::Product(tokens) => {
                Word::Product(tokens.iter().rev().map(|t| t.inverted()).collect())
            }
        }
    }

    pub fn domain(&self, decls: &GeneratorDecls) -> VertexId {
        match self {
            Word::Unit(v) => *v,
            Word::Product(tokens) => decls.token_domain(*tokens.last().unwrap()),
        }
    }

    pub fn target(&self, decls: &GeneratorDecls) -> VertexId {
        match self {
            Word::Unit(v) => *v,
            Word::Product(tokens) => decls.token_target(tokens[0]),
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Word::Unit(_))
    }

    /// Number of tokens (0 for a unit).
    pub fn len(&self) -> usize {
        match self {
            Word::Unit(_) => 0,
            Word::Product(tokens) => tokens.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn tokens(&self) -> &[Token] {
        match self {
            Word::Unit(_) => &[],
            Word::Product(tokens) => tokens,
        }
    }

    pub fn display(&self, decls: &GeneratorDecls) -> String {
        self.display_with(|tok| decls.token_name(tok), |v| format!("{v:?}"))
    }

    pub(crate) fn display_with(
        &self,
        token_name: impl Fn(Token) -> String,
        unit_name: impl Fn(VertexId) -> String,
    ) -> String {
        match self {
            Word::Unit(v) => unit_name(*v),
            Word::Product(tokens) => tokens
                .iter()
                .map(|&t| token_name(t))
                .collect::<Vec<_>>()
                .join(" "),
        }
    }
}
