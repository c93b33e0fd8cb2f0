//! Shared fixtures and independent oracles for the integration suites.
//!
//! The oracles here deliberately avoid the code paths they check: fixed
//! points are counted by enumerating a level and acting on every path, and
//! trace levels are recomputed from matrix diagonals.
#![allow(dead_code)] // each test binary uses its own subset

use num::bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use ssga::action::Action;
use ssga::parse::parse_spec;
use ssga::word::{GenId, Token, Word};

pub const FOREST: &str = include_str!("../../fixtures/forest.ssg");
pub const LAMPLIGHTER: &str = include_str!("../../fixtures/lamplighter.ssg");
pub const BUNDLE: &str = include_str!("../../fixtures/bundle.ssg");

pub fn fixture(text: &str) -> Action {
    parse_spec(text).unwrap().into_action().unwrap()
}

pub fn fixture_path(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// Brute-force oracle for fixed-path counts: enumerate `E^n` and act.
pub fn brute_force_fixed(action: &Action, w: &Word, n: usize) -> BigInt {
    let basis = action.graph().enumerate_level(n);
    let count = basis
        .paths
        .iter()
        .filter(|alpha| {
            alpha.range() == w.domain(action.decls())
                && action.act_path(w, alpha).unwrap().0 == **alpha
        })
        .count();
    BigInt::from(count)
}

/// A deterministic random freely reduced composable word of length
/// `1..=max_len`, or None when the walk gets stuck.
pub fn random_word(action: &Action, rng: &mut ChaCha8Rng, max_len: usize) -> Option<Word> {
    let decls = action.decls();
    let gen_count = decls.len();
    if gen_count == 0 {
        return None;
    }
    let first = Token {
        gen: GenId(rng.gen_range(0..gen_count)),
        inverse: rng.gen_bool(0.5),
    };
    let mut tokens = vec![first];
    let target_len = rng.gen_range(1..=max_len);
    while tokens.len() < target_len {
        let need = decls.token_domain(*tokens.last().unwrap());
        let mut options = Vec::new();
        for g in decls.ids() {
            for inverse in [false, true] {
                let tok = Token { gen: g, inverse };
                if decls.token_target(tok) == need && !tok.cancels(*tokens.last().unwrap()) {
                    options.push(tok);
                }
            }
        }
        if options.is_empty() {
            break;
        }
        tokens.push(options[rng.gen_range(0..options.len())]);
    }
    Word::from_tokens(decls, tokens).ok()
}

/// All freely reduced composable words over the generators, up to a length.
pub fn all_words_up_to(action: &Action, max_len: usize) -> Vec<Word> {
    let decls = action.decls();
    let mut tokens_all = Vec::new();
    for g in decls.ids() {
        tokens_all.push(Token::new(g));
        tokens_all.push(Token::new(g).inverted());
    }
    let mut out = Vec::new();
    let mut stack: Vec<Vec<Token>> = tokens_all.iter().map(|&t| vec![t]).collect();
    while let Some(tokens) = stack.pop() {
        out.push(Word::from_tokens(decls, tokens.clone()).expect("composable by construction"));
        if tokens.len() == max_len {
            continue;
        }
        let need = decls.token_domain(*tokens.last().unwrap());
        for &tok in &tokens_all {
            if decls.token_target(tok) == need && !tok.cancels(*tokens.last().unwrap()) {
                let mut next = tokens.clone();
                next.push(tok);
                stack.push(next);
            }
        }
    }
    out
}
