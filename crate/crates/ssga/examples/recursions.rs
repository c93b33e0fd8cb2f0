//! Wreath and matrix recursions, and their iteration into level blocks.
//!
//! Run with: cargo run --example recursions

use ssga::cstar::{iterate_recursion, matrix_recursion_word, wreath_recursion};
use ssga::parse::{parse_spec, parse_word};

fn main() {
    let action = parse_spec(include_str!("../fixtures/forest.ssg"))
        .unwrap()
        .into_action()
        .unwrap();
    let graph = action.graph();

    for name in ["a", "b", "c"] {
        let w = parse_word(&action, name).unwrap();
        let wreath = wreath_recursion(&action, &w).unwrap();
        let sigma: Vec<String> = wreath
            .domain_fiber
            .iter()
            .zip(&wreath.images)
            .map(|(&e, &y)| format!("{} -> {}", graph.edge_name(e), graph.edge_name(y)))
            .collect();
        let restrictions: Vec<String> = wreath
            .restrictions
            .iter()
            .map(|r| action.display_word(r))
            .collect();
        println!(
            "{name}: sigma {{{}}}, restrictions ({})",
            sigma.join(", "),
            restrictions.join(", ")
        );

        let matrix = matrix_recursion_word(&action, &w).unwrap();
        for row in &matrix.entries {
            let cells: Vec<String> = row
                .iter()
                .map(|entry| {
                    if entry.is_zero() {
                        "0".into()
                    } else {
                        entry.display(&action)
                    }
                })
                .collect();
            println!("  [ {} ]", cells.join(" , "));
        }
    }

    // iterating the recursion twice expands each entry into a 2x2 block;
    // the support is the fiber block of the level-2 matrix
    let a = parse_word(&action, "a").unwrap();
    let iterated = iterate_recursion(&action, &a, 2).unwrap();
    println!(
        "phi^2(a): {}x{} over words, {} nonzero entries",
        iterated.rows.len(),
        iterated.cols.len(),
        iterated.entries.len()
    );
    for (&(i, j), word) in &iterated.entries {
        println!(
            "  ({}, {}) = {}",
            iterated.rows[i].display(graph),
            iterated.cols[j].display(graph),
            action.display_word(word)
        );
    }
}
