//! Finite-level checks of the graph-algebra and covariance relations.
//!
//! Run with: cargo run --example cuntz_pimsner_relations

use ssga::level::{covariance_check, creation_matrix, graph_relations_check};
use ssga::parse::parse_spec;
use ssga::word::Word;

fn main() {
    let action = parse_spec(include_str!("../fixtures/forest.ssg"))
        .unwrap()
        .into_action()
        .unwrap();
    let graph = action.graph();

    // creation operator of an edge: prepends the edge to every basis path
    // below its source
    let e2 = graph.edge_id("e2").unwrap();
    let t = creation_matrix(graph, e2, 1).unwrap();
    println!("T_e2 from level 1 to level 2 has {} entries:", t.nnz());
    let from = graph.enumerate_level(1);
    let to = graph.enumerate_level(2);
    for (row, col, _) in t.entries() {
        println!(
            "  {} <- {}",
            to.paths[row].display(graph),
            from.paths[col].display(graph)
        );
    }

    // T_e* T_e = P_{s(e)} and sum of T_e T_e* over a fiber = P_u, exactly
    let relations = graph_relations_check(graph, 4).unwrap();
    println!(
        "graph relations to level 4: {} checks, {} failures",
        relations.checks_run,
        relations.failures.len()
    );

    // the covariance relation ties the representation to the creations:
    // pi_(n+1)(w) T_e = T_(w·e) pi_n(w|_e)
    let words: Vec<Word> = action.decls().ids().map(Word::generator).collect();
    let covariance = covariance_check(&action, 4, &words).unwrap();
    println!(
        "covariance to level 4: {} checks, {} failures",
        covariance.checks_run,
        covariance.failures.len()
    );
}
