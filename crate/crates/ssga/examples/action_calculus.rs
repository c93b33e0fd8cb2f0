//! Acting on edges and paths, and reading off restrictions.
//!
//! Run with: cargo run --example action_calculus

use ssga::parse::{parse_spec, parse_word};
use ssga::Path;

fn main() {
    let action = parse_spec(include_str!("../fixtures/forest.ssg"))
        .unwrap()
        .into_action()
        .unwrap();
    let graph = action.graph();

    // single edges: a·e1 = e2 with unit restriction, a·e3 = e6 leaving b behind
    let a = parse_word(&action, "a").unwrap();
    for name in ["e1", "e3"] {
        let e = graph.edge_id(name).unwrap();
        let (image, restriction) = action.act_edge(&a, e).unwrap();
        println!(
            "a · {name} = {}, a|_{name} = {}",
            graph.edge_name(image),
            action.display_word(&restriction)
        );
    }

    // a longer path: restrictions thread through edge by edge
    let path = Path::new(
        graph,
        vec![
            graph.edge_id("e3").unwrap(),
            graph.edge_id("e2").unwrap(),
            graph.edge_id("e1").unwrap(),
        ],
    )
    .unwrap();
    let (image, restriction) = action.act_path(&a, &path).unwrap();
    println!(
        "a · ({}) = {}, restriction {}",
        path.display(graph),
        image.display(graph),
        action.display_word(&restriction)
    );

    // products compose right to left: (b a)|_e1 = b|_{a·e1} · a|_e1
    let ba = parse_word(&action, "b a").unwrap();
    let (image, restriction) = action.act_edge(&ba, graph.edge_id("e1").unwrap()).unwrap();
    println!(
        "(b a) · e1 = {}, (b a)|_e1 = {}",
        graph.edge_name(image),
        action.display_word(&restriction)
    );

    // the defining identity and the four restriction laws, sampled
    let report = action.check_properties(Default::default());
    println!(
        "axiom check: {} checks on {} samples, {} failures",
        report.checks_run,
        report.samples,
        report.failures.len()
    );
}
