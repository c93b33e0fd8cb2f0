//! Deciding word identities through the restriction automaton.
//!
//! Run with: cargo run --example word_problem

use ssga::action::{Caps, Decision};
use ssga::parse::{parse_spec, parse_word};

fn main() {
    let action = parse_spec(include_str!("../fixtures/forest.ssg"))
        .unwrap()
        .into_action()
        .unwrap();
    let graph = action.graph();
    let caps = Caps::default();

    let show = |label: &str, decision: &Decision| match decision {
        Decision::True => println!("{label}: identity"),
        Decision::False(witness) => println!(
            "{label}: not the identity, witness {} -> {}",
            witness.path.display(graph),
            witness.image.display(graph)
        ),
        Decision::Unknown(cap) => println!("{label}: unknown ({cap})"),
    };

    // a loop at v that moves level-1 edges
    let cb = parse_word(&action, "c b").unwrap();
    show("c b", &action.is_identity(&cb, caps).unwrap());

    // its formal inverse composed back is the unit at v
    let roundtrip = cb
        .inverse()
        .compose(action.decls(), &cb)
        .unwrap();
    show("(c b)^-1 (c b)", &action.is_identity(&roundtrip, caps).unwrap());

    // a rule-table identity: the restriction of a along e3 equals b
    let a = parse_word(&action, "a").unwrap();
    let e3 = ssga::Path::new(graph, vec![graph.edge_id("e3").unwrap()]).unwrap();
    let restriction = action.restrict_path(&a, &e3).unwrap();
    let b = parse_word(&action, "b").unwrap();
    show(
        "a|_e3 = b",
        &action.words_equal(&restriction, &b, caps).unwrap(),
    );

    // the lamplighter's two loop generators differ already on one edge
    let lamp = parse_spec(include_str!("../fixtures/lamplighter.ssg"))
        .unwrap()
        .into_action()
        .unwrap();
    let a = parse_word(&lamp, "a").unwrap();
    let b = parse_word(&lamp, "b").unwrap();
    match lamp.words_equal(&a, &b, caps).unwrap() {
        Decision::False(witness) => println!(
            "lamplighter a = b? no: they differ on {}",
            witness.path.display(lamp.graph())
        ),
        other => println!("lamplighter a = b? {other:?}"),
    }

    // starving the search produces an honest Unknown instead of a wrong answer
    let tight = Caps {
        state_cap: 1,
        depth_cap: 64,
    };
    show("b under state_cap=1", &lamp.is_identity(&b, tight).unwrap());

    // a single-vertex action (plain tree automorphisms): the search settles
    // classical relations among the four automaton states
    let grig = parse_spec(include_str!("../fixtures/grigorchuk.ssg"))
        .unwrap()
        .into_action()
        .unwrap();
    for text in ["b c d", "a d a d", "a d a d a d a d"] {
        let w = parse_word(&grig, text).unwrap();
        println!(
            "grigorchuk {text}: {}",
            if grig.is_identity(&w, caps).unwrap().is_true() {
                "identity"
            } else {
                "not the identity"
            }
        );
    }
}
