//! Level orbits and finite-depth transitivity certificates.
//!
//! Run with: cargo run --example orbits_and_transitivity

use ssga::orbit::{fixed_paths_count, is_level_transitive, level_orbits};
use ssga::parse::{parse_spec, parse_word};

fn main() {
    for (name, text) in [
        ("forest", include_str!("../fixtures/forest.ssg")),
        ("lamplighter", include_str!("../fixtures/lamplighter.ssg")),
        ("bundle", include_str!("../fixtures/bundle.ssg")),
    ] {
        let action = parse_spec(text).unwrap().into_action().unwrap();
        let report = is_level_transitive(&action, 6);
        println!("{name}: {}", report.verdict());

        let partition = level_orbits(&action, 1);
        let basis = action.graph().enumerate_level(1);
        for orbit in &partition.orbits {
            let members: Vec<String> = orbit
                .iter()
                .map(|&i| basis.paths[i].display(action.graph()))
                .collect();
            println!("  level-1 orbit: {{{}}}", members.join(", "));
        }
    }

    // fixed-path counts feed the trace: the lamplighter's lamp generator
    // fixes exactly two paths per level (e1^n and e1^{n-1} e2)
    let lamp = parse_spec(include_str!("../fixtures/lamplighter.ssg"))
        .unwrap()
        .into_action()
        .unwrap();
    let b = parse_word(&lamp, "b").unwrap();
    let counts: Vec<String> = (0..=8)
        .map(|n| fixed_paths_count(&lamp, &b, n, 10_000).unwrap().to_string())
        .collect();
    println!("lamplighter, fixed paths of b per level: {}", counts.join(" "));
}
