//! Lower bounds for operator norms from the level representations.
//!
//! Run with: cargo run --example operator_norms

use ssga::cstar::{norm_bounds, NormParams};
use ssga::parse::{parse_lincomb, parse_spec};

fn main() {
    let action = parse_spec(include_str!("../fixtures/forest.ssg"))
        .unwrap()
        .into_action()
        .unwrap();
    let params = NormParams {
        max_level: 8,
        ..NormParams::default()
    };

    // projections and partial isometries: norm 1 at every level
    for text in ["1*u", "1*a"] {
        let x = parse_lincomb(&action, text).unwrap();
        let bounds = norm_bounds(&action, &x, &params).unwrap();
        println!(
            "norm bounds for {text}: first {:.6}, last {:.6}",
            bounds.per_level[0],
            bounds.per_level.last().unwrap()
        );
    }

    // a self-adjoint combination: the running maxima climb toward the
    // operator norm and stop moving once the levels stop contributing
    let x = parse_lincomb(&action, "1*a + 1*a^-1 + 1*c b + 1*b^-1 c^-1").unwrap();
    let bounds = norm_bounds(&action, &x, &params).unwrap();
    for (n, bound) in bounds.per_level.iter().enumerate() {
        println!("level {n}: {bound:.9}");
    }
    println!(
        "stabilized: {} (bounds only; the supremum over all levels is the norm)",
        bounds.stabilized
    );
}
