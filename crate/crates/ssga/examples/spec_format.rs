//! The .ssg text format: parsing, diagnostics, round-trips, and exports.
//!
//! Run with: cargo run --example spec_format

use ssga::export::{export_dot, matrix_coo, matrix_csv_dense};
use ssga::level::level_matrix;
use ssga::parse::{parse_spec, parse_word};

fn main() {
    // a small action written inline: one vertex, two loops, the binary
    // adding machine ("odometer")
    let text = "
        # the adding machine on the binary tree
        vertices: r
        edge zero: r -> r
        edge one:  r -> r
        generator add: r -> r
        rule add: zero -> one  | r    # carry stops here
        rule add: one  -> zero | add  # carry propagates
    ";
    let spec = parse_spec(text).unwrap();
    println!("canonical form:\n{}", spec.serialize());
    let action = spec.into_action().unwrap();

    // grammar and name errors come with positions
    for bad in [
        "vertices: r\nedge zero r -> r\n",
        "vertices: r\nedge zero: r -> r\nedge one: r -> r\ngenerator g: r -> r\nrule g: zero -> two | r\n",
    ] {
        match parse_spec(bad).and_then(|s| s.into_spec().map(|_| ())) {
            Err(e) => println!("rejected: {e}"),
            Ok(()) => unreachable!("both inputs are malformed"),
        }
    }

    // the odometer acts as a full cycle on each level, so its level
    // matrices are cyclic permutations
    let add = parse_word(&action, "add").unwrap();
    let m = level_matrix(&action, &add, 2).unwrap();
    println!("level-2 matrix of the odometer, dense:");
    print!("{}", matrix_csv_dense(&m));
    println!("and as coordinates:");
    print!("{}", matrix_coo(&m));

    // the forest below the root, ready for graphviz
    println!("{}", export_dot(action.graph(), 2));
}
