//! The self-similar trace: exact values, tolerance mode, and honest caps.
//!
//! Run with: cargo run --example self_similar_trace

use ssga::cstar::{trace, trace_properties, TraceParams, TracePropertyParams};
use ssga::parse::{parse_lincomb, parse_spec};

fn main() {
    let forest = parse_spec(include_str!("../fixtures/forest.ssg"))
        .unwrap()
        .into_action()
        .unwrap();
    let params = TraceParams::default();

    for text in ["1*a", "1*u", "1*u + 1*v + 1*w", "1*a + 1*a^-1"] {
        let x = parse_lincomb(&forest, text).unwrap();
        let result = trace(&forest, &x, &params).unwrap();
        println!(
            "trace({text}) = {} [{}] after {} levels",
            result.value, result.convergence, result.levels_used
        );
    }

    // the lamplighter's lamp generator: the normalized fixed counts 2/2^n
    // shrink forever, so exactness never fires; deep levels meet the
    // tolerance, shallow caps are reported as cap hits
    let lamp = parse_spec(include_str!("../fixtures/lamplighter.ssg"))
        .unwrap()
        .into_action()
        .unwrap();
    let b = parse_lincomb(&lamp, "1*b").unwrap();
    for max_level in [6, 40] {
        let result = trace(
            &lamp,
            &b,
            &TraceParams {
                max_level,
                ..params
            },
        )
        .unwrap();
        let (re, _) = result.value_f64();
        println!(
            "lamplighter trace(b), max_level {max_level}: {re:.3e} [{}]",
            result.convergence
        );
    }

    // the trace laws on random elements
    let report = trace_properties(&forest, &TracePropertyParams::default()).unwrap();
    println!(
        "trace laws over {} samples: {} checks, {} failures",
        report.samples,
        report.checks_run,
        report.failures.len()
    );
}
