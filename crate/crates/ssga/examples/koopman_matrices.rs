//! Finite-level matrices of the Koopman representation.
//!
//! Run with: cargo run --example koopman_matrices

use ssga::level::{filtration_dims, intertwining_check, level_matrix};
use ssga::parse::{parse_spec, parse_word};

fn main() {
    let action = parse_spec(include_str!("../fixtures/forest.ssg"))
        .unwrap()
        .into_action()
        .unwrap();
    let graph = action.graph();

    // the filtration: dim grows by a factor p, complements carry the rest
    for n in 0..=4 {
        let dims = filtration_dims(graph, n).unwrap();
        println!(
            "level {n}: dim = {}, new complement dim = {}",
            dims.dim, dims.complement_dim
        );
    }

    // level-0 and level-1 matrices of the generator a: the single 1 of the
    // vertex matrix inflates into an identity block one level down
    let a = parse_word(&action, "a").unwrap();
    for n in [0, 1] {
        println!("matrix of a at level {n}:");
        print!("{}", level_matrix(&action, &a, n).unwrap());
    }

    // multiplicativity and the embedding intertwiner, exactly
    let b = parse_word(&action, "b").unwrap();
    let ba = b.compose(action.decls(), &a).unwrap();
    let n = 3;
    let product = level_matrix(&action, &b, n)
        .unwrap()
        .mul(&level_matrix(&action, &a, n).unwrap());
    assert_eq!(product, level_matrix(&action, &ba, n).unwrap());
    println!("pi_{n}(b) pi_{n}(a) = pi_{n}(b a): exact");

    for n in 0..=3 {
        assert!(intertwining_check(&action, &ba, n).unwrap());
    }
    println!("J_n pi_n(b a) = pi_(n+1)(b a) J_n for n <= 3: exact");

    // level matrices of words are partial permutations
    let m = level_matrix(&action, &ba, 4).unwrap();
    println!(
        "pi_4(b a): {}x{} with {} entries, partial permutation: {}",
        m.nrows,
        m.ncols,
        m.nnz(),
        m.is_partial_permutation()
    );
}
