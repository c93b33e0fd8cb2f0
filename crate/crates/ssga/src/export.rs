//! Text export formats: DOT forests, dense CSV and coordinate matrices.

use crate::graph::Graph;
use crate::level::LevelMatrix;
use std::fmt::Write as _;

/// Renders the forest of paths truncated at `depth` as DOT: one rooted tree
/// per vertex, node ids are path strings, edges go parent to child
/// `(α, αe)`. Output order is deterministic (prefix-major).
pub fn export_dot(graph: &Graph, depth: usize) -> String {
    let mut out = String::from("digraph forest {\n");
    out.push_str("  rankdir=TB;\n");
    for n in 0..=depth {
        let basis = graph.enumerate_level(n);
        for path in &basis.paths {
            let _ = writeln!(out, "  \"{}\";", path.display(graph));
        }
    }
    for n in 0..depth {
        let basis = graph.enumerate_level(n);
        for path in &basis.paths {
            for &e in graph.range_fiber(path.source(graph)) {
                let child = path.extend(e);
                let _ = writeln!(
                    out,
                    "  \"{}\" -> \"{}\";",
                    path.display(graph),
                    child.display(graph)
                );
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Dense CSV: one row per line, entries comma-separated, rationals printed
/// exactly (`1`, `-2`, `1/3`, `1+1/2i`).
pub fn matrix_csv_dense(matrix: &LevelMatrix) -> String {
    matrix.to_string()
}

/// Coordinate list: `row col value` per line, sorted by (row, col).
pub fn matrix_coo(matrix: &LevelMatrix) -> String {
    let mut out = String::new();
    for (r, c, v) in matrix.entries() {
        let _ = writeln!(out, "{r} {c} {v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_spec;

    fn forest_graph() -> Graph {
        parse_spec(include_str!("../fixtures/forest.ssg"))
            .unwrap()
            .into_spec()
            .unwrap()
            .graph
    }

    fn bundle_graph() -> Graph {
        parse_spec(include_str!("../fixtures/bundle.ssg"))
            .unwrap()
            .into_spec()
            .unwrap()
            .graph
    }

    #[test]
    fn dot_depth_one_has_roots_and_leaves() {
        let dot = export_dot(&forest_graph(), 1);
        // 3 roots + 6 leaves + 6 tree edges
        assert_eq!(dot.matches("->").count(), 6);
        for node in ["\"u\"", "\"v\"", "\"w\"", "\"e1\"", "\"e5\""] {
            assert!(dot.contains(node), "missing {node}");
        }
        assert!(dot.contains("\"u\" -> \"e1\""));
        assert!(dot.contains("\"u\" -> \"e3\""));
    }

    #[test]
    fn dot_depth_zero_is_isolated_roots() {
        let dot = export_dot(&forest_graph(), 0);
        assert_eq!(dot.matches("->").count(), 0);
        assert_eq!(dot.matches(';').count(), 4); // rankdir + 3 nodes
    }

    #[test]
    fn dot_respects_unequal_fibers() {
        let dot = export_dot(&bundle_graph(), 1);
        assert_eq!(dot.matches("\"u\" ->").count(), 2);
        assert_eq!(dot.matches("\"v\" ->").count(), 3);
    }

    #[test]
    fn coo_lists_entries_in_order() {
        let mut m = LevelMatrix::zero(0, 2, 0, 2);
        m.set(1, 0, crate::scalar::Scalar::one());
        m.set(0, 1, crate::scalar::Scalar::from_ratio(1, 2));
        assert_eq!(matrix_coo(&m), "0 1 1/2\n1 0 1\n");
        assert_eq!(matrix_csv_dense(&m), "0,1/2\n1,0\n");
    }
}
