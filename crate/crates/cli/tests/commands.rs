use std::path::Path;
use std::process::Command;

use hamb_cli::format::{parse_graph, write_graph, Format};
use hamb_cli::{exit, run};
use hamb_core::bounds::parse_rational;
use hamb_core::generate::{gen_family, gen_gnp};
use hamb_core::graph::{build_digraph, build_undigraph};
use hamb_core::{Family, Graph, GraphKind};
use serde_json::Value;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn hamb(args: &[&str]) -> Out {
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let argv = std::iter::once("hamb").chain(args.iter().copied());
    let code = run(argv, &mut stdout, &mut stderr);
    Out {
        code,
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.push("--json");
    let out = hamb(&full);
    assert_eq!(out.code, 0, "{args:?} failed: {}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn write_graph_file(dir: &Path, name: &str, g: &Graph) -> String {
    write(dir, name, &write_graph(g, Format::Text))
}

fn family(f: Family, n: usize, kind: GraphKind) -> Graph {
    gen_family(f, n, kind).unwrap()
}

// --- parsing ---------------------------------------------------------------

#[test]
fn parses_text_cycle() {
    let g = parse_graph("3 3 undirected\n1 2\n2 3\n3 1\n", None, 64).unwrap();
    assert_eq!(g, Graph::Undirected(build_undigraph(3, &[(1, 2), (2, 3), (3, 1)]).unwrap()));
}

#[test]
fn parses_object_cycle() {
    let g = parse_graph(r#"{"n": 3, "kind": "directed", "edges": [[1,2],[2,3],[3,1]]}"#, None, 64).unwrap();
    assert_eq!(g, Graph::Directed(build_digraph(3, &[(1, 2), (2, 3), (3, 1)]).unwrap()));
}

#[test]
fn self_loop_is_positioned() {
    let e = parse_graph("2 1 undirected\n1 1\n", None, 64).unwrap_err();
    assert_eq!(e.line, Some(2));
    assert_eq!(e.column, Some(1));
    assert!(e.message.contains("self-loop"), "{e}");
}

#[test]
fn parse_errors_carry_positions() {
    let cases = [
        ("3 1 sideways\n1 2\n", 1, 5),
        ("x 1 directed\n", 1, 1),
        ("3 1 directed\n1 4\n", 2, 3),
        ("3 1 directed\n\n# comment\n  0 2\n", 4, 3),
        ("3 2 directed\n1 2\n", 3, 1),
        ("3 1 directed\n1 2 3\n", 2, 5),
    ];
    for (text, line, col) in cases {
        let e = parse_graph(text, None, 64).unwrap_err();
        assert_eq!((e.line, e.column), (Some(line), Some(col)), "{text:?}: {e}");
        assert!(!e.size_limit);
    }
}

#[test]
fn object_errors_name_the_edge() {
    let e = parse_graph(r#"{"n": 3, "kind": "undirected", "edges": [[1,2],[3,3]]}"#, None, 64).unwrap_err();
    assert!(e.message.starts_with("edges[1]"), "{e}");
    let e = parse_graph(r#"{"n": 3, "kind": "undirected", "edges": [[1,2]], "extra": 1}"#, None, 64).unwrap_err();
    assert!(e.line.is_some());
}

#[test]
fn oversized_graph_is_a_size_limit_error() {
    let e = parse_graph("65 0 directed\n", None, 64).unwrap_err();
    assert!(e.size_limit);
    assert!(e.message.contains("64"));
    assert!(parse_graph("64 0 directed\n", None, 64).is_ok());
}

#[test]
fn round_trip_both_formats() {
    for seed in 0..20 {
        for kind in [GraphKind::Digraph, GraphKind::Undirected, GraphKind::SymmetricDigraph] {
            let n = 1 + (seed as usize * 7) % 64;
            let g = gen_gnp(n, 0.3, seed, kind).unwrap();
            for f in [Format::Text, Format::Object] {
                let back = parse_graph(&write_graph(&g, f), Some(f), 64).unwrap();
                assert_eq!(back, g, "{kind:?} via {f}");
            }
        }
    }
}

// --- exact -----------------------------------------------------------------

#[test]
fn exact_counts() {
    let dir = tempfile::tempdir().unwrap();
    let c5 = write_graph_file(dir.path(), "c5", &family(Family::Cycle, 5, GraphKind::Undirected));
    let k4 = write_graph_file(dir.path(), "k4", &family(Family::Complete, 4, GraphKind::SymmetricDigraph));

    assert_eq!(json(&["exact", "--input", &c5])["results"]["count"], "1");
    assert_eq!(json(&["exact", "--input", &k4, "--method", "permanent"])["results"]["count"], "9");
    assert_eq!(json(&["exact", "--input", &k4, "--method", "dp"])["results"]["count"], "6");
    assert_eq!(json(&["exact", "--input", &k4, "--method", "brute"])["results"]["count"], "6");
    let c5_brute = json(&["exact", "--input", &c5, "--method", "brute"]);
    assert_eq!(c5_brute["results"]["count"], "1");
    assert_eq!(c5_brute["results"]["directed_count"], "2");
}

#[test]
fn exact_reports_size_limits() {
    let dir = tempfile::tempdir().unwrap();
    let k12 = write_graph_file(dir.path(), "k12", &family(Family::Complete, 12, GraphKind::Digraph));
    let out = hamb(&["exact", "--input", &k12, "--method", "brute"]);
    assert_eq!(out.code, exit::SIZE_LIMIT);
    assert!(out.stderr.contains("10"), "{}", out.stderr);
}

// --- estimate --------------------------------------------------------------

#[test]
fn triangle_halved_mean_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let c3 = write_graph_file(dir.path(), "c3", &family(Family::Cycle, 3, GraphKind::Undirected));
    for seed in ["0", "17", "123456789"] {
        let r = json(&["estimate", "--input", &c3, "--trials", "10", "--seed", seed]);
        assert_eq!(r["results"]["mean"], "1");
        assert_eq!(r["results"]["directed"]["mean"], "2");
        assert_eq!(r["results"]["halved"], true);
    }
}

#[test]
fn estimate_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph_file(dir.path(), "g", &gen_gnp(12, 0.5, 3, GraphKind::Digraph).unwrap());
    let args = ["estimate", "--input", &g, "--trials", "2000", "--seed", "99", "--policy", "follow-path:4"];
    let a = hamb(&args);
    let b = hamb(&args);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    let other = hamb(&["estimate", "--input", &g, "--trials", "2000", "--seed", "100", "--policy", "follow-path:4"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn non_hamiltonian_estimate_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let p6 = write_graph_file(dir.path(), "p6", &family(Family::Path, 6, GraphKind::Undirected));
    let r = json(&["estimate", "--input", &p6, "--trials", "50"]);
    assert_eq!(r["results"]["mean"], "0");
    assert_eq!(r["results"]["zero_fraction"], "1");
    assert_eq!(r["results"]["zero_trials"], 50);
}

#[test]
fn estimate_mean_round_trips_to_the_sum() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_graph_file(dir.path(), "g", &gen_gnp(9, 0.6, 11, GraphKind::Digraph).unwrap());
    let r = json(&["estimate", "--input", &g, "--trials", "300", "--seed", "5"]);
    let mean = parse_rational(r["results"]["mean"].as_str().unwrap()).unwrap();
    let sum = parse_rational(r["results"]["sum"].as_str().unwrap()).unwrap();
    assert_eq!(mean * parse_rational("300").unwrap(), sum);
}

#[test]
fn table_policy_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = write_graph_file(dir.path(), "k4", &family(Family::Complete, 4, GraphKind::SymmetricDigraph));
    let table = write(dir.path(), "b.txt", "1 1 1 1\n2 1 3 1\n1 2 1 1\n1 1 1 1\n");
    let spec = format!("table:{table}");
    let r = json(&["estimate", "--input", &k4, "--trials", "200", "--policy", &spec]);
    assert_eq!(r["results"]["policy"], spec.as_str());
    assert!(parse_rational(r["results"]["mean"].as_str().unwrap()).is_some());
}

#[test]
fn truncated_table_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = write_graph_file(dir.path(), "k4", &family(Family::Complete, 4, GraphKind::SymmetricDigraph));
    let table = write(dir.path(), "b.txt", "1 1 1 1\n2 1 3 1\n");
    let out = hamb(&["estimate", "--input", &k4, "--policy", &format!("table:{table}")]);
    assert_eq!(out.code, exit::INPUT);
    assert!(out.stderr.contains("truncated"), "{}", out.stderr);

    let wide = write(dir.path(), "w.txt", "1 1 1\n1 1 1\n1 1 1\n");
    let out = hamb(&["estimate", "--input", &k4, "--policy", &format!("table:{wide}")]);
    assert_eq!(out.code, exit::INPUT);

    let missing = dir.path().join("absent.txt");
    let out = hamb(&["estimate", "--input", &k4, "--policy", &format!("table:{}", missing.display())]);
    assert_eq!(out.code, exit::INPUT);
}

#[test]
fn bad_policy_spec_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = write_graph_file(dir.path(), "k4", &family(Family::Complete, 4, GraphKind::Undirected));
    assert_eq!(hamb(&["estimate", "--input", &k4, "--policy", "greedy"]).code, exit::USAGE);
    assert_eq!(hamb(&["estimate", "--input", &k4, "--policy", "follow-path:x"]).code, exit::USAGE);
    // out of range for this graph, caught once n is known
    assert_eq!(hamb(&["estimate", "--input", &k4, "--policy", "follow-path:5"]).code, exit::INPUT);
    assert_eq!(hamb(&["estimate", "--input", &k4, "--trials", "0"]).code, exit::USAGE);
}

// --- bounds ----------------------------------------------------------------

#[test]
fn c4_symmetric_bound_is_tight() {
    let dir = tempfile::tempdir().unwrap();
    let c4 = write_graph_file(dir.path(), "c4", &family(Family::Cycle, 4, GraphKind::SymmetricDigraph));
    let r = &json(&["bounds", "--input", &c4])["results"];
    assert_eq!(r["symmetric"]["exact"], "2");
    assert_eq!(r["symmetric"]["tight"], true);
    assert_eq!(r["count"], "2");
    assert_eq!(r["applicable_minimum"], "symmetric");
    assert_eq!(r["tight"], serde_json::json!(["symmetric"]));
}

#[test]
fn k4_undirected_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = write_graph_file(dir.path(), "k4", &family(Family::Complete, 4, GraphKind::Undirected));
    let r = &json(&["bounds", "--input", &k4])["results"];
    assert_eq!(r["minc"]["exact"], "8");
    assert_eq!(r["symmetric"]["exact"], "81/16");
    assert_eq!(r["bregman"]["exact"], Value::Null);
    let bregman: f64 = r["bregman"]["approx"].as_str().unwrap().parse().unwrap();
    // (1/2) * (3!)^(4/3) = 5.451361778...
    assert!((bregman - 5.451_361_778_496).abs() < 1e-9, "{bregman}");
    assert_eq!(r["count"], "3");
}

#[test]
fn asymmetric_digraph_has_no_symmetric_bound() {
    let dir = tempfile::tempdir().unwrap();
    let g = build_digraph(4, &[(1, 2), (2, 3), (3, 4), (4, 1), (1, 3)]).unwrap();
    let path = write_graph_file(dir.path(), "g", &Graph::Directed(g));
    let r = &json(&["bounds", "--input", &path])["results"];
    assert!(r.get("symmetric").is_none());
    assert!(r.get("minc").is_some());
    assert!(r.get("bregman").is_some());
    assert_eq!(r["count"], "1");
}

#[test]
fn bounds_text_output() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = write_graph_file(dir.path(), "k4", &family(Family::Complete, 4, GraphKind::Undirected));
    let out = hamb(&["bounds", "--input", &k4]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("symmetric.exact: 81/16\n"), "{}", out.stdout);
    assert!(out.stdout.contains("count: 3\n"));
}

// --- compare ---------------------------------------------------------------

fn csv_rows(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .map(Result::unwrap)
        .collect()
}

#[test]
fn compare_cycles() {
    let out = hamb(&["compare", "--family", "cycle", "--n", "3..8"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rows = csv_rows(&out.stdout);
    assert_eq!(rows.len(), 6);
    for row in rows {
        assert_eq!(row["new"], "2");
        assert_eq!(row["count"], "2");
        assert_eq!(row["new_tight"], "true");
    }
}

#[test]
fn compare_complete_graphs() {
    let r = json(&["compare", "--family", "complete", "--n", "4..6"]);
    let rows = r["results"]["rows"].as_array().unwrap();
    let value = |row: &Value, key: &str| -> f64 {
        let s = row[key].as_str().unwrap();
        parse_rational(s).map_or_else(|| s.parse().unwrap(), |q| {
            use num_traits::ToPrimitive;
            q.to_f64().unwrap()
        })
    };
    for row in rows {
        let (new, bregman, minc) = (value(row, "new"), value(row, "bregman"), value(row, "minc"));
        assert!(new < minc && bregman < minc, "{row}");
        if row["n"] == 4 {
            assert_eq!(row["new"], "81/8");
            assert!(new < bregman);
            assert_eq!(row["new_le_bregman"], true);
        } else {
            // past n = 4 the degree is too large for the new bound to win
            assert!(bregman < new);
            assert_eq!(row["new_le_bregman"], false);
        }
    }
}

#[test]
fn compare_empty_gnp() {
    let out = hamb(&["compare", "--family", "gnp", "--p", "0", "--n", "3..10", "--seed", "4"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    for row in csv_rows(&out.stdout) {
        for cap in ["new_cap", "minc_cap", "bregman_cap", "count"] {
            assert_eq!(row[cap], "0", "{cap}");
        }
    }
}

#[test]
fn compare_rejects_bad_ranges() {
    assert_eq!(hamb(&["compare", "--family", "cycle", "--n", "2..5"]).code, exit::USAGE);
    assert_eq!(hamb(&["compare", "--family", "cycle", "--n", "5..3"]).code, exit::USAGE);
    assert_eq!(hamb(&["compare", "--family", "gnp", "--n", "3..5", "--p", "1.5"]).code, exit::USAGE);
    assert_eq!(hamb(&["compare", "--family", "cycle", "--n", "3..65"]).code, exit::SIZE_LIMIT);
}

// --- gen -------------------------------------------------------------------

#[test]
fn gen_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["text", "object"] {
        let path = dir.path().join(format!("g.{format}"));
        let p = path.to_str().unwrap();
        let out = hamb(&["gen", "--model", "gnp", "--n", "10", "--p", "0.5", "--seed", "7", "--out", p, "--format", format]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let text = std::fs::read_to_string(&path).unwrap();
        let parsed = parse_graph(&text, None, 64).unwrap();
        assert_eq!(parsed, gen_gnp(10, 0.5, 7, GraphKind::Undirected).unwrap());
    }
}

#[test]
fn gen_complete_has_all_edges() {
    let out = hamb(&["gen", "--model", "complete", "--n", "5"]);
    assert!(out.stdout.starts_with("5 10 undirected\n"), "{}", out.stdout);
    let full = hamb(&["gen", "--model", "gnp", "--n", "7", "--p", "1", "--seed", "3"]);
    let g = parse_graph(&full.stdout, None, 64).unwrap();
    assert_eq!(g, family(Family::Complete, 7, GraphKind::Undirected));
    let directed = hamb(&["gen", "--model", "gnp", "--n", "7", "--p", "1", "--kind", "directed"]);
    assert!(directed.stdout.starts_with("7 42 directed\n"));
}

#[test]
fn gen_is_deterministic() {
    let args = ["gen", "--model", "gnp", "--n", "40", "--p", "0.3", "--seed", "12", "--format", "object"];
    assert_eq!(hamb(&args).stdout, hamb(&args).stdout);
}

// --- process-level behaviour -----------------------------------------------

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hamb"))
}

#[test]
fn env_cap_lowers_but_never_raises() {
    let dir = tempfile::tempdir().unwrap();
    let k9 = write_graph_file(dir.path(), "k9", &family(Family::Complete, 9, GraphKind::Undirected));
    let lowered = bin().args(["exact", "--input", &k9]).env("HAMB_MAX_N", "8").output().unwrap();
    assert_eq!(lowered.status.code(), Some(exit::SIZE_LIMIT));
    let fine = bin().args(["exact", "--input", &k9]).env("HAMB_MAX_N", "9").output().unwrap();
    assert_eq!(fine.status.code(), Some(0));

    let big = write(dir.path(), "big", "65 0 directed\n");
    let raised = bin().args(["bounds", "--input", &big]).env("HAMB_MAX_N", "100").output().unwrap();
    assert_eq!(raised.status.code(), Some(exit::SIZE_LIMIT));
    let gen = bin().args(["gen", "--model", "cycle", "--n", "20"]).env("HAMB_MAX_N", "10").output().unwrap();
    assert_eq!(gen.status.code(), Some(exit::SIZE_LIMIT));
}

#[test]
fn stdin_input_and_exit_codes() {
    use std::io::Write;
    let mut child = bin()
        .args(["exact"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"3 3 undirected\n1 2\n2 3\n3 1\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("count: 1\n"));

    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(exit::USAGE));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
    let missing = bin().args(["exact", "--input", "/nonexistent/graph"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(exit::INPUT));
}

#[test]
fn selftest_negative_control() {
    let out = hamb(&["selftest", "--inject-fault", "diagonal"]);
    assert_eq!(out.code, exit::SELFTEST);
    let first = out.stdout.lines().next().unwrap();
    assert!(first.starts_with("[FAIL]") && first.contains("graph invariants"), "{first}");
    assert!(out.stdout.contains("diagonal entry"));
}
