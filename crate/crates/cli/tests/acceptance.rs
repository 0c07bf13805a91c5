//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::process::{Command, ExitCode, Output};
use std::time::Instant;

use hamb_cli::format::parse_graph;
use hamb_core::generate::{gen_family, gen_gnp};
use hamb_core::suites::{self, SuiteResult};
use hamb_core::{Family, Graph, GraphKind};

fn hamb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamb"))
        .args(args)
        .env_remove("HAMB_MAX_N")
        .output()
        .expect("hamb binary runs")
}

/// `gen` output re-parses to the generator's graph; repeated `estimate`
/// runs are byte-identical; `selftest` exits 0.
fn cli_determinism() -> Result<usize, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut checks = 0;

    let cases: Vec<(Vec<String>, Graph)> = {
        let mut v = Vec::new();
        for (kind, kind_name) in [
            (GraphKind::Undirected, "undirected"),
            (GraphKind::Digraph, "directed"),
            (GraphKind::SymmetricDigraph, "symmetric"),
        ] {
            for (n, p, seed) in [(10, "0.5", 7u64), (64, "0.2", 1), (1, "0.5", 0), (17, "1", 3)] {
                let args = ["--model", "gnp", "--n", &n.to_string(), "--p", p, "--seed", &seed.to_string(), "--kind", kind_name]
                    .map(String::from)
                    .to_vec();
                v.push((args, gen_gnp(n, p.parse().unwrap(), seed, kind).unwrap()));
            }
            for (family, name) in [(Family::Complete, "complete"), (Family::Cycle, "cycle"), (Family::Path, "path")] {
                let args = ["--model", name, "--n", "9", "--kind", kind_name].map(String::from).to_vec();
                v.push((args, gen_family(family, 9, kind).unwrap()));
            }
        }
        v
    };
    for (i, (args, expected)) in cases.iter().enumerate() {
        for format in ["text", "object"] {
            let path = dir.path().join(format!("g{i}.{format}"));
            let p = path.to_str().unwrap();
            let mut full: Vec<&str> = vec!["gen"];
            full.extend(args.iter().map(String::as_str));
            full.extend(["--format", format, "--out", p]);
            let out = hamb(&full);
            if !out.status.success() {
                return Err(format!("gen {args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
            }
            let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
            let parsed = parse_graph(&text, None, 64).map_err(|e| format!("{p}: {e}"))?;
            if &parsed != expected {
                return Err(format!("gen {args:?} --format {format} does not round-trip"));
            }
            checks += 1;
        }
    }

    let input = dir.path().join("g0.text");
    let input = input.to_str().unwrap();
    for policy in ["ascending", "follow-path:3"] {
        for json in [false, true] {
            let mut args = vec!["estimate", "--input", input, "--trials", "5000", "--seed", "2024", "--policy", policy];
            if json {
                args.push("--json");
            }
            let a = hamb(&args);
            let b = hamb(&args);
            if !a.status.success() || a.stdout != b.stdout {
                return Err(format!("estimate {policy} (json={json}) is not byte-identical"));
            }
            checks += 1;
        }
    }

    let st = hamb(&["selftest"]);
    if st.status.code() != Some(0) {
        return Err(format!("selftest exited {:?}:\n{}", st.status.code(), String::from_utf8_lossy(&st.stdout)));
    }
    Ok(checks + 1)
}

fn line(id: u32, name: &str, passed: bool, detail: String) -> bool {
    println!("[{}] criterion {id:>2}: {name:<28} {detail}", if passed { "PASS" } else { "FAIL" });
    passed
}

fn suite_line(r: &SuiteResult) -> bool {
    let mut detail = format!("{} cases, {:.2}s", r.cases, r.elapsed.as_secs_f64());
    if let Some(limit) = r.time_limit {
        detail.push_str(&format!(" (limit {}s)", limit.as_secs()));
    }
    let ok = line(r.id, r.name, r.passed(), detail);
    for f in r.failures.iter().take(5) {
        println!("        {f}");
    }
    ok
}

fn main() -> ExitCode {
    let mut all = true;
    let invariants = suites::graph_invariants(None);
    if !invariants.passed() {
        println!("graph invariants failed: {:?}", invariants.failures);
        all = false;
    }
    for suite in [
        suites::oracle_agreement,
        suites::unbiasedness_exact,
        suites::unbiasedness_statistical,
        suites::bound_validity,
        suites::dominance,
        suites::bregman_remark,
        suites::transformation,
        suites::tightness,
        suites::contraction_expansion,
    ] {
        all &= suite_line(&suite());
    }
    let started = Instant::now();
    let (ok, detail) = match cli_determinism() {
        Ok(checks) => (true, format!("{checks} checks, {:.2}s", started.elapsed().as_secs_f64())),
        Err(e) => (false, e),
    };
    all &= line(10, "cli determinism/round-trip", ok, detail);
    if all {
        println!("all acceptance criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("some acceptance criteria FAILED");
        ExitCode::FAILURE
    }
}
