use std::ops::RangeInclusive;
use std::path::Path;
use std::str::FromStr;

use hamb_core::bounds::{digraph_bounds, dominance_compare, undirected_bounds, BoundName, BoundReport, BoundValue};
use hamb_core::estimator::{estimate, EstimateReport};
use hamb_core::exact::{ham_bruteforce, ham_dp, ham_undirected, permanent_ryser};
use hamb_core::generate::{gen_family, gen_gnp};
use hamb_core::suites::{self, Fault, SuiteResult};
use hamb_core::{Count, ExactRational, Family, Graph, GraphKind, RowOrderPolicy, RowTable};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{CliError, ParseError};
use crate::report::{count, rational, real_value, RunReport};

/// Graphs up to this size get an exact count next to their bounds.
pub const EXACT_COUNT_MAX_N: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Dp,
    Brute,
    Permanent,
}

fn kind_name(g: &Graph) -> &'static str {
    match g {
        Graph::Directed(_) => "directed",
        Graph::Undirected(_) => "undirected",
    }
}

fn too_small(n: usize) -> CliError {
    hamb_core::Error::TooSmall {
        what: "undirected Hamiltonian cycles",
        n,
        min: 3,
    }
    .into()
}

pub fn cmd_exact(g: &Graph, method: Method, report: &mut RunReport) -> Result<(), CliError> {
    let d = g.as_digraph();
    report.put("kind", kind_name(g)).put("n", g.n());
    let method_name = match method {
        Method::Dp => "dp",
        Method::Brute => "brute",
        Method::Permanent => "permanent",
    };
    report.put("method", method_name);
    match (method, g) {
        (Method::Permanent, _) => {
            report.put("quantity", "permanent");
            report.put("count", count(&permanent_ryser(&d)?));
        }
        (Method::Dp, Graph::Undirected(u)) => {
            let c = ham_undirected(u)?;
            report.put("quantity", "hamiltonian cycles");
            report.put("count", count(&c));
            report.put("directed_count", count(&(c * 2u32)));
        }
        (Method::Brute, Graph::Undirected(u)) => {
            if u.n() < 3 {
                return Err(too_small(u.n()));
            }
            let directed = ham_bruteforce(&d)?;
            report.put("quantity", "hamiltonian cycles");
            report.put("count", count(&(&directed / 2u32)));
            report.put("directed_count", count(&directed));
        }
        (Method::Dp, Graph::Directed(_)) => {
            report.put("quantity", "hamiltonian cycles");
            report.put("count", count(&ham_dp(&d)?));
        }
        (Method::Brute, Graph::Directed(_)) => {
            report.put("quantity", "hamiltonian cycles");
            report.put("count", count(&ham_bruteforce(&d)?));
        }
    }
    Ok(())
}

/// A parsed `--policy` value; table files are read once `n` is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolicySpec {
    Ascending,
    FollowPath(usize),
    Table(String),
}

impl FromStr for PolicySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "ascending" {
            return Ok(PolicySpec::Ascending);
        }
        if let Some(v) = s.strip_prefix("follow-path:") {
            return v
                .parse::<usize>()
                .ok()
                .filter(|&v| v >= 1)
                .map(PolicySpec::FollowPath)
                .ok_or_else(|| format!("follow-path needs a 1-based vertex, found `{v}`"));
        }
        if let Some(path) = s.strip_prefix("table:") {
            if path.is_empty() {
                return Err("table: needs a file path".into());
            }
            return Ok(PolicySpec::Table(path.to_string()));
        }
        Err(format!(
            "unknown policy `{s}`, expected ascending, follow-path:<v> or table:<path>"
        ))
    }
}

/// Reads an `n` x `n` table of whitespace-separated integers, one row per
/// non-blank line.
pub fn parse_table(text: &str, n: usize) -> Result<RowTable, ParseError> {
    let mut rows = Vec::new();
    let mut last = 0;
    for (idx, line) in text.lines().enumerate() {
        let ln = idx + 1;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        last = ln;
        if rows.len() == n {
            return Err(ParseError::at(ln, 1, format!("table has more than {n} rows")));
        }
        let mut row = Vec::new();
        let mut col = 1;
        for tok in line.split_whitespace() {
            let offset = line[col - 1..].find(tok).expect("token is in line") + col - 1;
            col = offset + tok.len() + 1;
            let v = tok.parse::<usize>().map_err(|_| {
                ParseError::at(ln, line[..offset].chars().count() + 1, format!("expected an integer, found `{tok}`"))
            })?;
            row.push(v);
        }
        if row.len() != n {
            return Err(ParseError::at(
                ln,
                1,
                format!("table row has {} entries, expected {n}", row.len()),
            ));
        }
        rows.push(row);
    }
    if rows.len() < n {
        return Err(ParseError::at(
            last + 1,
            1,
            format!("table is truncated: {} of {n} rows", rows.len()),
        ));
    }
    RowTable::new(rows).map_err(|e| ParseError::unplaced(e.to_string()))
}

pub fn resolve_policy(spec: &PolicySpec, n: usize) -> Result<RowOrderPolicy, CliError> {
    let policy = match spec {
        PolicySpec::Ascending => RowOrderPolicy::Ascending,
        PolicySpec::FollowPath(v) => RowOrderPolicy::FollowPath { start: v - 1 },
        PolicySpec::Table(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let table = parse_table(&text, n).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
            RowOrderPolicy::Table(table)
        }
    };
    policy.validate_for(n)?;
    Ok(policy)
}

fn half(q: &ExactRational, power: u32) -> ExactRational {
    q / ExactRational::from_integer(BigInt::from(1u64 << power))
}

fn estimate_block(r: &EstimateReport) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("sum".into(), count(&r.sum));
    m.insert("mean".into(), rational(&r.mean));
    m.insert("mean_real".into(), real_value(r.mean_f64()));
    m.insert("sample_variance".into(), rational(&r.sample_variance));
    m.insert("standard_error".into(), real_value(r.standard_error));
    m
}

pub fn cmd_estimate(
    g: &Graph,
    spec: &str,
    policy: &RowOrderPolicy,
    trials: u64,
    seed: u64,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let d = g.as_digraph();
    let r = estimate(&d, policy, trials, seed)?;
    report
        .put("kind", kind_name(g))
        .put("n", g.n())
        .put("policy", spec)
        .put("trials", trials);
    match g {
        Graph::Directed(_) => {
            for (k, v) in estimate_block(&r) {
                report.put(&k, v);
            }
        }
        Graph::Undirected(_) => {
            // the doubled digraph counts each undirected cycle twice
            let mean = half(&r.mean, 1);
            report.put("halved", true);
            report.put("mean", rational(&mean));
            report.put("mean_real", real_value(r.mean_f64() / 2.0));
            report.put("sample_variance", rational(&half(&r.sample_variance, 2)));
            report.put("standard_error", real_value(r.standard_error / 2.0));
            report.put("directed", Value::Object(estimate_block(&r)));
        }
    }
    report.put("zero_trials", r.zero_trials);
    report.put("zero_fraction", real_value(r.zero_fraction));
    Ok(())
}

fn bound_json(b: &BoundValue, exact_count: Option<&Count>) -> Value {
    let mut m = Map::new();
    m.insert("exact".into(), b.exact.as_ref().map_or(Value::Null, rational));
    m.insert("approx".into(), real_value(b.approx()));
    m.insert("log_upper".into(), real_value(b.log_upper));
    m.insert("integer_cap".into(), b.integer_cap.as_ref().map_or(Value::Null, count));
    if b.exact.is_none() {
        m.insert("note".into(), Value::String("evaluated in log space, rounded up".into()));
    }
    if let Some(c) = exact_count {
        m.insert("tight".into(), Value::Bool(b.integer_cap.as_ref() == Some(c)));
    }
    Value::Object(m)
}

pub fn cmd_bounds(g: &Graph, report: &mut RunReport) -> Result<(), CliError> {
    let (bounds, degrees, exact): (BoundReport, Vec<usize>, Option<Count>) = match g {
        Graph::Directed(d) => {
            let exact = (d.n() <= EXACT_COUNT_MAX_N).then(|| ham_dp(d)).transpose()?;
            (digraph_bounds(d), d.row_sums().values().to_vec(), exact)
        }
        Graph::Undirected(u) => {
            let b = undirected_bounds(u)?;
            let exact = (u.n() <= EXACT_COUNT_MAX_N).then(|| ham_undirected(u)).transpose()?;
            (b, u.degrees().values().to_vec(), exact)
        }
    };
    report
        .put("kind", kind_name(g))
        .put("n", g.n())
        .put("degrees", degrees);
    for name in [BoundName::Minc, BoundName::Bregman, BoundName::Symmetric] {
        if let Some(b) = bounds.get(name) {
            report.put(&name.to_string(), bound_json(b, exact.as_ref()));
        }
    }
    report.put("applicable_minimum", bounds.applicable_minimum.to_string());
    report.put("count", exact.as_ref().map_or(Value::Null, count));
    if let Some(c) = &exact {
        let tight: Vec<Value> = [BoundName::Symmetric, BoundName::Bregman, BoundName::Minc]
            .into_iter()
            .filter(|&name| bounds.get(name).is_some_and(|b| b.integer_cap.as_ref() == Some(c)))
            .map(|name| Value::String(name.to_string()))
            .collect();
        report.put("tight", tight);
    }
    Ok(())
}

/// The `--family` values of `compare`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareFamily {
    Fixed(Family),
    Gnp,
}

impl FromStr for CompareFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "gnp" {
            return Ok(CompareFamily::Gnp);
        }
        s.parse::<Family>()
            .map(CompareFamily::Fixed)
            .map_err(|_| format!("unknown family `{s}`, expected complete, cycle, path or gnp"))
    }
}

/// Parses `a..b` (inclusive), `a..=b` or a single `a`.
pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let bad = || format!("expected a range like 3..8, found `{s}`");
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let a = a.trim().parse::<usize>().map_err(|_| bad())?;
    let b = b.trim().parse::<usize>().map_err(|_| bad())?;
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok(a..=b)
}

/// One line of the `compare` table.
#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub n: usize,
    pub degree_min: usize,
    pub degree_max: usize,
    pub new: String,
    pub new_cap: String,
    pub minc: String,
    pub minc_cap: String,
    pub bregman: String,
    pub bregman_cap: String,
    pub count: String,
    pub new_le_minc: bool,
    pub new_le_bregman: bool,
    pub new_tight: bool,
}

fn cap_string(b: &BoundValue) -> String {
    b.integer_cap.as_ref().map_or_else(String::new, |c| c.to_string())
}

pub fn compare_rows(
    family: CompareFamily,
    ns: RangeInclusive<usize>,
    p: f64,
    seed: u64,
) -> Result<Vec<CompareRow>, CliError> {
    let mut rows = Vec::new();
    for n in ns {
        let g = match family {
            CompareFamily::Fixed(f) => gen_family(f, n, GraphKind::SymmetricDigraph)?,
            CompareFamily::Gnp => gen_gnp(n, p, seed, GraphKind::SymmetricDigraph)?,
        }
        .as_digraph();
        let r = g.row_sums();
        let rec = dominance_compare(&r);
        let exact = (n <= EXACT_COUNT_MAX_N).then(|| ham_dp(&g)).transpose()?;
        let rat = |b: &BoundValue| b.exact.as_ref().map_or_else(String::new, hamb_core::bounds::rational_string);
        rows.push(CompareRow {
            n,
            degree_min: r.min(),
            degree_max: r.max(),
            new: rat(&rec.new),
            new_cap: cap_string(&rec.new),
            minc: rat(&rec.minc),
            minc_cap: cap_string(&rec.minc),
            bregman: crate::report::real(rec.bregman.approx()),
            bregman_cap: cap_string(&rec.bregman),
            count: exact.as_ref().map_or_else(String::new, |c| c.to_string()),
            new_le_minc: rec.new_le_minc,
            new_le_bregman: rec.new_le_bregman,
            new_tight: exact.is_some() && exact == rec.new.integer_cap,
        });
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[CompareRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("rows serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv output is utf-8")
}

pub fn rows_to_json(rows: &[CompareRow]) -> Value {
    Value::Array(rows.iter().map(|r| serde_json::to_value(r).expect("rows serialize")).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Fixed(Family),
    Gnp,
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.parse::<CompareFamily>() {
            Ok(CompareFamily::Fixed(f)) => Ok(Model::Fixed(f)),
            Ok(CompareFamily::Gnp) => Ok(Model::Gnp),
            Err(_) => Err(format!("unknown model `{s}`, expected gnp, complete, cycle or path")),
        }
    }
}

pub fn cmd_gen(model: Model, n: usize, p: f64, seed: u64, kind: GraphKind) -> Result<Graph, CliError> {
    Ok(match model {
        Model::Fixed(f) => gen_family(f, n, kind)?,
        Model::Gnp => gen_gnp(n, p, seed, kind)?,
    })
}

pub fn suite_json(r: &SuiteResult) -> Value {
    json!({
        "id": r.id,
        "name": r.name,
        "cases": r.cases,
        "passed": r.passed(),
        "failures": r.failures,
    })
}

pub fn cmd_selftest(fault: Option<Fault>) -> Vec<SuiteResult> {
    suites::all(fault)
}

/// Reads a whole input file, or stdin for `None` / `-`.
pub fn read_input(path: Option<&Path>) -> Result<Vec<u8>, CliError> {
    use std::io::Read;
    match path {
        Some(p) if p != Path::new("-") => std::fs::read(p).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        _ => {
            let mut buf = Vec::new();
            std::io::stdin()
                .read_to_end(&mut buf)
                .map_err(|source| CliError::Io {
                    path: "<stdin>".into(),
                    source,
                })?;
            Ok(buf)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_specs() {
        assert_eq!("ascending".parse(), Ok(PolicySpec::Ascending));
        assert_eq!("follow-path:3".parse(), Ok(PolicySpec::FollowPath(3)));
        assert_eq!("table:b.txt".parse(), Ok(PolicySpec::Table("b.txt".into())));
        assert!("follow-path:0".parse::<PolicySpec>().is_err());
        assert!("random".parse::<PolicySpec>().is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3..8"), Ok(3..=8));
        assert_eq!(parse_range("3..=8"), Ok(3..=8));
        assert_eq!(parse_range("5"), Ok(5..=5));
        assert!(parse_range("8..3").is_err());
        assert!(parse_range("a..3").is_err());
    }

    #[test]
    fn tables() {
        let t = parse_table("1 1 1\n1 2 1\n1 1 1\n", 3).unwrap();
        assert_eq!(t.entries()[1], vec![1, 2, 1]);
        let e = parse_table("1 1 1\n1 1 1\n", 3).unwrap_err();
        assert!(e.message.contains("truncated"));
        let e = parse_table("1 1 1\n1 x 1\n1 1 1\n", 3).unwrap_err();
        assert_eq!((e.line, e.column), (Some(2), Some(3)));
        let e = parse_table("1 1\n1 1\n1 1\n", 3).unwrap_err();
        assert_eq!(e.line, Some(1));
        // entry 3 exceeds the step-2 dimension
        assert!(parse_table("1 1 1\n3 1 1\n1 1 1\n", 3).is_err());
    }
}
