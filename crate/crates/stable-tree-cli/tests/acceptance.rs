//! Acceptance battery: seventeen criteria, one PASS/FAIL line each.
//!
//! Criteria 1–16 run the registered verification suites through the library
//! at their documented sample sizes and check the stated wall-clock budgets;
//! criterion 17 runs every `stl` subcommand twice with the same seed and
//! compares the outputs byte for byte. The process exits non-zero if any
//! criterion fails.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use stable_tree::verify::{run_suite, SuiteConfig, SuiteReport};

const SEED: u64 = 1;

struct Criterion {
    id: usize,
    title: &'static str,
    suite: &'static str,
    alphas: &'static [f64],
    budget: Option<Duration>,
}

const fn minutes(m: u64) -> Option<Duration> {
    Some(Duration::from_secs(60 * m))
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, title: "density normalisation and p(0)", suite: "density-normalization", alphas: &[1.2, 1.5, 1.8], budget: Some(Duration::from_secs(10)) },
    Criterion { id: 2, title: "martingale mean", suite: "martingale-mean", alphas: &[1.5], budget: minutes(1) },
    Criterion { id: 3, title: "key martingale identity", suite: "martingale-key", alphas: &[1.5], budget: minutes(1) },
    Criterion { id: 4, title: "tilted Laplace transform and mean growth", suite: "sigma-tilde-laplace", alphas: &[1.5], budget: minutes(2) },
    Criterion { id: 5, title: "quadratic-variation identity", suite: "quadvar-identity", alphas: &[1.5], budget: None },
    Criterion { id: 6, title: "quadratic-variation bound", suite: "quadvar-bound", alphas: &[1.5], budget: None },
    Criterion { id: 7, title: "first cut point law", suite: "first-cut-law", alphas: &[1.5], budget: minutes(5) },
    Criterion { id: 8, title: "Brownian special case", suite: "crt-sanity", alphas: &[1.5], budget: None },
    Criterion { id: 9, title: "Prüfer codec", suite: "prufer-exhaustive", alphas: &[1.5], budget: Some(Duration::from_secs(10)) },
    Criterion { id: 10, title: "conditioned Bienaymé law", suite: "bienayme-law", alphas: &[1.5], budget: minutes(2) },
    Criterion { id: 11, title: "growth invariants", suite: "growth-invariants", alphas: &[1.5], budget: None },
    Criterion { id: 12, title: "Θ consistency", suite: "theta-consistency", alphas: &[1.5], budget: None },
    Criterion { id: 13, title: "first-stick formula", suite: "first-stick", alphas: &[1.5], budget: None },
    Criterion { id: 14, title: "component-mass Beta law", suite: "component-mass", alphas: &[1.5], budget: None },
    Criterion { id: 15, title: "discrete to continuous", suite: "discrete-to-continuous", alphas: &[1.5], budget: None },
    Criterion { id: 16, title: "Pólya urn limits", suite: "polya-urn", alphas: &[1.5], budget: None },
];

fn suite_criterion(c: &Criterion) -> (bool, String) {
    let start = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();
    for &alpha in c.alphas {
        let cfg = SuiteConfig { alpha, seed: SEED, ..SuiteConfig::default() };
        match run_suite(c.suite, &cfg) {
            Ok(report) => {
                ok &= report.passed();
                details.extend(failing_cases(&report));
            }
            Err(e) => {
                ok = false;
                details.push(format!("alpha {alpha}: error: {e}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let mut note = format!("{:.1}s", elapsed.as_secs_f64());
    if let Some(budget) = c.budget {
        note = format!("{note} (budget {}s)", budget.as_secs());
        if elapsed > budget {
            ok = false;
            details.push(format!("runtime {:.1}s exceeds {}s", elapsed.as_secs_f64(), budget.as_secs()));
        }
    }
    for d in &details {
        note.push_str("\n      ");
        note.push_str(d);
    }
    (ok, note)
}

fn failing_cases(report: &SuiteReport) -> Vec<String> {
    report
        .cases
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("alpha {}: {}", report.alpha, c.summary_line()))
        .collect()
}

fn stl(args: &[&str], stdin: Option<&str>) -> Output {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_stl"))
        .args(args)
        .env_remove("STL_SEED")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("stl binary runs");
    {
        let mut pipe = child.stdin.take().expect("stdin is piped");
        if let Some(text) = stdin {
            pipe.write_all(text.as_bytes()).expect("write stdin");
        }
    }
    child.wait_with_output().expect("stl finishes")
}

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stl-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("create scratch directory");
    dir
}

/// Run one invocation twice and compare stdout and the optional output file.
fn repeat_identical(label: &str, args: &[&str], stdin: Option<&str>, file: Option<&Path>) -> Result<(), String> {
    let mut runs = Vec::new();
    for _ in 0..2 {
        if let Some(f) = file {
            let _ = std::fs::remove_file(f);
        }
        let out = stl(args, stdin);
        if !out.status.success() {
            return Err(format!("{label}: exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr).trim()));
        }
        let written = match file {
            Some(f) => std::fs::read(f).map_err(|e| format!("{label}: {e}"))?,
            None => Vec::new(),
        };
        if out.stdout.is_empty() && written.is_empty() {
            return Err(format!("{label}: produced no output"));
        }
        runs.push((out.stdout, written));
    }
    if runs[0] != runs[1] {
        return Err(format!("{label}: outputs differ between identical runs"));
    }
    Ok(())
}

fn determinism_criterion() -> (bool, String) {
    let dir = scratch_dir();
    let theta = dir.join("theta.txt");
    std::fs::write(&theta, "# theta_0 then atoms\n0.6\n0.5 0.4 0.3\n").expect("write theta file");
    let theta = theta.to_str().expect("utf-8 path").to_string();
    let json = dir.join("verify.json");
    let json_s = json.to_str().expect("utf-8 path").to_string();
    let written = dir.join("density.csv");
    let written_s = written.to_str().expect("utf-8 path").to_string();

    let cases: Vec<(&str, Vec<&str>, Option<&str>, Option<&Path>)> = vec![
        ("density", vec!["density", "--alpha", "1.3", "--seed", "5"], None, None),
        ("density --out", vec!["density", "--seed", "5", "--out", &written_s], None, Some(&written)),
        ("subordinator mean", vec!["subordinator", "--seed", "5", "--replicas", "2000"], None, None),
        ("subordinator laplace", vec!["subordinator", "--seed", "5", "--replicas", "2000", "--stat", "laplace:0.5"], None, None),
        ("subordinator qvar", vec!["subordinator", "--seed", "5", "--replicas", "2000", "--stat", "qvar"], None, None),
        ("tree-continuous", vec!["tree-continuous", "--seed", "5", "--replicas", "20"], None, None),
        ("tree-crt", vec!["tree-crt", "--seed", "5", "--replicas", "20"], None, None),
        ("tree-icrt", vec!["tree-icrt", "--seed", "5", "--replicas", "20", "--theta", &theta], None, None),
        ("tree-discrete", vec!["tree-discrete", "--seed", "5", "--n", "500"], None, None),
        ("prufer decode", vec!["prufer", "decode"], Some("1 1\n"), None),
        ("prufer encode", vec!["prufer", "encode"], Some("0 1 1\n"), None),
        (
            "verify",
            vec!["verify", "--suite", "prufer-exhaustive", "--seed", "5", "--json", &json_s],
            None,
            Some(&json),
        ),
        ("verify --list", vec!["verify", "--list"], None, None),
    ];
    let mut failures = Vec::new();
    for (label, args, stdin, file) in &cases {
        if let Err(e) = repeat_identical(label, args, *stdin, *file) {
            failures.push(e);
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    let mut note = format!("{} invocations", cases.len());
    for f in &failures {
        note.push_str("\n      ");
        note.push_str(f);
    }
    (failures.is_empty(), note)
}

fn main() -> ExitCode {
    // `cargo test -- --list` and filtered runs pass arguments; honour them
    // minimally so that the battery is not run when only listing.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    println!("acceptance battery (seed {SEED})");
    let mut failed = 0;
    let mut report = |id: usize, title: &str, (ok, note): (bool, String)| {
        if !ok {
            failed += 1;
        }
        println!("{} criterion {id:>2}: {title} — {note}", if ok { "PASS" } else { "FAIL" });
    };
    for c in CRITERIA {
        report(c.id, c.title, suite_criterion(c));
    }
    report(17, "byte-identical CLI output under a fixed seed", determinism_criterion());
    println!("{} of 17 criteria passed", 17 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
