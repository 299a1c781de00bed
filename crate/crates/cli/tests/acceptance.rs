//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use sdof_cli::{run, Experiment, ExperimentConfig, Outcome, RawConfig, EXIT_PASS};
use sdof_core::analysis::{sdof_formula, SdofQuery};
use serde_json::Value;

type Criterion = fn(&Path) -> Verdict;

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

fn config(dir: &Path, text: &str) -> ExperimentConfig {
    let raw = RawConfig::parse(&format!("{text}\noutput_dir = {}\n", dir.display())).unwrap();
    raw.into_config().unwrap()
}

/// Runs the experiment and returns the outcome, whether it passed and the
/// names of failed assertions.
fn execute(dir: &Path, text: &str) -> (Outcome, bool, String) {
    let status = run(&config(dir, text));
    let outcome = status.outcome.expect("valid config produces an outcome");
    let failed: Vec<String> = outcome
        .assertions
        .iter()
        .filter(|a| !a.passed)
        .map(|a| format!("{} ({})", a.name, a.detail))
        .collect();
    (outcome, status.code == EXIT_PASS, failed.join("; "))
}

fn within(elapsed: Duration, limit: u64) -> bool {
    elapsed <= Duration::from_secs(limit)
}

fn criterion_1(dir: &Path) -> Verdict {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for m in 1..=3 {
        let (_, passed, failed) = execute(
            dir,
            &format!("experiment = helper_fading_mi\nseed = 11\nM = {m}\nrealizations = 10\ngrid = 1e5,1e6,1e7,1e8"),
        );
        ok &= passed;
        if !passed {
            notes.push(format!("M={m}: {failed}"));
        }
    }
    let elapsed = start.elapsed();
    ok &= within(elapsed, 60);
    Verdict::new(ok, format!("M = 1,2,3 x 10 realizations in {elapsed:.1?} {}", notes.join(" ")))
}

fn criterion_2(dir: &Path) -> Verdict {
    let start = Instant::now();
    let (outcome, passed, failed) = execute(
        dir,
        "experiment = helper_fixed_mc\nseed = 12\nM = 1\ndelta = 0.05\ntrials = 10000\ngrid = 1e4,1e5,1e6,1e7\nslope_tol = 0.1",
    );
    let elapsed = start.elapsed();
    let rates: Vec<f64> = outcome.results["estimates"]
        .as_array()
        .map(|a| a.iter().filter_map(|e| e["rate"].as_f64()).collect())
        .unwrap_or_default();
    Verdict::new(
        passed && within(elapsed, 300),
        format!("error rates {rates:?} in {elapsed:.1?} {failed}"),
    )
}

fn criterion_3(dir: &Path) -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for (k, m) in [(3, 1), (3, 2), (4, 1)] {
        let (outcome, passed, failed) = execute(
            dir,
            &format!("experiment = interference_fixed_verify\nseed = 13\nK = {k}\nm = {m}"),
        );
        ok &= passed;
        let m_s = outcome.results["report"]["M_S_formula"].as_u64();
        if (k, m) == (3, 1) {
            ok &= m_s == Some(1026);
        }
        notes.push(format!("({k},{m}) M_S={m_s:?} {failed}"));
    }
    let elapsed = start.elapsed();
    ok &= within(elapsed, 60);
    Verdict::new(ok, format!("{} in {elapsed:.1?}", notes.join(", ")))
}

fn equations_all_pass(results: &Value) -> bool {
    results["realizations"].as_array().is_some_and(|runs| {
        runs.len() == 20
            && runs.iter().all(|r| {
                let e = &r["equations"];
                e["generator_total"] == 16
                    && e["generator_passed"] == 16
                    && e["table_passed"] == e["table_total"]
                    && e["verdicts_agree"] == true
            })
    })
}

fn criterion_4(dir: &Path) -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, limit) in [(1, 120), (2, 1200)] {
        let start = Instant::now();
        let (outcome, passed, failed) = execute(
            dir,
            &format!("experiment = interference_fading_verify\nseed = 14\nK = 3\nn = {n}\nrealizations = 20\nrank_tol = 1e-10"),
        );
        let elapsed = start.elapsed();
        let good = passed && equations_all_pass(&outcome.results) && within(elapsed, limit);
        ok &= good;
        notes.push(format!("n={n}: {} in {elapsed:.1?} {failed}", if good { "ok" } else { "failed" }));
    }
    Verdict::new(ok, notes.join(", "))
}

fn criterion_5(dir: &Path) -> Verdict {
    let (outcome, passed, failed) = execute(
        dir,
        "experiment = interference_fading_mi\nseed = 15\nK = 3\nn = 1\ngrid = 1e5,1e6,1e7,1e8",
    );
    let r = &outcome.results;
    let counts = r["desired_per_receiver"] == 2 && r["sum_sdof"] == "1/11";
    Verdict::new(
        passed && counts,
        format!("sum s.d.o.f. {} per-receiver {} {failed}", r["sum_sdof"], r["desired_per_receiver"]),
    )
}

fn criterion_6(dir: &Path) -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for (m, expected) in [(1, Rational64::new(1, 2)), (2, Rational64::new(4, 5)), (3, Rational64::new(6, 7))] {
        let (_, passed, failed) = execute(
            dir,
            &format!("experiment = mac_partial\nseed = 16\nK = 3\nm_informed = {m}"),
        );
        let formula = sdof_formula(SdofQuery::MacPartial { users: 3, m_informed: m }).unwrap();
        ok &= passed && formula == expected;
        notes.push(format!(
            "m={m}: scheme {} formula {formula} expected {expected} {failed}",
            if passed { "ok" } else { "failed" }
        ));
    }
    Verdict::new(ok, notes.join(", "))
}

fn criterion_7(dir: &Path) -> Verdict {
    let start = Instant::now();
    let (outcome, passed, failed) =
        execute(dir, "experiment = lemma2\nseed = 17\nsamples = 200\npower = 1e4");
    let elapsed = start.elapsed();
    let exact = outcome.results["enumerated_case"]["H_exact_nats"].as_f64();
    Verdict::new(
        passed && within(elapsed, 60),
        format!("h=0.5, P=16 gives {exact:?} nats in {elapsed:.1?} {failed}"),
    )
}

fn criterion_8(dir: &Path) -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for (k, m) in [(2, 1), (3, 2), (5, 3), (10, 7)] {
        let (_, passed, failed) = execute(dir, &format!("experiment = sdof_table\nseed = 18\nK = {k}\nM = {m}"));
        let (_, region, region_failed) = execute(dir, &format!("experiment = region\nseed = 18\nK = {k}"));
        ok &= passed && region;
        if !(passed && region) {
            notes.push(format!("K={k}: {failed} {region_failed}"));
        }
    }
    Verdict::new(ok, format!("tables and regions for K = 2,3,5,10 {}", notes.join(" ")))
}

fn criterion_9(dir: &Path) -> Verdict {
    let bin = env!("CARGO_BIN_EXE_sdof");
    let mut differing = Vec::new();
    for e in Experiment::ALL {
        let cfg = dir.join(format!("{}.cfg", e.name()));
        std::fs::write(&cfg, format!("experiment = {}\nseed = 19\n", e.name())).unwrap();
        let mut reports = Vec::new();
        for rep in 0..2 {
            let out = dir.join(format!("det{rep}"));
            let status = Command::new(bin)
                .arg("run")
                .arg(&cfg)
                .arg(format!("--output_dir={}", out.display()))
                .output()
                .unwrap();
            assert!(status.status.code().is_some_and(|c| c <= 1), "{}", e.name());
            reports.push(std::fs::read(out.join(format!("{}.json", e.name()))).unwrap());
        }
        if reports[0] != reports[1] {
            differing.push(e.name());
        }
    }
    Verdict::new(
        differing.is_empty(),
        format!("{} experiments rerun, differing reports: {differing:?}", Experiment::ALL.len()),
    )
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let criteria: [(u32, Criterion); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failures = 0;
    for (n, check) in criteria {
        let sub = dir.path().join(format!("criterion_{n}"));
        std::fs::create_dir_all(&sub).unwrap();
        let v = check(&sub);
        failures += usize::from(!v.passed);
        println!("criterion {n}: {} {}", if v.passed { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
