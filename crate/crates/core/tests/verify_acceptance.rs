//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line.

use std::io::Write;
use std::process::Command;
use std::sync::OnceLock;
use tricomi::kernel::{Evaluator, ParameterPoint};
use tricomi::turanian::{sharpness_scan_with, LimitId, SharpnessLimit};
use tricomi::verify::{run, RowStatus, RunConfig, RunReport, Suite};

const ORACLE_REL_TOL: f64 = 1e-10;
const MIN_CROSSCHECK_POINTS: usize = 200;
const ZETA_CONTRACTION: f64 = 0.1;
const LIMIT_AT_ZERO_REL: f64 = 0.01;

fn report() -> &'static RunReport {
    static REPORT: OnceLock<RunReport> = OnceLock::new();
    REPORT.get_or_init(|| {
        let jobs = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        run(&RunConfig { jobs, ..RunConfig::default() }).expect("default run")
    })
}

fn verdict(n: &str, ok: bool, detail: String) {
    let line = format!("criterion {n}: {} {detail}\n", if ok { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "criterion {n} failed: {detail}");
}

fn counts(suite: Suite) -> (usize, usize, usize, usize) {
    let rows = report().rows.iter().filter(|r| r.suite == suite);
    let (mut pass, mut fail, mut other, mut total) = (0, 0, 0, 0);
    for r in rows {
        total += 1;
        match r.status {
            RowStatus::Pass => pass += 1,
            RowStatus::Fail | RowStatus::Error => fail += 1,
            _ => other += 1,
        }
    }
    (pass, fail, other, total)
}

#[test]
fn criterion_01_closed_form_oracle() {
    let ev = Evaluator::default();
    let mut worst = 0.0f64;
    for a in [0.5, 1.0, 2.0, 3.0] {
        for x in [0.1, 1.0, 10.0] {
            let v = ev.psi(ParameterPoint::new(a, a + 1.0, x).unwrap()).unwrap().value;
            let exact = x.powf(-a);
            worst = worst.max(((v - exact) / exact).abs());
        }
    }
    verdict("1", worst <= ORACLE_REL_TOL, format!("worst relative error {worst:.3e}"));
}

#[test]
fn criterion_02_cross_method_agreement() {
    let (pass, fail, other, total) = counts(Suite::KernelCrosscheck);
    verdict(
        "2",
        fail == 0 && pass >= MIN_CROSSCHECK_POINTS,
        format!("{pass} agreeing of {total}, {fail} disagreeing, {other} where the series is unusable"),
    );
}

#[test]
fn criterion_03_ode_residual() {
    let (pass, fail, _, total) = counts(Suite::OdeResidual);
    verdict("3", fail == 0 && pass == total && total > 0, format!("{pass}/{total} residuals within 1e-4 of scale"));
}

#[test]
fn criterion_04_derivative_identity() {
    let (pass, fail, _, total) = counts(Suite::Derivative);
    verdict("4", fail == 0 && pass == total && total > 0, format!("{pass}/{total} within 1e-6 relative"));
}

#[test]
fn criterion_05_moment_identities() {
    let (pass, fail, _, total) = counts(Suite::Moments);
    let cfg = RunConfig::default();
    let mut expected = 0;
    for &a in &cfg.grid_a {
        for &c in &cfg.grid_c {
            if a > 0.0 && c < 1.0 {
                expected += tricomi::measure::MomentIdentity::POWERS
                    .iter()
                    .filter(|&&power| tricomi::measure::MomentIdentity { power }.in_region(a, c))
                    .count();
            }
        }
    }
    verdict(
        "5",
        fail == 0 && pass == total && total == expected,
        format!("{pass}/{total} moments match, {expected} in-region"),
    );
}

#[test]
fn criterion_06_stieltjes_identity() {
    let (pass, fail, _, total) = counts(Suite::Stieltjes);
    let both = report().rows.iter().filter(|r| r.suite == Suite::Stieltjes && r.claim == "stieltjes_both").count();
    let first = report().rows.iter().filter(|r| r.suite == Suite::Stieltjes && r.claim == "stieltjes_first").count();
    verdict(
        "6",
        fail == 0 && pass == total && both == first && both > 0,
        format!("{pass}/{total} agree within combined budgets ({both} both-shift, {first} first-shift)"),
    );
}

#[test]
fn criterion_07_inequality_suite() {
    let rows: Vec<_> = report().rows.iter().filter(|r| r.suite == Suite::Bounds).collect();
    let fails = rows.iter().filter(|r| matches!(r.status, RowStatus::Fail | RowStatus::Error)).count();
    let bad_inconclusive = rows
        .iter()
        .filter(|r| r.status == RowStatus::Inconclusive && !(r.margin.abs() <= r.budget))
        .count();
    let flagged = rows.iter().filter(|r| r.status == RowStatus::Flagged).count();
    verdict(
        "7",
        fails == 0 && bad_inconclusive == 0 && !rows.is_empty(),
        format!("{} rows, {fails} fail, {flagged} flagged on ungated bounds", rows.len()),
    );
}

fn scan(id: LimitId, a: f64, c: f64, seq: &[f64]) -> tricomi::turanian::SharpnessScan {
    sharpness_scan_with(&Evaluator::default(), SharpnessLimit::new(id), a, c, seq).unwrap()
}

#[test]
fn criterion_08a_zeta_contraction_at_infinity() {
    let cfg = RunConfig::default();
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for &a in &cfg.grid_a {
        for &c in &cfg.grid_c {
            if !SharpnessLimit::new(LimitId::Zeta).in_region(a, c) {
                continue;
            }
            let s = scan(LimitId::Zeta, a, c, &[1e2, 1e3]);
            worst = worst.max(s.points[1].deviation / s.points[0].deviation);
            n += 1;
        }
    }
    let example = scan(LimitId::Zeta, 1.0, 0.0, &[1e2, 1e3]);
    let ex = example.points[1].deviation / example.points[0].deviation;
    verdict(
        "8a",
        n > 0 && worst <= ZETA_CONTRACTION && ex <= ZETA_CONTRACTION,
        format!("deviation ratio x=1e3 over x=1e2: a=1,c=0 gives {ex:.4}, worst over {n} grid points {worst:.4}, allowed {ZETA_CONTRACTION}"),
    );
}

#[test]
fn criterion_08b_limits_at_zero() {
    let cases = [(LimitId::BothAtZero, 2.0, -2.0), (LimitId::FirstAtZero, 2.0, -1.0), (LimitId::SecondAtZero, 2.0, -2.0)];
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (id, a, c) in cases {
        let s = scan(id, a, c, &[1e-3]);
        let rel = s.points[0].deviation / s.limit_value.abs();
        worst = worst.max(rel);
        parts.push(format!("{} at a={a},c={c}: {rel:.2e}", SharpnessLimit::new(id).name()));
    }
    verdict("8b", worst <= LIMIT_AT_ZERO_REL, format!("relative deviation at x=1e-3: {}", parts.join("; ")));
}

#[test]
fn criterion_08c_deviations_shrink() {
    let (pass, fail, _, total) = counts(Suite::Sharpness);
    verdict("8c", fail == 0 && pass == total && total > 0, format!("{pass}/{total} scans with shrinking deviation"));
}

#[test]
fn criterion_09_dominance() {
    let rows: Vec<_> = report().rows.iter().filter(|r| r.suite == Suite::Dominance).collect();
    let claimed: Vec<_> = rows.iter().filter(|r| r.status != RowStatus::NotApplicable).collect();
    let pass = claimed.iter().filter(|r| r.status == RowStatus::Pass).count();
    let mut per_claim = std::collections::BTreeSet::new();
    for r in &claimed {
        per_claim.insert(r.claim.clone());
    }
    verdict(
        "9",
        pass == claimed.len() && per_claim.len() == 8,
        format!("{pass}/{} threshold points pass across {} claims", claimed.len(), per_claim.len()),
    );
}

#[test]
fn criterion_10_monotonicity() {
    let (pass, fail, _, total) = counts(Suite::Monotonicity);
    verdict("10", fail == 0 && pass == total && total > 0, format!("{pass}/{total} consecutive pairs ordered"));
}

fn bin_run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_tricomi-verify")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn criterion_11_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let golden = dir.path().join("golden.csv");
    let again = dir.path().join("again.csv");
    let common = ["run", "--grid-a", "0.5,2", "--grid-c", "-1.5,0.25", "--grid-x", "0.1,1,10", "--quiet"];
    let mut first: Vec<&str> = common.to_vec();
    first.extend(["--jobs", "1", "--out", golden.to_str().unwrap()]);
    let mut second: Vec<&str> = common.to_vec();
    second.extend(["--jobs", "4", "--out", again.to_str().unwrap()]);
    let (code1, _) = bin_run(&first);
    let (code2, _) = bin_run(&second);
    let body = |p: &std::path::Path| std::fs::read_to_string(p).unwrap().lines().skip(1).collect::<Vec<_>>().join("\n");
    let identical = body(&golden) == body(&again) && !body(&golden).is_empty();

    let (code_fail, _) = bin_run(&["run", "--suites", "ode_residual", "--grid-a", "1", "--grid-c", "0.25", "--grid-x", "1", "--tol-ode-residual", "1e-300", "--quiet"]);
    let (code_config, _) = bin_run(&["run", "--suites", "nonsense", "--quiet"]);
    verdict(
        "11",
        identical && code1 == 0 && code2 == 0 && code_fail == 1 && code_config == 2,
        format!("identical={identical} exit codes: clean {code1}/{code2}, failing {code_fail}, bad config {code_config}"),
    );
}
