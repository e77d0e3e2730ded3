//! Acceptance run over the shipped configs at full scale.
//!
//! Prints one PASS/FAIL line per criterion and exits non-zero if any fails. Runs without the
//! libtest harness so the lines are always shown.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use sio_channel::harness::{run_suites, write_archive, Experiment, ExperimentConfig, Report, Row, SuiteId};

const CONFIGS: [&str; 4] = ["gaussian", "jump", "mixed", "modulated"];
const ISOMETRY_BUDGET: Duration = Duration::from_secs(60);
/// Worker counts compared for determinism.
const WORKERS: (usize, usize) = (1, 8);
/// Realizations in the archive determinism check; a full archive would be over a gigabyte.
const ARCHIVE_REPS: usize = 2000;

struct Run {
    name: &'static str,
    exp: Experiment,
    report: Report,
    isometry_time: Duration,
}

fn load(name: &str) -> ExperimentConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.toml"));
    ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn run(name: &'static str) -> Run {
    let exp = load(name).build().unwrap_or_else(|e| panic!("{name}: {e}"));
    let start = Instant::now();
    let mut report = run_suites(&exp, &[SuiteId::SioIsometry], WORKERS.1, None).unwrap();
    let isometry_time = start.elapsed();
    let rest: Vec<SuiteId> = SuiteId::ALL.into_iter().filter(|&id| id != SuiteId::SioIsometry).collect();
    let others = run_suites(&exp, &rest, WORKERS.1, None).unwrap();
    report.rows.extend(others.rows);
    report = Report::new(report.environment, report.rows);
    eprintln!(
        "{name}: {} rows, {} failed, {:.1} s (isometry {:.1} s)",
        report.summary.total,
        report.summary.failed,
        start.elapsed().as_secs_f64(),
        isometry_time.as_secs_f64()
    );
    Run { name, exp, report, isometry_time }
}

fn rows<'a>(runs: &'a [Run], suite: &str, prefix: &str) -> Vec<(&'a str, &'a Row)> {
    runs.iter()
        .flat_map(|r| r.report.rows.iter().map(move |row| (r.name, row)))
        .filter(|(_, row)| row.suite == suite && row.check.starts_with(prefix))
        .collect()
}

/// Collects failure descriptions for one criterion.
#[derive(Default)]
struct Criterion {
    problems: Vec<String>,
}

impl Criterion {
    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.problems.push(what());
        }
    }

    /// Every row passes its own verdict; at least `min` rows per config.
    fn rows_pass(&mut self, runs: &[Run], found: &[(&str, &Row)], min: usize, what: &str) {
        for r in runs {
            let n = found.iter().filter(|(name, _)| *name == r.name).count();
            self.require(n >= min, || format!("{}: {n} {what} rows, need {min}", r.name));
        }
        for (name, row) in found {
            self.require(row.pass, || format!("{name}: {} {} = {} vs {} (tol {})", row.suite, row.check, row.statistic, row.target, row.tolerance));
        }
    }
}

fn z(row: &Row) -> f64 {
    let d = row.statistic - row.target;
    if d == 0.0 {
        0.0
    } else {
        d / row.se
    }
}

fn main() -> ExitCode {
    let runs: Vec<Run> = CONFIGS.iter().map(|&n| run(n)).collect();
    let core = &runs[..3];
    let mut results: Vec<(&str, Criterion)> = Vec::new();

    let mut c = Criterion::default();
    let found = rows(core, "sio-isometry", "");
    c.require(found.len() >= 20, || format!("{} isometry triples, need 20", found.len()));
    c.rows_pass(core, &found, 1, "isometry");
    for (_, row) in &found {
        c.require(z(row).abs() <= 5.0, || format!("{}: |z| = {}", row.check, z(row).abs()));
    }
    for r in core {
        c.require(r.isometry_time < ISOMETRY_BUDGET, || format!("{}: isometry took {:?}", r.name, r.isometry_time));
    }
    results.push(("isometry over gaussian, jump and mixed channels within 5 SE", c));

    let mut c = Criterion::default();
    let found = rows(&runs, "weak-us", "pair");
    c.rows_pass(&runs, &found, 20, "weak-US pair");
    for (name, row) in &found {
        c.require(z(row).abs() < 5.0, || format!("{name}: {} |z| = {}", row.check, z(row).abs()));
    }
    results.push(("weak uncorrelated scattering on disjoint supports, |z| < 5", c));

    let mut c = Criterion::default();
    let found = rows(&runs, "cf-components", "");
    c.rows_pass(&runs, &found, 10, "component CF");
    for r in &runs {
        let k = &r.exp.config.checks;
        c.require(k.cf_nodes >= 33 && k.cf_gamma_max >= 4.0, || format!("{}: CF grid {} nodes on ±{}", r.name, k.cf_nodes, k.cf_gamma_max));
    }
    for (name, row) in &found {
        let tol = 5.0 / (row.n_reps as f64).sqrt() + 1e-6;
        c.require((row.tolerance - tol).abs() <= 1e-15, || format!("{name}: {} tolerance {}", row.check, row.tolerance));
    }
    results.push(("component characteristic functions, sup error <= 5/sqrt(n) + 1e-6", c));

    let mut c = Criterion::default();
    let found = rows(&runs, "levy-khinchine", "cf");
    c.rows_pass(&runs, &found, 1, "Levy-Khinchine");
    let counts = rows(&runs, "poisson-counts", "");
    let jumping: Vec<&Run> = runs.iter().filter(|r| r.name != "gaussian").collect();
    for r in jumping {
        let n = counts.iter().filter(|(name, _)| *name == r.name).count();
        c.require(n > 0, || format!("{}: no Poisson count rows", r.name));
    }
    c.rows_pass(&[], &counts, 0, "Poisson");
    results.push(("Levy-Khinchine marginals and Poisson jump counts", c));

    let mut c = Criterion::default();
    let ki = rows(&runs, "fubini-sigma", "kernel-impulse");
    c.rows_pass(&runs, &ki, 1, "kernel-impulse");
    for (name, row) in &ki {
        c.require(row.statistic == 0.0 && row.tolerance == 0.0, || format!("{name}: {} not bit-equal", row.check));
    }
    let sigma = rows(&runs, "fubini-sigma", "sigma");
    c.rows_pass(&runs, &sigma, 1, "symbol");
    let eta = rows(&runs, "eta-spreading", "eta");
    c.rows_pass(&runs, &eta, 1, "spreading");
    for (name, row) in sigma.iter().chain(&eta) {
        let cap = if row.suite == "eta-spreading" { 5e-3 } else { 1e-3 };
        c.require(row.tolerance <= cap, || format!("{name}: {} tolerance {}", row.check, row.tolerance));
    }
    for (name, row) in ki.iter().chain(&sigma).chain(&eta) {
        c.require(row.n_reps >= 100, || format!("{name}: {} has {} cases", row.check, row.n_reps));
    }
    results.push(("kernel, impulse, symbol and spreading representations agree", c));

    let mut c = Criterion::default();
    let stationary: Vec<&Run> = runs.iter().filter(|r| r.exp.spec.is_stationary()).collect();
    let shift = rows(&runs, "wssus-isometry", "shift");
    let energy = rows(&runs, "wssus-isometry", "energy");
    for r in &stationary {
        let has = |v: &[(&str, &Row)]| v.iter().any(|(n, _)| *n == r.name);
        c.require(has(&shift) && has(&energy), || format!("{}: missing WSSUS rows", r.name));
        c.require(r.exp.config.checks.wssus_atoms.len() <= 8, || format!("{}: too many atoms", r.name));
    }
    for (name, row) in &shift {
        c.require(row.pass && row.tolerance == 0.0, || format!("{name}: {} shift law not exact", row.check));
    }
    c.rows_pass(&[], &energy, 0, "energy");
    results.push(("WSSUS shift law and nu-convolution energy", c));

    let mut c = Criterion::default();
    let cs = rows(&runs, "rho-cs", "cauchy-schwarz");
    c.rows_pass(&runs, &cs, 1, "Cauchy-Schwarz");
    for (name, row) in &cs {
        c.require(row.n_reps >= 1000, || format!("{name}: {} triples", row.n_reps));
    }
    c.rows_pass(&runs, &rows(&runs, "rho-cs", "polarization"), 1, "polarization");
    c.rows_pass(&runs, &rows(&runs, "rho-cs", "closed-form"), 1, "closed-form rho");
    results.push(("correlation measure: Cauchy-Schwarz, polarization, closed form", c));

    let mut c = Criterion::default();
    for prefix in ["pathwise", "mu-parts", "rho-sum", "scattering", "independence"] {
        let found = rows(&runs, "decomposition", prefix);
        c.rows_pass(&runs, &found, 1, prefix);
        for (name, row) in &found {
            let ok = match prefix {
                "pathwise" => row.statistic == 0.0,
                "scattering" => row.tolerance <= 1e-9,
                "independence" => {
                    let n = row.n_reps as f64;
                    (row.tolerance - 3.0 * (2.0 / n.sqrt() + 1.0 / n)).abs() <= 1e-15
                }
                _ => true,
            };
            c.require(ok, || format!("{name}: {} = {} (tol {})", row.check, row.statistic, row.tolerance));
        }
    }
    results.push(("Levy-Ito decomposition of the channel", c));

    let mut c = Criterion::default();
    let mixed = &runs[2];
    let ids: Vec<SuiteId> = SuiteId::ALL.to_vec();
    let single = run_suites(&mixed.exp, &ids, WORKERS.0, None).unwrap();
    for format in [sio_channel::harness::Format::Csv, sio_channel::harness::Format::Json] {
        let a = single.render(format).unwrap();
        let b = mixed.report.render(format).unwrap();
        c.require(a == b, || format!("mixed: {format:?} report differs between {} and {} workers", WORKERS.0, WORKERS.1));
    }
    for name in CONFIGS {
        let mut cfg = load(name);
        cfg.n_reps = ARCHIVE_REPS;
        let exp = cfg.build().unwrap();
        let mut archives = Vec::new();
        for w in [WORKERS.0, WORKERS.1] {
            let mut buf = Vec::new();
            write_archive(&exp, w, &mut buf).unwrap();
            archives.push(buf);
        }
        c.require(archives[0] == archives[1], || format!("{name}: archives differ at n = {ARCHIVE_REPS}"));
    }
    results.push(("byte-identical reports and archives for 1 and 8 workers", c));

    let mut failed = 0;
    for (i, (what, c)) in results.iter().enumerate() {
        let ok = c.problems.is_empty();
        println!("[{}] {}. {what}", if ok { "PASS" } else { "FAIL" }, i + 1);
        for p in c.problems.iter().take(10) {
            println!("       {p}");
        }
        failed += usize::from(!ok);
    }
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
