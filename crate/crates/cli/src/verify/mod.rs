//! The acceptance criteria as runnable checks.
//!
//! Each criterion builds its own instances from fixed seeds and compares the
//! toolkit against an independent computation or a stated inequality.

mod cli;
mod gcl;
mod spco;
mod spectral;
mod transport;

use std::time::Instant;

use serde::Serialize;

use crate::args::VerifyArgs;
use crate::report::{to_pretty_json, write_file};
use crate::{CliError, CliResult};

/// Verdict and a one-line account of what was measured.
pub type Check = Result<(bool, String), String>;

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u32,
    pub suite: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {}: {} ({}; {:.2}s)",
            self.id,
            self.suite,
            self.title,
            if self.passed { "PASS" } else { "FAIL" },
            self.detail,
            self.seconds
        )
    }
}

pub struct Criterion {
    pub id: u32,
    pub suite: &'static str,
    pub title: &'static str,
    pub check: fn() -> Check,
}

pub const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, suite: "transport", title: "sinkhorn converge mode meets marginals", check: transport::marginals_check },
    Criterion { id: 2, suite: "transport", title: "one sweep solves a separable kernel", check: transport::separable },
    Criterion { id: 3, suite: "spectral", title: "normalized shift estimate is second order", check: spectral::shift_convergence },
    Criterion { id: 4, suite: "spectral", title: "eigenspaces are orthogonal and resolve the identity", check: spectral::eigenspace_algebra },
    Criterion { id: 5, suite: "spectral", title: "degree-change term is bounded by N|lambda|", check: spectral::degree_term_bound },
    Criterion { id: 6, suite: "gcl", title: "polynomial proximity is diagonal in the eigenbasis", check: gcl::proximity },
    Criterion { id: 7, suite: "gcl", title: "InfoNCE sits below the trace bound", check: gcl::infonce_chain },
    Criterion { id: 8, suite: "transport", title: "per-entry plan stability bound over a run", check: transport::stability_bound },
    Criterion { id: 9, suite: "spco", title: "feasibility conditions imply a stationary point", check: spco::feasibility_roots },
    Criterion { id: 10, suite: "spco", title: "learned view differs more at high frequencies", check: spco::game_direction },
    Criterion { id: 11, suite: "gcl", title: "case-study frequency trend", check: gcl::case_study },
    Criterion { id: 12, suite: "cli", title: "spco and train reruns are byte-identical", check: cli::determinism },
];

pub const SUITES: &[&str] = &["transport", "spectral", "gcl", "spco", "cli"];

fn evaluate(c: &Criterion) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = match (c.check)() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome {
        id: c.id,
        suite: c.suite,
        title: c.title,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Runs one criterion by id.
pub fn run_criterion(id: u32) -> Option<Outcome> {
    CRITERIA.iter().find(|c| c.id == id).map(evaluate)
}

/// Runs a suite (or `all`), one thread per criterion, results in id order.
pub fn run_suite(suite: &str) -> CliResult<Vec<Outcome>> {
    if suite != "all" && !SUITES.contains(&suite) {
        return Err(CliError::Usage(format!(
            "--suite must be one of {}, all; got {suite:?}",
            SUITES.join(", ")
        )));
    }
    let picked: Vec<&Criterion> = CRITERIA
        .iter()
        .filter(|c| suite == "all" || c.suite == suite)
        .collect();
    let mut out: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = picked.iter().map(|c| s.spawn(|| evaluate(c))).collect();
        handles
            .into_iter()
            .zip(&picked)
            .map(|(h, c)| {
                h.join().unwrap_or_else(|_| Outcome {
                    id: c.id,
                    suite: c.suite,
                    title: c.title,
                    passed: false,
                    detail: "check panicked".into(),
                    seconds: 0.0,
                })
            })
            .collect()
    });
    out.sort_by_key(|o| o.id);
    Ok(out)
}

pub fn command(args: VerifyArgs) -> CliResult<()> {
    let outcomes = run_suite(&args.suite)?;
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if let Some(path) = &args.out {
        write_file(path, &to_pretty_json(&outcomes)?)?;
    }
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} criteria failed")));
    }
    Ok(())
}

pub(crate) fn core<T>(r: spectraforge_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}
