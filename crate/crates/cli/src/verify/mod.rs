//! Named verification suites with a machine-readable report.

mod depfun;
mod figures;
mod frailty;
mod higher;
mod lattice;
mod levy;
mod minid;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use figures::{figure_configs, FigureConfig, FIGURE_DELTA, FIGURE_PAIR, FIGURE_RESOLUTION};

/// Seed shared by every randomized check.
pub const VERIFY_SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lattice,
    Frailty,
    Levy,
    Minid,
    Depfun,
    Higher,
    Figures,
    All,
}

impl Suite {
    pub const MODULES: [Suite; 7] =
        [Suite::Lattice, Suite::Frailty, Suite::Levy, Suite::Minid, Suite::Depfun, Suite::Higher, Suite::Figures];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lattice => "lattice",
            Suite::Frailty => "frailty",
            Suite::Levy => "levy",
            Suite::Minid => "minid",
            Suite::Depfun => "depfun",
            Suite::Higher => "higher",
            Suite::Figures => "figures",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::MODULES
            .into_iter()
            .chain([Suite::All])
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`; expected lattice, frailty, levy, minid, depfun, higher, figures or all"))
    }
}

/// One named check. `value` is the measured discrepancy and passes when it is at most `tolerance`.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub passed: bool,
    pub elapsed_seconds: f64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub(crate) struct Recorder {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Recorder {
    fn new(suite: &'static str) -> Self {
        Self { suite, checks: Vec::new() }
    }

    /// Passes when `f` returns a discrepancy of at most `tol`.
    pub fn within(&mut self, name: impl Into<String>, tol: f64, f: impl FnOnce() -> hazdep::Result<f64>) {
        let (passed, value, detail) = match f() {
            Ok(v) => (v <= tol, Some(v), String::new()),
            Err(e) => (false, None, e.to_string()),
        };
        self.checks.push(Check { suite: self.suite, name: name.into(), passed, value, tolerance: Some(tol), detail });
    }

    /// Passes when `f` returns `Ok(None)`; `Ok(Some(msg))` describes a violation.
    pub fn holds(&mut self, name: impl Into<String>, f: impl FnOnce() -> hazdep::Result<Option<String>>) {
        let (passed, detail) = match f() {
            Ok(None) => (true, String::new()),
            Ok(Some(msg)) => (false, msg),
            Err(e) => (false, e.to_string()),
        };
        self.checks.push(Check { suite: self.suite, name: name.into(), passed, value: None, tolerance: None, detail });
    }
}

pub(crate) fn rng(salt: u64) -> ChaCha8Rng {
    hazdep::frailty::draw_rng(VERIFY_SEED, salt, 0)
}

fn run_module(suite: Suite, rec: &mut Recorder) {
    match suite {
        Suite::Lattice => lattice::run(rec),
        Suite::Frailty => frailty::run(rec),
        Suite::Levy => levy::run(rec),
        Suite::Minid => minid::run(rec),
        Suite::Depfun => depfun::run(rec),
        Suite::Higher => higher::run(rec),
        Suite::Figures => figures::run(rec),
        Suite::All => unreachable!("expanded by run_suite"),
    }
}

pub fn run_suite(suite: Suite) -> Report {
    let start = Instant::now();
    let mut checks = Vec::new();
    let members: Vec<Suite> = if suite == Suite::All { Suite::MODULES.to_vec() } else { vec![suite] };
    for m in members {
        let mut rec = Recorder::new(m.name());
        run_module(m, &mut rec);
        checks.extend(rec.checks);
    }
    Report {
        suite: suite.name().into(),
        passed: checks.iter().all(|c| c.passed),
        elapsed_seconds: start.elapsed().as_secs_f64(),
        checks,
    }
}
