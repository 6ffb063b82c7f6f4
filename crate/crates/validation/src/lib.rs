//! Scoreboard for the acceptance run.
//!
//! The acceptance target lives in its own package so that `cargo test
//! --workspace` reaches it after every unit and integration suite: a red
//! criterion must not hide the results of the other test binaries.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: String,
    pub claim: String,
    /// Pinned tolerance or threshold, as text.
    pub tolerance: String,
    pub observed: String,
    pub pass: bool,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} {:<4} {} | tol: {} | observed: {} | {:.2}s",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.claim,
            self.tolerance,
            self.observed,
            self.elapsed.as_secs_f64()
        )
    }
}

/// Collects outcomes and prints each one as soon as it is recorded.
#[derive(Debug, Default)]
pub struct Scoreboard {
    outcomes: Vec<Outcome>,
}

impl Scoreboard {
    pub fn new() -> Self {
        Self::default()
    }

    /// Runs `f`, which returns (pass, observed), and records the result.
    pub fn run<F>(&mut self, id: &str, claim: &str, tolerance: &str, f: F) -> &Outcome
    where
        F: FnOnce() -> (bool, String),
    {
        let start = Instant::now();
        let (pass, observed) = f();
        self.record(Outcome {
            id: id.into(),
            claim: claim.into(),
            tolerance: tolerance.into(),
            observed,
            pass,
            elapsed: start.elapsed(),
        })
    }

    pub fn record(&mut self, outcome: Outcome) -> &Outcome {
        println!("{}", outcome.line());
        self.outcomes.push(outcome);
        self.outcomes.last().expect("just pushed")
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn failures(&self) -> Vec<&Outcome> {
        self.outcomes.iter().filter(|o| !o.pass).collect()
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let failed = self.failures();
        let _ = write!(s, "acceptance: {} passed, {} failed", self.outcomes.len() - failed.len(), failed.len());
        if !failed.is_empty() {
            let ids: Vec<&str> = failed.iter().map(|o| o.id.as_str()).collect();
            let _ = write!(s, " ({})", ids.join(", "));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_failures() {
        let mut b = Scoreboard::new();
        b.run("x", "passes", "-", || (true, "ok".into()));
        b.run("y", "fails", "-", || (false, "no".into()));
        assert_eq!(b.failures().len(), 1);
        assert_eq!(b.summary(), "acceptance: 1 passed, 1 failed (y)");
        assert!(b.outcomes()[1].line().starts_with("FAIL y"));
    }
}
