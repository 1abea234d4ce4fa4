//! Runner for the acceptance criteria: each criterion is timed against its
//! budget and reported on one line.

use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub number: u32,
    pub name: &'static str,
    pub passed: bool,
    pub elapsed: Duration,
    pub detail: String,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {} {} {} ({:.2} s): {}",
            self.number,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

/// Runs `check` and fails it if it errors or overruns `budget`.
/// `check` returns `Ok(detail)` on success and `Err(detail)` on failure.
pub fn run_criterion<F>(number: u32, name: &'static str, budget: Option<Duration>, check: F) -> Outcome
where
    F: FnOnce() -> Result<String, String>,
{
    let start = Instant::now();
    let result = check();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(b) = budget {
        if elapsed > b {
            passed = false;
            detail = format!("{detail}; over the {:.0} s budget", b.as_secs_f64());
        }
    }
    Outcome { number, name, passed, elapsed, detail }
}
