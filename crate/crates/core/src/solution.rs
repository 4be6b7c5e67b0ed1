//! Outcome and instrumentation types shared by every solver.

use std::time::Duration;

/// Result of a solver run. A timeout is distinct from proven infeasibility.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<T> {
    Optimal(T),
    Infeasible,
    Timeout,
}

impl<T> Verdict<T> {
    pub fn solution(&self) -> Option<&T> {
        match self {
            Verdict::Optimal(t) => Some(t),
            _ => None,
        }
    }

    pub fn into_solution(self) -> Option<T> {
        match self {
            Verdict::Optimal(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_timeout(&self) -> bool {
        matches!(self, Verdict::Timeout)
    }

    pub fn status(&self) -> &'static str {
        match self {
            Verdict::Optimal(_) => "optimal",
            Verdict::Infeasible => "infeasible",
            Verdict::Timeout => "timeout",
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Verdict<U> {
        match self {
            Verdict::Optimal(t) => Verdict::Optimal(f(t)),
            Verdict::Infeasible => Verdict::Infeasible,
            Verdict::Timeout => Verdict::Timeout,
        }
    }
}

/// Branch-and-bound instrumentation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchStats {
    /// Number of stack pops.
    pub iterations: u64,
    /// Accumulated searching-space size of finished branches, in `[0, 1]`.
    pub searched_fraction: f64,
    /// `(iteration, incumbent cost)` at every improvement.
    pub best_cost_trace: Vec<(u64, u64)>,
    /// `(iteration, searched_fraction)` samples, when tracing is enabled.
    pub space_trace: Vec<(u64, f64)>,
    pub elapsed: Duration,
    /// Time spent building joint-pruning cost functions, if any.
    pub cost_function_build: Option<Duration>,
}

impl SearchStats {
    /// Cost-function build time over total solver time.
    pub fn overhead_ratio(&self) -> Option<f64> {
        let build = self.cost_function_build?.as_secs_f64();
        let total = self.elapsed.as_secs_f64();
        (total > 0.0).then(|| build / total)
    }
}

#[cfg(not(target_arch = "wasm32"))]
mod clock {
    pub use std::time::Instant;
}

#[cfg(target_arch = "wasm32")]
mod clock {
    use std::time::Duration;

    /// `std::time::Instant` is unavailable in the browser; time stands still.
    #[derive(Clone, Copy, Debug)]
    pub struct Instant;

    impl Instant {
        pub fn now() -> Self {
            Instant
        }
        pub fn elapsed(&self) -> Duration {
            Duration::ZERO
        }
    }
}

pub use clock::Instant;

/// Wall-clock budget for a solver run.
#[derive(Clone, Copy, Debug)]
pub struct Deadline {
    start: Instant,
    limit: Option<Duration>,
}

impl Deadline {
    pub fn new(limit: Option<Duration>) -> Self {
        Deadline {
            start: Instant::now(),
            limit,
        }
    }

    pub fn unlimited() -> Self {
        Self::new(None)
    }

    pub fn expired(&self) -> bool {
        self.limit.is_some_and(|l| self.start.elapsed() >= l)
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    pub fn limit(&self) -> Option<Duration> {
        self.limit
    }
}
