use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::algorithms::AlgorithmId;

/// Why an algorithm invocation produced no value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Failure {
    RecursionDepthExceeded,
    FloatOverflow,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Failure::RecursionDepthExceeded => "RecursionDepthExceeded",
            Failure::FloatOverflow => "FloatOverflow",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FibError {
    #[error("recursion depth limit of {limit} exceeded")]
    RecursionDepthExceeded { limit: usize },
    #[error("floating-point overflow")]
    FloatOverflow,
    #[error("value is not finite")]
    NotFinite,
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("invalid sample: {algo} failed at n = {n} ({failure})")]
    InvalidSample {
        algo: AlgorithmId,
        n: u64,
        failure: Failure,
    },
}

impl FibError {
    /// The outcome-level failure this error maps to, if it is one an
    /// algorithm can legitimately produce.
    pub fn failure(&self) -> Option<Failure> {
        match self {
            FibError::RecursionDepthExceeded { .. } => Some(Failure::RecursionDepthExceeded),
            // a non-finite float inside an algorithm means something overflowed upstream
            FibError::FloatOverflow | FibError::NotFinite => Some(Failure::FloatOverflow),
            _ => None,
        }
    }
}

/// Overflow flag returned by float exponentiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("floating-point overflow")]
pub struct FloatOverflow;

impl From<FloatOverflow> for FibError {
    fn from(_: FloatOverflow) -> Self {
        FibError::FloatOverflow
    }
}

/// Explicit recursion-depth counter threaded through recursive algorithms.
#[derive(Debug, Clone)]
pub struct DepthGuard {
    depth: usize,
    max_depth: usize,
}

impl DepthGuard {
    pub fn new(max_depth: usize) -> Self {
        Self { depth: 0, max_depth }
    }

    pub fn enter(&mut self) -> Result<(), FibError> {
        if self.depth >= self.max_depth {
            return Err(FibError::RecursionDepthExceeded {
                limit: self.max_depth,
            });
        }
        self.depth += 1;
        Ok(())
    }

    pub fn leave(&mut self) {
        self.depth -= 1;
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard_allows_exactly_max_depth_frames() {
        let mut guard = DepthGuard::new(2);
        guard.enter().unwrap();
        guard.enter().unwrap();
        assert_eq!(guard.enter(), Err(FibError::RecursionDepthExceeded { limit: 2 }));
        guard.leave();
        assert_eq!(guard.depth(), 1);
        guard.enter().unwrap();
    }

    #[test]
    fn failure_mapping() {
        assert_eq!(FibError::NotFinite.failure(), Some(Failure::FloatOverflow));
        assert_eq!(
            FibError::RecursionDepthExceeded { limit: 3 }.failure(),
            Some(Failure::RecursionDepthExceeded)
        );
        assert_eq!(FibError::UnknownAlgorithm("fib13".into()).failure(), None);
    }
}
