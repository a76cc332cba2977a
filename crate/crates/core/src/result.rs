use std::fmt;

use num_rational::Ratio;

use crate::schedule::{BurningSchedule, DistanceCertificate};

/// Lower bound on the burning number reported alongside a schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LowerBound {
    /// Backed by a checkable argument (distance certificate, exhaustive
    /// refutation, exact covering infeasibility).
    Certified(usize),
    /// Asymptotic bound from the analysis; not checked on this instance.
    Analytical(f64),
}

impl LowerBound {
    pub fn certified(&self) -> Option<usize> {
        match *self {
            LowerBound::Certified(v) => Some(v),
            LowerBound::Analytical(_) => None,
        }
    }
}

impl fmt::Display for LowerBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LowerBound::Certified(v) => write!(f, "{v}"),
            LowerBound::Analytical(v) => write!(f, "uncertified {v:.3}"),
        }
    }
}

/// Work counters filled in by the solvers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub edge_traversals: u64,
    pub guess_calls: u64,
    pub dp_states: u64,
    pub covering_nodes: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxResult {
    pub schedule: BurningSchedule,
    /// Completion round of `schedule`, from simulation.
    pub rounds: usize,
    pub opt_lower_bound: LowerBound,
    /// Proven approximation factor of the algorithm that produced this.
    pub ratio_bound: Ratio<u64>,
    /// Accepted guess (g*, k*, or g depending on the algorithm).
    pub guess: usize,
    /// Distance certificate behind `opt_lower_bound`, when there is one.
    pub certificate: Option<DistanceCertificate>,
    pub counters: Counters,
}
