//! Waiting-time laws, tick traces, the epsilon-inaccuracy estimator and the
//! analytic bounds that relate inaccuracy to other accuracy measures.

pub mod bounds;
pub mod distribution;
pub mod inaccuracy;
pub mod trace;

pub use bounds::{chebyshev_bound, hoeffding_inaccuracy_bound, hoeffding_tail, r_accuracy};
pub use distribution::{Law, WaitingTimeDistribution};
pub use inaccuracy::{
    brute_force_inaccuracy, covering_count, empirical_inaccuracy, ConfidenceInterval,
    InaccuracyEstimate,
};
pub use trace::TickTrace;
