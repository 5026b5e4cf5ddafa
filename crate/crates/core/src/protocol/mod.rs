//! The four enhancement protocols, their period rules and bounds, and the
//! Monte-Carlo trial runner.

pub mod bounds;
pub mod config;
pub mod engine;
pub mod monte_carlo;
pub mod period;

pub use bounds::{
    corollary_bounds, ec_bar_sigma, index_conditions, output_epsilon_budget, theorem1_bound,
    theorem1_tail, theorem2_bound, Binding, IndexConditions,
};
pub use config::{EcSpec, ProtocolConfig, ProtocolKind, Setup};
pub use engine::{
    dyn_switch_loop, run_dyn_switch, run_dyn_switch_feedback, run_ec_bunch, run_input_bunch,
    ArrivalTrace, InputSource, ProtocolRun, SwitchOptions,
};
pub use monte_carlo::{monte_carlo, monte_carlo_setup, trial_rng, TrialMatrix, TrialRow};
pub use period::{choose_period_feedback, choose_period_no_feedback, MAX_MULTIPLIER};
