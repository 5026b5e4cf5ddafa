//! Clock models: the i.i.d. input clock, the switchable enhancing clock,
//! the quasi-ideal parametrisation and the classical two-state chain.

pub mod enhancing;
pub mod input;
pub mod markov;
pub mod quasi_ideal;

pub use enhancing::{ec_free_run, EnhancingClock, FreeRunParams, FreeRunningClock, Mode};
pub use input::{InputClock, RenewalProcess};
pub use markov::{MarkovTwoState, PeriodicityDiagnostic};
pub use quasi_ideal::{quasi_ideal_params, QuasiIdealParams};
