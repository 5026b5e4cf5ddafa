use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::protocol::config::{ProtocolConfig, Setup};
use crate::protocol::engine::ProtocolRun;
use crate::tick::{empirical_inaccuracy, InaccuracyEstimate};

/// Random stream of trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One row of a [`TrialMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    /// `T_j` for `j = 1..`; shorter than `J` when truncated.
    pub durations: Vec<f64>,
    pub truncated: bool,
    pub ignored: usize,
    pub triggers: usize,
}

impl From<ProtocolRun> for TrialRow {
    fn from(run: ProtocolRun) -> Self {
        Self {
            durations: run.durations(),
            truncated: run.truncated,
            ignored: run.ignored,
            triggers: run.triggers.len(),
        }
    }
}

/// Output durations of `M` independent trials.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialMatrix {
    pub outputs: usize,
    pub rows: Vec<TrialRow>,
}

impl TrialMatrix {
    pub fn trials(&self) -> usize {
        self.rows.len()
    }

    pub fn truncated(&self) -> usize {
        self.rows.iter().filter(|r| r.truncated).count()
    }

    fn complete(&self) -> impl Iterator<Item = &TrialRow> {
        self.rows.iter().filter(|r| !r.truncated)
    }

    /// `T_j` over the complete trials, `j` counted from 1.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.complete().map(|r| r.durations[j - 1]).collect()
    }

    /// `T_j - T_{j-1}` over the complete trials.
    pub fn spacing(&self, j: usize) -> Vec<f64> {
        self.complete()
            .map(|r| {
                let prev = if j == 1 { 0.0 } else { r.durations[j - 2] };
                r.durations[j - 1] - prev
            })
            .collect()
    }

    /// Empirical inaccuracy of the `j`-th output at tail `eps`.
    pub fn inaccuracy(&self, j: usize, eps: f64) -> Result<InaccuracyEstimate> {
        if j == 0 || j > self.outputs {
            return Err(invalid("j", format!("must lie in 1..={}", self.outputs)));
        }
        empirical_inaccuracy(&self.column(j), j as u32, eps)
    }
}

/// Runs `trials` independent trials of `setup`. Trial `i` draws from
/// [`trial_rng`]`(seed, i)`, so the result does not depend on scheduling.
pub fn monte_carlo_setup(setup: &Setup, trials: usize, seed: u64) -> Result<TrialMatrix> {
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    let rows = (0..trials as u64)
        .into_par_iter()
        .map(|i| setup.run(&mut trial_rng(seed, i)).map(TrialRow::from))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialMatrix {
        outputs: setup.outputs,
        rows,
    })
}

pub fn monte_carlo(cfg: &ProtocolConfig, trials: usize, seed: u64) -> Result<TrialMatrix> {
    monte_carlo_setup(&cfg.resolve()?, trials, seed)
}
