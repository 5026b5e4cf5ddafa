//! A central clock broadcasts ticks over links with fixed delays and
//! bounded jitter; every node enhances its arrivals with the protocol
//! without feedback, using a local enhancing clock synchronised with the
//! others at time zero.

pub mod spread;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::clock::{EnhancingClock, InputClock};
use crate::error::{invalid, Error, Result};
use crate::protocol::{
    choose_period_no_feedback, dyn_switch_loop, ArrivalTrace, EcSpec, SwitchOptions,
};
use crate::stats::median;
use crate::tick::{TickTrace, WaitingTimeDistribution};

pub use spread::{cross_node_spread, spread_of, Spread};

// bits of keystream reserved for each node of a trial
const LANE_SHIFT: u32 = 48;

/// One receiving node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeConfig {
    /// Mean propagation delay from the central clock.
    pub delay: f64,
    /// Jitter law; draws are centred on its mean. `None` for no jitter.
    pub jitter: Option<WaitingTimeDistribution>,
    pub ec: EcSpec,
    /// Phase of the local clock at time zero.
    pub initial_phase: f64,
}

impl NodeConfig {
    pub fn new(delay: f64, jitter: Option<WaitingTimeDistribution>, ec: EcSpec) -> Self {
        Self {
            delay,
            jitter,
            ec,
            initial_phase: 0.0,
        }
    }

    /// Lowest and highest jitter offsets.
    fn jitter_range(&self) -> (f64, f64) {
        match &self.jitter {
            None => (0.0, 0.0),
            Some(j) => {
                let (lo, hi) = j.support();
                (lo - j.mean(), hi - j.mean())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkScenario {
    pub central: InputClock,
    /// Tail level of the central clock's confidence interval.
    pub input_tail: f64,
    pub nodes: Vec<NodeConfig>,
    /// Enhanced ticks produced by every node.
    pub outputs: usize,
}

/// Parameters shared by all trials of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkDesign {
    /// Common period of the node clocks.
    pub period: f64,
    /// Time of the first central tick's renewal start.
    pub start: f64,
    /// Effective input width seen by each node.
    pub widths: Vec<f64>,
    pub clocks: Vec<EnhancingClock>,
}

impl NetworkScenario {
    pub fn design(&self) -> Result<NetworkDesign> {
        if self.nodes.len() < 2 {
            return Err(invalid(
                "nodes",
                format!("at least 2 nodes required, got {}", self.nodes.len()),
            ));
        }
        if self.outputs == 0 {
            return Err(invalid("outputs", "must be at least 1"));
        }
        let mu = self.central.dist.mean();
        let sigma_in = self
            .central
            .dist
            .analytic_confidence(self.input_tail)?
            .width;
        let mean_delay = self.nodes.iter().map(|n| n.delay).sum::<f64>() / self.nodes.len() as f64;
        let mut widths = Vec::with_capacity(self.nodes.len());
        for (i, node) in self.nodes.iter().enumerate() {
            let (lo, hi) = node.jitter_range();
            if !(hi - lo).is_finite() {
                return Err(Error::Node {
                    node: i,
                    reason: "jitter must have bounded support".into(),
                });
            }
            if !(node.delay + lo >= 0.0) {
                return Err(Error::Node {
                    node: i,
                    reason: format!("delay {} plus jitter {lo} is negative", node.delay),
                });
            }
            if matches!(node.ec, EcSpec::Fixed { .. }) {
                return Err(Error::Node {
                    node: i,
                    reason: "node clocks take the common period; use a quasi-ideal or scaled clock"
                        .into(),
                });
            }
            let w = sigma_in + (hi - lo) + 2.0 * (node.delay - mean_delay).abs();
            if let Err(e) = choose_period_no_feedback(mu, w, 1) {
                return Err(Error::Node {
                    node: i,
                    reason: e.to_string(),
                });
            }
            widths.push(w);
        }
        let widest = widths.iter().copied().fold(0.0, f64::max);
        let (_, period) = choose_period_no_feedback(mu, widest, 1)?;
        let clocks = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                n.ec.build(period)
                    .map(|c| c.with_phase(n.initial_phase))
                    .map_err(|e| Error::Node {
                        node: i,
                        reason: e.to_string(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        // the first broadcast reaches an average node at clock phase zero
        let start = (-(mu + mean_delay)).rem_euclid(period);
        Ok(NetworkDesign {
            period,
            start,
            widths,
            clocks,
        })
    }
}

/// Result of one broadcast trial.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRun {
    pub emissions: Vec<f64>,
    /// `arrivals[i][k]`: broadcast `k` at node `i`.
    pub arrivals: Vec<Vec<f64>>,
    /// Enhanced ticks of each node, `outputs` long unless truncated.
    pub enhanced: Vec<TickTrace>,
    pub truncated: bool,
}

impl NetworkRun {
    /// Spread of the raw arrivals of broadcast `k`.
    pub fn raw_spread(&self, k: usize, eps: f64) -> Result<Spread> {
        let times = self
            .arrivals
            .iter()
            .map(|a| {
                a.get(k).copied().ok_or(Error::InsufficientSamples {
                    needed: k + 1,
                    got: a.len(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        spread_of(&times, eps)
    }

    pub fn enhanced_spread(&self, k: usize, eps: f64) -> Result<Spread> {
        cross_node_spread(&self.enhanced, k, eps)
    }
}

fn lane_rng(seed: u64, trial: u64, lane: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng.set_word_pos((lane as u128) << LANE_SHIFT);
    rng
}

/// Trial `trial` of the scenario. The broadcast is drawn first; each node
/// then sees only its own arrival times.
pub fn run_network_trial(
    scenario: &NetworkScenario,
    design: &NetworkDesign,
    seed: u64,
    trial: u64,
) -> Result<NetworkRun> {
    // spare broadcasts cover arrivals that land while a detector is on
    let broadcasts = 2 * scenario.outputs + 4;
    let mut rng = lane_rng(seed, trial, 0);
    let mut central = scenario.central.start(design.start);
    let emissions: Vec<f64> = (0..broadcasts).map(|_| central.pop(&mut rng)).collect();

    let per_node = scenario
        .nodes
        .iter()
        .zip(&design.clocks)
        .enumerate()
        .map(|(i, (node, clock))| {
            let mut rng = lane_rng(seed, trial, i as u64 + 1);
            let arrivals: Vec<f64> = emissions
                .iter()
                .map(|e| {
                    let jitter = node
                        .jitter
                        .as_ref()
                        .map_or(0.0, |j| j.sample(&mut rng) - j.mean());
                    e + node.delay + jitter
                })
                .collect();
            let mut sorted = arrivals.clone();
            sorted.sort_by(f64::total_cmp);
            let run = dyn_switch_loop(
                clock,
                &mut ArrivalTrace::new(&sorted),
                scenario.outputs - 1,
                SwitchOptions {
                    feedback: false,
                    initial_phase: Some(clock.phase()),
                    restart_every: None,
                    horizon: f64::INFINITY,
                },
                &mut rng,
            )?;
            let enhanced = TickTrace::from_times(run.all_outputs())?;
            Ok((arrivals, enhanced, run.truncated))
        })
        .collect::<Result<Vec<_>>>()?;

    let truncated = per_node.iter().any(|n| n.2);
    let (arrivals, enhanced) = per_node.into_iter().map(|(a, e, _)| (a, e)).unzip();
    Ok(NetworkRun {
        emissions,
        arrivals,
        enhanced,
        truncated,
    })
}

/// Single trial with stream 0.
pub fn run_network(scenario: &NetworkScenario, seed: u64) -> Result<NetworkRun> {
    run_network_trial(scenario, &scenario.design()?, seed, 0)
}

/// Spread statistics of tick `k` over many independent trials.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadSummary {
    pub raw: Vec<Spread>,
    pub enhanced: Vec<Spread>,
    pub truncated: usize,
}

impl SpreadSummary {
    pub fn median_raw_range(&self) -> f64 {
        median(&self.raw.iter().map(|s| s.range).collect::<Vec<_>>()).unwrap_or(f64::NAN)
    }

    pub fn median_enhanced_range(&self) -> f64 {
        median(&self.enhanced.iter().map(|s| s.range).collect::<Vec<_>>()).unwrap_or(f64::NAN)
    }
}

pub fn spread_trials(
    scenario: &NetworkScenario,
    trials: usize,
    seed: u64,
    k: usize,
    eps: f64,
) -> Result<SpreadSummary> {
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    if k >= scenario.outputs {
        return Err(invalid(
            "k",
            format!("must be below the output count {}", scenario.outputs),
        ));
    }
    let design = scenario.design()?;
    let runs = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_network_trial(scenario, &design, seed, t))
        .collect::<Result<Vec<_>>>()?;
    let mut summary = SpreadSummary {
        raw: Vec::with_capacity(trials),
        enhanced: Vec::with_capacity(trials),
        truncated: 0,
    };
    for run in &runs {
        if run.truncated {
            summary.truncated += 1;
            continue;
        }
        summary.raw.push(run.raw_spread(k, eps)?);
        summary.enhanced.push(run.enhanced_spread(k, eps)?);
    }
    Ok(summary)
}

/// Jitter law of total width `width` (uniform around zero offset).
pub fn box_jitter(width: f64) -> Result<Option<WaitingTimeDistribution>> {
    if width == 0.0 {
        return Ok(None);
    }
    // any positive centre works: draws are re-centred on the mean
    WaitingTimeDistribution::boxed(width, width).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central() -> InputClock {
        InputClock::new(WaitingTimeDistribution::boxed(1.0, 0.1).unwrap())
    }

    fn sharp() -> EcSpec {
        EcSpec::Scaled {
            width_fraction: 0.0,
            tail: 0.0,
        }
    }

    fn scenario(nodes: Vec<NodeConfig>) -> NetworkScenario {
        NetworkScenario {
            central: central(),
            input_tail: 0.01,
            nodes,
            outputs: 5,
        }
    }

    #[test]
    fn one_node_is_rejected() {
        let s = scenario(vec![NodeConfig::new(0.0, None, sharp())]);
        assert!(matches!(
            s.design(),
            Err(Error::InvalidParameter { name: "nodes", .. })
        ));
    }

    #[test]
    fn equal_nodes_agree_exactly() {
        let s = scenario(vec![
            NodeConfig::new(0.1, None, sharp()),
            NodeConfig::new(0.1, None, sharp()),
        ]);
        let run = run_network(&s, 3).unwrap();
        assert_eq!(run.enhanced[0], run.enhanced[1]);
        assert_eq!(run.enhanced[0].len(), 5);
    }

    #[test]
    fn enhanced_outputs_ignore_delay_offset() {
        let delta = 0.02;
        let ec = EcSpec::QuasiIdeal {
            dimension: 256,
            eta: 0.1,
            tail: 0.0,
        };
        let s = scenario(vec![
            NodeConfig::new(0.0, None, ec),
            NodeConfig::new(delta, None, ec),
        ]);
        let design = s.design().unwrap();
        let width = design.clocks[0].width();
        for trial in 0..50 {
            let run = run_network_trial(&s, &design, 11, trial).unwrap();
            for k in 0..s.outputs {
                let raw = run.arrivals[1][k] - run.arrivals[0][k];
                assert!((raw - delta).abs() < 1e-12);
                let out = run.enhanced_spread(0, 0.0).unwrap().range;
                assert!(out < width, "trial {trial}: {out} vs {width}");
            }
        }
        let sharp_net = scenario(vec![
            NodeConfig::new(0.0, None, sharp()),
            NodeConfig::new(delta, None, sharp()),
        ]);
        let run = run_network(&sharp_net, 4).unwrap();
        for k in 0..5 {
            assert!(run.enhanced_spread(k, 0.0).unwrap().range < 1e-12);
        }
    }

    #[test]
    fn node_errors_name_the_node() {
        let s = scenario(vec![
            NodeConfig::new(0.0, None, sharp()),
            NodeConfig::new(0.0, box_jitter(0.7).unwrap(), sharp()),
        ]);
        assert!(matches!(s.design(), Err(Error::Node { node: 1, .. })));
        let s = scenario(vec![
            NodeConfig::new(0.0, box_jitter(0.1).unwrap(), sharp()),
            NodeConfig::new(0.0, None, sharp()),
        ]);
        assert!(matches!(s.design(), Err(Error::Node { node: 0, .. })));
        let gaussian = WaitingTimeDistribution::gaussian(1.0, 0.01).unwrap();
        let s = scenario(vec![
            NodeConfig::new(1.0, Some(gaussian), sharp()),
            NodeConfig::new(0.0, None, sharp()),
        ]);
        assert!(matches!(s.design(), Err(Error::Node { node: 0, .. })));
    }

    #[test]
    fn trials_are_deterministic() {
        let s = scenario(vec![
            NodeConfig::new(0.03, box_jitter(0.05).unwrap(), sharp()),
            NodeConfig::new(0.04, box_jitter(0.05).unwrap(), sharp()),
            NodeConfig::new(0.05, box_jitter(0.05).unwrap(), sharp()),
        ]);
        let a = spread_trials(&s, 40, 8, 2, 0.0).unwrap();
        let b = spread_trials(&s, 40, 8, 2, 0.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.truncated, 0);
        assert!(a.median_enhanced_range() < a.median_raw_range());
    }
}
