use crate::clock::quasi_ideal::width_fraction;
use crate::clock::{quasi_ideal_params, EnhancingClock, FreeRunParams, InputClock};
use crate::error::{invalid, Error, Result};
use crate::protocol::period::{choose_period_feedback, choose_period_no_feedback};

/// The four enhancement protocols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    /// Switch the enhancing clock on at each input tick.
    DynSwitch,
    /// As `DynSwitch`, restarting the input clock at every output.
    DynSwitchFeedback,
    /// One output every `capacity` input ticks.
    InputBunch { capacity: u32 },
    /// After each input tick, output at the next tick of a free-running
    /// enhancing clock.
    EcBunch,
}

impl ProtocolKind {
    pub fn label(&self) -> &'static str {
        match self {
            ProtocolKind::DynSwitch => "P1",
            ProtocolKind::DynSwitchFeedback => "P2",
            ProtocolKind::InputBunch { .. } => "P3",
            ProtocolKind::EcBunch => "P4",
        }
    }
}

/// How the enhancing clock is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EcSpec {
    /// Explicit period, window width and tail.
    Fixed { period: f64, width: f64, tail: f64 },
    /// Quasi-ideal clock of the given dimension; the period follows the
    /// protocol's period rule.
    QuasiIdeal { dimension: u32, eta: f64, tail: f64 },
    /// Window width as a fraction of the rule-chosen period.
    Scaled { width_fraction: f64, tail: f64 },
}

impl EcSpec {
    pub fn tail(&self) -> f64 {
        match *self {
            EcSpec::Fixed { tail, .. }
            | EcSpec::QuasiIdeal { tail, .. }
            | EcSpec::Scaled { tail, .. } => tail,
        }
    }

    /// Clock with the given period, or the fixed one.
    pub fn build(&self, period: f64) -> Result<EnhancingClock> {
        match *self {
            EcSpec::Fixed {
                period,
                width,
                tail,
            } => EnhancingClock::new(period, width, tail),
            EcSpec::QuasiIdeal {
                dimension,
                eta,
                tail,
            } => Ok(quasi_ideal_params(dimension, eta, period, tail)?.clock()),
            EcSpec::Scaled {
                width_fraction,
                tail,
            } => EnhancingClock::new(period, width_fraction * period, tail),
        }
    }

    /// Width as a fraction of the period, when it does not depend on it.
    pub fn width_fraction(&self) -> f64 {
        match *self {
            EcSpec::Fixed { period, width, .. } => width / period,
            EcSpec::QuasiIdeal { dimension, eta, .. } => width_fraction(dimension, eta),
            EcSpec::Scaled { width_fraction, .. } => width_fraction,
        }
    }
}

/// Everything needed to simulate one protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub protocol: ProtocolKind,
    pub input: InputClock,
    /// Tail level at which the input confidence interval is measured.
    pub input_tail: f64,
    pub ec: EcSpec,
    /// Output index the period rule without feedback is tuned for.
    pub design_index: u32,
    /// Number of output ticks `J` after the reference tick.
    pub outputs: usize,
    /// Cap on simulated time; derived from the input mean when `None`.
    pub horizon: Option<f64>,
    /// Restart the enhancing clock from its reset state every `K` outputs.
    pub restart_every: Option<usize>,
}

impl ProtocolConfig {
    pub fn new(protocol: ProtocolKind, input: InputClock, ec: EcSpec) -> Self {
        Self {
            protocol,
            input,
            input_tail: 0.01,
            ec,
            design_index: 1,
            outputs: 1,
            horizon: None,
            restart_every: None,
        }
    }

    pub fn with_outputs(mut self, outputs: usize) -> Self {
        self.outputs = outputs;
        self
    }

    pub fn with_input_tail(mut self, eps: f64) -> Self {
        self.input_tail = eps;
        self
    }

    pub fn with_design_index(mut self, j: u32) -> Self {
        self.design_index = j;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = Some(horizon);
        self
    }

    pub fn with_restart_every(mut self, k: usize) -> Self {
        self.restart_every = Some(k);
        self
    }

    /// Validates the configuration and derives the clock parameters.
    pub fn resolve(&self) -> Result<Setup> {
        if self.outputs == 0 {
            return Err(invalid("outputs", "must be at least 1"));
        }
        if let Some(h) = self.horizon {
            if !(h > 0.0) {
                return Err(invalid("horizon", format!("must be positive, got {h}")));
            }
        }
        if self.restart_every == Some(0) {
            return Err(invalid("restart_every", "must be at least 1"));
        }
        let mu = self.input.dist.mean();
        let interval = self.input.dist.analytic_confidence(self.input_tail)?;
        let sigma = interval.width;
        let mut setup = Setup {
            protocol: self.protocol,
            input: self.input.clone(),
            input_mean: mu,
            input_width: sigma,
            input_inaccuracy: interval.ratio(),
            multiplier: None,
            clock: None,
            free_run: None,
            outputs: self.outputs,
            horizon: 0.0,
            restart_every: self.restart_every,
        };
        let fixed = matches!(self.ec, EcSpec::Fixed { .. });
        match self.protocol {
            ProtocolKind::DynSwitch => {
                let period = if fixed {
                    0.0
                } else {
                    let (m, tau) = choose_period_no_feedback(mu, sigma, self.design_index)?;
                    setup.multiplier = Some(m);
                    tau
                };
                setup.clock = Some(self.ec.build(period)?);
            }
            ProtocolKind::DynSwitchFeedback => {
                if !self.input.resettable {
                    return Err(Error::Precondition(
                        "feedback needs a resettable input clock".into(),
                    ));
                }
                let period = if fixed {
                    0.0
                } else {
                    let (m, tau) = choose_period_feedback(mu, sigma)?;
                    setup.multiplier = Some(m);
                    tau
                };
                let clock = self.ec.build(period)?;
                if sigma >= clock.period() - clock.width() {
                    return Err(Error::Precondition(format!(
                        "input width {sigma} must stay below period minus window ({})",
                        clock.period() - clock.width()
                    )));
                }
                setup.clock = Some(clock);
            }
            ProtocolKind::InputBunch { capacity } => {
                if capacity == 0 {
                    return Err(invalid("capacity", "must be at least 1"));
                }
            }
            ProtocolKind::EcBunch => {
                // the free-running tick spacing plays the role of the period
                // chosen for the protocol without feedback
                let params = match self.ec {
                    EcSpec::Fixed {
                        period,
                        width,
                        tail,
                    } => FreeRunParams {
                        mean: period / 2.0,
                        width,
                        tail,
                    },
                    spec => {
                        let (m, spacing) = choose_period_no_feedback(mu, sigma, self.design_index)?;
                        setup.multiplier = Some(m);
                        let clock = spec.build(2.0 * spacing)?;
                        FreeRunParams {
                            mean: spacing,
                            width: clock.width(),
                            tail: clock.tail(),
                        }
                    }
                };
                params.clock()?;
                setup.free_run = Some(params);
            }
        }
        let per_output = match self.protocol {
            ProtocolKind::InputBunch { capacity } => capacity as f64 * mu,
            _ => mu,
        };
        setup.horizon = self
            .horizon
            .unwrap_or(100.0 * (self.outputs as f64 + 2.0) * per_output);
        Ok(setup)
    }
}

/// Resolved run parameters shared by every trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Setup {
    pub protocol: ProtocolKind,
    pub input: InputClock,
    pub input_mean: f64,
    /// Width of the input confidence interval.
    pub input_width: f64,
    pub input_inaccuracy: f64,
    /// Multiplier returned by the period rule, if one was applied.
    pub multiplier: Option<u64>,
    /// Switched enhancing clock of the dynamics-switching protocols.
    pub clock: Option<EnhancingClock>,
    /// Free-running clock of the EC-bunching protocol.
    pub free_run: Option<FreeRunParams>,
    pub outputs: usize,
    pub horizon: f64,
    pub restart_every: Option<usize>,
}

impl Setup {
    /// `2 width / period` of the enhancing clock in use.
    pub fn ec_bar_sigma(&self) -> Option<f64> {
        if let Some(c) = &self.clock {
            Some(c.bar_sigma())
        } else {
            self.free_run.map(|p| p.width / p.mean)
        }
    }
}
