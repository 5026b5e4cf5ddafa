use rand::Rng;

use crate::clock::{EnhancingClock, FreeRunningClock, RenewalProcess};
use crate::error::{Error, Result};
use crate::protocol::config::{ProtocolConfig, ProtocolKind, Setup};
use crate::tick::TickTrace;

/// Source of input ticks for the dynamics-switching loop.
pub trait InputSource {
    /// First tick strictly after `t` and the number of earlier ticks passed
    /// over, or `None` once the source is exhausted.
    fn next_after<R: Rng + ?Sized>(&mut self, t: f64, rng: &mut R) -> Option<(f64, usize)>;

    /// Restarts the source at `t`, returning the ticks that fired up to `t`.
    fn reset<R: Rng + ?Sized>(&mut self, t: f64, rng: &mut R) -> Result<usize>;
}

impl InputSource for RenewalProcess<'_> {
    fn next_after<R: Rng + ?Sized>(&mut self, t: f64, rng: &mut R) -> Option<(f64, usize)> {
        Some(RenewalProcess::next_after(self, t, rng))
    }

    fn reset<R: Rng + ?Sized>(&mut self, t: f64, rng: &mut R) -> Result<usize> {
        Ok(RenewalProcess::reset(self, t, rng))
    }
}

/// Recorded arrival times replayed as an input clock.
#[derive(Debug, Clone)]
pub struct ArrivalTrace<'a> {
    times: &'a [f64],
    pos: usize,
}

impl<'a> ArrivalTrace<'a> {
    pub fn new(times: &'a [f64]) -> Self {
        Self { times, pos: 0 }
    }
}

impl InputSource for ArrivalTrace<'_> {
    fn next_after<R: Rng + ?Sized>(&mut self, t: f64, _rng: &mut R) -> Option<(f64, usize)> {
        let mut skipped = 0;
        while let Some(&next) = self.times.get(self.pos) {
            self.pos += 1;
            if next > t {
                return Some((next, skipped));
            }
            skipped += 1;
        }
        None
    }

    fn reset<R: Rng + ?Sized>(&mut self, _t: f64, _rng: &mut R) -> Result<usize> {
        Err(Error::Precondition(
            "a recorded arrival trace cannot be reset".into(),
        ))
    }
}

/// Output of a single protocol run.
///
/// Durations are measured from `zeroth`: the first output for the
/// dynamics-switching protocols, the common start time zero for the
/// bunching protocols.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRun {
    pub zeroth: f64,
    /// Output ticks after the reference tick.
    pub ticks: TickTrace,
    /// Input ticks that triggered an output.
    pub triggers: Vec<f64>,
    /// Input ticks consumed without effect.
    pub ignored: usize,
    /// Set when the horizon cut the run short.
    pub truncated: bool,
}

impl ProtocolRun {
    fn new(zeroth: f64, capacity: usize) -> Self {
        Self {
            zeroth,
            ticks: TickTrace::with_capacity(capacity),
            triggers: Vec::with_capacity(capacity + 1),
            ignored: 0,
            truncated: false,
        }
    }

    /// `T_j = t_j - zeroth` for `j = 1..=len`.
    pub fn durations(&self) -> Vec<f64> {
        self.ticks
            .as_slice()
            .iter()
            .map(|t| t - self.zeroth)
            .collect()
    }

    /// The reference tick followed by all outputs, when the reference is
    /// itself an output.
    pub fn all_outputs(&self) -> Vec<f64> {
        std::iter::once(self.zeroth)
            .chain(self.ticks.as_slice().iter().copied())
            .collect()
    }
}

/// Options of the dynamics-switching loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchOptions {
    pub feedback: bool,
    /// Start from a clock already running since time zero at this phase
    /// instead of resetting it at the first input.
    pub initial_phase: Option<f64>,
    pub restart_every: Option<usize>,
    pub horizon: f64,
}

/// Dynamics-switching loop: each effective input tick switches the
/// enhancing clock on, each enhancing tick is an output after which the
/// clock is reset and switched off.
pub fn dyn_switch_loop<S: InputSource, R: Rng + ?Sized>(
    clock: &EnhancingClock,
    source: &mut S,
    outputs: usize,
    opts: SwitchOptions,
    rng: &mut R,
) -> Result<ProtocolRun> {
    let Some((first, skipped)) = source.next_after(0.0, rng) else {
        return Err(Error::Precondition("input source produced no tick".into()));
    };
    let armed = match opts.initial_phase {
        Some(s0) => clock.reset().with_phase(s0).advance(first)?,
        None => clock.reset(),
    };
    let (wait, mut ec) = armed.switch_on().tick(rng)?;
    let mut out = first + wait;
    let mut run = ProtocolRun::new(out, outputs);
    run.triggers.push(first);
    run.ignored = skipped;
    if out > opts.horizon {
        run.truncated = true;
        return Ok(run);
    }
    for i in 1..=outputs {
        if opts.feedback {
            run.ignored += source.reset(out, rng)?;
        }
        let Some((t_in, skipped)) = source.next_after(out, rng) else {
            run.truncated = true;
            break;
        };
        run.ignored += skipped;
        if t_in > opts.horizon {
            run.truncated = true;
            break;
        }
        let restart = matches!(opts.restart_every, Some(k) if i > 1 && (i - 1) % k == 0);
        let armed = if restart {
            ec.reset()
        } else {
            ec.advance(t_in - out)?
        };
        let (wait, next) = armed.switch_on().tick(rng)?;
        ec = next;
        let t_out = t_in + wait;
        if t_out > opts.horizon {
            run.truncated = true;
            break;
        }
        run.triggers.push(t_in);
        run.ticks.push(t_out)?;
        out = t_out;
    }
    Ok(run)
}

impl Setup {
    /// One trial of the resolved protocol.
    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ProtocolRun> {
        match self.protocol {
            ProtocolKind::DynSwitch | ProtocolKind::DynSwitchFeedback => {
                let clock = self.clock.as_ref().expect("resolved with a clock");
                let mut source = self.input.start(0.0);
                dyn_switch_loop(
                    clock,
                    &mut source,
                    self.outputs,
                    SwitchOptions {
                        feedback: self.protocol == ProtocolKind::DynSwitchFeedback,
                        initial_phase: None,
                        restart_every: self.restart_every,
                        horizon: self.horizon,
                    },
                    rng,
                )
            }
            ProtocolKind::InputBunch { capacity } => self.run_input_bunch(capacity, rng),
            ProtocolKind::EcBunch => self.run_ec_bunch(rng),
        }
    }

    fn run_input_bunch<R: Rng + ?Sized>(&self, capacity: u32, rng: &mut R) -> Result<ProtocolRun> {
        let mut source = self.input.start(0.0);
        let mut run = ProtocolRun::new(0.0, self.outputs);
        for _ in 0..self.outputs {
            let mut t = 0.0;
            for _ in 0..capacity {
                t = source.pop(rng);
            }
            if t > self.horizon {
                run.truncated = true;
                break;
            }
            run.triggers.push(t);
            run.ticks.push(t)?;
        }
        Ok(run)
    }

    fn run_ec_bunch<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ProtocolRun> {
        let params = self.free_run.expect("resolved with free-run parameters");
        let mut ec = FreeRunningClock::new(params, 0.0)?;
        let mut source = self.input.start(0.0);
        let mut run = ProtocolRun::new(0.0, self.outputs);
        let mut ec_tick = 0.0;
        let mut last = 0.0;
        for _ in 0..self.outputs {
            let (t_in, skipped) = source.next_after(last, rng);
            run.ignored += skipped;
            while ec_tick < t_in && ec_tick <= self.horizon {
                ec_tick = ec.next_tick(rng);
            }
            if ec_tick > self.horizon {
                run.truncated = true;
                break;
            }
            run.triggers.push(t_in);
            run.ticks.push(ec_tick)?;
            last = ec_tick;
        }
        Ok(run)
    }
}

/// Protocol without feedback.
pub fn run_dyn_switch<R: Rng + ?Sized>(cfg: &ProtocolConfig, rng: &mut R) -> Result<ProtocolRun> {
    expect_kind(cfg, |k| k == ProtocolKind::DynSwitch, "DynSwitch")?;
    cfg.resolve()?.run(rng)
}

/// Protocol with input-clock feedback.
pub fn run_dyn_switch_feedback<R: Rng + ?Sized>(
    cfg: &ProtocolConfig,
    rng: &mut R,
) -> Result<ProtocolRun> {
    expect_kind(
        cfg,
        |k| k == ProtocolKind::DynSwitchFeedback,
        "DynSwitchFeedback",
    )?;
    cfg.resolve()?.run(rng)
}

/// Bunching of input ticks.
pub fn run_input_bunch<R: Rng + ?Sized>(cfg: &ProtocolConfig, rng: &mut R) -> Result<ProtocolRun> {
    expect_kind(
        cfg,
        |k| matches!(k, ProtocolKind::InputBunch { .. }),
        "InputBunch",
    )?;
    cfg.resolve()?.run(rng)
}

/// Bunching of enhancing-clock ticks.
pub fn run_ec_bunch<R: Rng + ?Sized>(cfg: &ProtocolConfig, rng: &mut R) -> Result<ProtocolRun> {
    expect_kind(cfg, |k| k == ProtocolKind::EcBunch, "EcBunch")?;
    cfg.resolve()?.run(rng)
}

fn expect_kind(
    cfg: &ProtocolConfig,
    ok: impl Fn(ProtocolKind) -> bool,
    name: &'static str,
) -> Result<()> {
    if ok(cfg.protocol) {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "configuration is for {}, not {name}",
            cfg.protocol.label()
        )))
    }
}
