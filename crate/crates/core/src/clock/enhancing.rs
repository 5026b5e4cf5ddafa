use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::tick::TickTrace;

/// Detector state of the enhancing clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Detector off: lossless periodic evolution.
    NoTick,
    /// Detector on: the clock fires once its hand reaches the detector.
    Tick,
}

/// Switchable clock obeying the stability criterion.
///
/// The phase `s` lives in `(-period/2, period/2]`, with `s = 0` the reset
/// state. Once switched on, the tick fires at phase `phi`, drawn
/// independently of `s`: uniform on the window
/// `((period - width)/2, (period + width)/2)` with probability `1 - tail`
/// and uniform over a whole period otherwise. The hand only moves forward,
/// so a tick phase at or behind `s` is reached one revolution later.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnhancingClock {
    period: f64,
    width: f64,
    tail: f64,
    phase: f64,
    mode: Mode,
    dimension: Option<u32>,
}

impl EnhancingClock {
    /// Clock in the reset state with its detector off. A zero `width`
    /// gives a deterministic detector.
    pub fn new(period: f64, width: f64, tail: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(invalid("period", format!("must be positive, got {period}")));
        }
        if !(width >= 0.0 && width < period) {
            return Err(invalid(
                "width",
                format!("must lie in [0, period = {period}), got {width}"),
            ));
        }
        if !(0.0..1.0).contains(&tail) {
            return Err(invalid("tail", format!("must lie in [0, 1), got {tail}")));
        }
        Ok(Self {
            period,
            width,
            tail,
            phase: 0.0,
            mode: Mode::NoTick,
            dimension: None,
        })
    }

    pub fn with_dimension(mut self, d: u32) -> Self {
        self.dimension = Some(d);
        self
    }

    /// Same clock placed at phase `s` (wrapped into the period).
    pub fn with_phase(mut self, s: f64) -> Self {
        self.phase = wrap_phase(s, self.period);
        self
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn dimension(&self) -> Option<u32> {
        self.dimension
    }

    /// Window in which the tick phase lands with probability `1 - tail`.
    pub fn window(&self) -> (f64, f64) {
        (
            (self.period - self.width) / 2.0,
            (self.period + self.width) / 2.0,
        )
    }

    /// Upper bound `2 width / period` on the reset clock's inaccuracy.
    pub fn bar_sigma(&self) -> f64 {
        2.0 * self.width / self.period
    }

    /// Free evolution with the detector off.
    pub fn advance(&self, dt: f64) -> Result<Self> {
        if self.mode != Mode::NoTick {
            return Err(Error::WrongMode { expected: "NoTick" });
        }
        if !(dt >= 0.0) {
            return Err(invalid("dt", format!("must be non-negative, got {dt}")));
        }
        Ok(Self {
            phase: wrap_phase(self.phase + dt, self.period),
            ..*self
        })
    }

    pub fn switch_on(&self) -> Self {
        Self {
            mode: Mode::Tick,
            ..*self
        }
    }

    /// Reset state, detector off.
    pub fn reset(&self) -> Self {
        Self {
            phase: 0.0,
            mode: Mode::NoTick,
            ..*self
        }
    }

    pub fn sample_tick_phase<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.tail > 0.0 && rng.random::<f64>() < self.tail {
            // (-period/2, period/2]
            self.period / 2.0 - self.period * rng.random::<f64>()
        } else {
            (self.period - self.width) / 2.0 + self.width * rng.random::<f64>()
        }
    }

    /// Runs the switched-on clock until it ticks. Returns the waiting time
    /// and the clock after the tick, back in the reset state with the
    /// detector off.
    pub fn tick<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(f64, Self)> {
        if self.mode != Mode::Tick {
            return Err(Error::WrongMode { expected: "Tick" });
        }
        let phi = self.sample_tick_phase(rng);
        Ok((forward_wait(phi, self.phase, self.period), self.reset()))
    }
}

fn forward_wait(phi: f64, s: f64, period: f64) -> f64 {
    if phi > s {
        phi - s
    } else {
        phi - s + period
    }
}

/// Maps `x` into `(-period/2, period/2]`.
pub(crate) fn wrap_phase(x: f64, period: f64) -> f64 {
    let half = period / 2.0;
    let mut r = (x + half).rem_euclid(period) - half;
    if r > half {
        r -= period;
    }
    if r <= -half {
        r += period;
    }
    r
}

/// Parameters of an always-on reset clock: mean waiting time (half the
/// period), window width and tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeRunParams {
    pub mean: f64,
    pub width: f64,
    pub tail: f64,
}

impl FreeRunParams {
    pub fn clock(&self) -> Result<EnhancingClock> {
        EnhancingClock::new(2.0 * self.mean, self.width, self.tail)
    }
}

/// Enhancing clock left with its detector on, ticking from the reset state
/// over and over.
#[derive(Debug, Clone)]
pub struct FreeRunningClock {
    clock: EnhancingClock,
    now: f64,
}

impl FreeRunningClock {
    pub fn new(params: FreeRunParams, start: f64) -> Result<Self> {
        Ok(Self {
            clock: params.clock()?.switch_on(),
            now: start,
        })
    }

    pub fn next_tick<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        let phi = self.clock.sample_tick_phase(rng);
        self.now += forward_wait(phi, 0.0, self.clock.period);
        self.now
    }
}

/// `count` ticks of a free-running reset clock started at zero.
pub fn ec_free_run<R: Rng + ?Sized>(
    params: FreeRunParams,
    count: usize,
    rng: &mut R,
) -> Result<TickTrace> {
    if count == 0 {
        return Err(invalid("count", "must be at least 1"));
    }
    let mut clock = FreeRunningClock::new(params, 0.0)?;
    let mut trace = TickTrace::with_capacity(count);
    for _ in 0..count {
        trace.push(clock.next_tick(rng))?;
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ideal(period: f64) -> EnhancingClock {
        EnhancingClock::new(period, 0.0, 0.0).unwrap()
    }

    #[test]
    fn advance_wraps_phase() {
        let c = ideal(1.0);
        assert_eq!(c.advance(1.0).unwrap().phase(), 0.0);
        assert_eq!(c.advance(0.0).unwrap(), c);
        let s = c.with_phase(0.4).advance(0.2).unwrap().phase();
        assert!((s + 0.4).abs() < 1e-12);
        // the half-open range keeps +period/2 and drops -period/2
        assert_eq!(c.with_phase(-0.5).phase(), 0.5);
    }

    #[test]
    fn advance_requires_detector_off() {
        let c = ideal(1.0).switch_on();
        assert_eq!(c.advance(0.1), Err(Error::WrongMode { expected: "NoTick" }));
        assert!(ideal(1.0).tick(&mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn deterministic_detector_waits() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = ideal(1.0);
        let (t, after) = c.switch_on().tick(&mut rng).unwrap();
        assert_eq!(t, 0.5);
        assert_eq!((after.phase(), after.mode()), (0.0, Mode::NoTick));
        let (t, _) = c.with_phase(0.3).switch_on().tick(&mut rng).unwrap();
        assert!((t - 0.2).abs() < 1e-12);
        let (t, _) = c.with_phase(-0.4).switch_on().tick(&mut rng).unwrap();
        assert!((t - 0.9).abs() < 1e-12);
    }

    #[test]
    fn constructor_validation() {
        assert!(EnhancingClock::new(1.0, 1.0, 0.0).is_err());
        assert!(EnhancingClock::new(0.0, 0.0, 0.0).is_err());
        assert!(EnhancingClock::new(1.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn free_run_on_grid_without_noise() {
        let p = FreeRunParams {
            mean: 0.25,
            width: 0.0,
            tail: 0.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let trace = ec_free_run(p, 4, &mut rng).unwrap();
        assert_eq!(trace.as_slice(), &[0.25, 0.5, 0.75, 1.0]);
        assert_eq!(ec_free_run(p, 1, &mut rng).unwrap().len(), 1);
        assert!(ec_free_run(p, 0, &mut rng).is_err());
    }

    #[test]
    fn free_run_intervals_follow_window() {
        let p = FreeRunParams {
            mean: 0.5,
            width: 0.05,
            tail: 0.001,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let gaps = ec_free_run(p, 100_001, &mut rng).unwrap().intervals();
        let n = gaps.len() as f64;
        let mean = gaps.iter().sum::<f64>() / n;
        assert!((mean - p.mean).abs() < p.width);
        let inside = gaps
            .iter()
            .filter(|&&g| (g - p.mean).abs() < p.width / 2.0)
            .count() as f64;
        let sd = (0.001 * 0.999 / n).sqrt();
        assert!(inside / n >= 1.0 - p.tail - 3.0 * sd);
    }

    proptest! {
        #[test]
        fn advance_is_additive(parts in prop::collection::vec(0u32..4096, 1..12), s in -511i32..512) {
            // dyadic steps keep the arithmetic exact
            let c = ideal(1.0).with_phase(s as f64 / 1024.0);
            let total: f64 = parts.iter().map(|&p| p as f64 / 1024.0).sum();
            let mut stepped = c;
            for &p in &parts {
                stepped = stepped.advance(p as f64 / 1024.0).unwrap();
            }
            prop_assert_eq!(stepped.phase(), c.advance(total).unwrap().phase());
        }

        #[test]
        fn advance_is_additive_to_rounding(parts in prop::collection::vec(0.0f64..3.0, 1..12), s in -0.49f64..0.49) {
            let c = EnhancingClock::new(0.7, 0.01, 0.0).unwrap().with_phase(s);
            let total: f64 = parts.iter().sum();
            let mut stepped = c;
            for &p in &parts {
                stepped = stepped.advance(p).unwrap();
            }
            let d = (stepped.phase() - c.advance(total).unwrap().phase()).abs();
            prop_assert!(d < 1e-12 || (d - 0.7).abs() < 1e-12);
        }

        #[test]
        fn phase_stays_in_range(x in -1e3f64..1e3, period in 0.01f64..10.0) {
            let s = wrap_phase(x, period);
            prop_assert!(s > -period / 2.0 && s <= period / 2.0);
        }
    }
}
