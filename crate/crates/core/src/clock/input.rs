use rand::Rng;

use crate::tick::{TickTrace, WaitingTimeDistribution};

/// An i.i.d. clock: consecutive waiting times are independent draws of
/// `dist`, and when `resettable` the renewal process can be restarted.
#[derive(Debug, Clone, PartialEq)]
pub struct InputClock {
    pub dist: WaitingTimeDistribution,
    pub resettable: bool,
}

impl InputClock {
    pub fn new(dist: WaitingTimeDistribution) -> Self {
        Self {
            dist,
            resettable: true,
        }
    }

    /// Renewal process started at time `start`.
    pub fn start(&self, start: f64) -> RenewalProcess<'_> {
        RenewalProcess {
            dist: &self.dist,
            last: start,
            pending: None,
        }
    }

    /// First `count` ticks of a process started at zero.
    pub fn trace<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> TickTrace {
        let mut process = self.start(0.0);
        let mut trace = TickTrace::with_capacity(count);
        for _ in 0..count {
            trace
                .push(process.pop(rng))
                .expect("waiting times are positive");
        }
        trace
    }
}

/// Lazily generated tick sequence of an [`InputClock`].
#[derive(Debug, Clone)]
pub struct RenewalProcess<'a> {
    dist: &'a WaitingTimeDistribution,
    last: f64,
    pending: Option<f64>,
}

impl RenewalProcess<'_> {
    /// Time of the next tick without consuming it.
    pub fn peek<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        if self.pending.is_none() {
            self.pending = Some(self.last + self.dist.sample(rng));
        }
        self.pending.unwrap()
    }

    pub fn pop<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        let t = self.peek(rng);
        self.last = t;
        self.pending = None;
        t
    }

    /// First tick strictly after `t`, with the number of earlier ticks that
    /// were passed over.
    pub fn next_after<R: Rng + ?Sized>(&mut self, t: f64, rng: &mut R) -> (f64, usize) {
        let mut skipped = 0;
        loop {
            let next = self.pop(rng);
            if next > t {
                return (next, skipped);
            }
            skipped += 1;
        }
    }

    /// Restarts the renewal process at `t`. Ticks that would have fired up
    /// to `t` are generated first and their count returned.
    pub fn reset<R: Rng + ?Sized>(&mut self, t: f64, rng: &mut R) -> usize {
        let mut fired = 0;
        while self.peek(rng) <= t {
            self.pop(rng);
            fired += 1;
        }
        self.last = t;
        self.pending = None;
        fired
    }
}
