use std::f64::consts::PI;

use crate::clock::EnhancingClock;
use crate::error::{invalid, Error, Result};

/// Summary parameters of a `d`-dimensional quasi-ideal clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiIdealParams {
    pub dimension: u32,
    pub eta: f64,
    /// `d^(-1 + eta)`
    pub gamma: f64,
    /// `d^(3 eta / 4 - 1) / pi`
    pub x_vr: f64,
    pub period: f64,
    /// `(gamma + x_vr / pi) * period`
    pub width: f64,
    pub tail: f64,
}

impl QuasiIdealParams {
    pub fn clock(&self) -> EnhancingClock {
        EnhancingClock::new(self.period, self.width, self.tail)
            .expect("validated in quasi_ideal_params")
            .with_dimension(self.dimension)
    }

    pub fn bar_sigma(&self) -> f64 {
        2.0 * self.width / self.period
    }
}

/// Window width of a quasi-ideal clock as a fraction of its period.
pub fn width_fraction(d: u32, eta: f64) -> f64 {
    let d = d as f64;
    let gamma = d.powf(-1.0 + eta);
    let x_vr = d.powf(0.75 * eta - 1.0) / PI;
    gamma + x_vr / PI
}

pub fn quasi_ideal_params(d: u32, eta: f64, period: f64, tail: f64) -> Result<QuasiIdealParams> {
    if d < 2 {
        return Err(invalid("d", format!("must be at least 2, got {d}")));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(invalid("eta", format!("must lie in (0, 1), got {eta}")));
    }
    if !(period.is_finite() && period > 0.0) {
        return Err(invalid("period", format!("must be positive, got {period}")));
    }
    if !(0.0..1.0).contains(&tail) {
        return Err(invalid("tail", format!("must lie in [0, 1), got {tail}")));
    }
    let df = d as f64;
    let gamma = df.powf(-1.0 + eta);
    let x_vr = df.powf(0.75 * eta - 1.0) / PI;
    let width = (gamma + x_vr / PI) * period;
    if width >= period {
        return Err(Error::Precondition(format!(
            "window width {width} reaches the period {period}: d = {d} too small for eta = {eta}"
        )));
    }
    Ok(QuasiIdealParams {
        dimension: d,
        eta,
        gamma,
        x_vr,
        period,
        width,
        tail,
    })
}
