use crate::error::{Error, Result};
use crate::stats::trimmed_width;
use crate::tick::TickTrace;

/// Spread of one tick index across nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    /// `max - min`
    pub range: f64,
    /// Shortest window holding a `1 - eps` share of the nodes.
    pub width: f64,
}

/// Spread of a set of simultaneous tick times.
pub fn spread_of(times: &[f64], eps: f64) -> Result<Spread> {
    if times.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let (lo, hi) = times
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| {
            (lo.min(t), hi.max(t))
        });
    Ok(Spread {
        range: hi - lo,
        width: trimmed_width(times, eps)?,
    })
}

/// Spread of the `k`-th tick (counted from 0) across node traces.
pub fn cross_node_spread(traces: &[TickTrace], k: usize, eps: f64) -> Result<Spread> {
    let times = traces
        .iter()
        .map(|t| {
            t.get(k).ok_or(Error::InsufficientSamples {
                needed: k + 1,
                got: t.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    spread_of(&times, eps)
}
