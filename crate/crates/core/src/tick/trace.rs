use crate::error::{Error, Result};

/// Ordered absolute tick times produced by a clock or a protocol run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TickTrace {
    times: Vec<f64>,
}

impl TickTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
        }
    }

    /// Builds a trace, rejecting anything that is not strictly increasing
    /// or starts before time zero.
    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        let mut trace = Self::with_capacity(times.len());
        for t in times {
            trace.push(t)?;
        }
        Ok(trace)
    }

    pub fn push(&mut self, t: f64) -> Result<()> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::NotIncreasing {
                prev: self.last().unwrap_or(0.0),
                next: t,
            });
        }
        if let Some(prev) = self.last() {
            if t <= prev {
                return Err(Error::NotIncreasing { prev, next: t });
            }
        }
        self.times.push(t);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<f64> {
        self.times.last().copied()
    }

    pub fn get(&self, i: usize) -> Option<f64> {
        self.times.get(i).copied()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.times
    }

    /// Differences between consecutive ticks.
    pub fn intervals(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_increasing() {
        assert!(TickTrace::from_times(vec![0.5, 1.0, 2.0]).is_ok());
        assert!(TickTrace::from_times(vec![0.5, 0.5]).is_err());
        assert!(TickTrace::from_times(vec![1.0, 0.9]).is_err());
        assert!(TickTrace::from_times(vec![-0.1]).is_err());
        assert!(TickTrace::from_times(vec![f64::NAN]).is_err());
    }

    #[test]
    fn intervals_of_trace() {
        let t = TickTrace::from_times(vec![1.0, 3.0, 4.5]).unwrap();
        assert_eq!(t.intervals(), vec![2.0, 1.5]);
    }
}
