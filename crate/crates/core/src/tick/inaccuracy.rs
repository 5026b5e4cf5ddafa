use crate::error::{Error, Result};

/// Interval `[center - width/2, center + width/2]` with tail level `tail`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub center: f64,
    pub width: f64,
    pub tail: f64,
}

impl ConfidenceInterval {
    pub fn new(center: f64, width: f64, tail: f64) -> Self {
        Self {
            center,
            width,
            tail,
        }
    }

    pub fn from_bounds(lo: f64, hi: f64, tail: f64) -> Self {
        Self {
            center: (lo + hi) / 2.0,
            width: hi - lo,
            tail,
        }
    }

    pub fn lower(&self) -> f64 {
        self.center - self.width / 2.0
    }

    pub fn upper(&self) -> f64 {
        self.center + self.width / 2.0
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lower() && t <= self.upper()
    }

    /// Width over centre, the inaccuracy of a first tick.
    pub fn ratio(&self) -> f64 {
        self.width / self.center
    }
}

/// Empirical epsilon-inaccuracy of the `j`-th tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InaccuracyEstimate {
    pub value: f64,
    pub interval: ConfidenceInterval,
    pub tick_index: u32,
    pub eps: f64,
    pub samples: usize,
}

/// Number of samples a `(1 - eps)` interval must cover: `ceil((1 - eps) n)`.
///
/// The product is nudged down by a relative 1e-9 so that values such as
/// `(1 - 0.01) * 100` round to 99 rather than 100.
pub fn covering_count(n: usize, eps: f64) -> usize {
    let x = (1.0 - eps) * n as f64;
    let k = (x - 1e-9 * x.abs().max(1.0)).ceil();
    (k.max(0.0) as usize).min(n)
}

fn checked_sorted(samples: &[f64], eps: f64) -> Result<(Vec<f64>, usize)> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidParameter {
            name: "eps",
            reason: format!("must lie in [0, 1], got {eps}"),
        });
    }
    if let Some((index, &value)) = samples
        .iter()
        .enumerate()
        .find(|(_, x)| !(x.is_finite() && **x > 0.0))
    {
        return Err(Error::NonPositiveSample { index, value });
    }
    let k = covering_count(samples.len(), eps);
    if k == 0 {
        return Err(Error::Precondition(format!(
            "eps {eps} leaves no sample to cover"
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok((sorted, k))
}

#[inline]
fn scaled_ratio(j: u32, lo: f64, hi: f64) -> f64 {
    j as f64 * (hi - lo) / ((hi + lo) / 2.0)
}

/// Exact minimiser of `j * width / centre` over intervals covering at least
/// `ceil((1 - eps) N)` of the samples.
///
/// Only tight windows of `k` consecutive order statistics can be optimal:
/// moving either endpoint inwards while keeping the covered points shrinks
/// the width and can only raise the centre's relative weight. Ties go to the
/// smallest left endpoint.
pub fn empirical_inaccuracy(samples: &[f64], j: u32, eps: f64) -> Result<InaccuracyEstimate> {
    if j == 0 {
        return Err(crate::error::invalid("j", "tick index starts at 1"));
    }
    let (sorted, k) = checked_sorted(samples, eps)?;
    let mut best = (f64::INFINITY, 0);
    for i in 0..=sorted.len() - k {
        let r = scaled_ratio(j, sorted[i], sorted[i + k - 1]);
        if r < best.0 {
            best = (r, i);
        }
    }
    let (lo, hi) = (sorted[best.1], sorted[best.1 + k - 1]);
    Ok(InaccuracyEstimate {
        value: best.0,
        interval: ConfidenceInterval::from_bounds(lo, hi, eps),
        tick_index: j,
        eps,
        samples: sorted.len(),
    })
}

/// Reference minimiser that scores every interval with endpoints on sample
/// points, counting coverage by binary search instead of relying on window
/// tightness. Quadratic in the sample count; meant for cross-checking
/// [`empirical_inaccuracy`].
pub fn brute_force_inaccuracy(samples: &[f64], j: u32, eps: f64) -> Result<InaccuracyEstimate> {
    if j == 0 {
        return Err(crate::error::invalid("j", "tick index starts at 1"));
    }
    let (sorted, k) = checked_sorted(samples, eps)?;
    let mut best: Option<(f64, f64, f64)> = None;
    for &lo in &sorted {
        let first = sorted.partition_point(|&x| x < lo);
        for &hi in sorted.iter().filter(|&&x| x >= lo) {
            let covered = sorted.partition_point(|&x| x <= hi) - first;
            if covered < k {
                continue;
            }
            let r = scaled_ratio(j, lo, hi);
            let better = match best {
                None => true,
                Some((br, blo, _)) => r < br || (r == br && lo < blo),
            };
            if better {
                best = Some((r, lo, hi));
            }
        }
    }
    let (value, lo, hi) = best.expect("the full sample range covers everything");
    Ok(InaccuracyEstimate {
        value,
        interval: ConfidenceInterval::from_bounds(lo, hi, eps),
        tick_index: j,
        eps,
        samples: sorted.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_samples_have_zero_inaccuracy() {
        let est = empirical_inaccuracy(&[2.5; 10], 3, 0.1).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn three_point_example() {
        // windows [0.9, 1.0] -> 0.10526, [1.0, 1.1] -> 0.09524
        let est = empirical_inaccuracy(&[1.1, 0.9, 1.0], 1, 0.34).unwrap();
        assert!((est.value - 0.1 / 1.05).abs() < 1e-12);
        assert_eq!(est.interval.lower(), 1.0);
    }

    #[test]
    fn covering_count_rounding() {
        assert_eq!(covering_count(100, 0.01), 99);
        assert_eq!(covering_count(3, 0.34), 2);
        assert_eq!(covering_count(10, 0.0), 10);
        assert_eq!(covering_count(10, 0.05), 10);
        assert_eq!(covering_count(3, 1.0), 0);
    }

    #[test]
    fn error_paths() {
        assert!(matches!(
            empirical_inaccuracy(&[1.0], 1, 0.1),
            Err(Error::InsufficientSamples { .. })
        ));
        assert!(matches!(
            empirical_inaccuracy(&[1.0, 0.0], 1, 0.1),
            Err(Error::NonPositiveSample { index: 1, .. })
        ));
        assert!(empirical_inaccuracy(&[1.0, 2.0], 0, 0.1).is_err());
        assert!(empirical_inaccuracy(&[1.0, 2.0], 1, 1.0).is_err());
    }

    #[test]
    fn value_is_j_width_over_center() {
        let est = empirical_inaccuracy(&[1.0, 1.2, 1.3, 2.0, 0.7], 4, 0.2).unwrap();
        let iv = est.interval;
        assert_eq!(est.value, 4.0 * iv.width / iv.center);
    }

    fn sample_sets() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.01f64..10.0, 2..60)
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(
            xs in sample_sets(),
            j in 1u32..5,
            eps in prop::sample::select(vec![0.0, 0.01, 0.1, 0.34, 0.5]),
        ) {
            let fast = empirical_inaccuracy(&xs, j, eps).unwrap();
            let slow = brute_force_inaccuracy(&xs, j, eps).unwrap();
            prop_assert_eq!(fast.value, slow.value);
            prop_assert_eq!(fast.interval, slow.interval);
        }

        #[test]
        fn scale_invariant(xs in sample_sets(), c in 0.01f64..100.0) {
            let a = empirical_inaccuracy(&xs, 1, 0.1).unwrap().value;
            let scaled: Vec<f64> = xs.iter().map(|x| x * c).collect();
            let b = empirical_inaccuracy(&scaled, 1, 0.1).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }

        #[test]
        fn non_increasing_in_eps(xs in sample_sets(), e1 in 0.0f64..0.9, e2 in 0.0f64..0.9) {
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let a = empirical_inaccuracy(&xs, 1, lo).unwrap().value;
            let b = empirical_inaccuracy(&xs, 1, hi).unwrap().value;
            prop_assert!(b <= a);
        }
    }
}
