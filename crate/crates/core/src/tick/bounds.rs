//! Closed-form relations between the epsilon-inaccuracy of an i.i.d. clock
//! and its single-tick statistics.

use crate::error::{invalid, Error, Result};

/// Probability that the `j`-th tick of an i.i.d. clock misses a centred
/// interval of width `n * sqrt(j) * sigma_1`:
/// `1 - (1 - eps)^j (1 - 2 exp(-n^2 / 2))`, clamped to `[0, 1]`.
pub fn hoeffding_tail(eps: f64, j: u32, n: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(invalid("eps", format!("must lie in [0, 1], got {eps}")));
    }
    if !(n > 0.0) {
        return Err(invalid("n", format!("must be positive, got {n}")));
    }
    let miss = 1.0 - (1.0 - eps).powi(j as i32) * (1.0 - 2.0 * (-n * n / 2.0).exp());
    Ok(miss.clamp(0.0, 1.0))
}

/// Inaccuracy bound `2 n sqrt(j) Sigma_1` of the `j`-th tick at the tail
/// level given by [`hoeffding_tail`].
///
/// The factor 2 is kept as stated even though substituting
/// `sigma_j = n sqrt(j) sigma_1` directly gives `n sqrt(j) Sigma_1`; the
/// looser constant is still a valid upper bound.
pub fn hoeffding_inaccuracy_bound(sigma_1: f64, j: u32, n: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&sigma_1) {
        return Err(Error::Precondition(format!(
            "single-tick inaccuracy must be at most 1, got {sigma_1}"
        )));
    }
    if !(n > 0.0) {
        return Err(invalid("n", format!("must be positive, got {n}")));
    }
    Ok(2.0 * n * (j as f64).sqrt() * sigma_1)
}

/// `mean^2 / variance` with the unbiased variance estimator.
pub fn r_accuracy(samples: &[f64]) -> Result<f64> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(mean * mean / var)
}

/// Chebyshev bound `sqrt(j / (eps R_1))` on the inaccuracy of the `j`-th
/// tick of an i.i.d. clock with single-tick R-accuracy `r1`.
pub fn chebyshev_bound(r1: f64, j: u32, eps: f64) -> Result<f64> {
    if !(r1 > 0.0) {
        return Err(invalid("r1", format!("must be positive, got {r1}")));
    }
    if eps == 0.0 {
        return Err(Error::Precondition(
            "the Chebyshev bound diverges at eps = 0".into(),
        ));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(invalid("eps", format!("must lie in (0, 1], got {eps}")));
    }
    Ok((j as f64 / (eps * r1)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hoeffding_tail_values() {
        assert!(hoeffding_tail(0.0, 1, 100.0).unwrap() < 1e-15);
        assert!((hoeffding_tail(0.01, 1, 3.0).unwrap() - 0.031995813).abs() < 1e-8);
        assert!((hoeffding_tail(0.01, 4, 3.0).unwrap() - 0.060746505).abs() < 1e-8);
        assert_eq!(hoeffding_tail(1.0, 1, 0.1).unwrap(), 1.0);
        assert!(hoeffding_tail(0.1, 1, 0.0).is_err());
    }

    #[test]
    fn hoeffding_bound_values() {
        assert_eq!(hoeffding_inaccuracy_bound(0.0, 7, 2.0).unwrap(), 0.0);
        assert!((hoeffding_inaccuracy_bound(0.1, 4, 3.0).unwrap() - 1.2).abs() < 1e-12);
        assert!((hoeffding_inaccuracy_bound(0.33, 1, 2.0).unwrap() - 1.32).abs() < 1e-12);
        assert!(matches!(
            hoeffding_inaccuracy_bound(1.5, 1, 1.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn r_accuracy_values() {
        assert_eq!(r_accuracy(&[1.0, 1.0, 1.0]), Err(Error::ZeroVariance));
        assert_eq!(r_accuracy(&[1.0, 3.0]).unwrap(), 2.0);
        assert!(r_accuracy(&[1.0]).is_err());
    }

    #[test]
    fn chebyshev_values() {
        assert_eq!(chebyshev_bound(100.0, 1, 0.04).unwrap(), 0.5);
        assert!((chebyshev_bound(100.0, 4, 0.04).unwrap() - 1.0).abs() < 1e-15);
        let a = chebyshev_bound(37.0, 3, 0.2).unwrap();
        let b = chebyshev_bound(37.0, 12, 0.2).unwrap();
        assert!((b / a - 2.0).abs() < 1e-12);
        assert!(matches!(
            chebyshev_bound(1.0, 1, 0.0),
            Err(Error::Precondition(_))
        ));
    }
}
