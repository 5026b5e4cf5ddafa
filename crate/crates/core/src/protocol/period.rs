use crate::error::{invalid, Error, Result};

/// Largest multiplier the period choosers will return.
pub const MAX_MULTIPLIER: u64 = 1_000_000;

fn check_input(mu: f64, sigma: f64) -> Result<()> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(invalid("mu_in", format!("must be positive, got {mu}")));
    }
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(invalid(
            "sigma_in",
            format!("must be non-negative, got {sigma}"),
        ));
    }
    Ok(())
}

fn check_cap(m: f64) -> Result<u64> {
    if !(m <= MAX_MULTIPLIER as f64) {
        return Err(Error::PeriodSelection(format!(
            "multiplier {m} exceeds the cap {MAX_MULTIPLIER}"
        )));
    }
    Ok(m as u64)
}

/// Period for the protocol without feedback: `mu = (m + 1/2) tau` with `m`
/// the largest integer such that `j sigma` lies in
/// `[mu / (m + 3/2), mu / (m + 1/2))`.
pub fn choose_period_no_feedback(mu: f64, sigma: f64, j: u32) -> Result<(u64, f64)> {
    check_input(mu, sigma)?;
    if j == 0 {
        return Err(invalid("j", "must be at least 1"));
    }
    let spread = j as f64 * sigma;
    if spread >= 2.0 * mu / 3.0 {
        return Err(Error::PeriodSelection(format!(
            "j sigma = {spread} must stay below 2 mu / 3 = {}",
            2.0 * mu / 3.0
        )));
    }
    let x = mu / spread;
    let mut m = check_cap((x - 1.5).ceil())?.max(1);
    // guard the bracket against rounding in x
    while spread < mu / (m as f64 + 1.5) {
        m += 1;
        check_cap(m as f64)?;
    }
    while m > 1 && spread >= mu / (m as f64 + 0.5) {
        m -= 1;
    }
    Ok((m, mu / (m as f64 + 0.5)))
}

/// Period for the feedback protocol: `mu = m tau` with `sigma` in
/// `[mu / (m + 1), mu / m)`.
pub fn choose_period_feedback(mu: f64, sigma: f64) -> Result<(u64, f64)> {
    check_input(mu, sigma)?;
    if sigma >= mu {
        return Err(Error::PeriodSelection(format!(
            "sigma = {sigma} must stay below mu = {mu}"
        )));
    }
    let x = mu / sigma;
    let mut m = check_cap(x.ceil() - 1.0)?.max(1);
    while sigma < mu / (m as f64 + 1.0) {
        m += 1;
        check_cap(m as f64)?;
    }
    while m > 1 && sigma >= mu / m as f64 {
        m -= 1;
    }
    Ok((m, mu / m as f64))
}
