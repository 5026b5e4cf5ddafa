use crate::error::{invalid, Error, Result};

fn check_unit(name: &'static str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(invalid(name, format!("must lie in [0, 1], got {x}")));
    }
    Ok(())
}

/// Inaccuracy bound `(5 j^2 / 6) sigma_in bar_ec` on the `j`-th output of
/// the protocol without feedback, valid at tail `j eps0`.
pub fn theorem1_bound(sigma_in: f64, bar_ec: f64, j: u32) -> Result<f64> {
    if j == 0 {
        return Err(invalid("j", "must be at least 1"));
    }
    if !(sigma_in >= 0.0 && sigma_in < 2.0 / 3.0) {
        return Err(Error::Precondition(format!(
            "input inaccuracy {sigma_in} must lie in [0, 2/3)"
        )));
    }
    if !(bar_ec >= 0.0) {
        return Err(invalid(
            "bar_ec",
            format!("must be non-negative, got {bar_ec}"),
        ));
    }
    let jf = j as f64;
    if jf * sigma_in >= 2.0 / 3.0 {
        return Err(Error::Precondition(format!(
            "j = {j} must stay below 2 / (3 sigma_in) = {}",
            2.0 / (3.0 * sigma_in)
        )));
    }
    Ok(5.0 * jf * jf / 6.0 * sigma_in * bar_ec)
}

/// Tail level at which the `j`-th output bound holds.
pub fn theorem1_tail(j: u32, eps0: f64) -> f64 {
    j as f64 * eps0
}

/// Bound `sigma_in bar_ec` on every inter-output duration of the feedback
/// protocol.
pub fn theorem2_bound(sigma_in: f64, bar_ec: f64) -> Result<f64> {
    if !(sigma_in >= 0.0 && sigma_in < 1.0) {
        return Err(Error::Precondition(format!(
            "input inaccuracy {sigma_in} must lie in [0, 1)"
        )));
    }
    if !(bar_ec >= 0.0) {
        return Err(invalid(
            "bar_ec",
            format!("must be non-negative, got {bar_ec}"),
        ));
    }
    Ok(sigma_in * bar_ec)
}

/// Both bounds with a quasi-ideal clock of dimension `d`:
/// `((5 j^2 / 3) sigma_in / d^(1 - nu), 2 sigma_in / d^(1 - nu))`.
pub fn corollary_bounds(sigma_in: f64, d: u32, nu: f64, j: u32) -> Result<(f64, f64)> {
    if d < 2 {
        return Err(invalid("d", format!("must be at least 2, got {d}")));
    }
    if !(nu > 0.0 && nu < 1.0) {
        return Err(invalid("nu", format!("must lie in (0, 1), got {nu}")));
    }
    if j == 0 {
        return Err(invalid("j", "must be at least 1"));
    }
    let scale = sigma_in / (d as f64).powf(1.0 - nu);
    let jf = j as f64;
    Ok((5.0 * jf * jf / 3.0 * scale, 2.0 * scale))
}

/// `2 sigma / tau`.
pub fn ec_bar_sigma(sigma: f64, tau: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma < tau) {
        return Err(invalid(
            "sigma_ec",
            format!("must lie in (0, tau = {tau}), got {sigma}"),
        ));
    }
    Ok(2.0 * sigma / tau)
}

/// Tail budget `min(1, j eps + (j + 1) eps_ec)` of the `j`-th output.
pub fn output_epsilon_budget(eps: f64, eps_ec: f64, j: u32) -> Result<f64> {
    check_unit("eps", eps)?;
    check_unit("eps_ec", eps_ec)?;
    if j == 0 {
        return Err(invalid("j", "must be at least 1"));
    }
    let jf = j as f64;
    Ok((jf * eps + (jf + 1.0) * eps_ec).min(1.0))
}

/// Which of the two admissibility limits on `j` is tighter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binding {
    /// `j < 2 / (3 sigma_in)`
    Statement,
    /// `j < (tau - sigma_ec) / (sigma_ec + sigma_in)`
    Lemma,
}

/// Limits on the output index for the protocol without feedback.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexConditions {
    pub statement_limit: f64,
    pub lemma_limit: f64,
    pub statement_holds: bool,
    pub lemma_holds: bool,
    pub binding: Binding,
}

/// Checks index `j` against both limits. `sigma_in` and `sigma_ec` are
/// widths in time units, `inaccuracy_in` is the dimensionless input
/// inaccuracy.
pub fn index_conditions(
    j: u32,
    inaccuracy_in: f64,
    sigma_in: f64,
    tau: f64,
    sigma_ec: f64,
) -> IndexConditions {
    let statement_limit = 2.0 / (3.0 * inaccuracy_in);
    let lemma_limit = (tau - sigma_ec) / (sigma_ec + sigma_in);
    let jf = j as f64;
    IndexConditions {
        statement_limit,
        lemma_limit,
        statement_holds: jf < statement_limit,
        lemma_holds: jf < lemma_limit,
        binding: if lemma_limit < statement_limit {
            Binding::Lemma
        } else {
            Binding::Statement
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::quasi_ideal_params;

    #[test]
    fn theorem1_values() {
        assert!((theorem1_bound(0.33, 0.04, 1).unwrap() - 0.011).abs() < 1e-15);
        assert_eq!(theorem1_bound(0.0, 0.04, 3).unwrap(), 0.0);
        let one = theorem1_bound(0.1, 0.04, 1).unwrap();
        let two = theorem1_bound(0.1, 0.04, 2).unwrap();
        assert!((two - 4.0 * one).abs() < 1e-15);
        assert!((theorem1_tail(3, 0.012) - 0.036).abs() < 1e-15);
    }

    #[test]
    fn theorem1_preconditions() {
        assert!(theorem1_bound(0.7, 0.04, 1).is_err());
        assert!(theorem1_bound(0.33, 0.04, 3).is_err());
        assert!(theorem1_bound(0.33, 0.04, 2).is_ok());
        assert!(theorem1_bound(0.1, 0.04, 0).is_err());
    }

    #[test]
    fn theorem2_values() {
        assert!((theorem2_bound(0.33, 0.04).unwrap() - 0.0132).abs() < 1e-15);
        assert_eq!(theorem2_bound(0.0, 0.04).unwrap(), 0.0);
        assert_eq!(theorem2_bound(0.33, 1.0).unwrap(), 0.33);
        assert!(theorem2_bound(1.0, 0.1).is_err());
    }

    #[test]
    fn corollary_values() {
        let (a, b) = corollary_bounds(0.33, 100, 0.1, 1).unwrap();
        assert!((a - 0.0087169126).abs() < 1e-9);
        assert!((b - 0.0104602951).abs() < 1e-9);
        let (a, b) = corollary_bounds(0.33, 1 << 30, 0.1, 1).unwrap();
        assert!(a < 1e-8 && b < 1e-8);
        let (a, b) = corollary_bounds(0.33, 100, 1.0 - 1e-12, 2).unwrap();
        assert!((a - 20.0 / 3.0 * 0.33).abs() < 1e-9);
        assert!((b - 0.66).abs() < 1e-9);
    }

    #[test]
    fn corollary_is_theorem_with_quasi_ideal_clock() {
        let (nu, d, j, s) = (0.2, 64u32, 1u32, 0.3);
        let bar = 2.0 / (d as f64).powf(1.0 - nu);
        let (a, b) = corollary_bounds(s, d, nu, j).unwrap();
        assert!((a - theorem1_bound(s, bar, j).unwrap()).abs() < 1e-15);
        assert!((b - theorem2_bound(s, bar).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn bar_sigma_values() {
        assert!((ec_bar_sigma(0.1, 2.0).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(ec_bar_sigma(1.0, 2.0).unwrap(), 1.0);
        let q = quasi_ideal_params(100, 0.1, 1.0, 0.0).unwrap();
        assert!((ec_bar_sigma(q.width, 1.0).unwrap() - 0.0345603).abs() < 1e-6);
        assert!(ec_bar_sigma(0.0, 1.0).is_err());
        assert!(ec_bar_sigma(1.0, 1.0).is_err());
    }

    #[test]
    fn epsilon_budget() {
        assert!((output_epsilon_budget(0.01, 0.001, 1).unwrap() - 0.012).abs() < 1e-15);
        assert_eq!(output_epsilon_budget(0.0, 0.0, 5).unwrap(), 0.0);
        assert_eq!(output_epsilon_budget(0.5, 0.5, 3).unwrap(), 1.0);
        assert!(output_epsilon_budget(0.01, 0.001, 0).is_err());
    }

    #[test]
    fn binding_condition() {
        let c = index_conditions(1, 0.1, 0.1, 0.105, 0.01);
        assert_eq!(c.binding, Binding::Lemma);
        assert!(c.statement_holds && !c.lemma_holds);
        let c = index_conditions(1, 0.33, 0.33, 1.0, 0.01);
        assert_eq!(c.binding, Binding::Statement);
    }
}
