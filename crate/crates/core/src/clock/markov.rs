use crate::error::{invalid, Result};

const FIXED_POINT_TOL: f64 = 1e-12;

/// Two-state continuous-time Markov chain with leaving rate `alpha` from
/// state A and return rate `beta` into it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovTwoState {
    alpha: f64,
    beta: f64,
}

/// Outcome of asking whether state A is a fixed point of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicityDiagnostic {
    /// `A P(T) = A` within 1e-12.
    pub is_fixed_point: bool,
    /// `alpha = 0`, so A never evolves.
    pub is_stationary_for_all_t: bool,
}

impl PeriodicityDiagnostic {
    /// A classical clock that returns to A after time `T` never left it.
    pub fn periodic_implies_stationary(&self) -> bool {
        !self.is_fixed_point || self.is_stationary_for_all_t
    }
}

impl MarkovTwoState {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(invalid(
                "alpha",
                format!("must be non-negative, got {alpha}"),
            ));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(invalid("beta", format!("must be non-negative, got {beta}")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Row-stochastic transition matrix `P(t)`.
    pub fn transition(&self, t: f64) -> Result<[[f64; 2]; 2]> {
        if !(t >= 0.0) {
            return Err(invalid("t", format!("must be non-negative, got {t}")));
        }
        let rate = self.alpha + self.beta;
        if rate == 0.0 {
            return Ok([[1.0, 0.0], [0.0, 1.0]]);
        }
        let (a, b) = (self.alpha / rate, self.beta / rate);
        let decay = (-t * rate).exp();
        let spent = -(-t * rate).exp_m1();
        Ok([[b + a * decay, a * spent], [b * spent, a + b * decay]])
    }

    pub fn periodicity_check(&self, period: f64) -> Result<PeriodicityDiagnostic> {
        if !(period > 0.0) {
            return Err(invalid("T", format!("must be positive, got {period}")));
        }
        let p = self.transition(period)?;
        // row vector A = (1, 0) times P(T) is the first row
        let is_fixed_point =
            (p[0][0] - 1.0).abs() <= FIXED_POINT_TOL && p[0][1].abs() <= FIXED_POINT_TOL;
        Ok(PeriodicityDiagnostic {
            is_fixed_point,
            is_stationary_for_all_t: self.alpha == 0.0,
        })
    }
}

/// Product of two 2x2 matrices.
pub fn mat_mul(x: &[[f64; 2]; 2], y: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for k in 0..2 {
            out[i][k] = x[i][0] * y[0][k] + x[i][1] * y[1][k];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_at_zero() {
        let m = MarkovTwoState::new(0.3, 0.7).unwrap();
        assert_eq!(m.transition(0.0).unwrap(), [[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn alpha_zero_closed_form() {
        let m = MarkovTwoState::new(0.0, 1.0).unwrap();
        let t = 0.8;
        let p = m.transition(t).unwrap();
        let e = (-t).exp();
        assert_eq!(p[0], [1.0, 0.0]);
        assert!((p[1][0] - (1.0 - e)).abs() < 1e-15);
        assert!((p[1][1] - e).abs() < 1e-15);
    }

    #[test]
    fn periodicity_examples() {
        let d = MarkovTwoState::new(0.0, 0.7)
            .unwrap()
            .periodicity_check(5.0)
            .unwrap();
        assert!(d.is_fixed_point && d.is_stationary_for_all_t);
        let d = MarkovTwoState::new(0.3, 0.7)
            .unwrap()
            .periodicity_check(5.0)
            .unwrap();
        assert!(!d.is_fixed_point && !d.is_stationary_for_all_t);
        let d = MarkovTwoState::new(0.0, 0.0)
            .unwrap()
            .periodicity_check(2.0)
            .unwrap();
        assert!(d.is_fixed_point && d.is_stationary_for_all_t);
        assert!(d.periodic_implies_stationary());
    }

    #[test]
    fn negative_rates_rejected() {
        assert!(MarkovTwoState::new(-0.1, 1.0).is_err());
        assert!(MarkovTwoState::new(0.1, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn rows_sum_to_one(a in 0.0f64..10.0, b in 0.0f64..10.0, t in 0.0f64..10.0) {
            let p = MarkovTwoState::new(a, b).unwrap().transition(t).unwrap();
            for row in p {
                prop_assert!((row[0] + row[1] - 1.0).abs() < 1e-14);
                prop_assert!(row[0] >= 0.0 && row[1] >= 0.0);
            }
        }

        #[test]
        fn chapman_kolmogorov(a in 0.0f64..5.0, b in 0.0f64..5.0, s in 0.0f64..5.0, t in 0.0f64..5.0) {
            let m = MarkovTwoState::new(a, b).unwrap();
            let lhs = mat_mul(&m.transition(s).unwrap(), &m.transition(t).unwrap());
            let rhs = m.transition(s + t).unwrap();
            for i in 0..2 {
                for k in 0..2 {
                    prop_assert!((lhs[i][k] - rhs[i][k]).abs() < 1e-12);
                }
            }
        }
    }
}
