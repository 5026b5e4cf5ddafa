use rand::Rng;
use rand_distr::{Distribution, Normal};
use statrs::distribution::{Continuous, ContinuousCDF, Normal as NormalLaw};

use crate::error::{Error, Result};
use crate::tick::inaccuracy::ConfidenceInterval;

const MIXTURE_MASS_TOL: f64 = 1e-12;

/// Shape of an i.i.d. waiting time between consecutive ticks.
#[derive(Debug, Clone, PartialEq)]
pub enum Law {
    /// Point mass: a perfect clock.
    Delta(f64),
    /// Uniform on `[center - width/2, center + width/2]`.
    Box { center: f64, width: f64 },
    /// Normal law conditioned on being positive.
    Gaussian { mean: f64, sd: f64 },
    /// Finite mixture of point masses `(time, probability)`, sorted by time.
    DeltaMixture(Vec<(f64, f64)>),
}

/// Validated law of the waiting time `T` of an i.i.d. clock.
#[derive(Debug, Clone, PartialEq)]
pub struct WaitingTimeDistribution {
    law: Law,
    // cumulative weights of the mixture atoms, empty for other laws
    cumulative: Vec<f64>,
}

impl WaitingTimeDistribution {
    pub fn delta(t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "delta time must be positive, got {t}"
            )));
        }
        Ok(Self::wrap(Law::Delta(t)))
    }

    pub fn boxed(center: f64, width: f64) -> Result<Self> {
        if !(center.is_finite() && width.is_finite() && center > 0.0 && width > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "box needs positive center and width, got ({center}, {width})"
            )));
        }
        if width >= 2.0 * center {
            return Err(Error::InvalidDistribution(format!(
                "box width {width} must be below twice the center {center}"
            )));
        }
        Ok(Self::wrap(Law::Box { center, width }))
    }

    /// Box law centred at `center` whose analytic epsilon-inaccuracy equals
    /// `inaccuracy`.
    pub fn box_with_inaccuracy(center: f64, inaccuracy: f64, eps: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eps) || inaccuracy <= 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "cannot build box with inaccuracy {inaccuracy} at eps {eps}"
            )));
        }
        // ratio (1-eps)w / (center + eps w / 2) of the right-aligned interval
        let denom = (1.0 - eps) - inaccuracy * eps / 2.0;
        if denom <= 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "inaccuracy {inaccuracy} unreachable at eps {eps}"
            )));
        }
        Self::boxed(center, inaccuracy * center / denom)
    }

    pub fn gaussian(mean: f64, sd: f64) -> Result<Self> {
        if !(mean.is_finite() && sd.is_finite() && mean > 0.0 && sd > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "gaussian needs positive mean and sd, got ({mean}, {sd})"
            )));
        }
        Ok(Self::wrap(Law::Gaussian { mean, sd }))
    }

    pub fn delta_mixture(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("empty mixture".into()));
        }
        if let Some(&(t, p)) = atoms
            .iter()
            .find(|(t, p)| !(t.is_finite() && *t > 0.0 && p.is_finite() && *p >= 0.0))
        {
            return Err(Error::InvalidDistribution(format!(
                "mixture atom ({t}, {p}) needs positive time and non-negative weight"
            )));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > MIXTURE_MASS_TOL {
            return Err(Error::InvalidDistribution(format!(
                "mixture probabilities sum to {total}"
            )));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let cumulative = atoms
            .iter()
            .scan(0.0, |acc, a| {
                *acc += a.1;
                Some(*acc)
            })
            .collect();
        Ok(Self {
            law: Law::DeltaMixture(atoms),
            cumulative,
        })
    }

    fn wrap(law: Law) -> Self {
        Self {
            law,
            cumulative: Vec::new(),
        }
    }

    pub fn law(&self) -> &Law {
        &self.law
    }

    /// One strictly positive draw of `T`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.law {
            Law::Delta(t) => *t,
            Law::Box { center, width } => center - width / 2.0 + width * rng.random::<f64>(),
            Law::Gaussian { mean, sd } => {
                let normal = Normal::new(*mean, *sd).expect("validated at construction");
                loop {
                    let x = normal.sample(rng);
                    if x > 0.0 {
                        return x;
                    }
                }
            }
            Law::DeltaMixture(atoms) => {
                let u = rng.random::<f64>() * self.cumulative[self.cumulative.len() - 1];
                let i = self.cumulative.partition_point(|&c| c <= u);
                atoms[i.min(atoms.len() - 1)].0
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match &self.law {
            Law::Delta(t) => *t,
            Law::Box { center, .. } => *center,
            Law::Gaussian { mean, sd } => {
                let std = NormalLaw::new(0.0, 1.0).unwrap();
                let z0 = -mean / sd;
                mean + sd * std.pdf(z0) / (1.0 - std.cdf(z0))
            }
            Law::DeltaMixture(atoms) => atoms.iter().map(|(t, p)| t * p).sum(),
        }
    }

    /// Smallest and largest values `T` can take.
    pub fn support(&self) -> (f64, f64) {
        match &self.law {
            Law::Delta(t) => (*t, *t),
            Law::Box { center, width } => (center - width / 2.0, center + width / 2.0),
            Law::Gaussian { .. } => (0.0, f64::INFINITY),
            Law::DeltaMixture(atoms) => (atoms[0].0, atoms[atoms.len() - 1].0),
        }
    }

    /// Width of the support; infinite for the Gaussian.
    pub fn support_width(&self) -> f64 {
        match &self.law {
            Law::Delta(_) => 0.0,
            Law::Box { width, .. } => *width,
            Law::Gaussian { .. } => f64::INFINITY,
            Law::DeltaMixture(atoms) => atoms[atoms.len() - 1].0 - atoms[0].0,
        }
    }

    /// Interval of minimal width-to-centre ratio that holds `T` with
    /// probability at least `1 - eps`.
    pub fn analytic_confidence(&self, eps: f64) -> Result<ConfidenceInterval> {
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::InvalidParameter {
                name: "eps",
                reason: format!("must lie in [0, 1), got {eps}"),
            });
        }
        match &self.law {
            Law::Delta(t) => Ok(ConfidenceInterval::new(*t, 0.0, eps)),
            Law::Box { center, width } => {
                // sliding a fixed-mass window right only lowers width/centre
                let hi = center + width / 2.0;
                let lo = hi - (1.0 - eps) * width;
                Ok(ConfidenceInterval::from_bounds(lo, hi, eps))
            }
            Law::Gaussian { mean, sd } => gaussian_confidence(*mean, *sd, eps),
            Law::DeltaMixture(atoms) => Ok(mixture_confidence(atoms, eps)),
        }
    }
}

fn gaussian_confidence(mean: f64, sd: f64, eps: f64) -> Result<ConfidenceInterval> {
    if eps == 0.0 {
        return Err(Error::Precondition(
            "a Gaussian waiting time has no bounded interval at eps = 0".into(),
        ));
    }
    let std = NormalLaw::new(0.0, 1.0).unwrap();
    let base = std.cdf(-mean / sd);
    let quantile = |p: f64| {
        let q = std.inverse_cdf(base + p * (1.0 - base));
        (mean + sd * q).max(0.0)
    };
    let ratio = |p: f64| {
        let lo = quantile(p);
        let hi = quantile(p + 1.0 - eps);
        (hi - lo) / ((hi + lo) / 2.0)
    };

    // coarse scan of the lower tail mass, then golden-section refinement
    let upper = eps * (1.0 - 1e-9);
    let steps = 2000;
    let (mut best_i, mut best) = (0, f64::INFINITY);
    for i in 0..=steps {
        let r = ratio(upper * i as f64 / steps as f64);
        if r < best {
            best = r;
            best_i = i;
        }
    }
    let h = upper / steps as f64;
    let (mut a, mut b) = (
        (best_i as f64 - 1.0).max(0.0) * h,
        ((best_i + 1) as f64 * h).min(upper),
    );
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if ratio(c) <= ratio(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let p = (a + b) / 2.0;
    let p = if ratio(p) <= best {
        p
    } else {
        best_i as f64 * h
    };
    Ok(ConfidenceInterval::from_bounds(
        quantile(p),
        quantile(p + 1.0 - eps),
        eps,
    ))
}

fn mixture_confidence(atoms: &[(f64, f64)], eps: f64) -> ConfidenceInterval {
    let need = 1.0 - eps - MIXTURE_MASS_TOL;
    let mut best: Option<(f64, f64, f64)> = None;
    for i in 0..atoms.len() {
        let mut mass = 0.0;
        for k in i..atoms.len() {
            mass += atoms[k].1;
            if mass >= need {
                let (lo, hi) = (atoms[i].0, atoms[k].0);
                let r = (hi - lo) / ((hi + lo) / 2.0);
                if best.map_or(true, |b| r < b.0) {
                    best = Some((r, lo, hi));
                }
                break;
            }
        }
    }
    let (_, lo, hi) = best.expect("whole support carries unit mass");
    ConfidenceInterval::from_bounds(lo, hi, eps)
}
