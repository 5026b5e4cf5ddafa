use rand::Rng;

use ticksim::network::{box_jitter, spread_trials, NetworkScenario, NodeConfig};
use ticksim::protocol::{
    corollary_bounds, monte_carlo_setup, theorem1_bound, theorem2_bound, trial_rng, EcSpec,
    ProtocolConfig, ProtocolKind, Setup, TrialMatrix,
};
use ticksim::stats::ols_slope;
use ticksim::tick::{
    brute_force_inaccuracy, chebyshev_bound, empirical_inaccuracy, hoeffding_inaccuracy_bound,
    hoeffding_tail, InaccuracyEstimate,
};
use ticksim::Error;

use crate::config::{parse_input, Config};
use crate::error::CliError;
use crate::output::{ResultWriter, Row};

/// `P1`..`P4`; the input-bunching capacity is the clock dimension `d`.
pub fn parse_protocol(label: &str, d: u32) -> Result<ProtocolKind, CliError> {
    match label.trim().to_ascii_uppercase().as_str() {
        "P1" => Ok(ProtocolKind::DynSwitch),
        "P2" => Ok(ProtocolKind::DynSwitchFeedback),
        "P3" => Ok(ProtocolKind::InputBunch { capacity: d }),
        "P4" => Ok(ProtocolKind::EcBunch),
        other => Err(CliError::Config(format!(
            "unknown protocol `{other}`, expected P1, P2, P3 or P4"
        ))),
    }
}

fn check_tail(name: &str, x: f64) -> Result<(), CliError> {
    if (0.0..1.0).contains(&x) {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{name} must lie in [0, 1), got {x}"
        )))
    }
}

fn check_trials(trials: usize) -> Result<(), CliError> {
    if trials == 0 {
        return Err(CliError::Config("trials must be at least 1".into()));
    }
    Ok(())
}

/// Inaccuracy estimate, or `None` when too few complete trials remain.
fn estimate(m: &TrialMatrix, j: usize, eps: f64) -> Result<Option<InaccuracyEstimate>, CliError> {
    match m.inaccuracy(j, eps) {
        Ok(e) => Ok(Some(e)),
        Err(Error::InsufficientSamples { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn fill_estimate(row: &mut Row, est: Option<InaccuracyEstimate>) {
    if let Some(e) = est {
        row.sigma_out = Some(e.interval.width);
        row.mu_out = Some(e.interval.center);
        row.big_sigma_out = Some(e.value);
    }
}

/// Analytic bound for the `j`-th output where one applies.
fn protocol_bound(setup: &Setup, j: u32) -> Option<f64> {
    let bar = setup.ec_bar_sigma()?;
    match setup.protocol {
        ProtocolKind::DynSwitch => theorem1_bound(setup.input_inaccuracy, bar, j).ok(),
        ProtocolKind::DynSwitchFeedback if j == 1 => {
            theorem2_bound(setup.input_inaccuracy, bar).ok()
        }
        _ => None,
    }
}

pub fn sweep(cfg: &Config, w: &mut ResultWriter) -> Result<(), CliError> {
    let s = &cfg.sweep;
    check_trials(cfg.trials)?;
    check_tail("sweep.eps0", s.eps0)?;
    if s.j == 0 {
        return Err(CliError::Config("sweep.j must be at least 1".into()));
    }
    if s.d.is_empty() || s.protocols.is_empty() {
        return Err(CliError::Config(
            "sweep needs at least one d and one protocol".into(),
        ));
    }
    let input = parse_input(&s.input, s.eps)?;
    // resolve everything up front so a bad entry fails before any simulation
    let mut plan = Vec::new();
    for label in &s.protocols {
        let mut setups = Vec::new();
        for &d in &s.d {
            let kind = parse_protocol(label, d)?;
            let ec = EcSpec::QuasiIdeal {
                dimension: d,
                eta: s.eta,
                tail: s.eps_ec,
            };
            let setup = ProtocolConfig::new(kind, input.clone(), ec)
                .with_input_tail(s.eps)
                .with_design_index(s.j)
                .with_outputs(s.j as usize)
                .resolve()
                .map_err(|e| CliError::Config(format!("{label}, d = {d}: {e}")))?;
            setups.push((d, setup));
        }
        plan.push((kind_label(label, &setups), setups));
    }
    for (label, setups) in plan {
        let mut points = Vec::new();
        let mut truncated = 0;
        for (d, setup) in setups {
            let m = monte_carlo_setup(&setup, cfg.trials, cfg.seed)?;
            let est = estimate(&m, s.j as usize, s.eps0)?;
            let mut row = base_row("sweep", &label, cfg);
            row.d = Some(d);
            row.eta = Some(s.eta);
            row.eps = Some(s.eps);
            row.eps0 = Some(s.eps0);
            row.eps_ec = Some(s.eps_ec);
            row.j = Some(s.j);
            fill_estimate(&mut row, est);
            row.bound = protocol_bound(&setup, s.j);
            row.truncated_trials = Some(m.truncated());
            truncated += m.truncated();
            if let Some(e) = est {
                points.push(((d as f64).log2(), e.value.log2()));
            }
            w.row(row)?;
        }
        // slope of log2 Sigma_out against log2 d
        if points.len() == s.d.len() && points.len() >= 2 {
            let mut row = base_row("sweep-slope", &label, cfg);
            row.eta = Some(s.eta);
            row.eps = Some(s.eps);
            row.eps0 = Some(s.eps0);
            row.eps_ec = Some(s.eps_ec);
            row.j = Some(s.j);
            row.big_sigma_out = Some(ols_slope(&points));
            row.truncated_trials = Some(truncated);
            w.row(row)?;
        }
    }
    Ok(())
}

fn kind_label(label: &str, setups: &[(u32, Setup)]) -> String {
    setups
        .first()
        .map(|(_, s)| s.protocol.label().to_string())
        .unwrap_or_else(|| label.to_string())
}

fn base_row(experiment: &str, protocol: &str, cfg: &Config) -> Row {
    let mut row = Row::new(experiment, protocol);
    row.trials = Some(cfg.trials);
    row.seed = Some(cfg.seed);
    row
}

/// Records a bound, or the reason it is undefined in the protocol label.
fn bound_row(mut row: Row, value: ticksim::Result<f64>) -> Row {
    match value {
        Ok(v) => row.bound = Some(v),
        Err(e) => row.protocol = format!("{} error: {e}", row.protocol),
    }
    row
}

pub fn bounds(cfg: &Config, w: &mut ResultWriter) -> Result<(), CliError> {
    let b = &cfg.bounds;
    if !(b.nu > 0.0 && b.nu < 1.0) {
        return Err(CliError::Config(format!(
            "bounds.nu must lie in (0, 1), got {}",
            b.nu
        )));
    }
    if let Some(&d) = b.d.iter().find(|&&d| d < 2) {
        return Err(CliError::Config(format!(
            "bounds.d must be at least 2, got {d}"
        )));
    }
    if b.j.contains(&0) {
        return Err(CliError::Config("bounds.j starts at 1".into()));
    }
    let row = |name: String| Row::new("bounds", name);
    for &sigma in &b.sigma_in {
        for &d in &b.d {
            let df = d as f64;
            let bar = 2.0 / df.powf(1.0 - b.nu);
            let tag = format!("Sigma_in={sigma} nu={}", b.nu);
            for &j in &b.j {
                let mut r = row(format!("theorem1 {tag}"));
                r.d = Some(d);
                r.j = Some(j);
                w.row(bound_row(r, theorem1_bound(sigma, bar, j)))?;
                let cor = corollary_bounds(sigma, d, b.nu, j);
                let mut r = row(format!("corollary-no-feedback {tag}"));
                r.d = Some(d);
                r.j = Some(j);
                w.row(bound_row(r, cor.map(|c| c.0)))?;
            }
            let mut r = row(format!("theorem2 {tag}"));
            r.d = Some(d);
            w.row(bound_row(r, theorem2_bound(sigma, bar)))?;
            let mut r = row(format!("corollary-feedback {tag}"));
            r.d = Some(d);
            w.row(bound_row(
                r,
                corollary_bounds(sigma, d, b.nu, 1).map(|c| c.1),
            ))?;
            // asymptotic scaling of the first output, up to constants
            for (name, value) in [
                (
                    "scaling P1/P2 Sigma_in/d^(1-nu)",
                    sigma / df.powf(1.0 - b.nu),
                ),
                ("scaling P3 Sigma_in/sqrt(d)", sigma / df.sqrt()),
                ("scaling P4 sqrt(Sigma_in)/d", sigma.sqrt() / df),
            ] {
                let mut r = row(format!("{name} Sigma_in={sigma} nu={}", b.nu));
                r.d = Some(d);
                r.bound = Some(value);
                w.row(r)?;
            }
        }
        for &j in &b.j {
            let mut r = row(format!("hoeffding Sigma_1={sigma} n={}", b.n));
            r.eps = Some(b.eps);
            r.j = Some(j);
            match hoeffding_tail(b.eps, j, b.n) {
                Ok(t) => r.eps0 = Some(t),
                Err(e) => r.protocol = format!("{} error: {e}", r.protocol),
            }
            w.row(bound_row(r, hoeffding_inaccuracy_bound(sigma, j, b.n)))?;
        }
    }
    for &r1 in &b.r1 {
        for &j in &b.j {
            let mut r = row(format!("chebyshev R_1={r1}"));
            r.eps = Some(b.eps);
            r.j = Some(j);
            w.row(bound_row(r, chebyshev_bound(r1, j, b.eps)))?;
        }
    }
    Ok(())
}

pub fn run(cfg: &Config, w: &mut ResultWriter) -> Result<(), CliError> {
    let r = &cfg.run;
    check_trials(cfg.trials)?;
    check_tail("run.eps0", r.eps0)?;
    if r.outputs == 0 {
        return Err(CliError::Config("run.outputs must be at least 1".into()));
    }
    if r.scale_tail && r.outputs as f64 * r.eps0 >= 1.0 {
        return Err(CliError::Config(format!(
            "run.outputs * run.eps0 must stay below 1 with scale_tail, got {}",
            r.outputs as f64 * r.eps0
        )));
    }
    let input = parse_input(&r.input, r.eps)?;
    let kind = parse_protocol(&r.protocol, r.d)?;
    let ec = EcSpec::QuasiIdeal {
        dimension: r.d,
        eta: r.eta,
        tail: r.eps_ec,
    };
    let mut pc = ProtocolConfig::new(kind, input, ec)
        .with_input_tail(r.eps)
        .with_design_index(r.design_index)
        .with_outputs(r.outputs);
    if let Some(h) = r.horizon {
        pc = pc.with_horizon(h);
    }
    if let Some(k) = r.restart_every {
        pc = pc.with_restart_every(k);
    }
    let setup = pc.resolve().map_err(CliError::config)?;
    let m = monte_carlo_setup(&setup, cfg.trials, cfg.seed)?;
    for j in 1..=r.outputs {
        let eps0 = if r.scale_tail {
            j as f64 * r.eps0
        } else {
            r.eps0
        };
        let mut row = base_row("run", kind.label(), cfg);
        row.d = Some(r.d);
        row.eta = Some(r.eta);
        row.eps = Some(r.eps);
        row.eps0 = Some(eps0);
        row.eps_ec = Some(r.eps_ec);
        row.j = Some(j as u32);
        fill_estimate(&mut row, estimate(&m, j, eps0)?);
        row.bound = protocol_bound(&setup, j as u32);
        row.truncated_trials = Some(m.truncated());
        w.row(row)?;
    }
    Ok(())
}

pub fn network(cfg: &Config, w: &mut ResultWriter) -> Result<(), CliError> {
    let n = &cfg.network;
    check_trials(cfg.trials)?;
    let central = parse_input(&n.input, n.eps)?;
    let jitter = box_jitter(n.jitter).map_err(CliError::config)?;
    let ec = EcSpec::QuasiIdeal {
        dimension: n.d,
        eta: n.eta,
        tail: n.eps_ec,
    };
    let scenario = NetworkScenario {
        central,
        input_tail: n.eps,
        nodes: (0..n.nodes)
            .map(|i| NodeConfig::new(n.delay + n.delay_step * i as f64, jitter.clone(), ec))
            .collect(),
        outputs: n.outputs,
    };
    scenario.design().map_err(CliError::config)?;
    if n.k >= n.outputs {
        return Err(CliError::Config(format!(
            "network.k must be below network.outputs = {}",
            n.outputs
        )));
    }
    let summary = spread_trials(&scenario, cfg.trials, cfg.seed, n.k, 0.0)?;
    for (label, value) in [
        ("raw", summary.median_raw_range()),
        ("enhanced", summary.median_enhanced_range()),
    ] {
        let mut row = base_row("network", label, cfg);
        row.d = Some(n.d);
        row.eta = Some(n.eta);
        row.eps = Some(n.eps);
        row.eps_ec = Some(n.eps_ec);
        row.j = Some(n.k as u32);
        // median over trials of the cross-node arrival range
        row.sigma_out = Some(value);
        row.truncated_trials = Some(summary.truncated);
        w.row(row)?;
    }
    Ok(())
}

/// Compares the window-scan estimator with the brute-force reference on
/// random sample sets. Returns the number of mismatches.
pub fn estimator_check(cfg: &Config, w: &mut ResultWriter) -> Result<usize, CliError> {
    let e = &cfg.estimator_check;
    if e.max_n < 2 || e.max_j == 0 || e.eps.is_empty() {
        return Err(CliError::Config(
            "estimator-check needs max_n >= 2, max_j >= 1 and at least one eps".into(),
        ));
    }
    for &eps in &e.eps {
        check_tail("estimator-check.eps", eps)?;
    }
    let mut rng = trial_rng(cfg.seed, 0);
    let mut mismatches = 0;
    for i in 0..e.instances {
        let n = rng.random_range(2..=e.max_n);
        let eps = e.eps[i % e.eps.len()];
        let j = rng.random_range(1..=e.max_j);
        let samples: Vec<f64> = (0..n)
            .map(|_| {
                if rng.random_bool(0.3) {
                    // repeated values exercise the tie-breaking
                    rng.random_range(1..20) as f64 * 0.5
                } else {
                    rng.random_range(0.1..10.0)
                }
            })
            .collect();
        let fast = empirical_inaccuracy(&samples, j, eps);
        let slow = brute_force_inaccuracy(&samples, j, eps);
        let (label, fast_v, slow_v) = match (fast, slow) {
            (Ok(f), Ok(s)) if f.value == s.value && f.interval == s.interval => {
                ("match", Some(f.value), Some(s.value))
            }
            (Ok(f), Ok(s)) => ("mismatch", Some(f.value), Some(s.value)),
            // both rejecting the instance counts as agreement
            (Err(_), Err(_)) => ("rejected", None, None),
            (f, s) => ("mismatch", f.ok().map(|x| x.value), s.ok().map(|x| x.value)),
        };
        if label == "mismatch" {
            mismatches += 1;
        }
        let mut row = Row::new("estimator-check", label);
        row.eps = Some(eps);
        row.trials = Some(n);
        row.j = Some(j);
        row.big_sigma_out = fast_v;
        row.bound = slow_v;
        row.seed = Some(cfg.seed);
        w.row(row)?;
    }
    Ok(mismatches)
}
