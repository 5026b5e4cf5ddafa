use std::path::Path;
use std::process::{Command, Output};

fn ticksim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ticksim"))
        .args(args)
        .env_remove("TICKSIM_SEED")
        .output()
        .expect("binary runs")
}

fn ticksim_env(args: &[&str], seed: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ticksim"))
        .args(args)
        .env("TICKSIM_SEED", seed)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn without_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with("# generated:"))
        .map(|l| format!("{l}\n"))
        .collect()
}

type Record = std::collections::HashMap<String, String>;

fn records(text: &str) -> Vec<Record> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    r.deserialize().map(|x| x.unwrap()).collect()
}

fn num(r: &Record, key: &str) -> f64 {
    r[key]
        .parse()
        .unwrap_or_else(|_| panic!("{key} = {:?}", r[key]))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sweep_is_byte_identical_apart_from_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = ticksim(&[
            "sweep",
            "--trials",
            "1",
            "--seed",
            "7",
            "--out",
            path_str(out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (a, b) = (
        std::fs::read_to_string(a).unwrap(),
        std::fs::read_to_string(b).unwrap(),
    );
    assert_eq!(without_timestamp(&a), without_timestamp(&b));
    assert_eq!(
        a.lines().filter(|l| l.starts_with("# generated:")).count(),
        1
    );
    assert!(!a.contains('\r'));
}

#[test]
fn sweep_with_more_trials_is_reproducible() {
    let args = ["sweep", "--trials", "300", "--seed", "3", "--d", "16,64"];
    let (a, b) = (stdout(&ticksim(&args)), stdout(&ticksim(&args)));
    assert_eq!(without_timestamp(&a), without_timestamp(&b));
    let rows = records(&a);
    // 3 protocols x 2 dimensions plus one slope row each
    assert_eq!(rows.len(), 9);
    assert_eq!(
        rows.iter()
            .filter(|r| r["experiment"] == "sweep-slope")
            .count(),
        3
    );
}

#[test]
fn csv_header_is_the_fixed_column_list() {
    let text = stdout(&ticksim(&["bounds"]));
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(
        header,
        "experiment,protocol,d,eta,eps,eps0,eps_ec,trials,j,sigma_out,mu_out,Sigma_out,bound,\
         truncated_trials,seed"
    );
}

#[test]
fn sweep_first_protocol_respects_its_bound() {
    let o = ticksim(&[
        "sweep",
        "--trials",
        "2000",
        "--protocol",
        "P1",
        "--d",
        "32,64,256",
    ]);
    assert!(o.status.success());
    for r in records(&stdout(&o))
        .iter()
        .filter(|r| r["experiment"] == "sweep")
    {
        assert!(num(r, "Sigma_out") <= num(r, "bound"), "{r:?}");
        assert_eq!(r["truncated_trials"], "0");
    }
}

#[test]
fn bounds_zero_input_rows_are_zero() {
    let o = ticksim(&["bounds"]);
    assert!(o.status.success());
    let rows = records(&stdout(&o));
    let zero: Vec<_> = rows
        .iter()
        .filter(|r| r["protocol"].contains("Sigma_in=0 ") || r["protocol"].contains("Sigma_1=0 "))
        .collect();
    assert!(!zero.is_empty());
    for r in zero {
        assert_eq!(num(r, "bound"), 0.0, "{r:?}");
    }
}

#[test]
fn bounds_corollary_matches_theorem() {
    let rows = records(&stdout(&ticksim(&["bounds"])));
    let find = |name: &str, d: &str, j: &str| {
        rows.iter()
            .find(|r| r["protocol"] == name && r["d"] == d && r["j"] == j)
            .map(|r| num(r, "bound"))
            .unwrap()
    };
    for d in ["16", "64", "256", "1024"] {
        for j in ["1", "2"] {
            let t = find("theorem1 Sigma_in=0.1 nu=0.1", d, j);
            let c = find("corollary-no-feedback Sigma_in=0.1 nu=0.1", d, j);
            assert!(
                (t - c).abs() <= 1e-15 * t.abs().max(1e-300),
                "d={d} j={j}: {t} vs {c}"
            );
        }
    }
}

#[test]
fn bounds_report_domain_errors_per_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[bounds]\nsigma_in = [0.5]\nj = [1, 2]\n").unwrap();
    let o = ticksim(&["bounds", "--config", path_str(&cfg)]);
    assert!(o.status.success());
    let rows = records(&stdout(&o));
    // j = 2 breaks j Sigma_in < 2/3
    let bad = rows
        .iter()
        .find(|r| r["protocol"].starts_with("theorem1") && r["j"] == "2")
        .unwrap();
    assert!(bad["protocol"].contains("error"), "{bad:?}");
    assert_eq!(bad["bound"], "");
}

#[test]
fn run_feedback_grows_like_sqrt_j() {
    let o = ticksim(&["run", "--trials", "2000", "--protocol", "P2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = records(&stdout(&o));
    assert_eq!(rows.len(), 20);
    let s: Vec<f64> = rows.iter().map(|r| num(r, "Sigma_out")).collect();
    assert!(s[19] > s[0]);
    for (i, v) in s.iter().enumerate() {
        let j = (i + 1) as f64;
        assert!(v / (j.sqrt() * s[0]) <= 2.0, "j={j}: {v} vs {}", s[0]);
    }
}

#[test]
fn network_with_one_node_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    let out = dir.path().join("out.csv");
    std::fs::write(&cfg, "[network]\nnodes = 1\n").unwrap();
    let o = ticksim(&[
        "network",
        "--config",
        path_str(&cfg),
        "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at least 2 nodes"));
    assert!(!out.exists());
}

#[test]
fn network_enhancement_narrows_the_spread() {
    let o = ticksim(&["network", "--trials", "300"]);
    assert!(o.status.success());
    let rows = records(&stdout(&o));
    let get = |p: &str| {
        num(
            rows.iter().find(|r| r["protocol"] == p).unwrap(),
            "sigma_out",
        )
    };
    assert!(get("enhanced") < get("raw"));
}

#[test]
fn estimator_check_passes() {
    let o = ticksim(&["estimator-check"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = records(&stdout(&o));
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|r| r["protocol"] == "match"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        "[sweep]\nunknown_key = 1\n",
        "trials = \"many\"\n",
        "[run]\nprotocol = \"P9\"\n",
        "[sweep]\ninput = \"box:1\"\n",
        "[colour]\n",
    ];
    for (i, text) in cases.iter().enumerate() {
        let cfg = dir.path().join(format!("{i}.toml"));
        std::fs::write(&cfg, text).unwrap();
        let cmd = if text.contains("[run]") {
            "run"
        } else {
            "sweep"
        };
        let o = ticksim(&[cmd, "--config", path_str(&cfg), "--trials", "10"]);
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert!(o.stdout.is_empty(), "{text}");
    }
    assert_eq!(ticksim(&["sweep", "--bogus"]).status.code(), Some(2));
    assert_eq!(ticksim(&["sweep", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(ticksim(&["run", "--d", "16,32"]).status.code(), Some(2));
    assert_eq!(ticksim_env(&["sweep"], "abc").status.code(), Some(2));
}

#[test]
fn config_round_trips_through_results_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        "seed = 11\ntrials = 200\n[run]\nprotocol = \"P1\"\noutputs = 3\nd = 64\n",
    )
    .unwrap();
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    let o = ticksim(&["run", "--config", path_str(&cfg), "--out", path_str(&first)]);
    assert!(o.status.success());
    let o = ticksim(&[
        "run",
        "--config",
        path_str(&first),
        "--out",
        path_str(&second),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (a, b) = (
        std::fs::read_to_string(first).unwrap(),
        std::fs::read_to_string(second).unwrap(),
    );
    assert_eq!(without_timestamp(&a), without_timestamp(&b));
    assert_eq!(records(&a)[0]["seed"], "11");
}

#[test]
fn json_results_embed_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = ticksim(&[
        "run",
        "--trials",
        "50",
        "--format",
        "json",
        "--seed",
        "5",
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["command"], "run");
    assert_eq!(v["rows"].as_array().unwrap().len(), 20);
    assert_eq!(v["rows"][0]["seed"], 5);
    let again = dir.path().join("again.json");
    let o = ticksim(&["run", "--config", path_str(&out), "--out", path_str(&again)]);
    assert!(o.status.success());
    let w: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&again).unwrap()).unwrap();
    assert_eq!(v["rows"], w["rows"]);
}

#[test]
fn seed_precedence_is_file_then_env_then_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "seed = 1\n[estimator-check]\ninstances = 1\n").unwrap();
    let seed_of = |o: Output| records(&stdout(&o))[0]["seed"].clone();
    let c = path_str(&cfg);
    assert_eq!(seed_of(ticksim(&["estimator-check", "--config", c])), "1");
    assert_eq!(
        seed_of(ticksim_env(&["estimator-check", "--config", c], "2")),
        "2"
    );
    assert_eq!(
        seed_of(ticksim_env(
            &["estimator-check", "--config", c, "--seed", "3"],
            "2"
        )),
        "3"
    );
}
