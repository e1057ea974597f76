use std::fs;
use std::process::{Command, Output};

fn irs_pa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irs-pa"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn solve_is_deterministic_per_seed() {
    let a = irs_pa(&["solve", "--method", "EMRIN", "--seed", "9"]);
    let b = irs_pa(&["solve", "--method", "EMRIN", "--seed", "9"]);
    let c = irs_pa(&["solve", "--method", "EMRIN", "--seed", "10"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert!(stdout(&a).contains("rate_bits"));
}

#[test]
fn fixed_solve_uses_the_requested_split() {
    let out = irs_pa(&["solve", "--method", "FIXED", "--beta", "0.25"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let beta = text
        .lines()
        .find_map(|l| l.strip_prefix("beta"))
        .unwrap()
        .trim();
    assert_eq!(beta, "0.25");
}

#[test]
fn sweep_writes_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n.csv");
    let out = irs_pa(&[
        "rate-vs-n",
        "--trials",
        "3",
        "--n",
        "4,8",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let csv = fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "experiment,x_name,x_value,p_max_dbm,method,mean_rate_bits,stderr,trials"
    );
    // Two N values, six strategies each.
    assert_eq!(lines.count(), 12);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# small run\ntrials = 2\nn = 4\npmax_dbm = 10\nk_list = 1, 2\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_file = stdout(&irs_pa(&["rate-vs-k", "--config", cfg]));
    assert_eq!(from_file.lines().count(), 1 + 2 * 2);
    assert!(from_file.lines().skip(1).all(|l| l.ends_with(",2")));

    let overridden = stdout(&irs_pa(&[
        "rate-vs-k",
        "--config",
        cfg,
        "--pmax-dbm",
        "-5",
        "--k",
        "4",
    ]));
    let rows: Vec<&str> = overridden.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|l| l.contains(",4,-5,")));
}

#[test]
fn bad_input_exits_with_an_error() {
    let unknown = irs_pa(&["solve", "--method", "BOGUS"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("BOGUS"));

    assert_eq!(irs_pa(&["solve"]).status.code(), Some(2));
    assert_eq!(
        irs_pa(&["rate-vs-n", "--trials", "0"]).status.code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "trials = 2\nnot_a_key = 1\n").unwrap();
    let out = irs_pa(&["rate-vs-n", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}
