//! End-to-end checks of the `dormwave` binary: argument handling, output
//! shape, exit codes and byte-level reproducibility of file artifacts.

use std::path::Path;
use std::process::{Command, Output};

fn dormwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dormwave"))
        .args(args)
        .output()
        .expect("failed to launch dormwave")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout was not UTF-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr was not UTF-8")
}

#[test]
fn help_lists_every_subcommand() {
    let out = dormwave(&["--help"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    for name in ["speed", "critical", "sweep", "pde", "bbm", "verify"] {
        assert!(text.contains(name), "--help is missing `{name}`:\n{text}");
    }
}

#[test]
fn verify_list_names_the_whole_catalog() {
    let out = dormwave(&["verify", "--list"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    for name in [
        "ordering",
        "figure-sweeps",
        "duality",
        "supercritical-wave",
        "martingale",
    ] {
        assert!(text.contains(name), "catalog listing is missing `{name}`");
    }
}

#[test]
fn critical_reports_the_spore_closed_form() {
    let out = dormwave(&["critical", "--variant", "spore"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    // lambda* = sqrt(s/2) = 0.7071... and mu* = -sqrt(2) at unit rates.
    assert!(text.contains("0.707106781187"), "{text}");
    assert!(text.contains("-1.41421356237"), "{text}");
}

#[test]
fn speed_prints_the_hand_checked_branches() {
    let out = dormwave(&["speed", "--mu", "-1"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    // Unit seed-bank rates at mu = -1: the quadratic factors by hand into
    // branches 1 and -3/2 with discriminant 25/4.
    assert!(
        text.lines().any(|l| l == "-1,1,-1.5,6.25"),
        "expected the exact branch line, got:\n{text}"
    );
}

#[test]
fn sweep_artifact_is_reproducible_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let args = |path: &Path| {
        vec![
            "sweep".to_string(),
            "--axis".into(),
            "c".into(),
            "--from".into(),
            "0.5".into(),
            "--to".into(),
            "4".into(),
            "--points".into(),
            "5".into(),
            "--log".into(),
            "--out".into(),
            path.display().to_string(),
        ]
    };
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    for path in [&first, &second] {
        let argv = args(path);
        let refs: Vec<&str> = argv.iter().map(String::as_str).collect();
        let out = dormwave(&refs);
        assert!(out.status.success(), "{}", stderr_of(&out));
    }

    let bytes = std::fs::read(&first).unwrap();
    assert_eq!(
        bytes,
        std::fs::read(&second).unwrap(),
        "sweep output drifted between runs"
    );

    let text = String::from_utf8(bytes).unwrap();
    assert!(text.starts_with("# generator: dormwave-core v"), "{text}");
    let header = text
        .lines()
        .find(|l| !l.starts_with('#'))
        .expect("no header row");
    assert_eq!(
        header,
        "axis,value,lambda_classical,lambda_seedbank,lambda_spore,mu_classical,mu_seedbank,mu_spore"
    );
    // Five requested points -> five data rows.
    let rows = text.lines().filter(|l| l.starts_with("c,")).count();
    assert_eq!(rows, 5);
}

#[test]
fn pde_emits_a_front_trace_and_a_profile() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("profile.csv");
    let out = dormwave(&[
        "pde",
        "--x0",
        "-20",
        "--x1",
        "20",
        "--t",
        "2",
        "--sample-every",
        "25",
        "--profile-out",
        profile.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.lines().any(|l| l == "t,front_x"), "{text}");
    // The step front starts at the origin and drifts right.
    let last = text.lines().last().unwrap();
    let front: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!(front > 0.0 && front < 5.0, "front at {front} after t = 2");
    // Speed commentary goes to stderr, not into the data stream.
    assert!(stderr_of(&out).contains("front speed"));

    let prof = std::fs::read_to_string(&profile).unwrap();
    let header = prof.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "x,u,v");
}

#[test]
fn bbm_is_deterministic_for_a_fixed_seed() {
    let args = ["bbm", "--t", "2", "--replicates", "16", "--seed", "7"];
    let first = dormwave(&args);
    assert!(first.status.success(), "{}", stderr_of(&first));
    let text = stdout_of(&first);
    assert!(text.lines().any(|l| l == "replicate,R_T"), "{text}");
    let rows = text
        .lines()
        .filter(|l| !l.starts_with('#') && l.contains(',') && *l != "replicate,R_T")
        .count();
    assert_eq!(rows, 16);

    let second = dormwave(&args);
    assert_eq!(
        first.stdout, second.stdout,
        "same seed gave different maxima"
    );
}

#[test]
fn bbm_cdf_probes_estimate_a_distribution() {
    let out = dormwave(&[
        "bbm",
        "--t",
        "1",
        "--replicates",
        "64",
        "--seed",
        "3",
        "--cdf-probes",
        "-5,0,5",
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.lines().any(|l| l == "x,p_hat,stderr"), "{text}");
    let p_of = |row: &str| -> f64 { row.split(',').nth(1).unwrap().parse().unwrap() };
    let probes: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#') && *l != "x,p_hat,stderr")
        .map(p_of)
        .collect();
    assert_eq!(probes.len(), 3);
    // A CDF: monotone, essentially 0 far left and 1 far right at t = 1.
    assert!(probes[0] <= probes[1] && probes[1] <= probes[2]);
    assert!(probes[0] < 0.1 && probes[2] > 0.9, "{probes:?}");
}

#[test]
fn config_file_sets_the_model_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("model.conf");
    std::fs::write(&conf, "variant = spore\nkappa = 1.5\n").unwrap();

    let out = dormwave(&["critical", "--config", conf.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("variant=spore"), "{text}");
    assert!(text.contains("0.866025403784"), "{text}"); // sqrt(1.5 / 2)

    let out = dormwave(&[
        "critical",
        "--config",
        conf.to_str().unwrap(),
        "--kappa",
        "0.5",
    ]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("kappa=0.5"));
}

#[test]
fn model_errors_exit_one_usage_errors_exit_two() {
    // The classical variant has no dormancy; asking for switching rates
    // is a domain error, reported on stderr with exit code 1.
    let out = dormwave(&["critical", "--variant", "classical", "-c", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("classical"));

    let out = dormwave(&["verify", "krill"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("krill"));

    // Unknown flags are caught by the parser with the usage exit code.
    let out = dormwave(&["--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}
