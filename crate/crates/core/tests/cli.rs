use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const HEADER: &str = "algorithm,dataset,metric,seed,value,status\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rankbench"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Fixture {
            dir: tempfile::tempdir().unwrap(),
        };
        f.write(
            "registry.txt",
            "metric.acc.direction = higher\nmetric.loss.direction = lower\n",
        );
        f
    }

    fn write(&self, name: &str, contents: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        fs::write(&p, contents).unwrap();
        p
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).display().to_string()
    }

    fn registry(&self) -> String {
        self.path("registry.txt")
    }
}

/// Rows of `alg,dataset,metric,seed,value,ok` from per-seed score vectors.
fn grid(tests: &[(&str, &str, &[&[f64]])]) -> String {
    let mut s = String::from(HEADER);
    for (dataset, metric, seeds) in tests {
        for (seed, scores) in seeds.iter().enumerate() {
            for (i, v) in scores.iter().enumerate() {
                s.push_str(&format!("alg{i},{dataset},{metric},{seed},{v},ok\n"));
            }
        }
    }
    s
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", stderr(o));
    serde_json::from_str(&stdout(o)).unwrap()
}

fn coefficient(report: &Value, name: &str, policy: &str) -> f64 {
    report["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["coefficient"] == name && c["tie_policy"] == policy)
        .unwrap_or_else(|| panic!("{name}/{policy} missing"))["value"]
        .as_f64()
        .unwrap()
}

// Higher is better, so the score vector (3,2,1) ranks as (1,2,3).
fn concordance_toy() -> String {
    grid(&[
        ("d1", "acc", &[&[3.0, 2.0, 1.0], &[3.0, 2.0, 1.0], &[3.0, 2.0, 1.0]]),
        ("d2", "acc", &[&[3.0, 2.0, 1.0], &[2.0, 3.0, 1.0], &[3.0, 2.0, 1.0]]),
    ])
}

#[test]
fn validate_complete_grid() {
    let f = Fixture::new();
    let input = f.write("ok.csv", &concordance_toy());
    let o = run(&["validate", input.to_str().unwrap(), "--registry", &f.registry()]);
    let report = json(&o);
    assert_eq!(report["n_tests"], 2);
    assert_eq!(report["n_algorithms"], 3);
    assert_eq!(report["n_seeds"], 3);
}

#[test]
fn validate_names_missing_cell() {
    let f = Fixture::new();
    let toy = concordance_toy();
    let truncated: String = toy
        .lines()
        .filter(|l| *l != "alg1,d2,acc,2,2,ok")
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(truncated.lines().count(), toy.lines().count() - 1);
    let input = f.write("missing.csv", &truncated);
    let o = run(&["validate", input.to_str().unwrap(), "--registry", &f.registry()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("algorithm=alg1 dataset=d2 metric=acc seed=2"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn validate_names_unknown_metric() {
    let f = Fixture::new();
    let input = f.write("bad.csv", &grid(&[("d1", "f1", &[&[1.0, 2.0]])]));
    let o = run(&["validate", input.to_str().unwrap(), "--registry", &f.registry()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown metric `f1`"), "{}", stderr(&o));
}

#[test]
fn io_errors_exit_one() {
    let f = Fixture::new();
    let o = run(&["validate", &f.path("nope.csv"), "--registry", &f.registry()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nope.csv"));

    let input = f.write("ok.csv", &concordance_toy());
    let o = run(&[
        "validate",
        input.to_str().unwrap(),
        "--registry",
        &f.path("missing-registry.txt"),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_registry_flag_is_a_usage_error() {
    let f = Fixture::new();
    let input = f.write("ok.csv", &concordance_toy());
    let o = run(&["validate", input.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn coeff_concordance_toy() {
    let f = Fixture::new();
    let input = f.write("toy.csv", &concordance_toy());
    let report = json(&run(&["coeff", input.to_str().unwrap(), "--registry", &f.registry()]));
    let w = coefficient(&report, "w", "mean_of_tied");
    assert!((w - 0.111111).abs() < 1e-6, "{w}");
    assert!((w - 1.0 / 9.0).abs() < 1e-15);
    let per_test: Vec<f64> = report["coefficients"][0]["per_test"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["w"].as_f64().unwrap())
        .collect();
    assert_eq!(per_test[0], 1.0);
    assert!((per_test[1] - 168.0 / 216.0).abs() < 1e-15);
    assert_eq!(report["n_ties"], 0);
}

#[test]
fn coeff_csv_output_and_output_flag() {
    let f = Fixture::new();
    let input = f.write("toy.csv", &concordance_toy());
    let out = f.path("coeff.csv");
    let o = run(&[
        "coeff",
        input.to_str().unwrap(),
        "--registry",
        &f.registry(),
        "--format",
        "csv",
        "--coefficients",
        "w",
        "--output",
        &out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let csv = fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("coefficient,tie_policy,dataset,metric,value"));
    assert!(lines.next().unwrap().starts_with("w,mean,,,0.1111111"));
    assert!(csv.ends_with("n_ties,mean,,,0\n"));
}

#[test]
fn coeff_deterministic_synthetic_is_zero() {
    let f = Fixture::new();
    let reg = f.path("synth-registry.txt");
    let o = run(&["synth", "--noise-scale", "0", "--format", "csv", "--registry-out", &reg]);
    assert!(o.status.success());
    let input = f.write("synth.csv", &stdout(&o));
    let report = json(&run(&["coeff", input.to_str().unwrap(), "--registry", &reg]));
    for c in ["w", "w_tied", "w_wasserstein"] {
        assert_eq!(coefficient(&report, c, "mean_of_tied"), 0.0, "{c}");
    }
    assert_eq!(report["n_ties"], 0);
    assert_eq!(report["n_tests"], 44);
}

#[test]
fn coeff_records_both_tie_policies() {
    let f = Fixture::new();
    let mut csv = String::from(HEADER);
    for seed in 0..2 {
        csv.push_str(&format!("a,d,acc,{seed},0.9,ok\nb,d,acc,{seed},0.8,ok\n"));
        csv.push_str(&format!("c,d,acc,{seed},,oom\nd,d,acc,{seed},,timeout\n"));
    }
    let input = f.write("oom.csv", &csv);
    let report = json(&run(&[
        "coeff",
        input.to_str().unwrap(),
        "--registry",
        &f.registry(),
        "--tie-policy",
        "lowest",
        "--coefficients",
        "w",
        "--compare-tie-policies",
    ]));
    let mean = coefficient(&report, "w", "mean_of_tied");
    let lowest = coefficient(&report, "w", "lowest_shared_rank");
    assert_ne!(mean, lowest);
    assert_eq!(report["tie_policy"], "lowest_shared_rank");
    assert_eq!(report["n_ties"], 2);
}

#[test]
fn bad_epsilon_is_a_validation_error() {
    let f = Fixture::new();
    let input = f.write("toy.csv", &concordance_toy());
    let o = run(&[
        "coeff",
        input.to_str().unwrap(),
        "--registry",
        &f.registry(),
        "--tie-epsilon",
        "-1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

fn fcr_run(f: &Fixture, a: &Path, b: &Path, extra: &[&str]) -> Value {
    let fa = format!("tuned={}", a.display());
    let fb = format!("default={}", b.display());
    let mut args = vec!["fcr", "--framework", &fa, "--framework", &fb, "--registry"];
    let reg = f.registry();
    args.push(&reg);
    args.extend_from_slice(extra);
    json(&run(&args))
}

#[test]
fn fcr_toys() {
    let f = Fixture::new();
    let better = f.write(
        "better.csv",
        &grid(&[
            ("d1", "acc", &[&[0.9, 0.8, 0.7], &[0.9, 0.8, 0.7]]),
            ("d1", "loss", &[&[0.1, 0.2, 0.3], &[0.1, 0.2, 0.3]]),
        ]),
    );
    let worse = f.write(
        "worse.csv",
        &grid(&[
            ("d1", "acc", &[&[0.5, 0.4, 0.3], &[0.5, 0.4, 0.3]]),
            ("d1", "loss", &[&[0.6, 0.7, 0.8], &[0.6, 0.7, 0.8]]),
        ]),
    );
    // The tuned table wins five of six (algorithm, test) units; alg2/loss goes to default.
    let mostly = f.write(
        "mostly.csv",
        &grid(&[
            ("d1", "acc", &[&[0.9, 0.8, 0.7], &[0.9, 0.8, 0.7]]),
            ("d1", "loss", &[&[0.1, 0.2, 0.9], &[0.1, 0.2, 0.9]]),
        ]),
    );

    let r = fcr_run(&f, &better, &worse, &[]);
    assert_eq!(r["fcr"]["fcr"]["tuned"], 1.0);
    assert_eq!(r["fcr"]["fcr"]["default"], 2.0);
    assert_eq!(r["fcr"]["units"], 6);

    let r = fcr_run(&f, &mostly, &worse, &[]);
    assert!((r["fcr"]["fcr"]["tuned"].as_f64().unwrap() - 7.0 / 6.0).abs() < 1e-15);
    assert!((r["fcr"]["fcr"]["default"].as_f64().unwrap() - 11.0 / 6.0).abs() < 1e-15);

    let r = fcr_run(&f, &better, &better, &[]);
    assert_eq!(r["fcr"]["fcr"]["tuned"], 1.5);
    assert_eq!(r["fcr"]["fcr"]["default"], 1.5);

    let r = fcr_run(&f, &better, &worse, &["--granularity", "per-test"]);
    assert_eq!(r["fcr"]["units"], 2);
    assert_eq!(r["fcr"]["granularity"], "per-test");
}

#[test]
fn fcr_mismatched_algorithms_exit_two() {
    let f = Fixture::new();
    let a = f.write("a.csv", &grid(&[("d1", "acc", &[&[0.9, 0.8]])]));
    let b = f.write("b.csv", &grid(&[("d1", "acc", &[&[0.9, 0.8, 0.7]])]));
    let o = run(&[
        "fcr",
        "--framework",
        &format!("x={}", a.display()),
        "--framework",
        &format!("y={}", b.display()),
        "--registry",
        &f.registry(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn converge_files_and_determinism() {
    let f = Fixture::new();
    let reg = f.path("synth-registry.txt");
    let o = run(&[
        "synth",
        "--datasets",
        "3",
        "--metrics",
        "2",
        "--tie-prob",
        "0.3",
        "--format",
        "csv",
        "--registry-out",
        &reg,
    ]);
    let input = f.write("synth.csv", &stdout(&o));
    let (plot, summary, svg) = (f.path("plot.csv"), f.path("summary.csv"), f.path("conv.svg"));
    let args = [
        "converge",
        input.to_str().unwrap(),
        "--registry",
        &reg,
        "--repeats",
        "4",
        "--rng-seed",
        "11",
        "--plot-out",
        &plot,
        "--summary-out",
        &summary,
        "--svg-out",
        &svg,
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success(), "{}", stderr(&first));
    assert_eq!(first.stdout, second.stdout);

    let report: Value = serde_json::from_slice(&first.stdout).unwrap();
    let conv = &report["convergence"];
    assert_eq!(conv["n_tests"], 6);
    assert_eq!(conv["rng_seed"], 11);
    assert_eq!(report["rng_seed"], 11);
    for cell in conv["cells"].as_array().unwrap().iter().filter(|c| c["size"] == 6) {
        let full = conv["full_suite"]
            .as_array()
            .unwrap()
            .iter()
            .find(|v| v["coefficient"] == cell["coefficient"])
            .unwrap()["value"]
            .clone();
        assert!(cell["values"].as_array().unwrap().iter().all(|v| *v == full));
        assert_eq!(cell["std"], 0.0);
    }

    assert_eq!(fs::read_to_string(&plot).unwrap().lines().count(), 1 + 6 * 4 * 3);
    assert_eq!(fs::read_to_string(&summary).unwrap().lines().count(), 1 + 6 * 3);
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn converge_two_test_enumeration() {
    let f = Fixture::new();
    let input = f.write(
        "two.csv",
        &grid(&[
            ("a", "acc", &[&[4.0, 3.0, 2.0, 1.0], &[4.0, 3.0, 2.0, 1.0]]),
            ("b", "acc", &[&[4.0, 3.0, 2.0, 1.0], &[3.0, 1.0, 4.0, 2.0]]),
        ]),
    );
    let report = json(&run(&[
        "converge",
        input.to_str().unwrap(),
        "--registry",
        &f.registry(),
        "--sizes",
        "1",
        "--repeats",
        "100",
        "--coefficients",
        "w",
    ]));
    let values: Vec<f64> = report["convergence"]["cells"][0]["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!(values.iter().all(|&v| v == 0.0 || v == 0.5));
    assert!(values.contains(&0.0) && values.contains(&0.5));
}

#[test]
fn converge_size_out_of_range() {
    let f = Fixture::new();
    let input = f.write("toy.csv", &concordance_toy());
    let o = run(&[
        "converge",
        input.to_str().unwrap(),
        "--registry",
        &f.registry(),
        "--sizes",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("outside 1..=2"));
}

#[test]
fn rank_export() {
    let f = Fixture::new();
    let input = f.write("toy.csv", &concordance_toy());
    let o = run(&[
        "rank",
        input.to_str().unwrap(),
        "--registry",
        &f.registry(),
        "--format",
        "csv",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("dataset,metric,seed,algorithm,rank\n"));
    assert_eq!(out.lines().count(), 1 + 2 * 3 * 3);
    assert!(out.contains("d2,acc,1,alg0,2\n"));
}

#[test]
fn synth_round_trips_through_validate() {
    let f = Fixture::new();
    let reg = f.path("synth-registry.txt");
    let o = run(&[
        "synth",
        "--algorithms",
        "4",
        "--datasets",
        "2",
        "--metrics",
        "3",
        "--seeds",
        "5",
        "--fail-prob",
        "0.2",
        "--format",
        "json",
        "--registry-out",
        &reg,
    ]);
    assert!(o.status.success());
    let input = f.write("synth.json", &stdout(&o));
    let report = json(&run(&["validate", input.to_str().unwrap(), "--registry", &reg]));
    assert_eq!(report["n_tests"], 6);
    assert_eq!(report["n_algorithms"], 4);
    assert_eq!(report["n_seeds"], 5);
}

#[test]
fn drop_incomplete_records_dropped_tests() {
    let f = Fixture::new();
    let toy = concordance_toy();
    let partial: String = toy
        .lines()
        .filter(|l| *l != "alg0,d1,acc,0,3,ok")
        .map(|l| format!("{l}\n"))
        .collect();
    let input = f.write("partial.csv", &partial);
    let report = json(&run(&[
        "coeff",
        input.to_str().unwrap(),
        "--registry",
        &f.registry(),
        "--drop-incomplete",
        "--coefficients",
        "w",
    ]));
    assert_eq!(report["n_tests"], 1);
    assert_eq!(report["dropped_tests"][0]["dataset"], "d1");
    assert!(report["warnings"]
        .as_array()
        .unwrap()
        .iter()
        .any(|w| w.as_str().unwrap().contains("dropped")));
}
