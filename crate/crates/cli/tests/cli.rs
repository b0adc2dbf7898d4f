mod support;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use coverbound_cli::figures::DEFAULT_SEED;
use support::validate_csv;

fn coverbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coverbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn coverages(text: &str, method: &str) -> Vec<(f64, f64)> {
    validate_csv(text)
        .unwrap()
        .into_iter()
        .filter(|r| r.method.label() == method)
        .map(|r| (r.param_value, r.coverage))
        .collect()
}

#[test]
fn exact_coverage_reproduces_fig1a() {
    let dir = tempfile::tempdir().unwrap();
    let dir_s = dir.path().to_str().unwrap();
    stdout(&coverbound(&["figure", "fig1a", "--out", dir_s]));
    let figure = fs::read_to_string(dir.path().join("fig1a.csv")).unwrap();
    let direct = stdout(&coverbound(&[
        "exact-coverage",
        "--family",
        "poisson",
        "--d",
        "2",
        "--n",
        "400",
        "--grid",
        "2:2.5:0.0025",
    ]));
    let a = coverages(&figure, "exact");
    assert_eq!(a.len(), 201);
    assert_eq!(a, coverages(&direct, "exact"));
}

#[test]
fn asym_coverage_reproduces_fig2b() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&coverbound(&[
        "figure",
        "fig2b",
        "--out",
        dir.path().to_str().unwrap(),
    ]));
    let figure = fs::read_to_string(dir.path().join("fig2b.csv")).unwrap();
    let direct = stdout(&coverbound(&[
        "asym-coverage",
        "--one-sample",
        "--sigma0",
        "1",
        "--grid",
        "0:4:0.01",
        "--alpha1",
        "0.05",
        "--alpha2",
        "0.05",
    ]));
    let rows = coverages(&direct, "asymptotic");
    assert_eq!(rows, coverages(&figure, "asymptotic"));
    assert_eq!(rows[0], (0.0, 0.95));
    assert_eq!(rows.last().unwrap().1, 0.90);
}

#[test]
fn two_sample_asym_coverage_from_design() {
    let text = stdout(&coverbound(&[
        "asym-coverage",
        "--family",
        "binomial",
        "--eta0",
        "0.5",
        "--n1",
        "100",
        "--n2",
        "300",
        "--target",
        "delta",
        "--grid",
        "1.89:1.91:0.01",
    ]));
    let cov: Vec<f64> = coverages(&text, "asymptotic")
        .into_iter()
        .map(|r| r.1)
        .collect();
    assert_eq!(cov, vec![0.95, 0.90, 0.90]);
}

#[test]
fn mc_coverage_normal_boundary_example() {
    let text = stdout(&coverbound(&[
        "mc-coverage",
        "--family",
        "normal",
        "--d",
        "0",
        "--n",
        "100",
        "--theta0",
        "0",
        "--B",
        "1999",
        "--reps",
        "10000",
        "--seed",
        "7",
    ]));
    let rows = validate_csv(&text).unwrap();
    assert_eq!(rows.len(), 1);
    let se = rows[0].error_estimate.unwrap();
    assert!((rows[0].coverage - 0.95).abs() <= 3.0 * se, "{rows:?}");
    assert_eq!(rows[0].seed, Some(7));
}

#[test]
fn two_sample_exact_and_mc_agree() {
    let common = [
        "--family",
        "binomial",
        "--n1",
        "20",
        "--n2",
        "30",
        "--eta0",
        "0.4",
        "--target",
        "theta2",
        "--grid",
        "0.1:0.1:1",
    ];
    let exact = stdout(&coverbound(&[&["exact-coverage"][..], &common].concat()));
    let mc = stdout(&coverbound(
        &[
            &["mc-coverage", "--reps", "4000", "--seed", "3"][..],
            &common,
        ]
        .concat(),
    ));
    let e = validate_csv(&exact).unwrap()[0].coverage;
    let m = &validate_csv(&mc).unwrap()[0];
    assert!(
        (e - m.coverage).abs() <= 4.0 * m.error_estimate.unwrap(),
        "{e} vs {m:?}"
    );
}

#[test]
fn conflicting_flags_are_named() {
    let cases: [(&[&str], [&str; 2]); 5] = [
        (
            &[
                "exact-coverage",
                "--family",
                "poisson",
                "--d",
                "2",
                "--n1",
                "10",
                "--n2",
                "10",
                "--eta0",
                "1",
                "--target",
                "delta",
                "--grid",
                "0:0.1:0.1",
            ],
            ["--d", "--n1/--n2"],
        ),
        (
            &[
                "exact-coverage",
                "--family",
                "poisson",
                "--d",
                "2",
                "--n",
                "10",
                "--n1",
                "10",
                "--grid",
                "2:3:1",
            ],
            ["--n", "--n1/--n2"],
        ),
        (
            &[
                "exact-coverage",
                "--family",
                "poisson",
                "--d",
                "2",
                "--n",
                "10",
                "--grid",
                "2:3:1",
                "--theta0",
                "2",
            ],
            ["--grid", "--theta0"],
        ),
        (
            &[
                "asym-coverage",
                "--one-sample",
                "--sigma0",
                "1",
                "--omega",
                "0.3",
                "--grid",
                "0:1:1",
            ],
            ["--omega", "--one-sample"],
        ),
        (
            &[
                "asym-coverage",
                "--family",
                "poisson",
                "--sigma0",
                "1",
                "--one-sample",
                "--d",
                "2",
                "--grid",
                "0:1:1",
            ],
            ["--sigma0", "--family"],
        ),
    ];
    for (args, [a, b]) in cases {
        let out = coverbound(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(a) && err.contains(b), "{args:?}: {err}");
    }
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        &[
            "exact-coverage",
            "--family",
            "poisson",
            "--n",
            "10",
            "--grid",
            "2:1:0.1",
            "--d",
            "2",
        ][..],
        &[
            "exact-coverage",
            "--family",
            "poisson",
            "--n",
            "10",
            "--theta0",
            "2",
        ],
        &[
            "exact-coverage",
            "--family",
            "poisson",
            "--n",
            "10",
            "--d",
            "2",
            "--theta0",
            "2",
            "--alpha1",
            "0.7",
        ],
        &[
            "mc-coverage",
            "--family",
            "normal",
            "--n",
            "10",
            "--d",
            "0",
            "--theta0",
            "0",
            "--reps",
            "10",
        ],
        &["figure", "fig9"],
        &["exact-coverage", "--family", "gamma"],
    ] {
        assert_eq!(coverbound(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let inside = blocker.join("out.csv");
    let out = coverbound(&[
        "asym-coverage",
        "--one-sample",
        "--sigma0",
        "1",
        "--grid",
        "0:1:1",
        "--out",
        inside.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains(inside.to_str().unwrap()));
    let fig = coverbound(&[
        "figure",
        "fig2b",
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(fig.status.code(), Some(3));
}

#[test]
fn thread_cap_is_honored_and_validated() {
    let args = [
        "exact-coverage",
        "--family",
        "binomial",
        "--d",
        "0.5",
        "--n",
        "60",
        "--grid",
        "0.5:0.6:0.01",
    ];
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_coverbound"))
            .args(args)
            .env("COVERBOUND_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_eq!(stdout(&run("1")), stdout(&run("3")));
    assert_eq!(run("zero").status.code(), Some(2));
    assert_eq!(run("0").status.code(), Some(2));
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn fig6_is_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let args = [
            "figure",
            "fig6",
            "--out",
            dir.path().to_str().unwrap(),
            "--seed",
            "11",
            "--qmc-points",
            "2048",
            "--scrambles",
            "4",
            "--grid",
            "0:0.2:0.02",
        ];
        stdout(&coverbound(&args));
    }
    let (fa, fb) = (read_dir_sorted(a.path()), read_dir_sorted(b.path()));
    assert_eq!(fa.len(), 7);
    assert_eq!(fa, fb);
}

#[test]
fn every_figure_writes_schema_valid_csv() {
    let dir = tempfile::tempdir().unwrap();
    let listing = stdout(&coverbound(&[
        "figure",
        "all",
        "--out",
        dir.path().to_str().unwrap(),
        "--qmc-points",
        "1024",
        "--scrambles",
        "2",
        "--plot",
        "gnuplot",
    ]));
    let mut panels = 0;
    for (name, bytes) in read_dir_sorted(dir.path()) {
        let text = String::from_utf8(bytes).unwrap();
        if name.ends_with("_errors.csv") {
            assert_eq!(text.lines().count(), 1, "{name}: {text}");
        } else if name.ends_with(".csv") {
            let rows = validate_csv(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(!rows.is_empty());
            let fig = name.split(['_', '.']).next().unwrap();
            assert!(rows.iter().all(|r| r.figure_id.as_deref() == Some(fig)));
            let seeded = rows
                .iter()
                .filter_map(|r| r.seed)
                .all(|s| s == DEFAULT_SEED);
            assert!(seeded);
            panels += 1;
        } else {
            assert!(name.ends_with(".gp"), "{name}");
            for csv in text
                .lines()
                .filter_map(|l| l.split('\'').nth(1))
                .filter(|s| s.ends_with(".csv"))
            {
                assert!(dir.path().join(csv).exists(), "{name} references {csv}");
            }
        }
    }
    assert_eq!(panels, 1 + 1 + 1 + 1 + 2 + 2 + 3 + 6);
    assert_eq!(listing.lines().count(), panels + 2 * 8);
}

#[test]
fn fig5_delta_panel_steps_at_the_balanced_threshold() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&coverbound(&[
        "figure",
        "fig5",
        "--out",
        dir.path().to_str().unwrap(),
        "--grid",
        "3.2:3.4:0.1",
        "--qmc-points",
        "256",
        "--scrambles",
        "2",
    ]));
    let text = fs::read_to_string(dir.path().join("fig5_c.csv")).unwrap();
    let cov: Vec<f64> = validate_csv(&text)
        .unwrap()
        .into_iter()
        .filter(|r| r.panel.as_deref() == Some("c/omega=0.5"))
        .map(|r| r.coverage)
        .collect();
    assert_eq!(cov, vec![0.95, 0.90, 0.90]);
}

#[test]
fn diagnostics_reports_each_probe() {
    let text = stdout(&coverbound(&[
        "diagnostics",
        "--family",
        "poisson",
        "--n",
        "50",
        "--theta0",
        "2",
        "--grid",
        "-1:1:0.5",
        "--seed",
        "4",
    ]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], coverbound_cli::commands::DIAGNOSTICS_HEADER);
    assert_eq!(lines.len(), 6);
    for line in &lines[1..] {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 7);
        let dev: f64 = f[4].parse().unwrap();
        assert!((0.0..0.2).contains(&dev), "{line}");
    }
}
