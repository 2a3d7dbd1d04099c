use std::path::Path;
use std::process::{Command, Output};

use dnls_cli::snapshot::read_snapshot;

fn dnls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dnls"))
        .args(args)
        .env("DNLS_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn last_fields(text: &str) -> Vec<f64> {
    text.lines()
        .last()
        .unwrap()
        .split(',')
        .map(|f| f.parse().unwrap_or(f64::NAN))
        .collect()
}

#[test]
fn run_reports_the_benchmark_error() {
    let o = dnls(&["run", "--n", "16", "--tau", "0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(
        text.lines().next().unwrap(),
        "n,t,mass,energy,rm,re,err_l2,err_inf"
    );
    assert_eq!(text.lines().count(), 12);
    let last = last_fields(&text);
    assert_eq!(last[0], 10.0);
    assert!((last[6] - 1.751e-1).abs() < 1e-4, "{last:?}");
    assert!(last[4] < 1e-13 && last[5] < 1e-13);
}

#[test]
fn zero_final_time_gives_one_row() {
    let o = dnls(&["run", "--t-final", "0", "--n", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    let row = last_fields(&text);
    assert_eq!(row[0], 0.0);
    assert_eq!((row[4], row[5]), (0.0, 0.0));
}

#[test]
fn output_is_deterministic() {
    let args = ["run", "--n", "8", "--tau", "0.05", "--scheme", "ifd"];
    let a = dnls(&args);
    let b = dnls(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_errors_exit_with_2() {
    for args in [
        &["run", "--tau", "0.3"][..],
        &["run", "--n", "7"],
        &["run", "--n", "4", "--wave-k", "3"],
        &["run", "--scheme", "euler"],
        &["run", "--gamma", "-1"],
        &["run", "--config", "/nonexistent/dnls.conf"],
        &["converge-time", "--no-exact"],
        &["conservation", "--schemes", "licfp,bogus"],
    ] {
        let o = dnls(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains("configuration error"), "{args:?}");
    }
}

#[test]
fn explicit_instability_exits_with_3() {
    let o = dnls(&["run", "--scheme", "rk3", "--n", "16", "--tau", "0.1"]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("step"), "{err}");
    assert!(err.contains("blow-up"), "{err}");
}

#[test]
fn solver_stall_reports_step_and_residual() {
    let o = dnls(&[
        "run",
        "--n",
        "8",
        "--tau",
        "0.5",
        "--solver",
        "jacobi",
        "--max-iters",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("step 1"), "{err}");
    assert!(err.contains("residual"), "{err}");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("exp.conf");
    let out = dir.path().join("rows.json");
    std::fs::write(
        &conf,
        "# coarse run\nn = 8\ntau = 0.1\nt_final = 0.5\nformat = json\n",
    )
    .unwrap();
    let o = dnls(&[
        "run",
        "--config",
        conf.to_str().unwrap(),
        "--tau",
        "0.05",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let rows: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[10]["n"], 10);
    assert!(rows[10]["err_l2"].as_f64().unwrap() > 0.0);
}

#[test]
fn snapshot_holds_the_final_field() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("final.bin");
    let o = dnls(&[
        "run",
        "--n",
        "4,4,2",
        "--tau",
        "0.25",
        "--snapshot",
        snap.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let bytes = std::fs::read(Path::new(&snap)).unwrap();
    assert_eq!(bytes.len(), 32 + 16 * 32);
    let tau = std::f64::consts::TAU;
    let (field, t) = read_snapshot(bytes.as_slice(), [tau; 3]).unwrap();
    assert_eq!(t, 1.0);
    assert_eq!(field.grid().counts(), [4, 4, 2]);
    // mass is conserved, so the modulus stays at |K| = 1 up to roundoff
    assert!(field
        .values()
        .iter()
        .all(|v| (v.norm() - 1.0).abs() < 1e-12));
}

#[test]
fn converge_time_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rates.csv");
    let o = dnls(&[
        "converge-time",
        "--taus",
        "0.0125,0.1,0.05,0.025",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "label,tau,err_l2,rate_l2,err_inf,rate_inf,status");
    let taus: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(taus, vec![0.1, 0.05, 0.025, 0.0125]);
    let rates: Vec<f64> = lines[2..]
        .iter()
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    for (r, expected) in rates.iter().zip([1.958, 1.989, 1.997]) {
        assert!((r - expected).abs() < 2e-3, "{rates:?}");
    }
    assert!(stdout(&o).contains("1.958"));
}

#[test]
fn converge_time_marks_failed_rows() {
    let o = dnls(&[
        "converge-time",
        "--scheme",
        "rk3",
        "--taus",
        "0.1,0.005,0.0025",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let table = stdout(&o);
    assert!(table.lines().nth(1).unwrap().contains("failed"), "{table}");
    assert!(table.lines().nth(3).unwrap().contains("ok"), "{table}");
}

#[test]
fn converge_space_rejects_unresolved_grids() {
    let o = dnls(&["converge-space", "--ns", "2,4", "--wave-k", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn converge_space_is_flat_once_resolved() {
    let o = dnls(&["converge-space", "--ns", "4,8", "--tau", "1e-3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let errs: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(errs.len(), 2);
    assert!((errs[0] / errs[1] - 1.0).abs() < 1e-3, "{errs:?}");
}

#[test]
fn conservation_side_by_side() {
    let o = dnls(&[
        "conservation",
        "--n",
        "8",
        "--tau",
        "0.1",
        "--t-final",
        "5",
        "--sample-every",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("n,t,rm_licfp,re_licfp,rm_ifd,re_ifd\n"));
    assert_eq!(text.lines().count(), 7);
    for line in text.lines().skip(1) {
        for v in line.split(',').skip(2) {
            assert!(v.parse::<f64>().unwrap() < 1e-12, "{line}");
        }
    }
    assert!(stderr(&o).contains("licfp: max RM"));
}

#[test]
fn linear_problem_energy_is_exact() {
    let o = dnls(&[
        "conservation",
        "--n",
        "8",
        "--tau",
        "0.1",
        "--t-final",
        "10",
        "--beta",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for line in stdout(&o).lines().skip(1) {
        let re: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!(re <= 1e-12);
    }
}

#[test]
fn explicit_scheme_drifts_in_mass() {
    let o = dnls(&[
        "conservation",
        "--schemes",
        "licfp,rk3",
        "--n",
        "8",
        "--tau",
        "0.01",
        "--t-final",
        "20",
        "--sample-every",
        "2000",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let last = last_fields(&stdout(&o));
    let (rm_licfp, rm_rk3) = (last[2], last[4]);
    assert!(rm_rk3 > 1e-8, "{rm_rk3}");
    assert!(rm_rk3 > 1e3 * rm_licfp.max(1e-16));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_dnls"))
        .args(["converge-time", "--n", "4", "--taus", "0.5"])
        .env("DNLS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
