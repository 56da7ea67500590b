use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pdfw_core::diagnostics::fw_gap;
use pdfw_harness::instance_file;

fn pdfw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdfw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn read_csv(path: &Path) -> Vec<HashMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            headers.iter().map(String::from).zip(rec.iter().map(String::from)).collect()
        })
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s}"))
}

#[test]
fn unknown_suite_is_usage_error() {
    let o = pdfw(&["verify", "foo"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn invalid_plans_are_rejected_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap();
    for args in [
        vec!["run", "--instance", "gen:convex", "--horizons", "100,10", "--out", out_s],
        vec!["run", "--instance", "gen:convex", "--seeds", "0", "--out", out_s],
        vec!["run", "--instance", "gen:convex", "--algo", "distributed", "--out", out_s],
        vec!["run", "--instance", "missing.toml", "--out", out_s],
        vec!["run", "--instance", "gen:convex", "--algo", "bogus", "--out", out_s],
    ] {
        let o = pdfw(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert!(!out.join("summary.csv").exists());
}

#[test]
fn single_slot_run() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("convex.toml");
    let o = pdfw(&["gen", "--kind", "convex", "--seed", "2", "--out", inst.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let out = dir.path().join("out");
    let o = pdfw(&[
        "run",
        "--instance",
        inst.to_str().unwrap(),
        "--horizons",
        "1",
        "--seeds",
        "1",
        "--trace",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = read_csv(&out.join("summary.csv"));
    assert_eq!(summary.len(), 1);
    let trace = read_csv(&out.join("trace_T1_seed0.csv"));
    assert_eq!(trace.len(), 1);
    let loaded = instance_file::load(&inst).unwrap();
    let x0: Vec<f64> = (0..loaded.instance.dim()).map(|j| num(&trace[0][&format!("x{j}")])).collect();
    let f = loaded.instance.objective().value(&x0);
    assert_eq!(num(&summary[0]["f_xbar_mean"]), f);
    assert_eq!(summary[0]["wallclock_s"], "NA");
}

#[test]
fn summary_columns_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        let o = pdfw(&[
            "run",
            "--instance",
            "gen:convex:0",
            "--schedule",
            "square_root",
            "--horizons",
            "100,1000,10000",
            "--seeds",
            "12",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
        out
    };
    let a = run("a", "1");
    let b = run("b", "2");
    for f in ["summary.csv", "runs.csv", "bounds.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let header = fs::read_to_string(a.join("summary.csv")).unwrap();
    assert!(header.starts_with(
        "instance,algorithm,schedule,T,seeds,f_xbar_mean,f_xbar_se,subopt_mean,\
         max_violation_mean,fw_gap_mean,dist2_mean,bound_subopt,bound_violation,wallclock_s\n"
    ));
    let rows = read_csv(&a.join("summary.csv"));
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!(num(&r["bound_subopt"]) >= num(&r["subopt_mean"]));
        assert_eq!(r["fw_gap_mean"], "NA");
    }
    let bounds = read_csv(&a.join("bounds.csv"));
    assert!(bounds.iter().all(|r| r["passed"] == "true"));
}

#[test]
fn nonconvex_plan_reports_gap_and_distance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = pdfw(&[
        "run",
        "--instance",
        "gen:sigmoidal:0",
        "--horizons",
        "200,2000",
        "--seeds",
        "6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    for r in read_csv(&out.join("summary.csv")) {
        assert_eq!(r["subopt_mean"], "NA");
        assert!(num(&r["fw_gap_mean"]).is_finite());
        assert!(num(&r["dist2_mean"]) >= 0.0);
    }
}

/// Every reported number follows from the trace CSV and the instance file.
#[test]
fn reports_recompute_from_trace_and_instance() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["convex", "sigmoidal"] {
        let inst_path = dir.path().join(format!("{kind}.toml"));
        let o = pdfw(&["gen", "--kind", kind, "--seed", "1", "--out", inst_path.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        let loaded = instance_file::load(&inst_path).unwrap();
        let inst = &loaded.instance;
        let out = dir.path().join(format!("out-{kind}"));
        let o = pdfw(&[
            "run",
            "--instance",
            inst_path.to_str().unwrap(),
            "--horizons",
            "50",
            "--seeds",
            "3",
            "--trace",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        let d = inst.dim();
        let c = inst.constraints();
        for run in read_csv(&out.join("runs.csv")) {
            let t: usize = run["T"].parse().unwrap();
            let trace = read_csv(&out.join(format!("trace_T{t}_seed{}.csv", run["seed"])));
            let row = |r: &HashMap<String, String>, p: &str| -> Vec<f64> {
                (0..d).map(|j| num(&r[&format!("{p}{j}")])).collect()
            };
            let mut x_bar = vec![0.0; d];
            let mut path = vec![0.0; d];
            for (k, r) in trace.iter().enumerate() {
                let x = row(r, "x");
                for j in 0..d {
                    x_bar[j] += x[j] / t as f64;
                }
                if k + 1 < t {
                    let g = row(r, "gamma");
                    for j in 0..d {
                        path[j] += g[j] / t as f64;
                    }
                }
            }
            let f = inst.objective().value(&x_bar);
            assert!((f - num(&run["f_xbar"])).abs() < 1e-12);
            let viol = if kind == "convex" { c.residuals(&x_bar) } else { c.residuals(&path) };
            for (i, v) in viol.iter().enumerate() {
                assert!((v - num(&run[&format!("violation{i}")])).abs() < 1e-12);
            }
            // Final queue dominates the summed residuals.
            let last = trace.last().unwrap();
            for i in 0..c.len() {
                let q = num(&last[&format!("q{i}")]);
                let sum: f64 = trace.iter().map(|r| c.residuals(&row(r, "x"))[i]).sum();
                assert!(q >= sum - 1e-9);
            }
            if kind == "sigmoidal" {
                let alpha: isize = run["alpha"].parse().unwrap();
                let gamma_alpha = if alpha < 0 { vec![0.0; d] } else { row(&trace[alpha as usize], "gamma") };
                let poly = inst.mixture_polytope();
                let g = fw_gap(inst, &poly, &gamma_alpha).unwrap();
                assert!((g - num(&run["fw_gap"])).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn other_algorithms_run() {
    let dir = tempfile::tempdir().unwrap();
    for (inst, algo) in [
        ("gen:convex", "dpp"),
        ("gen:convex", "pdgrad"),
        ("gen:sigmoidal", "two_phase"),
        ("gen:cycle", "distributed"),
    ] {
        let out = dir.path().join(algo);
        let o = pdfw(&[
            "run",
            "--instance",
            inst,
            "--algo",
            algo,
            "--horizons",
            "100,400",
            "--seeds",
            "3",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{algo}: {}", String::from_utf8_lossy(&o.stderr));
        let rows = read_csv(&out.join("summary.csv"));
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r["algorithm"] == algo));
    }
    let runs = read_csv(&dir.path().join("distributed").join("runs.csv"));
    assert!(runs.iter().all(|r| num(&r["consensus_residual"]) >= 0.0));
    let runs = read_csv(&dir.path().join("two_phase").join("runs.csv"));
    assert!(runs.iter().all(|r| num(&r["tracking_error"]) >= 0.0));
}

#[test]
fn gap_query() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("i.toml");
    fs::write(
        &inst,
        r#"
version = 1
name = "segment"
dim = 1

[[states]]
probability = 1.0
set = { kind = "finite_vertices", vertices = [[0.0], [1.0]] }

[objective]
kind = "quadratic"
target = [0.3]
weight = 1.0

[constraints]
rows = [[1.0]]
rhs = [0.5]
"#,
    )
    .unwrap();
    let o = pdfw(&["gap", "--instance", inst.to_str().unwrap(), "--point", "1.0"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let gap: f64 = text.lines().find_map(|l| l.strip_prefix("fw_gap = ")).unwrap().parse().unwrap();
    assert!((gap - 1.4).abs() < 1e-12);
    let o = pdfw(&["gap", "--instance", inst.to_str().unwrap(), "--point", "-0.5"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let dist: f64 = text.lines().find_map(|l| l.strip_prefix("dist = ")).unwrap().parse().unwrap();
    assert!((dist - 0.5).abs() < 1e-9);
}

#[test]
fn verify_exit_codes() {
    let o = pdfw(&["verify", "identities"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("PASS identities"));
    let o = pdfw(&["verify", "oracles", "--horizons", "10,5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn declared_certificates_are_checked() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("c.toml");
    assert_eq!(code(&pdfw(&["gen", "--kind", "convex", "--out", inst.to_str().unwrap()])), 0);
    let text = fs::read_to_string(&inst).unwrap();
    let mut spec = instance_file::read_spec(&inst).unwrap();
    let margin = spec.certificates.slater_margin.unwrap();
    spec.certificates.slater_margin = Some(margin + 0.1);
    instance_file::write_spec(&inst, &spec).unwrap();
    let out = dir.path().join("out");
    let o = pdfw(&["run", "--instance", inst.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("certificate"));
    assert!(text.contains("version = 1"));
}
