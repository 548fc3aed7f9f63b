use std::process::Command;

use manitrans::output::SCHEMA_LINE;
use manitrans::sample::{rng, Instance};
use manitrans::{
    run_isometry, run_timing, run_verify, write_csv, BenchConfig, BenchError, Manifold,
};

fn cfg(m: Manifold, n: usize, d: usize) -> BenchConfig {
    let mut c = BenchConfig::new(m, n, d);
    c.repeats = 1;
    c.num_vectors = 3;
    c
}

fn csv_string<R: serde::Serialize>(rows: &[R]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn config_validation() {
    let mut c = cfg(Manifold::Stiefel, 5, 2);
    c.t_grid = vec![1.0, 1.0];
    assert!(matches!(c.validate(), Err(BenchError::Config(_))));
    c.t_grid = vec![0.5, 1.0];
    c.repeats = 0;
    assert!(c.validate().is_err());
    c.repeats = 1;
    assert!(c.validate().is_ok());
    assert!(cfg(Manifold::Stiefel, 3, 3).validate().is_err());
    let mut f = cfg(Manifold::Flag, 6, 0);
    f.d_list = Some(vec![2, 4]);
    assert!(f.validate().is_err());
    f.d_list = Some(vec![2, 3]);
    assert!(f.validate().is_ok());
    f.alpha = 0.8;
    assert!(f.validate().is_err());
    let mut g = cfg(Manifold::Gl, 3, 0);
    g.beta = 0.0;
    assert_eq!(g.validate().unwrap_err().exit_code(), 2);
}

#[test]
fn verify_examples() {
    let mut st = cfg(Manifold::Stiefel, 8, 3);
    st.alpha = 1.0;
    let mut so = cfg(Manifold::So, 6, 2);
    so.alpha = 0.8;
    let mut gl = cfg(Manifold::Gl, 4, 0);
    gl.beta = 0.7;
    let mut gr = cfg(Manifold::Grassmann, 7, 2);
    gr.alpha = 0.5;
    for mut c in [st, so, gl, gr] {
        c.t_grid = vec![0.6, 1.3];
        let rows = run_verify(&c).unwrap();
        assert_eq!(rows.len(), 2);
        for r in rows {
            assert!(r.pass, "{r:?}");
            assert!(r.oracle_error <= 1e-6);
        }
    }
}

#[test]
fn verify_refuses_large_n() {
    let err = run_verify(&cfg(Manifold::Stiefel, 65, 3)).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("smaller n"));
}

#[test]
fn singleton_grid_gives_one_timing_row() {
    let mut c = cfg(Manifold::Stiefel, 40, 5);
    c.t_grid = vec![0.5];
    let rows = run_timing(&c).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].median_seconds > 0.0);
    assert!(rows[0].residual_check <= 1e-9);
}

#[test]
fn timing_covers_every_manifold() {
    for (m, n, d) in [
        (Manifold::Flag, 12, 3),
        (Manifold::Grassmann, 12, 3),
        (Manifold::So, 8, 3),
        (Manifold::Gl, 5, 0),
    ] {
        let mut c = cfg(m, n, d);
        if m == Manifold::Flag {
            c.d_list = Some(vec![1, 2]);
        }
        c.t_grid = vec![0.5, 2.0];
        let rows = run_timing(&c).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.residual_check <= 1e-9), "{m}");
    }
}

#[test]
fn isometry_at_zero_is_exact() {
    let mut c = cfg(Manifold::Stiefel, 30, 4);
    c.t_grid = vec![0.0];
    c.num_vectors = 20;
    let rows = run_isometry(&c).unwrap();
    assert_eq!(rows[0].max_drift, 0.0);
}

#[test]
fn isometry_small_scale() {
    for (m, alpha) in [
        (Manifold::Stiefel, 1.0),
        (Manifold::Stiefel, 0.3),
        (Manifold::Flag, 0.5),
    ] {
        let mut c = cfg(m, 60, 6);
        if m == Manifold::Flag {
            c.d_list = Some(vec![2, 1, 3]);
        }
        c.alpha = alpha;
        c.num_vectors = 20;
        c.t_grid = vec![0.1, 1.7, 15.0];
        let rows = run_isometry(&c).unwrap();
        assert!(rows.iter().all(|r| r.max_drift <= 1e-9), "{rows:?}");
    }
}

#[test]
fn tangent_lengths_are_integers() {
    let c = cfg(Manifold::Stiefel, 20, 3);
    let mut r = rng(9);
    let inst = Instance::new(&c, &mut r).unwrap();
    for v in inst.tangent_set(&mut r, 20).unwrap() {
        let len = inst.metric(&v, &v).sqrt();
        assert!((len - len.round()).abs() < 1e-9 && (1.0..=60.0).contains(&len.round()));
    }
}

#[test]
fn seeded_output_is_reproducible() {
    let mut c = cfg(Manifold::Stiefel, 50, 4);
    c.t_grid = vec![0.3, 2.0];
    let a = csv_string(&run_isometry(&c).unwrap());
    let b = csv_string(&run_isometry(&c).unwrap());
    assert_eq!(a, b);
    assert!(a.starts_with(&format!(
        "{SCHEMA_LINE}\nmanifold,n,d,alpha,t,max_drift,log10_drift\n"
    )));
    c.seed += 1;
    assert_ne!(a, csv_string(&run_isometry(&c).unwrap()));
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_manitrans"))
}

#[test]
fn binary_exit_codes() {
    let out = bin()
        .args([
            "verify",
            "--manifold",
            "so",
            "--n",
            "6",
            "--d",
            "2",
            "--alpha",
            "0.8",
            "--t-grid",
            "0.5,1.3",
            "--vectors",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(SCHEMA_LINE));
    assert_eq!(text.lines().count(), 4);

    let out = bin()
        .args(["bench", "--manifold", "stiefel", "--n", "4", "--d", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["verify", "--manifold", "stiefel", "--n", "100", "--d", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["bench", "--manifold", "torus", "--n", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn binary_writes_file() {
    let dir = std::env::temp_dir().join(format!("manitrans-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("iso.csv");
    let status = bin()
        .args([
            "isometry",
            "--manifold",
            "flag",
            "--n",
            "30",
            "--d-list",
            "2,3",
            "--t-grid",
            "0.5,3",
            "--vectors",
            "5",
            "--out",
        ])
        .arg(&path)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[2].starts_with("flag,30,5,0.5,0.5,"));
    std::fs::remove_dir_all(&dir).unwrap();
}
