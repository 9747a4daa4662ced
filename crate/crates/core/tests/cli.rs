//! End-to-end tests of the `bsq` command-line tool: exit codes, file
//! outputs, environment overrides and determinism.

use std::path::Path;
use std::process::Command;

fn bsq() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bsq"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path
}

const SMALL_RUN: &str = r#"
seed = 5

[grid]
nx = 32
ny = 32
lx = 25.132741228718345
ly = 25.132741228718345

[solver]
dt = 0.01
t_end = 0.1
diagnostics_stride = 5

[initial]
kind = "gaussian"
amplitude = 0.1
width = 1.5
"#;

#[test]
fn check_subcommand_accepts_valid_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_RUN);
    let out = bsq().args(["check", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("configuration ok"), "{text}");
}

#[test]
fn config_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    // Unknown key.
    let cfg = write_config(dir.path(), "mystery = true\n");
    let out = bsq().args(["check", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Ill-posed model parameters.
    let cfg = write_config(
        dir.path(),
        "[model]\na = 1.0\nb = -1.0\nc = 1.0\nd = 0.0\nepsilon = 0.1\n",
    );
    let out = bsq().args(["check", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Missing file is an I/O failure.
    let out = bsq()
        .args(["check", "--config", "/nonexistent/nope.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn simulate_writes_outputs_and_respects_env_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_RUN);
    let out_dir = dir.path().join("out");
    let out = bsq()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["diagnostics.csv", "final.bsq", "summary.toml"] {
        assert!(out_dir.join(f).exists(), "missing {f}");
    }
    let summary = std::fs::read_to_string(out_dir.join("summary.toml")).unwrap();
    assert!(summary.contains("seed = 5"), "{summary}");

    // Environment seed override is recorded; an explicit flag beats it.
    let out_env = dir.path().join("out_env");
    let st = bsq()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_env)
        .env("BSQ_SEED", "9")
        .output()
        .unwrap();
    assert!(st.status.success());
    let summary = std::fs::read_to_string(out_env.join("summary.toml")).unwrap();
    assert!(summary.contains("seed = 9"), "{summary}");

    let out_flag = dir.path().join("out_flag");
    let st = bsq()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_flag)
        .arg("--seed")
        .arg("11")
        .env("BSQ_SEED", "9")
        .output()
        .unwrap();
    assert!(st.status.success());
    let summary = std::fs::read_to_string(out_flag.join("summary.toml")).unwrap();
    assert!(summary.contains("seed = 11"), "{summary}");
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_RUN);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let st = bsq()
            .args(["simulate", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .output()
            .unwrap();
        assert!(st.status.success());
    }
    for f in ["diagnostics.csv", "final.bsq", "summary.toml"] {
        let x = std::fs::read(a.join(f)).unwrap();
        let y = std::fs::read(b.join(f)).unwrap();
        assert_eq!(x, y, "{f} differs between identical runs");
    }
}

#[test]
fn lifespan_smoke_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(
            "{SMALL_RUN}\n[lifespan]\nepsilons = [0.4, 0.2, 0.1]\nhorizon_factor = 0.2\n"
        ),
    );
    let out_dir = dir.path().join("out");
    let out = bsq()
        .args(["lifespan", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .args(["--jobs", "2"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("lifespan.csv").exists());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("lifespan status"), "{text}");
}

#[test]
fn estimates_smoke_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[grid]
nx = 32
ny = 32
lx = 25.132741228718345
ly = 25.132741228718345

[model]
epsilon = 0.5

[initial]
kind = "gaussian"
amplitude = 1.0
width = 1.0
"#,
    );
    let out_dir = dir.path().join("out");
    let out = bsq()
        .args(["estimates", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("summary.toml").exists());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("reports"), "{text}");
}
