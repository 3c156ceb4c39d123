use std::path::Path;
use std::process::{Command, Output};

fn apme(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_apme"));
    cmd.args(args);
    match threads {
        Some(n) => cmd.env("APME_THREADS", n),
        None => cmd.env_remove("APME_THREADS"),
    };
    cmd.output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(format!("{name}.cfg"));
    std::fs::write(&path, format!("name = {name}\noutput_dir = out/{name}\n{body}")).unwrap();
    path.to_string_lossy().into_owned()
}

const EVOLVE: &str = "\
seed = 7
[params]
m = 2, 3
[grid]
half_width = 2, 1.5
cells = 40, 30
[initial]
data = plateau 1 1 0.5
[experiment]
kind = evolve
t_end = 0.5
checkpoints = 0.25, 0.5
";

#[test]
fn info_exit_codes() {
    let ok = apme(&["info", "2", "3"], None);
    assert_eq!(code(&ok), 0);
    let table = String::from_utf8_lossy(&ok.stdout);
    assert!(table.contains("alpha"), "{table}");
    assert_eq!(code(&apme(&["info", "0.9", "2"], None)), 1);
    assert_eq!(code(&apme(&["info", "1.5", "4"], None)), 1);
}

#[test]
fn hypothesis_violation_in_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad", &EVOLVE.replace("m = 2, 3", "m = 0.9, 2"));
    let o = apme(&["run", &cfg], None);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("H1"), "{err}");
    assert!(!dir.path().join("out/bad").exists());
}

#[test]
fn parse_error_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "typo", &EVOLVE.replace("t_end = 0.5", "t_end = later"));
    let o = apme(&["run", &cfg], None);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("experiment.t_end"));
    assert_eq!(code(&apme(&["run", "/nonexistent/x.cfg"], None)), 1);
}

#[test]
fn verify_config_passes() {
    let dir = tempfile::tempdir().unwrap();
    let body = "\
seed = 11
[params]
m = 2, 2
[grid]
cells = 24, 24
[experiment]
kind = verify
cases = 8
";
    let cfg = write_config(dir.path(), "verify", body);
    let o = apme(&["run", &cfg], None);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{stdout}");
    for check in apme::cli::verify::ALL_CHECKS {
        assert!(stdout.contains(&format!("PASS {check}")), "{stdout}");
    }
    let out = dir.path().join("out/verify");
    assert!(out.join("verify.csv").is_file());
    assert!(out.join("manifest.json").is_file());
}

#[test]
fn profile_config_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let body = "\
[params]
m = 2, 3
[grid]
half_width = 3, 2
cells = 48, 48
[experiment]
kind = profile
mass = 1
";
    let cfg = write_config(dir.path(), "profile", body);
    let o = apme(&["run", &cfg], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let out = dir.path().join("out/profile");
    let field = apme::io::read_field(&out.join("profile.csv")).unwrap();
    assert_eq!(field.grid().dim(), 2);
    let p: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("profile.json")).unwrap()).unwrap();
    assert!(p["residual"].as_f64().unwrap() < p["tol"].as_f64().unwrap(), "{p}");
    assert_eq!(p["N"], 2);
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["experiment"], "profile");
    assert!(m["version"].as_str().unwrap().starts_with("apme"));
    assert!(m["config_text"].as_str().unwrap().contains("kind = profile"));
    assert!(out.join("profile_history.gp").is_file());
}

#[test]
fn profile_subcommand_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    let o = apme(
        &["profile", "2", "2", "--cells", "48", "--half-width", "2.5", "--out", out.to_str().unwrap()],
        None,
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("profile.csv").is_file());
    assert!(out.join("profile.json").is_file());
}

#[test]
fn reruns_are_bit_identical_across_thread_caps() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_config(dir.path(), "a", EVOLVE);
    let b = write_config(dir.path(), "b", EVOLVE);
    assert_eq!(code(&apme(&["run", &a], None)), 0);
    assert_eq!(code(&apme(&["run", &b], Some("1"))), 0);
    let names: Vec<_> = std::fs::read_dir(dir.path().join("out/a"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .filter(|n| n.to_string_lossy().ends_with(".csv"))
        .collect();
    assert!(names.len() >= 4, "{names:?}");
    for n in names {
        let x = std::fs::read(dir.path().join("out/a").join(&n)).unwrap();
        let y = std::fs::read(dir.path().join("out/b").join(&n)).unwrap();
        assert!(x == y, "{n:?} differs");
    }
    let manifest = std::fs::read_to_string(dir.path().join("out/a/manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 7"));
}

#[test]
fn bad_thread_cap_is_an_error() {
    let o = apme(&["info", "2", "2"], Some("zero"));
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("APME_THREADS"));
    assert_eq!(code(&apme(&["info", "2", "2"], Some("0"))), 1);
    assert_eq!(code(&apme(&["info", "2", "2"], Some("2"))), 0);
}

#[test]
fn sample_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut kinds = Vec::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let (cfg, _) = apme::cli::ExperimentConfig::load(&path)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        kinds.push(cfg.experiment.kind());
    }
    for kind in ["evolve", "profile", "verify", "asymptotics"] {
        assert!(kinds.contains(&kind), "{kinds:?}");
    }
}
