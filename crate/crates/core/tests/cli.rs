use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn gcme(args: &[&str], config: Option<&Path>, out: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gcme"));
    cmd.args(args).arg("--out").arg(out);
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn check_reports_schema_and_passes_on_flat_input() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.ini", "[grid]\nn = 10\n[scenario]\ngenerator = pure-gauge(x=0.2:0.1:0, y=0:0.3:0.1, t=0.1:0:0.2)\nseed = 3\n");
    let out = dir.path().join("out");
    let o = gcme(&["check"], Some(&cfg), &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["schemaVersion"], 1);
    assert_eq!(r["command"], "check");
    assert_eq!(r["passed"], true);
    assert_eq!(r["residuals"]["grid"]["dims"], 3);
    for label in ["13a", "13b", "13c"] {
        assert!(r["residuals"][label]["interiorMax"].as_f64().unwrap() < 1e-12);
    }
    let meta: Value = serde_json::from_str(&fs::read_to_string(out.join("run-metadata.json")).unwrap()).unwrap();
    assert!(meta["timestampUnix"].as_u64().unwrap() > 0);
    assert!(r.get("timestampUnix").is_none());
}

#[test]
fn check_in_one_plus_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.ini", "[grid]\ndims = 2\nn = 12\n[scenario]\ngenerator = random\nseed = 5\n");
    let out = dir.path().join("out");
    assert_eq!(gcme(&["check"], Some(&cfg), &out).status.code(), Some(0));
    let r = report(&out);
    for label in ["7", "8a", "8b", "8c"] {
        assert!(r["residuals"][label]["max"].as_f64().unwrap() > 0.0, "{label}");
    }
}

#[test]
fn fd_check_uses_h_squared_bound() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.ini",
        "[grid]\nn = 17\n[scenario]\ngenerator = pure-gauge(x=0.6:-0.2:0.4, y=0.1:0.5:-0.3, t=-0.4:0.3:0.7)\n[run]\nderivatives = fd\n",
    );
    let out = dir.path().join("out");
    assert_eq!(gcme(&["check"], Some(&cfg), &out).status.code(), Some(0));
    let r = report(&out);
    let flat = r["checks"].as_array().unwrap().iter().find(|c| c["name"].as_str().unwrap().starts_with("flat")).unwrap();
    assert!((flat["tolerance"].as_f64().unwrap() - 10.0 / 256.0).abs() < 1e-15);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    for (i, text) in ["[grid]\nbogus = 1\n", "[scenario]\ngenerator = spiral\n", "[run]\nplane = xx\n"].iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("bad{i}.ini"), text);
        assert_eq!(gcme(&["check"], Some(&cfg), &out).status.code(), Some(2), "{text}");
    }
    assert_eq!(gcme(&["check"], Some(&dir.path().join("missing.ini")), &out).status.code(), Some(2));
    assert_eq!(gcme(&["lax", "--lambda", "0,1"], None, &out).status.code(), Some(2));
}

#[test]
fn calibrate_then_embed_sdym_with_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cal");
    let cfg = write_config(dir.path(), "c.ini", "[grid]\nn = 10\n[scenario]\nseed = 9\n");
    assert_eq!(gcme(&["calibrate"], Some(&cfg), &out).status.code(), Some(0));
    let conv: Value = serde_json::from_str(&fs::read_to_string(out.join("convention.json")).unwrap()).unwrap();
    assert_eq!(conv["schemaVersion"], 1);
    assert_eq!(conv["provenance"]["source"], "calibration");

    let cfg = write_config(
        dir.path(),
        "s.ini",
        "[grid]\nn = 10\n[scenario]\ngenerator = random\nseed = 4\n[run]\nconvention = cal/convention.json\nrepresentation = su2\n",
    );
    let run = dir.path().join("sdym");
    assert_eq!(gcme(&["embed-sdym"], Some(&cfg), &run).status.code(), Some(0));
    assert_eq!(report(&run)["convention"]["provenance"]["source"], "calibration");

    // flip one SDYM sign in the saved file
    let text = fs::read_to_string(out.join("convention.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["sdymMap"]["alphaSign"] = Value::from("plus");
    fs::write(out.join("convention.json"), serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(gcme(&["embed-sdym"], Some(&cfg), &run).status.code(), Some(3));
}

#[test]
fn transport_flags_non_flat_only_as_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.ini", "[grid]\nn = 9\n[scenario]\ngenerator = random\nseed = 2\n[run]\nplane = yt\ncorner = 2, 2, 2\n");
    let out = dir.path().join("out");
    assert_eq!(gcme(&["transport", "--no-reproject"], Some(&cfg), &out).status.code(), Some(0));
    let r = report(&out);
    assert!(r["residuals"]["summary"]["plaquetteDefect"].as_f64().unwrap() > 1e-6);
    assert!(r["checks"].as_array().unwrap().is_empty());
}

#[test]
fn reconstruct_and_gen_write_exports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.ini", "[grid]\ndims = 2\nn = 65\n[scenario]\ngenerator = constants(k=1, tau=0.5)\n[run]\nsqrt_e = 2\n");
    let out = dir.path().join("out");
    assert_eq!(gcme(&["reconstruct"], Some(&cfg), &out).status.code(), Some(0));
    let csv = fs::read_to_string(out.join("curves.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 65 * 65);
    let obj = fs::read_to_string(out.join("curves.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 65 * 65);
    assert_eq!(gcme(&["gen"], Some(&cfg), &out).status.code(), Some(0));
    assert_eq!(fs::read_to_string(out.join("field.csv")).unwrap().lines().count(), 1 + 65 * 65);
}
