use std::path::Path;
use std::process::{Command, Output};

fn udn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_udn-rate")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn parse(csv: &[u8]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(csv);
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(str::to_string).collect()).collect();
    (header, rows)
}

#[test]
fn coverage_csv_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "kind = \"coverage_vs_gamma\"\n[grid]\nstart = -10\nstop = 30\nstep = 5\ndb = true\nbetas = [3.0, 4.0]\n[sim]\nn_bs_target = 200\nn_realizations = 500\nseed = 3\n",
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = udn(&["coverage", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    let (header, rows) = parse(&a);
    assert_eq!(
        header,
        ["beta", "gamma_db", "gamma", "pcov_exact", "pcov_approx", "pcov_mc", "pcov_mc_stderr"]
    );
    assert_eq!(rows.len(), 18);
}

#[test]
fn raw_samples_do_not_depend_on_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.toml",
        "kind = \"peak_rate_vs_ratio\"\n[params]\nlambda_ue = 2.54e-6\n[grid]\nbetas = [3.0, 4.0]\n[sim]\nn_bs_target = 150\nn_realizations = 300\n",
    );
    let one = udn(&["simulate", "--config", &cfg, "--jobs", "1", "--seed", "11"]);
    let four = udn(&["simulate", "--config", &cfg, "--jobs", "4", "--seed", "11"]);
    let other = udn(&["simulate", "--config", &cfg, "--jobs", "4", "--seed", "12"]);
    assert!(one.status.success(), "{}", stderr(&one));
    assert_eq!(one.stdout, four.stdout);
    assert_ne!(one.stdout, other.stdout);
    let (header, rows) = parse(&one.stdout);
    assert_eq!(header, ["realization_id", "beta", "sir", "n_users", "n_active_bs"]);
    assert_eq!(rows.len(), 600);
    assert!(rows.iter().all(|r| r[3].parse::<u32>().unwrap() >= 1));
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "u.toml", "kind = \"rate_vs_beta\"\n[params]\nbeta = 4\nlambda = 1e-6\n");
    let o = udn(&["rate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("`lambda`") && e.contains("line 4"), "{e}");
}

#[test]
fn beta_two_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "b.toml", "kind = \"mgf_profile\"\n[params]\nbeta = 2.0\n");
    let o = udn(&["mgf", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("params.beta") && e.contains("2 < beta <= 5"), "{e}");
}

#[test]
fn misc_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let rate = write(dir.path(), "r.toml", "kind = \"rate_vs_beta\"\n");
    let o = udn(&["coverage", "--config", &rate]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`kind`"));
    let o = udn(&["rate", "--jobs", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let v = write(dir.path(), "v.toml", "kind = \"validate\"\n[sim]\nseed = 1\n");
    let o = udn(&["validate", "--config", &v]);
    assert_eq!(o.status.code(), Some(2));
    let o = udn(&["rate", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn too_few_realizations_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "l.toml", "kind = \"actual_rate_vs_ratio\"\n[grid]\nvalues = [2.0]\nbetas = [4.0]\n[sim]\nn_bs_target = 60\nn_realizations = 50\n");
    let o = udn(&["load-curves", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("insufficient samples"));
}

#[test]
fn mgf_defaults_to_stdout() {
    let o = udn(&["mgf"]);
    assert!(o.status.success());
    let (header, rows) = parse(&o.stdout);
    assert_eq!(header[..3], ["beta", "x", "s"]);
    assert_eq!(rows.len(), 6 * 201);
}

#[test]
fn actual_rate_series_tracks_model() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "f7.toml",
        "kind = \"actual_rate_vs_ratio\"\n[grid]\nvalues = [4.34]\nbetas = [4.0, 5.0]\n[sim]\nn_bs_target = 2000\nn_realizations = 3000\nseed = 21\n",
    );
    let o = udn(&["load-curves", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = parse(&o.stdout);
    let at = |name: &str| header.iter().position(|h| h == name).unwrap();
    for r in rows {
        let model: f64 = r[at("rate_actual")].parse().unwrap();
        let mc: f64 = r[at("rate_actual_mc")].parse().unwrap();
        let se: f64 = r[at("rate_actual_mc_stderr")].parse().unwrap();
        assert!((mc - model).abs() <= 3.0 * se, "beta {}: {mc}±{se} vs {model}", r[0]);
    }
}
