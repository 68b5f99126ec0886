use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_transduction"));
    cmd.env_remove("TRANSDUCTION_PRESETS").env("RUST_LOG", "error");
    cmd
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Parses CSV output into (header, rows).
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s}"))
}

fn write_config(dir: &tempfile::TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn scheme_table(kind: &str, from: f64, to: f64, count: usize) -> (Vec<String>, Vec<Vec<String>>) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        &format!(
            "[scheme]\nkind = \"{kind}\"\n[sweep]\nparam = \"cooperativity\"\nfrom = {from:?}\nto = {to:?}\ncount = {count}\nspacing = \"log\"\n"
        ),
    );
    table(&stdout(&run(&["scheme", "-c", cfg.to_str().unwrap()])))
}

#[test]
fn pushpull_fidelity_rises_with_cooperativity() {
    let (h, rows) = scheme_table("pushpull", 1.0, 100.0, 40);
    let f = col(&h, "fidelity");
    let fids: Vec<f64> = rows.iter().map(|r| num(&r[f])).collect();
    assert!(fids.windows(2).all(|w| w[1] >= w[0]), "{fids:?}");
    assert!(fids[39] > 0.999);
}

#[test]
fn amplitude_probability_approaches_half() {
    let (h, rows) = scheme_table("amplitude", 1.0, 1e4, 10);
    let p = col(&h, "probability");
    let last = num(&rows[9][p]);
    assert!((last - 0.5).abs() < 1e-3, "{last}");
    assert!(rows.iter().all(|r| num(&r[p]) <= 0.5));
}

#[test]
fn onoff_at_unit_cooperativity() {
    let (h, rows) = scheme_table("onoff", 1.0, 2.0, 2);
    assert_eq!(num(&rows[0][col(&h, "probability")]), 0.75);
    assert_eq!(num(&rows[0][col(&h, "fidelity")]), 0.75);
}

#[test]
fn rate_rows_for_builtin_presets() {
    let (h, rows) = table(&stdout(&run(&["rate", "--preset", "nv", "--preset", "snv117"])));
    let (tau, rate, fid, prob) =
        (col(&h, "tau_star_s"), col(&h, "rate_star_hz"), col(&h, "fidelity_star"), col(&h, "probability_star"));
    assert_eq!(rows[0][0], "nv");
    assert!((num(&rows[0][tau]) - 26e-6).abs() < 2e-6);
    assert!((num(&rows[0][rate]) / 5.6e3 - 1.0).abs() < 0.03);
    assert!((num(&rows[0][fid]) - 0.97).abs() < 0.005);
    assert!((num(&rows[0][prob]) - 0.20).abs() < 0.01);
    assert_eq!(rows[1][0], "snv117");
    assert!((num(&rows[1][tau]) - 55e-6).abs() < 2e-6);
    assert!((num(&rows[1][rate]) / 2.0e3 - 1.0).abs() < 0.03);
}

#[test]
fn rate_at_fixed_time() {
    let (h, rows) = table(&stdout(&run(&["rate", "--tau-fixed", "107us"])));
    assert_eq!(rows.len(), 9);
    let p = col(&h, "probability");
    let find = |name: &str| num(&rows.iter().find(|r| r[0] == name).unwrap()[p]);
    assert!((find("nv-a") - 0.396).abs() < 0.005);
    assert!((find("siv0-c") - 0.430).abs() < 0.005);
    assert!((find("snv117-a") - 0.171).abs() < 0.005);
}

#[test]
fn rate_sweep_needs_one_preset() {
    let out = run(&["rate", "--sweep"]);
    assert_eq!(out.status.code(), Some(2));
    let (h, rows) = table(&stdout(&run(&["rate", "--sweep", "--preset", "nv"])));
    assert_eq!(h, ["tau_s", "rate_hz", "fidelity", "probability"]);
    assert!(rows.len() > 10);
}

#[test]
fn synthetic_response_recovers_lc() {
    let (h, rows) = table(&stdout(&run(&["circuit", fixture("response.csv").to_str().unwrap()])));
    let l = num(&rows[0][col(&h, "l_ph")]);
    let c = num(&rows[0][col(&h, "c_pf")]);
    assert!((l / 15.48 - 1.0).abs() < 0.01, "L = {l} pH");
    assert!((c / 503.0 - 1.0).abs() < 0.01, "C = {c} pF");
}

#[test]
fn synth_matches_bundled_fixture() {
    let out = stdout(&run(&["circuit", "--synth", "-c", fixture("resonator.toml").to_str().unwrap()]));
    assert_eq!(out, std::fs::read_to_string(fixture("response.csv")).unwrap());
}

#[test]
fn kinetic_inductance_of_niobium() {
    let (h, rows) = table(&stdout(&run(&[
        "circuit", "--kinetic", "--r-sq", "0.49", "--gap-mev", "1.4", "--temperature-k", "0.02",
    ])));
    let lk = num(&rows[0][col(&h, "l_k_ph_per_sq")]);
    assert!((lk / 0.073 - 1.0).abs() < 0.01, "{lk}");
}

#[test]
fn empty_response_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [("empty.csv", ""), ("header.csv", "freq_hz,i_ratio_re,i_ratio_im,s11_re,s11_im\n")] {
        let path = dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        let out = run(&["circuit", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(3));
        assert!(String::from_utf8_lossy(&out.stderr).contains("no samples"));
    }
}

#[test]
fn missing_input_file_is_an_input_error() {
    let out = run(&["circuit", "/nonexistent/response.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn report_passes_and_strict_fails_loudly() {
    let out = run(&["report"]);
    let text = stdout(&out);
    assert!(text.starts_with("provenance,quantity,expected,computed,deviation,tolerance,status\n"));
    assert!(!text.contains("FAIL"));

    let strict = run(&["report", "--strict"]);
    let body = String::from_utf8(strict.stdout).unwrap();
    let failing = body.lines().filter(|l| l.ends_with(",FAIL")).count();
    // Every row is still written; the exit code reflects the failures.
    assert_eq!(body.lines().count(), text.lines().count());
    match failing {
        0 => assert!(strict.status.success()),
        _ => assert_eq!(strict.status.code(), Some(4)),
    }
}

#[test]
fn unknown_config_key_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "[scheme]\nkind = \"onoff\"\ncoperativity = 3.0\n");
    let out = run(&["scheme", "-c", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("coperativity"));
}

#[test]
fn bad_sweep_count_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, "[scheme]\nkind = \"onoff\"\n[sweep]\nparam = \"cooperativity\"\nfrom = 1.0\nto = 2.0\ncount = 0\n");
    let out = run(&["scheme", "-c", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweep.count"));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "[scheme]\nkind = \"pushpull\"\nloss_ratio = 0.1\n[sweep]\nparam = \"cooperativity\"\nfrom = 0.5\nto = 500.0\ncount = 64\nspacing = \"log\"\n",
    );
    let a = run(&["scheme", "-c", cfg.to_str().unwrap()]).stdout;
    let b = run(&["scheme", "-c", cfg.to_str().unwrap()]).stdout;
    assert_eq!(a, b);
    let r1 = run(&["rate"]).stdout;
    let r2 = run(&["rate"]).stdout;
    assert_eq!(r1, r2);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = run(&["rate", "--preset", "nv", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("preset,"));
}

#[test]
fn preset_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("lab.toml"),
        "[[protocol]]\nname = \"lab-nv\"\ncenter = \"nv\"\nc_opt = 12.8\ngamma_over_2pi_hz = 3900.0\nt_reset_s = 2e-5\nt1_transmon_s = 1e-3\n",
    )
    .unwrap();
    let out = bin().env("TRANSDUCTION_PRESETS", dir.path()).args(["rate", "--preset", "lab-nv"]).output().unwrap();
    let (_, rows) = table(&stdout(&out));
    assert_eq!(rows[0][0], "lab-nv");

    let unknown = run(&["rate", "--preset", "lab-nv"]);
    assert_eq!(unknown.status.code(), Some(2));

    std::fs::write(dir.path().join("broken.toml"), "[[protocol]]\nname = 3\n").unwrap();
    let out = bin().env("TRANSDUCTION_PRESETS", dir.path()).args(["rate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lambda_trajectory_and_steady_state() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "[lambda]\ng_rad_s = 1.0\nkappa_rad_s = 1.0\ngamma1_rad_s = 0.1\ngamma2_rad_s = 0.3\nt_final_s = 400.0\n",
    );
    let path = cfg.to_str().unwrap();
    let (h, rows) = table(&stdout(&run(&["lambda", "-c", path])));
    let last = rows.last().unwrap();
    let (_, steady) = table(&stdout(&run(&["lambda", "-c", path, "--steady"])));
    let pg1 = num(&steady[0][0]);
    let pg2 = num(&steady[0][1]);
    assert!((num(&last[col(&h, "rho11")]) - pg1).abs() < 1e-3);
    assert!((num(&last[col(&h, "rho22")]) - pg2).abs() < 1e-3);
    let expect = 4.0 * 0.3 / (1.4 * (4.0 + 0.4));
    assert!((pg2 - expect).abs() < 1e-12, "{pg2} vs {expect}");
}

#[test]
fn dipole_table_and_coupling() {
    let (h, rows) = table(&stdout(&run(&["dipole", "--center", "nv", "--center", "snv117"])));
    let mu = col(&h, "optical_dipole_debye");
    assert!((num(&rows[0][mu]) / 5.1 - 1.0).abs() < 0.02);
    assert!((num(&rows[1][mu]) / 7.3 - 1.0).abs() < 0.02);
    let m = col(&h, "magnetic_dipole");
    assert!((num(&rows[1][m]) / num(&rows[0][m]) - 0.373).abs() < 0.01);
    assert_eq!(rows[0][col(&h, "g_m_over_2pi_hz")], "");

    let (h, rows) = table(&stdout(&run(&["dipole", "--center", "nv", "--delta-i-na", "377", "--distance-nm", "50"])));
    assert!(num(&rows[0][col(&h, "g_m_over_2pi_hz")]) > 0.0);
}

#[test]
fn retrieval_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "[retrieval]\ng_m_over_2pi_hz = 1e4\nt1_transmon_s = 1e-3\nt2_spin_s = 1e-3\n[sweep]\nparam = \"tau_s\"\nfrom = 1e-6\nto = 1e-3\ncount = 30\nspacing = \"log\"\n",
    );
    let (h, rows) = table(&stdout(&run(&["retrieval", "-c", cfg.to_str().unwrap()])));
    let (p, f, k) = (col(&h, "retrieval_probability"), col(&h, "fidelity"), col(&h, "fidelity_kraus"));
    let probs: Vec<f64> = rows.iter().map(|r| num(&r[p])).collect();
    assert!(probs.windows(2).all(|w| w[1] >= w[0]));
    for r in &rows {
        assert!((num(&r[f]) - num(&r[k])).abs() < 1e-9);
    }
}

#[test]
fn mode_from_csv_and_binary_grids() {
    let csv = fixture("gaussian_grid.csv");
    let (h, rows) = table(&stdout(&run(&[
        "mode", "--field-grid", csv.to_str().unwrap(), "--center", "snv117", "--kappa-over-2pi-hz", "1e10",
    ])));
    let v_csv = num(&rows[0][col(&h, "volume_m3")]);
    assert!(v_csv > 0.0);
    assert_eq!(num(&rows[0][col(&h, "u_emitter")]), 1.0);
    assert!(num(&rows[0][col(&h, "cooperativity")]) > 0.0);

    let grid = transduction::io::read_grid_csv(std::fs::File::open(&csv).unwrap(), None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let bin_path = dir.path().join("grid.fgrd");
    transduction::io::write_grid_binary(std::fs::File::create(&bin_path).unwrap(), &grid).unwrap();
    let (h, rows) = table(&stdout(&run(&["mode", "--field-grid", bin_path.to_str().unwrap()])));
    assert_eq!(num(&rows[0][col(&h, "volume_m3")]), v_csv);

    let truncated = dir.path().join("short.fgrd");
    let bytes = std::fs::read(&bin_path).unwrap();
    std::fs::write(&truncated, &bytes[..bytes.len() / 2]).unwrap();
    let out = run(&["mode", "--field-grid", truncated.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn help_lists_config_keys() {
    let out = stdout(&run(&["scheme", "--help"]));
    assert!(out.contains("gamma_over_kappa_c"));
    assert!(out.contains("model_extension"));
}
