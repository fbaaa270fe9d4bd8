use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use membrane_cavity_cli::report::RunReport;
use membrane_cavity_cli::table::Table;
use tempfile::TempDir;

const MEMBRANE: &str = "\
membrane.radius_m = 7.5e-4
membrane.thickness_m = 1e-7
membrane.density_kg_m3 = 3200
membrane.stress_pa = 1e9
thermal.temperature_k = 300
";

const CAVITY: &str = "\
slab.n_real = 2.021
slab.n_imag = 1.97e-6
slab.thickness_m = 97e-9
slab.roughness_m = 287e-12
cavity.length_m = 9.03e-2
cavity.wavelength_m = 1064e-9
cavity.empty_finesse = 53518
";

struct Sandbox {
    dir: TempDir,
}

impl Sandbox {
    fn new() -> Self {
        Sandbox {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn mcav(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcav"))
        .args(args)
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(out: &Output) -> RunReport {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad report ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

/// The error line: `error[<code>:<kind>] <text>`, exactly one line.
fn error_line(out: &Output) -> String {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1, "stderr: {text}");
    let code = out.status.code().unwrap();
    assert!(
        lines[0].starts_with(&format!("error[{code}:")),
        "{}",
        lines[0]
    );
    lines[0].to_string()
}

fn csv_body(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn modes_table_starts_with_the_fundamental() {
    let sb = Sandbox::new();
    let cfg = sb.file("m.cfg", MEMBRANE);
    let out_path = sb.path("modes.csv");
    let out = mcav(&["--config", s(&cfg), "--out", s(&out_path), "modes"]);
    assert!(out.status.success());
    let r = report(&out);
    assert_eq!(r.outputs["f0"].unit, "Hz");
    let t = Table::read(&out_path).unwrap();
    assert_eq!(t.len(), 12);
    let alpha = t.column("alpha_mn").unwrap();
    let f = t.column("f_hz").unwrap();
    assert_eq!(t.index_column("m").unwrap()[0], 0);
    assert_eq!(t.index_column("n").unwrap()[0], 1);
    assert!((alpha[0] - 2.40483).abs() < 1e-5);
    assert!((f[0] / 285.2e3 - 1.0).abs() < 1e-3, "{}", f[0]);
    assert!(f.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn modes_with_no_radial_index_is_an_empty_table() {
    let sb = Sandbox::new();
    let cfg = sb.file("m.cfg", MEMBRANE);
    let out = mcav(&["--config", s(&cfg), "modes", "--max-n", "0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body, vec!["m,n,alpha_mn,f_hz"]);
}

#[test]
fn missing_density_names_the_key() {
    let sb = Sandbox::new();
    let cfg = sb.file(
        "m.cfg",
        &MEMBRANE.replace("membrane.density_kg_m3 = 3200\n", ""),
    );
    let out = mcav(&["--config", s(&cfg), "modes"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_line(&out).contains("membrane.density_kg_m3"));
}

#[test]
fn config_errors_point_at_the_line() {
    let sb = Sandbox::new();
    let cfg = sb.file("m.cfg", &format!("{MEMBRANE}membrane.stress_pa 1e9\n"));
    let out = mcav(&["--config", s(&cfg), "modes"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_line(&out).contains("m.cfg:6"));
}

#[test]
fn usage_errors_are_single_lines() {
    let out = mcav(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_line(&out).starts_with("error[2:usage]"));
    let out = mcav(&["scan", "--z-min", "0"]);
    assert_eq!(out.status.code(), Some(2));
    error_line(&out);
    assert!(mcav(&["--help"]).status.success());
}

#[test]
fn effmass_point_ratios_and_gaussian_columns() {
    let sb = Sandbox::new();
    let cfg = sb.file("m.cfg", MEMBRANE);
    let point = sb.path("p.csv");
    let gauss = sb.path("g.csv");
    assert!(mcav(&["--config", s(&cfg), "--out", s(&point), "effmass"])
        .status
        .success());
    let out = mcav(&[
        "--config",
        s(&cfg),
        "--out",
        s(&gauss),
        "effmass",
        "--w",
        "1.5e-4",
    ]);
    assert!(out.status.success());
    let p = Table::read(&point).unwrap();
    assert!(p.optional_column("m_gauss_kg").unwrap().is_none());
    let ratios = p.column("ratio_point").unwrap();
    for (r, printed) in ratios.iter().zip([0.269, 0.116, 0.074, 0.054, 0.043]) {
        assert!((r - printed).abs() < 1e-3, "{r}");
    }
    let g = Table::read(&gauss).unwrap();
    assert_eq!(g.len(), 5);
    let mp = g.column("m_point_kg").unwrap();
    let mg = g.column("m_gauss_kg").unwrap();
    assert!(mp.iter().zip(&mg).all(|(p, g)| g > p));
}

#[test]
fn zero_thickness_slab_scans_flat_at_the_empty_finesse() {
    let sb = Sandbox::new();
    let cfg = sb.file(
        "c.cfg",
        &CAVITY
            .replace("slab.thickness_m = 97e-9", "slab.thickness_m = 0")
            .replace("slab.n_imag = 1.97e-6", "slab.n_imag = 0")
            .replace("slab.roughness_m = 287e-12", "slab.roughness_m = 0"),
    );
    let out_path = sb.path("flat.csv");
    let out = mcav(&[
        "--config",
        s(&cfg),
        "--out",
        s(&out_path),
        "scan",
        "--z-min",
        "-2e-6",
        "--z-max",
        "2e-6",
        "--z-steps",
        "9",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let t = Table::read(&out_path).unwrap();
    for f in t.column("finesse").unwrap() {
        assert!((f / 53518.0 - 1.0).abs() < 1e-6, "{f}");
    }
    for shift in t.column("resonance_shift_hz").unwrap() {
        assert!(shift.abs() < 1e-3, "{shift}");
    }
}

#[test]
fn single_step_scan_has_one_row() {
    let sb = Sandbox::new();
    let cfg = sb.file("c.cfg", CAVITY);
    let out = mcav(&[
        "--config",
        s(&cfg),
        "scan",
        "--z-min",
        "1e-7",
        "--z-max",
        "1e-7",
        "--z-steps",
        "1",
    ]);
    assert!(out.status.success());
    let t = Table::parse(std::str::from_utf8(&out.stdout).unwrap(), "stdout").unwrap();
    assert_eq!(t.len(), 1);
    assert_eq!(t.column("z_m").unwrap(), vec![1e-7]);
}

#[test]
fn scan_outside_the_cavity_is_an_input_error() {
    let sb = Sandbox::new();
    let cfg = sb.file("c.cfg", CAVITY);
    let out = mcav(&[
        "--config",
        s(&cfg),
        "scan",
        "--z-min",
        "0",
        "--z-max",
        "0.1",
        "--z-steps",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_line(&out).contains("outside the cavity"));
}

#[test]
fn empty_csv_is_a_usage_error() {
    let sb = Sandbox::new();
    let cfg = sb.file("c.cfg", CAVITY);
    for (name, text) in [
        ("empty.csv", ""),
        ("header.csv", "# nothing\nz_m,finesse\n"),
    ] {
        let data = sb.file(name, text);
        let out = mcav(&["--config", s(&cfg), "finesse-fit", s(&data)]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        error_line(&out);
    }
}

#[test]
fn scan_then_fit_recovers_the_losses() {
    let sb = Sandbox::new();
    let cfg = sb.file("c.cfg", CAVITY);
    let scan = sb.path("scan.csv");
    let out = mcav(&[
        "--config",
        s(&cfg),
        "--out",
        s(&scan),
        "scan",
        "--z-min",
        "0",
        "--z-max",
        "5.2535e-7",
        "--z-steps",
        "40",
    ]);
    assert!(out.status.success());
    let out = mcav(&["--config", s(&cfg), "finesse-fit", s(&scan)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(&out);
    assert!((r.outputs["n_imag"].value / 1.97e-6 - 1.0).abs() < 1e-3);
    assert!((r.outputs["roughness"].value / 287e-12 - 1.0).abs() < 1e-3);
    assert_eq!(r.outputs["roughness"].unit, "m");
    assert_eq!(r.notes["weighted"], "false");
}

#[test]
fn sigma_column_makes_the_fit_weighted() {
    let sb = Sandbox::new();
    let cfg = sb.file("c.cfg", CAVITY);
    let scan = sb.path("noisy.csv");
    let out = mcav(&[
        "--config",
        s(&cfg),
        "--out",
        s(&scan),
        "--seed",
        "7",
        "scan",
        "--z-min",
        "0",
        "--z-max",
        "5.2535e-7",
        "--z-steps",
        "40",
        "--noise",
        "0.01",
    ]);
    assert!(out.status.success());
    let out = mcav(&["--config", s(&cfg), "finesse-fit", s(&scan)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(&out);
    assert_eq!(r.notes["weighted"], "true");
    let n = &r.outputs["n_imag"];
    assert!((n.value - 1.97e-6).abs() < 4.0 * n.sigma.unwrap());
}

#[test]
fn csv_bodies_are_byte_identical_across_runs() {
    let sb = Sandbox::new();
    let cfg = sb.file("c.cfg", &format!("{MEMBRANE}{CAVITY}"));
    let runs: [&[&str]; 3] = [
        &[
            "scan",
            "--z-min",
            "-1e-7",
            "--z-max",
            "4e-7",
            "--z-steps",
            "6",
            "--noise",
            "0.01",
        ],
        &["modes", "--max-m", "4"],
        &[
            "psd",
            "--modes",
            "1,2",
            "--q",
            "1e5",
            "--grid",
            "2e5:7e5:500",
        ],
    ];
    for args in runs {
        let a = sb.path("a.csv");
        let b = sb.path("b.csv");
        for p in [&a, &b] {
            let mut full = vec!["--config", s(&cfg), "--seed", "11", "--out", s(p)];
            full.extend_from_slice(args);
            assert!(mcav(&full).status.success(), "{args:?}");
        }
        assert_eq!(
            std::fs::read(&a).unwrap(),
            std::fs::read(&b).unwrap(),
            "{args:?}"
        );
        assert!(!csv_body(&a).is_empty());
    }
}

fn trace(sb: &Sandbox, name: &str, tau: f64, rising: bool) -> PathBuf {
    let mut text = String::from("# synthetic ringdown\ntime_s,amplitude_au\n");
    for i in 0..200 {
        let t = 5.0 * tau * i as f64 / 199.0;
        let a = if rising {
            1.0 - (-t / tau).exp()
        } else {
            (-t / tau).exp()
        };
        text.push_str(&format!("{t:e},{a:e}\n"));
    }
    sb.file(name, &text)
}

#[test]
fn optical_and_mechanical_ringdowns() {
    let sb = Sandbox::new();
    let cfg = sb.file("c.cfg", CAVITY);
    let optical = trace(&sb, "o.csv", 5.131e-6, false);
    let out = mcav(&[
        "--config",
        s(&cfg),
        "ringdown",
        s(&optical),
        "--mode",
        "optical",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let f = report(&out).outputs["finesse"].value;
    assert!((f / 53518.0 - 1.0).abs() < 1e-3, "{f}");

    let mechanical = trace(&sb, "m.csv", 1.0, false);
    let out = mcav(&[
        "ringdown",
        s(&mechanical),
        "--mode",
        "mechanical",
        "--frequency",
        "285.2e3",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let q = report(&out).outputs["q"].value;
    assert!((q / 8.96e5 - 1.0).abs() < 1e-3, "{q}");

    let out = mcav(&["ringdown", s(&mechanical), "--mode", "mechanical"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_line(&out).contains("ringdown.frequency_hz"));
}

#[test]
fn rising_ringdown_fails() {
    let sb = Sandbox::new();
    let cfg = sb.file("c.cfg", CAVITY);
    let data = trace(&sb, "r.csv", 1e-6, true);
    let out = mcav(&[
        "--config",
        s(&cfg),
        "ringdown",
        s(&data),
        "--mode",
        "optical",
    ]);
    assert!(!out.status.success());
    assert_eq!(out.status.code(), Some(3));
    error_line(&out);
}

#[test]
fn psd_areas_match_equipartition() {
    let sb = Sandbox::new();
    let cfg = sb.file("m.cfg", MEMBRANE);
    let spectrum = sb.path("psd.csv");
    let out = mcav(&[
        "--config",
        s(&cfg),
        "--out",
        s(&spectrum),
        "psd",
        "--modes",
        "1,2",
        "--q",
        "1e3",
        "--grid",
        "1e5:9e5:40001",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(&out);
    for key in ["01", "02"] {
        let band = r.outputs[&format!("band_area_{key}")].value;
        let area = r.outputs[&format!("thermal_area_{key}")].value;
        assert!((band / area - 1.0).abs() < 1e-2, "{key}: {band} vs {area}");
    }
    let t = Table::read(&spectrum).unwrap();
    assert_eq!(t.len(), 40001);
}

#[test]
fn psd_without_modes_is_the_floor() {
    let sb = Sandbox::new();
    let cfg = sb.file("m.cfg", &format!("{MEMBRANE}psd.floor_m2_per_hz = 1e-30\n"));
    let out = mcav(&[
        "--config",
        s(&cfg),
        "psd",
        "--modes",
        "",
        "--grid",
        "1e5:2e5:11",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let t = Table::parse(std::str::from_utf8(&out.stdout).unwrap(), "stdout").unwrap();
    assert!(t
        .column("psd_m2_per_hz")
        .unwrap()
        .iter()
        .all(|&v| v == 1e-30));
}

#[test]
fn psd_rejects_a_decreasing_grid() {
    let sb = Sandbox::new();
    let cfg = sb.file("m.cfg", MEMBRANE);
    let out = mcav(&["--config", s(&cfg), "psd", "--grid", "5e5:1e5:10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_line(&out).starts_with("error[2:usage]"));
}

#[test]
fn fit_f0_reads_measured_modes() {
    let sb = Sandbox::new();
    let mut text = String::from("m,n,f_hz\n");
    for (m, n, alpha) in [
        (0, 1, 2.404825557695773),
        (1, 1, 3.8317059702075125),
        (0, 2, 5.520078110286312),
        (2, 1, 5.135622301840683),
    ] {
        text.push_str(&format!(
            "{m},{n},{:e}\n",
            114e3 * alpha * (1.0 + 0.05 / alpha)
        ));
    }
    let data = sb.file("f.csv", &text);
    let out = mcav(&["fit-f0", s(&data)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(&out);
    assert!((r.outputs["f0"].value / 114e3 - 1.0).abs() < 1e-9);
    assert_eq!(r.outputs["f0"].unit, "Hz");
}
