use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn rydyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rydyn")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Runs with a config file written from `ini`, output into `out`.
fn run_with(out: &Path, ini: &str, args: &[&str]) -> Output {
    let cfg = write(out, "input.ini", ini);
    let mut all = args.to_vec();
    all.extend(["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    rydyn(&all)
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn read(path: &Path) -> Csv {
        let text = std::fs::read_to_string(path).unwrap();
        let mut lines = text.lines().filter(|l| !l.starts_with('#'));
        let header = lines.next().unwrap().split(',').map(String::from).collect();
        let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
        Csv { header, rows }
    }

    fn column(&self, name: &str) -> Vec<f64> {
        let i = self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[i].parse().unwrap()).collect()
    }
}

fn report_value(path: &Path, section: &str, key: &str) -> String {
    let ini = ini::Ini::load_from_file(path).unwrap();
    ini.get_from(Some(section), key)
        .unwrap_or_else(|| panic!("{key} missing from [{section}]"))
        .to_string()
}

fn report_num(path: &Path, section: &str, key: &str) -> f64 {
    report_value(path, section, key).parse().unwrap()
}

const SMALL_CASCADE: &str = "[cascade]\nn_half_width = 2\nl_max = 3\nconverge_window = false\n";

#[test]
fn unknown_key_exits_2_and_names_it() {
    let d = TempDir::new().unwrap();
    let o = run_with(d.path(), "[probe]\npoints = 11\nr3_maximum = 5\n", &["probe-scan"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("r3_maximum"), "{}", stderr(&o));
}

#[test]
fn bad_value_exits_2() {
    let d = TempDir::new().unwrap();
    let o = run_with(d.path(), "[dark]\nfraction = 0.5\n", &["probe-scan"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("fraction"));
    assert_eq!(code(&rydyn(&["scan", "--jobs", "x"])), 2);
}

#[test]
fn io_failures_exit_3() {
    let d = TempDir::new().unwrap();
    let missing = d.path().join("absent.ini");
    assert_eq!(code(&rydyn(&["scan", "--config", missing.to_str().unwrap()])), 3);
    let file = write(d.path(), "plain", "");
    let under_file = file.join("sub");
    assert_eq!(code(&rydyn(&["scan", "--out", under_file.to_str().unwrap()])), 3);
}

#[test]
fn solver_failure_exits_4() {
    let d = TempDir::new().unwrap();
    let ini = format!("{SMALL_CASCADE}pump = 1e30\n");
    let o = run_with(d.path(), &ini, &["cascade"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(stderr(&o).contains("solver"));
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(code(&rydyn(&["--help"])), 0);
    assert_eq!(code(&rydyn(&["--version"])), 0);
    assert_eq!(code(&rydyn(&["frobnicate"])), 2);
}

#[test]
fn csv_carries_version_and_seed() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&rydyn(&["scan", "--seed", "17", "--out", d.path().to_str().unwrap()])), 0);
    let text = std::fs::read_to_string(d.path().join("scan.csv")).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# rydyn ") && first.ends_with("seed=17"), "{first}");
}

#[test]
fn same_seed_gives_identical_files() {
    let (a, b, c) = (TempDir::new().unwrap(), TempDir::new().unwrap(), TempDir::new().unwrap());
    for (dir, seed) in [(&a, "5"), (&b, "5"), (&c, "6")] {
        let out = dir.path().to_str().unwrap();
        assert_eq!(code(&rydyn(&["synth", "--seed", seed, "--out", out])), 0);
        assert_eq!(code(&rydyn(&["scan", "--seed", seed, "--out", out])), 0);
    }
    for name in ["synth_loss.csv", "synth_counts.csv", "scan.csv"] {
        let read = |d: &TempDir| std::fs::read(d.path().join(name)).unwrap();
        assert_eq!(read(&a), read(&b), "{name}");
    }
    let loss = |d: &TempDir| std::fs::read(d.path().join("synth_loss.csv")).unwrap();
    assert_ne!(loss(&a), loss(&c));
}

#[test]
fn report_reruns_to_the_same_output() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let o = run_with(a.path(), "[dark]\nfraction = 0.2\n[probe]\npoints = 9\nspacing = linear\n", &["probe-scan", "--seed", "3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = a.path().join("probe_scan_report.ini");
    let o = rydyn(&["probe-scan", "--config", report.to_str().unwrap(), "--out", b.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let read = |d: &TempDir| std::fs::read(d.path().join("probe_scan.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn zero_amplitude_scan_is_all_zero() {
    let d = TempDir::new().unwrap();
    let o = run_with(d.path(), "[excitation]\nr2_peak = auto\nrabi_lower = 0\npoints = 21\n", &["scan"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t = Csv::read(&d.path().join("scan.csv"));
    for col in ["r2_per_s", "loss_rate_per_s", "counts_per_s"] {
        assert!(t.column(col).iter().all(|v| *v == 0.0), "{col}");
    }
}

#[test]
fn scan_peaks_on_resonance() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&rydyn(&["scan", "--out", d.path().to_str().unwrap()])), 0);
    let t = Csv::read(&d.path().join("scan.csv"));
    let (det, loss) = (t.column("detuning_hz"), t.column("loss_rate_per_s"));
    let peak = (0..loss.len()).max_by(|i, j| loss[*i].total_cmp(&loss[*j])).unwrap();
    assert_eq!(det[peak], 0.0);
    let report = d.path().join("scan_report.ini");
    assert_eq!(report_num(&report, "result", "peak_loss_rate_per_s"), loss[peak]);
}

#[test]
fn dark_fraction_leaves_a_loss_tail() {
    let d = TempDir::new().unwrap();
    let o = run_with(d.path(), "[dark]\nfraction = 0.25\n", &["probe-scan", "--plot"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t = Csv::read(&d.path().join("probe_scan.csv"));
    let (with, without) = (t.column("loss_per_s"), t.column("loss_no_dark_per_s"));
    assert!(with.last().unwrap() > without.last().unwrap());
    assert_eq!(t.column("counts_per_s")[0], 0.0);
    let report = d.path().join("probe_scan_report.ini");
    assert!(report_num(&report, "result", "loss_asymptote_per_s") > 1e-3);
    assert!(report_num(&report, "result", "loss_no_dark_asymptote_per_s").abs() < 1e-6);
    assert!(d.path().join("probe_scan_loss.svg").exists());
}

#[test]
fn count_knee_sits_at_decay_plus_transfer() {
    let d = TempDir::new().unwrap();
    let o = run_with(d.path(), "[rates]\ngamma_s = 0\n[probe]\nr3_max = 1e8\npoints = 4001\nspacing = linear\n", &["probe-scan"]);
    assert_eq!(code(&o), 0);
    let t = Csv::read(&d.path().join("probe_scan.csv"));
    let (r3, counts) = (t.column("r3_per_s"), t.column("counts_per_s"));
    // without trap loss N_g is fixed and counts ~ R3 / (A_r + gamma + R3)
    let last = r3.len() - 1;
    let k = 4.1e4 + 1.3e5;
    let saturated = counts[last] * (k + r3[last]) / r3[last];
    let half = (0..r3.len()).find(|&i| counts[i] >= saturated / 2.0).unwrap();
    assert!((r3[half] - k).abs() <= 2.0 * (r3[1] - r3[0]), "{} vs {k}", r3[half]);
}

fn fit(dir: &Path, dataset: &str, extra: &[&str]) -> Output {
    let path = dir.join(dataset);
    let mut args = vec!["fit", "--dataset", path.to_str().unwrap(), "--out", dir.to_str().unwrap()];
    args.extend(extra);
    rydyn(&args)
}

#[test]
fn noiseless_synth_fits_back_exactly() {
    let d = TempDir::new().unwrap();
    let o = run_with(d.path(), "[synth]\nnoise = none\ngamma = 9e4\ngamma_s = 400\n", &["synth"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for (file, second) in [("synth_loss.csv", Some(400.0)), ("synth_counts.csv", None)] {
        let o = fit(d.path(), file, &[]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let r = d.path().join("fit_report.ini");
        assert!((report_num(&r, "result", "gamma") / 9e4 - 1.0).abs() < 1e-6);
        if let Some(g) = second {
            assert!((report_num(&r, "result", "gamma_s") / g - 1.0).abs() < 1e-6);
        }
        assert_eq!(report_value(&r, "result", "converged"), "true");
        assert!(report_value(&r, "result", "warnings").contains("unit weights"));
        assert!(d.path().join("fit_residuals.csv").exists());
    }
}

#[test]
fn paired_noisy_fits_agree() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&rydyn(&["synth", "--seed", "11", "--out", d.path().to_str().unwrap()])), 0);
    let mut gammas = Vec::new();
    for file in ["synth_loss.csv", "synth_counts.csv"] {
        assert_eq!(code(&fit(d.path(), file, &[])), 0);
        let r = d.path().join("fit_report.ini");
        gammas.push((report_num(&r, "result", "gamma"), report_num(&r, "result", "gamma_std_error")));
        assert_eq!(report_value(&r, "result", "unit_weights"), "false");
    }
    let (a, b) = (gammas[0], gammas[1]);
    assert!((a.0 - b.0).abs() <= 2.0 * (a.1 + b.1), "{a:?} {b:?}");
    assert!((a.0 / 1.3e5 - 1.0).abs() < 0.15);
}

#[test]
fn missing_sigma_column_warns() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&rydyn(&["synth", "--out", d.path().to_str().unwrap()])), 0);
    let full = std::fs::read_to_string(d.path().join("synth_loss.csv")).unwrap();
    let stripped: String = full
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.rsplit_once(',').unwrap().0.to_string() + "\n")
        .collect();
    write(d.path(), "bare.csv", &stripped);
    std::fs::copy(d.path().join("synth_loss.csv.ini"), d.path().join("bare.csv.ini")).unwrap();
    let o = fit(d.path(), "bare.csv", &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = d.path().join("fit_report.ini");
    assert_eq!(report_value(&r, "result", "unit_weights"), "true");
    assert!(report_value(&r, "result", "warnings").contains("unit weights"));
}

#[test]
fn malformed_dataset_names_the_line() {
    let d = TempDir::new().unwrap();
    assert_eq!(code(&rydyn(&["synth", "--out", d.path().to_str().unwrap()])), 0);
    let text = std::fs::read_to_string(d.path().join("synth_loss.csv")).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[6] = "2.5e4,not-a-number,0.1";
    write(d.path(), "broken.csv", &(lines.join("\n") + "\n"));
    std::fs::copy(d.path().join("synth_loss.csv.ini"), d.path().join("broken.csv.ini")).unwrap();
    let o = fit(d.path(), "broken.csv", &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 7"), "{}", stderr(&o));
}

#[test]
fn dataset_without_sidecar_is_an_io_error() {
    let d = TempDir::new().unwrap();
    write(d.path(), "lonely.csv", "r3_per_s,observable\n0,1\n");
    assert_eq!(code(&fit(d.path(), "lonely.csv", &[])), 3);
    assert_eq!(code(&fit(d.path(), "absent.csv", &[])), 3);
    assert_eq!(code(&fit(d.path(), "lonely.csv", &["--mode", "sideways"])), 2);
}

#[test]
fn cascade_reports_decomposition() {
    let d = TempDir::new().unwrap();
    let o = run_with(d.path(), SMALL_CASCADE, &["cascade", "--plot"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = d.path().join("cascade_report.ini");
    let total = report_num(&r, "result", "gamma_per_s");
    let parts: f64 = ["gamma_superradiant_per_s", "gamma_black_body_per_s", "gamma_spontaneous_escape_per_s"]
        .iter()
        .map(|k| report_num(&r, "result", k))
        .sum();
    assert!((parts / total - 1.0).abs() < 1e-12);
    assert_eq!(report_value(&r, "result.reference", "citation"), "ref:transfer-comparison");
    let t = Csv::read(&d.path().join("cascade.csv"));
    assert_eq!(t.column("time_s")[0], 0.0);
    assert!(d.path().join("cascade.svg").exists());
}

#[test]
fn zero_pump_cascade_is_empty() {
    let d = TempDir::new().unwrap();
    let o = run_with(d.path(), &format!("{SMALL_CASCADE}pump = 0\n"), &["cascade"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t = Csv::read(&d.path().join("cascade_steady.csv"));
    assert!(t.column("population").iter().all(|v| *v == 0.0));
}

#[test]
fn tables_embed_reference_constants() {
    let d = TempDir::new().unwrap();
    let o = run_with(d.path(), SMALL_CASCADE, &["tables", "--jobs", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let ion = Csv::read(&d.path().join("table_ionization.csv"));
    assert_eq!(ion.column("gamma_bbi_reference_per_s"), vec![322.0, 720.0, 457.0, 265.0]);
    assert_eq!(ion.column("gamma_s_calculated_reference_per_s"), vec![212.0, 470.0, 329.0, 77.0]);
    assert!(ion.column("gamma_bbi_ratio").iter().all(|r| *r == 1.0));
    let tr = Csv::read(&d.path().join("table_transfer.csv"));
    assert_eq!(tr.column("gamma_measured_reference_per_s")[3], 5.0e5);
    assert_eq!(tr.column("gamma_calculated_reference_per_s"), vec![1.7e5, 2.4e5, 1.2e5, 2.2e5]);
    for (name, tag) in [
        ("table_rates.csv", "ref:transfer-summary"),
        ("table_transfer.csv", "ref:transfer-comparison"),
        ("table_ionization.csv", "ref:ionization-comparison"),
    ] {
        let t = Csv::read(&d.path().join(name));
        let i = t.header.iter().position(|h| h == "citation").unwrap();
        assert!(t.rows.iter().all(|r| r[i] == tag), "{name}");
    }
}

#[test]
fn tables_do_not_depend_on_thread_count() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for (dir, jobs) in [(&a, "1"), (&b, "4")] {
        assert_eq!(code(&run_with(dir.path(), SMALL_CASCADE, &["tables", "--jobs", jobs])), 0);
    }
    for name in ["table_rates.csv", "table_transfer.csv", "table_ionization.csv", "table_estimates.csv"] {
        let read = |d: &TempDir| std::fs::read(d.path().join(name)).unwrap();
        assert_eq!(read(&a), read(&b), "{name}");
    }
}
