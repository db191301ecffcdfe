use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn simadc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simadc")).args(args).output().unwrap()
}

fn low() -> String {
    configs().join("low_barrier.cfg").display().to_string()
}

fn high() -> String {
    configs().join("high_barrier.cfg").display().to_string()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn sha256_of(path: &Path) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(fs::read(path).unwrap()).iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn adc_run_writes_curve_metrics_manifest_and_script() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("adc");
    let o = simadc(&["adc", "--config", &low(), "--bits", "4", "--ts", "2e-7", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let curve = read(&out, "transfer_curve.csv");
    let mut lines = curve.lines();
    assert_eq!(lines.next(), Some("v_in,mean_mx,c_out,code"));
    assert_eq!(lines.count(), 17);
    let metrics = read(&out, "adc_metrics.csv");
    assert_eq!(metrics.lines().next(), Some("slope,intercept,nrmsd_percent,n_points,t_s,f_clk,seed"));
    assert!(metrics.lines().nth(1).unwrap().ends_with(",17,2e-7,1e9,42"));

    let script = read(&out, "plot_transfer.py");
    assert!(script.contains("\"transfer_curve.csv\""));

    // Every other file in the directory is listed with its digest.
    let manifest = read(&out, "manifest.txt");
    assert!(manifest.contains("seed = 42") && manifest.contains("bits = 4"));
    assert!(manifest.contains("wall_time_s = ") && manifest.contains("version = "));
    for entry in fs::read_dir(&out).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        if name != "manifest.txt" {
            let line = format!("{}  {name}", sha256_of(&out.join(&name)));
            assert!(manifest.contains(&line), "missing {line}");
        }
    }
}

#[test]
fn csvs_identical_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |workers: &str| {
        let out = tmp.path().join(format!("w{workers}"));
        let o = simadc(&["adc", "--config", &low(), "--ts", "1e-7", "--bits", "3", "--workers", workers, "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        out
    };
    let (a, b) = (run("1"), run("3"));
    for name in ["transfer_curve.csv", "adc_metrics.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let seeded = tmp.path().join("seed7");
    simadc(&["adc", "--config", &low(), "--ts", "1e-7", "--bits", "3", "--seed", "7", "--out", seeded.to_str().unwrap()]);
    assert_ne!(read(&a, "transfer_curve.csv"), read(&seeded, "transfer_curve.csv"));
}

#[test]
fn unknown_key_fails_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "ms = 600.3e3\n# fine\nsurface_tension = 3\n").unwrap();
    let out = tmp.path().join("never");
    let o = simadc(&["adc", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("surface_tension") && err.contains("line 3"), "{err}");
    assert!(!out.exists());
}

#[test]
fn exit_codes_by_class() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let out = out.to_str().unwrap();
    // Bad override value.
    assert_eq!(simadc(&["adc", "--config", &low(), "--set", "bits=many", "--out", out]).status.code(), Some(1));
    assert_eq!(simadc(&["adc", "--config", &low(), "--duration", "1e-6", "--out", out]).status.code(), Some(1));
    // Pulse experiment on the 1 kT device.
    assert_eq!(simadc(&["psw", "--config", &low(), "--set", "n_trials=2", "--out", out]).status.code(), Some(2));
    // Missing config file.
    assert_eq!(simadc(&["adc", "--config", "/nonexistent/x.cfg", "--out", out]).status.code(), Some(3));
    assert!(!Path::new(out).exists());
}

#[test]
fn trace_writes_one_csv_per_voltage() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("t");
    let o = simadc(&["trace", "--config", &low(), "--duration", "20e-9", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    for v in ["-0.800", "+0.000", "+0.800"] {
        let t = read(&out, &format!("trace_v{v}.csv"));
        assert_eq!(t.lines().next(), Some("t_s,m_x,m_y,m_z"));
        assert_eq!(t.lines().count(), 22);
        let last: Vec<f64> = t.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert!((last[0] - 20e-9).abs() < 1e-18);
        assert!(((last[1] * last[1] + last[2] * last[2] + last[3] * last[3]).sqrt() - 1.0).abs() < 1e-6);
    }
    assert!(out.join("plot_traces.py").exists());
}

#[test]
fn psw_writes_switching_curve_and_sigmoid_script() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("p");
    let o = simadc(&["psw", "--config", &high(), "--set", "n_trials=16", "--voltages", "0,2.5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(&out, "switching.csv");
    let rows: Vec<Vec<f64>> = csv.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(csv.lines().next(), Some("v_pulse,p_switch,ci_lo,ci_hi,n_trials"));
    // Wilson bound for 0 of 16: z²/(n + z²).
    let z2 = 1.959_963_984_540_054f64.powi(2);
    let edge = z2 / (16.0 + z2);
    assert_eq!(&rows[0][..3], &[0.0, 0.0, 0.0]);
    assert!((rows[0][3] - edge).abs() < 1e-12);
    assert_eq!(&rows[1][..2], &[2.5, 1.0]);
    assert!((rows[1][2] - (1.0 - edge)).abs() < 1e-12);
    assert_eq!((rows[1][3], rows[1][4]), (1.0, 16.0));
    assert!(read(&out, "plot_switching.py").contains("errorbar"));
}

#[test]
fn report_lists_both_states() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("r");
    let o = simadc(&["report", "--config", &low(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let rep = read(&out, "device_report.csv");
    let rows: Vec<&str> = rep.lines().collect();
    assert_eq!(rows[0], "state,resistance_ohm,node_voltage_v,current_a,state_bit");
    assert!(rows[1].starts_with("P,1000000,") && rows[1].ends_with(",0"));
    assert!(rows[2].starts_with("AP,") && rows[2].ends_with(",1"));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.starts_with("quantity,value\n"));
    assert!(stdout.contains("e_b_over_kt,0.997") && stdout.contains("n_z,0.803"));
}

#[test]
fn plots_needs_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let o = simadc(&["plots", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("transfer_curve.csv") && err.contains("switching.csv"), "{err}");

    fs::write(tmp.path().join("sweep.csv"), "v_in,mean_mx,c_out,n_samples\n0,0,0,1\n").unwrap();
    let o = simadc(&["plots", "--out", tmp.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert!(tmp.path().join("plot_sweep.py").exists());
    assert!(!tmp.path().join("plot_transfer.py").exists());
}
