//! Configuration round trips, unit audit and the command-line binary.

use std::path::Path;
use std::process::Command as Process;

use optocool::cli_io::units::{
    energy_to_internal, frequency_to_internal, internal_to_energy, internal_to_frequency,
};
use optocool::cli_io::{execute, parse_config, render, Command, RunSpec};
use optocool::sweep::{DesignInputs, EnergyConvention};

const TABLE1: &str = "\
# reference device
[run]
command = design
[cavity]
gamma = 3 MHz
[model]
kind = josephson
delta = -30 kHz
ej = 31.32 μeV
phi0 = 0.06
[mechanics]
omega_m = 302 kHz
gamma_m = 0.5 Hz
g0 = 2.1 kHz
nbar_t = 2778
";

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_optocool"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn table1_units_resolve_to_gamma_units() {
    let spec = parse_config(TABLE1).unwrap();
    let m = spec.mech.unwrap();
    assert_eq!(m.omega_m, 302e3 / 3e6);
    assert_eq!(m.g0, 2.1e3 / 3e6);
    assert_eq!(m.gamma_m, 0.5 / 3e6);
    assert_eq!(spec.model.unwrap().delta(), -0.01);
}

#[test]
fn unit_audit_round_trip() {
    let d = DesignInputs::reference_device();
    let g = d.gamma_hz;
    for f in [d.omega_m_hz, d.gamma_m_hz, d.g0_hz, d.delta_hz, d.gamma_hz] {
        let back = internal_to_frequency(frequency_to_internal(f, g), g);
        assert!((back - f).abs() <= 1e-12 * f.abs(), "{f} -> {back}");
    }
    for conv in [EnergyConvention::HGamma, EnergyConvention::HbarGamma] {
        let back = internal_to_energy(energy_to_internal(d.ej_ev, g, conv), g, conv);
        assert!((back - d.ej_ev).abs() <= 1e-12 * d.ej_ev);
    }
}

#[test]
fn configs_round_trip_for_every_command() {
    let extra = "\
[spectrum]
omega_min = -2
omega_max = 2
points = 81
method = transform
[sweep]
axis1 = ej:0:1000:11
axis2 = omega_m:0.05:5:4:log
outputs = n, gamma_opt, nbar_min
[optimize]
delta_min = -0.5
delta_max = -0.001
[design]
drive = margin
margin = 0.97
reference = resonance
detuning = optimize
delta_min = -200 kHz
delta_max = -3 kHz
[figure]
id = 4c
points = 9
drives = -10, 10
";
    for cmd in [
        "fixed-points",
        "spectrum",
        "damping",
        "phonons",
        "sweep",
        "optimize",
        "design",
        "figure",
    ] {
        let text = format!(
            "{}{extra}",
            TABLE1.replace("command = design", &format!("command = {cmd}"))
        );
        let spec = parse_config(&text).unwrap();
        let again = parse_config(&spec.to_config()).unwrap();
        assert_eq!(again, spec, "{cmd}");
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<RunSpec>(&json).unwrap(), spec);
    }
}

#[test]
fn json_meta_echoes_the_run() {
    let mut spec = parse_config(TABLE1).unwrap();
    spec.command = Command::FixedPoints;
    spec.format = optocool::cli_io::OutputFormat::Json;
    let table = execute(&spec).unwrap();
    let text = render(&table, &spec);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let run: RunSpec = serde_json::from_value(v["meta"]["run"].clone()).unwrap();
    assert_eq!(run, spec);
    assert_eq!(v["columns"].as_array().unwrap().len(), table.columns.len());
    assert_eq!(render(&execute(&spec).unwrap(), &spec), text);
}

#[test]
fn binary_design_and_figure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "t1.cfg", TABLE1);
    let out = dir.path().join("design.csv");
    let status = bin()
        .args(["design", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("delta_over_gamma,ej_over_hgamma,"));

    let run = || {
        bin()
            .args(["figure", "1b", "--set", "figure.points=6"])
            .output()
            .unwrap()
    };
    let a = run();
    assert!(a.status.success());
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    assert!(text.starts_with("ej_over_hgamma,delta_over_gamma,branch,A0,theta0,n,status\n"));
    assert_eq!(run().stdout, a.stdout);
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let no_phi0 = write(dir.path(), "bad.cfg", &TABLE1.replace("phi0 = 0.06\n", ""));
    let out = bin().args(["design", "--config"]).arg(&no_phi0).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("model.phi0"));

    let bad_line = write(dir.path(), "syntax.cfg", "[model]\nkind josephson\n");
    let out = bin()
        .args(["fixed-points", "--config"])
        .arg(&bad_line)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let cfg = write(dir.path(), "t1.cfg", TABLE1);
    let out = bin()
        .args(["spectrum", "--config"])
        .arg(&cfg)
        .args(["--set", "spectrum.method=transform", "--set", "spectrum.points=7"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid too coarse"));
}
