use beamtf::beam_model::{BeamParams, ModelKind, OutputKind};
use beamtf::config::{default_config, load_config, parse_config, ConfigError, DEFAULT_CONFIG};
use beamtf::response::Spacing;

const MINIMAL: &str = r#"
[beam]
ell = "190.5 cm"
ell0 = 1.4
rho0 = "2.7 g/cm^3"
A = "225 mm^2"
E = "69000 MPa"
G = "25.5 GPa"
I = "1.6875e-2 cm^4"
m_att = "100 g"
kappa = "7 kN/m"
d = 0.025
"#;

fn kv(k: &str, v: &str) -> (String, String) {
    (k.to_owned(), v.to_owned())
}

#[test]
fn shipped_config_is_the_reference_beam() {
    let cfg = default_config();
    assert_eq!(cfg.params, BeamParams::reference());
    assert_eq!(cfg.model, ModelKind::Timoshenko);
    assert_eq!(cfg.kind, OutputKind::Displacement);
    assert_eq!(cfg.dampings(), vec![0.025]);
    assert_eq!(cfg.compare, None);
    assert_eq!((cfg.nu_min, cfg.nu_max, cfg.points, cfg.spacing), (0.5, 250.0, 2048, Spacing::Linear));
    assert_eq!(cfg.peak_range, (1.0, 50.0));
}

#[test]
fn other_units_and_short_names() {
    let cfg = parse_config(MINIMAL, &[]).unwrap();
    let r = BeamParams::reference();
    let p = cfg.params;
    for (got, want) in [
        (p.ell, r.ell),
        (p.rho0, r.rho0),
        (p.area, r.area),
        (p.youngs, r.youngs),
        (p.inertia, r.inertia),
        (p.mass, r.mass),
        (p.stiffness, r.stiffness),
    ] {
        assert_eq!(got, want);
    }
    assert_eq!(p.k_shear, 5.0 / 6.0);
}

#[test]
fn sensor_defaults_to_attachment() {
    let cfg = parse_config(MINIMAL, &[]).unwrap();
    assert_eq!(cfg.params.ellk, 1.4);
    let cfg = parse_config(MINIMAL, &[kv("beam.ellk", "\"50 cm\"")]).unwrap();
    assert_eq!(cfg.params.ellk, 0.5);
}

#[test]
fn negative_damping_is_named() {
    let err = parse_config(MINIMAL, &[kv("beam.d", "-1")]).unwrap_err();
    match err {
        ConfigError::Validation(v) => {
            assert_eq!(v.len(), 1);
            assert_eq!(v[0].field, "damping");
        }
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn unknown_key_reports_line() {
    let text = format!("{MINIMAL}tension = 3\n");
    match parse_config(&text, &[]).unwrap_err() {
        ConfigError::Parse { line, key, .. } => {
            assert_eq!(line, Some(MINIMAL.lines().count() + 1));
            assert_eq!(key.as_deref(), Some("tension"));
        }
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn wrong_unit_reports_line_and_key() {
    let text = MINIMAL.replace("\"7 kN/m\"", "\"7 GPa\"");
    let err = parse_config(&text, &[]).unwrap_err();
    let line = MINIMAL.lines().position(|l| l.starts_with("kappa")).unwrap() + 1;
    match &err {
        ConfigError::Parse { line: l, key, message } => {
            assert_eq!(*l, Some(line));
            assert_eq!(key.as_deref(), Some("beam.stiffness"));
            assert!(message.contains("stiffness"), "{message}");
        }
        e => panic!("unexpected {e}"),
    }
    assert!(err.to_string().starts_with(&format!("line {line}:")));
}

#[test]
fn missing_value_is_reported() {
    let text = MINIMAL.replace("G = \"25.5 GPa\"\n", "");
    match parse_config(&text, &[]).unwrap_err() {
        ConfigError::Parse { key, .. } => assert_eq!(key.as_deref(), Some("beam.shear_modulus")),
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn syntax_error_has_line() {
    match parse_config("[beam]\nell = = 3\n", &[]).unwrap_err() {
        ConfigError::Parse { line, .. } => assert_eq!(line, Some(2)),
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn overrides_and_comparison_list() {
    let cfg = parse_config(
        DEFAULT_CONFIG,
        &[kv("run.model", "euler"), kv("run.output", "curvature"), kv("compare.damping", "[0.025, 1, \"10 kg/s\"]")],
    )
    .unwrap();
    assert_eq!(cfg.model, ModelKind::EulerBernoulli);
    assert_eq!(cfg.kind, OutputKind::Curvature);
    assert_eq!(cfg.dampings(), vec![0.025, 1.0, 10.0]);
    let err = parse_config(DEFAULT_CONFIG, &[kv("compare.damping", "[]")]).unwrap_err();
    assert!(matches!(err, ConfigError::Validation(_)));
    let err = parse_config(DEFAULT_CONFIG, &[kv("beam.area", "0")]).unwrap_err();
    assert!(matches!(err, ConfigError::Validation(ref v) if v[0].field == "area"));
}

#[test]
fn files_load_and_missing_files_fail() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("beam.toml");
    std::fs::write(&path, MINIMAL).unwrap();
    assert_eq!(load_config(&path, &[]).unwrap(), parse_config(MINIMAL, &[]).unwrap());
    let err = load_config(&dir.path().join("absent.toml"), &[]).unwrap_err();
    assert!(matches!(err, ConfigError::Io { .. }));
}
