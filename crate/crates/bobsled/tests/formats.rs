use std::path::PathBuf;

use bobsled::config;
use bobsled::glide::{format_glide, parse_glide, GlideFile};
use bobsled::meta::split_header;
use bobsled::params::{format_toml, parse_lateral, LateralParamsFile};
use bobsled::pressure::{format_pressure_table, parse_pressure_table};
use bobsled::provenance::{sha256_hex, Input, Provenance};
use bobsled::schema::{AngleUnit, Schema};
use bobsled::telemetry_csv::{format_telemetry, parse_telemetry};
use bobsled::trace_csv::{format_trace, parse_trace};
use bobsled::Error;
use bobsled_core::aero::AirState;
use bobsled_core::friction::{PressureLookup, TrackRadius};
use bobsled_core::icehouse::{Direction, GlideRun};
use bobsled_core::telemetry::{Channel, RunMeta, TelemetryFrame, TelemetryRun};

fn input(name: &str, text: &str) -> Input {
    Input {
        path: PathBuf::from(name),
        text: text.to_string(),
        sha256: sha256_hex(text.as_bytes()),
    }
}

fn line_of(e: Error) -> u64 {
    match e {
        Error::Parse { line, .. } => line,
        other => panic!("expected a parse error, got {other}"),
    }
}

fn sample_run(n: usize) -> TelemetryRun {
    let frames = (0..n)
        .map(|k| {
            let t = k as f64 * 0.002;
            TelemetryFrame {
                t,
                a_x: -0.04 + 0.1 * (3.0 * t).sin(),
                a_y: 2.0 * (1.7 * t).sin(),
                a_z: 9.81 + 0.3 * t,
                phi_dot: 0.01 * t,
                theta_dot: -0.02,
                psi_dot: 0.1 * (2.0 * t).cos(),
                v: 25.0 + 1.0 / 3.0 * t,
                alpha_sensor: 0.01 * (5.0 * t).sin(),
                delta: 0.004,
                gamma: -0.02 * t,
            }
        })
        .collect();
    let h = (0..n).map(|k| -0.1 * k as f64 / 7.0).collect();
    let meta = RunMeta {
        driver: "D1".into(),
        track: "T1".into(),
        sample_rate: 0.0,
    };
    TelemetryRun::new(frames, Some(h), meta).unwrap()
}

#[test]
fn degrees_are_converted_to_radians() {
    let text = "t,a_x,a_y,a_z,phi_dot,theta_dot,psi_dot,v,alpha,delta,gamma\n\
                0,0,0,9.81,0,0,90,10,1,2,3\n\
                0.01,0,0,9.81,0,0,90,10,1,2,3\n\
                0.02,0,0,9.81,0,0,90,10,1,2,3\n";
    let schema = Schema {
        angle_unit: AngleUnit::Deg,
        ..Schema::default()
    };
    let run = parse_telemetry(&input("deg.csv", text), &schema).unwrap();
    assert_eq!(run.len(), 3);
    let f = run.frames()[1];
    assert!((f.psi_dot - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    assert!((f.alpha_sensor - 1f64.to_radians()).abs() < 1e-15);
    assert!((f.delta - 2f64.to_radians()).abs() < 1e-15);
    assert!((f.gamma - 3f64.to_radians()).abs() < 1e-15);
    assert_eq!(f.v, 10.0);
    assert!(run.altitude().is_none());
}

#[test]
fn decreasing_time_names_the_line() {
    let text = "# driver: x\nt,a_x,a_y,a_z,phi_dot,theta_dot,psi_dot,v,alpha,delta,gamma\n\
                0,0,0,9.81,0,0,0,10,0,0,0\n\
                0.02,0,0,9.81,0,0,0,10,0,0,0\n\
                0.01,0,0,9.81,0,0,0,10,0,0,0\n";
    let e = parse_telemetry(&input("bad.csv", text), &Schema::default()).unwrap_err();
    assert_eq!(e.exit_code(), 2);
    assert_eq!(line_of(e), 5);
}

#[test]
fn unparsable_value_names_the_line() {
    let text = "t,a_x,a_y,a_z,phi_dot,theta_dot,psi_dot,v,alpha,delta,gamma\n\
                0,0,0,9.81,0,0,0,10,0,0,0\n\
                0.01,0,abc,9.81,0,0,0,10,0,0,0\n";
    let e = parse_telemetry(&input("bad.csv", text), &Schema::default()).unwrap_err();
    assert!(e.to_string().contains("abc"), "{e}");
    assert_eq!(line_of(e), 3);
}

#[test]
fn missing_column_is_reported() {
    let text = "t,a_x,a_y,a_z,phi_dot,theta_dot,psi_dot,v,alpha,delta\n0,0,0,9.81,0,0,0,10,0,0\n";
    let e = parse_telemetry(&input("bad.csv", text), &Schema::default()).unwrap_err();
    assert!(e.to_string().contains("gamma"), "{e}");
}

#[test]
fn native_rate_is_kept() {
    let run = sample_run(501);
    let text = format_telemetry(&run, &Schema::default(), None);
    let back = parse_telemetry(&input("r.csv", &text), &Schema::default()).unwrap();
    assert!((back.sample_rate() - 500.0).abs() < 1e-9);
    assert_eq!(back.len(), 501);
}

#[test]
fn radian_round_trip_is_bit_identical() {
    let run = sample_run(200);
    let prov = Provenance::new("test");
    let text = format_telemetry(&run, &Schema::default(), Some(&prov));
    let back = parse_telemetry(&input("r.csv", &text), &Schema::default()).unwrap();
    assert_eq!(back.frames(), run.frames());
    assert_eq!(back.altitude(), run.altitude());
    assert_eq!(back.meta().driver, "D1");
    assert_eq!(back.meta().track, "T1");
    let again = format_telemetry(&back, &Schema::default(), Some(&prov));
    assert_eq!(again, text);
}

#[test]
fn renamed_degree_columns_round_trip() {
    let schema: Schema = serde_json::from_str(
        r#"{"columns": {"t": "time", "v": "speed", "alpha": "slip", "h": "alt"}, "angle_unit": "deg"}"#,
    )
    .unwrap();
    let run = sample_run(50);
    let text = format_telemetry(&run, &schema, None);
    assert!(text.lines().nth(2).unwrap().starts_with("time,"));
    let back = parse_telemetry(&input("r.csv", &text), &schema).unwrap();
    for (a, b) in run.frames().iter().zip(back.frames()) {
        for c in Channel::ALL {
            let (x, y) = (c.get(a), c.get(b));
            assert!(
                (x - y).abs() <= 1e-15 * x.abs().max(1.0),
                "{c:?}: {x} vs {y}"
            );
        }
    }
}

#[test]
fn schema_rejects_unknown_and_duplicate_keys() {
    let unknown = input("s.json", r#"{"columns": {"speed": "v"}}"#);
    assert_eq!(Schema::parse(&unknown).unwrap_err().exit_code(), 1);
    let dup = input("s.json", r#"{"columns": {"v": "x", "a_x": "x"}}"#);
    assert_eq!(Schema::parse(&dup).unwrap_err().exit_code(), 1);
    let typo = input("s.json", r#"{"angle_units": "deg"}"#);
    assert!(Schema::parse(&typo).is_err());
}

#[test]
fn header_lines_carry_line_numbers() {
    let (h, body) = split_header("# a: 1\n# free comment\n# b: two: parts\nx,y\n");
    assert_eq!(h.lines, 3);
    assert_eq!(h.get("a"), Some("1"));
    assert_eq!(h.get("b"), Some("two: parts"));
    assert_eq!(h.entries["b"].1, 3);
    assert_eq!(body, "x,y\n");
}

#[test]
fn pressure_table_round_trip_and_lookup() {
    let table = PressureLookup::new(
        vec![1000.0, 3000.0, 6000.0],
        vec![20.0, 100.0],
        vec![6.0, 10.0, 14.0, 5.0, 9.0, 13.0],
    )
    .unwrap();
    let text = format_pressure_table(&table);
    let back = parse_pressure_table(&input("p.csv", &text)).unwrap();
    assert_eq!(back, table);
    assert_eq!(back.lookup(2000.0, TrackRadius::Flat), 7.0);
    assert_eq!(back.lookup(3000.0, TrackRadius::Finite(60.0)), 9.5);
}

#[test]
fn ragged_pressure_row_is_rejected() {
    let text = "r\\F,1000,2000\n20,5,6\n100,4\n";
    let e = parse_pressure_table(&input("p.csv", text)).unwrap_err();
    assert_eq!(line_of(e), 3);
}

#[test]
fn glide_round_trip() {
    let file = GlideFile {
        run: GlideRun {
            s: vec![0.0, 0.5, 1.25, 2.0],
            v: vec![2.5, 2.45, 2.4, 2.3],
            h: None,
            direction: Some(Direction::Down),
            mass: 100.0,
            air: AirState::ICE_HOUSE,
            cxax: 0.1,
            kappa: Some(0.0),
        },
        specimen: "Alpha 1".into(),
        pressure: Some(7.5),
    };
    let text = format_glide(&file, Some(&Provenance::new("test")));
    assert_eq!(parse_glide(&input("g.csv", &text)).unwrap(), file);
}

#[test]
fn glide_from_time_series() {
    let text = "# mass: 100\n# cxax: 0.1\n# kappa: 0\n# direction: up\nt,v\n0,2\n1,2\n2,2\n";
    let g = parse_glide(&input("g.csv", text)).unwrap();
    assert_eq!(g.run.s, vec![0.0, 2.0, 4.0]);
    assert_eq!(g.run.direction, Some(Direction::Up));
    assert_eq!(g.specimen, "default");
}

#[test]
fn glide_requires_elevation_and_mass() {
    let no_slope = "# mass: 100\n# cxax: 0.1\nt,v\n0,2\n1,2\n";
    assert!(parse_glide(&input("g.csv", no_slope)).is_err());
    let no_mass = "# cxax: 0.1\n# kappa: 0\nt,v\n0,2\n1,2\n";
    assert!(parse_glide(&input("g.csv", no_mass))
        .unwrap_err()
        .to_string()
        .contains("mass"));
    let bad_dir = "# mass: 1\n# cxax: 0.1\n# kappa: 0\n# direction: sideways\nt,v\n0,2\n1,2\n";
    assert_eq!(
        line_of(parse_glide(&input("g.csv", bad_dir)).unwrap_err()),
        4
    );
}

#[test]
fn lateral_params_round_trip_with_full_precision() {
    let mut file = LateralParamsFile::default();
    file.front.mu_zeta_y = 0.1 + 0.2;
    let text = format_toml(&file, &Provenance::new("test"));
    assert_eq!(parse_lateral(&input("l.toml", &text)).unwrap(), file);
}

#[test]
fn invalid_lateral_params_are_config_errors() {
    let text = "[front]\nmu_zeta_y = 2.0\nc_y = 2.5\ne_y = 0.99\nk_y = 1e4\n\
                [rear]\nmu_zeta_y = 2.0\nc_y = 0.1\ne_y = 0.99\nk_y = 1e4\n";
    assert_eq!(
        parse_lateral(&input("l.toml", text))
            .unwrap_err()
            .exit_code(),
        1
    );
}

#[test]
fn trace_round_trip_keeps_validity() {
    use bobsled_core::onetrack::{AxleForceTrace, AxleSample, InvalidReason};
    let base = AxleSample {
        t: 0.0,
        s: 0.0,
        v: 20.0,
        beta: 0.01,
        alpha_f: 0.02,
        alpha_r: -0.01,
        gamma: 0.0,
        delta: 0.003,
        a_y_cog: 3.0,
        a_z_cog: 12.0,
        f_y_ext: 0.0,
        f_x_ext: -40.0,
        f_x_f0: -8.0,
        f_y_f0: 300.0,
        f_z_f0: 2000.0,
        f_y_r: 400.0,
        f_z_r: 2500.0,
        f_x_f: -8.1,
        f_y_f: 299.0,
        f_z_f: 2000.5,
        f_x_r: -10.0,
        invalid: None,
    };
    let trace = AxleForceTrace {
        samples: vec![
            base,
            AxleSample {
                t: 0.01,
                f_y_r: f64::NAN,
                invalid: Some(InvalidReason::RollAcceleration),
                ..base
            },
        ],
    };
    let back = parse_trace(&input("t.csv", &format_trace(&trace, None))).unwrap();
    assert_eq!(back.samples[0], trace.samples[0]);
    assert_eq!(
        back.samples[1].invalid,
        Some(InvalidReason::RollAcceleration)
    );
    assert!(back.samples[1].f_y_r.is_nan());
}

#[test]
fn config_defaults_and_env_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let schema = dir.path().join("schema.json");
    std::fs::write(&schema, r#"{"angle_unit": "deg"}"#).unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "[bob]\nmass = 230\nj_yy = 120\nj_zz = 130\nl_f = 1.3\nl_r = 1.2\ncxax = 0.25\n\
                          [bob.sensor]\nl_x = 0.2\nl_y = 0.0\nl_z = 0.1\n\
                          [processing]\nschema = \"missing.json\"\ncutoff = 15\n",
    )
    .unwrap();

    let err = config::load(Some(&cfg), |_| None).unwrap_err();
    assert_eq!(err.exit_code(), 1);

    let path = schema.display().to_string();
    let loaded = config::load(Some(&cfg), |k| {
        (k == "BOBSLED_SCHEMA").then(|| path.clone())
    })
    .unwrap();
    assert_eq!(loaded.schema.angle_unit, AngleUnit::Deg);
    assert_eq!(loaded.bob.mass, 230.0);
    assert!((loaded.bob.offset.l_s_f - 1.1).abs() < 1e-15);
    assert_eq!(loaded.processing.cutoff, 15.0);
    assert_eq!(loaded.processing.rate, 100.0);
    assert_eq!(loaded.inputs.len(), 2);

    let defaults = config::load(None, |_| None).unwrap();
    assert_eq!(defaults.schema, Schema::default());
}

#[test]
fn config_rejects_out_of_range_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    for body in [
        "[processing]\nrate = -1\n",
        "[processing]\nglide_window = 1.5\n",
        "[longitudinal]\nmu = 2\n",
        "[longitudinal]\nparams = \"x.toml\"\n",
        "[bob]\nmass = 0\nj_yy = 1\nj_zz = 1\nl_f = 1\nl_r = 1\ncxax = 1\n[bob.sensor]\nl_x = 0\nl_y = 0\nl_z = 0\n",
        "[unknown]\nx = 1\n",
    ] {
        std::fs::write(&cfg, body).unwrap();
        let e = config::load(Some(&cfg), |_| None).unwrap_err();
        assert_eq!(e.exit_code(), 1, "{body}: {e}");
    }
}
