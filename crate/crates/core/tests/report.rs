use icnr_core::radar::{axis_gains, render_radar_svg, RadarChartSpec};
use icnr_core::report::{to_csv, to_json, CSV_HEADER};
use icnr_core::{
    emit_report, run_experiment, IntegrationLevel, Metric, OutputFormat, ScenarioConfig,
};

fn small() -> ScenarioConfig {
    ScenarioConfig {
        vehicle_count: 60,
        ..ScenarioConfig::default()
    }
}

#[test]
fn csv_has_one_row_per_level_and_metric() {
    let r = run_experiment(&IntegrationLevel::ALL, &small(), 4, 1).unwrap();
    let csv = to_csv(&r);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    assert_eq!(lines.count(), 21);
    assert!(csv.ends_with('\n'));
}

#[test]
fn json_values_equal_csv_values() {
    let r = run_experiment(&IntegrationLevel::ALL, &small(), 5, 2).unwrap();
    let json: serde_json::Value = serde_json::from_str(&to_json(&r)).unwrap();
    assert_eq!(json["trials"], 5);
    assert_eq!(json["master_seed"], 2);
    assert_eq!(json["config_fingerprint"].as_str().unwrap().len(), 64);
    for line in to_csv(&r).lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let entry = &json["levels"][f[0]][f[1]];
        for (k, text) in ["mean", "stderr", "ci_low", "ci_high"].iter().zip(&f[2..6]) {
            if *text == "NA" {
                assert!(entry[*k].is_null());
            } else {
                assert_eq!(
                    entry[*k].as_f64().unwrap(),
                    text.parse::<f64>().unwrap(),
                    "{line} {k}"
                );
            }
        }
        assert_eq!(
            entry["samples"].as_u64().unwrap(),
            f[6].parse::<u64>().unwrap()
        );
    }
}

#[test]
fn emitted_files_are_byte_identical() {
    let r = run_experiment(&IntegrationLevel::ALL, &small(), 3, 3).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let pa = emit_report(&r, OutputFormat::All, a.path()).unwrap();
    let pb = emit_report(&r, OutputFormat::All, b.path()).unwrap();
    assert_eq!(pa.len(), 3);
    for (x, y) in pa.iter().zip(&pb) {
        let bx = std::fs::read(x).unwrap();
        assert_eq!(bx, std::fs::read(y).unwrap());
        assert_eq!(bx.last(), Some(&b'\n'));
    }
}

#[test]
fn radar_chart_reflects_integration_gains() {
    let r = run_experiment(&IntegrationLevel::ALL, &small(), 3, 4).unwrap();
    let spec = RadarChartSpec::default();
    let gains = axis_gains(&r, &spec).unwrap();
    assert!(gains[0].1.iter().all(|&g| g == 1.0));
    for (_, g) in &gains[1..] {
        for (k, &x) in g.iter().enumerate() {
            let n = spec.normalized(x);
            assert!(n > 0.0 && n <= 1.0, "axis {k}");
        }
    }
    let svg = render_radar_svg(&r, &spec).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("data-level=").count(), 3);
    assert_eq!(svg.matches("<line ").count(), 6);
    assert_eq!(spec.axes.len(), 6);
    assert!(!spec.axes.contains(&Metric::NavAvailability));
}
