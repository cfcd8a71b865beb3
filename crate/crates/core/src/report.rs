//! Aggregated experiment results and their CSV / JSON forms.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use indexmap::IndexMap;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::radar::{render_radar_svg, RadarChartSpec};
use crate::rng::RngAlgorithm;
use crate::scenario::IntegrationLevel;
use crate::sensing::SensingMetrics;
use crate::simulator::TrialMetrics;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    OutageProbability,
    ErgodicCapacity,
    PositioningError,
    TimingError,
    NavAvailability,
    RangeResolution,
    Aoi,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::OutageProbability,
        Metric::ErgodicCapacity,
        Metric::PositioningError,
        Metric::TimingError,
        Metric::NavAvailability,
        Metric::RangeResolution,
        Metric::Aoi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::OutageProbability => "outage_probability",
            Metric::ErgodicCapacity => "ergodic_capacity_bps",
            Metric::PositioningError => "positioning_error_m",
            Metric::TimingError => "timing_error_s",
            Metric::NavAvailability => "nav_availability",
            Metric::RangeResolution => "range_resolution_m",
            Metric::Aoi => "aoi_s",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            Metric::ErgodicCapacity | Metric::NavAvailability => Direction::Maximize,
            _ => Direction::Minimize,
        }
    }

    /// Closed-form metrics carry no sampling error.
    pub fn is_deterministic(self) -> bool {
        matches!(self, Metric::RangeResolution | Metric::Aoi)
    }

    pub fn of_trial(self, t: &TrialMetrics) -> Option<f64> {
        match self {
            Metric::OutageProbability => Some(t.outage_probability),
            Metric::ErgodicCapacity => Some(t.ergodic_capacity_bps),
            Metric::PositioningError => t.positioning_error_m,
            Metric::TimingError => t.timing_error_s,
            Metric::NavAvailability => Some(t.nav_availability),
            Metric::RangeResolution => Some(t.range_resolution_m),
            Metric::Aoi => Some(t.aoi_s),
        }
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown metric `{s}`"))
    }
}

/// Mean, standard error and 95% interval. Non-finite fields mean the metric
/// had no samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSummary {
    pub samples: u64,
    pub mean: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl MetricSummary {
    pub fn exact(value: f64, samples: u64) -> Self {
        Self {
            samples,
            mean: value,
            stderr: 0.0,
            ci_low: value,
            ci_high: value,
        }
    }

    /// Summary of `values` accumulated in the given order.
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                samples: 0,
                mean: f64::NAN,
                stderr: f64::NAN,
                ci_low: f64::NAN,
                ci_high: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let ss: f64 = values.iter().map(|x| (x - mean) * (x - mean)).sum();
            (ss / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        let half = Z95 * stderr;
        Self {
            samples: n as u64,
            mean,
            stderr,
            ci_low: mean - half,
            ci_high: mean + half,
        }
    }

    pub fn is_available(&self) -> bool {
        self.samples > 0 && self.mean.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub level: IntegrationLevel,
    /// In [`Metric::ALL`] order.
    pub metrics: Vec<(Metric, MetricSummary)>,
}

impl LevelReport {
    pub fn get(&self, metric: Metric) -> &MetricSummary {
        &self
            .metrics
            .iter()
            .find(|(m, _)| *m == metric)
            .expect("every metric is summarized")
            .1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub master_seed: u64,
    pub trials: u64,
    pub rng: RngAlgorithm,
    pub config_fingerprint: String,
    pub levels: Vec<LevelReport>,
}

impl MetricsReport {
    pub fn level(&self, level: IntegrationLevel) -> Option<&LevelReport> {
        self.levels.iter().find(|l| l.level == level)
    }
}

/// Aggregate per-trial results (`[trial][level]`) in trial order.
pub fn summarize(
    levels: &[IntegrationLevel],
    per_trial: &[Vec<TrialMetrics>],
    sensing: &[SensingMetrics],
    master_seed: u64,
    rng: RngAlgorithm,
    config_fingerprint: String,
) -> MetricsReport {
    let trials = per_trial.len() as u64;
    let levels = levels
        .iter()
        .enumerate()
        .map(|(li, &level)| {
            let metrics = Metric::ALL
                .into_iter()
                .map(|m| {
                    let summary = match m {
                        Metric::RangeResolution => {
                            MetricSummary::exact(sensing[li].range_resolution_m, trials)
                        }
                        Metric::Aoi => MetricSummary::exact(sensing[li].aoi_s, trials),
                        _ => {
                            let values: Vec<f64> = per_trial
                                .iter()
                                .filter_map(|t| m.of_trial(&t[li]))
                                .collect();
                            MetricSummary::from_samples(&values)
                        }
                    };
                    (m, summary)
                })
                .collect();
            LevelReport { level, metrics }
        })
        .collect();
    MetricsReport {
        master_seed,
        trials,
        rng,
        config_fingerprint,
        levels,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
    All,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            "all" => Ok(OutputFormat::All),
            other => Err(format!("unknown output format `{other}`")),
        }
    }
}

pub const CSV_FILE: &str = "report.csv";
pub const JSON_FILE: &str = "report.json";
pub const SVG_FILE: &str = "radar.svg";

pub const CSV_HEADER: &str = "level,metric,mean,stderr,ci_low,ci_high,samples";

fn csv_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        "NA".to_string()
    }
}

pub fn to_csv(report: &MetricsReport) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for level in &report.levels {
        for (m, s) in &level.metrics {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                level.level,
                m.name(),
                csv_number(s.mean),
                csv_number(s.stderr),
                csv_number(s.ci_low),
                csv_number(s.ci_high),
                s.samples
            );
        }
    }
    out
}

#[derive(Serialize)]
struct JsonSummary {
    mean: Option<f64>,
    stderr: Option<f64>,
    ci_low: Option<f64>,
    ci_high: Option<f64>,
    samples: u64,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    master_seed: u64,
    trials: u64,
    rng: &'a str,
    config_fingerprint: &'a str,
    levels: IndexMap<&'static str, IndexMap<&'static str, JsonSummary>>,
}

pub fn to_json(report: &MetricsReport) -> String {
    let finite = |x: f64| x.is_finite().then_some(x);
    let levels = report
        .levels
        .iter()
        .map(|l| {
            let metrics = l
                .metrics
                .iter()
                .map(|(m, s)| {
                    (
                        m.name(),
                        JsonSummary {
                            mean: finite(s.mean),
                            stderr: finite(s.stderr),
                            ci_low: finite(s.ci_low),
                            ci_high: finite(s.ci_high),
                            samples: s.samples,
                        },
                    )
                })
                .collect();
            (l.level.as_str(), metrics)
        })
        .collect();
    let doc = JsonReport {
        master_seed: report.master_seed,
        trials: report.trials,
        rng: report.rng.as_str(),
        config_fingerprint: &report.config_fingerprint,
        levels,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Write the requested forms into `out_dir` and return the written paths.
pub fn emit_report(
    report: &MetricsReport,
    format: OutputFormat,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    if matches!(format, OutputFormat::Csv | OutputFormat::All) {
        let p = out_dir.join(CSV_FILE);
        write_file(&p, &to_csv(report))?;
        written.push(p);
    }
    if matches!(format, OutputFormat::Json | OutputFormat::All) {
        let p = out_dir.join(JSON_FILE);
        write_file(&p, &to_json(report))?;
        written.push(p);
    }
    if matches!(format, OutputFormat::Svg | OutputFormat::All) {
        let p = out_dir.join(SVG_FILE);
        emit_radar_svg(report, &RadarChartSpec::default(), &p)?;
        written.push(p);
    }
    Ok(written)
}

pub fn emit_radar_svg(report: &MetricsReport, spec: &RadarChartSpec, path: &Path) -> Result<()> {
    let svg = render_radar_svg(report, spec)?;
    write_file(path, &svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_statistics() {
        let s = MetricSummary::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((s.stderr - sd / 2.0).abs() < 1e-15);
        assert!((s.ci_high - s.mean - 1.96 * s.stderr).abs() < 1e-15);
        assert!((s.mean - s.ci_low - 1.96 * s.stderr).abs() < 1e-15);

        let one = MetricSummary::from_samples(&[0.125]);
        assert_eq!((one.mean, one.stderr, one.samples), (0.125, 0.0, 1));
        assert!(!MetricSummary::from_samples(&[]).is_available());
    }

    #[test]
    fn csv_marks_missing_values() {
        assert_eq!(csv_number(f64::NAN), "NA");
        assert_eq!(csv_number(0.1), "0.1");
        assert_eq!(csv_number(1e-12), "0.000000000001");
        assert_eq!("0.000000000001".parse::<f64>().unwrap(), 1e-12);
    }

    #[test]
    fn metric_names_parse() {
        for m in Metric::ALL {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
        }
    }
}
