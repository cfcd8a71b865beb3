//! Six-axis radar chart of per-level gains over the baseline level.
//!
//! Each spoke plots a gain: `value / baseline` on maximized axes and
//! `baseline / value` on minimized axes, so the baseline level (Traditional
//! when present, otherwise the first level) traces the unit hexagon and
//! improvement always points outward. Gains up to `linear_limit` map
//! linearly to radius; beyond it each decade adds another `linear_limit`
//! of radius, until `max_display` is reached.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::report::{Direction, LevelReport, Metric, MetricsReport};
use crate::scenario::IntegrationLevel;

pub const AXIS_COUNT: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct RadarChartSpec {
    pub axes: [Metric; AXIS_COUNT],
    pub linear_limit: f64,
    pub max_display: f64,
    pub size_px: f64,
}

impl Default for RadarChartSpec {
    fn default() -> Self {
        Self {
            axes: [
                Metric::OutageProbability,
                Metric::ErgodicCapacity,
                Metric::PositioningError,
                Metric::TimingError,
                Metric::RangeResolution,
                Metric::Aoi,
            ],
            linear_limit: 10.0,
            max_display: 20.0,
            size_px: 640.0,
        }
    }
}

/// Smallest plotted radius fraction; keeps missing or zero gains visible.
const MIN_FRACTION: f64 = 1e-3;

impl RadarChartSpec {
    /// Display radius of a gain, before division by `max_display`.
    pub fn display_radius(&self, gain: f64) -> f64 {
        if !(gain > 0.0) || !gain.is_finite() {
            return if gain == f64::INFINITY {
                self.max_display
            } else {
                0.0
            };
        }
        let r = if gain <= self.linear_limit {
            gain
        } else {
            self.linear_limit * (1.0 + (gain / self.linear_limit).log10())
        };
        r.min(self.max_display)
    }

    /// Radius as a fraction of the chart, in `(0, 1]`.
    pub fn normalized(&self, gain: f64) -> f64 {
        (self.display_radius(gain) / self.max_display).clamp(MIN_FRACTION, 1.0)
    }
}

fn axis_label(m: Metric) -> &'static str {
    match m {
        Metric::OutageProbability => "Outage probability",
        Metric::ErgodicCapacity => "Mean ergodic capacity",
        Metric::PositioningError => "Positioning error",
        Metric::TimingError => "Timing error",
        Metric::NavAvailability => "Navigation availability",
        Metric::RangeResolution => "Range resolution",
        Metric::Aoi => "Age of information",
    }
}

fn axis_color(m: Metric) -> &'static str {
    match m {
        Metric::OutageProbability | Metric::ErgodicCapacity => "#c0392b",
        Metric::PositioningError | Metric::TimingError | Metric::NavAvailability => "#2e6fba",
        Metric::RangeResolution | Metric::Aoi => "#7d3c98",
    }
}

fn level_color(l: IntegrationLevel) -> &'static str {
    match l {
        IntegrationLevel::Traditional => "#6b6b6b",
        IntegrationLevel::FunctionLevel => "#e67e22",
        IntegrationLevel::SignalLevel => "#27ae60",
    }
}

/// Gain of `value` over `baseline` on an axis with the given direction.
pub fn gain(direction: Direction, value: f64, baseline: f64) -> f64 {
    match direction {
        Direction::Maximize => value / baseline,
        Direction::Minimize => baseline / value,
    }
}

/// Traditional when present, else the first level of the report.
fn baseline(report: &MetricsReport) -> Result<&LevelReport> {
    report
        .level(IntegrationLevel::Traditional)
        .or_else(|| report.levels.first())
        .ok_or_else(|| Error::invalid("report", "radar chart needs at least one level"))
}

/// Raw per-axis gains of every level, in report order.
pub fn axis_gains(
    report: &MetricsReport,
    spec: &RadarChartSpec,
) -> Result<Vec<(IntegrationLevel, [f64; AXIS_COUNT])>> {
    let baseline = baseline(report)?;
    Ok(report
        .levels
        .iter()
        .map(|l| {
            let mut g = [0.0; AXIS_COUNT];
            for (k, &m) in spec.axes.iter().enumerate() {
                g[k] = gain(m.direction(), l.get(m).mean, baseline.get(m).mean);
            }
            (l.level, g)
        })
        .collect())
}

fn point(cx: f64, cy: f64, radius: f64, axis: usize) -> (f64, f64) {
    let angle = (-90.0 + 60.0 * axis as f64).to_radians();
    (cx + radius * angle.cos(), cy + radius * angle.sin())
}

pub fn render_radar_svg(report: &MetricsReport, spec: &RadarChartSpec) -> Result<String> {
    let gains = axis_gains(report, spec)?;
    let title = match baseline(report)?.level {
        IntegrationLevel::Traditional => "separate systems",
        other => other.label(),
    };
    let size = spec.size_px;
    let (cx, cy) = (size * 0.45, size * 0.52);
    let outer = size * 0.32;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0}" height="{size:.0}" viewBox="0 0 {size:.0} {size:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="28" font-size="16" text-anchor="middle">Gain over {} ({} trials)</text>"#,
        cx, title, report.trials
    );

    let rings: Vec<f64> = [1.0, 2.0, 5.0, 10.0, 100.0, 1000.0]
        .into_iter()
        .filter(|&g| spec.display_radius(g) <= spec.max_display)
        .collect();
    for g in rings {
        let r = outer * spec.normalized(g);
        let pts: Vec<String> = (0..AXIS_COUNT)
            .map(|k| {
                let (x, y) = point(cx, cy, r, k);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polygon points="{}" fill="none" stroke="#d0d0d0" stroke-width="1"/>"##,
            pts.join(" ")
        );
        let (x, y) = point(cx, cy, r, 0);
        let _ = writeln!(
            s,
            r##"<text x="{:.3}" y="{:.3}" font-size="10" fill="#808080">{}x</text>"##,
            x + 4.0,
            y - 2.0,
            g
        );
    }

    for (k, &m) in spec.axes.iter().enumerate() {
        let (x, y) = point(cx, cy, outer, k);
        let _ = writeln!(
            s,
            r##"<line x1="{cx:.3}" y1="{cy:.3}" x2="{x:.3}" y2="{y:.3}" stroke="#a0a0a0" stroke-width="1"/>"##
        );
        let (lx, ly) = point(cx, cy, outer + 22.0, k);
        let anchor = if (lx - cx).abs() < 1.0 {
            "middle"
        } else if lx > cx {
            "start"
        } else {
            "end"
        };
        let _ = writeln!(
            s,
            r#"<text x="{lx:.3}" y="{:.3}" font-size="13" fill="{}" text-anchor="{anchor}">{}</text>"#,
            ly + 4.0,
            axis_color(m),
            axis_label(m)
        );
    }

    for (level, g) in &gains {
        let pts: Vec<String> = g
            .iter()
            .enumerate()
            .map(|(k, &gk)| {
                let (x, y) = point(cx, cy, outer * spec.normalized(gk), k);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let color = level_color(*level);
        let _ = writeln!(
            s,
            r#"<polygon data-level="{}" points="{}" fill="{color}" fill-opacity="0.15" stroke="{color}" stroke-width="2"/>"#,
            level.as_str(),
            pts.join(" ")
        );
    }

    let lx = size * 0.78;
    for (i, (level, _)) in gains.iter().enumerate() {
        let y = 60.0 + 22.0 * i as f64;
        let color = level_color(*level);
        let _ = writeln!(
            s,
            r#"<rect x="{lx:.3}" y="{:.3}" width="14" height="14" fill="{color}" fill-opacity="0.6" stroke="{color}"/>"#,
            y - 11.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{y:.3}" font-size="12">{}</text>"#,
            lx + 20.0,
            level.label()
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
