//! Grouped bar charts as standalone SVG.

use std::fmt::Write;

use thiserror::Error;

use crate::metrics::{format_value, Metric};
use crate::versions::VersionRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub groups: Vec<String>,
    pub series: Vec<(Metric, Vec<f64>)>,
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Error, PartialEq)]
pub enum ChartError {
    #[error("chart needs at least one group")]
    NoGroups,
    #[error("chart needs at least one series")]
    NoSeries,
    #[error("series {metric} has {got} values for {groups} groups")]
    Length {
        metric: Metric,
        got: usize,
        groups: usize,
    },
    #[error("series {0} holds a negative or non-finite value")]
    BadValue(Metric),
    #[error("chart must be at least 300x200 pixels")]
    TooSmall,
}

impl ChartSpec {
    /// One group per version, one series per selected metric.
    pub fn from_versions(records: &[VersionRecord], metrics: &[Metric]) -> Self {
        let mut selected = metrics.to_vec();
        selected.sort();
        selected.dedup();
        ChartSpec {
            groups: records.iter().map(|r| r.version_name.clone()).collect(),
            series: selected
                .into_iter()
                .map(|m| (m, records.iter().map(|r| r.means.get(m)).collect()))
                .collect(),
            width: 800,
            height: 400,
        }
    }

    fn check(&self) -> Result<(), ChartError> {
        if self.groups.is_empty() {
            return Err(ChartError::NoGroups);
        }
        if self.series.is_empty() {
            return Err(ChartError::NoSeries);
        }
        if self.width < 300 || self.height < 200 {
            return Err(ChartError::TooSmall);
        }
        for (metric, values) in &self.series {
            if values.len() != self.groups.len() {
                return Err(ChartError::Length {
                    metric: *metric,
                    got: values.len(),
                    groups: self.groups.len(),
                });
            }
            if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(ChartError::BadValue(*metric));
            }
        }
        Ok(())
    }

    /// Top of the y axis: 1.1 times the largest value, or 1 when all are 0.
    pub fn axis_max(&self) -> f64 {
        let max = self
            .series
            .iter()
            .flat_map(|(_, v)| v.iter().copied())
            .fold(0.0, f64::max);
        if max > 0.0 {
            max * 1.1
        } else {
            1.0
        }
    }
}

pub fn metric_color(metric: Metric) -> &'static str {
    match metric {
        Metric::Wmc => "#4e79a7",
        Metric::Dit => "#f28e2b",
        Metric::Noc => "#e15759",
        Metric::Cbo => "#76b7b2",
        Metric::Rfc => "#59a14f",
        Metric::Lcom => "#b07aa1",
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

const LEFT: f64 = 60.0;
const RIGHT: f64 = 110.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 40.0;
const TICKS: usize = 5;

pub fn render_svg(spec: &ChartSpec) -> Result<String, ChartError> {
    spec.check()?;
    let (w, h) = (spec.width as f64, spec.height as f64);
    let plot_w = w - LEFT - RIGHT;
    let plot_h = h - TOP - BOTTOM;
    let axis_max = spec.axis_max();
    let base_y = TOP + plot_h;
    let group_w = plot_w / spec.groups.len() as f64;
    let bar_w = group_w * 0.8 / spec.series.len() as f64;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="11">"#,
        spec.width, spec.height, spec.width, spec.height
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);

    let _ = writeln!(s, r#"<g class="axis">"#);
    for t in 0..=TICKS {
        let value = axis_max * t as f64 / TICKS as f64;
        let y = base_y - plot_h * t as f64 / TICKS as f64;
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT,
            LEFT + plot_w
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            format_value(value)
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{base_y:.2}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT:.2}" y1="{base_y:.2}" x2="{:.2}" y2="{base_y:.2}" stroke="black"/>"#,
        LEFT + plot_w
    );
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="bars">"#);
    for (g, group) in spec.groups.iter().enumerate() {
        let gx = LEFT + group_w * g as f64 + group_w * 0.1;
        for (k, (metric, values)) in spec.series.iter().enumerate() {
            let value = values[g];
            let bar_h = plot_h * value / axis_max;
            let _ = writeln!(
                s,
                r#"<rect class="bar" data-group="{}" data-metric="{}" data-value="{}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                escape(group),
                metric,
                format_value(value),
                gx + bar_w * k as f64,
                base_y - bar_h,
                bar_w,
                bar_h,
                metric_color(*metric)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + group_w * (g as f64 + 0.5),
            base_y + 16.0,
            escape(group)
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="legend">"#);
    for (k, (metric, _)) in spec.series.iter().enumerate() {
        let y = TOP + 18.0 * k as f64;
        let x = w - RIGHT + 16.0;
        let _ = writeln!(
            s,
            r#"<rect x="{x:.2}" y="{y:.2}" width="12" height="12" fill="{}"/>"#,
            metric_color(*metric)
        );
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{metric}</text>"#, x + 18.0, y + 10.0);
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(groups: usize, series: &[(Metric, Vec<f64>)]) -> ChartSpec {
        ChartSpec {
            groups: (1..=groups).map(|k| format!("V-{k}")).collect(),
            series: series.to_vec(),
            width: 800,
            height: 400,
        }
    }

    #[test]
    fn zero_groups_rejected() {
        assert_eq!(render_svg(&spec(0, &[(Metric::Wmc, vec![])])), Err(ChartError::NoGroups));
    }

    #[test]
    fn all_zero_axis_is_one() {
        let series: Vec<_> = Metric::ALL.iter().map(|&m| (m, vec![0.0])).collect();
        let chart = spec(1, &series);
        assert_eq!(chart.axis_max(), 1.0);
        let svg = render_svg(&chart).unwrap();
        assert_eq!(svg.matches(r#"class="bar""#).count(), 6);
        assert_eq!(svg.matches(r#"height="0.00""#).count(), 6);
    }

    #[test]
    fn mismatched_series_rejected() {
        let err = render_svg(&spec(2, &[(Metric::Rfc, vec![1.0])])).unwrap_err();
        assert!(matches!(err, ChartError::Length { got: 1, groups: 2, .. }));
    }

    #[test]
    fn names_are_escaped() {
        let mut chart = spec(1, &[(Metric::Wmc, vec![1.0])]);
        chart.groups[0] = "a<b&c".into();
        let svg = render_svg(&chart).unwrap();
        assert!(svg.contains("a&lt;b&amp;c"));
    }
}
