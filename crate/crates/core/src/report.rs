//! Human-facing renderings of quality records: a horizontal stacked bar
//! chart and a plain-text summary.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::engine::QualityRecord;
use crate::table::Table;

pub const COMPLETENESS_COLOR: &str = "#1f77b4";
pub const IMPUTATION_COLOR: &str = "#ff7f0e";
pub const FALLBACK_COLOR: &str = "#d62728";

/// Geometry of the quality chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartLayout {
    pub label_width: f64,
    pub axis_length: f64,
    pub row_height: f64,
    pub bar_height: f64,
    pub top: f64,
}

impl Default for ChartLayout {
    fn default() -> Self {
        ChartLayout {
            label_width: 160.0,
            axis_length: 500.0,
            row_height: 26.0,
            bar_height: 16.0,
            top: 50.0,
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Records ordered by descending ω; ties keep input order.
pub fn chart_order(records: &[QualityRecord]) -> Vec<&QualityRecord> {
    let mut sorted: Vec<&QualityRecord> = records.iter().collect();
    sorted.sort_by(|a, b| b.omega.total_cmp(&a.omega));
    sorted
}

/// Stacked bars per feature: completeness μ in blue, the imputation share
/// (1 − μ)·δ in orange, so each bar ends at ω. The whisker spans one fold
/// standard deviation of δ, scaled the same way. Features that fell back to
/// the random imputer have red names; `threshold` draws a dashed line.
pub fn emit_quality_svg(records: &[QualityRecord], threshold: Option<f64>) -> String {
    emit_quality_svg_with(records, threshold, &ChartLayout::default())
}

pub fn emit_quality_svg_with(
    records: &[QualityRecord],
    threshold: Option<f64>,
    layout: &ChartLayout,
) -> String {
    let l = layout;
    let x0 = l.label_width;
    let width = x0 + l.axis_length + 40.0;
    let plot_bottom = l.top + l.row_height * records.len() as f64;
    let height = plot_bottom + 60.0;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"  <text x="{x0}" y="24" font-size="14" font-weight="bold">Feature quality (ω = μ + (1 − μ)·δ)</text>"#
    );
    for i in 0..=4 {
        let v = f64::from(i) / 4.0;
        let x = x0 + v * l.axis_length;
        let _ = writeln!(
            s,
            r##"  <line class="grid" x1="{x:.3}" y1="{:.3}" x2="{x:.3}" y2="{plot_bottom:.3}" stroke="#dddddd"/>"##,
            l.top - 6.0
        );
        let _ = writeln!(
            s,
            r#"  <text x="{x:.3}" y="{:.3}" text-anchor="middle">{v:.2}</text>"#,
            plot_bottom + 16.0
        );
    }
    for (i, r) in chart_order(records).into_iter().enumerate() {
        let y = l.top + l.row_height * i as f64;
        let blue = r.completeness * l.axis_length;
        let orange = (1.0 - r.completeness) * r.delta * l.axis_length;
        let name_color = if r.fallback_used { FALLBACK_COLOR } else { "#000000" };
        let mid = y + l.bar_height / 2.0;
        let _ = writeln!(s, r#"  <g class="feature" data-feature="{}">"#, escape(&r.feature));
        let _ = writeln!(
            s,
            r#"    <text class="name" x="{:.3}" y="{:.3}" text-anchor="end" fill="{name_color}">{}</text>"#,
            x0 - 8.0,
            mid + 4.0,
            escape(&r.feature)
        );
        let _ = writeln!(
            s,
            r#"    <rect class="completeness" x="{x0:.3}" y="{y:.3}" width="{blue:.3}" height="{:.3}" fill="{COMPLETENESS_COLOR}"/>"#,
            l.bar_height
        );
        let _ = writeln!(
            s,
            r#"    <rect class="imputation" x="{:.3}" y="{y:.3}" width="{orange:.3}" height="{:.3}" fill="{IMPUTATION_COLOR}"/>"#,
            x0 + blue,
            l.bar_height
        );
        let spread = (1.0 - r.completeness) * r.delta_std * l.axis_length;
        if spread > 0.0 {
            let end = x0 + blue + orange;
            let lo = (end - spread).max(x0);
            let hi = (end + spread).min(x0 + l.axis_length);
            let _ = writeln!(
                s,
                r##"    <line class="whisker" x1="{lo:.3}" y1="{mid:.3}" x2="{hi:.3}" y2="{mid:.3}" stroke="#333333"/>"##
            );
        }
        let _ = writeln!(s, "  </g>");
    }
    if let Some(tau) = threshold {
        let x = x0 + tau * l.axis_length;
        let _ = writeln!(
            s,
            r##"  <line class="threshold" x1="{x:.3}" y1="{:.3}" x2="{x:.3}" y2="{plot_bottom:.3}" stroke="#000000" stroke-dasharray="6,4"/>"##,
            l.top - 10.0
        );
    }
    let ly = plot_bottom + 36.0;
    let _ = writeln!(
        s,
        r#"  <rect x="{x0}" y="{:.3}" width="12" height="12" fill="{COMPLETENESS_COLOR}"/><text x="{}" y="{ly:.3}">completeness μ</text>"#,
        ly - 10.0,
        x0 + 16.0
    );
    let _ = writeln!(
        s,
        r#"  <rect x="{}" y="{:.3}" width="12" height="12" fill="{IMPUTATION_COLOR}"/><text x="{}" y="{ly:.3}">(1 − μ)·δ</text>"#,
        x0 + 140.0,
        ly - 10.0,
        x0 + 156.0
    );
    let _ = writeln!(
        s,
        r#"  <text x="{}" y="{ly:.3}" fill="{FALLBACK_COLOR}">random imputer only</text>"#,
        x0 + 260.0
    );
    s.push_str("</svg>\n");
    s
}

/// One line per feature plus totals.
pub fn summary_text(records: &[QualityRecord], threshold: Option<f64>) -> String {
    let width = records.iter().map(|r| r.feature.len()).max().unwrap_or(7).max(7);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<width$}  {:<11}  {:>6}  {:>6}  {:>6}  {:<10}  kept",
        "feature", "kind", "mu", "delta", "omega", "imputer"
    );
    for r in chart_order(records) {
        let kind = serde_json::to_value(r.kind)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        let imputer = if r.fallback_used {
            format!("{}*", r.chosen_imputer)
        } else {
            r.chosen_imputer.clone()
        };
        let _ = writeln!(
            s,
            "{:<width$}  {:<11}  {:>6.3}  {:>6.3}  {:>6.3}  {:<10}  {}",
            r.feature,
            kind,
            r.completeness,
            r.delta,
            r.omega,
            imputer,
            if r.kept { "yes" } else { "no" }
        );
    }
    let dropped: Vec<&str> = records.iter().filter(|r| !r.kept).map(|r| r.feature.as_str()).collect();
    let fallback = records.iter().filter(|r| r.fallback_used).count();
    let _ = writeln!(s);
    match threshold {
        Some(tau) => {
            let _ = writeln!(
                s,
                "threshold {tau}: {} kept, {} dropped{}",
                records.len() - dropped.len(),
                dropped.len(),
                if dropped.is_empty() {
                    String::new()
                } else {
                    format!(" ({})", dropped.join(", "))
                }
            );
        }
        None => {
            let _ = writeln!(s, "no threshold: all {} features kept", records.len());
        }
    }
    let _ = writeln!(s, "{fallback} feature(s) use the random imputer only (marked *)");
    s
}

/// Per-column missing counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissingnessEntry {
    pub feature: String,
    pub missing: usize,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissingnessSummary {
    pub n_rows: usize,
    pub overall_fraction: f64,
    pub columns: Vec<MissingnessEntry>,
}

pub fn missingness_summary(t: &Table) -> MissingnessSummary {
    let n = t.n_rows().max(1) as f64;
    MissingnessSummary {
        n_rows: t.n_rows(),
        overall_fraction: t.overall_missing_fraction(),
        columns: t
            .columns()
            .iter()
            .map(|c| MissingnessEntry {
                feature: c.name.clone(),
                missing: c.n_missing(),
                fraction: c.n_missing() as f64 / n,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::ColumnKind;

    fn record(name: &str, mu: f64, delta: f64, fallback: bool) -> QualityRecord {
        QualityRecord {
            feature: name.into(),
            kind: ColumnKind::Continuous,
            completeness: mu,
            imputers: vec![],
            chosen_imputer: if fallback { "random".into() } else { "mean".into() },
            delta,
            delta_std: 0.05,
            omega: mu + (1.0 - mu) * delta,
            kept: true,
            fallback_used: fallback,
            flags: vec![],
        }
    }

    #[test]
    fn sorted_by_quality() {
        let recs = [record("a", 0.2, 0.1, false), record("b", 1.0, 0.0, false)];
        let order: Vec<&str> = chart_order(&recs).iter().map(|r| r.feature.as_str()).collect();
        assert_eq!(order, ["b", "a"]);
    }

    #[test]
    fn escapes_names() {
        let svg = emit_quality_svg(&[record("a<b&c", 0.5, 0.5, true)], Some(0.9));
        assert!(svg.contains("a&lt;b&amp;c"));
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains(FALLBACK_COLOR));
    }

    #[test]
    fn summary_lists_drops() {
        let mut r = record("x", 0.5, 0.2, true);
        r.kept = false;
        let text = summary_text(&[r, record("y", 1.0, 0.0, false)], Some(0.9));
        assert!(text.contains("1 dropped (x)"));
        assert!(text.contains("random*"));
    }
}
