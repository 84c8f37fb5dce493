//! Evaluation report: the ranked accuracy table, per-algorithm confusion
//! matrices, the k-sweep, and fitted-transform metadata, with text/JSON/CSV
//! rendering and plot-data emission (CSV plus a minimal SVG).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::preprocess::{LdaProjection, Standardizer};

use super::EvalError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub algorithm: String,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSweepPoint {
    pub k: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionPoint {
    pub score: f64,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub x: f64,
    pub y: f64,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub mode: String,
    pub features_path: String,
    pub selected_features: Vec<String>,
    pub split_ratio: f64,
    pub seed: u64,
    pub k_min: usize,
    pub k_max: usize,
    pub knn_k: usize,
    pub holdout_only: bool,
    pub train_rows: usize,
    pub eval_rows: usize,
    /// Scope the standardizer and LDA were fitted on.
    pub fit_scope: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub config: ConfigEcho,
    pub class_names: Vec<String>,
    /// Accuracy per algorithm, ranked descending (ties keep table order).
    pub rows: Vec<AccuracyRow>,
    /// Per-algorithm 2x2 confusion matrix `[[TN, FP], [FN, TP]]` with class
    /// 0 as the first class name, computed on the complete dataset.
    pub confusion: BTreeMap<String, [[u64; 2]; 2]>,
    pub k_sweep: Vec<KSweepPoint>,
    pub k_sweep_note: Option<String>,
    /// Test-split-only accuracies when requested.
    pub holdout: Option<Vec<AccuracyRow>>,
    pub standardizer: Standardizer,
    pub lda: Option<LdaProjection>,
    /// Per-file LDA score for part1 runs.
    pub projection: Option<Vec<ProjectionPoint>>,
    /// Per-file selected-feature pair for part2 runs.
    pub scatter: Option<Vec<ScatterPoint>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotSeries {
    KSweep,
    Scatter,
    Projection,
}

impl PlotSeries {
    pub fn name(&self) -> &'static str {
        match self {
            PlotSeries::KSweep => "k_sweep",
            PlotSeries::Scatter => "scatter",
            PlotSeries::Projection => "projection",
        }
    }

    pub fn parse(s: &str) -> Option<PlotSeries> {
        match s {
            "k_sweep" => Some(PlotSeries::KSweep),
            "scatter" => Some(PlotSeries::Scatter),
            "projection" => Some(PlotSeries::Projection),
            _ => None,
        }
    }
}

/// Two-column table in the layout of the accuracy figures: rank, algorithm,
/// accuracy to two decimals.
pub fn render_text(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "rank algorithm accuracy");
    for (rank, row) in report.rows.iter().enumerate() {
        let _ = writeln!(out, "{rank} {} {:.2}", row.algorithm, row.accuracy);
    }
    if let Some(note) = &report.k_sweep_note {
        let _ = writeln!(out, "# {note}");
    }
    if let Some(holdout) = &report.holdout {
        let _ = writeln!(out, "\nholdout-only accuracy ({} rows):", report.config.eval_rows - report.config.train_rows);
        for row in holdout {
            let _ = writeln!(out, "  {} {:.2}", row.algorithm, row.accuracy);
        }
    }
    out
}

pub fn render_json(report: &EvaluationReport) -> String {
    serde_json::to_string_pretty(report).expect("report serialization")
}

pub fn render_csv(report: &EvaluationReport) -> String {
    let mut out = String::from("algorithm,accuracy\n");
    for row in &report.rows {
        let _ = writeln!(out, "{},{}", row.algorithm, row.accuracy);
    }
    out
}

/// (x, y, label) triples plus a minimal SVG rendering for the requested
/// series.
pub fn emit_plot_data(
    report: &EvaluationReport,
    which: PlotSeries,
) -> Result<(String, String), EvalError> {
    let class = |label: usize| report.class_names[label].clone();
    match which {
        PlotSeries::KSweep => {
            if report.k_sweep.is_empty() {
                return Err(EvalError::MissingSeries("k_sweep".to_string()));
            }
            let mut csv = String::from("x,y,label\n");
            let points: Vec<(f64, f64)> = report
                .k_sweep
                .iter()
                .map(|p| (p.k as f64, p.accuracy))
                .collect();
            for p in &report.k_sweep {
                let _ = writeln!(csv, "{},{},knn", p.k, p.accuracy);
            }
            let svg = svg_plot(
                &[("knn".to_string(), points)],
                "k",
                "accuracy",
                true,
            );
            Ok((csv, svg))
        }
        PlotSeries::Scatter => {
            let scatter = report
                .scatter
                .as_ref()
                .ok_or_else(|| EvalError::MissingSeries("scatter".to_string()))?;
            let mut csv = String::from("x,y,label\n");
            for p in scatter {
                let _ = writeln!(csv, "{},{},{}", p.x, p.y, class(p.label));
            }
            let series = split_by_class(
                scatter.iter().map(|p| (p.x, p.y, p.label)),
                &report.class_names,
            );
            let (x_name, y_name) = match report.config.selected_features.as_slice() {
                [x, y] => (x.as_str(), y.as_str()),
                _ => ("x", "y"),
            };
            Ok((csv, svg_plot(&series, x_name, y_name, false)))
        }
        PlotSeries::Projection => {
            let projection = report
                .projection
                .as_ref()
                .ok_or_else(|| EvalError::MissingSeries("projection".to_string()))?;
            let mut csv = String::from("x,y,label\n");
            for p in projection {
                let _ = writeln!(csv, "{},0,{}", p.score, class(p.label));
            }
            let series = split_by_class(
                projection.iter().map(|p| (p.score, 0.0, p.label)),
                &report.class_names,
            );
            Ok((csv, svg_plot(&series, "lda score", "", false)))
        }
    }
}

/// Write report.{txt,json,csv} and the plot files available for this run
/// into `dir`. Returns the list of files written.
pub fn write_report_files(
    report: &EvaluationReport,
    dir: &Path,
) -> Result<Vec<String>, EvalError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut save = |name: &str, content: String| -> Result<(), EvalError> {
        std::fs::write(dir.join(name), content)?;
        written.push(name.to_string());
        Ok(())
    };
    save("report.txt", render_text(report))?;
    save("report.json", render_json(report))?;
    save("report.csv", render_csv(report))?;
    let (csv, svg) = emit_plot_data(report, PlotSeries::KSweep)?;
    save("k_sweep.csv", csv)?;
    save("k_sweep.svg", svg)?;
    if report.scatter.is_some() {
        let (csv, svg) = emit_plot_data(report, PlotSeries::Scatter)?;
        save("scatter.csv", csv)?;
        save("scatter.svg", svg)?;
    }
    if report.projection.is_some() {
        let (csv, svg) = emit_plot_data(report, PlotSeries::Projection)?;
        save("projection.csv", csv)?;
        save("projection.svg", svg)?;
    }
    Ok(written)
}

fn split_by_class(
    points: impl Iterator<Item = (f64, f64, usize)>,
    class_names: &[String],
) -> Vec<(String, Vec<(f64, f64)>)> {
    let mut series: Vec<(String, Vec<(f64, f64)>)> = class_names
        .iter()
        .map(|name| (name.clone(), Vec::new()))
        .collect();
    for (x, y, label) in points {
        series[label].1.push((x, y));
    }
    series
}

const SVG_COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Minimal data plot: axes, per-series points (and a polyline when `line`),
/// and a legend. Not a styled figure.
fn svg_plot(
    series: &[(String, Vec<(f64, f64)>)],
    x_label: &str,
    y_label: &str,
    line: bool,
) -> String {
    let (width, height, margin) = (640.0, 480.0, 60.0);
    let all: Vec<(f64, f64)> = series.iter().flat_map(|(_, pts)| pts.iter().copied()).collect();
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &all {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if all.is_empty() {
        (x_min, x_max, y_min, y_max) = (0.0, 1.0, 0.0, 1.0);
    }
    let x_span = (x_max - x_min).max(1e-9);
    let y_span = (y_max - y_min).max(1e-9);
    let sx = |x: f64| margin + (x - x_min) / x_span * (width - 2.0 * margin);
    let sy = |y: f64| height - margin - (y - y_min) / y_span * (height - 2.0 * margin);

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n\
         <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
    );
    // Axes.
    let _ = writeln!(
        svg,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>",
        m = margin,
        b = height - margin,
        r = width - margin,
        t = margin
    );
    // Axis labels and ranges.
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
        width / 2.0,
        height - margin / 4.0,
        xml_escape(x_label)
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\">{}</text>",
        margin / 4.0,
        height / 2.0,
        margin / 4.0,
        height / 2.0,
        xml_escape(y_label)
    );
    let _ = writeln!(
        svg,
        "<text x=\"{m}\" y=\"{yb}\" font-size=\"10\">{x_min:.3}</text>\n\
         <text x=\"{xr}\" y=\"{yb}\" font-size=\"10\" text-anchor=\"end\">{x_max:.3}</text>\n\
         <text x=\"{xl}\" y=\"{yb2}\" font-size=\"10\" text-anchor=\"end\">{y_min:.3}</text>\n\
         <text x=\"{xl}\" y=\"{yt}\" font-size=\"10\" text-anchor=\"end\">{y_max:.3}</text>",
        m = margin,
        yb = height - margin + 16.0,
        xr = width - margin,
        xl = margin - 6.0,
        yb2 = height - margin,
        yt = margin + 4.0,
    );

    for (idx, (name, points)) in series.iter().enumerate() {
        let color = SVG_COLORS[idx % SVG_COLORS.len()];
        if line && points.len() > 1 {
            let coords: Vec<String> = points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                svg,
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
                coords.join(" ")
            );
        }
        for &(x, y) in points {
            let _ = writeln!(
                svg,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>",
                sx(x),
                sy(y)
            );
        }
        // Legend entry.
        let ly = margin + 16.0 * idx as f64;
        let _ = writeln!(
            svg,
            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{color}\"/>\n\
             <text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>",
            width - margin - 110.0,
            ly,
            width - margin - 100.0,
            ly + 4.0,
            xml_escape(name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
