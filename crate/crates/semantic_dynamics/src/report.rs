use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Candidate, SdaError, Segmentation, SemanticTrace, TokenSequence};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportPaths {
    pub trace_csv: PathBuf,
    pub segments_json: PathBuf,
    pub candidates_json: PathBuf,
    pub chart_svg: PathBuf,
}

impl ReportPaths {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            trace_csv: dir.join("trace.csv"),
            segments_json: dir.join("segments.json"),
            candidates_json: dir.join("candidates.json"),
            chart_svg: dir.join("chart.svg"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentText {
    pub start: usize,
    pub end: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentsFile {
    pub boundaries: Vec<usize>,
    pub segments: Vec<SegmentText>,
}

impl SegmentsFile {
    pub fn new(tokens: &TokenSequence, segmentation: &Segmentation) -> Self {
        Self {
            boundaries: segmentation.boundaries.clone(),
            segments: segmentation
                .segments
                .iter()
                .map(|s| SegmentText { start: s.start, end: s.end, text: tokens.span_text(s.start, s.end).to_string() })
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TraceRow {
    index: usize,
    token: String,
    delta_semantics: String,
    global_drift: String,
    global_delta_drift: String,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SdaError + '_ {
    move |source| SdaError::Io { path: path.to_path_buf(), source }
}

fn format_err(path: &Path, message: impl ToString) -> SdaError {
    SdaError::Format { path: path.to_path_buf(), message: message.to_string() }
}

/// Writes trace.csv, segments.json, candidates.json and chart.svg into `dir`.
pub fn emit_report(
    tokens: &TokenSequence,
    trace: &SemanticTrace,
    segmentation: &Segmentation,
    candidates: &[Candidate],
    dir: &Path,
) -> Result<ReportPaths, SdaError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let paths = ReportPaths::in_dir(dir);

    let csv_bytes = trace_csv_bytes(trace).map_err(|e| format_err(&paths.trace_csv, e))?;
    fs::write(&paths.trace_csv, csv_bytes).map_err(io_err(&paths.trace_csv))?;

    let segments = SegmentsFile::new(tokens, segmentation);
    let json = serde_json::to_string_pretty(&segments).map_err(|e| format_err(&paths.segments_json, e))?;
    fs::write(&paths.segments_json, json + "\n").map_err(io_err(&paths.segments_json))?;

    let json = serde_json::to_string_pretty(candidates).map_err(|e| format_err(&paths.candidates_json, e))?;
    fs::write(&paths.candidates_json, json + "\n").map_err(io_err(&paths.candidates_json))?;

    fs::write(&paths.chart_svg, render_chart(trace, segmentation)).map_err(io_err(&paths.chart_svg))?;
    Ok(paths)
}

fn trace_csv_bytes(trace: &SemanticTrace) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for i in 0..trace.len() {
        w.serialize(TraceRow {
            index: i + 1,
            token: trace.tokens[i].clone(),
            delta_semantics: format!("{:.6}", trace.delta_semantics[i]),
            global_drift: format!("{:.6}", trace.global_drift[i]),
            global_delta_drift: format!("{:.6}", trace.global_delta_drift[i]),
        })?;
    }
    w.into_inner().map_err(|e| csv::Error::from(e.into_error()))
}

/// Parses a trace.csv back into a trace (values carry 6 decimals).
pub fn read_trace_csv(path: &Path) -> Result<SemanticTrace, SdaError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| format_err(path, e))?;
    let (mut tokens, mut ds, mut d, mut dd) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (k, row) in r.deserialize::<TraceRow>().enumerate() {
        let row = row.map_err(|e| format_err(path, e))?;
        if row.index != k + 1 {
            return Err(format_err(path, format!("expected index {}, found {}", k + 1, row.index)));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| format_err(path, format!("row {}: {e}", row.index)));
        ds.push(num(&row.delta_semantics)?);
        d.push(num(&row.global_drift)?);
        dd.push(num(&row.global_delta_drift)?);
        tokens.push(row.token);
    }
    SemanticTrace::from_series(tokens, ds, d, dd)
}

const STEP: f64 = 12.0;
const MARGIN: f64 = 40.0;
const HEIGHT: f64 = 320.0;
const ZERO_Y: f64 = 160.0;
const SCALE: f64 = 60.0;

/// Static SVG: line for Global Drift, bars for ΔS and ΔD, circles at boundaries.
pub fn render_chart(trace: &SemanticTrace, segmentation: &Segmentation) -> String {
    let n = trace.len();
    let width = 2.0 * MARGIN + STEP * n as f64;
    let x = |i: usize| MARGIN + STEP * (i as f64 - 0.5);
    let y = |v: f64| ZERO_Y - SCALE * v;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1}" height="{HEIGHT:.1}" viewBox="0 0 {width:.1} {HEIGHT:.1}">"#
    );
    let _ = writeln!(
        s,
        r##"<line class="axis" x1="{MARGIN:.1}" y1="{ZERO_Y:.1}" x2="{:.1}" y2="{ZERO_Y:.1}" stroke="#888" stroke-width="0.5"/>"##,
        width - MARGIN
    );
    for i in 1..=n {
        let bar = |class: &str, dx: f64, v: f64, fill: &str| {
            let top = y(v.max(0.0));
            let h = (SCALE * v).abs();
            format!(
                r#"<rect class="{class}" x="{:.2}" y="{top:.2}" width="{:.2}" height="{h:.2}" fill="{fill}"/>"#,
                x(i) - STEP * 0.4 + dx,
                STEP * 0.4
            )
        };
        let _ = writeln!(s, "{}", bar("delta-semantics", 0.0, trace.delta_semantics[i - 1], "#4c78a8"));
        let _ = writeln!(s, "{}", bar("delta-drift", STEP * 0.4, trace.global_delta_drift[i - 1], "#f58518"));
    }
    let points: Vec<String> = (1..=n).map(|i| format!("{:.2},{:.2}", x(i), y(trace.global_drift[i - 1]))).collect();
    let _ = writeln!(
        s,
        r##"<polyline class="global-drift" fill="none" stroke="#e45756" stroke-width="1.5" points="{}"/>"##,
        points.join(" ")
    );
    for &b in &segmentation.boundaries {
        if (1..=n).contains(&b) {
            let _ = writeln!(
                s,
                r##"<circle class="boundary" cx="{:.2}" cy="{:.2}" r="4" fill="#54a24b"/>"##,
                x(b),
                y(trace.global_drift[b - 1])
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
