use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use agents::TrialRecord;
use monkey_sim::{builtin_scene, Category};

use crate::{BenchError, MetricsRow};

pub const HEADER: [&str; 8] =
    ["Scene", "Agent", "SR.↑", "Avg. Steps↓", "Avg. Time(s)↓", "Avg. Tokens↓", "Time-to-S↓", "Tokens-to-S↓"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TablePaths {
    pub results_csv: PathBuf,
    pub tables_md: PathBuf,
}

pub fn format_count(x: f64) -> String {
    if x.is_infinite() {
        "∞".into()
    } else if x >= 1e6 {
        format!("{:.1}M", x / 1e6)
    } else if x >= 1e3 {
        format!("{:.1}K", x / 1e3)
    } else {
        format!("{x:.0}")
    }
}

fn fixed(x: f64, digits: usize) -> String {
    if x.is_infinite() {
        "∞".into()
    } else {
        format!("{x:.digits$}")
    }
}

#[derive(Clone, Copy)]
enum Better {
    Higher,
    Lower,
}

type Metric = (fn(&MetricsRow) -> f64, fn(f64) -> String, Better);

fn metrics() -> [Metric; 6] {
    [
        (|r| r.success_rate, |x| fixed(x, 2), Better::Higher),
        (|r| r.avg_steps, |x| fixed(x, 1), Better::Lower),
        (|r| r.avg_time, |x| fixed(x, 2), Better::Lower),
        (|r| r.avg_tokens, format_count, Better::Lower),
        (|r| r.time_to_success, |x| fixed(x, 2), Better::Lower),
        (|r| r.tokens_to_success, format_count, Better::Lower),
    ]
}

/// Markdown rows for one scene; the best value of each metric is underlined,
/// ties included, and ∞ is never best.
fn scene_rows(rows: &[&MetricsRow]) -> Vec<String> {
    let cells: Vec<Vec<String>> = metrics()
        .iter()
        .map(|(get, fmt, better)| {
            let finite = rows.iter().map(|r| get(r)).filter(|v| v.is_finite());
            let best = match better {
                Better::Higher => finite.fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v)))),
                Better::Lower => finite.fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v)))),
            }
            .map(fmt);
            rows.iter()
                .map(|r| {
                    let s = fmt(get(r));
                    if best.as_ref() == Some(&s) {
                        format!("<u>{s}</u>")
                    } else {
                        s
                    }
                })
                .collect()
        })
        .collect();
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let scene = if i == 0 { format!("Scene {}", r.scene) } else { String::new() };
            let mut line = format!("| {scene} | {} |", r.agent);
            for c in &cells {
                line.push_str(&format!(" {} |", c[i]));
            }
            line
        })
        .collect()
}

fn category_title(c: Category) -> &'static str {
    match c {
        Category::Classic => "Classic",
        Category::DualBananas => "Dual Bananas",
        Category::Shortsighted => "Shortsighted Monkey",
        Category::Overweight => "Over-weight Monkey",
        Category::Comprehensive => "Comprehensive",
    }
}

/// One table per scene category present in `rows`, agents in input order.
pub fn markdown_tables(rows: &[MetricsRow]) -> String {
    let mut groups: BTreeMap<(u8, u32), Vec<&MetricsRow>> = BTreeMap::new();
    for r in rows {
        let cat = builtin_scene(r.scene).map(|s| s.category).ok();
        groups.entry((cat.map_or(u8::MAX, |c| c as u8), r.scene)).or_default().push(r);
    }
    let mut out = String::new();
    let mut current = None;
    for ((cat, _), scene_rows_) in &groups {
        if current != Some(*cat) {
            if current.is_some() {
                out.push('\n');
            }
            let title = Category::ALL.get(*cat as usize).map_or("Other scenes", |c| category_title(*c));
            out.push_str(&format!("## {title}\n\n| {} |\n|{}\n", HEADER.join(" | "), "---|".repeat(HEADER.len())));
            current = Some(*cat);
        }
        for line in scene_rows(scene_rows_) {
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}

pub fn write_rows_csv(rows: &[MetricsRow], path: &Path) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_rows_csv`] or in the published-table
/// notation (`11.6K`, `∞`).
pub fn read_rows_csv(path: &Path) -> Result<Vec<MetricsRow>, BenchError> {
    read_rows(&fs::read_to_string(path)?)
}

pub fn read_rows(text: &str) -> Result<Vec<MetricsRow>, BenchError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn write_records_csv(records: &[TrialRecord], path: &Path) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "agent",
        "scene",
        "seed",
        "success",
        "steps",
        "wall_time",
        "tokens",
        "prompt_tokens",
        "completion_tokens",
        "cause",
        "transcript_path",
        "error",
    ])?;
    for r in records {
        w.write_record([
            r.agent.name().to_string(),
            r.scene.to_string(),
            r.seed.to_string(),
            r.success.to_string(),
            r.steps.to_string(),
            r.wall_time.to_string(),
            r.tokens.to_string(),
            r.prompt_tokens.to_string(),
            r.completion_tokens.to_string(),
            r.cause.to_string(),
            r.transcript_path.clone().unwrap_or_default(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `results.csv` and `tables.md` into `dir`.
pub fn emit_tables(rows: &[MetricsRow], dir: &Path) -> Result<TablePaths, BenchError> {
    fs::create_dir_all(dir)?;
    let paths = TablePaths { results_csv: dir.join("results.csv"), tables_md: dir.join("tables.md") };
    write_rows_csv(rows, &paths.results_csv)?;
    fs::write(&paths.tables_md, markdown_tables(rows))?;
    Ok(paths)
}
