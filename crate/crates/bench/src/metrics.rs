use agents::{AgentKind, TrialRecord};
use serde::{Deserialize, Deserializer, Serialize};

use crate::BenchError;

/// Per-cell summary. Averages run over all trials, failures included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub scene: u32,
    pub agent: AgentKind,
    pub n_trials: usize,
    pub success_rate: f64,
    #[serde(deserialize_with = "lenient")]
    pub avg_steps: f64,
    #[serde(deserialize_with = "lenient")]
    pub avg_time: f64,
    #[serde(deserialize_with = "lenient")]
    pub avg_tokens: f64,
    /// `f64::INFINITY` when no trial succeeded.
    #[serde(deserialize_with = "lenient")]
    pub time_to_success: f64,
    #[serde(deserialize_with = "lenient")]
    pub tokens_to_success: f64,
}

/// Parses plain numbers, `inf`/`∞`, and `K`/`M` suffixed counts.
pub fn parse_quantity(s: &str) -> Option<f64> {
    let s = s.trim();
    if matches!(s, "∞" | "inf" | "+inf" | "infinity" | "Infinity") {
        return Some(f64::INFINITY);
    }
    let (num, scale) = match s.chars().last()? {
        'K' | 'k' => (&s[..s.len() - 1], 1e3),
        'M' => (&s[..s.len() - 1], 1e6),
        _ => (s, 1.0),
    };
    num.trim().parse::<f64>().ok().map(|v| v * scale)
}

fn lenient<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let s = String::deserialize(d)?;
    parse_quantity(&s).ok_or_else(|| serde::de::Error::custom(format!("not a quantity: `{s}`")))
}

/// Success rate and the success and failure means of one metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitMeans {
    pub r: f64,
    /// NaN when nothing succeeded.
    pub x_s: f64,
    /// 0 when nothing failed.
    pub x_f: f64,
}

impl SplitMeans {
    pub fn of(values: &[f64], success: &[bool]) -> Self {
        assert_eq!(values.len(), success.len());
        let (mut s, mut ns, mut f, mut nf) = (0.0, 0usize, 0.0, 0usize);
        for (&v, &ok) in values.iter().zip(success) {
            if ok {
                s += v;
                ns += 1;
            } else {
                f += v;
                nf += 1;
            }
        }
        let n = values.len() as f64;
        Self {
            r: ns as f64 / n,
            x_s: if ns == 0 { f64::NAN } else { s / ns as f64 },
            x_f: if nf == 0 { 0.0 } else { f / nf as f64 },
        }
    }

    pub fn to_success(&self) -> f64 {
        x_to_success(self.r, self.x_s, self.x_f)
    }
}

/// Expected cost until the first success: x_s + (1/r − 1)·x_f, ∞ at r = 0.
pub fn x_to_success(r: f64, x_s: f64, x_f: f64) -> f64 {
    if r <= 0.0 {
        return f64::INFINITY;
    }
    x_s + (1.0 / r - 1.0) * x_f
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Folds the records of one (agent, scene) cell into a row.
pub fn aggregate(records: &[TrialRecord]) -> Result<MetricsRow, BenchError> {
    let first = records.first().ok_or(BenchError::EmptyCell)?;
    if let Some(r) = records.iter().find(|r| r.agent != first.agent || r.scene != first.scene) {
        return Err(BenchError::MixedCell { first: (first.agent, first.scene), other: (r.agent, r.scene) });
    }
    let success: Vec<bool> = records.iter().map(|r| r.success).collect();
    let steps: Vec<f64> = records.iter().map(|r| r.steps as f64).collect();
    let time: Vec<f64> = records.iter().map(|r| r.wall_time).collect();
    let tokens: Vec<f64> = records.iter().map(|r| r.tokens as f64).collect();
    let t = SplitMeans::of(&time, &success);
    let k = SplitMeans::of(&tokens, &success);
    Ok(MetricsRow {
        scene: first.scene,
        agent: first.agent,
        n_trials: records.len(),
        success_rate: t.r,
        avg_steps: mean(&steps),
        avg_time: mean(&time),
        avg_tokens: mean(&tokens),
        time_to_success: t.to_success(),
        tokens_to_success: k.to_success(),
    })
}

/// One row per (scene, agent) cell, sorted by scene then agent.
pub fn aggregate_all(records: &[TrialRecord]) -> Result<Vec<MetricsRow>, BenchError> {
    let mut cells: std::collections::BTreeMap<(u32, AgentKind), Vec<TrialRecord>> = Default::default();
    for r in records {
        cells.entry((r.scene, r.agent)).or_default().push(r.clone());
    }
    cells.values().map(|c| aggregate(c)).collect()
}
