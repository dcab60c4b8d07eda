use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::{BenchError, MetricsRow};

/// Mean success rates closer than this are treated as equal.
const RATE_TIE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SceneDifficulty {
    pub scene: u32,
    /// Unweighted mean over agents.
    pub mean_success_rate: f64,
    pub mean_steps: f64,
}

/// Scenes from easiest to hardest: mean success rate descending, then mean
/// steps ascending, then scene id.
pub fn rank_difficulty(rows: &[MetricsRow]) -> Result<Vec<SceneDifficulty>, BenchError> {
    let agents: BTreeSet<_> = rows.iter().map(|r| r.agent).collect();
    let mut by_scene: BTreeMap<u32, BTreeMap<_, &MetricsRow>> = BTreeMap::new();
    for r in rows {
        by_scene.entry(r.scene).or_default().insert(r.agent, r);
    }
    let missing: Vec<_> = by_scene
        .iter()
        .flat_map(|(&s, cells)| agents.iter().filter(move |a| !cells.contains_key(a)).map(move |&a| (a, s)))
        .collect();
    if !missing.is_empty() {
        return Err(BenchError::MissingCells(missing));
    }
    let mut out: Vec<SceneDifficulty> = by_scene
        .into_iter()
        .map(|(scene, cells)| {
            let n = cells.len() as f64;
            SceneDifficulty {
                scene,
                mean_success_rate: cells.values().map(|r| r.success_rate).sum::<f64>() / n,
                mean_steps: cells.values().map(|r| r.avg_steps).sum::<f64>() / n,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        let by_rate = if (a.mean_success_rate - b.mean_success_rate).abs() < RATE_TIE {
            Ordering::Equal
        } else {
            b.mean_success_rate.total_cmp(&a.mean_success_rate)
        };
        by_rate.then(a.mean_steps.total_cmp(&b.mean_steps)).then(a.scene.cmp(&b.scene))
    });
    Ok(out)
}

/// The `n` hardest scenes, in increasing difficulty.
pub fn hardest(ranking: &[SceneDifficulty], n: usize) -> Vec<u32> {
    ranking[ranking.len().saturating_sub(n)..].iter().map(|d| d.scene).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use agents::AgentKind;

    fn row(scene: u32, agent: AgentKind, sr: f64, steps: f64) -> MetricsRow {
        MetricsRow {
            scene,
            agent,
            n_trials: 1,
            success_rate: sr,
            avg_steps: steps,
            avg_time: 0.0,
            avg_tokens: 0.0,
            time_to_success: 0.0,
            tokens_to_success: 0.0,
        }
    }

    #[test]
    fn higher_rate_is_easier() {
        let r = rank_difficulty(&[row(1, AgentKind::Basic, 0.2, 5.0), row(2, AgentKind::Basic, 0.9, 50.0)]).unwrap();
        assert_eq!(hardest(&r, 2), [2, 1]);
    }

    #[test]
    fn equal_rates_fall_back_to_steps() {
        let r = rank_difficulty(&[row(1, AgentKind::Basic, 0.5, 9.0), row(2, AgentKind::Basic, 0.5, 7.0)]).unwrap();
        assert_eq!(r[0].scene, 2);
    }

    #[test]
    fn gaps_are_listed() {
        let rows = [row(1, AgentKind::Basic, 0.5, 9.0), row(1, AgentKind::Or, 0.5, 9.0), row(2, AgentKind::Basic, 0.5, 7.0)];
        match rank_difficulty(&rows) {
            Err(BenchError::MissingCells(m)) => assert_eq!(m, [(AgentKind::Or, 2)]),
            other => panic!("{other:?}"),
        }
    }
}
