use std::collections::HashMap;
use std::path::PathBuf;

use agents::{run_episode, AgentConfig, AgentKind, PlanFollower, TerminalCause, TrialRecord};
use context_core::{SessionError, SessionFunction};
use monkey_sim::{bfs_solve, Action, Realization, Scene};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential without the `parallel` feature.
    #[default]
    Parallel,
}

/// Builds a fresh session for one trial.
pub type SessionFactory<'a> = dyn Fn(AgentKind, &Scene, u64) -> Result<Box<dyn SessionFunction>, SessionError> + Sync + 'a;

#[derive(Debug, Clone)]
pub struct MatrixConfig {
    pub agents: Vec<AgentKind>,
    pub scenes: Vec<Scene>,
    /// Trials per (agent, scene) cell.
    pub n: usize,
    pub seed0: u64,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
    pub execution: Execution,
    pub transcript_dir: Option<PathBuf>,
}

impl MatrixConfig {
    pub fn new(agents: Vec<AgentKind>, scenes: Vec<Scene>, n: usize, seed0: u64) -> Self {
        Self { agents, scenes, n, seed0, workers: 0, execution: Execution::default(), transcript_dir: None }
    }
}

fn failed(agent: AgentKind, scene: &Scene, seed: u64, error: String) -> TrialRecord {
    TrialRecord {
        agent,
        scene: scene.id,
        seed,
        success: false,
        steps: 0,
        wall_time: 0.0,
        tokens: 0,
        prompt_tokens: 0,
        completion_tokens: 0,
        cause: TerminalCause::SessionError,
        transcript_path: None,
        error: Some(error),
    }
}

fn trial(config: &MatrixConfig, factory: &SessionFactory, agent: AgentKind, scene: &Scene, t: usize) -> TrialRecord {
    let seed = config.seed0.wrapping_add(t as u64);
    let mut session = match factory(agent, scene, seed) {
        Ok(s) => s,
        Err(e) => return failed(agent, scene, seed, e.to_string()),
    };
    let mut out = run_episode(&AgentConfig::new(agent), scene, seed, &mut session);
    if let Some(dir) = &config.transcript_dir {
        if let Err(e) = out.write_transcript(dir) {
            out.record.error.get_or_insert_with(|| format!("transcript: {e}"));
        }
    }
    out.record
}

/// `n` trials per (agent, scene) with seeds `seed0 + trial index`, in
/// agent-major, scene, trial order regardless of execution mode.
pub fn run_matrix(config: &MatrixConfig, factory: &SessionFactory) -> Vec<TrialRecord> {
    let jobs: Vec<(AgentKind, &Scene, usize)> = config
        .agents
        .iter()
        .flat_map(|&a| config.scenes.iter().flat_map(move |s| (0..config.n).map(move |t| (a, s, t))))
        .collect();
    let run = |&(a, s, t): &(AgentKind, &Scene, usize)| trial(config, factory, a, s, t);
    match config.execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            let go = || jobs.par_iter().map(run).collect();
            if config.workers == 0 {
                go()
            } else {
                match rayon::ThreadPoolBuilder::new().num_threads(config.workers).build() {
                    Ok(pool) => pool.install(go),
                    Err(_) => go(),
                }
            }
        }
        _ => jobs.iter().map(run).collect(),
    }
}

/// Scripted factory: every trial follows the scene's zero-crush optimal plan.
pub fn follower_factory(scenes: &[Scene]) -> Result<impl Fn(AgentKind, &Scene, u64) -> Result<Box<dyn SessionFunction>, SessionError> + Sync, SessionError> {
    let mut plans: HashMap<u32, Vec<Action>> = HashMap::new();
    for s in scenes {
        let plan = bfs_solve(s, &Realization::zero_crush(s))
            .map_err(|e| SessionError::Config(e.to_string()))?
            .plan()
            .map(|p| p.actions.clone())
            .ok_or_else(|| SessionError::Config(format!("scene {} has no plan", s.id)))?;
        plans.insert(s.id, plan);
    }
    Ok(move |_: AgentKind, scene: &Scene, _: u64| -> Result<Box<dyn SessionFunction>, SessionError> {
        match plans.get(&scene.id) {
            Some(p) => Ok(Box::new(PlanFollower::new(p.clone()))),
            None => PlanFollower::for_scene(scene).map(|f| Box::new(f) as Box<dyn SessionFunction>),
        }
    })
}
