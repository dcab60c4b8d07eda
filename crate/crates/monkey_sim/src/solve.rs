use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{reset, Action, BoxSize, Scene, SimError, Target, WorldState};

pub const DEFAULT_STATE_CAP: usize = 2_000_000;

/// Fixed crush outcome of one box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CrushOutcome {
    Never,
    /// Crushes to `nominal * factor` the first time it is climbed.
    OnFirstClimb(f64),
}

/// One crush outcome per scene box, making the dynamics deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization(pub Vec<CrushOutcome>);

impl Realization {
    pub fn zero_crush(scene: &Scene) -> Self {
        Self(vec![CrushOutcome::Never; scene.boxes.len()])
    }

    /// Every box with a nonzero crush probability crushes by `factor`.
    pub fn all_crush(scene: &Scene, factor: f64) -> Self {
        Self(
            scene
                .boxes
                .iter()
                .map(|b| if b.crush_probability > 0.0 { CrushOutcome::OnFirstClimb(factor) } else { CrushOutcome::Never })
                .collect(),
        )
    }

    /// All 2^k combinations over the k crushable boxes.
    pub fn enumerate(scene: &Scene, factor: f64) -> Vec<Self> {
        let crushable: Vec<usize> = (0..scene.boxes.len()).filter(|&i| scene.boxes[i].crush_probability > 0.0).collect();
        (0..1u32 << crushable.len())
            .map(|mask| {
                let mut r = Self::zero_crush(scene);
                for (bit, &b) in crushable.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        r.0[b] = CrushOutcome::OnFirstClimb(factor);
                    }
                }
                r
            })
            .collect()
    }

    /// A scene whose stochastic `step` reproduces this realization exactly.
    pub fn materialize(&self, scene: &Scene) -> Scene {
        let mut s = scene.clone();
        for (b, outcome) in s.boxes.iter_mut().zip(&self.0) {
            b.crush_probability = match outcome {
                CrushOutcome::Never => 0.0,
                CrushOutcome::OnFirstClimb(_) => 1.0,
            };
        }
        let factors: Vec<f64> = self
            .0
            .iter()
            .filter_map(|o| match o {
                CrushOutcome::OnFirstClimb(f) => Some(*f),
                CrushOutcome::Never => None,
            })
            .collect();
        if let Some(&f) = factors.first() {
            assert!(factors.iter().all(|&g| g == f), "materialize needs one shared crush factor");
            s.crush_multiplier = (f, f);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub actions: Vec<Action>,
    pub explored: usize,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SolveOutcome {
    Solved(Plan),
    Unsolvable { explored: usize },
}

impl SolveOutcome {
    pub fn plan(&self) -> Option<&Plan> {
        match self {
            SolveOutcome::Solved(p) => Some(p),
            SolveOutcome::Unsolvable { .. } => None,
        }
    }
}

/// Compact encoding of everything that distinguishes search states.
fn key(s: &WorldState) -> Vec<u8> {
    let mut k = Vec::with_capacity(4 + s.boxes.len() * 3 + s.stacks.len());
    k.push(s.monkey.cell as u8);
    k.push(s.monkey.on_column as u8);
    k.push(s.monkey.carrying.map_or(u8::MAX, |b| b as u8));
    k.extend(s.boxes.iter().map(|b| b.crushed as u8));
    for stack in &s.stacks {
        k.push(stack.len() as u8);
        k.extend(stack.iter().map(|&b| b as u8));
    }
    k
}

fn candidate_actions(scene: &Scene) -> Vec<Action> {
    let mut out = vec![Action::MoveLeft, Action::MoveRight, Action::ClimbDown];
    for b in &scene.boxes {
        out.push(Action::ClimbUp(Target::Box(b.id.clone())));
        if b.size == BoxSize::Small {
            out.push(Action::Grab(b.id.clone()));
        }
    }
    for p in &scene.platforms {
        out.push(Action::ClimbUp(Target::Platform(p.id.clone())));
        out.push(Action::Place(Target::Platform(p.id.clone())));
    }
    out.extend((0..scene.width).map(|c| Action::Place(Target::Cell(c))));
    out
}

/// Minimal plan reaching any banana.
pub fn bfs_solve(scene: &Scene, realization: &Realization) -> Result<SolveOutcome, SimError> {
    bfs_solve_with(scene, realization, |s| s.banana_reached().is_some(), DEFAULT_STATE_CAP)
}

/// Minimal plan reaching a state accepted by `goal`, within the scene's step cap.
pub fn bfs_solve_with(
    scene: &Scene,
    realization: &Realization,
    goal: impl Fn(&WorldState) -> bool,
    cap: usize,
) -> Result<SolveOutcome, SimError> {
    scene.validate()?;
    if scene.width > usize::from(u8::MAX) || scene.boxes.len() >= usize::from(u8::MAX) {
        return Err(SimError::InvalidScene("search supports at most 255 cells and 254 boxes".into()));
    }
    if realization.0.len() != scene.boxes.len() {
        return Err(SimError::InvalidScene(format!(
            "realization covers {} boxes, scene has {}",
            realization.0.len(),
            scene.boxes.len()
        )));
    }
    let start = WorldState::new(Arc::new(scene.clone()), 0);
    if goal(&start) {
        return Ok(SolveOutcome::Solved(Plan { actions: vec![], explored: 1 }));
    }
    let mut crush = |b: usize| match realization.0[b] {
        CrushOutcome::Never => None,
        CrushOutcome::OnFirstClimb(f) => Some(f),
    };
    let actions = candidate_actions(scene);
    // parents[i] = (parent index, action leading to node i)
    let mut parents: Vec<(usize, Option<Action>)> = vec![(usize::MAX, None)];
    let mut seen: HashMap<Vec<u8>, usize> = HashMap::from([(key(&start), 0)]);
    let mut queue = VecDeque::from([(start, 0usize, 0u32)]);
    while let Some((state, idx, depth)) = queue.pop_front() {
        if depth >= scene.step_cap {
            continue;
        }
        for action in &actions {
            let Ok(resolved) = state.resolve(action) else { continue };
            let mut next = state.clone();
            next.apply(resolved, &mut crush);
            let k = key(&next);
            if seen.contains_key(&k) {
                continue;
            }
            if seen.len() >= cap {
                return Err(SimError::StateCapExceeded { cap });
            }
            let node = parents.len();
            seen.insert(k, node);
            parents.push((idx, Some(action.clone())));
            if goal(&next) {
                let mut actions = Vec::new();
                let mut at = node;
                while let (parent, Some(a)) = &parents[at] {
                    actions.push(a.clone());
                    at = *parent;
                }
                actions.reverse();
                return Ok(SolveOutcome::Solved(Plan { actions, explored: seen.len() }));
            }
            queue.push_back((next, node, depth + 1));
        }
    }
    Ok(SolveOutcome::Unsolvable { explored: seen.len() })
}

/// Goal predicate for standing on one named platform's banana.
pub fn reaches_platform(id: &str) -> impl Fn(&WorldState) -> bool + '_ {
    move |s| s.banana_reached().is_some_and(|p| s.scene().platforms[p].id == id)
}

/// Replays `actions` through the stochastic `step` on the materialized scene.
pub fn replay(scene: &Scene, realization: &Realization, actions: &[Action], seed: u64) -> Result<WorldState, SimError> {
    let mut state = reset(&realization.materialize(scene), seed);
    for a in actions {
        state = state.step(a)?.0;
    }
    Ok(state)
}
