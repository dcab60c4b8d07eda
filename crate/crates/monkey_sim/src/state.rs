use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Action, BoxSize, Scene, SimError, Target, CLIMB_LIMIT};

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Terminal {
    Running,
    Success,
    StepLimit,
    Abandoned,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monkey {
    pub cell: usize,
    /// Standing on top of the column (boxes or platform) at `cell`.
    pub on_column: bool,
    pub carrying: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxState {
    /// `None` while carried.
    pub cell: Option<usize>,
    pub height: f64,
    pub crushed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    StepTooHigh,
    MustClimbDown,
    OnlySmallPortable,
    OutOfReach,
    AlreadyCarrying,
    NotCarrying,
    Covered,
    UnknownTarget,
    OwnColumn,
    TooLow,
    AlreadyOnGround,
    EdgeOfWorld,
    PlatformCell,
    NotAbove,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rejection::StepTooHigh => "step too high",
            Rejection::MustClimbDown => "must climb down first",
            Rejection::OnlySmallPortable => "only small boxes portable",
            Rejection::OutOfReach => "target out of reach",
            Rejection::AlreadyCarrying => "already carrying",
            Rejection::NotCarrying => "not carrying a box",
            Rejection::Covered => "box is covered",
            Rejection::UnknownTarget => "unknown target",
            Rejection::OwnColumn => "cannot use the column you stand on",
            Rejection::TooLow => "too low to place on platform",
            Rejection::AlreadyOnGround => "already on the ground",
            Rejection::EdgeOfWorld => "edge of the world",
            Rejection::PlatformCell => "cell belongs to a platform",
            Rejection::NotAbove => "target is not above you",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Moved { cell: usize },
    Climbed { target: String, elevation: f64 },
    ClimbedDown { cell: usize },
    Grabbed { r#box: String },
    Placed { r#box: String, cell: usize },
    Crushed { r#box: String, height: f64 },
    Rejected { action: String, reason: Rejection },
    Success { platform: String },
    StepLimit,
    Abandoned,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Moved { cell } => write!(f, "moved to cell {cell}"),
            Event::Climbed { target, elevation } => write!(f, "climbed onto {target}, elevation {elevation}"),
            Event::ClimbedDown { cell } => write!(f, "climbed down at cell {cell}"),
            Event::Grabbed { r#box } => write!(f, "grabbed {box}"),
            Event::Placed { r#box, cell } => write!(f, "placed {box} at cell {cell}"),
            Event::Crushed { r#box, height } => write!(f, "{box} was crushed to height {height}"),
            Event::Rejected { action, reason } => write!(f, "rejected `{action}`: {reason}"),
            Event::Success { platform } => write!(f, "reached the banana on {platform}"),
            Event::StepLimit => f.write_str("step limit reached"),
            Event::Abandoned => f.write_str("task abandoned"),
        }
    }
}

/// An action with ids resolved to indices and target cells chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Resolved {
    Move(usize),
    ClimbBox(usize),
    ClimbPlatform(usize, usize),
    ClimbDown,
    Grab(usize),
    Place(usize),
    Abandon,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    scene: Arc<Scene>,
    pub(crate) monkey: Monkey,
    pub(crate) boxes: Vec<BoxState>,
    /// Box indices per cell, bottom first.
    pub(crate) stacks: Vec<Vec<usize>>,
    step_count: u32,
    rng: ChaCha8Rng,
    terminal: Terminal,
}

/// Initial state for `scene` with an rng stream derived from `seed`.
pub fn reset(scene: &Scene, seed: u64) -> WorldState {
    WorldState::new(Arc::new(scene.clone()), seed)
}

impl WorldState {
    pub fn new(scene: Arc<Scene>, seed: u64) -> Self {
        let mut stacks = vec![Vec::new(); scene.width];
        let boxes = scene
            .boxes
            .iter()
            .enumerate()
            .map(|(i, b)| {
                stacks[b.cell].push(i);
                BoxState { cell: Some(b.cell), height: b.size.nominal_height(), crushed: false }
            })
            .collect();
        Self {
            monkey: Monkey { cell: scene.monkey, on_column: false, carrying: None },
            boxes,
            stacks,
            step_count: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            terminal: Terminal::Running,
            scene,
        }
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn monkey(&self) -> &Monkey {
        &self.monkey
    }

    pub fn boxes(&self) -> &[BoxState] {
        &self.boxes
    }

    pub fn stack(&self, cell: usize) -> &[usize] {
        &self.stacks[cell]
    }

    pub fn step_count(&self) -> u32 {
        self.step_count
    }

    pub fn terminal(&self) -> Terminal {
        self.terminal
    }

    pub fn is_running(&self) -> bool {
        self.terminal == Terminal::Running
    }

    fn base(&self, cell: usize) -> f64 {
        self.scene.platform_at(cell).map_or(0.0, |p| self.scene.platforms[p].height)
    }

    /// Height of the walkable surface on top of `cell`.
    pub fn column_top(&self, cell: usize) -> f64 {
        self.base(cell) + self.stacks[cell].iter().map(|&b| self.boxes[b].height).sum::<f64>()
    }

    pub fn elevation(&self) -> f64 {
        if self.monkey.on_column {
            self.column_top(self.monkey.cell)
        } else {
            0.0
        }
    }

    /// Banana platform the monkey stands on, if any.
    pub fn banana_reached(&self) -> Option<usize> {
        if !self.monkey.on_column {
            return None;
        }
        let p = self.scene.platform_at(self.monkey.cell)?;
        let spec = &self.scene.platforms[p];
        (spec.banana && (self.elevation() - spec.height).abs() < EPS).then_some(p)
    }

    fn in_reach(&self, cell: usize) -> bool {
        self.monkey.cell.abs_diff(cell) <= self.scene.reach()
    }

    fn is_top(&self, b: usize) -> bool {
        self.boxes[b].cell.is_some_and(|c| self.stacks[c].last() == Some(&b))
    }

    fn own_column(&self, cell: usize) -> bool {
        self.monkey.on_column && cell == self.monkey.cell
    }

    fn climb_delta(&self, top: f64) -> Result<(), Rejection> {
        let delta = top - self.elevation();
        if delta <= EPS {
            Err(Rejection::NotAbove)
        } else if delta > CLIMB_LIMIT + EPS {
            Err(Rejection::StepTooHigh)
        } else {
            Ok(())
        }
    }

    /// Nearest reachable cell of platform `p` (lower cell on ties).
    fn platform_cell(&self, p: usize, free_only: bool) -> Option<usize> {
        self.scene.platforms[p]
            .cells()
            .filter(|&c| self.in_reach(c) && !self.own_column(c) && (!free_only || self.stacks[c].is_empty()))
            .min_by_key(|&c| c.abs_diff(self.monkey.cell))
    }

    pub(crate) fn resolve(&self, action: &Action) -> Result<Resolved, Rejection> {
        let scene = &*self.scene;
        let m = &self.monkey;
        match action {
            Action::MoveLeft | Action::MoveRight => {
                if m.on_column {
                    return Err(Rejection::MustClimbDown);
                }
                let to = match action {
                    Action::MoveLeft => m.cell.checked_sub(1),
                    _ => Some(m.cell + 1).filter(|&c| c < scene.width),
                };
                to.map(Resolved::Move).ok_or(Rejection::EdgeOfWorld)
            }
            Action::ClimbDown => {
                if m.on_column {
                    Ok(Resolved::ClimbDown)
                } else {
                    Err(Rejection::AlreadyOnGround)
                }
            }
            Action::ClimbUp(Target::Box(id)) => {
                let b = scene.box_index(id).ok_or(Rejection::UnknownTarget)?;
                let cell = self.boxes[b].cell.ok_or(Rejection::OutOfReach)?;
                if !self.is_top(b) {
                    return Err(Rejection::Covered);
                }
                if !self.in_reach(cell) {
                    return Err(Rejection::OutOfReach);
                }
                if self.own_column(cell) {
                    return Err(Rejection::OwnColumn);
                }
                self.climb_delta(self.column_top(cell))?;
                Ok(Resolved::ClimbBox(b))
            }
            Action::ClimbUp(Target::Platform(id)) => {
                let p = scene.platform_index(id).ok_or(Rejection::UnknownTarget)?;
                if m.on_column && scene.platform_at(m.cell) == Some(p) && self.stack(m.cell).is_empty() {
                    return Err(Rejection::NotAbove);
                }
                let cell = self.platform_cell(p, true).ok_or(Rejection::OutOfReach)?;
                self.climb_delta(scene.platforms[p].height)?;
                Ok(Resolved::ClimbPlatform(p, cell))
            }
            Action::ClimbUp(Target::Cell(_)) => Err(Rejection::UnknownTarget),
            Action::Grab(id) => {
                let b = scene.box_index(id).ok_or(Rejection::UnknownTarget)?;
                if scene.boxes[b].size != BoxSize::Small {
                    return Err(Rejection::OnlySmallPortable);
                }
                if m.carrying.is_some() {
                    return Err(Rejection::AlreadyCarrying);
                }
                if m.on_column {
                    return Err(Rejection::MustClimbDown);
                }
                let cell = self.boxes[b].cell.ok_or(Rejection::AlreadyCarrying)?;
                if !self.in_reach(cell) {
                    return Err(Rejection::OutOfReach);
                }
                if scene.platform_at(cell).is_some() {
                    return Err(Rejection::PlatformCell);
                }
                if !self.is_top(b) {
                    return Err(Rejection::Covered);
                }
                Ok(Resolved::Grab(b))
            }
            Action::Place(target) => {
                if m.carrying.is_none() {
                    return Err(Rejection::NotCarrying);
                }
                match target {
                    Target::Cell(c) => {
                        let c = *c;
                        if c >= scene.width {
                            return Err(Rejection::EdgeOfWorld);
                        }
                        if scene.platform_at(c).is_some() {
                            return Err(Rejection::PlatformCell);
                        }
                        if !self.in_reach(c) {
                            return Err(Rejection::OutOfReach);
                        }
                        if self.own_column(c) {
                            return Err(Rejection::OwnColumn);
                        }
                        Ok(Resolved::Place(c))
                    }
                    Target::Platform(id) => {
                        let p = scene.platform_index(id).ok_or(Rejection::UnknownTarget)?;
                        if self.elevation() < scene.platforms[p].height - 1.0 - EPS {
                            return Err(Rejection::TooLow);
                        }
                        self.platform_cell(p, false).map(Resolved::Place).ok_or(Rejection::OutOfReach)
                    }
                    Target::Box(_) => Err(Rejection::UnknownTarget),
                }
            }
            Action::Abandon => Ok(Resolved::Abandon),
        }
    }

    /// Applies a resolved action; `crush` yields the height multiplier for
    /// a box about to be climbed for the first time, or `None`.
    pub(crate) fn apply(&mut self, r: Resolved, crush: &mut dyn FnMut(usize) -> Option<f64>) -> Vec<Event> {
        let scene = Arc::clone(&self.scene);
        let mut events = Vec::new();
        match r {
            Resolved::Move(to) => {
                self.monkey.cell = to;
                events.push(Event::Moved { cell: to });
            }
            Resolved::ClimbBox(b) => {
                let cell = self.boxes[b].cell.expect("climbed box is placed");
                self.monkey.cell = cell;
                self.monkey.on_column = true;
                let spec = &scene.boxes[b];
                let mut crushed = None;
                if !self.boxes[b].crushed && spec.crush_probability > 0.0 {
                    if let Some(factor) = crush(b) {
                        let state = &mut self.boxes[b];
                        state.height = spec.size.nominal_height() * factor;
                        state.crushed = true;
                        crushed = Some(state.height);
                    }
                }
                events.push(Event::Climbed { target: spec.id.clone(), elevation: self.elevation() });
                if let Some(height) = crushed {
                    events.push(Event::Crushed { r#box: spec.id.clone(), height });
                }
            }
            Resolved::ClimbPlatform(p, cell) => {
                self.monkey.cell = cell;
                self.monkey.on_column = true;
                events.push(Event::Climbed { target: scene.platforms[p].id.clone(), elevation: self.elevation() });
            }
            Resolved::ClimbDown => {
                self.monkey.on_column = false;
                events.push(Event::ClimbedDown { cell: self.monkey.cell });
            }
            Resolved::Grab(b) => {
                let cell = self.boxes[b].cell.take().expect("grabbed box is placed");
                self.stacks[cell].pop();
                self.monkey.carrying = Some(b);
                events.push(Event::Grabbed { r#box: scene.boxes[b].id.clone() });
            }
            Resolved::Place(cell) => {
                let b = self.monkey.carrying.take().expect("placing requires a carried box");
                self.boxes[b].cell = Some(cell);
                self.stacks[cell].push(b);
                events.push(Event::Placed { r#box: scene.boxes[b].id.clone(), cell });
            }
            Resolved::Abandon => {}
        }
        events
    }

    /// Advances one step. Illegal actions are rejected but still consume the step.
    pub fn step(&self, action: &Action) -> Result<(WorldState, Vec<Event>), SimError> {
        if let Some(name) = self.terminal_name() {
            return Err(SimError::Terminal(name));
        }
        let mut next = self.clone();
        let mut events = match self.resolve(action) {
            Ok(Resolved::Abandon) => {
                next.terminal = Terminal::Abandoned;
                vec![Event::Abandoned]
            }
            Ok(r) => {
                let mut rng = next.rng.clone();
                let (lo, hi) = self.scene.crush_multiplier;
                let scene = Arc::clone(&self.scene);
                let events = next.apply(r, &mut |b| {
                    let u: f64 = rng.gen();
                    (u < scene.boxes[b].crush_probability).then(|| rng.gen_range(lo..=hi))
                });
                next.rng = rng;
                events
            }
            Err(reason) => vec![Event::Rejected { action: action.to_string(), reason }],
        };
        next.step_count += 1;
        if next.terminal == Terminal::Running {
            if let Some(p) = next.banana_reached() {
                next.terminal = Terminal::Success;
                events.push(Event::Success { platform: self.scene.platforms[p].id.clone() });
            } else if next.step_count >= self.scene.step_cap {
                next.terminal = Terminal::StepLimit;
                events.push(Event::StepLimit);
            }
        }
        Ok((next, events))
    }

    fn terminal_name(&self) -> Option<&'static str> {
        match self.terminal {
            Terminal::Running => None,
            Terminal::Success => Some("success"),
            Terminal::StepLimit => Some("step limit"),
            Terminal::Abandoned => Some("abandoned"),
        }
    }
}

/// Pure legality check: `Ok` or the reason `step` would reject the action.
pub fn legality(state: &WorldState, action: &Action) -> Result<(), Rejection> {
    state.resolve(action).map(|_| ())
}
