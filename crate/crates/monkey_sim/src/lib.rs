//! Monkey and banana simulator.
//!
//! The world is a row of cells holding platforms and stacks of boxes. A
//! monkey moves along the ground, carries one small box at a time and climbs
//! onto columns whose top is at most [`CLIMB_LIMIT`] above it. Variants add
//! a second banana, a limited interaction range that masks distant boxes,
//! and boxes that may be crushed the first time they are climbed.
//!
//! [`WorldState::step`] is a pure transition over values; all randomness
//! comes from the per-episode seeded stream. [`bfs_solve`] searches the
//! determinized dynamics for a minimal plan.

mod action;
mod error;
mod observe;
mod scene;
mod solve;
mod state;

pub use action::{Action, Target};
pub use error::SimError;
pub use observe::{observe, Observation};
pub use scene::{
    builtin_scene, builtin_scenes, export_scenes, BoxSize, BoxSpec, Category, Difficulty, Entity, PlatformSpec, Scene,
    SceneFile, CLIMB_LIMIT, DEFAULT_STEP_CAP, DEFAULT_WIDTH, SHORTSIGHTED_RANGE,
};
pub use solve::{
    bfs_solve, bfs_solve_with, reaches_platform, replay, CrushOutcome, Plan, Realization, SolveOutcome, DEFAULT_STATE_CAP,
};
pub use state::{legality, reset, BoxState, Event, Monkey, Rejection, Terminal, WorldState};
