use std::fmt::Write;

use crate::{BoxSize, WorldState};

/// Text rendering of a state as the agent sees it.
///
/// Lines, in order:
///
/// ```text
/// step: <n>/<cap>
/// monkey: cell=<c> elevation=<h> carrying=<box|none>
/// box <id>: cell=<c|carried> on=<ground|platform id|box id> size=<small|large|unknown> height=<h|unknown>
/// platform <id>: cells=<a>[-<b>] height=<h> banana=<yes|no>
/// range: <r|unlimited>
/// ```
///
/// Boxes farther than the interaction range show size and height as
/// `unknown`; distance equal to the range is visible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub text: String,
    pub masked: Vec<String>,
}

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn observe(state: &WorldState) -> Observation {
    let scene = state.scene();
    let m = state.monkey();
    let mut text = String::new();
    let mut masked = Vec::new();
    let _ = writeln!(text, "step: {}/{}", state.step_count(), scene.step_cap);
    let carrying = m.carrying.map_or("none", |b| scene.boxes[b].id.as_str());
    let _ = writeln!(text, "monkey: cell={} elevation={} carrying={carrying}", m.cell, num(state.elevation()));
    for (i, spec) in scene.boxes.iter().enumerate() {
        let b = &state.boxes()[i];
        let (cell, on, visible) = match b.cell {
            None => ("carried".to_string(), "monkey".to_string(), true),
            Some(c) => {
                let stack = state.stack(c);
                let pos = stack.iter().position(|&x| x == i).expect("box is in its stack");
                let on = match pos {
                    0 => scene.platform_at(c).map_or("ground".to_string(), |p| scene.platforms[p].id.clone()),
                    k => scene.boxes[stack[k - 1]].id.clone(),
                };
                let visible = scene.interaction_range.is_none_or(|r| c.abs_diff(m.cell) <= r);
                (c.to_string(), on, visible)
            }
        };
        let (size, height) = if visible {
            let size = match spec.size {
                BoxSize::Small => "small",
                BoxSize::Large => "large",
            };
            (size.to_string(), num(b.height))
        } else {
            masked.push(spec.id.clone());
            ("unknown".to_string(), "unknown".to_string())
        };
        let _ = writeln!(text, "box {}: cell={cell} on={on} size={size} height={height}", spec.id);
    }
    for p in &scene.platforms {
        let cells = if p.width == 1 { p.start.to_string() } else { format!("{}-{}", p.start, p.start + p.width - 1) };
        let banana = if p.banana { "yes" } else { "no" };
        let _ = writeln!(text, "platform {}: cells={cells} height={} banana={banana}", p.id, num(p.height));
    }
    let range = scene.interaction_range.map_or("unlimited".to_string(), |r| r.to_string());
    let _ = write!(text, "range: {range}");
    Observation { text, masked }
}
