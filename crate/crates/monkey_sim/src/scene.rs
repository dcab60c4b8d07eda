use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::SimError;

pub const DEFAULT_WIDTH: usize = 12;
pub const DEFAULT_STEP_CAP: u32 = 300;
/// Sight and reach radius of the shortsighted variants.
pub const SHORTSIGHTED_RANGE: usize = 2;
/// Largest height difference a single climb can cover.
pub const CLIMB_LIMIT: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Classic,
    DualBananas,
    Shortsighted,
    Overweight,
    Comprehensive,
}

impl Category {
    pub const ALL: [Category; 5] =
        [Category::Classic, Category::DualBananas, Category::Shortsighted, Category::Overweight, Category::Comprehensive];

    pub fn has_crush(self) -> bool {
        matches!(self, Category::Overweight | Category::Comprehensive)
    }

    pub fn is_shortsighted(self) -> bool {
        matches!(self, Category::Shortsighted | Category::Comprehensive)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxSize {
    Small,
    Large,
}

impl BoxSize {
    pub fn nominal_height(self) -> f64 {
        match self {
            BoxSize::Small => 1.0,
            BoxSize::Large => 2.0,
        }
    }
}

impl fmt::Display for BoxSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoxSize::Small => "small",
            BoxSize::Large => "large",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub id: String,
    pub size: BoxSize,
    pub cell: usize,
    pub crush_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformSpec {
    pub id: String,
    pub start: usize,
    pub width: usize,
    pub height: f64,
    pub banana: bool,
}

impl PlatformSpec {
    pub fn cells(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.width
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SceneFile", into = "SceneFile")]
pub struct Scene {
    pub id: u32,
    pub category: Category,
    pub difficulty: Difficulty,
    pub width: usize,
    /// `None` means unlimited sight and reach.
    pub interaction_range: Option<usize>,
    pub step_cap: u32,
    pub monkey: usize,
    /// Boxes sharing a cell stack in list order, bottom first.
    pub boxes: Vec<BoxSpec>,
    pub platforms: Vec<PlatformSpec>,
    /// Crushed height is nominal height times a uniform draw from this range.
    pub crush_multiplier: (f64, f64),
}

impl Scene {
    pub fn box_index(&self, id: &str) -> Option<usize> {
        self.boxes.iter().position(|b| b.id == id)
    }

    pub fn platform_index(&self, id: &str) -> Option<usize> {
        self.platforms.iter().position(|p| p.id == id)
    }

    pub fn platform_at(&self, cell: usize) -> Option<usize> {
        self.platforms.iter().position(|p| p.cells().contains(&cell))
    }

    pub fn bananas(&self) -> impl Iterator<Item = usize> + '_ {
        self.platforms.iter().enumerate().filter(|(_, p)| p.banana).map(|(i, _)| i)
    }

    /// Horizontal reach of grab, climb and place.
    pub fn reach(&self) -> usize {
        self.interaction_range.map_or(1, |r| r.min(1))
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidScene(format!("scene {}: {m}", self.id)));
        if self.width == 0 || self.monkey >= self.width {
            return bad(format!("monkey cell {} outside width {}", self.monkey, self.width));
        }
        if self.bananas().next().is_none() {
            return bad("no banana".into());
        }
        let mut ids = HashSet::new();
        for b in &self.boxes {
            if !ids.insert(b.id.as_str()) {
                return bad(format!("duplicate id {}", b.id));
            }
            if b.cell >= self.width {
                return bad(format!("box {} outside the world", b.id));
            }
            if !(0.0..=1.0).contains(&b.crush_probability) {
                return bad(format!("box {} crush probability {}", b.id, b.crush_probability));
            }
        }
        let mut covered = HashSet::new();
        for p in &self.platforms {
            if !ids.insert(p.id.as_str()) {
                return bad(format!("duplicate id {}", p.id));
            }
            if p.width == 0 || p.start + p.width > self.width || !(p.height > 0.0) {
                return bad(format!("platform {} has an invalid extent", p.id));
            }
            if !p.cells().all(|c| covered.insert(c)) {
                return bad(format!("platform {} overlaps another platform", p.id));
            }
        }
        let (lo, hi) = self.crush_multiplier;
        if !(0.0 < lo && lo <= hi && hi <= 1.0) {
            return bad(format!("crush multiplier range ({lo}, {hi})"));
        }
        if self.step_cap == 0 {
            return bad("step cap must be positive".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SimError> {
        serde_json::from_str(text).map_err(|e| SimError::InvalidScene(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = fs::read_to_string(path).map_err(|source| SimError::Io { path: path.into(), source })?;
        serde_json::from_str(&text).map_err(|source| SimError::Json { path: path.into(), source })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Entity {
    Monkey { cell: usize },
    Box { id: String, size: BoxSize, cell: usize },
    Platform { id: String, cell: usize, width: usize, height: f64 },
    Banana { platform: String },
}

/// On-disk scene layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFile {
    pub id: u32,
    pub category: Category,
    pub difficulty: Difficulty,
    pub width: usize,
    pub interaction_range: Option<usize>,
    pub step_cap: u32,
    pub entities: Vec<Entity>,
    #[serde(default)]
    pub crush: BTreeMap<String, f64>,
    #[serde(default = "default_multiplier")]
    pub crush_multiplier: [f64; 2],
}

fn default_multiplier() -> [f64; 2] {
    [0.5, 0.7]
}

impl From<Scene> for SceneFile {
    fn from(s: Scene) -> Self {
        let mut entities = vec![Entity::Monkey { cell: s.monkey }];
        entities.extend(s.boxes.iter().map(|b| Entity::Box { id: b.id.clone(), size: b.size, cell: b.cell }));
        entities.extend(
            s.platforms.iter().map(|p| Entity::Platform { id: p.id.clone(), cell: p.start, width: p.width, height: p.height }),
        );
        entities.extend(s.platforms.iter().filter(|p| p.banana).map(|p| Entity::Banana { platform: p.id.clone() }));
        let crush = s.boxes.iter().filter(|b| b.crush_probability > 0.0).map(|b| (b.id.clone(), b.crush_probability)).collect();
        SceneFile {
            id: s.id,
            category: s.category,
            difficulty: s.difficulty,
            width: s.width,
            interaction_range: s.interaction_range,
            step_cap: s.step_cap,
            entities,
            crush,
            crush_multiplier: [s.crush_multiplier.0, s.crush_multiplier.1],
        }
    }
}

impl TryFrom<SceneFile> for Scene {
    type Error = SimError;

    fn try_from(f: SceneFile) -> Result<Self, SimError> {
        let mut monkey = None;
        let mut boxes = Vec::new();
        let mut platforms = Vec::new();
        let mut bananas = Vec::new();
        for e in f.entities {
            match e {
                Entity::Monkey { cell } => {
                    if monkey.replace(cell).is_some() {
                        return Err(SimError::InvalidScene(format!("scene {}: more than one monkey", f.id)));
                    }
                }
                Entity::Box { id, size, cell } => boxes.push(BoxSpec { id, size, cell, crush_probability: 0.0 }),
                Entity::Platform { id, cell, width, height } => {
                    platforms.push(PlatformSpec { id, start: cell, width, height, banana: false })
                }
                Entity::Banana { platform } => bananas.push(platform),
            }
        }
        for id in bananas {
            let p = platforms
                .iter_mut()
                .find(|p| p.id == id)
                .ok_or_else(|| SimError::InvalidScene(format!("banana on unknown platform {id}")))?;
            p.banana = true;
        }
        for (id, p) in f.crush {
            let b = boxes
                .iter_mut()
                .find(|b| b.id == id)
                .ok_or_else(|| SimError::InvalidScene(format!("crush entry for unknown box {id}")))?;
            b.crush_probability = p;
        }
        let scene = Scene {
            id: f.id,
            category: f.category,
            difficulty: f.difficulty,
            width: f.width,
            interaction_range: f.interaction_range,
            step_cap: f.step_cap,
            monkey: monkey.ok_or_else(|| SimError::InvalidScene(format!("scene {}: no monkey", f.id)))?,
            boxes,
            platforms,
            crush_multiplier: (f.crush_multiplier[0], f.crush_multiplier[1]),
        };
        scene.validate()?;
        Ok(scene)
    }
}

fn small(id: &str, cell: usize) -> BoxSpec {
    BoxSpec { id: id.into(), size: BoxSize::Small, cell, crush_probability: 0.0 }
}

fn large(id: &str, cell: usize) -> BoxSpec {
    BoxSpec { id: id.into(), size: BoxSize::Large, cell, crush_probability: 0.0 }
}

fn platform(id: &str, start: usize, width: usize, height: f64, banana: bool) -> PlatformSpec {
    PlatformSpec { id: id.into(), start, width, height, banana }
}

fn base(id: u32, category: Category, difficulty: Difficulty, monkey: usize, boxes: Vec<BoxSpec>, platforms: Vec<PlatformSpec>) -> Scene {
    Scene {
        id,
        category,
        difficulty,
        width: DEFAULT_WIDTH,
        interaction_range: None,
        step_cap: DEFAULT_STEP_CAP,
        monkey,
        boxes,
        platforms,
        crush_multiplier: (0.5, 0.7),
    }
}

fn classic(id: u32, category: Category, difficulty: Difficulty) -> Scene {
    match difficulty {
        Difficulty::Easy => base(id, category, difficulty, 2, vec![small("S0", 4)], vec![platform("P0", 7, 1, 2.0, true)]),
        Difficulty::Medium => {
            base(id, category, difficulty, 1, vec![small("S0", 3), large("L0", 8)], vec![platform("P0", 9, 1, 3.0, true)])
        }
        Difficulty::Hard => base(
            id,
            category,
            difficulty,
            0,
            vec![small("S0", 2), small("S1", 4), large("L0", 6)],
            vec![platform("P1", 7, 2, 3.0, false), platform("P2", 9, 1, 5.0, true)],
        ),
    }
}

fn dual(id: u32, difficulty: Difficulty) -> Scene {
    let c = Category::DualBananas;
    match difficulty {
        Difficulty::Easy => base(
            id,
            c,
            difficulty,
            5,
            vec![small("S0", 5)],
            vec![platform("P0", 1, 1, 2.0, true), platform("P1", 9, 1, 2.0, true)],
        ),
        Difficulty::Medium => base(
            id,
            c,
            difficulty,
            5,
            vec![small("S0", 5), large("L0", 2), large("L1", 8)],
            vec![platform("P0", 1, 1, 3.0, true), platform("P1", 9, 1, 3.0, true)],
        ),
        Difficulty::Hard => base(
            id,
            c,
            difficulty,
            4,
            vec![small("S0", 5), large("L0", 2)],
            vec![platform("P0", 1, 1, 3.0, true), platform("P1", 10, 1, 2.0, true)],
        ),
    }
}

fn with_crush(mut s: Scene, spare_cell: usize) -> Scene {
    let spare = format!("S{}", s.boxes.iter().filter(|b| b.size == BoxSize::Small).count());
    s.boxes.push(small(&spare, spare_cell));
    for b in &mut s.boxes {
        b.crush_probability = match b.size {
            BoxSize::Large => 0.5,
            BoxSize::Small => 0.3,
        };
    }
    s
}

fn shortsighted(mut s: Scene) -> Scene {
    s.interaction_range = Some(SHORTSIGHTED_RANGE);
    s
}

/// Spare-box cells for the crush variants, indexed by difficulty.
const SPARE_CELLS: [usize; 3] = [0, 0, 1];

/// Scenes 1-15: three difficulties per category in category order.
pub fn builtin_scenes() -> Vec<Scene> {
    let mut out = Vec::with_capacity(15);
    for (ci, category) in Category::ALL.into_iter().enumerate() {
        for (di, difficulty) in [Difficulty::Easy, Difficulty::Medium, Difficulty::Hard].into_iter().enumerate() {
            let id = (ci * 3 + di + 1) as u32;
            let scene = match category {
                Category::Classic | Category::Shortsighted => classic(id, category, difficulty),
                Category::DualBananas => dual(id, difficulty),
                Category::Overweight | Category::Comprehensive => with_crush(classic(id, category, difficulty), SPARE_CELLS[di]),
            };
            out.push(if category.is_shortsighted() { shortsighted(scene) } else { scene });
        }
    }
    out
}

pub fn builtin_scene(id: u32) -> Result<Scene, SimError> {
    builtin_scenes().into_iter().find(|s| s.id == id).ok_or(SimError::UnknownScene(id))
}

/// Writes `scene_<id>.json` for every built-in scene.
pub fn export_scenes(dir: &Path) -> Result<Vec<PathBuf>, SimError> {
    fs::create_dir_all(dir).map_err(|source| SimError::Io { path: dir.into(), source })?;
    builtin_scenes()
        .iter()
        .map(|s| {
            let path = dir.join(format!("scene_{:02}.json", s.id));
            fs::write(&path, s.to_json() + "\n").map_err(|source| SimError::Io { path: path.clone(), source })?;
            Ok(path)
        })
        .collect()
}
