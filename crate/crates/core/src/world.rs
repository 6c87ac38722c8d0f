//! The sandbox scene: entities on the canvas grid, actions, and the settle
//! phase that runs ascent and gravity rounds until nothing moves.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::tile::GridPos;

pub const MAX_GROWTH: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Rocket,
    Tree,
    Surface,
    Asteroid,
}

impl EntityKind {
    pub fn name(self) -> &'static str {
        match self {
            EntityKind::Rocket => "rocket",
            EntityKind::Tree => "tree",
            EntityKind::Surface => "surface",
            EntityKind::Asteroid => "asteroid",
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Takeoff,
    Rain,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Takeoff => "takeoff",
            Action::Rain => "rain",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Motion {
    Resting,
    Ascending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entity {
    pub id: u32,
    pub kind: EntityKind,
    pub pos: GridPos,
    /// Trees only; always 0 for other kinds.
    pub growth_stage: u8,
    pub motion: Motion,
}

/// An entity that flew off the top of the canvas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceEntry {
    pub id: u32,
    pub kind: EntityKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum WorldError {
    #[error("cell {0} is occupied")]
    Occupied(GridPos),
    #[error("cell {0} is outside the world")]
    OutOfBounds(GridPos),
}

/// Observable consequences of world operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorldEffect {
    Spawned {
        id: u32,
        kind: EntityKind,
        pos: GridPos,
    },
    Ascending {
        id: u32,
        kind: EntityKind,
    },
    EnteredSpace {
        id: u32,
        kind: EntityKind,
    },
    /// An ascending entity hit something above it and came to rest.
    Blocked {
        id: u32,
    },
    Fell {
        id: u32,
        from: GridPos,
        to: GridPos,
    },
    Grew {
        id: u32,
        stage: u8,
    },
    FullyGrown {
        id: u32,
    },
    AlreadyFull {
        id: u32,
    },
    NoTarget {
        action: Action,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SettleReport {
    pub effects: Vec<WorldEffect>,
    /// Rounds in which something moved.
    pub rounds: usize,
    pub quiescent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct World {
    width: u32,
    height: u32,
    entities: BTreeMap<u32, Entity>,
    /// Row-major occupancy, `row * width + col`.
    cells: Vec<Option<u32>>,
    space: Vec<SpaceEntry>,
    next_id: u32,
}

impl World {
    pub fn new(width: u32, height: u32) -> Self {
        World {
            width,
            height,
            entities: BTreeMap::new(),
            cells: vec![None; (width * height) as usize],
            space: Vec::new(),
            next_id: 1,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// On-canvas entities in id order.
    pub fn entities(&self) -> impl Iterator<Item = &Entity> {
        self.entities.values()
    }

    pub fn entity(&self, id: u32) -> Option<&Entity> {
        self.entities.get(&id)
    }

    pub fn space(&self) -> &[SpaceEntry] {
        &self.space
    }

    pub fn contains(&self, pos: GridPos) -> bool {
        pos.col < self.width && pos.row < self.height
    }

    pub fn occupant(&self, pos: GridPos) -> Option<u32> {
        if self.contains(pos) {
            self.cells[self.index(pos)]
        } else {
            None
        }
    }

    /// Row 0 or something directly below.
    pub fn is_supported(&self, pos: GridPos) -> bool {
        pos.row == 0 || self.occupant(GridPos::new(pos.col, pos.row - 1)).is_some()
    }

    fn index(&self, pos: GridPos) -> usize {
        (pos.row * self.width + pos.col) as usize
    }

    fn move_entity(&mut self, id: u32, to: GridPos) {
        let from = self.entities[&id].pos;
        let (fi, ti) = (self.index(from), self.index(to));
        self.cells[fi] = None;
        self.cells[ti] = Some(id);
        self.entities.get_mut(&id).unwrap().pos = to;
    }

    /// Adds a resting entity at `pos`. Does not settle.
    pub fn spawn(&mut self, kind: EntityKind, pos: GridPos) -> Result<WorldEffect, WorldError> {
        if !self.contains(pos) {
            return Err(WorldError::OutOfBounds(pos));
        }
        if self.occupant(pos).is_some() {
            return Err(WorldError::Occupied(pos));
        }
        let id = self.next_id;
        self.next_id += 1;
        self.entities.insert(
            id,
            Entity {
                id,
                kind,
                pos,
                growth_stage: 0,
                motion: Motion::Resting,
            },
        );
        let idx = self.index(pos);
        self.cells[idx] = Some(id);
        Ok(WorldEffect::Spawned { id, kind, pos })
    }

    /// Takeoff launches the most recently spawned entity still on the canvas.
    /// Rain grows every tree by one stage, up to [`MAX_GROWTH`].
    pub fn apply_action(&mut self, action: Action) -> Vec<WorldEffect> {
        match action {
            Action::Takeoff => {
                let Some(target) = self.entities.values_mut().next_back() else {
                    return vec![WorldEffect::NoTarget { action }];
                };
                target.motion = Motion::Ascending;
                vec![WorldEffect::Ascending {
                    id: target.id,
                    kind: target.kind,
                }]
            }
            Action::Rain => {
                let mut effects = Vec::new();
                for tree in self
                    .entities
                    .values_mut()
                    .filter(|e| e.kind == EntityKind::Tree)
                {
                    if tree.growth_stage >= MAX_GROWTH {
                        effects.push(WorldEffect::AlreadyFull { id: tree.id });
                        continue;
                    }
                    tree.growth_stage += 1;
                    effects.push(WorldEffect::Grew {
                        id: tree.id,
                        stage: tree.growth_stage,
                    });
                    if tree.growth_stage == MAX_GROWTH {
                        effects.push(WorldEffect::FullyGrown { id: tree.id });
                    }
                }
                if effects.is_empty() {
                    effects.push(WorldEffect::NoTarget { action });
                }
                effects
            }
        }
    }

    /// Most rounds a settle of the current world may take.
    pub fn settle_bound(&self) -> usize {
        (self.height as usize + 1) * self.entities.len()
    }

    /// Runs ascent/gravity rounds until quiescent.
    pub fn settle(&mut self) -> SettleReport {
        self.settle_rounds(usize::MAX)
    }

    /// Runs at most `max_rounds` rounds (and never more than
    /// [`World::settle_bound`]).
    ///
    /// Each round first moves every ascending entity up one row, topmost
    /// first; leaving the top row sends it to space, and an occupied cell
    /// above stops it. Then every resting entity without support drops one
    /// row, bottom-most first, so a floating stack falls together.
    pub fn settle_rounds(&mut self, max_rounds: usize) -> SettleReport {
        let limit = max_rounds.min(self.settle_bound());
        let mut effects = Vec::new();
        let mut fall_start: BTreeMap<u32, GridPos> = BTreeMap::new();
        let mut rounds = 0;

        loop {
            if self.is_quiescent() {
                break;
            }
            if rounds == limit {
                break;
            }
            rounds += 1;

            let mut rising: Vec<(u32, GridPos)> = self
                .entities
                .values()
                .filter(|e| e.motion == Motion::Ascending)
                .map(|e| (e.id, e.pos))
                .collect();
            rising.sort_by(|a, b| b.1.row.cmp(&a.1.row).then(a.0.cmp(&b.0)));
            for (id, pos) in rising {
                if pos.row + 1 >= self.height {
                    let entity = self.entities.remove(&id).unwrap();
                    let idx = self.index(pos);
                    self.cells[idx] = None;
                    fall_start.remove(&id);
                    self.space.push(SpaceEntry {
                        id,
                        kind: entity.kind,
                    });
                    effects.push(WorldEffect::EnteredSpace {
                        id,
                        kind: entity.kind,
                    });
                } else {
                    let above = GridPos::new(pos.col, pos.row + 1);
                    if self.occupant(above).is_some() {
                        self.entities.get_mut(&id).unwrap().motion = Motion::Resting;
                        effects.push(WorldEffect::Blocked { id });
                    } else {
                        self.move_entity(id, above);
                    }
                }
            }

            let mut resting: Vec<(u32, GridPos)> = self
                .entities
                .values()
                .filter(|e| e.motion == Motion::Resting)
                .map(|e| (e.id, e.pos))
                .collect();
            resting.sort_by(|a, b| a.1.row.cmp(&b.1.row).then(a.0.cmp(&b.0)));
            for (id, pos) in resting {
                if !self.is_supported(pos) {
                    fall_start.entry(id).or_insert(pos);
                    self.move_entity(id, GridPos::new(pos.col, pos.row - 1));
                }
            }
        }

        for (id, from) in fall_start {
            if let Some(entity) = self.entities.get(&id) {
                if entity.pos != from {
                    effects.push(WorldEffect::Fell {
                        id,
                        from,
                        to: entity.pos,
                    });
                }
            }
        }

        SettleReport {
            effects,
            rounds,
            quiescent: self.is_quiescent(),
        }
    }

    /// No ascending entity and every resting entity supported.
    pub fn is_quiescent(&self) -> bool {
        self.entities
            .values()
            .all(|e| e.motion == Motion::Resting && self.is_supported(e.pos))
    }

    /// Checks the structural invariants; returns a description of the first
    /// violation found.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut seen = std::collections::HashSet::new();
        for e in self.entities.values() {
            if !self.contains(e.pos) {
                return Err(format!("entity {} off canvas at {}", e.id, e.pos));
            }
            if !seen.insert(e.pos) {
                return Err(format!("overlap at {}", e.pos));
            }
            if self.occupant(e.pos) != Some(e.id) {
                return Err(format!("occupancy grid out of sync at {}", e.pos));
            }
            if e.growth_stage > MAX_GROWTH || (e.kind != EntityKind::Tree && e.growth_stage != 0) {
                return Err(format!("bad growth stage on entity {}", e.id));
            }
        }
        if self.cells.iter().flatten().count() != self.entities.len() {
            return Err("stale occupancy cells".into());
        }
        for s in &self.space {
            if self.entities.contains_key(&s.id) {
                return Err(format!("entity {} both in space and on canvas", s.id));
            }
        }
        Ok(())
    }

    /// Checks that every resting entity is supported.
    pub fn check_supported(&self) -> Result<(), String> {
        match self
            .entities
            .values()
            .find(|e| e.motion == Motion::Resting && !self.is_supported(e.pos))
        {
            Some(e) => Err(format!("entity {} unsupported at {}", e.id, e.pos)),
            None => Ok(()),
        }
    }

    /// Text picture of the canvas, top row first, then a `space:` line.
    pub fn render_ascii(&self) -> String {
        let mut out = String::new();
        for row in (0..self.height).rev() {
            for col in 0..self.width {
                let glyph = match self.occupant(GridPos::new(col, row)) {
                    None => '.',
                    Some(id) => {
                        let e = &self.entities[&id];
                        match e.kind {
                            EntityKind::Rocket => 'R',
                            EntityKind::Tree if e.growth_stage >= MAX_GROWTH => 'T',
                            EntityKind::Tree => 't',
                            EntityKind::Surface => '=',
                            EntityKind::Asteroid => '*',
                        }
                    }
                };
                out.push(glyph);
            }
            out.push('\n');
        }
        out.push_str("space:");
        for s in &self.space {
            out.push_str(&format!(" {}#{}", s.kind, s.id));
        }
        out
    }
}
