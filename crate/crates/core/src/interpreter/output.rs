use std::fmt;

use serde::Serialize;

use crate::facts::Fact;
use crate::math::Verdict;
use crate::maze::{Heading, MazeEvent, Pose};
use crate::program::Diagnostic;
use crate::tile::TileKind;
use crate::world::{EntityKind, World, WorldEffect};

use super::Mode;

/// One observable effect of a consumed event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepEvent {
    Spawned {
        id: u32,
        entity: EntityKind,
        col: u32,
        row: u32,
    },
    Ascending {
        id: u32,
        entity: EntityKind,
    },
    EnteredSpace {
        id: u32,
        entity: EntityKind,
    },
    Blocked {
        id: u32,
    },
    Fell {
        id: u32,
        col: u32,
        row: u32,
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
    LoopPending {
        tile: TileKind,
    },
    Moved {
        col: u32,
        row: u32,
        heading: Heading,
    },
    Turned {
        col: u32,
        row: u32,
        heading: Heading,
    },
    Crashed {
        col: u32,
        row: u32,
        heading: Heading,
    },
    ReachedPlanet {
        col: u32,
        row: u32,
        heading: Heading,
    },
    LoopCapped {
        iterations: usize,
    },
    Answer {
        answer: Option<u32>,
    },
    Symbol {
        tile: TileKind,
    },
    Judged {
        verdict: Verdict,
    },
    Removed {
        tile: TileKind,
        col: u32,
        row: u32,
    },
    Ticked {
        n: u32,
    },
    ModeSet {
        mode: Mode,
    },
    MazeLoaded {
        width: u32,
        height: u32,
    },
    EquationSet {
        equation: String,
    },
    Reset,
}

impl StepEvent {
    /// Converts a world effect; `NoTarget` is a diagnostic, not an event.
    pub(crate) fn from_world(effect: WorldEffect) -> Result<StepEvent, Diagnostic> {
        Ok(match effect {
            WorldEffect::Spawned { id, kind, pos } => StepEvent::Spawned {
                id,
                entity: kind,
                col: pos.col,
                row: pos.row,
            },
            WorldEffect::Ascending { id, kind } => StepEvent::Ascending { id, entity: kind },
            WorldEffect::EnteredSpace { id, kind } => StepEvent::EnteredSpace { id, entity: kind },
            WorldEffect::Blocked { id } => StepEvent::Blocked { id },
            WorldEffect::Fell { id, to, .. } => StepEvent::Fell {
                id,
                col: to.col,
                row: to.row,
            },
            WorldEffect::Grew { id, stage } => StepEvent::Grew { id, stage },
            WorldEffect::FullyGrown { id } => StepEvent::FullyGrown { id },
            WorldEffect::AlreadyFull { id } => StepEvent::AlreadyFull { id },
            WorldEffect::NoTarget { action } => return Err(Diagnostic::NoTarget { action }),
        })
    }

    pub(crate) fn from_maze(event: MazeEvent) -> StepEvent {
        let pose_fields = |p: Pose| (p.pos.col, p.pos.row, p.heading);
        match event {
            MazeEvent::Moved(p) => {
                let (col, row, heading) = pose_fields(p);
                StepEvent::Moved { col, row, heading }
            }
            MazeEvent::Turned(p) => {
                let (col, row, heading) = pose_fields(p);
                StepEvent::Turned { col, row, heading }
            }
            MazeEvent::Crashed { at } => {
                let (col, row, heading) = pose_fields(at);
                StepEvent::Crashed { col, row, heading }
            }
            MazeEvent::ReachedPlanet(p) => {
                let (col, row, heading) = pose_fields(p);
                StepEvent::ReachedPlanet { col, row, heading }
            }
            MazeEvent::LoopCapped { iterations } => StepEvent::LoopCapped { iterations },
        }
    }
}

impl fmt::Display for StepEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepEvent::Spawned {
                id,
                entity,
                col,
                row,
            } => {
                write!(f, "spawned {entity}#{id} at ({col},{row})")
            }
            StepEvent::Ascending { id, entity } => write!(f, "{entity}#{id} is ascending"),
            StepEvent::EnteredSpace { id, entity } => write!(f, "{entity}#{id} entered space"),
            StepEvent::Blocked { id } => write!(f, "#{id} bumped into something and stopped"),
            StepEvent::Fell { id, col, row } => write!(f, "#{id} fell to ({col},{row})"),
            StepEvent::Grew { id, stage } => write!(f, "tree#{id} grew to stage {stage}"),
            StepEvent::FullyGrown { id } => write!(f, "tree#{id} is fully grown"),
            StepEvent::AlreadyFull { id } => write!(f, "tree#{id} is already fully grown"),
            StepEvent::LoopPending { tile } => write!(f, "{tile} waits for a movement tile"),
            StepEvent::Moved { col, row, heading } => {
                write!(f, "moved to ({col},{row}) facing {heading}")
            }
            StepEvent::Turned { col, row, heading } => {
                write!(f, "turned at ({col},{row}) to face {heading}")
            }
            StepEvent::Crashed { col, row, heading } => {
                write!(f, "crashed at ({col},{row}) facing {heading}")
            }
            StepEvent::ReachedPlanet { col, row, .. } => {
                write!(f, "reached the planet at ({col},{row})")
            }
            StepEvent::LoopCapped { iterations } => {
                write!(f, "loop stopped after {iterations} iterations")
            }
            StepEvent::Answer { answer: Some(n) } => write!(f, "answer is now {n}"),
            StepEvent::Answer { answer: None } => f.write_str("no answer yet"),
            StepEvent::Symbol { tile } => write!(f, "placed {tile}"),
            StepEvent::Judged { verdict } => write!(f, "answer is {verdict}"),
            StepEvent::Removed { tile, col, row } => write!(f, "removed {tile} from ({col},{row})"),
            StepEvent::Ticked { n } => write!(f, "ticked {n}"),
            StepEvent::ModeSet { mode } => write!(f, "mode is now {mode}"),
            StepEvent::MazeLoaded { width, height } => write!(f, "loaded {width}x{height} maze"),
            StepEvent::EquationSet { equation } => write!(f, "equation is {equation}"),
            StepEvent::Reset => f.write_str("reset"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntitySnapshot {
    pub id: u32,
    pub kind: EntityKind,
    pub col: u32,
    pub row: u32,
    pub stage: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WorldSnapshot {
    pub entities: Vec<EntitySnapshot>,
    pub space: Vec<u32>,
}

impl WorldSnapshot {
    pub fn of(world: &World) -> Self {
        WorldSnapshot {
            entities: world
                .entities()
                .map(|e| EntitySnapshot {
                    id: e.id,
                    kind: e.kind,
                    col: e.pos.col,
                    row: e.pos.row,
                    stage: e.growth_stage,
                })
                .collect(),
            space: world.space().iter().map(|s| s.id).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PoseSnapshot {
    pub col: u32,
    pub row: u32,
    pub heading: Heading,
}

impl From<Pose> for PoseSnapshot {
    fn from(p: Pose) -> Self {
        PoseSnapshot {
            col: p.pos.col,
            row: p.pos.row,
            heading: p.heading,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MazeSnapshot {
    pub pose: Option<PoseSnapshot>,
    pub trajectory: Vec<PoseSnapshot>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MathSnapshot {
    pub equation: Option<String>,
    pub answer: Option<u32>,
}

/// Post-step state of whichever activity the session is running.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Snapshot {
    Sandbox(WorldSnapshot),
    Maze(MazeSnapshot),
    Math(MathSnapshot),
}

impl Snapshot {
    /// Canonical JSON, as sent on the wire.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("snapshot serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepOutput {
    pub seq: u64,
    pub events: Vec<StepEvent>,
    pub diagnostics: Vec<Diagnostic>,
    pub fact: Option<Fact>,
    pub snapshot: Snapshot,
}
