//! Turns placed tiles into instructions and runs them one placement at a
//! time.
//!
//! [`lower`] translates a whole tile sequence at once. A [`Session`] does
//! the same work incrementally: each placement is bound, executed and
//! reported as one [`StepOutput`]. Removing a tile rebuilds the session by
//! replaying its remaining placements from a fresh state, so a session's
//! state is always a function of its mode, configuration and event log.

mod exec;
mod output;
mod session;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::program::{Diagnostic, Instruction, LoopBound, MathToken, Move, Program};
use crate::tile::{GridPos, Tile, TileKind};
use crate::world::{Action, EntityKind};

pub use exec::{execute_program, Scene};
pub use output::{
    EntitySnapshot, MathSnapshot, MazeSnapshot, PoseSnapshot, Snapshot, StepEvent, StepOutput,
    WorldSnapshot,
};
pub use session::{run_batch, run_batch_from, CheckError, Judgment, Session, SessionEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Sandbox,
    Maze,
    Math,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Sandbox => "sandbox",
            Mode::Maze => "maze",
            Mode::Math => "math",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sandbox" => Ok(Mode::Sandbox),
            "maze" => Ok(Mode::Maze),
            "math" => Ok(Mode::Math),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// The instruction a single non-loop tile stands for in `mode`.
pub(crate) fn single_tile_instruction(
    kind: TileKind,
    pos: GridPos,
    mode: Mode,
) -> Result<Instruction, Diagnostic> {
    let spawn = |kind| Instruction::SpawnActor { kind, at: pos };
    let instr = match (mode, kind) {
        (Mode::Sandbox, TileKind::Rocket) => spawn(EntityKind::Rocket),
        (Mode::Sandbox, TileKind::Surface) => spawn(EntityKind::Surface),
        (Mode::Sandbox, TileKind::Tree) => spawn(EntityKind::Tree),
        (Mode::Sandbox | Mode::Math, TileKind::Asteroid) => spawn(EntityKind::Asteroid),
        (Mode::Sandbox, TileKind::Takeoff) => Instruction::ApplyAction(Action::Takeoff),
        (Mode::Sandbox, TileKind::Rain) => Instruction::ApplyAction(Action::Rain),
        (Mode::Maze, k) if k.is_movement() => Instruction::Move(Move::from_tile(k).unwrap()),
        (Mode::Math, TileKind::Number(d)) => Instruction::MathToken(MathToken::Number(d)),
        (Mode::Math, TileKind::Plus) => Instruction::MathToken(MathToken::Plus),
        (Mode::Math, TileKind::Minus) => Instruction::MathToken(MathToken::Minus),
        (Mode::Math, TileKind::Equals) => Instruction::MathToken(MathToken::Equals),
        _ => {
            return Err(Diagnostic::ModeInvalid {
                tile: kind,
                mode: mode.name(),
            })
        }
    };
    Ok(instr)
}

/// Lowers a tile sequence in program order. A loop tile takes the movement
/// tile right after it as its body; anything else after a loop tile leaves
/// the loop out with a diagnostic. Never fails.
pub fn lower(tiles: &[Tile], mode: Mode) -> Program {
    let mut program = Program::default();
    let mut i = 0;
    while i < tiles.len() {
        let tile = tiles[i];
        i += 1;
        if let Some(bound) = LoopBound::from_tile(tile.kind) {
            if mode != Mode::Maze {
                program.diagnostics.push(Diagnostic::ModeInvalid {
                    tile: tile.kind,
                    mode: mode.name(),
                });
                continue;
            }
            match tiles.get(i).map(|t| t.kind) {
                Some(next) if next.is_movement() => {
                    program.instructions.push(Instruction::Loop {
                        body: Move::from_tile(next).unwrap(),
                        bound,
                    });
                    i += 1;
                }
                Some(next) if next.is_loop() => {
                    program
                        .diagnostics
                        .push(Diagnostic::NestedLoop { tile: tile.kind });
                }
                _ => program
                    .diagnostics
                    .push(Diagnostic::DanglingLoop { tile: tile.kind }),
            }
            continue;
        }
        match single_tile_instruction(tile.kind, tile.pos, mode) {
            Ok(instr) => program.instructions.push(instr),
            Err(diag) => program.diagnostics.push(diag),
        }
    }
    program
}
