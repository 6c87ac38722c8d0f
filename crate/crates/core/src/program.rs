//! Lowered, executable form of a tile sequence.

use std::fmt;

use serde::Serialize;

use crate::tile::{GridPos, TileKind};
use crate::world::{Action, EntityKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Move {
    Forward,
    TurnLeft,
    TurnRight,
}

impl Move {
    pub const ALL: [Move; 3] = [Move::Forward, Move::TurnLeft, Move::TurnRight];

    pub fn tile(self) -> TileKind {
        match self {
            Move::Forward => TileKind::Forward,
            Move::TurnLeft => TileKind::TurnLeft,
            Move::TurnRight => TileKind::TurnRight,
        }
    }

    pub fn from_tile(kind: TileKind) -> Option<Move> {
        match kind {
            TileKind::Forward => Some(Move::Forward),
            TileKind::TurnLeft => Some(Move::TurnLeft),
            TileKind::TurnRight => Some(Move::TurnRight),
            _ => None,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.tile().fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopBound {
    /// 1..=9 repetitions.
    Count(u8),
    /// While the cell ahead is free, capped at the maze area.
    UntilBlocked,
}

impl LoopBound {
    pub fn from_tile(kind: TileKind) -> Option<LoopBound> {
        match kind {
            TileKind::Repeat(n) => Some(LoopBound::Count(n)),
            TileKind::RepeatUntilBlocked => Some(LoopBound::UntilBlocked),
            _ => None,
        }
    }

    pub fn tile(self) -> TileKind {
        match self {
            LoopBound::Count(n) => TileKind::Repeat(n),
            LoopBound::UntilBlocked => TileKind::RepeatUntilBlocked,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MathToken {
    Number(u8),
    Plus,
    Minus,
    Equals,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Instruction {
    /// Introduce an actor at the cell its tile was placed on.
    SpawnActor {
        kind: EntityKind,
        at: GridPos,
    },
    ApplyAction(Action),
    Move(Move),
    Loop {
        body: Move,
        bound: LoopBound,
    },
    MathToken(MathToken),
}

impl Instruction {
    /// Tile tokens that produce this instruction.
    pub fn tokens(&self) -> Vec<TileKind> {
        match *self {
            Instruction::SpawnActor { kind, .. } => vec![match kind {
                EntityKind::Rocket => TileKind::Rocket,
                EntityKind::Tree => TileKind::Tree,
                EntityKind::Surface => TileKind::Surface,
                EntityKind::Asteroid => TileKind::Asteroid,
            }],
            Instruction::ApplyAction(Action::Takeoff) => vec![TileKind::Takeoff],
            Instruction::ApplyAction(Action::Rain) => vec![TileKind::Rain],
            Instruction::Move(m) => vec![m.tile()],
            Instruction::Loop { body, bound } => vec![bound.tile(), body.tile()],
            Instruction::MathToken(MathToken::Number(d)) => vec![TileKind::Number(d)],
            Instruction::MathToken(MathToken::Plus) => vec![TileKind::Plus],
            Instruction::MathToken(MathToken::Minus) => vec![TileKind::Minus],
            Instruction::MathToken(MathToken::Equals) => vec![TileKind::Equals],
        }
    }
}

/// Problems found while lowering or running tiles. None of them abort a
/// session; each is reported in the step where it happened.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum Diagnostic {
    Overlap {
        col: u32,
        row: u32,
    },
    OutOfCanvas {
        col: u32,
        row: u32,
    },
    NotFound {
        col: u32,
        row: u32,
    },
    /// The tile has no meaning in the current mode.
    ModeInvalid {
        tile: TileKind,
        mode: &'static str,
    },
    /// A loop tile not followed by a movement tile.
    DanglingLoop {
        tile: TileKind,
    },
    /// A loop tile followed by another loop tile.
    NestedLoop {
        tile: TileKind,
    },
    NoTarget {
        action: Action,
    },
    /// An actor could not appear because its cell is taken.
    Occupied {
        col: u32,
        row: u32,
    },
    /// The maze run already ended; further moves are ignored.
    RunOver {
        tile: TileKind,
    },
    NoMaze,
    NoEquation,
    NoAnswer,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Overlap { col, row } => write!(f, "overlap at ({col},{row})"),
            Diagnostic::OutOfCanvas { col, row } => write!(f, "out of canvas at ({col},{row})"),
            Diagnostic::NotFound { col, row } => write!(f, "no tile at ({col},{row})"),
            Diagnostic::ModeInvalid { tile, mode } => {
                write!(f, "tile {tile} does nothing in {mode} mode")
            }
            Diagnostic::DanglingLoop { tile } => write!(f, "{tile} has no movement tile to repeat"),
            Diagnostic::NestedLoop { tile } => write!(f, "{tile} cannot repeat another loop"),
            Diagnostic::NoTarget { action } => write!(f, "{action} has nothing to act on"),
            Diagnostic::Occupied { col, row } => write!(f, "cell ({col},{row}) is occupied"),
            Diagnostic::RunOver { tile } => write!(f, "run is over, {tile} ignored"),
            Diagnostic::NoMaze => f.write_str("no maze loaded"),
            Diagnostic::NoEquation => f.write_str("no equation set"),
            Diagnostic::NoAnswer => f.write_str("no answer placed"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub instructions: Vec<Instruction>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Program {
    pub fn from_instructions(instructions: Vec<Instruction>) -> Self {
        Program {
            instructions,
            diagnostics: Vec::new(),
        }
    }

    pub fn from_moves(moves: &[Move]) -> Self {
        Program::from_instructions(moves.iter().copied().map(Instruction::Move).collect())
    }

    /// Unrolls counted loops back into a flat move list. `None` if the
    /// program contains anything other than moves and counted loops.
    pub fn expand_moves(&self) -> Option<Vec<Move>> {
        let mut moves = Vec::new();
        for instr in &self.instructions {
            match *instr {
                Instruction::Move(m) => moves.push(m),
                Instruction::Loop {
                    body,
                    bound: LoopBound::Count(n),
                } => moves.extend(std::iter::repeat_n(body, n as usize)),
                _ => return None,
            }
        }
        Some(moves)
    }

    /// One line per instruction; loops print as `loop:<n> <move>`.
    pub fn to_token_lines(&self) -> Vec<String> {
        self.instructions
            .iter()
            .map(|i| {
                i.tokens()
                    .iter()
                    .map(|t| t.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }
}
