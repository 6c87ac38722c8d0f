//! A desk-scale interpreter for a tangible tile programming language.
//!
//! Children lay printed tiles on a gridded launchpad one at a time; every
//! placement is interpreted immediately and produces one observable step.
//! Tiles drive three activities: a sandbox scene with gravity, an asteroid
//! maze, and single-digit arithmetic.

pub mod facts;
pub mod interpreter;
pub mod math;
pub mod maze;
pub mod program;
pub mod protocol;
pub mod script;
pub mod tile;
pub mod world;

pub use interpreter::{lower, run_batch, Mode, Session, SessionEvent, Snapshot, StepOutput};
pub use program::{Diagnostic, Instruction, LoopBound, Move, Program};
pub use tile::{parse_tile_token, CanvasLayout, GridPos, Tile, TileKind};
