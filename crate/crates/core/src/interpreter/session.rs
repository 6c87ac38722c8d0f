use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::facts::{Fact, FactStore};
use crate::math::{Equation, Verdict};
use crate::maze::{Maze, RunResult};
use crate::program::{Diagnostic, Instruction, LoopBound, Move};
use crate::tile::{CanvasLayout, GridPos, PlacementError, TileKind};
use crate::tile::{DEFAULT_CANVAS_HEIGHT, DEFAULT_CANVAS_WIDTH};

use super::exec::{Scene, StepParts};
use super::output::{Snapshot, StepEvent, StepOutput};
use super::{single_tile_instruction, Mode};

/// A client event that changes the tiles on the canvas or the clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionEvent {
    Place { kind: TileKind, pos: GridPos },
    Remove { pos: GridPos },
    Tick { n: u32 },
}

/// Result of a check request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Judgment {
    Run(RunResult),
    Math(Verdict),
}

impl Judgment {
    /// Success and correct answers pass; everything else fails.
    pub fn passed(self) -> bool {
        matches!(
            self,
            Judgment::Run(RunResult::Success) | Judgment::Math(Verdict::Correct)
        )
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Judgment::Run(r) => r.fmt(f),
            Judgment::Math(v) => v.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("nothing to check in {0} mode")]
    Mode(Mode),
    #[error("no maze loaded")]
    NoMaze,
    #[error("no equation set")]
    NoEquation,
    #[error("no answer placed")]
    NoAnswer,
}

fn bundled_facts() -> Arc<FactStore> {
    static BUNDLED: OnceLock<Arc<FactStore>> = OnceLock::new();
    BUNDLED
        .get_or_init(|| Arc::new(FactStore::bundled()))
        .clone()
}

/// One launchpad: its configuration, the event log, and the state derived
/// from replaying that log.
///
/// Events are applied strictly in order. `step_seq` counts every step
/// emitted and is never rewound, not even by [`Session::reset`].
#[derive(Debug, Clone)]
pub struct Session {
    mode: Mode,
    width: u32,
    height: u32,
    maze: Option<Maze>,
    equation: Option<Equation>,
    fact_source: Arc<FactStore>,

    layout: CanvasLayout,
    // Only placements and ticks; a removal deletes its placement.
    log: Vec<SessionEvent>,
    scene: Scene,
    pending_loop: Option<TileKind>,
    facts: FactStore,

    step_seq: u64,
}

impl Session {
    pub fn new(mode: Mode) -> Self {
        Session::with_facts(mode, bundled_facts())
    }

    pub fn with_facts(mode: Mode, facts: Arc<FactStore>) -> Self {
        let width = DEFAULT_CANVAS_WIDTH;
        let height = DEFAULT_CANVAS_HEIGHT;
        Session {
            mode,
            width,
            height,
            maze: None,
            equation: None,
            layout: CanvasLayout::new(width, height),
            log: Vec::new(),
            scene: Scene::new(mode, width, height, None, None),
            pending_loop: None,
            facts: (*facts).clone(),
            fact_source: facts,
            step_seq: 0,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn layout(&self) -> &CanvasLayout {
        &self.layout
    }

    pub fn scene(&self) -> &Scene {
        &self.scene
    }

    pub fn maze(&self) -> Option<&Maze> {
        self.maze.as_ref()
    }

    pub fn equation(&self) -> Option<Equation> {
        self.equation
    }

    /// Placements and ticks currently in effect, in order.
    pub fn event_log(&self) -> &[SessionEvent] {
        &self.log
    }

    pub fn step_seq(&self) -> u64 {
        self.step_seq
    }

    pub fn snapshot(&self) -> Snapshot {
        self.scene.snapshot()
    }

    pub fn apply(&mut self, event: SessionEvent) -> StepOutput {
        match event {
            SessionEvent::Place { kind, pos } => self.apply_placement(kind, pos),
            SessionEvent::Remove { pos } => self.apply_removal(pos),
            SessionEvent::Tick { n } => self.tick(n),
        }
    }

    /// Places one tile and runs whatever it means right away. Placement
    /// problems come back as diagnostics; the tile is then not placed.
    pub fn apply_placement(&mut self, kind: TileKind, pos: GridPos) -> StepOutput {
        let (parts, fact) = self.place_inner(kind, pos);
        self.emit(parts, fact)
    }

    /// Takes the tile at `pos` off the canvas and rebuilds the session from
    /// the remaining events.
    pub fn apply_removal(&mut self, pos: GridPos) -> StepOutput {
        let mut parts = StepParts::default();
        match self.layout.tile_at(pos).copied() {
            None => parts.diagnostics.push(Diagnostic::NotFound {
                col: pos.col,
                row: pos.row,
            }),
            Some(tile) => {
                let idx = self
                    .log
                    .iter()
                    .position(|e| matches!(e, SessionEvent::Place { pos: p, .. } if *p == pos))
                    .expect("every live tile has a placement in the log");
                self.log.remove(idx);
                self.rebuild();
                parts.events.push(StepEvent::Removed {
                    tile: tile.kind,
                    col: pos.col,
                    row: pos.row,
                });
            }
        }
        self.emit(parts, None)
    }

    /// Advances the clock by up to `n` settle rounds.
    pub fn tick(&mut self, n: u32) -> StepOutput {
        let (parts, fact) = self.tick_inner(n);
        self.emit(parts, fact)
    }

    /// Switches activity and clears the canvas. Maze and equation settings
    /// are kept.
    pub fn set_mode(&mut self, mode: Mode) -> StepOutput {
        self.mode = mode;
        self.log.clear();
        self.rebuild();
        let mut parts = StepParts::default();
        parts.events.push(StepEvent::ModeSet { mode });
        self.emit(parts, None)
    }

    /// Clears the canvas, keeping mode and settings.
    pub fn reset(&mut self) -> StepOutput {
        self.log.clear();
        self.rebuild();
        let mut parts = StepParts::default();
        parts.events.push(StepEvent::Reset);
        self.emit(parts, None)
    }

    /// Sets the maze and replays the current tiles against it.
    pub fn load_maze(&mut self, maze: Maze) -> StepOutput {
        let (width, height) = (maze.width(), maze.height());
        self.maze = Some(maze);
        self.rebuild();
        let mut parts = StepParts::default();
        parts.events.push(StepEvent::MazeLoaded { width, height });
        self.emit(parts, None)
    }

    /// Sets the equation and replays the current tiles against it.
    pub fn set_equation(&mut self, equation: Equation) -> StepOutput {
        self.equation = Some(equation);
        self.rebuild();
        let mut parts = StepParts::default();
        parts.events.push(StepEvent::EquationSet {
            equation: equation.compact(),
        });
        self.emit(parts, None)
    }

    /// Judges the current maze run or math answer without emitting a step.
    pub fn check(&mut self) -> Result<Judgment, CheckError> {
        match self.mode {
            Mode::Sandbox => Err(CheckError::Mode(self.mode)),
            Mode::Maze => self
                .scene
                .maze_run()
                .map(|run| Judgment::Run(run.outcome().result))
                .ok_or(CheckError::NoMaze),
            Mode::Math => self.scene.judge().map(Judgment::Math).map_err(|d| match d {
                Diagnostic::NoAnswer => CheckError::NoAnswer,
                _ => CheckError::NoEquation,
            }),
        }
    }

    /// A new session with this one's configuration and event log, built by
    /// replay alone.
    pub fn replayed(&self) -> Session {
        let mut fresh = self.clone();
        fresh.rebuild();
        fresh
    }

    fn emit(&mut self, parts: StepParts, fact: Option<Fact>) -> StepOutput {
        self.step_seq += 1;
        StepOutput {
            seq: self.step_seq,
            events: parts.events,
            diagnostics: parts.diagnostics,
            fact,
            snapshot: self.scene.snapshot(),
        }
    }

    fn rebuild(&mut self) {
        let log = std::mem::take(&mut self.log);
        self.layout = CanvasLayout::new(self.width, self.height);
        self.scene = Scene::new(
            self.mode,
            self.width,
            self.height,
            self.maze.as_ref(),
            self.equation,
        );
        self.pending_loop = None;
        self.facts = (*self.fact_source).clone();
        for event in log {
            match event {
                SessionEvent::Place { kind, pos } => {
                    self.place_inner(kind, pos);
                }
                SessionEvent::Tick { n } => {
                    self.tick_inner(n);
                }
                SessionEvent::Remove { .. } => unreachable!("removals are never logged"),
            }
        }
    }

    fn place_inner(&mut self, kind: TileKind, pos: GridPos) -> (StepParts, Option<Fact>) {
        let mut parts = StepParts::default();
        match self.layout.place(kind, pos) {
            Err(PlacementError::Overlap(p)) => {
                parts.diagnostics.push(Diagnostic::Overlap {
                    col: p.col,
                    row: p.row,
                });
                return (parts, None);
            }
            Err(PlacementError::OutOfCanvas(p)) => {
                parts.diagnostics.push(Diagnostic::OutOfCanvas {
                    col: p.col,
                    row: p.row,
                });
                return (parts, None);
            }
            Ok(_) => {}
        }
        self.log.push(SessionEvent::Place { kind, pos });
        self.bind_and_execute(kind, pos, &mut parts);
        let fact = self.pick_fact(&parts.triggers);
        (parts, fact)
    }

    fn tick_inner(&mut self, n: u32) -> (StepParts, Option<Fact>) {
        let mut parts = StepParts::default();
        self.log.push(SessionEvent::Tick { n });
        parts.events.push(StepEvent::Ticked { n });
        self.scene.settle(n as usize, &mut parts);
        let fact = self.pick_fact(&parts.triggers);
        (parts, fact)
    }

    // A loop tile waits for the next placement: a movement tile becomes its
    // body; any other tile drops it with a diagnostic and is handled alone.
    fn bind_and_execute(&mut self, kind: TileKind, pos: GridPos, parts: &mut StepParts) {
        if self.mode == Mode::Maze {
            if let Some(pending) = self.pending_loop.take() {
                if let Some(body) = Move::from_tile(kind) {
                    let bound = LoopBound::from_tile(pending).expect("pending tile is a loop");
                    self.scene
                        .execute(&Instruction::Loop { body, bound }, parts);
                    return;
                }
                parts.diagnostics.push(if kind.is_loop() {
                    Diagnostic::NestedLoop { tile: pending }
                } else {
                    Diagnostic::DanglingLoop { tile: pending }
                });
            }
            if kind.is_loop() {
                self.pending_loop = Some(kind);
                parts.events.push(StepEvent::LoopPending { tile: kind });
                return;
            }
        }
        match single_tile_instruction(kind, pos, self.mode) {
            Ok(instr) => self.scene.execute(&instr, parts),
            Err(diag) => parts.diagnostics.push(diag),
        }
    }

    // The last trigger that has facts wins, so a tree reaching full growth
    // beats the plain growth fact from the same rain.
    fn pick_fact(&mut self, triggers: &[String]) -> Option<Fact> {
        let trigger = triggers.iter().rev().find(|t| self.facts.has_trigger(t))?;
        self.facts.next_fact(trigger)
    }
}

/// Folds `script` over a fresh session in `mode`.
pub fn run_batch(script: &[SessionEvent], mode: Mode) -> (Session, Vec<StepOutput>) {
    run_batch_from(Session::new(mode), script)
}

/// Folds `script` over an already configured session.
pub fn run_batch_from(mut session: Session, script: &[SessionEvent]) -> (Session, Vec<StepOutput>) {
    let outputs = script.iter().map(|e| session.apply(*e)).collect();
    (session, outputs)
}
