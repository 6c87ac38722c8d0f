use crate::math::{check_answer, effective_answer, Equation, MathError, MathState, Verdict};
use crate::maze::{Maze, MazeRun};
use crate::program::{Diagnostic, Instruction, MathToken, Program};
use crate::world::{EntityKind, World, WorldEffect, WorldError};

use super::output::{MathSnapshot, MazeSnapshot, PoseSnapshot, Snapshot, StepEvent, WorldSnapshot};
use super::Mode;

/// Everything one step produced, plus the fact triggers it fired.
#[derive(Debug, Default)]
pub(crate) struct StepParts {
    pub events: Vec<StepEvent>,
    pub diagnostics: Vec<Diagnostic>,
    pub triggers: Vec<String>,
}

impl StepParts {
    fn world_effects(&mut self, effects: Vec<WorldEffect>) {
        for effect in effects {
            match effect {
                WorldEffect::Ascending { kind, .. } => {
                    self.triggers.push(format!("{kind}.takeoff"))
                }
                WorldEffect::Grew { .. } => self.triggers.push("tree.grow".into()),
                WorldEffect::FullyGrown { .. } => self.triggers.push("tree.full".into()),
                _ => {}
            }
            match StepEvent::from_world(effect) {
                Ok(event) => self.events.push(event),
                Err(diag) => self.diagnostics.push(diag),
            }
        }
    }
}

/// The activity state instructions act on: the sandbox world, the maze run
/// or the math answer, depending on mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scene {
    mode: Mode,
    world: World,
    maze: Option<MazeRun>,
    equation: Option<Equation>,
    answer_tiles: u32,
    number_answer: Option<u8>,
    checked: bool,
}

impl Scene {
    pub fn new(
        mode: Mode,
        width: u32,
        height: u32,
        maze: Option<&Maze>,
        equation: Option<Equation>,
    ) -> Self {
        Scene {
            mode,
            world: World::new(width, height),
            maze: maze.cloned().map(MazeRun::new),
            equation,
            answer_tiles: 0,
            number_answer: None,
            checked: false,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn maze_run(&self) -> Option<&MazeRun> {
        self.maze.as_ref()
    }

    pub fn equation(&self) -> Option<Equation> {
        self.equation
    }

    /// The math state, once an equation is set.
    pub fn math_state(&self) -> Option<MathState> {
        self.equation.map(|equation| MathState {
            equation,
            answer_tiles: self.answer_tiles,
            number_answer: self.number_answer,
            checked: self.checked,
        })
    }

    fn current_answer(&self) -> Option<u32> {
        effective_answer(self.number_answer, self.answer_tiles)
    }

    pub(crate) fn judge(&mut self) -> Result<Verdict, Diagnostic> {
        let state = self.math_state().ok_or(Diagnostic::NoEquation)?;
        let verdict = check_answer(&state).map_err(|e| match e {
            MathError::NoAnswer => Diagnostic::NoAnswer,
            _ => Diagnostic::NoEquation,
        })?;
        self.checked = true;
        Ok(verdict)
    }

    pub(crate) fn execute(&mut self, instr: &Instruction, parts: &mut StepParts) {
        match (self.mode, *instr) {
            (Mode::Sandbox, Instruction::SpawnActor { kind, at }) => {
                match self.world.spawn(kind, at) {
                    Ok(effect) => parts.world_effects(vec![effect]),
                    Err(WorldError::Occupied(p)) => parts.diagnostics.push(Diagnostic::Occupied {
                        col: p.col,
                        row: p.row,
                    }),
                    Err(WorldError::OutOfBounds(p)) => {
                        parts.diagnostics.push(Diagnostic::OutOfCanvas {
                            col: p.col,
                            row: p.row,
                        })
                    }
                }
                self.settle(usize::MAX, parts);
            }
            (Mode::Sandbox, Instruction::ApplyAction(action)) => {
                let effects = self.world.apply_action(action);
                parts.world_effects(effects);
                self.settle(usize::MAX, parts);
            }
            (Mode::Maze, Instruction::Move(_) | Instruction::Loop { .. }) => {
                let Some(run) = self.maze.as_mut() else {
                    parts.diagnostics.push(Diagnostic::NoMaze);
                    return;
                };
                if run.is_over() {
                    parts.diagnostics.push(Diagnostic::RunOver {
                        tile: instr.tokens()[0],
                    });
                    return;
                }
                for event in run.apply(instr) {
                    match event {
                        crate::maze::MazeEvent::ReachedPlanet(_) => {
                            parts.triggers.push("maze.success".into())
                        }
                        crate::maze::MazeEvent::Crashed { .. } => {
                            parts.triggers.push("maze.crash".into())
                        }
                        _ => {}
                    }
                    parts.events.push(StepEvent::from_maze(event));
                }
            }
            (
                Mode::Math,
                Instruction::SpawnActor {
                    kind: EntityKind::Asteroid,
                    ..
                },
            ) => {
                self.answer_tiles += 1;
                parts.events.push(StepEvent::Answer {
                    answer: self.current_answer(),
                });
            }
            (Mode::Math, Instruction::MathToken(token)) => match token {
                MathToken::Number(d) => {
                    self.number_answer = Some(d);
                    parts.events.push(StepEvent::Answer {
                        answer: self.current_answer(),
                    });
                }
                MathToken::Plus | MathToken::Minus => parts.events.push(StepEvent::Symbol {
                    tile: instr.tokens()[0],
                }),
                MathToken::Equals => match self.judge() {
                    Ok(verdict) => {
                        if verdict == Verdict::Correct {
                            parts.triggers.push("math.correct".into());
                        }
                        parts.events.push(StepEvent::Judged { verdict });
                    }
                    Err(diag) => parts.diagnostics.push(diag),
                },
            },
            (mode, instr) => parts.diagnostics.push(Diagnostic::ModeInvalid {
                tile: instr.tokens()[0],
                mode: mode.name(),
            }),
        }
    }

    /// Runs up to `max_rounds` settle rounds (sandbox only).
    pub(crate) fn settle(&mut self, max_rounds: usize, parts: &mut StepParts) {
        if self.mode != Mode::Sandbox {
            return;
        }
        let report = self.world.settle_rounds(max_rounds);
        parts.world_effects(report.effects);
    }

    pub fn snapshot(&self) -> Snapshot {
        match self.mode {
            Mode::Sandbox => Snapshot::Sandbox(WorldSnapshot::of(&self.world)),
            Mode::Maze => Snapshot::Maze(match &self.maze {
                Some(run) => MazeSnapshot {
                    pose: Some(run.pose().into()),
                    trajectory: run
                        .trajectory()
                        .iter()
                        .copied()
                        .map(PoseSnapshot::from)
                        .collect(),
                },
                None => MazeSnapshot {
                    pose: None,
                    trajectory: Vec::new(),
                },
            }),
            Mode::Math => Snapshot::Math(MathSnapshot {
                equation: self.equation.map(|e| e.compact()),
                answer: self.current_answer(),
            }),
        }
    }
}

/// Runs a whole lowered program against `scene`, settling after every
/// instruction the way a session does after every placement.
pub fn execute_program(mut scene: Scene, program: &Program) -> Scene {
    let mut parts = StepParts::default();
    for instr in &program.instructions {
        scene.execute(instr, &mut parts);
    }
    scene
}
