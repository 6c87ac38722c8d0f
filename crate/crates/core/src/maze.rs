//! Asteroid maze: parsing, program execution over a rocket pose, a
//! breadth-first solver and the loop-rolling compressor.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::program::{Instruction, LoopBound, Move, Program};
use crate::tile::{GridPos, MAX_LOOP_COUNT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Heading {
    N,
    E,
    S,
    W,
}

impl Heading {
    pub fn left(self) -> Heading {
        match self {
            Heading::N => Heading::W,
            Heading::W => Heading::S,
            Heading::S => Heading::E,
            Heading::E => Heading::N,
        }
    }

    pub fn right(self) -> Heading {
        match self {
            Heading::N => Heading::E,
            Heading::E => Heading::S,
            Heading::S => Heading::W,
            Heading::W => Heading::N,
        }
    }

    /// Column/row delta; north is up (toward higher rows).
    pub fn delta(self) -> (i64, i64) {
        match self {
            Heading::N => (0, 1),
            Heading::E => (1, 0),
            Heading::S => (0, -1),
            Heading::W => (-1, 0),
        }
    }

    pub fn glyph(self) -> char {
        match self {
            Heading::N => '^',
            Heading::E => '>',
            Heading::S => 'v',
            Heading::W => '<',
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Heading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pose {
    pub pos: GridPos,
    pub heading: Heading,
}

impl fmt::Display for Pose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.pos, self.heading)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MazeError {
    #[error("empty maze")]
    Empty,
    #[error("line {line}, column {column}: unexpected character `{ch}`")]
    BadChar {
        line: usize,
        column: usize,
        ch: char,
    },
    #[error("maze has no start")]
    MissingStart,
    #[error("maze has no planet")]
    MissingPlanet,
    #[error("maze has more than one start")]
    MultipleStart,
    #[error("maze has more than one planet")]
    MultiplePlanet,
    #[error("line {line} has a different length than the first line")]
    RaggedRows { line: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Maze {
    width: u32,
    height: u32,
    asteroids: HashSet<GridPos>,
    start: Pose,
    planet: GridPos,
}

impl Maze {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn start(&self) -> Pose {
        self.start
    }

    pub fn planet(&self) -> GridPos {
        self.planet
    }

    pub fn is_asteroid(&self, pos: GridPos) -> bool {
        self.asteroids.contains(&pos)
    }

    pub fn asteroids(&self) -> impl Iterator<Item = &GridPos> {
        self.asteroids.iter()
    }

    /// In bounds and not an asteroid.
    pub fn is_free(&self, pos: GridPos) -> bool {
        pos.col < self.width && pos.row < self.height && !self.is_asteroid(pos)
    }

    /// The cell one step along the heading, if it lies on the grid.
    pub fn ahead(&self, pose: Pose) -> Option<GridPos> {
        let (dc, dr) = pose.heading.delta();
        let col = pose.pos.col as i64 + dc;
        let row = pose.pos.row as i64 + dr;
        if col < 0 || row < 0 || col >= self.width as i64 || row >= self.height as i64 {
            return None;
        }
        Some(GridPos::new(col as u32, row as u32))
    }

    fn ahead_free(&self, pose: Pose) -> Option<GridPos> {
        self.ahead(pose).filter(|p| !self.is_asteroid(*p))
    }

    /// Draws the maze with the rocket at `pose` and `o` on visited cells.
    pub fn render(&self, pose: Pose, trail: &[Pose]) -> String {
        let visited: HashSet<GridPos> = trail.iter().map(|p| p.pos).collect();
        let mut lines = Vec::with_capacity(self.height as usize);
        for row in (0..self.height).rev() {
            let line: String = (0..self.width)
                .map(|col| {
                    let pos = GridPos::new(col, row);
                    if pos == pose.pos {
                        pose.heading.glyph()
                    } else if pos == self.planet {
                        'P'
                    } else if self.is_asteroid(pos) {
                        '#'
                    } else if visited.contains(&pos) {
                        'o'
                    } else {
                        '.'
                    }
                })
                .collect();
            lines.push(line);
        }
        lines.join("\n")
    }
}

impl fmt::Display for Maze {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(self.start, &[]))
    }
}

/// Parses the text maze format. The first line is the top row.
pub fn parse_maze(text: &str) -> Result<Maze, MazeError> {
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .collect();
    let lines: Vec<&str> = {
        // Ignore trailing blank lines.
        let end = lines
            .iter()
            .rposition(|l| !l.is_empty())
            .map_or(0, |i| i + 1);
        lines[..end].to_vec()
    };
    if lines.is_empty() || lines[0].is_empty() {
        return Err(MazeError::Empty);
    }
    let width = lines[0].chars().count();
    let height = lines.len();
    let mut asteroids = HashSet::new();
    let mut start = None;
    let mut planet = None;
    for (li, line) in lines.iter().enumerate() {
        if line.chars().count() != width {
            return Err(MazeError::RaggedRows { line: li + 1 });
        }
        let row = (height - 1 - li) as u32;
        for (ci, ch) in line.chars().enumerate() {
            let pos = GridPos::new(ci as u32, row);
            let heading = match ch {
                '.' => None,
                '#' => {
                    asteroids.insert(pos);
                    None
                }
                'P' => {
                    if planet.replace(pos).is_some() {
                        return Err(MazeError::MultiplePlanet);
                    }
                    None
                }
                '^' => Some(Heading::N),
                '>' => Some(Heading::E),
                'v' => Some(Heading::S),
                '<' => Some(Heading::W),
                _ => {
                    return Err(MazeError::BadChar {
                        line: li + 1,
                        column: ci + 1,
                        ch,
                    })
                }
            };
            if let Some(heading) = heading {
                if start.replace(Pose { pos, heading }).is_some() {
                    return Err(MazeError::MultipleStart);
                }
            }
        }
    }
    Ok(Maze {
        width: width as u32,
        height: height as u32,
        asteroids,
        start: start.ok_or(MazeError::MissingStart)?,
        planet: planet.ok_or(MazeError::MissingPlanet)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunResult {
    Success,
    Crash,
    Incomplete,
}

impl fmt::Display for RunResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunResult::Success => "success",
            RunResult::Crash => "crash",
            RunResult::Incomplete => "incomplete",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub result: RunResult,
    pub trajectory: Vec<Pose>,
    pub steps_executed: usize,
}

/// What one primitive move did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MazeEvent {
    Moved(Pose),
    Turned(Pose),
    /// Forward into an asteroid or off the grid; the pose does not change.
    Crashed {
        at: Pose,
    },
    ReachedPlanet(Pose),
    /// An until-blocked loop hit its iteration cap.
    LoopCapped {
        iterations: usize,
    },
}

/// A rocket working through a maze one instruction at a time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MazeRun {
    maze: Maze,
    pose: Pose,
    trajectory: Vec<Pose>,
    steps: usize,
    result: RunResult,
}

impl MazeRun {
    pub fn new(maze: Maze) -> Self {
        let start = maze.start;
        MazeRun {
            maze,
            pose: start,
            trajectory: vec![start],
            steps: 0,
            result: RunResult::Incomplete,
        }
    }

    pub fn maze(&self) -> &Maze {
        &self.maze
    }

    pub fn pose(&self) -> Pose {
        self.pose
    }

    pub fn trajectory(&self) -> &[Pose] {
        &self.trajectory
    }

    pub fn is_over(&self) -> bool {
        self.result != RunResult::Incomplete
    }

    pub fn outcome(&self) -> RunOutcome {
        RunOutcome {
            result: self.result,
            trajectory: self.trajectory.clone(),
            steps_executed: self.steps,
        }
    }

    fn step(&mut self, mv: Move, events: &mut Vec<MazeEvent>) {
        self.steps += 1;
        match mv {
            Move::Forward => match self.maze.ahead_free(self.pose) {
                None => {
                    self.result = RunResult::Crash;
                    events.push(MazeEvent::Crashed { at: self.pose });
                }
                Some(pos) => {
                    self.pose.pos = pos;
                    self.trajectory.push(self.pose);
                    if pos == self.maze.planet {
                        self.result = RunResult::Success;
                        events.push(MazeEvent::ReachedPlanet(self.pose));
                    } else {
                        events.push(MazeEvent::Moved(self.pose));
                    }
                }
            },
            Move::TurnLeft | Move::TurnRight => {
                self.pose.heading = if mv == Move::TurnLeft {
                    self.pose.heading.left()
                } else {
                    self.pose.heading.right()
                };
                self.trajectory.push(self.pose);
                events.push(MazeEvent::Turned(self.pose));
            }
        }
    }

    /// Runs one instruction. Non-movement instructions are ignored, as is
    /// anything after the run has ended.
    pub fn apply(&mut self, instr: &Instruction) -> Vec<MazeEvent> {
        let mut events = Vec::new();
        if self.is_over() {
            return events;
        }
        match *instr {
            Instruction::Move(mv) => self.step(mv, &mut events),
            Instruction::Loop {
                body,
                bound: LoopBound::Count(n),
            } => {
                for _ in 0..n {
                    if self.is_over() {
                        break;
                    }
                    self.step(body, &mut events);
                }
            }
            Instruction::Loop {
                body,
                bound: LoopBound::UntilBlocked,
            } => {
                let cap = (self.maze.width * self.maze.height) as usize;
                let mut iterations = 0;
                while !self.is_over() && self.maze.ahead_free(self.pose).is_some() {
                    if iterations == cap {
                        events.push(MazeEvent::LoopCapped { iterations });
                        break;
                    }
                    self.step(body, &mut events);
                    iterations += 1;
                }
            }
            _ => {}
        }
        events
    }
}

/// Runs a whole program from the maze start.
pub fn execute(maze: &Maze, program: &Program) -> RunOutcome {
    let mut run = MazeRun::new(maze.clone());
    for instr in &program.instructions {
        if run.is_over() {
            break;
        }
        run.apply(instr);
    }
    run.outcome()
}

/// Shortest move list from the start pose to the planet, searching
/// (cell, heading) states breadth-first. Successors are tried in the order
/// forward, left, right, which fixes one canonical plan among equals.
pub fn solve_oracle(maze: &Maze) -> Option<Vec<Move>> {
    let w = maze.width as usize;
    let state_index =
        |p: Pose| ((p.pos.row as usize * w) + p.pos.col as usize) * 4 + p.heading.index();
    let mut parent: Vec<Option<(Pose, Move)>> = vec![None; w * maze.height as usize * 4];
    let mut seen = vec![false; parent.len()];
    let mut queue = VecDeque::new();
    seen[state_index(maze.start)] = true;
    queue.push_back(maze.start);

    while let Some(pose) = queue.pop_front() {
        for mv in Move::ALL {
            let next = match mv {
                Move::Forward => match maze.ahead_free(pose) {
                    Some(pos) => Pose { pos, ..pose },
                    None => continue,
                },
                Move::TurnLeft => Pose {
                    heading: pose.heading.left(),
                    ..pose
                },
                Move::TurnRight => Pose {
                    heading: pose.heading.right(),
                    ..pose
                },
            };
            let idx = state_index(next);
            if seen[idx] {
                continue;
            }
            seen[idx] = true;
            parent[idx] = Some((pose, mv));
            if next.pos == maze.planet {
                let mut plan = Vec::new();
                let mut cur = next;
                while let Some((prev, mv)) = parent[state_index(cur)] {
                    plan.push(mv);
                    cur = prev;
                }
                plan.reverse();
                return Some(plan);
            }
            queue.push_back(next);
        }
    }
    None
}

/// Rolls runs of two or more identical moves into counted loops, splitting
/// runs longer than nine.
pub fn compress_moves(moves: &[Move]) -> Program {
    let mut instructions = Vec::new();
    let mut i = 0;
    while i < moves.len() {
        let mv = moves[i];
        let run = moves[i..].iter().take_while(|m| **m == mv).count();
        let mut left = run;
        while left > 0 {
            let chunk = left.min(MAX_LOOP_COUNT as usize);
            if chunk == 1 {
                instructions.push(Instruction::Move(mv));
            } else {
                instructions.push(Instruction::Loop {
                    body: mv,
                    bound: LoopBound::Count(chunk as u8),
                });
            }
            left -= chunk;
        }
        i += run;
    }
    Program::from_instructions(instructions)
}
