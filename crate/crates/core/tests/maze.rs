use std::collections::HashSet;

use proptest::prelude::*;
use tilepad::maze::{
    compress_moves, execute, parse_maze, solve_oracle, Heading, Maze, Pose, RunResult,
};
use tilepad::{Instruction, LoopBound, Move, Program};

/// Maze text from a cell grid (top row first); `start`/`planet` index cells.
fn maze_text(
    w: usize,
    h: usize,
    rocks: &[bool],
    start: usize,
    heading: usize,
    planet: usize,
) -> String {
    let mut text = String::new();
    for row in 0..h {
        for col in 0..w {
            let i = row * w + col;
            let ch = if i == start {
                ['^', '>', 'v', '<'][heading]
            } else if i == planet {
                'P'
            } else if rocks[i] {
                '#'
            } else {
                '.'
            };
            text.push(ch);
        }
        text.push('\n');
    }
    text
}

fn arb_maze(max_side: usize) -> impl Strategy<Value = Maze> {
    (1..=max_side, 1..=max_side)
        .prop_filter("needs two cells", |(w, h)| w * h >= 2)
        .prop_flat_map(|(w, h)| {
            let n = w * h;
            (
                Just((w, h)),
                proptest::collection::vec(proptest::bool::weighted(0.3), n),
                0..n,
                0..4usize,
                0..n,
            )
        })
        .prop_filter("start and planet differ", |(_, _, s, _, p)| s != p)
        .prop_map(|((w, h), rocks, s, hd, p)| {
            parse_maze(&maze_text(w, h, &rocks, s, hd, p)).unwrap()
        })
}

fn step(maze: &Maze, pose: Pose, mv: Move) -> Option<Pose> {
    match mv {
        Move::TurnLeft => Some(Pose {
            heading: pose.heading.left(),
            ..pose
        }),
        Move::TurnRight => Some(Pose {
            heading: pose.heading.right(),
            ..pose
        }),
        Move::Forward => {
            let (dc, dr) = pose.heading.delta();
            let col = pose.pos.col as i64 + dc;
            let row = pose.pos.row as i64 + dr;
            if col < 0 || row < 0 || col >= maze.width() as i64 || row >= maze.height() as i64 {
                return None;
            }
            let pos = tilepad::GridPos::new(col as u32, row as u32);
            (!maze.is_asteroid(pos)).then_some(Pose { pos, ..pose })
        }
    }
}

/// Length of the shortest successful plan by growing the set of poses
/// reachable by every plan of length k. None when the reachable set stops
/// growing without touching the planet.
fn shortest_by_reachable_sets(maze: &Maze) -> Option<usize> {
    let mut frontier: HashSet<Pose> = HashSet::from([maze.start()]);
    let mut seen = frontier.clone();
    for k in 1.. {
        let mut next = HashSet::new();
        for &pose in &frontier {
            for mv in Move::ALL {
                if let Some(p) = step(maze, pose, mv) {
                    if p.pos == maze.planet() {
                        return Some(k);
                    }
                    next.insert(p);
                }
            }
        }
        next.retain(|p| seen.insert(*p));
        if next.is_empty() {
            return None;
        }
        frontier = next;
    }
    unreachable!()
}

/// Literal enumeration of all 3^len move lists.
fn any_plan_of_len(maze: &Maze, pose: Pose, len: usize) -> bool {
    if len == 0 {
        return false;
    }
    Move::ALL.iter().any(|&mv| match step(maze, pose, mv) {
        Some(p) if p.pos == maze.planet() => true,
        Some(p) => any_plan_of_len(maze, p, len - 1),
        None => false,
    })
}

fn arb_moves(max: usize) -> impl Strategy<Value = Vec<Move>> {
    proptest::collection::vec(proptest::sample::select(Move::ALL.to_vec()), 0..=max)
}

proptest! {
    #[test]
    fn oracle_plans_succeed_and_are_shortest(maze in arb_maze(4)) {
        let expected = shortest_by_reachable_sets(&maze);
        match solve_oracle(&maze) {
            None => prop_assert_eq!(expected, None),
            Some(plan) => {
                let outcome = execute(&maze, &Program::from_moves(&plan));
                prop_assert_eq!(outcome.result, RunResult::Success);
                prop_assert_eq!(Some(plan.len()), expected);
                if plan.len() <= 8 {
                    for shorter in 1..plan.len() {
                        prop_assert!(!any_plan_of_len(&maze, maze.start(), shorter));
                    }
                    prop_assert!(any_plan_of_len(&maze, maze.start(), plan.len()));
                }
            }
        }
    }

    #[test]
    fn compression_preserves_trajectories(maze in arb_maze(6), moves in arb_moves(40)) {
        let compressed = compress_moves(&moves);
        prop_assert_eq!(compressed.expand_moves().unwrap(), moves.clone());
        prop_assert!(compressed.instructions.len() <= moves.len());
        let plain = execute(&maze, &Program::from_moves(&moves));
        let rolled = execute(&maze, &compressed);
        prop_assert_eq!(plain, rolled);
    }

    #[test]
    fn trajectories_are_well_formed(maze in arb_maze(6), moves in arb_moves(30)) {
        let outcome = execute(&maze, &Program::from_moves(&moves));
        let traj = &outcome.trajectory;
        prop_assert_eq!(traj[0], maze.start());
        for pair in traj.windows(2) {
            let ok = Move::ALL.iter().any(|&mv| step(&maze, pair[0], mv) == Some(pair[1]));
            prop_assert!(ok, "{} -> {} is not a single move", pair[0], pair[1]);
            prop_assert!(!maze.is_asteroid(pair[1].pos));
        }
        let last = *traj.last().unwrap();
        prop_assert_eq!(outcome.result == RunResult::Success, last.pos == maze.planet());
        prop_assert!(outcome.steps_executed <= moves.len());
        match outcome.result {
            RunResult::Crash => {
                prop_assert_eq!(traj.len(), outcome.steps_executed);
                prop_assert_eq!(moves[outcome.steps_executed - 1], Move::Forward);
                prop_assert_eq!(step(&maze, last, Move::Forward), None);
            }
            RunResult::Success => prop_assert_eq!(traj.len(), outcome.steps_executed + 1),
            RunResult::Incomplete => {
                prop_assert_eq!(outcome.steps_executed, moves.len());
                prop_assert_eq!(traj.len(), moves.len() + 1);
            }
        }
    }

    #[test]
    fn until_blocked_stops_within_cap(maze in arb_maze(6), body in proptest::sample::select(Move::ALL.to_vec())) {
        let program = Program::from_instructions(vec![Instruction::Loop { body, bound: LoopBound::UntilBlocked }]);
        let outcome = execute(&maze, &program);
        prop_assert!(outcome.steps_executed <= (maze.width() * maze.height()) as usize);
        prop_assert_ne!(outcome.result, RunResult::Crash);
    }
}

#[test]
fn corner_maze_solves_in_five() {
    let maze = parse_maze(">..\n.#.\n..P\n").unwrap();
    let plan = solve_oracle(&maze).unwrap();
    use Move::*;
    assert_eq!(plan, vec![Forward, Forward, TurnRight, Forward, Forward]);
    assert_eq!(shortest_by_reachable_sets(&maze), Some(5));
    assert_eq!(maze.start().heading, Heading::E);
}
