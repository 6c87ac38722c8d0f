//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::cell::Cell;
use std::collections::{HashMap, HashSet};
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, Stdio};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tilepad::facts::{load_facts, FactStore};
use tilepad::interpreter::{run_batch_from, Snapshot};
use tilepad::math::{check_answer, Equation, MathState, Op, Verdict};
use tilepad::maze::{compress_moves, execute, parse_maze, solve_oracle, Maze, Pose, RunResult};
use tilepad::world::{Action, EntityKind, World};
use tilepad::{GridPos, Mode, Move, Program, Session, SessionEvent, StepOutput, TileKind};

thread_local! {
    static STEPS_CHECKED: Cell<usize> = const { Cell::new(0) };
}

/// Applies one event and checks the world after it: no overlap, every
/// resting entity supported, settling finished.
fn checked_apply(session: &mut Session, event: SessionEvent) -> StepOutput {
    let out = session.apply(event);
    check_world(session.scene().world());
    out
}

fn check_world(world: &World) {
    if let Err(e) = world.check_invariants() {
        panic!("world invariant broken: {e}");
    }
    if let Err(e) = world.check_supported() {
        panic!("gravity invariant broken: {e}");
    }
    assert!(world.is_quiescent(), "settle stopped before quiescence");
    STEPS_CHECKED.with(|c| c.set(c.get() + 1));
}

fn place(kind: TileKind, col: u32, row: u32) -> SessionEvent {
    SessionEvent::Place {
        kind,
        pos: GridPos::new(col, row),
    }
}

fn sandbox_snapshot(session: &Session) -> tilepad::interpreter::WorldSnapshot {
    match session.snapshot() {
        Snapshot::Sandbox(s) => s,
        other => panic!("expected a sandbox snapshot, got {}", other.to_json()),
    }
}

fn run_story(events: &[SessionEvent]) -> (Session, Vec<StepOutput>) {
    let mut session = Session::new(Mode::Sandbox);
    let outs = events
        .iter()
        .map(|e| checked_apply(&mut session, *e))
        .collect();
    (session, outs)
}

fn stories() -> Result<String, String> {
    use TileKind::*;

    let (s, outs) = run_story(&[place(Rocket, 2, 0), place(Takeoff, 3, 0)]);
    let snap = sandbox_snapshot(&s);
    if !snap.entities.is_empty() || snap.space != [1] {
        return Err(format!(
            "rocket story ended with {}",
            s.snapshot().to_json()
        ));
    }
    match &outs[1].fact {
        Some(f) if f.trigger == "rocket.takeoff" => {}
        other => return Err(format!("rocket story fact: {other:?}")),
    }

    let (s, _) = run_story(&[place(Surface, 3, 0), place(Tree, 3, 4), place(Rain, 6, 0)]);
    let snap = sandbox_snapshot(&s);
    let tree = snap.entities.iter().find(|e| e.kind == EntityKind::Tree);
    let surface = snap.entities.iter().find(|e| e.kind == EntityKind::Surface);
    match (tree, surface) {
        (Some(t), Some(g)) if t.stage == 1 && t.col == g.col && t.row == g.row + 1 => {}
        _ => return Err(format!("tree story ended with {}", s.snapshot().to_json())),
    }

    let (s, _) = run_story(&[place(Surface, 4, 0), place(Takeoff, 5, 0)]);
    let snap = sandbox_snapshot(&s);
    if !snap.entities.is_empty() || snap.space != [1] {
        return Err(format!(
            "surface story ended with {}",
            s.snapshot().to_json()
        ));
    }

    let (s, _) = run_story(&[
        place(Surface, 2, 0),
        place(Surface, 3, 0),
        place(Surface, 4, 0),
        place(Tree, 2, 3),
        place(Tree, 4, 3),
        place(Rain, 8, 0),
    ]);
    let snap = sandbox_snapshot(&s);
    let trees: Vec<_> = snap
        .entities
        .iter()
        .filter(|e| e.kind == EntityKind::Tree)
        .map(|e| (e.col, e.row, e.stage))
        .collect();
    if trees != [(2, 1, 1), (4, 1, 1)] {
        return Err(format!("garden story trees: {trees:?}"));
    }
    Ok("4 stories".into())
}

fn random_event(rng: &mut ChaCha8Rng, kinds: &[TileKind]) -> SessionEvent {
    let pos = if rng.gen_bool(0.05) {
        GridPos::new(rng.gen_range(9..12), rng.gen_range(7..10))
    } else {
        GridPos::new(rng.gen_range(0..6), rng.gen_range(0..5))
    };
    match rng.gen_range(0..10) {
        0 | 1 => SessionEvent::Remove { pos },
        2 => SessionEvent::Tick {
            n: rng.gen_range(0..3),
        },
        _ => SessionEvent::Place {
            kind: *kinds.choose(rng).unwrap(),
            pos,
        },
    }
}

fn configured(mode: Mode) -> Session {
    let mut session = Session::new(mode);
    match mode {
        Mode::Sandbox => {}
        Mode::Maze => {
            session.load_maze(parse_maze("..#...\n.>..#.\n..#...\n#....P\n").unwrap());
        }
        Mode::Math => {
            session.set_equation(Equation::new(9, Op::Minus, 3).unwrap());
        }
    }
    session
}

fn equivalence() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7111_e9ad);
    let kinds = TileKind::all();
    let modes = [Mode::Sandbox, Mode::Maze, Mode::Math];
    for script_no in 0..1000 {
        let mode = modes[script_no % 3];
        let events: Vec<SessionEvent> = (0..50).map(|_| random_event(&mut rng, &kinds)).collect();

        let mut stepwise = configured(mode);
        let mut diags = Vec::new();
        for event in &events {
            let out = checked_apply(&mut stepwise, *event);
            diags.extend(out.diagnostics.iter().map(|d| d.to_string()));
        }
        let (batch, outs) = run_batch_from(configured(mode), &events);
        let mut batch_diags: Vec<String> = outs
            .iter()
            .flat_map(|o| o.diagnostics.iter().map(|d| d.to_string()))
            .collect();

        let want = stepwise.snapshot().to_json();
        if batch.snapshot().to_json() != want {
            return Err(format!("script {script_no}: batch snapshot differs"));
        }
        if stepwise.replayed().snapshot().to_json() != want {
            return Err(format!("script {script_no}: replayed snapshot differs"));
        }
        diags.sort();
        batch_diags.sort();
        if diags != batch_diags {
            return Err(format!("script {script_no}: diagnostics differ"));
        }
    }
    Ok("1000 scripts of 50 events".into())
}

fn random_maze(rng: &mut ChaCha8Rng, max_side: u32) -> Maze {
    loop {
        let w = rng.gen_range(1..=max_side);
        let h = rng.gen_range(1..=max_side);
        let n = (w * h) as usize;
        if n < 2 {
            continue;
        }
        let mut cells: Vec<char> = (0..n)
            .map(|_| if rng.gen_bool(0.3) { '#' } else { '.' })
            .collect();
        let start = rng.gen_range(0..n);
        let mut planet = rng.gen_range(0..n);
        while planet == start {
            planet = rng.gen_range(0..n);
        }
        cells[start] = *['^', '>', 'v', '<'].choose(rng).unwrap();
        cells[planet] = 'P';
        let text: String = cells
            .chunks(w as usize)
            .map(|row| row.iter().collect::<String>() + "\n")
            .collect();
        return parse_maze(&text).unwrap();
    }
}

fn advance(maze: &Maze, pose: Pose, mv: Move) -> Option<Pose> {
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
            let (c, r) = (pose.pos.col as i64 + dc, pose.pos.row as i64 + dr);
            if c < 0 || r < 0 || c >= maze.width() as i64 || r >= maze.height() as i64 {
                return None;
            }
            let pos = GridPos::new(c as u32, r as u32);
            (!maze.is_asteroid(pos)).then_some(Pose { pos, ..pose })
        }
    }
}

/// Depth-first search over every move list of length at most `budget`,
/// remembering (pose, budget) pairs already shown to fail.
fn plan_within(maze: &Maze, pose: Pose, budget: usize, failed: &mut HashMap<Pose, usize>) -> bool {
    if budget == 0 || failed.get(&pose).is_some_and(|&b| b >= budget) {
        return false;
    }
    for mv in Move::ALL {
        if let Some(next) = advance(maze, pose, mv) {
            if next.pos == maze.planet() || plan_within(maze, next, budget - 1, failed) {
                return true;
            }
        }
    }
    let best = failed.entry(pose).or_insert(0);
    *best = (*best).max(budget);
    false
}

fn maze_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3a2e);
    let mut unsolvable = 0;
    for (class, max_side, check_min) in [("4x4", 4, true), ("6x6", 6, false)] {
        let mut solved = 0;
        while solved < 500 {
            let maze = random_maze(&mut rng, max_side);
            let states = (maze.width() * maze.height() * 4) as usize;
            let Some(plan) = solve_oracle(&maze) else {
                if check_min && plan_within(&maze, maze.start(), states, &mut HashMap::new()) {
                    return Err(format!("oracle missed a plan in\n{maze}"));
                }
                unsolvable += 1;
                continue;
            };
            let outcome = execute(&maze, &Program::from_moves(&plan));
            if outcome.result != RunResult::Success {
                return Err(format!(
                    "{class}: plan {plan:?} ends in {} on\n{maze}",
                    outcome.result
                ));
            }
            if check_min {
                let start = maze.start();
                if plan_within(&maze, start, plan.len() - 1, &mut HashMap::new()) {
                    return Err(format!(
                        "shorter plan than {} exists in\n{maze}",
                        plan.len()
                    ));
                }
            }
            solved += 1;
        }
    }
    Ok(format!(
        "1000 solvable mazes, {unsolvable} unsolvable skipped"
    ))
}

fn compression() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0de);
    let open = parse_maze("..........\n..........\n....>.....\n..........\n.........P\n").unwrap();
    for i in 0..1000 {
        let len = rng.gen_range(0..=40);
        let moves: Vec<Move> = (0..len)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    Move::Forward
                } else {
                    *Move::ALL.choose(&mut rng).unwrap()
                }
            })
            .collect();
        let maze = if i % 2 == 0 {
            random_maze(&mut rng, 6)
        } else {
            open.clone()
        };
        let compressed = compress_moves(&moves);
        if compressed.expand_moves().as_deref() != Some(&moves[..]) {
            return Err(format!("decompression changed {moves:?}"));
        }
        let plain = execute(&maze, &Program::from_moves(&moves));
        let rolled = execute(&maze, &compressed);
        if plain.trajectory != rolled.trajectory || plain.result != rolled.result {
            return Err(format!("trajectories differ for {moves:?}"));
        }
    }
    Ok("1000 move lists".into())
}

fn gravity() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a71);
    let kinds = [
        EntityKind::Rocket,
        EntityKind::Tree,
        EntityKind::Surface,
        EntityKind::Asteroid,
    ];
    for _ in 0..2000 {
        let mut world = World::new(8, 6);
        for _ in 0..rng.gen_range(1..30) {
            match rng.gen_range(0..4) {
                0 => {
                    world.apply_action(Action::Takeoff);
                }
                1 => {
                    world.apply_action(Action::Rain);
                }
                _ => {
                    let pos = GridPos::new(rng.gen_range(0..8), rng.gen_range(0..6));
                    let _ = world.spawn(*kinds.choose(&mut rng).unwrap(), pos);
                }
            }
        }
        let bound = world.settle_bound();
        let report = world.settle();
        if !report.quiescent || report.rounds > bound {
            return Err(format!(
                "settle took {} rounds, bound {bound}",
                report.rounds
            ));
        }
        check_world(&world);
    }
    let steps = STEPS_CHECKED.with(Cell::get);
    Ok(format!("{steps} steps and settles checked"))
}

fn math_exhaustive() -> Result<String, String> {
    let mut checked = 0;
    for a in 0..=9u32 {
        for b in 0..=9u32 {
            for op in [Op::Plus, Op::Minus] {
                let Ok(eq) = Equation::new(a, op, b) else {
                    continue;
                };
                let truth = if op == Op::Plus { a + b } else { a - b };
                for answer in 0..=18u32 {
                    let want = if answer == truth {
                        Verdict::Correct
                    } else {
                        Verdict::Incorrect
                    };
                    let mut states = Vec::new();
                    if answer <= 9 {
                        states.push(MathState {
                            number_answer: Some(answer as u8),
                            ..MathState::new(eq)
                        });
                    }
                    if answer >= 1 {
                        states.push(MathState {
                            answer_tiles: answer,
                            ..MathState::new(eq)
                        });
                    }
                    for state in states {
                        if check_answer(&state) != Ok(want) {
                            return Err(format!("{eq} with {state:?}"));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} answers over 155 equations"))
}

fn protocol_golden() -> Result<String, String> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let requests = std::fs::read(data.join("session_requests.jsonl")).map_err(|e| e.to_string())?;
    let golden = std::fs::read(data.join("session_replies.jsonl")).map_err(|e| e.to_string())?;
    let lines = requests.iter().filter(|&&b| b == b'\n').count();
    if lines != 30 {
        return Err(format!("request file has {lines} lines"));
    }
    for run in 1..=2 {
        let mut child = Command::new(env!("CARGO_BIN_EXE_tilepad"))
            .args(["serve", "--stdio"])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| e.to_string())?;
        child
            .stdin
            .take()
            .unwrap()
            .write_all(&requests)
            .map_err(|e| e.to_string())?;
        let out = child.wait_with_output().map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("run {run}: server exited with {}", out.status));
        }
        if out.stdout != golden {
            return Err(format!("run {run}: replies differ from the golden file"));
        }
    }
    Ok("30 requests, 2 runs byte-identical".into())
}

fn fact_rotation() -> Result<String, String> {
    let mut store = FactStore::bundled();
    let triggers: Vec<String> = store.triggers().map(str::to_string).collect();
    for trigger in &triggers {
        let n = store.group(trigger).len();
        let ids: HashSet<String> = (0..n)
            .map(|_| store.next_fact(trigger).unwrap().id)
            .collect();
        if ids.len() != n {
            return Err(format!(
                "{trigger}: {n} firings gave {} distinct facts",
                ids.len()
            ));
        }
    }

    // Through sessions: n launches hand out the n rocket facts.
    let facts = Arc::new(FactStore::bundled());
    let n = facts.group("rocket.takeoff").len();
    let mut session = Session::with_facts(Mode::Sandbox, facts.clone());
    let mut seen = HashSet::new();
    for i in 0..n as u32 {
        checked_apply(&mut session, place(TileKind::Rocket, i, 0));
        let out = checked_apply(&mut session, place(TileKind::Takeoff, i, 1));
        seen.insert(out.fact.map(|f| f.id).unwrap_or_default());
    }
    if seen.len() != n || seen.contains("") {
        return Err(format!("launches gave facts {seen:?}"));
    }

    // Replays of the same log hand out the same facts in the same order.
    let mut rng = ChaCha8Rng::seed_from_u64(0xfac7);
    let kinds = TileKind::all();
    let custom = Arc::new(
        load_facts("tree.grow\tg1\tone\ntree.grow\tg2\ttwo\nrocket.takeoff\tr1\tthree\n").unwrap(),
    );
    for _ in 0..200 {
        let events: Vec<SessionEvent> = (0..60).map(|_| random_event(&mut rng, &kinds)).collect();
        for store in [facts.clone(), custom.clone()] {
            let fresh = || Session::with_facts(Mode::Sandbox, store.clone());
            let ids = |outs: Vec<StepOutput>| -> Vec<String> {
                outs.into_iter()
                    .filter_map(|o| o.fact.map(|f| f.id))
                    .collect()
            };
            let (first_session, first) = run_batch_from(fresh(), &events);
            let (_, second) = run_batch_from(fresh(), &events);
            if ids(first.clone()) != ids(second) {
                return Err("two replays gave different fact sequences".into());
            }
            let probe = place(TileKind::Rain, 9, 7);
            let mut a = first_session.clone();
            let mut b = first_session.replayed();
            if a.apply(probe).fact != b.apply(probe).fact {
                return Err("replayed session continues with a different fact".into());
            }
        }
    }
    Ok(format!("{} trigger groups, 400 replays", triggers.len()))
}

type Criterion = (
    &'static str,
    Option<Duration>,
    fn() -> Result<String, String>,
);

fn main() {
    let criteria: [Criterion; 8] = [
        ("story reproduction", Some(Duration::from_secs(1)), stories),
        (
            "incremental/batch equivalence",
            Some(Duration::from_secs(10)),
            equivalence,
        ),
        (
            "maze oracle soundness + minimality",
            Some(Duration::from_secs(60)),
            maze_oracle,
        ),
        (
            "compression equivalence",
            Some(Duration::from_secs(5)),
            compression,
        ),
        ("gravity invariants", None, gravity),
        ("math exhaustive", None, math_exhaustive),
        ("protocol golden log", None, protocol_golden),
        ("fact rotation", None, fact_rotation),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (name, limit, run) in criteria {
        let started = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|payload| {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(msg)
        });
        let elapsed = started.elapsed();
        let result = match (result, limit) {
            (Ok(detail), Some(limit)) if elapsed > limit => {
                Err(format!("{detail}, but took longer than {limit:?}"))
            }
            (other, _) => other,
        };
        let timing = match limit {
            Some(limit) => format!("{elapsed:.2?}, limit {limit:?}"),
            None => format!("{elapsed:.2?}"),
        };
        match result {
            Ok(detail) => println!("PASS  {name}: {detail} ({timing})"),
            Err(why) => {
                failures += 1;
                println!("FAIL  {name}: {why} ({timing})");
            }
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
