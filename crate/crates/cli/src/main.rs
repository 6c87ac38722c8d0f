use std::collections::HashMap;
use std::io::{self, BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::thread;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand};

use tilepad::facts::{load_facts, FactStore};
use tilepad::math::{eval_equation, generate_equation, Difficulty, Verdict};
use tilepad::maze::{compress_moves, execute, parse_maze, solve_oracle, Maze, RunResult};
use tilepad::protocol::serve;
use tilepad::script::{parse_script, ScriptCommand};
use tilepad::{lower, parse_tile_token, GridPos, Mode, Program, Session, Tile};

mod report;

#[derive(Parser)]
#[command(
    name = "tilepad",
    version,
    about = "Tile programming launchpad interpreter"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a session script, printing every step.
    Run {
        script: PathBuf,
        #[arg(long)]
        facts: Option<PathBuf>,
    },
    /// Run a tile program through a maze, or solve the maze.
    #[command(group(ArgGroup::new("action").required(true).args(["program", "solve", "solve_compressed"])))]
    Maze {
        maze: PathBuf,
        program: Option<PathBuf>,
        /// Print a shortest plan, one tile per line.
        #[arg(long)]
        solve: bool,
        /// Print a shortest plan with repeated moves rolled into loops.
        #[arg(long)]
        solve_compressed: bool,
    },
    /// Show a generated equation and judge an answer.
    Math {
        #[arg(long)]
        seed: u64,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        difficulty: u8,
        /// Also print the expected answer.
        #[arg(long)]
        reveal: bool,
        /// The answer to judge; read from standard input when absent.
        #[arg(long)]
        answer: Option<u32>,
    },
    /// Serve the line protocol on a local address or standard input/output.
    #[command(group(ArgGroup::new("transport").required(true).args(["addr", "stdio"])))]
    Serve {
        addr: Option<String>,
        #[arg(long)]
        stdio: bool,
        #[arg(long)]
        facts: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_fact_store(path: Option<&Path>) -> Result<Arc<FactStore>> {
    let store = match path {
        Some(path) => load_facts(&read(path)?).with_context(|| path.display().to_string())?,
        None => FactStore::bundled(),
    };
    Ok(Arc::new(store))
}

fn load_maze(path: &Path) -> Result<Maze> {
    parse_maze(&read(path)?).with_context(|| path.display().to_string())
}

fn exit_for(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run_script(script_path: &Path, facts: Option<&Path>) -> Result<ExitCode> {
    let lines =
        parse_script(&read(script_path)?).with_context(|| script_path.display().to_string())?;
    let facts = load_fact_store(facts)?;
    let base = script_path.parent().unwrap_or(Path::new("."));

    // Load every maze up front so a bad file fails before any output.
    let mut mazes = HashMap::new();
    for line in &lines {
        if let ScriptCommand::Maze(rel) = &line.command {
            if !mazes.contains_key(rel) {
                mazes.insert(rel.clone(), load_maze(&base.join(rel))?);
            }
        }
    }

    let mut session = Session::with_facts(Mode::Sandbox, facts);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut last_judgment = None;
    for line in lines {
        let step = match line.command {
            ScriptCommand::Mode(mode) => session.set_mode(mode),
            ScriptCommand::Place { kind, pos } => session.apply_placement(kind, pos),
            ScriptCommand::Remove { pos } => session.apply_removal(pos),
            ScriptCommand::Tick(n) => session.tick(n),
            ScriptCommand::Maze(rel) => {
                if session.mode() != Mode::Maze {
                    writeln!(
                        out,
                        "== line {} ==\nerror: MAZE needs maze mode\n",
                        line.line
                    )?;
                    continue;
                }
                session.load_maze(mazes[&rel].clone())
            }
            ScriptCommand::Equation(eq) => {
                if session.mode() != Mode::Math {
                    writeln!(out, "== line {} ==\nerror: EQ needs math mode\n", line.line)?;
                    continue;
                }
                session.set_equation(eq)
            }
            ScriptCommand::Check => {
                match session.check() {
                    Ok(judgment) => {
                        writeln!(out, "== check ==\noutcome: {judgment}\n")?;
                        last_judgment = Some(judgment);
                    }
                    Err(e) => writeln!(out, "== check ==\nerror: {e}\n")?,
                }
                continue;
            }
        };
        writeln!(out, "{}", report::format_step(&step, session.scene()))?;
    }
    Ok(exit_for(last_judgment.is_none_or(|j| j.passed())))
}

fn parse_program(text: &str) -> Result<Program> {
    let mut tiles = Vec::new();
    for line in text.lines() {
        let content = line.split('#').next().unwrap_or("");
        for token in content.split_whitespace() {
            let kind = parse_tile_token(token)?;
            let n = tiles.len() as u32;
            tiles.push(Tile {
                id: n + 1,
                kind,
                pos: GridPos::new(n, 0),
                placed_seq: n as u64 + 1,
            });
        }
    }
    Ok(lower(&tiles, Mode::Maze))
}

fn run_maze(
    maze_path: &Path,
    program: Option<&Path>,
    solve: bool,
    solve_compressed: bool,
) -> Result<ExitCode> {
    let maze = load_maze(maze_path)?;
    if solve || solve_compressed {
        let Some(plan) = solve_oracle(&maze) else {
            eprintln!("unreachable: no path to the planet");
            return Ok(ExitCode::from(1));
        };
        let program = if solve_compressed {
            compress_moves(&plan)
        } else {
            Program::from_moves(&plan)
        };
        for line in program.to_token_lines() {
            println!("{line}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let path = program.expect("clap requires a program or a solve flag");
    let program = parse_program(&read(path)?).with_context(|| path.display().to_string())?;
    for diag in &program.diagnostics {
        eprintln!("warning: {diag}");
    }
    let outcome = execute(&maze, &program);
    let last = *outcome
        .trajectory
        .last()
        .expect("trajectory starts at the start pose");
    println!("{}", maze.render(last, &outcome.trajectory));
    println!("result: {}", outcome.result);
    println!("steps: {}", outcome.steps_executed);
    Ok(exit_for(outcome.result == RunResult::Success))
}

fn run_math(seed: u64, level: u8, reveal: bool, answer: Option<u32>) -> Result<ExitCode> {
    let difficulty = Difficulty::from_level(level).expect("clap restricts difficulty to 1..=2");
    let equation = generate_equation(seed, difficulty);
    let expected = eval_equation(&equation);
    println!("{equation} = ?");
    if reveal {
        println!("answer: {expected}");
    }
    let answer = match answer {
        Some(a) => Some(a),
        None => {
            let mut line = String::new();
            io::stdin().lock().read_line(&mut line)?;
            let line = line.trim();
            if line.is_empty() {
                None
            } else {
                Some(
                    line.parse::<u32>()
                        .with_context(|| format!("bad answer `{line}`"))?,
                )
            }
        }
    };
    let Some(answer) = answer else {
        return Ok(ExitCode::SUCCESS);
    };
    let verdict = if answer == expected {
        Verdict::Correct
    } else {
        Verdict::Incorrect
    };
    println!("{verdict}");
    Ok(exit_for(verdict == Verdict::Correct))
}

fn run_serve(addr: Option<&str>, facts: Option<&Path>) -> Result<ExitCode> {
    let facts = load_fact_store(facts)?;
    let Some(addr) = addr else {
        let stdin = io::stdin();
        serve(stdin.lock(), io::stdout().lock(), facts)?;
        return Ok(ExitCode::SUCCESS);
    };
    let listener = TcpListener::bind(addr).with_context(|| format!("cannot bind {addr}"))?;
    eprintln!("listening on {}", listener.local_addr()?);
    for stream in listener.incoming() {
        let stream = match stream {
            Ok(s) => s,
            Err(e) => {
                eprintln!("accept failed: {e}");
                continue;
            }
        };
        let facts = facts.clone();
        thread::spawn(move || {
            let reader = match stream.try_clone() {
                Ok(r) => BufReader::new(r),
                Err(e) => {
                    eprintln!("connection setup failed: {e}");
                    return;
                }
            };
            if let Err(e) = serve(reader, stream, facts) {
                eprintln!("connection ended: {e}");
            }
        });
    }
    bail!("listener closed")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { script, facts } => run_script(script, facts.as_deref()),
        Command::Maze {
            maze,
            program,
            solve,
            solve_compressed,
        } => run_maze(maze, program.as_deref(), *solve, *solve_compressed),
        Command::Math {
            seed,
            difficulty,
            reveal,
            answer,
        } => run_math(*seed, *difficulty, *reveal, *answer),
        Command::Serve {
            addr,
            stdio: _,
            facts,
        } => run_serve(addr.as_deref(), facts.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("tilepad: {e:#}");
            ExitCode::from(2)
        }
    }
}
