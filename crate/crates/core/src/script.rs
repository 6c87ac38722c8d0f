//! Session scripts: one command per line, `#` starts a comment.
//!
//! ```text
//! MODE sandbox
//! PLACE rocket AT 2,0
//! PLACE takeoff AT 3,0
//! REMOVE AT 3,0
//! TICK 2
//! MODE maze
//! MAZE corridor.txt
//! CHECK
//! MODE math
//! EQ 3 + 4
//! ```

use thiserror::Error;

use crate::interpreter::Mode;
use crate::math::{Equation, Op};
use crate::tile::{parse_tile_token, GridPos, TileKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScriptCommand {
    Mode(Mode),
    Place {
        kind: TileKind,
        pos: GridPos,
    },
    Remove {
        pos: GridPos,
    },
    Tick(u32),
    Check,
    /// Path of a maze file, relative to the script.
    Maze(String),
    Equation(Equation),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptLine {
    pub line: usize,
    pub command: ScriptCommand,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

fn parse_pos(words: &[&str]) -> Result<GridPos, String> {
    let joined = words.concat();
    let (col, row) = joined
        .split_once(',')
        .ok_or_else(|| format!("expected <col>,<row>, found `{joined}`"))?;
    let num = |s: &str| {
        s.parse::<u32>()
            .map_err(|_| format!("bad coordinate `{s}`"))
    };
    Ok(GridPos::new(num(col)?, num(row)?))
}

fn parse_command(words: &[&str]) -> Result<ScriptCommand, String> {
    match words {
        ["MODE", mode] => mode.parse().map(ScriptCommand::Mode),
        ["PLACE", token, "AT", pos @ ..] if !pos.is_empty() => {
            let kind = parse_tile_token(token).map_err(|e| e.to_string())?;
            Ok(ScriptCommand::Place {
                kind,
                pos: parse_pos(pos)?,
            })
        }
        ["REMOVE", "AT", pos @ ..] if !pos.is_empty() => Ok(ScriptCommand::Remove {
            pos: parse_pos(pos)?,
        }),
        ["TICK", n] => n
            .parse()
            .map(ScriptCommand::Tick)
            .map_err(|_| format!("bad tick count `{n}`")),
        ["CHECK"] => Ok(ScriptCommand::Check),
        ["MAZE", path] => Ok(ScriptCommand::Maze(path.to_string())),
        ["EQ", a, op, b] => {
            let operand = |s: &str| s.parse::<u32>().map_err(|_| format!("bad operand `{s}`"));
            let op = Op::parse(op).ok_or_else(|| format!("bad operator `{op}`"))?;
            Equation::new(operand(a)?, op, operand(b)?)
                .map(ScriptCommand::Equation)
                .map_err(|e| e.to_string())
        }
        [keyword, ..] => Err(format!("cannot parse `{keyword}` command")),
        [] => unreachable!("blank lines are skipped"),
    }
}

pub fn parse_script(text: &str) -> Result<Vec<ScriptLine>, ScriptError> {
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        let command = parse_command(&words).map_err(|message| ScriptError {
            line: idx + 1,
            message,
        })?;
        lines.push(ScriptLine {
            line: idx + 1,
            command,
        });
    }
    Ok(lines)
}
