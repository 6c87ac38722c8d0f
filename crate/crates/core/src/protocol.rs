//! Newline-delimited JSON protocol for driving a [`Session`] from another
//! program, one request and one reply per line.
//!
//! Requests:
//!
//! ```text
//! {"type":"place","tile":"rocket","col":2,"row":0}
//! {"type":"remove","col":2,"row":0}
//! {"type":"tick","n":3}
//! {"type":"reset"}
//! {"type":"mode","mode":"maze"}
//! {"type":"load_maze","text":">.P"}
//! {"type":"set_equation","a":3,"op":"+","b":4}
//! {"type":"check"}
//! ```
//!
//! Replies are `step`, `outcome` or `error` objects with their fields in a
//! fixed order, so a request file always yields the same reply bytes.

use std::io::{self, BufRead, Write};
use std::sync::Arc;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::facts::FactStore;
use crate::interpreter::{CheckError, Judgment, Mode, Session, StepOutput};
use crate::math::{Equation, Op, Verdict};
use crate::maze::{parse_maze, RunResult};
use crate::tile::{parse_tile_token, GridPos, TileKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClientMessage {
    Place { tile: TileKind, col: u32, row: u32 },
    Remove { col: u32, row: u32 },
    Tick { n: u32 },
    Reset,
    Mode { mode: Mode },
    LoadMaze { text: String },
    SetEquation { equation: Equation },
    Check,
}

impl ClientMessage {
    /// The request line for this message, without the newline.
    pub fn to_json(&self) -> String {
        let s = |text: &str| serde_json::to_string(text).expect("string serializes");
        match self {
            ClientMessage::Place { tile, col, row } => format!(
                r#"{{"type":"place","tile":{},"col":{col},"row":{row}}}"#,
                s(&tile.token())
            ),
            ClientMessage::Remove { col, row } => {
                format!(r#"{{"type":"remove","col":{col},"row":{row}}}"#)
            }
            ClientMessage::Tick { n } => format!(r#"{{"type":"tick","n":{n}}}"#),
            ClientMessage::Reset => r#"{"type":"reset"}"#.to_string(),
            ClientMessage::Mode { mode } => format!(r#"{{"type":"mode","mode":"{mode}"}}"#),
            ClientMessage::LoadMaze { text } => {
                format!(r#"{{"type":"load_maze","text":{}}}"#, s(text))
            }
            ClientMessage::SetEquation { equation } => format!(
                r#"{{"type":"set_equation","a":{},"op":"{}","b":{}}}"#,
                equation.a(),
                equation.op().symbol(),
                equation.b()
            ),
            ClientMessage::Check => r#"{"type":"check"}"#.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad `{field}`: {message}")]
pub struct DecodeError {
    pub field: String,
    pub message: String,
}

impl DecodeError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        DecodeError {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

fn field<'a>(
    obj: &'a serde_json::Map<String, Value>,
    name: &str,
) -> Result<&'a Value, DecodeError> {
    obj.get(name)
        .ok_or_else(|| DecodeError::new(name, "missing field"))
}

fn str_field<'a>(
    obj: &'a serde_json::Map<String, Value>,
    name: &str,
) -> Result<&'a str, DecodeError> {
    field(obj, name)?
        .as_str()
        .ok_or_else(|| DecodeError::new(name, "expected a string"))
}

fn u32_field(obj: &serde_json::Map<String, Value>, name: &str) -> Result<u32, DecodeError> {
    field(obj, name)?
        .as_u64()
        .and_then(|n| u32::try_from(n).ok())
        .ok_or_else(|| DecodeError::new(name, "expected a non-negative integer"))
}

/// Parses one request line.
pub fn decode_client(line: &str) -> Result<ClientMessage, DecodeError> {
    let value: Value =
        serde_json::from_str(line).map_err(|e| DecodeError::new("line", e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| DecodeError::new("line", "expected a JSON object"))?;
    let msg = match str_field(obj, "type")? {
        "place" => {
            let token = str_field(obj, "tile")?;
            let tile =
                parse_tile_token(token).map_err(|e| DecodeError::new("tile", e.to_string()))?;
            ClientMessage::Place {
                tile,
                col: u32_field(obj, "col")?,
                row: u32_field(obj, "row")?,
            }
        }
        "remove" => ClientMessage::Remove {
            col: u32_field(obj, "col")?,
            row: u32_field(obj, "row")?,
        },
        "tick" => ClientMessage::Tick {
            n: u32_field(obj, "n")?,
        },
        "reset" => ClientMessage::Reset,
        "mode" => ClientMessage::Mode {
            mode: str_field(obj, "mode")?
                .parse()
                .map_err(|e: String| DecodeError::new("mode", e))?,
        },
        "load_maze" => ClientMessage::LoadMaze {
            text: str_field(obj, "text")?.to_string(),
        },
        "set_equation" => {
            let a = u32_field(obj, "a")?;
            let op = Op::parse(str_field(obj, "op")?)
                .ok_or_else(|| DecodeError::new("op", "expected \"+\" or \"-\""))?;
            let b = u32_field(obj, "b")?;
            let equation = Equation::new(a, op, b).map_err(|e| {
                let field = if a > 9 { "a" } else { "b" };
                DecodeError::new(field, e.to_string())
            })?;
            ClientMessage::SetEquation { equation }
        }
        "check" => ClientMessage::Check,
        other => return Err(DecodeError::new("type", format!("unknown type `{other}`"))),
    };
    Ok(msg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeResult {
    Success,
    Crash,
    Incomplete,
    Correct,
    Incorrect,
}

impl From<Judgment> for OutcomeResult {
    fn from(j: Judgment) -> Self {
        match j {
            Judgment::Run(RunResult::Success) => OutcomeResult::Success,
            Judgment::Run(RunResult::Crash) => OutcomeResult::Crash,
            Judgment::Run(RunResult::Incomplete) => OutcomeResult::Incomplete,
            Judgment::Math(Verdict::Correct) => OutcomeResult::Correct,
            Judgment::Math(Verdict::Incorrect) => OutcomeResult::Incorrect,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Step(StepOutput),
    Outcome { result: OutcomeResult },
    Error { code: String, message: String },
}

impl ServerMessage {
    pub fn error(code: &str, message: impl Into<String>) -> Self {
        ServerMessage::Error {
            code: code.to_string(),
            message: message.into(),
        }
    }

    /// The reply line, without the newline.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reply serializes")
    }
}

/// Applies one decoded request to the session.
pub fn handle(session: &mut Session, msg: ClientMessage) -> ServerMessage {
    let step = ServerMessage::Step;
    match msg {
        ClientMessage::Place { tile, col, row } => {
            step(session.apply_placement(tile, GridPos::new(col, row)))
        }
        ClientMessage::Remove { col, row } => step(session.apply_removal(GridPos::new(col, row))),
        ClientMessage::Tick { n } => step(session.tick(n)),
        ClientMessage::Reset => step(session.reset()),
        ClientMessage::Mode { mode } => step(session.set_mode(mode)),
        ClientMessage::LoadMaze { text } => {
            if session.mode() != Mode::Maze {
                return ServerMessage::error("mode", "load_maze needs maze mode");
            }
            match parse_maze(&text) {
                Ok(maze) => step(session.load_maze(maze)),
                Err(e) => ServerMessage::error("maze", e.to_string()),
            }
        }
        ClientMessage::SetEquation { equation } => {
            if session.mode() != Mode::Math {
                return ServerMessage::error("mode", "set_equation needs math mode");
            }
            step(session.set_equation(equation))
        }
        ClientMessage::Check => match session.check() {
            Ok(judgment) => ServerMessage::Outcome {
                result: judgment.into(),
            },
            Err(e) => {
                let code = match e {
                    CheckError::Mode(_) => "mode",
                    CheckError::NoMaze => "no_maze",
                    CheckError::NoEquation => "no_equation",
                    CheckError::NoAnswer => "no_answer",
                };
                ServerMessage::error(code, e.to_string())
            }
        },
    }
}

/// Decodes and handles one raw line. Malformed input never touches the
/// session.
pub fn handle_line(session: &mut Session, line: &[u8]) -> ServerMessage {
    let text = match std::str::from_utf8(line) {
        Ok(text) => text,
        Err(_) => return ServerMessage::error("decode", "bad `line`: not valid UTF-8"),
    };
    match decode_client(text) {
        Ok(msg) => handle(session, msg),
        Err(e) => ServerMessage::error("decode", e.to_string()),
    }
}

/// Serves one session over a byte stream until it ends. Blank lines are
/// skipped; every other line gets exactly one reply line. A final line
/// without a newline is answered with a `partial` error and dropped.
pub fn serve<R: BufRead, W: Write>(
    mut reader: R,
    mut writer: W,
    facts: Arc<FactStore>,
) -> io::Result<()> {
    let mut session = Session::with_facts(Mode::Sandbox, facts);
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        if buf.last() != Some(&b'\n') {
            let reply = ServerMessage::error("partial", "incomplete line at end of stream");
            writeln!(writer, "{}", reply.to_json())?;
            writer.flush()?;
            break;
        }
        buf.pop();
        if buf.last() == Some(&b'\r') {
            buf.pop();
        }
        if buf.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        let reply = handle_line(&mut session, &buf);
        writeln!(writer, "{}", reply.to_json())?;
        writer.flush()?;
    }
    Ok(())
}
