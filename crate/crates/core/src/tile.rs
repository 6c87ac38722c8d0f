//! Tile vocabulary, canvas geometry and placement rules.
//!
//! Every tile has a canonical lowercase token (`rocket`, `loop:5`, `num:3`,
//! ...). Tokens are what scripts, the wire protocol and the CLI speak.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

pub const DEFAULT_CANVAS_WIDTH: u32 = 10;
pub const DEFAULT_CANVAS_HEIGHT: u32 = 8;
pub const MAX_LOOP_COUNT: u8 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TileKind {
    Rocket,
    Takeoff,
    Surface,
    Tree,
    Rain,
    Asteroid,
    Forward,
    TurnLeft,
    TurnRight,
    /// Repeats the following movement tile; count is 1..=9.
    Repeat(u8),
    /// Repeats the following movement tile while the cell ahead is free.
    RepeatUntilBlocked,
    /// A single digit 0..=9.
    Number(u8),
    Plus,
    Minus,
    Equals,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TileError {
    #[error("unknown tile token `{0}`")]
    UnknownToken(String),
    #[error("bad parameter in tile token `{0}`")]
    BadParameter(String),
}

impl TileKind {
    /// Every parameter-free kind plus every valid parameterisation, in token order.
    pub fn all() -> Vec<TileKind> {
        use TileKind::*;
        let mut kinds = vec![
            Rocket, Takeoff, Surface, Tree, Rain, Asteroid, Forward, TurnLeft, TurnRight,
        ];
        kinds.extend((1..=MAX_LOOP_COUNT).map(Repeat));
        kinds.push(RepeatUntilBlocked);
        kinds.extend((0..=9).map(Number));
        kinds.extend([Plus, Minus, Equals]);
        kinds
    }

    pub fn is_movement(self) -> bool {
        matches!(
            self,
            TileKind::Forward | TileKind::TurnLeft | TileKind::TurnRight
        )
    }

    pub fn is_loop(self) -> bool {
        matches!(self, TileKind::Repeat(_) | TileKind::RepeatUntilBlocked)
    }

    /// The canonical token spelling.
    pub fn token(self) -> String {
        self.to_string()
    }
}

impl fmt::Display for TileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TileKind::Rocket => f.write_str("rocket"),
            TileKind::Takeoff => f.write_str("takeoff"),
            TileKind::Surface => f.write_str("surface"),
            TileKind::Tree => f.write_str("tree"),
            TileKind::Rain => f.write_str("rain"),
            TileKind::Asteroid => f.write_str("asteroid"),
            TileKind::Forward => f.write_str("forward"),
            TileKind::TurnLeft => f.write_str("left"),
            TileKind::TurnRight => f.write_str("right"),
            TileKind::Repeat(n) => write!(f, "loop:{n}"),
            TileKind::RepeatUntilBlocked => f.write_str("loop:*"),
            TileKind::Number(d) => write!(f, "num:{d}"),
            TileKind::Plus => f.write_str("plus"),
            TileKind::Minus => f.write_str("minus"),
            TileKind::Equals => f.write_str("equals"),
        }
    }
}

impl Serialize for TileKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Parses one canonical tile token.
pub fn parse_tile_token(token: &str) -> Result<TileKind, TileError> {
    let kind = match token {
        "rocket" => TileKind::Rocket,
        "takeoff" => TileKind::Takeoff,
        "surface" => TileKind::Surface,
        "tree" => TileKind::Tree,
        "rain" => TileKind::Rain,
        "asteroid" => TileKind::Asteroid,
        "forward" => TileKind::Forward,
        "left" => TileKind::TurnLeft,
        "right" => TileKind::TurnRight,
        "plus" => TileKind::Plus,
        "minus" => TileKind::Minus,
        "equals" => TileKind::Equals,
        "loop:*" => TileKind::RepeatUntilBlocked,
        _ => {
            if let Some(param) = token.strip_prefix("loop:") {
                match parse_digit(param) {
                    Some(n) if (1..=MAX_LOOP_COUNT).contains(&n) => TileKind::Repeat(n),
                    _ => return Err(TileError::BadParameter(token.to_string())),
                }
            } else if let Some(param) = token.strip_prefix("num:") {
                match parse_digit(param) {
                    Some(d) => TileKind::Number(d),
                    None => return Err(TileError::BadParameter(token.to_string())),
                }
            } else {
                return Err(TileError::UnknownToken(token.to_string()));
            }
        }
    };
    Ok(kind)
}

// Exactly one ASCII digit; rejects "+5", "05", "10".
fn parse_digit(s: &str) -> Option<u8> {
    match s.as_bytes() {
        [b] if b.is_ascii_digit() => Some(b - b'0'),
        _ => None,
    }
}

impl FromStr for TileKind {
    type Err = TileError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_tile_token(s)
    }
}

/// A cell on the canvas. Row 0 is the bottom row; gravity pulls toward it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GridPos {
    pub col: u32,
    pub row: u32,
}

impl GridPos {
    pub const fn new(col: u32, row: u32) -> Self {
        GridPos { col, row }
    }
}

impl fmt::Display for GridPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.col, self.row)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tile {
    pub id: u32,
    pub kind: TileKind,
    pub pos: GridPos,
    pub placed_seq: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PlacementError {
    #[error("cell {0} is already occupied")]
    Overlap(GridPos),
    #[error("cell {0} is outside the canvas")]
    OutOfCanvas(GridPos),
}

/// How [`CanvasLayout::sequence`] orders tiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SequenceOrder {
    /// Tiles were placed one by one; order by placement.
    Placement,
    /// A static snapshot without history; order row-major, top row first.
    RowMajor,
}

/// The tiles currently lying on the canvas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanvasLayout {
    width: u32,
    height: u32,
    tiles: BTreeMap<GridPos, Tile>,
    order: SequenceOrder,
    next_id: u32,
    next_seq: u64,
}

impl Default for CanvasLayout {
    fn default() -> Self {
        CanvasLayout::new(DEFAULT_CANVAS_WIDTH, DEFAULT_CANVAS_HEIGHT)
    }
}

impl CanvasLayout {
    pub fn new(width: u32, height: u32) -> Self {
        CanvasLayout {
            width,
            height,
            tiles: BTreeMap::new(),
            order: SequenceOrder::Placement,
            next_id: 1,
            next_seq: 1,
        }
    }

    /// Builds a layout from a static snapshot (no placement history).
    pub fn from_snapshot(
        width: u32,
        height: u32,
        tiles: impl IntoIterator<Item = (TileKind, GridPos)>,
    ) -> Result<Self, PlacementError> {
        let mut layout = CanvasLayout::new(width, height);
        for (kind, pos) in tiles {
            layout.place(kind, pos)?;
        }
        layout.order = SequenceOrder::RowMajor;
        Ok(layout)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn contains(&self, pos: GridPos) -> bool {
        pos.col < self.width && pos.row < self.height
    }

    pub fn tile_at(&self, pos: GridPos) -> Option<&Tile> {
        self.tiles.get(&pos)
    }

    pub fn tiles(&self) -> impl Iterator<Item = &Tile> {
        self.tiles.values()
    }

    /// Ok iff `pos` is on the canvas and free.
    pub fn validate_placement(&self, pos: GridPos) -> Result<(), PlacementError> {
        if !self.contains(pos) {
            return Err(PlacementError::OutOfCanvas(pos));
        }
        if self.tiles.contains_key(&pos) {
            return Err(PlacementError::Overlap(pos));
        }
        Ok(())
    }

    pub fn place(&mut self, kind: TileKind, pos: GridPos) -> Result<Tile, PlacementError> {
        self.validate_placement(pos)?;
        let tile = Tile {
            id: self.next_id,
            kind,
            pos,
            placed_seq: self.next_seq,
        };
        self.next_id += 1;
        self.next_seq += 1;
        self.tiles.insert(pos, tile);
        Ok(tile)
    }

    pub fn remove(&mut self, pos: GridPos) -> Option<Tile> {
        self.tiles.remove(&pos)
    }

    /// Program order: placement order, or row-major for history-less snapshots.
    pub fn sequence(&self) -> Vec<Tile> {
        let mut tiles: Vec<Tile> = self.tiles.values().copied().collect();
        match self.order {
            SequenceOrder::Placement => tiles.sort_by_key(|t| t.placed_seq),
            SequenceOrder::RowMajor => {
                tiles.sort_by(|a, b| b.pos.row.cmp(&a.pos.row).then(a.pos.col.cmp(&b.pos.col)))
            }
        }
        tiles
    }
}

pub fn sequence_of(layout: &CanvasLayout) -> Vec<Tile> {
    layout.sequence()
}
