//! Asteroid Math: single-digit addition and subtraction judged from the
//! tiles a child lays down.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Op {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Op {
    pub fn symbol(self) -> char {
        match self {
            Op::Plus => '+',
            Op::Minus => '-',
        }
    }

    pub fn parse(s: &str) -> Option<Op> {
        match s {
            "+" => Some(Op::Plus),
            "-" => Some(Op::Minus),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MathError {
    #[error("operand {0} is not a single digit")]
    OperandRange(u32),
    #[error("{a} - {b} would be negative")]
    NegativeResult { a: u8, b: u8 },
    #[error("no answer placed")]
    NoAnswer,
}

/// `a op b` with single-digit operands and a non-negative result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Equation {
    a: u8,
    op: Op,
    b: u8,
}

impl Equation {
    pub fn new(a: u32, op: Op, b: u32) -> Result<Self, MathError> {
        for operand in [a, b] {
            if operand > 9 {
                return Err(MathError::OperandRange(operand));
            }
        }
        let (a, b) = (a as u8, b as u8);
        if op == Op::Minus && a < b {
            return Err(MathError::NegativeResult { a, b });
        }
        Ok(Equation { a, op, b })
    }

    pub fn a(&self) -> u8 {
        self.a
    }

    pub fn op(&self) -> Op {
        self.op
    }

    pub fn b(&self) -> u8 {
        self.b
    }

    /// Compact form used in snapshots, e.g. `3+4`.
    pub fn compact(&self) -> String {
        format!("{}{}{}", self.a, self.op.symbol(), self.b)
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.a, self.op.symbol(), self.b)
    }
}

pub fn eval_equation(eq: &Equation) -> u32 {
    match eq.op {
        Op::Plus => eq.a as u32 + eq.b as u32,
        Op::Minus => (eq.a - eq.b) as u32,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Correct,
    /// Deliberately carries no expected value.
    Incorrect,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Correct => "correct",
            Verdict::Incorrect => "incorrect",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MathState {
    pub equation: Equation,
    pub answer_tiles: u32,
    pub number_answer: Option<u8>,
    pub checked: bool,
}

impl MathState {
    pub fn new(equation: Equation) -> Self {
        MathState {
            equation,
            answer_tiles: 0,
            number_answer: None,
            checked: false,
        }
    }

    pub fn answer(&self) -> Option<u32> {
        effective_answer(self.number_answer, self.answer_tiles)
    }
}

/// The number tile wins over the asteroid count; no tiles means no answer.
pub fn effective_answer(number_answer: Option<u8>, answer_tiles: u32) -> Option<u32> {
    match (number_answer, answer_tiles) {
        (Some(d), _) => Some(d as u32),
        (None, 0) => None,
        (None, n) => Some(n),
    }
}

pub fn check_answer(state: &MathState) -> Result<Verdict, MathError> {
    let answer = state.answer().ok_or(MathError::NoAnswer)?;
    Ok(if answer == eval_equation(&state.equation) {
        Verdict::Correct
    } else {
        Verdict::Incorrect
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Difficulty {
    /// Operands 0..=5, addition only.
    One,
    /// Operands 0..=9, addition or subtraction.
    Two,
}

impl Difficulty {
    pub fn from_level(level: u8) -> Option<Difficulty> {
        match level {
            1 => Some(Difficulty::One),
            2 => Some(Difficulty::Two),
            _ => None,
        }
    }
}

/// 64-bit LCG (Knuth's MMIX constants); each draw advances the state and
/// yields its top 31 bits.
#[derive(Debug, Clone)]
pub struct EquationLcg(u64);

impl EquationLcg {
    pub const MULTIPLIER: u64 = 6_364_136_223_846_793_005;
    pub const INCREMENT: u64 = 1_442_695_040_888_963_407;

    pub fn new(seed: u64) -> Self {
        EquationLcg(seed)
    }

    pub fn next_draw(&mut self) -> u32 {
        self.0 = self
            .0
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        (self.0 >> 33) as u32
    }
}

/// Draws `a`, then `b`, then (difficulty two only) the operator, each as
/// `draw % range`. A subtraction with `a < b` has its operands swapped.
pub fn generate_equation(seed: u64, difficulty: Difficulty) -> Equation {
    let mut lcg = EquationLcg::new(seed);
    let range = match difficulty {
        Difficulty::One => 6,
        Difficulty::Two => 10,
    };
    let mut a = (lcg.next_draw() % range) as u8;
    let mut b = (lcg.next_draw() % range) as u8;
    let op = match difficulty {
        Difficulty::One => Op::Plus,
        Difficulty::Two if lcg.next_draw().is_multiple_of(2) => Op::Plus,
        Difficulty::Two => Op::Minus,
    };
    if op == Op::Minus && a < b {
        std::mem::swap(&mut a, &mut b);
    }
    Equation { a, op, b }
}
