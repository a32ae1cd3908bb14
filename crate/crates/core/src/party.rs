use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// One of the three laboratories.
///
/// Party `p` owns the tensor factors `2p` (input) and `2p + 1` (output) in the
/// global order (A₁, A₂, B₁, B₂, C₁, C₂).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
    C,
}

impl Party {
    pub const ALL: [Party; 3] = [Party::A, Party::B, Party::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn input_position(self) -> usize {
        2 * self.index()
    }

    pub fn output_position(self) -> usize {
        2 * self.index() + 1
    }

    /// Name of the party's free input bit (`a`, `b`, `c`).
    pub fn free_name(self) -> char {
        ['a', 'b', 'c'][self.index()]
    }

    /// Name of the party's outcome bit (`x`, `y`, `z`).
    pub fn outcome_name(self) -> char {
        ['x', 'y', 'z'][self.index()]
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Party::A => "A",
            Party::B => "B",
            Party::C => "C",
        };
        f.write_str(s)
    }
}

impl FromStr for Party {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Party::A),
            "B" | "b" => Ok(Party::B),
            "C" | "c" => Ok(Party::C),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

/// Free bits `(a, b, c)` packed as `a << 2 | b << 1 | c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FreeBits(pub u8);

impl FreeBits {
    pub fn new(a: u8, b: u8, c: u8) -> Self {
        FreeBits(((a & 1) << 2) | ((b & 1) << 1) | (c & 1))
    }

    /// All eight assignments in increasing packed order.
    pub fn all() -> impl Iterator<Item = FreeBits> {
        (0..8).map(FreeBits)
    }

    pub fn of(self, party: Party) -> u8 {
        (self.0 >> (2 - party.index())) & 1
    }
}
