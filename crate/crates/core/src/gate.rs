// SPDX-License-Identifier: Apache-2.0

//! Logic levels and the Fredkin gate.
//!
//! The Fredkin gate is a 3-in/3-out controlled swap: the first line passes
//! through unchanged and acts as the control; when it is high the other two
//! lines trade places. It is both reversible (a permutation of the eight input
//! triples) and conservative (the number of ones is preserved).

use std::fmt;
use std::ops::{BitAnd, BitOr, BitXor, Not};

/// A single logic level. There is no third state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bit(bool);

impl Bit {
    pub const ZERO: Bit = Bit(false);
    pub const ONE: Bit = Bit(true);

    pub const fn new(value: bool) -> Self {
        Bit(value)
    }

    pub const fn is_high(self) -> bool {
        self.0
    }

    pub const fn as_u8(self) -> u8 {
        self.0 as u8
    }

    /// Parses `'0'` or `'1'`.
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '0' => Some(Bit::ZERO),
            '1' => Some(Bit::ONE),
            _ => None,
        }
    }

    pub const fn to_char(self) -> char {
        if self.0 {
            '1'
        } else {
            '0'
        }
    }
}

impl From<bool> for Bit {
    fn from(value: bool) -> Self {
        Bit(value)
    }
}

impl From<Bit> for bool {
    fn from(bit: Bit) -> Self {
        bit.0
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

impl Not for Bit {
    type Output = Bit;
    fn not(self) -> Bit {
        Bit(!self.0)
    }
}

impl BitAnd for Bit {
    type Output = Bit;
    fn bitand(self, rhs: Bit) -> Bit {
        Bit(self.0 & rhs.0)
    }
}

impl BitOr for Bit {
    type Output = Bit;
    fn bitor(self, rhs: Bit) -> Bit {
        Bit(self.0 | rhs.0)
    }
}

impl BitXor for Bit {
    type Output = Bit;
    fn bitxor(self, rhs: Bit) -> Bit {
        Bit(self.0 ^ rhs.0)
    }
}

/// Packs a slice of bits into an integer, first bit most significant.
pub fn pack_msb_first(bits: &[Bit]) -> u64 {
    bits.iter()
        .fold(0u64, |acc, b| (acc << 1) | b.as_u8() as u64)
}

/// Inverse of [`pack_msb_first`] for a vector of `width` bits.
pub fn unpack_msb_first(value: u64, width: usize) -> Vec<Bit> {
    (0..width)
        .map(|i| Bit::new((value >> (width - 1 - i)) & 1 == 1))
        .collect()
}

/// A 3-line value, `(x1, x2, x3)` on the input side or `(y1, y2, y3)` on the output side.
pub type Triple = [Bit; 3];

/// A reversible 3-in/3-out gate.
///
/// Circuits are evaluated through this trait so that verification can be
/// exercised against deliberately broken gate models.
pub trait ReversibleGate: Sync {
    fn eval(&self, inputs: Triple) -> Triple;

    /// Output index for each of the 8 input indices (`x1` is the high bit).
    fn table(&self) -> [u8; 8] {
        let mut out = [0u8; 8];
        for (row, slot) in out.iter_mut().enumerate() {
            let t = unpack_msb_first(row as u64, 3);
            *slot = pack_msb_first(&self.eval([t[0], t[1], t[2]])) as u8;
        }
        out
    }

    /// Evaluates 64 independent triples at once, one per bit lane.
    fn eval_sliced(&self, x: [u64; 3]) -> [u64; 3] {
        let table = self.table();
        let mut y = [0u64; 3];
        for (row, &out) in table.iter().enumerate() {
            let pick = |line: usize, shift: usize| {
                if (row >> shift) & 1 == 1 {
                    x[line]
                } else {
                    !x[line]
                }
            };
            let minterm = pick(0, 2) & pick(1, 1) & pick(2, 0);
            for (k, lane) in y.iter_mut().enumerate() {
                if (out >> (2 - k)) & 1 == 1 {
                    *lane |= minterm;
                }
            }
        }
        y
    }
}

/// The Fredkin gate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Fredkin;

impl ReversibleGate for Fredkin {
    fn eval(&self, [x1, x2, x3]: Triple) -> Triple {
        let (y1, y2, y3) = fredkin(x1, x2, x3);
        [y1, y2, y3]
    }

    fn eval_sliced(&self, [c, a, b]: [u64; 3]) -> [u64; 3] {
        let swap = (a ^ b) & c;
        [c, a ^ swap, b ^ swap]
    }
}

/// `y1 = x1`, `y2 = ¬x1·x2 ∨ x1·x3`, `y3 = x1·x2 ∨ ¬x1·x3`.
pub fn fredkin(x1: Bit, x2: Bit, x3: Bit) -> (Bit, Bit, Bit) {
    let y2 = (!x1 & x2) | (x1 & x3);
    let y3 = (x1 & x2) | (!x1 & x3);
    (x1, y2, y3)
}

/// One row of a gate truth table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GateIo {
    pub inputs: Triple,
    pub outputs: Triple,
}

impl GateIo {
    pub fn input_weight(&self) -> usize {
        weight(&self.inputs)
    }

    pub fn output_weight(&self) -> usize {
        weight(&self.outputs)
    }
}

/// Number of high bits.
pub fn weight(bits: &[Bit]) -> usize {
    bits.iter().filter(|b| b.is_high()).count()
}

/// The eight rows of the Fredkin gate, inputs in ascending binary order.
pub fn fredkin_truth_table() -> [GateIo; 8] {
    truth_table(&Fredkin)
}

pub fn truth_table<G: ReversibleGate + ?Sized>(gate: &G) -> [GateIo; 8] {
    std::array::from_fn(|row| {
        let t = unpack_msb_first(row as u64, 3);
        let inputs = [t[0], t[1], t[2]];
        GateIo {
            inputs,
            outputs: gate.eval(inputs),
        }
    })
}
