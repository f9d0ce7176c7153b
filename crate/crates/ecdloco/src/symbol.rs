//! The DNA alphabet with the lexicographic order A < T < G < C.

use crate::error::{Error, Result};
use std::fmt;

/// One DNA symbol. The integer values 0..=3 follow the code ordering,
/// so `Symbol` comparisons coincide with lexicographic symbol order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
#[repr(u8)]
pub enum Symbol {
    A = 0,
    T = 1,
    G = 2,
    C = 3,
}

pub const ALPHABET: [Symbol; 4] = [Symbol::A, Symbol::T, Symbol::G, Symbol::C];

impl Symbol {
    #[inline]
    pub fn value(self) -> u8 {
        self as u8
    }

    #[inline]
    pub fn from_value(v: u8) -> Option<Symbol> {
        match v {
            0 => Some(Symbol::A),
            1 => Some(Symbol::T),
            2 => Some(Symbol::G),
            3 => Some(Symbol::C),
            _ => None,
        }
    }

    /// Symbol-wise complement: A <-> C, T <-> G. An involution.
    #[inline]
    pub fn complement(self) -> Symbol {
        Symbol::from_value(3 - self.value()).unwrap()
    }

    /// Disparity class: GC symbols count +1, AT symbols -1.
    #[inline]
    pub fn disparity(self) -> i64 {
        match self {
            Symbol::A | Symbol::T => -1,
            Symbol::G | Symbol::C => 1,
        }
    }

    #[inline]
    pub fn is_gc(self) -> bool {
        self.disparity() > 0
    }

    pub fn from_char(c: char) -> Result<Symbol> {
        match c {
            'A' => Ok(Symbol::A),
            'T' => Ok(Symbol::T),
            'G' => Ok(Symbol::G),
            'C' => Ok(Symbol::C),
            other => Err(Error::InvalidInput(format!(
                "'{other}' is not a DNA symbol (expected one of A, T, G, C)"
            ))),
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Symbol::A => 'A',
            Symbol::T => 'T',
            Symbol::G => 'G',
            Symbol::C => 'C',
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}
