//! Length-m words over {A,T,G,C} with the paper's position convention:
//! a word c_{m-1} c_{m-2} ... c_0 is written most-significant symbol first,
//! and position 0 is the rightmost symbol.

use crate::error::{Error, Result};
use crate::symbol::{Symbol, ALPHABET};
use std::fmt;
use std::str::FromStr;

/// A fixed-length DNA word. Internally indexed by position, so `sym(0)`
/// is the rightmost symbol.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Word {
    // syms[p] = c_p
    syms: Vec<Symbol>,
}

/// The leftmost maximal run of greatest length in a word.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RunInfo {
    pub symbol: Symbol,
    /// Position of the leftmost (most significant) symbol of the run.
    pub start: usize,
    pub len: usize,
}

impl Word {
    /// Builds a word from symbols given in display order (most significant first).
    pub fn from_msb_symbols(msb: &[Symbol]) -> Result<Word> {
        if msb.is_empty() {
            return Err(Error::InvalidInput("a word must have length >= 1".into()));
        }
        Ok(Word {
            syms: msb.iter().rev().copied().collect(),
        })
    }

    /// Builds a word from position-indexed symbols (`syms[p]` = c_p).
    pub fn from_position_symbols(syms: Vec<Symbol>) -> Result<Word> {
        if syms.is_empty() {
            return Err(Error::InvalidInput("a word must have length >= 1".into()));
        }
        Ok(Word { syms })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.syms.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Symbol at position `p` (position 0 is rightmost). Positions beyond
    /// m-1 follow the out-of-bounds convention c_p = C.
    #[inline]
    pub fn sym(&self, p: usize) -> Symbol {
        if p >= self.syms.len() {
            Symbol::C
        } else {
            self.syms[p]
        }
    }

    #[inline]
    pub fn set_sym(&mut self, p: usize, s: Symbol) {
        self.syms[p] = s;
    }

    /// Iterator over symbols in display order (position m-1 first).
    pub fn iter_msb(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.syms.iter().rev().copied()
    }

    /// Position-indexed slice (index = position).
    pub fn positions(&self) -> &[Symbol] {
        &self.syms
    }

    /// Symbol-wise complement.
    pub fn complement(&self) -> Word {
        Word {
            syms: self.syms.iter().map(|s| s.complement()).collect(),
        }
    }

    /// #GC - #AT over all symbols.
    pub fn disparity(&self) -> i64 {
        self.syms.iter().map(|s| s.disparity()).sum()
    }

    /// True iff no symbol repeats more than `ell` times consecutively.
    pub fn is_codeword(&self, ell: usize) -> bool {
        let mut run = 1usize;
        for i in 1..self.syms.len() {
            if self.syms[i] == self.syms[i - 1] {
                run += 1;
                if run > ell {
                    return false;
                }
            } else {
                run = 1;
            }
        }
        true
    }

    /// Leftmost maximal run of greatest length.
    pub fn scan_longest_run(&self) -> RunInfo {
        let m = self.syms.len();
        let mut best = RunInfo {
            symbol: self.syms[m - 1],
            start: m - 1,
            len: 1,
        };
        let mut run_len = 1usize;
        // walk from the leftmost position downwards
        for p in (0..m - 1).rev() {
            if self.syms[p] == self.syms[p + 1] {
                run_len += 1;
            } else {
                run_len = 1;
            }
            // a longer run wins; ties keep the leftmost (first seen)
            if run_len > best.len {
                best = RunInfo {
                    symbol: self.syms[p],
                    start: p + run_len - 1,
                    len: run_len,
                };
            }
        }
        best
    }

    pub fn hamming_distance(&self, other: &Word) -> usize {
        debug_assert_eq!(self.len(), other.len());
        self.syms
            .iter()
            .zip(other.syms.iter())
            .filter(|(a, b)| a != b)
            .count()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.iter_msb() {
            write!(f, "{}", s.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let msb: Result<Vec<Symbol>> = s.chars().map(Symbol::from_char).collect();
        Word::from_msb_symbols(&msb?)
    }
}

/// Enumerates D_{m,ell} in ascending lexicographic order, calling `visit`
/// once per codeword.
pub fn for_each_codeword<F: FnMut(&Word)>(m: usize, ell: usize, visit: &mut F) {
    let mut buf: Vec<Symbol> = Vec::with_capacity(m);
    fn rec<F: FnMut(&Word)>(m: usize, ell: usize, buf: &mut Vec<Symbol>, visit: &mut F) {
        if buf.len() == m {
            let w = Word::from_msb_symbols(buf).unwrap();
            visit(&w);
            return;
        }
        for s in ALPHABET {
            let mut run = 1usize;
            for prev in buf.iter().rev() {
                if *prev == s {
                    run += 1;
                } else {
                    break;
                }
            }
            if run <= ell {
                buf.push(s);
                rec(m, ell, buf, visit);
                buf.pop();
            }
        }
    }
    rec(m, ell, &mut buf, visit);
}

/// Collects the whole codebook in lexicographic order. Intended for small m.
pub fn enumerate_codebook(m: usize, ell: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for_each_codeword(m, ell, &mut |w| out.push(w.clone()));
    out
}
