//! The encoding-decoding rule g: symbol contributions, depth, formal index
//! for arbitrary words, and unranking (index -> codeword).
//!
//! A symbol Delta smaller than c_i contributes M(i+k-ell) + ... + M(i) to the
//! index, where k is the depth of Delta at i; depth ell+1 contributes nothing.
//! The out-of-bounds convention c_j = C for j > m-1 applies throughout.

use crate::error::{Error, Result};
use crate::params::CodeParams;
use crate::symbol::{Symbol, ALPHABET};
use crate::word::Word;
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

/// Depth of `delta` at position `i`: 0 when w_i <= delta, otherwise one more
/// than the number of consecutive `delta`s immediately left of position i,
/// capped at ell+1.
pub fn depth(w: &Word, i: usize, delta: Symbol, params: &CodeParams) -> usize {
    depth_at(&|p| w.sym(p), i, delta, params.ell())
}

#[inline]
fn depth_at<F: Fn(usize) -> Symbol>(sym: &F, i: usize, delta: Symbol, ell: usize) -> usize {
    if sym(i) <= delta {
        return 0;
    }
    let mut t = 0usize;
    while t < ell && sym(i + 1 + t) == delta {
        t += 1;
    }
    if t == ell {
        ell + 1
    } else {
        t + 1
    }
}

#[inline]
fn contribution_at<F: Fn(usize) -> Symbol>(sym: &F, i: usize, params: &CodeParams) -> BigUint {
    let ell = params.ell();
    let mut total = BigUint::zero();
    let ci = sym(i);
    for delta in ALPHABET.iter().take(ci.value() as usize) {
        let k = depth_at(sym, i, *delta, ell);
        debug_assert!(k >= 1);
        if k <= ell {
            total += params.m_range_sum(i as isize + k as isize - ell as isize, i);
        }
    }
    total
}

/// Symbol contribution g_i(w_i) of position i to the formal index.
pub fn contribution(w: &Word, i: usize, params: &CodeParams) -> BigUint {
    contribution_at(&|p| w.sym(p), i, params)
}

/// Formal index g(w, ell) of an arbitrary word; equals the lexicographic
/// rank for codewords, and may exceed N(m)-1 otherwise.
pub fn formal_index(w: &Word, params: &CodeParams) -> BigUint {
    let mut total = BigUint::zero();
    for i in 0..w.len() {
        total += contribution_at(&|p| w.sym(p), i, params);
    }
    total
}

/// Calls `piece(lo, hi)` once per contributing (position, smaller-symbol)
/// pair, where the piece value is M(lo) + ... + M(hi) with lo clamped at 0.
/// The index is the sum of pieces; accumulating piece residues instead gives
/// the residual index in the same pass.
pub fn fold_contribution_ranges<F: FnMut(isize, usize)>(
    w: &Word,
    params: &CodeParams,
    piece: &mut F,
) {
    let ell = params.ell();
    for i in 0..w.len() {
        let ci = w.sym(i);
        for delta in ALPHABET.iter().take(ci.value() as usize) {
            let k = depth_at(&|p| w.sym(p), i, *delta, ell);
            if k <= ell {
                piece(i as isize + k as isize - ell as isize, i);
            }
        }
    }
}

/// Signed change of the formal index when position `pos` is substituted with
/// `new_sym`. Only the ell+1 contributions at positions pos, pos-1, ..,
/// pos-ell can change, so this runs in O(ell^2) symbol reads.
pub fn local_delta(w: &Word, pos: usize, new_sym: Symbol, params: &CodeParams) -> BigInt {
    let before = |p: usize| w.sym(p);
    let after = |p: usize| if p == pos { new_sym } else { w.sym(p) };
    let lo = pos.saturating_sub(params.ell());
    let mut delta = BigInt::zero();
    for p in lo..=pos {
        delta += BigInt::from(contribution_at(&after, p, params));
        delta -= BigInt::from(contribution_at(&before, p, params));
    }
    delta
}

/// Unranks `index` into the unique codeword of D_{m,ell} with that index.
/// Left-to-right greedy: at each position take the largest admissible symbol
/// whose contribution does not exceed the remaining residual.
pub fn unrank(index: &BigUint, params: &CodeParams) -> Result<Word> {
    if *index > params.n_minus_1() {
        return Err(Error::IndexOutOfRange(format!(
            "index {index} exceeds N(m)-1 = {}",
            params.n_minus_1()
        )));
    }
    let m = params.m();
    let ell = params.ell();
    let mut chosen: Vec<Option<Symbol>> = vec![None; m];
    let mut residual = index.clone();
    for pos in (0..m).rev() {
        // length of the run ending just left of pos
        let left = if pos + 1 < m { chosen[pos + 1] } else { None };
        let mut run = 0usize;
        if let Some(left_sym) = left {
            let mut p = pos + 1;
            while p < m && chosen[p] == Some(left_sym) {
                run += 1;
                p += 1;
            }
        }
        let mut picked = None;
        for s in ALPHABET.iter().rev() {
            if left == Some(*s) && run >= ell {
                continue; // would extend the run past ell
            }
            let sym_probe = |p: usize| -> Symbol {
                if p == pos {
                    *s
                } else if p >= m {
                    Symbol::C
                } else {
                    chosen[p].expect("depth only reads positions left of pos")
                }
            };
            let g = contribution_at(&sym_probe, pos, params);
            if g <= residual {
                residual -= g;
                picked = Some(*s);
                break;
            }
        }
        let s = picked.ok_or_else(|| {
            Error::IndexOutOfRange(format!("no admissible symbol at position {pos}"))
        })?;
        chosen[pos] = Some(s);
    }
    debug_assert!(residual.is_zero());
    let word = Word::from_position_symbols(chosen.into_iter().map(|s| s.unwrap()).collect())?;
    debug_assert!(word.is_codeword(ell));
    debug_assert_eq!(formal_index(&word, params), *index);
    Ok(word)
}
