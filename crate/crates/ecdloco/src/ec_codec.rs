//! EC D-LOCO encoding and the residue decoding pipeline.
//!
//! Encoding multiplies the message by R and unranks; balancing may complement
//! the codeword (a codeword and its complement carry the same message), and
//! three bridging symbols follow each codeword: the orientation marker, the
//! local detection check-sum, and a run/balance separator.
//!
//! Decoding mirrors the flowchart: residual 0 or phi(N-1) means error-free;
//! otherwise the trusted bridging symbols drive either a rightmost-symbol
//! candidate search (ell = 1 with satisfied check-sum), a residue-table probe
//! for codewords, or the run-repair path for non-codewords, each followed by
//! a verification gate. Anything unresolved falls through to list decoding
//! over all Hamming-1 neighbors (double-substitution handling).

use crate::error::{Error, Result};
use crate::params::CodeParams;
use crate::rank::{formal_index, unrank};
use crate::redundancy::{Entry, ResidueTable};
use crate::symbol::{Symbol, ALPHABET};
use crate::word::Word;
use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;
use std::collections::BTreeMap;

/// An EC codeword in stored orientation plus its three bridging symbols, in
/// stream order: codeword, then Lambda4 Lambda3 Lambda5.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Concatenable {
    pub codeword: Word,
    pub bridge: [Symbol; 3],
}

impl Concatenable {
    /// All m+3 symbols in stream order (most significant codeword symbol first).
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut v: Vec<Symbol> = self.codeword.iter_msb().collect();
        v.extend_from_slice(&self.bridge);
        v
    }
}

/// Which branch of the decoding flowchart produced the result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeStatus {
    ErrorFree,
    ErrorFreeComplemented,
    SingleCorrectedCodeword,
    SingleCorrectedNonCodeword,
    /// List decoding finished with the given list size (1 means unique).
    DoubleListDecoded(usize),
    Failure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub status: DecodeStatus,
    /// Recovered index g(d); None on Failure.
    pub index: Option<BigUint>,
    /// binary(index / R), msg_bits wide, most significant bit first.
    pub message: Option<Vec<bool>>,
}

/// Running disparity (#GC - #AT) of all emitted symbols, bridging included.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StreamState {
    pub disparity: i64,
}

/// Local detection check-sum: symbol values summed mod 4; position 0 is
/// excluded when ell = 1 so that rightmost-symbol errors stay detectable.
pub fn checksum(w: &Word, ell: usize) -> Symbol {
    let start = if ell == 1 { 1 } else { 0 };
    let sum: u32 = (start..w.len()).map(|p| w.sym(p).value() as u32).sum();
    Symbol::from_value((sum % 4) as u8).unwrap()
}

/// Check-sum the decoder expects after re-complementing a received word:
/// every symbol maps to 3 - value, so the sum maps to 3*count - s.
fn complemented_checksum(s: Symbol, m: usize, ell: usize) -> Symbol {
    let count = if ell == 1 { m - 1 } else { m } as i64;
    let v = (3 * count - s.value() as i64).rem_euclid(4);
    Symbol::from_value(v as u8).unwrap()
}

fn expected_checksum(l3: Symbol, complemented: bool, m: usize, ell: usize) -> Symbol {
    if complemented {
        complemented_checksum(l3, m, ell)
    } else {
        l3
    }
}

/// Encodes msg_bits of binary data: index = decimal(bits) * R, word = unrank.
pub fn ec_encode(bits: &[bool], params: &CodeParams, table: &ResidueTable) -> Result<(BigUint, Word)> {
    if bits.len() != table.msg_bits() {
        return Err(Error::InvalidInput(format!(
            "message must be exactly {} bits, got {}",
            table.msg_bits(),
            bits.len()
        )));
    }
    let mut v = BigUint::zero();
    for &b in bits {
        v <<= 1;
        if b {
            v += 1u32;
        }
    }
    let index = v * table.r();
    let word = unrank(&index, params)?;
    Ok((index, word))
}

/// binary(index / R), msg_bits wide, most significant bit first.
pub fn index_to_message(index: &BigUint, table: &ResidueTable) -> Vec<bool> {
    let q = index / table.r();
    let width = table.msg_bits();
    (0..width)
        .rev()
        .map(|i| q.bit(i as u64))
        .collect()
}

/// Keeps `d` when its disparity opposes the running stream disparity (or
/// either is zero); otherwise complements. Returns the stored orientation and
/// whether it was complemented.
pub fn balance_orientation(d: &Word, state: &StreamState) -> (Word, bool) {
    let dd = d.disparity();
    if state.disparity != 0 && dd != 0 && (dd > 0) == (state.disparity > 0) {
        (d.complement(), true)
    } else {
        (d.clone(), false)
    }
}

/// The three bridging symbols for a stored codeword.
///
/// Lambda3 is the check-sum of the stored orientation. Lambda4 signals the
/// balancing choice: for ell >= 2 it is the highest (complemented) or lowest
/// (kept) symbol of opposite disparity class to the codeword's last symbol;
/// for ell = 1 the same rule runs over {A,T,G,C} minus {Lambda1, Lambda3} to
/// avoid forbidden runs. Lambda5 opposes Lambda3's class and dodges the next
/// codeword's first symbol.
pub fn make_bridge(
    dc: &Word,
    complemented: bool,
    next_first: Symbol,
    ell: usize,
) -> [Symbol; 3] {
    let l1 = dc.sym(0);
    let l3 = checksum(dc, ell);
    let l4 = if ell >= 2 {
        match (l1.is_gc(), complemented) {
            (true, false) => Symbol::A,
            (true, true) => Symbol::T,
            (false, false) => Symbol::G,
            (false, true) => Symbol::C,
        }
    } else {
        let avail: Vec<Symbol> = ALPHABET
            .into_iter()
            .filter(|s| *s != l1 && *s != l3)
            .collect();
        if complemented {
            *avail.last().unwrap()
        } else {
            avail[0]
        }
    };
    let l5 = if l3.is_gc() {
        // highest of {A,T} \ {next_first}
        if next_first == Symbol::T {
            Symbol::A
        } else {
            Symbol::T
        }
    } else if next_first == Symbol::C {
        Symbol::G
    } else {
        Symbol::C
    };
    [l4, l3, l5]
}

/// Inverts the Lambda4 rule. For ell >= 2 the marker alone decides; for
/// ell = 1 the candidate set depends on the (trusted) last codeword symbol
/// and check-sum.
fn orientation_from_bridge(l4: Symbol, w: &Word, l3: Symbol, ell: usize) -> bool {
    if ell >= 2 {
        l4 == Symbol::T || l4 == Symbol::C
    } else {
        let avail: Vec<Symbol> = ALPHABET
            .into_iter()
            .filter(|s| *s != w.sym(0) && *s != l3)
            .collect();
        l4 == *avail.last().unwrap()
    }
}

fn orient(w: &Word, complemented: bool) -> Word {
    if complemented {
        w.complement()
    } else {
        w.clone()
    }
}

/// D3 verification: codeword, matching check-sum, Hamming distance <= 1 to
/// the orientation-matched received word, zero residual index.
fn verify_candidate(
    cand: &Word,
    wc: &Word,
    s_exp: Symbol,
    params: &CodeParams,
    table: &ResidueTable,
) -> bool {
    cand.is_codeword(params.ell())
        && checksum(cand, params.ell()) == s_exp
        && cand.hamming_distance(wc) <= 1
        && table.residual_of(&formal_index(cand, params)).is_zero()
}

/// Candidate words from a location entry: set the stored location so the
/// check-sum is satisfied. For ell = 1 location 0 is outside the check-sum,
/// so all three alternatives are offered to the verification gate.
fn fix_location(wc: &Word, loc: usize, s_exp: Symbol, ell: usize) -> Vec<Word> {
    if ell == 1 && loc == 0 {
        return ALPHABET
            .into_iter()
            .filter(|s| *s != wc.sym(0))
            .map(|s| {
                let mut x = wc.clone();
                x.set_sym(0, s);
                x
            })
            .collect();
    }
    let start = if ell == 1 { 1 } else { 0 };
    if loc < start || loc >= wc.len() {
        return Vec::new();
    }
    let sum: i64 = (start..wc.len()).map(|p| wc.sym(p).value() as i64).sum();
    let target = (s_exp.value() as i64 - (sum - wc.sym(loc).value() as i64)).rem_euclid(4);
    let s_new = Symbol::from_value(target as u8).unwrap();
    if s_new == wc.sym(loc) {
        return Vec::new();
    }
    let mut x = wc.clone();
    x.set_sym(loc, s_new);
    vec![x]
}

/// Solves the check-sum congruence for the run symbol's replacement.
fn solve_run_replacement(wc: &Word, run_sym: Symbol, s_exp: Symbol, ell: usize) -> Symbol {
    let start = if ell == 1 { 1 } else { 0 };
    let sum: i64 = (start..wc.len()).map(|p| wc.sym(p).value() as i64).sum();
    let v = (s_exp.value() as i64 - (sum - run_sym.value() as i64)).rem_euclid(4);
    Symbol::from_value(v as u8).unwrap()
}

/// Single-substitution correction with the orientation already resolved:
/// returns every candidate that passes the verification gate against `u`.
fn single_correct_oriented(
    u: &Word,
    s_exp: Symbol,
    params: &CodeParams,
    table: &ResidueTable,
) -> Vec<Word> {
    let ell = params.ell();
    let (g_u, r_u) = table.index_and_residual(u, params);
    let mut candidates: Vec<Word> = Vec::new();

    if u.is_codeword(ell) {
        if r_u.is_zero() {
            return vec![u.clone()];
        }
        if r_u == *table.phi_n1() {
            return Vec::new();
        }
        if ell == 1 && checksum(u, 1) == s_exp {
            // erroneous symbol is rightmost; no orientation doubling here
            for pi in ALPHABET {
                if pi == u.sym(0) || pi == u.sym(1) {
                    continue;
                }
                let mut x = u.clone();
                x.set_sym(0, pi);
                if x.is_codeword(1) && table.residual_of(&formal_index(&x, params)).is_zero() {
                    candidates.push(x);
                }
            }
            return candidates;
        }
        // OD2: probe both the residual and its negation
        if let Some(entry) = table.probe(&r_u) {
            match entry {
                Entry::Err(e) => {
                    if g_u >= *e {
                        if let Ok(x) = unrank(&(&g_u - e), params) {
                            candidates.push(x);
                        }
                    }
                }
                Entry::Loc(i) => candidates.extend(fix_location(u, *i, s_exp, ell)),
            }
        }
        let mirror = table.r() - &r_u;
        if let Some(entry) = table.probe(&mirror) {
            match entry {
                Entry::Err(e) => {
                    let idx = &g_u + e;
                    if idx <= params.n_minus_1() {
                        if let Ok(x) = unrank(&idx, params) {
                            candidates.push(x);
                        }
                    }
                }
                Entry::Loc(i) => candidates.extend(fix_location(u, *i, s_exp, ell)),
            }
        }
    } else {
        if ell == 1 && checksum(u, 1) == s_exp {
            for pi in ALPHABET {
                if pi == u.sym(0) || pi == u.sym(1) {
                    continue;
                }
                let mut x = u.clone();
                x.set_sym(0, pi);
                if x.is_codeword(1) && table.residual_of(&formal_index(&x, params)).is_zero() {
                    candidates.push(x);
                }
            }
            return candidates;
        }
        let run = u.scan_longest_run();
        let replacement = solve_run_replacement(u, run.symbol, s_exp, ell);
        if replacement == run.symbol {
            return Vec::new();
        }
        if replacement < run.symbol {
            // index increased upon storage: probe the formal residual directly
            if let Some(entry) = table.probe(&r_u) {
                match entry {
                    Entry::Err(e) => {
                        if g_u >= *e {
                            if let Ok(x) = unrank(&(&g_u - e), params) {
                                candidates.push(x);
                            }
                        }
                    }
                    Entry::Loc(i) => {
                        if let Some(x) = set_run_symbol(u, *i, replacement) {
                            candidates.push(x);
                        }
                    }
                }
            }
        } else {
            // index decreased: complement trick, then neutralize N(m)-1
            let v = u.complement();
            let g_v = formal_index(&v, params);
            let key = {
                let shifted = &g_v + table.r() * params.n_minus_1(); // keep positive
                (shifted - params.n_minus_1()) % table.r()
            };
            if let Some(entry) = table.probe(&key) {
                match entry {
                    Entry::Err(e) => {
                        if g_v >= *e {
                            let n2 = &g_v - e;
                            if n2 <= params.n_minus_1() {
                                let idx = params.n_minus_1() - n2;
                                if let Ok(x) = unrank(&idx, params) {
                                    candidates.push(x);
                                }
                            }
                        }
                    }
                    Entry::Loc(i) => {
                        if let Some(x) = set_run_symbol(u, *i, replacement) {
                            candidates.push(x);
                        }
                    }
                }
            }
        }
    }

    candidates
        .into_iter()
        .filter(|c| verify_candidate(c, u, s_exp, params, table))
        .collect()
}

fn set_run_symbol(u: &Word, loc: usize, replacement: Symbol) -> Option<Word> {
    if loc >= u.len() {
        return None;
    }
    let mut x = u.clone();
    x.set_sym(loc, replacement);
    Some(x)
}

/// Rightmost-symbol candidate search over both orientations (ell = 1 with a
/// satisfied check-sum): the unique EC codeword among
/// { w_{m-1}..w_1 Pi, complement(...) | Pi not in {w_0, w_1} }.
fn rightmost_search(
    w: &Word,
    params: &CodeParams,
    table: &ResidueTable,
) -> Option<(BigUint, DecodeStatus)> {
    let was_codeword = w.is_codeword(1);
    for pi in ALPHABET {
        if pi == w.sym(0) || pi == w.sym(1) {
            continue;
        }
        let mut x = w.clone();
        x.set_sym(0, pi);
        if !x.is_codeword(1) {
            continue;
        }
        let g_x = formal_index(&x, params);
        let r_x = table.residual_of(&g_x);
        let status = if was_codeword {
            DecodeStatus::SingleCorrectedCodeword
        } else {
            DecodeStatus::SingleCorrectedNonCodeword
        };
        if r_x.is_zero() {
            return Some((g_x, status));
        }
        if r_x == *table.phi_n1() {
            return Some((params.n_minus_1() - g_x, status));
        }
    }
    None
}

/// Decodes one m+3 segment. The supplied RNG only fires for the random pick
/// of list decoding (step D5).
pub fn decode_segment<R: Rng + ?Sized>(
    segment: &[Symbol],
    params: &CodeParams,
    table: &ResidueTable,
    rng: &mut R,
) -> Result<DecodeResult> {
    let m = params.m();
    let ell = params.ell();
    if segment.len() != m + 3 {
        return Err(Error::InvalidInput(format!(
            "segment must be m+3 = {} symbols, got {}",
            m + 3,
            segment.len()
        )));
    }
    let w = Word::from_msb_symbols(&segment[..m])?;
    let l4 = segment[m];
    let l3 = segment[m + 1];

    let (g_w, r_w) = table.index_and_residual(&w, params);

    let finish = |status: DecodeStatus, index: BigUint| -> DecodeResult {
        let message = index_to_message(&index, table);
        DecodeResult {
            status,
            index: Some(index),
            message: Some(message),
        }
    };

    if w.is_codeword(ell) && r_w.is_zero() {
        return Ok(finish(DecodeStatus::ErrorFree, g_w));
    }
    if w.is_codeword(ell) && r_w == *table.phi_n1() {
        return Ok(finish(
            DecodeStatus::ErrorFreeComplemented,
            params.n_minus_1() - &g_w,
        ));
    }

    // single-error correction attempt
    let mut single: Option<(BigUint, DecodeStatus)> = None;
    if ell == 1 && checksum(&w, 1) == l3 {
        single = rightmost_search(&w, params, table);
    } else {
        let complemented = orientation_from_bridge(l4, &w, l3, ell);
        let wc = orient(&w, complemented);
        let s_exp = expected_checksum(l3, complemented, m, ell);
        let verified = single_correct_oriented(&wc, s_exp, params, table);
        if let Some(cand) = verified.into_iter().next() {
            let status = if w.is_codeword(ell) {
                DecodeStatus::SingleCorrectedCodeword
            } else {
                DecodeStatus::SingleCorrectedNonCodeword
            };
            single = Some((formal_index(&cand, params), status));
        }
    }
    if let Some((index, status)) = single {
        return Ok(finish(status, index));
    }

    // D4: list decoding over all Hamming-1 neighbors of the oriented word
    let complemented = orientation_from_bridge(l4, &w, l3, ell);
    let wc = orient(&w, complemented);
    let s_exp = expected_checksum(l3, complemented, m, ell);
    let list = list_decode(&wc, s_exp, params, table);

    match list.len() {
        0 => Ok(DecodeResult {
            status: DecodeStatus::Failure,
            index: None,
            message: None,
        }),
        1 => {
            let index = list.into_keys().next().unwrap();
            Ok(finish(DecodeStatus::DoubleListDecoded(1), index))
        }
        k => {
            let pick = rng.gen_range(0..k);
            let index = list.into_keys().nth(pick).unwrap();
            Ok(finish(DecodeStatus::DoubleListDecoded(k), index))
        }
    }
}

/// Step D4: run the oriented single corrector on every Hamming-1 neighbor and
/// collect the EC codewords at Hamming distance exactly 2 with the right
/// check-sum, deduplicated by index.
pub fn list_decode(
    wc: &Word,
    s_exp: Symbol,
    params: &CodeParams,
    table: &ResidueTable,
) -> BTreeMap<BigUint, Word> {
    let mut list: BTreeMap<BigUint, Word> = BTreeMap::new();
    for pos in 0..params.m() {
        for s in ALPHABET {
            if s == wc.sym(pos) {
                continue;
            }
            let mut u = wc.clone();
            u.set_sym(pos, s);
            for cand in single_correct_oriented(&u, s_exp, params, table) {
                if cand.hamming_distance(wc) == 2 {
                    let idx = formal_index(&cand, params);
                    list.entry(idx).or_insert(cand);
                }
            }
        }
    }
    list
}

/// Assembles K concatenables with running-disparity balancing. Each message
/// must be exactly msg_bits wide; the final bridge uses the sentinel A as the
/// next codeword's first symbol.
pub fn assemble_strand(
    messages: &[Vec<bool>],
    params: &CodeParams,
    table: &ResidueTable,
) -> Result<Vec<Symbol>> {
    let ell = params.ell();
    let mut out: Vec<Symbol> = Vec::with_capacity(messages.len() * (params.m() + 3));
    let mut state = StreamState::default();
    // Lambda5 of each bridge depends on the next codeword's stored first
    // symbol; its slot is patched once that orientation is known. Disparity
    // is unaffected: Lambda5's class is fixed by Lambda3.
    let mut pending: Option<(usize, Symbol)> = None;
    for bits in messages {
        let (_, d) = ec_encode(bits, params, table)?;
        let (dc, complemented) = balance_orientation(&d, &state);
        if let Some((slot, l3_prev)) = pending {
            out[slot] = lambda5(l3_prev, dc.sym(params.m() - 1));
        }
        let bridge = make_bridge(&dc, complemented, Symbol::A, ell);
        state.disparity += dc.disparity() + bridge[0].disparity();
        // Lambda3 + Lambda5 always cancel
        out.extend(dc.iter_msb());
        out.extend_from_slice(&bridge);
        pending = Some((out.len() - 1, bridge[1]));
    }
    if let Some((slot, l3_prev)) = pending {
        out[slot] = lambda5(l3_prev, Symbol::A);
    }
    Ok(out)
}

fn lambda5(l3: Symbol, next_first: Symbol) -> Symbol {
    if l3.is_gc() {
        if next_first == Symbol::T {
            Symbol::A
        } else {
            Symbol::T
        }
    } else if next_first == Symbol::C {
        Symbol::G
    } else {
        Symbol::C
    }
}

/// Splits a strand into m+3 segments and decodes each independently with a
/// per-segment deterministic RNG stream.
pub fn decode_strand(
    symbols: &[Symbol],
    params: &CodeParams,
    table: &ResidueTable,
    seed: u64,
) -> Result<Vec<DecodeResult>> {
    use rand::SeedableRng;
    use rayon::prelude::*;
    let seg = params.m() + 3;
    if symbols.is_empty() || !symbols.len().is_multiple_of(seg) {
        return Err(Error::InvalidInput(format!(
            "strand length {} is not a positive multiple of m+3 = {seg}",
            symbols.len()
        )));
    }
    symbols
        .par_chunks(seg)
        .enumerate()
        .map(|(i, chunk)| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
                seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            );
            decode_segment(chunk, params, table, &mut rng)
        })
        .collect()
}
