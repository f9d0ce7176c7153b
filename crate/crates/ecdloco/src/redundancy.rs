//! Residue arithmetic, redundancy-metric search and residue tables.
//!
//! EC codewords are the D-LOCO codewords whose index is divisible by the
//! redundancy metric R. The residue of a received word's formal index then
//! equals the residue of the index error, so a table from residues to either
//! a positive index error or a substitution location drives correction.
//!
//! Two searches are provided. The strict search wants the residues of
//! {-e} u {+e} u {0, N(m)-1} pairwise distinct. The relaxed search tolerates
//! residue collisions whose signed candidates all come from one substitution
//! location: the decoder can then fix that location from the check-sum
//! instead of knowing the index error, which is also why such entries store
//! a location and shrink the table width.

use crate::error::{Error, Result};
use crate::index_errors::IndexErrorSet;
use crate::params::CodeParams;
use crate::rank::fold_contribution_ranges;
use crate::word::Word;
use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Residue map: k mod R, always in [0, R).
pub fn phi(k: &BigInt, r: &BigUint) -> Result<BigUint> {
    if *r < BigUint::from(2u32) {
        return Err(Error::InvalidParams(format!("R must be >= 2, got {r}")));
    }
    let rr = BigInt::from(r.clone());
    let mut rem = k % &rr;
    if rem.sign() == Sign::Minus {
        rem += &rr;
    }
    Ok(rem.magnitude().clone())
}

/// A residue table entry: either the unique substitution location that can
/// produce this residue class, or the positive index error itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entry {
    Loc(usize),
    Err(BigUint),
}

/// The decoder's lookup structure for a fixed (m, ell, R).
#[derive(Clone, Debug, PartialEq)]
pub struct ResidueTable {
    m: usize,
    ell: usize,
    r: BigUint,
    entries: BTreeMap<BigUint, Entry>,
    phi_n1: BigUint,
    msg_bits: usize,
    /// Residues of the stored cardinalities M(0..=m+1) (storage item (3)).
    m_mod: Vec<BigUint>,
    /// Residues of prefix sums of M, for the in-pass residual computation.
    prefix_mod: Vec<BigUint>,
}

impl ResidueTable {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn r(&self) -> &BigUint {
        &self.r
    }

    pub fn phi_n1(&self) -> &BigUint {
        &self.phi_n1
    }

    pub fn msg_bits(&self) -> usize {
        self.msg_bits
    }

    pub fn entries(&self) -> &BTreeMap<BigUint, Entry> {
        &self.entries
    }

    pub fn probe(&self, residue: &BigUint) -> Option<&Entry> {
        self.entries.get(residue)
    }

    /// Formal index and formal residual index in one pass. The residual is
    /// accumulated from stored residues of cardinality prefix sums rather
    /// than reduced from the full index at the end.
    pub fn index_and_residual(&self, w: &Word, params: &CodeParams) -> (BigUint, BigUint) {
        debug_assert_eq!(params.m(), self.m);
        debug_assert_eq!(params.ell(), self.ell);
        let mut index = BigUint::zero();
        let mut residual = BigUint::zero();
        fold_contribution_ranges(w, params, &mut |lo, hi| {
            index += params.m_range_sum(lo, hi);
            let piece_mod = if lo <= 0 {
                self.prefix_mod[hi].clone()
            } else {
                // (prefix[hi] - prefix[lo-1]) mod R, kept non-negative
                (&self.prefix_mod[hi] + &self.r - &self.prefix_mod[lo as usize - 1]) % &self.r
            };
            residual = (&residual + piece_mod) % &self.r;
        });
        debug_assert_eq!(residual, &index % &self.r);
        (index, residual)
    }

    pub fn residual_of(&self, index: &BigUint) -> BigUint {
        index % &self.r
    }

    /// Serializes to the line-oriented text format (trailing newline included).
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str("#ecdloco-table v1\n");
        let _ = writeln!(
            out,
            "m={} ell={} R={} phiN1={} msgbits={}",
            self.m, self.ell, self.r, self.phi_n1, self.msg_bits
        );
        for (res, entry) in &self.entries {
            match entry {
                Entry::Loc(i) => {
                    let _ = writeln!(out, "entry {res} loc {i}");
                }
                Entry::Err(e) => {
                    let _ = writeln!(out, "entry {res} err {e}");
                }
            }
        }
        out
    }

    /// Parses the text format produced by [`ResidueTable::serialize`].
    pub fn deserialize(text: &str) -> Result<ResidueTable> {
        let mut lines = text.lines().enumerate();
        let (n0, first) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty table file"))?;
        if first.trim() != "#ecdloco-table v1" {
            return Err(parse_err(n0 + 1, "missing `#ecdloco-table v1` header"));
        }
        let (n1, header) = lines
            .next()
            .ok_or_else(|| parse_err(2, "missing parameter line"))?;
        let mut m = None;
        let mut ell = None;
        let mut r = None;
        let mut phi_n1 = None;
        let mut msg_bits = None;
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| parse_err(n1 + 1, &format!("malformed field `{field}`")))?;
            match key {
                "m" => m = Some(parse_usize(n1 + 1, value)?),
                "ell" => ell = Some(parse_usize(n1 + 1, value)?),
                "R" => r = Some(parse_big(n1 + 1, value)?),
                "phiN1" => phi_n1 = Some(parse_big(n1 + 1, value)?),
                "msgbits" => msg_bits = Some(parse_usize(n1 + 1, value)?),
                other => return Err(parse_err(n1 + 1, &format!("unknown field `{other}`"))),
            }
        }
        let m = m.ok_or_else(|| parse_err(n1 + 1, "missing m"))?;
        let ell = ell.ok_or_else(|| parse_err(n1 + 1, "missing ell"))?;
        let r = r.ok_or_else(|| parse_err(n1 + 1, "missing R"))?;
        let phi_n1 = phi_n1.ok_or_else(|| parse_err(n1 + 1, "missing phiN1"))?;
        let msg_bits = msg_bits.ok_or_else(|| parse_err(n1 + 1, "missing msgbits"))?;

        let params = CodeParams::new(m, ell)
            .map_err(|e| parse_err(n1 + 1, &format!("bad parameters: {e}")))?;
        if r < BigUint::from(2u32) {
            return Err(parse_err(n1 + 1, "R must be >= 2"));
        }

        let mut entries = BTreeMap::new();
        let mut prev_res: Option<BigUint> = None;
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "entry" {
                return Err(parse_err(lineno, "expected `entry <res> loc|err <val>`"));
            }
            let res = parse_big(lineno, parts[1])?;
            if res >= r || res.is_zero() {
                return Err(parse_err(lineno, "entry residue out of range [1, R)"));
            }
            if let Some(prev) = &prev_res {
                if res <= *prev {
                    return Err(parse_err(lineno, "entries must be ascending by residue"));
                }
            }
            let entry = match parts[2] {
                "loc" => {
                    let loc = parse_usize(lineno, parts[3])?;
                    if loc >= m {
                        return Err(parse_err(lineno, "location out of range"));
                    }
                    Entry::Loc(loc)
                }
                "err" => {
                    let e = parse_big(lineno, parts[3])?;
                    if e.is_zero() {
                        return Err(parse_err(lineno, "index error must be positive"));
                    }
                    if &e % &r != res {
                        return Err(parse_err(lineno, "index error inconsistent with residue"));
                    }
                    Entry::Err(e)
                }
                other => return Err(parse_err(lineno, &format!("unknown entry kind `{other}`"))),
            };
            prev_res = Some(res.clone());
            entries.insert(res, entry);
        }

        let expected_phi_n1 = params.n_minus_1() % &r;
        if expected_phi_n1 != phi_n1 {
            return Err(parse_err(n1 + 1, "phiN1 inconsistent with m, ell, R"));
        }
        if msg_bits_for(&params, &r) != msg_bits {
            return Err(parse_err(n1 + 1, "msgbits inconsistent with m, ell, R"));
        }
        Ok(ResidueTable::assemble(&params, r, entries))
    }

    fn assemble(
        params: &CodeParams,
        r: BigUint,
        entries: BTreeMap<BigUint, Entry>,
    ) -> ResidueTable {
        let phi_n1 = params.n_minus_1() % &r;
        let msg_bits = msg_bits_for(params, &r);
        let m_mod: Vec<BigUint> = params.m_table().iter().map(|v| v % &r).collect();
        let mut prefix_mod = Vec::with_capacity(m_mod.len());
        let mut acc = BigUint::zero();
        for v in &m_mod {
            acc = (&acc + v) % &r;
            prefix_mod.push(acc.clone());
        }
        ResidueTable {
            m: params.m(),
            ell: params.ell(),
            r,
            entries,
            phi_n1,
            msg_bits,
            m_mod,
            prefix_mod,
        }
    }

    /// Residues of the stored cardinalities (storage item (3)).
    pub fn cardinality_residues(&self) -> &[BigUint] {
        &self.m_mod
    }
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse {
        line,
        msg: msg.to_string(),
    }
}

fn parse_usize(line: usize, s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| parse_err(line, &format!("`{s}` is not an integer")))
}

fn parse_big(line: usize, s: &str) -> Result<BigUint> {
    s.parse()
        .map_err(|_| parse_err(line, &format!("`{s}` is not a decimal integer")))
}

/// floor(log2((N(m)-1)/R + 1)): the number of message bits one EC codeword carries.
pub fn msg_bits_for(params: &CodeParams, r: &BigUint) -> usize {
    let q = params.n_minus_1() / r + 1u32;
    (q.bits() - 1) as usize
}

// ---------------------------------------------------------------------------
// searches
// ---------------------------------------------------------------------------

struct SearchInput {
    // positive error values; u128 fast path when every value fits
    vals_small: Option<Vec<u128>>,
    vals_big: Vec<BigUint>,
    locs: Vec<Vec<u16>>,
    nm1_small: Option<u128>,
    nm1_big: BigUint,
}

impl SearchInput {
    fn prepare(errors: &IndexErrorSet, params: &CodeParams) -> SearchInput {
        let mut vals_big = Vec::new();
        let mut locs = Vec::new();
        for (e, l) in errors.positives() {
            vals_big.push(e);
            locs.push(l.iter().map(|&x| x as u16).collect());
        }
        let nm1_big = params.n_minus_1();
        let vals_small: Option<Vec<u128>> = vals_big.iter().map(|v| v.to_u128()).collect();
        let nm1_small = nm1_big.to_u128();
        SearchInput {
            vals_small: if nm1_small.is_some() { vals_small } else { None },
            vals_big,
            locs,
            nm1_small,
            nm1_big,
        }
    }

}

/// Group state at one residue: how many values landed there, and their
/// common unique location when one exists (None once broken).
#[derive(Clone, Copy)]
struct Group {
    count: u32,
    common: Option<u16>,
}

/// Epoch-stamped scratch table indexed directly by residue; reused across
/// candidate R values so every slot access is O(1) without hashing.
struct Scratch {
    epoch: u32,
    slots: Vec<(u32, Group)>,
}

impl Scratch {
    fn new() -> Scratch {
        Scratch {
            epoch: 0,
            slots: Vec::new(),
        }
    }

    fn begin(&mut self, r: u64) {
        let need = r as usize;
        if self.slots.len() < need {
            self.slots.resize(
                need.next_power_of_two(),
                (0, Group { count: 0, common: None }),
            );
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            for s in &mut self.slots {
                s.0 = 0;
            }
            self.epoch = 1;
        }
    }

    #[inline]
    fn get(&self, rem: u64) -> Option<Group> {
        let s = &self.slots[rem as usize];
        if s.0 == self.epoch {
            Some(s.1)
        } else {
            None
        }
    }

    #[inline]
    fn bump(&mut self, rem: u64, own: Option<u16>) {
        let epoch = self.epoch;
        let s = &mut self.slots[rem as usize];
        if s.0 == epoch {
            s.1.count += 1;
        } else {
            *s = (epoch, Group { count: 1, common: own });
        }
    }
}

/// Incremental feasibility with early abort: values are folded into a
/// residue table; any collision (same residue, or residues summing to R)
/// must be resolvable by a shared unique location, or in strict mode must
/// not happen at all. Infeasible candidates typically die within the first
/// few hundred insertions.
fn feasible_from_values(
    vals: &[u128],
    locs: &[Vec<u16>],
    phi_n1: u64,
    r: u64,
    relaxed: bool,
    scratch: &mut Scratch,
) -> bool {
    if phi_n1 == 0 {
        return false;
    }
    let mirror_n1 = r - phi_n1;
    scratch.begin(r);
    for (i, v) in vals.iter().enumerate() {
        let rem = (v % r as u128) as u64;
        if rem == 0 || rem == phi_n1 || rem == mirror_n1 {
            return false;
        }
        let own = if locs[i].len() == 1 {
            Some(locs[i][0])
        } else {
            None
        };
        let self_paired = 2 * rem == r;
        // candidates of the opposite sign live at the mirror residue
        if !self_paired {
            if let Some(mirror) = scratch.get(r - rem) {
                if !relaxed || own.is_none() || mirror.common != own {
                    return false;
                }
            }
        }
        match scratch.get(rem) {
            Some(group) => {
                // same-residue collision (also covers +e/-e when 2*rem == r)
                if !relaxed || own.is_none() || group.common != own {
                    return false;
                }
            }
            None => {
                if self_paired && (!relaxed || own.is_none()) {
                    return false;
                }
            }
        }
        scratch.bump(rem, own);
    }
    true
}

fn feasible_u64(input: &SearchInput, r: u64, relaxed: bool, scratch: &mut Scratch) -> bool {
    match (&input.vals_small, input.nm1_small) {
        (Some(vals), Some(nm1)) => {
            let phi_n1 = (nm1 % r as u128) as u64;
            feasible_from_values(vals, &input.locs, phi_n1, r, relaxed, scratch)
        }
        _ => feasible_big(input, &BigUint::from(r), relaxed),
    }
}

fn feasible_big(input: &SearchInput, r: &BigUint, relaxed: bool) -> bool {
    // slow path for values beyond u128: same incremental scheme over
    // BigUint residues
    let phi_n1 = &input.nm1_big % r;
    if phi_n1.is_zero() {
        return false;
    }
    let mirror_n1 = r - &phi_n1;
    let two = BigUint::from(2u32);
    let mut scratch: BTreeMap<BigUint, Group> = BTreeMap::new();
    for (i, v) in input.vals_big.iter().enumerate() {
        let rem = v % r;
        if rem.is_zero() || rem == phi_n1 || rem == mirror_n1 {
            return false;
        }
        let own = if input.locs[i].len() == 1 {
            Some(input.locs[i][0])
        } else {
            None
        };
        let self_paired = &rem * &two == *r;
        if !self_paired {
            if let Some(mirror) = scratch.get(&(r - &rem)) {
                if mirror.count > 0 && (!relaxed || own.is_none() || mirror.common != own) {
                    return false;
                }
            }
        }
        let entry = scratch.entry(rem).or_insert(Group {
            count: 0,
            common: own,
        });
        if entry.count > 0 {
            if !relaxed || own.is_none() || entry.common != own {
                return false;
            }
        } else if self_paired && (!relaxed || own.is_none()) {
            return false;
        }
        entry.count += 1;
    }
    true
}

fn scan_for_r(input: &SearchInput, relaxed: bool) -> BigUint {
    const CHUNK: u64 = 16384;
    let mut start = 2u64;
    loop {
        let found = (0..(CHUNK / 2048))
            .into_par_iter()
            .filter_map(|block| {
                let lo = start + block * 2048;
                let mut scratch = Scratch::new();
                (lo..lo + 2048).find(|&r| feasible_u64(input, r, relaxed, &mut scratch))
            })
            .min();
        if let Some(r) = found {
            return BigUint::from(r);
        }
        start += CHUNK;
        assert!(
            start < u64::MAX - CHUNK,
            "redundancy search exceeded the u64 candidate range"
        );
    }
}

/// Smallest R >= 2 whose residues of {-e} u {+e} u {0, N(m)-1} are pairwise
/// distinct.
pub fn find_r_strict(errors: &IndexErrorSet, params: &CodeParams) -> BigUint {
    let input = SearchInput::prepare(errors, params);
    scan_for_r(&input, false)
}

/// Smallest R >= 2 passing the relaxed (decoder-resolvable) feasibility
/// predicate, together with the residue table built at that R.
pub fn find_r_relaxed(errors: &IndexErrorSet, params: &CodeParams) -> (BigUint, ResidueTable) {
    let input = SearchInput::prepare(errors, params);
    let r = scan_for_r(&input, true);
    let table = build_table(errors, params, &r).expect("search returned a feasible R");
    (r, table)
}

/// Public feasibility predicates (used by minimality tests).
pub fn strict_feasible(errors: &IndexErrorSet, params: &CodeParams, r: &BigUint) -> bool {
    let input = SearchInput::prepare(errors, params);
    match r.to_u64() {
        Some(r64) if r64 >= 2 => feasible_u64(&input, r64, false, &mut Scratch::new()),
        _ => feasible_big(&input, r, false),
    }
}

pub fn relaxed_feasible(errors: &IndexErrorSet, params: &CodeParams, r: &BigUint) -> bool {
    let input = SearchInput::prepare(errors, params);
    match r.to_u64() {
        Some(r64) if r64 >= 2 => feasible_u64(&input, r64, true, &mut Scratch::new()),
        _ => feasible_big(&input, r, true),
    }
}

/// Scans upward for an R that is relaxed-feasible but not strict-feasible,
/// i.e. one whose table contains at least one location entry.
pub fn find_location_bearing_r(
    errors: &IndexErrorSet,
    params: &CodeParams,
    cap: u64,
) -> Option<BigUint> {
    let input = SearchInput::prepare(errors, params);
    let mut scratch = Scratch::new();
    (2..cap)
        .find(|&r| {
            feasible_u64(&input, r, true, &mut scratch)
                && !feasible_u64(&input, r, false, &mut scratch)
        })
        .map(BigUint::from)
}

/// Builds the residue table for a given feasible R; rejects infeasible R.
pub fn build_table(
    errors: &IndexErrorSet,
    params: &CodeParams,
    r: &BigUint,
) -> Result<ResidueTable> {
    if *r < BigUint::from(2u32) {
        return Err(Error::InvalidParams(format!("R must be >= 2, got {r}")));
    }
    if !relaxed_feasible(errors, params, r) {
        return Err(Error::InvalidParams(format!(
            "R = {r} is not feasible for this error set"
        )));
    }
    // group positive errors by residue
    let mut by_res: BTreeMap<BigUint, Vec<(BigUint, &std::collections::BTreeSet<usize>)>> =
        BTreeMap::new();
    for (e, locs) in errors.positives() {
        let rem = &e % r;
        by_res.entry(rem).or_default().push((e, locs));
    }
    let mut entries = BTreeMap::new();
    for (res, group) in &by_res {
        let mirror = r - res;
        let mirror_count = if mirror == *res {
            group.len()
        } else {
            by_res.get(&mirror).map(|g| g.len()).unwrap_or(0)
        };
        let entry = if group.len() + mirror_count == 1 {
            Entry::Err(group[0].0.clone())
        } else {
            // feasibility guarantees a unique common location
            let loc = *group[0]
                .1
                .iter()
                .next()
                .expect("colliding entries carry a location");
            Entry::Loc(loc)
        };
        entries.insert(res.clone(), entry);
    }
    Ok(ResidueTable::assemble(params, r.clone(), entries))
}

// ---------------------------------------------------------------------------
// storage accounting
// ---------------------------------------------------------------------------

/// Bit widths and totals of the stored decoder state, per the three items:
/// (1) the cardinalities 3N(i)/4, (2) the residue table, (3) the residues of
/// cardinalities along with phi(N(m)-1). A kilobyte is 8000 bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StorageBreakdown {
    pub table_bits: u64,
    pub cardinality_bits: u64,
    pub residue_bits: u64,
}

impl StorageBreakdown {
    pub fn total_bits(&self) -> u64 {
        self.table_bits + self.cardinality_bits + self.residue_bits
    }

    pub fn total_kb(&self) -> f64 {
        self.total_bits() as f64 / 8000.0
    }

    pub fn table_kb(&self) -> f64 {
        self.table_bits as f64 / 8000.0
    }
}

fn floor_log2_usize(x: usize) -> u64 {
    (usize::BITS - 1 - x.leading_zeros()) as u64
}

/// Table storage: one row per positive entry, each carrying a location field
/// of floor(log2 m)+1 bits and a residue/value field of floor(log2 R)+1 bits.
pub fn table_bits(entry_count: u64, m: usize, r: &BigUint) -> u64 {
    entry_count * ((floor_log2_usize(m) + 1) + r.bits())
}

/// The paper's nominal entry counts: about 5m for ell=1, 20(m-2) for ell=2,
/// 52(m-2) for ell=3.
pub fn nominal_entry_count(m: usize, ell: usize) -> Result<u64> {
    match ell {
        1 => Ok(5 * m as u64),
        2 => Ok(20 * (m as u64 - 2)),
        3 => Ok(52 * (m as u64 - 2)),
        other => Err(Error::InvalidParams(format!(
            "no nominal entry count for ell={other}"
        ))),
    }
}

fn items_1_and_3(params: &CodeParams, r: &BigUint) -> (u64, u64) {
    let m = params.m();
    let cardinality_bits: u64 = (0..m).map(|i| params.m_of(i).bits().max(1)).sum();
    let residue_bits = (m as u64 + 1) * r.bits();
    (cardinality_bits, residue_bits)
}

/// Storage accounting for an actual table.
pub fn storage_bits(table: &ResidueTable, params: &CodeParams) -> StorageBreakdown {
    let (cardinality_bits, residue_bits) = items_1_and_3(params, table.r());
    StorageBreakdown {
        table_bits: table_bits(table.entries().len() as u64, table.m(), table.r()),
        cardinality_bits,
        residue_bits,
    }
}

/// Storage accounting with the paper's nominal entry count.
pub fn storage_bits_nominal(
    m: usize,
    ell: usize,
    r: &BigUint,
    params: &CodeParams,
) -> Result<StorageBreakdown> {
    let (cardinality_bits, residue_bits) = items_1_and_3(params, r);
    Ok(StorageBreakdown {
        table_bits: table_bits(nominal_entry_count(m, ell)?, m, r),
        cardinality_bits,
        residue_bits,
    })
}

// ---------------------------------------------------------------------------
// quadratic model fit
// ---------------------------------------------------------------------------

/// Least-squares quadratic fit of (m, R) samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelFit {
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
    /// RMSE normalized by the mean of the data.
    pub nrmse: f64,
}

impl ModelFit {
    pub fn eval(&self, m: f64) -> f64 {
        self.a2 * m * m + self.a1 * m + self.a0
    }
}

pub fn fit_quadratic(points: &[(f64, f64)]) -> Result<ModelFit> {
    if points.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "quadratic fit needs >= 3 points, got {}",
            points.len()
        )));
    }
    // normal equations for basis (m^2, m, 1)
    let mut ata = [[0f64; 3]; 3];
    let mut atb = [0f64; 3];
    for &(x, y) in points {
        let row = [x * x, x, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * y;
        }
    }
    let sol = solve3(ata, atb)
        .ok_or_else(|| Error::InvalidInput("singular system in quadratic fit".into()))?;
    let fit = ModelFit {
        a2: sol[0],
        a1: sol[1],
        a0: sol[2],
        nrmse: 0.0,
    };
    let n = points.len() as f64;
    let mse: f64 = points
        .iter()
        .map(|&(x, y)| {
            let d = y - fit.eval(x);
            d * d
        })
        .sum::<f64>()
        / n;
    let mean = points.iter().map(|&(_, y)| y).sum::<f64>() / n;
    Ok(ModelFit {
        nrmse: mse.sqrt() / mean,
        ..fit
    })
}

#[allow(clippy::needless_range_loop)] // k indexes two rows of `a` at once
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0f64; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for (k, xv) in x.iter().enumerate().skip(row + 1) {
            acc -= a[row][k] * xv;
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}
