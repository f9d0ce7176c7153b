//! Index differences caused by single substitutions.
//!
//! Four generators share one result type:
//! - brute force over a whole (small) codebook, the exactness oracle;
//! - closed-form supersets for ell = 1 and ell = 2, whose size is O(m);
//! - exact local-window enumeration ("window" mode), which serves both as
//!   the ell = 3 generator and as the exact mode for storage-lean tables.
//!
//! Every entry records location provenance: the set of substitution
//! positions that can (or formally could) realize the index difference.
//! The locatable-entry optimization in the redundancy module depends on it.

use crate::error::{Error, Result};
use crate::params::CodeParams;
use crate::rank::local_delta;
use crate::symbol::{Symbol, ALPHABET};
use crate::word::for_each_codeword;
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

/// Which generator produced a set.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    BruteForce,
    SupersetL1,
    SupersetL2,
    SupersetL3,
    Window,
}

/// Signed index differences with location provenance. Brute-force and window
/// sets carry every realizable signed difference; the closed-form supersets
/// store the non-negative side (negatives are derived where needed).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexErrorSet {
    m: usize,
    ell: usize,
    mode: Mode,
    entries: BTreeMap<BigInt, BTreeSet<usize>>,
}

/// Brute-force enumeration is capped at this m by default.
pub const BRUTEFORCE_CAP: usize = 12;

impl IndexErrorSet {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn entries(&self) -> &BTreeMap<BigInt, BTreeSet<usize>> {
        &self.entries
    }

    pub fn contains(&self, e: &BigInt) -> bool {
        self.entries.contains_key(e)
    }

    pub fn locations(&self, e: &BigInt) -> Option<&BTreeSet<usize>> {
        self.entries.get(e)
    }

    /// Strictly positive entries with their locations.
    pub fn positives(&self) -> impl Iterator<Item = (BigUint, &BTreeSet<usize>)> {
        self.entries
            .iter()
            .filter(|(e, _)| e.sign() == num_bigint::Sign::Plus)
            .map(|(e, locs)| (e.magnitude().clone(), locs))
    }

    pub fn positive_count(&self) -> usize {
        self.positives().count()
    }

    /// Values whose provenance spans more than one location.
    pub fn multi_location_values(&self) -> Vec<BigUint> {
        self.positives()
            .filter(|(_, locs)| locs.len() > 1)
            .map(|(e, _)| e)
            .collect()
    }

    /// One line per entry: `e=<signed decimal> locs=<comma list>`.
    pub fn dump<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for (e, locs) in &self.entries {
            let list: Vec<String> = locs.iter().map(|l| l.to_string()).collect();
            writeln!(out, "e={} locs={}", e, list.join(","))?;
        }
        Ok(())
    }

    fn insert(&mut self, e: BigInt, loc: Option<usize>) {
        let locs = self.entries.entry(e).or_default();
        if let Some(l) = loc {
            locs.insert(l);
        }
    }

    fn new(m: usize, ell: usize, mode: Mode) -> IndexErrorSet {
        let mut s = IndexErrorSet {
            m,
            ell,
            mode,
            entries: BTreeMap::new(),
        };
        // the zero-error case is always present
        s.insert(BigInt::zero(), None);
        s
    }
}

/// Exact E(m, ell): every signed index difference over every codeword and
/// every single substitution, with exact location sets.
pub fn bruteforce_diffs(params: &CodeParams) -> Result<IndexErrorSet> {
    let m = params.m();
    if m > BRUTEFORCE_CAP {
        return Err(Error::InvalidParams(format!(
            "brute force is capped at m <= {BRUTEFORCE_CAP}, got m={m}"
        )));
    }
    let mut codebook = Vec::new();
    for_each_codeword(m, params.ell(), &mut |w| codebook.push(w.clone()));

    let maps: Vec<BTreeMap<BigInt, BTreeSet<usize>>> = codebook
        .par_chunks(1024)
        .map(|chunk| {
            let mut local: BTreeMap<BigInt, BTreeSet<usize>> = BTreeMap::new();
            for c in chunk {
                for pos in 0..m {
                    for s in ALPHABET {
                        if s == c.sym(pos) {
                            continue;
                        }
                        let d = local_delta(c, pos, s, params);
                        local.entry(d).or_default().insert(pos);
                    }
                }
            }
            local
        })
        .collect();

    let mut set = IndexErrorSet::new(m, params.ell(), Mode::BruteForce);
    for map in maps {
        for (e, locs) in map {
            set.entries.entry(e).or_default().extend(locs);
        }
    }
    Ok(set)
}

/// Closed-form superset of non-negative index errors for ell = 1:
/// {theta1*N(i+1)/4 + theta2*N(i)/4} over locations 1..m-1 plus {0,1,2,3}
/// at location 0.
pub fn superset_l1(params: &CodeParams) -> Result<IndexErrorSet> {
    if params.ell() != 1 {
        return Err(Error::InvalidParams(format!(
            "superset_l1 requires ell=1, got ell={}",
            params.ell()
        )));
    }
    let m = params.m();
    let mut set = IndexErrorSet::new(m, 1, Mode::SupersetL1);
    for v in 1u32..=3 {
        set.insert(BigInt::from(v), Some(0));
    }
    const THETAS: [(u32, u32); 5] = [(1, 0), (2, 0), (1, 1), (2, 1), (3, 1)];
    for i in 1..m {
        // N(i+1)/4 = M(i), N(i)/4 = M(i-1) when ell = 1
        let q1 = params.m_of(i);
        let q0 = params.m_of(i - 1);
        for (t1, t2) in THETAS {
            let v = q1 * t1 + q0 * t2;
            set.insert(BigInt::from(v), Some(i));
        }
    }
    Ok(set)
}

/// The matched product F1 x F2 x F3 for ell = 2, minus impossible matchings.
///
/// Expression coefficients per location i (basis Q1 = N(i+1)/4 = M(i)+M(i-1),
/// P = 3N(i)/4 = M(i), A = 3N(i-1)/4, B = 3N(i-2)/4):
///   F1: theta1*Q1 + theta2*P over {(1,0),(2,0),(3,0),(0,1),(1,1),(2,1)}
///   F2: phi1*A + phi2*B over {(0,0),(0,1),(1,1),(1,0),(-1,0)}
///   F3: psi*B over {-1,0,1}
///
/// The exclusion table enforces depth-consistency between the three changes.
/// Note the F1=(2,1) expression arises whenever c_i=A, w_i=C and
/// c_i <= c_{i+1} < w_i, not only for c_{i+1}=A, so its admissible F2 set is
/// {(1,1),(0,1),(0,0)}; and (F2,psi) = ((-1,0),-1) is impossible for every F1
/// since F2=(-1,0) needs w_i < c_{i-1} while psi=-1 needs w_i = c_{i-1}.
pub fn superset_l2(params: &CodeParams) -> Result<IndexErrorSet> {
    if params.ell() != 2 {
        return Err(Error::InvalidParams(format!(
            "superset_l2 requires ell=2, got ell={}",
            params.ell()
        )));
    }
    let m = params.m();
    let mut set = IndexErrorSet::new(m, 2, Mode::SupersetL2);

    // positive index differences from substitutions at locations 0 and 1:
    // {1..12} \ {5,6,9,10}; 1 and 2 occur only at location 0, 3 at both
    for (v, locs) in [
        (1u32, &[0usize][..]),
        (2, &[0]),
        (3, &[0, 1]),
        (4, &[1]),
        (7, &[1]),
        (8, &[1]),
        (11, &[1]),
        (12, &[1]),
    ] {
        for &l in locs {
            set.insert(BigInt::from(v), Some(l));
        }
    }

    const F1: [(i32, i32); 6] = [(1, 0), (2, 0), (3, 0), (0, 1), (1, 1), (2, 1)];
    const F2: [(i32, i32); 5] = [(0, 0), (0, 1), (1, 1), (1, 0), (-1, 0)];
    const F3: [i32; 3] = [-1, 0, 1];

    fn allowed(f1: (i32, i32), f2: (i32, i32), psi: i32) -> bool {
        if f2 == (-1, 0) && psi == -1 {
            return false;
        }
        match f1 {
            (1, 0) | (2, 0) => !matches!(f2, (1, 1) | (1, 0)),
            (3, 0) => matches!(f2, (0, 1) | (0, 0)) && psi != -1 && !(f2 == (0, 0) && psi == 0),
            (0, 1) => matches!(f2, (1, 1) | (1, 0)) && psi != 1,
            (1, 1) => f2 != (-1, 0),
            (2, 1) => {
                matches!(f2, (1, 1) | (0, 1) | (0, 0))
                    && psi != -1
                    && !(f2 == (0, 0) && psi == 0)
            }
            _ => true,
        }
    }

    for i in 2..m {
        let q1 = BigInt::from(params.m_of(i) + params.m_of(i - 1));
        let p = BigInt::from(params.m_of(i).clone());
        let a = BigInt::from(params.m_of(i - 1).clone());
        let b = BigInt::from(params.m_of(i - 2).clone());
        for f1 in F1 {
            let x = &q1 * f1.0 + &p * f1.1;
            for f2 in F2 {
                let y = &a * f2.0 + &b * f2.1;
                for psi in F3 {
                    if !allowed(f1, f2, psi) {
                        continue;
                    }
                    let v = &x + &y + &b * psi;
                    if v.sign() == num_bigint::Sign::Plus {
                        set.insert(v, Some(i));
                    }
                }
            }
        }
    }
    Ok(set)
}

/// Matched-product superset for ell = 3. A substitution at location i can
/// change the four contributions at positions i..i-3; the sets of possible
/// raise-changes per position (9, 8, 5 and 3 values at interior locations)
/// are enumerated exactly from local windows, and the superset sums one
/// element from each without interdependence exclusions, so it contains
/// every realizable difference by construction.
pub fn superset_l3(params: &CodeParams) -> Result<IndexErrorSet> {
    if params.ell() != 3 {
        return Err(Error::InvalidParams(format!(
            "superset_l3 requires ell=3, got ell={}",
            params.ell()
        )));
    }
    let ell = 3usize;
    let m = params.m();

    let per_loc: Vec<BTreeMap<BigInt, BTreeSet<usize>>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let lo = i.saturating_sub(ell);
            let hi = (i + ell).min(m - 1);
            let npos = hi - lo + 1;
            // change sets indexed by distance below the substitution
            let mut dsets: Vec<BTreeSet<BigInt>> = vec![BTreeSet::new(); i - lo + 1];
            let mut window: Vec<Symbol> = vec![Symbol::A; npos];
            for code in 0..4usize.pow(npos as u32) {
                let mut v = code;
                for slot in window.iter_mut() {
                    *slot = Symbol::from_value((v & 3) as u8).unwrap();
                    v >>= 2;
                }
                let mut run = 1usize;
                let mut ok = true;
                for t in 1..npos {
                    if window[t] == window[t - 1] {
                        run += 1;
                        if run > ell {
                            ok = false;
                            break;
                        }
                    } else {
                        run = 1;
                    }
                }
                if !ok {
                    continue;
                }
                let sym_c = |p: usize| -> Symbol {
                    if p > m - 1 {
                        Symbol::C
                    } else {
                        window[p - lo]
                    }
                };
                let ci = sym_c(i);
                for s in ALPHABET {
                    if s <= ci {
                        continue; // raises only; negatives come from mirroring
                    }
                    let sym_w = |p: usize| -> Symbol {
                        if p == i {
                            s
                        } else {
                            sym_c(p)
                        }
                    };
                    for p in lo..=i {
                        let d = BigInt::from(contribution_closure(&sym_w, p, params))
                            - BigInt::from(contribution_closure(&sym_c, p, params));
                        dsets[i - p].insert(d);
                    }
                }
            }
            // cartesian sums of one change per affected position
            let mut sums: BTreeSet<BigInt> = BTreeSet::new();
            sums.insert(BigInt::zero());
            for dset in &dsets {
                let mut next = BTreeSet::new();
                for base in &sums {
                    for d in dset {
                        next.insert(base + d);
                    }
                }
                sums = next;
            }
            let mut local: BTreeMap<BigInt, BTreeSet<usize>> = BTreeMap::new();
            for s in sums {
                if s.sign() == num_bigint::Sign::Plus {
                    local.entry(s).or_default().insert(i);
                }
            }
            local
        })
        .collect();

    let mut set = IndexErrorSet::new(m, ell, Mode::SupersetL3);
    for map in per_loc {
        for (e, locs) in map {
            set.entries.entry(e).or_default().extend(locs);
        }
    }
    Ok(set)
}

/// Exact signed index differences by exhausting, per location i, all local
/// windows c_{i+ell}..c_{i-ell} free of forbidden runs, every substituted
/// w_i != c_i, with c_j = C beyond position m-1 and truncation below 0.
/// Contributions outside positions i..i-ell are unchanged, so the window
/// determines the difference exactly, and every admissible window extends to
/// a codeword; hence this set equals the brute-force set.
pub fn window_diffs(params: &CodeParams) -> Result<IndexErrorSet> {
    let ell = params.ell();
    if ell > 3 {
        return Err(Error::InvalidParams(format!(
            "window enumeration is implemented for ell <= 3, got ell={ell}"
        )));
    }
    let m = params.m();

    let per_loc: Vec<BTreeMap<BigInt, BTreeSet<usize>>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut local: BTreeMap<BigInt, BTreeSet<usize>> = BTreeMap::new();
            let lo = i.saturating_sub(ell);
            let hi = (i + ell).min(m - 1);
            let npos = hi - lo + 1;
            let mut window: Vec<Symbol> = vec![Symbol::A; npos];
            let count = 4usize.pow(npos as u32);
            for code in 0..count {
                let mut v = code;
                for slot in window.iter_mut() {
                    *slot = Symbol::from_value((v & 3) as u8).unwrap();
                    v >>= 2;
                }
                // reject windows with a forbidden run among real positions
                let mut run = 1usize;
                let mut ok = true;
                for t in 1..npos {
                    if window[t] == window[t - 1] {
                        run += 1;
                        if run > ell {
                            ok = false;
                            break;
                        }
                    } else {
                        run = 1;
                    }
                }
                if !ok {
                    continue;
                }
                let sym_c = |p: usize| -> Symbol {
                    if p > m - 1 {
                        Symbol::C
                    } else {
                        window[p - lo]
                    }
                };
                let ci = sym_c(i);
                for s in ALPHABET {
                    if s == ci {
                        continue;
                    }
                    let sym_w = |p: usize| -> Symbol {
                        if p == i {
                            s
                        } else {
                            sym_c(p)
                        }
                    };
                    let mut d = BigInt::zero();
                    for p in lo..=i {
                        d += BigInt::from(contribution_closure(&sym_w, p, params));
                        d -= BigInt::from(contribution_closure(&sym_c, p, params));
                    }
                    local.entry(d).or_default().insert(i);
                }
            }
            local
        })
        .collect();

    let mut set = IndexErrorSet::new(m, ell, Mode::Window);
    for map in per_loc {
        for (e, locs) in map {
            set.entries.entry(e).or_default().extend(locs);
        }
    }
    Ok(set)
}

// contribution over a symbol accessor; mirrors rank::contribution
fn contribution_closure<F: Fn(usize) -> Symbol>(
    sym: &F,
    i: usize,
    params: &CodeParams,
) -> BigUint {
    let ell = params.ell();
    let mut total = BigUint::zero();
    let ci = sym(i);
    for delta in ALPHABET.iter().take(ci.value() as usize) {
        let mut t = 0usize;
        while t < ell && sym(i + 1 + t) == *delta {
            t += 1;
        }
        if t < ell {
            let k = t + 1;
            total += params.m_range_sum(i as isize + k as isize - ell as isize, i);
        }
    }
    total
}

/// Picks the generator the adopted tables use for a given mode name.
pub fn generate(params: &CodeParams, mode: Mode) -> Result<IndexErrorSet> {
    match mode {
        Mode::BruteForce => bruteforce_diffs(params),
        Mode::SupersetL1 => superset_l1(params),
        Mode::SupersetL2 => superset_l2(params),
        Mode::SupersetL3 => superset_l3(params),
        Mode::Window => window_diffs(params),
    }
}

/// The default superset for a given ell: closed forms for ell in {1,2},
/// the matched product for ell = 3.
pub fn default_superset(params: &CodeParams) -> Result<IndexErrorSet> {
    match params.ell() {
        1 => superset_l1(params),
        2 => superset_l2(params),
        3 => superset_l3(params),
        other => Err(Error::InvalidParams(format!(
            "no index-error generator for ell={other}"
        ))),
    }
}
