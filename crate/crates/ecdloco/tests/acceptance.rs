//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values (run with `--nocapture` to see them).

use ecdloco::ec_codec::{decode_segment, make_bridge};
use ecdloco::index_errors::{
    bruteforce_diffs, default_superset, superset_l1, superset_l2, window_diffs,
};
use ecdloco::params::CodeParams;
use ecdloco::rank::{formal_index, unrank};
use ecdloco::redundancy::{
    build_table, find_r_relaxed, find_r_strict, fit_quadratic, msg_bits_for, phi, relaxed_feasible,
    storage_bits, storage_bits_nominal, strict_feasible, table_bits, nominal_entry_count,
    ResidueTable,
};
use ecdloco::simlab::{
    gc_content, max_running_disparity, run_double_experiment, run_single_exhaustive,
    run_single_sampled, random_strand, rates_table,
};
use ecdloco::symbol::{Symbol, ALPHABET};
use ecdloco::word::{enumerate_codebook, Word};
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn relaxed_table(m: usize, ell: usize) -> (CodeParams, ResidueTable) {
    let params = CodeParams::new(m, ell).unwrap();
    let errors = default_superset(&params).unwrap();
    let (_, table) = find_r_relaxed(&errors, &params);
    (params, table)
}

#[test]
fn criterion_01_fixture_exactness() {
    let params = CodeParams::new(6, 1).unwrap();
    let errors = superset_l1(&params).unwrap();
    let table = build_table(&errors, &params, &big(127)).unwrap();
    let r127 = big(127);

    assert_eq!(formal_index(&w("AGTCAG"), &params), big(127));
    assert_eq!(formal_index(&w("AGCCAG"), &params), big(163));
    assert_eq!(phi(&BigInt::from(370), &r127).unwrap(), big(116));
    assert_eq!(formal_index(&w("TGTCAG"), &params), big(370));
    // 370 - 243 = 127 via the direct probe
    assert_eq!(big(370) - big(243), big(127));
    assert!(matches!(
        table.probe(&big(116)),
        Some(ecdloco::redundancy::Entry::Err(e)) if *e == big(243)
    ));
    // 100 + 27 = 127 via the negative probe: phi(-100) = 27
    assert_eq!(formal_index(&w("AGACAG"), &params), big(100));
    assert_eq!(phi(&BigInt::from(-100), &r127).unwrap(), big(27));
    assert!(matches!(
        table.probe(&big(27)),
        Some(ecdloco::redundancy::Entry::Err(e)) if *e == big(27)
    ));
    // non-codeword AGCCAG corrected via 163 - 36
    assert_eq!(phi(&BigInt::from(163), &r127).unwrap(), big(36));
    // TAAGAC: formal index 254, zero residue
    assert_eq!(formal_index(&w("TAAGAC"), &params), big(254));
    assert!(phi(&BigInt::from(254), &r127).unwrap().is_zero());
    // TATAAC path: phi(245) = 118 absent; complement 729; phi(729)=94;
    // 729 - 12 = 717; output 254
    assert_eq!(formal_index(&w("TATAAC"), &params), big(245));
    assert_eq!(phi(&BigInt::from(245), &r127).unwrap(), big(118));
    assert!(table.probe(&big(118)).is_none());
    assert_eq!(formal_index(&w("GCGCCA"), &params), big(729));
    assert_eq!(phi(&BigInt::from(729), &r127).unwrap(), big(94));
    assert_eq!(formal_index(&w("GCGTCA"), &params), big(717));
    assert_eq!(big(971) - big(717), big(254));

    // exercise the decoder end-to-end on all four receptions
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let bridge_agtcag = make_bridge(&w("AGTCAG"), false, Symbol::A, 1);
    let bridge_tatgac = make_bridge(&w("TATGAC"), false, Symbol::A, 1);
    for (received, bridge, expect) in [
        ("TGTCAG", bridge_agtcag, 127u64),
        ("AGACAG", bridge_agtcag, 127),
        ("AGCCAG", bridge_agtcag, 127),
        ("TAAGAC", bridge_tatgac, 254),
        ("TATAAC", bridge_tatgac, 254),
    ] {
        let mut seg: Vec<Symbol> = w(received).iter_msb().collect();
        seg.extend_from_slice(&bridge);
        let res = decode_segment(&seg, &params, &table, &mut rng).unwrap();
        assert_eq!(res.index, Some(big(expect)), "received {received}");
    }
    println!("ACCEPTANCE 1: PASS - all Example 1/7/8 and Remark 2 fixtures exact");
}

#[test]
fn criterion_02_rank_oracle_equivalence() {
    for ell in 1..=3usize {
        for m in ell..=10 {
            let params = CodeParams::new(m, ell).unwrap();
            let codebook = enumerate_codebook(m, ell);
            assert_eq!(BigUint::from(codebook.len()), params.cardinality());
            codebook.par_iter().enumerate().for_each(|(rank, c)| {
                let idx = BigUint::from(rank);
                assert_eq!(formal_index(c, &params), idx, "m={m} ell={ell} {c}");
                assert_eq!(unrank(&idx, &params).unwrap(), *c);
            });
        }
    }
    println!("ACCEPTANCE 2: PASS - lexicographic rank == formal index and unrank inverts it, all m <= 10, ell in 1..3");
}

#[test]
fn criterion_03_index_error_containment() {
    for ell in 1..=3usize {
        for m in ell.max(2)..=10 {
            let params = CodeParams::new(m, ell).unwrap();
            let brute = bruteforce_diffs(&params).unwrap();
            let window = window_diffs(&params).unwrap();
            // window mode equals brute force exactly: values and locations
            assert_eq!(brute.entries(), window.entries(), "window m={m} ell={ell}");
            // brute-force positives (values and locations) live in the superset
            let sup = default_superset(&params).unwrap();
            for (e, locs) in brute.positives() {
                let key = BigInt::from(e.clone());
                let sup_locs = sup
                    .locations(&key)
                    .unwrap_or_else(|| panic!("m={m} ell={ell}: {e} missing from superset"));
                assert!(
                    locs.is_subset(sup_locs),
                    "m={m} ell={ell}: locations of {e} not covered"
                );
            }
        }
    }
    println!("ACCEPTANCE 3: PASS - brute-force sets contained in supersets; window mode exact, m <= 10");
}

#[test]
fn criterion_04_strict_r_fixture() {
    let params = CodeParams::new(6, 1).unwrap();
    let errors = superset_l1(&params).unwrap();
    let r = find_r_strict(&errors, &params);
    assert_eq!(r, big(127));
    println!("ACCEPTANCE 4: PASS - strict search on E_sup(6,1) returns R = 127");
}

/// Table II reproduction runs in the documented fallback mode: the paper's
/// adopted superset is not recoverable from its text (its Case 5 excludes
/// realizable errors), so the reconstructed relaxed search returns smaller R.
/// The degraded criterion applies: R <= strict R, every rate >= (here: equal
/// to) the Table II rate, with the discrepancy reported per m. Criterion 6
/// supplies the 100%-correction leg.
#[test]
fn criterion_05_table2_fallback() {
    // (m, paper R, paper rate string, our documented R, msg_bits)
    let rows: [(usize, u64, &str, u64, usize); 7] = [
        (17, 9766, "0.9500", 7799, 19),
        (27, 22045, "1.2333", 19363, 37),
        (33, 45418, "1.3333", 27881, 48),
        (37, 49981, "1.3750", 41831, 55),
        (47, 80993, "1.4800", 72719, 74),
        (55, 114088, "1.5344", 81370, 89),
        (61, 137389, "1.5625", 105718, 100),
    ];
    for (m, paper_r, paper_rate, ours, bits) in rows {
        let params = CodeParams::new(m, 2).unwrap();
        let errors = superset_l2(&params).unwrap();
        let (r, table) = find_r_relaxed(&errors, &params);
        let strict = find_r_strict(&errors, &params);
        assert_eq!(r, big(ours), "m={m}: documented relaxed R");
        assert!(r <= strict, "m={m}: relaxed exceeds strict");
        assert!(!relaxed_feasible(&errors, &params, &(&r - 1u32)), "m={m}: minimality");
        assert_eq!(table.msg_bits(), bits, "m={m}: message width");
        let rate = table.msg_bits() as f64 / (m + 3) as f64;
        let truncated = format!("{:.4}", (rate * 10000.0).floor() / 10000.0);
        assert_eq!(truncated, paper_rate, "m={m}: rate");
        println!(
            "ACCEPTANCE 5 [fallback] m={m}: R={r} (paper {paper_r}, strict {strict}), rate {truncated} matches Table II"
        );
    }
    println!("ACCEPTANCE 5: PASS - degraded criterion (R <= strict, rates == Table II); R column documented per m");
}

#[test]
fn criterion_06_guaranteed_single_correction() {
    let mut lines = Vec::new();
    for ell in 1..=2usize {
        for m in 6..=13usize {
            let (params, table) = relaxed_table(m, ell);
            let report = run_single_exhaustive(&params, &table, 6).unwrap();
            assert_eq!(
                report.success_pre, 1.0,
                "exhaustive sweep failed at m={m} ell={ell}"
            );
            lines.push(format!("({m},{ell}): {} cases", report.trials));
        }
    }
    let (params, table) = relaxed_table(37, 2);
    let report = run_single_sampled(&params, &table, 100_000, 37).unwrap();
    assert_eq!(report.success_pre, 1.0, "Monte Carlo at (37,2)");
    println!(
        "ACCEPTANCE 6: PASS - single-substitution correction 1.0 exhaustively on {} sweeps and 10^5 trials at (37,2)",
        lines.len()
    );
}

#[test]
fn criterion_07_double_substitution_statistics() {
    // ell = 2: paper thresholds 98.25% / 99.1% minus the 1-point band
    for (m, trials) in [(23usize, 5000u64), (41, 5000), (55, 5000), (61, 4000)] {
        let (params, table) = relaxed_table(m, 2);
        let report = run_double_experiment(&params, &table, trials, 7).unwrap();
        assert!(
            report.p1_plus_p2 < 0.0015,
            "(m={m}) P1+P2 = {}",
            report.p1_plus_p2
        );
        assert!(
            report.success_pre >= 0.9725,
            "(m={m}) pre-pick {}",
            report.success_pre
        );
        assert!(
            report.success_post >= 0.981,
            "(m={m}) post-pick {}",
            report.success_post
        );
        println!(
            "ACCEPTANCE 7 (ell=2, m={m}): pre {:.4} post {:.4} p1p2 {:.5} bf {:.4}",
            report.success_pre,
            report.success_post,
            report.p1_plus_p2,
            report.bruteforce_pre.unwrap()
        );
    }
    // ell = 3: paper thresholds 99.4% / 99.7% minus the band
    for m in [17usize, 23] {
        let (params, table) = relaxed_table(m, 3);
        let report = run_double_experiment(&params, &table, 10_000, 7).unwrap();
        assert!(report.p1_plus_p2 < 0.0015, "(m={m}) P1+P2");
        assert!(
            report.success_pre >= 0.984,
            "(m={m}, ell=3) pre-pick {}",
            report.success_pre
        );
        assert!(
            report.success_post >= 0.987,
            "(m={m}, ell=3) post-pick {}",
            report.success_post
        );
        println!(
            "ACCEPTANCE 7 (ell=3, m={m}): pre {:.4} post {:.4} p1p2 {:.5}",
            report.success_pre, report.success_post, report.p1_plus_p2
        );
    }
    println!("ACCEPTANCE 7: PASS - double-substitution statistics within the acceptance bands");
}

#[test]
fn criterion_08_storage_accounting() {
    let params = CodeParams::new(37, 2).unwrap();
    let r = big(49981);
    // the paper's accounting at its nominal entry count: 20*35*(6+16) bits
    assert_eq!(nominal_entry_count(37, 2).unwrap(), 700);
    assert_eq!(table_bits(700, 37, &r), 15400);
    let nominal = storage_bits_nominal(37, 2, &r, &params).unwrap();
    assert_eq!(nominal.table_bits, 15400);
    assert!((nominal.table_kb() - 1.925).abs() < 1e-12);
    let total = nominal.total_kb();
    assert!(
        (total - 2.17).abs() / 2.17 < 0.05,
        "total {total:.4} kB vs 2.17 kB"
    );
    // the actual adopted table for comparison
    let errors = superset_l2(&params).unwrap();
    let (_, table) = find_r_relaxed(&errors, &params);
    let actual = storage_bits(&table, &params);
    println!(
        "ACCEPTANCE 8: PASS - paper accounting 15400 bits (1.925 kB), total {:.4} kB; actual table: {} entries, {:.4} kB total",
        total,
        table.entries().len(),
        actual.total_kb()
    );
}

/// Contingent on criterion 5 exact mode, which fell back: the paper's
/// quadratic (35.43, 110.42, -2898.53)/0.0945 describes its unreproducible R
/// data, so this reports the fit of the computed R(m,2) without asserting the
/// paper's coefficients.
#[test]
fn criterion_09_quadratic_fit_report() {
    let ms: Vec<usize> = (5..=61).step_by(2).collect();
    let rows = rates_table(2, &ms, false).unwrap();
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|row| {
            let r: f64 = row.r.to_string().parse().unwrap();
            (row.m as f64, r)
        })
        .collect();
    let fit = fit_quadratic(&points).unwrap();
    assert!(fit.a2 > 0.0, "R(m) grows quadratically");
    assert!(fit.nrmse.is_finite() && fit.nrmse >= 0.0);
    println!(
        "ACCEPTANCE 9: REPORT-ONLY (criterion 5 fell back) - fit of computed R(m,2): {:.2} m^2 + {:.2} m + {:.2}, nrmse {:.4} over odd m in [5,61]",
        fit.a2, fit.a1, fit.a0, fit.nrmse
    );
}

#[test]
fn criterion_10_constraint_compliance() {
    // exhaustive boundary enumeration: an ell-run before the bridge and an
    // ell-run of the next first symbol after it never produce a long run
    for ell in 1..=3usize {
        for l1 in ALPHABET {
            for filler in ALPHABET {
                if filler == l1 {
                    continue;
                }
                for next in ALPHABET {
                    for complemented in [false, true] {
                        let mut syms = vec![l1; ell];
                        syms.push(filler);
                        let dc = Word::from_position_symbols(syms).unwrap();
                        let bridge = make_bridge(&dc, complemented, next, ell);
                        let mut window = vec![l1; ell];
                        window.extend_from_slice(&bridge);
                        window.extend(std::iter::repeat_n(next, ell));
                        let mut run = 1;
                        for i in 1..window.len() {
                            if window[i] == window[i - 1] {
                                run += 1;
                                assert!(
                                    run <= ell,
                                    "ell={ell} l1={l1} next={next} window={window:?}"
                                );
                            } else {
                                run = 1;
                            }
                        }
                    }
                }
            }
        }
    }

    // fuzzed strands: run-free everywhere, bounded running disparity, and
    // GC-content within [0.4, 0.6] for K = 5 at odd m
    let (params, table) = relaxed_table(7, 2);
    let violations: usize = (0..10_000u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(t);
            let strand = random_strand(5, &params, &table, &mut rng).unwrap();
            let mut run = 1usize;
            for i in 1..strand.len() {
                if strand[i] == strand[i - 1] {
                    run += 1;
                    if run > 2 {
                        return 1;
                    }
                } else {
                    run = 1;
                }
            }
            let gc = gc_content(&strand);
            if !(0.4..=0.6).contains(&gc) {
                return 1;
            }
            if max_running_disparity(&strand, params.m() + 3) > params.m() as i64 + 1 {
                return 1;
            }
            0
        })
        .sum();
    assert_eq!(violations, 0);
    println!("ACCEPTANCE 10: PASS - zero constraint violations (exhaustive boundaries + 10^4 fuzzed strands)");
}

#[test]
fn criterion_11_property_suites() {
    // Lemma 1 identity on 10^5 random (N1 divisible by R, N2) pairs
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..100_000 {
        let r = big(rng.gen_range(2u64..1_000_000));
        let n1 = big(rng.gen_range(0u64..1_000_000)) * &r;
        let n2 = big(rng.gen::<u64>());
        let lhs = phi(&BigInt::from(n2.clone()), &r).unwrap();
        let rhs = if n2 >= n1 {
            phi(&BigInt::from(&n2 - &n1), &r).unwrap()
        } else {
            let d = phi(&BigInt::from(&n1 - &n2), &r).unwrap();
            if d.is_zero() {
                BigUint::zero()
            } else {
                &r - &d
            }
        };
        assert_eq!(lhs, rhs);
    }

    // complement index identity, exhaustive small
    for (m, ell) in [(8, 1), (8, 2), (8, 3)] {
        let params = CodeParams::new(m, ell).unwrap();
        let nm1 = params.n_minus_1();
        for c in enumerate_codebook(m, ell) {
            assert_eq!(
                formal_index(&c, &params) + formal_index(&c.complement(), &params),
                nm1
            );
        }
    }

    // Remark 8 monotonicity, exhaustive at m <= 9
    for ell in 1..=3usize {
        for m in ell.max(2)..=9 {
            let params = CodeParams::new(m, ell).unwrap();
            enumerate_codebook(m, ell).par_iter().for_each(|c| {
                let g_c = formal_index(c, &params);
                for pos in 0..m {
                    for s in ALPHABET {
                        if s <= c.sym(pos) {
                            continue;
                        }
                        let mut v = c.clone();
                        v.set_sym(pos, s);
                        assert!(formal_index(&v, &params) >= g_c);
                    }
                }
            });
        }
    }

    // Eq (1) vs Eq (3)/(4) agreement is covered by the properties suite with
    // independent closed-form implementations; here spot-check the identity
    // the closed forms rely on: N(i+1) = 3 sum N(i-k+1)
    for ell in 1..=3usize {
        let params = CodeParams::new(20, ell).unwrap();
        for i in 1..=19usize {
            let mut acc = BigUint::zero();
            for k in 1..=ell {
                if i >= k {
                    acc += params.m_of(i - k);
                }
            }
            assert_eq!(*params.m_of(i), acc * 3u32);
        }
    }

    // serialization round trip decodes the same vectors
    let (params, table) = relaxed_table(9, 2);
    let text = table.serialize();
    let back = ResidueTable::deserialize(&text).unwrap();
    assert_eq!(table, back);
    let mut rng2 = ChaCha8Rng::seed_from_u64(7);
    for k in 0..50u64 {
        let idx = big(k) * table.r();
        if idx > params.n_minus_1() {
            break;
        }
        let d = unrank(&idx, &params).unwrap();
        let bridge = make_bridge(&d, false, Symbol::A, 2);
        let mut seg: Vec<Symbol> = d.iter_msb().collect();
        seg.extend_from_slice(&bridge);
        seg[3] = if seg[3] == Symbol::A { Symbol::T } else { Symbol::A };
        let a = decode_segment(&seg, &params, &table, &mut rng2).unwrap();
        let b = decode_segment(&seg, &params, &back, &mut rng2).unwrap();
        assert_eq!(a.index, b.index);
    }

    // deterministic reports under a fixed seed, independent of parallelism
    let (params8, table8) = relaxed_table(8, 2);
    let pool1 = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let a = pool1.install(|| run_double_experiment(&params8, &table8, 200, 5).unwrap());
    let b = run_double_experiment(&params8, &table8, 200, 5).unwrap();
    assert_eq!(a.success_pre, b.success_pre);
    assert_eq!(a.success_post, b.success_post);
    assert_eq!(a.p1_plus_p2, b.p1_plus_p2);
    assert_eq!(a.list_size_histogram, b.list_size_histogram);

    println!("ACCEPTANCE 11: PASS - Lemma 1, complement identity, monotonicity, recursion identity, serialization, determinism");
}

/// Supporting checks referenced by the criteria: message-width consistency
/// against the rate rows, and the locatability census.
#[test]
fn criterion_support_census_and_msg_bits() {
    // msg_bits consistency across the Table II lengths (msg_bits/(m+3) rows)
    for (m, bits) in [(17usize, 19usize), (37, 55), (61, 100)] {
        let params = CodeParams::new(m, 2).unwrap();
        let errors = superset_l2(&params).unwrap();
        let (r, table) = find_r_relaxed(&errors, &params);
        assert_eq!(msg_bits_for(&params, &r), bits);
        assert_eq!(table.msg_bits(), bits);
    }
    // locatability census: exactly 3 and 12 are multi-location for ell=2
    for m in (5..=61usize).step_by(2) {
        let params = CodeParams::new(m, 2).unwrap();
        let errors = superset_l2(&params).unwrap();
        let multi = errors.multi_location_values();
        assert_eq!(
            multi,
            vec![BigUint::from(3u32), BigUint::from(12u32)],
            "census at m={m}"
        );
    }
    // for ell = 1 only the value 3 is multi-location
    for m in [6usize, 21, 37] {
        let params = CodeParams::new(m, 1).unwrap();
        let errors = superset_l1(&params).unwrap();
        assert_eq!(errors.multi_location_values(), vec![BigUint::from(3u32)]);
    }
    // complement distinguishability: every EC codeword's complement carries
    // the reserved residue phi(N-1), which is nonzero
    let (params9, table9) = relaxed_table(9, 2);
    assert!(!table9.phi_n1().is_zero());
    for k in 0..40u64 {
        let idx = big(k) * table9.r();
        if idx > params9.n_minus_1() {
            break;
        }
        let d = unrank(&idx, &params9).unwrap();
        let g_comp = formal_index(&d.complement(), &params9);
        assert_eq!(&g_comp % table9.r(), *table9.phi_n1());
    }
    // strict feasibility sanity at the adopted R values (relaxed == strict here)
    let params = CodeParams::new(17, 2).unwrap();
    let errors = superset_l2(&params).unwrap();
    assert!(strict_feasible(&errors, &params, &big(7799)));
    println!("ACCEPTANCE support: PASS - msg_bits rows and censuses verified");
}

/// The guaranteed-correction grid of criterion 6 covers ell in {1,2}; the
/// ell = 3 decoding path gets the same exhaustive treatment here, through
/// both the adopted product superset and the exact window table.
#[test]
fn criterion_support_ell3_single_correction() {
    let params = CodeParams::new(9, 3).unwrap();
    let exact = window_diffs(&params).unwrap();
    let (_, table) = find_r_relaxed(&exact, &params);
    let report = run_single_exhaustive(&params, &table, 9).unwrap();
    assert_eq!(report.success_pre, 1.0, "window table at (9,3)");

    let (params10, table10) = relaxed_table(10, 3);
    let report = run_single_exhaustive(&params10, &table10, 10).unwrap();
    assert_eq!(report.success_pre, 1.0, "product superset table at (10,3)");
    println!("ACCEPTANCE support: PASS - exhaustive ell=3 single-substitution sweeps at m=9,10");
}
