//! Code parameters and the scaled cardinality table.
//!
//! Cardinalities obey N(i) = 3 * sum_{k=1..ell} N(i-k) with the fractional
//! base case N(0) = 4/3. All arithmetic here uses M(i) = 3*N(i)/4 instead,
//! which makes every stored quantity an exact unbounded integer:
//! M(0) = 1 and M(i) = 3 * sum_{k=1..ell} M(i-k).

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Immutable (m, ell) parameters plus the M table and its prefix sums.
/// Shareable across threads; all operations on it are pure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeParams {
    m: usize,
    ell: usize,
    /// m_tab[i] = M(i) = 3*N(i)/4, for i in 0..=m+1.
    m_tab: Vec<BigUint>,
    /// prefix[i] = M(0) + ... + M(i).
    prefix: Vec<BigUint>,
}

impl CodeParams {
    /// Builds the table for code length `m` and maximum run-length `ell`.
    pub fn new(m: usize, ell: usize) -> Result<CodeParams> {
        if ell < 1 {
            return Err(Error::InvalidParams(format!("ell must be >= 1, got {ell}")));
        }
        if m < ell {
            return Err(Error::InvalidParams(format!(
                "m must be >= ell, got m={m}, ell={ell}"
            )));
        }
        // one entry past m: N(m+1)/4 terms appear in the index-error sets
        let top = m + 1;
        let mut m_tab = Vec::with_capacity(top + 1);
        m_tab.push(BigUint::one());
        for i in 1..=top {
            let mut acc = BigUint::zero();
            for k in 1..=ell {
                if i >= k {
                    acc += &m_tab[i - k];
                }
            }
            m_tab.push(acc * 3u32);
        }
        let mut prefix = Vec::with_capacity(top + 1);
        let mut acc = BigUint::zero();
        for v in &m_tab {
            acc += v;
            prefix.push(acc.clone());
        }
        Ok(CodeParams {
            m,
            ell,
            m_tab,
            prefix,
        })
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn ell(&self) -> usize {
        self.ell
    }

    /// M(i) = 3*N(i)/4. Zero for i < 0 by convention (callers clamp).
    #[inline]
    pub fn m_of(&self, i: usize) -> &BigUint {
        &self.m_tab[i]
    }

    pub fn m_table(&self) -> &[BigUint] {
        &self.m_tab
    }

    /// N(i) = 4*M(i)/3 for i >= 1.
    pub fn n_of(&self, i: usize) -> BigUint {
        assert!(i >= 1, "N(0) = 4/3 is never materialized");
        (&self.m_tab[i] * 4u32) / 3u32
    }

    /// Codebook size N(m).
    pub fn cardinality(&self) -> BigUint {
        self.n_of(self.m)
    }

    /// N(m) - 1, the largest index.
    pub fn n_minus_1(&self) -> BigUint {
        self.cardinality() - 1u32
    }

    /// Sum of M over positions lo..=hi (empty when hi < lo); lo is clamped at 0.
    /// This is the coefficient sum a depth-k symbol contributes at position i,
    /// with lo = i + k - ell and hi = i.
    #[inline]
    pub fn m_range_sum(&self, lo: isize, hi: usize) -> BigUint {
        if lo > hi as isize {
            return BigUint::zero();
        }
        if lo <= 0 {
            self.prefix[hi].clone()
        } else {
            &self.prefix[hi] - &self.prefix[lo as usize - 1]
        }
    }
}
