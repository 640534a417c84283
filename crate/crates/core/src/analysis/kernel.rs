//! Kernel rank explorer for the sequence L(n).
//!
//! For base k and depth e, the kernel rows are the subsequences
//! n -> s(k^e m + r) for 0 <= r < k^e, truncated to m = 1..=M (starting at
//! m = 1 keeps every argument >= 1; the alternative m = 0 start changes the
//! rows but not whether their span is finitely generated). The report lists,
//! per depth, the exact rank over the rationals of all rows of that depth
//! and below. A profile that keeps growing is evidence against the span
//! being finitely generated; the explorer draws no conclusion, it reports
//! the ranks.
//!
//! Ranks come from fraction-free integer elimination, so they are exact.
//! Stabilization is the heuristic "rank unchanged at the last two depths"
//! and is labeled as such in the output.

use num_bigint::BigInt;

use super::sweep::sequence_l;
use crate::error::{Error, Result};
use crate::linalg::rank_fraction_free;

/// Ceiling on the largest sequence index the explorer may demand.
pub const KERNEL_INDEX_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelReport {
    pub base: u64,
    pub max_depth: u32,
    /// Row truncation length M (number of columns).
    pub truncation_length: u64,
    pub depths: Vec<u32>,
    /// Cumulative number of rows at each depth.
    pub row_counts: Vec<u64>,
    /// Exact rank of the stacked rows at each depth.
    pub ranks: Vec<u64>,
    /// Heuristic: rank unchanged between the last two depths.
    pub stabilized: bool,
}

impl KernelReport {
    /// Text table: one line per depth, then the stabilization verdict.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "base {} truncation {} row-index-start m=1\n",
            self.base, self.truncation_length
        ));
        out.push_str("depth rows rank\n");
        for i in 0..self.depths.len() {
            out.push_str(&format!(
                "{} {} {}\n",
                self.depths[i], self.row_counts[i], self.ranks[i]
            ));
        }
        out.push_str(&format!(
            "stabilized {} (heuristic: rank equal at the last two depths)\n",
            if self.stabilized { "yes" } else { "no" }
        ));
        out
    }
}

fn validate(base: u64, max_depth: u32, len: u64) -> Result<u64> {
    if base < 2 {
        return Err(Error::InvalidParameter {
            name: "kernel base",
            detail: format!("must be at least 2, got {base}"),
        });
    }
    if max_depth < 1 {
        return Err(Error::InvalidParameter {
            name: "kernel depth",
            detail: "must be at least 1".into(),
        });
    }
    if len < 16 {
        return Err(Error::InvalidParameter {
            name: "kernel truncation length",
            detail: format!("must be at least 16, got {len}"),
        });
    }
    let stride = base
        .checked_pow(max_depth)
        .ok_or_else(|| Error::RangeTooLarge {
            detail: format!("base {base} to depth {max_depth} overflows"),
        })?;
    let max_index = stride
        .checked_mul(len)
        .and_then(|v| v.checked_add(stride - 1))
        .ok_or_else(|| Error::RangeTooLarge {
            detail: "kernel index demand overflows".into(),
        })?;
    if max_index > KERNEL_INDEX_LIMIT {
        return Err(Error::RangeTooLarge {
            detail: format!(
                "kernel needs sequence values up to {max_index}, ceiling is {KERNEL_INDEX_LIMIT}"
            ),
        });
    }
    Ok(max_index)
}

/// Rank profile of the kernel of an arbitrary sequence; `seq` holds
/// s(1), s(2), ... so it must cover base^max_depth * len + base^max_depth - 1
/// values. Used directly by the machinery self-tests.
pub fn kernel_rank_profile_of(
    seq: &[u64],
    base: u64,
    max_depth: u32,
    len: u64,
) -> Result<KernelReport> {
    let max_index = validate(base, max_depth, len)?;
    if (seq.len() as u64) < max_index {
        return Err(Error::InvalidParameter {
            name: "sequence",
            detail: format!("need {max_index} values, got {}", seq.len()),
        });
    }
    let s = |n: u64| -> BigInt { BigInt::from(seq[(n - 1) as usize]) };

    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    let mut depths = Vec::new();
    let mut row_counts = Vec::new();
    let mut ranks = Vec::new();
    for e in 0..=max_depth {
        let stride = base.pow(e);
        for r in 0..stride {
            rows.push((1..=len).map(|m| s(stride * m + r)).collect());
        }
        depths.push(e);
        row_counts.push(rows.len() as u64);
        ranks.push(rank_fraction_free(rows.clone()) as u64);
    }
    debug_assert!(ranks.windows(2).all(|w| w[0] <= w[1]));
    let stabilized = ranks[ranks.len() - 1] == ranks[ranks.len() - 2];
    Ok(KernelReport {
        base,
        max_depth,
        truncation_length: len,
        depths,
        row_counts,
        ranks,
        stabilized,
    })
}

/// Rank profile of the kernel of (L(n)), computing the sequence first.
pub fn kernel_rank_profile(base: u64, max_depth: u32, len: u64) -> Result<KernelReport> {
    let max_index = validate(base, max_depth, len)?;
    let seq = sequence_l(max_index)?;
    kernel_rank_profile_of(&seq, base, max_depth, len)
}
