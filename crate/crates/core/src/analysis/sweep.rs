//! Average-case statistics of L and T over the rationals p/q with
//! q < p < 2q, per denominator.
//!
//! Two populations are supported: all integers p in the open interval
//! (q, 2q), or only those coprime to q (the default at the CLI, since
//! coprime pairs are the distinct rationals). Aggregates are exact integer
//! sums; means and variances are exact rationals rendered at the CSV
//! boundary. Rows are computed in parallel and emitted ordered by q, so the
//! output is byte-identical whatever the worker count.

use num_integer::Integer;
use rayon::prelude::*;

use super::decimal::{format_ratio_6dp, format_ratio_over_log2_6dp};
use crate::clog::expand;
use crate::error::{Error, Result};

/// Full sweeps above this denominator are impractical; documented limit.
pub const SWEEP_Q_LIMIT: u64 = 1 << 20;

pub const SWEEP_CSV_HEADER: &str = "q,count,mean_L,var_L,max_L,mean_T,max_T,mean_L_over_log2q";

/// Exact aggregates for one denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub q: u64,
    /// Number of p in (q, 2q) that entered the row.
    pub count: u64,
    pub max_l: u64,
    pub max_t: u64,
    pub sum_l: u128,
    pub sum_l_sq: u128,
    pub sum_t: u128,
}

impl SweepRow {
    /// CSV row; statistic columns are empty when the population is empty
    /// (q = 1 has no p with 1 < p < 2). Variance is the population variance
    /// (n sum(L^2) - sum(L)^2) / n^2.
    pub fn csv_line(&self) -> String {
        if self.count == 0 {
            return format!("{},0,,,,,,", self.q);
        }
        let n = self.count as u128;
        let mean_l = format_ratio_6dp(self.sum_l, n);
        let var_l = format_ratio_6dp(n * self.sum_l_sq - self.sum_l * self.sum_l, n * n);
        let mean_t = format_ratio_6dp(self.sum_t, n);
        let ratio = format_ratio_over_log2_6dp(self.sum_l, n, self.q);
        format!(
            "{},{},{},{},{},{},{},{}",
            self.q, self.count, mean_l, var_l, self.max_l, mean_t, self.max_t, ratio
        )
    }
}

fn sweep_row(q: u64, coprime_only: bool) -> SweepRow {
    let mut row = SweepRow {
        q,
        count: 0,
        max_l: 0,
        max_t: 0,
        sum_l: 0,
        sum_l_sq: 0,
        sum_t: 0,
    };
    for p in (q + 1)..(2 * q) {
        if coprime_only && p.gcd(&q) != 1 {
            continue;
        }
        let e = expand(&p, &q, true).expect("q < p");
        let l = e.len() as u64;
        let t = e.term_sum();
        row.count += 1;
        row.sum_l += l as u128;
        row.sum_l_sq += (l as u128) * (l as u128);
        row.sum_t += t as u128;
        row.max_l = row.max_l.max(l);
        row.max_t = row.max_t.max(t);
    }
    row
}

/// One row per q in [q_min, q_max], ordered by q.
pub fn sweep_stats(q_min: u64, q_max: u64, coprime_only: bool) -> Result<Vec<SweepRow>> {
    if q_min < 1 {
        return Err(Error::InvalidParameter {
            name: "q-min",
            detail: "must be at least 1".into(),
        });
    }
    if q_min > q_max {
        return Err(Error::EmptyRange {
            detail: format!("q-min {q_min} exceeds q-max {q_max}"),
        });
    }
    if q_max > SWEEP_Q_LIMIT {
        return Err(Error::RangeTooLarge {
            detail: format!("q-max {q_max} exceeds the sweep limit {SWEEP_Q_LIMIT}"),
        });
    }
    Ok((q_min..=q_max)
        .into_par_iter()
        .map(|q| sweep_row(q, coprime_only))
        .collect())
}

/// Ceiling for batch sequence generation (and therefore for the kernel
/// explorer's index demand).
pub const SEQUENCE_LIMIT: u64 = 1 << 24;

/// L(1), L(2), ..., L(max) with denominator 1.
pub fn sequence_l(max: u64) -> Result<Vec<u64>> {
    if max < 1 {
        return Err(Error::InvalidParameter {
            name: "max",
            detail: "must be at least 1".into(),
        });
    }
    if max > SEQUENCE_LIMIT {
        return Err(Error::RangeTooLarge {
            detail: format!("max {max} exceeds the sequence limit {SEQUENCE_LIMIT}"),
        });
    }
    Ok((1..=max)
        .into_par_iter()
        .map(|n| expand(&n, &1u64, true).expect("n >= 1").len() as u64)
        .collect())
}
