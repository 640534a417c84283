//! Classical continued fractions as a comparison baseline: Euclidean
//! expansion, its evaluator, and the length comparison table against L
//! and T.

use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;

use super::decimal::format_ratio_6dp;
use crate::clog::expand;
use crate::error::{Error, Result};
use crate::nat::{Natural, RationalPair};

/// Partial quotients [a0, a1, ..., an] of a rational >= 1: a0 >= 1, every
/// later quotient >= 1, and the final one >= 2 unless the expansion is a
/// single term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfExpansion<N> {
    terms: Vec<N>,
}

impl<N: Natural> CfExpansion<N> {
    pub fn terms(&self) -> &[N] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Serializes as `[13,1,2,2]`.
impl<N: fmt::Display> fmt::Display for CfExpansion<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "]")
    }
}

/// Euclidean partial quotients of p/q >= 1, in canonical form.
pub fn cf_expand<N: Natural>(p: &N, q: &N) -> Result<CfExpansion<N>> {
    if q.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    if p < q {
        return Err(Error::ImproperRatio {
            p: p.to_string(),
            q: q.to_string(),
        });
    }
    let mut a = p.clone();
    let mut b = q.clone();
    let mut terms = Vec::new();
    while !b.is_zero() {
        let (quot, rem) = a.div_rem(&b);
        terms.push(quot);
        a = b;
        b = rem;
    }
    // Euclid's final quotient is >= 2 whenever there are at least two terms.
    debug_assert!(terms.len() == 1 || *terms.last().expect("non-empty") >= N::from_u64(2));
    Ok(CfExpansion { terms })
}

/// Folds the partial quotients back to the rational they expand, in lowest
/// terms.
pub fn cf_evaluate<N: Natural>(e: &CfExpansion<N>) -> Result<RationalPair<N>> {
    let mut terms = e.terms.iter().rev();
    let first = terms.next().ok_or(Error::EmptyExpansion)?;
    let mut num = first.clone();
    let mut den = N::one();
    for a in terms {
        // a + 1/(num/den) = (a num + den) / num
        let next_num = a.clone() * num.clone() + den;
        den = num;
        num = next_num;
    }
    RationalPair::new(num, den)
}

pub const COMPARE_CSV_HEADER: &str = "p_bits,count,mean_cf_len,max_cf_len,mean_L,max_L,mean_T,max_T";

/// Aggregates for one dyadic band of numerators (all p of one bit length).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompareBand {
    pub p_bits: u32,
    pub count: u64,
    pub max_cf: u64,
    pub max_l: u64,
    pub max_t: u64,
    pub sum_cf: u128,
    pub sum_l: u128,
    pub sum_t: u128,
}

impl CompareBand {
    fn empty(p_bits: u32) -> Self {
        CompareBand {
            p_bits,
            count: 0,
            max_cf: 0,
            max_l: 0,
            max_t: 0,
            sum_cf: 0,
            sum_l: 0,
            sum_t: 0,
        }
    }

    fn absorb(&mut self, other: &CompareBand) {
        self.count += other.count;
        self.max_cf = self.max_cf.max(other.max_cf);
        self.max_l = self.max_l.max(other.max_l);
        self.max_t = self.max_t.max(other.max_t);
        self.sum_cf += other.sum_cf;
        self.sum_l += other.sum_l;
        self.sum_t += other.sum_t;
    }

    pub fn csv_line(&self) -> String {
        let n = self.count as u128;
        format!(
            "{},{},{},{},{},{},{},{}",
            self.p_bits,
            self.count,
            format_ratio_6dp(self.sum_cf, n),
            self.max_cf,
            format_ratio_6dp(self.sum_l, n),
            self.max_l,
            format_ratio_6dp(self.sum_t, n),
            self.max_t,
        )
    }
}

/// Tabulates continued fraction length against L and T over all pairs
/// 1 <= q <= p <= max, aggregated per bit length of p.
pub fn compare_cf(max: u64) -> Result<Vec<CompareBand>> {
    if max < 2 {
        return Err(Error::InvalidParameter {
            name: "cutoff",
            detail: "max must be at least 2".into(),
        });
    }
    if max > super::sweep::SWEEP_Q_LIMIT {
        return Err(Error::RangeTooLarge {
            detail: format!("max {max} exceeds the comparison limit"),
        });
    }
    let per_p: Vec<CompareBand> = (1..=max)
        .into_par_iter()
        .map(|p| {
            let mut band = CompareBand::empty(p.bit_length() as u32);
            for q in 1..=p {
                let cf = cf_expand(&p, &q).expect("p >= q >= 1").len() as u64;
                let e = expand(&p, &q, true).expect("p >= q >= 1");
                let l = e.len() as u64;
                let t = e.term_sum();
                band.count += 1;
                band.sum_cf += cf as u128;
                band.sum_l += l as u128;
                band.sum_t += t as u128;
                band.max_cf = band.max_cf.max(cf);
                band.max_l = band.max_l.max(l);
                band.max_t = band.max_t.max(t);
            }
            band
        })
        .collect();

    let top_bits = max.bit_length() as u32;
    let mut bands: Vec<CompareBand> = (1..=top_bits).map(CompareBand::empty).collect();
    for partial in &per_p {
        bands[(partial.p_bits - 1) as usize].absorb(partial);
    }
    Ok(bands)
}
