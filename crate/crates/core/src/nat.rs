//! Unsigned scalars and the power-of-two utilities the expansion algorithm
//! is built from.
//!
//! Everything downstream is generic over [`Natural`], an exact unsigned
//! integer scalar. `BigUint` is the unbounded default; `u64`/`u128` are
//! drop-in replacements for exhaustive desk-scale runs where the caller can
//! bound every intermediate (the workspace builds with overflow checks on,
//! so a fixed-width scalar that runs out of headroom panics instead of
//! wrapping).
//!
//! All comparisons of p/(2^k q) against 1 and 2 are carried out as integer
//! comparisons of p against 2^k q and 2^(k+1) q; no floating point is used
//! anywhere in this crate.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};

/// Exact unsigned integer scalar.
///
/// Arithmetic comes from [`num_integer::Integer`] (by-value ops plus gcd and
/// parity); this trait adds the bit-level views the algorithm needs.
pub trait Natural: Integer + Clone + Send + Sync + fmt::Debug + fmt::Display {
    fn from_u64(v: u64) -> Self;

    /// Back-conversion; `None` when the value does not fit.
    fn to_u64(&self) -> Option<u64>;

    /// Widening conversion used by the exact bound comparators.
    fn to_big(&self) -> BigUint;

    /// Number of bits in the minimal binary representation; 0 for zero.
    fn bit_length(&self) -> u64;

    /// 2-adic valuation: largest e with 2^e dividing self; `None` for zero.
    fn trailing_zero_bits(&self) -> Option<u64>;

    /// self * 2^bits. Panics if the result does not fit the scalar.
    fn shift_left(&self, bits: u64) -> Self;

    /// floor(self / 2^bits).
    fn shift_right(&self, bits: u64) -> Self;
}

macro_rules! impl_natural_prim {
    ($t:ty, $bits:expr) => {
        impl Natural for $t {
            fn from_u64(v: u64) -> Self {
                v as $t
            }

            fn to_u64(&self) -> Option<u64> {
                u64::try_from(*self).ok()
            }

            fn to_big(&self) -> BigUint {
                BigUint::from(*self)
            }

            fn bit_length(&self) -> u64 {
                ($bits - self.leading_zeros()) as u64
            }

            fn trailing_zero_bits(&self) -> Option<u64> {
                if *self == 0 {
                    None
                } else {
                    Some(self.trailing_zeros() as u64)
                }
            }

            fn shift_left(&self, bits: u64) -> Self {
                if *self == 0 {
                    return 0;
                }
                assert!(
                    bits < $bits as u64 && self.leading_zeros() as u64 >= bits,
                    "shift_left overflows the fixed-width scalar"
                );
                self << bits
            }

            fn shift_right(&self, bits: u64) -> Self {
                if bits >= $bits as u64 {
                    0
                } else {
                    self >> bits
                }
            }
        }
    };
}

impl_natural_prim!(u64, 64u32);
impl_natural_prim!(u128, 128u32);

impl Natural for BigUint {
    fn from_u64(v: u64) -> Self {
        BigUint::from(v)
    }

    fn to_u64(&self) -> Option<u64> {
        u64::try_from(self).ok()
    }

    fn to_big(&self) -> BigUint {
        self.clone()
    }

    fn bit_length(&self) -> u64 {
        self.bits()
    }

    fn trailing_zero_bits(&self) -> Option<u64> {
        self.trailing_zeros()
    }

    fn shift_left(&self, bits: u64) -> Self {
        self << bits
    }

    fn shift_right(&self, bits: u64) -> Self {
        self >> bits
    }
}

/// An ordered pair (p, q) standing for the rational p/q.
///
/// Only q >= 1 is required; the pair is deliberately not kept in lowest
/// terms, since the expansion algorithm and its audits operate on unreduced
/// pairs. Normalization happens only through [`reduce_pow2`] or an explicit
/// gcd reduction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RationalPair<N> {
    pub p: N,
    pub q: N,
}

impl<N: Natural> RationalPair<N> {
    pub fn new(p: N, q: N) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(RationalPair { p, q })
    }

    /// Same pair with both entries divided by the largest common power of 2.
    pub fn reduced_pow2(&self) -> Self {
        let (p, q) = reduce_pow2(&self.p, &self.q).expect("q >= 1 by construction");
        RationalPair { p, q }
    }

    /// Lowest-terms form of the represented rational.
    pub fn reduced_full(&self) -> Self {
        let g = self.p.gcd(&self.q);
        RationalPair {
            p: self.p.clone() / g.clone(),
            q: self.q.clone() / g,
        }
    }
}

impl<N: fmt::Display> fmt::Display for RationalPair<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

fn check_proper<N: Natural>(p: &N, q: &N) -> Result<()> {
    if q.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    if p < q {
        return Err(Error::ImproperRatio {
            p: p.to_string(),
            q: q.to_string(),
        });
    }
    Ok(())
}

/// floor(log2(n)) for n >= 1.
pub fn floor_log2<N: Natural>(n: &N) -> Result<u64> {
    if n.is_zero() {
        return Err(Error::ZeroNumerator);
    }
    Ok(n.bit_length() - 1)
}

/// The unique k >= 0 with 2^k q <= p < 2^(k+1) q, for p >= q >= 1.
///
/// Computed from the bit lengths plus at most one comparison correction;
/// tests check the result against a repeated-doubling oracle.
pub fn floor_log2_ratio<N: Natural>(p: &N, q: &N) -> Result<u64> {
    check_proper(p, q)?;
    let d = p.bit_length() - q.bit_length();
    if q.shift_left(d) <= *p {
        Ok(d)
    } else {
        Ok(d - 1)
    }
}

/// Some(k) when p = 2^k q exactly, for p, q >= 1; None otherwise.
pub fn pow2_multiple_exponent<N: Natural>(p: &N, q: &N) -> Result<Option<u64>> {
    if q.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    if p.is_zero() {
        return Err(Error::ZeroNumerator);
    }
    if p < q {
        // 2^k q >= q > p for every k >= 0.
        return Ok(None);
    }
    let k = floor_log2_ratio(p, q)?;
    if q.shift_left(k) == *p {
        Ok(Some(k))
    } else {
        Ok(None)
    }
}

/// Divides out the largest common power of 2: (p, q) -> (p/2^v, q/2^v) with
/// v = min(v2(p), v2(q)). The represented rational is unchanged and at least
/// one entry of the result is odd.
pub fn reduce_pow2<N: Natural>(p: &N, q: &N) -> Result<(N, N)> {
    if q.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    if p.is_zero() {
        return Err(Error::ZeroNumerator);
    }
    let v = p
        .trailing_zero_bits()
        .expect("p >= 1")
        .min(q.trailing_zero_bits().expect("q >= 1"));
    Ok((p.shift_right(v), q.shift_right(v)))
}

/// Certified dyadic bounds on log2(m) for m >= 1:
/// lo/2^frac_bits <= log2(m) <= hi/2^frac_bits, with hi - lo <= 1.
///
/// The fractional bits come from the squaring recurrence on the mantissa,
/// tracked as an integer interval with directed rounding, so every emitted
/// bit is certified by an exact integer comparison. When the working
/// precision cannot separate a comparison the routine retries with more
/// guard bits; this terminates because log2(m) is irrational unless m is a
/// power of two, which is handled exactly up front.
pub fn log2_interval(m: &BigUint, frac_bits: u32) -> (BigUint, BigUint) {
    assert!(!num_traits::Zero::is_zero(m), "log2 of zero");
    let b = m.bits() - 1;
    if m.trailing_zeros() == Some(b) {
        // Exact power of two.
        let v: BigUint = BigUint::from(b) << frac_bits;
        return (v.clone(), v);
    }
    let mut guard: u32 = 16;
    loop {
        if let Some(frac) = log2_fraction(m, b, frac_bits, guard) {
            let base: BigUint = BigUint::from(b) << frac_bits;
            return (base.clone() + &frac, base + frac + 1u32);
        }
        guard = guard.saturating_mul(2);
    }
}

/// First `frac_bits` bits of the fractional part of log2(m), or None when
/// `guard` extra working bits are not enough to certify every bit decision.
fn log2_fraction(m: &BigUint, b: u64, frac_bits: u32, guard: u32) -> Option<BigUint> {
    let w = (frac_bits + guard) as u64;
    let two = BigUint::one() << (w + 1);
    let round_up: BigUint = (BigUint::one() << w) - 1u32;

    // Mantissa m / 2^b in [1, 2), as an interval scaled by 2^w.
    let shifted: BigUint = m << w;
    let lo_init: BigUint = &shifted >> b;
    let hi_init: BigUint = if (&lo_init << b) == shifted {
        lo_init.clone()
    } else {
        &lo_init + 1u32
    };

    let mut lo = lo_init;
    let mut hi = hi_init;
    let mut bits: BigUint = num_traits::Zero::zero();
    for _ in 0..frac_bits {
        lo = (&lo * &lo) >> w;
        hi = (&hi * &hi + &round_up) >> w;
        bits <<= 1;
        if lo >= two {
            bits += 1u32;
            lo >>= 1;
            hi = (hi + 1u32) >> 1;
        } else if hi < two {
            // bit stays 0
        } else {
            return None;
        }
    }
    Some(bits)
}
