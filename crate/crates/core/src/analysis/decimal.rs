//! Decimal rendering of exact statistics.
//!
//! Statistics stay exact rationals internally; only at the output boundary
//! are they rendered to 6 decimal places, rounding half up. Ratios against
//! log2(q) go through certified dyadic bounds on the logarithm, refining
//! until both interval ends round to the same 6 digits, so the rendered
//! digits are correct without any floating point.

use num_bigint::BigUint;

use crate::nat::log2_interval;

const SCALE: u128 = 1_000_000;

/// num/den rounded half-up to 6 decimal places.
pub fn format_ratio_6dp(num: u128, den: u128) -> String {
    assert!(den != 0);
    let scaled = (num * SCALE * 2 + den) / (den * 2);
    format!("{}.{:06}", scaled / SCALE, scaled % SCALE)
}

fn round6_big(num: &BigUint, den: &BigUint) -> BigUint {
    ((num * BigUint::from(SCALE)) * 2u32 + den) / (den * 2u32)
}

fn render6_big(scaled: &BigUint) -> String {
    let scale = BigUint::from(SCALE);
    format!("{}.{:06}", scaled / &scale, (scaled % &scale))
}

/// (num/den) / log2(m) rounded half-up to 6 decimal places, for m >= 2.
pub fn format_ratio_over_log2_6dp(num: u128, den: u128, m: u64) -> String {
    assert!(den != 0 && m >= 2);
    if m.is_power_of_two() {
        return format_ratio_6dp(num, den * m.trailing_zeros() as u128);
    }
    let m = BigUint::from(m);
    let mut frac: u32 = 32;
    loop {
        let (lo, hi) = log2_interval(&m, frac);
        // value is in [num*2^frac / (den*hi), num*2^frac / (den*lo)]
        let scaled_num = BigUint::from(num) << frac;
        let den = BigUint::from(den);
        let low_end = round6_big(&scaled_num, &(&den * &hi));
        let high_end = round6_big(&scaled_num, &(&den * &lo));
        if low_end == high_end {
            return render6_big(&low_end);
        }
        frac = frac.saturating_mul(2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_ratio_rendering() {
        assert_eq!(format_ratio_6dp(0, 3), "0.000000");
        assert_eq!(format_ratio_6dp(2, 1), "2.000000");
        assert_eq!(format_ratio_6dp(1, 3), "0.333333");
        assert_eq!(format_ratio_6dp(2, 3), "0.666667");
        assert_eq!(format_ratio_6dp(1, 2), "0.500000");
        // Half-up at the boundary: 0.0000005 -> 0.000001.
        assert_eq!(format_ratio_6dp(1, 2_000_000), "0.000001");
    }

    #[test]
    fn log2_ratio_rendering() {
        // 2 / log2(2) = 2.
        assert_eq!(format_ratio_over_log2_6dp(2, 1, 2), "2.000000");
        // 1 / log2(8) = 1/3.
        assert_eq!(format_ratio_over_log2_6dp(1, 1, 8), "0.333333");
        // 3 / log2(3): log2(3) = 1.5849625007, ratio = 1.8927892607.
        assert_eq!(format_ratio_over_log2_6dp(3, 1, 3), "1.892789");
        // 1 / log2(10) = 0.3010299957.
        assert_eq!(format_ratio_over_log2_6dp(1, 1, 10), "0.301030");
    }
}
