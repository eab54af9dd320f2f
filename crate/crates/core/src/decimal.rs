//! Fixed-point rendering of exact rationals.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub const DEFAULT_DIGITS: usize = 6;

/// Renders `value` with exactly `digits` fractional digits, rounding half to even.
pub fn to_decimal(value: &BigRational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u32), digits);
    let scaled = value.abs() * BigRational::from_integer(scale.clone());
    let (quot, rem) = scaled.numer().div_rem(scaled.denom());
    let twice_rem: BigInt = rem * 2;
    let rounded = match twice_rem.cmp(scaled.denom()) {
        std::cmp::Ordering::Less => quot,
        std::cmp::Ordering::Greater => quot + 1,
        std::cmp::Ordering::Equal => {
            if quot.is_even() {
                quot
            } else {
                quot + 1
            }
        }
    };

    let (int_part, frac_part) = rounded.div_rem(&scale);
    let sign = if value.is_negative() && !rounded.is_zero() {
        "-"
    } else {
        ""
    };
    if digits == 0 {
        return format!("{sign}{int_part}");
    }
    let frac = frac_part.to_str_radix(10);
    debug_assert!(frac_part.sign() != Sign::Minus);
    format!("{sign}{int_part}.{frac:0>width$}", width = digits)
}
