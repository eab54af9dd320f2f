//! Squared Clebsch-Gordan coefficients from the closed-form Racah sum, and the
//! comparison of path-counting probabilities against them.
//!
//! The coefficient is `sqrt(P · R) · Σ_z (-1)^z / D(z)` where neither the
//! prefactor `P` nor the radicand `R` depends on `z`. Its square
//! `P · R · (Σ_z (-1)^z / D(z))^2` is therefore rational and computed exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::pathcount::{FactorialTable, PathCounter, Priors};
use crate::selection::check_triangle;

fn validate(name: &str, j: HalfInt, m: HalfInt) -> Result<()> {
    if j.is_negative() {
        return Err(Error::InvalidQuantumNumber(format!(
            "{name}: j={j} is negative"
        )));
    }
    if m.abs() > j || !m.same_parity(j) {
        return Err(Error::InvalidQuantumNumber(format!(
            "{name}: m={m} is not a projection of j={j}"
        )));
    }
    Ok(())
}

/// `|<j1 j2 m1 m2 | j1 j2 J M>|^2`. Selection-rule violations give exactly zero.
pub fn cg_squared(
    j1: HalfInt,
    j2: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    total_j: HalfInt,
    total_m: HalfInt,
) -> Result<BigRational> {
    validate("(j1, m1)", j1, m1)?;
    validate("(j2, m2)", j2, m2)?;
    validate("(J, M)", total_j, total_m)?;
    if m1 + m2 != total_m || !check_triangle(j1, j2, total_j) {
        return Ok(BigRational::zero());
    }

    // every argument below is an integer once the triangle and parity checks pass
    let int = |x: HalfInt| x.doubled() / 2;
    let (a, b, c) = (j1, j2, total_j);
    let table = FactorialTable::up_to(int(a + b + c) as usize + 1);
    let fact = |x: i64| -> BigInt { table.get(x as usize).clone().into() };

    let prefactor = BigRational::new(
        BigInt::from(c.doubled() + 1)
            * fact(int(a + b - c))
            * fact(int(c + a - b))
            * fact(int(c + b - a)),
        fact(int(a + b + c) + 1),
    );
    let radicand = fact(int(a + m1))
        * fact(int(a - m1))
        * fact(int(b + m2))
        * fact(int(b - m2))
        * fact(int(c + total_m))
        * fact(int(c - total_m));

    let z_lo = 0.max(int(b - c - m1)).max(int(a + m2 - c));
    let z_hi = int(a + b - c).min(int(a - m1)).min(int(b + m2));
    let sum: BigRational = (z_lo..=z_hi)
        .map(|z| {
            let denom = fact(z)
                * fact(int(a + b - c) - z)
                * fact(int(a - m1) - z)
                * fact(int(b + m2) - z)
                * fact(int(c - b + m1) + z)
                * fact(int(c - a - m2) + z);
            let sign = if z % 2 == 0 { 1 } else { -1 };
            BigRational::new(BigInt::from(sign), denom)
        })
        .sum();

    Ok(prefactor * BigRational::from_integer(radicand) * &sum * &sum)
}

/// Path-counting probability next to the squared coefficient for one outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaRow {
    pub m10: HalfInt,
    pub m02: HalfInt,
    pub probability: BigRational,
    pub cg_squared: BigRational,
    pub delta: BigRational,
}

fn delta_with(counter: &PathCounter, priors: &Priors) -> Result<Vec<DeltaRow>> {
    let table = counter.probability_table(priors)?;
    table
        .rows
        .into_iter()
        .map(|row| {
            let cg2 = cg_squared(
                priors.j10(),
                priors.j02(),
                row.m10,
                row.m02,
                priors.j12(),
                priors.m12(),
            )?;
            Ok(DeltaRow {
                m10: row.m10,
                m02: row.m02,
                delta: (&row.probability - &cg2).abs(),
                probability: row.probability,
                cg_squared: cg2,
            })
        })
        .collect()
}

/// `|P - CG^2|` for every allowed pair.
pub fn delta(priors: &Priors) -> Result<Vec<DeltaRow>> {
    delta_with(&PathCounter::for_priors(priors), priors)
}

/// One line of a convergence study.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScanRow {
    Value { n: usize, row: DeltaRow },
    Skipped { n: usize, reason: String },
}

impl ScanRow {
    pub fn n(&self) -> usize {
        match self {
            ScanRow::Value { n, .. } | ScanRow::Skipped { n, .. } => *n,
        }
    }
}

/// `|Δ|` for every allowed pair at each length in `lengths`, ascending in `n`.
///
/// Lengths that cannot host the couplings become [`ScanRow::Skipped`];
/// quantum numbers that are malformed regardless of `n` are an error.
pub fn convergence_scan(
    j1: HalfInt,
    j2: HalfInt,
    total_j: HalfInt,
    total_m: HalfInt,
    lengths: &[usize],
) -> Result<Vec<ScanRow>> {
    let mut lengths = lengths.to_vec();
    lengths.sort_unstable();
    lengths.dedup();

    // surface n-independent problems once, using a length that is always large enough
    let roomy = (j1 + j2).doubled().max(0) as usize;
    Priors::new(roomy, j1, j2, total_j, total_m)?;

    let counter = PathCounter::new(lengths.last().copied().unwrap_or(0));
    let per_n: Vec<Vec<ScanRow>> = lengths
        .par_iter()
        .map(|&n| match Priors::new(n, j1, j2, total_j, total_m) {
            Ok(priors) => Ok(delta_with(&counter, &priors)?
                .into_iter()
                .map(|row| ScanRow::Value { n, row })
                .collect()),
            Err(Error::Constraint(reason)) => Ok(vec![ScanRow::Skipped { n, reason }]),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    Ok(per_n.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(doubled: i64) -> HalfInt {
        HalfInt::from_doubled(doubled)
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn spin_one_pairs_to_spin_one() {
        assert_eq!(
            cg_squared(h(2), h(2), h(2), h(-2), h(2), h(0)).unwrap(),
            r(1, 2)
        );
        assert_eq!(
            cg_squared(h(2), h(2), h(0), h(0), h(2), h(0)).unwrap(),
            r(0, 1)
        );
        assert_eq!(
            cg_squared(h(2), h(2), h(-2), h(2), h(2), h(0)).unwrap(),
            r(1, 2)
        );
    }

    #[test]
    fn stretched_state() {
        for j1 in 0..6 {
            for j2 in 0..6 {
                let top = h(j1) + h(j2);
                assert_eq!(
                    cg_squared(h(j1), h(j2), h(j1), h(j2), top, top).unwrap(),
                    r(1, 1)
                );
            }
        }
    }

    #[test]
    fn two_halves_to_triplet() {
        assert_eq!(
            cg_squared(h(1), h(1), h(1), h(-1), h(2), h(0)).unwrap(),
            r(1, 2)
        );
        assert_eq!(
            cg_squared(h(1), h(1), h(1), h(-1), h(0), h(0)).unwrap(),
            r(1, 2)
        );
    }

    #[test]
    fn textbook_values() {
        // <1 1/2; 0 1/2 | 3/2 1/2>^2 = 2/3 and <1 1/2; 1 -1/2 | 3/2 1/2>^2 = 1/3
        assert_eq!(
            cg_squared(h(2), h(1), h(0), h(1), h(3), h(1)).unwrap(),
            r(2, 3)
        );
        assert_eq!(
            cg_squared(h(2), h(1), h(2), h(-1), h(3), h(1)).unwrap(),
            r(1, 3)
        );
        // <1 1; 1 -1 | 2 0>^2 = 1/6, <1 1; 0 0 | 2 0>^2 = 2/3
        assert_eq!(
            cg_squared(h(2), h(2), h(2), h(-2), h(4), h(0)).unwrap(),
            r(1, 6)
        );
        assert_eq!(
            cg_squared(h(2), h(2), h(0), h(0), h(4), h(0)).unwrap(),
            r(2, 3)
        );
        // <1 1; 0 0 | 0 0>^2 = 1/3
        assert_eq!(
            cg_squared(h(2), h(2), h(0), h(0), h(0), h(0)).unwrap(),
            r(1, 3)
        );
    }

    #[test]
    fn selection_violations_are_zero_and_malformed_input_errors() {
        assert!(cg_squared(h(2), h(2), h(2), h(0), h(2), h(0))
            .unwrap()
            .is_zero());
        assert!(cg_squared(h(2), h(2), h(0), h(0), h(6), h(0))
            .unwrap()
            .is_zero());
        assert!(cg_squared(h(2), h(2), h(1), h(0), h(2), h(0)).is_err());
        assert!(cg_squared(h(2), h(2), h(4), h(0), h(2), h(0)).is_err());
        assert!(cg_squared(h(-2), h(2), h(0), h(0), h(2), h(0)).is_err());
    }

    #[test]
    fn delta_at_the_worked_example() {
        let priors = Priors::new(6, h(2), h(2), h(2), h(0)).unwrap();
        let rows = delta(&priors).unwrap();
        let deltas: Vec<_> = rows.iter().map(|r| r.delta.clone()).collect();
        assert_eq!(deltas, vec![r(1, 34), r(1, 17), r(1, 34)]);
    }

    #[test]
    fn stretched_delta_vanishes() {
        let priors = Priors::new(4, h(2), h(2), h(4), h(4)).unwrap();
        let rows = delta(&priors).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].delta.is_zero());
    }

    #[test]
    fn scan_orders_and_skips() {
        let rows = convergence_scan(h(2), h(2), h(2), h(0), &[12, 3, 6]).unwrap();
        assert!(matches!(rows[0], ScanRow::Skipped { n: 3, .. }));
        let ns: Vec<_> = rows.iter().map(ScanRow::n).collect();
        assert_eq!(ns, vec![3, 6, 6, 6, 12, 12, 12]);
        assert!(convergence_scan(h(2), h(2), h(6), h(0), &[6]).is_err());
    }
}
