//! Exact path-counting probabilities for two coupled relations.
//!
//! Given priors `(n, j10, j02, j12, m12)`, each outcome `(m10, m02)` is weighted
//! by the interference-signed number of paths between two ensembles of base-8
//! sequences that agree on every local quantum number:
//!
//! ```text
//! Υ = F(n, j10, m10) · F(n, j02, m02) · Σ_{kA, kB, l12} (-1)^(kB - kA) Φ(l12, kA) Φ(l12, kB)
//! ```
//!
//! where `Φ` is the multinomial over the eight base-8 counts and
//! `F(n, j, m) = C̃! D̃! (n - C̃ - D̃)! / n!`. Normalizing `Υ` over the allowed
//! pairs gives the probability. Everything is exact.

use log::warn;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::qnum::QN8;
use crate::selection::{allowed_m_pairs, check_triangle};

/// Prior knowledge fixing a coupling experiment: sequence length, the three `j`s and `m12`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Priors {
    n: usize,
    j10: HalfInt,
    j02: HalfInt,
    j12: HalfInt,
    m12: HalfInt,
}

impl Priors {
    /// Malformed quantum numbers yield [`Error::InvalidQuantumNumber`]; a length
    /// or triangle violation yields [`Error::Constraint`].
    pub fn new(n: usize, j10: HalfInt, j02: HalfInt, j12: HalfInt, m12: HalfInt) -> Result<Priors> {
        for (name, j) in [("j10", j10), ("j02", j02), ("j12", j12)] {
            if j.is_negative() {
                return Err(Error::InvalidQuantumNumber(format!(
                    "{name}={j} is negative"
                )));
            }
        }
        if m12.abs() > j12 || !m12.same_parity(j12) {
            return Err(Error::InvalidQuantumNumber(format!(
                "m12={m12} is not a projection of j12={j12}"
            )));
        }
        if (n as i64) < (j10 + j02).doubled() {
            return Err(Error::Constraint(format!(
                "n={n} is smaller than 2j10+2j02={}",
                (j10 + j02).doubled()
            )));
        }
        if !check_triangle(j10, j02, j12) {
            return Err(Error::Constraint(format!(
                "triangle rule fails: |j10-j02| <= j12 <= j10+j02 with integral perimeter, \
                 got j10={j10} j02={j02} j12={j12}"
            )));
        }
        Ok(Priors {
            n,
            j10,
            j02,
            j12,
            m12,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j10(&self) -> HalfInt {
        self.j10
    }

    pub fn j02(&self) -> HalfInt {
        self.j02
    }

    pub fn j12(&self) -> HalfInt {
        self.j12
    }

    pub fn m12(&self) -> HalfInt {
        self.m12
    }

    pub fn allowed_pairs(&self) -> Vec<(HalfInt, HalfInt)> {
        allowed_m_pairs(self.j10, self.j02, self.m12)
    }

    /// Total overlap count `X = j10 + j02 - j12 = k + count(101)`.
    pub fn overlap(&self) -> i64 {
        (self.j10 + self.j02 - self.j12).doubled() / 2
    }

    fn qn8(&self, m10: HalfInt, m02: HalfInt, l12: HalfInt, k: i64) -> QN8 {
        QN8 {
            n: self.n,
            j10: self.j10,
            j02: self.j02,
            m10,
            m02,
            j12: self.j12,
            l12,
            k,
        }
    }
}

/// `0!, 1!, ..., n!` computed once.
#[derive(Clone, Debug)]
pub struct FactorialTable {
    values: Vec<BigUint>,
}

impl FactorialTable {
    pub fn up_to(n: usize) -> FactorialTable {
        let mut values = Vec::with_capacity(n + 1);
        values.push(BigUint::one());
        for i in 1..=n {
            let next = &values[i - 1] * BigUint::from(i);
            values.push(next);
        }
        FactorialTable { values }
    }

    pub fn max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, k: usize) -> &BigUint {
        &self.values[k]
    }

    /// `(Σ parts)! / Π parts!`
    pub fn multinomial(&self, parts: &[u64]) -> BigUint {
        let total: u64 = parts.iter().sum();
        let denom = parts
            .iter()
            .filter(|&&p| p > 1)
            .fold(BigUint::one(), |acc, &p| acc * self.get(p as usize));
        self.get(total as usize) / denom
    }
}

/// Number of base-8 sequences carrying the quantum numbers `q`; zero if none can.
pub fn phi(q: &QN8) -> BigUint {
    phi_with(&FactorialTable::up_to(q.n), q)
}

pub fn phi_with(table: &FactorialTable, q: &QN8) -> BigUint {
    match q.counts() {
        Some(counts) => table.multinomial(&counts.0),
        None => BigUint::zero(),
    }
}

fn counts_for(n: usize, j: HalfInt, m: HalfInt) -> Result<(u64, u64)> {
    if j.is_negative() || m.abs() > j || !m.same_parity(j) {
        return Err(Error::InvalidQuantumNumber(format!(
            "j={j}, m={m} do not give integral counts"
        )));
    }
    if j.doubled() > n as i64 {
        return Err(Error::InvalidQuantumNumber(format!(
            "2j={} exceeds n={n}",
            j.doubled()
        )));
    }
    Ok((
        ((j + m).doubled() / 2) as u64,
        ((j - m).doubled() / 2) as u64,
    ))
}

/// `C̃! D̃! (n - C̃ - D̃)! / n!` for the measured relation `(j, m)`.
pub fn f_factor(n: usize, j: HalfInt, m: HalfInt) -> Result<BigRational> {
    f_factor_with(&FactorialTable::up_to(n), n, j, m)
}

fn f_factor_with(table: &FactorialTable, n: usize, j: HalfInt, m: HalfInt) -> Result<BigRational> {
    let (c, d) = counts_for(n, j, m)?;
    let rest = n as u64 - c - d;
    let numer = table.get(c as usize) * table.get(d as usize) * table.get(rest as usize);
    Ok(BigRational::new(numer.into(), table.get(n).clone().into()))
}

/// Inclusive range of the non-local count `k`; empty when `lo > hi`.
pub fn k_bounds(
    j10: HalfInt,
    m10: HalfInt,
    j02: HalfInt,
    m02: HalfInt,
    j12: HalfInt,
) -> (i64, i64) {
    let half = |x: HalfInt| x.doubled().div_euclid(2);
    let overlap = half(j10 + j02 - j12);
    let (c10, d10) = (half(j10 + m10), half(j10 - m10));
    let (c02, d02) = (half(j02 + m02), half(j02 - m02));
    let lo = 0.max(overlap - c10.min(d02));
    let hi = overlap.min(c02.min(d10));
    (lo, hi)
}

/// Inclusive `l12` range shared by Alice's `k_a` and Bob's `k_b`; may be empty.
pub fn l12_bounds(priors: &Priors, k_a: i64, k_b: i64) -> (HalfInt, HalfInt) {
    let n = priors.n as i64;
    let j12 = priors.j12.doubled();
    let overlap = priors.overlap();
    let lo = -n + j12 + 2 * k_a.max(k_b);
    let hi = n - j12 - 2 * (overlap - k_a).max(overlap - k_b);
    (HalfInt::from_doubled(lo), HalfInt::from_doubled(hi))
}

/// One outcome of [`PathCounter::probability_table`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbabilityRow {
    pub m10: HalfInt,
    pub m02: HalfInt,
    pub upsilon: BigRational,
    pub probability: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbabilityTable {
    pub priors: Priors,
    pub rows: Vec<ProbabilityRow>,
}

impl ProbabilityTable {
    pub fn total(&self) -> BigRational {
        self.rows.iter().map(|r| &r.probability).sum()
    }

    /// Rows whose path weight came out negative.
    pub fn negative_upsilon(&self) -> Vec<&ProbabilityRow> {
        self.rows
            .iter()
            .filter(|r| r.upsilon.is_negative())
            .collect()
    }
}

/// Path-counting engine sharing one read-only factorial table across evaluations.
#[derive(Clone, Debug)]
pub struct PathCounter {
    factorials: FactorialTable,
}

impl PathCounter {
    pub fn new(max_n: usize) -> PathCounter {
        PathCounter {
            factorials: FactorialTable::up_to(max_n),
        }
    }

    pub fn for_priors(priors: &Priors) -> PathCounter {
        PathCounter::new(priors.n)
    }

    fn ensure(&self, n: usize) -> Result<()> {
        if n > self.factorials.max() {
            return Err(Error::Constraint(format!(
                "n={n} exceeds this engine's factorial table ({})",
                self.factorials.max()
            )));
        }
        Ok(())
    }

    pub fn factorials(&self) -> &FactorialTable {
        &self.factorials
    }

    pub fn phi(&self, q: &QN8) -> Result<BigUint> {
        self.ensure(q.n)?;
        Ok(phi_with(&self.factorials, q))
    }

    /// Signed path count before the `F` factors are applied.
    pub fn signed_paths(&self, priors: &Priors, m10: HalfInt, m02: HalfInt) -> Result<BigInt> {
        self.ensure(priors.n)?;
        if !priors.allowed_pairs().contains(&(m10, m02)) {
            return Err(Error::InvalidQuantumNumber(format!(
                "(m10, m02) = ({m10}, {m02}) is not an allowed pair for j10={}, j02={}, m12={}",
                priors.j10, priors.j02, priors.m12
            )));
        }
        let (k_lo, k_hi) = k_bounds(priors.j10, m10, priors.j02, m02, priors.j12);
        if k_lo > k_hi {
            return Ok(BigInt::zero());
        }

        // Φ(l12, k) along each k's own l12 window, indexed from the global lower end
        let overlap = priors.overlap();
        let n = priors.n as i64;
        let j12 = priors.j12.doubled();
        let l_floor = -n + j12 + 2 * k_lo;
        let columns: Vec<Vec<BigUint>> = (k_lo..=k_hi)
            .map(|k| {
                let lo = -n + j12 + 2 * k;
                let hi = n - j12 - 2 * (overlap - k);
                (l_floor..=hi.max(l_floor - 2))
                    .step_by(2)
                    .map(|l| {
                        if l < lo {
                            BigUint::zero()
                        } else {
                            let q = priors.qn8(m10, m02, HalfInt::from_doubled(l), k);
                            phi_with(&self.factorials, &q)
                        }
                    })
                    .collect()
            })
            .collect();

        let mut total = BigInt::zero();
        for k_a in k_lo..=k_hi {
            for k_b in k_lo..=k_hi {
                let (l_lo, l_hi) = l12_bounds(priors, k_a, k_b);
                let col_a = &columns[(k_a - k_lo) as usize];
                let col_b = &columns[(k_b - k_lo) as usize];
                let mut partial = BigUint::zero();
                for l in (l_lo.doubled()..=l_hi.doubled()).step_by(2) {
                    let idx = ((l - l_floor) / 2) as usize;
                    if let (Some(a), Some(b)) = (col_a.get(idx), col_b.get(idx)) {
                        partial += a * b;
                    }
                }
                if (k_b - k_a) % 2 == 0 {
                    total += BigInt::from(partial);
                } else {
                    total -= BigInt::from(partial);
                }
            }
        }
        Ok(total)
    }

    pub fn f_factor(&self, n: usize, j: HalfInt, m: HalfInt) -> Result<BigRational> {
        self.ensure(n)?;
        f_factor_with(&self.factorials, n, j, m)
    }

    /// `Υ(n, j10, j02, m10, m02, j12)`.
    pub fn upsilon(&self, priors: &Priors, m10: HalfInt, m02: HalfInt) -> Result<BigRational> {
        let paths = self.signed_paths(priors, m10, m02)?;
        let f_a = self.f_factor(priors.n, priors.j10, m10)?;
        let f_b = self.f_factor(priors.n, priors.j02, m02)?;
        Ok(BigRational::from_integer(paths) * f_a * f_b)
    }

    /// Normalized probability of every allowed `(m10, m02)`, in descending `m10`.
    pub fn probability_table(&self, priors: &Priors) -> Result<ProbabilityTable> {
        let pairs = priors.allowed_pairs();
        let weights = pairs
            .par_iter()
            .map(|&(m10, m02)| self.upsilon(priors, m10, m02))
            .collect::<Result<Vec<_>>>()?;

        for (&(m10, m02), w) in pairs.iter().zip(&weights) {
            if w.is_negative() {
                warn!("negative path weight {w} at (m10, m02) = ({m10}, {m02}) for {priors:?}");
            }
        }
        let norm: BigRational = weights.iter().sum();
        if norm.is_zero() {
            return Err(Error::DegeneratePriors(format!("{priors:?}")));
        }
        let rows = pairs
            .into_iter()
            .zip(weights)
            .map(|((m10, m02), upsilon)| ProbabilityRow {
                m10,
                m02,
                probability: &upsilon / &norm,
                upsilon,
            })
            .collect();
        Ok(ProbabilityTable {
            priors: *priors,
            rows,
        })
    }
}

/// Convenience wrapper building a fresh [`PathCounter`].
pub fn upsilon(priors: &Priors, m10: HalfInt, m02: HalfInt) -> Result<BigRational> {
    PathCounter::for_priors(priors).upsilon(priors, m10, m02)
}

/// Convenience wrapper building a fresh [`PathCounter`].
pub fn probability_table(priors: &Priors) -> Result<ProbabilityTable> {
    PathCounter::for_priors(priors).probability_table(priors)
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

    fn worked_priors() -> Priors {
        Priors::new(6, h(2), h(2), h(2), h(0)).unwrap()
    }

    #[test]
    fn priors_validation() {
        assert!(matches!(
            Priors::new(3, h(2), h(2), h(2), h(0)),
            Err(Error::Constraint(_))
        ));
        assert!(matches!(
            Priors::new(6, h(2), h(2), h(6), h(0)),
            Err(Error::Constraint(_))
        ));
        assert!(matches!(
            Priors::new(6, h(2), h(2), h(2), h(1)),
            Err(Error::InvalidQuantumNumber(_))
        ));
        assert!(matches!(
            Priors::new(6, h(2), h(2), h(2), h(4)),
            Err(Error::InvalidQuantumNumber(_))
        ));
        assert!(matches!(
            Priors::new(6, h(-2), h(2), h(2), h(0)),
            Err(Error::InvalidQuantumNumber(_))
        ));
    }

    #[test]
    fn phi_examples() {
        let base = QN8 {
            n: 6,
            j10: h(2),
            j02: h(2),
            m10: h(0),
            m02: h(0),
            j12: h(2),
            l12: h(-2),
            k: 0,
        };
        assert_eq!(phi(&base), BigUint::from(360u32));
        let stretched = QN8 {
            m10: h(2),
            m02: h(-2),
            l12: h(2),
            ..base
        };
        assert_eq!(phi(&stretched), BigUint::from(120u32));
        let single = QN8 {
            n: 5,
            j10: h(0),
            j02: h(0),
            m10: h(0),
            m02: h(0),
            j12: h(0),
            l12: h(5),
            k: 0,
        };
        assert_eq!(phi(&single), BigUint::one());
        assert_eq!(phi(&QN8 { k: 3, ..base }), BigUint::zero());
    }

    #[test]
    fn f_factor_examples() {
        assert_eq!(f_factor(6, h(2), h(2)).unwrap(), r(1, 15));
        assert_eq!(f_factor(6, h(2), h(0)).unwrap(), r(1, 30));
        for n in 0..9 {
            assert_eq!(f_factor(n, h(0), h(0)).unwrap(), r(1, 1));
        }
        assert!(f_factor(6, h(2), h(1)).is_err());
        assert!(f_factor(2, h(4), h(0)).is_err());
    }

    #[test]
    fn k_bounds_examples() {
        assert_eq!(k_bounds(h(2), h(0), h(2), h(0), h(2)), (0, 1));
        assert_eq!(k_bounds(h(2), h(2), h(2), h(-2), h(2)), (0, 0));
        assert_eq!(k_bounds(h(3), h(1), h(2), h(0), h(5)), (0, 0));
    }

    #[test]
    fn l12_bounds_examples() {
        let p = worked_priors();
        assert_eq!(l12_bounds(&p, 0, 0), (h(-4), h(2)));
        assert_eq!(l12_bounds(&p, 0, 1), (h(-2), h(2)));
        let stretched = Priors::new(4, h(2), h(2), h(4), h(0)).unwrap();
        assert_eq!(l12_bounds(&stretched, 0, 0), (h(0), h(0)));
    }

    #[test]
    fn worked_example_weights() {
        let p = worked_priors();
        let counter = PathCounter::for_priors(&p);
        assert_eq!(counter.upsilon(&p, h(2), h(-2)).unwrap(), r(1280, 1));
        assert_eq!(counter.upsilon(&p, h(0), h(0)).unwrap(), r(160, 1));
        assert_eq!(counter.upsilon(&p, h(-2), h(2)).unwrap(), r(1280, 1));
        assert!(counter.upsilon(&p, h(2), h(0)).is_err());
    }

    #[test]
    fn worked_example_probabilities() {
        let table = probability_table(&worked_priors()).unwrap();
        let got: Vec<_> = table
            .rows
            .iter()
            .map(|row| (row.m10, row.m02, row.probability.clone()))
            .collect();
        assert_eq!(
            got,
            vec![
                (h(2), h(-2), r(8, 17)),
                (h(0), h(0), r(1, 17)),
                (h(-2), h(2), r(8, 17)),
            ]
        );
        assert_eq!(table.total(), r(1, 1));
    }

    #[test]
    fn stretched_priors_are_certain() {
        for (j10, j02) in [(1, 1), (2, 2), (3, 1), (4, 0)] {
            let top = j10 + j02;
            let p = Priors::new(top as usize, h(j10), h(j02), h(top), h(top)).unwrap();
            let table = probability_table(&p).unwrap();
            assert_eq!(table.rows.len(), 1);
            assert_eq!(table.rows[0].probability, r(1, 1));
        }
    }

    #[test]
    fn n8_table_is_symmetric_and_normalized() {
        let p = Priors::new(8, h(2), h(2), h(2), h(0)).unwrap();
        let table = probability_table(&p).unwrap();
        assert_eq!(table.rows.len(), 3);
        assert_eq!(table.rows[0].probability, table.rows[2].probability);
        assert_eq!(table.total(), r(1, 1));
        assert_eq!(table.rows[1].probability, r(1, 25));
    }

    #[test]
    fn engine_rejects_lengths_beyond_its_table() {
        let counter = PathCounter::new(4);
        assert!(counter.upsilon(&worked_priors(), h(0), h(0)).is_err());
    }
}
