//! Relational quantum numbers of base-4 and base-8 correlations.
//!
//! For a two-point correlation the counts `Ã, B̃, C̃, D̃` of `00, 11, 10, 01`
//! give `j = (C̃+D̃)/2`, `m = (C̃-D̃)/2`, `g = (Ã+B̃)/2` and `l = (Ã-B̃)/2`.
//!
//! Three-point correlations follow the column convention `(s1, s0, s2)`, with
//! `s0` the reference: the `10` relation reads columns one and two, `02`
//! reads columns two and three, and `12` reads the outer pair.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::seq::{self, correlate, count_symbols, BitSeq, CorrSeq, SymbolCounts};

/// Counts of `A=00`, `B=11`, `C=10`, `D=01`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Counts4 {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl Counts4 {
    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }
}

impl TryFrom<&SymbolCounts> for Counts4 {
    type Error = Error;

    fn try_from(counts: &SymbolCounts) -> Result<Self> {
        if counts.order() != 2 {
            return Err(Error::OrderMismatch(2, counts.order()));
        }
        Ok(Counts4 {
            a: counts.get(seq::A),
            b: counts.get(seq::B),
            c: counts.get(seq::C),
            d: counts.get(seq::D),
        })
    }
}

/// `(j, m, g, l)` of one two-point correlation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QN4 {
    j: HalfInt,
    m: HalfInt,
    g: HalfInt,
    l: HalfInt,
}

impl QN4 {
    /// Validates `-j <= m <= j`, `-g <= l <= g` and integrality of the implied counts.
    pub fn new(j: HalfInt, m: HalfInt, g: HalfInt, l: HalfInt) -> Result<QN4> {
        let check = |top: HalfInt, proj: HalfInt, top_name: &str, proj_name: &str| {
            if top.is_negative() {
                return Err(Error::InvalidQuantumNumber(format!(
                    "{top_name}={top} is negative"
                )));
            }
            if proj.abs() > top {
                return Err(Error::InvalidQuantumNumber(format!(
                    "{proj_name}={proj} lies outside [-{top_name}, {top_name}] with {top_name}={top}"
                )));
            }
            if !top.same_parity(proj) {
                return Err(Error::InvalidQuantumNumber(format!(
                    "{top_name}={top} and {proj_name}={proj} give non-integral counts"
                )));
            }
            Ok(())
        };
        check(j, m, "j", "m")?;
        check(g, l, "g", "l")?;
        Ok(QN4 { j, m, g, l })
    }

    pub fn from_counts(c: Counts4) -> QN4 {
        let (a, b, c, d) = (c.a as i64, c.b as i64, c.c as i64, c.d as i64);
        QN4 {
            j: HalfInt::from_doubled(c + d),
            m: HalfInt::from_doubled(c - d),
            g: HalfInt::from_doubled(a + b),
            l: HalfInt::from_doubled(a - b),
        }
    }

    /// Quantum numbers the sequence `left` sees when it looks at `right`.
    pub fn measure(left: &BitSeq, right: &BitSeq) -> Result<QN4> {
        let counts = count_symbols(&correlate(&[left, right])?);
        Ok(QN4::from_counts(Counts4::try_from(&counts)?))
    }

    pub fn counts(&self) -> Counts4 {
        let half = |x: HalfInt| (x.doubled() / 2) as u64;
        Counts4 {
            a: half(self.g + self.l),
            b: half(self.g - self.l),
            c: half(self.j + self.m),
            d: half(self.j - self.m),
        }
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn m(&self) -> HalfInt {
        self.m
    }

    pub fn g(&self) -> HalfInt {
        self.g
    }

    pub fn l(&self) -> HalfInt {
        self.l
    }

    /// Sequence length, `2j + 2g`.
    pub fn n(&self) -> usize {
        (self.j.doubled() + self.g.doubled()) as usize
    }

    /// The same relation read in the opposite direction: `C` and `D` swap, so `m` flips.
    pub fn reversed(&self) -> QN4 {
        QN4 {
            m: -self.m,
            ..*self
        }
    }
}

impl fmt::Display for QN4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(j={}, m={}, g={}, l={})",
            self.j, self.m, self.g, self.l
        )
    }
}

/// Counts of the eight base-8 symbols, indexed by the packed row (`0b110` is `110`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Counts8(pub [u64; 8]);

impl Counts8 {
    pub fn get(&self, symbol: u32) -> u64 {
        self.0[symbol as usize]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }
}

impl TryFrom<&SymbolCounts> for Counts8 {
    type Error = Error;

    fn try_from(counts: &SymbolCounts) -> Result<Self> {
        if counts.order() != 3 {
            return Err(Error::OrderMismatch(3, counts.order()));
        }
        let mut out = [0u64; 8];
        out.copy_from_slice(counts.as_slice());
        Ok(Counts8(out))
    }
}

/// The complete base-8 set `(n, j10, j02, m10, m02, j12, l12, k)`.
///
/// Fields are unconstrained; [`QN8::counts`] decides whether a combination is
/// realizable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QN8 {
    pub n: usize,
    pub j10: HalfInt,
    pub j02: HalfInt,
    pub m10: HalfInt,
    pub m02: HalfInt,
    pub j12: HalfInt,
    pub l12: HalfInt,
    pub k: i64,
}

impl QN8 {
    pub fn from_counts(c: Counts8) -> QN8 {
        let v = |s: u32| c.get(s) as i64;
        let (c000, c001, c010, c011) = (v(0b000), v(0b001), v(0b010), v(0b011));
        let (c100, c101, c110, c111) = (v(0b100), v(0b101), v(0b110), v(0b111));
        QN8 {
            n: c.total() as usize,
            j10: HalfInt::from_doubled(c100 + c101 + c011 + c010),
            j02: HalfInt::from_doubled(c110 + c101 + c001 + c010),
            m10: HalfInt::from_doubled(c100 + c101 - c011 - c010),
            m02: HalfInt::from_doubled(c110 + c010 - c001 - c101),
            j12: HalfInt::from_doubled(c100 + c110 + c011 + c001),
            l12: HalfInt::from_doubled(c000 + c010 - c111 - c101),
            k: c010,
        }
    }

    /// Base-8 counts, or `None` when any count would be negative or fractional.
    pub fn counts(&self) -> Option<Counts8> {
        let n = self.n as i64;
        let (j10, j02, j12) = (self.j10.doubled(), self.j02.doubled(), self.j12.doubled());
        let (m10, m02, l12) = (self.m10.doubled(), self.m02.doubled(), self.l12.doubled());
        let k = 2 * self.k;

        let mut doubled = [0i64; 8];
        doubled[0b010] = k;
        doubled[0b101] = j10 + j02 - j12 - k;
        doubled[0b100] = m10 - j02 + j12 + k;
        doubled[0b011] = j10 - m10 - k;
        doubled[0b110] = j02 + m02 - k;
        doubled[0b001] = j12 + k - m02 - j10;
        doubled[0b111] = n - l12 - j10 - j02 + k;
        doubled[0b000] = n - j12 + l12 - k;

        let mut out = [0u64; 8];
        for (slot, value) in out.iter_mut().zip(doubled) {
            if value < 0 || value % 2 != 0 {
                return None;
            }
            *slot = (value / 2) as u64;
        }
        Some(Counts8(out))
    }

    pub fn m12(&self) -> HalfInt {
        self.m10 + self.m02
    }

    fn half_n(&self) -> HalfInt {
        HalfInt::from_doubled(self.n as i64)
    }

    pub fn g10(&self) -> HalfInt {
        self.half_n() - self.j10
    }

    pub fn g02(&self) -> HalfInt {
        self.half_n() - self.j02
    }

    pub fn g12(&self) -> HalfInt {
        self.half_n() - self.j12
    }

    pub fn l10(&self) -> HalfInt {
        self.l12 - self.m02
    }

    pub fn l02(&self) -> HalfInt {
        self.l12 + self.m10
    }
}

impl fmt::Display for QN8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(n={}, j10={}, j02={}, m10={}, m02={}, j12={}, l12={}, k={})",
            self.n, self.j10, self.j02, self.m10, self.m02, self.j12, self.l12, self.k
        )
    }
}

/// The three two-point relations inside a three-point correlation `(s1, s0, s2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pairwise {
    pub q10: QN4,
    pub q02: QN4,
    pub q12: QN4,
}

impl Pairwise {
    pub fn of_correlation(c: &CorrSeq) -> Result<Pairwise> {
        if c.order() != 3 {
            return Err(Error::OrderMismatch(3, c.order()));
        }
        let measure = |cols: [usize; 2]| -> Result<QN4> {
            let counts = count_symbols(&c.project(&cols)?);
            Ok(QN4::from_counts(Counts4::try_from(&counts)?))
        };
        Ok(Pairwise {
            q10: measure([0, 1])?,
            q02: measure([1, 2])?,
            q12: measure([0, 2])?,
        })
    }

    /// Relations of `s1 ⊗ s0`, `s0 ⊗ s2` and `s1 ⊗ s2`.
    pub fn of_triple(s1: &BitSeq, s0: &BitSeq, s2: &BitSeq) -> Result<Pairwise> {
        Ok(Pairwise {
            q10: QN4::measure(s1, s0)?,
            q02: QN4::measure(s0, s2)?,
            q12: QN4::measure(s1, s2)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(doubled: i64) -> HalfInt {
        HalfInt::from_doubled(doubled)
    }

    fn counts8(entries: &[(&str, u64)]) -> Counts8 {
        let mut out = [0u64; 8];
        for (sym, c) in entries {
            out[u32::from_str_radix(sym, 2).unwrap() as usize] = *c;
        }
        Counts8(out)
    }

    #[test]
    fn qn4_from_counts_examples() {
        let q = QN4::from_counts(Counts4 {
            a: 2,
            b: 1,
            c: 2,
            d: 1,
        });
        assert_eq!((q.j(), q.m(), q.g(), q.l()), (h(3), h(1), h(3), h(1)));

        let q = QN4::from_counts(Counts4 {
            a: 7,
            b: 0,
            c: 0,
            d: 0,
        });
        assert_eq!((q.j(), q.m(), q.g(), q.l()), (h(0), h(0), h(7), h(7)));

        let q = QN4::from_counts(Counts4 {
            a: 0,
            b: 0,
            c: 4,
            d: 0,
        });
        assert_eq!((q.j(), q.m(), q.g(), q.l()), (h(4), h(4), h(0), h(0)));
    }

    #[test]
    fn counts4_from_qn4_examples() {
        let q = QN4::new(h(3), h(1), h(3), h(1)).unwrap();
        assert_eq!(
            q.counts(),
            Counts4 {
                a: 2,
                b: 1,
                c: 2,
                d: 1
            }
        );
        assert_eq!(q.n(), 6);

        let q = QN4::new(h(0), h(0), h(2), h(-2)).unwrap();
        assert_eq!(
            q.counts(),
            Counts4 {
                a: 0,
                b: 2,
                c: 0,
                d: 0
            }
        );

        assert!(matches!(
            QN4::new(h(1), h(2), h(2), h(0)),
            Err(Error::InvalidQuantumNumber(_))
        ));
        assert!(QN4::new(h(2), h(1), h(2), h(0)).is_err());
        assert!(QN4::new(h(-2), h(0), h(2), h(0)).is_err());
    }

    #[test]
    fn reversal_flips_only_m() {
        let a: BitSeq = "100101".parse().unwrap();
        let b: BitSeq = "001100".parse().unwrap();
        let ab = QN4::measure(&a, &b).unwrap();
        let ba = QN4::measure(&b, &a).unwrap();
        assert_eq!(ab.reversed(), ba);
        assert_eq!(ab.j(), ba.j());
        assert_eq!(ab.m(), -ba.m());
    }

    #[test]
    fn qn8_from_counts_examples() {
        let q = QN8::from_counts(counts8(&[("110", 1), ("111", 1), ("100", 1), ("011", 1)]));
        assert_eq!((q.n, q.j10, q.j02, q.j12), (4, h(2), h(1), h(3)));

        let q = QN8::from_counts(counts8(&[("010", 1), ("111", 2), ("100", 1)]));
        assert_eq!((q.n, q.j10, q.j02, q.j12), (4, h(2), h(1), h(1)));

        let q = QN8::from_counts(counts8(&[("000", 5)]));
        assert_eq!(
            (q.j10, q.j02, q.m10, q.m02, q.j12, q.k),
            (h(0), h(0), h(0), h(0), h(0), 0)
        );
        assert_eq!(q.l12, h(5));
        assert_eq!(q.m12(), HalfInt::ZERO);
    }

    #[test]
    fn counts8_from_qn8_examples() {
        let q = QN8 {
            n: 6,
            j10: h(2),
            j02: h(2),
            m10: h(0),
            m02: h(0),
            j12: h(2),
            l12: h(0),
            k: 0,
        };
        let expected = counts8(&[("101", 1), ("011", 1), ("110", 1), ("111", 1), ("000", 2)]);
        assert_eq!(q.counts(), Some(expected));

        let q = QN8 {
            m10: h(2),
            m02: h(-2),
            l12: h(2),
            ..q
        };
        let expected = counts8(&[("101", 1), ("100", 1), ("001", 1), ("000", 3)]);
        assert_eq!(q.counts(), Some(expected));

        // k beyond j10 - m10 drives the 011 count negative
        let q = QN8 { k: 2, ..q };
        assert_eq!(q.counts(), None);
    }

    #[test]
    fn derived_accessors_match_pairwise_relations() {
        let c: CorrSeq = "110,111,100,011,000,101".parse().unwrap();
        let q = QN8::from_counts(Counts8::try_from(&count_symbols(&c)).unwrap());
        let p = Pairwise::of_correlation(&c).unwrap();
        assert_eq!(q.g10(), p.q10.g());
        assert_eq!(q.g02(), p.q02.g());
        assert_eq!(q.g12(), p.q12.g());
        assert_eq!(q.l10(), p.q10.l());
        assert_eq!(q.l02(), p.q02.l());
        assert_eq!(q.l12, p.q12.l());
        assert_eq!(q.m12(), p.q12.m());
    }
}
