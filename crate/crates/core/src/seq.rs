//! Base-2 sequences, the correlation operator and XOR maps.
//!
//! A [`CorrSeq`] of order `d` is an `n x d` binary matrix read row by row.
//! Each row is packed into a `u32` with the first column in the most
//! significant position, so the row `110` of an order-3 correlation is `0b110`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Widest correlation supported by the packed row representation.
pub const MAX_ORDER: usize = 16;

/// Default ceiling on the number of items an exhaustive enumeration may yield.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

/// Environment variable consulted by [`Budget::from_env`].
pub const BUDGET_ENV: &str = "SPINSEQ_ENUM_BUDGET";

/// Aliases for the order-2 alphabet.
pub const A: u32 = 0b00;
pub const B: u32 = 0b11;
pub const C: u32 = 0b10;
pub const D: u32 = 0b01;

const BASE4_ALIASES: [char; 4] = ['A', 'D', 'C', 'B'];

/// A length-`n` sequence over `{0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitSeq {
    bits: Vec<bool>,
}

impl BitSeq {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::LengthMismatch {
                expected: 1,
                found: 0,
            });
        }
        Ok(BitSeq { bits })
    }

    /// Builds a sequence from 0/1 integers; any other value is rejected.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let bits = bits
            .iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::Parse(format!("bit value {other} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        BitSeq::new(bits)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn zeros(&self) -> usize {
        self.len() - self.ones()
    }
}

impl fmt::Display for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitSeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("`{other}` is not a binary symbol"))),
            })
            .collect::<Result<Vec<_>>>()?;
        BitSeq::new(bits)
    }
}

/// A correlation of `order` base-2 sequences: a sequence over the `2^order` alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CorrSeq {
    order: usize,
    symbols: Vec<u32>,
}

impl CorrSeq {
    /// Wraps packed rows. Every row must fit in `order` bits.
    pub fn from_symbols(order: usize, symbols: Vec<u32>) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::UnsupportedOrder(order));
        }
        if symbols.is_empty() {
            return Err(Error::LengthMismatch {
                expected: 1,
                found: 0,
            });
        }
        if let Some(bad) = symbols.iter().find(|&&s| s >> order != 0) {
            return Err(Error::Parse(format!(
                "symbol {bad:#b} does not fit an order-{order} alphabet"
            )));
        }
        Ok(CorrSeq { order, symbols })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        1 << self.order
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    /// Bit of column `col` (0-based, left to right) in row `row`.
    pub fn bit(&self, row: usize, col: usize) -> bool {
        debug_assert!(col < self.order);
        (self.symbols[row] >> (self.order - 1 - col)) & 1 == 1
    }

    /// The `col`-th underlying base-2 sequence.
    pub fn column(&self, col: usize) -> BitSeq {
        assert!(
            col < self.order,
            "column {col} out of range for order {}",
            self.order
        );
        BitSeq {
            bits: (0..self.len()).map(|row| self.bit(row, col)).collect(),
        }
    }

    /// Re-correlates the selected columns, in the order given.
    pub fn project(&self, cols: &[usize]) -> Result<CorrSeq> {
        if cols.is_empty() || cols.len() > MAX_ORDER {
            return Err(Error::UnsupportedOrder(cols.len()));
        }
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.order) {
            return Err(Error::UnsupportedOrder(bad + 1));
        }
        let symbols = (0..self.len())
            .map(|row| {
                cols.iter()
                    .fold(0u32, |acc, &c| (acc << 1) | self.bit(row, c) as u32)
            })
            .collect();
        Ok(CorrSeq {
            order: cols.len(),
            symbols,
        })
    }

    /// Rows rearranged so that row `i` of the result is row `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> CorrSeq {
        assert_eq!(perm.len(), self.len());
        CorrSeq {
            order: self.order,
            symbols: perm.iter().map(|&i| self.symbols[i]).collect(),
        }
    }

    /// The all-zero symbol sequence (the identity map) of the given shape.
    pub fn zeros(order: usize, len: usize) -> Result<CorrSeq> {
        CorrSeq::from_symbols(order, vec![0; len])
    }
}

impl fmt::Display for CorrSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order {
            1 => {
                for &s in &self.symbols {
                    write!(f, "{s}")?;
                }
                Ok(())
            }
            2 => {
                for &s in &self.symbols {
                    write!(f, "{}", BASE4_ALIASES[s as usize])?;
                }
                Ok(())
            }
            order => {
                for (i, &s) in self.symbols.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{s:0order$b}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for CorrSeq {
    type Err = Error;

    /// Accepts `"100101"` (order 1), `"CADBAC"` (order 2) and comma-separated
    /// tuples such as `"110,111,100,011"` (any order). A single tuple without a
    /// comma reads as an order-1 sequence.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains(',') {
            let rows: Vec<&str> = s.split(',').map(str::trim).collect();
            let order = rows[0].len();
            let symbols = rows
                .iter()
                .map(|row| {
                    if row.len() != order {
                        return Err(Error::OrderMismatch(order, row.len()));
                    }
                    if !row.chars().all(|c| c == '0' || c == '1') {
                        return Err(Error::Parse(format!("`{row}` is not a bit tuple")));
                    }
                    u32::from_str_radix(row, 2).map_err(|e| Error::Parse(format!("`{row}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return CorrSeq::from_symbols(order, symbols);
        }
        if !s.is_empty() && s.chars().all(|c| c == '0' || c == '1') {
            let symbols = s.chars().map(|c| (c == '1') as u32).collect();
            return CorrSeq::from_symbols(1, symbols);
        }
        let symbols = s
            .chars()
            .map(|c| match c {
                'A' => Ok(A),
                'B' => Ok(B),
                'C' => Ok(C),
                'D' => Ok(D),
                other => Err(Error::Parse(format!("`{other}` is not a base-4 alias"))),
            })
            .collect::<Result<Vec<_>>>()?;
        CorrSeq::from_symbols(2, symbols)
    }
}

/// Occurrence counts of every symbol of a `2^order` alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolCounts {
    order: usize,
    counts: Vec<u64>,
}

impl SymbolCounts {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, symbol: u32) -> u64 {
        self.counts.get(symbol as usize).copied().unwrap_or(0)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Column-wise juxtaposition of equal-length sequences, in input order.
pub fn correlate(seqs: &[&BitSeq]) -> Result<CorrSeq> {
    if seqs.len() < 2 {
        return Err(Error::TooFewSequences(seqs.len()));
    }
    if seqs.len() > MAX_ORDER {
        return Err(Error::UnsupportedOrder(seqs.len()));
    }
    let n = seqs[0].len();
    if let Some(bad) = seqs.iter().find(|s| s.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            found: bad.len(),
        });
    }
    let symbols = (0..n)
        .map(|row| {
            seqs.iter()
                .fold(0u32, |acc, s| (acc << 1) | s.bits[row] as u32)
        })
        .collect();
    Ok(CorrSeq {
        order: seqs.len(),
        symbols,
    })
}

pub fn count_symbols(seq: &CorrSeq) -> SymbolCounts {
    let mut counts = vec![0u64; seq.alphabet_size()];
    for &s in &seq.symbols {
        counts[s as usize] += 1;
    }
    SymbolCounts {
        order: seq.order,
        counts,
    }
}

/// Row-wise addition modulo two.
pub fn apply_map(initial: &CorrSeq, map: &CorrSeq) -> Result<CorrSeq> {
    if initial.order != map.order {
        return Err(Error::OrderMismatch(initial.order, map.order));
    }
    if initial.len() != map.len() {
        return Err(Error::LengthMismatch {
            expected: initial.len(),
            found: map.len(),
        });
    }
    let symbols = initial
        .symbols
        .iter()
        .zip(&map.symbols)
        .map(|(a, b)| a ^ b)
        .collect();
    Ok(CorrSeq {
        order: initial.order,
        symbols,
    })
}

/// Upper bound on the number of items an exhaustive enumeration may produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    /// Reads `SPINSEQ_ENUM_BUDGET`, falling back to the default when unset.
    pub fn from_env() -> Result<Budget> {
        match std::env::var(BUDGET_ENV) {
            Ok(value) => value
                .trim()
                .parse::<u64>()
                .map(Budget)
                .map_err(|e| Error::Parse(format!("{BUDGET_ENV}=`{value}`: {e}"))),
            Err(_) => Ok(Budget::default()),
        }
    }

    /// Checks that `2^exponent` items fit.
    pub fn check(self, exponent: u32) -> Result<u64> {
        let fits = exponent < 64 && (1u64 << exponent) <= self.0;
        if fits {
            Ok(1u64 << exponent)
        } else {
            Err(Error::BudgetExceeded {
                exponent,
                limit: self.0,
            })
        }
    }
}

/// Every order-`order`, length-`n` correlation in lexicographic order.
///
/// The `i`-th item spells `i` in base `2^order`, first row most significant.
#[derive(Clone, Debug)]
pub struct Enumeration {
    order: usize,
    len: usize,
    next: u64,
    end: u64,
}

pub fn enumerate(n: usize, order: usize, budget: Budget) -> Result<Enumeration> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::UnsupportedOrder(order));
    }
    if n == 0 {
        return Err(Error::LengthMismatch {
            expected: 1,
            found: 0,
        });
    }
    let exponent = u32::try_from(n * order).unwrap_or(u32::MAX);
    let total = budget.check(exponent)?;
    Ok(Enumeration {
        order,
        len: n,
        next: 0,
        end: total,
    })
}

impl Enumeration {
    pub fn total(&self) -> u64 {
        1u64 << (self.order * self.len)
    }

    /// Restricts the stream to the index window `[start, end)`.
    pub fn window(mut self, start: u64, end: u64) -> Enumeration {
        let total = self.total();
        self.next = start.min(total);
        self.end = end.min(total).max(self.next);
        self
    }

    /// Packed rows of the `index`-th sequence.
    pub fn symbols_at(order: usize, len: usize, index: u64) -> Vec<u32> {
        let mask = (1u64 << order) - 1;
        (0..len)
            .map(|row| ((index >> (order * (len - 1 - row))) & mask) as u32)
            .collect()
    }
}

impl Iterator for Enumeration {
    type Item = CorrSeq;

    fn next(&mut self) -> Option<CorrSeq> {
        if self.next >= self.end {
            return None;
        }
        let symbols = Enumeration::symbols_at(self.order, self.len, self.next);
        self.next += 1;
        Some(CorrSeq {
            order: self.order,
            symbols,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Enumeration {}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    fn bits(s: &str) -> BitSeq {
        s.parse().unwrap()
    }

    #[test]
    fn correlate_rewrites_in_base_four() {
        let c = correlate(&[&bits("100101"), &bits("001100")]).unwrap();
        assert_eq!(c.to_string(), "CADBAC");
        assert_eq!(c.order(), 2);
    }

    #[test]
    fn self_correlation_has_no_mismatches() {
        let s = bits("0110100111");
        let counts = count_symbols(&correlate(&[&s, &s]).unwrap());
        assert_eq!(counts.get(C), 0);
        assert_eq!(counts.get(D), 0);
        assert_eq!(counts.get(A) + counts.get(B), 10);
    }

    #[test]
    fn single_row() {
        let c = correlate(&[&bits("1"), &bits("0")]).unwrap();
        assert_eq!(c.to_string(), "C");
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn correlate_errors() {
        assert_eq!(
            correlate(&[&bits("10"), &bits("100")]),
            Err(Error::LengthMismatch {
                expected: 2,
                found: 3
            })
        );
        assert_eq!(correlate(&[&bits("10")]), Err(Error::TooFewSequences(1)));
    }

    #[test]
    fn counts() {
        let c: CorrSeq = "CADBAC".parse().unwrap();
        let k = count_symbols(&c);
        assert_eq!((k.get(A), k.get(B), k.get(C), k.get(D)), (2, 1, 2, 1));

        let k = count_symbols(&"AAAAA".parse().unwrap());
        assert_eq!((k.get(A), k.get(B), k.get(C), k.get(D)), (5, 0, 0, 0));

        let k = count_symbols(&"110,111,100,011".parse().unwrap());
        assert_eq!(k.as_slice(), &[0, 0, 0, 1, 1, 0, 1, 1]);
        assert_eq!(k.total(), 4);
    }

    #[test]
    fn map_example() {
        let x: CorrSeq = "AACBBA".parse().unwrap();
        let m: CorrSeq = "BACAAD".parse().unwrap();
        let y = apply_map(&x, &m).unwrap();
        assert_eq!(y.to_string(), "BAABBD");
        assert_eq!(apply_map(&y, &m).unwrap(), x);
        assert_eq!(apply_map(&x, &CorrSeq::zeros(2, 6).unwrap()).unwrap(), x);
        assert_eq!(apply_map(&x, &x).unwrap(), CorrSeq::zeros(2, 6).unwrap());
    }

    #[test]
    fn map_errors() {
        let x: CorrSeq = "AAC".parse().unwrap();
        assert_eq!(
            apply_map(&x, &"010".parse().unwrap()),
            Err(Error::OrderMismatch(2, 1))
        );
        assert!(matches!(
            apply_map(&x, &"AA".parse().unwrap()),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(enumerate(3, 1, Budget::default()).unwrap().count(), 8);
        assert_eq!(enumerate(1, 3, Budget::default()).unwrap().count(), 8);
        assert_eq!(enumerate(2, 2, Budget::default()).unwrap().count(), 16);
    }

    #[test]
    fn enumeration_is_lexicographic_and_distinct() {
        for (n, d) in [(3, 2), (4, 3), (12, 1), (2, 6)] {
            let all: Vec<CorrSeq> = enumerate(n, d, Budget::default()).unwrap().collect();
            assert_eq!(all.len(), 1 << (n * d));
            assert!(all.windows(2).all(|w| w[0].symbols() < w[1].symbols()));
            let unique: HashSet<_> = all.iter().collect();
            assert_eq!(unique.len(), all.len());
        }
    }

    #[test]
    fn enumeration_budget() {
        let err = enumerate(9, 3, Budget::default()).unwrap_err();
        assert_eq!(
            err,
            Error::BudgetExceeded {
                exponent: 27,
                limit: 1 << 24
            }
        );
        assert!(err.to_string().contains("16777216"));
        assert!(enumerate(3, 1, Budget(7)).is_err());
        assert!(enumerate(3, 1, Budget(8)).is_ok());
    }

    #[test]
    fn windows_partition_the_stream() {
        let full: Vec<_> = enumerate(3, 2, Budget::default()).unwrap().collect();
        let parts: Vec<_> = (0..4)
            .flat_map(|p| {
                enumerate(3, 2, Budget::default())
                    .unwrap()
                    .window(p * 16, (p + 1) * 16)
            })
            .collect();
        assert_eq!(full, parts);
    }

    #[test]
    fn text_round_trip() {
        for text in ["100101", "CADBAC", "110,111,100,011", "0110,1111"] {
            let c: CorrSeq = text.parse().unwrap();
            assert_eq!(c.to_string(), text);
        }
        assert!("ABX".parse::<CorrSeq>().is_err());
        assert!("110,11".parse::<CorrSeq>().is_err());
        assert!("".parse::<CorrSeq>().is_err());
    }

    #[test]
    fn projection_selects_columns() {
        let c: CorrSeq = "110,111,100,011".parse().unwrap();
        assert_eq!(c.project(&[0, 1]).unwrap().to_string(), "BBCD");
        assert_eq!(c.project(&[1, 2]).unwrap().to_string(), "CBAB");
        assert_eq!(c.project(&[0, 2]).unwrap().to_string(), "CBCD");
        assert_eq!(c.column(2).to_string(), "0101");
    }
}
