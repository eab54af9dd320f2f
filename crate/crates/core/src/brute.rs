//! Exhaustive enumeration oracles.
//!
//! Everything here measures quantum numbers directly from sequences by
//! projecting columns and counting symbols. Nothing goes through the base-8
//! count table, so agreement with [`crate::pathcount`] is a real cross-check.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::pathcount::{k_bounds, l12_bounds, FactorialTable, PathCounter, Priors};
use crate::qnum::{Pairwise, QN4, QN8};
use crate::selection::verify_triple;
use crate::seq::{apply_map, count_symbols, enumerate, BitSeq, Budget, CorrSeq, Enumeration};

/// Quantum numbers of a base-8 sequence, read off its three pairwise relations.
pub fn measure_qn8(c: &CorrSeq) -> Result<QN8> {
    let Pairwise { q10, q02, q12 } = Pairwise::of_correlation(c)?;
    Ok(QN8 {
        n: c.len(),
        j10: q10.j(),
        j02: q02.j(),
        m10: q10.m(),
        m02: q02.m(),
        j12: q12.j(),
        l12: q12.l(),
        k: count_symbols(c).get(0b010) as i64,
    })
}

fn half_count(x: HalfInt) -> Option<usize> {
    if x.is_negative() || !x.is_integer() {
        None
    } else {
        Some((x.doubled() / 2) as usize)
    }
}

/// Counts base-8 sequences whose measured quantum numbers equal `q`.
///
/// Rows are chosen one at a time; a prefix is abandoned as soon as its partial
/// `C10`, `D10`, `C02`, `D02`, `C12 + D12` or `k` overshoots or can no longer reach
/// the target. Every completed sequence is re-measured before it is counted.
pub fn phi_by_enumeration(q: &QN8, budget: Budget) -> Result<BigUint> {
    let exponent = u32::try_from(3 * q.n).unwrap_or(u32::MAX);
    budget.check(exponent)?;
    let targets = (|| {
        Some([
            half_count(q.j10 + q.m10)?,
            half_count(q.j10 - q.m10)?,
            half_count(q.j02 + q.m02)?,
            half_count(q.j02 - q.m02)?,
            half_count(q.j12 + q.j12)?,
            usize::try_from(q.k).ok()?,
        ])
    })();
    let Some(targets) = targets else {
        return Ok(BigUint::zero());
    };

    struct Search<'a> {
        q: &'a QN8,
        targets: [usize; 6],
        rows: Vec<u32>,
        found: u64,
    }

    fn tallies(row: u32) -> [usize; 6] {
        let (b1, b0, b2) = ((row >> 2) & 1, (row >> 1) & 1, row & 1);
        [
            (b1 == 1 && b0 == 0) as usize,
            (b1 == 0 && b0 == 1) as usize,
            (b0 == 1 && b2 == 0) as usize,
            (b0 == 0 && b2 == 1) as usize,
            (b1 != b2) as usize,
            (row == 0b010) as usize,
        ]
    }

    impl Search<'_> {
        fn run(&mut self, partial: [usize; 6]) -> Result<()> {
            let left = self.q.n - self.rows.len();
            for (p, t) in partial.iter().zip(&self.targets) {
                if p > t || p + left < *t {
                    return Ok(());
                }
            }
            if left == 0 {
                let c = CorrSeq::from_symbols(3, self.rows.clone())?;
                if measure_qn8(&c)? == *self.q {
                    self.found += 1;
                }
                return Ok(());
            }
            for row in 0..8u32 {
                let mut next = partial;
                for (slot, add) in next.iter_mut().zip(tallies(row)) {
                    *slot += add;
                }
                self.rows.push(row);
                self.run(next)?;
                self.rows.pop();
            }
            Ok(())
        }
    }

    if q.n == 0 {
        return Ok(BigUint::zero());
    }
    let mut search = Search {
        q,
        targets,
        rows: Vec::with_capacity(q.n),
        found: 0,
    };
    search.run([0; 6])?;
    Ok(BigUint::from(search.found))
}

/// Every base-8 sequence of length `n`, binned by its measured quantum numbers.
pub fn bin_by_measures(n: usize, budget: Budget) -> Result<HashMap<QN8, u64>> {
    let total = enumerate(n, 3, budget)?.total();
    let parts = rayon::current_num_threads().max(1) as u64 * 4;
    let chunk = total.div_ceil(parts);
    (0..parts)
        .into_par_iter()
        .map(|p| -> Result<HashMap<QN8, u64>> {
            let mut bins = HashMap::new();
            for c in enumerate(n, 3, budget)?.window(p * chunk, (p + 1) * chunk) {
                *bins.entry(measure_qn8(&c)?).or_insert(0) += 1;
            }
            Ok(bins)
        })
        .try_reduce(HashMap::new, |mut acc, bins| {
            for (q, count) in bins {
                *acc.entry(q).or_insert(0) += count;
            }
            Ok(acc)
        })
}

/// Every parity-consistent `(j10, j02, m10, m02, j12, l12, k)` at length `n`,
/// including points that no sequence realizes.
pub fn qn8_lattice(n: usize) -> impl Iterator<Item = QN8> {
    let top = n as i64;
    let js = move || (0..=top).map(HalfInt::from_doubled);
    js().flat_map(move |j10| {
        js().flat_map(move |j02| {
            js().flat_map(move |j12| {
                j10.descending_projections().flat_map(move |m10| {
                    j02.descending_projections().flat_map(move |m02| {
                        (-top..=top).flat_map(move |l12| {
                            (0..=top).map(move |k| QN8 {
                                n,
                                j10,
                                j02,
                                m10,
                                m02,
                                j12,
                                l12: HalfInt::from_doubled(l12),
                                k,
                            })
                        })
                    })
                })
            })
        })
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PhiMismatch {
    pub q: String,
    pub formula: String,
    pub enumerated: u64,
}

/// Outcome of comparing a `Φ` implementation with full enumeration at one length.
#[derive(Clone, Debug, Serialize)]
pub struct PhiGridReport {
    pub n: usize,
    pub sequences: u64,
    pub lattice_points: u64,
    pub occupied_points: u64,
    /// Sequences whose measured quantum numbers landed on the lattice.
    pub covered_sequences: u64,
    pub mismatches: Vec<PhiMismatch>,
}

impl PhiGridReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.covered_sequences == self.sequences
    }
}

/// Compares `phi` with enumeration on every lattice point at length `n`.
pub fn verify_phi_grid<F>(n: usize, budget: Budget, phi: F) -> Result<PhiGridReport>
where
    F: Fn(&QN8) -> BigUint + Sync,
{
    let bins = bin_by_measures(n, budget)?;
    Ok(compare_phi_grid(n, &bins, phi))
}

/// [`verify_phi_grid`] against sequences already binned by [`bin_by_measures`].
pub fn compare_phi_grid<F>(n: usize, bins: &HashMap<QN8, u64>, phi: F) -> PhiGridReport
where
    F: Fn(&QN8) -> BigUint + Sync,
{
    let sequences: u64 = bins.values().sum();
    let points: Vec<QN8> = qn8_lattice(n).collect();
    let (mismatches, covered, occupied) = points
        .par_iter()
        .map(|q| {
            let enumerated = bins.get(q).copied().unwrap_or(0);
            let formula = phi(q);
            let mismatch = (formula != BigUint::from(enumerated)).then(|| PhiMismatch {
                q: q.to_string(),
                formula: formula.to_string(),
                enumerated,
            });
            (mismatch, enumerated, (enumerated > 0) as u64)
        })
        .fold(
            || (Vec::new(), 0u64, 0u64),
            |(mut mm, cov, occ), (m, e, o)| {
                mm.extend(m);
                (mm, cov + e, occ + o)
            },
        )
        .reduce(
            || (Vec::new(), 0, 0),
            |(mut a, ca, oa), (b, cb, ob)| {
                a.extend(b);
                (a, ca + cb, oa + ob)
            },
        );
    PhiGridReport {
        n,
        sequences,
        lattice_points: points.len() as u64,
        occupied_points: occupied,
        covered_sequences: covered,
        mismatches,
    }
}

/// Checks that `k_bounds` and `l12_bounds` coincide with the enumerated support
/// of every prior set and outcome realizable at length `n`.
pub fn verify_bounds(n: usize, bins: &HashMap<QN8, u64>) -> Vec<String> {
    // (j10, j02, j12, m10, m02) -> k -> observed l12 values
    let mut support: BTreeMap<[i64; 5], BTreeMap<i64, Vec<i64>>> = BTreeMap::new();
    for q in bins.keys().filter(|q| q.n == n) {
        let key = [
            q.j10.doubled(),
            q.j02.doubled(),
            q.j12.doubled(),
            q.m10.doubled(),
            q.m02.doubled(),
        ];
        support
            .entry(key)
            .or_default()
            .entry(q.k)
            .or_default()
            .push(q.l12.doubled());
    }

    let mut problems = Vec::new();
    for ([j10, j02, j12, m10, m02], by_k) in support {
        let h = HalfInt::from_doubled;
        let m12 = h(m10 + m02);
        let priors = match Priors::new(n, h(j10), h(j02), h(j12), m12) {
            Ok(p) => p,
            // realizable but outside n >= 2(j10+j02): the summation bounds do not apply
            Err(Error::Constraint(_)) => continue,
            Err(e) => {
                problems.push(format!("measured quantum numbers rejected: {e}"));
                continue;
            }
        };
        let (k_lo, k_hi) = k_bounds(h(j10), h(m10), h(j02), h(m02), h(j12));
        let seen_lo = *by_k.keys().next().unwrap();
        let seen_hi = *by_k.keys().last().unwrap();
        if (k_lo, k_hi) != (seen_lo, seen_hi) || by_k.len() as i64 != k_hi - k_lo + 1 {
            problems.push(format!(
                "k bounds ({k_lo}, {k_hi}) vs observed {:?} for {priors:?}, m10={m10}/2",
                by_k.keys().collect::<Vec<_>>()
            ));
        }
        for (k, ls) in &by_k {
            let (lo, hi) = l12_bounds(&priors, *k, *k);
            let seen_lo = *ls.iter().min().unwrap();
            let seen_hi = *ls.iter().max().unwrap();
            let dense = ls.len() as i64 == (seen_hi - seen_lo) / 2 + 1;
            if (lo.doubled(), hi.doubled()) != (seen_lo, seen_hi) || !dense {
                problems.push(format!(
                    "l12 bounds ({lo}, {hi}) vs observed {seen_lo}/2..{seen_hi}/2 at k={k} for {priors:?}"
                ));
            }
        }
    }
    problems
}

/// `Υ` with no summation bounds at all: every `(kA, kB, l12)` on the lattice,
/// with unrealizable points contributing zero.
pub fn upsilon_by_lattice(priors: &Priors, m10: HalfInt, m02: HalfInt) -> Result<BigRational> {
    let n = priors.n() as i64;
    let table = FactorialTable::up_to(priors.n());
    // per k, the nonzero Φ values keyed by doubled l12
    let columns: Vec<(i64, BTreeMap<i64, BigUint>)> = (0..=n)
        .map(|k| {
            let column = (-n..=n)
                .filter_map(|l| {
                    let q = QN8 {
                        n: priors.n(),
                        j10: priors.j10(),
                        j02: priors.j02(),
                        m10,
                        m02,
                        j12: priors.j12(),
                        l12: HalfInt::from_doubled(l),
                        k,
                    };
                    let counts = q.counts()?;
                    Some((l, table.multinomial(&counts.0)))
                })
                .collect();
            (k, column)
        })
        .collect();
    let mut total = BigInt::zero();
    for (k_a, col_a) in &columns {
        for (k_b, col_b) in &columns {
            let sum: BigUint = col_a
                .iter()
                .filter_map(|(l, a)| col_b.get(l).map(|b| a * b))
                .sum();
            if (k_a + k_b) % 2 == 0 {
                total += BigInt::from(sum);
            } else {
                total -= BigInt::from(sum);
            }
        }
    }
    let counter = PathCounter::for_priors(priors);
    let f_a = counter.f_factor(priors.n(), priors.j10(), m10)?;
    let f_b = counter.f_factor(priors.n(), priors.j02(), m02)?;
    Ok(BigRational::from_integer(total) * f_a * f_b)
}

/// Constraints on the pairwise quantum numbers of a triple; `None` means free.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PairConstraint {
    pub j: Option<HalfInt>,
    pub m: Option<HalfInt>,
    pub g: Option<HalfInt>,
    pub l: Option<HalfInt>,
}

impl PairConstraint {
    pub fn j(j: HalfInt) -> PairConstraint {
        PairConstraint {
            j: Some(j),
            ..Default::default()
        }
    }

    pub fn matches(&self, q: &QN4) -> bool {
        self.j.is_none_or(|v| v == q.j())
            && self.m.is_none_or(|v| v == q.m())
            && self.g.is_none_or(|v| v == q.g())
            && self.l.is_none_or(|v| v == q.l())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TripleConstraints {
    pub q10: PairConstraint,
    pub q02: PairConstraint,
    pub q12: PairConstraint,
}

/// Three base-2 sequences in the order `(s1, s0, s2)`, `s0` being the reference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub s1: BitSeq,
    pub s0: BitSeq,
    pub s2: BitSeq,
    pub relations: Pairwise,
}

/// Streams every triple of length-`n` sequences whose relations satisfy `constraints`.
pub fn witness_triples(
    constraints: TripleConstraints,
    n: usize,
    budget: Budget,
) -> Result<impl Iterator<Item = Triple>> {
    let all: Enumeration = enumerate(n, 3, budget)?;
    Ok(all.filter_map(move |c| {
        let relations = Pairwise::of_correlation(&c).ok()?;
        let keep = constraints.q10.matches(&relations.q10)
            && constraints.q02.matches(&relations.q02)
            && constraints.q12.matches(&relations.q12);
        keep.then(|| Triple {
            s1: c.column(0),
            s0: c.column(1),
            s2: c.column(2),
            relations,
        })
    }))
}

/// Outcome of checking the selection rules on random triples.
#[derive(Clone, Debug, Serialize)]
pub struct TripleReport {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub violations: Vec<String>,
}

impl TripleReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs [`verify_triple`] on `trials` uniformly random triples of length `n`.
pub fn triple_law_report(n: usize, trials: u64, seed: u64) -> Result<TripleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    for _ in 0..trials {
        let mut draw = || BitSeq::new((0..n).map(|_| rng.gen()).collect());
        let (s1, s0, s2) = (draw()?, draw()?, draw()?);
        for v in verify_triple(&s1, &s0, &s2)? {
            violations.push(format!("{v} (s1={s1} s0={s0} s2={s2})"));
        }
    }
    Ok(TripleReport {
        n,
        trials,
        seed,
        violations,
    })
}

/// Which of `(j, m, g, l)` a map leaves unchanged.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Conserved {
    pub j: bool,
    pub m: bool,
    pub g: bool,
    pub l: bool,
}

impl Conserved {
    pub fn all(&self) -> bool {
        self.j && self.m && self.g && self.l
    }

    pub fn label(&self) -> String {
        let names: Vec<&str> = [("j", self.j), ("m", self.m), ("g", self.g), ("l", self.l)]
            .iter()
            .filter(|(_, kept)| *kept)
            .map(|(name, _)| *name)
            .collect();
        if names.is_empty() {
            "none".to_string()
        } else {
            names.join(",")
        }
    }
}

fn qn4_of(c: &CorrSeq) -> Result<QN4> {
    Ok(QN4::from_counts(crate::qnum::Counts4::try_from(
        &count_symbols(c),
    )?))
}

/// Compares the quantum numbers of a base-4 sequence before and after a map.
pub fn conserved_by(initial: &CorrSeq, map: &CorrSeq) -> Result<Conserved> {
    if initial.order() != 2 {
        return Err(Error::OrderMismatch(2, initial.order()));
    }
    let before = qn4_of(initial)?;
    let after = qn4_of(&apply_map(initial, map)?)?;
    Ok(Conserved {
        j: before.j() == after.j(),
        m: before.m() == after.m(),
        g: before.g() == after.g(),
        l: before.l() == after.l(),
    })
}

/// A row permutation carrying `from` onto `to`, if one exists.
pub fn find_row_permutation(from: &CorrSeq, to: &CorrSeq) -> Option<Vec<usize>> {
    if from.order() != to.order() || from.len() != to.len() {
        return None;
    }
    let mut pools: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, &s) in from.symbols().iter().enumerate().rev() {
        pools.entry(s).or_default().push(i);
    }
    let perm: Vec<usize> = to
        .symbols()
        .iter()
        .map(|s| pools.get_mut(s).and_then(Vec::pop))
        .collect::<Option<_>>()?;
    (from.permuted(&perm) == *to).then_some(perm)
}

/// Summary of random maps applied to random base-4 sequences.
#[derive(Clone, Debug, Serialize)]
pub struct MapReport {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    /// Conserved-set label (`"j,g"`, `"none"`, ...) to number of sampled maps.
    pub conserved: BTreeMap<String, u64>,
    pub all_conserving_maps: u64,
    pub all_conserving_without_permutation: u64,
    pub permutations_sampled: u64,
    pub permutations_not_conserving: u64,
}

impl MapReport {
    pub fn passed(&self) -> bool {
        self.all_conserving_without_permutation == 0 && self.permutations_not_conserving == 0
    }
}

impl fmt::Display for MapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "map conservation: n={} trials={} seed={}",
            self.n, self.trials, self.seed
        )?;
        for (label, count) in &self.conserved {
            writeln!(f, "  conserves {label}: {count}")?;
        }
        writeln!(
            f,
            "  all-conserving random maps: {} ({} not realized by a row permutation)",
            self.all_conserving_maps, self.all_conserving_without_permutation
        )?;
        write!(
            f,
            "  sampled permutations: {} ({} failed to conserve all quantum numbers)",
            self.permutations_sampled, self.permutations_not_conserving
        )
    }
}

/// Samples `trials` random maps and `trials` random row permutations on base-4
/// sequences of length `n`.
pub fn map_conservation_report(n: usize, trials: u64, seed: u64) -> Result<MapReport> {
    if n == 0 {
        return Err(Error::LengthMismatch {
            expected: 1,
            found: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_seq = |rng: &mut ChaCha8Rng| {
        let symbols = (0..n).map(|_| rng.gen_range(0..4u32)).collect();
        CorrSeq::from_symbols(2, symbols)
    };

    let mut report = MapReport {
        n,
        trials,
        seed,
        conserved: BTreeMap::new(),
        all_conserving_maps: 0,
        all_conserving_without_permutation: 0,
        permutations_sampled: 0,
        permutations_not_conserving: 0,
    };
    for _ in 0..trials {
        let initial = random_seq(&mut rng)?;
        let map = random_seq(&mut rng)?;
        let kept = conserved_by(&initial, &map)?;
        *report.conserved.entry(kept.label()).or_insert(0) += 1;
        if kept.all() {
            report.all_conserving_maps += 1;
            let target = apply_map(&initial, &map)?;
            if find_row_permutation(&initial, &target).is_none() {
                report.all_conserving_without_permutation += 1;
            }
        }

        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let permuted = initial.permuted(&perm);
        let perm_map = apply_map(&initial, &permuted)?;
        report.permutations_sampled += 1;
        if !conserved_by(&initial, &perm_map)?.all() {
            report.permutations_not_conserving += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathcount::phi;

    fn h(doubled: i64) -> HalfInt {
        HalfInt::from_doubled(doubled)
    }

    #[test]
    fn enumeration_reproduces_phi_examples() {
        let q = QN8 {
            n: 6,
            j10: h(2),
            j02: h(2),
            m10: h(0),
            m02: h(0),
            j12: h(2),
            l12: h(-2),
            k: 0,
        };
        assert_eq!(
            phi_by_enumeration(&q, Budget::default()).unwrap(),
            BigUint::from(360u32)
        );
        let q = QN8 {
            m10: h(2),
            m02: h(-2),
            l12: h(2),
            ..q
        };
        assert_eq!(
            phi_by_enumeration(&q, Budget::default()).unwrap(),
            BigUint::from(120u32)
        );
    }

    #[test]
    fn enumeration_edge_cases() {
        let single = QN8 {
            n: 1,
            j10: h(0),
            j02: h(0),
            m10: h(0),
            m02: h(0),
            j12: h(0),
            l12: h(1),
            k: 0,
        };
        assert_eq!(
            phi_by_enumeration(&single, Budget::default()).unwrap(),
            BigUint::from(1u32)
        );
        let impossible = QN8 { k: 1, ..single };
        assert_eq!(impossible.counts(), None);
        assert!(phi_by_enumeration(&impossible, Budget::default())
            .unwrap()
            .is_zero());
        let too_long = QN8 { n: 9, ..single };
        assert!(matches!(
            phi_by_enumeration(&too_long, Budget::default()),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn small_grids_agree_with_the_formula() {
        for n in 1..=4 {
            let report = verify_phi_grid(n, Budget::default(), phi).unwrap();
            assert!(report.passed(), "{report:?}");
            assert_eq!(report.sequences, 1 << (3 * n));
        }
    }

    #[test]
    fn corrupted_phi_is_caught() {
        let report = verify_phi_grid(2, Budget::default(), |q| {
            let v = phi(q);
            if q.k == 1 {
                v + 1u32
            } else {
                v
            }
        })
        .unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn bounds_bracket_the_support() {
        for n in 1..=4 {
            let bins = bin_by_measures(n, Budget::default()).unwrap();
            let problems = verify_bounds(n, &bins);
            assert!(problems.is_empty(), "{problems:#?}");
        }
    }

    #[test]
    fn lattice_weights_match_bounded_weights() {
        let priors = Priors::new(6, h(2), h(2), h(2), h(0)).unwrap();
        let counter = PathCounter::for_priors(&priors);
        for (m10, m02) in priors.allowed_pairs() {
            assert_eq!(
                upsilon_by_lattice(&priors, m10, m02).unwrap(),
                counter.upsilon(&priors, m10, m02).unwrap()
            );
        }
    }

    #[test]
    fn witnesses_for_both_overlap_cases() {
        let constraints = TripleConstraints {
            q10: PairConstraint::j(h(2)),
            q02: PairConstraint::j(h(1)),
            ..Default::default()
        };
        let j12s: std::collections::BTreeSet<i64> =
            witness_triples(constraints, 4, Budget::default())
                .unwrap()
                .map(|t| t.relations.q12.j().doubled())
                .collect();
        assert_eq!(j12s.into_iter().collect::<Vec<_>>(), vec![1, 3]);
    }

    #[test]
    fn impossible_witnesses() {
        let constraints = TripleConstraints {
            q10: PairConstraint::j(h(2)),
            q02: PairConstraint::j(h(0)),
            q12: PairConstraint::j(h(4)),
        };
        assert_eq!(
            witness_triples(constraints, 3, Budget::default())
                .unwrap()
                .count(),
            0
        );
    }

    #[test]
    fn reference_witnesses_repeat_the_reference() {
        let constraints = TripleConstraints {
            q02: PairConstraint::j(h(0)),
            ..Default::default()
        };
        let mut seen = 0;
        for t in witness_triples(constraints, 3, Budget::default()).unwrap() {
            assert_eq!(t.s0, t.s2);
            seen += 1;
        }
        assert_eq!(seen, 64);
    }

    #[test]
    fn random_triples() {
        let report = triple_law_report(16, 200, 3).unwrap();
        assert!(report.passed(), "{:?}", report.violations);
        assert!(triple_law_report(0, 1, 3).is_err());
    }

    #[test]
    fn named_maps() {
        let x: CorrSeq = "AACBBA".parse().unwrap();
        let identity = CorrSeq::zeros(2, 6).unwrap();
        assert!(conserved_by(&x, &identity).unwrap().all());

        let example: CorrSeq = "BACAAD".parse().unwrap();
        let kept = conserved_by(&x, &example).unwrap();
        assert_eq!(kept.label(), "j,g");

        let swapped = x.permuted(&[2, 1, 0, 3, 4, 5]);
        let swap_map = apply_map(&x, &swapped).unwrap();
        assert!(conserved_by(&x, &swap_map).unwrap().all());
        assert!(find_row_permutation(&x, &swapped).is_some());
        assert!(find_row_permutation(&x, &apply_map(&x, &example).unwrap()).is_none());
    }

    #[test]
    fn report_is_reproducible() {
        let a = map_conservation_report(6, 300, 11).unwrap();
        let b = map_conservation_report(6, 300, 11).unwrap();
        assert!(a.passed());
        assert_eq!(a.conserved, b.conserved);
        assert!(a.all_conserving_maps > 0);
        assert_eq!(a.conserved.values().sum::<u64>(), 300);
    }
}
