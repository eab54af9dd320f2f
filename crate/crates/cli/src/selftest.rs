//! The `selftest` command: exhaustive oracles at small n plus seeded random checks.

use std::collections::BTreeSet;
use std::io::Write;

use clap::{Args, ValueEnum};
use serde::Serialize;
use spinseq::brute::{
    bin_by_measures, compare_phi_grid, conserved_by, map_conservation_report, phi_by_enumeration,
    triple_law_report, verify_bounds, witness_triples, PairConstraint, TripleConstraints,
};
use spinseq::num_bigint::BigUint;
use spinseq::num_rational::BigRational;
use spinseq::selection::j12_range;
use spinseq::{
    allowed_m_pairs, cg_squared, convergence_scan, phi, probability_table, Budget, CorrSeq, Error,
    HalfInt, Priors, ScanRow, QN8,
};

use crate::{Failure, EXIT_OK, EXIT_SELFTEST};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Largest n for the exhaustive enumeration checks.
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
    /// Largest n for the random-triple checks.
    #[arg(long, default_value_t = 64)]
    pub triple_n_max: usize,
    /// Random triples drawn per length.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
    /// Perturbs the closed-form Φ so the enumeration check must fail.
    #[arg(long, hide = true)]
    pub corrupt_phi: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub seed: u64,
    pub n_max: usize,
    pub triple_n_max: usize,
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn h(doubled: i64) -> HalfInt {
    HalfInt::from_doubled(doubled)
}

fn check(name: &'static str, result: Result<Vec<String>, Error>, summary: String) -> Check {
    match result {
        Ok(problems) if problems.is_empty() => Check {
            name,
            passed: true,
            detail: summary,
        },
        Ok(problems) => Check {
            name,
            passed: false,
            detail: format!("{} problem(s), first: {}", problems.len(), problems[0]),
        },
        Err(e) => Check {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn phi_under_test(corrupt: bool) -> impl Fn(&QN8) -> BigUint + Sync {
    move |q| {
        let v = phi(q);
        if corrupt && q.counts().is_some() && q.k == 0 {
            v + 1u32
        } else {
            v
        }
    }
}

fn enumeration_checks(args: &SelftestArgs, budget: Budget) -> Vec<Check> {
    let phi_fn = phi_under_test(args.corrupt_phi);
    let mut phi_problems = Vec::new();
    let mut bound_problems = Vec::new();
    let mut sequences = 0u64;
    let mut points = 0u64;
    for n in 1..=args.n_max {
        let bins = match bin_by_measures(n, budget) {
            Ok(b) => b,
            Err(e) => {
                phi_problems.push(e.to_string());
                bound_problems.push(e.to_string());
                break;
            }
        };
        let report = compare_phi_grid(n, &bins, &phi_fn);
        sequences += report.sequences;
        points += report.lattice_points;
        if report.covered_sequences != report.sequences {
            phi_problems.push(format!("n={n}: lattice misses some measured sequences"));
        }
        phi_problems.extend(report.mismatches.iter().map(|m| {
            format!(
                "phi_by_enumeration mismatch at {}: formula {} vs enumerated {}",
                m.q, m.formula, m.enumerated
            )
        }));
        // the depth-first counter is a second, independent enumeration
        if n <= 4 {
            for q in bins.keys() {
                match phi_by_enumeration(q, budget) {
                    Ok(count) if count == phi_fn(q) => {}
                    Ok(count) => phi_problems.push(format!(
                        "phi_by_enumeration mismatch at {q}: formula {} vs direct search {count}",
                        phi_fn(q)
                    )),
                    Err(e) => phi_problems.push(e.to_string()),
                }
            }
        }
        bound_problems.extend(verify_bounds(n, &bins));
    }
    vec![
        check(
            "phi_by_enumeration",
            Ok(phi_problems),
            format!(
                "{sequences} sequences over {points} lattice points for n <= {}",
                args.n_max
            ),
        ),
        check(
            "summation_bounds",
            Ok(bound_problems),
            format!(
                "k and l12 bounds match the enumerated support for n <= {}",
                args.n_max
            ),
        ),
    ]
}

fn witness_check(args: &SelftestArgs, budget: Budget) -> Check {
    let run = || -> Result<Vec<String>, Error> {
        let mut problems = Vec::new();
        for sum in 1..=args.n_max as i64 {
            for j10 in 0..=sum {
                let j02 = sum - j10;
                let constraints = TripleConstraints {
                    q10: PairConstraint::j(h(j10)),
                    q02: PairConstraint::j(h(j02)),
                    ..Default::default()
                };
                let seen: BTreeSet<HalfInt> = witness_triples(constraints, sum as usize, budget)?
                    .map(|t| t.relations.q12.j())
                    .collect();
                let expected: BTreeSet<HalfInt> = j12_range(h(j10), h(j02)).into_iter().collect();
                if seen != expected {
                    problems.push(format!("j10={} j02={}: realized {seen:?}", h(j10), h(j02)));
                }
            }
        }
        Ok(problems)
    };
    check(
        "j12_witnesses",
        run(),
        format!(
            "every triangle value is realized at n = 2(j10+j02) <= {}",
            args.n_max
        ),
    )
}

fn triple_check(args: &SelftestArgs) -> Check {
    let lengths: Vec<usize> = [4, 16, 64]
        .into_iter()
        .filter(|&n| n <= args.triple_n_max)
        .collect();
    let run = || -> Result<Vec<String>, Error> {
        let mut problems = Vec::new();
        for &n in &lengths {
            problems.extend(triple_law_report(n, args.trials, args.seed)?.violations);
        }
        Ok(problems)
    };
    check(
        "selection_rules",
        run(),
        format!("{} random triples at each n in {lengths:?}", args.trials),
    )
}

fn map_checks(args: &SelftestArgs) -> Vec<Check> {
    let run = || -> Result<Vec<String>, Error> {
        let mut problems = Vec::new();
        for n in [4, 16, 32] {
            let report = map_conservation_report(n, 1000, args.seed)?;
            if !report.passed() {
                problems.push(report.to_string());
            }
        }
        Ok(problems)
    };
    let example = || -> Result<Vec<String>, Error> {
        let x: CorrSeq = "AACBBA".parse()?;
        let map: CorrSeq = "BACAAD".parse()?;
        let kept = conserved_by(&x, &map)?.label();
        Ok(if kept == "j,g" {
            Vec::new()
        } else {
            vec![format!("example map conserves {kept}")]
        })
    };
    vec![
        check(
            "permutation_maps",
            run(),
            "1000 random maps and permutations at each n in [4, 16, 32]".to_string(),
        ),
        check(
            "example_map",
            example(),
            "AACBBA with map BACAAD conserves exactly j and g".to_string(),
        ),
    ]
}

fn normalization_check() -> Check {
    let run = || -> Result<Vec<String>, Error> {
        let mut problems = Vec::new();
        for n in 1..=32usize {
            for j1 in 0..=4 {
                for j2 in 0..=4 {
                    for jj in j12_range(h(j1), h(j2)) {
                        for mm in jj.descending_projections() {
                            let priors = match Priors::new(n, h(j1), h(j2), jj, mm) {
                                Ok(p) => p,
                                Err(Error::Constraint(_)) => continue,
                                Err(e) => return Err(e),
                            };
                            let table = probability_table(&priors)?;
                            if table.total() != BigRational::from_integer(1.into()) {
                                problems.push(format!("{priors:?}: total {}", table.total()));
                            }
                            for row in table.negative_upsilon() {
                                problems
                                    .push(format!("{priors:?}: negative weight at m1={}", row.m10));
                            }
                        }
                    }
                }
            }
        }
        Ok(problems)
    };
    check(
        "normalization",
        run(),
        "probabilities sum to 1 with nonnegative weights for n <= 32, j1, j2 <= 2".to_string(),
    )
}

fn cg_check() -> Check {
    let run = || -> Result<Vec<String>, Error> {
        let mut problems = Vec::new();
        for j1 in 0..=5 {
            for j2 in 0..=5 {
                for jj in j12_range(h(j1), h(j2)) {
                    for mm in jj.descending_projections() {
                        let mut total = BigRational::from_integer(0.into());
                        for (m1, m2) in allowed_m_pairs(h(j1), h(j2), mm) {
                            let up = cg_squared(h(j1), h(j2), m1, m2, jj, mm)?;
                            if up != cg_squared(h(j1), h(j2), -m1, -m2, jj, -mm)? {
                                problems.push(format!(
                                    "reflection changes j1={} j2={} J={jj} m1={m1}",
                                    h(j1),
                                    h(j2)
                                ));
                            }
                            total += up;
                        }
                        if total != BigRational::from_integer(1.into()) {
                            problems.push(format!(
                                "j1={} j2={} J={jj} M={mm}: sum {total}",
                                h(j1),
                                h(j2)
                            ));
                        }
                    }
                }
            }
        }
        Ok(problems)
    };
    check(
        "cg_completeness",
        run(),
        "squared coefficients sum to 1 for j1, j2 <= 5/2".to_string(),
    )
}

fn worked_example_check() -> Check {
    let run = || -> Result<Vec<String>, Error> {
        let priors = Priors::new(6, h(2), h(2), h(2), h(0))?;
        let got: Vec<String> = probability_table(&priors)?
            .rows
            .iter()
            .map(|r| r.probability.to_string())
            .collect();
        let want = ["8/17", "1/17", "8/17"];
        Ok(if got == want {
            Vec::new()
        } else {
            vec![format!("got {got:?}")]
        })
    };
    check(
        "worked_example",
        run(),
        "n=6, j1=j2=J=1, M=0 gives 8/17, 1/17, 8/17".to_string(),
    )
}

fn convergence_check() -> Check {
    let run = || -> Result<Vec<String>, Error> {
        let rows = convergence_scan(h(2), h(2), h(2), h(0), &[6, 12, 24, 48, 96])?;
        let mut problems = Vec::new();
        for pair in [2, 0, -2] {
            let deltas: Vec<BigRational> = rows
                .iter()
                .filter_map(|r| match r {
                    ScanRow::Value { row, .. } if row.m10.doubled() == pair => {
                        Some(row.delta.clone())
                    }
                    _ => None,
                })
                .collect();
            if deltas.len() != 5 || deltas.windows(2).any(|w| w[1] >= w[0]) {
                problems.push(format!("m1={}: {deltas:?}", h(pair)));
            }
        }
        Ok(problems)
    };
    check(
        "convergence",
        run(),
        "|P - CG^2| decreases for n in 6, 12, 24, 48, 96".to_string(),
    )
}

/// Runs every check and returns the report.
pub fn report(args: &SelftestArgs, budget: Budget) -> Report {
    let mut checks = enumeration_checks(args, budget);
    checks.push(witness_check(args, budget));
    checks.push(triple_check(args));
    checks.extend(map_checks(args));
    checks.push(normalization_check());
    checks.push(cg_check());
    checks.push(worked_example_check());
    checks.push(convergence_check());
    Report {
        seed: args.seed,
        n_max: args.n_max,
        triple_n_max: args.triple_n_max,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

pub(crate) fn run(args: &SelftestArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let budget = Budget::from_env()?;
    budget.check(u32::try_from(3 * args.n_max).unwrap_or(u32::MAX))?;
    let report = report(args, budget);
    match args.format {
        ReportFormat::Text => {
            writeln!(out, "seed: {}", report.seed)?;
            for c in &report.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{status} {}: {}", c.name, c.detail)?;
            }
            let passed = report.checks.iter().filter(|c| c.passed).count();
            writeln!(
                out,
                "selftest {} ({passed}/{} checks passed)",
                if report.passed { "passed" } else { "failed" },
                report.checks.len()
            )?;
        }
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out)?;
        }
    }
    Ok(if report.passed {
        EXIT_OK
    } else {
        EXIT_SELFTEST
    })
}
