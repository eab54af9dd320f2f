//! Selection rules for composing the relations `10` and `02` into `12`.

use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::qnum::{Pairwise, QN4};
use crate::seq::BitSeq;

/// `|j10 - j02| <= j12 <= j10 + j02` with an integral perimeter.
pub fn check_triangle(j10: HalfInt, j02: HalfInt, j12: HalfInt) -> bool {
    if j10.is_negative() || j02.is_negative() || j12.is_negative() {
        return false;
    }
    (j10 - j02).abs() <= j12 && j12 <= j10 + j02 && (j10 + j02 + j12).is_integer()
}

/// Admissible `j12` values when `n` places no extra constraint.
pub fn j12_range(j10: HalfInt, j02: HalfInt) -> Vec<HalfInt> {
    if j10.is_negative() || j02.is_negative() {
        return Vec::new();
    }
    let lo = (j10 - j02).abs().doubled();
    let hi = (j10 + j02).doubled();
    (lo..=hi).step_by(2).map(HalfInt::from_doubled).collect()
}

/// Bounds on `g12 = n/2 - j12`.
pub fn g12_range(n: usize, j10: HalfInt, j02: HalfInt) -> Result<(HalfInt, HalfInt)> {
    let half_n = HalfInt::from_doubled(n as i64);
    if half_n < j10 + j02 {
        return Err(Error::Constraint(format!(
            "n={n} is smaller than 2(j10+j02)={}",
            (j10 + j02).doubled()
        )));
    }
    Ok((half_n - j10 - j02, half_n - (j10 - j02).abs()))
}

/// Smallest and largest `j12` compatible with two measured relations that share a reference.
///
/// Overlaps of `C10` rows with `D02` rows (symbol `101`) and of `D10` with `C02`
/// (symbol `010`) each lower `j12` by one. At most `min(C10, D02) + min(D10, C02)`
/// of them fit, and at least `max(0, C10 - A02) + max(0, D10 - B02)` are forced.
pub fn j12_bounds_constrained(q10: &QN4, q02: &QN4, n: usize) -> Result<(HalfInt, HalfInt)> {
    if q10.n() != n || q02.n() != n {
        return Err(Error::Constraint(format!(
            "relations have lengths {} and {}, expected n={n}",
            q10.n(),
            q02.n()
        )));
    }
    let c10 = q10.counts();
    let c02 = q02.counts();
    // reference zeros are A10 + C10 on one side and A02 + D02 on the other
    if c10.a + c10.c != c02.a + c02.d {
        return Err(Error::Constraint(format!(
            "relations disagree on the reference: {} zeros via 10, {} via 02",
            c10.a + c10.c,
            c02.a + c02.d
        )));
    }
    let top = q10.j() + q02.j();
    let max_overlap = c10.c.min(c02.d) + c10.d.min(c02.c);
    let forced_overlap = c10.c.saturating_sub(c02.a) + c10.d.saturating_sub(c02.b);
    Ok((
        top - HalfInt::from_int(max_overlap as i64),
        top - HalfInt::from_int(forced_overlap as i64),
    ))
}

/// `(m10, m02)` pairs with `m10 + m02 = m12`, in descending `m10`.
pub fn allowed_m_pairs(j10: HalfInt, j02: HalfInt, m12: HalfInt) -> Vec<(HalfInt, HalfInt)> {
    if j02.is_negative() {
        return Vec::new();
    }
    j10.descending_projections()
        .map(|m10| (m10, m12 - m10))
        .filter(|&(_, m02)| m02.abs() <= j02 && m02.same_parity(j02))
        .collect()
}

/// Checks every relation that must hold among the pairwise quantum numbers of
/// a triple `(s1, s0, s2)`; returns a description of each violation.
pub fn verify_triple(s1: &BitSeq, s0: &BitSeq, s2: &BitSeq) -> Result<Vec<String>> {
    let n = s0.len();
    let Pairwise { q10, q02, q12 } = Pairwise::of_triple(s1, s0, s2)?;
    let mut violations = Vec::new();
    let mut expect = |ok: bool, what: &str| {
        if !ok {
            violations.push(format!("{what}: q10={q10} q02={q02} q12={q12}"));
        }
    };

    expect(q10.n() == n && q02.n() == n && q12.n() == n, "n = 2(j+g)");
    expect(q12.m() == q10.m() + q02.m(), "m12 = m10 + m02");
    expect(q12.m() == q02.l() - q10.l(), "m12 = l02 - l10");
    expect(q12.l() == q10.l() + q02.m(), "l12 = l10 + m02");
    expect(q12.l() == q02.l() - q10.m(), "l12 = l02 - m10");
    expect(
        check_triangle(q10.j(), q02.j(), q12.j()),
        "triangle rule on j",
    );
    let half_n = HalfInt::from_doubled(n as i64);
    expect(
        half_n - q10.j() - q02.j() <= q12.g() && q12.g() <= half_n - (q10.j() - q02.j()).abs(),
        "g12 range",
    );
    match j12_bounds_constrained(&q10, &q02, n) {
        Ok((lo, hi)) => expect(lo <= q12.j() && q12.j() <= hi, "overlap bounds on j12"),
        Err(e) => expect(false, &format!("overlap bounds: {e}")),
    }
    // j is half the Hamming distance, hence a metric
    let j01 = QN4::measure(s0, s1)?.j();
    expect(j01 == q10.j(), "j symmetric");
    expect(q12.j() <= q10.j() + q02.j(), "metric triangle inequality");
    Ok(violations)
}
