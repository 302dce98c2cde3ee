//! Support-recovery decoders.
//!
//! The combinatorial decoders only look at which measurements are zero or
//! nonzero, so they require ternary measurements. The brute-force L0
//! decoder works on Gaussian matrices in either mode.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lp::{find_feasible_point, Constraint, Relation};
use crate::rational::{binomial, format_rational, integer, Rational};
use crate::sensing::{MeasureMode, MeasurementVector, Regime, RegimeParams, Row, SensingMatrix};
use crate::signals::{IndexSet, SparseSignal, TernarySign};

/// Margin imposed on `y_i ⟨a_i, x⟩` by the L0 decoder's feasibility test.
pub const L0_MARGIN: f64 = 1e-6;
/// Largest number of (support, sign pattern) candidates the L0 decoder tries.
pub const L0_CANDIDATE_CAP: u128 = 1_000_000;

pub const CSV_HEADER: &str = "regime,n,m,k,eps,seed,nnz,size,fp,fn,superset_ok";

/// Decoder output with optional ground truth for error bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryReport {
    pub regime: Regime,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub eps: Rational,
    pub returned: IndexSet,
    pub reference: Option<IndexSet>,
}

impl RecoveryReport {
    fn new(a: &SensingMatrix, k: usize, eps: &Rational, returned: IndexSet) -> Self {
        RecoveryReport {
            regime: a.regime(),
            n: a.n(),
            m: a.m(),
            k,
            eps: eps.clone(),
            returned,
            reference: None,
        }
    }

    pub fn with_reference(mut self, support: IndexSet) -> Self {
        self.reference = Some(support);
        self
    }

    pub fn false_positives(&self) -> Option<usize> {
        self.reference
            .as_ref()
            .map(|r| self.returned.difference(r).count())
    }

    pub fn false_negatives(&self) -> Option<usize> {
        self.reference
            .as_ref()
            .map(|r| r.difference(&self.returned).count())
    }

    /// Whether the returned set is an ε-superset of the reference support.
    pub fn superset_ok(&self) -> Option<bool> {
        self.reference
            .as_ref()
            .map(|r| is_superset_support(&self.returned, r, self.k, &self.eps))
    }

    /// Whether the returned set is an ε-approximate support of the reference.
    pub fn approximate_ok(&self) -> Option<bool> {
        self.reference
            .as_ref()
            .map(|r| is_approximate_support(&self.returned, r, self.k, &self.eps))
    }

    /// One CSV row in [`CSV_HEADER`] order; ground-truth columns are `-`
    /// without a reference.
    pub fn csv_row(&self, seed: u64) -> String {
        let opt = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.regime,
            self.n,
            self.m,
            self.k,
            format_rational(&self.eps),
            seed,
            opt(self.reference.as_ref().map(BTreeSet::len)),
            self.returned.len(),
            opt(self.false_positives()),
            opt(self.false_negatives()),
            self.superset_ok()
                .map_or_else(|| "-".to_string(), |b| u8::from(b).to_string()),
        )
    }
}

fn eps_k(k: usize, eps: &Rational) -> Rational {
    eps * integer(k as i64)
}

/// `|S| <= k`, `|S ∩ supp| >= |supp| - εk` and `|S \ supp| <= εk`.
pub fn is_approximate_support(s: &IndexSet, supp: &IndexSet, k: usize, eps: &Rational) -> bool {
    let ek = eps_k(k, eps);
    let hits = s.intersection(supp).count();
    let misses = s.len() - hits;
    s.len() <= k
        && integer(hits as i64) >= integer(supp.len() as i64) - &ek
        && integer(misses as i64) <= ek
}

/// `supp ⊆ S` and `|S| <= |supp| + εk`.
pub fn is_superset_support(s: &IndexSet, supp: &IndexSet, k: usize, eps: &Rational) -> bool {
    supp.is_subset(s) && integer(s.len() as i64) <= integer(supp.len() as i64) + eps_k(k, eps)
}

/// Keeps the `k` best-scoring indices: drops the smallest score first and,
/// among equal scores, the larger index first.
fn trim_to_k(candidates: Vec<(usize, usize)>, k: usize) -> IndexSet {
    let excess = candidates.len().saturating_sub(k);
    candidates
        .into_iter()
        .sorted_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .skip(excess)
        .map(|(j, _)| j)
        .collect()
}

fn check_inputs(
    a: &SensingMatrix,
    y: &MeasurementVector,
    expected: Regime,
    k: usize,
    eps: &Rational,
) -> Result<()> {
    if a.regime() != expected {
        return Err(Error::RegimeMismatch {
            expected: expected.to_string(),
            found: a.regime().to_string(),
        });
    }
    if y.len() != a.m() {
        return Err(Error::DimensionMismatch {
            expected: a.m(),
            found: y.len(),
        });
    }
    if y.mode() != MeasureMode::Ternary {
        return Err(Error::InvalidParams(
            "combinatorial decoders need ternary measurements".into(),
        ));
    }
    let (pk, peps) = match a.params() {
        RegimeParams::Thm1 { k, eps }
        | RegimeParams::Thm3 { k, eps, .. }
        | RegimeParams::Thm4 { k, eps, .. }
        | RegimeParams::Thm5 { k, eps, .. } => (*k, eps),
        RegimeParams::Gaussian => return Ok(()),
    };
    if pk != k || peps != eps {
        return Err(Error::InvalidParams(format!(
            "decoder called with k={k} eps={} but the matrix was built for k={pk} eps={}",
            format_rational(eps),
            format_rational(peps)
        )));
    }
    Ok(())
}

/// Columns whose rows in `range` are mostly nonzero in `y`:
/// `2·|B_j ∩ supp y| >= |B_j|` (or `>` when `strict`), trimmed to `k`.
fn majority_scan(
    a: &SensingMatrix,
    y: &MeasurementVector,
    range: std::ops::Range<usize>,
    strict: bool,
    k: usize,
) -> IndexSet {
    let offset = range.start;
    let entries = y.entries();
    let candidates = a
        .column_supports(range)
        .into_iter()
        .enumerate()
        .filter_map(|(j, b)| {
            let count = b.iter().filter(|&&r| !entries[offset + r].is_zero()).count();
            let pass = if strict {
                2 * count > b.len()
            } else {
                2 * count >= b.len()
            };
            (pass && !b.is_empty()).then_some((j, count))
        })
        .collect();
    trim_to_k(candidates, k)
}

/// Majority decoding over a list union-free matrix.
pub fn decode_approximate(
    a: &SensingMatrix,
    y: &MeasurementVector,
    k: usize,
    eps: &Rational,
) -> Result<RecoveryReport> {
    check_inputs(a, y, Regime::Thm1, k, eps)?;
    let c = majority_scan(a, y, 0..a.m(), false, k);
    Ok(RecoveryReport::new(a, k, eps, c))
}

/// Intermediate sets of the two-stage superset decoder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoStageTrace {
    /// Output of the majority scan on the binary block, `|C| <= k`.
    pub stage_one: IndexSet,
    /// Indices removed from `[n]` by all-zero power groups.
    pub removed: IndexSet,
}

impl TwoStageTrace {
    pub fn result(&self, n: usize) -> IndexSet {
        (0..n)
            .filter(|j| self.stage_one.contains(j) || !self.removed.contains(j))
            .collect()
    }
}

pub fn two_stage_trace(
    a: &SensingMatrix,
    y: &MeasurementVector,
    k: usize,
    eps: &Rational,
) -> Result<TwoStageTrace> {
    check_inputs(a, y, Regime::Thm3, k, eps)?;
    let RegimeParams::Thm3 { split, group, .. } = *a.params() else {
        unreachable!("regime checked above");
    };
    let stage_one = majority_scan(a, y, 0..split, true, k);
    let mut removed = IndexSet::new();
    for (g, rows) in a.rows()[split..].chunks(group).enumerate() {
        let support = rows[0].nonzero_columns();
        let start = split + g * group;
        let all_zero = y.entries()[start..start + group].iter().all(|s| s.is_zero());
        if all_zero && support.iter().all(|j| !stage_one.contains(j)) {
            removed.extend(support);
        }
    }
    Ok(TwoStageTrace { stage_one, removed })
}

/// Two-stage superset decoding: majority scan, then elimination by
/// all-zero power groups that avoid the scan's output.
pub fn decode_superset(
    a: &SensingMatrix,
    y: &MeasurementVector,
    k: usize,
    eps: &Rational,
) -> Result<RecoveryReport> {
    let trace = two_stage_trace(a, y, k, eps)?;
    Ok(RecoveryReport::new(a, k, eps, trace.result(a.n())))
}

/// Removes the support of every power group measured all-zero.
fn eliminate_zero_groups(a: &SensingMatrix, y: &MeasurementVector, group: usize) -> IndexSet {
    let mut c: IndexSet = (0..a.n()).collect();
    for (rows, ys) in a.rows().chunks(group).zip(y.entries().chunks(group)) {
        if ys.iter().all(|s| s.is_zero()) {
            for j in rows[0].nonzero_columns() {
                c.remove(&j);
            }
        }
    }
    c
}

/// Superset decoding for signals with dynamic range at most `eta`.
pub fn decode_superset_bounded_range(
    a: &SensingMatrix,
    y: &MeasurementVector,
    k: usize,
    eps: &Rational,
    eta: &Rational,
) -> Result<RecoveryReport> {
    check_inputs(a, y, Regime::Thm4, k, eps)?;
    if let RegimeParams::Thm4 { eta: built, .. } = a.params() {
        if built != eta {
            return Err(Error::InvalidParams(format!(
                "decoder called with eta={} but the matrix was built for eta={}",
                format_rational(eta),
                format_rational(built)
            )));
        }
    }
    Ok(RecoveryReport::new(a, k, eps, eliminate_zero_groups(a, y, 1)))
}

/// Superset decoding for signals with at most `r` entries of the minority
/// sign.
pub fn decode_superset_same_sign(
    a: &SensingMatrix,
    y: &MeasurementVector,
    k: usize,
    eps: &Rational,
    r: usize,
) -> Result<RecoveryReport> {
    check_inputs(a, y, Regime::Thm5, k, eps)?;
    let RegimeParams::Thm5 { r: built, .. } = *a.params() else {
        unreachable!("regime checked above");
    };
    if built != r {
        return Err(Error::InvalidParams(format!(
            "decoder called with R={r} but the matrix was built for R={built}"
        )));
    }
    Ok(RecoveryReport::new(a, k, eps, eliminate_zero_groups(a, y, 2 * r + 1)))
}

/// Cuts an ε-superset down to at most `k` indices, dropping larger indices
/// first.
pub fn superset_to_approximate(s: &IndexSet, k: usize, eps: &Rational) -> Result<IndexSet> {
    if integer(s.len() as i64) > integer(k as i64) + eps_k(k, eps) {
        return Err(Error::ContractViolation(format!(
            "superset of size {} exceeds k + eps*k = {}",
            s.len(),
            format_rational(&(integer(k as i64) + eps_k(k, eps)))
        )));
    }
    Ok(trim_to_k(s.iter().map(|&j| (j, 0)).collect(), k))
}

/// Number of (support, sign pattern) pairs with support size `<= k`.
pub fn l0_candidate_count(n: usize, k: usize) -> u128 {
    (0..=k.min(n)).fold(0u128, |acc, s| {
        acc.saturating_add(binomial(n, s).saturating_mul(1u128 << s.min(127)))
    })
}

fn dense_rows(a: &SensingMatrix) -> Vec<&[f64]> {
    a.rows()
        .iter()
        .map(|r| match r {
            Row::Dense(d) => d.values(),
            _ => unreachable!("gaussian matrices hold dense rows only"),
        })
        .collect()
}

fn consistent(rows: &[&[f64]], y: &MeasurementVector, x: &[(usize, f64)]) -> bool {
    rows.iter().zip(y.entries()).all(|(row, s)| {
        let v: f64 = x.iter().map(|&(j, xj)| row[j] * xj).sum();
        match (y.mode(), s) {
            (MeasureMode::Strict, TernarySign::Pos) => v >= 0.0,
            (_, TernarySign::Pos) => v > 0.0,
            (_, TernarySign::Neg) => v < 0.0,
            (_, TernarySign::Zero) => v.abs() <= 1e-9,
        }
    })
}

/// Tries one support with one sign pattern (`negative` bit set → `x_j < 0`).
fn try_candidate(
    rows: &[&[f64]],
    y: &MeasurementVector,
    support: &[usize],
    negative: u64,
    eta: &Rational,
) -> Option<SparseSignal> {
    let s = support.len();
    let sign = |t: usize| if negative >> t & 1 == 1 { -1.0 } else { 1.0 };
    let eta_f = eta.to_f64().unwrap_or(f64::MAX);
    // Substitute x_j = s_j (1 + u_j) with 0 <= u_j <= eta - 1.
    let mut cs: Vec<Constraint> = rows
        .iter()
        .zip(y.entries())
        .map(|(row, yi)| {
            let w: Vec<f64> = (0..s).map(|t| row[support[t]] * sign(t)).collect();
            let base: f64 = w.iter().sum();
            match yi {
                TernarySign::Zero => Constraint::new(w, Relation::Eq, -base),
                _ => {
                    let yf = f64::from(yi.as_i8());
                    Constraint::new(
                        w.iter().map(|v| v * yf).collect(),
                        Relation::Ge,
                        L0_MARGIN - base * yf,
                    )
                }
            }
        })
        .collect();
    for t in 0..s {
        let mut e = vec![0.0; s];
        e[t] = 1.0;
        cs.push(Constraint::new(e, Relation::Le, eta_f - 1.0));
    }
    let u = find_feasible_point(s, &cs)?;
    let one = Rational::one();
    let entries: Vec<(usize, Rational)> = (0..s)
        .map(|t| {
            let mag = Rational::from_float(1.0 + u[t]).unwrap_or_else(|| one.clone());
            let mag = mag.clamp(one.clone(), eta.clone());
            (support[t], if sign(t) < 0.0 { -mag } else { mag })
        })
        .collect();
    let floats: Vec<(usize, f64)> = entries
        .iter()
        .map(|(j, v)| (*j, v.to_f64().unwrap_or(0.0)))
        .collect();
    if !consistent(rows, y, &floats) {
        return None;
    }
    let dim = rows.first().map_or(0, |r| r.len());
    SparseSignal::new(dim, entries).ok()
}

/// Sparsest signal with entries in `±[1, eta]` consistent with `y`,
/// searching supports by increasing size and sign patterns in binary order.
pub fn decode_l0_bruteforce(
    a: &SensingMatrix,
    y: &MeasurementVector,
    k: usize,
    eta: &Rational,
) -> Result<SparseSignal> {
    if a.regime() != Regime::Gaussian {
        return Err(Error::RegimeMismatch {
            expected: Regime::Gaussian.to_string(),
            found: a.regime().to_string(),
        });
    }
    if y.len() != a.m() {
        return Err(Error::DimensionMismatch {
            expected: a.m(),
            found: y.len(),
        });
    }
    if *eta < Rational::one() {
        return Err(Error::InvalidParams("eta must be at least 1".into()));
    }
    let count = l0_candidate_count(a.n(), k);
    if count > L0_CANDIDATE_CAP {
        return Err(Error::InstanceTooLarge {
            count,
            cap: L0_CANDIDATE_CAP,
        });
    }
    let rows = dense_rows(a);
    if consistent(&rows, y, &[]) {
        return Ok(SparseSignal::zero(a.n()));
    }
    for size in 1..=k.min(a.n()) {
        let candidates: Vec<(Vec<usize>, u64)> = (0..a.n())
            .combinations(size)
            .flat_map(|s| (0..1u64 << size).map(move |p| (s.clone(), p)))
            .collect();
        let found = candidates
            .par_iter()
            .find_map_first(|(s, p)| try_candidate(&rows, y, s, *p, eta));
        if let Some(x) = found {
            debug_assert!(x.dynamic_range().is_ok_and(|r| !r.is_negative() && r <= *eta));
            return Ok(x);
        }
    }
    Err(Error::DecodingFailed)
}

/// Runs [`decode_l0_bruteforce`] and reports the support of its output.
pub fn decode_l0_report(
    a: &SensingMatrix,
    y: &MeasurementVector,
    k: usize,
    eps: &Rational,
    eta: &Rational,
) -> Result<RecoveryReport> {
    let x = decode_l0_bruteforce(a, y, k, eta)?;
    Ok(RecoveryReport::new(a, k, eps, x.support()))
}
