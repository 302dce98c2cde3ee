//! Root-count bounds for sparse polynomials, confusable signal pairs, and
//! measurement budgets.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rand::seq::IndexedRandom;

use crate::designs::{
    find_list_disjunct_violation, list_disjunct_budget, union_free_alphabet, union_free_weight,
    DEFAULT_PAIR_CAP,
};
use crate::error::{Error, Result};
use crate::rational::{ceil_usize, floor_usize, format_rational, integer, ratio, to_f64, Rational};
use crate::sensing::{
    approximate_list_size, measure, superset_list_size, two_stage_shape, MeasureMode, Row,
    SensingMatrix,
};
use crate::seed::rng_for;
use crate::signals::SparseSignal;

/// Nonzero polynomial coefficients in increasing exponent order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedCoefficientSequence {
    coeffs: Vec<Rational>,
}

impl SignedCoefficientSequence {
    /// Errors on an empty sequence or a zero entry.
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParams("empty coefficient sequence".into()));
        }
        if coeffs.iter().any(Zero::is_zero) {
            return Err(Error::InvalidParams("coefficient sequence has a zero entry".into()));
        }
        Ok(SignedCoefficientSequence { coeffs })
    }

    /// Drops the zero coefficients of a dense polynomial.
    pub fn from_polynomial(dense: &[Rational]) -> Result<Self> {
        Self::new(dense.iter().filter(|c| !c.is_zero()).cloned().collect())
    }

    /// Coefficients of `⟨x, z⟩` as a polynomial in the base of a power row
    /// with support `row_support`.
    pub fn from_signal_on_support(x: &SparseSignal, row_support: &[usize]) -> Result<Self> {
        Self::new(
            row_support
                .iter()
                .filter_map(|&j| x.get(j).cloned())
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> &Rational {
        self.coeffs.last().expect("nonempty by construction")
    }
}

/// Sign changes between consecutive coefficients; bounds the number of
/// positive real roots.
pub fn descartes_positive_root_bound(c: &SignedCoefficientSequence) -> usize {
    c.coeffs
        .windows(2)
        .filter(|w| w[0].is_positive() != w[1].is_positive())
        .count()
}

/// `1 + max|c_i| / |c_lead|`; every complex root has smaller magnitude.
pub fn cauchy_root_radius(c: &SignedCoefficientSequence) -> Rational {
    let max = c.coeffs.iter().map(Signed::abs).max().expect("nonempty");
    Rational::one() + max / c.leading().abs()
}

/// `1 + κ(c)`, the looser radius that depends only on the dynamic range.
pub fn cauchy_root_radius_kappa(c: &SignedCoefficientSequence) -> Rational {
    let max = c.coeffs.iter().map(Signed::abs).max().expect("nonempty");
    let min = c.coeffs.iter().map(Signed::abs).min().expect("nonempty");
    Rational::one() + max / min
}

/// Resample limit for the first signal of a confusable pair.
pub const ADVERSARY_RESAMPLE_CAP: usize = 1000;

/// List sizes `(k', ℓ')` the zero pattern must avoid for a confusable
/// pair to exist: `ℓ' = max(1, ⌈2εk⌉)`, `k' = min(⌊k(1−2ε)⌋, k − ℓ')`.
pub fn adversary_shape(k: usize, eps: &Rational) -> Result<(usize, usize)> {
    let two_eps_k = eps * integer(2 * k as i64);
    let l = ceil_usize(&two_eps_k).max(1);
    if l > k {
        return Err(Error::InvalidParams(format!(
            "2*eps*k exceeds k (k={k}, eps={})",
            format_rational(eps)
        )));
    }
    let rest = integer(k as i64) - two_eps_k;
    let floor_rest = if rest.is_negative() { 0 } else { floor_usize(&rest) };
    Ok((floor_rest.min(k - l), l))
}

fn entry_pool() -> Vec<Rational> {
    [(1, 1), (2, 1), (3, 1), (1, 2), (3, 2)]
        .into_iter()
        .flat_map(|(p, q)| [ratio(p, q), ratio(-p, q)])
        .collect()
}

/// Largest entry magnitude of a binary or power row.
fn row_scale(row: &Row) -> Result<Rational> {
    match row {
        Row::Binary(_) => Ok(Rational::one()),
        Row::Power(p) => {
            let last = match p.support().last() {
                Some(&j) => p.value_at(j)?,
                None => Rational::one(),
            };
            Ok(last.max(Rational::one()))
        }
        Row::Dense(_) => Err(Error::Unsupported(
            "confusable pairs need binary or power rows".into(),
        )),
    }
}

/// Two signals with identical measurements whose supports overlap in at most
/// `k(1−2ε)` positions, or `None` if the zero pattern of `a` is
/// `(k', ℓ')`-list disjunct (see [`adversary_shape`]).
pub fn adversarial_pair(
    a: &SensingMatrix,
    k: usize,
    eps: &Rational,
    seed: u64,
) -> Result<Option<(SparseSignal, SparseSignal)>> {
    let scales: Vec<Rational> = a.rows().iter().map(row_scale).collect::<Result<_>>()?;
    let (k1, l1) = adversary_shape(k, eps)?;
    let pattern = a.zero_pattern();
    let Some(violation) = find_list_disjunct_violation(&pattern, k1, l1, DEFAULT_PAIR_CAP)? else {
        return Ok(None);
    };

    // Rows touching the union of the T columns.
    let touched: Vec<usize> = (0..a.m())
        .filter(|&r| {
            violation
                .t
                .iter()
                .any(|j| pattern.column(*j).contains(&r))
        })
        .collect();

    let pool = entry_pool();
    let mut rng = rng_for(seed, 0);
    let mut attempt = 0;
    let (x1, gamma) = loop {
        if attempt == ADVERSARY_RESAMPLE_CAP {
            return Err(Error::ResampleCapExceeded(ADVERSARY_RESAMPLE_CAP));
        }
        attempt += 1;
        let x1 = SparseSignal::new(
            a.n(),
            violation
                .t
                .iter()
                .map(|&j| (j, pool.choose(&mut rng).expect("nonempty pool").clone())),
        )?;
        let mut gamma: Option<Rational> = None;
        let mut ok = true;
        for &r in &touched {
            let v = a.rows()[r].exact_inner(&x1)?.abs() / &scales[r];
            if v.is_zero() {
                ok = false;
                break;
            }
            gamma = Some(gamma.map_or(v.clone(), |g| g.min(v)));
        }
        if ok {
            break (x1, gamma.unwrap_or_else(Rational::one));
        }
    };

    // Each perturbation moves a scaled touched row by at most γ/2 < γ.
    let step = gamma / integer(2 * violation.s.len() as i64);
    let mut x2 = x1.clone();
    for &j in &violation.s {
        x2.add_at(j, &step)?;
    }
    for mode in [MeasureMode::Ternary, MeasureMode::Strict] {
        if measure(a, &x1, mode)? != measure(a, &x2, mode)? {
            return Err(Error::ContractViolation(
                "confusable pair measured differently".into(),
            ));
        }
    }
    Ok(Some((x1, x2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Goal {
    Exact,
    Approximate,
    Superset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignalClass {
    General,
    BoundedRange,
    Binary,
    /// At most `R` entries of the minority sign.
    SameSign,
    /// Gaussian measurements with the L0 decoder.
    Gaussian,
}

impl Goal {
    pub fn as_str(self) -> &'static str {
        match self {
            Goal::Exact => "exact",
            Goal::Approximate => "approximate",
            Goal::Superset => "superset",
        }
    }
}

impl SignalClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SignalClass::General => "general",
            SignalClass::BoundedRange => "bounded-range",
            SignalClass::Binary => "binary",
            SignalClass::SameSign => "same-sign",
            SignalClass::Gaussian => "gaussian",
        }
    }
}

impl FromStr for Goal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Goal::Exact, Goal::Approximate, Goal::Superset]
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown recovery goal {s:?}")))
    }
}

impl FromStr for SignalClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            SignalClass::General,
            SignalClass::BoundedRange,
            SignalClass::Binary,
            SignalClass::SameSign,
            SignalClass::Gaussian,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
        .ok_or_else(|| Error::InvalidParams(format!("unknown signal class {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetQuery {
    pub goal: Goal,
    pub class: SignalClass,
    pub n: usize,
    pub k: usize,
    pub eps: Rational,
    /// Dynamic-range bound; needed by bounded-range and Gaussian queries.
    pub eta: Option<Rational>,
    /// Minority-sign bound; needed by same-sign queries.
    pub r: Option<usize>,
}

impl BudgetQuery {
    pub fn new(goal: Goal, class: SignalClass, n: usize, k: usize, eps: Rational) -> Self {
        BudgetQuery {
            goal,
            class,
            n,
            k,
            eps,
            eta: None,
            r: None,
        }
    }

    pub fn with_eta(mut self, eta: Rational) -> Self {
        self.eta = Some(eta);
        self
    }

    pub fn with_r(mut self, r: usize) -> Self {
        self.r = Some(r);
        self
    }

    /// `goal/class`, e.g. `superset/general`.
    pub fn regime_label(&self) -> String {
        format!("{}/{}", self.goal.as_str(), self.class.as_str())
    }

    fn eta(&self) -> Result<&Rational> {
        let eta = self
            .eta
            .as_ref()
            .ok_or_else(|| Error::InvalidParams(format!("{} needs eta", self.regime_label())))?;
        if *eta < Rational::one() {
            return Err(Error::InvalidParams("eta must be at least 1".into()));
        }
        Ok(eta)
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 || self.n <= self.k {
            return Err(Error::InvalidParams(format!(
                "need 1 <= k < n, got k={} n={}",
                self.k, self.n
            )));
        }
        if !self.eps.is_positive() || self.eps > Rational::one() {
            return Err(Error::InvalidParams("eps must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// `⌈(3πkη / (2√ε)) · ln(5enη / √ε)⌉`.
pub fn gaussian_budget(n: usize, k: usize, eps: &Rational, eta: &Rational) -> u64 {
    let (n, k, eps, eta) = (n as f64, k as f64, to_f64(eps), to_f64(eta));
    let root = eps.sqrt();
    let m = 3.0 * std::f64::consts::PI * k * eta / (2.0 * root)
        * (5.0 * std::f64::consts::E * n * eta / root).ln();
    m.ceil() as u64
}

/// Rows of the single-stage superset designs.
fn disjunct_rows(n: usize, k: usize, eps: &Rational) -> u64 {
    list_disjunct_budget(n, k, superset_list_size(k, eps)) as u64
}

/// The default row count the matching builder would use.
pub fn measurement_budget(q: &BudgetQuery) -> Result<u64> {
    q.validate()?;
    let (n, k, eps) = (q.n, q.k, &q.eps);
    let half = ratio(1, 2);
    match (q.goal, q.class) {
        (Goal::Exact, _) => Err(Error::Unsupported(
            "exact recovery has no constructive budget here".into(),
        )),
        (Goal::Approximate, SignalClass::General) => {
            let l = approximate_list_size(k, eps);
            Ok((union_free_alphabet(k, l, &half) * union_free_weight(n, k, l, &half)) as u64)
        }
        (Goal::Superset, SignalClass::General) => {
            let s = two_stage_shape(k, eps);
            let first = union_free_alphabet(k, s.l1, &half) * union_free_weight(n, k, s.l1, &half);
            let second = s.group * list_disjunct_budget(n, s.k2, s.l2);
            Ok((first + second) as u64)
        }
        (Goal::Superset, SignalClass::BoundedRange) => {
            q.eta()?;
            Ok(disjunct_rows(n, k, eps))
        }
        (Goal::Superset, SignalClass::Binary) => Ok(disjunct_rows(n, k, eps)),
        (Goal::Superset | Goal::Approximate, SignalClass::SameSign) => {
            let r = q.r.ok_or_else(|| {
                Error::InvalidParams(format!("{} needs R", q.regime_label()))
            })?;
            Ok((2 * r as u64 + 1) * disjunct_rows(n, k, eps))
        }
        (Goal::Approximate, SignalClass::BoundedRange | SignalClass::Gaussian) => {
            Ok(gaussian_budget(n, k, eps, q.eta()?))
        }
        (Goal::Approximate, SignalClass::Binary) => Ok(gaussian_budget(n, k, eps, &Rational::one())),
        (Goal::Superset, SignalClass::Gaussian) => Err(Error::Unsupported(
            "Gaussian measurements are only analysed for approximate recovery".into(),
        )),
    }
}

pub const BUDGET_CSV_HEADER: &str = "regime,n,k,eps,eta,R,m";

/// One row per query in [`BUDGET_CSV_HEADER`] order.
pub fn budget_table_csv(queries: &[BudgetQuery]) -> Result<String> {
    let mut out = String::from(BUDGET_CSV_HEADER);
    out.push('\n');
    for q in queries {
        let m = measurement_budget(q)?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            q.regime_label(),
            q.n,
            q.k,
            format_rational(&q.eps),
            q.eta.as_ref().map_or_else(|| "-".to_string(), format_rational),
            q.r.map_or_else(|| "-".to_string(), |r| r.to_string()),
            m
        ));
    }
    Ok(out)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    cov / var
}

impl fmt::Display for BudgetQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={} k={} eps={}",
            self.regime_label(),
            self.n,
            self.k,
            format_rational(&self.eps)
        )
    }
}
