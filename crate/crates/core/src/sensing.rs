//! Sensing matrices for each recovery regime and the measurement map
//! `y = sign(Ax)`.
//!
//! Binary and power rows are evaluated in exact rational arithmetic, so a
//! zero measurement means the inner product is exactly zero. Dense rows
//! (Gaussian regime only) use `f64` with a configurable zero threshold.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

use crate::designs::{
    construct_list_disjunct, construct_list_union_free, field, header_fields, BinaryDesign,
    DesignClaim, DesignParams, DesignProperty, Status,
};
use crate::error::{Error, Result};
use crate::rational::{
    ceil_sqrt, floor_sqrt, floor_usize, format_rational, integer, is_in_half_open_unit,
    parse_rational, to_f64, Rational,
};
use crate::seed::derive_seed;
use crate::signals::{sign_binary, sign_ternary, SparseSignal, TernarySign};

/// Largest power-row value, in bits, that may be materialized.
pub const DEFAULT_POWER_BITS_CAP: u64 = 4096;

/// A 0/1 row given by its support (0-based, ascending).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryRow {
    support: Vec<usize>,
}

impl BinaryRow {
    pub fn new(support: impl IntoIterator<Item = usize>) -> Self {
        let mut support: Vec<usize> = support.into_iter().collect();
        support.sort_unstable();
        support.dedup();
        BinaryRow { support }
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }
}

/// Row whose `t`-th support index (0-based `t`) carries `base^t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PowerRow {
    support: Vec<usize>,
    base: Rational,
}

impl PowerRow {
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn base(&self) -> &Rational {
        &self.base
    }

    /// Rough size in bits of `base^exponent`.
    pub fn value_bits(&self, exponent: usize) -> u64 {
        let bits = self.base.numer().bits().max(self.base.denom().bits());
        bits.saturating_mul(exponent as u64)
    }

    fn check_bits(&self, exponent: usize, cap: u64) -> Result<()> {
        let bits = self.value_bits(exponent);
        if bits > cap {
            return Err(Error::ExponentTooLarge { bits, cap });
        }
        Ok(())
    }

    /// The entry at column `col`, or zero off the support.
    pub fn value_at(&self, col: usize) -> Result<Rational> {
        match self.support.binary_search(&col) {
            Ok(t) => {
                self.check_bits(t, DEFAULT_POWER_BITS_CAP)?;
                Ok(num_traits::pow(self.base.clone(), t))
            }
            Err(_) => Ok(Rational::zero()),
        }
    }

    /// Dense values of the row in dimension `n`.
    pub fn materialize(&self, n: usize) -> Result<Vec<Rational>> {
        self.materialize_with_cap(n, DEFAULT_POWER_BITS_CAP)
    }

    pub fn materialize_with_cap(&self, n: usize, cap: u64) -> Result<Vec<Rational>> {
        if let Some(&last) = self.support.last() {
            if last >= n {
                return Err(Error::IndexOutOfRange {
                    index: last + 1,
                    dim: n,
                });
            }
        }
        self.check_bits(self.support.len().saturating_sub(1), cap)?;
        let mut out = vec![Rational::zero(); n];
        let mut value = Rational::one();
        for &j in &self.support {
            out[j] = value.clone();
            value *= &self.base;
        }
        Ok(out)
    }
}

/// Expands a binary row into a power row with base `a > 0`.
pub fn power_row(z: &BinaryRow, a: Rational) -> Result<PowerRow> {
    if !a.is_positive() {
        return Err(Error::InvalidBase(format_rational(&a)));
    }
    Ok(PowerRow {
        support: z.support.clone(),
        base: a,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseRow {
    values: Vec<f64>,
}

impl DenseRow {
    pub fn new(values: Vec<f64>) -> Self {
        DenseRow { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Row {
    Binary(BinaryRow),
    Power(PowerRow),
    Dense(DenseRow),
}

impl Row {
    /// Columns with a nonzero entry.
    pub fn nonzero_columns(&self) -> Vec<usize> {
        match self {
            Row::Binary(r) => r.support.clone(),
            Row::Power(r) => r.support.clone(),
            Row::Dense(r) => r
                .values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(j, _)| j)
                .collect(),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Row::Binary(_) => "binary",
            Row::Power(_) => "power",
            Row::Dense(_) => "dense",
        }
    }

    /// Exact `⟨row, x⟩` for binary and power rows.
    pub fn exact_inner(&self, x: &SparseSignal) -> Result<Rational> {
        match self {
            Row::Binary(r) => Ok(x
                .iter()
                .filter(|(i, _)| r.support.binary_search(i).is_ok())
                .map(|(_, v)| v.clone())
                .sum()),
            Row::Power(r) => {
                let mut acc = Rational::zero();
                for (i, v) in x.iter() {
                    if let Ok(t) = r.support.binary_search(&i) {
                        r.check_bits(t, DEFAULT_POWER_BITS_CAP)?;
                        acc += v * num_traits::pow(r.base.clone(), t);
                    }
                }
                Ok(acc)
            }
            Row::Dense(_) => Err(Error::Unsupported(
                "exact inner product of a dense row".into(),
            )),
        }
    }

    /// Floating-point `⟨row, x⟩` for dense rows.
    pub fn float_inner(&self, x: &SparseSignal) -> Result<f64> {
        match self {
            Row::Dense(r) => Ok(x.iter().map(|(i, v)| r.values[i] * to_f64(v)).sum()),
            other => Ok(to_f64(&other.exact_inner(x)?)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Thm1,
    Thm3,
    Thm4,
    Thm5,
    Gaussian,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Thm1 => "thm1",
            Regime::Thm3 => "thm3",
            Regime::Thm4 => "thm4",
            Regime::Thm5 => "thm5",
            Regime::Gaussian => "gaussian",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thm1" => Ok(Regime::Thm1),
            "thm3" => Ok(Regime::Thm3),
            "thm4" => Ok(Regime::Thm4),
            "thm5" => Ok(Regime::Thm5),
            "gaussian" => Ok(Regime::Gaussian),
            _ => Err(Error::InvalidParams(format!("unknown regime {s:?}"))),
        }
    }
}

/// Regime together with the parameters the decoders need.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegimeParams {
    /// Binary list union-free rows.
    Thm1 { k: usize, eps: Rational },
    /// `split` binary rows, then groups of `group` power rows.
    Thm3 {
        k: usize,
        eps: Rational,
        split: usize,
        group: usize,
    },
    /// One power row with base `> 1 + eta` per disjunct row.
    Thm4 { k: usize, eps: Rational, eta: Rational },
    /// Groups of `2r + 1` power rows per disjunct row.
    Thm5 { k: usize, eps: Rational, r: usize },
    Gaussian,
}

impl RegimeParams {
    pub fn regime(&self) -> Regime {
        match self {
            RegimeParams::Thm1 { .. } => Regime::Thm1,
            RegimeParams::Thm3 { .. } => Regime::Thm3,
            RegimeParams::Thm4 { .. } => Regime::Thm4,
            RegimeParams::Thm5 { .. } => Regime::Thm5,
            RegimeParams::Gaussian => Regime::Gaussian,
        }
    }

    fn to_header(&self) -> String {
        match self {
            RegimeParams::Thm1 { k, eps } => format!("{k},{}", format_rational(eps)),
            RegimeParams::Thm3 {
                k,
                eps,
                split,
                group,
            } => format!("{k},{},{split},{group}", format_rational(eps)),
            RegimeParams::Thm4 { k, eps, eta } => {
                format!("{k},{},{}", format_rational(eps), format_rational(eta))
            }
            RegimeParams::Thm5 { k, eps, r } => format!("{k},{},{r}", format_rational(eps)),
            RegimeParams::Gaussian => "-".to_string(),
        }
    }

    fn from_header(regime: Regime, s: &str, lineno: usize) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        let bad = |what: &str| Error::parse(lineno, format!("bad params {s:?}: {what}"));
        let int = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| bad("expected an integer"))
        };
        let rat = |i: usize| -> Result<Rational> {
            parts
                .get(i)
                .and_then(|p| parse_rational(p).ok())
                .ok_or_else(|| bad("expected a rational"))
        };
        let expect_len = |n: usize| {
            if parts.len() == n {
                Ok(())
            } else {
                Err(bad(&format!("expected {n} fields")))
            }
        };
        match regime {
            Regime::Thm1 => {
                expect_len(2)?;
                Ok(RegimeParams::Thm1 { k: int(0)?, eps: rat(1)? })
            }
            Regime::Thm3 => {
                expect_len(4)?;
                Ok(RegimeParams::Thm3 {
                    k: int(0)?,
                    eps: rat(1)?,
                    split: int(2)?,
                    group: int(3)?,
                })
            }
            Regime::Thm4 => {
                expect_len(3)?;
                Ok(RegimeParams::Thm4 {
                    k: int(0)?,
                    eps: rat(1)?,
                    eta: rat(2)?,
                })
            }
            Regime::Thm5 => {
                expect_len(3)?;
                Ok(RegimeParams::Thm5 {
                    k: int(0)?,
                    eps: rat(1)?,
                    r: int(2)?,
                })
            }
            Regime::Gaussian => {
                if s == "-" {
                    Ok(RegimeParams::Gaussian)
                } else {
                    Err(bad("gaussian matrices take no params"))
                }
            }
        }
    }
}

/// Header-level summary of a design a matrix was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignRecord {
    pub rows: usize,
    pub claim: Option<DesignClaim>,
    pub seed: Option<u64>,
}

impl DesignRecord {
    fn of(design: &BinaryDesign) -> Self {
        DesignRecord {
            rows: design.rows(),
            claim: design.claim().cloned(),
            seed: design.seed(),
        }
    }

    pub fn is_certified(&self) -> bool {
        self.claim.as_ref().is_some_and(DesignClaim::is_certified)
    }
}

/// Designs and evaluation points a matrix was built from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance {
    pub designs: Vec<DesignRecord>,
    pub evaluation_points: Vec<Rational>,
}

impl Provenance {
    /// True when every underlying design was certified exhaustively.
    pub fn all_certified(&self) -> bool {
        self.designs.iter().all(DesignRecord::is_certified)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    n: usize,
    rows: Vec<Row>,
    params: RegimeParams,
    seed: Option<u64>,
    provenance: Provenance,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}

impl SensingMatrix {
    /// Assembles a matrix and checks it against its regime's layout.
    pub fn new(n: usize, rows: Vec<Row>, params: RegimeParams) -> Result<Self> {
        let m = SensingMatrix {
            n,
            rows,
            params,
            seed: None,
            provenance: Provenance::default(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    fn validate(&self) -> Result<()> {
        for (r, row) in self.rows.iter().enumerate() {
            let bad_index = match row {
                Row::Binary(b) => b.support.last().is_some_and(|&j| j >= self.n),
                Row::Power(p) => p.support.last().is_some_and(|&j| j >= self.n),
                Row::Dense(d) => d.values.len() != self.n,
            };
            if bad_index {
                return Err(invalid(format!("row {} does not fit dimension {}", r + 1, self.n)));
            }
        }
        let all = |kind: &str, rows: &[Row]| {
            rows.iter()
                .position(|r| r.kind() != kind)
                .map_or(Ok(()), |r| Err(invalid(format!("expected {kind} rows, row {} is not", r + 1))))
        };
        match &self.params {
            RegimeParams::Thm1 { .. } => all("binary", &self.rows),
            RegimeParams::Gaussian => all("dense", &self.rows),
            RegimeParams::Thm4 { .. } => {
                all("power", &self.rows)?;
                self.check_groups(&self.rows, 1)
            }
            RegimeParams::Thm5 { r, .. } => {
                all("power", &self.rows)?;
                self.check_groups(&self.rows, 2 * r + 1)
            }
            RegimeParams::Thm3 { split, group, .. } => {
                if *split > self.rows.len() {
                    return Err(invalid("thm3 split point beyond the last row"));
                }
                all("binary", &self.rows[..*split])?;
                all("power", &self.rows[*split..])?;
                self.check_groups(&self.rows[*split..], *group)
            }
        }
    }

    fn check_groups(&self, rows: &[Row], group: usize) -> Result<()> {
        if group == 0 || !rows.len().is_multiple_of(group) {
            return Err(invalid(format!(
                "{} power rows do not split into groups of {group}",
                rows.len()
            )));
        }
        for chunk in rows.chunks(group) {
            let powers: Vec<&PowerRow> = chunk
                .iter()
                .filter_map(|r| match r {
                    Row::Power(p) => Some(p),
                    _ => None,
                })
                .collect();
            if powers.iter().any(|p| p.support != powers[0].support) {
                return Err(invalid("power rows of one group must share a support"));
            }
            if !powers.iter().map(|p| &p.base).all_unique() {
                return Err(invalid("power rows of one group need distinct bases"));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn params(&self) -> &RegimeParams {
        &self.params
    }

    pub fn regime(&self) -> Regime {
        self.params.regime()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// For the binary rows in `range`, the set `B_j` of (range-relative)
    /// rows with a one in column `j`.
    pub fn column_supports(&self, range: std::ops::Range<usize>) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.n];
        for (r, row) in self.rows[range].iter().enumerate() {
            for j in row.nonzero_columns() {
                cols[j].push(r);
            }
        }
        cols
    }

    /// The 0/1 pattern of nonzero entries as a design.
    pub fn zero_pattern(&self) -> BinaryDesign {
        let cols = self
            .column_supports(0..self.rows.len())
            .into_iter()
            .map(|c| c.into_iter().collect())
            .collect();
        BinaryDesign::from_columns(self.rows.len(), cols)
            .expect("row indices come from the matrix itself")
    }
}

fn check_eps(eps: &Rational) -> Result<()> {
    if !is_in_half_open_unit(eps) {
        return Err(invalid(format!(
            "eps must lie in (0, 1], got {}",
            format_rational(eps)
        )));
    }
    Ok(())
}

fn check_fits(n: usize, k: usize, l: usize) -> Result<()> {
    if k == 0 || k + l > n {
        return Err(invalid(format!("need 1 <= k and k + l <= n, got k={k} l={l} n={n}")));
    }
    Ok(())
}

fn binary_rows(design: &BinaryDesign) -> impl Iterator<Item = BinaryRow> + '_ {
    design.row_supports().into_iter().map(|s| BinaryRow { support: s })
}

/// Integer evaluation points `2, 3, …, count + 1`.
pub fn evaluation_points(count: usize) -> Vec<Rational> {
    (2..count as i64 + 2).map(integer).collect()
}

fn power_groups(design: &BinaryDesign, points: &[Rational]) -> Vec<Row> {
    binary_rows(design)
        .flat_map(|z| {
            points.iter().map(move |a| {
                Row::Power(PowerRow {
                    support: z.support.clone(),
                    base: a.clone(),
                })
            })
        })
        .collect()
}

/// List sizes and replication counts derived for the two-stage matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoStageShape {
    /// `ℓ₁ = max(1, ⌊ζk/2⌋)` for the union-free block.
    pub l1: usize,
    /// `⌈k(1+ζ)⌉` for the disjunct design.
    pub k2: usize,
    /// `ℓ₂ = max(1, ⌊εk/2⌋)`.
    pub l2: usize,
    /// Power rows per disjunct row, `max(1, ⌈ζk⌉)`.
    pub group: usize,
}

/// `ζ = √(ε/k)`; every rounded quantity uses `ζk = √(εk)` exactly.
pub fn two_stage_shape(k: usize, eps: &Rational) -> TwoStageShape {
    let eps_k = eps * integer(k as i64);
    // ⌊√(εk)/2⌋ = ⌊√(εk/4)⌋
    let l1 = floor_sqrt(&(&eps_k / integer(4))).max(1);
    let zeta_k_ceil = ceil_sqrt(&eps_k);
    TwoStageShape {
        l1,
        k2: k + zeta_k_ceil,
        l2: floor_usize(&(&eps_k / integer(2))).max(1),
        group: zeta_k_ceil.max(1),
    }
}

/// `ζ = √(ε/k)` as a float, for reporting.
pub fn zeta(k: usize, eps: &Rational) -> f64 {
    (to_f64(eps) / k as f64).sqrt()
}

/// List union-free binary matrix with `ℓ = max(1, ⌊εk/2⌋)`, `α = 1/2`.
pub fn build_thm1_matrix(n: usize, k: usize, eps: &Rational, seed: u64) -> Result<SensingMatrix> {
    check_eps(eps)?;
    let l = floor_usize(&(eps * integer(k as i64) / integer(2))).max(1);
    check_fits(n, k, l)?;
    let design = construct_list_union_free(&DesignParams::new(n, k, l, seed))?;
    let rows = binary_rows(&design).map(Row::Binary).collect();
    Ok(SensingMatrix::new(n, rows, RegimeParams::Thm1 { k, eps: eps.clone() })?
        .with_seed(seed)
        .with_provenance(Provenance {
            designs: vec![DesignRecord::of(&design)],
            evaluation_points: Vec::new(),
        }))
}

/// Union-free block stacked over power-row groups from a list-disjunct
/// design, with `ζ = √(ε/k)`.
pub fn build_thm3_matrix(n: usize, k: usize, eps: &Rational, seed: u64) -> Result<SensingMatrix> {
    check_eps(eps)?;
    if k < 2 {
        return Err(invalid("the two-stage construction needs k >= 2"));
    }
    let shape = two_stage_shape(k, eps);
    check_fits(n, k, shape.l1)?;
    check_fits(n, shape.k2, shape.l2)?;
    let first = construct_list_union_free(&DesignParams::new(n, k, shape.l1, derive_seed(seed, 0)))?;
    let second = construct_list_disjunct(&DesignParams::new(n, shape.k2, shape.l2, derive_seed(seed, 1)))?;
    let points = evaluation_points(shape.group);
    let mut rows: Vec<Row> = binary_rows(&first).map(Row::Binary).collect();
    let split = rows.len();
    rows.extend(power_groups(&second, &points));
    let params = RegimeParams::Thm3 {
        k,
        eps: eps.clone(),
        split,
        group: shape.group,
    };
    Ok(SensingMatrix::new(n, rows, params)?
        .with_seed(seed)
        .with_provenance(Provenance {
            designs: vec![DesignRecord::of(&first), DesignRecord::of(&second)],
            evaluation_points: points,
        }))
}

/// `⌈η⌉ + 2`, an integer strictly above `1 + η`.
pub fn bounded_range_base(eta: &Rational) -> Rational {
    Rational::from_integer(eta.ceil().to_integer() + BigInt::from(2))
}

/// One power row per row of a `(k, max(1, ⌊εk⌋))`-list disjunct design,
/// with base `⌈η⌉ + 2`.
pub fn build_thm4_matrix(
    n: usize,
    k: usize,
    eps: &Rational,
    eta: &Rational,
    seed: u64,
) -> Result<SensingMatrix> {
    check_eps(eps)?;
    if *eta < Rational::one() {
        return Err(invalid("eta must be at least 1"));
    }
    let l = floor_usize(&(eps * integer(k as i64))).max(1);
    check_fits(n, k, l)?;
    let design = construct_list_disjunct(&DesignParams::new(n, k, l, seed))?;
    let points = vec![bounded_range_base(eta)];
    let rows = power_groups(&design, &points);
    let params = RegimeParams::Thm4 {
        k,
        eps: eps.clone(),
        eta: eta.clone(),
    };
    Ok(SensingMatrix::new(n, rows, params)?
        .with_seed(seed)
        .with_provenance(Provenance {
            designs: vec![DesignRecord::of(&design)],
            evaluation_points: points,
        }))
}

/// `2R + 1` power rows (bases `2, …, 2R+2`) per row of a
/// `(k, max(1, ⌊εk⌋))`-list disjunct design.
pub fn build_thm5_matrix(n: usize, k: usize, eps: &Rational, r: usize, seed: u64) -> Result<SensingMatrix> {
    check_eps(eps)?;
    let l = floor_usize(&(eps * integer(k as i64))).max(1);
    check_fits(n, k, l)?;
    let design = construct_list_disjunct(&DesignParams::new(n, k, l, seed))?;
    let points = evaluation_points(2 * r + 1);
    let rows = power_groups(&design, &points);
    let params = RegimeParams::Thm5 {
        k,
        eps: eps.clone(),
        r,
    };
    Ok(SensingMatrix::new(n, rows, params)?
        .with_seed(seed)
        .with_provenance(Provenance {
            designs: vec![DesignRecord::of(&design)],
            evaluation_points: points,
        }))
}

/// `m` rows of i.i.d. standard normals, row-major from one seeded stream.
pub fn build_gaussian_matrix(n: usize, m: usize, seed: u64) -> Result<SensingMatrix> {
    if m == 0 || n == 0 {
        return Err(invalid("gaussian matrix needs m >= 1 and n >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..m)
        .map(|_| Row::Dense(DenseRow::new((0..n).map(|_| rng.sample(StandardNormal)).collect())))
        .collect();
    Ok(SensingMatrix::new(n, rows, RegimeParams::Gaussian)?.with_seed(seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureMode {
    /// `sign` with outputs in {−1, 0, +1}.
    Ternary,
    /// `sign*` with outputs in {−1, +1}.
    Strict,
}

impl FromStr for MeasureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ternary" => Ok(MeasureMode::Ternary),
            "strict" => Ok(MeasureMode::Strict),
            _ => Err(invalid(format!("unknown measurement mode {s:?}"))),
        }
    }
}

impl MeasureMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasureMode::Ternary => "ternary",
            MeasureMode::Strict => "strict",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MeasurementVector {
    mode: MeasureMode,
    entries: Vec<TernarySign>,
}

impl MeasurementVector {
    pub fn new(mode: MeasureMode, entries: Vec<TernarySign>) -> Result<Self> {
        if mode == MeasureMode::Strict && entries.iter().any(|s| s.is_zero()) {
            return Err(invalid("strict measurements cannot contain 0"));
        }
        Ok(MeasurementVector { mode, entries })
    }

    pub fn mode(&self) -> MeasureMode {
        self.mode
    }

    pub fn entries(&self) -> &[TernarySign] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses one line of space-separated `-1`, `0`, `1`.
    pub fn parse(text: &str, mode: MeasureMode) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            for tok in line.split_whitespace() {
                let s = tok
                    .parse::<i8>()
                    .ok()
                    .and_then(TernarySign::from_i8)
                    .ok_or_else(|| Error::parse(lineno + 1, format!("bad sign {tok:?}")))?;
                entries.push(s);
            }
        }
        MeasurementVector::new(mode, entries)
    }
}

impl fmt::Display for MeasurementVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.entries.iter().map(|s| s.as_i8()).join(" "))
    }
}

/// `y = sign(Ax)` with a zero threshold of 0 for dense rows.
pub fn measure(a: &SensingMatrix, x: &SparseSignal, mode: MeasureMode) -> Result<MeasurementVector> {
    measure_with_threshold(a, x, mode, 0.0)
}

/// As [`measure`]; dense inner products with `|v| <= tau` count as zero in
/// ternary mode. Binary and power rows are exact and ignore `tau`.
pub fn measure_with_threshold(
    a: &SensingMatrix,
    x: &SparseSignal,
    mode: MeasureMode,
    tau: f64,
) -> Result<MeasurementVector> {
    if x.dim() != a.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: x.dim(),
        });
    }
    let entries = a
        .rows
        .iter()
        .map(|row| match row {
            Row::Dense(_) => {
                let v = row.float_inner(x)?;
                Ok(match mode {
                    MeasureMode::Ternary if v.abs() <= tau => TernarySign::Zero,
                    MeasureMode::Ternary if v > 0.0 => TernarySign::Pos,
                    MeasureMode::Ternary => TernarySign::Neg,
                    MeasureMode::Strict if v >= 0.0 => TernarySign::Pos,
                    MeasureMode::Strict => TernarySign::Neg,
                })
            }
            _ => {
                let v = row.exact_inner(x)?;
                Ok(match mode {
                    MeasureMode::Ternary => sign_ternary(&v),
                    MeasureMode::Strict => sign_binary(&v).into(),
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MeasurementVector { mode, entries })
}

fn write_claim(f: &mut fmt::Formatter<'_>, d: &DesignRecord) -> fmt::Result {
    let c = d.claim.as_ref();
    let opt = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
    writeln!(
        f,
        "# design m={} property={} k={} l={} alpha={} status={} seed={}",
        d.rows,
        c.map_or("-", |c| c.property.as_str()),
        opt(c.map(|c| c.k)),
        opt(c.map(|c| c.l)),
        c.and_then(|c| c.alpha.as_ref())
            .map_or_else(|| "-".to_string(), format_rational),
        c.map_or(Status::Unverified, |c| c.status).as_str(),
        d.seed.map_or_else(|| "-".to_string(), |s| s.to_string()),
    )
}

impl fmt::Display for SensingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "matrix regime={} n={} m={} params={} seed={}",
            self.regime(),
            self.n,
            self.rows.len(),
            self.params.to_header(),
            self.seed.map_or_else(|| "-".to_string(), |s| s.to_string()),
        )?;
        for d in &self.provenance.designs {
            write_claim(f, d)?;
        }
        if !self.provenance.evaluation_points.is_empty() {
            writeln!(
                f,
                "# points {}",
                self.provenance
                    .evaluation_points
                    .iter()
                    .map(format_rational)
                    .join(" ")
            )?;
        }
        for row in &self.rows {
            let one_based = |s: &[usize]| s.iter().map(|j| (j + 1).to_string()).join(" ");
            match row {
                Row::Binary(b) => writeln!(f, "B {}", one_based(&b.support))?,
                Row::Power(p) => writeln!(
                    f,
                    "P a={} {}",
                    format_rational(&p.base),
                    one_based(&p.support)
                )?,
                Row::Dense(d) => writeln!(f, "D {}", d.values.iter().join(" "))?,
            }
        }
        Ok(())
    }
}

fn parse_design_record(line: &str, lineno: usize) -> Result<DesignRecord> {
    let fields = header_fields(line, "design", lineno)?;
    let opt_usize = |key: &str| -> Result<Option<usize>> {
        match field(&fields, key, lineno)? {
            "-" => Ok(None),
            v => v
                .parse()
                .map(Some)
                .map_err(|_| Error::parse(lineno, format!("bad {key} {v:?}"))),
        }
    };
    let rows = opt_usize("m")?.ok_or_else(|| Error::parse(lineno, "m is required"))?;
    let status = match field(&fields, "status", lineno)? {
        "certified" => Status::Certified,
        "unverified" => Status::Unverified,
        s => return Err(Error::parse(lineno, format!("bad status {s:?}"))),
    };
    let claim = match field(&fields, "property", lineno)? {
        "-" => None,
        p => Some(DesignClaim {
            property: p
                .parse::<DesignProperty>()
                .map_err(|e| Error::parse(lineno, e.to_string()))?,
            k: opt_usize("k")?.ok_or_else(|| Error::parse(lineno, "k is required"))?,
            l: opt_usize("l")?.ok_or_else(|| Error::parse(lineno, "l is required"))?,
            alpha: match field(&fields, "alpha", lineno)? {
                "-" => None,
                a => Some(parse_rational(a).map_err(|e| Error::parse(lineno, e.to_string()))?),
            },
            status,
        }),
    };
    let seed = match field(&fields, "seed", lineno)? {
        "-" => None,
        s => Some(
            s.parse()
                .map_err(|_| Error::parse(lineno, format!("bad seed {s:?}")))?,
        ),
    };
    Ok(DesignRecord { rows, claim, seed })
}

fn parse_indices(tokens: &[&str], n: usize, lineno: usize) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(tokens.len());
    for tok in tokens {
        match tok.parse::<usize>() {
            Ok(j) if j >= 1 && j <= n => out.push(j - 1),
            _ => return Err(Error::parse(lineno, format!("bad column index {tok:?}"))),
        }
    }
    if out.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::parse(lineno, "column indices must be strictly increasing"));
    }
    Ok(out)
}

impl FromStr for SensingMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (lineno, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty matrix file"))?;
        let fields = header_fields(header, "matrix", lineno)?;
        let regime: Regime = field(&fields, "regime", lineno)?
            .parse()
            .map_err(|e: Error| Error::parse(lineno, e.to_string()))?;
        let n: usize = field(&fields, "n", lineno)?
            .parse()
            .map_err(|_| Error::parse(lineno, "bad n"))?;
        let m: usize = field(&fields, "m", lineno)?
            .parse()
            .map_err(|_| Error::parse(lineno, "bad m"))?;
        let params = RegimeParams::from_header(regime, field(&fields, "params", lineno)?, lineno)?;
        let seed = match field(&fields, "seed", lineno)? {
            "-" => None,
            v => Some(v.parse().map_err(|_| Error::parse(lineno, "bad seed"))?),
        };

        let mut provenance = Provenance::default();
        let mut rows = Vec::with_capacity(m);
        for (lineno, line) in lines {
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if rest.starts_with("design ") {
                    provenance.designs.push(parse_design_record(rest, lineno)?);
                } else if let Some(points) = rest.strip_prefix("points") {
                    provenance.evaluation_points = points
                        .split_whitespace()
                        .map(parse_rational)
                        .collect::<Result<_>>()
                        .map_err(|e| Error::parse(lineno, e.to_string()))?;
                }
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let row = match tokens[0] {
                "B" => Row::Binary(BinaryRow {
                    support: parse_indices(&tokens[1..], n, lineno)?,
                }),
                "P" => {
                    let base = tokens
                        .get(1)
                        .and_then(|t| t.strip_prefix("a="))
                        .ok_or_else(|| Error::parse(lineno, "power row needs `a=<p/q>`"))?;
                    let base = parse_rational(base).map_err(|e| Error::parse(lineno, e.to_string()))?;
                    let z = BinaryRow {
                        support: parse_indices(&tokens[2..], n, lineno)?,
                    };
                    Row::Power(power_row(&z, base).map_err(|e| Error::parse(lineno, e.to_string()))?)
                }
                "D" => Row::Dense(DenseRow::new(
                    tokens[1..]
                        .iter()
                        .map(|t| {
                            t.parse::<f64>()
                                .ok()
                                .filter(|v| v.is_finite())
                                .ok_or_else(|| Error::parse(lineno, format!("bad float {t:?}")))
                        })
                        .collect::<Result<_>>()?,
                )),
                other => return Err(Error::parse(lineno, format!("unknown row kind {other:?}"))),
            };
            rows.push(row);
        }
        if rows.len() != m {
            return Err(Error::parse(
                lineno,
                format!("header says m={m}, found {} rows", rows.len()),
            ));
        }
        let mut matrix = SensingMatrix::new(n, rows, params)?.with_provenance(provenance);
        matrix.seed = seed;
        Ok(matrix)
    }
}

/// `max(1, ⌊εk/2⌋)`, the list size of the approximate-recovery design.
pub fn approximate_list_size(k: usize, eps: &Rational) -> usize {
    floor_usize(&(eps * integer(k as i64) / integer(2))).max(1)
}

/// `max(1, ⌊εk⌋)`, the list size of the single-stage superset designs.
pub fn superset_list_size(k: usize, eps: &Rational) -> usize {
    floor_usize(&(eps * integer(k as i64))).max(1)
}
