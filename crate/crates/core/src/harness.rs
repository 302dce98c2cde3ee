//! Experiment configuration, signal families and batch runs.
//!
//! A run builds (or loads) one matrix, then measures and decodes every
//! signal of a family. Trial `t` uses seed `derive_seed(master, t)`, so
//! rows do not depend on scheduling. CSV output is byte-identical for
//! identical configs; wall time is kept out of it.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_traits::{One, Zero};
use rand::seq::{IndexedRandom, IteratorRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::gaussian_budget;
use crate::error::{Error, Result};
use crate::rational::{binomial, format_rational, integer, parse_rational, ratio, Rational};
use crate::recovery::{
    decode_approximate, decode_l0_report, decode_superset, decode_superset_bounded_range,
    decode_superset_same_sign, superset_to_approximate, RecoveryReport,
    CSV_HEADER,
};
use crate::seed::derive_seed;
use crate::sensing::{
    build_gaussian_matrix, build_thm1_matrix, build_thm3_matrix, build_thm4_matrix,
    build_thm5_matrix, measure_with_threshold, MeasureMode, Regime, RegimeParams, SensingMatrix,
};
use crate::signals::SparseSignal;

/// Largest exhaustive family, counted before filtering.
pub const EXHAUSTIVE_CAP: u128 = 10_000_000;
/// Redraws allowed for one random signal that fails the family filters.
pub const FILTER_RESAMPLE_CAP: usize = 1000;
/// Grid resolution of uniformly drawn magnitudes.
const MAGNITUDE_GRID: i64 = 1024;

/// Entry values a family draws from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueSet {
    Finite(Vec<Rational>),
    /// Random sign times a magnitude on a 1/1024 grid of `[1, max]`.
    Magnitudes { max: Rational },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyMode {
    Exhaustive,
    Random { trials: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyDescriptor {
    pub values: ValueSet,
    pub mode: FamilyMode,
    pub include_zero: bool,
    /// Keep only signals with `κ(x) <= max_kappa`.
    pub max_kappa: Option<Rational>,
    /// Keep only signals with `ρ(x) <= max_rho`.
    pub max_rho: Option<usize>,
}

impl FamilyDescriptor {
    pub fn exhaustive(values: Vec<Rational>) -> Self {
        FamilyDescriptor {
            values: ValueSet::Finite(values),
            mode: FamilyMode::Exhaustive,
            include_zero: false,
            max_kappa: None,
            max_rho: None,
        }
    }

    fn keeps(&self, x: &SparseSignal) -> bool {
        let kappa_ok = match &self.max_kappa {
            Some(eta) => x.is_zero() || x.dynamic_range().is_ok_and(|k| k <= *eta),
            None => true,
        };
        kappa_ok && self.max_rho.is_none_or(|r| x.min_same_sign_count() <= r)
    }
}

fn exhaustive_count(n: usize, k: usize, v: usize, include_zero: bool) -> u128 {
    let start = usize::from(!include_zero);
    (start..=k.min(n)).fold(0u128, |acc, s| {
        let vs = (v as u128).checked_pow(s as u32).unwrap_or(u128::MAX);
        acc.saturating_add(binomial(n, s).saturating_mul(vs))
    })
}

fn draw_value(values: &ValueSet, rng: &mut ChaCha8Rng) -> Rational {
    match values {
        ValueSet::Finite(v) => v.choose(rng).expect("nonempty value set").clone(),
        ValueSet::Magnitudes { max } => {
            let u = rng.random_range(0..=MAGNITUDE_GRID);
            let mag = Rational::one() + (max - Rational::one()) * ratio(u, MAGNITUDE_GRID);
            if rng.random_bool(0.5) {
                -mag
            } else {
                mag
            }
        }
    }
}

/// Random signal with support size uniform in `[1, k]` (or `[0, k]` with
/// zero included), redrawn until it passes the filters.
fn random_signal(desc: &FamilyDescriptor, n: usize, k: usize, seed: u64) -> Result<SparseSignal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = usize::from(!desc.include_zero);
    for _ in 0..FILTER_RESAMPLE_CAP {
        let size = rng.random_range(lo..=k.min(n));
        let mut support = (0..n).choose_multiple(&mut rng, size);
        support.sort_unstable();
        let entries: Vec<(usize, Rational)> = support
            .into_iter()
            .map(|j| (j, draw_value(&desc.values, &mut rng)))
            .collect();
        let x = SparseSignal::new(n, entries)?;
        if desc.keeps(&x) {
            return Ok(x);
        }
    }
    Err(Error::ResampleCapExceeded(FILTER_RESAMPLE_CAP))
}

fn validate_family(desc: &FamilyDescriptor) -> Result<()> {
    match &desc.values {
        ValueSet::Finite(v) if v.is_empty() => {
            Err(Error::InvalidParams("value set is empty".into()))
        }
        ValueSet::Finite(v) if v.iter().any(Zero::is_zero) => {
            Err(Error::InvalidParams("value set contains 0".into()))
        }
        ValueSet::Magnitudes { max } if *max < Rational::one() => {
            Err(Error::InvalidParams("magnitude bound must be at least 1".into()))
        }
        _ => Ok(()),
    }
}

/// The family's signals in enumeration order.
///
/// Exhaustive families list support sizes in increasing order, supports
/// lexicographically, then value tuples with the last position varying
/// fastest. Random families draw signal `t` from `derive_seed(seed, t)`.
pub fn generate_signal_family(
    desc: &FamilyDescriptor,
    n: usize,
    k: usize,
    seed: u64,
) -> Result<Vec<SparseSignal>> {
    validate_family(desc)?;
    match desc.mode {
        FamilyMode::Random { trials } => (0..trials)
            .into_par_iter()
            .map(|t| random_signal(desc, n, k, derive_seed(seed, t)))
            .collect(),
        FamilyMode::Exhaustive => {
            let ValueSet::Finite(values) = &desc.values else {
                return Err(Error::InvalidParams(
                    "exhaustive families need a finite value set".into(),
                ));
            };
            let count = exhaustive_count(n, k, values.len(), desc.include_zero);
            if count > EXHAUSTIVE_CAP {
                return Err(Error::InstanceTooLarge {
                    count,
                    cap: EXHAUSTIVE_CAP,
                });
            }
            let mut out = Vec::new();
            if desc.include_zero {
                out.push(SparseSignal::zero(n));
            }
            for size in 1..=k.min(n) {
                for support in (0..n).combinations(size) {
                    for vals in (0..size).map(|_| values.iter()).multi_cartesian_product() {
                        let x = SparseSignal::new(
                            n,
                            support.iter().copied().zip(vals.into_iter().cloned()),
                        )?;
                        if desc.keeps(&x) {
                            out.push(x);
                        }
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Recovery guarantee a run is scored against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunGoal {
    Approximate,
    Superset,
}

impl RunGoal {
    pub fn as_str(self) -> &'static str {
        match self {
            RunGoal::Approximate => "approximate",
            RunGoal::Superset => "superset",
        }
    }

    fn default_for(regime: Regime) -> Self {
        match regime {
            Regime::Thm1 | Regime::Gaussian => RunGoal::Approximate,
            Regime::Thm3 | Regime::Thm4 | Regime::Thm5 => RunGoal::Superset,
        }
    }
}

impl FromStr for RunGoal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "approximate" => Ok(RunGoal::Approximate),
            "superset" => Ok(RunGoal::Superset),
            _ => Err(Error::InvalidParams(format!("unknown goal {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub regime: Regime,
    pub n: usize,
    pub k: usize,
    pub eps: Rational,
    /// Dynamic-range bound (thm4, Gaussian).
    pub eta: Option<Rational>,
    /// Minority-sign bound (thm5).
    pub r: Option<usize>,
    /// Gaussian row count; defaults to the Gaussian budget.
    pub m: Option<usize>,
    /// Gaussian zero threshold.
    pub tau: f64,
    /// Measurement mode for Gaussian runs; combinatorial runs are ternary.
    pub mode: MeasureMode,
    /// Superset regimes may be scored as approximate after trimming to `k`.
    pub goal: RunGoal,
    pub family: FamilyDescriptor,
    pub seed: u64,
    /// Load the matrix from this file instead of building it.
    pub matrix: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Config with the regime's defaults and an exhaustive family.
    pub fn new(regime: Regime, n: usize, k: usize, eps: Rational, values: Vec<Rational>) -> Self {
        ExperimentConfig {
            regime,
            n,
            k,
            eps,
            eta: None,
            r: None,
            m: None,
            tau: 0.0,
            mode: if regime == Regime::Gaussian {
                MeasureMode::Strict
            } else {
                MeasureMode::Ternary
            },
            goal: RunGoal::default_for(regime),
            family: FamilyDescriptor::exhaustive(values),
            seed: 0,
            matrix: None,
            output: None,
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

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn eta(&self) -> Result<&Rational> {
        self.eta
            .as_ref()
            .ok_or_else(|| Error::InvalidParams(format!("{} runs need eta", self.regime)))
    }

    /// Family with the regime's side condition applied as a filter.
    pub fn effective_family(&self) -> Result<FamilyDescriptor> {
        let mut fam = self.family.clone();
        match self.regime {
            Regime::Thm4 | Regime::Gaussian => {
                let eta = self.eta()?.clone();
                fam.max_kappa = Some(fam.max_kappa.map_or(eta.clone(), |k| k.min(eta)));
            }
            Regime::Thm5 => {
                let r = self
                    .r
                    .ok_or_else(|| Error::InvalidParams("thm5 runs need R".into()))?;
                fam.max_rho = Some(fam.max_rho.map_or(r, |v| v.min(r)));
            }
            Regime::Thm1 | Regime::Thm3 => {}
        }
        Ok(fam)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.n {
            return Err(Error::InvalidParams(format!(
                "need 1 <= k <= n, got k={} n={}",
                self.k, self.n
            )));
        }
        if self.goal == RunGoal::Superset && matches!(self.regime, Regime::Thm1 | Regime::Gaussian) {
            return Err(Error::InvalidParams(format!(
                "{} runs cannot be scored as superset recovery",
                self.regime
            )));
        }
        if self.regime != Regime::Gaussian && self.mode != MeasureMode::Ternary {
            return Err(Error::InvalidParams(
                "combinatorial regimes use ternary measurements".into(),
            ));
        }
        self.effective_family()?;
        validate_family(&self.family)
    }

    /// Builds the regime's matrix from `seed`, or loads it from `matrix`.
    pub fn matrix(&self) -> Result<SensingMatrix> {
        if let Some(path) = &self.matrix {
            let a: SensingMatrix = std::fs::read_to_string(path)?.parse()?;
            if a.regime() != self.regime || a.n() != self.n {
                return Err(Error::RegimeMismatch {
                    expected: format!("{} n={}", self.regime, self.n),
                    found: format!("{} n={}", a.regime(), a.n()),
                });
            }
            return Ok(a);
        }
        let (n, k, eps, seed) = (self.n, self.k, &self.eps, self.seed);
        match self.regime {
            Regime::Thm1 => build_thm1_matrix(n, k, eps, seed),
            Regime::Thm3 => build_thm3_matrix(n, k, eps, seed),
            Regime::Thm4 => build_thm4_matrix(n, k, eps, self.eta()?, seed),
            Regime::Thm5 => build_thm5_matrix(
                n,
                k,
                eps,
                self.r.ok_or_else(|| Error::InvalidParams("thm5 runs need R".into()))?,
                seed,
            ),
            Regime::Gaussian => {
                let m = match self.m {
                    Some(m) => m,
                    None => gaussian_budget(n, k, eps, self.eta()?) as usize,
                };
                build_gaussian_matrix(n, m, seed)
            }
        }
    }
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" => Some(true),
        "false" => Some(false),
        _ => None,
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut kv: Vec<(usize, String, String)> = Vec::new();
        for (i, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, "expected `key = value`"))?;
            let key = key.trim().to_string();
            if kv.iter().any(|(_, k, _)| *k == key) {
                return Err(Error::parse(i + 1, format!("duplicate key {key:?}")));
            }
            kv.push((i + 1, key, value.trim().to_string()));
        }
        let get = |key: &str| kv.iter().find(|(_, k, _)| k == key).map(|(l, _, v)| (*l, v.as_str()));
        if let Some((line, key, _)) = kv.iter().find(|(_, k, _)| !CONFIG_KEYS.contains(&k.as_str())) {
            return Err(Error::parse(*line, format!("unknown key {key:?}")));
        }
        let required = |key: &str| get(key).ok_or_else(|| Error::parse(0, format!("missing key {key:?}")));
        let usize_of = |key: &str| -> Result<Option<usize>> {
            get(key)
                .map(|(l, v)| v.parse().map_err(|_| Error::parse(l, format!("bad {key} {v:?}"))))
                .transpose()
        };
        let rational_of = |key: &str| -> Result<Option<Rational>> {
            get(key)
                .map(|(l, v)| parse_rational(v).map_err(|e| Error::parse(l, e.to_string())))
                .transpose()
        };
        let wrap = |l: usize| move |e: Error| Error::parse(l, e.to_string());

        let (l, regime) = required("regime")?;
        let regime: Regime = regime.parse().map_err(wrap(l))?;
        let n = usize_of("n")?.ok_or_else(|| Error::parse(0, "missing key \"n\""))?;
        let k = usize_of("k")?.ok_or_else(|| Error::parse(0, "missing key \"k\""))?;
        let eps = rational_of("eps")?.ok_or_else(|| Error::parse(0, "missing key \"eps\""))?;
        let mut cfg = ExperimentConfig::new(regime, n, k, eps, Vec::new());
        cfg.eta = rational_of("eta")?;
        cfg.r = usize_of("R")?;
        cfg.m = usize_of("m")?;
        if let Some((l, v)) = get("tau") {
            cfg.tau = v
                .parse::<f64>()
                .ok()
                .filter(|t| t.is_finite() && *t >= 0.0)
                .ok_or_else(|| Error::parse(l, format!("bad tau {v:?}")))?;
        }
        if let Some((l, v)) = get("mode") {
            cfg.mode = v.parse().map_err(wrap(l))?;
        }
        if let Some((l, v)) = get("goal") {
            cfg.goal = v.parse().map_err(wrap(l))?;
        }
        let (l, values) = required("values")?;
        cfg.family.values = if values == "uniform" {
            ValueSet::Magnitudes {
                max: cfg
                    .eta
                    .clone()
                    .ok_or_else(|| Error::parse(l, "uniform values need eta"))?,
            }
        } else {
            ValueSet::Finite(
                values
                    .split(',')
                    .map(|v| parse_rational(v.trim()))
                    .collect::<Result<_>>()
                    .map_err(wrap(l))?,
            )
        };
        let (l, trials) = required("trials")?;
        cfg.family.mode = if trials == "exhaustive" {
            FamilyMode::Exhaustive
        } else {
            FamilyMode::Random {
                trials: trials
                    .parse()
                    .map_err(|_| Error::parse(l, format!("bad trials {trials:?}")))?,
            }
        };
        if let Some((l, v)) = get("include_zero") {
            cfg.family.include_zero =
                parse_bool(v).ok_or_else(|| Error::parse(l, format!("bad include_zero {v:?}")))?;
        }
        cfg.family.max_kappa = rational_of("max_kappa")?;
        cfg.family.max_rho = usize_of("max_rho")?;
        if let Some((l, v)) = get("seed") {
            cfg.seed = v
                .parse()
                .map_err(|_| Error::parse(l, format!("bad seed {v:?}")))?;
        }
        cfg.matrix = get("matrix").map(|(_, v)| PathBuf::from(v));
        cfg.output = get("output").map(|(_, v)| PathBuf::from(v));
        cfg.validate()?;
        Ok(cfg)
    }
}

const CONFIG_KEYS: &[&str] = &[
    "regime",
    "n",
    "k",
    "eps",
    "eta",
    "R",
    "m",
    "tau",
    "mode",
    "goal",
    "values",
    "trials",
    "include_zero",
    "max_kappa",
    "max_rho",
    "seed",
    "matrix",
    "output",
];

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "regime = {}", self.regime)?;
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "k = {}", self.k)?;
        writeln!(f, "eps = {}", format_rational(&self.eps))?;
        if let Some(eta) = &self.eta {
            writeln!(f, "eta = {}", format_rational(eta))?;
        }
        if let Some(r) = self.r {
            writeln!(f, "R = {r}")?;
        }
        if let Some(m) = self.m {
            writeln!(f, "m = {m}")?;
        }
        if self.regime == Regime::Gaussian {
            writeln!(f, "tau = {}", self.tau)?;
        }
        writeln!(f, "mode = {}", self.mode.as_str())?;
        writeln!(f, "goal = {}", self.goal.as_str())?;
        match &self.family.values {
            ValueSet::Finite(v) => writeln!(f, "values = {}", v.iter().map(format_rational).join(", "))?,
            ValueSet::Magnitudes { .. } => writeln!(f, "values = uniform")?,
        }
        match self.family.mode {
            FamilyMode::Exhaustive => writeln!(f, "trials = exhaustive")?,
            FamilyMode::Random { trials } => writeln!(f, "trials = {trials}")?,
        }
        writeln!(f, "include_zero = {}", self.family.include_zero)?;
        if let Some(kappa) = &self.family.max_kappa {
            writeln!(f, "max_kappa = {}", format_rational(kappa))?;
        }
        if let Some(rho) = self.family.max_rho {
            writeln!(f, "max_rho = {rho}")?;
        }
        writeln!(f, "seed = {}", self.seed)?;
        if let Some(p) = &self.matrix {
            writeln!(f, "matrix = {}", p.display())?;
        }
        if let Some(p) = &self.output {
            writeln!(f, "output = {}", p.display())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRow {
    pub seed: u64,
    pub report: RecoveryReport,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Summary {
    pub trials: usize,
    pub max_fp: usize,
    pub max_fn: usize,
    pub superset_violations: usize,
    pub approximate_violations: usize,
}

impl Summary {
    fn add(&mut self, fp: usize, fneg: usize, superset_ok: bool, approximate_ok: bool, goal: RunGoal) {
        self.trials += 1;
        self.max_fp = self.max_fp.max(fp);
        self.max_fn = self.max_fn.max(fneg);
        match goal {
            RunGoal::Superset => self.superset_violations += usize::from(!superset_ok),
            RunGoal::Approximate => self.approximate_violations += usize::from(!approximate_ok),
        }
    }

    pub fn from_rows(rows: &[TrialRow], goal: RunGoal) -> Self {
        let mut s = Summary::default();
        for row in rows {
            let r = &row.report;
            s.add(
                r.false_positives().unwrap_or(0),
                r.false_negatives().unwrap_or(0),
                r.superset_ok().unwrap_or(false),
                r.approximate_ok().unwrap_or(false),
                goal,
            );
        }
        s
    }

    fn line(&self, goal: RunGoal) -> String {
        format!(
            "# summary goal={} trials={} max_fp={} max_fn={} superset_violations={} approximate_violations={}",
            goal.as_str(),
            self.trials,
            self.max_fp,
            self.max_fn,
            self.superset_violations,
            self.approximate_violations
        )
    }

    pub fn violations(&self) -> usize {
        self.superset_violations + self.approximate_violations
    }
}

#[derive(Debug, Clone)]
pub struct ResultsTable {
    pub goal: RunGoal,
    pub rows: Vec<TrialRow>,
    pub summary: Summary,
    pub wall_time: Duration,
}

impl ResultsTable {
    /// Header, one row per trial, then the summary line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.report.csv_row(row.seed));
            out.push('\n');
        }
        out.push_str(&self.summary.line(self.goal));
        out.push('\n');
        out
    }
}

fn csv_error(line: usize, msg: impl Into<String>) -> Error {
    Error::parse(line, msg)
}

/// Recomputes the summary from the data rows of a CSV produced by
/// [`ResultsTable::to_csv`], and returns it with the emitted one.
pub fn summaries_from_csv(csv: &str) -> Result<(Summary, Summary)> {
    let mut lines = csv.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => return Err(csv_error(1, "missing CSV header")),
    }
    let mut rows = Vec::new();
    let mut emitted = None;
    for (i, line) in lines {
        if let Some(rest) = line.strip_prefix("# summary ") {
            let fields: Vec<(&str, &str)> = rest
                .split_whitespace()
                .filter_map(|f| f.split_once('='))
                .collect();
            let get = |k: &str| fields.iter().find(|(key, _)| *key == k).map(|(_, v)| *v);
            let num = |k: &str| -> Result<usize> {
                get(k)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| csv_error(i + 1, format!("bad summary field {k}")))
            };
            let goal: RunGoal = get("goal")
                .ok_or_else(|| csv_error(i + 1, "summary without goal"))?
                .parse()?;
            emitted = Some((
                goal,
                Summary {
                    trials: num("trials")?,
                    max_fp: num("max_fp")?,
                    max_fn: num("max_fn")?,
                    superset_violations: num("superset_violations")?,
                    approximate_violations: num("approximate_violations")?,
                },
            ));
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 11 {
            return Err(csv_error(i + 1, "expected 11 columns"));
        }
        rows.push((i + 1, cells.iter().map(|c| c.to_string()).collect::<Vec<_>>()));
    }
    let (goal, emitted) = emitted.ok_or_else(|| csv_error(0, "missing summary line"))?;
    let mut s = Summary::default();
    for (line, cells) in rows {
        let num = |c: usize| -> Result<usize> {
            cells[c]
                .parse()
                .map_err(|_| csv_error(line, format!("bad cell {:?}", cells[c])))
        };
        let k = num(3)?;
        let eps = parse_rational(&cells[4])?;
        let (size, fp, fneg) = (num(7)?, num(8)?, num(9)?);
        let ek = &eps * integer(k as i64);
        let approximate_ok =
            size <= k && integer(fp as i64) <= ek && integer(fneg as i64) <= ek;
        s.add(fp, fneg, cells[10] == "1", approximate_ok, goal);
    }
    Ok((s, emitted))
}

fn decode_one(
    cfg: &ExperimentConfig,
    a: &SensingMatrix,
    x: &SparseSignal,
) -> Result<RecoveryReport> {
    let y = measure_with_threshold(a, x, cfg.mode, cfg.tau)?;
    let (k, eps) = (cfg.k, &cfg.eps);
    let report = match a.params() {
        RegimeParams::Thm1 { .. } => decode_approximate(a, &y, k, eps)?,
        RegimeParams::Thm3 { .. } => decode_superset(a, &y, k, eps)?,
        RegimeParams::Thm4 { eta, .. } => decode_superset_bounded_range(a, &y, k, eps, eta)?,
        RegimeParams::Thm5 { r, .. } => decode_superset_same_sign(a, &y, k, eps, *r)?,
        RegimeParams::Gaussian => decode_l0_report(a, &y, k, eps, cfg.eta()?)?,
    };
    let mut report = report.with_reference(x.support());
    if cfg.goal == RunGoal::Approximate && cfg.regime != Regime::Thm1 && cfg.regime != Regime::Gaussian {
        report.returned = superset_to_approximate(&report.returned, k, eps)?;
    }
    Ok(report)
}

/// Runs one experiment; writes the CSV to `cfg.output` when set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultsTable> {
    let start = Instant::now();
    cfg.validate()?;
    let family = cfg.effective_family()?;
    let signals = generate_signal_family(&family, cfg.n, cfg.k, cfg.seed)?;
    let a = if signals.is_empty() { None } else { Some(cfg.matrix()?) };
    let rows: Vec<TrialRow> = signals
        .par_iter()
        .enumerate()
        .map(|(t, x)| {
            let a = a.as_ref().expect("matrix built for nonempty families");
            decode_one(cfg, a, x)
                .map(|report| TrialRow {
                    seed: derive_seed(cfg.seed, t as u64),
                    report,
                })
                .map_err(|e| Error::Trial {
                    trial: t as u64,
                    source: Box::new(e),
                })
        })
        .collect::<Result<_>>()?;
    let summary = Summary::from_rows(&rows, cfg.goal);
    let table = ResultsTable {
        goal: cfg.goal,
        rows,
        summary,
        wall_time: start.elapsed(),
    };
    if let Some(path) = &cfg.output {
        std::fs::write(path, table.to_csv())?;
    }
    Ok(table)
}
