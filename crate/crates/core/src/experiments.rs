//! Scenario configs, the built-in examples, orchestration and report output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degrees::{
    alpha_estimates, arithmetic_degree_estimate, degree_sequence, genericity_heuristic,
    hyperbolicity_report, topological_degree_ff, AlphaEstimate, AlphaRow, DegreeError,
    DegreeSequence, FiberOptions, FiberReport, GenericityHeuristic, HyperbolicityReport,
    DEFAULT_PRIMES, DEFAULT_TARGETS_PER_PRIME,
};
use crate::heights::{height_ratio_series, GcdHeightParts, HeightValue};
use crate::polyparse::{parse_poly, PolySource};
use crate::projgeom::{Periodicity, ProjPoint, RationalMap, SubschemeIdeal, DEFAULT_COMPOSITION_CAP};

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_DEGREE_ITERATES: u32 = 4;
/// Metadata key recording whether `Y` lies in the locus where every iterate is finite.
pub const META_BACK: &str = "Y in X_f^back";
/// Metadata key recording the user's genericity assertion.
pub const META_GENERIC: &str = "orbit generic";
/// Slope threshold for the ratio trend.
pub const TREND_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("config is not valid JSON: {0}")]
    Json(String),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("unknown scenario `{0}` (known: backnonfin, a2, bcz, squaring)")]
    UnknownScenario(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("computation failed: {0}")]
    Compute(String),
}

fn field_err(field: impl Into<String>, message: impl ToString) -> ScenarioError {
    ScenarioError::Field {
        field: field.into(),
        message: message.to_string(),
    }
}

/// An integer given either as a JSON number or as a decimal string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntValue {
    Num(i64),
    Text(String),
}

impl IntValue {
    pub fn to_bigint(&self) -> Option<BigInt> {
        match self {
            IntValue::Num(v) => Some(BigInt::from(*v)),
            IntValue::Text(s) => s.trim().parse().ok(),
        }
    }
}

impl From<i64> for IntValue {
    fn from(v: i64) -> Self {
        IntValue::Num(v)
    }
}

fn default_primes() -> Vec<u64> {
    DEFAULT_PRIMES.to_vec()
}
fn default_targets() -> usize {
    DEFAULT_TARGETS_PER_PRIME
}
fn default_cap() -> u64 {
    DEFAULT_COMPOSITION_CAP
}
fn default_degree_iterates() -> u32 {
    DEFAULT_DEGREE_ITERATES
}

/// One experiment: a map, a subscheme, a starting point and options.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Number of homogeneous coordinates (`N + 1`).
    pub arity: usize,
    pub map: Vec<String>,
    pub ideal: Vec<String>,
    pub start: Vec<IntValue>,
    pub n_max: usize,
    #[serde(default = "default_primes")]
    pub primes: Vec<u64>,
    #[serde(default = "default_targets")]
    pub targets_per_prime: usize,
    #[serde(default = "default_cap")]
    pub composition_cap: u64,
    /// Iterates whose degrees are computed for the `d₁` estimate.
    #[serde(default = "default_degree_iterates")]
    pub degree_iterates: u32,
    #[serde(default)]
    pub rational_scan: bool,
    /// Dimension `l` of `Y`; the degree test uses `d_{N−l}`.
    #[serde(default)]
    pub ideal_dim: usize,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError::Json(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    fn base(name: &str, map: &[&str], ideal: &[&str], start: &[i64], n_max: usize) -> Self {
        ScenarioConfig {
            name: Some(name.to_string()),
            arity: map.len(),
            map: map.iter().map(|s| s.to_string()).collect(),
            ideal: ideal.iter().map(|s| s.to_string()).collect(),
            start: start.iter().map(|&v| IntValue::Num(v)).collect(),
            n_max,
            primes: default_primes(),
            targets_per_prime: default_targets(),
            composition_cap: default_cap(),
            degree_iterates: default_degree_iterates(),
            rational_scan: false,
            ideal_dim: 0,
            metadata: BTreeMap::new(),
        }
    }

    fn with_meta(mut self, pairs: &[(&str, &str)]) -> Self {
        for (k, v) in pairs {
            self.metadata.insert(k.to_string(), v.to_string());
        }
        self
    }

    /// `(x0²x1 : x1³ : x2³)` from `(3:2:1)`, where `Y = (0:0:1)` is not in
    /// the locus of finite iterates and the ratio tends to 1.
    pub fn backnonfin(n_max: usize) -> Self {
        Self::base("backnonfin", &["x0^2*x1", "x1^3", "x2^3"], &["x0", "x1"], &[3, 2, 1], n_max)
            .with_meta(&[(META_BACK, "no"), (META_GENERIC, "asserted")])
    }

    /// `(x0²x1 : x1³ + x0²x1 + x0x2² : x2³)` with `d₁ = 3`, `d₂ = 7`.
    pub fn a2(n_max: usize) -> Self {
        Self::base(
            "a2",
            &["x0^2*x1", "x1^3 + x0^2*x1 + x0*x2^2", "x2^3"],
            &["x0", "x1"],
            &[2, 3, 1],
            n_max,
        )
        .with_meta(&[(META_BACK, "yes"), (META_GENERIC, "asserted")])
    }

    /// `(a·x0 : b·x1 : x2)` from `(1:1:1)` relative to `Y = (1:1:1)`, so that
    /// `h_Y(fⁿx)` is governed by `gcd(aⁿ − 1, bⁿ − 1)`.
    pub fn bcz(a: u64, b: u64, n_max: usize) -> Self {
        let mut cfg = Self::base("bcz", &["x0", "x1", "x2"], &["x0 - x2", "x1 - x2"], &[1, 1, 1], n_max)
            .with_meta(&[(META_BACK, "yes")]);
        cfg.map = vec![format!("{a}*x0"), format!("{b}*x1"), "x2".to_string()];
        cfg.metadata.insert("a".into(), a.to_string());
        cfg.metadata.insert("b".into(), b.to_string());
        cfg
    }

    /// `(x0² : x1² : x2²)` from `(2:1:1)`.
    pub fn squaring(n_max: usize) -> Self {
        Self::base("squaring", &["x0^2", "x1^2", "x2^2"], &["x0", "x1"], &[2, 1, 1], n_max)
            .with_meta(&[(META_BACK, "yes")])
    }
}

/// Parameters accepted by [`builtin`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuiltinParams {
    pub a: Option<u64>,
    pub b: Option<u64>,
    pub n: Option<usize>,
}

pub fn builtin(name: &str, params: BuiltinParams) -> Result<ScenarioConfig, ScenarioError> {
    let cfg = match name {
        "backnonfin" => ScenarioConfig::backnonfin(params.n.unwrap_or(12)),
        "a2" => ScenarioConfig::a2(params.n.unwrap_or(10)),
        "bcz" => {
            let a = params.a.unwrap_or(2);
            let b = params.b.unwrap_or(3);
            if a < 2 || b < 2 {
                return Err(field_err("a/b", "both must be at least 2"));
            }
            ScenarioConfig::bcz(a, b, params.n.unwrap_or(40))
        }
        "squaring" => ScenarioConfig::squaring(params.n.unwrap_or(12)),
        other => return Err(ScenarioError::UnknownScenario(other.to_string())),
    };
    Ok(cfg)
}

/// Parsed and validated form of a config.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub map: RationalMap,
    pub ideal: SubschemeIdeal,
    pub start: ProjPoint,
}

pub fn validate(cfg: &ScenarioConfig) -> Result<Scenario, ScenarioError> {
    if cfg.arity < 2 || cfg.arity > crate::polyparse::MAX_ARITY {
        return Err(field_err("arity", format!("must be in 2..={}", crate::polyparse::MAX_ARITY)));
    }
    if cfg.map.len() != cfg.arity {
        return Err(field_err("map", format!("expected {} components, got {}", cfg.arity, cfg.map.len())));
    }
    let parse = |field: &str, list: &[String]| {
        list.iter()
            .enumerate()
            .map(|(i, s)| {
                parse_poly(&PolySource::new(s.as_str(), cfg.arity)).map_err(|e| field_err(format!("{field}[{i}]"), e))
            })
            .collect::<Result<Vec<_>, _>>()
    };
    let map = RationalMap::new(parse("map", &cfg.map)?).map_err(|e| field_err("map", e))?;
    let ideal = SubschemeIdeal::new(parse("ideal", &cfg.ideal)?).map_err(|e| field_err("ideal", e))?;
    if cfg.start.len() != cfg.arity {
        return Err(field_err("start", format!("expected {} coordinates, got {}", cfg.arity, cfg.start.len())));
    }
    let coords = cfg
        .start
        .iter()
        .enumerate()
        .map(|(i, v)| v.to_bigint().ok_or_else(|| field_err(format!("start[{i}]"), "not an integer")))
        .collect::<Result<Vec<_>, _>>()?;
    let start = ProjPoint::new(coords).map_err(|e| field_err("start", e))?;
    if cfg.ideal_dim + 1 >= cfg.arity {
        return Err(field_err("ideal_dim", "must be below the dimension of the ambient space"));
    }
    for key in [META_BACK, META_GENERIC] {
        if let Some(v) = cfg.metadata.get(key) {
            let ok = match key {
                META_BACK => parse_yes_no(v).is_some(),
                _ => parse_asserted(v).is_some(),
            };
            if !ok {
                return Err(field_err(format!("metadata.{key}"), format!("unrecognised value `{v}`")));
            }
        }
    }
    Ok(Scenario { map, ideal, start })
}

fn parse_yes_no(v: &str) -> Option<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "yes" | "true" => Some(true),
        "no" | "false" => Some(false),
        _ => None,
    }
}

fn parse_asserted(v: &str) -> Option<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "asserted" | "yes" | "true" => Some(true),
        "not asserted" | "no" | "false" | "unknown" => Some(false),
        _ => None,
    }
}

/// One row of an orbit report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub n: usize,
    pub bits: u64,
    pub h: f64,
    pub h_y: HeightValue,
    pub ratio: Option<f64>,
    #[serde(skip)]
    pub parts: Option<GcdHeightParts>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrendLabel {
    #[serde(rename = "→ 0-consistent")]
    ToZero,
    #[serde(rename = "→ 1-consistent")]
    ToOne,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl TrendLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            TrendLabel::ToZero => "→ 0-consistent",
            TrendLabel::ToOne => "→ 1-consistent",
            TrendLabel::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trend {
    pub label: TrendLabel,
    /// Least-squares slope of the ratio against `1/h`.
    pub slope: Option<f64>,
    /// Fitted ratio at `1/h = 0`.
    pub intercept: Option<f64>,
    pub points: usize,
}

/// Classify where `ratio` is heading as `h` grows.
///
/// Fits `ratio ≈ intercept + slope / h` over every row with a ratio. As
/// `1/h → 0`, a positive slope means the ratio is falling and a negative one
/// that it is rising. Series lying entirely within `TREND_THRESHOLD` of 0 or
/// of 1 are classified by level.
pub fn classify_trend(rows: &[(f64, f64)]) -> Trend {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(h, r)| *h > 0.0 && r.is_finite())
        .map(|&(h, r)| (1.0 / h, r))
        .collect();
    let n = pts.len();
    let mut trend = Trend {
        label: TrendLabel::Inconclusive,
        slope: None,
        intercept: None,
        points: n,
    };
    if n < 3 {
        return trend;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx > 0.0 {
        let slope = sxy / sxx;
        trend.slope = Some(slope);
        trend.intercept = Some(my - slope * mx);
        if slope > TREND_THRESHOLD {
            trend.label = TrendLabel::ToZero;
        } else if slope < -TREND_THRESHOLD {
            trend.label = TrendLabel::ToOne;
        }
    }
    if pts.iter().all(|p| p.1 <= TREND_THRESHOLD) {
        trend.label = TrendLabel::ToZero;
    } else if pts.iter().all(|p| p.1 >= 1.0 - TREND_THRESHOLD) {
        trend.label = TrendLabel::ToOne;
    }
    trend
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "predicts ratio → 0")]
    PredictsZero,
    #[serde(rename = "theorem not applicable")]
    NotApplicable,
    #[serde(rename = "hypothesis fails")]
    HypothesisFails,
    #[serde(rename = "unknown")]
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::PredictsZero => "predicts ratio → 0",
            Verdict::NotApplicable => "theorem not applicable",
            Verdict::HypothesisFails => "hypothesis fails",
            Verdict::Unknown => "unknown",
        }
    }
}

/// Hypotheses of the convergence theorem, as far as the data can speak.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checklist {
    pub verdict: Verdict,
    /// "yes", "no" or "unknown".
    pub predicts_ratio_to_zero: &'static str,
    /// From metadata, never inferred.
    pub y_in_back: Option<bool>,
    /// From metadata, never inferred.
    pub orbit_generic_asserted: bool,
    pub genericity_heuristic_passes: Option<bool>,
    /// `N − l`
    pub codim: usize,
    /// `d_{N−l}` as estimated.
    pub degree: Option<f64>,
    /// `d_{N−l}^{1/(N−l)}`
    pub threshold: Option<f64>,
    pub alpha: Option<f64>,
    /// `threshold < alpha`
    pub degree_condition: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub rows: usize,
    pub final_ratio: Option<f64>,
    pub trend: Trend,
    pub alpha: Option<AlphaEstimate>,
    pub alpha_estimates: Vec<AlphaRow>,
    pub degree_sequence: Option<DegreeSequence>,
    pub d1_estimate: Option<f64>,
    #[serde(rename = "dN_mode")]
    pub dn_mode: Option<u32>,
    pub fiber: Option<FiberReport>,
    pub hyperbolicity: Option<HyperbolicityReport>,
    pub genericity: GenericityHeuristic,
    pub checklist: Checklist,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct Flags {
    /// Index of the first iterate in the indeterminacy locus.
    pub indeterminate_at: Option<usize>,
    pub periodic: Option<Periodicity>,
    pub degree_budget_exceeded: bool,
    pub fiber_degenerate: bool,
    pub fiber_ambiguous: bool,
    pub advisories: Vec<String>,
}

impl Flags {
    pub fn truncated(&self) -> bool {
        self.indeterminate_at.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitReport {
    pub config: ScenarioConfig,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
    pub flags: Flags,
}

impl OrbitReport {
    pub fn heights(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.h).collect()
    }
}

/// Run every computation a config asks for. Identical config and seed give
/// an identical report.
pub fn run_scenario(cfg: &ScenarioConfig, seed: u64) -> Result<OrbitReport, ScenarioError> {
    let sc = validate(cfg)?;
    let series = height_ratio_series(&sc.map, &sc.ideal, &sc.start, cfg.n_max)
        .map_err(|e| ScenarioError::Compute(e.to_string()))?;
    let rows: Vec<ReportRow> = series
        .rows
        .into_iter()
        .map(|r| ReportRow {
            n: r.n,
            bits: r.bits,
            h: r.h,
            h_y: r.h_y,
            ratio: r.ratio,
            parts: r.parts,
        })
        .collect();
    let mut flags = Flags {
        indeterminate_at: series.orbit.indeterminate_at,
        periodic: series.orbit.periodic,
        ..Flags::default()
    };

    let degree_sequence = if cfg.degree_iterates > 0 {
        let s = degree_sequence(&sc.map, cfg.degree_iterates, cfg.composition_cap)
            .map_err(|e| ScenarioError::Compute(e.to_string()))?;
        flags.degree_budget_exceeded = s.truncated;
        Some(s)
    } else {
        None
    };
    let d1_estimate = degree_sequence.as_ref().map(|s| s.d1_estimate);

    let fiber = if cfg.arity == 3 && !cfg.primes.is_empty() && cfg.targets_per_prime > 0 {
        let opts = FiberOptions {
            primes: cfg.primes.clone(),
            targets_per_prime: cfg.targets_per_prime,
            seed,
            rational_scan: cfg.rational_scan,
        };
        let r = topological_degree_ff(&sc.map, &opts).map_err(|e| match e {
            DegreeError::PrimeTooSmall(_) | DegreeError::NotPrime(_) | DegreeError::PrimeBelowBezout { .. } => {
                field_err("primes", e)
            }
            other => ScenarioError::Compute(other.to_string()),
        })?;
        flags.fiber_degenerate = r.degenerate;
        flags.fiber_ambiguous = r.ambiguous;
        Some(r)
    } else {
        if cfg.arity != 3 {
            flags
                .advisories
                .push("topological degree skipped: fiber counting covers the projective plane only".into());
        }
        None
    };
    let dn_mode = fiber.as_ref().and_then(|f| f.mode);

    let heights: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let alpha = arithmetic_degree_estimate(&heights).ok();
    let alpha_rows = alpha_estimates(&heights);
    let hyperbolicity = match (d1_estimate, dn_mode, &alpha) {
        (Some(d1), Some(d2), Some(a)) if cfg.arity == 3 => {
            let h = hyperbolicity_report(d1, d2 as f64, a.ratio_tail);
            if let Some(adv) = &h.advisory {
                flags.advisories.push(adv.clone());
            }
            Some(h)
        }
        _ => None,
    };
    if flags.degree_budget_exceeded {
        flags
            .advisories
            .push("degree sequence stopped at the composition cap; d1 uses the last two degrees".into());
    }
    if let Some(p) = flags.periodic {
        flags
            .advisories
            .push(format!("orbit is preperiodic: point {} recurs with period {}", p.first, p.period));
    }

    let genericity = genericity_heuristic(&series.orbit.points);
    let trend = classify_trend(&rows.iter().filter_map(|r| r.ratio.map(|x| (r.h, x))).collect::<Vec<_>>());
    let final_ratio = rows.last().and_then(|r| r.ratio);
    let mut summary = Summary {
        rows: rows.len(),
        final_ratio,
        trend,
        alpha,
        alpha_estimates: alpha_rows,
        degree_sequence,
        d1_estimate,
        dn_mode,
        fiber,
        hyperbolicity,
        genericity,
        checklist: empty_checklist(),
    };
    summary.checklist = check_hypotheses(&summary, cfg);
    Ok(OrbitReport {
        config: cfg.clone(),
        seed,
        rows,
        summary,
        flags,
    })
}

fn empty_checklist() -> Checklist {
    Checklist {
        verdict: Verdict::Unknown,
        predicts_ratio_to_zero: "unknown",
        y_in_back: None,
        orbit_generic_asserted: false,
        genericity_heuristic_passes: None,
        codim: 0,
        degree: None,
        threshold: None,
        alpha: None,
        degree_condition: None,
    }
}

/// Evaluate the hypotheses `d_{N−l}^{1/(N−l)} < α`, `Y ⊂ X_f^back` and
/// genericity. The last two come from metadata only.
pub fn check_hypotheses(summary: &Summary, cfg: &ScenarioConfig) -> Checklist {
    let n = cfg.arity.saturating_sub(1);
    let codim = n.saturating_sub(cfg.ideal_dim);
    let y_in_back = cfg.metadata.get(META_BACK).and_then(|v| parse_yes_no(v));
    let orbit_generic_asserted = cfg
        .metadata
        .get(META_GENERIC)
        .and_then(|v| parse_asserted(v))
        .unwrap_or(false);
    let degree = if codim == n && n == 2 {
        summary.dn_mode.map(f64::from)
    } else if codim == 1 {
        summary.d1_estimate
    } else {
        None
    };
    let threshold = degree.map(|d| d.powf(1.0 / codim as f64));
    let alpha = summary.alpha.as_ref().filter(|a| !a.degenerate).map(|a| a.ratio_tail);
    let degree_condition = match (threshold, alpha) {
        (Some(t), Some(a)) => Some(t < a),
        _ => None,
    };
    let verdict = if y_in_back == Some(false) {
        Verdict::NotApplicable
    } else if degree_condition == Some(false) {
        Verdict::HypothesisFails
    } else if y_in_back == Some(true) && orbit_generic_asserted && degree_condition == Some(true) {
        Verdict::PredictsZero
    } else {
        Verdict::Unknown
    };
    let predicts_ratio_to_zero = match verdict {
        Verdict::PredictsZero => "yes",
        Verdict::NotApplicable | Verdict::HypothesisFails => "no",
        Verdict::Unknown => "unknown",
    };
    let genericity_heuristic_passes = summary
        .genericity
        .checks
        .iter()
        .any(|c| c.contained.is_some())
        .then_some(summary.genericity.passes);
    Checklist {
        verdict,
        predicts_ratio_to_zero,
        y_in_back,
        orbit_generic_asserted,
        genericity_heuristic_passes,
        codim,
        degree,
        threshold,
        alpha,
        degree_condition,
    }
}

// ---------------------------------------------------------------------------
// output

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}` (csv or json)")),
        }
    }
}

pub const CSV_HEADER: &str = "n,bits,h,hY_arch,hY_gcd,hY_total,ratio";

/// `printf("%.12g")`.
pub fn fmt_g12(x: f64) -> String {
    const P: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mant, exp) = sci.split_once('e').expect("scientific form");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..P).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mant), sign, exp.abs())
    } else {
        trim(&format!("{:.*}", (P - 1 - exp) as usize, x))
    }
}

pub fn render_csv(report: &OrbitReport) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        let (arch, gcd, total) = match r.h_y {
            HeightValue::Infinite => (String::new(), String::new(), "inf".to_string()),
            HeightValue::Finite {
                total,
                arch_part,
                gcd_part,
            } => (fmt_g12(arch_part), fmt_g12(gcd_part), fmt_g12(total)),
        };
        let ratio = r.ratio.map(fmt_g12).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{},{},{},{}", r.n, r.bits, fmt_g12(r.h), arch, gcd, total, ratio);
    }
    out
}

pub fn render_json(report: &OrbitReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn render(report: &OrbitReport, format: Format) -> String {
    match format {
        Format::Csv => render_csv(report),
        Format::Json => render_json(report),
    }
}

/// Write the report to `path`, or to standard output when `path` is `None`.
pub fn emit_report(report: &OrbitReport, format: Format, path: Option<&Path>) -> Result<(), ScenarioError> {
    let text = render(report, format);
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| ScenarioError::Io {
            path: p.to_path_buf(),
            message: e.to_string(),
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| ScenarioError::Io {
                path: PathBuf::from("<stdout>"),
                message: e.to_string(),
            }),
    }
}

/// Human-readable digest of a report.
pub fn summary_table(report: &OrbitReport) -> String {
    let s = &report.summary;
    let opt = |x: Option<f64>| x.map(fmt_g12).unwrap_or_else(|| "-".into());
    let mut out = String::new();
    let name = report.config.name.as_deref().unwrap_or("config");
    let _ = writeln!(out, "scenario        {name}");
    let _ = writeln!(out, "rows            {}", s.rows);
    let _ = writeln!(out, "final ratio     {}", opt(s.final_ratio));
    let _ = writeln!(out, "ratio trend     {}", s.trend.label.as_str());
    let _ = writeln!(out, "alpha (ratio)   {}", opt(s.alpha.as_ref().map(|a| a.ratio_tail)));
    let _ = writeln!(out, "alpha (root)    {}", opt(s.alpha.as_ref().map(|a| a.root_tail)));
    let _ = writeln!(out, "d1 estimate     {}", opt(s.d1_estimate));
    let dn = match (&s.fiber, s.dn_mode) {
        (_, Some(m)) => m.to_string(),
        (Some(f), None) if f.ambiguous => format!("ambiguous {:?}", f.modes),
        _ => "-".into(),
    };
    let _ = writeln!(out, "dN mode         {dn}");
    let _ = writeln!(out, "verdict         {}", s.checklist.verdict.as_str());
    let _ = writeln!(out, "predicts -> 0   {}", s.checklist.predicts_ratio_to_zero);
    let f = &report.flags;
    if let Some(n) = f.indeterminate_at {
        let _ = writeln!(out, "truncated       iterate {n} is indeterminate");
    }
    for a in &f.advisories {
        let _ = writeln!(out, "note            {a}");
    }
    out
}
