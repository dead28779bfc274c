//! Seeded campaigns over random corpora, their reports, the log-concave
//! limit demo and the command-line interface.

mod campaigns;
pub mod cli;
pub mod demo;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::rational::*;
use crate::integrals::{ProductReport, Scope};

pub use demo::{log_concave_demo, DemoRow, DemoTable, GridFn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Campaign {
    Dim1Monotone,
    Dim2P,
    Dim2QClassF,
    Dim1Q,
    Dim1Bipolar,
    Invariance,
    DualityInvolutions,
    LiftedConsistency,
    EquipartitionSuite,
}

impl Campaign {
    pub const ALL: [Campaign; 9] = [
        Campaign::Dim1Monotone,
        Campaign::Dim2P,
        Campaign::Dim2QClassF,
        Campaign::Dim1Q,
        Campaign::Dim1Bipolar,
        Campaign::Invariance,
        Campaign::DualityInvolutions,
        Campaign::LiftedConsistency,
        Campaign::EquipartitionSuite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Campaign::Dim1Monotone => "dim1-monotone",
            Campaign::Dim2P => "dim2-P",
            Campaign::Dim2QClassF => "dim2-Q-classF",
            Campaign::Dim1Q => "dim1-Q",
            Campaign::Dim1Bipolar => "dim1-bipolar",
            Campaign::Invariance => "invariance",
            Campaign::DualityInvolutions => "duality-involutions",
            Campaign::LiftedConsistency => "lifted-consistency",
            Campaign::EquipartitionSuite => "equipartition-suite",
        }
    }

    /// Default inclusive range of `m`.
    pub fn default_m_range(self) -> (u32, u32) {
        match self {
            Campaign::Dim1Monotone => (0, 8),
            Campaign::Dim2P => (1, 5),
            Campaign::Dim2QClassF => (3, 6),
            Campaign::Dim1Q | Campaign::Dim1Bipolar => (2, 8),
            Campaign::Invariance => (2, 2),
            Campaign::DualityInvolutions => (1, 1),
            Campaign::LiftedConsistency => (1, 3),
            Campaign::EquipartitionSuite => (2, 4),
        }
    }

    /// The dimension a campaign is defined for, if fixed.
    pub fn fixed_n(self) -> Option<usize> {
        match self {
            Campaign::Dim1Monotone | Campaign::Dim1Q | Campaign::Dim1Bipolar => Some(1),
            Campaign::Dim2P | Campaign::Dim2QClassF | Campaign::LiftedConsistency | Campaign::EquipartitionSuite => {
                Some(2)
            }
            Campaign::Invariance | Campaign::DualityInvolutions => None,
        }
    }
}

impl fmt::Display for Campaign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Campaign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Campaign::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown campaign {s:?}")))
    }
}

impl Serialize for Campaign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::InvalidInput(format!("unknown format {s:?}"))),
        }
    }
}

/// Parses `a..b`, `a..=b` (both inclusive) or a single `a`.
pub fn parse_m_range(s: &str) -> Result<(u32, u32)> {
    let bad = || Error::InvalidInput(format!("bad m range {s:?}"));
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| bad());
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignConfig {
    pub campaign: Campaign,
    pub n: usize,
    pub m_range: (u32, u32),
    /// Random functions drawn in addition to the planted equality cases.
    pub count: usize,
    pub seed: u64,
    pub tol: f64,
    /// Monte Carlo samples per lifted body (0 disables the cross-check).
    pub samples: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Record wall-clock times; off by default so reports are reproducible.
    pub timings: bool,
}

impl CampaignConfig {
    pub fn new(campaign: Campaign) -> Self {
        Self {
            campaign,
            n: campaign.fixed_n().unwrap_or(2),
            m_range: campaign.default_m_range(),
            count: 20,
            seed: 0,
            tol: 1e-9,
            samples: 100_000,
            out: None,
            format: Format::Json,
            timings: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(n) = self.campaign.fixed_n() {
            if n != self.n {
                return Err(Error::InvalidInput(format!("{} runs in dimension {n}", self.campaign)));
            }
        }
        if !(1..=2).contains(&self.n) {
            return Err(Error::InvalidInput("n must be 1 or 2".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidInput("tolerance must be positive".into()));
        }
        Ok(())
    }
}

fn ser_opt_q<S: Serializer>(v: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&fmt_q(x)),
        None => s.serialize_none(),
    }
}

/// One checked statement about one function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseResult {
    pub case_id: usize,
    pub function_index: usize,
    pub seed: u64,
    pub m: String,
    pub n: usize,
    pub check: String,
    pub source: String,
    pub planted: bool,
    #[serde(serialize_with = "ser_opt_q")]
    pub lhs: Option<Q>,
    #[serde(serialize_with = "ser_opt_q")]
    pub bound: Option<Q>,
    #[serde(serialize_with = "ser_opt_q")]
    pub margin: Option<Q>,
    pub residual: Option<f64>,
    pub equality: bool,
    pub scope: Scope,
    pub passed: bool,
    pub detail: Option<String>,
    pub error: Option<String>,
    pub runtime_ms: u64,
}

impl CaseResult {
    fn blank(check: &str, m: u32, n: usize) -> Self {
        Self {
            case_id: 0,
            function_index: 0,
            seed: 0,
            m: m.to_string(),
            n,
            check: check.to_string(),
            source: String::new(),
            planted: false,
            lhs: None,
            bound: None,
            margin: None,
            residual: None,
            equality: false,
            scope: Scope::Theorem,
            passed: false,
            detail: None,
            error: None,
            runtime_ms: 0,
        }
    }

    fn product(r: &ProductReport, m: u32) -> Self {
        Self {
            lhs: Some(r.lhs.clone()),
            bound: Some(r.bound.clone()),
            margin: Some(r.margin.clone()),
            equality: r.equality,
            scope: r.scope,
            passed: r.holds(),
            ..Self::blank(&r.context, m, r.n)
        }
    }

    /// `lhs >= bound` with an explicit check name.
    fn inequality(check: &str, m: u32, n: usize, lhs: Q, bound: Q) -> Self {
        let margin = &lhs - &bound;
        Self {
            equality: margin.is_zero(),
            passed: !margin.is_negative(),
            lhs: Some(lhs),
            bound: Some(bound),
            margin: Some(margin),
            ..Self::blank(check, m, n)
        }
    }

    /// `lhs == rhs` for exact values.
    fn equal_values(check: &str, m: u32, n: usize, lhs: Q, rhs: Q) -> Self {
        let mut r = Self::inequality(check, m, n, lhs, rhs);
        r.passed = r.equality;
        r
    }

    fn identity(check: &str, m: u32, n: usize, ok: bool) -> Self {
        Self { passed: ok, ..Self::blank(check, m, n) }
    }

    fn residual(check: &str, m: u32, n: usize, value: f64, tol: f64) -> Self {
        Self { residual: Some(value), passed: value <= tol, ..Self::blank(check, m, n) }
    }

    fn error(check: &str, m: u32, n: usize, e: &Error) -> Self {
        Self { error: Some(e.to_string()), ..Self::blank(check, m, n) }
    }

    fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    /// A theorem-scope statement that did not hold or could not be evaluated.
    pub fn theorem_failure(&self) -> bool {
        self.scope == Scope::Theorem && (!self.passed || self.error.is_some())
    }

    fn margin_sign(&self) -> &'static str {
        match &self.margin {
            Some(m) if m.is_positive() => "+",
            Some(m) if m.is_negative() => "-",
            Some(_) => "0",
            None if self.passed => "+",
            None => "-",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub functions: usize,
    pub checks: usize,
    pub passed: usize,
    pub theorem_failures: usize,
    pub conjecture_failures: usize,
    pub errors: usize,
    pub equalities: usize,
    pub planted_equalities: usize,
    /// Smallest exact margin among theorem-scope inequalities.
    #[serde(serialize_with = "ser_opt_q")]
    pub min_margin: Option<Q>,
    pub max_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Environment {
    pub version: String,
    pub arithmetic: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignReport {
    pub campaign: Campaign,
    pub config: CampaignConfig,
    pub environment: Environment,
    pub summary: Summary,
    pub cases: Vec<CaseResult>,
}

impl CampaignReport {
    /// No theorem-scope failure and no pipeline error.
    pub fn ok(&self) -> bool {
        self.summary.theorem_failures == 0 && self.summary.errors == 0
    }

    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("reports serialize");
        serde_json::to_string_pretty(&v).expect("values serialize") + "\n"
    }

    /// Columns `case_id, seed, m, n, lhs_num, lhs_den, bound_num, bound_den,
    /// margin_sign, equality, runtime_ms`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "case_id",
            "seed",
            "m",
            "n",
            "lhs_num",
            "lhs_den",
            "bound_num",
            "bound_den",
            "margin_sign",
            "equality",
            "runtime_ms",
        ])
        .expect("in-memory write");
        let parts = |x: &Option<Q>| match x {
            Some(v) => (v.numer().to_string(), v.denom().to_string()),
            None => (String::new(), String::new()),
        };
        for c in &self.cases {
            let (ln, ld) = parts(&c.lhs);
            let (bn, bd) = parts(&c.bound);
            w.write_record([
                c.case_id.to_string(),
                c.seed.to_string(),
                c.m.clone(),
                c.n.to_string(),
                ln,
                ld,
                bn,
                bd,
                c.margin_sign().to_string(),
                c.equality.to_string(),
                c.runtime_ms.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

fn summarize(cases: &[CaseResult], functions: usize) -> Summary {
    let min_margin = cases
        .iter()
        .filter(|c| c.scope == Scope::Theorem && c.error.is_none())
        .filter_map(|c| c.margin.clone())
        .min();
    let max_residual = cases.iter().filter_map(|c| c.residual).fold(None, |a: Option<f64>, r| Some(a.map_or(r, |a| a.max(r))));
    Summary {
        functions,
        checks: cases.len(),
        passed: cases.iter().filter(|c| c.passed && c.error.is_none()).count(),
        theorem_failures: cases.iter().filter(|c| c.scope == Scope::Theorem && !c.passed && c.error.is_none()).count(),
        conjecture_failures: cases
            .iter()
            .filter(|c| c.scope == Scope::Conjecture && !c.passed && c.error.is_none())
            .count(),
        errors: cases.iter().filter(|c| c.error.is_some()).count(),
        equalities: cases.iter().filter(|c| c.equality).count(),
        planted_equalities: cases.iter().filter(|c| c.equality && c.planted).count(),
        min_margin,
        max_residual,
    }
}

/// Worker pool capped by `SCK_THREADS` when set.
pub fn thread_pool() -> rayon::ThreadPool {
    let threads = std::env::var("SCK_THREADS").ok().and_then(|s| s.parse::<usize>().ok()).unwrap_or(0);
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool")
}

/// Runs every case of a campaign; per-case failures are recorded, not raised.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    config.validate()?;
    let corpus = campaigns::corpus(config)?;
    let pool = thread_pool();
    let per_function: Vec<Vec<CaseResult>> = pool.install(|| {
        use rayon::prelude::*;
        corpus.par_iter().enumerate().map(|(i, item)| campaigns::run_item(config, i, item)).collect()
    });
    let mut cases: Vec<CaseResult> = per_function.into_iter().flatten().collect();
    for (k, c) in cases.iter_mut().enumerate() {
        c.case_id = k;
    }
    let arithmetic = match config.campaign {
        Campaign::EquipartitionSuite => "exact rational; float angular search",
        Campaign::LiftedConsistency => "exact rational; float Monte Carlo",
        _ => "exact rational",
    };
    Ok(CampaignReport {
        campaign: config.campaign,
        config: config.clone(),
        environment: Environment { version: env!("CARGO_PKG_VERSION").to_string(), arithmetic: arithmetic.into() },
        summary: summarize(&cases, corpus.len()),
        cases,
    })
}

pub use campaigns::random_linear_map;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_names() {
        assert_eq!(parse_m_range("1..5").unwrap(), (1, 5));
        assert_eq!(parse_m_range("2..=4").unwrap(), (2, 4));
        assert_eq!(parse_m_range("3").unwrap(), (3, 3));
        assert!(parse_m_range("5..1").is_err());
        for c in Campaign::ALL {
            assert_eq!(c.name().parse::<Campaign>().unwrap(), c);
        }
    }

    #[test]
    fn square_campaign_flags_equality() {
        let mut cfg = CampaignConfig::new(Campaign::Dim2P);
        cfg.count = 3;
        let r = run_campaign(&cfg).unwrap();
        assert!(r.ok());
        assert_eq!(r.summary.min_margin, Some(q(0)));
        let first = &r.cases[0];
        assert!(first.planted && first.equality && first.margin == Some(q(0)));
        assert!(r.cases.iter().all(|c| c.equality == (c.margin == Some(q(0)))));
    }

    #[test]
    fn reports_are_reproducible() {
        let mut cfg = CampaignConfig::new(Campaign::Dim1Bipolar);
        cfg.count = 4;
        cfg.m_range = (2, 3);
        let a = run_campaign(&cfg).unwrap();
        let b = run_campaign(&cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_csv(), b.to_csv());
        assert!(a.to_csv().starts_with("case_id,seed,m,n,lhs_num,lhs_den,bound_num,bound_den,margin_sign,equality,runtime_ms\n"));
    }
}
