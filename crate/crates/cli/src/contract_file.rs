//! Contract files: one contract per TOML document, flat keys, arrays for
//! schedules and fixings.
//!
//! ```toml
//! kind = "geo_asian_fixed"
//! r = 0.05
//! q = 0.0
//! sigma = 0.2
//! schedule = [0.0, 0.333333333333, 0.666666666667, 1.0]
//! strike = 100.0
//! fixings = [100.0]
//! x = 100.0
//! t = 0.0
//! ```
//!
//! Equally spaced schedules may be given as `n` and `maturity` instead of
//! `schedule`. Keys that do not belong to the declared kind are rejected, and
//! every invariant violation is reported at the offending key.

use std::fmt;
use std::ops::Range;
use std::path::Path;

use serde::Deserialize;
use toml::Spanned;

use powerbin_core::binaries::PowerBinarySpec;
use powerbin_core::normdist::NormDistPayoffSpec;
use powerbin_core::products::{GeoAsianFixedSpec, GeoAsianFloatingSpec, SavingsPlanSpec};
use powerbin_core::{ContractSpec, FixedObservations, MarketParams, MonitoringSchedule, PricingError, SignIndicator};

use crate::error::CliError;

pub const KINDS: [&str; 9] = [
    "power_standard",
    "power_binary",
    "nth_binary",
    "normdist",
    "savings_plan",
    "geo_asian_fixed",
    "geo_asian_floating",
    "cont_asian_fixed",
    "cont_asian_floating",
];

/// A contract together with the point it is valued at.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractFile {
    pub contract: ContractSpec,
    pub x: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

type Field<T> = Option<Spanned<T>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    kind: Spanned<String>,
    r: Field<f64>,
    q: Field<f64>,
    sigma: Field<f64>,
    #[serde(alias = "X")]
    x: Field<f64>,
    t: Field<f64>,
    alpha: Field<f64>,
    expiry: Field<f64>,
    threshold: Field<f64>,
    sign: Field<String>,
    thresholds: Field<Vec<f64>>,
    signs: Field<Vec<String>>,
    expiries: Field<Vec<f64>>,
    beta: Field<f64>,
    i: Field<f64>,
    strike: Field<f64>,
    tau1: Field<f64>,
    tau1p: Field<f64>,
    r_d: Field<f64>,
    r_f: Field<f64>,
    x0: Field<f64>,
    maturity: Field<f64>,
    schedule: Field<Vec<f64>>,
    n: Field<usize>,
    fixings: Field<Vec<f64>>,
    #[serde(alias = "J")]
    j: Field<f64>,
}

fn span<T>(f: &Field<T>) -> Option<Range<usize>> {
    f.as_ref().map(|s| s.span())
}

impl Raw {
    fn present(&self) -> Vec<(&'static str, Range<usize>)> {
        let all = [
            ("r", span(&self.r)),
            ("q", span(&self.q)),
            ("sigma", span(&self.sigma)),
            ("x", span(&self.x)),
            ("t", span(&self.t)),
            ("alpha", span(&self.alpha)),
            ("expiry", span(&self.expiry)),
            ("threshold", span(&self.threshold)),
            ("sign", span(&self.sign)),
            ("thresholds", span(&self.thresholds)),
            ("signs", span(&self.signs)),
            ("expiries", span(&self.expiries)),
            ("beta", span(&self.beta)),
            ("i", span(&self.i)),
            ("strike", span(&self.strike)),
            ("tau1", span(&self.tau1)),
            ("tau1p", span(&self.tau1p)),
            ("r_d", span(&self.r_d)),
            ("r_f", span(&self.r_f)),
            ("x0", span(&self.x0)),
            ("maturity", span(&self.maturity)),
            ("schedule", span(&self.schedule)),
            ("n", span(&self.n)),
            ("fixings", span(&self.fixings)),
            ("j", span(&self.j)),
        ];
        all.into_iter().filter_map(|(k, s)| s.map(|s| (k, s))).collect()
    }
}

fn keys_for(kind: &str) -> &'static [&'static str] {
    const MARKET: [&str; 5] = ["r", "q", "sigma", "x", "t"];
    match kind {
        "power_standard" => &["r", "q", "sigma", "x", "t", "alpha", "expiry"],
        "power_binary" => &["r", "q", "sigma", "x", "t", "alpha", "threshold", "sign", "expiry"],
        "nth_binary" => &["r", "q", "sigma", "x", "t", "alpha", "thresholds", "signs", "expiries"],
        "normdist" => &["r", "q", "sigma", "x", "t", "beta", "i", "strike", "alpha", "tau1", "tau1p", "expiry"],
        "savings_plan" => &["r_d", "r_f", "x0", "maturity", "sigma", "x", "t"],
        "geo_asian_fixed" => &["r", "q", "sigma", "x", "t", "schedule", "n", "maturity", "strike", "fixings"],
        "geo_asian_floating" => &["r", "q", "sigma", "x", "t", "schedule", "n", "maturity", "fixings"],
        "cont_asian_fixed" => &["r", "q", "sigma", "x", "t", "strike", "expiry", "j"],
        "cont_asian_floating" => &["r", "q", "sigma", "x", "t", "expiry", "j"],
        _ => &MARKET,
    }
}

// Maps byte offsets to 1-based line and column.
struct Locator<'a> {
    text: &'a str,
}

impl Locator<'_> {
    fn at(&self, offset: usize, message: impl Into<String>) -> ParseError {
        let offset = offset.min(self.text.len());
        let before = &self.text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

struct Builder<'a> {
    raw: Raw,
    loc: Locator<'a>,
    present: Vec<(&'static str, Range<usize>)>,
}

impl Builder<'_> {
    fn span_of(&self, key: &str) -> Range<usize> {
        self.present
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| self.raw.kind.span())
    }

    fn error_at(&self, key: &str, message: impl Into<String>) -> ParseError {
        self.loc.at(self.span_of(key).start, message)
    }

    fn required<T: Clone>(&self, key: &'static str, f: &Field<T>) -> Result<T, ParseError> {
        f.as_ref().map(|s| s.get_ref().clone()).ok_or_else(|| {
            let kind = self.raw.kind.get_ref();
            self.loc.at(0, format!("missing key `{key}` required for kind `{kind}`"))
        })
    }

    // Library validation errors name a field; point at the key that carries it.
    fn pricing(&self, e: PricingError, fallback: &str) -> ParseError {
        match e {
            PricingError::InvalidInput { field, reason } => {
                let key = match field {
                    "xi" => {
                        if self.raw.threshold.is_some() {
                            "threshold"
                        } else {
                            "thresholds"
                        }
                    }
                    "spot" => "x",
                    other => other,
                };
                let key = if self.present.iter().any(|(k, _)| *k == key) {
                    key
                } else {
                    fallback
                };
                self.error_at(key, format!("{field}: {reason}"))
            }
            other => self.error_at(fallback, other.to_string()),
        }
    }

    fn market(&self) -> Result<MarketParams, ParseError> {
        let r = self.required("r", &self.raw.r)?;
        let q = self.raw.q.as_ref().map_or(0.0, |s| *s.get_ref());
        let sigma = self.required("sigma", &self.raw.sigma)?;
        MarketParams::new(r, q, sigma).map_err(|e| self.pricing(e, "sigma"))
    }

    fn sign(&self, key: &'static str, s: &str) -> Result<SignIndicator, ParseError> {
        match s.to_ascii_lowercase().as_str() {
            "up" | "+" | "+1" => Ok(SignIndicator::Up),
            "down" | "-" | "-1" => Ok(SignIndicator::Down),
            other => Err(self.error_at(key, format!("{key}: expected \"up\" or \"down\", found \"{other}\""))),
        }
    }

    fn schedule(&self) -> Result<MonitoringSchedule, ParseError> {
        let sched = match (&self.raw.schedule, &self.raw.n) {
            (Some(_), Some(_)) => return Err(self.error_at("n", "give either `schedule` or `n` with `maturity`, not both")),
            (Some(s), None) => MonitoringSchedule::new(s.get_ref().clone()),
            (None, Some(n)) => {
                let maturity = self.required("maturity", &self.raw.maturity)?;
                if *n.get_ref() < 2 {
                    return Err(self.error_at("n", "n: discrete Asians need at least 2 monitoring dates"));
                }
                MonitoringSchedule::equally_spaced(*n.get_ref(), maturity)
            }
            (None, None) => {
                return Err(self.loc.at(0, "missing key `schedule` (or `n` with `maturity`)"));
            }
        }
        .map_err(|e| self.pricing(e, "schedule"))?;
        if self.raw.schedule.is_some() && self.raw.maturity.is_some() {
            return Err(self.error_at("maturity", "maturity: implied by `schedule`; remove it"));
        }
        if sched.len() < 2 {
            return Err(self.error_at("schedule", "schedule: discrete Asians need at least 2 monitoring dates"));
        }
        Ok(sched)
    }

    fn fixings(&self, schedule: &MonitoringSchedule, t: f64) -> Result<FixedObservations, ParseError> {
        let values = self.raw.fixings.as_ref().map_or_else(Vec::new, |f| f.get_ref().clone());
        let fixings = FixedObservations::new(values).map_err(|e| self.pricing(e, "fixings"))?;
        let expected = schedule.observed_by(t);
        if fixings.len() != expected {
            return Err(self.error_at(
                if self.raw.fixings.is_some() { "fixings" } else { "t" },
                format!(
                    "fixings: {expected} monitoring date(s) fall on or before t = {t}, found {} fixing(s)",
                    fixings.len()
                ),
            ));
        }
        Ok(fixings)
    }

    fn build(&self) -> Result<ContractFile, ParseError> {
        let kind = self.raw.kind.get_ref().as_str();
        let x = self.required("x", &self.raw.x)?;
        if !(x.is_finite() && x > 0.0) {
            return Err(self.error_at("x", "x: spot must be finite and > 0"));
        }
        let t = self.raw.t.as_ref().map_or(0.0, |s| *s.get_ref());
        if !(t.is_finite() && t >= 0.0) {
            return Err(self.error_at("t", "t: must be finite and >= 0"));
        }
        let contract = match kind {
            "power_standard" => ContractSpec::PowerStandard {
                market: self.market()?,
                alpha: self.required("alpha", &self.raw.alpha)?,
                expiry: self.required("expiry", &self.raw.expiry)?,
            },
            "power_binary" => {
                let market = self.market()?;
                let sign = self.sign("sign", &self.required("sign", &self.raw.sign)?)?;
                let spec = PowerBinarySpec::first_order(
                    self.required("alpha", &self.raw.alpha)?,
                    self.required("threshold", &self.raw.threshold)?,
                    sign,
                    self.required("expiry", &self.raw.expiry)?,
                )
                .map_err(|e| self.pricing(e, "threshold"))?;
                ContractSpec::PowerBinary { market, spec }
            }
            "nth_binary" => {
                let market = self.market()?;
                let signs = self
                    .required("signs", &self.raw.signs)?
                    .iter()
                    .map(|s| self.sign("signs", s))
                    .collect::<Result<Vec<_>, _>>()?;
                let thresholds = self.required("thresholds", &self.raw.thresholds)?;
                let expiries = self.required("expiries", &self.raw.expiries)?;
                if signs.len() != thresholds.len() || expiries.len() != thresholds.len() {
                    return Err(self.error_at("signs", "thresholds, signs and expiries must have the same length"));
                }
                let spec = PowerBinarySpec::new(self.required("alpha", &self.raw.alpha)?, thresholds, signs, expiries)
                    .map_err(|e| self.pricing(e, "thresholds"))?;
                ContractSpec::NthBinary { market, spec }
            }
            "normdist" => {
                let market = self.market()?;
                let spec = NormDistPayoffSpec::new(
                    self.required("beta", &self.raw.beta)?,
                    self.required("i", &self.raw.i)?,
                    self.required("strike", &self.raw.strike)?,
                    self.required("alpha", &self.raw.alpha)?,
                    self.required("tau1", &self.raw.tau1)?,
                    self.required("tau1p", &self.raw.tau1p)?,
                )
                .map_err(|e| self.pricing(e, "strike"))?;
                if spec.tau1p <= 0.0 {
                    return Err(self.error_at("tau1p", "tau1p: must be > 0"));
                }
                ContractSpec::NormDist {
                    market,
                    spec,
                    expiry: self.required("expiry", &self.raw.expiry)?,
                }
            }
            "savings_plan" => {
                let spec = SavingsPlanSpec::new(
                    self.required("r_d", &self.raw.r_d)?,
                    self.required("r_f", &self.raw.r_f)?,
                    self.required("x0", &self.raw.x0)?,
                    self.required("maturity", &self.raw.maturity)?,
                    self.required("sigma", &self.raw.sigma)?,
                )
                .map_err(|e| self.pricing(e, "maturity"))?;
                ContractSpec::SavingsPlan { spec }
            }
            "geo_asian_fixed" => {
                let market = self.market()?;
                let schedule = self.schedule()?;
                let fixings = self.fixings(&schedule, t)?;
                let spec = GeoAsianFixedSpec::new(schedule, self.required("strike", &self.raw.strike)?, fixings)
                    .map_err(|e| self.pricing(e, "strike"))?;
                ContractSpec::GeoAsianFixed { market, spec }
            }
            "geo_asian_floating" => {
                let market = self.market()?;
                let schedule = self.schedule()?;
                let fixings = self.fixings(&schedule, t)?;
                let spec = GeoAsianFloatingSpec::new(schedule, fixings).map_err(|e| self.pricing(e, "schedule"))?;
                ContractSpec::GeoAsianFloating { market, spec }
            }
            "cont_asian_fixed" | "cont_asian_floating" => {
                let market = self.market()?;
                let expiry = self.required("expiry", &self.raw.expiry)?;
                let j = self.required("j", &self.raw.j)?;
                if !(j.is_finite() && j > 0.0) {
                    return Err(self.error_at("j", "j: running average must be finite and > 0"));
                }
                if kind == "cont_asian_fixed" {
                    let strike = self.required("strike", &self.raw.strike)?;
                    if !(strike.is_finite() && strike > 0.0) {
                        return Err(self.error_at("strike", "strike: must be finite and > 0"));
                    }
                    ContractSpec::ContAsianFixed {
                        market,
                        strike,
                        expiry,
                        j,
                    }
                } else {
                    ContractSpec::ContAsianFloating { market, expiry, j }
                }
            }
            _ => unreachable!("kind checked before building"),
        };
        let expiry = contract.expiry();
        if !(expiry.is_finite() && expiry >= 0.0) {
            let key = ["expiry", "expiries", "maturity", "schedule"]
                .into_iter()
                .find(|k| self.present.iter().any(|(p, _)| p == k))
                .unwrap_or("kind");
            return Err(self.error_at(key, format!("{key}: must be finite and >= 0")));
        }
        if t > expiry {
            return Err(self.error_at("t", format!("t: valuation time {t} is after expiry {expiry}")));
        }
        Ok(ContractFile { contract, x, t })
    }
}

pub fn parse_contract(text: &str) -> Result<ContractFile, ParseError> {
    let loc = Locator { text };
    let raw: Raw = toml::from_str(text).map_err(|e| {
        let offset = e.span().map_or(0, |s| s.start);
        loc.at(offset, e.message().trim().to_string())
    })?;
    let kind = raw.kind.get_ref().clone();
    if !KINDS.contains(&kind.as_str()) {
        return Err(loc.at(
            raw.kind.span().start,
            format!("kind: unknown contract kind \"{kind}\" (expected one of {})", KINDS.join(", ")),
        ));
    }
    let present = raw.present();
    let allowed = keys_for(&kind);
    if let Some((key, s)) = present.iter().find(|(k, _)| !allowed.contains(k)) {
        return Err(loc.at(s.start, format!("key `{key}` does not apply to kind `{kind}`")));
    }
    Builder { raw, loc, present }.build()
}

pub fn load_contract(path: &Path) -> Result<ContractFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_contract(&text).map_err(|e| CliError::Contract {
        path: path.display().to_string(),
        line: e.line,
        column: e.column,
        message: e.message,
    })
}
