//! Declarative policy strategies and their file format.
//!
//! A scenario file is TOML, in the same grammar as parameter files:
//!
//! ```toml
//! name = "Gradual-3"
//!
//! [[impulse]]          # segments add up; omit `end` for a persistent impulse
//! start = 0
//! end = 12             # exclusive
//! ramp = 4             # optional linear phase-in, in quarters
//! d_gc = -0.0075
//!
//! [fx]
//! regime = "crawl"     # or "fixed"
//! crawl_annual = 0.15
//! devaluation = { quarter = 0, size = 0.30 }
//!
//! [[debt_event]]
//! quarter = 4
//! haircut = 0.30
//! rate_relief = 0.0
//! flavor = "PSI"       # PSI | OSI | MKT
//!
//! [ifi]
//! start = 0
//! duration = 8
//! injection = 0.0125
//!
//! [lvt]
//! start = 4
//! d_tau_bar = 0.005
//!
//! [cfm]
//! start = 0
//! duration = 8
//! damping = 0.5
//!
//! [monetary]
//! a_pi = 1.1
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::external::{crawl_quarterly, FxRegime};
use crate::fiscal::FiscalImpulse;
use crate::params::{MonetaryParams, Params};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, rename = "impulse", skip_serializing_if = "Vec::is_empty")]
    pub impulses: Vec<ImpulseSegment>,
    #[serde(default)]
    pub fx: FxSpec,
    #[serde(default, rename = "debt_event", skip_serializing_if = "Vec::is_empty")]
    pub debt_events: Vec<DebtEvent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ifi: Option<IfiProgram>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lvt: Option<LvtReform>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfm: Option<CfmWindow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monetary: Option<MonetaryOverride>,
}

/// A block of fiscal impulse. Overlapping segments add.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpulseSegment {
    pub start: u32,
    /// Exclusive end quarter; `None` keeps the impulse to the horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<u32>,
    /// Quarters of linear phase-in; 0 applies the full impulse at `start`.
    #[serde(default)]
    pub ramp: u32,
    #[serde(default)]
    pub d_gc: f64,
    #[serde(default)]
    pub d_gi: f64,
    #[serde(default)]
    pub d_tr: f64,
}

impl ImpulseSegment {
    pub fn at(&self, t: u32) -> FiscalImpulse {
        if t < self.start || self.end.is_some_and(|e| t >= e) {
            return FiscalImpulse::ZERO;
        }
        let w = if self.ramp == 0 { 1.0 } else { ((t - self.start + 1) as f64 / self.ramp as f64).min(1.0) };
        FiscalImpulse { d_gc: w * self.d_gc, d_gi: w * self.d_gi, d_tr: w * self.d_tr }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PegKind {
    #[default]
    Fixed,
    Crawl,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FxSpec {
    #[serde(default)]
    pub regime: PegKind,
    /// Annual crawl rate; required for `regime = "crawl"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crawl_annual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub devaluation: Option<Devaluation>,
}

impl FxSpec {
    pub fn initial_regime(&self) -> FxRegime {
        match self.regime {
            PegKind::Fixed => FxRegime::Fixed,
            PegKind::Crawl => FxRegime::Crawl(crawl_quarterly(self.crawl_annual.unwrap_or(0.0))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Devaluation {
    pub quarter: u32,
    pub size: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DebtFlavor {
    /// Private sector involvement.
    #[serde(rename = "PSI")]
    Psi,
    /// Official sector involvement.
    #[serde(rename = "OSI")]
    Osi,
    /// Market-based operation (buyback, exchange).
    #[serde(rename = "MKT")]
    Mkt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DebtEvent {
    pub quarter: u32,
    #[serde(default)]
    pub haircut: f64,
    #[serde(default)]
    pub rate_relief: f64,
    pub flavor: DebtFlavor,
    /// New foreign-currency share of the debt after the operation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fx_share: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfiProgram {
    pub start: u32,
    pub duration: u32,
    /// Reserve injection per quarter while active.
    pub injection: f64,
    /// Weight on the programme indicator in the risk premium (1 = full effect).
    #[serde(default = "one")]
    pub rp_scale: f64,
    /// Credibility gain at start; defaults to the calibration value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cred_gain: Option<f64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LvtReform {
    pub start: u32,
    pub d_tau_bar: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cred_gain: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CfmWindow {
    pub start: u32,
    pub duration: u32,
    pub damping: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonetaryOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_pi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_shock: Option<RateShock>,
}

/// Additive deviation of the policy rate from its rule, for impulse responses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateShock {
    pub start: u32,
    pub duration: u32,
    pub size: f64,
}

fn window(start: u32, duration: u32, t: u32) -> bool {
    t >= start && t - start < duration
}

/// Scenario switches in force during one quarter.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PolicyFlags {
    /// IFI indicator as it enters the risk premium (0 when inactive).
    pub ifi: f64,
    pub ifi_injection: f64,
    pub ifi_starts: bool,
    pub cfm_damping: Option<f64>,
    pub lvt_shift: f64,
    pub lvt_starts: bool,
}

impl Scenario {
    /// No impulses, no events, fixed peg.
    pub fn baseline(name: impl Into<String>) -> Self {
        Scenario {
            name: name.into(),
            impulses: Vec::new(),
            fx: FxSpec::default(),
            debt_events: Vec::new(),
            ifi: None,
            lvt: None,
            cfm: None,
            monetary: None,
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn impulse(&self, t: u32) -> FiscalImpulse {
        self.impulses.iter().fold(FiscalImpulse::ZERO, |acc, s| acc + s.at(t))
    }

    pub fn flags(&self, t: u32) -> PolicyFlags {
        let mut f = PolicyFlags::default();
        if let Some(ifi) = &self.ifi {
            if window(ifi.start, ifi.duration, t) {
                f.ifi = ifi.rp_scale;
                f.ifi_injection = ifi.injection;
                f.ifi_starts = t == ifi.start;
            }
        }
        if let Some(c) = &self.cfm {
            if window(c.start, c.duration, t) {
                f.cfm_damping = Some(c.damping);
            }
        }
        if let Some(l) = &self.lvt {
            if t >= l.start {
                f.lvt_shift = l.d_tau_bar;
                f.lvt_starts = t == l.start;
            }
        }
        f
    }

    pub fn devaluation_at(&self, t: u32) -> Option<f64> {
        self.fx.devaluation.filter(|d| d.quarter == t).map(|d| d.size)
    }

    pub fn debt_events_at(&self, t: u32) -> impl Iterator<Item = &DebtEvent> {
        self.debt_events.iter().filter(move |e| e.quarter == t)
    }

    /// Monetary coefficients after scenario overrides.
    pub fn monetary_params(&self, params: &Params) -> MonetaryParams {
        let mut m = params.monetary.clone();
        if let Some(o) = &self.monetary {
            m.a_pi = o.a_pi.unwrap_or(m.a_pi);
            m.a_g = o.a_g.unwrap_or(m.a_g);
            m.smoothing = o.smoothing.unwrap_or(m.smoothing);
            m.theta_m = o.theta_m.unwrap_or(m.theta_m);
        }
        m
    }

    pub fn rate_shock(&self, t: u32) -> f64 {
        match self.monetary.as_ref().and_then(|m| m.rate_shock) {
            Some(s) if window(s.start, s.duration, t) => s.size,
            _ => 0.0,
        }
    }

    /// Checks the scenario against a simulation horizon, returning all violations.
    pub fn validate(&self, horizon: u32) -> Vec<Violation> {
        let mut v = Vec::new();
        let mut quarter = |what: String, q: u32| {
            if q >= horizon {
                v.push(Violation::new(what, format!("quarter {q} outside [0, {horizon})")));
            }
        };
        for (i, s) in self.impulses.iter().enumerate() {
            quarter(format!("impulse[{i}].start"), s.start);
        }
        if let Some(d) = &self.fx.devaluation {
            quarter("fx.devaluation.quarter".into(), d.quarter);
        }
        for (i, e) in self.debt_events.iter().enumerate() {
            quarter(format!("debt_event[{i}].quarter"), e.quarter);
        }
        if let Some(x) = &self.ifi {
            quarter("ifi.start".into(), x.start);
        }
        if let Some(x) = &self.lvt {
            quarter("lvt.start".into(), x.start);
        }
        if let Some(x) = &self.cfm {
            quarter("cfm.start".into(), x.start);
        }
        if let Some(s) = self.monetary.as_ref().and_then(|m| m.rate_shock) {
            quarter("monetary.rate_shock.start".into(), s.start);
            if s.duration == 0 {
                v.push(Violation::new("monetary.rate_shock.duration", "must be > 0"));
            }
        }

        if self.name.trim().is_empty() {
            v.push(Violation::new("name", "must not be empty"));
        }
        for (i, s) in self.impulses.iter().enumerate() {
            if s.end.is_some_and(|e| e <= s.start) {
                v.push(Violation::new(format!("impulse[{i}].end"), "must be after start"));
            }
        }
        for t in 0..horizon {
            if let Some(viol) = self.impulse(t).validate().into_iter().next() {
                v.push(Violation::new(format!("impulse@{t}.{}", viol.field), viol.message));
            }
        }
        match (self.fx.regime, self.fx.crawl_annual) {
            (PegKind::Crawl, None) => v.push(Violation::new("fx.crawl_annual", "required for a crawling peg")),
            (_, Some(c)) if !(c > -1.0 && c.is_finite()) => {
                v.push(Violation::new("fx.crawl_annual", "must be finite and > -1"))
            }
            (PegKind::Crawl, Some(c)) if c < 0.0 => v.push(Violation::new("fx.crawl_annual", "crawl rate must be >= 0")),
            _ => {}
        }
        if let Some(d) = &self.fx.devaluation {
            if !(d.size > -1.0 && d.size.is_finite()) {
                v.push(Violation::new("fx.devaluation.size", "must be finite and > -1"));
            }
        }
        for (i, e) in self.debt_events.iter().enumerate() {
            if !(0.0..1.0).contains(&e.haircut) {
                v.push(Violation::new(format!("debt_event[{i}].haircut"), "must lie in [0,1)"));
            }
            if !(e.rate_relief >= 0.0 && e.rate_relief.is_finite()) {
                v.push(Violation::new(format!("debt_event[{i}].rate_relief"), "must be finite and >= 0"));
            }
            if let Some(s) = e.fx_share {
                if !(0.0..=1.0).contains(&s) {
                    v.push(Violation::new(format!("debt_event[{i}].fx_share"), "must lie in [0,1]"));
                }
            }
        }
        if let Some(x) = &self.ifi {
            if x.duration == 0 {
                v.push(Violation::new("ifi.duration", "must be > 0"));
            }
            if !x.injection.is_finite() || !x.rp_scale.is_finite() {
                v.push(Violation::new("ifi", "injection and rp_scale must be finite"));
            }
        }
        if let Some(x) = &self.lvt {
            if !x.d_tau_bar.is_finite() {
                v.push(Violation::new("lvt.d_tau_bar", "must be finite"));
            }
        }
        if let Some(x) = &self.cfm {
            if x.duration == 0 {
                v.push(Violation::new("cfm.duration", "must be > 0"));
            }
            if !(x.damping > 0.0 && x.damping < 1.0) {
                v.push(Violation::new("cfm.damping", "must lie in (0,1)"));
            }
        }
        v
    }

    pub fn check(&self, horizon: u32) -> Result<()> {
        let v = self.validate(horizon);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }
}

/// A list of scenario files, resolved relative to the set file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSet {
    #[serde(default)]
    pub name: Option<String>,
    pub scenarios: Vec<PathBuf>,
}

impl ScenarioSet {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut set: ScenarioSet =
            toml::from_str(&text).map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() })?;
        let dir = path.parent().unwrap_or(Path::new("."));
        for p in &mut set.scenarios {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(set)
    }

    /// Loads every listed scenario. Names must be unique.
    pub fn load_scenarios(&self) -> Result<Vec<Scenario>> {
        if self.scenarios.is_empty() {
            return Err(Error::EmptyInput("scenario set lists no scenarios"));
        }
        let list = self.scenarios.iter().map(Scenario::from_file).collect::<Result<Vec<_>>>()?;
        let mut names: Vec<&str> = list.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Config(format!("duplicate scenario name {:?}", w[0])));
        }
        Ok(list)
    }
}
