//! Structural coefficients and their configuration file.
//!
//! Parameter files use TOML syntax: `key = value` pairs grouped under
//! `[section]` headers, `#` comments. Every field is required; unknown keys are
//! rejected. Rates are quarterly decimals. Flow ratios (primary deficit, fiscal
//! impulses, revenue deviations, current and capital account) are quarterly
//! flows over annualized GDP, so they add directly to the debt and reserve
//! stocks.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::state::Regime;

/// Reference calibration shipped with the crate.
pub const REFERENCE_CFG: &str = include_str!("../../../calibration/reference.cfg");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub regime: RegimeParams,
    pub growth: GrowthParams,
    pub multipliers: MultiplierParams,
    pub inflation: InflationParams,
    pub fiscal: FiscalParams,
    pub debt: DebtParams,
    pub external: ExternalParams,
    pub gap: GapParams,
    pub labor: LaborParams,
    pub social: SocialParams,
    pub monetary: MonetaryParams,
    pub welfare: WelfareWeights,
    pub shocks: ShockParams,
    pub initial: InitialConditions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeParams {
    pub r_crit: f64,
    pub b_crisis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthParams {
    pub g_pot: f64,
    pub delta_p: f64,
    pub alpha_p: f64,
    pub beta_gini: f64,
    pub gini_bar: f64,
    /// Baseline spending shares carried for bookkeeping and public-capital accumulation.
    pub gc_base: f64,
    pub gi_base: f64,
    pub tr_base: f64,
}

/// Mean multipliers for one regime, per unit (fraction of GDP) of impulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplierRow {
    pub gc: f64,
    pub tr: f64,
    pub gi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplierDraw {
    PerQuarter,
    PerPath,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplierParams {
    pub boom: MultiplierRow,
    pub recession: MultiplierRow,
    pub crisis: MultiplierRow,
    pub noise_scale: f64,
    pub dof: f64,
    pub draw: MultiplierDraw,
}

impl MultiplierParams {
    pub fn mean(&self, regime: Regime) -> MultiplierRow {
        match regime {
            Regime::Boom => self.boom,
            Regime::Recession => self.recession,
            Regime::Crisis => self.crisis,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InflationParams {
    pub rho_pi: f64,
    pub kappa: f64,
    pub pi_star: f64,
    pub phi_bar: f64,
    pub k_phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiscalParams {
    pub tau_bar: f64,
    pub beta_g: f64,
    pub beta_pi: f64,
    pub beta_cred: f64,
    pub cred_bar: f64,
    pub pd0: f64,
    pub pd_target: f64,
    pub gamma_boom: f64,
    pub gamma_recession: f64,
    pub gamma_crisis: f64,
    /// Slope of the logistic convergence factor.
    pub k_a: f64,
    /// Midpoint quarter of the logistic convergence factor.
    pub t_mid: f64,
}

impl FiscalParams {
    pub fn gamma(&self, regime: Regime) -> f64 {
        match regime {
            Regime::Boom => self.gamma_boom,
            Regime::Recession => self.gamma_recession,
            Regime::Crisis => self.gamma_crisis,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DebtParams {
    /// Initial share of debt denominated in foreign currency.
    pub lambda_fx: f64,
    pub r_f: f64,
    pub rho_rp: f64,
    pub f_max: f64,
    pub k_f: f64,
    pub b_mid: f64,
    pub beta_r: f64,
    pub beta_b: f64,
    pub beta_u: f64,
    pub beta_ifi: f64,
    /// Composite institutional-quality term, a single scalar.
    pub institutional: f64,
    /// Share of the debt stock repriced each quarter.
    pub lambda_mat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalParams {
    pub ca_bar: f64,
    pub eta_ca_s: f64,
    pub eta_ca_g: f64,
    pub eta_ca_gc: f64,
    pub eta_ca_gi: f64,
    pub eta_ca_tr: f64,
    pub eta_ka_rp: f64,
    pub eta_ka_u: f64,
    /// Quadratic capital-flight coefficient on (B - 1).
    pub c_b: f64,
    pub p_realign: f64,
    pub dev_size: f64,
    pub realign_cooldown: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapParams {
    pub alpha_b_r: f64,
    pub alpha_b_rp: f64,
    pub alpha_b_u: f64,
    pub alpha_b_cred: f64,
    /// Cap on the reserve-scarcity term (in units of `alpha_b_r`).
    pub scarcity_cap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaborParams {
    pub omega_e: f64,
    pub phi_d: f64,
    pub phi_r: f64,
    pub eta_s: f64,
    pub e_bar: f64,
    pub chi_w: f64,
    pub chi_e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SocialParams {
    pub beta_g_tr: f64,
    pub beta_g_e: f64,
    pub lambda_he: f64,
    pub lambda_htr: f64,
    pub lambda_hg: f64,
    pub rho_u: f64,
    pub lambda_ug: f64,
    pub lambda_upi: f64,
    pub lambda_uaust: f64,
    pub rho_c: f64,
    pub gain_ifi: f64,
    pub gain_lvt: f64,
    pub loss_realign: f64,
    pub loss_psi: f64,
    pub loss_osi: f64,
    pub loss_mkt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonetaryParams {
    pub a_pi: f64,
    pub a_g: f64,
    pub smoothing: f64,
    pub theta_m: f64,
}

/// One welfare component: weight and affine normalization `(x - center) / scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WelfareComponent {
    pub weight: f64,
    pub center: f64,
    pub scale: f64,
}

impl WelfareComponent {
    pub fn normalize(&self, x: f64) -> f64 {
        (x - self.center) / self.scale
    }
}

/// Synthetic welfare index weights. The GDP component is measured on `ln Y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WelfareWeights {
    pub gdp: WelfareComponent,
    pub employment: WelfareComponent,
    pub health: WelfareComponent,
    pub inflation: WelfareComponent,
    pub debt: WelfareComponent,
    pub gap: WelfareComponent,
    pub unrest: WelfareComponent,
    pub gini: WelfareComponent,
}

impl WelfareWeights {
    pub const NAMES: [&'static str; 8] =
        ["gdp", "employment", "health", "inflation", "debt", "gap", "unrest", "gini"];

    /// Components in table order: GDP, employment, health, inflation, debt, gap, unrest, Gini.
    pub fn components(&self) -> [WelfareComponent; 8] {
        [
            self.gdp,
            self.employment,
            self.health,
            self.inflation,
            self.debt,
            self.gap,
            self.unrest,
            self.gini,
        ]
    }

    pub fn weights(&self) -> [f64; 8] {
        self.components().map(|c| c.weight)
    }
}

/// Scale and degrees of freedom of a zero-mean shock. `dof = inf` selects a normal draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShockSpec {
    pub scale: f64,
    pub dof: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShockParams {
    pub rho_z: f64,
    pub demand: ShockSpec,
    pub inflation: ShockSpec,
    pub current_account: ShockSpec,
    pub capital_account: ShockSpec,
    pub gap: ShockSpec,
    pub employment: ShockSpec,
    pub gini: ShockSpec,
    pub global: ShockSpec,
}

impl ShockParams {
    pub fn families(&self) -> [(&'static str, ShockSpec); 8] {
        [
            ("demand", self.demand),
            ("inflation", self.inflation),
            ("current_account", self.current_account),
            ("capital_account", self.capital_account),
            ("gap", self.gap),
            ("employment", self.employment),
            ("gini", self.gini),
            ("global", self.global),
        ]
    }

    fn families_mut(&mut self) -> [&mut ShockSpec; 8] {
        [
            &mut self.demand,
            &mut self.inflation,
            &mut self.current_account,
            &mut self.capital_account,
            &mut self.gap,
            &mut self.employment,
            &mut self.gini,
            &mut self.global,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConditions {
    pub y: f64,
    pub b: f64,
    pub reserves: f64,
    pub pi: f64,
    pub rp: f64,
    pub r_eff: f64,
    pub i_pol: f64,
    pub employment: f64,
    pub gini: f64,
    pub health: f64,
    pub unrest: f64,
    pub cred: f64,
}

impl Params {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    /// Parses a parameter file. Does not check invariants; see [`Params::load`].
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text)
            .map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() })
    }

    /// Parses and validates a parameter file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let p = Self::from_file(path)?;
        p.check()?;
        Ok(p)
    }

    pub fn reference() -> Self {
        Self::from_toml_str(REFERENCE_CFG).expect("shipped reference calibration parses")
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("params serialize")
    }

    /// Copy with every shock scale and the multiplier noise set to zero.
    pub fn without_shocks(&self) -> Self {
        let mut p = self.clone();
        p.multipliers.noise_scale = 0.0;
        for s in p.shocks.families_mut() {
            s.scale = 0.0;
        }
        p
    }

    pub fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    /// Checks every parameter invariant and returns all violations found.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let mut finite = |name: &str, x: f64| {
            if !x.is_finite() {
                v.push(Violation::new(name, format!("must be finite, got {x}")));
            }
        };
        // dof fields may be infinite and are handled separately.
        for (name, x) in self.finite_fields() {
            finite(name, x);
        }

        let m = &self.multipliers;
        for (name, row) in [("boom", m.boom), ("recession", m.recession), ("crisis", m.crisis)] {
            if !(row.gi > row.tr && row.tr > row.gc) {
                v.push(Violation::new(
                    format!("multipliers.{name}"),
                    format!(
                        "hierarchy GI > TR > GC violated (gc={}, tr={}, gi={})",
                        row.gc, row.tr, row.gi
                    ),
                ));
            }
        }
        for (name, f) in [
            ("gc", (|r: MultiplierRow| r.gc) as fn(MultiplierRow) -> f64),
            ("tr", |r| r.tr),
            ("gi", |r| r.gi),
        ] {
            if !(f(m.crisis) > f(m.recession) && f(m.recession) > f(m.boom)) {
                v.push(Violation::new(
                    format!("multipliers.{name}"),
                    "regime ordering Crisis > Recession > Boom violated",
                ));
            }
        }
        nonneg(&mut v, "multipliers.noise_scale", m.noise_scale);
        dof_ok(&mut v, "multipliers.dof", m.dof);

        if self.regime.r_crit <= 0.0 {
            v.push(Violation::new("regime.r_crit", "must be > 0"));
        }
        if self.regime.b_crisis < 1.0 {
            v.push(Violation::new("regime.b_crisis", "must be >= 1"));
        }

        unit_interval_open(&mut v, "inflation.rho_pi", self.inflation.rho_pi);
        unit_interval_open(&mut v, "debt.rho_rp", self.debt.rho_rp);
        unit_interval_open(&mut v, "shocks.rho_z", self.shocks.rho_z);
        unit_interval_open(&mut v, "social.rho_u", self.social.rho_u);
        unit_interval_open(&mut v, "monetary.smoothing", self.monetary.smoothing);
        if !(0.0..=1.0).contains(&self.social.rho_c) {
            v.push(Violation::new("social.rho_c", "must lie in [0,1]"));
        }
        if !(self.labor.omega_e > 0.0 && self.labor.omega_e <= 1.0) {
            v.push(Violation::new("labor.omega_e", "must lie in (0,1]"));
        }
        if !(self.debt.lambda_mat > 0.0 && self.debt.lambda_mat <= 1.0) {
            v.push(Violation::new("debt.lambda_mat", "must lie in (0,1]"));
        }
        if !(0.0..=1.0).contains(&self.debt.lambda_fx) {
            v.push(Violation::new("debt.lambda_fx", "must lie in [0,1]"));
        }
        if !(0.0..=1.0).contains(&self.external.p_realign) {
            v.push(Violation::new("external.p_realign", "must lie in [0,1]"));
        }
        if !(0.0..1.0).contains(&self.growth.delta_p) {
            v.push(Violation::new("growth.delta_p", "must lie in [0,1)"));
        }

        for (name, x) in [
            ("inflation.k_phi", self.inflation.k_phi),
            ("fiscal.k_a", self.fiscal.k_a),
            ("debt.k_f", self.debt.k_f),
        ] {
            if x <= 0.0 {
                v.push(Violation::new(name, "logistic slope must be > 0"));
            }
        }
        nonneg(&mut v, "inflation.phi_bar", self.inflation.phi_bar);
        nonneg(&mut v, "debt.f_max", self.debt.f_max);
        nonneg(&mut v, "external.c_b", self.external.c_b);
        nonneg(&mut v, "external.dev_size", self.external.dev_size);
        nonneg(&mut v, "gap.scarcity_cap", self.gap.scarcity_cap);
        nonneg(&mut v, "monetary.theta_m", self.monetary.theta_m);

        let f = &self.fiscal;
        if !(f.gamma_crisis < f.gamma_recession && f.gamma_recession < f.gamma_boom) {
            v.push(Violation::new("fiscal.gamma", "must satisfy crisis < recession < boom"));
        }
        let d = &self.debt;
        if d.beta_r >= 0.0 {
            v.push(Violation::new("debt.beta_r", "must be < 0 (reserves lower risk)"));
        }
        if d.beta_ifi >= 0.0 {
            v.push(Violation::new("debt.beta_ifi", "must be < 0 (IFI programs lower risk)"));
        }
        let s = &self.social;
        if s.beta_g_tr >= 0.0 {
            v.push(Violation::new("social.beta_g_tr", "must be < 0"));
        }
        if s.beta_g_e <= 0.0 {
            v.push(Violation::new("social.beta_g_e", "must be > 0"));
        }

        for (name, c) in WelfareWeights::NAMES.iter().zip(self.welfare.components()) {
            if c.scale == 0.0 || !c.scale.is_finite() {
                v.push(Violation::new(format!("welfare.{name}.scale"), "must be finite and non-zero"));
            }
        }
        let signs = [1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0, -1.0];
        for ((name, c), sign) in WelfareWeights::NAMES.iter().zip(self.welfare.components()).zip(signs) {
            if c.weight * sign <= 0.0 {
                v.push(Violation::new(format!("welfare.{name}.weight"), "has the wrong sign"));
            }
        }

        for (name, spec) in self.shocks.families() {
            nonneg(&mut v, &format!("shocks.{name}.scale"), spec.scale);
            dof_ok(&mut v, &format!("shocks.{name}.dof"), spec.dof);
        }

        let i = &self.initial;
        if i.y <= 0.0 {
            v.push(Violation::new("initial.y", "must be > 0"));
        }
        if i.b < 0.0 {
            v.push(Violation::new("initial.b", "must be >= 0"));
        }
        for (name, x) in [
            ("initial.employment", i.employment),
            ("initial.gini", i.gini),
            ("initial.health", i.health),
            ("initial.cred", i.cred),
        ] {
            if !(0.0..=1.0).contains(&x) {
                v.push(Violation::new(name, "must lie in [0,1]"));
            }
        }
        nonneg(&mut v, "initial.unrest", i.unrest);
        v
    }

    fn finite_fields(&self) -> Vec<(&'static str, f64)> {
        let g = &self.growth;
        let i = &self.inflation;
        let f = &self.fiscal;
        let d = &self.debt;
        let e = &self.external;
        let gp = &self.gap;
        let l = &self.labor;
        let s = &self.social;
        let m = &self.monetary;
        let init = &self.initial;
        vec![
            ("regime.r_crit", self.regime.r_crit),
            ("regime.b_crisis", self.regime.b_crisis),
            ("growth.g_pot", g.g_pot),
            ("growth.delta_p", g.delta_p),
            ("growth.alpha_p", g.alpha_p),
            ("growth.beta_gini", g.beta_gini),
            ("growth.gini_bar", g.gini_bar),
            ("growth.gc_base", g.gc_base),
            ("growth.gi_base", g.gi_base),
            ("growth.tr_base", g.tr_base),
            ("multipliers.boom.gc", self.multipliers.boom.gc),
            ("multipliers.noise_scale", self.multipliers.noise_scale),
            ("inflation.rho_pi", i.rho_pi),
            ("inflation.kappa", i.kappa),
            ("inflation.pi_star", i.pi_star),
            ("inflation.phi_bar", i.phi_bar),
            ("inflation.k_phi", i.k_phi),
            ("fiscal.tau_bar", f.tau_bar),
            ("fiscal.beta_g", f.beta_g),
            ("fiscal.beta_pi", f.beta_pi),
            ("fiscal.beta_cred", f.beta_cred),
            ("fiscal.cred_bar", f.cred_bar),
            ("fiscal.pd0", f.pd0),
            ("fiscal.pd_target", f.pd_target),
            ("fiscal.k_a", f.k_a),
            ("fiscal.t_mid", f.t_mid),
            ("debt.r_f", d.r_f),
            ("debt.f_max", d.f_max),
            ("debt.b_mid", d.b_mid),
            ("debt.beta_b", d.beta_b),
            ("debt.beta_u", d.beta_u),
            ("debt.institutional", d.institutional),
            ("external.ca_bar", e.ca_bar),
            ("external.eta_ca_s", e.eta_ca_s),
            ("external.eta_ca_g", e.eta_ca_g),
            ("external.eta_ca_gc", e.eta_ca_gc),
            ("external.eta_ca_gi", e.eta_ca_gi),
            ("external.eta_ca_tr", e.eta_ca_tr),
            ("external.eta_ka_rp", e.eta_ka_rp),
            ("external.eta_ka_u", e.eta_ka_u),
            ("gap.alpha_b_r", gp.alpha_b_r),
            ("gap.alpha_b_rp", gp.alpha_b_rp),
            ("gap.alpha_b_u", gp.alpha_b_u),
            ("gap.alpha_b_cred", gp.alpha_b_cred),
            ("labor.phi_d", l.phi_d),
            ("labor.phi_r", l.phi_r),
            ("labor.eta_s", l.eta_s),
            ("labor.e_bar", l.e_bar),
            ("labor.chi_w", l.chi_w),
            ("labor.chi_e", l.chi_e),
            ("social.lambda_he", s.lambda_he),
            ("social.lambda_htr", s.lambda_htr),
            ("social.lambda_hg", s.lambda_hg),
            ("social.lambda_ug", s.lambda_ug),
            ("social.lambda_upi", s.lambda_upi),
            ("social.lambda_uaust", s.lambda_uaust),
            ("social.gain_ifi", s.gain_ifi),
            ("social.gain_lvt", s.gain_lvt),
            ("social.loss_realign", s.loss_realign),
            ("social.loss_psi", s.loss_psi),
            ("social.loss_osi", s.loss_osi),
            ("social.loss_mkt", s.loss_mkt),
            ("monetary.a_pi", m.a_pi),
            ("monetary.a_g", m.a_g),
            ("monetary.theta_m", m.theta_m),
            ("initial.y", init.y),
            ("initial.b", init.b),
            ("initial.reserves", init.reserves),
            ("initial.pi", init.pi),
            ("initial.rp", init.rp),
            ("initial.r_eff", init.r_eff),
            ("initial.i_pol", init.i_pol),
        ]
    }
}

fn nonneg(v: &mut Vec<Violation>, name: &str, x: f64) {
    if !(x >= 0.0) {
        v.push(Violation::new(name, format!("must be >= 0, got {x}")));
    }
}

fn unit_interval_open(v: &mut Vec<Violation>, name: &str, x: f64) {
    if !(0.0..1.0).contains(&x) {
        v.push(Violation::new(name, format!("AR coefficient must lie in [0,1), got {x}")));
    }
}

fn dof_ok(v: &mut Vec<Violation>, name: &str, dof: f64) {
    if !(dof > 2.0) {
        v.push(Violation::new(name, format!("Student-t dof must be > 2 (or inf), got {dof}")));
    }
}
