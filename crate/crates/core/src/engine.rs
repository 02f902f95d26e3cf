//! Quarterly simulation loop and Monte Carlo ensembles.
//!
//! One quarter runs in a fixed order:
//!
//!  1. classify the regime from the start-of-quarter state
//!  2. draw multipliers for that regime
//!  3. apply the scenario's events for the quarter
//!  4. real and fiscal block
//!  5. monetary policy
//!  6. external block: current and capital account, reserves, official rate, gap
//!  7. prices
//!  8. debt, risk premium, effective rate
//!  9. social block
//! 10. welfare
//!
//! Rules that need nominal growth use the last realized value stored in the
//! state (`g_nom`); the value computed in step 7 is stored for the next quarter.

use std::ops::Range;

use rand_core::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::external::{self, BoPFlows};
use crate::fiscal;
use crate::params::{MultiplierDraw, MultiplierRow, Params};
use crate::scenario::{DebtFlavor, PolicyFlags, Scenario};
use crate::social::{self, CredibilityEvents};
use crate::state::{classify_regime, Regime, StateVector};
use crate::stochastics::{self, PathSeed, ShockDraws, Stream, StreamLabel};

pub const DEFAULT_HORIZON: u32 = 40;
pub const DEFAULT_PATHS: u64 = 300;
/// Quarters at which path summaries are recorded (those within the horizon, plus the horizon itself).
pub const SUMMARY_HORIZONS: [u32; 3] = [0, 16, 40];

/// Something that happened in a quarter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Event {
    Haircut { flavor: DebtFlavor, fraction: f64 },
    RateRelief { flavor: DebtFlavor, amount: f64 },
    FxShareChange { flavor: DebtFlavor, share: f64 },
    IfiStart,
    LvtStart,
    /// Discrete devaluation of the official rate; `scheduled` when it came from the scenario.
    Realignment { size: f64, scheduled: bool },
}

/// Result of applying a quarter's scenario events.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventOutcome {
    pub events: Vec<Event>,
    pub flags: PolicyFlags,
    /// Scheduled devaluation to route through the official-rate update.
    pub devaluation: Option<f64>,
    pub credibility: CredibilityEvents,
}

/// Applies the scenario's events for quarter `t`: haircuts scale debt down,
/// rate relief lowers the effective rate (floored at 0), liability operations
/// reset the foreign-currency share, and programme switches are reported as
/// flags. Applying the same quarter twice is an error.
pub fn apply_events(
    state: &StateVector,
    scenario: &Scenario,
    t: u32,
    params: &Params,
) -> Result<(StateVector, EventOutcome)> {
    if state.events_applied == Some(t) {
        return Err(Error::EventsAlreadyApplied(t));
    }
    let mut s = state.clone();
    let mut out = EventOutcome { flags: scenario.flags(t), ..Default::default() };
    let soc = &params.social;

    for e in scenario.debt_events_at(t) {
        if e.haircut > 0.0 {
            s.b *= 1.0 - e.haircut;
            out.events.push(Event::Haircut { flavor: e.flavor, fraction: e.haircut });
        }
        if e.rate_relief > 0.0 {
            s.r_eff = (s.r_eff - e.rate_relief).max(0.0);
            out.events.push(Event::RateRelief { flavor: e.flavor, amount: e.rate_relief });
        }
        if let Some(share) = e.fx_share {
            s.lambda_fx = share;
            out.events.push(Event::FxShareChange { flavor: e.flavor, share });
        }
        out.credibility.restructuring_loss += match e.flavor {
            DebtFlavor::Psi => soc.loss_psi,
            DebtFlavor::Osi => soc.loss_osi,
            DebtFlavor::Mkt => soc.loss_mkt,
        };
    }
    if out.flags.ifi_starts {
        out.events.push(Event::IfiStart);
        out.credibility.ifi_gain = scenario.ifi.as_ref().and_then(|i| i.cred_gain).unwrap_or(soc.gain_ifi);
    }
    if out.flags.lvt_starts {
        out.events.push(Event::LvtStart);
        out.credibility.lvt_gain = scenario.lvt.as_ref().and_then(|l| l.cred_gain).unwrap_or(soc.gain_lvt);
    }
    out.devaluation = scenario.devaluation_at(t);
    s.events_applied = Some(t);
    Ok((s, out))
}

/// Where a quarter's multipliers come from.
pub enum MultiplierSource {
    /// Fresh draw from this quarter's stream.
    PerQuarter(Stream),
    /// Noise drawn once per path, indexed by regime.
    PerPath([MultiplierRow; 3]),
}

impl MultiplierSource {
    pub fn get(&mut self, regime: Regime, params: &Params) -> Result<MultiplierRow> {
        match self {
            MultiplierSource::PerQuarter(rng) => stochastics::draw_multipliers(regime, rng, params),
            MultiplierSource::PerPath(rows) => Ok(rows[regime as usize]),
        }
    }
}

/// What happened inside one quarter, beyond the resulting state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarterRecord {
    pub t: u32,
    pub regime: Regime,
    pub multipliers: MultiplierRow,
    pub events: Vec<Event>,
    pub flows: BoPFlows,
    pub pd_star: f64,
    /// Variables whose bounds were binding this quarter.
    pub clamped: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BlockOrder {
    ExternalFirst,
    #[cfg_attr(not(test), allow(dead_code))]
    SocialFirst,
}

struct SocialOut {
    employment: social::Bounded,
    dlnw: f64,
    wage: f64,
    gini: social::Bounded,
    health: social::Bounded,
    unrest: social::Bounded,
}

fn social_block(cur: &StateVector, imp: &fiscal::FiscalImpulse, draws: &ShockDraws, params: &Params) -> SocialOut {
    let employment = social::employment_update(cur, cur.g_nom, draws.eps_e, params);
    let dlnw = social::wage_growth(cur, params);
    SocialOut {
        employment,
        dlnw,
        wage: cur.wage * dlnw.exp(),
        gini: social::gini_update(cur, imp.d_tr, employment.value, draws.eps_gini, params),
        health: social::health_update(cur, imp.d_tr, params),
        unrest: social::unrest_update(cur, imp, params),
    }
}

struct ExternalOut {
    flows: BoPFlows,
    reserves: f64,
    fx: external::FxUpdate,
    s_par: f64,
}

fn external_block<R: Rng + ?Sized>(
    cur: &StateVector,
    imp: &fiscal::FiscalImpulse,
    draws: &ShockDraws,
    flags: &PolicyFlags,
    devaluation: Option<f64>,
    params: &Params,
    fx_rng: &mut R,
) -> ExternalOut {
    let gap = (cur.y - cur.y_pot) / cur.y_pot;
    let ca = external::current_account(gap, cur.dlns_par, imp, draws.eps_ca, params);
    let ka = external::capital_account(cur, flags.cfm_damping, draws.eps_ka, params);
    let flows = BoPFlows { ca, ka };
    let reserves = external::reserves_update(cur.reserves, &flows, flags.ifi_injection);
    let fx = external::official_fx_update(cur, devaluation, params, fx_rng);
    let b_next = external::gap_update(cur, reserves, draws.eps_b, params);
    ExternalOut { flows, reserves, fx, s_par: b_next * fx.s_off }
}

/// Advances the state by one quarter.
pub fn step<R: Rng + ?Sized>(
    state: &StateVector,
    scenario: &Scenario,
    params: &Params,
    draws: &ShockDraws,
    multipliers: &mut MultiplierSource,
    fx_rng: &mut R,
) -> Result<(StateVector, QuarterRecord)> {
    step_ordered(state, scenario, params, draws, multipliers, fx_rng, BlockOrder::ExternalFirst)
}

pub(crate) fn step_ordered<R: Rng + ?Sized>(
    state: &StateVector,
    scenario: &Scenario,
    params: &Params,
    draws: &ShockDraws,
    multipliers: &mut MultiplierSource,
    fx_rng: &mut R,
    order: BlockOrder,
) -> Result<(StateVector, QuarterRecord)> {
    let t = state.t;
    let regime = classify_regime(state, params);
    let mu = multipliers.get(regime, params)?;
    let (cur, outcome) = apply_events(state, scenario, t, params)?;
    let flags = outcome.flags;
    let imp = scenario.impulse(t);
    let mp = scenario.monetary_params(params);
    let mut clamped = Vec::new();

    // real and fiscal
    let m = external::monetary_impulse(cur.i_pol, params, &mp);
    let dlny = fiscal::growth_update(&imp, &mu, cur.z, m, draws.eps_d);
    let y = cur.y * dlny.exp();
    let k_pub = fiscal::public_capital_update(&cur, &imp, params);
    let y_pot = cur.y_pot * fiscal::potential_update(&cur, k_pub - cur.k_pub, params).exp();
    let tau = fiscal::revenue_ratio(&cur, params, flags.lvt_shift);
    let pd_star = fiscal::primary_balance_target(&cur, params, t, regime);
    let pd = fiscal::observed_deficit(pd_star, &imp, tau, params);

    // monetary
    let i_pol = (external::taylor_rate(&cur, params, &mp) + scenario.rate_shock(t)).max(0.0);

    // external and social blocks read only the start-of-quarter state
    let (ext, soc) = match order {
        BlockOrder::ExternalFirst => {
            let e = external_block(&cur, &imp, draws, &flags, outcome.devaluation, params, fx_rng);
            (e, social_block(&cur, &imp, draws, params))
        }
        BlockOrder::SocialFirst => {
            let s = social_block(&cur, &imp, draws, params);
            (external_block(&cur, &imp, draws, &flags, outcome.devaluation, params, fx_rng), s)
        }
    };
    let mut events = outcome.events;
    if let Some(size) = ext.fx.realigned {
        events.push(Event::Realignment { size, scheduled: outcome.devaluation.is_some() });
    }

    // prices
    let dlns_par = (ext.s_par / cur.s_par).ln();
    let gap_next = (y - y_pot) / y_pot;
    let phi = external::pass_through(ext.reserves, params);
    let pi = external::inflation_update(cur.pi, gap_next, dlns_par, phi, draws.eps_pi, params);
    let g_nom = dlny + pi;

    // debt and risk
    let b_raw = external::debt_update(&cur, pd, cur.g_nom, ext.fx.s_off / cur.s_off)?;
    let b = b_raw.max(0.0);
    if b != b_raw {
        clamped.push("b".to_string());
    }
    let risk_view = StateVector {
        b,
        reserves: ext.reserves,
        s_off: ext.fx.s_off,
        s_par: ext.s_par,
        ..cur.clone()
    };
    let rp = external::risk_premium_update(&risk_view, params, flags.ifi);
    let r_eff = external::effective_rate_update(cur.r_eff, rp, params);

    // credibility needs this quarter's realignment
    let cred_events = CredibilityEvents { realignment: ext.fx.realigned.is_some(), ..outcome.credibility };
    let cred = social::credibility_update(&cur, &cred_events, params);

    for (name, bnd) in [
        ("employment", soc.employment),
        ("gini", soc.gini),
        ("health", soc.health),
        ("unrest", soc.unrest),
        ("cred", cred),
    ] {
        if bnd.clamped {
            clamped.push(name.to_string());
        }
    }

    let mut next = StateVector {
        t: t + 1,
        y,
        y_pot,
        k_pub,
        pi,
        pi_prev: cur.pi,
        b,
        pd,
        r_eff,
        rp,
        i_pol,
        reserves: ext.reserves,
        s_off: ext.fx.s_off,
        s_par: ext.s_par,
        tau,
        employment: soc.employment.value,
        wage: soc.wage,
        gini: soc.gini.value,
        health: soc.health.value,
        unrest: soc.unrest.value,
        cred: cred.value,
        z: stochastics::ar1_step(cur.z, draws.eps_z, params.shocks.rho_z),
        regime,
        g_nom,
        dlns_par,
        dlnw: soc.dlnw,
        lambda_fx: cur.lambda_fx,
        fx: ext.fx.fx,
        welfare: 0.0,
        events_applied: None,
    };
    next.welfare = social::welfare_index(&next, &params.welfare);
    next.regime = classify_regime(&next, params);

    if let Some((name, x)) = next.numeric_fields().into_iter().find(|(_, x)| !x.is_finite()) {
        return Err(Error::PathAborted { quarter: t, reason: format!("non-finite {name} = {x}") });
    }
    if !(next.y > 0.0 && next.y_pot > 0.0) {
        return Err(Error::PathAborted { quarter: t, reason: "output collapsed to zero".into() });
    }

    let record = QuarterRecord { t, regime, multipliers: mu, events, flows: ext.flows, pd_star, clamped };
    Ok((next, record))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Abort {
    pub quarter: u32,
    pub reason: String,
}

/// Key figures at a designated quarter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonSummary {
    pub t: u32,
    /// GDP relative to the initial quarter, times 100.
    pub gdp: f64,
    pub b: f64,
    pub welfare: f64,
    pub reserves: f64,
    pub gini: f64,
}

impl HorizonSummary {
    pub fn of(state: &StateVector, y0: f64) -> Self {
        HorizonSummary {
            t: state.t,
            gdp: 100.0 * state.y / y0,
            b: state.b,
            welfare: state.welfare,
            reserves: state.reserves,
            gini: state.gini,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub scenario: String,
    pub seed: PathSeed,
    pub horizon: u32,
    /// States for quarters `0..=horizon` (shorter if the path aborted).
    pub trajectory: Vec<StateVector>,
    pub quarters: Vec<QuarterRecord>,
    pub abort: Option<Abort>,
    pub summaries: Vec<HorizonSummary>,
}

pub fn summary_quarters(horizon: u32) -> Vec<u32> {
    let mut q: Vec<u32> = SUMMARY_HORIZONS.iter().copied().filter(|&h| h <= horizon).collect();
    if !q.contains(&horizon) {
        q.push(horizon);
    }
    q
}

impl PathResult {
    pub fn is_aborted(&self) -> bool {
        self.abort.is_some()
    }

    pub fn terminal(&self) -> &StateVector {
        self.trajectory.last().expect("trajectory holds at least the initial state")
    }

    /// Summaries derived from the trajectory; equals `summaries` for any result
    /// produced by [`simulate_path`].
    pub fn recompute_summaries(&self) -> Vec<HorizonSummary> {
        let y0 = self.trajectory[0].y;
        summary_quarters(self.horizon)
            .into_iter()
            .filter_map(|q| self.trajectory.get(q as usize))
            .map(|s| HorizonSummary::of(s, y0))
            .collect()
    }
}

/// Runs one path for `horizon` quarters. Invalid inputs are errors; a path that
/// breaks down numerically is returned with its abort reason.
pub fn simulate_path(scenario: &Scenario, params: &Params, seed: PathSeed, horizon: u32) -> Result<PathResult> {
    params.check()?;
    scenario.check(horizon)?;
    Ok(simulate_path_unchecked(scenario, params, seed, horizon))
}

fn simulate_path_unchecked(scenario: &Scenario, params: &Params, seed: PathSeed, horizon: u32) -> PathResult {
    let mut state = StateVector::initial(params, scenario.fx.initial_regime());
    let mut trajectory = Vec::with_capacity(horizon as usize + 1);
    let mut quarters = Vec::with_capacity(horizon as usize);
    let per_path = match params.multipliers.draw {
        MultiplierDraw::PerPath => stochastics::per_path_multipliers(seed, params).ok(),
        MultiplierDraw::PerQuarter => None,
    };
    trajectory.push(state.clone());
    let mut abort = None;
    for t in 0..horizon {
        let res = stochastics::quarter_shocks(seed, t, params).and_then(|draws| {
            let mut mult = match per_path {
                Some(rows) => MultiplierSource::PerPath(rows),
                None => MultiplierSource::PerQuarter(seed.spec(StreamLabel::Multipliers).stream(t as u64)),
            };
            let mut fx_rng = seed.spec(StreamLabel::Fx).stream(t as u64);
            step(&state, scenario, params, &draws, &mut mult, &mut fx_rng)
        });
        match res {
            Ok((next, rec)) => {
                state = next;
                trajectory.push(state.clone());
                quarters.push(rec);
            }
            Err(e) => {
                let reason = match e {
                    Error::PathAborted { reason, .. } => reason,
                    other => other.to_string(),
                };
                abort = Some(Abort { quarter: t, reason });
                break;
            }
        }
    }
    let mut result = PathResult {
        scenario: scenario.name.clone(),
        seed,
        horizon,
        trajectory,
        quarters,
        abort,
        summaries: Vec::new(),
    };
    result.summaries = result.recompute_summaries();
    result
}

/// Runs paths `0..n_paths` in parallel on the current rayon pool. Results are
/// ordered by path index and do not depend on the number of workers.
pub fn run_ensemble(
    scenario: &Scenario,
    params: &Params,
    master_seed: u64,
    n_paths: u64,
    horizon: u32,
) -> Result<Vec<PathResult>> {
    if n_paths == 0 {
        return Err(Error::EmptyInput("n_paths must be >= 1"));
    }
    run_ensemble_range(scenario, params, master_seed, 0..n_paths, horizon)
}

/// Runs the given path indices; ensembles over adjacent ranges concatenate.
pub fn run_ensemble_range(
    scenario: &Scenario,
    params: &Params,
    master_seed: u64,
    paths: Range<u64>,
    horizon: u32,
) -> Result<Vec<PathResult>> {
    params.check()?;
    scenario.check(horizon)?;
    Ok(paths
        .into_par_iter()
        .map(|i| simulate_path_unchecked(scenario, params, PathSeed::new(master_seed, i), horizon))
        .collect())
}

/// Runs `f` on a dedicated pool with `threads` workers (0 = rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Deterministic path: all shock scales and multiplier noise set to zero.
pub fn deterministic_path(scenario: &Scenario, params: &Params, horizon: u32) -> Result<PathResult> {
    simulate_path(scenario, &params.without_shocks(), PathSeed::new(0, 0), horizon)
}

/// Response of log output (percent deviation from the zero-shock baseline) to
/// a policy-rate deviation of `size` held for `duration` quarters from t = 0.
pub fn policy_rate_response(params: &Params, size: f64, duration: u32, horizon: u32) -> Result<Vec<f64>> {
    use crate::scenario::{MonetaryOverride, RateShock};
    let base = deterministic_path(&Scenario::baseline("irf-base"), params, horizon)?;
    let mut sc = Scenario::baseline("irf-shock");
    sc.monetary = Some(MonetaryOverride { rate_shock: Some(RateShock { start: 0, duration, size }), ..Default::default() });
    let shocked = deterministic_path(&sc, params, horizon)?;
    Ok(base
        .trajectory
        .iter()
        .zip(&shocked.trajectory)
        .map(|(a, b)| 100.0 * (b.y / a.y).ln())
        .collect())
}
