//! Prices, monetary policy, sovereign risk, debt dynamics, balance of payments
//! and the dual exchange-rate system.

use rand_core::Rng;
use rand_distr::{Distribution, StandardUniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiscal::FiscalImpulse;
use crate::params::{MonetaryParams, Params};
use crate::state::StateVector;

/// Official exchange-rate arrangement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FxRegime {
    Fixed,
    /// Pre-announced depreciation per quarter.
    Crawl(f64),
    /// Peg continues at `crawl` (0 for a fixed peg) while further realignments
    /// are suppressed for `cooldown` more quarters.
    PostRealignment { crawl: f64, cooldown: u32 },
}

impl FxRegime {
    pub fn crawl_rate(&self) -> f64 {
        match *self {
            FxRegime::Fixed => 0.0,
            FxRegime::Crawl(c) | FxRegime::PostRealignment { crawl: c, .. } => c,
        }
    }

    fn from_crawl(c: f64) -> Self {
        if c == 0.0 {
            FxRegime::Fixed
        } else {
            FxRegime::Crawl(c)
        }
    }
}

/// Quarterly crawl equivalent to an annual depreciation rate.
pub fn crawl_quarterly(annual: f64) -> f64 {
    (1.0 + annual).powf(0.25) - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoPFlows {
    pub ca: f64,
    pub ka: f64,
}

impl BoPFlows {
    pub fn total(&self) -> f64 {
        self.ca + self.ka
    }
}

/// Exchange-rate pass-through coefficient, logistic in reserves relative to the critical level.
pub fn pass_through(reserves: f64, params: &Params) -> f64 {
    let i = &params.inflation;
    i.phi_bar / (1.0 + (i.k_phi * (reserves / params.regime.r_crit - 1.0)).exp())
}

pub fn inflation_update(pi_lag: f64, gap: f64, dlns_par: f64, phi: f64, eps_pi: f64, params: &Params) -> f64 {
    let i = &params.inflation;
    i.rho_pi * pi_lag + i.kappa * gap + phi * dlns_par + (1.0 - i.rho_pi) * i.pi_star + eps_pi
}

/// Intercept of the Taylor rule.
pub fn neutral_rate(params: &Params) -> f64 {
    params.debt.r_f + params.inflation.pi_star
}

/// Smoothed Taylor rule with a zero lower bound. `mp` carries any scenario overrides.
pub fn taylor_rate(state: &StateVector, params: &Params, mp: &MonetaryParams) -> f64 {
    let gap = (state.y - state.y_pot) / state.y_pot;
    let pi_star = params.inflation.pi_star;
    let target = neutral_rate(params) + mp.a_pi * (state.pi - pi_star) + mp.a_g * gap;
    (mp.smoothing * state.i_pol + (1.0 - mp.smoothing) * target).max(0.0)
}

/// Demand effect of the policy rate relative to neutral.
pub fn monetary_impulse(i_pol: f64, params: &Params, mp: &MonetaryParams) -> f64 {
    -mp.theta_m * (i_pol - neutral_rate(params))
}

/// Logistic debt term of the risk premium.
pub fn debt_risk(b: f64, params: &Params) -> f64 {
    let d = &params.debt;
    d.f_max / (1.0 + (-d.k_f * (b - d.b_mid)).exp())
}

/// Long-run risk premium implied by the current fundamentals.
pub fn risk_premium_target(state: &StateVector, params: &Params, ifi: f64) -> f64 {
    let d = &params.debt;
    debt_risk(state.b, params)
        + d.beta_r * state.reserves
        + d.beta_b * (state.fx_gap() - 1.0)
        + d.beta_u * state.unrest
        + d.beta_ifi * ifi
        + d.institutional
}

/// Partial adjustment of the risk premium towards its target, floored at zero.
/// `ifi` is the programme indicator (0 when no IFI programme is active).
pub fn risk_premium_update(state: &StateVector, params: &Params, ifi: f64) -> f64 {
    let rho = params.debt.rho_rp;
    (rho * state.rp + (1.0 - rho) * risk_premium_target(state, params, ifi)).max(0.0)
}

/// Effective rate moves towards the market rate by the refinancing share.
pub fn effective_rate_update(r_eff: f64, rp: f64, params: &Params) -> f64 {
    let lam = params.debt.lambda_mat;
    (1.0 - lam) * r_eff + lam * (params.debt.r_f + rp)
}

/// Debt-to-GDP law of motion including the valuation effect on foreign-currency debt.
/// `s_off_ratio` is `S_off' / S_off`.
pub fn debt_update(state: &StateVector, pd: f64, g_nom: f64, s_off_ratio: f64) -> Result<f64> {
    if !(1.0 + g_nom > 0.0) {
        return Err(Error::PathAborted {
            quarter: state.t,
            reason: format!("nominal growth {g_nom} <= -1 in debt law of motion"),
        });
    }
    Ok(state.b * (1.0 + state.r_eff) / (1.0 + g_nom) + pd + state.lambda_fx * state.b * (s_off_ratio - 1.0))
}

pub fn current_account(gap: f64, dlns_par: f64, impulse: &FiscalImpulse, eps_ca: f64, params: &Params) -> f64 {
    let e = &params.external;
    e.ca_bar
        + e.eta_ca_s * dlns_par
        + e.eta_ca_g * gap
        + e.eta_ca_gc * impulse.d_gc
        + e.eta_ca_gi * impulse.d_gi
        + e.eta_ca_tr * impulse.d_tr
        + eps_ca
}

/// Capital account. With capital-flow management active, outflow sensitivities
/// and the shock are scaled by `cfm_damping`.
pub fn capital_account(state: &StateVector, cfm_damping: Option<f64>, eps_ka: f64, params: &Params) -> f64 {
    let e = &params.external;
    let d = cfm_damping.unwrap_or(1.0);
    let excess = (state.fx_gap() - 1.0).max(0.0);
    d * (e.eta_ka_rp * state.rp + e.eta_ka_u * state.unrest - e.c_b * excess * excess + eps_ka)
}

pub fn reserves_update(reserves: f64, flows: &BoPFlows, ifi_injection: f64) -> f64 {
    reserves + flows.ca + flows.ka + ifi_injection
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FxUpdate {
    pub s_off: f64,
    pub fx: FxRegime,
    /// Size of the realignment that fired this quarter, if any.
    pub realigned: Option<f64>,
}

/// Official exchange rate for next quarter. A scheduled devaluation (`forced`)
/// always fires; otherwise, with reserves at or below the critical level and no
/// cooldown in force, a realignment fires with the configured hazard.
pub fn official_fx_update<R: Rng + ?Sized>(
    state: &StateVector,
    forced: Option<f64>,
    params: &Params,
    rng: &mut R,
) -> FxUpdate {
    let crawl = state.fx.crawl_rate();
    let cooldown = match state.fx {
        FxRegime::PostRealignment { cooldown, .. } => cooldown,
        _ => 0,
    };
    let mut s_off = state.s_off * (1.0 + crawl);
    let e = &params.external;
    let realigned = match forced {
        Some(size) => Some(size),
        None if cooldown == 0 && state.reserves <= params.regime.r_crit => {
            let u: f64 = StandardUniform.sample(rng);
            (u < e.p_realign).then_some(e.dev_size)
        }
        None => None,
    };
    let fx = if let Some(size) = realigned {
        s_off *= 1.0 + size;
        if e.realign_cooldown > 0 {
            FxRegime::PostRealignment { crawl, cooldown: e.realign_cooldown }
        } else {
            FxRegime::from_crawl(crawl)
        }
    } else if cooldown > 1 {
        FxRegime::PostRealignment { crawl, cooldown: cooldown - 1 }
    } else if cooldown == 1 {
        FxRegime::from_crawl(crawl)
    } else {
        state.fx
    };
    FxUpdate { s_off, fx, realigned }
}

/// Reserve-scarcity pressure on the parallel market, capped near zero reserves.
pub fn scarcity_term(reserves_next: f64, params: &Params) -> f64 {
    let cap = params.gap.scarcity_cap;
    let raw = if reserves_next > 0.0 {
        (params.regime.r_crit / reserves_next - 1.0).max(0.0)
    } else {
        cap
    };
    params.gap.alpha_b_r * raw.min(cap)
}

/// Next-quarter exchange-rate gap, floored at 1. Uses this quarter's risk,
/// unrest and credibility and next quarter's reserves.
pub fn gap_update(state: &StateVector, reserves_next: f64, eps_b: f64, params: &Params) -> f64 {
    let g = &params.gap;
    let dln = scarcity_term(reserves_next, params) + g.alpha_b_rp * state.rp + g.alpha_b_u * state.unrest
        - g.alpha_b_cred * state.cred
        + eps_b;
    (state.fx_gap() * dln.exp()).max(1.0)
}
