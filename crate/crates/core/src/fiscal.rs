//! Real sector and public finances: output growth, public capital, potential
//! output, revenues, the primary-balance rule and the observed deficit.

use serde::{Deserialize, Serialize};

use crate::error::Violation;
use crate::params::{MultiplierRow, Params};
use crate::state::{Regime, StateVector};

/// Sign applied to the current-spending multiplier term in the growth equation.
///
/// All three multipliers are positive output effects of positive impulses, so a
/// spending cut (negative `d_gc`) lowers growth.
pub const GC_SIGN: f64 = 1.0;

/// Largest admissible absolute impulse per instrument, as a fraction of GDP.
pub const MAX_IMPULSE: f64 = 0.25;

/// Deviation of current spending, public investment and transfers from their
/// baseline shares, as fractions of GDP for one quarter.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FiscalImpulse {
    pub d_gc: f64,
    pub d_gi: f64,
    pub d_tr: f64,
}

impl FiscalImpulse {
    pub const ZERO: FiscalImpulse = FiscalImpulse { d_gc: 0.0, d_gi: 0.0, d_tr: 0.0 };

    pub fn total(&self) -> f64 {
        self.d_gc + self.d_gi + self.d_tr
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        for (name, x) in [("d_gc", self.d_gc), ("d_gi", self.d_gi), ("d_tr", self.d_tr)] {
            if !x.is_finite() || x.abs() > MAX_IMPULSE {
                v.push(Violation::new(name, format!("impulse must be finite with |x| <= {MAX_IMPULSE}, got {x}")));
            }
        }
        v
    }
}

impl std::ops::Add for FiscalImpulse {
    type Output = FiscalImpulse;

    fn add(self, o: FiscalImpulse) -> FiscalImpulse {
        FiscalImpulse { d_gc: self.d_gc + o.d_gc, d_gi: self.d_gi + o.d_gi, d_tr: self.d_tr + o.d_tr }
    }
}

/// Log growth of real output for the quarter.
pub fn growth_update(impulse: &FiscalImpulse, mu: &MultiplierRow, z: f64, m: f64, eps_d: f64) -> f64 {
    GC_SIGN * mu.gc * impulse.d_gc + mu.gi * impulse.d_gi + mu.tr * impulse.d_tr + z + m + eps_d
}

/// `K' = (1 - delta_p) K + G^I Y` with `G^I` the baseline investment share plus the impulse.
pub fn public_capital_update(state: &StateVector, impulse: &FiscalImpulse, params: &Params) -> f64 {
    let investment = (params.growth.gi_base + impulse.d_gi) * state.y;
    (1.0 - params.growth.delta_p) * state.k_pub + investment
}

/// Log growth of potential output given the change in public capital `dk`.
pub fn potential_update(state: &StateVector, dk: f64, params: &Params) -> f64 {
    let g = &params.growth;
    g.g_pot + g.alpha_p * dk / state.y + g.beta_gini * (state.gini - g.gini_bar)
}

/// Revenue ratio. `lvt_shift` is the structural increment from an active land value tax.
pub fn revenue_ratio(state: &StateVector, params: &Params, lvt_shift: f64) -> f64 {
    let f = &params.fiscal;
    let gap = (state.y - state.y_pot) / state.y_pot;
    f.tau_bar + lvt_shift + f.beta_g * gap + f.beta_pi * state.pi + f.beta_cred * (state.cred - f.cred_bar)
}

/// Logistic convergence weight between the initial deficit and the medium-term target.
pub fn convergence_factor(t: f64, params: &Params) -> f64 {
    let f = &params.fiscal;
    1.0 / (1.0 + (-f.k_a * (t - f.t_mid)).exp())
}

/// Rule-implied primary deficit for quarter `t` given the regime in force.
pub fn primary_balance_target(state: &StateVector, params: &Params, t: u32, regime: Regime) -> f64 {
    let a = convergence_factor(t as f64, params);
    target_from_factor(a, state, params, regime)
}

pub(crate) fn target_from_factor(a: f64, state: &StateVector, params: &Params, regime: Regime) -> f64 {
    let f = &params.fiscal;
    (1.0 - a) * f.pd0 + a * f.pd_target - f.gamma(regime) * (state.r_eff - state.g_nom) * state.b
}

/// Observed primary deficit: rule target plus discretionary impulses minus revenue
/// above the calibrated structural ratio.
pub fn observed_deficit(pd_star: f64, impulse: &FiscalImpulse, tau: f64, params: &Params) -> f64 {
    pd_star + impulse.total() - (tau - params.fiscal.tau_bar)
}
