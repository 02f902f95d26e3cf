//! Per-quarter economy state and regime classification.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::external::FxRegime;
use crate::params::Params;
use crate::social;

/// Slack allowed below the `B >= 1` floor before it counts as a violation.
pub const GAP_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regime {
    Boom,
    Recession,
    Crisis,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::Boom, Regime::Recession, Regime::Crisis];

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Boom => "boom",
            Regime::Recession => "recession",
            Regime::Crisis => "crisis",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Full state of the economy at the start of quarter `t`.
///
/// Flow variables (`tau`, `pd`) hold the value realized over the quarter that
/// ended at `t`. `g_nom`, `dlns_par` and `dlnw` are the last realized quarterly
/// log changes, used by rules that must not look ahead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub t: u32,
    pub y: f64,
    pub y_pot: f64,
    pub k_pub: f64,
    pub pi: f64,
    pub pi_prev: f64,
    pub b: f64,
    pub pd: f64,
    pub r_eff: f64,
    pub rp: f64,
    pub i_pol: f64,
    pub reserves: f64,
    pub s_off: f64,
    pub s_par: f64,
    pub tau: f64,
    pub employment: f64,
    pub wage: f64,
    pub gini: f64,
    pub health: f64,
    pub unrest: f64,
    pub cred: f64,
    pub z: f64,
    pub regime: Regime,
    /// Last realized nominal growth, `dln Y + pi`.
    pub g_nom: f64,
    pub dlns_par: f64,
    pub dlnw: f64,
    /// Share of debt in foreign currency; changes only through liability-management events.
    pub lambda_fx: f64,
    pub fx: FxRegime,
    pub welfare: f64,
    /// Quarter whose scenario events have been applied to this state, if any.
    pub events_applied: Option<u32>,
}

impl StateVector {
    /// Initial state from the calibration: exchange rates at 1, potential equal to
    /// output, public capital at its steady state for baseline investment.
    pub fn initial(params: &Params, fx: FxRegime) -> Self {
        let i = &params.initial;
        let g = &params.growth;
        let k_pub = if g.delta_p > 0.0 { g.gi_base * i.y / g.delta_p } else { 0.0 };
        let mut s = StateVector {
            t: 0,
            y: i.y,
            y_pot: i.y,
            k_pub,
            pi: i.pi,
            pi_prev: i.pi,
            b: i.b,
            pd: params.fiscal.pd0,
            r_eff: i.r_eff,
            rp: i.rp,
            i_pol: i.i_pol,
            reserves: i.reserves,
            s_off: 1.0,
            s_par: 1.0,
            tau: params.fiscal.tau_bar,
            employment: i.employment,
            wage: 1.0,
            gini: i.gini,
            health: i.health,
            unrest: i.unrest,
            cred: i.cred,
            z: 0.0,
            regime: Regime::Boom,
            g_nom: i.pi,
            dlns_par: 0.0,
            dlnw: 0.0,
            lambda_fx: params.debt.lambda_fx,
            fx,
            welfare: 0.0,
            events_applied: None,
        };
        s.regime = classify_regime(&s, params);
        s.welfare = social::welfare_index(&s, &params.welfare);
        s
    }

    /// Exchange-rate gap `B = S_par / S_off`.
    pub fn fx_gap(&self) -> f64 {
        self.s_par / self.s_off
    }

    /// Set when reserves are exhausted; reporting only, dynamics continue.
    pub fn reserves_depleted(&self) -> bool {
        self.reserves <= 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.numeric_fields().iter().all(|(_, x)| x.is_finite())
    }

    /// Named numeric fields, in a fixed order.
    pub fn numeric_fields(&self) -> [(&'static str, f64); 26] {
        [
            ("y", self.y),
            ("y_pot", self.y_pot),
            ("k_pub", self.k_pub),
            ("pi", self.pi),
            ("pi_prev", self.pi_prev),
            ("b", self.b),
            ("pd", self.pd),
            ("r_eff", self.r_eff),
            ("rp", self.rp),
            ("i_pol", self.i_pol),
            ("reserves", self.reserves),
            ("s_off", self.s_off),
            ("s_par", self.s_par),
            ("tau", self.tau),
            ("employment", self.employment),
            ("wage", self.wage),
            ("gini", self.gini),
            ("health", self.health),
            ("unrest", self.unrest),
            ("cred", self.cred),
            ("z", self.z),
            ("g_nom", self.g_nom),
            ("dlns_par", self.dlns_par),
            ("dlnw", self.dlnw),
            ("lambda_fx", self.lambda_fx),
            ("welfare", self.welfare),
        ]
    }

    /// Checks every state invariant and returns all violations.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        for (name, x) in self.numeric_fields() {
            if !x.is_finite() {
                v.push(Violation::new(name, format!("must be finite, got {x}")));
            }
        }
        for (name, x) in [("y", self.y), ("y_pot", self.y_pot), ("s_off", self.s_off), ("s_par", self.s_par)] {
            if !(x > 0.0) {
                v.push(Violation::new(name, format!("must be > 0, got {x}")));
            }
        }
        if self.s_off > 0.0 && self.fx_gap() < 1.0 - GAP_EPS {
            v.push(Violation::new("B", format!("parallel below official (B = {})", self.fx_gap())));
        }
        for (name, x) in [
            ("E", self.employment),
            ("Gini", self.gini),
            ("Health", self.health),
            ("Cred", self.cred),
            ("lambda_fx", self.lambda_fx),
        ] {
            if !(0.0..=1.0).contains(&x) {
                v.push(Violation::new(name, format!("{name} out of [0,1]: {x}")));
            }
        }
        if !(self.unrest >= 0.0) {
            v.push(Violation::new("Unrest", format!("must be >= 0, got {}", self.unrest)));
        }
        if !(self.b >= 0.0) {
            v.push(Violation::new("b", format!("must be >= 0, got {}", self.b)));
        }
        v
    }
}

/// Output gap `(Y - Y_pot) / Y_pot`.
pub fn output_gap(state: &StateVector) -> Result<f64> {
    let (y, yp) = (state.y, state.y_pot);
    if !y.is_finite() || !yp.is_finite() || yp <= 0.0 {
        return Err(Error::Validation(vec![Violation::new(
            "y_pot",
            format!("output gap needs finite Y and Y_pot > 0 (Y = {y}, Y_pot = {yp})"),
        )]));
    }
    Ok((y - yp) / yp)
}

fn gap_unchecked(state: &StateVector) -> f64 {
    (state.y - state.y_pot) / state.y_pot
}

/// Crisis when reserves are at or below the critical level or the FX gap exceeds
/// its crisis threshold; otherwise Recession for a negative output gap and Boom
/// for a non-negative one. Total: NaN gaps fall through to Boom.
pub fn classify_regime(state: &StateVector, params: &Params) -> Regime {
    if state.reserves <= params.regime.r_crit || state.fx_gap() > params.regime.b_crisis {
        Regime::Crisis
    } else if gap_unchecked(state) < 0.0 {
        Regime::Recession
    } else {
        Regime::Boom
    }
}

/// Validates state and parameters together, collecting every violation.
pub fn validate(state: &StateVector, params: &Params) -> Result<()> {
    let mut v = state.validate();
    v.extend(params.validate());
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(v))
    }
}
