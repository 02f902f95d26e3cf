//! Employment, wages, inequality, health, unrest, credibility and the synthetic
//! welfare index.

use crate::fiscal::FiscalImpulse;
use crate::params::{Params, WelfareWeights};
use crate::state::StateVector;

/// Result of a bounded update; `clamped` is set when the bound was binding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounded {
    pub value: f64,
    pub clamped: bool,
}

impl Bounded {
    fn unit(raw: f64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        Bounded { value, clamped: value != raw }
    }

    fn nonneg(raw: f64) -> Self {
        let value = raw.max(0.0);
        Bounded { value, clamped: value != raw }
    }
}

/// Employment moves a share `omega_e` towards a target anchored at `e_bar` and
/// shifted by activity and the interest-growth differential.
pub fn employment_update(state: &StateVector, g_nom: f64, eps_e: f64, params: &Params) -> Bounded {
    let l = &params.labor;
    let gap = (state.y - state.y_pot) / state.y_pot;
    let target = l.e_bar + l.phi_d * gap - l.phi_r * (state.r_eff - g_nom);
    Bounded::unit(
        (1.0 - l.omega_e) * state.employment + l.omega_e * target + (1.0 - l.omega_e) * l.eta_s * state.dlnw + eps_e,
    )
}

pub fn wage_growth(state: &StateVector, params: &Params) -> f64 {
    let l = &params.labor;
    l.chi_w * (state.pi - params.inflation.pi_star) + l.chi_e * (state.employment - l.e_bar)
}

pub fn wage_update(state: &StateVector, params: &Params) -> f64 {
    state.wage * wage_growth(state, params).exp()
}

pub fn gini_update(state: &StateVector, d_tr: f64, e_next: f64, eps: f64, params: &Params) -> Bounded {
    let s = &params.social;
    Bounded::unit(state.gini + s.beta_g_tr * d_tr + s.beta_g_e * (1.0 - e_next) + eps)
}

pub fn health_update(state: &StateVector, d_tr: f64, params: &Params) -> Bounded {
    let s = &params.social;
    Bounded::unit(
        state.health + s.lambda_he * (state.employment - params.labor.e_bar) + s.lambda_htr * d_tr.max(0.0)
            - s.lambda_hg * (state.gini - params.growth.gini_bar),
    )
}

/// Size of the austerity component of an impulse: cuts to current spending and transfers.
pub fn austerity(impulse: &FiscalImpulse) -> f64 {
    (-(impulse.d_gc + impulse.d_tr)).max(0.0)
}

pub fn unrest_update(state: &StateVector, impulse: &FiscalImpulse, params: &Params) -> Bounded {
    let s = &params.social;
    Bounded::nonneg(
        s.rho_u * state.unrest
            + s.lambda_ug * (state.gini - params.growth.gini_bar)
            + s.lambda_upi * (state.pi - params.inflation.pi_star).max(0.0)
            + s.lambda_uaust * austerity(impulse),
    )
}

/// Credibility-moving events of one quarter.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CredibilityEvents {
    /// Gain from an IFI programme starting this quarter.
    pub ifi_gain: f64,
    /// Gain from a land value tax taking effect this quarter.
    pub lvt_gain: f64,
    pub realignment: bool,
    /// Reputational cost of restructurings this quarter.
    pub restructuring_loss: f64,
}

pub fn credibility_update(state: &StateVector, events: &CredibilityEvents, params: &Params) -> Bounded {
    let s = &params.social;
    let loss_realign = if events.realignment { s.loss_realign } else { 0.0 };
    Bounded::unit(
        s.rho_c * state.cred + (1.0 - s.rho_c) * params.fiscal.cred_bar + events.ifi_gain + events.lvt_gain
            - loss_realign
            - events.restructuring_loss,
    )
}

/// Component values entering the welfare index, in table order.
pub fn welfare_inputs(state: &StateVector) -> [f64; 8] {
    [
        state.y.ln(),
        state.employment,
        state.health,
        state.pi,
        state.b,
        state.fx_gap(),
        state.unrest,
        state.gini,
    ]
}

/// Weighted sum of normalized indicators. Ordinal: meant only for ranking.
pub fn welfare_index(state: &StateVector, weights: &WelfareWeights) -> f64 {
    weights
        .components()
        .iter()
        .zip(welfare_inputs(state))
        .map(|(c, x)| c.weight * c.normalize(x))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::external::FxRegime;
    use crate::params::WelfareComponent;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    fn base() -> (StateVector, Params) {
        let p = Params::reference();
        (StateVector::initial(&p, FxRegime::Fixed), p)
    }

    #[test]
    fn employment_examples() {
        let (mut s, mut p) = base();
        p.labor.omega_e = 0.2;
        p.labor.e_bar = 0.92;
        s.employment = 0.90;
        s.y = s.y_pot;
        s.dlnw = 0.0;
        s.r_eff = 0.01;
        close(employment_update(&s, 0.01, 0.0, &p).value, 0.904);

        s.employment = p.labor.e_bar;
        close(employment_update(&s, 0.01, 0.0, &p).value, p.labor.e_bar);

        p.labor.phi_d = 0.5;
        s.y = 0.96 * s.y_pot;
        let e = employment_update(&s, 0.01, 0.0, &p).value;
        close(e - p.labor.e_bar, -p.labor.omega_e * 0.02);
    }

    #[test]
    fn employment_clamps() {
        let (mut s, p) = base();
        s.employment = 0.99;
        let e = employment_update(&s, 0.0, 0.5, &p);
        assert_eq!(e.value, 1.0);
        assert!(e.clamped);
    }

    #[test]
    fn wage_examples() {
        let (mut s, mut p) = base();
        s.pi = p.inflation.pi_star;
        s.employment = p.labor.e_bar;
        assert_eq!(wage_update(&s, &p), s.wage);
        p.labor.chi_e = 0.3;
        s.employment = p.labor.e_bar + 0.02;
        close(wage_growth(&s, &p), 0.006);
        p.labor.chi_w = 0.5;
        s.employment = p.labor.e_bar;
        s.pi = p.inflation.pi_star + 0.01;
        close(wage_growth(&s, &p), 0.005);
    }

    #[test]
    fn gini_examples() {
        let (mut s, mut p) = base();
        s.gini = 0.45;
        close(gini_update(&s, 0.0, 1.0, 0.0, &p).value, 0.45);
        p.social.beta_g_tr = -0.05;
        p.social.beta_g_e = 0.02;
        close(gini_update(&s, 0.01, 0.9, 0.0, &p).value, 0.4515);
    }

    #[test]
    fn health_examples() {
        let (mut s, mut p) = base();
        s.employment = p.labor.e_bar;
        s.gini = p.growth.gini_bar;
        s.health = 0.6;
        close(health_update(&s, 0.0, &p).value, 0.6);
        p.social.lambda_hg = 0.05;
        s.gini = p.growth.gini_bar + 0.1;
        close(health_update(&s, 0.0, &p).value - 0.6, -0.005);
        s.gini = p.growth.gini_bar;
        p.social.lambda_htr = 0.2;
        close(health_update(&s, 0.01, &p).value - 0.6, 0.002);
        close(health_update(&s, -0.01, &p).value, 0.6);
    }

    #[test]
    fn unrest_examples() {
        let (mut s, mut p) = base();
        s.unrest = 0.0;
        s.gini = p.growth.gini_bar;
        s.pi = p.inflation.pi_star;
        assert_eq!(unrest_update(&s, &FiscalImpulse::ZERO, &p).value, 0.0);
        p.social.rho_u = 0.9;
        s.unrest = 1.0;
        close(unrest_update(&s, &FiscalImpulse::ZERO, &p).value, 0.9);
        p.social.lambda_uaust = 2.0;
        s.unrest = 0.0;
        let cut = FiscalImpulse { d_gc: -0.02, ..FiscalImpulse::ZERO };
        close(unrest_update(&s, &cut, &p).value, 0.04);
        let stim = FiscalImpulse { d_gc: 0.02, ..FiscalImpulse::ZERO };
        close(unrest_update(&s, &stim, &p).value, 0.0);
    }

    #[test]
    fn credibility_examples() {
        let (mut s, mut p) = base();
        s.cred = p.fiscal.cred_bar;
        close(credibility_update(&s, &CredibilityEvents::default(), &p).value, s.cred);
        p.social.rho_c = 1.0;
        p.social.loss_realign = 0.10;
        s.cred = 0.6;
        let ev = CredibilityEvents { realignment: true, ..Default::default() };
        close(credibility_update(&s, &ev, &p).value, 0.5);
        let ev = CredibilityEvents { ifi_gain: 0.05, ..Default::default() };
        close(credibility_update(&s, &ev, &p).value, 0.65);
    }

    fn unit_weights() -> WelfareWeights {
        let p = Params::reference();
        let mut w = p.welfare.clone();
        for c in [
            &mut w.gdp, &mut w.employment, &mut w.health, &mut w.inflation,
            &mut w.debt, &mut w.gap, &mut w.unrest, &mut w.gini,
        ] {
            *c = WelfareComponent { weight: c.weight, center: 0.0, scale: 1.0 };
        }
        w
    }

    #[test]
    fn welfare_examples() {
        let (mut s, p) = base();
        // every normalized component equal to one: W equals the sum of weights
        let mut w = unit_weights();
        let xs = welfare_inputs(&s);
        for (c, x) in [
            &mut w.gdp, &mut w.employment, &mut w.health, &mut w.inflation,
            &mut w.debt, &mut w.gap, &mut w.unrest, &mut w.gini,
        ].into_iter().zip(xs) {
            c.center = x - 1.0;
        }
        close(welfare_index(&s, &w), 0.10);

        // every component at its center: zero
        for (c, x) in [
            &mut w.gdp, &mut w.employment, &mut w.health, &mut w.inflation,
            &mut w.debt, &mut w.gap, &mut w.unrest, &mut w.gini,
        ].into_iter().zip(xs) {
            c.center = x;
        }
        close(welfare_index(&s, &w), 0.0);

        let before = welfare_index(&s, &p.welfare);
        s.pi += 0.01;
        assert!(welfare_index(&s, &p.welfare) < before);
    }

    #[test]
    fn reference_welfare_starts_near_level_anchor() {
        let (s, _) = base();
        assert!((s.welfare - 14.3).abs() < 0.05, "{}", s.welfare);
    }

    proptest! {
        #[test]
        fn welfare_partials_have_table_signs(k in 0usize..8, dx in 1e-4f64..0.05) {
            let (s, p) = base();
            let w0 = welfare_index(&s, &p.welfare);
            let mut s1 = s.clone();
            match k {
                0 => s1.y *= 1.0 + dx,
                1 => s1.employment = (s1.employment + dx).min(1.0),
                2 => s1.health = (s1.health + dx).min(1.0),
                3 => s1.pi += dx,
                4 => s1.b += dx,
                5 => s1.s_par += dx,
                6 => s1.unrest += dx,
                _ => s1.gini += dx,
            }
            let w1 = welfare_index(&s1, &p.welfare);
            if k < 3 { prop_assert!(w1 > w0); } else { prop_assert!(w1 < w0); }
        }

        #[test]
        fn transfers_never_raise_gini(tr in 0.0f64..0.1, e in 0.0f64..1.0, g in 0.0f64..1.0, eps in -0.01f64..0.01) {
            let (mut s, p) = base();
            s.gini = g;
            let with = gini_update(&s, tr, e, eps, &p).value;
            let without = gini_update(&s, 0.0, e, eps, &p).value;
            prop_assert!(with <= without);
        }

        #[test]
        fn ranking_invariant_under_shared_affine_change(
            ys in proptest::collection::vec(80.0f64..120.0, 2..6),
            shift in -1.0f64..1.0, scale_mult in 0.5f64..2.0,
        ) {
            // scenarios differ in GDP only; changing the gini anchor (equal across
            // scenarios) must not change the ordering
            let (s, p) = base();
            let states: Vec<_> = ys.iter().map(|&y| { let mut x = s.clone(); x.y = y; x }).collect();
            let order = |w: &WelfareWeights| {
                let mut idx: Vec<usize> = (0..states.len()).collect();
                idx.sort_by(|&a, &b| welfare_index(&states[a], w).total_cmp(&welfare_index(&states[b], w)));
                idx
            };
            let mut w2 = p.welfare.clone();
            w2.gini.center += shift;
            w2.gini.scale *= scale_mult;
            prop_assert_eq!(order(&p.welfare), order(&w2));
        }

        #[test]
        fn bounded_updates_stay_in_bounds(
            e in 0.0f64..1.0, g in 0.0f64..1.0, h in 0.0f64..1.0, c in 0.0f64..1.0, u in 0.0f64..10.0,
            eps in -0.5f64..0.5, tr in -0.2f64..0.2, gc in -0.2f64..0.2,
        ) {
            let (mut s, p) = base();
            s.employment = e; s.gini = g; s.health = h; s.cred = c; s.unrest = u;
            let imp = FiscalImpulse { d_gc: gc, d_tr: tr, d_gi: 0.0 };
            for v in [
                employment_update(&s, 0.0, eps, &p).value,
                gini_update(&s, tr, e, eps, &p).value,
                health_update(&s, tr, &p).value,
                credibility_update(&s, &CredibilityEvents { ifi_gain: eps.max(0.0), ..Default::default() }, &p).value,
            ] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            prop_assert!(unrest_update(&s, &imp, &p).value >= 0.0);
        }
    }
}
