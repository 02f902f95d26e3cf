//! Straight-line reimplementation of the quarterly model for cross-checking.
//! Covers the zero-shock case with a constant fiscal impulse, a fixed peg and
//! no events. Written against the equations, not the library's functions.

#![allow(dead_code)]

use crisis_sim::params::Params;

pub const FIELDS: [&str; 22] = [
    "y", "y_pot", "k_pub", "pi", "b", "pd", "r_eff", "rp", "i_pol", "reserves", "s_off", "s_par", "tau",
    "employment", "wage", "gini", "health", "unrest", "cred", "z", "g_nom", "welfare",
];

#[derive(Clone, Copy, PartialEq, Debug)]
pub enum Reg {
    Boom,
    Recession,
    Crisis,
}

pub struct OracleRow {
    pub t: u32,
    pub regime: Reg,
    pub values: [f64; 22],
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Runs `horizon` quarters with impulse `(d_gc, d_gi, d_tr)` held from t = 0.
pub fn straight_line(p: &Params, impulse: (f64, f64, f64), horizon: u32) -> Vec<OracleRow> {
    let (d_gc, d_gi, d_tr) = impulse;
    let ini = &p.initial;

    let mut y = ini.y;
    let mut yp = ini.y;
    let mut k = p.growth.gi_base * ini.y / p.growth.delta_p;
    let mut pi = ini.pi;
    let mut b = ini.b;
    let mut pd = p.fiscal.pd0;
    let mut reff = ini.r_eff;
    let mut rp = ini.rp;
    let mut i = ini.i_pol;
    let mut res = ini.reserves;
    let soff = 1.0;
    let mut spar = 1.0;
    let mut tau = p.fiscal.tau_bar;
    let mut e = ini.employment;
    let mut w = 1.0;
    let mut dlnw = 0.0;
    let mut gini = ini.gini;
    let mut health = ini.health;
    let mut u = ini.unrest;
    let mut cred = ini.cred;
    let mut z = 0.0;
    let mut gn = ini.pi;
    let mut dls = 0.0;

    let welfare = |y: f64, e: f64, h: f64, pi: f64, b: f64, gap_b: f64, u: f64, g: f64| {
        let wt = &p.welfare;
        let c = |c: &crisis_sim::params::WelfareComponent, x: f64| c.weight * ((x - c.center) / c.scale);
        c(&wt.gdp, y.ln())
            + c(&wt.employment, e)
            + c(&wt.health, h)
            + c(&wt.inflation, pi)
            + c(&wt.debt, b)
            + c(&wt.gap, gap_b)
            + c(&wt.unrest, u)
            + c(&wt.gini, g)
    };
    let classify = |res: f64, spar: f64, y: f64, yp: f64| {
        if res <= p.regime.r_crit || spar / soff > p.regime.b_crisis {
            Reg::Crisis
        } else if (y - yp) / yp < 0.0 {
            Reg::Recession
        } else {
            Reg::Boom
        }
    };

    let mut rows = Vec::new();
    let mut regime = classify(res, spar, y, yp);
    let row = |t, regime, v: [f64; 22]| OracleRow { t, regime, values: v };
    rows.push(row(
        0,
        regime,
        [
            y, yp, k, pi, b, pd, reff, rp, i, res, soff, spar, tau, e, w, gini, health, u, cred, z, gn,
            welfare(y, e, health, pi, b, spar / soff, u, gini),
        ],
    ));

    for t in 0..horizon {
        let reg = classify(res, spar, y, yp);
        let (mgc, mtr, mgi, gamma) = match reg {
            Reg::Boom => (p.multipliers.boom.gc, p.multipliers.boom.tr, p.multipliers.boom.gi, p.fiscal.gamma_boom),
            Reg::Recession => (
                p.multipliers.recession.gc,
                p.multipliers.recession.tr,
                p.multipliers.recession.gi,
                p.fiscal.gamma_recession,
            ),
            Reg::Crisis => {
                (p.multipliers.crisis.gc, p.multipliers.crisis.tr, p.multipliers.crisis.gi, p.fiscal.gamma_crisis)
            }
        };
        let gap = (y - yp) / yp;
        let i_n = p.debt.r_f + p.inflation.pi_star;

        // output and potential
        let m = -p.monetary.theta_m * (i - i_n);
        let dlny = mgc * d_gc + mgi * d_gi + mtr * d_tr + z + m;
        let y1 = y * dlny.exp();
        let k1 = (1.0 - p.growth.delta_p) * k + (p.growth.gi_base + d_gi) * y;
        let yp1 = yp
            * (p.growth.g_pot + p.growth.alpha_p * (k1 - k) / y + p.growth.beta_gini * (gini - p.growth.gini_bar))
                .exp();

        // fiscal
        let f = &p.fiscal;
        let tau1 = f.tau_bar + f.beta_g * gap + f.beta_pi * pi + f.beta_cred * (cred - f.cred_bar);
        let a = 1.0 / (1.0 + (-f.k_a * (t as f64 - f.t_mid)).exp());
        let pd_star = (1.0 - a) * f.pd0 + a * f.pd_target - gamma * (reff - gn) * b;
        let pd1 = pd_star + d_gc + d_gi + d_tr - (tau1 - f.tau_bar);

        // policy rate
        let mp = &p.monetary;
        let i1 = (mp.smoothing * i
            + (1.0 - mp.smoothing)
                * (i_n + mp.a_pi * (pi - p.inflation.pi_star) + mp.a_g * gap))
            .max(0.0);

        // external; a fixed peg with no realignment while reserves stay above critical
        assert!(res > p.regime.r_crit, "oracle assumes no realignment hazard (t = {t}, R = {res})");
        let x = &p.external;
        let gap_b = spar / soff;
        let ca = x.ca_bar + x.eta_ca_s * dls + x.eta_ca_g * gap + x.eta_ca_gc * d_gc + x.eta_ca_gi * d_gi
            + x.eta_ca_tr * d_tr;
        let ka = x.eta_ka_rp * rp + x.eta_ka_u * u - x.c_b * (gap_b - 1.0).max(0.0).powi(2);
        let res1 = res + ca + ka;
        let gp = &p.gap;
        let scarcity = if res1 > 0.0 {
            gp.alpha_b_r * (p.regime.r_crit / res1 - 1.0).max(0.0).min(gp.scarcity_cap)
        } else {
            gp.alpha_b_r * gp.scarcity_cap
        };
        let gap_b1 = (gap_b * (scarcity + gp.alpha_b_rp * rp + gp.alpha_b_u * u - gp.alpha_b_cred * cred).exp()).max(1.0);
        let spar1 = gap_b1 * soff;
        let dls1 = (spar1 / spar).ln();

        // prices
        let inf = &p.inflation;
        let gap1 = (y1 - yp1) / yp1;
        let phi = inf.phi_bar / (1.0 + (inf.k_phi * (res1 / p.regime.r_crit - 1.0)).exp());
        let pi1 = inf.rho_pi * pi + inf.kappa * gap1 + phi * dls1 + (1.0 - inf.rho_pi) * inf.pi_star;
        let gn1 = dlny + pi1;

        // debt
        let d = &p.debt;
        let b1 = (b * (1.0 + reff) / (1.0 + gn) + pd1).max(0.0);
        let target = d.f_max / (1.0 + (-d.k_f * (b1 - d.b_mid)).exp())
            + d.beta_r * res1
            + d.beta_b * (gap_b1 - 1.0)
            + d.beta_u * u
            + d.institutional;
        let rp1 = (d.rho_rp * rp + (1.0 - d.rho_rp) * target).max(0.0);
        let reff1 = (1.0 - d.lambda_mat) * reff + d.lambda_mat * (d.r_f + rp1);

        // social
        let l = &p.labor;
        let s = &p.social;
        let e1 = clamp01(
            (1.0 - l.omega_e) * e
                + l.omega_e * (l.e_bar + l.phi_d * gap - l.phi_r * (reff - gn))
                + (1.0 - l.omega_e) * l.eta_s * dlnw,
        );
        let dlnw1 = l.chi_w * (pi - inf.pi_star) + l.chi_e * (e - l.e_bar);
        let gini1 = clamp01(gini + s.beta_g_tr * d_tr + s.beta_g_e * (1.0 - e1));
        let health1 = clamp01(
            health + s.lambda_he * (e - l.e_bar) + s.lambda_htr * d_tr.max(0.0)
                - s.lambda_hg * (gini - p.growth.gini_bar),
        );
        let u1 = (s.rho_u * u
            + s.lambda_ug * (gini - p.growth.gini_bar)
            + s.lambda_upi * (pi - inf.pi_star).max(0.0)
            + s.lambda_uaust * (-(d_gc + d_tr)).max(0.0))
        .max(0.0);
        let cred1 = clamp01(s.rho_c * cred + (1.0 - s.rho_c) * f.cred_bar);
        let z1 = p.shocks.rho_z * z;

        y = y1;
        yp = yp1;
        k = k1;
        pi = pi1;
        b = b1;
        pd = pd1;
        reff = reff1;
        rp = rp1;
        i = i1;
        res = res1;
        spar = spar1;
        tau = tau1;
        e = e1;
        w *= dlnw1.exp();
        dlnw = dlnw1;
        gini = gini1;
        health = health1;
        u = u1;
        cred = cred1;
        z = z1;
        gn = gn1;
        dls = dls1;
        regime = classify(res, spar, y, yp);
        rows.push(row(
            t + 1,
            regime,
            [
                y, yp, k, pi, b, pd, reff, rp, i, res, soff, spar, tau, e, w, gini, health, u, cred, z, gn,
                welfare(y, e, health, pi, b, spar / soff, u, gini),
            ],
        ));
    }
    rows
}

/// Largest relative deviation between an engine state and an oracle row.
pub fn max_rel_error(state: &crisis_sim::StateVector, row: &OracleRow) -> (f64, &'static str) {
    let fields = state.numeric_fields();
    let mut worst = (0.0, "");
    for (name, expected) in FIELDS.iter().zip(row.values) {
        let got = fields.iter().find(|(n, _)| n == name).expect("field exists").1;
        // values at or near zero are compared on an absolute 1e-9 scale
        let err = (got - expected).abs() / expected.abs().max(1e-9);
        if err > worst.0 {
            worst = (err, *name);
        }
    }
    worst
}
