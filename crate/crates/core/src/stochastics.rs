//! Randomness: counter-based streams, Student-t and normal shocks, the AR(1)
//! global shock and regime-conditional multiplier draws.
//!
//! Every draw comes from a ChaCha8 generator keyed by
//! `(master_seed, path_index, label_hash, counter)`, where `counter` is the
//! quarter. Draws therefore depend only on those coordinates, never on the
//! order in which paths or quarters are executed, and adding a new shock
//! family leaves existing families' sequences untouched.

use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{MultiplierRow, Params, ShockSpec};
use crate::state::Regime;

pub type Stream = ChaCha8Rng;

/// Counter value reserved for once-per-path draws.
pub const PER_PATH_COUNTER: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StreamLabel {
    Demand,
    Inflation,
    CurrentAccount,
    CapitalAccount,
    Gap,
    Employment,
    Gini,
    Global,
    Multipliers,
    Fx,
}

impl StreamLabel {
    pub const ALL: [StreamLabel; 10] = [
        StreamLabel::Demand,
        StreamLabel::Inflation,
        StreamLabel::CurrentAccount,
        StreamLabel::CapitalAccount,
        StreamLabel::Gap,
        StreamLabel::Employment,
        StreamLabel::Gini,
        StreamLabel::Global,
        StreamLabel::Multipliers,
        StreamLabel::Fx,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StreamLabel::Demand => "eps_d",
            StreamLabel::Inflation => "eps_pi",
            StreamLabel::CurrentAccount => "eps_ca",
            StreamLabel::CapitalAccount => "eps_ka",
            StreamLabel::Gap => "eps_B",
            StreamLabel::Employment => "eps_E",
            StreamLabel::Gini => "eps_gini",
            StreamLabel::Global => "eps_z",
            StreamLabel::Multipliers => "mu",
            StreamLabel::Fx => "fx",
        }
    }

    /// FNV-1a hash of the label text. Stable across releases.
    pub fn id(self) -> u64 {
        fnv1a(self.as_str().as_bytes())
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Seed coordinates of one path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathSeed {
    pub master_seed: u64,
    pub path_index: u64,
}

impl PathSeed {
    pub fn new(master_seed: u64, path_index: u64) -> Self {
        Self { master_seed, path_index }
    }

    pub fn spec(self, label: StreamLabel) -> SeedSpec {
        SeedSpec { master_seed: self.master_seed, path_index: self.path_index, label }
    }
}

/// Identifies one shock family's stream within one path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub path_index: u64,
    pub label: StreamLabel,
}

impl SeedSpec {
    pub fn new(master_seed: u64, path_index: u64, label: StreamLabel) -> Self {
        Self { master_seed, path_index, label }
    }

    /// Generator for this stream at `counter` (the quarter index).
    pub fn stream(&self, counter: u64) -> Stream {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.path_index.to_le_bytes());
        key[16..24].copy_from_slice(&self.label.id().to_le_bytes());
        key[24..32].copy_from_slice(&counter.to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }
}

/// Zero-mean Student-t variate times `scale`; `dof = inf` gives a normal variate.
pub fn student_t_draw<R: Rng + ?Sized>(rng: &mut R, dof: f64, scale: f64) -> Result<f64> {
    if !(dof > 2.0) {
        return Err(Error::Config(format!("Student-t dof must be > 2, got {dof}")));
    }
    if scale == 0.0 {
        return Ok(0.0);
    }
    let x: f64 = if dof.is_infinite() {
        StandardNormal.sample(rng)
    } else {
        StudentT::new(dof).map_err(|e| Error::Config(e.to_string()))?.sample(rng)
    };
    Ok(scale * x)
}

pub fn shock_draw<R: Rng + ?Sized>(rng: &mut R, spec: ShockSpec) -> Result<f64> {
    student_t_draw(rng, spec.dof, spec.scale)
}

pub fn ar1_step(z: f64, eps: f64, rho: f64) -> f64 {
    rho * z + eps
}

/// Advances the global AR(1) shock with one innovation from `rng`.
pub fn global_shock_step<R: Rng + ?Sized>(z: f64, rng: &mut R, params: &Params) -> Result<f64> {
    let eps = shock_draw(rng, params.shocks.global)?;
    Ok(ar1_step(z, eps, params.shocks.rho_z))
}

/// Multipliers for `regime`: table mean plus Student-t noise, floored at zero.
pub fn draw_multipliers<R: Rng + ?Sized>(regime: Regime, rng: &mut R, params: &Params) -> Result<MultiplierRow> {
    let m = &params.multipliers;
    let noise = [
        student_t_draw(rng, m.dof, m.noise_scale)?,
        student_t_draw(rng, m.dof, m.noise_scale)?,
        student_t_draw(rng, m.dof, m.noise_scale)?,
    ];
    Ok(apply_noise(m.mean(regime), noise))
}

pub(crate) fn apply_noise(mean: MultiplierRow, noise: [f64; 3]) -> MultiplierRow {
    MultiplierRow {
        gc: (mean.gc + noise[0]).max(0.0),
        tr: (mean.tr + noise[1]).max(0.0),
        gi: (mean.gi + noise[2]).max(0.0),
    }
}

/// Noise for all three regimes drawn once per path (the `per_path` draw mode).
pub fn per_path_multipliers(seed: PathSeed, params: &Params) -> Result<[MultiplierRow; 3]> {
    let mut rng = seed.spec(StreamLabel::Multipliers).stream(PER_PATH_COUNTER);
    let mut out = [MultiplierRow { gc: 0.0, tr: 0.0, gi: 0.0 }; 3];
    for (slot, regime) in out.iter_mut().zip(Regime::ALL) {
        *slot = draw_multipliers(regime, &mut rng, params)?;
    }
    Ok(out)
}

/// Shock innovations for one quarter.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ShockDraws {
    pub eps_d: f64,
    pub eps_pi: f64,
    pub eps_ca: f64,
    pub eps_ka: f64,
    pub eps_b: f64,
    pub eps_e: f64,
    pub eps_gini: f64,
    pub eps_z: f64,
}

impl ShockDraws {
    pub fn as_array(&self) -> [f64; 8] {
        [self.eps_d, self.eps_pi, self.eps_ca, self.eps_ka, self.eps_b, self.eps_e, self.eps_gini, self.eps_z]
    }
}

/// One draw per shock family for quarter `t`, each from its own labeled stream.
pub fn quarter_shocks(seed: PathSeed, t: u32, params: &Params) -> Result<ShockDraws> {
    let s = &params.shocks;
    let draw = |label: StreamLabel, spec: ShockSpec| -> Result<f64> {
        let mut rng = seed.spec(label).stream(t as u64);
        shock_draw(&mut rng, spec)
    };
    Ok(ShockDraws {
        eps_d: draw(StreamLabel::Demand, s.demand)?,
        eps_pi: draw(StreamLabel::Inflation, s.inflation)?,
        eps_ca: draw(StreamLabel::CurrentAccount, s.current_account)?,
        eps_ka: draw(StreamLabel::CapitalAccount, s.capital_account)?,
        eps_b: draw(StreamLabel::Gap, s.gap)?,
        eps_e: draw(StreamLabel::Employment, s.employment)?,
        eps_gini: draw(StreamLabel::Gini, s.gini)?,
        eps_z: draw(StreamLabel::Global, s.global)?,
    })
}
