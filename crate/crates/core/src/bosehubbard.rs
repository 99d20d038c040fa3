//! Bose-Hubbard sweeps: sound speed, the frozen number-variance formula,
//! limiting-state statistics and late-time classification of Goldstone
//! modes under exponential and power-law hopping sweeps.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispersion::DispersionRelation;
use crate::exec;
use crate::modes::{evolve_mode, Initial, ModeConfig, ModeError, Trajectory};
use crate::profile::{Form, ProfileError, SweepProfile};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BhError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("mode k = {k}: {source}")]
    Mode {
        k: f64,
        #[source]
        source: ModeError,
    },
    #[error("mode k = {k}: late-time behaviour is ambiguous ({detail})")]
    Ambiguous { k: f64, detail: String },
    #[error("modes disagree: {0}")]
    Disagreement(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BhParams {
    /// Mean filling.
    pub n: f64,
    /// On-site repulsion.
    pub u: f64,
    /// Lattice spacing.
    pub ell: f64,
    /// Hopping rate.
    pub j: SweepProfile,
}

impl BhParams {
    pub fn validate(&self) -> Result<(), BhError> {
        if !(self.n >= 1.0) {
            return Err(BhError::Invalid(format!("filling n = {} < 1", self.n)));
        }
        if !(self.u > 0.0) {
            return Err(BhError::Invalid(format!("U = {} must be positive", self.u)));
        }
        if !(self.ell > 0.0) {
            return Err(BhError::Invalid(format!("ell = {} must be positive", self.ell)));
        }
        Ok(())
    }

    /// `c^2(t)` as a profile of the same form as `J`.
    pub fn sound_speed_squared_profile(&self) -> SweepProfile {
        self.j.scaled(self.ell * self.ell * self.u * self.n)
    }
}

/// `c^2 = ell^2 J(t) U n`.
pub fn bh_sound_speed_squared(p: &BhParams, t: f64) -> Result<f64, BhError> {
    Ok(p.ell * p.ell * p.j.eval(t)? * p.u * p.n)
}

/// Below this `nu` the power series of `(1 - e^-z)/z` is used.
pub const SERIES_SWITCH: f64 = 1e-3;

/// Frozen on-site number variance `n (1 - e^{-2 pi nu}) / (2 pi nu)` for the
/// adiabaticity parameter `nu = U n / gamma`.
pub fn frozen_number_variance(n: f64, nu: f64) -> Result<f64, BhError> {
    if nu.is_nan() || nu < 0.0 {
        return Err(BhError::Invalid(format!("adiabaticity parameter {nu} < 0")));
    }
    if !(n >= 1.0) {
        return Err(BhError::Invalid(format!("filling n = {n} < 1")));
    }
    if nu.is_infinite() {
        return Ok(0.0);
    }
    let z = 2.0 * std::f64::consts::PI * nu;
    let ratio = if nu < SERIES_SWITCH {
        // 1 - z/2 + z^2/6 - z^3/24 + ...
        let mut term: f64 = 1.0;
        let mut sum = 1.0;
        let mut j = 1.0;
        while term.abs() >= 1e-16 {
            j += 1.0;
            term *= -z / j;
            sum += term;
        }
        sum
    } else {
        -(-z).exp_m1() / z
    };
    Ok(n * ratio)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LimitingState {
    /// Coherent state with Poissonian statistics.
    Superfluid(f64),
    Mott,
}

pub fn limiting_state_variance(state: LimitingState) -> f64 {
    match state {
        LimitingState::Superfluid(n) => n,
        LimitingState::Mott => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LateTime {
    FrozenAt(f64),
    Oscillating,
    DecayingToZero,
}

impl LateTime {
    fn same_kind(&self, other: &LateTime) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}

/// Thresholds for the late-time classification, applied to the momentum
/// variance `pp` over the window `[t1 / 10, t1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LateTimeCriteria {
    /// Max relative spread for a frozen mode.
    pub frozen_drift: f64,
    /// Final value below this fraction of the initial one counts as decayed.
    pub decay_fraction: f64,
    /// Relative slack allowed per sample in the monotonicity check.
    pub monotone_slack: f64,
    /// Min oscillation amplitude (relative to the power-law trend).
    pub oscillation_amplitude: f64,
    /// Min number of residual sign changes for an oscillation.
    pub min_sign_changes: usize,
}

impl Default for LateTimeCriteria {
    fn default() -> Self {
        Self {
            frozen_drift: 0.01,
            decay_fraction: 0.01,
            monotone_slack: 1e-6,
            oscillation_amplitude: 0.1,
            min_sign_changes: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSweep {
    pub k: f64,
    pub trajectory: Trajectory,
    pub late_time: LateTime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BhSweep {
    pub modes: Vec<ModeSweep>,
    /// Common classification of all modes; a frozen summary carries the
    /// value of the first mode.
    pub summary: LateTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BhSweepConfig {
    pub mode: ModeConfig,
    pub criteria: LateTimeCriteria,
}

/// Evolves the Goldstone modes `omega^2 = c^2(t) k^2` from their vacuum at
/// `t0` to `t1` and classifies the late-time momentum variance of each.
pub fn simulate_bh_sweep(
    p: &BhParams,
    k_list: &[f64],
    t0: f64,
    t1: f64,
    cfg: &BhSweepConfig,
) -> Result<BhSweep, BhError> {
    p.validate()?;
    if k_list.is_empty() {
        return Err(BhError::Invalid("empty k list".into()));
    }
    if !matches!(
        p.j.form,
        Form::Exponential { .. } | Form::PowerLaw { .. } | Form::Constant { .. }
    ) {
        return Err(BhError::Invalid(
            "hopping must be exponential, power-law or constant".into(),
        ));
    }
    if !(t1 > 10.0 * t0.max(0.0)) || !(t1 > t0) {
        return Err(BhError::Invalid(format!(
            "t1 = {t1} must exceed t0 = {t0} and span a final decade"
        )));
    }
    let d = DispersionRelation::Quadratic {
        mass_sq: SweepProfile::constant(0.0),
        stiffness: p.sound_speed_squared_profile(),
    };
    let modes = exec::try_map(k_list, |&k| {
        let trajectory = evolve_mode(&d, k, t0, t1, Initial::GroundState, &cfg.mode)
            .map_err(|source| BhError::Mode { k, source })?;
        let late_time = classify_late_time(&trajectory, &cfg.criteria)?;
        Ok::<_, BhError>(ModeSweep {
            k,
            trajectory,
            late_time,
        })
    })?;
    let summary = modes[0].late_time;
    if let Some(m) = modes.iter().find(|m| !m.late_time.same_kind(&summary)) {
        return Err(BhError::Disagreement(format!(
            "k = {} is {:?} but k = {} is {:?}",
            modes[0].k, summary, m.k, m.late_time
        )));
    }
    Ok(BhSweep { modes, summary })
}

/// Classifies the momentum variance of a trajectory over its final decade.
pub fn classify_late_time(tr: &Trajectory, c: &LateTimeCriteria) -> Result<LateTime, BhError> {
    let first = tr.first();
    let last = tr.last();
    let t_start = last.t / 10.0;
    let window: Vec<(f64, f64)> = std::iter::once(tr.state_at(t_start))
        .chain(tr.samples().filter(|s| s.t > t_start))
        .map(|s| (s.t, s.moments.pp))
        .collect();
    let values: Vec<f64> = window.iter().map(|w| w.1).collect();
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let mean = values.iter().sum::<f64>() / values.len() as f64;

    if (hi - lo) <= c.frozen_drift * mean.abs() {
        return Ok(LateTime::FrozenAt(last.moments.pp));
    }

    let monotone = values
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + c.monotone_slack));
    if monotone && last.moments.pp < c.decay_fraction * first.moments.pp {
        return Ok(LateTime::DecayingToZero);
    }

    // Detrend ln pp against ln t and look for a persistent oscillation.
    let (amplitude, sign_changes) = detrended_oscillation(&window);
    if amplitude > c.oscillation_amplitude && sign_changes >= c.min_sign_changes {
        return Ok(LateTime::Oscillating);
    }
    Err(BhError::Ambiguous {
        k: tr.k,
        detail: format!(
            "spread {:.3e}, monotone {monotone}, amplitude {amplitude:.3e}, sign changes {sign_changes}",
            (hi - lo) / mean
        ),
    })
}

fn detrended_oscillation(window: &[(f64, f64)]) -> (f64, usize) {
    let pts: Vec<(f64, f64)> = window
        .iter()
        .filter(|w| w.1 > 0.0)
        .map(|&(t, v)| (t.ln(), v.ln()))
        .collect();
    if pts.len() < 3 {
        return (0.0, 0);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let resid: Vec<f64> = pts
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).exp() - 1.0)
        .collect();
    let (lo, hi) = resid
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let changes = resid.windows(2).filter(|w| (w[0] < 0.0) != (w[1] < 0.0)).count();
    (0.5 * (hi - lo), changes)
}
