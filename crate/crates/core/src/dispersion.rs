//! Dispersion templates, the two-component coupling matrix, sound speed and
//! analogue-horizon computations, and instability classification.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::profile::{Form, ProfileError, SweepProfile};
use crate::quadrature::{self, QuadConfig, QuadratureError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DispersionError {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("sound speed is negative ({c}) at t = {t}")]
    NegativeSpeed { t: f64, c: f64 },
    #[error("horizon is divergent at t = {0}")]
    DivergentHorizon(f64),
    #[error("improper integral not supported for this profile: {0}")]
    UnsupportedTail(String),
    #[error("tabulated dispersion must have strictly increasing k^2 samples")]
    NonMonotoneTable,
    #[error("k^2 = {0} outside the tabulated range")]
    OutsideTable(f64),
    #[error("empty wavenumber domain (k_max = {0})")]
    EmptyDomain(f64),
}

/// Symmetric 2x2 coupling matrix of a two-component condensate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    pub g11: f64,
    pub g22: f64,
    pub g12: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MixturePhase {
    Mixed,
    Critical,
    PhaseSeparated,
}

/// Eigenvalues `(g_plus, g_minus)` of the coupling matrix, `g_plus >= g_minus`.
pub fn coupling_eigenvalues(g: &CouplingMatrix) -> (f64, f64) {
    let mean = 0.5 * (g.g11 + g.g22);
    let half_diff = 0.5 * (g.g11 - g.g22);
    let radius = half_diff.hypot(g.g12);
    let g_plus = mean + radius;
    // The smaller root via the product formula avoids cancellation when
    // g12^2 is close to g11*g22.
    let det = g.g11 * g.g22 - g.g12 * g.g12;
    let g_minus = if g_plus != 0.0 {
        det / g_plus
    } else {
        mean - radius
    };
    (g_plus, g_minus)
}

pub fn phase_of_mixture(g: &CouplingMatrix) -> MixturePhase {
    let (gp, gm) = coupling_eigenvalues(g);
    if gm.abs() <= 1e-12 * (gp + gm.abs()) {
        MixturePhase::Critical
    } else if gm > 0.0 {
        MixturePhase::Mixed
    } else {
        MixturePhase::PhaseSeparated
    }
}

/// `c^2 = alpha * beta` at time `t`; negative values signal an instability.
pub fn sound_speed_squared(
    alpha: &SweepProfile,
    beta: &SweepProfile,
    t: f64,
) -> Result<f64, DispersionError> {
    Ok(alpha.eval(t)? * beta.eval(t)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Horizon {
    Finite(f64),
    Divergent,
}

impl Horizon {
    pub fn finite(self) -> Option<f64> {
        match self {
            Horizon::Finite(r) => Some(r),
            Horizon::Divergent => None,
        }
    }
}

/// Analogue horizon `int_t^{t_end} c(t') dt'` for a sound-speed profile.
///
/// Finite upper limits use adaptive quadrature. For `t_end = inf` the
/// convergence is decided from the closed form and the tail is mapped onto
/// `(0, 1]` by the substitution that flattens that form; tabulated profiles
/// need a finite `t_end`.
pub fn horizon_size(c: &SweepProfile, t: f64, t_end: f64) -> Result<Horizon, DispersionError> {
    horizon_size_with(c, t, t_end, &QuadConfig::default())
}

pub fn horizon_size_with(
    c: &SweepProfile,
    t: f64,
    t_end: f64,
    cfg: &QuadConfig,
) -> Result<Horizon, DispersionError> {
    c.eval(t)?;
    if t_end.is_finite() {
        c.eval(t_end)?;
        check_nonnegative(c, t, t_end)?;
        let r = quadrature::integrate(|s| c.eval_unchecked(s), t, t_end, cfg)?;
        return Ok(Horizon::Finite(r.value));
    }
    if c.domain.end.is_finite() {
        return Err(ProfileError::OutOfDomain {
            t: t_end,
            start: c.domain.start,
            end: c.domain.end,
        }
        .into());
    }
    match &c.form {
        Form::Constant { value } => {
            if *value < 0.0 {
                Err(DispersionError::NegativeSpeed { t, c: *value })
            } else if *value == 0.0 {
                Ok(Horizon::Finite(0.0))
            } else {
                Ok(Horizon::Divergent)
            }
        }
        Form::Exponential { v0, gamma } => {
            if *v0 < 0.0 {
                return Err(DispersionError::NegativeSpeed { t, c: *v0 });
            }
            if *v0 == 0.0 {
                return Ok(Horizon::Finite(0.0));
            }
            if *gamma <= 0.0 {
                return Ok(Horizon::Divergent);
            }
            // t' = t - ln(w)/gamma, dt' = dw/(gamma w).
            let g = *gamma;
            let r = quadrature::integrate(
                |w| c.eval_unchecked(t - w.ln() / g) / (g * w),
                0.0,
                1.0,
                cfg,
            )?;
            Ok(Horizon::Finite(r.value))
        }
        Form::PowerLaw { v0, x, .. } => {
            if *v0 < 0.0 {
                return Err(DispersionError::NegativeSpeed { t, c: *v0 });
            }
            if *v0 == 0.0 {
                return Ok(Horizon::Finite(0.0));
            }
            if *x <= 1.0 {
                return Ok(Horizon::Divergent);
            }
            // t' = t w^{-1/(x-1)} makes the integrand constant.
            let p = 1.0 / (x - 1.0);
            let r = quadrature::integrate(
                |w| {
                    let tp = t * w.powf(-p);
                    c.eval_unchecked(tp) * t * p * w.powf(-p - 1.0)
                },
                0.0,
                1.0,
                cfg,
            )?;
            Ok(Horizon::Finite(r.value))
        }
        Form::Linear { v0, rate } => {
            let now = v0 + rate * t;
            if *rate < 0.0 {
                Err(DispersionError::NegativeSpeed {
                    t: -v0 / rate,
                    c: 0.0,
                })
            } else if now < 0.0 {
                Err(DispersionError::NegativeSpeed { t, c: now })
            } else if *rate == 0.0 && now == 0.0 {
                Ok(Horizon::Finite(0.0))
            } else {
                Ok(Horizon::Divergent)
            }
        }
        Form::Tabulated { .. } => Err(DispersionError::UnsupportedTail(
            "tabulated profiles need a finite upper limit".into(),
        )),
    }
}

fn check_nonnegative(c: &SweepProfile, a: f64, b: f64) -> Result<(), DispersionError> {
    const PROBES: usize = 257;
    for i in 0..PROBES {
        let s = a + (b - a) * i as f64 / (PROBES - 1) as f64;
        let v = c.eval_unchecked(s);
        if v < 0.0 {
            return Err(DispersionError::NegativeSpeed { t: s, c: v });
        }
    }
    if let Form::Tabulated { samples } = &c.form {
        if let Some(&(s, v)) = samples.iter().find(|p| p.0 >= a && p.0 <= b && p.1 < 0.0) {
            return Err(DispersionError::NegativeSpeed { t: s, c: v });
        }
    }
    Ok(())
}

/// Centered finite difference of the horizon size; equals `-c(t)` for a
/// well-resolved step.
pub fn horizon_shrink_rate(
    c: &SweepProfile,
    t: f64,
    h: f64,
    t_end: f64,
) -> Result<f64, DispersionError> {
    let cfg = QuadConfig {
        rel_tol: 1e-13,
        ..QuadConfig::default()
    };
    let ahead = horizon_size_with(c, t + h, t_end, &cfg)?
        .finite()
        .ok_or(DispersionError::DivergentHorizon(t + h))?;
    let behind = horizon_size_with(c, t - h, t_end, &cfg)?
        .finite()
        .ok_or(DispersionError::DivergentHorizon(t - h))?;
    Ok((ahead - behind) / (2.0 * h))
}

/// Dispersion template `omega^2(k^2, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DispersionRelation {
    /// `m^2 + c^2 k^2`
    Quadratic {
        mass_sq: SweepProfile,
        stiffness: SweepProfile,
    },
    /// `delta + curvature * (k^2 - k_crit^2)^2`: a single dip at `k_crit`.
    Roton {
        k_crit: SweepProfile,
        delta: SweepProfile,
        curvature: SweepProfile,
    },
    /// Piecewise-linear in `k^2` through `(k^2, omega^2)` samples.
    Tabulated { samples: Vec<(f64, f64)> },
}

impl DispersionRelation {
    pub fn quadratic(mass_sq: f64, stiffness: f64) -> Self {
        DispersionRelation::Quadratic {
            mass_sq: SweepProfile::constant(mass_sq),
            stiffness: SweepProfile::constant(stiffness),
        }
    }

    pub fn roton(k_crit: f64, delta: f64, curvature: f64) -> Self {
        DispersionRelation::Roton {
            k_crit: SweepProfile::constant(k_crit),
            delta: SweepProfile::constant(delta),
            curvature: SweepProfile::constant(curvature),
        }
    }

    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self, DispersionError> {
        if samples.is_empty() || samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(DispersionError::NonMonotoneTable);
        }
        Ok(DispersionRelation::Tabulated { samples })
    }

    pub fn omega_sq(&self, k_sq: f64, t: f64) -> Result<f64, DispersionError> {
        match self {
            DispersionRelation::Quadratic { mass_sq, stiffness } => {
                Ok(mass_sq.eval(t)? + stiffness.eval(t)? * k_sq)
            }
            DispersionRelation::Roton {
                k_crit,
                delta,
                curvature,
            } => {
                let kc = k_crit.eval(t)?;
                let d = k_sq - kc * kc;
                Ok(delta.eval(t)? + curvature.eval(t)? * d * d)
            }
            DispersionRelation::Tabulated { samples } => {
                if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(DispersionError::NonMonotoneTable);
                }
                let (lo, hi) = (samples[0].0, samples[samples.len() - 1].0);
                if k_sq < lo || k_sq > hi {
                    return Err(DispersionError::OutsideTable(k_sq));
                }
                let idx = samples.partition_point(|s| s.0 <= k_sq);
                if idx == 0 {
                    return Ok(samples[0].1);
                }
                if idx >= samples.len() {
                    return Ok(samples[samples.len() - 1].1);
                }
                let (x0, y0) = samples[idx - 1];
                let (x1, y1) = samples[idx];
                Ok(y0 + (y1 - y0) * (k_sq - x0) / (x1 - x0))
            }
        }
    }

    /// Evaluates with domain checks already done by the caller.
    pub(crate) fn omega_sq_fast(&self, k_sq: f64, t: f64) -> f64 {
        match self {
            DispersionRelation::Quadratic { mass_sq, stiffness } => {
                mass_sq.eval_unchecked(t) + stiffness.eval_unchecked(t) * k_sq
            }
            DispersionRelation::Roton {
                k_crit,
                delta,
                curvature,
            } => {
                let kc = k_crit.eval_unchecked(t);
                let d = k_sq - kc * kc;
                delta.eval_unchecked(t) + curvature.eval_unchecked(t) * d * d
            }
            DispersionRelation::Tabulated { .. } => self.omega_sq(k_sq, t).unwrap_or(f64::NAN),
        }
    }

    /// Checks that `omega^2(k^2, t)` is evaluable on `[t0, t1]`.
    pub(crate) fn check_time_domain(&self, k_sq: f64, t0: f64, t1: f64) -> Result<(), DispersionError> {
        self.omega_sq(k_sq, t0)?;
        self.omega_sq(k_sq, t1)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InstabilityKind {
    Stable,
    RotonInstability { k_crit: f64 },
    MassGapInstability,
    StiffnessInstability,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstabilityClass {
    pub kind: InstabilityKind,
    /// Wavenumber minimizing `omega^2` on `[0, k_max]`.
    pub k_min: f64,
    pub omega_sq_min: f64,
}

/// Number of uniform `k^2` samples in the coarse scan of [`classify_dispersion`].
pub const CLASSIFY_GRID: usize = 2048;
/// Resolution of the golden-section refinement, in `k^2`.
pub const CLASSIFY_REFINE_TOL: f64 = 1e-10;

/// Minimizes `omega^2(k^2)` over `[0, k_max^2]` (uniform grid plus
/// golden-section refinement) and maps the minimizer and sign pattern onto
/// an [`InstabilityKind`].
pub fn classify_dispersion(
    d: &DispersionRelation,
    t: f64,
    k_max: f64,
) -> Result<InstabilityClass, DispersionError> {
    if !(k_max > 0.0) || !k_max.is_finite() {
        return Err(DispersionError::EmptyDomain(k_max));
    }
    if let DispersionRelation::Tabulated { samples } = d {
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(DispersionError::NonMonotoneTable);
        }
    }
    let k2_max = k_max * k_max;
    let step = k2_max / (CLASSIFY_GRID - 1) as f64;
    let mut values = Vec::with_capacity(CLASSIFY_GRID);
    for i in 0..CLASSIFY_GRID {
        values.push(d.omega_sq(i as f64 * step, t)?);
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (imin, _) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");

    let (k2_best, w_best) = if imin == 0 || imin == CLASSIFY_GRID - 1 {
        (imin as f64 * step, values[imin])
    } else {
        let lo = (imin - 1) as f64 * step;
        let hi = (imin + 1) as f64 * step;
        let k2 = golden_section(|x| d.omega_sq(x, t).unwrap_or(f64::INFINITY), lo, hi);
        let w = d.omega_sq(k2, t)?;
        if w <= values[imin] {
            (k2, w)
        } else {
            (imin as f64 * step, values[imin])
        }
    };

    let w0 = values[0];
    let zero_tol = 1e-12 * scale;
    let slope0 = (values[1] - values[0]) / step;
    let at_origin = imin == 0;

    let kind = if at_origin {
        if w0 < -zero_tol {
            InstabilityKind::MassGapInstability
        } else {
            InstabilityKind::Stable
        }
    } else if w_best > zero_tol {
        InstabilityKind::Stable
    } else if w0.abs() <= zero_tol && slope0 < 0.0 {
        InstabilityKind::StiffnessInstability
    } else {
        InstabilityKind::RotonInstability {
            k_crit: k2_best.sqrt(),
        }
    };
    Ok(InstabilityClass {
        kind,
        k_min: k2_best.sqrt(),
        omega_sq_min: w_best,
    })
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > CLASSIFY_REFINE_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if c >= d {
            break;
        }
    }
    0.5 * (a + b)
}
