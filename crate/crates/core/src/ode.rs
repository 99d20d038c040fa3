//! Embedded Runge-Kutta 5(4) (Dormand-Prince) with PI step-size control and
//! cubic Hermite dense output.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
    #[error("right-hand side is not finite at t = {0}")]
    NonFinite(f64),
    #[error("invalid interval [{0}, {1}]")]
    BadInterval(f64, f64),
    /// Raised by the step observer to abort integration.
    #[error("aborted at t = {t}: {reason}")]
    Aborted { t: f64, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Initial step; `None` picks one from the right-hand side.
    pub initial_step: Option<f64>,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for OdeConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            initial_step: None,
            max_step: f64::INFINITY,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Largest accepted scaled error estimate (1.0 means exactly at tolerance).
    pub max_error: f64,
}

/// One accepted step endpoint: time, state and derivative (for Hermite
/// interpolation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub dy: [f64; N],
}

/// Cubic Hermite interpolation between two knots.
pub fn hermite<const N: usize>(a: &Knot<N>, b: &Knot<N>, t: f64) -> [f64; N] {
    let h = b.t - a.t;
    if h == 0.0 {
        return a.y;
    }
    let s = (t - a.t) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = h00 * a.y[i] + h10 * h * a.dy[i] + h01 * b.y[i] + h11 * h * b.dy[i];
    }
    out
}

// Dormand-Prince coefficients.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates `dy/dt = rhs(t, y)` from `t0` to `t1 > t0`.
///
/// `observe` is called with every accepted knot (including the initial one)
/// and may abort the integration by returning an error message.
pub fn integrate<const N: usize, F, O>(
    mut rhs: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    cfg: &OdeConfig,
    mut observe: O,
) -> Result<OdeStats, OdeError>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(&Knot<N>) -> Result<(), String>,
{
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(OdeError::BadInterval(t0, t1));
    }
    let mut stats = OdeStats::default();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    stats.evaluations += 1;
    check_finite(&k1, t)?;
    observe(&Knot { t, y, dy: k1 }).map_err(|reason| OdeError::Aborted { t, reason })?;

    let span = t1 - t0;
    let mut h = match cfg.initial_step {
        Some(h) => h,
        None => initial_step(&y, &k1, span, cfg),
    }
    .min(cfg.max_step)
    .min(span);

    const SAFETY: f64 = 0.9;
    const ALPHA: f64 = 0.7 / 5.0;
    const BETA: f64 = 0.4 / 5.0;
    let mut err_prev: f64 = 1e-4;
    let mut last_rejected = false;

    while t < t1 {
        if stats.accepted + stats.rejected >= cfg.max_steps {
            return Err(OdeError::TooManySteps(cfg.max_steps));
        }
        if h < 1e-14 * t.abs().max(span) {
            return Err(OdeError::StepUnderflow { t, h });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        let k2 = rhs(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = rhs(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(
            t + C4 * h,
            &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = rhs(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            t + h,
            &axpy(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y_new = axpy(
            &y,
            h,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let t_new = if last { t1 } else { t + h };
        let k7 = rhs(t_new, &y_new);
        stats.evaluations += 6;
        check_finite(&k7, t_new)?;

        let mut acc = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
            acc += (e / scale).powi(2);
        }
        let err = (acc / N as f64).sqrt();

        if err <= 1.0 {
            let factor = if err == 0.0 {
                5.0
            } else {
                (SAFETY * err.powf(-ALPHA) * err_prev.powf(BETA)).clamp(0.2, 5.0)
            };
            let factor = if last_rejected { factor.min(1.0) } else { factor };
            err_prev = err.max(1e-4);
            t = t_new;
            y = y_new;
            k1 = k7;
            stats.accepted += 1;
            stats.max_error = stats.max_error.max(err);
            last_rejected = false;
            observe(&Knot { t, y, dy: k1 }).map_err(|reason| OdeError::Aborted { t, reason })?;
            h = (h * factor).min(cfg.max_step);
        } else {
            stats.rejected += 1;
            last_rejected = true;
            h *= (SAFETY * err.powf(-1.0 / 5.0)).max(0.2);
        }
    }
    Ok(stats)
}

fn check_finite<const N: usize>(v: &[f64; N], t: f64) -> Result<(), OdeError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(OdeError::NonFinite(t))
    }
}

fn initial_step<const N: usize>(y: &[f64; N], dy: &[f64; N], span: f64, cfg: &OdeConfig) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (dy[i] / sc).powi(2);
    }
    let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h.min(span)
}
