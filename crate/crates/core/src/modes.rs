//! Single-mode Gaussian dynamics under a sweep: evolution of the mode
//! function and second moments, adiabatic excitation amplitude, squeezing,
//! horizon-stage classification and Kibble-Zurek freeze-out.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dispersion::{horizon_size, DispersionError, DispersionRelation, Horizon};
use crate::ode::{self, Knot, OdeConfig, OdeError, OdeStats};
use crate::profile::{ProfileError, SweepProfile};
use crate::quadrature::{self, QuadConfig, QuadratureError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModeError {
    #[error(transparent)]
    Dispersion(#[from] DispersionError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Ode(OdeError),
    #[error("ground state needs omega^2 > 0 at t0, got {0}")]
    NoVacuum(f64),
    #[error("invariant drift at t = {t}: wronskian {wronskian:e}, determinant {determinant:e}")]
    Invariant {
        t: f64,
        wronskian: f64,
        determinant: f64,
    },
    #[error("moments violate the uncertainty bound (det = {0})")]
    Unphysical(f64),
    #[error("gap is not positive ({gap}) at t = {t}")]
    NonPositiveGap { t: f64, gap: f64 },
    #[error("reference frequency must be positive, got {0}")]
    BadReference(f64),
    #[error("gap is not decreasing toward the critical time near t = {0}")]
    NonMonotoneGap(f64),
    #[error("no freeze-out time in [{start}, {t_c})")]
    NoBracket { start: f64, t_c: f64 },
}

impl From<OdeError> for ModeError {
    fn from(e: OdeError) -> Self {
        match e {
            OdeError::Aborted { t, reason } => match parse_drift(&reason) {
                Some((w, d)) => ModeError::Invariant {
                    t,
                    wronskian: w,
                    determinant: d,
                },
                None => ModeError::Ode(OdeError::Aborted { t, reason }),
            },
            other => ModeError::Ode(other),
        }
    }
}

fn parse_drift(reason: &str) -> Option<(f64, f64)> {
    let rest = reason.strip_prefix("drift ")?;
    let (a, b) = rest.split_once(' ')?;
    Some((a.parse().ok()?, b.parse().ok()?))
}

/// Symmetrized second moments of `(q, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub qq: f64,
    pub pp: f64,
    pub qp: f64,
}

impl Moments {
    pub fn vacuum(omega: f64) -> Self {
        Self {
            qq: 0.5 / omega,
            pp: 0.5 * omega,
            qp: 0.0,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.qq * self.pp - self.qp * self.qp
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeState {
    pub k: f64,
    pub t: f64,
    pub u: Complex64,
    pub u_dot: Complex64,
    pub moments: Moments,
}

impl ModeState {
    /// Instantaneous vacuum of frequency `omega`, with `u = 1/sqrt(2 omega)`
    /// and `u_dot = -i omega u`.
    pub fn vacuum(k: f64, t: f64, omega: f64) -> Self {
        let u = Complex64::new((0.5 / omega).sqrt(), 0.0);
        Self {
            k,
            t,
            u,
            u_dot: Complex64::new(0.0, -omega) * u,
            moments: Moments::vacuum(omega),
        }
    }

    /// `2 Im(u conj(u_dot))`; equals 1 for a normalized mode function.
    pub fn wronskian(&self) -> f64 {
        2.0 * (self.u * self.u_dot.conj()).im
    }

    fn to_array(self) -> [f64; 7] {
        [
            self.u.re,
            self.u.im,
            self.u_dot.re,
            self.u_dot.im,
            self.moments.qq,
            self.moments.pp,
            self.moments.qp,
        ]
    }

    fn from_array(k: f64, t: f64, y: &[f64; 7]) -> Self {
        Self {
            k,
            t,
            u: Complex64::new(y[0], y[1]),
            u_dot: Complex64::new(y[2], y[3]),
            moments: Moments {
                qq: y[4],
                pp: y[5],
                qp: y[6],
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initial {
    GroundState,
    State(ModeState),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeConfig {
    pub ode: OdeConfig,
    /// Relative invariant drift that aborts the integration.
    pub abort_drift: f64,
}

impl Default for ModeConfig {
    fn default() -> Self {
        Self {
            ode: OdeConfig {
                rel_tol: 1e-12,
                abs_tol: 1e-14,
                ..OdeConfig::default()
            },
            abort_drift: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub k: f64,
    knots: Vec<Knot<7>>,
    pub stats: OdeStats,
    /// Largest relative Wronskian drift seen on accepted steps.
    pub max_wronskian_drift: f64,
    /// Largest relative drift of `qq pp - qp^2`.
    pub max_determinant_drift: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.knots.iter().map(|k| k.t)
    }

    pub fn samples(&self) -> impl Iterator<Item = ModeState> + '_ {
        self.knots
            .iter()
            .map(move |kn| ModeState::from_array(self.k, kn.t, &kn.y))
    }

    pub fn first(&self) -> ModeState {
        let kn = &self.knots[0];
        ModeState::from_array(self.k, kn.t, &kn.y)
    }

    pub fn last(&self) -> ModeState {
        let kn = self.knots.last().expect("trajectory has the initial knot");
        ModeState::from_array(self.k, kn.t, &kn.y)
    }

    /// Dense output at `t` (clamped to the integrated interval).
    pub fn state_at(&self, t: f64) -> ModeState {
        let t0 = self.knots[0].t;
        let t1 = self.knots[self.knots.len() - 1].t;
        let t = t.clamp(t0, t1);
        let idx = self.knots.partition_point(|k| k.t <= t);
        if idx == 0 {
            return self.first();
        }
        if idx >= self.knots.len() {
            return self.last();
        }
        let y = ode::hermite(&self.knots[idx - 1], &self.knots[idx], t);
        ModeState::from_array(self.k, t, &y)
    }
}

/// Integrates `u'' + omega^2(k^2, t) u = 0` together with the second
/// moments from `t0` to `t1`. Regions with `omega^2 <= 0` are fine (the
/// solution grows exponentially).
pub fn evolve_mode(
    d: &DispersionRelation,
    k: f64,
    t0: f64,
    t1: f64,
    initial: Initial,
    cfg: &ModeConfig,
) -> Result<Trajectory, ModeError> {
    let k2 = k * k;
    d.check_time_domain(k2, t0, t1)?;
    let start = match initial {
        Initial::GroundState => {
            let w2 = d.omega_sq(k2, t0)?;
            if !(w2 > 0.0) {
                return Err(ModeError::NoVacuum(w2));
            }
            ModeState::vacuum(k, t0, w2.sqrt())
        }
        Initial::State(s) => {
            let det = s.moments.determinant();
            if !(det >= 0.25 * (1.0 - 1e-12)) {
                return Err(ModeError::Unphysical(det));
            }
            ModeState { k, t: t0, ..s }
        }
    };

    let w0 = start.wronskian();
    let w_scale = w0.abs().max(2.0 * start.u.norm() * start.u_dot.norm());
    let det0 = start.moments.determinant();
    let mut max_w = 0.0f64;
    let mut max_d = 0.0f64;
    let mut knots = Vec::new();
    let abort = cfg.abort_drift;

    let rhs = |t: f64, y: &[f64; 7]| {
        let w2 = d.omega_sq_fast(k2, t);
        [
            y[2],
            y[3],
            -w2 * y[0],
            -w2 * y[1],
            2.0 * y[6],
            -2.0 * w2 * y[6],
            y[5] - w2 * y[4],
        ]
    };
    let stats = ode::integrate(rhs, t0, start.to_array(), t1, &cfg.ode, |kn| {
        let s = ModeState::from_array(k, kn.t, &kn.y);
        let dw = if w_scale > 0.0 {
            (s.wronskian() - w0).abs() / w_scale
        } else {
            0.0
        };
        let dd = (s.moments.determinant() - det0).abs() / det0;
        max_w = max_w.max(dw);
        max_d = max_d.max(dd);
        knots.push(*kn);
        if dw > abort || dd > abort {
            Err(format!("drift {dw} {dd}"))
        } else {
            Ok(())
        }
    })?;
    Ok(Trajectory {
        k,
        knots,
        stats,
        max_wronskian_drift: max_w,
        max_determinant_drift: max_d,
    })
}

/// Gap and driving matrix element of an effective two-level system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelSystem {
    /// `E1(t) - E0(t)`
    pub gap: SweepProfile,
    /// `<1| dH/dt |0>`
    pub coupling: SweepProfile,
}

/// Number of uniform probes used to check gap positivity.
const GAP_PROBES: usize = 1025;

/// First-order adiabatic excitation amplitude at `t1`:
/// `<1|dH/dt|0> / gap^2 * exp(i phi)` with the dynamical phase
/// `phi = -int_{t0}^{t1} gap dt`.
pub fn adiabatic_amplitude(sys: &TwoLevelSystem, t0: f64, t1: f64) -> Result<Complex64, ModeError> {
    sys.gap.eval(t0)?;
    sys.gap.eval(t1)?;
    sys.coupling.eval(t1)?;
    for i in 0..GAP_PROBES {
        let t = t0 + (t1 - t0) * i as f64 / (GAP_PROBES - 1) as f64;
        let g = sys.gap.eval_unchecked(t);
        if !(g > 0.0) {
            return Err(ModeError::NonPositiveGap { t, gap: g });
        }
    }
    let phase = -quadrature::integrate(|t| sys.gap.eval_unchecked(t), t0, t1, &QuadConfig::default())?
        .value;
    let gap = sys.gap.eval_unchecked(t1);
    let v = sys.coupling.eval_unchecked(t1);
    Ok(Complex64::from_polar(v / (gap * gap), phase))
}

/// Squeezing of `s` relative to the vacuum of frequency `omega_ref`.
///
/// The covariance is rescaled to `[[w qq, qp], [qp, pp / w]]`, whose
/// eigenvalues are `exp(+-2r)/2` for a pure state; `r = ln(l+/l-)/4` and
/// `phi` is the angle of the major axis in `[0, pi)`.
pub fn squeeze_parameters(s: &ModeState, omega_ref: f64) -> Result<(f64, f64), ModeError> {
    if !(omega_ref > 0.0) {
        return Err(ModeError::BadReference(omega_ref));
    }
    let m = &s.moments;
    let det = m.determinant();
    if !(det >= 0.25 * (1.0 - 1e-9)) {
        return Err(ModeError::Unphysical(det));
    }
    let a = omega_ref * m.qq;
    let c = m.pp / omega_ref;
    let b = m.qp;
    let mean = 0.5 * (a + c);
    let radius = (0.5 * (a - c)).hypot(b);
    let hi = mean + radius;
    let lo = det / hi;
    let r = 0.25 * (hi / lo).ln();
    if radius == 0.0 {
        return Ok((0.0, 0.0));
    }
    let mut phi = 0.5 * (2.0 * b).atan2(a - c);
    if phi < 0.0 {
        phi += std::f64::consts::PI;
    }
    if phi >= std::f64::consts::PI {
        phi -= std::f64::consts::PI;
    }
    Ok((r.max(0.0), phi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stage {
    Oscillating,
    HorizonCrossing,
    Frozen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum StageWindow {
    /// Compare `2 pi / k` with the horizon directly.
    #[default]
    Sharp,
    /// Crossing band `[horizon / 2, 2 horizon]`.
    Band,
}

/// Compares the wavelength `2 pi / k` with the horizon over the remaining
/// domain of `c`. A divergent horizon means every mode still oscillates.
pub fn classify_stage(
    c: &SweepProfile,
    k: f64,
    t: f64,
    window: StageWindow,
) -> Result<Stage, ModeError> {
    let horizon = match horizon_size(c, t, c.domain.end)? {
        Horizon::Divergent => return Ok(Stage::Oscillating),
        Horizon::Finite(r) => r,
    };
    let lambda = 2.0 * std::f64::consts::PI / k;
    let (lo, hi) = match window {
        StageWindow::Sharp => (horizon, horizon),
        StageWindow::Band => (0.5 * horizon, 2.0 * horizon),
    };
    Ok(if lambda < lo {
        Stage::Oscillating
    } else if lambda > hi {
        Stage::Frozen
    } else {
        Stage::HorizonCrossing
    })
}

/// Kibble-Zurek freeze-out: solves `(t_c - t) gap(t) = 1` by bisection on
/// `[domain start, t_c)` and returns `(t_tilde, xi_coeff / gap(t_tilde))`.
pub fn kz_freezeout(gap: &SweepProfile, t_c: f64, xi_coeff: f64) -> Result<(f64, f64), ModeError> {
    let start = gap.domain.start;
    if !start.is_finite() || !(t_c > start) {
        return Err(ModeError::NoBracket { start, t_c });
    }
    const PROBES: usize = 1024;
    let mut prev = gap.eval(start)?;
    for i in 1..PROBES {
        let t = start + (t_c - start) * i as f64 / PROBES as f64;
        let g = gap.eval(t)?;
        if g > prev * (1.0 + 1e-12) {
            return Err(ModeError::NonMonotoneGap(t));
        }
        prev = g;
    }
    let f = |t: f64| (t_c - t) * gap.eval_unchecked(t) - 1.0;
    let (mut a, mut b) = (start, t_c);
    if !(f(a) > 0.0) {
        return Err(ModeError::NoBracket { start, t_c });
    }
    while b - a > 1e-14 * t_c.abs().max(1.0) {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let t = 0.5 * (a + b);
    let g = gap.eval_unchecked(t);
    if !(g > 0.0) {
        return Err(ModeError::NonPositiveGap { t, gap: g });
    }
    Ok((t, xi_coeff / g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Domain;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn stationary_vacuum_stays_put() {
        let d = DispersionRelation::quadratic(1.0, 0.0);
        let tr = evolve_mode(&d, 0.3, 0.0, 30.0, Initial::GroundState, &ModeConfig::default()).unwrap();
        for s in tr.samples() {
            assert!((s.moments.qq - 0.5).abs() < 1e-10);
            assert!((s.moments.pp - 0.5).abs() < 1e-10);
        }
        assert!(tr.max_wronskian_drift < 1e-9);
    }

    #[test]
    fn inverted_oscillator_matches_cosh() {
        let d = DispersionRelation::quadratic(-1.0, 0.0);
        let s0 = ModeState {
            k: 0.0,
            t: 0.0,
            u: Complex64::new(1.0, 0.0),
            u_dot: Complex64::new(0.0, 0.0),
            moments: Moments::vacuum(1.0),
        };
        let tr = evolve_mode(&d, 0.0, 0.0, 3.0, Initial::State(s0), &ModeConfig::default()).unwrap();
        for s in tr.samples() {
            assert!((s.u.re - s.t.cosh()).abs() <= 1e-8 * s.t.cosh());
            assert!((s.u_dot.re - s.t.sinh()).abs() <= 1e-8 * s.t.cosh());
        }
    }

    #[test]
    fn slow_sweep_tracks_adiabatically() {
        // omega(t) = 1 + 0.01 t, far from any resonance.
        let d = DispersionRelation::Quadratic {
            mass_sq: SweepProfile::tabulated(
                (0..=400).map(|i| {
                    let t = i as f64 * 0.25;
                    (t, (1.0 + 0.01 * t).powi(2))
                })
                .collect(),
            )
            .unwrap(),
            stiffness: SweepProfile::constant(0.0),
        };
        let tr = evolve_mode(&d, 0.0, 0.0, 100.0, Initial::GroundState, &ModeConfig::default()).unwrap();
        let s = tr.last();
        let omega = 2.0;
        assert!((s.moments.qq * 2.0 * omega - 1.0).abs() < 0.01);
    }

    #[test]
    fn ground_state_requires_positive_frequency() {
        let d = DispersionRelation::quadratic(-1.0, 0.0);
        assert!(matches!(
            evolve_mode(&d, 0.1, 0.0, 1.0, Initial::GroundState, &ModeConfig::default()),
            Err(ModeError::NoVacuum(_))
        ));
    }

    #[test]
    fn dense_output_is_consistent() {
        let d = DispersionRelation::quadratic(4.0, 0.0);
        let tr = evolve_mode(&d, 0.0, 0.0, 5.0, Initial::GroundState, &ModeConfig::default()).unwrap();
        let s = tr.state_at(2.345);
        // u(t) = exp(-2 i t) / 2 for omega = 2
        let exact = Complex64::from_polar(0.5, -2.0 * 2.345);
        assert!((s.u - exact).norm() < 1e-7);
    }

    #[test]
    fn amplitude_basics() {
        let dom = Domain::new(0.0, 10.0);
        let sys = TwoLevelSystem {
            gap: SweepProfile::linear(2.0, 0.1, dom),
            coupling: SweepProfile::constant(0.0),
        };
        assert_eq!(adiabatic_amplitude(&sys, 0.0, 10.0).unwrap().norm(), 0.0);

        let sys = TwoLevelSystem {
            gap: SweepProfile::linear(1.0, -0.1, dom),
            coupling: SweepProfile::constant(0.01),
        };
        assert!(matches!(
            adiabatic_amplitude(&sys, 0.0, 10.0),
            Err(ModeError::NonPositiveGap { .. })
        ));

        let sys = TwoLevelSystem {
            gap: SweepProfile::constant(2.0),
            coupling: SweepProfile::constant(0.4),
        };
        let a = adiabatic_amplitude(&sys, 0.0, 1.5).unwrap();
        assert_relative_eq!(a.norm(), 0.1, max_relative = 1e-14);
        assert_relative_eq!(a.arg(), -3.0, max_relative = 1e-9);
    }

    proptest! {
        #[test]
        fn amplitude_is_linear_in_coupling(scale in 0.01f64..100.0, v in 0.001f64..0.1) {
            let dom = Domain::new(0.0, 5.0);
            let gap = SweepProfile::linear(1.0, 0.2, dom);
            let a = TwoLevelSystem { gap: gap.clone(), coupling: SweepProfile::linear(0.0, v, dom) };
            let b = TwoLevelSystem { gap, coupling: SweepProfile::linear(0.0, v, dom).scaled(scale) };
            let ra = adiabatic_amplitude(&a, 0.0, 5.0).unwrap().norm();
            let rb = adiabatic_amplitude(&b, 0.0, 5.0).unwrap().norm();
            prop_assert!((rb - scale * ra).abs() <= 1e-12 * rb);
        }
    }

    /// Symplectic diagonalization oracle: `r` from the eigenvalues of
    /// `sigma J` (the symplectic spectrum is the same for all rescalings).
    fn squeeze_oracle(qq: f64, pp: f64, qp: f64, w: f64) -> f64 {
        // Rescaled covariance S = D sigma D with D = diag(sqrt w, 1/sqrt w);
        // for a pure state cosh(2r) = tr(S) (since det S = 1/4).
        let tr = w * qq + pp / w;
        let nu = (qq * pp - qp * qp).sqrt();
        0.5 * (tr / (2.0 * nu)).acosh()
    }

    #[test]
    fn squeeze_examples() {
        let v = ModeState::vacuum(1.0, 0.0, 3.0);
        assert_eq!(squeeze_parameters(&v, 3.0).unwrap().0, 0.0);

        let mut s = ModeState::vacuum(1.0, 0.0, 1.0);
        s.moments.qq *= 2.0;
        s.moments.pp /= 2.0;
        let (r, phi) = squeeze_parameters(&s, 1.0).unwrap();
        assert_relative_eq!(r, 2f64.ln() / 2.0, max_relative = 1e-14);
        assert_relative_eq!(r, squeeze_oracle(1.0, 0.25, 0.0, 1.0), max_relative = 1e-12);
        assert_eq!(phi, 0.0);

        let s = ModeState::vacuum(1.0, 0.0, 5.0);
        let (r, _) = squeeze_parameters(&s, 2.0).unwrap();
        assert_relative_eq!(r, (5.0f64 / 2.0).ln().abs() / 2.0, max_relative = 1e-12);

        let mut bad = s;
        bad.moments.qq = 0.01;
        assert!(matches!(squeeze_parameters(&bad, 1.0), Err(ModeError::Unphysical(_))));
        assert!(squeeze_parameters(&s, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn squeeze_matches_oracle(r in 0.0f64..3.0, theta in 0.0f64..3.14, w in 0.1f64..10.0) {
            // Build a pure squeezed vacuum of frequency w rotated by theta.
            let (c, s) = (theta.cos(), theta.sin());
            let (l1, l2) = (0.5 * (2.0 * r).exp(), 0.5 * (-2.0 * r).exp());
            let a = c * c * l1 + s * s * l2;
            let b = c * s * (l1 - l2);
            let d = s * s * l1 + c * c * l2;
            let st = ModeState {
                k: 0.0, t: 0.0, u: Complex64::new(0.0, 0.0), u_dot: Complex64::new(0.0, 0.0),
                moments: Moments { qq: a / w, pp: d * w, qp: b },
            };
            let (rr, phi) = squeeze_parameters(&st, w).unwrap();
            prop_assert!((rr - r).abs() < 1e-9 * (1.0 + r));
            prop_assert!((rr - squeeze_oracle(a / w, d * w, b, w)).abs() < 1e-7);
            prop_assert!((0.0..std::f64::consts::PI).contains(&phi));
            if r > 0.01 {
                let dphi = (phi - theta).abs();
                prop_assert!(dphi < 1e-6 || (dphi - std::f64::consts::PI).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn stage_examples() {
        // horizon from t=0 is c0/gamma = 2
        let c = SweepProfile::exponential(1.0, 0.5, 0.0);
        let two_pi = 2.0 * std::f64::consts::PI;
        assert_eq!(classify_stage(&c, 100.0, 0.0, StageWindow::Sharp).unwrap(), Stage::Oscillating);
        assert_eq!(classify_stage(&c, 0.01, 0.0, StageWindow::Sharp).unwrap(), Stage::Frozen);
        let r = horizon_size(&c, 0.0, f64::INFINITY).unwrap().finite().unwrap();
        assert_eq!(
            classify_stage(&c, two_pi / r, 0.0, StageWindow::Sharp).unwrap(),
            Stage::HorizonCrossing
        );
        assert_eq!(
            classify_stage(&c, two_pi / (1.5 * r), 0.0, StageWindow::Band).unwrap(),
            Stage::HorizonCrossing
        );
        let flat = SweepProfile::constant(1.0);
        assert_eq!(classify_stage(&flat, 1e-6, 0.0, StageWindow::Sharp).unwrap(), Stage::Oscillating);
    }

    proptest! {
        #[test]
        fn longer_wavelengths_freeze_first(k1 in 0.01f64..50.0, k2 in 0.01f64..50.0, t in 0.0f64..5.0) {
            let c = SweepProfile::exponential(1.3, 0.4, 0.0);
            let (lo, hi) = if k1 < k2 { (k1, k2) } else { (k2, k1) };
            for w in [StageWindow::Sharp, StageWindow::Band] {
                let s_lo = classify_stage(&c, lo, t, w).unwrap();
                let s_hi = classify_stage(&c, hi, t, w).unwrap();
                prop_assert!(s_lo >= s_hi);
            }
        }
    }

    #[test]
    fn freezeout_examples() {
        let (tc, a, xi) = (10.0, 4.0, 3.0);
        let gap = SweepProfile::linear(a * tc, -a, Domain::new(0.0, tc));
        let (tt, xt) = kz_freezeout(&gap, tc, xi).unwrap();
        assert_relative_eq!(tc - tt, a.powf(-0.5), max_relative = 1e-10);
        assert_relative_eq!(xt, xi * a.powf(-0.5), max_relative = 1e-10);

        let gap = SweepProfile::constant(0.5).with_domain(Domain::new(0.0, tc)).unwrap();
        let (tt, _) = kz_freezeout(&gap, tc, 1.0).unwrap();
        assert_relative_eq!(tc - tt, 2.0, max_relative = 1e-12);

        let rising = SweepProfile::linear(1.0, 1.0, Domain::new(0.0, tc));
        assert!(matches!(kz_freezeout(&rising, tc, 1.0), Err(ModeError::NonMonotoneGap(_))));

        let tiny = SweepProfile::constant(0.01).with_domain(Domain::new(0.0, tc)).unwrap();
        assert!(matches!(kz_freezeout(&tiny, tc, 1.0), Err(ModeError::NoBracket { .. })));
    }
}
