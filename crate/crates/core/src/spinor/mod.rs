//! Linearized symmetry-breaking quench of a spin-1 condensate: seeded
//! Gaussian sampling of the transverse magnetization `psi = F_x + i F_y`,
//! unstable-mode growth, vortex detection and winding-number statistics.

mod stats;
mod vortex;

pub use stats::{scaling_fit, winding_statistics, ModelFit, ScalingFit, ScalingModel, WindingReport};
pub use vortex::{boundary_winding, detect_vortices, winding_number, Vortex, VortexScan};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Radii (lattice units) of the default winding-number scan.
pub const DEFAULT_RADII: [f64; 9] = [1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpinorError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("pre-quench dispersion has omega^2 = {w2} <= 0 at k^2 = {k2}")]
    NoVacuum { k2: f64, w2: f64 },
    #[error("{count} plaquettes with a zero-field corner")]
    ZeroField { count: usize },
    #[error("radius {r} exceeds half the box ({max})")]
    RadiusTooLarge { r: f64, max: f64 },
    #[error("scaling fit needs at least 4 radii spanning a factor 4")]
    TooFewRadii,
    #[error("scaling fit is singular (all data zero)")]
    Singular,
}

/// Instantaneous quench of the quadratic Zeeman energy `q` across
/// `q_crit = 2 |c2| rho`, with mass `m^2 = q - q_crit` and stiffness `c^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinorQuenchParams {
    /// Sites per side (even, at least 16).
    pub l: usize,
    /// Lattice spacing.
    pub a: f64,
    pub q_initial: f64,
    pub q_final: f64,
    pub c2: f64,
    pub rho: f64,
    /// Stiffness `c^2` of the transverse modes.
    pub stiffness: f64,
    pub t_grow: f64,
    pub seed: u64,
    /// Modes with lattice momentum above this are seeded but not grown.
    pub cutoff_k: Option<f64>,
}

impl Default for SpinorQuenchParams {
    fn default() -> Self {
        Self {
            l: 64,
            a: 1.0,
            q_initial: 2.0,
            q_final: 0.0,
            c2: -0.5,
            rho: 1.0,
            stiffness: 1.0,
            t_grow: 6.0,
            seed: 0x5EED,
            cutoff_k: None,
        }
    }
}

impl SpinorQuenchParams {
    pub fn q_crit(&self) -> f64 {
        2.0 * self.c2.abs() * self.rho
    }

    pub fn mass_sq_initial(&self) -> f64 {
        self.q_initial - self.q_crit()
    }

    pub fn mass_sq_final(&self) -> f64 {
        self.q_final - self.q_crit()
    }

    pub fn validate(&self) -> Result<(), SpinorError> {
        if self.l < 16 || self.l % 2 != 0 {
            return Err(SpinorError::Invalid(format!(
                "L = {} must be even and at least 16",
                self.l
            )));
        }
        if !(self.a > 0.0) {
            return Err(SpinorError::Invalid(format!("spacing a = {} must be positive", self.a)));
        }
        if !(self.t_grow >= 0.0) || !self.t_grow.is_finite() {
            return Err(SpinorError::Invalid(format!("t_grow = {} must be >= 0", self.t_grow)));
        }
        if !(self.stiffness >= 0.0) {
            return Err(SpinorError::Invalid("stiffness must be >= 0".into()));
        }
        let m2 = self.mass_sq_initial();
        if !(m2 > 0.0) {
            return Err(SpinorError::NoVacuum { k2: 0.0, w2: m2 });
        }
        Ok(())
    }

    /// Lattice momentum squared `(2/a)^2 sum_i sin^2(k_i a / 2)` of FFT bin
    /// `(mx, my)`.
    pub fn lattice_k_sq(&self, mx: usize, my: usize) -> f64 {
        let l = self.l as f64;
        let s = |m: usize| (std::f64::consts::PI * m as f64 / l).sin();
        (2.0 / self.a).powi(2) * (s(mx).powi(2) + s(my).powi(2))
    }

    /// Linear propagator `(C, S)` of one mode over `t_grow`, so that
    /// `psi(T) = C psi(0) + S pi(0)`.
    pub fn propagator(&self, k_sq: f64) -> (f64, f64) {
        let t = self.t_grow;
        if let Some(cut) = self.cutoff_k {
            if k_sq > cut * cut {
                return (1.0, 0.0);
            }
        }
        let w2 = self.mass_sq_final() + self.stiffness * k_sq;
        if w2 < 0.0 {
            let kappa = (-w2).sqrt();
            ((kappa * t).cosh(), (kappa * t).sinh() / kappa)
        } else if w2 > 0.0 {
            let w = w2.sqrt();
            ((w * t).cos(), (w * t).sin() / w)
        } else {
            (1.0, t)
        }
    }

    /// Ensemble variance `E|psi_k|^2` of one Fourier mode after growth.
    pub fn mode_variance(&self, k_sq: f64) -> f64 {
        let w = (self.mass_sq_initial() + self.stiffness * k_sq).sqrt();
        let (c, s) = self.propagator(k_sq);
        c * c / (2.0 * w) + s * s * w / 2.0
    }

    /// Ensemble variance `E|psi(x)|^2` of one site.
    pub fn site_variance(&self) -> f64 {
        let l = self.l;
        let mut total = 0.0;
        for my in 0..l {
            for mx in 0..l {
                total += self.mode_variance(self.lattice_k_sq(mx, my));
            }
        }
        total / (l * l) as f64
    }
}

/// Complex field on the periodic `L x L` lattice, row-major (`y * L + x`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorFieldSample {
    pub l: usize,
    pub psi: Vec<Complex64>,
    pub params: Option<SpinorQuenchParams>,
    pub seed: u64,
}

impl SpinorFieldSample {
    pub fn from_fn(l: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut psi = Vec::with_capacity(l * l);
        for y in 0..l {
            for x in 0..l {
                psi.push(f(x, y));
            }
        }
        Self {
            l,
            psi,
            params: None,
            seed: 0,
        }
    }

    pub fn at(&self, x: usize, y: usize) -> Complex64 {
        self.psi[(y % self.l) * self.l + (x % self.l)]
    }

    pub fn conj(&self) -> Self {
        Self {
            psi: self.psi.iter().map(|z| z.conj()).collect(),
            ..self.clone()
        }
    }

    pub fn rotated(&self, angle: f64) -> Self {
        let r = Complex64::from_polar(1.0, angle);
        Self {
            psi: self.psi.iter().map(|z| z * r).collect(),
            ..self.clone()
        }
    }

    pub fn mean_sq(&self) -> f64 {
        self.psi.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.psi.len() as f64
    }
}

/// Draws the post-quench field for `p.seed`.
///
/// Each Fourier mode gets independent complex Gaussian `psi_k` and `pi_k`
/// with the pre-quench vacuum variances `1/(2 w_in)` and `w_in/2`, is
/// propagated with [`SpinorQuenchParams::propagator`] and transformed back
/// with the unitary normalization `1/L`.
pub fn sample_post_quench_field(p: &SpinorQuenchParams) -> Result<SpinorFieldSample, SpinorError> {
    p.validate()?;
    let l = p.l;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut modes = vec![Complex64::new(0.0, 0.0); l * l];
    for my in 0..l {
        for mx in 0..l {
            let k2 = p.lattice_k_sq(mx, my);
            let w2 = p.mass_sq_initial() + p.stiffness * k2;
            if !(w2 > 0.0) {
                return Err(SpinorError::NoVacuum { k2, w2 });
            }
            let w = w2.sqrt();
            let mut gauss = || {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            };
            let psi_k = gauss() * (0.5 / w).sqrt();
            let pi_k = gauss() * (0.5 * w).sqrt();
            let (c, s) = p.propagator(k2);
            modes[my * l + mx] = psi_k * c + pi_k * s;
        }
    }
    inverse_fft_2d(&mut modes, l);
    let norm = 1.0 / l as f64;
    for z in &mut modes {
        *z *= norm;
    }
    Ok(SpinorFieldSample {
        l,
        psi: modes,
        params: Some(p.clone()),
        seed: p.seed,
    })
}

fn inverse_fft_2d(data: &mut [Complex64], l: usize) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(l);
    for row in data.chunks_exact_mut(l) {
        fft.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); l];
    for x in 0..l {
        for y in 0..l {
            column[y] = data[y * l + x];
        }
        fft.process(&mut column);
        for y in 0..l {
            data[y * l + x] = column[y];
        }
    }
}
