//! Finite-size gap models for first- and second-order transitions and the
//! bath-induced error scale `P ~ f_bath(gap) / gap`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aqc::{lowest_levels, AqcError, Pauli, PauliWord, Sector, SpinHamiltonian};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalingError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("gap {0} must be positive")]
    NonPositiveGap(f64),
    #[error(transparent)]
    Aqc(#[from] AqcError),
}

/// Gap at a first-order avoided crossing: overlap `s^n` between the two
/// competing ground states times a norm growing like `n^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderModel {
    pub overlap_decay: f64,
    pub norm_poly_degree: u32,
}

impl FirstOrderModel {
    pub fn new(overlap_decay: f64, norm_poly_degree: u32) -> Result<Self, ScalingError> {
        if !(overlap_decay > 0.0 && overlap_decay < 1.0) {
            return Err(ScalingError::Invalid(format!("overlap decay {overlap_decay} outside (0, 1)")));
        }
        Ok(Self {
            overlap_decay,
            norm_poly_degree,
        })
    }
}

/// `n^d s^n`, with `0^0 = 1`.
pub fn first_order_gap(m: &FirstOrderModel, n: u32) -> f64 {
    let poly = if m.norm_poly_degree == 0 { 1.0 } else { (n as f64).powi(m.norm_poly_degree as i32) };
    poly * m.overlap_decay.powi(n as i32)
}

/// Lowest quasiparticle energy `2J sqrt(1 + g^2 - 2g cos(pi/n))` of the
/// transverse-field Ising ring in the antiperiodic sector.
pub fn tfim_gap(n: usize, g: f64, j: f64) -> f64 {
    let k = std::f64::consts::PI / n as f64;
    // 1 + g^2 - 2g cos k = (1 - g)^2 + 4g sin^2(k/2), without cancellation at g = 1
    let s = (0.5 * k).sin();
    2.0 * j * ((1.0 - g).powi(2) + 4.0 * g * s * s).sqrt()
}

/// Transverse-field Ising ring `-J sum X_i X_{i+1} - gJ sum Z_i`.
pub fn tfim_hamiltonian(n: usize, g: f64, j: f64) -> Result<SpinHamiltonian, ScalingError> {
    if n < 2 {
        return Err(ScalingError::Invalid(format!("chain of {n} sites")));
    }
    let bonds = (0..n).map(|i| (PauliWord::from_ops(&[(i, Pauli::X), ((i + 1) % n, Pauli::X)]), -j));
    let field = (0..n).map(|i| (PauliWord::single(i, Pauli::Z), -g * j));
    Ok(SpinHamiltonian::from_terms(n, bonds.chain(field))?)
}

/// Half the gap of the ring within the even `prod Z` sector, which holds
/// the antiperiodic quasiparticles; the lowest excitation there is a pair
/// at momenta `+-pi/n`.
pub fn tfim_sector_gap(n: usize, g: f64, j: f64) -> Result<f64, ScalingError> {
    let h = tfim_hamiltonian(n, g, j)?;
    let lv = lowest_levels(&h, 2, Some(Sector::Parity(true)))?;
    Ok(0.5 * (lv.values[1] - lv.values[0]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form")]
pub enum BathSpectrum {
    /// `eta w^exponent exp(-w / cutoff)`; an infinite cutoff is allowed.
    PowerLaw { eta: f64, exponent: f64, cutoff: f64 },
}

impl BathSpectrum {
    pub fn power_law(eta: f64, exponent: f64, cutoff: f64) -> Result<Self, ScalingError> {
        if !(eta >= 0.0) || !(exponent >= 0.0) || !(cutoff > 0.0) {
            return Err(ScalingError::Invalid(format!(
                "bath needs eta >= 0, exponent >= 0, cutoff > 0 (got {eta}, {exponent}, {cutoff})"
            )));
        }
        Ok(BathSpectrum::PowerLaw { eta, exponent, cutoff })
    }

    pub fn ohmic(eta: f64) -> Self {
        BathSpectrum::PowerLaw {
            eta,
            exponent: 1.0,
            cutoff: f64::INFINITY,
        }
    }

    pub fn eval(&self, w: f64) -> f64 {
        match *self {
            BathSpectrum::PowerLaw { eta, exponent, cutoff } => eta * w.powf(exponent) * (-w / cutoff).exp(),
        }
    }
}

/// `prefactor f_bath(gap) / gap`: a scale for the error probability, not a
/// normalized probability.
pub fn decoherence_error(bath: &BathSpectrum, gap_min: f64, prefactor: f64) -> Result<f64, ScalingError> {
    if !(gap_min > 0.0) {
        return Err(ScalingError::NonPositiveGap(gap_min));
    }
    Ok(match *bath {
        // w^s / w evaluated as w^(s-1), so the ohmic case is exactly flat.
        BathSpectrum::PowerLaw { eta, exponent, cutoff } => {
            prefactor * eta * gap_min.powf(exponent - 1.0) * (-gap_min / cutoff).exp()
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapModel {
    FirstOrder,
    SecondOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Trend {
    Decaying,
    Bounded,
    Growing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VulnerabilityRow {
    pub model: GapModel,
    pub n: usize,
    pub gap: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VulnerabilityReport {
    pub rows: Vec<VulnerabilityRow>,
    pub first_order_trend: Trend,
    pub second_order_trend: Trend,
}

impl VulnerabilityReport {
    pub fn column(&self, model: GapModel) -> Vec<VulnerabilityRow> {
        self.rows.iter().copied().filter(|r| r.model == model).collect()
    }
}

fn trend(errors: &[f64]) -> Trend {
    let (first, last) = (errors[0], errors[errors.len() - 1]);
    if errors.windows(2).all(|w| w[1] >= w[0]) && last > first {
        Trend::Growing
    } else if errors.windows(2).all(|w| w[1] <= w[0]) && last < first {
        Trend::Decaying
    } else {
        Trend::Bounded
    }
}

/// Second-order error with soft modes: the gap `gap(n)` opens a ladder of
/// `n` modes at `(2j - 1) gap(n)`, each contributing its own error scale.
pub fn soft_mode_error(bath: &BathSpectrum, gap: f64, n: usize, prefactor: f64) -> Result<f64, ScalingError> {
    (1..=n).try_fold(0.0, |acc, j| Ok(acc + decoherence_error(bath, (2 * j - 1) as f64 * gap, prefactor)?))
}

/// Gap and error scale of both models over `n_range`, with the trend of
/// each error column.
pub fn scheme_vulnerability_report(
    first_order: &FirstOrderModel,
    second_order_gap: impl Fn(usize) -> f64,
    bath: &BathSpectrum,
    n_range: &[usize],
    prefactor: f64,
) -> Result<VulnerabilityReport, ScalingError> {
    if n_range.is_empty() {
        return Err(ScalingError::Invalid("empty size range".into()));
    }
    let mut rows = Vec::with_capacity(2 * n_range.len());
    for &n in n_range {
        let gap = first_order_gap(first_order, n as u32);
        rows.push(VulnerabilityRow {
            model: GapModel::FirstOrder,
            n,
            gap,
            error: decoherence_error(bath, gap, prefactor)?,
        });
        let gap = second_order_gap(n);
        rows.push(VulnerabilityRow {
            model: GapModel::SecondOrder,
            n,
            gap,
            error: soft_mode_error(bath, gap, n, prefactor)?,
        });
    }
    let col = |m: GapModel| rows.iter().filter(|r| r.model == m).map(|r| r.error).collect::<Vec<_>>();
    Ok(VulnerabilityReport {
        first_order_trend: trend(&col(GapModel::FirstOrder)),
        second_order_trend: trend(&col(GapModel::SecondOrder)),
        rows,
    })
}
