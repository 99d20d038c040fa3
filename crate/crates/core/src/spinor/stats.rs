use serde::{Deserialize, Serialize};

use super::vortex::{boundary_from, disc_mask, winding_from, Edges};
use super::{sample_post_quench_field, SpinorError, SpinorQuenchParams};
use crate::exec;

/// Monte-Carlo winding-number moments per radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingReport {
    pub radii: Vec<f64>,
    pub n_mean: Vec<f64>,
    pub n_mean_se: Vec<f64>,
    pub n_sq_mean: Vec<f64>,
    pub n_sq_se: Vec<f64>,
    pub samples: usize,
    /// Set when fewer than two samples make the error bars meaningless.
    pub degenerate: bool,
    /// (field, radius, center) evaluations where the disc charge sum and the
    /// boundary circulation disagreed; zero for a consistent field.
    pub identity_failures: usize,
    pub identity_checks: usize,
    /// Samples whose total charge on the torus was nonzero.
    pub neutrality_failures: usize,
}

/// Disc centers (as fractions of `L`) averaged over within each sample.
pub const CENTERS: [(f64, f64); 4] = [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)];

struct SampleResult {
    n: Vec<f64>,
    n_sq: Vec<f64>,
    identity_failures: usize,
    neutral: bool,
}

/// Samples `samples` quenched fields with seeds `seed ^ splitmix64(i)` and
/// accumulates the winding number and its square, each averaged over the
/// four [`CENTERS`] per sample.
pub fn winding_statistics(
    p: &SpinorQuenchParams,
    radii: &[f64],
    samples: usize,
    seed: u64,
) -> Result<WindingReport, SpinorError> {
    p.validate()?;
    let max = p.l as f64 / 2.0;
    if let Some(&r) = radii.iter().find(|&&r| r > max || !(r > 0.0)) {
        return Err(SpinorError::RadiusTooLarge { r, max });
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SpinorError::Invalid("radii must be strictly increasing".into()));
    }
    if samples == 0 {
        return Err(SpinorError::Invalid("need at least one sample".into()));
    }
    let l = p.l;
    let masks: Vec<Vec<Vec<bool>>> = radii
        .iter()
        .map(|&r| {
            CENTERS
                .iter()
                .map(|&(cx, cy)| disc_mask(l, (cx * l as f64, cy * l as f64), r))
                .collect()
        })
        .collect();

    let per_sample = exec::map_range(samples, |i| -> Result<SampleResult, SpinorError> {
        let params = SpinorQuenchParams {
            seed: exec::derive_seed(seed, i as u64),
            ..p.clone()
        };
        let field = sample_post_quench_field(&params)?;
        let edges = Edges::new(&field);
        let mut total = 0i64;
        for y in 0..l {
            for x in 0..l {
                total += edges.charge(x, y).ok_or(SpinorError::ZeroField { count: 1 })? as i64;
            }
        }
        let mut out = SampleResult {
            n: Vec::with_capacity(radii.len()),
            n_sq: Vec::with_capacity(radii.len()),
            identity_failures: 0,
            neutral: total == 0,
        };
        for discs in &masks {
            let (mut s, mut s2) = (0.0, 0.0);
            for mask in discs {
                let w = winding_from(&edges, mask, l)?;
                if boundary_from(&edges, mask, l)? != w {
                    out.identity_failures += 1;
                }
                s += w as f64;
                s2 += (w * w) as f64;
            }
            out.n.push(s / discs.len() as f64);
            out.n_sq.push(s2 / discs.len() as f64);
        }
        Ok(out)
    });

    let per_sample: Vec<SampleResult> = per_sample.into_iter().collect::<Result<_, _>>()?;
    let nr = radii.len();
    let m = samples as f64;
    let mut report = WindingReport {
        radii: radii.to_vec(),
        n_mean: vec![0.0; nr],
        n_mean_se: vec![0.0; nr],
        n_sq_mean: vec![0.0; nr],
        n_sq_se: vec![0.0; nr],
        samples,
        degenerate: samples < 2,
        identity_failures: per_sample.iter().map(|s| s.identity_failures).sum(),
        identity_checks: samples * nr * CENTERS.len(),
        neutrality_failures: per_sample.iter().filter(|s| !s.neutral).count(),
    };
    for j in 0..nr {
        let (mean, se) = mean_se(per_sample.iter().map(|s| s.n[j]), m);
        report.n_mean[j] = mean;
        report.n_mean_se[j] = se;
        let (mean, se) = mean_se(per_sample.iter().map(|s| s.n_sq[j]), m);
        report.n_sq_mean[j] = mean;
        report.n_sq_se[j] = se;
    }
    Ok(report)
}

/// Mean and standard error, summed in input order.
fn mean_se(values: impl Iterator<Item = f64> + Clone, m: f64) -> (f64, f64) {
    let mean = values.clone().sum::<f64>() / m;
    if m < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScalingModel {
    /// `A R`
    Perimeter,
    /// `A R ln R`
    PerimeterLog,
    /// `A R^2`
    Area,
}

impl ScalingModel {
    pub const ALL: [ScalingModel; 3] = [
        ScalingModel::Perimeter,
        ScalingModel::PerimeterLog,
        ScalingModel::Area,
    ];

    pub fn basis(self, r: f64) -> f64 {
        match self {
            ScalingModel::Perimeter => r,
            ScalingModel::PerimeterLog => r * r.ln(),
            ScalingModel::Area => r * r,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScalingModel::Perimeter => "R",
            ScalingModel::PerimeterLog => "R ln R",
            ScalingModel::Area => "R^2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub model: ScalingModel,
    pub amplitude: f64,
    /// Weighted sum of squared residuals.
    pub chi_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub fits: Vec<ModelFit>,
    pub best: ScalingModel,
    /// Least-squares slope of `ln <N^2>` against `ln R`.
    pub loglog_slope: f64,
}

/// One-parameter weighted least squares of `<N^2>` against `R`, `R ln R`
/// and `R^2`. Weights are `1/se^2`; with any zero error bar all points get
/// unit weight.
pub fn scaling_fit(r: &WindingReport) -> Result<ScalingFit, SpinorError> {
    let radii = &r.radii;
    let y = &r.n_sq_mean;
    if radii.len() < 4 || radii.len() != y.len() {
        return Err(SpinorError::TooFewRadii);
    }
    let (rmin, rmax) = (radii[0], radii[radii.len() - 1]);
    if !(rmin > 0.0) || rmax < 4.0 * rmin {
        return Err(SpinorError::TooFewRadii);
    }
    if y.iter().all(|&v| v == 0.0) {
        return Err(SpinorError::Singular);
    }
    let weights: Vec<f64> = if r.n_sq_se.len() == y.len() && r.n_sq_se.iter().all(|&s| s > 0.0) {
        r.n_sq_se.iter().map(|s| 1.0 / (s * s)).collect()
    } else {
        vec![1.0; y.len()]
    };
    let mut fits = Vec::new();
    for model in ScalingModel::ALL {
        let f: Vec<f64> = radii.iter().map(|&x| model.basis(x)).collect();
        let sff: f64 = f.iter().zip(&weights).map(|(f, w)| w * f * f).sum();
        if sff == 0.0 {
            return Err(SpinorError::Singular);
        }
        let sfy: f64 = f.iter().zip(y).zip(&weights).map(|((f, y), w)| w * f * y).sum();
        let amplitude = sfy / sff;
        let chi_sq = f
            .iter()
            .zip(y)
            .zip(&weights)
            .map(|((f, y), w)| w * (y - amplitude * f).powi(2))
            .sum();
        fits.push(ModelFit {
            model,
            amplitude,
            chi_sq,
        });
    }
    let best = fits
        .iter()
        .min_by(|a, b| a.chi_sq.total_cmp(&b.chi_sq))
        .expect("three models")
        .model;

    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(y)
        .filter(|(_, &v)| v > 0.0)
        .map(|(&x, &v)| (x.ln(), v.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let loglog_slope = if pts.len() >= 2 && sxx > 0.0 { sxy / sxx } else { f64::NAN };
    Ok(ScalingFit {
        fits,
        best,
        loglog_slope,
    })
}
