//! Scalar time profiles for externally swept parameters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("time {t} outside profile domain [{start}, {end}]")]
    OutOfDomain { t: f64, start: f64, end: f64 },
    #[error("invalid profile: {0}")]
    Invalid(String),
}

/// Closed time interval on which a profile may be evaluated. `end` may be
/// `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub start: f64,
    pub end: f64,
}

impl Domain {
    pub fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }

    pub fn unbounded_from(start: f64) -> Self {
        Self {
            start,
            end: f64::INFINITY,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }

    fn check(&self, t: f64) -> Result<(), ProfileError> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(ProfileError::OutOfDomain {
                t,
                start: self.start,
                end: self.end,
            })
        }
    }
}

/// Functional form of a swept parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Form {
    Constant { value: f64 },
    /// `v0 * exp(-gamma * t)`
    Exponential { v0: f64, gamma: f64 },
    /// `v0 * (t / t0)^(-x)`, defined for `t > 0`.
    PowerLaw { v0: f64, t0: f64, x: f64 },
    /// `v0 + rate * t`
    Linear { v0: f64, rate: f64 },
    /// Piecewise-linear interpolation through `(t, value)` samples.
    Tabulated { samples: Vec<(f64, f64)> },
}

/// A parameter as a function of time on a [`Domain`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepProfile {
    #[serde(flatten)]
    pub form: Form,
    pub domain: Domain,
}

impl SweepProfile {
    pub fn new(form: Form, domain: Domain) -> Result<Self, ProfileError> {
        if domain.start.is_nan() || domain.end.is_nan() || domain.start > domain.end {
            return Err(ProfileError::Invalid(format!(
                "empty domain [{}, {}]",
                domain.start, domain.end
            )));
        }
        match &form {
            Form::PowerLaw { t0, .. } => {
                if *t0 <= 0.0 || domain.start <= 0.0 {
                    return Err(ProfileError::Invalid(
                        "power law needs t0 > 0 and a domain in t > 0".into(),
                    ));
                }
            }
            Form::Tabulated { samples } => {
                if samples.len() < 2 {
                    return Err(ProfileError::Invalid(
                        "tabulated profile needs at least two samples".into(),
                    ));
                }
                if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(ProfileError::Invalid(
                        "tabulated sample times must be strictly increasing".into(),
                    ));
                }
                let (first, last) = (samples[0].0, samples[samples.len() - 1].0);
                if domain.start < first || domain.end > last {
                    return Err(ProfileError::Invalid(format!(
                        "domain [{}, {}] exceeds tabulated range [{first}, {last}]",
                        domain.start, domain.end
                    )));
                }
            }
            _ => {}
        }
        Ok(Self { form, domain })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            form: Form::Constant { value },
            domain: Domain::new(f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn exponential(v0: f64, gamma: f64, start: f64) -> Self {
        Self {
            form: Form::Exponential { v0, gamma },
            domain: Domain::unbounded_from(start),
        }
    }

    pub fn power_law(v0: f64, t0: f64, x: f64, start: f64) -> Result<Self, ProfileError> {
        Self::new(Form::PowerLaw { v0, t0, x }, Domain::unbounded_from(start))
    }

    pub fn linear(v0: f64, rate: f64, domain: Domain) -> Self {
        Self {
            form: Form::Linear { v0, rate },
            domain,
        }
    }

    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self, ProfileError> {
        let domain = match (samples.first(), samples.last()) {
            (Some(a), Some(b)) => Domain::new(a.0, b.0),
            _ => Domain::new(0.0, 0.0),
        };
        Self::new(Form::Tabulated { samples }, domain)
    }

    /// Same form on a different domain.
    pub fn with_domain(&self, domain: Domain) -> Result<Self, ProfileError> {
        Self::new(self.form.clone(), domain)
    }

    /// Multiplies every value by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let form = match &self.form {
            Form::Constant { value } => Form::Constant {
                value: value * factor,
            },
            Form::Exponential { v0, gamma } => Form::Exponential {
                v0: v0 * factor,
                gamma: *gamma,
            },
            Form::PowerLaw { v0, t0, x } => Form::PowerLaw {
                v0: v0 * factor,
                t0: *t0,
                x: *x,
            },
            Form::Linear { v0, rate } => Form::Linear {
                v0: v0 * factor,
                rate: rate * factor,
            },
            Form::Tabulated { samples } => Form::Tabulated {
                samples: samples.iter().map(|&(t, v)| (t, v * factor)).collect(),
            },
        };
        Self {
            form,
            domain: self.domain,
        }
    }

    /// Pointwise square root for the closed forms that stay closed
    /// (`sqrt` of an exponential is an exponential with half the rate, and so on).
    pub fn sqrt(&self) -> Result<Self, ProfileError> {
        let form = match &self.form {
            Form::Constant { value } if *value >= 0.0 => Form::Constant {
                value: value.sqrt(),
            },
            Form::Exponential { v0, gamma } if *v0 >= 0.0 => Form::Exponential {
                v0: v0.sqrt(),
                gamma: gamma / 2.0,
            },
            Form::PowerLaw { v0, t0, x } if *v0 >= 0.0 => Form::PowerLaw {
                v0: v0.sqrt(),
                t0: *t0,
                x: x / 2.0,
            },
            Form::Tabulated { samples } if samples.iter().all(|s| s.1 >= 0.0) => {
                Form::Tabulated {
                    samples: samples.iter().map(|&(t, v)| (t, v.sqrt())).collect(),
                }
            }
            _ => {
                return Err(ProfileError::Invalid(
                    "square root has no closed form for this profile".into(),
                ))
            }
        };
        Ok(Self {
            form,
            domain: self.domain,
        })
    }

    pub fn eval(&self, t: f64) -> Result<f64, ProfileError> {
        self.domain.check(t)?;
        Ok(self.eval_unchecked(t))
    }

    /// Evaluates without the domain check. Callers that already validated
    /// the interval (quadrature, ODE right-hand sides) use this.
    pub(crate) fn eval_unchecked(&self, t: f64) -> f64 {
        match &self.form {
            Form::Constant { value } => *value,
            Form::Exponential { v0, gamma } => v0 * (-gamma * t).exp(),
            Form::PowerLaw { v0, t0, x } => v0 * (t / t0).powf(-x),
            Form::Linear { v0, rate } => v0 + rate * t,
            Form::Tabulated { samples } => interpolate(samples, t),
        }
    }

    /// Time derivative: analytic for closed forms, centered finite
    /// difference (clamped to the sample range) for tabulated data.
    pub fn derivative(&self, t: f64) -> Result<f64, ProfileError> {
        self.domain.check(t)?;
        Ok(match &self.form {
            Form::Constant { .. } => 0.0,
            Form::Exponential { v0, gamma } => -gamma * v0 * (-gamma * t).exp(),
            Form::PowerLaw { v0, t0, x } => -x / t * v0 * (t / t0).powf(-x),
            Form::Linear { rate, .. } => *rate,
            Form::Tabulated { samples } => {
                let (lo, hi) = (samples[0].0, samples[samples.len() - 1].0);
                let h = 1e-6 * (hi - lo);
                let a = (t - h).max(lo);
                let b = (t + h).min(hi);
                (interpolate(samples, b) - interpolate(samples, a)) / (b - a)
            }
        })
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self.form, Form::Tabulated { .. })
    }
}

fn interpolate(samples: &[(f64, f64)], t: f64) -> f64 {
    let idx = samples.partition_point(|s| s.0 <= t);
    if idx == 0 {
        return samples[0].1;
    }
    if idx >= samples.len() {
        return samples[samples.len() - 1].1;
    }
    let (t0, v0) = samples[idx - 1];
    let (t1, v1) = samples[idx];
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}
