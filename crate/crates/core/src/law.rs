//! Closed-form scalar functions of time.
//!
//! The same small family describes the diffusivity `a(t)`, the jump rate
//! `λ(t)` and the temporal factor of a forcing term. Every member has an
//! exact antiderivative, which the solvers use for the time change
//! `A(t) = ∫₀ᵗ a` and the mean function `m(t) = ∫₀ᵗ λ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeLaw {
    Constant {
        value: f64,
    },
    /// `intercept + slope * t`
    Affine {
        intercept: f64,
        slope: f64,
    },
    /// Right-continuous step function: `values[k]` on `[breaks[k-1], breaks[k])`.
    PiecewiseConstant {
        breaks: Vec<f64>,
        values: Vec<f64>,
    },
    /// `mean + amplitude * cos(omega * t)`
    Cosine {
        mean: f64,
        amplitude: f64,
        omega: f64,
    },
}

impl TimeLaw {
    pub fn constant(value: f64) -> Self {
        TimeLaw::Constant { value }
    }

    pub fn affine(intercept: f64, slope: f64) -> Self {
        TimeLaw::Affine { intercept, slope }
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        let finite = |v: f64| v.is_finite();
        match self {
            TimeLaw::Constant { value } if !finite(*value) => {
                Err(Error::config(field, "constant value must be finite"))
            }
            TimeLaw::Affine { intercept, slope } if !finite(*intercept) || !finite(*slope) => {
                Err(Error::config(field, "affine coefficients must be finite"))
            }
            TimeLaw::PiecewiseConstant { breaks, values } => {
                if values.len() != breaks.len() + 1 {
                    return Err(Error::config(
                        field,
                        "piecewise_constant needs exactly one more value than breaks",
                    ));
                }
                if breaks.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::config(field, "breaks must be strictly increasing"));
                }
                if breaks.iter().chain(values).any(|v| !v.is_finite()) {
                    return Err(Error::config(field, "breaks and values must be finite"));
                }
                Ok(())
            }
            TimeLaw::Cosine {
                mean,
                amplitude,
                omega,
            } if !finite(*mean) || !finite(*amplitude) || !finite(*omega) => {
                Err(Error::config(field, "cosine coefficients must be finite"))
            }
            _ => Ok(()),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            TimeLaw::Constant { value } => *value,
            TimeLaw::Affine { intercept, slope } => intercept + slope * t,
            TimeLaw::PiecewiseConstant { breaks, values } => {
                let k = breaks.partition_point(|&b| b <= t);
                values[k]
            }
            TimeLaw::Cosine {
                mean,
                amplitude,
                omega,
            } => mean + amplitude * (omega * t).cos(),
        }
    }

    /// Exact `∫₀ᵗ value(s) ds`.
    pub fn antiderivative(&self, t: f64) -> f64 {
        match self {
            TimeLaw::Constant { value } => value * t,
            TimeLaw::Affine { intercept, slope } => intercept * t + 0.5 * slope * t * t,
            TimeLaw::PiecewiseConstant { breaks, values } => {
                let mut acc = 0.0;
                let mut left = 0.0;
                for (k, &b) in breaks.iter().enumerate() {
                    if b <= 0.0 {
                        continue;
                    }
                    if b >= t {
                        return acc + values[k] * (t - left);
                    }
                    acc += values[k] * (b - left);
                    left = b;
                }
                acc + values[breaks.len()] * (t - left)
            }
            TimeLaw::Cosine {
                mean,
                amplitude,
                omega,
            } => {
                if *omega == 0.0 {
                    (mean + amplitude) * t
                } else {
                    mean * t + amplitude * (omega * t).sin() / omega
                }
            }
        }
    }

    /// Discontinuities of the law inside the open interval `(lo, hi)`.
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self {
            TimeLaw::PiecewiseConstant { breaks, .. } => {
                breaks.iter().copied().filter(|&b| b > lo && b < hi).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Longest time panel over which the law is resolved by one 8-point rule.
    pub fn time_scale(&self) -> f64 {
        match self {
            TimeLaw::Cosine { omega, .. } if *omega != 0.0 => 1.0 / omega.abs(),
            _ => f64::INFINITY,
        }
    }

    /// Bounds `(min, max)` of the law over `[0, horizon]`.
    pub fn range(&self, horizon: f64) -> (f64, f64) {
        match self {
            TimeLaw::Constant { value } => (*value, *value),
            TimeLaw::Affine { .. } => {
                let (a, b) = (self.value(0.0), self.value(horizon));
                (a.min(b), a.max(b))
            }
            TimeLaw::PiecewiseConstant { breaks, values } => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for (k, v) in values.iter().enumerate() {
                    let start = if k == 0 { f64::NEG_INFINITY } else { breaks[k - 1] };
                    let end = if k == breaks.len() { f64::INFINITY } else { breaks[k] };
                    if end > 0.0 && start <= horizon {
                        lo = lo.min(*v);
                        hi = hi.max(*v);
                    }
                }
                (lo, hi)
            }
            TimeLaw::Cosine { .. } => {
                let n = 4096;
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for i in 0..=n {
                    let v = self.value(horizon * i as f64 / n as f64);
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                // critical points of the cosine
                if let TimeLaw::Cosine {
                    mean,
                    amplitude,
                    omega,
                } = self
                {
                    if *omega != 0.0 && horizon * omega.abs() >= std::f64::consts::PI {
                        lo = lo.min(mean - amplitude.abs());
                        hi = hi.max(mean + amplitude.abs());
                    }
                }
                (lo, hi)
            }
        }
    }

    /// `factor * self`, kept in closed form.
    pub fn scaled(&self, factor: f64) -> TimeLaw {
        match self {
            TimeLaw::Constant { value } => TimeLaw::Constant {
                value: factor * value,
            },
            TimeLaw::Affine { intercept, slope } => TimeLaw::Affine {
                intercept: factor * intercept,
                slope: factor * slope,
            },
            TimeLaw::PiecewiseConstant { breaks, values } => TimeLaw::PiecewiseConstant {
                breaks: breaks.clone(),
                values: values.iter().map(|v| factor * v).collect(),
            },
            TimeLaw::Cosine {
                mean,
                amplitude,
                omega,
            } => TimeLaw::Cosine {
                mean: factor * mean,
                amplitude: factor * amplitude,
                omega: *omega,
            },
        }
    }
}
