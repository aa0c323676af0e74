use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heat_core::DiffusivityProfile;
use crate::law::TimeLaw;

/// Jump rate `λ(t) >= 0` of a counting process on `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RateSpec", into = "RateSpec")]
pub struct RateProfile {
    law: TimeLaw,
    horizon: f64,
    lambda_min: f64,
    lambda_max: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RateSpec {
    law: TimeLaw,
    horizon: f64,
}

impl TryFrom<RateSpec> for RateProfile {
    type Error = Error;
    fn try_from(spec: RateSpec) -> Result<Self> {
        RateProfile::new(spec.law, spec.horizon)
    }
}

impl From<RateProfile> for RateSpec {
    fn from(r: RateProfile) -> Self {
        RateSpec {
            law: r.law,
            horizon: r.horizon,
        }
    }
}

impl RateProfile {
    pub fn new(law: TimeLaw, horizon: f64) -> Result<Self> {
        law.validate("rate")?;
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::config("horizon", "T must be positive and finite"));
        }
        let (lambda_min, lambda_max) = law.range(horizon);
        if lambda_min < 0.0 {
            return Err(Error::config(
                "rate",
                format!("λ(t) must be nonnegative on [0, T], found minimum {lambda_min}"),
            ));
        }
        Ok(RateProfile {
            law,
            horizon,
            lambda_min,
            lambda_max,
        })
    }

    pub fn constant(value: f64, horizon: f64) -> Result<Self> {
        Self::new(TimeLaw::constant(value), horizon)
    }

    pub fn zero(horizon: f64) -> Self {
        Self::constant(0.0, horizon).expect("zero rate is valid")
    }

    /// `λ(t) = factor * a(t)` on the horizon of `a`.
    pub fn from_diffusivity(a: &DiffusivityProfile, factor: f64) -> Result<Self> {
        Self::new(a.law().scaled(factor), a.horizon())
    }

    pub fn law(&self) -> &TimeLaw {
        &self.law
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn is_zero(&self) -> bool {
        self.lambda_max == 0.0
    }

    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        self.law.value(t)
    }

    /// Exact `m(t) = ∫₀ᵗ λ`.
    #[inline]
    pub fn mean(&self, t: f64) -> f64 {
        self.law.antiderivative(t)
    }

    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.law.breakpoints(lo, hi)
    }

    /// Smallest `t` in `(0, T]` (to within 1e-10) with `m(t) >= target`,
    /// for `0 < target <= m(T)`.
    pub fn inverse_mean(&self, target: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, self.horizon);
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if self.mean(mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}
