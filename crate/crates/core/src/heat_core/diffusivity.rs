use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::law::TimeLaw;
use crate::quadrature::adaptive;

/// Time-dependent diffusivity `a(t)` on `[0, T]`, bounded away from zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiffusivitySpec", into = "DiffusivitySpec")]
pub struct DiffusivityProfile {
    law: TimeLaw,
    horizon: f64,
    a_min: f64,
    a_max: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DiffusivitySpec {
    law: TimeLaw,
    horizon: f64,
}

impl TryFrom<DiffusivitySpec> for DiffusivityProfile {
    type Error = Error;
    fn try_from(spec: DiffusivitySpec) -> Result<Self> {
        DiffusivityProfile::new(spec.law, spec.horizon)
    }
}

impl From<DiffusivityProfile> for DiffusivitySpec {
    fn from(p: DiffusivityProfile) -> Self {
        DiffusivitySpec {
            law: p.law,
            horizon: p.horizon,
        }
    }
}

impl DiffusivityProfile {
    pub fn new(law: TimeLaw, horizon: f64) -> Result<Self> {
        law.validate("diffusivity")?;
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::config("horizon", "T must be positive and finite"));
        }
        let (a_min, a_max) = law.range(horizon);
        if !(a_min > 0.0) {
            return Err(Error::config(
                "diffusivity",
                format!("a(t) must stay positive on [0, T], found minimum {a_min}"),
            ));
        }
        Ok(DiffusivityProfile {
            law,
            horizon,
            a_min,
            a_max,
        })
    }

    pub fn constant(value: f64, horizon: f64) -> Result<Self> {
        Self::new(TimeLaw::constant(value), horizon)
    }

    pub fn law(&self) -> &TimeLaw {
        &self.law
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn a_min(&self) -> f64 {
        self.a_min
    }

    pub fn a_max(&self) -> f64 {
        self.a_max
    }

    pub fn value(&self, t: f64) -> f64 {
        self.law.value(t)
    }

    /// Exact time change `A(t)`; used inside the solver loops.
    pub fn time_change(&self, t: f64) -> f64 {
        self.law.antiderivative(t)
    }

    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.law.breakpoints(lo, hi)
    }
}

/// `A(t) = ∫₀ᵗ a(s) ds` by adaptive quadrature to absolute tolerance 1e-10.
pub fn cumulative_diffusivity(a: &DiffusivityProfile, t: f64) -> Result<f64> {
    if !(0.0..=a.horizon).contains(&t) {
        return Err(Error::domain(format!(
            "t = {t} outside [0, {}]",
            a.horizon
        )));
    }
    let mut breaks = vec![0.0];
    breaks.extend(a.breakpoints(0.0, t));
    breaks.push(t);
    let tol = 1e-10 / breaks.len() as f64;
    Ok(breaks
        .windows(2)
        .map(|w| adaptive(|s| a.value(s), w[0], w[1], tol))
        .sum())
}
