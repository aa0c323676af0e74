use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heat_core::DiffusivityProfile;
use crate::poisson::RateProfile;

/// How the jump rate is tied to the diffusivity and the jump size `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    /// `λ(t) = a(t) / h²`: the centered lattice term tends to `a ∂²_y`.
    LambdaEqAOverH2,
    /// `λ(t) = h² a(t)`: the coupling vanishes as `h → 0`.
    LambdaEqH2A,
    /// A fixed rate, independent of `h`.
    Custom(RateProfile),
}

impl Coupling {
    pub fn rate(&self, a: &DiffusivityProfile, h: f64) -> Result<RateProfile> {
        match self {
            Coupling::LambdaEqAOverH2 => {
                if h == 0.0 {
                    return Err(Error::config("h", "a / h² coupling needs h != 0"));
                }
                RateProfile::from_diffusivity(a, 1.0 / (h * h))
            }
            Coupling::LambdaEqH2A => RateProfile::from_diffusivity(a, h * h),
            Coupling::Custom(r) => Ok(r.clone()),
        }
    }
}

/// Monte Carlo and lattice settings for one lifted experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftConfig {
    pub h: f64,
    pub coupling: Coupling,
    pub n_paths: usize,
    pub master_seed: u64,
    /// Half-width of the y window used for exit-fraction bookkeeping.
    pub y_window: f64,
}

impl LiftConfig {
    pub fn new(h: f64, coupling: Coupling, n_paths: usize, master_seed: u64, y_window: f64) -> Result<Self> {
        let c = LiftConfig {
            h,
            coupling,
            n_paths,
            master_seed,
            y_window,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.h.is_finite() || self.h == 0.0 {
            return Err(Error::config("h", "jump size must be finite and nonzero"));
        }
        if self.n_paths == 0 {
            return Err(Error::config("n_paths", "need at least one path"));
        }
        if !(self.y_window > 0.0) {
            return Err(Error::config("y_window", "must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn couplings_scale_as_named() {
        let a = DiffusivityProfile::constant(2.0, 1.0).unwrap();
        let r = Coupling::LambdaEqAOverH2.rate(&a, 0.5).unwrap();
        assert_eq!(r.value(0.3), 8.0);
        let r = Coupling::LambdaEqH2A.rate(&a, 0.5).unwrap();
        assert_eq!(r.value(0.3), 0.5);
        assert!(Coupling::LambdaEqAOverH2.rate(&a, 0.0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(LiftConfig::new(0.0, Coupling::LambdaEqAOverH2, 10, 0, 1.0).is_err());
        assert!(LiftConfig::new(0.1, Coupling::LambdaEqAOverH2, 0, 0, 1.0).is_err());
        assert!(LiftConfig::new(0.1, Coupling::LambdaEqAOverH2, 10, 0, 1.0).is_ok());
    }
}
