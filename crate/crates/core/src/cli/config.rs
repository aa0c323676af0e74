use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heat_core::{DiffusivityProfile, SourceTerm, SpaceTimeGrid, WINDOW_SIGMAS};
use crate::lifting::Coupling;
use crate::poisson::RateProfile;
use crate::TimeLaw;

/// Named experiments the orchestrator can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    #[value(name = "solve1d")]
    Solve1d,
    #[value(name = "solve2d")]
    Solve2d,
    #[value(name = "jump_identity")]
    JumpIdentity,
    #[value(name = "lattice")]
    Lattice,
    #[value(name = "lift_limit")]
    LiftLimit,
    #[value(name = "estimates")]
    Estimates,
    #[value(name = "full_suite")]
    FullSuite,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Solve1d => "solve1d",
            Experiment::Solve2d => "solve2d",
            Experiment::JumpIdentity => "jump_identity",
            Experiment::Lattice => "lattice",
            Experiment::LiftLimit => "lift_limit",
            Experiment::Estimates => "estimates",
            Experiment::FullSuite => "full_suite",
        }
    }
}

/// Point at which the jump identity is checked. `t` defaults to the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Probe {
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub y: f64,
}

/// A single flat JSON document describing one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default = "defaults::horizon")]
    pub horizon: f64,
    #[serde(default = "defaults::diffusivity")]
    pub diffusivity: TimeLaw,
    /// Fixed jump rate; when absent the rate follows `coupling`.
    #[serde(default)]
    pub rate: Option<TimeLaw>,
    /// Forcing; when absent a Gaussian bump of width 0.5 is used.
    #[serde(default)]
    pub source: Option<SourceTerm>,
    #[serde(default = "defaults::dx")]
    pub dx: f64,
    /// y spacing; defaults to `dx`, or to the largest jump size for the
    /// lattice experiments.
    #[serde(default)]
    pub dy: Option<f64>,
    #[serde(default = "defaults::dt")]
    pub dt: f64,
    /// Half-width of the spatial window; chosen from the forcing support
    /// and the heat spread when absent.
    #[serde(default)]
    pub window: Option<f64>,
    #[serde(default = "defaults::h_list")]
    pub h_list: Vec<f64>,
    #[serde(default = "defaults::coupling")]
    pub coupling: Coupling,
    #[serde(default = "defaults::n_paths")]
    pub n_paths: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "defaults::y_window")]
    pub y_window: f64,
    #[serde(default = "defaults::alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "defaults::ps")]
    pub ps: Vec<f64>,
    /// Number of grids in the estimate refinement study; each halves `dx`.
    #[serde(default = "defaults::refinements")]
    pub refinements: usize,
    #[serde(default)]
    pub probe: Probe,
    #[serde(default)]
    pub out_dir: Option<String>,
}

mod defaults {
    use super::*;
    pub fn horizon() -> f64 {
        1.0
    }
    pub fn diffusivity() -> TimeLaw {
        TimeLaw::constant(1.0)
    }
    pub fn dx() -> f64 {
        0.05
    }
    pub fn dt() -> f64 {
        0.25
    }
    pub fn h_list() -> Vec<f64> {
        vec![0.4, 0.2, 0.1]
    }
    pub fn coupling() -> Coupling {
        Coupling::LambdaEqAOverH2
    }
    pub fn n_paths() -> usize {
        10_000
    }
    pub fn y_window() -> f64 {
        4.0
    }
    pub fn alphas() -> Vec<f64> {
        vec![0.3, 0.5, 0.7]
    }
    pub fn ps() -> Vec<f64> {
        vec![2.0, 4.0]
    }
    pub fn refinements() -> usize {
        2
    }
}

/// Width of the default Gaussian forcing.
pub const DEFAULT_SIGMA: f64 = 0.5;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let field = msg
                .split('`')
                .nth(1)
                .map(str::to_owned)
                .unwrap_or_else(|| "config".into());
            Error::config(field, msg)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Re-checks every module invariant the run relies on.
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::config("horizon", "must be positive and finite"));
        }
        self.diffusivity_profile()?;
        if let Some(r) = &self.rate {
            RateProfile::new(r.clone(), self.horizon).map_err(|e| rename(e, "rate"))?;
        }
        if let Some(f) = &self.source {
            if f.dim() != 1 && f.dim() != 2 {
                return Err(Error::config("source", "dimension must be 1 or 2"));
            }
        }
        if !(self.dx > 0.0 && self.dx.is_finite()) {
            return Err(Error::config("dx", "must be positive"));
        }
        if let Some(dy) = self.dy {
            if !(dy > 0.0 && dy.is_finite()) {
                return Err(Error::config("dy", "must be positive"));
            }
        }
        self.time_steps()?;
        if let Some(w) = self.window {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::config("window", "must be positive"));
            }
        }
        if self.h_list.is_empty() || self.h_list.iter().any(|h| !h.is_finite() || *h == 0.0) {
            return Err(Error::config("h_list", "need finite nonzero jump sizes"));
        }
        if let Coupling::Custom(r) = &self.coupling {
            if r.horizon() < self.horizon {
                return Err(Error::config("coupling", "custom rate ends before the horizon"));
            }
        }
        if self.n_paths == 0 {
            return Err(Error::config("n_paths", "need at least one path"));
        }
        if !(self.y_window > 0.0) {
            return Err(Error::config("y_window", "must be positive"));
        }
        if self.alphas.is_empty() || self.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return Err(Error::config("alphas", "exponents must lie in (0, 1)"));
        }
        if self.ps.is_empty() || self.ps.iter().any(|p| !(*p >= 1.0 && p.is_finite())) {
            return Err(Error::config("ps", "exponents must be finite and >= 1"));
        }
        if self.refinements == 0 {
            return Err(Error::config("refinements", "need at least one grid"));
        }
        let t = self.probe_time();
        if !(t > 0.0 && t <= self.horizon) {
            return Err(Error::config("probe.t", "must lie in (0, horizon]"));
        }
        Ok(())
    }

    pub fn diffusivity_profile(&self) -> Result<DiffusivityProfile> {
        DiffusivityProfile::new(self.diffusivity.clone(), self.horizon)
            .map_err(|e| rename(e, "diffusivity"))
    }

    /// Rate for jump size `h`: the fixed `rate` if given, else the coupling.
    pub fn rate_for(&self, h: f64) -> Result<RateProfile> {
        match &self.rate {
            Some(r) => RateProfile::new(r.clone(), self.horizon),
            None => self.coupling.rate(&self.diffusivity_profile()?, h),
        }
    }

    pub fn time_steps(&self) -> Result<usize> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config("dt", "must be positive"));
        }
        let n = self.horizon / self.dt;
        let k = n.round();
        if k < 1.0 || (n - k).abs() > 1e-9 * n.max(1.0) {
            return Err(Error::config("dt", "must divide the horizon"));
        }
        Ok(k as usize)
    }

    pub fn probe_time(&self) -> f64 {
        self.probe.t.unwrap_or(self.horizon)
    }

    /// The configured forcing if it has dimension `dim`, otherwise the
    /// default Gaussian bump when `fallback` is set.
    pub fn source_for(&self, dim: usize, fallback: bool) -> Result<SourceTerm> {
        match &self.source {
            Some(f) if f.dim() == dim => Ok(f.clone()),
            Some(f) if !fallback => Err(Error::config(
                "source",
                format!("experiment needs a {dim}D forcing, got {}D", f.dim()),
            )),
            _ => SourceTerm::gaussian_bump(dim, DEFAULT_SIGMA),
        }
    }

    /// Half-width covering the forcing plus the heat spread.
    pub fn half_width(&self, f: &SourceTerm) -> Result<f64> {
        if let Some(w) = self.window {
            return Ok(w);
        }
        let a = self.diffusivity_profile()?;
        let extent = f.axis_extents().into_iter().fold(0.0, f64::max);
        Ok(extent + WINDOW_SIGMAS * a.time_change(self.horizon).sqrt() + 2.0 * self.dx)
    }

    /// Grid for `f` with spacing `dx` and, in the plane, `dy`.
    pub fn grid(&self, f: &SourceTerm, dx: f64, dy: Option<f64>) -> Result<SpaceTimeGrid> {
        let half = self.half_width(f)?;
        let y = if f.dim() == 2 {
            Some((half, dy.unwrap_or(dx)))
        } else {
            None
        };
        SpaceTimeGrid::centered(self.horizon, self.time_steps()?, half, dx, y)
    }
}

fn rename(e: Error, field: &str) -> Error {
    match e {
        Error::Config { reason, .. } => Error::config(field, reason),
        Error::Domain(m) => Error::config(field, m),
        other => other,
    }
}
