//! Forcing terms `f(t, x)` and `f(t, x, y)`.
//!
//! A forcing is a finite sum of components `φ(t) g(z)`: a closed-form time
//! factor times a smooth, effectively compactly supported spatial profile.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::law::TimeLaw;

/// Profile values below this fraction of the peak count as zero.
pub const NEGLIGIBLE: f64 = 1e-12;

/// `sqrt(2 ln(1/NEGLIGIBLE))`: Gaussian tails are negligible beyond this many widths.
fn gaussian_reach() -> f64 {
    (2.0 * (1.0 / NEGLIGIBLE).ln()).sqrt()
}

/// `C^∞` step rising from 0 at `s <= 0` to 1 at `s >= 1`.
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / s).exp();
    let b = (-1.0 / (1.0 - s)).exp();
    a / (a + b)
}

/// Smooth cutoff: 1 on `|x| <= plateau`, 0 beyond `plateau + taper`.
pub fn cutoff(x: f64, plateau: f64, taper: f64) -> f64 {
    1.0 - smooth_step((x.abs() - plateau) / taper)
}

/// One-dimensional spatial profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Profile1d {
    /// `amplitude * exp(-(x - center)^2 / (2 sigma^2))`
    Gaussian {
        center: f64,
        sigma: f64,
        amplitude: f64,
    },
    /// `sin(x) * cutoff(x)`
    SinCutoff { plateau: f64, taper: f64 },
    /// `(intercept + slope * x) * cutoff(x)`
    AffineCutoff {
        intercept: f64,
        slope: f64,
        plateau: f64,
        taper: f64,
    },
}

impl Profile1d {
    pub fn gaussian(sigma: f64) -> Self {
        Profile1d::Gaussian {
            center: 0.0,
            sigma,
            amplitude: 1.0,
        }
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        let ok = match self {
            Profile1d::Gaussian {
                center,
                sigma,
                amplitude,
            } => center.is_finite() && amplitude.is_finite() && *sigma > 0.0,
            Profile1d::SinCutoff { plateau, taper } => *plateau >= 0.0 && *taper > 0.0,
            Profile1d::AffineCutoff {
                intercept,
                slope,
                plateau,
                taper,
            } => intercept.is_finite() && slope.is_finite() && *plateau >= 0.0 && *taper > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(field, format!("invalid profile {self:?}")))
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Profile1d::Gaussian {
                center,
                sigma,
                amplitude,
            } => {
                let d = (x - center) / sigma;
                amplitude * (-0.5 * d * d).exp()
            }
            Profile1d::SinCutoff { plateau, taper } => {
                if x.abs() >= plateau + taper {
                    0.0
                } else {
                    x.sin() * cutoff(x, plateau, taper)
                }
            }
            Profile1d::AffineCutoff {
                intercept,
                slope,
                plateau,
                taper,
            } => {
                if x.abs() >= plateau + taper {
                    0.0
                } else {
                    (intercept + slope * x) * cutoff(x, plateau, taper)
                }
            }
        }
    }

    /// Interval outside of which the profile is negligible.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Profile1d::Gaussian {
                center,
                sigma,
                amplitude,
            } => {
                let r = if amplitude == 0.0 { 0.0 } else { sigma * gaussian_reach() };
                (center - r, center + r)
            }
            Profile1d::SinCutoff { plateau, taper }
            | Profile1d::AffineCutoff { plateau, taper, .. } => {
                (-(plateau + taper), plateau + taper)
            }
        }
    }

    /// Length scale on which the profile varies.
    pub fn feature(&self) -> f64 {
        match *self {
            Profile1d::Gaussian { sigma, .. } => sigma,
            Profile1d::SinCutoff { taper, .. } | Profile1d::AffineCutoff { taper, .. } => {
                (taper / 4.0).min(1.0)
            }
        }
    }

    pub fn sup(&self) -> f64 {
        match *self {
            Profile1d::Gaussian { amplitude, .. } => amplitude.abs(),
            Profile1d::SinCutoff { .. } => 1.0,
            Profile1d::AffineCutoff {
                intercept,
                slope,
                plateau,
                taper,
            } => {
                let r = plateau + taper;
                (intercept - slope * r).abs().max((intercept + slope * r).abs())
            }
        }
    }
}

/// Spatial part of a forcing component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Spatial {
    Line { x: Profile1d },
    /// `gx(x) * gy(y)`
    Product { x: Profile1d, y: Profile1d },
    /// `gx(u) * gy(v)` with `(u, v)` the coordinates of `z` in the frame
    /// rotated by `angle` (radians, counter-clockwise).
    Rotated {
        x: Profile1d,
        y: Profile1d,
        angle: f64,
    },
}

impl Spatial {
    pub fn dim(&self) -> usize {
        match self {
            Spatial::Line { .. } => 1,
            _ => 2,
        }
    }

    fn profiles(&self) -> Vec<&Profile1d> {
        match self {
            Spatial::Line { x } => vec![x],
            Spatial::Product { x, y } | Spatial::Rotated { x, y, .. } => vec![x, y],
        }
    }

    #[inline]
    pub fn eval(&self, z: &[f64]) -> f64 {
        match self {
            Spatial::Line { x } => x.eval(z[0]),
            Spatial::Product { x, y } => {
                let gx = x.eval(z[0]);
                if gx == 0.0 {
                    0.0
                } else {
                    gx * y.eval(z[1])
                }
            }
            Spatial::Rotated { x, y, angle } => {
                let (s, c) = angle.sin_cos();
                let u = c * z[0] + s * z[1];
                let v = -s * z[0] + c * z[1];
                x.eval(u) * y.eval(v)
            }
        }
    }

    /// Per-axis bounding box `[(lo, hi); dim]` of the support.
    pub fn support_box(&self) -> Vec<(f64, f64)> {
        match self {
            Spatial::Line { x } => vec![x.support()],
            Spatial::Product { x, y } => vec![x.support(), y.support()],
            Spatial::Rotated { x, y, angle } => {
                let (sx, sy) = (x.support(), y.support());
                let (s, c) = angle.sin_cos();
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for u in [sx.0, sx.1] {
                    for v in [sy.0, sy.1] {
                        // z = u * l1 + v * l2
                        let p = [c * u - s * v, s * u + c * v];
                        for k in 0..2 {
                            lo[k] = lo[k].min(p[k]);
                            hi[k] = hi[k].max(p[k]);
                        }
                    }
                }
                vec![(lo[0], hi[0]), (lo[1], hi[1])]
            }
        }
    }

    pub fn feature(&self) -> f64 {
        self.profiles()
            .iter()
            .map(|p| p.feature())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn sup(&self) -> f64 {
        self.profiles().iter().map(|p| p.sup()).product()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceComponent {
    pub time: TimeLaw,
    pub space: Spatial,
}

/// A forcing `f(t, z) = Σ_j φ_j(t) g_j(z)` in one or two space dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SourceSpec", into = "SourceSpec")]
pub struct SourceTerm {
    dim: usize,
    components: Vec<SourceComponent>,
    holder_alpha: f64,
    holder_seminorm_analytic: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SourceSpec {
    components: Vec<SourceComponent>,
    #[serde(default = "default_alpha")]
    holder_alpha: f64,
    #[serde(default)]
    holder_seminorm_analytic: Option<f64>,
}

fn default_alpha() -> f64 {
    0.5
}

impl TryFrom<SourceSpec> for SourceTerm {
    type Error = Error;
    fn try_from(spec: SourceSpec) -> Result<Self> {
        let mut s = SourceTerm::new(spec.components)?;
        s = s.with_holder_alpha(spec.holder_alpha)?;
        s.holder_seminorm_analytic = spec.holder_seminorm_analytic;
        Ok(s)
    }
}

impl From<SourceTerm> for SourceSpec {
    fn from(s: SourceTerm) -> Self {
        SourceSpec {
            components: s.components,
            holder_alpha: s.holder_alpha,
            holder_seminorm_analytic: s.holder_seminorm_analytic,
        }
    }
}

impl SourceTerm {
    pub fn new(components: Vec<SourceComponent>) -> Result<Self> {
        let dim = match components.first() {
            Some(c) => c.space.dim(),
            None => {
                return Err(Error::config(
                    "source",
                    "a forcing needs at least one component (use zero amplitude for f = 0)",
                ))
            }
        };
        for (k, c) in components.iter().enumerate() {
            let field = format!("source.components[{k}]");
            if c.space.dim() != dim {
                return Err(Error::config(field, "mixed spatial dimensions"));
            }
            c.time.validate(&field)?;
            for p in c.space.profiles() {
                p.validate(&field)?;
            }
        }
        Ok(SourceTerm {
            dim,
            components,
            holder_alpha: 0.5,
            holder_seminorm_analytic: None,
        })
    }

    pub fn single(time: TimeLaw, space: Spatial) -> Result<Self> {
        Self::new(vec![SourceComponent { time, space }])
    }

    /// Time-independent forcing `g(z)`.
    pub fn stationary(space: Spatial) -> Result<Self> {
        Self::single(TimeLaw::constant(1.0), space)
    }

    /// `f ≡ 0` in the given dimension.
    pub fn zero(dim: usize) -> Self {
        let p = Profile1d::Gaussian {
            center: 0.0,
            sigma: 1.0,
            amplitude: 0.0,
        };
        let space = if dim == 1 {
            Spatial::Line { x: p }
        } else {
            Spatial::Product { x: p.clone(), y: p }
        };
        SourceTerm::stationary(space).expect("zero forcing is valid")
    }

    /// Radial Gaussian bump `exp(-|z|^2 / (2 sigma^2))` in `dim` dimensions.
    pub fn gaussian_bump(dim: usize, sigma: f64) -> Result<Self> {
        let p = Profile1d::gaussian(sigma);
        let space = if dim == 1 {
            Spatial::Line { x: p }
        } else {
            Spatial::Product { x: p.clone(), y: p }
        };
        Self::stationary(space)
    }

    pub fn with_holder_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::config("holder_alpha", "alpha must lie in (0, 1)"));
        }
        self.holder_alpha = alpha;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[SourceComponent] {
        &self.components
    }

    pub fn holder_alpha(&self) -> f64 {
        self.holder_alpha
    }

    pub fn holder_seminorm_analytic(&self) -> Option<f64> {
        self.holder_seminorm_analytic
    }

    #[inline]
    pub fn eval(&self, t: f64, z: &[f64]) -> f64 {
        self.components
            .iter()
            .map(|c| c.time.value(t) * c.space.eval(z))
            .sum()
    }

    /// Upper bound on `|f|` over `[0, horizon] × space`.
    pub fn sup_bound(&self, horizon: f64) -> f64 {
        self.components
            .iter()
            .map(|c| {
                let (lo, hi) = c.time.range(horizon);
                lo.abs().max(hi.abs()) * c.space.sup()
            })
            .sum()
    }

    /// Largest per-axis extent of the support, measured from the origin.
    pub fn support_radius(&self) -> f64 {
        self.axis_extents().into_iter().fold(0.0, f64::max)
    }

    /// Per-axis `max(|lo|, |hi|)` over all components.
    pub fn axis_extents(&self) -> Vec<f64> {
        let mut ext = vec![0.0; self.dim];
        for c in &self.components {
            for (k, (lo, hi)) in c.space.support_box().into_iter().enumerate() {
                ext[k] = f64::max(ext[k], lo.abs().max(hi.abs()));
            }
        }
        ext
    }

    pub fn feature(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.space.feature())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn time_scale(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.time.time_scale())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn time_breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .components
            .iter()
            .flat_map(|c| c.time.breakpoints(lo, hi))
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// `c * f`.
    pub fn scaled(&self, c: f64) -> SourceTerm {
        let mut out = self.clone();
        for comp in &mut out.components {
            comp.time = comp.time.scaled(c);
        }
        out
    }

    /// `self + other`.
    pub fn plus(&self, other: &SourceTerm) -> Result<SourceTerm> {
        let mut comps = self.components.clone();
        comps.extend(other.components.iter().cloned());
        let mut s = SourceTerm::new(comps)?;
        s.holder_alpha = self.holder_alpha;
        Ok(s)
    }

    /// `g(t, z) = f(t, S z)` for the rotation `S` sending `e1` to the unit
    /// vector at `angle`.
    pub fn rotated(&self, angle: f64) -> Result<SourceTerm> {
        if self.dim != 2 {
            return Err(Error::config("source", "only planar forcings can be rotated"));
        }
        let mut out = self.clone();
        for comp in &mut out.components {
            comp.space = match &comp.space {
                Spatial::Product { x, y } => Spatial::Rotated {
                    x: x.clone(),
                    y: y.clone(),
                    angle: -angle,
                },
                Spatial::Rotated { x, y, angle: a } => Spatial::Rotated {
                    x: x.clone(),
                    y: y.clone(),
                    angle: a - angle,
                },
                Spatial::Line { .. } => unreachable!(),
            };
        }
        Ok(out)
    }
}
