//! Monte Carlo averages over paths: the jump-integral identity, its dyadic
//! approximation, and the lifted fields `E u(t, x, y + h π_t)`.

use ndarray::Array3;
use serde::Serialize;

use super::config::LiftConfig;
use super::evaluator::ShiftEvaluator;
use super::moments::{reduce_chunks, Moments};
use super::randomized::{check_planar_x_window, dyadic_sum, jump_sum};
use super::signed::SignedPath;
use crate::error::{Error, Result};
use crate::heat_core::{DiffusivityProfile, ScalarField, SourceTerm, SpaceTimeGrid};
use crate::poisson::{path_seed, sample_path_inversion, RateProfile};
use crate::quadrature::composite_gl_points;

const RHS_PANEL: f64 = 0.125;

/// Both sides of `E ∫_(0,t] g dπ = ∫₀ᵗ λ(s) [v(s, x, y + h) - v(s, x, y)] ds`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpIdentityReport {
    pub mc_lhs: f64,
    pub mc_stderr: f64,
    pub quad_rhs: f64,
    /// Monte Carlo error of the right side, which reuses the same paths.
    pub rhs_stderr: f64,
    /// Standard error of the per-path difference of the two sides.
    pub diff_stderr: f64,
    pub n_paths: usize,
    /// Fraction of paths whose final shift `h π_t` leaves the y window.
    pub exit_fraction: f64,
}

impl JumpIdentityReport {
    pub fn gap(&self) -> f64 {
        (self.mc_lhs - self.quad_rhs).abs()
    }

    /// `|lhs - rhs| <= 3 stderr + tol`.
    pub fn passes(&self, tol: f64) -> bool {
        self.gap() <= 3.0 * self.mc_stderr + tol
    }
}

fn rhs_rule(a: &DiffusivityProfile, f: &SourceTerm, rate: &RateProfile, t: f64) -> Vec<(f64, f64)> {
    let mut breaks = vec![0.0, t];
    breaks.extend(a.breakpoints(0.0, t));
    breaks.extend(f.time_breakpoints(0.0, t));
    breaks.extend(rate.breakpoints(0.0, t));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut refined = vec![0.0];
    for w in breaks.windows(2) {
        let n = ((w[1] - w[0]) / RHS_PANEL).ceil().max(1.0) as usize;
        for k in 1..=n {
            refined.push(w[0] + (w[1] - w[0]) * k as f64 / n as f64);
        }
    }
    let mut rule = Vec::new();
    composite_gl_points(&refined, 8, &mut rule);
    rule
}

fn check_time(a: &DiffusivityProfile, rate: &RateProfile, t: f64) -> Result<()> {
    if !(t >= 0.0 && t <= a.horizon() && t <= rate.horizon()) {
        return Err(Error::domain(format!("t = {t} outside the common horizon")));
    }
    Ok(())
}

#[derive(Default)]
struct IdentityAcc {
    lhs: Moments,
    rhs: Moments,
    diff: Moments,
    exits: usize,
}

/// Monte Carlo check of the jump-integral identity at `(t, x, y)`.
///
/// The left side averages the exact jump sums. The right side integrates
/// `λ(s) [u(s, x, y + h + h π_s) - u(s, x, y + h π_s)]` over a fixed
/// Gauss–Legendre rule in `s` and averages over the same paths, which is
/// the ensemble estimate of `λ [v(y + h) - v(y)]`.
#[allow(clippy::too_many_arguments)]
pub fn verify_jump_identity(
    a: &DiffusivityProfile,
    f: &SourceTerm,
    rate: &RateProfile,
    h: f64,
    config: &LiftConfig,
    t: f64,
    x: f64,
    y: f64,
) -> Result<JumpIdentityReport> {
    if f.dim() != 2 {
        return Err(Error::config("source", "the lifted identity needs a planar forcing"));
    }
    if config.n_paths == 0 {
        return Err(Error::config("n_paths", "need at least one path"));
    }
    check_time(a, rate, t)?;
    let ev = ShiftEvaluator::tabulated(a, f, h, &[x]);
    let rule = rhs_rule(a, f, rate, t);
    let lam: Vec<f64> = rule.iter().map(|&(s, w)| w * rate.value(s)).collect();
    let acc = reduce_chunks(
        config.n_paths,
        |range| {
            let mut acc = IdentityAcc::default();
            let mut pair = [0.0; 2];
            for i in range {
                let path = sample_path_inversion(rate, path_seed(config.master_seed, i as u64));
                let sp = SignedPath::up(&path);
                let lhs = if h == 0.0 { 0.0 } else { jump_sum(&ev, &sp, y, h, t) };
                let mut rhs = 0.0;
                if h != 0.0 {
                    for (q, &(s, _)) in rule.iter().enumerate() {
                        if lam[q] == 0.0 {
                            continue;
                        }
                        let y0 = y + h * path.count_at(s, false) as f64;
                        ev.u_many(&sp, s, 0, &[y0 + h, y0], &mut pair);
                        rhs += lam[q] * (pair[0] - pair[1]);
                    }
                }
                acc.lhs.push(lhs);
                acc.rhs.push(rhs);
                acc.diff.push(lhs - rhs);
                if (h * path.count_at(t, false) as f64).abs() > config.y_window {
                    acc.exits += 1;
                }
            }
            acc
        },
        |acc, part| {
            acc.lhs.merge(&part.lhs);
            acc.rhs.merge(&part.rhs);
            acc.diff.merge(&part.diff);
            acc.exits += part.exits;
        },
    )
    .expect("at least one path");
    Ok(JumpIdentityReport {
        mc_lhs: acc.lhs.mean(),
        mc_stderr: acc.lhs.stderr(),
        quad_rhs: acc.rhs.mean(),
        rhs_stderr: acc.rhs.stderr(),
        diff_stderr: acc.diff.stderr(),
        n_paths: config.n_paths,
        exit_fraction: acc.exits as f64 / config.n_paths as f64,
    })
}

/// Exact jump sums against their dyadic approximations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicReport {
    pub levels: Vec<u32>,
    pub mean_exact: f64,
    pub mean_dyadic: Vec<f64>,
    /// `|mean dyadic - mean exact|` per level.
    pub gaps: Vec<f64>,
    /// Largest per-path `|dyadic - exact|` per level.
    pub max_path_gaps: Vec<f64>,
    /// Largest `|g|` seen at a jump time.
    pub sup_g: f64,
    pub n_paths: usize,
}

impl DyadicReport {
    /// Gap at `level` relative to `sup |g|`.
    pub fn relative_gap(&self, level: u32) -> Option<f64> {
        let k = self.levels.iter().position(|&l| l == level)?;
        Some(if self.sup_g == 0.0 { 0.0 } else { self.gaps[k] / self.sup_g })
    }
}

#[allow(clippy::too_many_arguments)]
pub fn dyadic_study(
    a: &DiffusivityProfile,
    f: &SourceTerm,
    rate: &RateProfile,
    h: f64,
    config: &LiftConfig,
    t: f64,
    x: f64,
    y: f64,
    levels: &[u32],
) -> Result<DyadicReport> {
    check_time(a, rate, t)?;
    let ev = ShiftEvaluator::tabulated(a, f, h, &[x]);
    let nl = levels.len();
    type Acc = (Moments, Vec<Moments>, Vec<f64>, f64);
    let (exact, dyadic, max_gap, sup_g): Acc = reduce_chunks(
        config.n_paths,
        |range| {
            let mut exact = Moments::default();
            let mut dyadic = vec![Moments::default(); nl];
            let mut max_gap = vec![0.0f64; nl];
            let mut sup_g = 0.0f64;
            let mut pair = [0.0; 2];
            for i in range {
                let path = sample_path_inversion(rate, path_seed(config.master_seed, i as u64));
                let sp = SignedPath::up(&path);
                for (j, &s) in path.jump_times().iter().enumerate() {
                    if s > t {
                        break;
                    }
                    let y0 = y + h * j as f64;
                    ev.u_many(&sp, s, 0, &[y0 + h, y0], &mut pair);
                    sup_g = sup_g.max((pair[0] - pair[1]).abs());
                }
                let e = jump_sum(&ev, &sp, y, h, t);
                exact.push(e);
                for (k, &n) in levels.iter().enumerate() {
                    let d = dyadic_sum(&ev, &sp, y, h, t, n);
                    dyadic[k].push(d);
                    max_gap[k] = max_gap[k].max((d - e).abs());
                }
            }
            (exact, dyadic, max_gap, sup_g)
        },
        |acc, part| {
            acc.0.merge(&part.0);
            for k in 0..nl {
                acc.1[k].merge(&part.1[k]);
                acc.2[k] = acc.2[k].max(part.2[k]);
            }
            acc.3 = acc.3.max(part.3);
        },
    )
    .ok_or_else(|| Error::config("n_paths", "need at least one path"))?;
    let mean_dyadic: Vec<f64> = dyadic.iter().map(|m| m.mean()).collect();
    Ok(DyadicReport {
        levels: levels.to_vec(),
        mean_exact: exact.mean(),
        gaps: mean_dyadic.iter().map(|d| (d - exact.mean()).abs()).collect(),
        mean_dyadic,
        max_path_gaps: max_gap,
        sup_g,
        n_paths: config.n_paths,
    })
}

/// Sample mean of a lifted field with per-node standard errors.
#[derive(Debug, Clone)]
pub struct MonteCarloField {
    pub mean: ScalarField,
    pub stderr: ScalarField,
    pub n_paths: usize,
    /// Fraction of paths whose final shift leaves the configured y window.
    pub exit_fraction: f64,
}

struct FieldAcc {
    moments: Vec<Moments>,
    exits: usize,
}

fn lifted_field<P>(
    a: &DiffusivityProfile,
    f: &SourceTerm,
    h: f64,
    config: &LiftConfig,
    grid: &SpaceTimeGrid,
    make_path: P,
) -> Result<MonteCarloField>
where
    P: Fn(usize) -> SignedPath + Sync,
{
    check_planar_x_window(a, f, grid)?;
    if config.n_paths == 0 {
        return Err(Error::config("n_paths", "need at least one path"));
    }
    let ev = ShiftEvaluator::tabulated(a, f, h, grid.x_nodes());
    let (nt, nx, ny) = (grid.nt(), grid.nx(), grid.ny());
    let ys = grid.y_nodes().unwrap();
    let ts = grid.t_nodes();
    let horizon = grid.horizon();
    let acc = reduce_chunks(
        config.n_paths,
        |range| {
            let mut acc = FieldAcc {
                moments: vec![Moments::default(); nt * nx * ny],
                exits: 0,
            };
            let mut targets = vec![0.0; ny];
            let mut out = vec![0.0; ny];
            for i in range {
                let path = make_path(i);
                for (n, &t) in ts.iter().enumerate() {
                    let shift = h * path.count_at(t, false) as f64;
                    for (tg, &y) in targets.iter_mut().zip(ys) {
                        *tg = y + shift;
                    }
                    for xi in 0..nx {
                        ev.u_many(&path, t, xi, &targets, &mut out);
                        let base = (n * nx + xi) * ny;
                        for j in 0..ny {
                            acc.moments[base + j].push(out[j]);
                        }
                    }
                }
                if (h * path.count_at(horizon, false) as f64).abs() > config.y_window {
                    acc.exits += 1;
                }
            }
            acc
        },
        |acc, part| {
            for (m, p) in acc.moments.iter_mut().zip(&part.moments) {
                m.merge(p);
            }
            acc.exits += part.exits;
        },
    )
    .unwrap();
    let mean = Array3::from_shape_fn((nt, nx, ny), |(n, i, j)| acc.moments[(n * nx + i) * ny + j].mean());
    let se = Array3::from_shape_fn((nt, nx, ny), |(n, i, j)| acc.moments[(n * nx + i) * ny + j].stderr());
    Ok(MonteCarloField {
        mean: ScalarField::new(grid.clone(), mean)?,
        stderr: ScalarField::new(grid.clone(), se)?,
        n_paths: config.n_paths,
        exit_fraction: acc.exits as f64 / config.n_paths as f64,
    })
}

/// `v(t, x, y) = E u(t, x, y + h π_t)` over `config.n_paths` seeded paths.
pub fn lift_expectation_v(
    a: &DiffusivityProfile,
    f: &SourceTerm,
    rate: &RateProfile,
    h: f64,
    config: &LiftConfig,
    grid: &SpaceTimeGrid,
) -> Result<MonteCarloField> {
    lifted_field(a, f, h, config, grid, |i| {
        SignedPath::up(&sample_path_inversion(rate, path_seed(config.master_seed, i as u64)))
    })
}

/// `w(t, x, y) = E v(t, x, y - h π_t)` with `v` the lifted solution driven
/// by `f(t, x, y + h π_t)`. Both expectations together amount to one
/// average over the signed path `D = π' - π` of two independent processes:
/// `w(t, x, y) = E u_D(t, x, y + h D_t)`.
pub fn lift_expectation_w(
    a: &DiffusivityProfile,
    f: &SourceTerm,
    rate: &RateProfile,
    h: f64,
    config: &LiftConfig,
    grid: &SpaceTimeGrid,
) -> Result<MonteCarloField> {
    lifted_field(a, f, h, config, grid, |i| {
        let outer = sample_path_inversion(rate, path_seed(config.master_seed, 2 * i as u64));
        let inner = sample_path_inversion(rate, path_seed(config.master_seed, 2 * i as u64 + 1));
        SignedPath::difference(&inner, &outer)
    })
}
