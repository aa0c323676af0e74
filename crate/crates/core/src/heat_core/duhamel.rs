//! Duhamel solvers built on the time-changed heat kernel.
//!
//! With `A(t) = ∫₀ᵗ a`, the solution of `∂_t u = a(t) Δu + f`, `u(0) = 0` is
//! `u(t) = ∫₀ᵗ G(A(t) - A(s)) * f(s) ds`. The outer `s` integral uses
//! composite Gauss–Legendre panels graded toward `s = t`; its nodes never
//! touch `s = t`, so the kernel is never sampled at zero heat time.

use ndarray::{Array2, Array3, Axis};
use rayon::prelude::*;

use super::diffusivity::DiffusivityProfile;
use super::grid::{ScalarField, SpaceTimeGrid};
use super::kernel::{smooth_1d, smooth_grid_2d};
use super::source::{SourceTerm, Spatial};
use crate::error::{Error, Result};
use crate::quadrature::composite_gl_points;

const TIME_ORDER: usize = 8;
const MAX_PANEL: f64 = 0.5;
/// Window margin in units of the diffusion length `sqrt(A(T))`.
pub const WINDOW_SIGMAS: f64 = 6.0;

/// Quadrature nodes `(s, w)` for `∫_lo^hi ds`, graded toward the evaluation
/// time `t_eval >= hi` and split at discontinuities of `a` and `f`.
pub(crate) fn time_rule(
    a: &DiffusivityProfile,
    f: &SourceTerm,
    lo: f64,
    hi: f64,
    t_eval: f64,
    extra_breaks: &[f64],
) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if hi <= lo {
        return out;
    }
    let d0 = f.feature().powi(2) / (4.0 * a.a_max());
    let mut breaks = vec![lo, hi];
    breaks.extend(a.breakpoints(lo, hi));
    breaks.extend(f.time_breakpoints(lo, hi));
    breaks.extend(extra_breaks.iter().copied().filter(|&b| b > lo && b < hi));
    let mut d = d0;
    while t_eval - d > lo {
        if t_eval - d < hi {
            breaks.push(t_eval - d);
        }
        d *= 2.0;
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let cap = MAX_PANEL.min(f.time_scale());
    let mut refined = vec![breaks[0]];
    for w in breaks.windows(2) {
        let n = ((w[1] - w[0]) / cap).ceil().max(1.0) as usize;
        for k in 1..=n {
            refined.push(w[0] + (w[1] - w[0]) * k as f64 / n as f64);
        }
    }
    composite_gl_points(&refined, TIME_ORDER, &mut out);
    out
}

/// Checks the solver window against `support + 6 sqrt(A(T))` on every axis.
pub(crate) fn check_window(
    a: &DiffusivityProfile,
    f: &SourceTerm,
    grid: &SpaceTimeGrid,
) -> Result<()> {
    if grid.horizon() > a.horizon() * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "grid horizon {} exceeds the diffusivity horizon {}",
            grid.horizon(),
            a.horizon()
        )));
    }
    let spread = WINDOW_SIGMAS * a.time_change(grid.horizon()).sqrt();
    let ext = f.axis_extents();
    let halves = [Some(grid.x_half_width()), grid.y_half_width()];
    for (k, e) in ext.iter().enumerate() {
        let need = e + spread;
        let have = halves[k].unwrap_or(0.0);
        if have < need {
            return Err(Error::config(
                "grid",
                format!(
                    "axis {k} half-width {have:.4} is below support plus diffusion radius {need:.4}"
                ),
            ));
        }
    }
    Ok(())
}

fn check_dims(f: &SourceTerm, grid: &SpaceTimeGrid, dim: usize) -> Result<()> {
    if f.dim() != dim {
        return Err(Error::config("source", format!("expected a {dim}D forcing, got {}D", f.dim())));
    }
    if grid.dim() != dim {
        return Err(Error::Shape(format!("expected a {dim}D grid, got {}D", grid.dim())));
    }
    Ok(())
}

/// `u(t, x)` for a 1D forcing at a single point.
pub fn duhamel_1d_point(a: &DiffusivityProfile, f: &SourceTerm, t: f64, x: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let rule = time_rule(a, f, 0.0, t, t, &[]);
    let at = a.time_change(t);
    let mut acc = 0.0;
    for comp in f.components() {
        let Spatial::Line { x: p } = &comp.space else {
            continue;
        };
        for &(s, w) in &rule {
            let phi = comp.time.value(s);
            if phi != 0.0 {
                acc += w * phi * smooth_1d(p, at - a.time_change(s), x);
            }
        }
    }
    acc
}

/// Solves `∂_t u = a(t) u_xx + f`, `u(0) = 0`, on the grid nodes.
pub fn solve_heat_1d(
    a: &DiffusivityProfile,
    f: &SourceTerm,
    grid: &SpaceTimeGrid,
) -> Result<ScalarField> {
    check_dims(f, grid, 1)?;
    check_window(a, f, grid)?;
    let xs = grid.x_nodes();
    let mut values = Array3::zeros((grid.nt(), grid.nx(), 1));
    for (n, &t) in grid.t_nodes().iter().enumerate().skip(1) {
        let rule = time_rule(a, f, 0.0, t, t, &[]);
        let at = a.time_change(t);
        let taus: Vec<f64> = rule.iter().map(|&(s, _)| at - a.time_change(s)).collect();
        let row: Vec<f64> = xs
            .par_iter()
            .map(|&x| {
                let mut acc = 0.0;
                for comp in f.components() {
                    let Spatial::Line { x: p } = &comp.space else {
                        unreachable!()
                    };
                    for (q, &(s, w)) in rule.iter().enumerate() {
                        let phi = comp.time.value(s);
                        if phi != 0.0 {
                            acc += w * phi * smooth_1d(p, taus[q], x);
                        }
                    }
                }
                acc
            })
            .collect();
        for (i, v) in row.into_iter().enumerate() {
            values[[n, i, 0]] = v;
        }
    }
    ScalarField::new(grid.clone(), values)
}

/// Solves `∂_t v = a(t) Δv + f` in the plane, `v(0) = 0`, on the grid nodes.
pub fn solve_heat_2d_reference(
    a: &DiffusivityProfile,
    f: &SourceTerm,
    grid: &SpaceTimeGrid,
) -> Result<ScalarField> {
    check_dims(f, grid, 2)?;
    check_window(a, f, grid)?;
    let xs = grid.x_nodes();
    let ys = grid.y_nodes().expect("2D grid");
    let mut values = Array3::zeros((grid.nt(), grid.nx(), grid.ny()));
    for (n, &t) in grid.t_nodes().iter().enumerate().skip(1) {
        let slice = duhamel_2d_slice(a, f, t, xs, ys);
        values.index_axis_mut(Axis(0), n).assign(&slice);
    }
    ScalarField::new(grid.clone(), values)
}

/// `v(t, ·)` on the tensor grid `xs × ys`.
pub fn duhamel_2d_slice(
    a: &DiffusivityProfile,
    f: &SourceTerm,
    t: f64,
    xs: &[f64],
    ys: &[f64],
) -> Array2<f64> {
    let mut out = Array2::zeros((xs.len(), ys.len()));
    if t <= 0.0 {
        return out;
    }
    let rule = time_rule(a, f, 0.0, t, t, &[]);
    let at = a.time_change(t);
    let taus: Vec<f64> = rule.iter().map(|&(s, _)| at - a.time_change(s)).collect();
    for comp in f.components() {
        let weights: Vec<f64> = rule
            .iter()
            .map(|&(s, w)| w * comp.time.value(s))
            .collect();
        match &comp.space {
            Spatial::Product { x: px, y: py } => {
                // Σ_q w_q φ(s_q) gx_q ⊗ gy_q as one matrix product
                let gx = Array2::from_shape_fn((rule.len(), xs.len()), |(q, i)| {
                    weights[q] * smooth_1d(px, taus[q], xs[i])
                });
                let rows: Vec<Vec<f64>> = taus
                    .par_iter()
                    .map(|&tau| ys.iter().map(|&y| smooth_1d(py, tau, y)).collect())
                    .collect();
                let gy = Array2::from_shape_fn((rule.len(), ys.len()), |(q, j)| rows[q][j]);
                out += &gx.t().dot(&gy);
            }
            space @ Spatial::Rotated { .. } => {
                let parts: Vec<Array2<f64>> = taus
                    .par_iter()
                    .zip(weights.par_iter())
                    .filter(|(_, &w)| w != 0.0)
                    .map(|(&tau, &w)| smooth_grid_2d(space, tau, xs, ys) * w)
                    .collect();
                for p in parts {
                    out += &p;
                }
            }
            Spatial::Line { .. } => unreachable!("planar forcing checked by caller"),
        }
    }
    out
}
