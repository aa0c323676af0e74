//! One realization of the randomly shifted problem
//! `∂_t u = a(t) u_xx + f(t, x, y - h π_t)` and its jump integral.

use ndarray::Array3;
use rayon::prelude::*;

use super::evaluator::ShiftEvaluator;
use super::signed::SignedPath;
use crate::error::{Error, Result};
use crate::heat_core::duhamel::WINDOW_SIGMAS;
use crate::heat_core::{DiffusivityProfile, ScalarField, SourceTerm, SpaceTimeGrid};
use crate::poisson::PoissonPath;

/// The randomized solution for one path, tabulated on a grid whose y
/// spacing equals the jump size. Off-grid values are available through
/// [`RandomizedSolution::u_at`], which integrates afresh.
#[derive(Debug, Clone)]
pub struct RandomizedSolution {
    path: PoissonPath,
    h: f64,
    a: DiffusivityProfile,
    f: SourceTerm,
    u_on_lattice: ScalarField,
}

impl RandomizedSolution {
    pub fn path(&self) -> &PoissonPath {
        &self.path
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn field(&self) -> &ScalarField {
        &self.u_on_lattice
    }

    /// `u(s, x, y)` by direct quadrature.
    pub fn u_at(&self, s: f64, x: f64, y: f64) -> f64 {
        let ev = ShiftEvaluator::direct(&self.a, &self.f, self.h, &[x]);
        ev.u(&SignedPath::up(&self.path), s, 0, y)
    }
}

pub(crate) fn check_planar_x_window(
    a: &DiffusivityProfile,
    f: &SourceTerm,
    grid: &SpaceTimeGrid,
) -> Result<()> {
    if f.dim() != 2 || grid.dim() != 2 {
        return Err(Error::Shape("need a planar forcing and a grid with y nodes".into()));
    }
    if grid.horizon() > a.horizon() * (1.0 + 1e-12) {
        return Err(Error::domain("grid horizon exceeds the diffusivity horizon"));
    }
    let need = f.axis_extents()[0] + WINDOW_SIGMAS * a.time_change(grid.horizon()).sqrt();
    if grid.x_half_width() < need {
        return Err(Error::config(
            "grid",
            format!(
                "x half-width {:.4} is below support plus diffusion radius {need:.4}",
                grid.x_half_width()
            ),
        ));
    }
    Ok(())
}

/// Solves the shifted 1D problem for every y node of the grid.
pub fn solve_randomized_1d(
    a: &DiffusivityProfile,
    f: &SourceTerm,
    path: &PoissonPath,
    h: f64,
    grid: &SpaceTimeGrid,
) -> Result<RandomizedSolution> {
    check_planar_x_window(a, f, grid)?;
    let dy = grid.dy().expect("planar grid");
    if h != 0.0 && (dy - h.abs()).abs() > 1e-12 * h.abs().max(1.0) {
        return Err(Error::config(
            "grid.dy",
            format!("y spacing {dy} must equal the jump size {h}"),
        ));
    }
    let ev = ShiftEvaluator::tabulated(a, f, h, grid.x_nodes());
    let signed = SignedPath::up(path);
    let ys = grid.y_nodes().unwrap();
    let mut values = Array3::zeros((grid.nt(), grid.nx(), grid.ny()));
    for (n, &t) in grid.t_nodes().iter().enumerate().skip(1) {
        let rows: Vec<Vec<f64>> = (0..grid.nx())
            .into_par_iter()
            .map(|xi| {
                let mut out = vec![0.0; ys.len()];
                ev.u_many(&signed, t, xi, ys, &mut out);
                out
            })
            .collect();
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                values[[n, i, j]] = v;
            }
        }
    }
    Ok(RandomizedSolution {
        path: path.clone(),
        h,
        a: a.clone(),
        f: f.clone(),
        u_on_lattice: ScalarField::new(grid.clone(), values)?,
    })
}

/// `g(s) = u(s, x, y + h + h D_{s-}) - u(s, x, y + h D_{s-})` with the
/// pre-jump count `base = D_{s-}`.
fn jump_term(ev: &ShiftEvaluator, path: &SignedPath, s: f64, y: f64, h: f64, base: i64) -> f64 {
    let y0 = y + h * base as f64;
    let mut out = [0.0; 2];
    ev.u_many(path, s, 0, &[y0 + h, y0], &mut out);
    out[0] - out[1]
}

/// Exact `∫_(0,t] g dD`: the sum of `sign * g(s_j)` over jumps `s_j <= t`.
pub(crate) fn jump_sum(ev: &ShiftEvaluator, path: &SignedPath, y: f64, h: f64, t: f64) -> f64 {
    let mut base = 0i64;
    let mut total = 0.0;
    for &(s, d) in path.jumps() {
        if s > t {
            break;
        }
        total += d as f64 * jump_term(ev, path, s, y, h, base);
        base += d as i64;
    }
    total
}

/// The frozen-grid sum `Σ_k g(t_k) (D_{t_{k+1}} - D_{t_k})` with
/// `t_k = k 2⁻ⁿ t`, where `g(t_k)` uses `D_{t_k -}`.
pub(crate) fn dyadic_sum(ev: &ShiftEvaluator, path: &SignedPath, y: f64, h: f64, t: f64, n: u32) -> f64 {
    let cells = 1u64 << n;
    let width = t / cells as f64;
    let mut total = 0.0;
    let mut idx = 0;
    let jumps = path.jumps();
    while idx < jumps.len() && jumps[idx].0 <= t {
        // cell k holds jumps in (k w, (k+1) w]
        let k = ((jumps[idx].0 / width).ceil() as u64).max(1) - 1;
        let (lo, hi) = (k as f64 * width, (k + 1) as f64 * width);
        let mut increment = 0i64;
        let start = idx;
        while idx < jumps.len() && jumps[idx].0 <= hi.min(t) {
            increment += jumps[idx].1 as i64;
            idx += 1;
        }
        if idx == start {
            // rounding put the jump just past `hi`; take it alone
            increment = jumps[idx].1 as i64;
            idx += 1;
        }
        if increment != 0 && lo > 0.0 {
            let base = path.count_at(lo, true);
            total += increment as f64 * jump_term(ev, path, lo, y, h, base);
        }
    }
    total
}

/// `∫_(0,T] g dπ` for the realization, `T` being the grid horizon.
pub fn jump_integral(sol: &RandomizedSolution, h: f64, x: f64, y: f64) -> f64 {
    jump_integral_until(sol, h, x, y, sol.field().grid().horizon())
}

/// `∫_(0,t] g dπ` for the realization.
pub fn jump_integral_until(sol: &RandomizedSolution, h: f64, x: f64, y: f64, t: f64) -> f64 {
    let ev = ShiftEvaluator::direct(&sol.a, &sol.f, sol.h, &[x]);
    jump_sum(&ev, &SignedPath::up(&sol.path), y, h, t)
}

/// The dyadic approximation of [`jump_integral_until`] at level `n`.
pub fn dyadic_jump_integral(sol: &RandomizedSolution, h: f64, x: f64, y: f64, t: f64, n: u32) -> f64 {
    let ev = ShiftEvaluator::direct(&sol.a, &sol.f, sol.h, &[x]);
    dyadic_sum(&ev, &SignedPath::up(&sol.path), y, h, t, n)
}
