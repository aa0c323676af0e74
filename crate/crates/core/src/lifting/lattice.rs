//! Deterministic lattice equations in `y`, continuous in `x`:
//!
//! * forward: `v_t = a v_xx + λ [v(y + h) - v(y)] + f`
//! * centered: `w_t = a w_xx + λ [w(y + h) - 2 w(y) + w(y - h)] + f`
//!
//! The state is kept as x-Fourier coefficients on the periodic extension
//! of the grid window. Each step applies half a coupling step (Heun), a
//! diffusion step with the exact factor `exp(-k² ΔA)` and the forcing
//! integrated against it at the midpoint, then the second coupling half.

use ndarray::Array3;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use super::randomized::check_planar_x_window;
use crate::error::{Error, Result};
use crate::heat_core::source::NEGLIGIBLE;
use crate::heat_core::{DiffusivityProfile, ScalarField, SourceTerm, SpaceTimeGrid};
use crate::poisson::RateProfile;

/// Coupling steps satisfy `λ_max dt <= COUPLING_CFL`.
pub const COUPLING_CFL: f64 = 0.1;
/// Largest step regardless of the rate.
pub const MAX_STEP: f64 = 1.0 / 128.0;
/// Largest x spacing, relative to the forcing's feature width, that the
/// x-Fourier representation accepts.
pub const MAX_DX_PER_FEATURE: f64 = 0.5;
/// Lattice margin in units of the jump spread `sqrt(λ_max T) |h|`.
pub const MARGIN_SPREADS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stencil {
    Forward,
    Centered,
}

struct Lattice {
    rows: Vec<f64>,
    /// Lattice row of each grid y node.
    grid_rows: Vec<usize>,
    /// Neighbour offset in rows; 0 when uncoupled.
    step: isize,
}

fn y_support(f: &SourceTerm) -> (f64, f64) {
    f.components().iter().fold((0.0, 0.0), |(lo, hi), c| {
        let b = c.space.support_box()[1];
        (f64::min(lo, b.0), f64::max(hi, b.1))
    })
}

fn build_lattice(
    f: &SourceTerm,
    rate: &RateProfile,
    h: f64,
    grid: &SpaceTimeGrid,
    stencil: Stencil,
) -> Result<Lattice> {
    let ys = grid.y_nodes().unwrap();
    if h == 0.0 || rate.is_zero() {
        return Ok(Lattice {
            rows: ys.to_vec(),
            grid_rows: (0..ys.len()).collect(),
            step: 0,
        });
    }
    let hh = h.abs();
    let mut ks = Vec::with_capacity(ys.len());
    for &y in ys {
        let k = y / hh;
        if (k - k.round()).abs() > 1e-9 * k.abs().max(1.0) {
            return Err(Error::config(
                "grid.dy",
                format!("y node {y} is not a multiple of the jump size {hh}"),
            ));
        }
        ks.push(k.round() as i64);
    }
    let margin = MARGIN_SPREADS * (rate.lambda_max() * grid.horizon()).sqrt() * hh;
    let (s_lo, s_hi) = y_support(f);
    let (g_lo, g_hi) = (ys[0], ys[ys.len() - 1]);
    let up = ((g_hi.max(s_hi) + margin) / hh).ceil() as i64;
    let down = ((g_lo.min(s_lo) - margin) / hh).floor() as i64;
    let (k_lo, k_hi, top, bottom) = match (stencil, h > 0.0) {
        (Stencil::Forward, true) => (ks[0], up, true, false),
        (Stencil::Forward, false) => (down, ks[ks.len() - 1], false, true),
        (Stencil::Centered, _) => (down, up, true, true),
    };
    let rows: Vec<f64> = (k_lo..=k_hi).map(|k| k as f64 * hh).collect();
    // the forcing must vanish on every row within `margin` of a coupled edge
    let sup = f.sup_bound(grid.horizon());
    let edge_rows = rows.iter().filter(|&&y| {
        (top && y > rows[rows.len() - 1] - margin) || (bottom && y < rows[0] + margin)
    });
    for &y in edge_rows {
        for &x in grid.x_nodes() {
            let peak: f64 = f
                .components()
                .iter()
                .map(|c| {
                    let (lo, hi) = c.time.range(grid.horizon());
                    lo.abs().max(hi.abs()) * c.space.eval(&[x, y]).abs()
                })
                .sum();
            if peak > NEGLIGIBLE * sup {
                return Err(Error::BoundaryContamination(format!(
                    "forcing is {peak:e} at y = {y}, within {margin:.3} of the lattice edge"
                )));
            }
        }
    }
    Ok(Lattice {
        grid_rows: ks.iter().map(|&k| (k - k_lo) as usize).collect(),
        rows,
        step: if h > 0.0 { 1 } else { -1 },
    })
}

/// Step boundaries: output nodes, coefficient breakpoints, and uniform
/// subdivision to at most `dt_max`.
fn step_boundaries(
    a: &DiffusivityProfile,
    f: &SourceTerm,
    rate: &RateProfile,
    t_nodes: &[f64],
    dt_max: f64,
) -> Vec<Vec<(f64, f64)>> {
    t_nodes
        .windows(2)
        .map(|w| {
            let mut b = vec![w[0], w[1]];
            b.extend(a.breakpoints(w[0], w[1]));
            b.extend(f.time_breakpoints(w[0], w[1]));
            b.extend(rate.breakpoints(w[0], w[1]));
            b.sort_by(f64::total_cmp);
            b.dedup();
            let mut steps = Vec::new();
            for p in b.windows(2) {
                let n = ((p[1] - p[0]) / dt_max).ceil().max(1.0) as usize;
                for k in 0..n {
                    let t0 = p[0] + (p[1] - p[0]) * k as f64 / n as f64;
                    let t1 = if k + 1 == n { p[1] } else { p[0] + (p[1] - p[0]) * (k + 1) as f64 / n as f64 };
                    steps.push((t0, t1));
                }
            }
            steps
        })
        .collect()
}

/// One Heun step of `dv/dt = λ(t) L v` on a single frequency column.
fn couple(col: &mut [Complex64], stencil: Stencil, step: isize, l0: f64, l1: f64, dt: f64, scratch: &mut [Complex64]) {
    let n = col.len() as isize;
    let apply = |v: &[Complex64], k: isize| -> Complex64 {
        let at = |j: isize| if (0..n).contains(&j) { v[j as usize] } else { Complex64::new(0.0, 0.0) };
        match stencil {
            Stencil::Forward => at(k + step) - v[k as usize],
            Stencil::Centered => at(k + 1) - 2.0 * v[k as usize] + at(k - 1),
        }
    };
    let (k1, pred) = scratch.split_at_mut(col.len());
    for k in 0..n {
        k1[k as usize] = apply(col, k) * l0;
    }
    for k in 0..col.len() {
        pred[k] = col[k] + k1[k] * dt;
    }
    for k in 0..n {
        let k2 = apply(pred, k) * l1;
        col[k as usize] += (k1[k as usize] + k2) * (0.5 * dt);
    }
}

fn solve_lattice(
    a: &DiffusivityProfile,
    f: &SourceTerm,
    rate: &RateProfile,
    h: f64,
    grid: &SpaceTimeGrid,
    stencil: Stencil,
) -> Result<ScalarField> {
    check_planar_x_window(a, f, grid)?;
    if grid.dx() > MAX_DX_PER_FEATURE * f.feature() {
        return Err(Error::config(
            "grid.dx",
            format!(
                "x spacing {} cannot resolve forcing width {}; need dx <= {} * width",
                grid.dx(),
                f.feature(),
                MAX_DX_PER_FEATURE
            ),
        ));
    }
    if rate.horizon() < grid.horizon() * (1.0 - 1e-12) {
        return Err(Error::domain("rate horizon is shorter than the grid horizon"));
    }
    let lat = build_lattice(f, rate, h, grid, stencil)?;
    let xs = grid.x_nodes();
    let nx = xs.len();
    let nr = lat.rows.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(nx);
    let inv = planner.plan_fft_inverse(nx);

    // x-Fourier coefficients of each spatial profile, frequency-major
    let spectra: Vec<Vec<Complex64>> = f
        .components()
        .iter()
        .map(|c| {
            let mut spec = vec![Complex64::new(0.0, 0.0); nx * nr];
            let mut buf = vec![Complex64::new(0.0, 0.0); nx];
            for (k, &y) in lat.rows.iter().enumerate() {
                for (b, &x) in buf.iter_mut().zip(xs) {
                    *b = Complex64::new(c.space.eval(&[x, y]), 0.0);
                }
                fwd.process(&mut buf);
                for m in 0..nx {
                    spec[m * nr + k] = buf[m];
                }
            }
            spec
        })
        .collect();
    let length = nx as f64 * grid.dx();
    let k2: Vec<f64> = (0..nx)
        .map(|m| {
            let freq = if m <= nx / 2 { m as f64 } else { m as f64 - nx as f64 };
            (2.0 * PI * freq / length).powi(2)
        })
        .collect();

    let coupled = lat.step != 0;
    let dt_max = if coupled {
        MAX_STEP.min(COUPLING_CFL / rate.lambda_max())
    } else {
        MAX_STEP
    };
    let plan = step_boundaries(a, f, rate, grid.t_nodes(), dt_max);
    let mut state = vec![Complex64::new(0.0, 0.0); nx * nr];
    let mut values = Array3::zeros((grid.nt(), nx, grid.ny()));
    for (n, steps) in plan.iter().enumerate() {
        for &(t0, t1) in steps {
            let dt = t1 - t0;
            let tm = 0.5 * (t0 + t1);
            let (l0, lm, l1) = (rate.value(t0), rate.value(tm), rate.value(t1));
            let d_a = a.time_change(t1) - a.time_change(t0);
            let phis: Vec<f64> = f.components().iter().map(|c| c.time.value(tm)).collect();
            state.par_chunks_mut(nr).enumerate().for_each(|(m, col)| {
                let mut scratch = vec![Complex64::new(0.0, 0.0); 2 * nr];
                if coupled {
                    couple(col, stencil, lat.step, l0, lm, 0.5 * dt, &mut scratch);
                }
                let z = k2[m] * d_a;
                let decay = (-z).exp();
                let phi_w = if z > 0.0 { -(-z).exp_m1() / z * dt } else { dt };
                for (k, v) in col.iter_mut().enumerate() {
                    let mut forcing = Complex64::new(0.0, 0.0);
                    for (spec, &p) in spectra.iter().zip(&phis) {
                        if p != 0.0 {
                            forcing += spec[m * nr + k] * p;
                        }
                    }
                    *v = *v * decay + forcing * phi_w;
                }
                if coupled {
                    couple(col, stencil, lat.step, lm, l1, 0.5 * dt, &mut scratch);
                }
            });
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); nx];
        for (j, &row) in lat.grid_rows.iter().enumerate() {
            for m in 0..nx {
                buf[m] = state[m * nr + row];
            }
            inv.process(&mut buf);
            for i in 0..nx {
                values[[n + 1, i, j]] = buf[i].re / nx as f64;
            }
        }
    }
    ScalarField::new(grid.clone(), values)
}

/// Forward-difference lattice equation on the grid's y nodes, which must be
/// multiples of `|h|`.
pub fn solve_lattice_v(
    a: &DiffusivityProfile,
    f: &SourceTerm,
    rate: &RateProfile,
    h: f64,
    grid: &SpaceTimeGrid,
) -> Result<ScalarField> {
    solve_lattice(a, f, rate, h, grid, Stencil::Forward)
}

/// Centered-difference lattice equation on the grid's y nodes, which must
/// be multiples of `|h|`.
pub fn solve_lattice_w(
    a: &DiffusivityProfile,
    f: &SourceTerm,
    rate: &RateProfile,
    h: f64,
    grid: &SpaceTimeGrid,
) -> Result<ScalarField> {
    solve_lattice(a, f, rate, h, grid, Stencil::Centered)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat_core::{duhamel_1d_point, Profile1d, Spatial};

    fn setup() -> (DiffusivityProfile, SourceTerm, SpaceTimeGrid) {
        let a = DiffusivityProfile::constant(1.0, 1.0).unwrap();
        let f = SourceTerm::gaussian_bump(2, 0.3).unwrap();
        let g = SpaceTimeGrid::centered(1.0, 4, 8.5, 0.1, Some((1.0, 0.25))).unwrap();
        (a, f, g)
    }

    #[test]
    fn zero_rate_decouples_into_heat_solves() {
        let (a, f, g) = setup();
        let ys = g.y_nodes().unwrap().to_vec();
        for field in [
            solve_lattice_v(&a, &f, &RateProfile::zero(1.0), 0.25, &g).unwrap(),
            solve_lattice_w(&a, &f, &RateProfile::zero(1.0), 0.25, &g).unwrap(),
        ] {
            for (j, &y) in ys.iter().enumerate() {
                let row = SourceTerm::stationary(Spatial::Line { x: Profile1d::gaussian(0.3) })
                    .unwrap()
                    .scaled((-y * y / 0.18).exp());
                for &(i, n) in &[(85usize, 4usize), (80, 2), (90, 1)] {
                    let want = duhamel_1d_point(&a, &row, g.t_nodes()[n], g.x_nodes()[i]);
                    let got = field.values()[[n, i, j]];
                    assert!((got - want).abs() < 1e-6, "y={y}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn zero_forcing_stays_zero() {
        let (a, _, g) = setup();
        let r = RateProfile::constant(2.0, 1.0).unwrap();
        let v = solve_lattice_v(&a, &SourceTerm::zero(2), &r, 0.25, &g).unwrap();
        assert!(v.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn misaligned_nodes_are_rejected() {
        let (a, f, g) = setup();
        let r = RateProfile::constant(2.0, 1.0).unwrap();
        assert!(matches!(
            solve_lattice_w(&a, &f, &r, 0.3, &g),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn sup_bound_holds() {
        let (a, f, g) = setup();
        let r = RateProfile::constant(16.0, 1.0).unwrap();
        for field in [
            solve_lattice_v(&a, &f, &r, 0.25, &g).unwrap(),
            solve_lattice_w(&a, &f, &r, 0.25, &g).unwrap(),
        ] {
            let sup = field.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(sup <= 1.0 + 1e-6, "{sup}");
            assert!(sup > 0.01);
        }
    }
}
