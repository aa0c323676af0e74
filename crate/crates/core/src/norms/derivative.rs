use ndarray::{Array3, ArrayView2};
use rayon::prelude::*;

use super::direction::Direction;
use super::holder::{check_alpha, holder_seminorm_samples};
use crate::error::{Error, Result};
use crate::heat_core::{ScalarField, SpaceTimeGrid};

/// Offsets closer than this (in index units) to a node use the node value.
const SNAP: f64 = 1e-9;
/// Lines must cover at least this many derivative steps.
const MIN_LINE_STEPS: f64 = 10.0;

/// Four-point Lagrange stencil on a uniform axis at fractional index `p`.
fn stencil(p: f64, n: usize) -> Option<(usize, [f64; 4], usize)> {
    let r = p.round();
    if (p - r).abs() < SNAP {
        return (r >= 0.0 && (r as usize) < n).then_some((r as usize, [1.0, 0.0, 0.0, 0.0], 1));
    }
    let i0 = p.floor() - 1.0;
    if i0 < 0.0 || i0 as usize + 3 >= n {
        return None;
    }
    let u = p - i0;
    let w = [
        -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0,
        u * (u - 2.0) * (u - 3.0) / 2.0,
        -u * (u - 1.0) * (u - 3.0) / 2.0,
        u * (u - 1.0) * (u - 2.0) / 6.0,
    ];
    Some((i0 as usize, w, 4))
}

/// Tensor-product cubic interpolation of a spatial slice; exact at nodes.
pub(crate) struct PlaneInterp<'a> {
    v: ArrayView2<'a, f64>,
    x0: f64,
    dx: f64,
    y0: f64,
    dy: f64,
}

impl<'a> PlaneInterp<'a> {
    pub(crate) fn new(v: ArrayView2<'a, f64>, grid: &SpaceTimeGrid) -> Result<Self> {
        let ys = grid
            .y_nodes()
            .ok_or_else(|| Error::Shape("planar interpolation needs a 2D grid".into()))?;
        if v.dim() != (grid.nx(), grid.ny()) {
            return Err(Error::Shape("slice does not match its grid".into()));
        }
        Ok(PlaneInterp {
            v,
            x0: grid.x_nodes()[0],
            dx: grid.dx(),
            y0: ys[0],
            dy: grid.dy().unwrap(),
        })
    }

    pub(crate) fn eval(&self, x: f64, y: f64) -> Option<f64> {
        let (nx, ny) = self.v.dim();
        let (i0, wx, lx) = stencil((x - self.x0) / self.dx, nx)?;
        let (j0, wy, ly) = stencil((y - self.y0) / self.dy, ny)?;
        let mut acc = 0.0;
        for a in 0..lx {
            let mut row = 0.0;
            for b in 0..ly {
                row += wy[b] * self.v[[i0 + a, j0 + b]];
            }
            acc += wx[a] * row;
        }
        Some(acc)
    }

    /// Centered second difference along `l` at `z`.
    pub(crate) fn second_difference(&self, l: [f64; 2], z: [f64; 2], step: f64) -> Option<f64> {
        let fp = self.eval(z[0] + step * l[0], z[1] + step * l[1])?;
        let f0 = self.eval(z[0], z[1])?;
        let fm = self.eval(z[0] - step * l[0], z[1] - step * l[1])?;
        Some((fp - 2.0 * f0 + fm) / (step * step))
    }
}

/// Nodes to drop on each side of an axis so that offsets of `c` index
/// units stay inside the cubic stencil.
fn crop_margin(c: f64) -> usize {
    let r = c.round();
    if (c - r).abs() < SNAP {
        r as usize
    } else {
        c.ceil() as usize + 2
    }
}

fn cropped_grid(grid: &SpaceTimeGrid, mx: usize, my: usize) -> Result<SpaceTimeGrid> {
    let too_large = || Error::config("step", "too large for the grid window");
    let xs = grid.x_nodes();
    if xs.len() < 2 * mx + 2 {
        return Err(too_large());
    }
    let ys = match grid.y_nodes() {
        Some(ys) => {
            if ys.len() < 2 * my + 2 {
                return Err(too_large());
            }
            Some(ys[my..ys.len() - my].to_vec())
        }
        None => None,
    };
    SpaceTimeGrid::new(grid.t_nodes().to_vec(), xs[mx..xs.len() - mx].to_vec(), ys)
}

/// `[f(z + step l) - 2 f(z) + f(z - step l)] / step^2` at every node whose
/// stencil stays inside the window. Axis-aligned directions with a step
/// that is a multiple of the spacing use grid values only; other
/// directions interpolate with tensor cubics.
pub fn directional_second_derivative(
    field: &ScalarField,
    l: Direction,
    step: f64,
) -> Result<ScalarField> {
    let grid = field.grid();
    if grid.dim() != 2 {
        return Err(Error::Shape("directional derivatives need a 2D field".into()));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::config("step", "must be positive"));
    }
    let dir = l.l();
    let mx = crop_margin(step * dir[0].abs() / grid.dx());
    let my = crop_margin(step * dir[1].abs() / grid.dy().unwrap());
    let out_grid = cropped_grid(grid, mx, my)?;
    let (cx, cy) = (out_grid.x_nodes().to_vec(), out_grid.y_nodes().unwrap().to_vec());
    let mut values = Array3::zeros((out_grid.nt(), cx.len(), cy.len()));
    for n in 0..grid.nt() {
        let interp = PlaneInterp::new(field.slice(n), grid)?;
        let rows: Vec<Vec<f64>> = cx
            .par_iter()
            .map(|&x| {
                cy.iter()
                    .map(|&y| {
                        interp.second_difference(dir, [x, y], step).ok_or_else(|| {
                            Error::config("step", "too large for the grid window")
                        })
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                values[[n, i, j]] = v;
            }
        }
    }
    ScalarField::new(out_grid, values)
}

/// Centered second difference in x with the native spacing. Works for 1D
/// and 2D fields and drops one node at each x end.
pub fn second_derivative_x(field: &ScalarField) -> Result<ScalarField> {
    let grid = field.grid();
    let out_grid = cropped_grid(grid, 1, 0)?;
    let dx2 = grid.dx() * grid.dx();
    let v = field.values();
    let (nt, nx, ny) = v.dim();
    let values = Array3::from_shape_fn((nt, nx - 2, ny), |(n, i, j)| {
        (v[[n, i + 2, j]] - 2.0 * v[[n, i + 1, j]] + v[[n, i, j]]) / dx2
    });
    ScalarField::new(out_grid, values)
}

/// Second derivatives `D_xx`, `D_xy`, `D_yy` by centered differences on the
/// interior nodes of a 2D field.
#[derive(Debug, Clone)]
pub struct Hessian {
    pub xx: ScalarField,
    pub xy: ScalarField,
    pub yy: ScalarField,
}

impl Hessian {
    /// `D^2_l = l^i l^j D_ij` assembled from the components.
    pub fn directional(&self, l: Direction) -> Result<ScalarField> {
        let v = ndarray::Zip::from(self.xx.values())
            .and(self.xy.values())
            .and(self.yy.values())
            .map_collect(|&a, &b, &c| l.quadratic_form(a, b, c));
        ScalarField::new(self.xx.grid().clone(), v)
    }

    pub fn components(&self) -> [&ScalarField; 3] {
        [&self.xx, &self.xy, &self.yy]
    }
}

pub fn hessian(field: &ScalarField) -> Result<Hessian> {
    let grid = field.grid();
    let dy = grid
        .dy()
        .ok_or_else(|| Error::Shape("the Hessian needs a 2D field".into()))?;
    let dx = grid.dx();
    let out_grid = cropped_grid(grid, 1, 1)?;
    let v = field.values();
    let (nt, nx, ny) = v.dim();
    let shape = (nt, nx - 2, ny - 2);
    let xx = Array3::from_shape_fn(shape, |(n, i, j)| {
        (v[[n, i + 2, j + 1]] - 2.0 * v[[n, i + 1, j + 1]] + v[[n, i, j + 1]]) / (dx * dx)
    });
    let yy = Array3::from_shape_fn(shape, |(n, i, j)| {
        (v[[n, i + 1, j + 2]] - 2.0 * v[[n, i + 1, j + 1]] + v[[n, i + 1, j]]) / (dy * dy)
    });
    let xy = Array3::from_shape_fn(shape, |(n, i, j)| {
        (v[[n, i + 2, j + 2]] - v[[n, i + 2, j]] - v[[n, i, j + 2]] + v[[n, i, j]])
            / (4.0 * dx * dy)
    });
    Ok(Hessian {
        xx: ScalarField::new(out_grid.clone(), xx)?,
        xy: ScalarField::new(out_grid.clone(), xy)?,
        yy: ScalarField::new(out_grid, yy)?,
    })
}

/// `mu -> D^2_l f(z + mu l)` sampled at `mu = k * spacing` over the longest
/// run of consecutive `k` for which the stencil stays in the window.
pub(crate) fn line_second_derivative(
    slice: ArrayView2<'_, f64>,
    grid: &SpaceTimeGrid,
    l: Direction,
    z: [f64; 2],
    step: f64,
) -> Result<(Vec<f64>, f64)> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::config("step", "must be positive"));
    }
    let interp = PlaneInterp::new(slice, grid)?;
    let spacing = grid.dx();
    let xs = grid.x_nodes();
    let ys = grid.y_nodes().unwrap();
    let far = (xs[0] - z[0])
        .abs()
        .max((xs[xs.len() - 1] - z[0]).abs())
        .hypot((ys[0] - z[1]).abs().max((ys[ys.len() - 1] - z[1]).abs()));
    let kmax = (far / spacing).ceil() as i64 + 1;
    let dir = l.l();
    let vals: Vec<Option<f64>> = (-kmax..=kmax)
        .into_par_iter()
        .map(|k| {
            let mu = k as f64 * spacing;
            interp.second_difference(dir, [z[0] + mu * dir[0], z[1] + mu * dir[1]], step)
        })
        .collect();
    let mut best = (0usize, 0usize);
    let mut start = 0usize;
    for (k, v) in vals.iter().enumerate() {
        if v.is_none() {
            start = k + 1;
        } else if k + 1 - start > best.1 - best.0 {
            best = (start, k + 1);
        }
    }
    let run: Vec<f64> = vals[best.0..best.1].iter().map(|v| v.unwrap()).collect();
    let covered = run.len().saturating_sub(1) as f64 * spacing;
    if run.len() < 2 || covered < MIN_LINE_STEPS * step {
        return Err(Error::config(
            "line",
            format!("insufficient line coverage: {covered} < {}", MIN_LINE_STEPS * step),
        ));
    }
    Ok((run, spacing))
}

/// Hölder seminorm of `mu -> D^2_l f(z + mu l)` for one spatial slice,
/// sampled along the line at the grid's x spacing.
pub fn line_holder_seminorm(
    slice: ArrayView2<'_, f64>,
    grid: &SpaceTimeGrid,
    l: Direction,
    z: [f64; 2],
    alpha: f64,
    step: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    let (samples, spacing) = line_second_derivative(slice, grid, l, z, step)?;
    holder_seminorm_samples(&samples, spacing, alpha)
}
