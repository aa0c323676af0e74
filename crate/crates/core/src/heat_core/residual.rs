//! Discrete residuals of the solved equations on grid nodes.

use super::diffusivity::DiffusivityProfile;
use super::grid::ScalarField;
use super::source::SourceTerm;
use crate::error::{Error, Result};
use crate::poisson::RateProfile;

/// Which equation a field is checked against.
#[derive(Debug, Clone, PartialEq)]
pub enum Equation {
    /// `u_t = a u_xx + f`
    Heat1d,
    /// `v_t = a Δv + f`
    Heat2d,
    /// `v_t = a v_xx + λ [v(y + h) - v(y)] + f`
    LatticeV { h: f64, rate: RateProfile },
    /// `w_t = a w_xx + λ [w(y + h) - 2 w(y) + w(y - h)] + f`
    LatticeW { h: f64, rate: RateProfile },
}

const MIN_INTERIOR: usize = 5;

/// Number of y-nodes spanned by a shift of `h`.
pub(crate) fn lattice_shift(h: f64, dy: f64) -> Result<isize> {
    let k = h / dy;
    let r = k.round();
    if (k - r).abs() > 1e-9 * r.abs().max(1.0) {
        return Err(Error::config(
            "h",
            format!("shift {h} is not a multiple of the y spacing {dy}"),
        ));
    }
    Ok(r as isize)
}

/// Max over interior nodes of `|∂_t field - RHS|`, with centered differences
/// in `t` and `x` and exact lattice shifts in `y`. The first and last time
/// nodes are excluded so every node uses the centered time stencil.
pub fn pde_residual(
    field: &ScalarField,
    a: &DiffusivityProfile,
    f: &SourceTerm,
    equation: &Equation,
) -> Result<f64> {
    let grid = field.grid();
    let dim = match equation {
        Equation::Heat1d => 1,
        _ => 2,
    };
    if grid.dim() != dim || f.dim() != dim {
        return Err(Error::Shape(format!(
            "equation needs {dim}D data, field is {}D and forcing {}D",
            grid.dim(),
            f.dim()
        )));
    }
    let (nt, nx, ny) = (grid.nt(), grid.nx(), grid.ny());
    let interior_ok = |n: usize| n >= MIN_INTERIOR + 2;
    if !interior_ok(nt) || !interior_ok(nx) || (equation == &Equation::Heat2d && !interior_ok(ny)) {
        return Err(Error::Shape(format!(
            "need at least {MIN_INTERIOR} interior nodes per axis, grid is {nt}x{nx}x{ny}"
        )));
    }
    let (dt, dx) = (grid.dt(), grid.dx());
    let ts = grid.t_nodes();
    let xs = grid.x_nodes();
    let ys = grid.y_nodes().unwrap_or(&[]);
    let u = field.values();

    let (j_lo, j_hi, shift, rate) = match equation {
        Equation::Heat1d => (0, 1, 0, None),
        Equation::Heat2d => (1, ny - 1, 0, None),
        Equation::LatticeV { h, rate } => {
            let k = lattice_shift(*h, grid.dy().unwrap())?;
            let (lo, hi) = if k >= 0 { (0, ny as isize - k) } else { (-k, ny as isize) };
            (lo.max(0) as usize, hi.max(0) as usize, k, Some(rate))
        }
        Equation::LatticeW { h, rate } => {
            let k = lattice_shift(*h, grid.dy().unwrap())?.abs();
            (k as usize, (ny as isize - k).max(0) as usize, k, Some(rate))
        }
    };
    if j_lo >= j_hi {
        return Err(Error::Shape("no y-nodes left after the lattice shift".into()));
    }

    let mut worst = 0.0f64;
    for n in 1..nt - 1 {
        let t = ts[n];
        let at = a.value(t);
        let lam = rate.map_or(0.0, |r| r.value(t));
        for i in 1..nx - 1 {
            for j in j_lo..j_hi {
                let ut = (u[[n + 1, i, j]] - u[[n - 1, i, j]]) / (2.0 * dt);
                let uxx = (u[[n, i + 1, j]] - 2.0 * u[[n, i, j]] + u[[n, i - 1, j]]) / (dx * dx);
                let (rhs, point) = match equation {
                    Equation::Heat1d => (at * uxx, [xs[i], 0.0]),
                    Equation::Heat2d => {
                        let dy = grid.dy().unwrap();
                        let uyy = (u[[n, i, j + 1]] - 2.0 * u[[n, i, j]] + u[[n, i, j - 1]]) / (dy * dy);
                        (at * (uxx + uyy), [xs[i], ys[j]])
                    }
                    Equation::LatticeV { .. } => {
                        let up = u[[n, i, (j as isize + shift) as usize]];
                        (at * uxx + lam * (up - u[[n, i, j]]), [xs[i], ys[j]])
                    }
                    Equation::LatticeW { .. } => {
                        let k = shift as usize;
                        let c = u[[n, i, j + k]] - 2.0 * u[[n, i, j]] + u[[n, i, j - k]];
                        (at * uxx + lam * c, [xs[i], ys[j]])
                    }
                };
                let fv = f.eval(t, &point[..dim]);
                worst = worst.max((ut - rhs - fv).abs());
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heat_core::grid::SpaceTimeGrid;
    use ndarray::Array3;

    #[test]
    fn zero_field_zero_forcing() {
        let a = DiffusivityProfile::constant(1.0, 1.0).unwrap();
        let g = SpaceTimeGrid::centered(1.0, 9, 2.0, 0.25, None).unwrap();
        let r = pde_residual(&ScalarField::zeros(g), &a, &SourceTerm::zero(1), &Equation::Heat1d);
        assert_eq!(r.unwrap(), 0.0);
    }

    #[test]
    fn exact_polynomial_solution_has_small_residual() {
        // u = t + x²/2 solves u_t = u_xx with f = 0 exactly on the stencil
        let a = DiffusivityProfile::constant(1.0, 1.0).unwrap();
        let g = SpaceTimeGrid::centered(1.0, 9, 2.0, 0.25, None).unwrap();
        let u = ScalarField::sample(g, |t, z| t + 0.5 * z[0] * z[0]);
        let r = pde_residual(&u, &a, &SourceTerm::zero(1), &Equation::Heat1d).unwrap();
        assert!(r < 1e-12, "{r}");
    }

    #[test]
    fn lattice_shift_must_divide() {
        assert_eq!(lattice_shift(0.5, 0.25).unwrap(), 2);
        assert_eq!(lattice_shift(-0.25, 0.25).unwrap(), -1);
        assert!(lattice_shift(0.3, 0.25).is_err());
    }

    #[test]
    fn too_few_nodes_is_a_shape_error() {
        let a = DiffusivityProfile::constant(1.0, 1.0).unwrap();
        let g = SpaceTimeGrid::centered(1.0, 4, 2.0, 0.25, None).unwrap();
        let field = ScalarField::new(g.clone(), Array3::zeros((g.nt(), g.nx(), 1))).unwrap();
        let r = pde_residual(&field, &a, &SourceTerm::zero(1), &Equation::Heat1d);
        assert!(matches!(r, Err(Error::Shape(_))));
    }
}
