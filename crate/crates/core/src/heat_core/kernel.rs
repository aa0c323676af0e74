//! Heat kernel and kernel-smoothed profiles.
//!
//! `smooth_*` functions compute `(G(τ) * g)(x) = ∫ G(τ, x - ξ) g(ξ) dξ`.
//! Narrow kernels (standard deviation below a quarter of the profile's
//! feature size) use Gauss–Hermite quadrature in the kernel variable; wider
//! kernels use composite 8-point Gauss–Legendre cells over the overlap of
//! the kernel window and the profile support.

use ndarray::Array2;
use std::f64::consts::PI;

use super::source::{Profile1d, Spatial};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_hermite, gauss_legendre};

const GL_ORDER: usize = 8;
const HERMITE_1D: usize = 20;
const HERMITE_2D: usize = 16;
/// Kernel window half-width in standard deviations (`exp(-40.5)` beyond).
const REACH: f64 = 9.0;

/// `(4π τ)^(-dim/2) exp(-|z|² / (4τ))`.
pub fn gaussian_kernel(dim: usize, tau: f64, z: &[f64]) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::domain(format!("kernel time tau = {tau} must be positive")));
    }
    if dim != 1 && dim != 2 || z.len() != dim {
        return Err(Error::domain(format!("kernel dimension {dim} with point {z:?}")));
    }
    let r2: f64 = z.iter().map(|v| v * v).sum();
    Ok((4.0 * PI * tau).powf(-(dim as f64) / 2.0) * (-r2 / (4.0 * tau)).exp())
}

#[inline]
fn kernel_1d(tau: f64, d: f64) -> f64 {
    (-d * d / (4.0 * tau)).exp() / (4.0 * PI * tau).sqrt()
}

/// Nodes and weights of composite Gauss–Legendre cells covering `[lo, hi]`
/// with cells no wider than `cell`.
fn cells(lo: f64, hi: f64, cell: f64, out: &mut Vec<(f64, f64)>) {
    let rule = gauss_legendre(GL_ORDER);
    let n = ((hi - lo) / cell).ceil().max(1.0) as usize;
    let h = (hi - lo) / n as f64;
    for c in 0..n {
        let mid = lo + (c as f64 + 0.5) * h;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
}

/// Kernel smoothing of an arbitrary function supported in `support`.
pub fn smooth_fn_1d<F: Fn(f64) -> f64>(
    f: F,
    support: (f64, f64),
    feature: f64,
    tau: f64,
    x: f64,
) -> f64 {
    if tau <= 0.0 {
        return f(x);
    }
    let sd = (2.0 * tau).sqrt();
    if sd <= 0.25 * feature {
        let rule = gauss_hermite(HERMITE_1D);
        let scale = 2.0 * tau.sqrt();
        let acc: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(eta, w)| w * f(x + scale * eta))
            .sum();
        return acc / PI.sqrt();
    }
    let lo = support.0.max(x - REACH * sd);
    let hi = support.1.min(x + REACH * sd);
    if lo >= hi {
        return 0.0;
    }
    let rule = gauss_legendre(GL_ORDER);
    let cell = sd.min(feature);
    let n = ((hi - lo) / cell).ceil().max(1.0) as usize;
    let h = (hi - lo) / n as f64;
    let mut acc = 0.0;
    for c in 0..n {
        let mid = lo + (c as f64 + 0.5) * h;
        let mut part = 0.0;
        for (u, w) in rule.nodes.iter().zip(&rule.weights) {
            let xi = mid + 0.5 * h * u;
            part += w * kernel_1d(tau, x - xi) * f(xi);
        }
        acc += 0.5 * h * part;
    }
    acc
}

/// `(G(τ) * p)(x)` for a one-dimensional profile.
pub fn smooth_1d(p: &Profile1d, tau: f64, x: f64) -> f64 {
    smooth_fn_1d(|xi| p.eval(xi), p.support(), p.feature(), tau, x)
}

/// Smoothing in `x` only of a planar profile frozen at `y = eta`.
pub fn smooth_row(space: &Spatial, tau: f64, x: f64, eta: f64) -> f64 {
    match space {
        Spatial::Line { x: p } => smooth_1d(p, tau, x),
        Spatial::Product { x: px, y: py } => {
            let gy = py.eval(eta);
            if gy == 0.0 {
                0.0
            } else {
                gy * smooth_1d(px, tau, x)
            }
        }
        Spatial::Rotated { .. } => {
            let bx = space.support_box()[0];
            smooth_fn_1d(|xi| space.eval(&[xi, eta]), bx, space.feature(), tau, x)
        }
    }
}

/// Two-dimensional smoothing `(G₂(τ) * g)` on the tensor grid `xs × ys`.
pub fn smooth_grid_2d(space: &Spatial, tau: f64, xs: &[f64], ys: &[f64]) -> Array2<f64> {
    match space {
        Spatial::Line { .. } => panic!("smooth_grid_2d needs a planar profile"),
        Spatial::Product { x: px, y: py } => {
            let gx: Vec<f64> = xs.iter().map(|&x| smooth_1d(px, tau, x)).collect();
            let gy: Vec<f64> = ys.iter().map(|&y| smooth_1d(py, tau, y)).collect();
            Array2::from_shape_fn((xs.len(), ys.len()), |(i, j)| gx[i] * gy[j])
        }
        Spatial::Rotated { .. } => smooth_general_2d(space, tau, xs, ys),
    }
}

fn smooth_general_2d(space: &Spatial, tau: f64, xs: &[f64], ys: &[f64]) -> Array2<f64> {
    if tau <= 0.0 {
        return Array2::from_shape_fn((xs.len(), ys.len()), |(i, j)| space.eval(&[xs[i], ys[j]]));
    }
    let sd = (2.0 * tau).sqrt();
    let feature = space.feature();
    if sd <= 0.25 * feature {
        let rule = gauss_hermite(HERMITE_2D);
        let scale = 2.0 * tau.sqrt();
        return Array2::from_shape_fn((xs.len(), ys.len()), |(i, j)| {
            let mut acc = 0.0;
            for (a, wa) in rule.nodes.iter().zip(&rule.weights) {
                for (b, wb) in rule.nodes.iter().zip(&rule.weights) {
                    acc += wa * wb * space.eval(&[xs[i] + scale * a, ys[j] + scale * b]);
                }
            }
            acc / PI
        });
    }
    let bbox = space.support_box();
    let cell = sd.min(feature);
    let mut qx = Vec::new();
    let mut qy = Vec::new();
    cells(bbox[0].0, bbox[0].1, cell, &mut qx);
    cells(bbox[1].0, bbox[1].1, cell, &mut qy);
    let values = Array2::from_shape_fn((qx.len(), qy.len()), |(k, l)| {
        space.eval(&[qx[k].0, qy[l].0])
    });
    let kernel = |targets: &[f64], nodes: &[(f64, f64)]| {
        Array2::from_shape_fn((targets.len(), nodes.len()), |(i, k)| {
            let d = targets[i] - nodes[k].0;
            if d.abs() > REACH * sd {
                0.0
            } else {
                nodes[k].1 * kernel_1d(tau, d)
            }
        })
    };
    let kx = kernel(xs, &qx);
    let ky = kernel(ys, &qy);
    kx.dot(&values).dot(&ky.t())
}
