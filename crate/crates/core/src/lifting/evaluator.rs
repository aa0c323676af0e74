//! Pointwise evaluation of the randomized solution
//! `u(s, x, y') = ∫₀ˢ [G(A(s) - A(r)) * f(r, ·, y' - h D_r)](x) dr`
//! for a counting path `D`. The `r` integral is split at the jumps of `D`.

use rayon::prelude::*;

use super::signed::SignedPath;
use crate::heat_core::duhamel::time_rule;
use crate::heat_core::kernel::{smooth_1d, smooth_row};
use crate::heat_core::{DiffusivityProfile, Profile1d, SourceTerm, Spatial};

const TABLE_INTERVALS: usize = 1024;

/// `τ ↦ (G(τ) * p)(x)` tabulated on a uniform grid in `sqrt(τ)`.
#[derive(Debug, Clone)]
struct RhoTable {
    step: f64,
    values: Vec<f64>,
}

impl RhoTable {
    fn build(p: &Profile1d, x: f64, rho_max: f64) -> Self {
        let step = rho_max / TABLE_INTERVALS as f64;
        let values = (0..=TABLE_INTERVALS)
            .map(|m| {
                let rho = m as f64 * step;
                smooth_1d(p, rho * rho, x)
            })
            .collect();
        RhoTable { step, values }
    }

    /// Four-point Lagrange interpolation in `sqrt(τ)`.
    #[inline]
    fn eval(&self, tau: f64) -> f64 {
        let pos = tau.max(0.0).sqrt() / self.step;
        let last = self.values.len() - 1;
        let base = (pos.floor() as isize - 1).clamp(0, last as isize - 3) as usize;
        let u = pos - base as f64;
        let v = &self.values[base..base + 4];
        let (u1, u2, u3) = (u - 1.0, u - 2.0, u - 3.0);
        -v[0] * u1 * u2 * u3 / 6.0 + v[1] * u * u2 * u3 / 2.0 - v[2] * u * u1 * u3 / 2.0
            + v[3] * u * u1 * u2 / 6.0
    }
}

/// Evaluates randomized solutions at fixed x positions for any path.
pub(crate) struct ShiftEvaluator<'a> {
    a: &'a DiffusivityProfile,
    f: &'a SourceTerm,
    h: f64,
    xs: Vec<f64>,
    /// `[x index][component]`, present for separable components when tabulated.
    tables: Option<Vec<Vec<Option<RhoTable>>>>,
}

impl<'a> ShiftEvaluator<'a> {
    /// Evaluator with `sqrt(τ)` tables for separable components.
    pub fn tabulated(a: &'a DiffusivityProfile, f: &'a SourceTerm, h: f64, xs: &[f64]) -> Self {
        let rho_max = a.time_change(a.horizon()).sqrt();
        let tables = xs
            .par_iter()
            .map(|&x| {
                f.components()
                    .iter()
                    .map(|c| match &c.space {
                        Spatial::Product { x: px, .. } => Some(RhoTable::build(px, x, rho_max)),
                        _ => None,
                    })
                    .collect()
            })
            .collect();
        ShiftEvaluator {
            a,
            f,
            h,
            xs: xs.to_vec(),
            tables: Some(tables),
        }
    }

    /// Evaluator that smooths the forcing afresh at every quadrature node.
    pub fn direct(a: &'a DiffusivityProfile, f: &'a SourceTerm, h: f64, xs: &[f64]) -> Self {
        ShiftEvaluator {
            a,
            f,
            h,
            xs: xs.to_vec(),
            tables: None,
        }
    }

    #[inline]
    fn smooth_x(&self, xi: usize, c: usize, px: &Profile1d, tau: f64) -> f64 {
        match &self.tables {
            Some(t) => t[xi][c].as_ref().expect("separable table").eval(tau),
            None => smooth_1d(px, tau, self.xs[xi]),
        }
    }

    /// `out[m] = u(s, xs[xi], targets[m])` for the path `path`.
    pub fn u_many(&self, path: &SignedPath, s: f64, xi: usize, targets: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        if s <= 0.0 {
            return;
        }
        // with no shift the path is invisible
        let pieces = if self.h == 0.0 { vec![(0.0, s, 0)] } else { path.pieces(s) };
        let a_s = self.a.time_change(s);
        let x = self.xs[xi];
        for (c, comp) in self.f.components().iter().enumerate() {
            for &(lo, hi, k) in &pieces {
                let rule = time_rule(self.a, self.f, lo, hi, s, &[]);
                let shift = self.h * k as f64;
                match &comp.space {
                    Spatial::Product { x: px, y: py } => {
                        let mut j = 0.0;
                        for &(r, w) in &rule {
                            let phi = comp.time.value(r);
                            if phi != 0.0 {
                                j += w * phi * self.smooth_x(xi, c, px, a_s - self.a.time_change(r));
                            }
                        }
                        if j != 0.0 {
                            for (o, &y) in out.iter_mut().zip(targets) {
                                *o += py.eval(y - shift) * j;
                            }
                        }
                    }
                    space => {
                        for &(r, w) in &rule {
                            let phi = comp.time.value(r);
                            if phi == 0.0 {
                                continue;
                            }
                            let tau = a_s - self.a.time_change(r);
                            for (o, &y) in out.iter_mut().zip(targets) {
                                *o += w * phi * smooth_row(space, tau, x, y - shift);
                            }
                        }
                    }
                }
            }
        }
    }

    pub fn u(&self, path: &SignedPath, s: f64, xi: usize, y: f64) -> f64 {
        let mut out = [0.0];
        self.u_many(path, s, xi, &[y], &mut out);
        out[0]
    }
}
