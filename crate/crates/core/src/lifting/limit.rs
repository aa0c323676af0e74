//! Vanishing-step study: centered lattice solutions against the planar
//! reference as `h → 0`.

use serde::Serialize;

use super::config::Coupling;
use super::lattice::solve_lattice_w;
use crate::error::{Error, Result};
use crate::heat_core::{solve_heat_2d_reference, DiffusivityProfile, ScalarField, SourceTerm, SpaceTimeGrid};

#[derive(Debug, Clone)]
pub struct LiftLimitReport {
    pub h: Vec<f64>,
    pub fields: Vec<ScalarField>,
    pub reference: ScalarField,
    /// Max over grid nodes of `|w_h - v|`.
    pub errors_vs_reference: Vec<f64>,
    /// Least-squares slope of `log error` against `log h`; `None` when any
    /// error is zero.
    pub observed_order: Option<f64>,
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub error: f64,
    /// Order between this row and the previous one.
    pub local_order: Option<f64>,
}

impl LiftLimitReport {
    pub fn errors_strictly_decreasing(&self) -> bool {
        self.errors_vs_reference.windows(2).all(|w| w[1] < w[0])
    }

    pub fn rows(&self) -> Vec<ConvergenceRow> {
        self.h
            .iter()
            .zip(&self.errors_vs_reference)
            .enumerate()
            .map(|(k, (&h, &e))| ConvergenceRow {
                h,
                error: e,
                local_order: (k > 0).then(|| {
                    let (h0, e0) = (self.h[k - 1], self.errors_vs_reference[k - 1]);
                    (e0 / e).ln() / (h0 / h).ln()
                })
                .filter(|o| o.is_finite()),
            })
            .collect()
    }
}

/// Least-squares slope of `ys` against `xs` after taking logs.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || ys.iter().any(|&y| !(y > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Solves the centered lattice equation for each `h` with the rate given
/// by `coupling` and measures the sup-norm distance to the planar solution
/// on the grid nodes. The grid's y nodes must be multiples of every `h`.
pub fn dimension_lift_limit(
    a: &DiffusivityProfile,
    f: &SourceTerm,
    grid: &SpaceTimeGrid,
    h_sequence: &[f64],
    coupling: &Coupling,
) -> Result<LiftLimitReport> {
    if h_sequence.is_empty() {
        return Err(Error::config("h_list", "need at least one jump size"));
    }
    if h_sequence.iter().any(|&h| !(h > 0.0)) || h_sequence.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::config("h_list", "jump sizes must be positive and strictly decreasing"));
    }
    let reference = solve_heat_2d_reference(a, f, grid)?;
    let mut fields = Vec::new();
    let mut errors = Vec::new();
    for &h in h_sequence {
        let rate = coupling.rate(a, h)?;
        let w = solve_lattice_w(a, f, &rate, h, grid)?;
        let err = w
            .values()
            .iter()
            .zip(reference.values())
            .fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
        errors.push(err);
        fields.push(w);
    }
    Ok(LiftLimitReport {
        h: h_sequence.to_vec(),
        observed_order: log_log_slope(h_sequence, &errors),
        fields,
        reference,
        errors_vs_reference: errors,
    })
}
