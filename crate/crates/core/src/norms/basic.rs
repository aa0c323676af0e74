use crate::error::{Error, Result};
use crate::heat_core::ScalarField;

/// Largest absolute node value.
pub fn sup_norm(field: &ScalarField) -> f64 {
    field.values().iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Space-time cell volume `dt dx [dy]` of a field's grid.
pub fn cell_volume(field: &ScalarField) -> f64 {
    let g = field.grid();
    g.dt() * g.dx() * g.dy().unwrap_or(1.0)
}

/// `(sum |v|^p * cell volume)^(1/p)` over every space-time node.
pub fn lp_norm(field: &ScalarField, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::domain(format!("L^p exponent {p} must be finite and >= 1")));
    }
    let sum: f64 = field.values().iter().map(|v| v.abs().powf(p)).sum();
    Ok((sum * cell_volume(field)).powf(1.0 / p))
}
