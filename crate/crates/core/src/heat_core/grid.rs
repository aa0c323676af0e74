use ndarray::{Array3, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const UNIFORM_TOL: f64 = 1e-12;

/// Uniform space(-time) grid. `t_nodes` run from 0 to the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeGrid {
    t_nodes: Vec<f64>,
    x_nodes: Vec<f64>,
    y_nodes: Option<Vec<f64>>,
}

fn check_uniform(nodes: &[f64], name: &str) -> Result<f64> {
    if nodes.len() < 2 {
        return Err(Error::config(name, "need at least two nodes"));
    }
    let step = (nodes[nodes.len() - 1] - nodes[0]) / (nodes.len() - 1) as f64;
    if !(step > 0.0) {
        return Err(Error::config(name, "nodes must be increasing"));
    }
    // node rounding is relative to the node magnitude, not the step
    let scale = nodes[0].abs().max(nodes[nodes.len() - 1].abs()).max(step);
    for w in nodes.windows(2) {
        if ((w[1] - w[0]) - step).abs() > UNIFORM_TOL * scale {
            return Err(Error::config(name, "nodes must be uniformly spaced"));
        }
    }
    Ok(step)
}

/// Nodes `k * step` for `|k| <= ceil(half_width / step)`.
pub fn symmetric_nodes(half_width: f64, step: f64) -> Vec<f64> {
    let k = (half_width / step - 1e-9).ceil().max(1.0) as i64;
    (-k..=k).map(|i| i as f64 * step).collect()
}

impl SpaceTimeGrid {
    pub fn new(t_nodes: Vec<f64>, x_nodes: Vec<f64>, y_nodes: Option<Vec<f64>>) -> Result<Self> {
        check_uniform(&t_nodes, "t_nodes")?;
        if t_nodes[0] != 0.0 {
            return Err(Error::config("t_nodes", "first time node must be 0"));
        }
        check_uniform(&x_nodes, "x_nodes")?;
        if let Some(y) = &y_nodes {
            check_uniform(y, "y_nodes")?;
        }
        Ok(SpaceTimeGrid {
            t_nodes,
            x_nodes,
            y_nodes,
        })
    }

    /// `nt + 1` time nodes on `[0, horizon]`, x nodes `k dx` covering
    /// `[-x_half, x_half]`, and optionally y nodes `k dy` covering `[-y_half, y_half]`.
    pub fn centered(
        horizon: f64,
        nt: usize,
        x_half: f64,
        dx: f64,
        y: Option<(f64, f64)>,
    ) -> Result<Self> {
        if nt == 0 || !(horizon > 0.0) {
            return Err(Error::config("grid", "need a positive horizon and nt >= 1"));
        }
        if !(dx > 0.0 && x_half > 0.0) {
            return Err(Error::config("grid.dx", "dx and window must be positive"));
        }
        let t_nodes = (0..=nt).map(|i| horizon * i as f64 / nt as f64).collect();
        let y_nodes = match y {
            Some((half, dy)) => {
                if !(dy > 0.0 && half > 0.0) {
                    return Err(Error::config("grid.dy", "dy and window must be positive"));
                }
                Some(symmetric_nodes(half, dy))
            }
            None => None,
        };
        Self::new(t_nodes, symmetric_nodes(x_half, dx), y_nodes)
    }

    pub fn t_nodes(&self) -> &[f64] {
        &self.t_nodes
    }

    pub fn x_nodes(&self) -> &[f64] {
        &self.x_nodes
    }

    pub fn y_nodes(&self) -> Option<&[f64]> {
        self.y_nodes.as_deref()
    }

    pub fn horizon(&self) -> f64 {
        *self.t_nodes.last().unwrap()
    }

    pub fn dt(&self) -> f64 {
        self.t_nodes[1] - self.t_nodes[0]
    }

    pub fn dx(&self) -> f64 {
        (self.x_nodes[self.x_nodes.len() - 1] - self.x_nodes[0]) / (self.x_nodes.len() - 1) as f64
    }

    pub fn dy(&self) -> Option<f64> {
        self.y_nodes
            .as_ref()
            .map(|y| (y[y.len() - 1] - y[0]) / (y.len() - 1) as f64)
    }

    pub fn dim(&self) -> usize {
        if self.y_nodes.is_some() {
            2
        } else {
            1
        }
    }

    pub fn nt(&self) -> usize {
        self.t_nodes.len()
    }

    pub fn nx(&self) -> usize {
        self.x_nodes.len()
    }

    pub fn ny(&self) -> usize {
        self.y_nodes.as_ref().map_or(1, |y| y.len())
    }

    /// Smallest half-width `min(-x_0, x_last)` of the x window.
    pub fn x_half_width(&self) -> f64 {
        (-self.x_nodes[0]).min(*self.x_nodes.last().unwrap())
    }

    pub fn y_half_width(&self) -> Option<f64> {
        self.y_nodes
            .as_ref()
            .map(|y| (-y[0]).min(*y.last().unwrap()))
    }

    /// Same spatial nodes with different time nodes.
    pub fn with_times(&self, t_nodes: Vec<f64>) -> Result<Self> {
        Self::new(t_nodes, self.x_nodes.clone(), self.y_nodes.clone())
    }

    /// Same nodes with `y_nodes` replaced.
    pub fn with_y(&self, y_nodes: Option<Vec<f64>>) -> Result<Self> {
        Self::new(self.t_nodes.clone(), self.x_nodes.clone(), y_nodes)
    }
}

/// Grid function indexed by `(t, x, y)`; one-dimensional fields have a
/// trailing axis of length one.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: SpaceTimeGrid,
    values: Array3<f64>,
}

impl ScalarField {
    pub fn new(grid: SpaceTimeGrid, values: Array3<f64>) -> Result<Self> {
        let expect = (grid.nt(), grid.nx(), grid.ny());
        if values.dim() != expect {
            return Err(Error::Shape(format!(
                "values have shape {:?}, grid needs {:?}",
                values.dim(),
                expect
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Shape("field contains non-finite values".into()));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: SpaceTimeGrid) -> Self {
        let values = Array3::zeros((grid.nt(), grid.nx(), grid.ny()));
        ScalarField { grid, values }
    }

    /// Samples `f(t, x[, y])` at every node.
    pub fn sample<F: Fn(f64, &[f64]) -> f64>(grid: SpaceTimeGrid, f: F) -> Self {
        let mut values = Array3::zeros((grid.nt(), grid.nx(), grid.ny()));
        for (n, &t) in grid.t_nodes().iter().enumerate() {
            for (i, &x) in grid.x_nodes().iter().enumerate() {
                match grid.y_nodes() {
                    Some(ys) => {
                        for (j, &y) in ys.iter().enumerate() {
                            values[[n, i, j]] = f(t, &[x, y]);
                        }
                    }
                    None => values[[n, i, 0]] = f(t, &[x]),
                }
            }
        }
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array3<f64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array3<f64> {
        &mut self.values
    }

    pub fn into_values(self) -> Array3<f64> {
        self.values
    }

    /// Spatial slice at time index `n` (shape `nx × ny`).
    pub fn slice(&self, n: usize) -> ArrayView2<'_, f64> {
        self.values.index_axis(Axis(0), n)
    }

    /// One-dimensional spatial slice at time index `n`.
    pub fn row(&self, n: usize) -> ArrayView1<'_, f64> {
        self.values.index_axis(Axis(0), n).index_axis_move(Axis(1), 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centered_grid_contains_origin() {
        let g = SpaceTimeGrid::centered(1.0, 4, 3.0, 0.1, Some((2.0, 0.25))).unwrap();
        assert_eq!(g.t_nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(g.x_nodes().contains(&0.0));
        assert!(g.x_half_width() >= 3.0 - 1e-12);
        assert_eq!(g.ny(), 17);
        assert!((g.dx() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonuniform_and_bad_start() {
        assert!(SpaceTimeGrid::new(vec![0.0, 0.5, 1.2], vec![0.0, 1.0], None).is_err());
        assert!(SpaceTimeGrid::new(vec![0.1, 0.5], vec![0.0, 1.0], None).is_err());
        assert!(SpaceTimeGrid::new(vec![0.0, 0.5], vec![0.0, 1.0, 1.5], None).is_err());
    }

    #[test]
    fn field_shape_is_checked() {
        let g = SpaceTimeGrid::centered(1.0, 2, 1.0, 0.5, None).unwrap();
        assert!(ScalarField::new(g.clone(), Array3::zeros((3, 5, 1))).is_ok());
        assert!(matches!(
            ScalarField::new(g.clone(), Array3::zeros((3, 4, 1))),
            Err(Error::Shape(_))
        ));
        let mut bad = Array3::zeros((3, 5, 1));
        bad[[1, 1, 0]] = f64::NAN;
        assert!(ScalarField::new(g, bad).is_err());
    }
}
