use ndarray::ArrayView2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heat_core::{ScalarField, SpaceTimeGrid};

/// Largest pair count scanned exhaustively.
pub const MAX_EXHAUSTIVE_PAIRS: u64 = 10_000_000;
/// Candidate pairs carried from the coarse scan into refinement.
const REFINE_CANDIDATES: usize = 32;
/// Neighbourhood radius, in units of the current stride, searched per level.
const REFINE_RADIUS: isize = 2;

/// Result of a Hölder quotient scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderScan {
    pub value: f64,
    pub pairs_examined: u64,
    /// Stride of the coarse pass; 1 means every pair was visited.
    pub coarse_stride: usize,
}

impl HolderScan {
    pub fn exhaustive(&self) -> bool {
        self.coarse_stride == 1
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("Hölder exponent {alpha} must lie in (0, 1)")))
    }
}

struct Scanner<'a> {
    v: ArrayView2<'a, f64>,
    dx: f64,
    dy: f64,
    alpha: f64,
}

impl Scanner<'_> {
    fn quotient(&self, p: (usize, usize), q: (usize, usize)) -> f64 {
        let di = p.0.abs_diff(q.0) as f64 * self.dx;
        let dj = p.1.abs_diff(q.1) as f64 * self.dy;
        let d2 = di * di + dj * dj;
        if d2 == 0.0 {
            return 0.0;
        }
        (self.v[p] - self.v[q]).abs() * d2.powf(-0.5 * self.alpha)
    }

    /// Every pair on the sublattice of stride `s`. Returns the best partner
    /// of each first point, sorted by quotient.
    fn full(&self, s: usize) -> (Vec<(f64, (usize, usize), (usize, usize))>, u64) {
        let (nx, ny) = self.v.dim();
        let ix: Vec<usize> = (0..nx).step_by(s).collect();
        let jy: Vec<usize> = (0..ny).step_by(s).collect();
        let mx = ix.len();
        let my = jy.len();
        // weights depend only on index offsets
        let table: Vec<f64> = (0..mx * my)
            .map(|k| {
                let di = (k / my * s) as f64 * self.dx;
                let dj = (k % my * s) as f64 * self.dy;
                let d2 = di * di + dj * dj;
                if d2 == 0.0 {
                    0.0
                } else {
                    d2.powf(-0.5 * self.alpha)
                }
            })
            .collect();
        let vals: Vec<f64> = ix
            .iter()
            .flat_map(|&i| jy.iter().map(move |&j| (i, j)))
            .map(|p| self.v[p])
            .collect();
        let n = mx * my;
        let mut best: Vec<(f64, (usize, usize), (usize, usize))> = (0..n)
            .into_par_iter()
            .map(|a| {
                let (ia, ja) = (a / my, a % my);
                let va = vals[a];
                let mut top = (0.0, a);
                for b in a + 1..n {
                    let (ib, jb) = (b / my, b % my);
                    let w = table[(ib - ia) * my + ja.abs_diff(jb)];
                    let q = (va - vals[b]).abs() * w;
                    if q > top.0 {
                        top = (q, b);
                    }
                }
                let b = top.1;
                (top.0, (ix[ia], jy[ja]), (ix[b / my], jy[b % my]))
            })
            .collect();
        best.sort_by(|x, y| y.0.total_cmp(&x.0));
        let pairs = (n as u64) * (n as u64).saturating_sub(1) / 2;
        (best, pairs)
    }

    fn neighbours(&self, p: (usize, usize), s: usize) -> Vec<(usize, usize)> {
        let (nx, ny) = self.v.dim();
        let r = REFINE_RADIUS * s as isize;
        let step = s as isize;
        let mut out = Vec::new();
        let mut di = -r;
        while di <= r {
            let i = p.0 as isize + di;
            if i >= 0 && (i as usize) < nx {
                let mut dj = if ny == 1 { 0 } else { -r };
                let dj_max = if ny == 1 { 0 } else { r };
                while dj <= dj_max {
                    let j = p.1 as isize + dj;
                    if j >= 0 && (j as usize) < ny {
                        out.push((i as usize, j as usize));
                    }
                    dj += step;
                }
            }
            di += step;
        }
        out
    }
}

fn sublattice_size(nx: usize, ny: usize, s: usize) -> u64 {
    (nx.div_ceil(s) * ny.div_ceil(s)) as u64
}

/// Hölder quotient `max |v(p) - v(q)| / |p - q|^alpha` over node pairs of a
/// uniform 1D (`ny == 1`) or 2D array.
///
/// Arrays with more than [`MAX_EXHAUSTIVE_PAIRS`] pairs are scanned on the
/// coarsest power-of-two sublattice below that budget; the best candidates
/// are then refined level by level, each point moving within two strides
/// at half the previous stride, down to the native grid. The result is
/// always the quotient of an actual node pair.
pub fn holder_scan(v: ArrayView2<'_, f64>, dx: f64, dy: f64, alpha: f64) -> Result<HolderScan> {
    check_alpha(alpha)?;
    let (nx, ny) = v.dim();
    if nx * ny < 2 {
        return Err(Error::Shape("Hölder scan needs at least two nodes".into()));
    }
    if !(dx > 0.0 && dy > 0.0) {
        return Err(Error::domain("grid spacings must be positive"));
    }
    let sc = Scanner { v, dx, dy, alpha };
    let mut s = 1usize;
    loop {
        let m = sublattice_size(nx, ny, s);
        if m * (m - 1) / 2 <= MAX_EXHAUSTIVE_PAIRS {
            break;
        }
        s *= 2;
    }
    let (best, mut pairs) = sc.full(s);
    let mut value = best.first().map_or(0.0, |b| b.0);
    if s == 1 {
        return Ok(HolderScan {
            value,
            pairs_examined: pairs,
            coarse_stride: 1,
        });
    }
    let mut cands: Vec<((usize, usize), (usize, usize))> = best
        .iter()
        .take(REFINE_CANDIDATES)
        .map(|b| (b.1, b.2))
        .collect();
    let coarse = s;
    while s > 1 {
        s /= 2;
        let refined: Vec<(f64, (usize, usize), (usize, usize), u64)> = cands
            .par_iter()
            .map(|&(p, q)| {
                let np = sc.neighbours(p, s);
                let nq = sc.neighbours(q, s);
                let mut top = (sc.quotient(p, q), p, q);
                for &a in &np {
                    for &b in &nq {
                        let r = sc.quotient(a, b);
                        if r > top.0 {
                            top = (r, a, b);
                        }
                    }
                }
                (top.0, top.1, top.2, (np.len() * nq.len()) as u64)
            })
            .collect();
        for r in &refined {
            value = value.max(r.0);
            pairs += r.3;
        }
        cands = refined.iter().map(|r| (r.1, r.2)).collect();
    }
    Ok(HolderScan {
        value,
        pairs_examined: pairs,
        coarse_stride: coarse,
    })
}

/// Grid Hölder seminorm of a spatial slice living on `grid` (shape
/// `nx × ny`, with `ny = 1` in one dimension).
pub fn holder_seminorm(slice: ArrayView2<'_, f64>, alpha: f64, grid: &SpaceTimeGrid) -> Result<f64> {
    if slice.dim() != (grid.nx(), grid.ny()) {
        return Err(Error::Shape(format!(
            "slice shape {:?} does not match grid {:?}",
            slice.dim(),
            (grid.nx(), grid.ny())
        )));
    }
    let dy = grid.dy().unwrap_or(1.0);
    Ok(holder_scan(slice, grid.dx(), dy, alpha)?.value)
}

/// `sup_t` of the spatial seminorm over all time nodes of `field`.
pub fn sup_time_holder(field: &ScalarField, alpha: f64) -> Result<f64> {
    let g = field.grid();
    let mut best = 0.0f64;
    for n in 0..g.nt() {
        best = best.max(holder_seminorm(field.slice(n), alpha, g)?);
    }
    Ok(best)
}

/// Hölder seminorm of equally spaced samples on a line.
pub fn holder_seminorm_samples(samples: &[f64], spacing: f64, alpha: f64) -> Result<f64> {
    let v = ArrayView2::from_shape((samples.len(), 1), samples)
        .map_err(|e| Error::Shape(e.to_string()))?;
    Ok(holder_scan(v, spacing, 1.0, alpha)?.value)
}
