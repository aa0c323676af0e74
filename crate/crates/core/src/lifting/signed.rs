use crate::poisson::PoissonPath;

/// Counting path with unit jumps of either sign, e.g. `π' - π` for two
/// independent processes. Times are sorted; ties keep both jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedPath {
    jumps: Vec<(f64, i32)>,
}

impl SignedPath {
    pub fn up(path: &PoissonPath) -> Self {
        SignedPath {
            jumps: path.jump_times().iter().map(|&t| (t, 1)).collect(),
        }
    }

    /// `plus - minus`.
    pub fn difference(plus: &PoissonPath, minus: &PoissonPath) -> Self {
        let mut jumps: Vec<(f64, i32)> = plus
            .jump_times()
            .iter()
            .map(|&t| (t, 1))
            .chain(minus.jump_times().iter().map(|&t| (t, -1)))
            .collect();
        jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
        SignedPath { jumps }
    }

    pub fn jumps(&self) -> &[(f64, i32)] {
        &self.jumps
    }

    /// Value at `t`, right-continuous; the left limit when `left_limit` is set.
    pub fn count_at(&self, t: f64, left_limit: bool) -> i64 {
        self.jumps
            .iter()
            .take_while(|&&(s, _)| if left_limit { s < t } else { s <= t })
            .map(|&(_, d)| d as i64)
            .sum()
    }

    /// Constant stretches covering `[0, s]`: `(start, end, count)`.
    pub(crate) fn pieces(&self, s: f64) -> Vec<(f64, f64, i64)> {
        let mut out = Vec::with_capacity(self.jumps.len() + 1);
        let mut start = 0.0;
        let mut count = 0i64;
        for &(t, d) in &self.jumps {
            if t > s {
                break;
            }
            if t > start {
                out.push((start, t, count));
            }
            start = t;
            count += d as i64;
        }
        if s > start {
            out.push((start, s, count));
        }
        out
    }
}
