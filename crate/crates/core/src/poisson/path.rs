use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// One trajectory of a counting process: sorted jump times in `(0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonPath {
    jump_times: Vec<f64>,
    seed: u64,
}

impl PoissonPath {
    pub fn new(jump_times: Vec<f64>, seed: u64, horizon: f64) -> Result<Self> {
        if jump_times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("jump times must be strictly increasing"));
        }
        if let (Some(&first), Some(&last)) = (jump_times.first(), jump_times.last()) {
            if !(first > 0.0) || last > horizon {
                return Err(Error::domain(format!("jump times must lie in (0, {horizon}]")));
            }
        }
        Ok(PoissonPath { jump_times, seed })
    }

    /// The path with no jumps.
    pub fn empty(seed: u64) -> Self {
        PoissonPath {
            jump_times: Vec::new(),
            seed,
        }
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.jump_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jump_times.is_empty()
    }

    /// Number of jumps in `(s, t]`.
    pub fn increment(&self, s: f64, t: f64) -> usize {
        self.count_at(t, false) - self.count_at(s, false)
    }

    /// `π_t`, or `π_{t-}` when `left_limit` is set.
    pub fn count_at(&self, t: f64, left_limit: bool) -> usize {
        count_at(self, t, left_limit)
    }
}

/// `#{jumps <= t}`, or `#{jumps < t}` when `left_limit` is set.
pub fn count_at(path: &PoissonPath, t: f64, left_limit: bool) -> usize {
    if left_limit {
        path.jump_times.partition_point(|&s| s < t)
    } else {
        path.jump_times.partition_point(|&s| s <= t)
    }
}

/// Writes one line per path with its comma-separated jump times.
pub fn write_paths<W: Write>(mut out: W, paths: &[PoissonPath]) -> std::io::Result<()> {
    for p in paths {
        let line: Vec<String> = p.jump_times.iter().map(|t| format!("{t:?}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// Reads paths written by [`write_paths`]; seeds are the line indices.
pub fn read_paths<R: BufRead>(input: R, horizon: f64) -> Result<Vec<PoissonPath>> {
    let mut paths = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::config("paths", e.to_string()))?;
        let times = if line.trim().is_empty() {
            Vec::new()
        } else {
            line.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::config("paths", format!("line {}: {e}", i + 1)))
                })
                .collect::<Result<Vec<_>>>()?
        };
        paths.push(PoissonPath::new(times, i as u64, horizon)?);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_continuous_with_left_limits() {
        let p = PoissonPath::new(vec![0.5], 0, 1.0).unwrap();
        assert_eq!(count_at(&p, 0.5, false), 1);
        assert_eq!(count_at(&p, 0.5, true), 0);
        assert_eq!(count_at(&p, 0.49, false), 0);
        let e = PoissonPath::empty(3);
        assert_eq!(count_at(&e, 0.7, false), 0);
        assert_eq!(count_at(&e, 0.7, true), 0);
    }

    #[test]
    fn rejects_unsorted_or_out_of_range() {
        assert!(PoissonPath::new(vec![0.3, 0.2], 0, 1.0).is_err());
        assert!(PoissonPath::new(vec![0.3, 0.3], 0, 1.0).is_err());
        assert!(PoissonPath::new(vec![0.0], 0, 1.0).is_err());
        assert!(PoissonPath::new(vec![1.5], 0, 1.0).is_err());
        assert!(PoissonPath::new(vec![1.0], 0, 1.0).is_ok());
    }

    #[test]
    fn dump_round_trip() {
        let paths = vec![
            PoissonPath::new(vec![0.125, 0.5, 0.9], 0, 1.0).unwrap(),
            PoissonPath::empty(1),
            PoissonPath::new(vec![1.0 / 3.0], 2, 1.0).unwrap(),
        ];
        let mut buf = Vec::new();
        write_paths(&mut buf, &paths).unwrap();
        let back = read_paths(buf.as_slice(), 1.0).unwrap();
        for (a, b) in paths.iter().zip(&back) {
            assert_eq!(a.jump_times(), b.jump_times());
        }
    }
}
