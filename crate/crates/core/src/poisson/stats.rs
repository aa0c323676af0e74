use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::ln_gamma;

use super::rate::RateProfile;
use crate::error::{Error, Result};
use crate::quadrature::adaptive;

/// `m(t) = ∫₀ᵗ λ` by adaptive quadrature to absolute tolerance 1e-10.
pub fn mean_function(rate: &RateProfile, t: f64) -> Result<f64> {
    if !(0.0..=rate.horizon()).contains(&t) {
        return Err(Error::domain(format!("t = {t} outside [0, {}]", rate.horizon())));
    }
    let mut breaks = vec![0.0];
    breaks.extend(rate.breakpoints(0.0, t));
    breaks.push(t);
    let tol = 1e-10 / breaks.len() as f64;
    Ok(breaks
        .windows(2)
        .map(|w| adaptive(|s| rate.value(s), w[0], w[1], tol))
        .sum())
}

/// Poisson probability of `k` events with mean `mu`, in log space.
pub fn poisson_pmf(mu: f64, k: u64) -> f64 {
    if mu == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let kf = k as f64;
    (kf * mu.ln() - mu - ln_gamma(kf + 1.0)).exp()
}

/// `P(π_t - π_s = k)`.
pub fn increment_pmf(rate: &RateProfile, s: f64, t: f64, k: u64) -> Result<f64> {
    if s > t {
        return Err(Error::domain(format!("increment needs s <= t, got s = {s}, t = {t}")));
    }
    if s < 0.0 || t > rate.horizon() {
        return Err(Error::domain(format!(
            "increment ({s}, {t}] outside [0, {}]",
            rate.horizon()
        )));
    }
    Ok(poisson_pmf(rate.mean(t) - rate.mean(s), k))
}

/// Outcome of a chi-square test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Merges adjacent cells from the right until each expected count is >= 5.
fn pool(expected: &[f64], observed: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut e_out = Vec::new();
    let mut o_out: Vec<Vec<f64>> = vec![Vec::new(); observed.len()];
    let mut e_acc = 0.0;
    let mut o_acc = vec![0.0; observed.len()];
    for k in 0..expected.len() {
        e_acc += expected[k];
        for (j, o) in observed.iter().enumerate() {
            o_acc[j] += o[k];
        }
        if e_acc >= 5.0 {
            e_out.push(e_acc);
            for j in 0..observed.len() {
                o_out[j].push(o_acc[j]);
            }
            e_acc = 0.0;
            o_acc.iter_mut().for_each(|v| *v = 0.0);
        }
    }
    if e_acc > 0.0 || o_acc.iter().any(|&v| v > 0.0) {
        if let Some(last) = e_out.last_mut() {
            *last += e_acc;
            for j in 0..observed.len() {
                *o_out[j].last_mut().unwrap() += o_acc[j];
            }
        } else {
            e_out.push(e_acc);
            for j in 0..observed.len() {
                o_out[j].push(o_acc[j]);
            }
        }
    }
    (e_out, o_out)
}

fn tail(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    1.0 - ChiSquared::new(dof as f64).unwrap().cdf(statistic)
}

/// Goodness of fit of count data `counts[k] = #{samples == k}` against the
/// Poisson law with mean `mu`. The last cell absorbs the upper tail.
pub fn poisson_gof(counts: &[u64], mu: f64) -> ChiSquare {
    let n: u64 = counts.iter().sum();
    let kmax = counts.len().max(1);
    let mut probs: Vec<f64> = (0..kmax as u64).map(|k| poisson_pmf(mu, k)).collect();
    let head: f64 = probs[..kmax - 1].iter().sum();
    probs[kmax - 1] = (1.0 - head).max(0.0);
    let expected: Vec<f64> = probs.iter().map(|p| p * n as f64).collect();
    let observed = vec![counts.iter().map(|&c| c as f64).collect::<Vec<_>>()];
    let (e, o) = pool(&expected, &observed);
    let statistic: f64 = e
        .iter()
        .zip(&o[0])
        .filter(|(e, _)| **e > 0.0)
        .map(|(e, o)| (o - e) * (o - e) / e)
        .sum();
    let dof = e.len().saturating_sub(1);
    ChiSquare {
        statistic,
        dof,
        p_value: tail(statistic, dof),
    }
}

/// Two-sample homogeneity test between count histograms of equal length.
pub fn two_sample_chi_square(a: &[u64], b: &[u64]) -> ChiSquare {
    let len = a.len().max(b.len());
    let get = |v: &[u64], k: usize| v.get(k).copied().unwrap_or(0) as f64;
    let na: f64 = a.iter().sum::<u64>() as f64;
    let nb: f64 = b.iter().sum::<u64>() as f64;
    let total = na + nb;
    let pooled: Vec<f64> = (0..len).map(|k| get(a, k) + get(b, k)).collect();
    // Pool on the smaller expected count of the two samples.
    let scale = na.min(nb) / total;
    let expected: Vec<f64> = pooled.iter().map(|c| c * scale).collect();
    let observed = vec![
        (0..len).map(|k| get(a, k)).collect::<Vec<_>>(),
        (0..len).map(|k| get(b, k)).collect::<Vec<_>>(),
    ];
    let (e, o) = pool(&expected, &observed);
    let mut statistic = 0.0;
    for k in 0..e.len() {
        let col = o[0][k] + o[1][k];
        if col == 0.0 {
            continue;
        }
        for (j, nj) in [na, nb].into_iter().enumerate() {
            let exp = nj * col / total;
            statistic += (o[j][k] - exp).powi(2) / exp;
        }
    }
    let dof = e.len().saturating_sub(1);
    ChiSquare {
        statistic,
        dof,
        p_value: tail(statistic, dof),
    }
}

/// Histogram of nonnegative integer samples.
pub fn histogram(samples: impl IntoIterator<Item = usize>) -> Vec<u64> {
    let mut h = Vec::new();
    for k in samples {
        if k >= h.len() {
            h.resize(k + 1, 0);
        }
        h[k] += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::TimeLaw;

    #[test]
    fn mean_function_examples() {
        let r = RateProfile::constant(3.0, 2.0).unwrap();
        assert!((mean_function(&r, 2.0).unwrap() - 6.0).abs() < 1e-12);
        let r = RateProfile::new(TimeLaw::affine(0.0, 2.0), 1.0).unwrap();
        assert!((mean_function(&r, 1.0).unwrap() - 1.0).abs() < 1e-10);
        let z = RateProfile::zero(1.0);
        assert_eq!(mean_function(&z, 0.4).unwrap(), 0.0);
        assert!(mean_function(&z, 1.5).is_err());
        assert!(mean_function(&z, -0.1).is_err());
    }

    #[test]
    fn pmf_examples() {
        let r = RateProfile::new(TimeLaw::affine(0.0, 2.0), 1.0).unwrap();
        let p0 = increment_pmf(&r, 0.0, 1.0, 0).unwrap();
        assert!((p0 - (-1.0f64).exp()).abs() < 1e-12);
        assert_eq!(increment_pmf(&r, 0.5, 0.5, 0).unwrap(), 1.0);
        assert_eq!(increment_pmf(&r, 0.5, 0.5, 1).unwrap(), 0.0);
        assert!(increment_pmf(&r, 0.6, 0.5, 0).is_err());
    }

    #[test]
    fn pmf_sums_to_one() {
        for mu in [0.01, 1.0, 7.5, 60.0, 400.0] {
            let mut total = 0.0;
            let mut k = 0;
            loop {
                let p = poisson_pmf(mu, k);
                total += p;
                if k as f64 > mu && p < 1e-14 {
                    break;
                }
                k += 1;
            }
            assert!((total - 1.0).abs() < 1e-12, "mu={mu}: {total}");
        }
    }

    #[test]
    fn gof_accepts_exact_expectations() {
        let n = 100_000.0;
        let counts: Vec<u64> = (0..12).map(|k| (poisson_pmf(2.0, k) * n).round() as u64).collect();
        let res = poisson_gof(&counts, 2.0);
        assert!(res.p_value > 0.99, "{res:?}");
        let shifted: Vec<u64> = (0..12).map(|k| (poisson_pmf(2.2, k) * n).round() as u64).collect();
        assert!(poisson_gof(&shifted, 2.0).p_value < 1e-6);
    }
}
