//! Independent reference values for the integration tests. Nothing here
//! calls the library's kernels or quadrature rules.
#![allow(dead_code)]

/// Heat smoothing of `exp(-x²/(2σ²))` for heat time `tau`.
pub fn gauss_smooth(sigma: f64, tau: f64, x: f64) -> f64 {
    let v = sigma * sigma + 2.0 * tau;
    sigma / v.sqrt() * (-x * x / (2.0 * v)).exp()
}

/// Composite Simpson rule with `n` (even) intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// Poisson weights `P(N = k)` by the recursion `p_k = p_{k-1} mu / k`,
/// truncated once the tail is negligible.
pub fn poisson_weights(mu: f64) -> Vec<f64> {
    let mut w = vec![(-mu).exp()];
    let kmax = (mu + 12.0 * mu.sqrt() + 20.0) as usize;
    for k in 1..=kmax {
        let p = w[k - 1] * mu / k as f64;
        w.push(p);
    }
    w
}

/// Law of `N1 - N2` for independent Poisson(mu) counts, indexed from
/// `-K` to `K`; returns `(K, weights)`.
pub fn skellam_weights(mu: f64) -> (usize, Vec<f64>) {
    let p = poisson_weights(mu);
    let k = p.len() - 1;
    let mut out = vec![0.0; 2 * k + 1];
    for (i, pi) in p.iter().enumerate() {
        for (j, pj) in p.iter().enumerate() {
            out[i + k - j] += pi * pj;
        }
    }
    (k, out)
}

/// Expected lifted solution for the stationary product Gaussian forcing of
/// width `sigma`, time change `big_a`, mean function `mean` and jump `h`:
/// `∫₀ᵗ Σ_k P(increment over (s, t] = k) g(τ, x) g(0, y + h k) ds`, with
/// `τ = A(t) - A(s)`; only x diffuses. With `centered` the increment is the difference of
/// two independent copies.
#[allow(clippy::too_many_arguments)]
pub fn averaged_lift(
    sigma: f64,
    big_a: &dyn Fn(f64) -> f64,
    mean: &dyn Fn(f64) -> f64,
    h: f64,
    centered: bool,
    t: f64,
    x: f64,
    y: f64,
) -> f64 {
    let integrand = |s: f64| {
        let tau = big_a(t) - big_a(s);
        let mu = mean(t) - mean(s);
        let gx = gauss_smooth(sigma, tau, x);
        let shifted = |k: i64| gauss_smooth(sigma, 0.0, y + h * k as f64);
        if centered {
            let (kk, w) = skellam_weights(mu);
            w.iter()
                .enumerate()
                .map(|(i, p)| p * shifted(i as i64 - kk as i64))
                .sum::<f64>()
                * gx
        } else {
            poisson_weights(mu)
                .iter()
                .enumerate()
                .map(|(k, p)| p * shifted(k as i64))
                .sum::<f64>()
                * gx
        }
    };
    simpson(integrand, 0.0, t, 400)
}

/// Randomized solution for a path with a single jump at `tau` and the
/// forcing `f(t, x, y - h π_t)` with stationary product Gaussian `f`.
pub fn single_jump_solution(
    sigma: f64,
    big_a: &dyn Fn(f64) -> f64,
    jump: f64,
    h: f64,
    t: f64,
    x: f64,
    y: f64,
) -> f64 {
    let g = |s: f64, shift: f64| {
        let tau = big_a(t) - big_a(s);
        gauss_smooth(sigma, tau, x) * gauss_smooth(sigma, 0.0, y - shift)
    };
    let before = simpson(|s| g(s, 0.0), 0.0, jump.min(t), 2000);
    let after = if t > jump {
        simpson(|s| g(s, h), jump, t, 2000)
    } else {
        0.0
    };
    before + after
}

/// Two-sided normal quantile for a Bonferroni-corrected family of `m`
/// tests at overall level `alpha`, by bisection on `erfc`.
pub fn bonferroni_z(alpha: f64, m: usize) -> f64 {
    let target = alpha / m as f64;
    let (mut lo, mut hi) = (0.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if erfc(mid / std::f64::consts::SQRT_2) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Complementary error function (Numerical Recipes erfcc, |rel err| < 1.2e-7).
pub fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let r = t
        * (-z * z - 1.26551223
            + t * (1.00002368
                + t * (0.37409196
                    + t * (0.09678418
                        + t * (-0.18628806
                            + t * (0.27886807
                                + t * (-1.13520398
                                    + t * (1.48851587 + t * (-0.82215223 + t * 0.17087277)))))))))
            .exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        assert!((poisson_weights(37.0).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let (k, w) = skellam_weights(3.0);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((w[k + 1] - w[k - 1]).abs() < 1e-15);
    }
}
