//! Quadrature rules shared by the kernel solvers and the process oracles.
//!
//! Gauss–Legendre and Gauss–Hermite nodes are computed once per order by
//! Newton iteration on the three-term recurrences and cached.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Nodes and weights of an n-point rule on its reference interval.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn legendre_nodes(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_n(z), p0 = P_{n-1}(z)
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn hermite_nodes(n: usize) -> Rule {
    // Physicists' weight exp(-x^2), orthonormal recurrence.
    assert!(n >= 1);
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    // ascending order
    nodes.reverse();
    weights.reverse();
    Rule { nodes, weights }
}

fn cached(kind: u8, n: usize) -> &'static Rule {
    static CACHE: OnceLock<Mutex<HashMap<(u8, usize), &'static Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard.entry((kind, n)).or_insert_with(|| {
        let rule = match kind {
            0 => legendre_nodes(n),
            _ => hermite_nodes(n),
        };
        Box::leak(Box::new(rule))
    })
}

/// n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> &'static Rule {
    cached(0, n)
}

/// n-point Gauss–Hermite rule for the weight `exp(-x^2)` on the real line.
pub fn gauss_hermite(n: usize) -> &'static Rule {
    cached(1, n)
}

/// Integrates `f` over `[a, b]` split into the given panel breakpoints, each
/// panel with an `order`-point Gauss–Legendre rule. `breaks` must be sorted
/// and start at `a`, end at `b`.
pub fn composite_gl<F: FnMut(f64) -> f64>(breaks: &[f64], order: usize, mut f: F) -> f64 {
    let rule = gauss_legendre(order);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = 0.0;
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            acc += wt * f(mid + half * x);
        }
        total += half * acc;
    }
    total
}

/// Appends the quadrature nodes and weights of a composite rule to `out`.
pub fn composite_gl_points(breaks: &[f64], order: usize, out: &mut Vec<(f64, f64)>) {
    let rule = gauss_legendre(order);
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            out.push((mid + half * x, half * wt));
        }
    }
}

const KRONROD_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_W: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const GAUSS7_W: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = KRONROD_W[7] * fc;
    let mut gauss = GAUSS7_W[3] * fc;
    for j in 0..7 {
        let dx = h * KRONROD_X[j];
        let s = f(c - dx) + f(c + dx);
        kron += KRONROD_W[j] * s;
        if j % 2 == 1 {
            gauss += GAUSS7_W[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) quadrature to absolute tolerance `tol`.
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (sign, lo, hi) = if a < b { (1.0, a, b) } else { (-1.0, b, a) };
    let mut stack = vec![(lo, hi, tol, 0u32)];
    let mut total = 0.0;
    while let Some((l, r, eps, depth)) = stack.pop() {
        let (val, err) = gk15(&mut f, l, r);
        if err <= eps.max(1e-15 * val.abs()) || depth >= 48 {
            total += val;
        } else {
            let m = 0.5 * (l + r);
            stack.push((l, m, 0.5 * eps, depth + 1));
            stack.push((m, r, 0.5 * eps, depth + 1));
        }
    }
    sign * total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        for n in [1, 2, 5, 8, 16] {
            let rule = gauss_legendre(n);
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} weight sum {s}");
            let deg = 2 * n - 1;
            let approx: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| w * x.powi(deg as i32 - 1))
                .sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((approx - exact).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn hermite_moments() {
        let rule = gauss_hermite(20);
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let m0: f64 = rule.weights.iter().sum();
        let m2: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x * x).sum();
        let m4: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(4)).sum();
        assert!((m0 - sqrt_pi).abs() < 1e-12);
        assert!((m2 - 0.5 * sqrt_pi).abs() < 1e-12);
        assert!((m4 - 0.75 * sqrt_pi).abs() < 1e-12);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn adaptive_handles_kinks() {
        let v = adaptive(|x: f64| if x < 0.3 { 1.0 } else { 2.0 }, 0.0, 1.0, 1e-12);
        assert!((v - 1.7).abs() < 1e-10);
        let v = adaptive(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12);
        assert!((v - 2.0 / 3.0).abs() < 1e-10);
    }
}
