use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson};
use rayon::prelude::*;

use super::path::PoissonPath;
use super::rate::RateProfile;

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of path `index` in the stream keyed by `master`.
pub fn path_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ mix64(index.wrapping_add(0x632B_E59B_D9B4_E019)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    Inversion,
    Thinning,
}

/// Draws `N ~ Poisson(m(T))` uniform points on `(0, m(T)]` and maps them
/// through `m⁻¹`.
pub fn sample_path_inversion(rate: &RateProfile, seed: u64) -> PoissonPath {
    let total = rate.mean(rate.horizon());
    if !(total > 0.0) {
        return PoissonPath::empty(seed);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = Poisson::new(total).expect("positive mean").sample(&mut rng) as usize;
    let mut times: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            rate.inverse_mean(total * (1.0 - u))
        })
        .collect();
    times.sort_by(f64::total_cmp);
    separate_ties(&mut times, rate.horizon());
    PoissonPath::new(times, seed, rate.horizon()).expect("sorted times in (0, T]")
}

/// Lewis–Shedler thinning of a rate-`λ_max` homogeneous process.
pub fn sample_path_thinning(rate: &RateProfile, seed: u64) -> PoissonPath {
    let lmax = rate.lambda_max();
    if !(lmax > 0.0) {
        return PoissonPath::empty(seed);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gap = Exp::new(lmax).expect("positive rate");
    let mut t = 0.0;
    let mut times = Vec::new();
    loop {
        t += gap.sample(&mut rng);
        if t > rate.horizon() {
            break;
        }
        let u: f64 = rng.random();
        if u * lmax < rate.value(t) {
            times.push(t);
        }
    }
    PoissonPath::new(times, seed, rate.horizon()).expect("increasing times in (0, T]")
}

/// Root-finding can return equal times for nearly equal targets; nudge them
/// apart by one ulp so the path stays strictly increasing.
fn separate_ties(times: &mut [f64], horizon: f64) {
    for i in 1..times.len() {
        if times[i] <= times[i - 1] {
            times[i] = f64::from_bits(times[i - 1].to_bits() + 1).min(horizon);
        }
    }
}

/// Samples one path per seed `path_seed(master, i)`, `i < n`, in parallel.
pub fn sample_paths(rate: &RateProfile, master: u64, n: usize, sampler: Sampler) -> Vec<PoissonPath> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let seed = path_seed(master, i);
            match sampler {
                Sampler::Inversion => sample_path_inversion(rate, seed),
                Sampler::Thinning => sample_path_thinning(rate, seed),
            }
        })
        .collect()
}
