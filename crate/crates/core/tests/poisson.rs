use heatlift::poisson::*;
use heatlift::TimeLaw;
use proptest::prelude::*;

const LEVEL: f64 = 0.01;

fn rates() -> Vec<(&'static str, RateProfile)> {
    vec![
        ("constant", RateProfile::constant(1.5, 1.0).unwrap()),
        ("linear", RateProfile::new(TimeLaw::affine(0.0, 2.0), 1.0).unwrap()),
        (
            "steps",
            RateProfile::new(
                TimeLaw::PiecewiseConstant {
                    breaks: vec![0.3, 0.7],
                    values: vec![0.5, 4.0, 1.0],
                },
                1.0,
            )
            .unwrap(),
        ),
    ]
}

fn increments(paths: &[PoissonPath], s: f64, t: f64) -> Vec<u64> {
    histogram(paths.iter().map(|p| p.increment(s, t)))
}

#[test]
fn increments_follow_the_poisson_law() {
    let windows = [(0.0, 1.0), (0.2, 0.6), (0.5, 0.9)];
    let mut tests = Vec::new();
    for (name, rate) in rates() {
        for sampler in [Sampler::Inversion, Sampler::Thinning] {
            let paths = sample_paths(&rate, 11, 20_000, sampler);
            for &(s, t) in &windows {
                let mu = rate.mean(t) - rate.mean(s);
                let chi = poisson_gof(&increments(&paths, s, t), mu);
                tests.push((format!("{name} {sampler:?} ({s},{t}]"), chi));
            }
        }
    }
    let cut = LEVEL / tests.len() as f64;
    for (label, chi) in &tests {
        assert!(chi.p_value > cut, "{label}: {chi:?}");
    }
}

#[test]
fn samplers_agree() {
    for (name, rate) in rates() {
        let a = sample_paths(&rate, 5, 20_000, Sampler::Inversion);
        let b = sample_paths(&rate, 6, 20_000, Sampler::Thinning);
        let chi = two_sample_chi_square(&increments(&a, 0.0, 1.0), &increments(&b, 0.0, 1.0));
        assert!(chi.p_value > LEVEL / 3.0, "{name}: {chi:?}");
    }
}

#[test]
fn disjoint_increments_are_uncorrelated() {
    let rate = RateProfile::new(TimeLaw::affine(0.5, 2.0), 1.0).unwrap();
    let n = 40_000;
    for sampler in [Sampler::Inversion, Sampler::Thinning] {
        let paths = sample_paths(&rate, 9, n, sampler);
        let a: Vec<f64> = paths.iter().map(|p| p.increment(0.0, 0.4) as f64).collect();
        let b: Vec<f64> = paths.iter().map(|p| p.increment(0.4, 1.0) as f64).collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (ma, mb) = (mean(&a), mean(&b));
        let cov = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / n as f64;
        let va = a.iter().map(|x| (x - ma).powi(2)).sum::<f64>() / n as f64;
        let vb = b.iter().map(|y| (y - mb).powi(2)).sum::<f64>() / n as f64;
        let r = cov / (va * vb).sqrt();
        // |r| sqrt(n) is approximately standard normal under independence
        assert!(r.abs() * (n as f64).sqrt() < 3.5, "{sampler:?}: r = {r}");
    }
}

#[test]
fn sampling_is_reproducible() {
    let rate = RateProfile::constant(3.0, 1.0).unwrap();
    for sampler in [Sampler::Inversion, Sampler::Thinning] {
        let a = sample_paths(&rate, 42, 500, sampler);
        let b = sample_paths(&rate, 42, 500, sampler);
        assert_eq!(a, b);
        let c = sample_paths(&rate, 43, 500, sampler);
        assert_ne!(a, c);
        // path i does not depend on how many paths are drawn
        let short = sample_paths(&rate, 42, 10, sampler);
        assert_eq!(&a[..10], &short[..]);
    }
}

#[test]
fn zero_rate_never_jumps() {
    let rate = RateProfile::zero(1.0);
    for sampler in [Sampler::Inversion, Sampler::Thinning] {
        assert!(sample_paths(&rate, 1, 100, sampler).iter().all(|p| p.is_empty()));
    }
    assert_eq!(increment_pmf(&rate, 0.0, 1.0, 0).unwrap(), 1.0);
}

#[test]
fn pmf_matches_direct_recursion() {
    let rate = RateProfile::new(TimeLaw::affine(1.0, 3.0), 1.0).unwrap();
    let mu = rate.mean(0.8) - rate.mean(0.1);
    let mut p = (-mu).exp();
    let mut total = 0.0;
    for k in 0..40u64 {
        if k > 0 {
            p *= mu / k as f64;
        }
        let got = increment_pmf(&rate, 0.1, 0.8, k).unwrap();
        assert!((got - p).abs() <= 1e-11 * p);
        total += got;
    }
    assert!((total - 1.0).abs() < 1e-12);
    assert!(increment_pmf(&rate, 0.8, 0.1, 0).is_err());
}

#[test]
fn adaptive_mean_matches_exact_mean() {
    for (_, rate) in rates() {
        for t in [0.0, 0.25, 0.5, 0.99, 1.0] {
            assert!((mean_function(&rate, t).unwrap() - rate.mean(t)).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn paths_are_counting_processes(seed in any::<u64>(), lam in 0.0f64..20.0, slope in 0.0f64..10.0) {
        let rate = RateProfile::new(TimeLaw::affine(lam, slope), 1.0).unwrap();
        for p in [sample_path_inversion(&rate, seed), sample_path_thinning(&rate, seed)] {
            let times = p.jump_times();
            prop_assert!(times.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(times.iter().all(|&t| t > 0.0 && t <= 1.0));
            let mut last = 0;
            for k in 0..=20 {
                let t = k as f64 / 20.0;
                let c = p.count_at(t, false);
                prop_assert!(c >= last);
                prop_assert!(p.count_at(t, true) <= c);
                last = c;
            }
            prop_assert_eq!(p.increment(0.2, 0.7), p.count_at(0.7, false) - p.count_at(0.2, false));
        }
    }

    #[test]
    fn dump_and_reload(seed in any::<u64>()) {
        let rate = RateProfile::constant(5.0, 1.0).unwrap();
        let paths = sample_paths(&rate, seed, 8, Sampler::Inversion);
        let mut buf = Vec::new();
        write_paths(&mut buf, &paths).unwrap();
        let back = read_paths(&buf[..], 1.0).unwrap();
        for (a, b) in paths.iter().zip(&back) {
            prop_assert_eq!(a.jump_times(), b.jump_times());
        }
    }

    #[test]
    fn inverse_mean_inverts(target_frac in 0.001f64..1.0, slope in 0.0f64..5.0) {
        let rate = RateProfile::new(TimeLaw::affine(0.2, slope), 1.0).unwrap();
        let target = target_frac * rate.mean(1.0);
        let t = rate.inverse_mean(target);
        prop_assert!((rate.mean(t) - target).abs() < 1e-9);
    }
}
