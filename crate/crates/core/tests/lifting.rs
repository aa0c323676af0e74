mod common;

use common::{averaged_lift, bonferroni_z, single_jump_solution};
use heatlift::heat_core::*;
use heatlift::lifting::*;
use heatlift::poisson::*;
use heatlift::TimeLaw;

const SIGMA: f64 = 0.3;

fn forcing() -> SourceTerm {
    SourceTerm::gaussian_bump(2, SIGMA).unwrap()
}

fn growing_a() -> DiffusivityProfile {
    DiffusivityProfile::new(TimeLaw::affine(1.0, 0.5), 1.0).unwrap()
}

fn big_a(t: f64) -> f64 {
    t + 0.25 * t * t
}

fn lattice_grid(h: f64) -> SpaceTimeGrid {
    SpaceTimeGrid::centered(1.0, 8, 9.5, 0.1, Some((1.5, h))).unwrap()
}

#[test]
fn single_jump_matches_two_piece_duhamel() {
    let a = growing_a();
    let f = forcing();
    let h = 0.5;
    let path = PoissonPath::new(vec![0.4], 0, 1.0).unwrap();
    let grid = SpaceTimeGrid::centered(1.0, 4, 9.5, 0.5, Some((1.0, h))).unwrap();
    let sol = solve_randomized_1d(&a, &f, &path, h, &grid).unwrap();
    let ys = grid.y_nodes().unwrap();
    for (n, &t) in grid.t_nodes().iter().enumerate() {
        for (i, &x) in grid.x_nodes().iter().enumerate().filter(|(_, x)| x.abs() <= 1.0) {
            for (j, &y) in ys.iter().enumerate() {
                let want = single_jump_solution(SIGMA, &big_a, 0.4, h, t, x, y);
                let got = sol.field().values()[[n, i, j]];
                assert!((got - want).abs() < 1e-8, "t={t} x={x} y={y}: {got} vs {want}");
            }
        }
    }
    let off = sol.u_at(0.9, 0.13, -0.07);
    let want = single_jump_solution(SIGMA, &big_a, 0.4, h, 0.9, 0.13, -0.07);
    assert!((off - want).abs() < 1e-8);
}

#[test]
fn jump_integral_of_single_jump() {
    let a = growing_a();
    let f = forcing();
    let h = 0.25;
    let path = PoissonPath::new(vec![0.6], 0, 1.0).unwrap();
    let grid = SpaceTimeGrid::centered(1.0, 2, 9.5, 0.5, Some((0.5, h))).unwrap();
    let sol = solve_randomized_1d(&a, &f, &path, h, &grid).unwrap();
    // one jump at s = 0.6 with pre-jump count 0
    let u = |y: f64| single_jump_solution(SIGMA, &big_a, 0.6, h, 0.6, 0.0, y);
    let want = u(h) - u(0.0);
    let got = jump_integral(&sol, h, 0.0, 0.0);
    assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    assert_eq!(jump_integral_until(&sol, h, 0.0, 0.0, 0.5), 0.0);
}

fn oracle_rates() -> Vec<(&'static str, RateProfile, Box<dyn Fn(f64) -> f64>)> {
    vec![
        ("constant", RateProfile::constant(1.0, 1.0).unwrap(), Box::new(|t| t)),
        (
            "linear",
            RateProfile::new(TimeLaw::affine(0.0, 2.0), 1.0).unwrap(),
            Box::new(|t| t * t),
        ),
    ]
}

#[test]
fn lattice_fields_match_averaged_oracles() {
    let a = growing_a();
    let f = forcing();
    let h = 0.25;
    let grid = lattice_grid(h);
    let ys = grid.y_nodes().unwrap();
    let xs = grid.x_nodes();
    for (name, rate, mean) in oracle_rates() {
        let v = solve_lattice_v(&a, &f, &rate, h, &grid).unwrap();
        let w = solve_lattice_w(&a, &f, &rate, h, &grid).unwrap();
        for n in [4usize, 8] {
            let t = grid.t_nodes()[n];
            for i in [95usize, 97, 100] {
                for j in [2usize, 6, 9] {
                    let (x, y) = (xs[i], ys[j]);
                    let ov = averaged_lift(SIGMA, &big_a, &*mean, h, false, t, x, y);
                    let ow = averaged_lift(SIGMA, &big_a, &*mean, h, true, t, x, y);
                    let gv = v.values()[[n, i, j]];
                    let gw = w.values()[[n, i, j]];
                    assert!((gv - ov).abs() < 2e-5, "{name} v t={t} x={x} y={y}: {gv} vs {ov}");
                    assert!((gw - ow).abs() < 2e-5, "{name} w t={t} x={x} y={y}: {gw} vs {ow}");
                }
            }
        }
    }
}

#[test]
fn monte_carlo_fields_agree_with_lattice() {
    let a = growing_a();
    let f = forcing();
    let h = 0.5;
    let rate = RateProfile::new(TimeLaw::affine(0.5, 1.0), 1.0).unwrap();
    let cfg = LiftConfig::new(h, Coupling::Custom(rate.clone()), 4000, 17, 4.0).unwrap();
    // the Monte Carlo runs on a coarse x grid; the lattice needs a resolved one
    let grid = SpaceTimeGrid::centered(1.0, 2, 9.0, 0.6, Some((1.0, h))).unwrap();
    let fine = SpaceTimeGrid::centered(1.0, 2, 9.0, 0.1, Some((1.0, h))).unwrap();
    assert!(solve_lattice_v(&a, &f, &rate, h, &grid).is_err());
    let lv = solve_lattice_v(&a, &f, &rate, h, &fine).unwrap();
    let lw = solve_lattice_w(&a, &f, &rate, h, &fine).unwrap();
    let mv = lift_expectation_v(&a, &f, &rate, h, &cfg, &grid).unwrap();
    let mw = lift_expectation_w(&a, &f, &rate, h, &cfg, &grid).unwrap();
    let fine_index = |i: usize| {
        let x = grid.x_nodes()[i];
        let k = fine.x_nodes().iter().position(|&xf| (xf - x).abs() < 1e-9);
        k.expect("coarse node missing from fine grid")
    };
    let probes = [(1usize, 14usize, 2usize), (2, 14, 2), (2, 13, 1), (2, 15, 4), (1, 12, 0)];
    let z = bonferroni_z(0.01, 2 * probes.len());
    for &(n, i, j) in &probes {
        let k = fine_index(i);
        for (lat, mc) in [(&lv, &mv), (&lw, &mw)] {
            let gap = (lat.values()[[n, k, j]] - mc.mean.values()[[n, i, j]]).abs();
            let se = mc.stderr.values()[[n, i, j]];
            assert!(gap <= z * se + 1e-4, "node {n},{i},{j}: gap {gap} se {se}");
        }
    }
    assert_eq!(mv.exit_fraction, 0.0);
}

#[test]
fn monte_carlo_is_deterministic() {
    let a = DiffusivityProfile::constant(1.0, 0.5).unwrap();
    let f = forcing();
    let h = 0.5;
    let rate = RateProfile::constant(2.0, 0.5).unwrap();
    let cfg = LiftConfig::new(h, Coupling::Custom(rate.clone()), 700, 3, 4.0).unwrap();
    let grid = SpaceTimeGrid::centered(0.5, 1, 7.0, 1.0, Some((0.5, h))).unwrap();
    let m1 = lift_expectation_w(&a, &f, &rate, h, &cfg, &grid).unwrap();
    let m2 = lift_expectation_w(&a, &f, &rate, h, &cfg, &grid).unwrap();
    assert_eq!(m1.mean.values(), m2.mean.values());
    assert_eq!(m1.stderr.values(), m2.stderr.values());
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let m3 = pool.install(|| lift_expectation_w(&a, &f, &rate, h, &cfg, &grid).unwrap());
    assert_eq!(m1.mean.values(), m3.mean.values());
}

#[test]
fn lattice_w_satisfies_its_equation() {
    let a = growing_a();
    let f = SourceTerm::single(
        TimeLaw::affine(1.0, -0.5),
        Spatial::Product {
            x: Profile1d::gaussian(0.5),
            y: Profile1d::gaussian(0.5),
        },
    )
    .unwrap();
    let h = 0.25;
    let rate = RateProfile::constant(2.0, 1.0).unwrap();
    let grid = SpaceTimeGrid::centered(1.0, 32, 10.5, 0.05, Some((2.0, h))).unwrap();
    let w = solve_lattice_w(&a, &f, &rate, h, &grid).unwrap();
    let r = pde_residual(&w, &a, &f, &Equation::LatticeW { h, rate }).unwrap();
    let bound = 10.0 * (grid.dt() + grid.dx().powi(2)) * f.sup_bound(1.0);
    assert!(r < bound, "residual {r} vs {bound}");
}

#[test]
fn identity_holds_and_vanishes_without_jumps() {
    let a = growing_a();
    let f = forcing();
    for (rate, h) in [
        (RateProfile::zero(1.0), 0.25),
        (RateProfile::constant(1.0, 1.0).unwrap(), 0.5),
    ] {
        let cfg = LiftConfig::new(h, Coupling::Custom(rate.clone()), 3000, 1, 4.0).unwrap();
        let r = verify_jump_identity(&a, &f, &rate, h, &cfg, 1.0, 0.1, -0.2).unwrap();
        assert!(r.passes(1e-4), "{r:?}");
        if rate.is_zero() {
            assert_eq!((r.mc_lhs, r.quad_rhs), (0.0, 0.0));
        }
    }
}

#[test]
fn fixed_step_dyadic_sum_converges() {
    let a = DiffusivityProfile::constant(1.0, 1.0).unwrap();
    let f = forcing();
    let rate = RateProfile::constant(1.0, 1.0).unwrap();
    let cfg = LiftConfig::new(0.25, Coupling::Custom(rate.clone()), 2000, 4, 4.0).unwrap();
    let d = dyadic_study(&a, &f, &rate, 0.25, &cfg, 1.0, 0.0, 0.0, &[2, 6, 10]).unwrap();
    assert!(d.gaps[0] > d.gaps[2]);
    assert!(d.relative_gap(10).unwrap() < 1e-2);
}
