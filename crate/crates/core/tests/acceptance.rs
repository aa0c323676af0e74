//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use heatlift::heat_core::*;
use heatlift::lifting::*;
use heatlift::norms::*;
use heatlift::poisson::*;
use heatlift::{Result, TimeLaw};

const ALPHAS: [f64; 3] = [0.3, 0.5, 0.7];
const PS: [f64; 2] = [2.0, 4.0];
const DXS: [f64; 3] = [0.04, 0.02, 0.01];
const DRIFT_TOL: f64 = 0.10;

fn growing_a(horizon: f64) -> DiffusivityProfile {
    DiffusivityProfile::new(TimeLaw::affine(1.0, 0.5), horizon).unwrap()
}

/// Solver outputs on `[0, 1]` whose sup is checked against the forcing.
#[derive(Default)]
struct SupLog {
    rows: Vec<(String, f64, f64)>,
}

impl SupLog {
    fn record(&mut self, name: impl Into<String>, u: &ScalarField, f: &SourceTerm) {
        if (u.grid().horizon() - 1.0).abs() < 1e-12 {
            self.rows.push((name.into(), sup_norm(u), f.sup_bound(1.0)));
        }
    }
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { pass, detail })
}

fn jump_identity_matrix() -> Result<Verdict> {
    let f = SourceTerm::gaussian_bump(2, 0.3)?;
    let rates = [
        ("0.5", TimeLaw::constant(0.5)),
        ("1", TimeLaw::constant(1.0)),
        ("2t", TimeLaw::affine(0.0, 2.0)),
    ];
    let diffusivities = [("1", TimeLaw::constant(1.0)), ("1+t/2", TimeLaw::affine(1.0, 0.5))];
    let mut worst = f64::NEG_INFINITY;
    let mut failures = Vec::new();
    let mut seed = 100;
    for (rn, rl) in &rates {
        let rate = RateProfile::new(rl.clone(), 1.0)?;
        for h in [0.25, 0.5] {
            for (an, al) in &diffusivities {
                let a = DiffusivityProfile::new(al.clone(), 1.0)?;
                seed += 1;
                let cfg = LiftConfig::new(h, Coupling::Custom(rate.clone()), 10_000, seed, 4.0)?;
                let r = verify_jump_identity(&a, &f, &rate, h, &cfg, 1.0, 0.0, 0.0)?;
                let allowed = 3.0 * r.mc_stderr + 1e-4;
                worst = worst.max(r.gap() / allowed);
                if !r.passes(1e-4) {
                    failures.push(format!("lambda={rn} h={h} a={an}"));
                }
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!("12 configs, worst gap/allowed {worst:.3}; failing: {failures:?}"),
    )
}

fn lift_limit(log: &mut SupLog) -> Result<Verdict> {
    let f = SourceTerm::gaussian_bump(2, 0.5)?;
    let hs = [0.4, 0.2, 0.1];
    let grid = SpaceTimeGrid::centered(1.0, 2, 10.8, 0.1, Some((10.8, 0.4)))?;
    let mut pass = true;
    let mut parts = Vec::new();
    for (an, a) in [("1", DiffusivityProfile::constant(1.0, 1.0)?), ("1+t/2", growing_a(1.0))] {
        let good = dimension_lift_limit(&a, &f, &grid, &hs, &Coupling::LambdaEqAOverH2)?;
        let order = good.observed_order.unwrap_or(f64::NAN);
        let ok = good.errors_strictly_decreasing() && order >= 1.5;
        log.record(format!("planar reference a={an}"), &good.reference, &f);
        for (h, w) in hs.iter().zip(&good.fields) {
            log.record(format!("lattice w a/h^2 h={h} a={an}"), w, &f);
        }
        let lit = dimension_lift_limit(&a, &f, &grid, &hs, &Coupling::LambdaEqH2A)?;
        for (h, w) in hs.iter().zip(&lit.fields) {
            log.record(format!("lattice w h^2 a h={h} a={an}"), w, &f);
        }
        let e = &lit.errors_vs_reference;
        // with a vanishing coupling the lattice loses its y diffusion
        let stalls = !lit.errors_strictly_decreasing() || e[2] > 0.5 * e[0];
        pass &= ok && stalls;
        parts.push(format!(
            "a={an}: a/h^2 errors {:.2e} order {order:.2}; h^2 a errors {:.2e}",
            Fmt(&good.errors_vs_reference),
            Fmt(e)
        ));
    }
    verdict(pass, parts.join("; "))
}

struct Fmt<'a>(&'a [f64]);

impl std::fmt::LowerExp for Fmt<'_> {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(fm, ", ")?;
            }
            std::fmt::LowerExp::fmt(v, fm)?;
        }
        write!(fm, "]")
    }
}

fn sup_bounds_extra(log: &mut SupLog) -> Result<()> {
    let a = growing_a(1.0);
    let f = SourceTerm::gaussian_bump(2, 0.3)?;
    let h = 0.25;
    let rate = RateProfile::new(TimeLaw::affine(0.5, 1.0), 1.0)?;
    let grid = SpaceTimeGrid::centered(1.0, 4, 9.5, 0.1, Some((1.5, h)))?;
    log.record("lattice v", &solve_lattice_v(&a, &f, &rate, h, &grid)?, &f);
    log.record("lattice w", &solve_lattice_w(&a, &f, &rate, h, &grid)?, &f);
    let coarse = SpaceTimeGrid::centered(1.0, 2, 9.0, 0.6, Some((1.0, 0.5)))?;
    let cfg = LiftConfig::new(0.5, Coupling::Custom(rate.clone()), 1000, 5, 4.0)?;
    let mv = lift_expectation_v(&a, &f, &rate, 0.5, &cfg, &coarse)?;
    let mw = lift_expectation_w(&a, &f, &rate, 0.5, &cfg, &coarse)?;
    log.record("monte carlo v", &mv.mean, &f);
    log.record("monte carlo w", &mw.mean, &f);
    let planar = SpaceTimeGrid::centered(1.0, 4, 9.0, 0.1, Some((9.0, 0.1)))?;
    log.record("planar solve", &solve_heat_2d_reference(&a, &f, &planar)?, &f);
    Ok(())
}

fn sup_bounds(log: &SupLog) -> Result<Verdict> {
    let mut worst = f64::NEG_INFINITY;
    let mut failures = Vec::new();
    for (name, sup_u, sup_f) in &log.rows {
        let allowed = sup_f * (1.0 + 1e-6) + 1e-6;
        worst = worst.max(sup_u / allowed);
        if sup_u > &allowed {
            failures.push(name.clone());
        }
    }
    verdict(
        failures.is_empty() && !log.rows.is_empty(),
        format!(
            "{} outputs, worst sup|u|/allowed {worst:.4}; failing: {failures:?}",
            log.rows.len()
        ),
    )
}

/// Ratios per refinement level for one estimate and one exponent.
fn series(
    fields: &[ScalarField],
    f: &SourceTerm,
    id: EstimateId,
    exponent: f64,
) -> Result<Vec<f64>> {
    fields
        .iter()
        .map(|u| {
            let (alpha, p) = if matches!(id, EstimateId::Lp1d | EstimateId::Lp2d) {
                (0.5, exponent)
            } else {
                (exponent, 2.0)
            };
            Ok(estimate_report(u, f, alpha, p, &[id])?[0].measured_ratio)
        })
        .collect()
}

fn drift_check(
    fields: &[ScalarField],
    f: &SourceTerm,
    id: EstimateId,
    exponents: &[f64],
) -> Result<(bool, String)> {
    let mut pass = true;
    let mut parts = Vec::new();
    for &e in exponents {
        let r = series(fields, f, id, e)?;
        let drift = refinement_drift(&r);
        pass &= r.iter().all(|x| x.is_finite() && *x > 0.0) && drift < DRIFT_TOL;
        parts.push(format!("{}({e}) drift {:.2}%", id.name(), 100.0 * drift));
    }
    Ok((pass, parts.join(", ")))
}

struct Refinement {
    f1: SourceTerm,
    line: Vec<ScalarField>,
    f2: SourceTerm,
    plane: Vec<ScalarField>,
}

fn refinement(log: &mut SupLog) -> Result<Refinement> {
    let f1 = SourceTerm::gaussian_bump(1, 0.5)?;
    let f2 = SourceTerm::gaussian_bump(2, 0.5)?;
    let mut line = Vec::new();
    let mut plane = Vec::new();
    for dx in DXS {
        let g1 = SpaceTimeGrid::centered(1.0, 4, 11.0, dx, None)?;
        let u = solve_heat_1d(&growing_a(1.0), &f1, &g1)?;
        log.record(format!("line solve dx={dx}"), &u, &f1);
        line.push(u);
        let g2 = SpaceTimeGrid::centered(0.25, 2, 7.4, dx, Some((7.4, dx)))?;
        plane.push(solve_heat_2d_reference(&growing_a(0.25), &f2, &g2)?);
    }
    Ok(Refinement { f1, line, f2, plane })
}

fn holder_stability(r: &Refinement) -> Result<Verdict> {
    let (p1, d1) = drift_check(&r.line, &r.f1, EstimateId::Holder1d, &ALPHAS)?;
    let (p2, d2) = drift_check(&r.plane, &r.f2, EstimateId::HolderHessian2d, &ALPHAS)?;
    verdict(p1 && p2, format!("{d1}; {d2}"))
}

fn lp_stability(r: &Refinement) -> Result<Verdict> {
    let (p1, d1) = drift_check(&r.line, &r.f1, EstimateId::Lp1d, &PS)?;
    let (p2, d2) = drift_check(&r.plane, &r.f2, EstimateId::Lp2d, &PS)?;
    verdict(p1 && p2, format!("{d1}; {d2}"))
}

fn rotation_invariance(r: &Refinement) -> Result<Verdict> {
    let angles = [0.0, 30.0, 45.0, 60.0, 90.0];
    let v = &r.plane[1];
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in ALPHAS {
        let d = directional_holder_report(v, &r.f2, alpha, &angles)?;
        let spread = d.spread();
        pass &= spread.is_finite() && spread < 0.15;
        parts.push(format!("alpha {alpha} spread {:.3}%", 100.0 * spread));
    }
    let mut iso = 0.0f64;
    for k in 0..720 {
        let s = rotation_map(Direction::from_degrees(0.5 * k as f64));
        iso = iso.max((s.jacobian().abs() - 1.0).abs());
        for p in [[1.0, 0.0], [0.3, -2.0], [-4.5, 1.25]] {
            let q = s.apply(p);
            iso = iso.max((q[0].hypot(q[1]) - p[0].hypot(p[1])).abs());
            let back = s.inverse(q);
            iso = iso.max((back[0] - p[0]).abs().max((back[1] - p[1]).abs()));
        }
    }
    pass &= iso <= 1e-12;
    parts.push(format!("isometry/Jacobian max error {iso:.1e}"));
    verdict(pass, parts.join(", "))
}

fn process_law() -> Result<Verdict> {
    let n = 100_000;
    let rate = RateProfile::new(TimeLaw::affine(0.5, 2.0), 1.0)?;
    let mut pass = true;
    let mut parts = Vec::new();
    let mut counts = Vec::new();
    for (sampler, seed) in [(Sampler::Inversion, 71), (Sampler::Thinning, 72)] {
        let paths = sample_paths(&rate, seed, n, sampler);
        for (s, t) in [(0.0, 1.0), (0.25, 0.75)] {
            let c = histogram(paths.iter().map(|p| p.increment(s, t)));
            let chi = poisson_gof(&c, rate.mean(t) - rate.mean(s));
            pass &= chi.p_value > 0.01;
            parts.push(format!("{sampler:?} ({s},{t}] p={:.3}", chi.p_value));
        }
        counts.push(histogram(paths.iter().map(|p| p.increment(0.0, 1.0))));
    }
    let two = two_sample_chi_square(&counts[0], &counts[1]);
    pass &= two.p_value > 0.01;
    parts.push(format!("two-sample p={:.3}", two.p_value));
    verdict(pass, parts.join(", "))
}

fn dyadic() -> Result<Verdict> {
    let f = SourceTerm::gaussian_bump(2, 0.3)?;
    let levels = [4, 8, 12];
    let mut worst = 0.0f64;
    let mut pass = true;
    let mut seed = 300;
    for rl in [TimeLaw::constant(0.5), TimeLaw::constant(1.0), TimeLaw::affine(0.0, 2.0)] {
        let rate = RateProfile::new(rl, 1.0)?;
        for h in [0.25, 0.5] {
            for al in [TimeLaw::constant(1.0), TimeLaw::affine(1.0, 0.5)] {
                let a = DiffusivityProfile::new(al, 1.0)?;
                seed += 1;
                let cfg = LiftConfig::new(h, Coupling::Custom(rate.clone()), 2000, seed, 4.0)?;
                let d = dyadic_study(&a, &f, &rate, h, &cfg, 1.0, 0.0, 0.0, &levels)?;
                let rel = d.relative_gap(12).unwrap();
                worst = worst.max(rel);
                pass &= rel < 1e-3 && d.gaps[2] <= d.gaps[0];
            }
        }
    }
    verdict(pass, format!("12 configs, worst gap/sup|g| at n=12: {worst:.2e}"))
}

fn sine_oracle(log: &mut SupLog) -> Result<Verdict> {
    let a = DiffusivityProfile::constant(1.0, 1.0)?;
    let f = SourceTerm::stationary(Spatial::Line {
        x: Profile1d::SinCutoff {
            plateau: 10.0,
            taper: 2.0,
        },
    })?;
    let g = SpaceTimeGrid::centered(1.0, 8, 18.5, 0.25, None)?;
    let u = solve_heat_1d(&a, &f, &g)?;
    log.record("sine solve", &u, &f);
    let mut worst = 0.0f64;
    for (n, &t) in g.t_nodes().iter().enumerate() {
        for (i, &x) in g.x_nodes().iter().enumerate() {
            if x.abs() <= 4.0 {
                let want = (1.0 - (-t).exp()) * x.sin();
                worst = worst.max((u.values()[[n, i, 0]] - want).abs());
            }
        }
    }
    verdict(worst < 1e-3, format!("max interior error {worst:.2e}"))
}

fn report(k: usize, title: &str, started: Instant, v: Result<Verdict>) -> bool {
    let secs = started.elapsed().as_secs_f64();
    let (pass, detail) = match v {
        Ok(v) => (v.pass, v.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("{tag} criterion {k}: {title} [{secs:.1}s] {detail}");
    pass
}

fn main() -> ExitCode {
    let mut log = SupLog::default();
    let mut ok = true;

    let t = Instant::now();
    ok &= report(1, "jump identity matrix", t, jump_identity_matrix());

    let t = Instant::now();
    ok &= report(2, "dimension-lift limit", t, lift_limit(&mut log));

    let t = Instant::now();
    let refined = refinement(&mut log);
    let refine_secs = t.elapsed().as_secs_f64();
    println!("  refinement solves took {refine_secs:.1}s");

    let t = Instant::now();
    let sine = sine_oracle(&mut log);
    let extra = sup_bounds_extra(&mut log);
    let sup = match (&refined, &extra) {
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
        _ => sup_bounds(&log),
    };
    ok &= report(3, "sup bounds", t, sup);

    let fail = |e: &heatlift::Error| Err(e.clone());
    let t = Instant::now();
    let v = refined.as_ref().map_or_else(fail, holder_stability);
    ok &= report(4, "Hölder ratio refinement stability", t, v);

    let t = Instant::now();
    let v = refined.as_ref().map_or_else(fail, rotation_invariance);
    ok &= report(5, "rotation invariance", t, v);

    let t = Instant::now();
    let v = refined.as_ref().map_or_else(fail, lp_stability);
    ok &= report(6, "L^p ratio refinement stability", t, v);

    let t = Instant::now();
    ok &= report(7, "process law", t, process_law());

    let t = Instant::now();
    ok &= report(8, "dyadic approximation", t, dyadic());

    let t = Instant::now();
    ok &= report(9, "analytic 1D oracle", t, sine);

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
