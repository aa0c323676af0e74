"""Quick end-to-end check of the compiled extension."""

import json
import math
import tempfile

import heatlift as hl


def main():
    a = hl.Diffusivity.affine(1.0, 0.5, 1.0)
    assert abs(a.cumulative(1.0) - 1.25) < 1e-12

    f1 = hl.Source.gaussian(1, 0.5)
    grid = hl.Grid(1.0, 4, 11.0, 0.05)
    u = hl.solve_heat_1d(a, f1, grid)
    assert u.shape == grid.shape
    assert u.sup() <= f1.sup_bound(1.0) + 1e-6
    sup_row = u.estimates(f1)[0]
    assert sup_row["estimate_id"] == "sup_1d" and sup_row["pass_flag"]

    rate = hl.Rate.constant(2.0, 1.0)
    assert abs(sum(rate.increment_pmf(0.0, 1.0, k) for k in range(40)) - 1.0) < 1e-12
    paths = rate.sample_paths(seed=3, n=2000)
    mean = sum(len(p) for p in paths) / len(paths)
    assert abs(mean - 2.0) < 0.15, mean

    f2 = hl.Source.gaussian(2, 0.3)
    rep = hl.verify_jump_identity(a, f2, rate, 0.5, 1.0, 0.0, 0.0, n_paths=4000, seed=1)
    assert abs(rep["mc_lhs"] - rep["quad_rhs"]) <= 3 * rep["mc_stderr"] + 1e-4, rep

    lat = hl.Grid(1.0, 2, 10.8, 0.1, (10.8, 0.4))
    lim = hl.lift_limit(hl.Diffusivity.constant(1.0, 1.0), hl.Source.gaussian(2, 0.5), lat, [0.4, 0.2, 0.1])
    assert lim["strictly_decreasing"] and lim["observed_order"] > 1.5, lim

    with tempfile.TemporaryDirectory() as out:
        res = hl.run_experiment(json.dumps({"experiment": "solve1d", "dx": 0.1}), out)
        assert res["passed"], res

    rotated = f2.rotated(math.pi / 6)
    assert abs(rotated(0.0, [0.1, 0.2]) - f2(0.0, [0.1, 0.2])) < 1e-12  # isotropic bump

    print(f"heatlift {hl.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
