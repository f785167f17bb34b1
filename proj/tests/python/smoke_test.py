"""Python binding smoke tests: build a model, simulate, check the basics."""

import math
import sys

import _powvar as pv


def approx(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def main():
    # moments and rho
    assert approx(pv.abs_moment(2.0), 1.0)
    assert approx(pv.abs_moment(4.0), 3.0)
    assert approx(pv.rho("power:r=2", 1.3), 1.69)
    assert approx(pv.eval_function("power_cutoff:r=1.5,eta=1", 2.5), 0.0)

    # drift-only path is the line t
    model = pv.ModelSpec(drift=pv.DriftSpec.constant(1.0), vol=pv.VolSpec.constant(0.0))
    sampling = pv.SamplingSpec(horizon=1.0, delta_n=0.25, refine=4)
    path = pv.simulate_path(model, sampling, 42)
    assert len(path.x) == 17
    assert all(abs(x - t) < 1e-12 for x, t in zip(path.x, path.grid))

    incs = pv.restrict_to_observations(path, 0.25)
    assert len(incs) == 4
    assert approx(sum(incs), path.x[-1] - path.x[0], 1e-12)

    # functional scaling identity
    series_vn = pv.v_n("power:r=1", incs, 0.25)
    series_vp = pv.v_prime_n("power:r=1", incs, 0.25)
    assert approx(series_vp.terminal(), series_vn.terminal() / math.sqrt(0.25), 1e-12)

    # determinism across calls
    again = pv.simulate_path(model, sampling, 42)
    assert list(again.x) == list(path.x)

    # a jumpy model round trip through limits
    jumpy = pv.ModelSpec(
        vol=pv.VolSpec.constant(0.5),
        jumps=pv.JumpSpec.compound_poisson(2.0, pv.JumpSizeSpec.fixed(1.0)),
    )
    assert pv.activity_index(jumpy) == 0.0
    profile = pv.hypothesis_profile(jumpy)
    assert profile["H"] and profile["H_prime"]

    fine = pv.SamplingSpec(horizon=1.0, delta_n=1.0 / 64, refine=4)
    jump_path = pv.simulate_path(jumpy, fine, 7)
    jf = pv.jump_functional("power:r=3", jump_path, 1.0 / 64)
    assert approx(jf.terminal(), len(jump_path.jumps), 1e-12)

    # region check refusal numbers
    check = pv.clt_region_check("T6p", 0.5, 0.3)
    assert not check["clt_holds"]
    assert approx(check["degenerate_exponent"], 0.45, 1e-12)

    # KS on a spread-out sample
    quantile_like = [-3 + 6 * (i + 0.5) / 64 for i in range(64)]
    d, p = pv.ks_distance(quantile_like)
    assert 0.0 < d < 1.0
    assert 0.0 <= p <= 1.0

    print("python smoke tests passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
