import numpy as np
import pytest

from conftest import make_mode
from cylwave import profiles, verify
from cylwave.verify import GridSpec

SMALL = GridSpec(ratios=(2.0,), ns=(0, 1), ms=(1,), n_points=24)


@pytest.fixture(scope="module")
def small_reports():
    return verify.run_suite(SMALL, seed=3)


def test_small_grid_passes(small_reports):
    failed = [r for r in small_reports if not r.passed]
    assert not failed, failed
    checks = {r.check.split("[")[0] for r in small_reports}
    for name in ("cutoff", "maxwell", "boundary", "normalization", "charge_conservation",
                 "energy_dual_route", "momentum_dual_route", "angular_momentum", "flux_propagation",
                 "gauge_fields", "lorenz", "gauge_invariance", "devoret", "transverse_relation",
                 "k_coefficient", "quantization_H", "quantization_P", "photon_mass",
                 "devoret_te0_bounded"):
        assert name in checks, name


def test_report_fields(small_reports):
    r = small_reports[0]
    assert set(r.to_dict()) == {"check", "mode", "residual", "tolerance", "passed"}
    assert r.passed == (r.residual <= r.tolerance)
    assert r.timing >= 0


def test_deterministic(small_reports):
    again = verify.run_suite(SMALL, seed=3)
    assert [r.to_dict() for r in again] == [r.to_dict() for r in small_reports]


def test_strict_scales_tolerances(small_reports):
    strict = verify.run_suite(GridSpec(ratios=(2.0,), ns=(1,), ms=(1,), families=("TM",),
                                       include_tem=False, hollow=False, n_points=16), seed=3, strict=True)
    base = {r.check: r.tolerance for r in small_reports if r.mode.startswith("TM1,1")}
    for r in strict:
        assert r.tolerance == pytest.approx(0.1 * base[r.check], rel=1e-15)
        assert r.passed


def test_empty_grid_raises():
    with pytest.raises(ValueError):
        verify.run_suite(GridSpec(families=(), include_tem=False))
    with pytest.raises(ValueError):
        verify.run_suite([])


def test_failures_are_reported_not_raised():
    reps = verify.run_suite([make_mode("TM", 0, 1)], tolerances={"maxwell": 1e-300})
    bad = [r for r in reps if not r.passed]
    assert [r.check for r in bad] == ["maxwell"]


def test_mutation_is_caught(monkeypatch):
    original = profiles.profile_comps

    def mutated(mode, r):
        comps = dict(original(mode, r))
        comps["gEz"] = comps["gEz"] * (1 + 1e-3)
        return comps

    monkeypatch.setattr(profiles, "profile_comps", mutated)
    reps = verify.run_suite([make_mode("TM", 1, 1, 2.0)])
    failed = {r.check for r in reps if not r.passed}
    assert failed & {"maxwell", "boundary"}


def test_cartesian_suite():
    reps = verify.cartesian_limit_suite([2.0, 1.5, 1.1, 1.01, 1.001])
    assert all(r.passed for r in reps)
    K = {r.mode: r.residual for r in reps if r.check == "cartesian_K[TM1,1]"}
    dev = [K[f"coax(b/a={x:g})"] for x in (2.0, 1.5, 1.1, 1.01, 1.001)]
    assert all(np.diff(dev) < 0)
    kc = [r.residual for r in reps if r.check == "cartesian_kc[TM0,1]" and r.mode == "coax(b/a=1.001)"]
    assert kc[0] < 1e-2
    flat = [r.residual for r in reps if r.check == "cartesian_tem_flatness" and r.mode == "coax(b/a=1.001)"]
    assert flat[0] == pytest.approx(1 - 1 / 1.001, rel=1e-10)
    with pytest.raises(ValueError):
        verify.cartesian_limit_suite([1.0])


def test_summarize(small_reports):
    s = verify.summarize(small_reports)
    assert s == {"total": len(small_reports), "passed": len(small_reports), "failed": 0}
