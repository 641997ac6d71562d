import math

import numpy as np
import pytest

from conftest import VACUUM, make_mode
from cylwave import specfun
from cylwave.model import (Coaxial, Hollow, Medium, ModeError, ModeSpec, Quadratures,
                           cutoff_function, cutoff_roots, envelope, solve_mode)


def _geo(key):
    return Hollow(1.0) if key == "hollow" else Coaxial(1.0, float(key))


def test_roots_match_oracle(oracle_roots):
    for table in ("grid", "cartesian", "fig3_modes"):
        for key, ref in oracle_roots[table].items():
            fam, n, g = key.split(",")
            got = cutoff_roots(ModeSpec(fam, int(n), 1), _geo(g), len(ref))
            assert np.allclose(got, ref, rtol=1e-9, atol=0), key


def test_hollow_examples():
    tm = solve_mode(ModeSpec("TM", 0, 1), Hollow(1.0), VACUUM, 1.0, 1)
    te = solve_mode(ModeSpec("TE", 0, 1), Hollow(1.0), VACUUM, 1.0, 1)
    assert tm.k_c == pytest.approx(2.404826, abs=1e-6)
    assert te.k_c == pytest.approx(3.831706, abs=1e-6)


def test_tem_dispersion():
    mode = solve_mode(ModeSpec("TEM"), Coaxial(1e-3, 3e-3), VACUUM, 0.02, -3)
    assert mode.k_c == 0.0
    assert mode.k == abs(mode.beta)
    assert mode.v_phi == pytest.approx(mode.c, rel=1e-15)
    assert mode.beta < 0


def test_parallel_plate_limit():
    mode = solve_mode(ModeSpec("TM", 0, 1), Coaxial(1.0, 1.01), VACUUM, 1.0, 1)
    assert 0.99 <= mode.k_c * (mode.b - mode.a) / math.pi <= 1.01


def test_dispersion_and_velocity():
    for fam, n, m, ratio in [("TM", 1, 2, 2.0), ("TE", 2, 1, None), ("TE", 0, 1, 1.2)]:
        mode = make_mode(fam, n, m, ratio, L=0.03, l=2, medium=Medium.from_relative(2.2, 1.1))
        assert mode.k ** 2 == pytest.approx(mode.k_c ** 2 + mode.beta ** 2, rel=1e-15)
        assert mode.omega == pytest.approx(mode.c * mode.k, rel=1e-15)
        assert mode.v_phi == pytest.approx(mode.c * mode.k / abs(mode.beta), rel=1e-15)
        assert mode.beta == pytest.approx(2 * math.pi * 2 / 0.03, rel=1e-15)
        assert mode.c == pytest.approx(299792458 / math.sqrt(2.2 * 1.1), rel=1e-9)


def test_cutoff_residual_small():
    for fam in ("TM", "TE"):
        for n in (0, 1, 2):
            for geo in (Coaxial(1.0, 2.0), Hollow(1.0)):
                spec = ModeSpec(fam, n, 2)
                f = cutoff_function(spec, geo)
                for x in cutoff_roots(spec, geo):
                    h = 1e-6 * x
                    slope = abs(f(x + h) - f(x - h)) / (2 * h)
                    assert abs(f(x)) < 1e-10 * slope * x


def test_roots_increase_with_m():
    for fam in ("TM", "TE"):
        for n in (0, 1, 3):
            for geo in (Coaxial(1.0, 1.5), Coaxial(1.0, 4.0), Hollow(1.0)):
                xs = cutoff_roots(ModeSpec(fam, n, 1), geo, 6)
                assert len(xs) == 6 and all(np.diff(xs) > 0)


def test_hollow_te0_is_j1_zero(oracle_roots):
    xs = cutoff_roots(ModeSpec("TE", 0, 1), Hollow(1.0), 2)
    ref = cutoff_roots(ModeSpec("TM", 1, 1), Hollow(1.0), 2)
    assert np.allclose(xs, ref, rtol=1e-12, atol=0)
    assert np.allclose(xs, oracle_roots["grid"]["TM,1,hollow"], rtol=1e-12, atol=0)
    assert np.max(np.abs(specfun.bessel_j(1, np.array(xs)))) < 1e-13


@pytest.mark.parametrize("bad", [
    lambda: ModeSpec("TM", -1, 1),
    lambda: ModeSpec("TM", 0, 0),
    lambda: ModeSpec("TE", 1.5, 1),
    lambda: ModeSpec("QQ", 0, 1),
    lambda: Coaxial(2.0, 1.0),
    lambda: Hollow(0.0),
    lambda: Medium(-1.0, 1.0),
    lambda: solve_mode(ModeSpec("TEM"), Hollow(1.0), VACUUM, 1.0, 1),
    lambda: solve_mode(ModeSpec("TM", 0, 1), Hollow(1.0), VACUUM, 1.0, 0),
    lambda: solve_mode(ModeSpec("TM", 0, 1), Hollow(1.0), VACUUM, -1.0, 1),
])
def test_invalid_inputs(bad):
    with pytest.raises((ModeError, ValueError)):
        bad()


def test_tem_has_no_indices():
    spec = ModeSpec("TEM", 3, 4)
    assert (spec.n, spec.m) == (0, 0)
    with pytest.raises(ModeError):
        cutoff_function(spec, Coaxial(1.0, 2.0))


def test_mode_is_immutable():
    mode = make_mode("TM", 0, 1)
    with pytest.raises(Exception):
        mode.k_c = 1.0


def test_envelope_examples():
    mode = make_mode("TEM", phi0=0.0)
    assert envelope(mode, Quadratures(1, 0), 0.0, 0.0) == (1.0, 0.0)
    assert envelope(mode, Quadratures(0, 1), 0.0, 0.0) == (0.0, -1.0)


def test_envelope_derivatives_by_finite_differences():
    mode = make_mode("TE", 1, 1)
    rng = np.random.default_rng(7)
    q = Quadratures(0.6, -1.3)
    period = 2 * math.pi / mode.omega
    for _ in range(20):
        z, t = rng.uniform(0, mode.L), rng.uniform(0, period)
        ht, hz = 1e-6 * period, 1e-6 * mode.L
        df_dt = (envelope(mode, q, z, t + ht)[0] - envelope(mode, q, z, t - ht)[0]) / (2 * ht)
        dft_dz = (envelope(mode, q, z + hz, t)[1] - envelope(mode, q, z - hz, t)[1]) / (2 * hz)
        f, ft = envelope(mode, q, z, t)
        amp = math.hypot(*q)
        assert abs(df_dt + mode.omega * ft) < 1e-6 * mode.omega * amp
        assert abs(dft_dz + mode.beta * f) < 1e-6 * abs(mode.beta) * amp


def test_envelope_norm():
    mode = make_mode("TM", 1, 1, None)
    rng = np.random.default_rng(3)
    for _ in range(50):
        q = Quadratures(*rng.normal(size=2))
        f, ft = envelope(mode, q, rng.uniform(0, 1), rng.uniform(0, 1e-9))
        assert abs(f * f + ft * ft - (q.X ** 2 + q.Y ** 2)) < 1e-12


def test_high_m_extends_window():
    mode = solve_mode(ModeSpec("TM", 5, 9), Coaxial(1.0, 1.3), VACUUM, 1.0, 1)
    xs = cutoff_roots(ModeSpec("TM", 5, 1), Coaxial(1.0, 1.3), 9)
    assert mode.x == pytest.approx(xs[-1], rel=1e-15)
