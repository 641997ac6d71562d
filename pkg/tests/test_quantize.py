import math

import numpy as np
import pytest

from conftest import BRANCHES, VACUUM, branch_id, make_mode
from cylwave import emdyn, quantize
from cylwave.model import Hollow, ModeSpec, Quadratures, solve_mode


@pytest.fixture(scope="module", params=BRANCHES, ids=branch_id)
def mode(request):
    fam, n, m, ratio = request.param
    return make_mode(fam, n, m, ratio)


def test_prefactor_is_hbar(mode):
    res = quantize.quantize(mode)
    assert 2 * res.C_P * mode.omega * res.phi_m ** 2 == pytest.approx(quantize.HBAR, rel=1e-12)
    h = emdyn.compute_h_eff(mode)[0]
    assert res.phi_m == pytest.approx(res.E_m * h / mode.omega, rel=1e-14)
    assert res.B_m == pytest.approx(res.E_m / mode.c, rel=1e-15)
    assert res.gamma_n == (1 if mode.n == 0 else 2)


def test_coefficient_ratios(mode):
    C_H, C_P, L_H_inv = quantize.modal_coefficients(mode)
    if mode.family.value == "TM":
        assert C_P / C_H == pytest.approx((mode.k / mode.beta) ** 2, rel=1e-14)
        assert C_P > C_H
    else:
        assert C_P == C_H


def test_closure_volume_route(mode):
    _, E_m = quantize.quantum_amplitude(mode, hbar=1.0)
    v = emdyn.energy_momentum_volume(mode, E_m, Quadratures(1.0, 0.0))
    assert v.H == pytest.approx(mode.omega / 4, rel=1e-6)
    assert v.P_z == pytest.approx(mode.beta / 4, rel=1e-6)


def test_closure_random_quadratures():
    rng = np.random.default_rng(12)
    for fam, n, m, ratio in BRANCHES[:6]:
        mode = make_mode(fam, n, m, ratio)
        _, E_m = quantize.quantum_amplitude(mode, hbar=1.0)
        for _ in range(10):
            q = Quadratures(*rng.normal(size=2))
            s = emdyn.energy_momentum_surface(mode, E_m, q)
            amp = q.X ** 2 + q.Y ** 2
            assert s.H == pytest.approx(mode.omega * amp / 4, rel=1e-6)
            assert s.P_z == pytest.approx(mode.beta * amp / 4, rel=1e-6)


def test_doubling_length_halves_phi2():
    one = make_mode("TM", 1, 1, 2.0, L=5e-3, l=1)
    two = make_mode("TM", 1, 1, 2.0, L=1e-2, l=2)  # same β, twice the length
    p1 = quantize.quantum_amplitude(one)[0]
    p2 = quantize.quantum_amplitude(two)[0]
    assert p2 ** 2 == pytest.approx(p1 ** 2 / 2, rel=1e-13)


def test_hbar_scaling():
    mode = make_mode("TE", 2, 1, None)
    p1 = quantize.quantum_amplitude(mode, 1.0)[0]
    p4 = quantize.quantum_amplitude(mode, 4.0)[0]
    assert p4 == pytest.approx(2 * p1, rel=1e-15)


def test_cutoff_quanta():
    assert quantize.cutoff_quanta(make_mode("TEM")) == (0.0, 0.0)
    tm = make_mode("TM", 0, 1, None)
    gap, mass = quantize.cutoff_quanta(tm)
    assert mass is None and gap == pytest.approx(quantize.HBAR * tm.omega_c, rel=1e-15)
    for args in (("TE", 0, 1, None), ("TE", 1, 2, 2.0)):
        te = make_mode(*args)
        gap, mass = quantize.cutoff_quanta(te)
        assert abs(mass * te.c ** 2 - quantize.HBAR * te.omega_c) <= 4 * np.finfo(float).eps * gap


def test_hollow_tm_gap_value():
    mode = solve_mode(ModeSpec("TM", 0, 1), Hollow(0.01), VACUUM, 0.05, 1)
    gap, _ = quantize.cutoff_quanta(mode)
    assert gap == pytest.approx(quantize.HBAR * mode.c * 2.404826 / 0.01, rel=1e-6)
    assert gap == pytest.approx(quantize.HBAR * mode.c * 2.404825557695773 / 0.01, rel=1e-12)


def test_charge_amplitude_relation():
    # Q_max = C_P·∂φ_max/∂t with φ_max = φ_m f̃: ∂φ_max/∂t = φ_m ω f
    mode = make_mode("TM", 1, 1, 2.0)
    res = quantize.quantize(mode)
    phi_dot_amp = res.phi_m * mode.omega
    assert res.C_P * phi_dot_amp == pytest.approx(math.sqrt(res.C_P * quantize.HBAR * mode.omega / 2), rel=1e-13)


def test_gamma():
    assert quantize.gamma_n(0) == 1 and quantize.gamma_n(1) == 2 and quantize.gamma_n(5) == 2
