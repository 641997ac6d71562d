"""Verification suite: every identity the construction must satisfy, over a mode grid."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from . import emdyn, gauge, profiles, quantize
from .model import (Coaxial, Family, Hollow, Medium, ModeSpec, Quadratures,
                    cutoff_function, solve_mode)

__all__ = ["CheckReport", "GridSpec", "DEFAULT_TOLERANCES", "default_grid", "run_suite",
           "cartesian_limit_suite", "summarize"]

DEFAULT_TOLERANCES = {
    "cutoff": 1e-10,
    "maxwell": 1e-6,
    "boundary": 1e-10,
    "normalization": 1e-10,
    "charge_conservation": 1e-10,
    "energy_dual_route": 1e-6,
    "momentum_dual_route": 1e-6,
    "angular_momentum": 1e-8,
    "momentum_energy_ratio": 1e-8,
    "flux_propagation": 1e-10,
    "gauge_fields": 1e-6,
    "lorenz": 1e-8,
    "gauge_invariance": 1e-10,
    "gauge_helmholtz": 1e-8,
    "devoret": 1e-10,
    "devoret_invariance": 1e-10,
    "symmetric_alpha": 1e-10,
    "transverse_relation": 1e-10,
    "transverse_dV": 1e-10,
    "transverse_dAz": 1e-10,
    "k_coefficient": 1e-10,
    "quantization_H": 1e-6,
    "quantization_P": 1e-6,
    "photon_mass": 1e-14,
    "cartesian_kc": 1e-2,
}

# Bounds quoted as physical statements; --strict leaves them alone.
PHYSICAL_BOUNDS = {
    "devoret_te0_narrow": 0.15,   # b/a ≤ 2
    "devoret_te0_wide": 0.5,      # b/a > 2
}


@dataclass(frozen=True)
class CheckReport:
    check: str
    mode: str
    residual: float
    tolerance: float
    passed: bool
    timing: float = field(default=0.0, compare=False)

    def to_dict(self):
        # timing is kept out of serialized output so reports are reproducible
        return {"check": self.check, "mode": self.mode, "residual": self.residual,
                "tolerance": self.tolerance, "passed": self.passed}


@dataclass(frozen=True)
class GridSpec:
    a: float = 1e-3
    ratios: tuple = (1.2, 2.0, 5.0)
    hollow: bool = True
    families: tuple = ("TM", "TE")
    ns: tuple = (0, 1, 2)
    ms: tuple = (1, 2)
    include_tem: bool = True
    epsilon_r: float = 1.0
    mu_r: float = 1.0
    L: float = 5e-3
    l: int = 1
    theta0: float = 0.3
    phi0: float = 0.2
    n_points: int = 64

    def modes(self):
        med = Medium.from_relative(self.epsilon_r, self.mu_r)
        geos = [Coaxial(self.a, r * self.a) for r in self.ratios]
        if self.hollow:
            geos.append(Hollow(self.a))
        out = []
        for geo in geos:
            specs = []
            if self.include_tem and isinstance(geo, Coaxial):
                specs.append(ModeSpec("TEM", theta0=self.theta0, phi0=self.phi0))
            specs += [ModeSpec(f, n, m, theta0=self.theta0, phi0=self.phi0)
                      for f in self.families for n in self.ns for m in self.ms]
            out += [solve_mode(s, geo, med, self.L, self.l) for s in specs]
        return out


def default_grid():
    return GridSpec()


class _Recorder:
    def __init__(self, mode_label, tolerances, strict):
        self.label, self.tol, self.scale = mode_label, tolerances, 0.1 if strict else 1.0
        self.reports = []

    def tolerance(self, key):
        return self.tol[key] * self.scale

    def add(self, check, residual, tol, t0):
        residual = float(residual)
        ok = bool(residual <= tol) and math.isfinite(residual)
        self.reports.append(CheckReport(check, self.label, residual, tol, ok, time.perf_counter() - t0))

    def run(self, check, key, fn):
        t0 = time.perf_counter()
        self.add(check, fn(), self.tolerance(key), t0)


def _samples(mode, n, rng_seed):
    """Seeded Halton points mapped to (r, θ, z, t) inside the guide."""
    u = qmc.Halton(d=4, scramble=True, seed=rng_seed).random(n)
    lo, hi = profiles.r_domain(mode)
    lo = lo + 0.02 * (hi - lo)
    r = lo + (hi - lo) * u[:, 0]
    th = 2 * math.pi * u[:, 1]
    z = mode.L * u[:, 2]
    t = 2 * math.pi / mode.omega * u[:, 3]
    return np.column_stack([r, th, z, t])


def _electrode_points(mode, electrode, pts):
    """(coord, z, t) rows on an electrode: θ on cylinders, r on virtual planes."""
    plane = electrode in (emdyn.Electrode.VIR_TOP, emdyn.Electrode.VIR_BOTTOM)
    coord = pts[:, 0] if plane else pts[:, 1]
    return np.column_stack([coord, pts[:, 2], pts[:, 3]])


def _cutoff_residual(mode):
    if mode.family is Family.TEM:
        return 0.0
    f = cutoff_function(mode.spec, mode.geometry)
    x = mode.x
    h = 1e-6 * x
    slope = abs(f(x + h) - f(x - h)) / (2 * h)
    return abs(f(x)) / (slope * x)


def _normalization_residual(mode):
    if mode.virtual:
        rm = mode.norm.r_max
        g = profiles.profile(mode, np.array([rm]), np.array([mode.spec.theta0]))
        return abs(abs(float(g.gEth[0])) - 1.0)
    th = mode.spec.theta0 + np.linspace(0.0, 2 * math.pi, 721)
    g = profiles.profile(mode, np.full_like(th, mode.a), th)
    return abs(float(np.max(np.abs(g.gEr))) - 1.0)


def _energy_checks(rec, mode):
    q = Quadratures(0.7, 0.4)
    t0 = time.perf_counter()
    s = emdyn.energy_momentum_surface(mode, 1.0, q)
    v = emdyn.energy_momentum_volume(mode, 1.0, q)
    rec.add("energy_dual_route", abs(s.H / v.H - 1.0), rec.tolerance("energy_dual_route"), t0)
    rec.add("momentum_dual_route", abs(s.P_z / v.P_z - 1.0), rec.tolerance("momentum_dual_route"), t0)
    rec.add("angular_momentum", abs(v.J_ang) * mode.omega / v.H, rec.tolerance("angular_momentum"), t0)
    rec.add("momentum_energy_ratio", abs(s.P_z * mode.omega / (mode.beta * s.H) - 1.0),
            rec.tolerance("momentum_energy_ratio"), t0)


def _quantization_checks(rec, mode):
    t0 = time.perf_counter()
    hbar = 1.0
    _, E_m = quantize.quantum_amplitude(mode, hbar)
    v = emdyn.energy_momentum_volume(mode, E_m, Quadratures(1.0, 0.0))
    rec.add("quantization_H", abs(v.H / (hbar * mode.omega / 4) - 1.0), rec.tolerance("quantization_H"), t0)
    rec.add("quantization_P", abs(v.P_z / (hbar * mode.beta / 4) - 1.0), rec.tolerance("quantization_P"), t0)
    if mode.family is Family.TE:
        gap, mass = quantize.cutoff_quanta(mode, hbar)
        res = abs(mass * mode.c ** 2 - hbar * mode.omega_c) / (hbar * mode.omega_c)
        rec.add("photon_mass", res, rec.tolerance("photon_mass"), t0)


def _gauge_checks(rec, mode, pts, rng):
    rec.run("gauge_fields", "gauge_fields", lambda: gauge.gauge_field_consistency(mode, None, pts).field_res)
    rec.run("lorenz", "lorenz", lambda: gauge.gauge_field_consistency(mode, None, pts).lorenz_res)
    choices = [gauge.random_choice(mode, rng) for _ in range(5)]
    if gauge.free_parameters(mode):
        rec.run("gauge_invariance", "gauge_invariance",
                lambda: gauge.gauge_invariance_residual(mode, choices, pts))
    rec.run("gauge_helmholtz", "gauge_helmholtz",
            lambda: max(gauge.helmholtz_residual(mode, ch, pts[:, 0], pts[:, 1]) for ch in [None] + choices))
    t0 = time.perf_counter()
    if mode.virtual:
        if mode.coaxial:
            key = "devoret_te0_narrow" if mode.geometry.ratio <= 2.0 else "devoret_te0_wide"
            d = gauge.devoret_residual(mode)
            rec.add("devoret_te0_bounded", max(d.res_t, d.res_z), PHYSICAL_BOUNDS[key], t0)
        tg = gauge.transverse_gauge_check(mode)
        rec.add("transverse_relation", tg.res_eq160, rec.tolerance("transverse_relation"), t0)
        return
    d = gauge.devoret_residual(mode)
    rec.add("devoret", max(d.res_t, d.res_z), rec.tolerance("devoret"), t0)
    t0 = time.perf_counter()
    worst = max(max(r.res_t, r.res_z) for r in (gauge.devoret_residual(mode, ch) for ch in choices))
    rec.add("devoret_invariance", worst, rec.tolerance("devoret_invariance"), t0)
    t0 = time.perf_counter()
    tg = gauge.transverse_gauge_check(mode)
    rec.add("transverse_relation", tg.res_eq160, rec.tolerance("transverse_relation"), t0)
    rec.add("transverse_dV", tg.dV_res, rec.tolerance("transverse_dV"), t0)
    rec.add("transverse_dAz", tg.dAz_res, rec.tolerance("transverse_dAz"), t0)
    if mode.coaxial and mode.family is Family.TE and mode.n > 0:
        rec.run("symmetric_alpha", "symmetric_alpha", lambda: _symmetric_residual(mode))


def _symmetric_residual(mode):
    ch = gauge.GaugeChoice.symmetric(mode)
    th = mode.spec.theta0 + np.linspace(0.0, 2 * math.pi, 16, endpoint=False) + 0.05
    va = gauge.potential_comps(mode, ch, 1.0, mode.a)[3]
    vb = gauge.potential_comps(mode, ch, 1.0, mode.b)[3]
    arg = mode.n * (th - mode.spec.theta0)
    cs, sn = np.cos(arg), np.sin(arg)
    a_, b_ = va.value(cs, sn, 1.0, 0.0), vb.value(cs, sn, 1.0, 0.0)
    return float(np.max(np.abs(np.abs(a_) - np.abs(b_)))) / max(float(np.max(np.abs(a_))), 1e-300)


def _k_residual(mode):
    K = gauge.k_coefficient(mode)
    if mode.family is Family.TEM:
        return abs(K - mode.a / mode.b)
    if not mode.coaxial or mode.virtual:
        return abs(K - 1.0)
    h, hp = emdyn.compute_h_eff(mode)
    return abs(K - h / hp) / K


def _mode_checks(mode, tolerances, strict, seed, n_points):
    rec = _Recorder(mode.describe(), tolerances, strict)
    pts = _samples(mode, n_points, seed)
    rng = np.random.default_rng(seed)
    q = Quadratures(0.7, 0.4)
    rec.run("cutoff", "cutoff", lambda: _cutoff_residual(mode))
    rec.run("maxwell", "maxwell", lambda: profiles.maxwell_residual(mode, *pts.T, q))
    rec.run("boundary", "boundary", lambda: profiles.boundary_residual(mode))
    rec.run("normalization", "normalization", lambda: _normalization_residual(mode))
    for el in emdyn.valid_electrodes(mode):
        rec.run(f"charge_conservation[{el.value}]", "charge_conservation",
                lambda el=el: emdyn.charge_conservation_residual(mode, q, el, _electrode_points(mode, el, pts)))
    _energy_checks(rec, mode)
    flux_pts = _electrode_points(mode, emdyn.Electrode.VIR_TOP if mode.virtual else emdyn.Electrode.IN, pts)
    rec.run("flux_propagation", "flux_propagation", lambda: emdyn.flux_equation_residual(mode, q, flux_pts))
    _gauge_checks(rec, mode, pts, rng)
    rec.run("k_coefficient", "k_coefficient", lambda: _k_residual(mode))
    _quantization_checks(rec, mode)
    return rec.reports


def run_suite(grid=None, tolerances=None, seed=0, strict=False):
    """Run every check over the grid's modes; failures are reported, never raised."""
    grid = default_grid() if grid is None else grid
    modes = grid.modes() if isinstance(grid, GridSpec) else list(grid)
    if not modes:
        raise ValueError("empty mode grid")
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    n_points = grid.n_points if isinstance(grid, GridSpec) else 64
    reports = []
    for i, mode in enumerate(modes):
        reports += _mode_checks(mode, tol, strict, seed + i, n_points)
    return reports


def cartesian_limit_suite(b_over_a, tolerances=None, strict=False, a=1e-3):
    """Parallel-plate limit checks for each ratio b/a > 1.

    k_c·(b−a)/(mπ) → 1 for coax TM/TE n = 0, m ∈ {1, 2, 3}; K → 1; TEM flatness
    max|g_Er − 1| equals b/a − 1.  Each deviation is checked against
    max(tol, 2·(b/a − 1)), the first-order envelope of the limit.
    """
    ratios = list(b_over_a)
    if any(not r > 1 for r in ratios):
        raise ValueError("all ratios must exceed 1")
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    scale = 0.1 if strict else 1.0
    med = Medium.from_relative(1.0, 1.0)
    out = []
    for ratio in ratios:
        geo = Coaxial(a, ratio * a)
        bound = max(tol["cartesian_kc"] * scale, 2 * (ratio - 1))
        label = f"coax(b/a={ratio:g})"
        for fam in ("TM", "TE"):
            for m in (1, 2, 3):
                t0 = time.perf_counter()
                mode = solve_mode(ModeSpec(fam, 0, m), geo, med, 1e-2, 1)
                dev = abs(mode.k_c * (mode.b - mode.a) / (m * math.pi) - 1.0)
                out.append(CheckReport(f"cartesian_kc[{fam}0,{m}]", label, dev, bound, dev <= bound,
                                       time.perf_counter() - t0))
        for fam in ("TM", "TE"):
            t0 = time.perf_counter()
            mode = solve_mode(ModeSpec(fam, 1, 1), geo, med, 1e-2, 1)
            dev = abs(gauge.k_coefficient(mode) - 1.0)
            out.append(CheckReport(f"cartesian_K[{fam}1,1]", label, dev, bound, dev <= bound,
                                   time.perf_counter() - t0))
        t0 = time.perf_counter()
        mode = solve_mode(ModeSpec("TEM"), geo, med, 1e-2, 1)
        r = np.linspace(mode.a, mode.b, 201)
        g = profiles.profile(mode, r, np.zeros_like(r))
        flat = float(np.max(np.abs(g.gEr - 1.0)))
        res = abs(flat - (1.0 - 1.0 / ratio))  # a/r spans [1/ratio, 1]
        out.append(CheckReport("cartesian_tem_flatness", label, flat, bound, flat <= bound and res < 1e-12,
                               time.perf_counter() - t0))
    return out


def summarize(reports):
    failed = [r for r in reports if not r.passed]
    return {"total": len(reports), "passed": len(reports) - len(failed), "failed": len(failed)}
