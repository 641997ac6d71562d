"""Dimensionless modal profiles, TE n = 0 peak normalization, and field samples.

Every field or potential component is held as a :class:`Comp`: four radial
jets multiplying cos·f, cos·f̃, sin·f and sin·f̃, where cos/sin carry the
argument n(θ − θ₀).  Partial derivatives in r, θ, z, t then act on the
jets and slots analytically.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import specfun
from .model import Family, ModeError, NormalizationData, Quadratures, envelope
from .specfun import Jet, cylinder_jet

__all__ = [
    "Comp", "ProfileSextet", "FieldSample", "profile_comps", "profile",
    "field_at", "field_comps", "solve_r_max", "solve_peak_normalization",
    "normalization", "g_vir", "g_real_parity", "maxwell_residual",
    "boundary_residual", "r_domain",
]

_NAN = float("nan")


def _zero():
    return Jet(0.0, 0.0, 0.0)


def _djet(j):
    # derivative of a jet; the third derivative is not tracked
    return Jet(j.d1, j.d2, _NAN * np.ones_like(np.asarray(j.d2, dtype=float)))


class Comp:
    """Radial jets in the cos·f, cos·f̃, sin·f, sin·f̃ slots."""

    __slots__ = ("cf", "ct", "sf", "st")

    def __init__(self, cf=None, ct=None, sf=None, st=None):
        self.cf = cf if cf is not None else _zero()
        self.ct = ct if ct is not None else _zero()
        self.sf = sf if sf is not None else _zero()
        self.st = st if st is not None else _zero()

    def _slots(self):
        return (self.cf, self.ct, self.sf, self.st)

    def _map(self, fn):
        return Comp(*(fn(j) for j in self._slots()))

    def __add__(self, o):
        return Comp(*(a + b for a, b in zip(self._slots(), o._slots())))

    def __neg__(self):
        return self._map(lambda j: -j)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, c):
        # scalar or radial jet factor
        return self._map(lambda j: j * c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self._map(lambda j: j / c)

    def dr(self):
        return self._map(_djet)

    def dtheta(self, n):
        return Comp(cf=self.sf * n, ct=self.st * n, sf=self.cf * (-n), st=self.ct * (-n))

    def dz(self, beta):
        return Comp(cf=self.ct * (-beta), ct=self.cf * beta, sf=self.st * (-beta), st=self.sf * beta)

    def dt(self, omega):
        return Comp(cf=self.ct * omega, ct=self.cf * (-omega), sf=self.st * omega, st=self.sf * (-omega))

    def value(self, cos, sin, f, ft):
        return (self.cf.v * cos * f + self.ct.v * cos * ft
                + self.sf.v * sin * f + self.st.v * sin * ft)

    def swap_envelope(self):
        """Apply (f, f̃) -> (f̃, -f) to the envelope slots."""
        return Comp(cf=-self.ct, ct=self.cf, sf=-self.st, st=self.sf)


class ProfileSextet(NamedTuple):
    gEr: float
    gEth: float
    gEz: float
    gBr: float
    gBth: float
    gBz: float


class FieldSample(NamedTuple):
    E: tuple
    B: tuple


def r_domain(mode):
    g = mode.geometry
    return (g.a, g.b) if mode.coaxial else (0.0, g.a)


def _check_r(mode, r):
    lo, hi = r_domain(mode)
    r = np.asarray(r, dtype=float)
    tol = 1e-12 * hi
    if np.any(r < lo - tol) or np.any(r > hi + tol):
        raise ModeError(f"r outside the guide interior [{lo:.6g}, {hi:.6g}]")
    return np.clip(r, lo if lo > 0 else 0.0, hi)


def g_real_parity(mode):
    """Angular factor of the flux on real electrodes: 'cos', 'sin' or None (virtual)."""
    if mode.family is Family.TE:
        return None if mode.n == 0 else "sin"
    return "cos"


# ---------------------------------------------------------------------------
# radial building blocks

def _rho(mode):
    """Weight of Y in R_nu = J_nu - rho·Y_nu (zero for hollow guides)."""
    if not mode.coaxial:
        return 0.0
    n, x = mode.n, mode.x
    if mode.family is Family.TM:
        return specfun.bessel_j(n, x) / specfun.bessel_y(n, x)
    return specfun.bessel_jp(n, x) / specfun.bessel_yp(n, x)


def _R(mode, nu, r, rho):
    j = cylinder_jet("J", nu, mode.k_c, r)
    if rho == 0.0:
        return j
    return j - cylinder_jet("Y", nu, mode.k_c, r) * rho


def _A_nm(mode, norm=None):
    """Profile normalization constant (None for TEM)."""
    fam, n, x, k, kc, beta, a = mode.family, mode.n, mode.x, mode.k, mode.k_c, mode.beta, mode.a
    J, Y = specfun.bessel_j, specfun.bessel_y
    if fam is Family.TEM:
        return None
    if mode.coaxial:
        if fam is Family.TM:
            return 4.0 * beta / (math.pi * kc * kc * a * Y(n, x))
        if n > 0:
            rho = specfun.bessel_jp(n, x) / specfun.bessel_yp(n, x)
            return -2.0 * k * n * (J(n, x) - rho * Y(n, x)) / (kc * kc * a)
        return -norm.A_m * k * a / Y(1, x)
    if fam is Family.TM:
        return beta / kc * (J(n - 1, x) - J(n + 1, x))
    if n > 0:
        return 2.0 * k * n * J(n, x) / (kc * kc * a)
    return norm.A_m * k / kc


def profile_comps(mode, r):
    """Six profile components (angular factor and envelope slot included)."""
    r = _check_r(mode, r)
    fam, n = mode.family, mode.n
    if fam is Family.TEM:
        rv = Jet.variable(r)
        g = mode.a / rv
        z = Comp()
        return {"gEr": Comp(cf=g), "gEth": z, "gEz": z,
                "gBr": z, "gBth": Comp(cf=g * float(np.sign(mode.beta))), "gBz": z}
    A = mode.norm.A_nm
    rho = _rho(mode)
    Rm, R0, Rp = (_R(mode, nu, r, rho) for nu in (n - 1, n, n + 1))
    diff, summ = Rm - Rp, Rm + Rp
    kc, k, beta = mode.k_c, mode.k, mode.beta
    if fam is Family.TM:
        return {
            "gEr": Comp(cf=diff * (-beta / (kc * A))),
            "gEth": Comp(sf=summ * (beta / (kc * A))),
            "gEz": Comp(ct=R0 * (2.0 / A)),
            "gBr": Comp(sf=summ * (-k / (kc * A))),
            "gBth": Comp(cf=diff * (-k / (kc * A))),
            "gBz": Comp(),
        }
    return {
        "gEr": Comp(sf=summ * (-k / (kc * A))),
        "gEth": Comp(cf=diff * (-k / (kc * A))),
        "gEz": Comp(),
        "gBr": Comp(cf=diff * (beta / (kc * A))),
        "gBth": Comp(sf=summ * (-beta / (kc * A))),
        "gBz": Comp(ct=R0 * (-2.0 / A)),
    }


def _angles(mode, theta):
    arg = mode.n * (np.asarray(theta, dtype=float) - mode.spec.theta0)
    return np.cos(arg), np.sin(arg)


def profile(mode, r, theta):
    """Profile sextet g at (r, θ) with the angular factor applied."""
    cs, sn = _angles(mode, theta)
    comps = profile_comps(mode, r)
    vals = [comps[k].value(cs, sn, 1.0, 1.0) for k in ProfileSextet._fields]
    if all(np.ndim(v) == 0 for v in vals):
        vals = [float(v) for v in vals]
    return ProfileSextet(*vals)


def field_comps(mode, E_m, r):
    """Physical (E, B) components as Comp objects."""
    g = profile_comps(mode, r)
    B_m = E_m / mode.c
    E = tuple(g[k] * E_m for k in ("gEr", "gEth", "gEz"))
    B = tuple(g[k] * B_m for k in ("gBr", "gBth", "gBz"))
    return E, B


def field_at(mode, E_m, q, r, theta, z, t):
    """(E, B) in the cylindrical basis at one or many points."""
    if not E_m > 0:
        raise ModeError("E_m must be positive")
    q = Quadratures(*q)
    E, B = field_comps(mode, E_m, r)
    cs, sn = _angles(mode, theta)
    f, ft = envelope(mode, q, z, t)
    ev = lambda c: c.value(cs, sn, f, ft)
    return FieldSample(tuple(ev(c) for c in E), tuple(ev(c) for c in B))


# ---------------------------------------------------------------------------
# TE n = 0 normalization

def _first_root(f, lo, hi, what):
    step = (hi - lo) / 256.0
    roots = specfun.find_roots(f, lo + step * 1e-6, hi, scan_step=step)
    if not roots:
        raise specfun.RootSearchError(f"no {what} found in ({lo:.6g}, {hi:.6g})",
                                      [(lo, hi)])
    return roots[0]


def solve_r_max(mode):
    """Position of the first extremum of the TE n = 0 azimuthal field."""
    if not mode.virtual:
        raise ModeError("r_max is defined for TE n = 0 modes only")
    x, kc = mode.x, mode.k_c
    if mode.coaxial:
        J1x, Y1x = specfun.bessel_j(1, x), specfun.bessel_y(1, x)
        d = lambda u: J1x * specfun.bessel_yp(1, u) - specfun.bessel_jp(1, u) * Y1x
        u = _first_root(d, x, mode.geometry.ratio * x, "extremum")
    else:
        u = _first_root(lambda u: specfun.bessel_j(0, u) - specfun.bessel_j(2, u), 0.0, x, "extremum")
    return u / kc


def _coax_z1(x, u):
    return specfun.bessel_j(1, x) * specfun.bessel_y(1, u) - specfun.bessel_j(1, u) * specfun.bessel_y(1, x)


def _coax_u0(x, u):
    return specfun.bessel_j(0, x) * specfun.bessel_y(0, u) - specfun.bessel_j(0, u) * specfun.bessel_y(0, x)


def solve_peak_normalization(mode):
    """(A_m, r_max, A'_m, r'_max) for TE n = 0; the primed pair is coax only."""
    r_max = solve_r_max(mode)
    x, kc = mode.x, mode.k_c
    if not mode.coaxial:
        return 2.0 * specfun.bessel_j(1, kc * r_max), r_max, None, None
    A_m = 2.0 * _coax_z1(x, kc * r_max) / x
    J0x, Y0x = specfun.bessel_j(0, x), specfun.bessel_y(0, x)
    d = lambda u: J0x * specfun.bessel_y(1, u) - specfun.bessel_j(1, u) * Y0x
    u = _first_root(d, x, mode.geometry.ratio * x, "gauge-profile extremum")
    A_mp = _coax_u0(x, u) / J0x
    return A_m, r_max, A_mp, u / kc


def normalization(mode):
    if mode.family is Family.TEM:
        return NormalizationData()
    if mode.virtual:
        A_m, r_max, A_mp, r_mp = solve_peak_normalization(mode)
        nd = NormalizationData(A_m=A_m, r_max=r_max, A_m_prime=A_mp, r_max_prime=r_mp)
        return NormalizationData(A_nm=_A_nm(mode, nd), r_max=r_max, A_m=A_m,
                                 A_m_prime=A_mp, r_max_prime=r_mp)
    return NormalizationData(A_nm=_A_nm(mode))


def g_vir(mode, r):
    """Virtual-electrode flux profile, as a radial jet."""
    if not mode.virtual:
        raise ModeError("g_vir is defined for TE n = 0 modes only")
    return profile_comps(mode, r)["gEth"].cf


def gauge_profile(mode, r):
    """Coax TE n = 0 profile shared by A_z and V in the fixed gauge, unit peak."""
    if not (mode.virtual and mode.coaxial):
        raise ModeError("defined for coaxial TE n = 0 modes only")
    x, kc = mode.x, mode.k_c
    J0x, Y0x = specfun.bessel_j(0, x), specfun.bessel_y(0, x)
    r = _check_r(mode, r)
    u = (cylinder_jet("Y", 0, kc, r) * J0x - cylinder_jet("J", 0, kc, r) * Y0x)
    return u * (1.0 / (mode.norm.A_m_prime * J0x))


# ---------------------------------------------------------------------------
# residual checks

def _div(V, r, n, beta):
    rv = Jet.variable(r)
    return V[0].dr() + V[0] / rv + V[1].dtheta(n) / rv + V[2].dz(beta)


def _curl(V, r, n, beta):
    rv = Jet.variable(r)
    return (V[2].dtheta(n) / rv - V[1].dz(beta),
            V[0].dz(beta) - V[2].dr(),
            V[1].dr() + V[1] / rv - V[0].dtheta(n) / rv)


def maxwell_residual(mode, r, theta, z, t, q=Quadratures(0.7, 0.4)):
    """Max relative residual of the four source-free Maxwell equations.

    Residuals are scaled by k·E_m (electric equations) or k·B_m (magnetic).
    """
    E, B = field_comps(mode, 1.0, r)
    n, beta, w, c = mode.n, mode.beta, mode.omega, mode.c
    cs, sn = _angles(mode, theta)
    f, ft = envelope(mode, Quadratures(*q), z, t)
    ev = lambda comp: np.abs(comp.value(cs, sn, f, ft))
    sE, sB = mode.k, mode.k / c
    cE, cB = _curl(E, r, n, beta), _curl(B, r, n, beta)
    res = [ev(_div(E, r, n, beta)) / sE, ev(_div(B, r, n, beta)) / sB]
    res += [ev(cE[i] + B[i].dt(w)) / sE for i in range(3)]
    res += [ev(cB[i] - E[i].dt(w) / (c * c)) / sB for i in range(3)]
    return float(max(np.max(x) for x in res))


def boundary_residual(mode, n_theta=64):
    """Max |tangential E| and |normal B| on conductors and virtual planes (profile units)."""
    theta = np.linspace(0.0, 2 * np.pi, n_theta, endpoint=False)
    worst = 0.0
    walls = [mode.a] + ([mode.b] if mode.coaxial else [])
    for rw in walls:
        g = profile(mode, np.full_like(theta, rw), theta)
        worst = max(worst, float(np.max(np.abs(np.concatenate([g.gEth, g.gEz, g.gBr])))))
    if mode.virtual:
        lo, hi = r_domain(mode)
        rs = np.linspace(lo, hi, 65)
        g = profile(mode, rs, np.full_like(rs, mode.spec.theta0))
        worst = max(worst, float(np.max(np.abs(np.concatenate([g.gEr, g.gEz, g.gBth])))))
    return worst
