"""Effective lengths, generalized fluxes, electrode charges and currents,
energy and momentum (surface and volume routes), propagation residuals."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np
from scipy import integrate

from . import profiles, specfun
from .model import Family, ModeError, Quadratures, envelope
from .profiles import Comp
from .specfun import Jet, cylinder_jet

__all__ = [
    "Electrode", "ModalConstants", "SurfaceState", "ConstantsOfMotion", "LineQuantities",
    "QuadratureError", "compute_h_eff", "modal_constants", "flux_amplitude", "flux_comp",
    "generalized_flux", "surface_state", "line_charge_current", "energy_momentum_surface",
    "energy_momentum_volume", "flux_equation_residual", "charge_conservation_residual",
    "surface_energy_density", "valid_electrodes",
]

QUAD_RTOL = 1e-12


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested accuracy."""


class Electrode(str, Enum):
    IN = "in"
    OUT = "out"
    FRONT = "front"
    BACK = "back"
    VIR_TOP = "vir_top"
    VIR_BOTTOM = "vir_bottom"


class SurfaceState(NamedTuple):
    sigma: float
    j_z: float
    j_t: float  # u_θ on cylinders, u_r on virtual planes


class ConstantsOfMotion(NamedTuple):
    H: float
    P_z: float
    J_ang: float


class LineQuantities(NamedTuple):
    q_line: float
    current: float
    q_full: float
    current_full: float


@dataclass(frozen=True)
class ModalConstants:
    h_eff: float
    h_eff_prime: Optional[float]
    C_d: float
    L_d_inv: float
    C_d_prime: Optional[float]
    L_d_inv_prime: Optional[float]
    K: float
    C_H: Optional[float] = None
    C_P: Optional[float] = None
    L_H_inv: Optional[float] = None
    L_H_over_beta2: Optional[float] = None
    phi_m: Optional[float] = None
    E_m: Optional[float] = None


def _quad(fn, lo, hi):
    val, err, info, *msg = integrate.quad(fn, lo, hi, epsabs=0.0, epsrel=QUAD_RTOL,
                                          limit=400, full_output=1)
    if msg and abs(err) > 1e-9 * abs(val):
        raise QuadratureError(msg[0])
    return val


def valid_electrodes(mode):
    if mode.coaxial:
        out = [Electrode.IN, Electrode.OUT]
    else:
        out = [Electrode.FRONT, Electrode.BACK]
    if mode.virtual:
        out += [Electrode.VIR_TOP, Electrode.VIR_BOTTOM]
    return out


# ---------------------------------------------------------------------------
# effective lengths

def compute_h_eff(mode):
    """(h_eff, h'_eff); the primed length exists for coaxial real electrodes only."""
    J, Y = specfun.bessel_j, specfun.bessel_y
    fam, n, x, a, kc = mode.family, mode.n, mode.x, mode.a, mode.k_c
    if fam is Family.TEM:
        h = a * math.log(mode.geometry.ratio)
        return h, mode.geometry.ratio * h
    if mode.coaxial:
        lam, b = mode.geometry.ratio, mode.b
        xb = lam * x
        if fam is Family.TM:
            Jx, Yx = J(n, x), Y(n, x)
            h = a * math.pi ** 2 / 2 * _quad(
                lambda r: kc * kc * r / 2 * (J(n, kc * r) * Yx - Jx * Y(n, kc * r)) ** 2, a, b)
            return h, lam * abs(J(n, xb) / Jx) * h
        if n > 0:
            dJ = J(n + 1, x) - J(n - 1, x)
            dY = Y(n + 1, x) - Y(n - 1, x)
            den = dJ * Y(n, x) - J(n, x) * dY
            h = a * 2 / n ** 2 * _quad(
                lambda r: kc * kc * r / 2 * ((dJ * Y(n, kc * r) - J(n, kc * r) * dY) / den) ** 2, a, b)
            s = math.pi / 4 * xb * ((J(n + 1, xb) - J(n - 1, xb)) * Y(n, x)
                                    - J(n, x) * (Y(n + 1, xb) - Y(n - 1, xb)))
            return h, lam * abs(s) * h
        A_m = mode.norm.A_m
        h = a * _quad(lambda r: 4 * r / a ** 2 * ((J(1, kc * r) * Y(1, x) - J(1, x) * Y(1, kc * r))
                                                   / (A_m * x)) ** 2, a, b)
        return h, None
    if fam is Family.TM:
        return a * 2 * (J(n - 1, x) / (J(n - 1, x) - J(n + 1, x))) ** 2, None
    if n > 0:
        Jn, Jn1 = J(n, x), J(n + 1, x)
        return a * (x / n) ** 2 * (x * Jn ** 2 - 2 * n * Jn * Jn1 + x * Jn1 ** 2) / (2 * x * Jn ** 2), None
    return a * 2 * (J(0, x) ** 2 + J(1, x) ** 2) / mode.norm.A_m ** 2, None


def modal_constants(mode, hbar=None):
    from . import gauge, quantize
    h, hp = compute_h_eff(mode)
    eps, mu = mode.medium.epsilon, mode.medium.mu
    mc = ModalConstants(h_eff=h, h_eff_prime=hp, C_d=eps / h, L_d_inv=1.0 / (mu * h),
                        C_d_prime=None if hp is None else eps / hp,
                        L_d_inv_prime=None if hp is None else 1.0 / (mu * hp),
                        K=gauge.k_coefficient(mode))
    C_H, C_P, L_H_inv = quantize.modal_coefficients(mode, h)
    phi_m, E_m = quantize.quantum_amplitude(mode, hbar=hbar, h_eff=h)
    return ModalConstants(**{**mc.__dict__, "C_H": C_H, "C_P": C_P, "L_H_inv": L_H_inv,
                             "L_H_over_beta2": 1.0 / (L_H_inv * mode.beta ** 2),
                             "phi_m": phi_m, "E_m": E_m})


def _resolve_E_m(mode, E_m):
    if E_m is None:
        from . import quantize
        return quantize.quantum_amplitude(mode)[1]
    if not E_m > 0:
        raise ModeError("E_m must be positive")
    return float(E_m)


def flux_amplitude(mode, E_m=None):
    """φ_m = E_m·h_eff/ω."""
    return _resolve_E_m(mode, E_m) * compute_h_eff(mode)[0] / mode.omega


# ---------------------------------------------------------------------------
# generalized flux

def _vir_rdiv(mode, r):
    """(1/r)∂r(r·g_vir) as a radial jet (regular on the axis)."""
    kc, x, A_m = mode.k_c, mode.x, mode.norm.A_m
    if mode.coaxial:
        z0 = (cylinder_jet("Y", 0, kc, r) * specfun.bessel_j(1, x)
              - cylinder_jet("J", 0, kc, r) * specfun.bessel_y(1, x))
        return z0 * (2 * kc / (A_m * x))
    return cylinder_jet("J", 0, kc, r) * (2 * kc / A_m)


def flux_comp(mode, phi_m, r=None):
    """φ/f̃-slot decomposition of the generalized flux."""
    if mode.virtual:
        if r is None:
            raise ModeError("the virtual-electrode flux depends on r")
        return Comp(ct=profiles.g_vir(mode, r) * phi_m)
    amp = Jet(phi_m, 0.0, 0.0)
    return Comp(st=amp) if profiles.g_real_parity(mode) == "sin" else Comp(ct=amp)


def _angles(mode, theta):
    arg = mode.n * (np.asarray(theta, dtype=float) - mode.spec.theta0)
    return np.cos(arg), np.sin(arg)


def generalized_flux(mode, q, coord, z, t, E_m=None):
    """φ = φ_m·g·f̃; coord is θ on real electrodes and r for TE n = 0."""
    phi_m = flux_amplitude(mode, E_m)
    f, ft = envelope(mode, Quadratures(*q), z, t)
    if mode.virtual:
        comp = flux_comp(mode, phi_m, coord)
        return comp.value(1.0, 0.0, f, ft)
    cs, sn = _angles(mode, coord)
    return flux_comp(mode, phi_m).value(cs, sn, f, ft)


# ---------------------------------------------------------------------------
# surface charges and currents

def _kappa(mode):
    return (mode.k / mode.beta) ** 2 if mode.family is Family.TM else 1.0


def _out_sign(mode):
    if mode.family is Family.TEM:
        return -1.0
    if mode.family is Family.TM:
        return -(-1.0) ** mode.m
    return -(-1.0) ** (mode.m + 1)


def _te0_peripheral(mode, electrode, L_inv, phi_m):
    J, Y = specfun.bessel_j, specfun.bessel_y
    kc, x, A_m = mode.k_c, mode.x, mode.norm.A_m
    if electrode is Electrode.IN:
        c = L_inv * 2 * kc * (J(1, x) * Y(0, x) - J(0, x) * Y(1, x)) / (A_m * x)
    elif electrode is Electrode.OUT:
        xb = mode.geometry.ratio * x
        c = -L_inv * 2 * kc * (J(1, x) * Y(0, xb) - J(0, xb) * Y(1, x)) / (A_m * x)
    else:
        c = -L_inv * 2 * kc * J(0, x) / A_m
    return Comp(ct=Jet(c * phi_m, 0.0, 0.0))


def surface_comps(mode, electrode, phi_m, r=None):
    """(σ, j_z, j_t) as Comp objects on one electrode."""
    electrode = Electrode(electrode)
    if electrode not in valid_electrodes(mode):
        raise ModeError(f"electrode {electrode.value!r} does not exist for {mode.describe()}")
    h, hp = compute_h_eff(mode)
    eps, mu = mode.medium.epsilon, mode.medium.mu
    C, L_inv = eps / h, 1.0 / (mu * h)
    w, beta, n = mode.omega, mode.beta, mode.n
    zero = Comp()
    if electrode in (Electrode.VIR_TOP, Electrode.VIR_BOTTOM):
        s = 1.0 if electrode is Electrode.VIR_TOP else -1.0
        phi = flux_comp(mode, phi_m, r)
        jr = Comp(ct=_vir_rdiv(mode, r) * phi_m)
        return phi.dt(w) * (s * C), phi.dz(beta) * (-s * L_inv), jr * (-s * L_inv)
    if mode.virtual:
        return zero, zero, _te0_peripheral(mode, electrode, L_inv, phi_m)
    phi = flux_comp(mode, phi_m)
    kap = _kappa(mode)
    R = mode.a
    if electrode is Electrode.OUT:
        s, C, L_inv, R = _out_sign(mode), eps / hp, 1.0 / (mu * hp), mode.b
    elif electrode is Electrode.BACK:
        s = -(-1.0) ** (n + 1)
    else:
        s = 1.0
    sigma = phi.dt(w) * (s * C)
    jz = phi.dz(beta) * (-s * L_inv * kap)
    if mode.family is Family.TE:
        jt = phi.dtheta(n) * (-s * L_inv * mode.k_c ** 2 * R / n ** 2)
    else:
        jt = zero
    return sigma, jz, jt


def surface_state(mode, electrode, q, coord, z, t, E_m=None):
    """σ and surface current on an electrode at transverse coordinate ``coord``.

    For the back electrode of a hollow guide, ``coord`` is the angle θ of the
    facing front point (the physical point sits at θ + π).
    """
    phi_m = flux_amplitude(mode, E_m)
    electrode = Electrode(electrode)
    virtual_plane = electrode in (Electrode.VIR_TOP, Electrode.VIR_BOTTOM)
    comps = surface_comps(mode, electrode, phi_m, coord if virtual_plane else None)
    f, ft = envelope(mode, Quadratures(*q), z, t)
    if virtual_plane:
        cs, sn = 1.0, 0.0
    else:
        cs, sn = _angles(mode, coord)
    return SurfaceState(*(c.value(cs, sn, f, ft) for c in comps))


def line_charge_current(mode, q, z, t, E_m=None):
    """Charge and longitudinal current per unit length on the reference electrode.

    For n ≥ 1 the reported pair is the integral over one angular lobe
    (|n(θ − θ₀)| ≤ π/2 about the peak); the full-periphery values vanish.
    Virtual electrodes integrate over the top half-plane.
    """
    phi_m = flux_amplitude(mode, E_m)
    f, ft = envelope(mode, Quadratures(*q), z, t)
    if mode.virtual:
        J, Y = specfun.bessel_j, specfun.bessel_y
        kc, x, A_m = mode.k_c, mode.x, mode.norm.A_m
        if mode.coaxial:
            z0 = lambda u: J(1, x) * Y(0, u) - J(0, u) * Y(1, x)
            width = -2 * (z0(mode.geometry.ratio * x) - z0(x)) / (kc * A_m * x)
        else:
            width = 2 * (1 - J(0, x)) / (A_m * kc)
        h = compute_h_eff(mode)[0]
        C, L_inv = mode.medium.epsilon / h, 1.0 / (mode.medium.mu * h)
        q_line = C * mode.omega * phi_m * f * width
        cur = L_inv * mode.beta * phi_m * f * width
        return LineQuantities(float(q_line), float(cur), float(q_line), float(cur))
    ref = Electrode.IN if mode.coaxial else Electrode.FRONT
    sig, jz, _ = surface_comps(mode, ref, phi_m)
    # amplitudes at the angular peak (cos or sin slot carries the same value)
    s0 = sig.cf.v + sig.sf.v
    s1 = sig.ct.v + sig.st.v
    j0 = jz.cf.v + jz.sf.v
    j1 = jz.ct.v + jz.st.v
    peak_sigma = s0 * f + s1 * ft
    peak_j = j0 * f + j1 * ft
    a = mode.a
    if mode.n == 0:
        full = 2 * math.pi * a
        return LineQuantities(float(peak_sigma * full), float(peak_j * full),
                              float(peak_sigma * full), float(peak_j * full))
    lobe = 2 * a / mode.n
    return LineQuantities(float(peak_sigma * lobe), float(peak_j * lobe), 0.0, 0.0)


# ---------------------------------------------------------------------------
# energy and momentum

def _period_integrals(mode, q):
    X, Yq = q
    return 0.5 * (X * X + Yq * Yq) * mode.L


def _vir_moments(mode):
    lo, hi = profiles.r_domain(mode)
    g = lambda r: profiles.g_vir(mode, r).v
    d = lambda r: _vir_rdiv(mode, r).v
    G0 = _quad(lambda r: r * g(r) ** 2, lo, hi)
    G1 = _quad(lambda r: r * d(r) ** 2, lo, hi)
    return G0, G1


def energy_momentum_surface(mode, E_m=None, q=Quadratures()):
    """H and P_z from the electrode (flux-form) integrals, closed form in θ, z, t."""
    q = Quadratures(*q)
    E_m = _resolve_E_m(mode, E_m)
    h = compute_h_eff(mode)[0]
    phi_m = E_m * h / mode.omega
    eps, mu = mode.medium.epsilon, mode.medium.mu
    C, L_inv = eps / h, 1.0 / (mu * h)
    w, beta, kc, c = mode.omega, mode.beta, mode.k_c, mode.c
    I = _period_integrals(mode, q)
    p2 = phi_m * phi_m
    if mode.virtual:
        G0, G1 = _vir_moments(mode)
        wgt = 2 * math.pi / h
        H = wgt * (0.5 * (C * w * w + L_inv * beta * beta) * p2 * I * G0 + 0.5 * L_inv * p2 * I * G1)
        P = wgt * C * p2 * w * beta * I * G0
        return ConstantsOfMotion(float(H), float(P), 0.0)
    gamma = 1 if mode.n == 0 else 2
    Th = mode.a * 2 * math.pi / gamma
    kap = _kappa(mode)
    H = 0.5 * C * w * w * p2 * Th * I + 0.5 * L_inv * kap * kap * beta * beta * p2 * Th * I
    if mode.family is Family.TM:
        H += 0.5 * C * kap * (c * kc) ** 2 * p2 * Th * I
    if mode.family is Family.TE:
        H += 0.5 * L_inv * kc * kc * p2 * math.pi * mode.a * I
    P = C * kap * p2 * w * beta * Th * I
    return ConstantsOfMotion(float(H), float(P), 0.0)


def _split(comp, cs, sn):
    # (f-part, f̃-part) at fixed angle
    return comp.cf.v * cs + comp.sf.v * sn, comp.ct.v * cs + comp.st.v * sn


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _z_moments(mode, q, t):
    """∫z f², ∫z f̃², ∫z f f̃ over one guide length."""
    X, Yq = q
    L, kap = mode.L, 2 * mode.beta
    C = 2 * (mode.omega * t + mode.spec.phi0)
    zc = -L * math.sin(C) / kap   # ∫ z cos(2ψ) dz
    zs = L * math.cos(C) / kap    # ∫ z sin(2ψ) dz
    base = 0.5 * (X * X + Yq * Yq) * L * L / 2
    d, xy = 0.5 * (X * X - Yq * Yq), X * Yq
    return base + d * zc + xy * zs, base - d * zc - xy * zs, d * zs - xy * zc


def energy_momentum_volume(mode, E_m=None, q=Quadratures(), t=0.0):
    """H, P_z and the angular momentum J_z-vector norm by direct volume integration."""
    q = Quadratures(*q)
    E_m = _resolve_E_m(mode, E_m)
    eps, mu = mode.medium.epsilon, mode.medium.mu
    I = _period_integrals(mode, q)
    Mff, Mtt, Mft = _z_moments(mode, q, t)
    nth = 4 * (mode.n + 2)
    th = np.linspace(0.0, 2 * math.pi, nth, endpoint=False) + 0.1234
    dth = 2 * math.pi / nth
    cs, sn = _angles(mode, th)
    ur = (np.cos(th), np.sin(th))

    def integrand(r):
        E, B = profiles.field_comps(mode, E_m, np.full_like(th, r))
        Ef, Et = zip(*(_split(c, cs, sn) for c in E))
        Bf, Bt = zip(*(_split(c, cs, sn) for c in B))
        e2 = sum(x * x for x in Ef) + sum(x * x for x in Et)
        b2 = sum(x * x for x in Bf) + sum(x * x for x in Bt)
        u = I * (0.5 * eps * e2 + 0.5 * b2 / mu)
        ff, tt = _cross(Ef, Bf), _cross(Et, Bt)
        ft = tuple(p + s for p, s in zip(_cross(Ef, Bt), _cross(Et, Bf)))
        g0 = [eps * I * (ff[i] + tt[i]) for i in range(3)]           # ∫ g dz
        gz = [eps * (ff[i] * Mff + tt[i] * Mtt + ft[i] * Mft) for i in range(3)]  # ∫ z g dz
        # r × g = -z g_θ u_r + (z g_r - r g_z) u_θ + r g_θ z
        jr = -gz[1]
        jt = gz[0] - r * g0[2]
        jx = jr * ur[0] - jt * ur[1]
        jy = jr * ur[1] + jt * ur[0]
        jzz = r * g0[1]
        vals = np.array([u.sum(), g0[2].sum(), jx.sum(), jy.sum(), jzz.sum(),
                         g0[0].sum(), g0[1].sum()])
        return vals * dth * r

    lo, hi = profiles.r_domain(mode)
    res, err, info = integrate.quad_vec(integrand, lo, hi, epsabs=0.0, epsrel=1e-11,
                                        limit=400, full_output=True)
    if not info.success:
        raise QuadratureError(info.message)
    H, P, Jx, Jy, Jz = res[:5]
    return ConstantsOfMotion(float(H), float(P), float(math.sqrt(Jx * Jx + Jy * Jy + Jz * Jz)))


# ---------------------------------------------------------------------------
# residual checks

def _points(mode, sample_points):
    pts = np.atleast_2d(np.asarray(sample_points, dtype=float))
    return pts[:, 0], pts[:, 1], pts[:, 2]


def flux_equation_residual(mode, q, sample_points):
    """∂²φ/∂z² − v⁻²∂²φ/∂t² − μ²φ relative to the largest term.

    ``sample_points`` rows are (coord, z, t).
    """
    coord, z, t = _points(mode, sample_points)
    phi = flux_comp(mode, 1.0, coord if mode.virtual else None)
    if mode.family is Family.TM:
        v, mass = mode.v_phi, 0.0
    else:
        v, mass = mode.c, (mode.k_c ** 2 if mode.family is Family.TE else 0.0)
    f, ft = envelope(mode, Quadratures(*q), z, t)
    cs, sn = (1.0, 0.0) if mode.virtual else _angles(mode, coord)
    ev = lambda c: c.value(cs, sn, f, ft)
    tz = ev(phi.dz(mode.beta).dz(mode.beta))
    tt = ev(phi.dt(mode.omega).dt(mode.omega)) / (v * v)
    tm = mass * ev(phi)
    scale = np.max(np.abs(tz) + np.abs(tt) + np.abs(tm))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(tz - tt - tm)) / scale)


def charge_conservation_residual(mode, q, electrode, sample_points):
    """Surface divergence of j plus ∂σ/∂t, relative to the largest term.

    Cylinders use (1/R)∂θ j_θ + ∂z j_z; virtual planes use ∂r j_r + ∂z j_z.
    """
    coord, z, t = _points(mode, sample_points)
    electrode = Electrode(electrode)
    plane = electrode in (Electrode.VIR_TOP, Electrode.VIR_BOTTOM)
    sig, jz, jt = surface_comps(mode, electrode, 1.0, coord if plane else None)
    f, ft = envelope(mode, Quadratures(*q), z, t)
    cs, sn = (1.0, 0.0) if plane else _angles(mode, coord)
    ev = lambda c: c.value(cs, sn, f, ft)
    t1 = ev(sig.dt(mode.omega))
    t2 = ev(jz.dz(mode.beta))
    if plane:
        t3 = ev(jt.dr())
    else:
        R = mode.b if electrode is Electrode.OUT else mode.a
        t3 = ev(jt.dtheta(mode.n)) / R
    scale = np.max(np.abs(t1) + np.abs(t2) + np.abs(t3))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(t1 + t2 + t3)) / scale)


def surface_energy_density(mode, q, electrode, coord, z, t, E_m=None):
    """Energy density H_d on the reference electrode (J/m²).

    Integrating over a·dθ·dz (real) or dr·dz (virtual, weight included)
    returns H.
    """
    electrode = Electrode(electrode)
    phi_m = flux_amplitude(mode, E_m)
    h = compute_h_eff(mode)[0]
    C, L_inv = mode.medium.epsilon / h, 1.0 / (mode.medium.mu * h)
    f, ft = envelope(mode, Quadratures(*q), z, t)
    if electrode in (Electrode.VIR_TOP, Electrode.VIR_BOTTOM):
        sig, jz, jr = surface_comps(mode, electrode, phi_m, coord)
        ev = lambda c: c.value(1.0, 0.0, f, ft)
        wgt = 2 * math.pi * np.asarray(coord) / h
        return 0.5 * wgt * (ev(sig) ** 2 / C + (ev(jz) ** 2 + ev(jr) ** 2) / L_inv)
    ref = Electrode.IN if mode.coaxial else Electrode.FRONT
    if electrode is not ref:
        raise ModeError(f"energy density is defined on the reference electrode {ref.value!r}")
    sig, jz, jt = surface_comps(mode, electrode, phi_m)
    cs, sn = _angles(mode, coord)
    ev = lambda c: c.value(cs, sn, f, ft)
    Hd = 0.5 * ev(sig) ** 2 / C + 0.5 * ev(jz) ** 2 / L_inv
    if mode.family is Family.TM:
        phi = ev(flux_comp(mode, phi_m))
        Hd = Hd + 0.5 * C * _kappa(mode) * (mode.c * mode.k_c) ** 2 * phi ** 2
    if mode.family is Family.TE:
        Hd = Hd + 0.5 / L_inv * mode.n ** 2 / (mode.k_c * mode.a) ** 2 * ev(jt) ** 2
    return Hd
