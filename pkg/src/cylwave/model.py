"""Geometry, medium, mode labels and the solved propagating mode."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import NamedTuple, Optional, Union

import numpy as np

from . import specfun

__all__ = [
    "EPS0", "MU0", "Family", "Medium", "Coaxial", "Hollow", "ModeSpec",
    "NormalizationData", "PropagatingMode", "Quadratures", "ModeError",
    "cutoff_function", "cutoff_roots", "solve_mode", "envelope",
]

EPS0 = 8.8541878128e-12   # F/m
MU0 = 1.25663706212e-6    # H/m


class ModeError(ValueError):
    """Invalid mode specification or geometry pairing."""


class Family(str, Enum):
    TEM = "TEM"
    TM = "TM"
    TE = "TE"


@dataclass(frozen=True)
class Medium:
    epsilon: float
    mu: float

    def __post_init__(self):
        if not (self.epsilon > 0 and self.mu > 0):
            raise ModeError("epsilon and mu must be positive")

    @classmethod
    def from_relative(cls, epsilon_r=1.0, mu_r=1.0):
        return cls(EPS0 * epsilon_r, MU0 * mu_r)

    @property
    def c(self):
        return 1.0 / math.sqrt(self.mu * self.epsilon)


@dataclass(frozen=True)
class Coaxial:
    a: float
    b: float

    def __post_init__(self):
        if not 0 < self.a < self.b:
            raise ModeError("coaxial geometry needs 0 < a < b")

    @property
    def ratio(self):
        return self.b / self.a

    @property
    def r_min(self):
        return self.a

    @property
    def r_max(self):
        return self.b


@dataclass(frozen=True)
class Hollow:
    a: float

    def __post_init__(self):
        if not self.a > 0:
            raise ModeError("hollow geometry needs a > 0")

    @property
    def r_min(self):
        return 0.0

    @property
    def r_max(self):
        return self.a


Geometry = Union[Coaxial, Hollow]


@dataclass(frozen=True)
class ModeSpec:
    """Wave family with azimuthal index n and radial index m.

    TEM carries no indices; it is stored with n = 0, m = 0.
    """

    family: Family
    n: int = 0
    m: int = 1
    theta0: float = 0.0
    phi0: float = 0.0

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        if fam is Family.TEM:
            object.__setattr__(self, "n", 0)
            object.__setattr__(self, "m", 0)
            return
        if int(self.n) != self.n or self.n < 0:
            raise ModeError("n must be a non-negative integer")
        if int(self.m) != self.m or self.m < 1:
            raise ModeError("m must be an integer >= 1")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))

    def label(self):
        if self.family is Family.TEM:
            return "TEM"
        return f"{self.family.value}{self.n},{self.m}"


@dataclass(frozen=True)
class NormalizationData:
    A_nm: Optional[float] = None
    r_max: Optional[float] = None
    A_m: Optional[float] = None
    A_m_prime: Optional[float] = None
    r_max_prime: Optional[float] = None


class Quadratures(NamedTuple):
    X: float = 1.0
    Y: float = 0.0


@dataclass(frozen=True)
class PropagatingMode:
    spec: ModeSpec
    geometry: Geometry
    medium: Medium
    L: float
    l: int
    beta: float
    k_c: float
    k: float
    omega: float
    v_phi: float
    norm: NormalizationData = field(default_factory=NormalizationData)

    @property
    def family(self):
        return self.spec.family

    @property
    def n(self):
        return self.spec.n

    @property
    def m(self):
        return self.spec.m

    @property
    def a(self):
        return self.geometry.a

    @property
    def b(self):
        return getattr(self.geometry, "b", None)

    @property
    def coaxial(self):
        return isinstance(self.geometry, Coaxial)

    @property
    def virtual(self):
        """TE n = 0: described with virtual (diameter plane) electrodes."""
        return self.family is Family.TE and self.n == 0

    @property
    def x(self):
        return self.k_c * self.geometry.a

    @property
    def c(self):
        return self.medium.c

    @property
    def omega_c(self):
        return self.c * self.k_c

    def describe(self):
        g = self.geometry
        geo = f"coax(b/a={g.ratio:.6g})" if self.coaxial else "hollow"
        return f"{self.spec.label()} {geo}"


def cutoff_function(spec, geometry):
    """Cutoff equation as a function of x = k_c·a."""
    n = spec.n
    if spec.family is Family.TEM:
        raise ModeError("TEM modes have no cutoff equation")
    if isinstance(geometry, Coaxial):
        lam = geometry.ratio
        if spec.family is Family.TM:
            return lambda x: specfun.cross_tm(n, x, lam)
        return lambda x: specfun.cross_te(n, x, lam)
    if spec.family is Family.TM:
        return lambda x: specfun.bessel_j(n, x)
    return lambda x: specfun.bessel_jp(n, x)


def _scan_setup(spec, geometry, m):
    # the scan step is pi/8 in k_c·(b-a) for coax, in k_c·a for hollow
    span = (m + 0.5 * spec.n + 2) * math.pi
    if isinstance(geometry, Coaxial):
        d = geometry.ratio - 1.0
        return span / d, math.pi / 8 / d
    return span, math.pi / 8


def cutoff_roots(spec, geometry, m_max=None):
    """First ``m_max`` roots x = k_c·a of the family's cutoff equation."""
    m_max = spec.m if m_max is None else m_max
    f = cutoff_function(spec, geometry)
    x_hi, step = _scan_setup(spec, geometry, m_max)
    x_lo = step / 4
    for attempt in range(2):
        roots = specfun.find_roots(f, x_lo, x_hi, scan_step=step)
        if len(roots) >= m_max:
            return roots[:m_max]
        x_hi *= 2.0  # extend the window once
    raise specfun.RootSearchError(
        f"only {len(roots)} cutoff root(s) below x = {x_hi:.6g}; m = {m_max} requested")


def solve_mode(spec, geometry, medium, L, l):
    """Solve the cutoff equation and assemble the propagating mode."""
    if not L > 0:
        raise ModeError("L must be positive")
    if int(l) != l or l == 0:
        raise ModeError("l must be a non-zero integer")
    if spec.family is Family.TEM and not isinstance(geometry, Coaxial):
        raise ModeError("no TEM mode exists in a hollow guide")
    beta = 2.0 * math.pi * int(l) / L
    if spec.family is Family.TEM:
        k_c = 0.0
    else:
        k_c = cutoff_roots(spec, geometry)[spec.m - 1] / geometry.a
    k = math.hypot(k_c, beta)
    c = medium.c
    mode = PropagatingMode(spec=spec, geometry=geometry, medium=medium, L=float(L), l=int(l),
                           beta=beta, k_c=k_c, k=k, omega=c * k, v_phi=c * k / abs(beta))
    from . import profiles  # normalization lives with the profiles
    return replace(mode, norm=profiles.normalization(mode))


def envelope(mode, q, z, t):
    """Quadrature envelopes f and f̃ at (z, t)."""
    psi = mode.omega * np.asarray(t) - mode.beta * np.asarray(z) + mode.spec.phi0
    c, s = np.cos(psi), np.sin(psi)
    f = q[0] * c + q[1] * s
    ft = q[0] * s - q[1] * c
    if np.ndim(f) == 0:
        return float(f), float(ft)
    return f, ft
