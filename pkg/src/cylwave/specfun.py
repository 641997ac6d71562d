"""Integer-order Bessel functions, derivatives, cross products and root bracketing.

Values come from scipy.special (AMOS/Cephes).  Derivatives use the
half-difference recurrence Z'_n = (Z_{n-1} - Z_{n+1})/2, with negative
orders folded back through Z_{-n} = (-1)^n Z_n.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import optimize, special

__all__ = [
    "DomainError",
    "RootSearchError",
    "bessel_j",
    "bessel_y",
    "bessel_jp",
    "bessel_yp",
    "bessel_jpp",
    "bessel_ypp",
    "cross_tm",
    "cross_te",
    "find_roots",
    "Jet",
    "cylinder_jet",
]

MAX_ORDER = 64
MAX_ARG = 1.0e4


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


class RootSearchError(RuntimeError):
    """Root refinement failed, or fewer roots than requested were found."""

    def __init__(self, message, brackets=()):
        super().__init__(message)
        self.brackets = tuple(brackets)


def _fold(n):
    n = int(n)
    if n < 0:
        return -n, (-1.0) ** n
    return n, 1.0


def _check_x(x, strict_positive):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("Bessel argument must be finite")
    if strict_positive and np.any(x <= 0.0):
        raise DomainError("Y_n(x) is only defined for x > 0")
    if not strict_positive and np.any(x < 0.0):
        raise DomainError("J_n(x) requires x >= 0")
    return x


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def bessel_j(n, x):
    """J_n(x) for integer n (negative orders folded) and x >= 0."""
    x = _check_x(x, False)
    order, sign = _fold(n)
    if order > MAX_ORDER:
        raise DomainError(f"order {order} exceeds {MAX_ORDER}")
    return _out(sign * special.jv(order, x))


def bessel_y(n, x):
    """Y_n(x) for integer n and x > 0.  Never evaluated on the axis."""
    x = _check_x(x, True)
    order, sign = _fold(n)
    if order > MAX_ORDER:
        raise DomainError(f"order {order} exceeds {MAX_ORDER}")
    return _out(sign * special.yv(order, x))


def bessel_jp(n, x):
    return _out(0.5 * (np.asarray(bessel_j(n - 1, x)) - bessel_j(n + 1, x)))


def bessel_yp(n, x):
    return _out(0.5 * (np.asarray(bessel_y(n - 1, x)) - bessel_y(n + 1, x)))


def bessel_jpp(n, x):
    # second derivative from the recurrence applied twice; regular at x = 0
    return _out(0.25 * (np.asarray(bessel_j(n - 2, x)) - 2.0 * bessel_j(n, x) + bessel_j(n + 2, x)))


def bessel_ypp(n, x):
    return _out(0.25 * (np.asarray(bessel_y(n - 2, x)) - 2.0 * bessel_y(n, x) + bessel_y(n + 2, x)))


def _check_ratio(ratio):
    if not ratio > 1.0:
        raise DomainError("ratio b/a must exceed 1")


def cross_tm(n, x_a, ratio):
    """J_n(x)Y_n(λx) - J_n(λx)Y_n(x): zero at coaxial TM cutoffs."""
    _check_ratio(ratio)
    xb = ratio * np.asarray(x_a, dtype=float)
    return _out(np.asarray(bessel_j(n, x_a)) * bessel_y(n, xb) - np.asarray(bessel_j(n, xb)) * bessel_y(n, x_a))


def cross_te(n, x_a, ratio):
    """J'_n(x)Y'_n(λx) - J'_n(λx)Y'_n(x): zero at coaxial TE cutoffs."""
    _check_ratio(ratio)
    xb = ratio * np.asarray(x_a, dtype=float)
    return _out(np.asarray(bessel_jp(n, x_a)) * bessel_yp(n, xb) - np.asarray(bessel_jp(n, xb)) * bessel_yp(n, x_a))


def find_roots(f, x_lo, x_hi, scan_step=math.pi / 8, tol=1e-13, maxiter=200):
    """All simple sign-change roots of ``f`` in (x_lo, x_hi].

    The interval is scanned at ``scan_step``; every bracket is refined with
    Brent's method to relative tolerance ``tol``.  Sign changes caused by
    poles (the refined |f| exceeds both bracket ends) are discarded.
    Brackets that fail to converge raise RootSearchError.
    """
    if not x_lo < x_hi:
        raise ValueError("need x_lo < x_hi")
    if not scan_step > 0:
        raise ValueError("scan_step must be positive")
    npts = int(math.ceil((x_hi - x_lo) / scan_step))
    xs = np.linspace(x_lo, x_lo + npts * scan_step, npts + 1)
    xs[-1] = min(xs[-1], x_hi)
    vals = np.array([f(x) for x in xs], dtype=float)
    rtol = max(tol, 4.0 * np.finfo(float).eps)
    roots, failed = [], []
    for i in range(len(xs) - 1):
        a, b, fa, fb = xs[i], xs[i + 1], vals[i], vals[i + 1]
        if fb == 0.0:
            roots.append(b)
            continue
        if fa == 0.0 or np.sign(fa) == np.sign(fb):
            continue
        try:
            x0, info = optimize.brentq(f, a, b, xtol=1e-300,
                                       rtol=rtol, maxiter=maxiter, full_output=True, disp=False)
        except (ValueError, RuntimeError):
            failed.append((a, b))
            continue
        if not info.converged:
            failed.append((a, b))
            continue
        if abs(f(x0)) > max(abs(fa), abs(fb)):
            continue  # pole, not a root
        roots.append(x0)
    if failed:
        raise RootSearchError(f"{len(failed)} bracket(s) did not converge", failed)
    out = []
    for x in sorted(roots):
        if out and abs(x - out[-1]) <= 10 * rtol * max(abs(x), 1.0):
            continue
        out.append(float(x))
    return tuple(out)


class Jet:
    """Value with first and second derivative along one variable (here r)."""

    __slots__ = ("v", "d1", "d2")

    def __init__(self, v, d1=0.0, d2=0.0):
        self.v, self.d1, self.d2 = v, d1, d2

    @classmethod
    def variable(cls, r):
        r = np.asarray(r, dtype=float)
        return cls(r, np.ones_like(r), np.zeros_like(r))

    @staticmethod
    def _lift(o):
        return o if isinstance(o, Jet) else Jet(o, 0.0, 0.0)

    def __add__(self, o):
        o = self._lift(o)
        return Jet(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.v, -self.d1, -self.d2)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        if not isinstance(o, Jet):
            return Jet(self.v * o, self.d1 * o, self.d2 * o)
        return Jet(self.v * o.v, self.d1 * o.v + self.v * o.d1,
                   self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if not isinstance(o, Jet):
            return Jet(self.v / o, self.d1 / o, self.d2 / o)
        q = self.v / o.v
        dq = (self.d1 - q * o.d1) / o.v
        return Jet(q, dq, (self.d2 - 2.0 * dq * o.d1 - q * o.d2) / o.v)

    def __rtruediv__(self, o):
        return self._lift(o) / self

    def __repr__(self):
        return f"Jet({self.v!r}, {self.d1!r}, {self.d2!r})"


def cylinder_jet(kind, nu, kc, r):
    """Jet of Z_nu(kc*r) in r, Z = J ('J') or Y ('Y')."""
    x = kc * np.asarray(r, dtype=float)
    if kind == "J":
        return Jet(np.asarray(bessel_j(nu, x)), kc * np.asarray(bessel_jp(nu, x)),
                   kc * kc * np.asarray(bessel_jpp(nu, x)))
    if kind == "Y":
        return Jet(np.asarray(bessel_y(nu, x)), kc * np.asarray(bessel_yp(nu, x)),
                   kc * kc * np.asarray(bessel_ypp(nu, x)))
    raise ValueError(f"unknown cylinder function {kind!r}")
