"""Independent reference implementations used by the tests.

Nothing here touches scipy.special or the package: Bessel values come from
their power series in 60-digit mpmath arithmetic (mpmath's own routines for
large arguments, where the series loses all its digits), roots from plain
bisection,
and integrals from a fixed-order composite Gauss-Legendre rule.
"""
import math

import mpmath as mp
import numpy as np

DPS = 60
SERIES_MAX = 25.0


def besselj(n, x):
    """J_n(x) from the ascending series."""
    n = int(n)
    if n < 0:
        return (-1) ** (-n) * besselj(-n, x)
    if abs(x) > SERIES_MAX:
        with mp.workdps(DPS):
            return mp.besselj(n, x)
    with mp.workdps(DPS):
        x = mp.mpf(x)
        h = (x / 2) ** 2
        term = (x / 2) ** n / mp.factorial(n)
        total, k = term, 0
        while True:
            k += 1
            term *= -h / (k * (k + n))
            total += term
            if abs(term) < mp.mpf(10) ** (-DPS + 5) * max(abs(total), mp.mpf(1e-300)) and k > 5:
                break
        return total


def bessely(n, x):
    """Y_n(x) for integer n from the Neumann series."""
    n = int(n)
    if n < 0:
        return (-1) ** (-n) * bessely(-n, x)
    if abs(x) > SERIES_MAX:
        with mp.workdps(DPS):
            return mp.bessely(n, x)
    with mp.workdps(DPS):
        x = mp.mpf(x)
        half = x / 2
        s1 = mp.mpf(0)
        for k in range(n):
            s1 += mp.factorial(n - k - 1) / mp.factorial(k) * half ** (2 * k - n)
        s2, k = mp.mpf(0), 0
        h = -(half ** 2)
        term = half ** n / mp.factorial(n)
        # digamma at k+1 and n+k+1, advanced by psi(z+1) = psi(z) + 1/z
        p1, p2 = mp.digamma(1), mp.digamma(n + 1)
        tiny = mp.mpf(10) ** (-DPS + 5)
        while True:
            s2 += (p1 + p2) * term
            k += 1
            p1 += mp.mpf(1) / k
            p2 += mp.mpf(1) / (n + k)
            term *= h / (k * (k + n))
            if abs(term) * (abs(p1) + abs(p2)) < tiny * max(abs(s2), mp.mpf(1e-300)) and k > 5:
                break
        return (2 * besselj(n, x) * mp.log(half) - s1 - s2) / mp.pi


def besseljp(n, x):
    return (besselj(n - 1, x) - besselj(n + 1, x)) / 2


def besselyp(n, x):
    return (bessely(n - 1, x) - bessely(n + 1, x)) / 2


def cutoff(family, n, lam=None):
    """Cutoff equation in x = k_c·a (lam = b/a, None for a hollow guide)."""
    if lam is None:
        return (lambda x: besselj(n, x)) if family == "TM" else (lambda x: besseljp(n, x))
    if family == "TM":
        return lambda x: besselj(n, x) * bessely(n, lam * x) - besselj(n, lam * x) * bessely(n, x)
    return lambda x: besseljp(n, x) * besselyp(n, lam * x) - besseljp(n, lam * x) * besselyp(n, x)


def bisect(f, lo, hi, iters=80):
    with mp.workdps(DPS):
        lo, hi = mp.mpf(lo), mp.mpf(hi)
        flo = f(lo)
        for _ in range(iters):
            mid = (lo + hi) / 2
            fm = f(mid)
            if fm == 0:
                return mid
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        return (lo + hi) / 2


def roots(f, x_lo, x_hi, step, count):
    """First ``count`` sign-change roots of f on a coarse scan, each bisected."""
    out, x = [], x_lo
    fx = f(x)
    while len(out) < count and x < x_hi:
        x2 = x + step
        f2 = f(x2)
        if (fx > 0) != (f2 > 0):
            out.append(float(bisect(f, x, x2)))
        x, fx = x2, f2
    return out


def gauss_legendre(fn, lo, hi, panels=64, order=20):
    """Composite fixed-order Gauss-Legendre rule."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        mid, half = (a + b) / 2, (b - a) / 2
        total += half * sum(w * fn(mid + half * t) for t, w in zip(nodes, weights))
    return total


def j(n, x):
    return float(besselj(n, x))


def y(n, x):
    return float(bessely(n, x))


def heff_coax_tm(n, x, lam, a=1.0):
    """h_eff of a coaxial TM mode from its defining integral, by Gauss-Legendre."""
    kc = x / a
    Jx, Yx = j(n, x), y(n, x)
    fn = lambda r: kc * kc * r / 2 * (j(n, kc * r) * Yx - Jx * y(n, kc * r)) ** 2
    return a * math.pi ** 2 / 2 * gauss_legendre(fn, a, lam * a, panels=16, order=16)
