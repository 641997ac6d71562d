"""Modal coefficients, the ħ-normalized amplitude and cutoff quanta."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .model import Family

__all__ = ["HBAR", "QuantizationResult", "gamma_n", "modal_coefficients",
           "quantum_amplitude", "cutoff_quanta", "quantize"]

HBAR = 1.054571817e-34  # J·s


def _hbar(hbar):
    return HBAR if hbar is None else float(hbar)


def gamma_n(n):
    return 1 if n == 0 else 2


@dataclass(frozen=True)
class QuantizationResult:
    C_H: float
    C_P: float
    L_H_inv: float
    L_H_over_beta2: float
    phi_m: float
    E_m: float
    B_m: float
    gap: float
    photon_mass: Optional[float]
    gamma_n: int
    hbar: float


def _h(mode, h_eff):
    if h_eff is None:
        from .emdyn import compute_h_eff
        h_eff = compute_h_eff(mode)[0]
    return h_eff


def modal_coefficients(mode, h_eff=None):
    """(C_H, C_P, L_H⁻¹) for one mode."""
    h = _h(mode, h_eff)
    C_d = mode.medium.epsilon / h
    L_d_inv = 1.0 / (mode.medium.mu * h)
    span = 2 * math.pi * mode.a / gamma_n(mode.n) * mode.L
    C_H = C_d * span
    L_H_inv = L_d_inv * span
    if mode.family is Family.TM:
        r2 = (mode.k / mode.beta) ** 2
        return C_H, C_H * r2, L_H_inv * r2 * r2
    return C_H, C_H, L_H_inv


def quantum_amplitude(mode, hbar=None, h_eff=None):
    """(φ_m, E_m) such that 2·C_P·ω·φ_m² = ħ."""
    h = _h(mode, h_eff)
    C_P = modal_coefficients(mode, h)[1]
    phi_m = math.sqrt(_hbar(hbar) / (2 * C_P * mode.omega))
    return phi_m, phi_m * mode.omega / h


def cutoff_quanta(mode, hbar=None):
    """(gap, photon mass): ħω_c for TM/TE, mass ħω_c/c² for TE only."""
    hb = _hbar(hbar)
    if mode.family is Family.TEM:
        return 0.0, 0.0
    gap = hb * mode.omega_c
    if mode.family is Family.TE:
        return gap, gap / mode.c ** 2
    return gap, None


def quantize(mode, hbar=None):
    hb = _hbar(hbar)
    from .emdyn import compute_h_eff
    h = compute_h_eff(mode)[0]
    C_H, C_P, L_H_inv = modal_coefficients(mode, h)
    phi_m, E_m = quantum_amplitude(mode, hb, h)
    gap, mass = cutoff_quanta(mode, hb)
    return QuantizationResult(C_H=C_H, C_P=C_P, L_H_inv=L_H_inv,
                              L_H_over_beta2=1.0 / (L_H_inv * mode.beta ** 2),
                              phi_m=phi_m, E_m=E_m, B_m=E_m / mode.c, gap=gap,
                              photon_mass=mass, gamma_n=gamma_n(mode.n), hbar=hb)
