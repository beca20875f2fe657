"""Bulk bands of the infinite chain: dispersion, gap, winding number, PT phase."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PTPhaseTag",
    "PTPhase",
    "BandPoint",
    "WindingResult",
    "QuadratureError",
    "dispersion",
    "band_gap",
    "winding_number",
    "pt_phase",
]

WINDING_TOL = 1e-6


class QuadratureError(ArithmeticError):
    pass


class PTPhaseTag(enum.Enum):
    UNBROKEN = "Unbroken"
    PARTIALLY_BROKEN = "PartiallyBroken"
    FULLY_BROKEN = "FullyBroken"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class PTPhase:
    """Phase tag; ``boundary`` marks a gain sitting exactly on a phase edge."""

    tag: PTPhaseTag
    boundary: bool = False

    def __str__(self) -> str:
        return f"{self.tag.value}(boundary)" if self.boundary else self.tag.value


@dataclass(frozen=True)
class BandPoint:
    k: float | np.ndarray
    E_plus: complex | np.ndarray
    E_minus: complex | np.ndarray


@dataclass(frozen=True)
class WindingResult:
    value: int
    quadrature_residual: float
    raw: float


def dispersion(k, v: float, w: float, gamma: float = 0.0) -> BandPoint:
    """Two-band energies ``E = +/- sqrt(v^2 + w^2 + 2 v w cos k - gamma^2)``.

    ``E_plus`` is the principal root: non-negative real part, and a
    non-negative imaginary part when the root is purely imaginary.  Accepts
    scalar or array ``k``.
    """
    k_arr = np.asarray(k, dtype=float)
    radicand = v * v + w * w + 2.0 * v * w * np.cos(k_arr) - gamma * gamma
    # +0j keeps negative radicands on the upper branch
    root = np.sqrt(radicand + 0j)
    if root.ndim == 0:
        root = complex(root)
        return BandPoint(float(k_arr), root, -root)
    return BandPoint(k_arr, root, -root)


def band_gap(v: float, w: float) -> float:
    return 2.0 * abs(v - w)


def winding_number(v: float, w: float, Nk: int = 4096) -> WindingResult:
    """Winding of the off-diagonal Bloch element around the origin.

    Integrates ``d/dk arg(v + w e^{ik})`` over one Brillouin zone with the
    periodic trapezoid rule on ``Nk`` points.  The integrand is analytic
    while the gap is open, so the raw value converges to an integer
    exponentially in ``Nk * |ln(w/v)|``; its distance from that integer is
    reported as the residual.

    Raises
    ------
    QuadratureError
        If the residual exceeds ``1e-6`` (grid too coarse for how nearly
        the gap is closed).
    """
    if Nk < 64:
        raise ValueError(f"Nk must be >= 64, got {Nk}")
    if v == w:
        raise ValueError("winding number undefined at v == w (gap closed)")
    k = -math.pi + 2.0 * math.pi * np.arange(Nk) / Nk
    z = np.exp(1j * k)
    h = v + w * z
    dphase = np.imag(1j * w * z / h)
    raw = float(dphase.sum() / Nk)  # (1/2pi) * (2pi/Nk) * sum
    value = int(round(raw))
    residual = abs(raw - value)
    if residual > WINDING_TOL:
        raise QuadratureError(
            f"winding quadrature unconverged: raw={raw:.9f} (residual {residual:.2e}) at Nk={Nk}; "
            f"increase Nk or move away from v == w"
        )
    return WindingResult(value, residual, raw)


def pt_phase(v: float, w: float, gamma: float) -> PTPhase:
    """Thermodynamic-limit PT phase of the bulk bands.

    Unbroken below ``|v - w|``, fully broken above ``v + w``, partially broken
    in between.  A gain exactly on either edge gets the more broken tag with
    ``boundary=True``.
    """
    lower, upper = abs(v - w), v + w
    if gamma < lower:
        return PTPhase(PTPhaseTag.UNBROKEN)
    if gamma == lower:
        return PTPhase(PTPhaseTag.PARTIALLY_BROKEN, boundary=True)
    if gamma < upper:
        return PTPhase(PTPhaseTag.PARTIALLY_BROKEN)
    if gamma == upper:
        return PTPhase(PTPhaseTag.FULLY_BROKEN, boundary=True)
    return PTPhase(PTPhaseTag.FULLY_BROKEN)
