"""Edge-state ansatz and the two-state effective model built on it.

The left state lives on odd sites and decays as ``(-u)**-n`` into the bulk;
the right state is its mirror image on even sites.  Projecting the chain
Hamiltonian onto these two states gives a 2x2 matrix with diagonal
``+/- i gamma_bar`` and off-diagonal coupling ``C``; its eigenvalues collide
at ``gamma_bar = |C|``, which is the analytic estimate of the edge-state
exceptional point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .model import GainProfile, LatticeSpec, _check_even_size, build_hamiltonian, make_gain_profile, normalize_kind

__all__ = [
    "EdgeDomainError",
    "DecoupledEdgeError",
    "EdgeAnsatz",
    "EffectiveModel",
    "EP_RTOL",
    "ansatz_states",
    "coupling_C",
    "coupling_asymptotic",
    "localization_length",
    "gamma_bar",
    "effective_model",
    "effective_hamiltonian",
    "hybridized_states",
    "gamma_cr_analytic",
    "amplitude_cr_analytic",
    "ansatz_residual",
]

EP_RTOL = 1e-12


class EdgeDomainError(ValueError):
    pass


class DecoupledEdgeError(ValueError):
    pass


def _check_domain(M: int, u: float) -> int:
    M = _check_even_size(M)
    if not u > 1:
        raise EdgeDomainError(f"edge ansatz undefined in trivial phase (u = w/v = {u} <= 1)")
    return M


def _norm_sq(M: int, u: float) -> float:
    # |c_L|^2 = (1 - u^-2) / (1 - u^-M)
    return (1.0 - u**-2) / (1.0 - u ** (-M))


def localization_length(u: float) -> float:
    return 2.0 / math.log(u)


@dataclass(frozen=True)
class EdgeAnsatz:
    M: int
    u: float
    cL: np.ndarray
    cR: np.ndarray
    c_norm: float
    xi: float
    C: float

    def basis(self) -> np.ndarray:
        """``(M, 2)`` array with columns ``|L>``, ``|R>``."""
        return np.stack([self.cL, self.cR], axis=1)


def ansatz_states(M: int, u: float, v: float | None = None) -> EdgeAnsatz:
    """Normalized left/right edge ansatz on an ``M``-site chain.

    ``v`` only enters the stored coupling ``C``; it defaults to ``1/u``
    (energies in units of ``w``).
    """
    M = _check_domain(M, u)
    if v is None:
        v = 1.0 / u
    c = math.sqrt(_norm_sq(M, u))
    n = np.arange(M // 2, dtype=float)
    decay = c * (-1.0) ** n * u**-n
    cL = np.zeros(M)
    cR = np.zeros(M)
    cL[0::2] = decay  # m = 1, 3, ..., M-1
    cR[1::2] = decay[::-1]  # m = 2, ..., M; amplitude c at m = M
    cL.setflags(write=False)
    cR.setflags(write=False)
    return EdgeAnsatz(M, float(u), cL, cR, c, localization_length(u), coupling_C(M, u, v))


def hybridized_states(ansatz: EdgeAnsatz) -> tuple[np.ndarray, np.ndarray]:
    """``(|L> + |R>)/sqrt2`` and ``(|L> - |R>)/sqrt2``."""
    s = 1.0 / math.sqrt(2.0)
    return s * (ansatz.cL + ansatz.cR), s * (ansatz.cL - ansatz.cR)


def coupling_C(M: int, u: float, v: float) -> float:
    """Signed ``<L|H|R>``; positive iff ``M/2 - 1`` is even."""
    M = _check_domain(M, u)
    p = M // 2 - 1
    sign = -1.0 if p % 2 else 1.0
    return sign * v * _norm_sq(M, u) * u ** (-p)


def coupling_asymptotic(M: int, u: float, v: float) -> float:
    """Large-``M`` form ``C0 exp(-M/xi)`` with ``C0 = (w^2 - v^2)/w``."""
    if not u > 1:
        raise EdgeDomainError(f"edge ansatz undefined in trivial phase (u = w/v = {u} <= 1)")
    w = u * v
    return (w * w - v * v) / w * math.exp(-M / localization_length(u))


def gamma_bar(profile: GainProfile, u: float) -> float:
    """Edge-weighted gain ``sum_n g_(2n-1) u^(-2(n-1)) / sum_n u^(-2(n-1))``.

    Runs over all ``N`` odd sites of the chain; the mirror constraint makes
    the right edge state see the same value with opposite sign.
    """
    g = profile.as_array()
    M = _check_domain(len(g), u)
    weights = float(u) ** (-2.0 * np.arange(M // 2))
    return float(np.dot(g[0::2], weights) / weights.sum())


@dataclass(frozen=True)
class EffectiveModel:
    """2x2 edge model ``[[i gb, C], [C, -i gb]]`` and its eigen-data.

    ``E_plus`` is the principal root of ``C^2 - gb^2``.  ``theta`` is the
    complex mixing angle ``-(i/4) ln((gb + C)/(gb - C))`` on the principal
    log branch: below the exceptional point its real part is ``pi/4``, above
    it ``theta`` is purely imaginary.  At the exceptional point ``theta`` is
    ``None``.
    """

    gamma_bar: float
    C: float
    E_plus: complex
    E_minus: complex
    theta: complex | None
    at_ep: bool

    def hamiltonian(self) -> np.ndarray:
        g, C = self.gamma_bar, self.C
        return np.array([[1j * g, C], [C, -1j * g]], dtype=complex)

    def _require_theta(self) -> complex:
        if self.theta is None:
            raise ValueError("eigenvectors coalesce at the exceptional point; offset gamma_bar from |C|")
        return self.theta

    def states(self) -> np.ndarray:
        """Columns ``Psi_+ = (cos t, sin t)`` and ``Psi_- = (sin t, -cos t)``, unit norm."""
        t = self._require_theta()
        c, s = cmath.cos(t), cmath.sin(t)
        P = np.array([[c, s], [s, -c]], dtype=complex)
        return P / np.linalg.norm(P, axis=0)[None, :]

    def state_energies(self) -> tuple[complex, complex]:
        """Eigenvalues belonging to ``Psi_+`` and ``Psi_-``, in that order.

        ``Psi_+`` tends to ``(|L> + |R>)/sqrt2`` at zero gain, so its energy
        carries the sign of ``C`` rather than being ``E_plus``.
        """
        t = self._require_theta()
        g, C = self.gamma_bar, self.C
        return 1j * g + C * cmath.tan(t), 1j * g - C / cmath.tan(t)

    def site_state(self, ansatz: EdgeAnsatz, which: str = "+") -> np.ndarray:
        """Unit-norm chain vector ``a|L> + b|R>`` for ``Psi_+`` or ``Psi_-``."""
        P = self.states()
        col = {"+": 0, "-": 1}[which]
        psi = ansatz.basis() @ P[:, col]
        return psi / np.linalg.norm(psi)


def effective_model(gamma_bar: float, C: float) -> EffectiveModel:
    g, C = float(gamma_bar), float(C)
    E = cmath.sqrt(complex(C * C - g * g, 0.0))
    scale = max(abs(C), abs(g), 1.0)
    at_ep = abs(abs(g) - abs(C)) < EP_RTOL * scale
    theta = None
    if not at_ep:
        ratio = (g + C) / (g - C)
        theta = -0.25j * cmath.log(complex(ratio, 0.0))
    if at_ep:
        E = 0j
    return EffectiveModel(g, C, E, -E, theta, at_ep)


def effective_hamiltonian(H: np.ndarray, ansatz: EdgeAnsatz) -> np.ndarray:
    """Project ``H`` onto ``{|L>, |R>}`` by explicit inner products."""
    B = ansatz.basis()
    return B.T @ np.asarray(H) @ B


def gamma_cr_analytic(M: int, u: float, v: float) -> float:
    return abs(coupling_C(M, u, v))


def amplitude_cr_analytic(
    profile_kind: str | GainProfile, M: int, u: float, v: float, seed: int | None = None
) -> float:
    """Critical amplitude ``U`` at which ``gamma_bar(U) == |C|``.

    Every standard family is linear in ``U``, so this is ``|C|`` divided by
    ``gamma_bar`` of the unit-amplitude profile.  A ``GainProfile`` argument
    is taken as the unit shape itself.
    """
    if isinstance(profile_kind, GainProfile):
        unit = profile_kind
    else:
        kind = normalize_kind(profile_kind)
        unit = make_gain_profile(kind, 1.0, M, seed if kind == "random" else None)
    C = gamma_cr_analytic(M, u, v)
    gb = gamma_bar(unit, u)
    if gb == 0.0:
        raise DecoupledEdgeError(
            "edge states decoupled from potential: gamma_bar of the unit profile is 0, no finite critical amplitude"
        )
    return C / gb


def ansatz_residual(M: int, u: float, v: float) -> float:
    """``||H|L>||_2`` for the Hermitian chain, by explicit matrix-vector product."""
    ansatz = ansatz_states(M, u, v)
    H = build_hamiltonian(LatticeSpec(M, v, u * v))
    return float(np.linalg.norm(H @ ansatz.cL))
