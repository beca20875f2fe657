"""Numerical location of the edge-state exceptional point.

A chain family is one lattice with a fixed gain shape scaled by a single
amplitude ``lam`` (the uniform gain ``gamma``, or ``U`` for the shaped
families).  For each ``lam`` the chain is diagonalized, the two eigenpairs
living on the edge ansatz are picked out, and the point is classified as
PT-broken when either edge eigenvalue has ``|Im E| > 1e-8 w``.  Bisection on
that boolean brackets the exceptional point.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .edge import (
    DecoupledEdgeError,
    EdgeAnsatz,
    EdgeDomainError,
    amplitude_cr_analytic,
    ansatz_states,
    gamma_bar,
    gamma_cr_analytic,
)
from .eig import EigenSolverError, Spectrum, eig_dense
from .model import GainProfile, LatticeError, LatticeSpec, build_hamiltonian, make_gain_profile, normalize_kind

__all__ = [
    "EDGE_PROJECTION_MIN",
    "IM_THRESHOLD",
    "EPError",
    "EdgeHybridizationError",
    "BracketError",
    "LatticeFamily",
    "EPResult",
    "EPRow",
    "edge_projections",
    "identify_edge_pair",
    "edge_eigenpairs",
    "is_broken",
    "find_ep",
    "ep_sweep",
]

log = logging.getLogger(__name__)

EDGE_PROJECTION_MIN = 0.8
IM_THRESHOLD = 1e-8  # in units of w
DEFAULT_TOL = 1e-6
LOWER_FLOOR = 1e-14  # in units of w
UPPER_GROWTH = 1.5
UPPER_CAP = 10.0  # in units of (v + w) / max(unit profile)


class EPError(RuntimeError):
    pass


class EdgeHybridizationError(EPError):
    pass


class BracketError(EPError):
    pass


@dataclass(frozen=True)
class LatticeFamily:
    """Chains ``LatticeSpec(M, v, w, lam * unit)`` for a swept amplitude ``lam``."""

    M: int
    v: float
    w: float
    kind: str = "uniform"
    seed: int | None = None
    custom: GainProfile | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", normalize_kind(self.kind))
        if self.kind == "custom" and self.custom is None:
            raise LatticeError("custom family needs an explicit unit profile")
        if self.kind == "random" and self.seed is None:
            raise LatticeError("random family needs a seed")
        if self.kind != "random" and self.seed is not None:
            raise LatticeError(f"seed is only meaningful for random profiles, not {self.kind!r}")
        self.at(0.0)  # validates M, v, w

    @classmethod
    def from_u(cls, M: int, u: float, kind: str = "uniform", seed: int | None = None, w: float = 1.0, custom=None):
        return cls(M, w / u, w, kind, seed, custom)

    @property
    def u(self) -> float:
        return self.w / self.v

    @property
    def parameter(self) -> str:
        return "gamma" if self.kind == "uniform" else "U"

    @cached_property
    def unit_profile(self) -> GainProfile:
        if self.kind == "custom":
            return self.custom
        return make_gain_profile(self.kind, 1.0, self.M, self.seed)

    def at(self, lam: float) -> LatticeSpec:
        return LatticeSpec(self.M, self.v, self.w, self.unit_profile.scaled(lam))

    def ansatz(self) -> EdgeAnsatz:
        return ansatz_states(self.M, self.u, self.v)

    def analytic_critical(self) -> float:
        """Critical amplitude predicted by the two-state model."""
        if self.kind == "uniform":
            return gamma_cr_analytic(self.M, self.u, self.v)
        return amplitude_cr_analytic(self.unit_profile, self.M, self.u, self.v)


@dataclass(frozen=True)
class EPResult:
    """Located exceptional point.

    ``gamma_cr_*`` hold the swept amplitude (``gamma`` for uniform gain,
    ``U`` otherwise); ``gamma_bar_*`` are the matching edge-weighted gains,
    whose analytic value is ``|C|``.
    """

    gamma_cr_numeric: float
    gamma_cr_analytic: float
    relative_error: float
    bisection_iterations: int
    bracket_width: float
    gamma_bar_numeric: float
    gamma_bar_analytic: float
    parameter: str = "gamma"


@dataclass(frozen=True)
class EPRow:
    M: int
    u: float
    profile: str
    seed: int | None
    result: EPResult | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def edge_projections(S: Spectrum, ansatz: EdgeAnsatz) -> np.ndarray:
    """``||P_edge x_i||`` for every eigenvector, ``P_edge`` onto span{L, R}."""
    # L and R have disjoint support and unit norm, so B^T x gives the coordinates
    coords = ansatz.basis().T @ S.eigenvectors
    return np.linalg.norm(coords, axis=0)


def identify_edge_pair(S: Spectrum, ansatz: EdgeAnsatz) -> tuple[int, int]:
    """Indices (ascending) of the two eigenvectors with the largest edge weight.

    Raises
    ------
    EdgeHybridizationError
        If the weaker of the two projections is below 0.8.
    """
    if len(S) < 2:
        raise EdgeHybridizationError("need at least two eigenpairs")
    p = edge_projections(S, ansatz)
    order = np.argsort(-p, kind="stable")
    i, j = int(order[0]), int(order[1])
    if p[j] < EDGE_PROJECTION_MIN:
        raise EdgeHybridizationError(
            f"edge states hybridized with bulk: second-largest edge projection {p[j]:.3f} < {EDGE_PROJECTION_MIN}"
        )
    return (i, j) if i < j else (j, i)


def edge_eigenpairs(family: LatticeFamily, lam: float, ansatz: EdgeAnsatz | None = None):
    """Diagonalize the chain at ``lam`` and return ``(spectrum, (i, j))``."""
    if ansatz is None:
        ansatz = family.ansatz()
    S = eig_dense(build_hamiltonian(family.at(lam)))
    return S, identify_edge_pair(S, ansatz)


def is_broken(family: LatticeFamily, lam: float, ansatz: EdgeAnsatz | None = None) -> bool:
    S, idx = edge_eigenpairs(family, lam, ansatz)
    return bool(np.max(np.abs(S.eigenvalues[list(idx)].imag)) > IM_THRESHOLD * family.w)


def _default_bracket(family: LatticeFamily) -> tuple[float, float]:
    peak = max(family.unit_profile.magnitudes)
    if peak <= 0:
        raise BracketError("unit gain profile vanishes everywhere; nothing to sweep")
    lo = 1e-6 * family.w
    hi = 0.9 * abs(family.v - family.w) / peak
    return min(lo, 0.5 * hi), hi


def find_ep(
    family: LatticeFamily,
    tol: float = DEFAULT_TOL,
    lo: float | None = None,
    hi: float | None = None,
    expand: bool = True,
) -> EPResult:
    """Bisect the swept amplitude down to the edge-state exceptional point.

    The default bracket is ``[1e-6 w, 0.9 |v - w| / max(unit)]``.  With
    ``expand`` a mis-bracketed lower end is divided by 10 (down to
    ``1e-14 w``) and an unbroken upper end is grown by 1.5x (up to
    ``10 (v + w) / max(unit)``); shaped profiles can keep the edge pair real
    beyond the bulk gap.  Bisection stops once the bracket is narrower than
    ``tol`` times its midpoint.

    Raises
    ------
    BracketError
        If the indicator has the same value at both ends after expansion.
    EdgeHybridizationError
        If the edge pair cannot be told apart from the bulk at some probe.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    ansatz = family.ansatz()
    d_lo, d_hi = _default_bracket(family)
    lo = d_lo if lo is None else float(lo)
    hi = d_hi if hi is None else float(hi)
    if not 0 <= lo < hi:
        raise BracketError(f"invalid bracket [{lo}, {hi}]")

    iterations = 0
    while is_broken(family, lo, ansatz):
        if not expand or lo <= LOWER_FLOOR * family.w:
            raise BracketError(
                f"edge pair already PT-broken at the lower end {lo:.3g}; widen the scan towards 0"
            )
        hi, lo = lo, lo / 10.0
        iterations += 1
    cap = UPPER_CAP * (family.v + family.w) / max(family.unit_profile.magnitudes)
    while not is_broken(family, hi, ansatz):
        if not expand or hi >= cap:
            raise BracketError(
                f"edge pair still PT-unbroken at the upper end {hi:.3g}; widen or refine the initial scan"
            )
        lo, hi = hi, min(hi * UPPER_GROWTH, cap)
        iterations += 1

    while hi - lo > tol * 0.5 * (hi + lo):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break  # adjacent doubles; tol below machine resolution
        if is_broken(family, mid, ansatz):
            hi = mid
        else:
            lo = mid
        iterations += 1

    numeric = 0.5 * (lo + hi)
    analytic = family.analytic_critical()
    gb_unit = gamma_bar(family.unit_profile, family.u)
    log.debug("EP M=%d u=%g %s: numeric %.10g analytic %.10g", family.M, family.u, family.kind, numeric, analytic)
    return EPResult(
        gamma_cr_numeric=numeric,
        gamma_cr_analytic=analytic,
        relative_error=abs(numeric - analytic) / analytic,
        bisection_iterations=iterations,
        bracket_width=hi - lo,
        gamma_bar_numeric=numeric * gb_unit,
        gamma_bar_analytic=analytic * gb_unit,
        parameter=family.parameter,
    )


_ROW_ERRORS = (EPError, LatticeError, EdgeDomainError, DecoupledEdgeError, EigenSolverError, ValueError)


def _sweep_row(M: int, u: float, kind: str, seed: int | None, tol: float, w: float, custom) -> EPRow:
    row_seed = seed if kind == "random" else None
    try:
        family = LatticeFamily.from_u(M, u, kind, row_seed, w=w, custom=custom)
        return EPRow(M, u, kind, row_seed, find_ep(family, tol=tol))
    except _ROW_ERRORS as exc:
        return EPRow(M, u, kind, row_seed, None, f"{type(exc).__name__}: {exc}")


def ep_sweep(
    M_list: Sequence[int],
    u_list: Sequence[float],
    profile_kind: str = "uniform",
    seed: int | None = None,
    tol: float = DEFAULT_TOL,
    w: float = 1.0,
    threads: int = 1,
    custom: GainProfile | None = None,
) -> list[EPRow]:
    """One :class:`EPRow` per ``(M, u)``, ``M`` outer and ``u`` inner.

    Failures are recorded on their row and do not stop the sweep.  Every
    random-profile row uses ``seed``.  ``threads`` only changes speed.
    """
    kind = normalize_kind(profile_kind)
    grid = [(int(M), float(u)) for M in M_list for u in u_list]
    if not grid:
        return []

    def run(point):
        return _sweep_row(point[0], point[1], kind, seed, tol, w, custom)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, grid))
    return [run(p) for p in grid]
