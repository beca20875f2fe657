"""Dense non-Hermitian eigendecomposition and eigenpair bookkeeping."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "MAX_DIMENSION",
    "EigenSolverError",
    "TrackingAmbiguity",
    "Spectrum",
    "TrackedPair",
    "eig_dense",
    "spectrum_symmetry_residuals",
    "track_pair",
]

MAX_DIMENSION = 4096
RESIDUAL_RTOL = 1e-10
OVERLAP_TIE = 1e-6
AMBIGUITY_GAP = 1e-9


class EigenSolverError(RuntimeError):
    def __init__(self, dimension: int, residual: float, reason: str = "eigensolver did not converge"):
        self.dimension = dimension
        self.residual = residual
        super().__init__(f"{reason} (dimension {dimension}, residual {residual:.3g})")


class TrackingAmbiguity(RuntimeError):
    """Two candidate pairs are equally continuous with the previous step.

    Usually a level crossing with the bulk; refine the parameter grid.
    """


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted by ``(Re, Im)`` with unit, phase-fixed right eigenvectors.

    ``eigenvectors[:, i]`` belongs to ``eigenvalues[i]``.  The global phase
    of every eigenvector makes its largest-magnitude component real and
    positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __len__(self) -> int:
        return self.eigenvalues.shape[0]

    def residuals(self, H: np.ndarray) -> np.ndarray:
        """``||H x_i - E_i x_i||_2`` for every stored pair."""
        R = np.asarray(H) @ self.eigenvectors - self.eigenvectors * self.eigenvalues[None, :]
        return np.linalg.norm(R, axis=0)


def _operator_norm_bound(H: np.ndarray) -> float:
    # sqrt(||H||_1 ||H||_inf) >= ||H||_2 without an SVD
    a = np.abs(H)
    return float(np.sqrt(a.sum(axis=0).max() * a.sum(axis=1).max())) if H.size else 0.0


def _fix_phases(X: np.ndarray) -> np.ndarray:
    X = X / np.linalg.norm(X, axis=0)[None, :]
    cols = np.arange(X.shape[1])
    lead = np.argmax(np.abs(X), axis=0)
    pivot = X[lead, cols]
    X = X * (np.conj(pivot) / np.abs(pivot))[None, :]
    X[lead, cols] = np.abs(X[lead, cols])
    return X


def _refine_pair(H: np.ndarray, E: complex, bound: float, steps: int = 8) -> tuple[complex, np.ndarray]:
    # Rayleigh-quotient iteration; for nearly defective clusters the geev
    # eigenvalue itself can sit ~sqrt(eps) away, so E is refined as well
    n = H.shape[0]
    eye = np.eye(n)
    # small complex offset keeps the shifted matrix invertible at an exact eigenvalue
    offset = (1 + 1j) * 1e-14 * max(bound / RESIDUAL_RTOL, np.finfo(float).tiny)
    x = np.ones(n, dtype=complex) / np.sqrt(n)
    for _ in range(steps):
        y = np.linalg.solve(H - (E + offset) * eye, x)
        if not np.all(np.isfinite(y)):
            break
        x = y / np.linalg.norm(y)
        rq = complex(np.vdot(x, H @ x))
        if np.linalg.norm(H @ x - E * x) <= bound:
            break
        E = rq
    return E, x


def eig_dense(H: np.ndarray) -> Spectrum:
    """All eigenpairs of a dense complex matrix (LAPACK ``geev`` via numpy).

    Pairs that miss the residual bound (nearly defective, badly scaled
    input) are polished by Rayleigh-quotient iteration before the bound is
    enforced; only those pairs can move.

    Raises
    ------
    EigenSolverError
        If LAPACK fails to converge or a returned pair violates
        ``||H x - E x|| <= 1e-10 ||H||``.
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    n = H.shape[0]
    if n > MAX_DIMENSION:
        raise ValueError(f"dimension {n} exceeds the dense solver limit {MAX_DIMENSION}")
    if n == 0:
        return Spectrum(np.zeros(0, complex), np.zeros((0, 0), complex))
    try:
        vals, vecs = np.linalg.eig(H)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(n, float("nan"), str(exc)) from exc

    order = np.lexsort((vals.imag, vals.real))
    vals = vals[order]
    vecs = vecs[:, order]

    scale = _operator_norm_bound(H)
    bound = RESIDUAL_RTOL * scale
    res = np.linalg.norm(H @ vecs - vecs * vals[None, :], axis=0)
    bad = np.flatnonzero(~(res <= bound))
    for i in bad:
        try:
            vals[i], vecs[:, i] = _refine_pair(H, vals[i], bound)
        except np.linalg.LinAlgError:
            continue
    if bad.size:
        order = np.lexsort((vals.imag, vals.real))
        vals, vecs = vals[order], vecs[:, order]
    vecs = _fix_phases(vecs)
    res = np.linalg.norm(H @ vecs - vecs * vals[None, :], axis=0)
    worst = float(res.max())
    if not np.isfinite(worst) or worst > bound:
        raise EigenSolverError(n, worst, "eigenpair residual above tolerance")

    vals.setflags(write=False)
    vecs.setflags(write=False)
    return Spectrum(vals, vecs)


def _hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    if a.size == 0 and b.size == 0:
        return 0.0
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def spectrum_symmetry_residuals(S: Spectrum, mode: str = "pt") -> float:
    """How far the spectrum is from the pairing its symmetry demands.

    ``hermitian``: ``max_i |E_i + E_(M+1-i)|`` over the sorted eigenvalues
    (chiral ``E -> -E`` pairing).  ``pt``: the larger Hausdorff distance of
    the eigenvalue set from its images under ``E -> E*`` and ``E -> -E*``.
    """
    E = np.asarray(S.eigenvalues)
    if mode == "hermitian":
        if E.size == 0:
            return 0.0
        return float(np.max(np.abs(E + E[::-1])))
    if mode == "pt":
        return max(_hausdorff(E, np.conj(E)), _hausdorff(E, -np.conj(E)))
    raise ValueError(f"mode must be 'hermitian' or 'pt', got {mode!r}")


@dataclass(frozen=True)
class TrackedPair:
    indices: tuple[int, int]
    values: np.ndarray
    vectors: np.ndarray


def _pair_at(S: Spectrum, i: int, j: int) -> TrackedPair:
    return TrackedPair((int(i), int(j)), S.eigenvalues[[i, j]].copy(), S.eigenvectors[:, [i, j]].copy())


def track_pair(spectra: Sequence[Spectrum], seed_indices: tuple[int, int]) -> list[TrackedPair]:
    """Follow two eigenpairs along a parameter grid.

    At each step the pair of eigenvectors with the largest summed overlap
    ``|<x_prev|x>|`` with the previous tracked pair is selected.  When the
    two orderings of the chosen pair score within ``1e-6`` of each other
    (coalescing vectors near an exceptional point), the ordering follows the
    nearest eigenvalues instead.

    Raises
    ------
    TrackingAmbiguity
        If the best and second-best candidate pairs score within ``1e-9``.
    """
    if not spectra:
        return []
    i0, j0 = seed_indices
    if i0 == j0:
        raise ValueError("seed indices must be distinct")
    out = [_pair_at(spectra[0], i0, j0)]
    for step, S in enumerate(spectra[1:], start=1):
        prev = out[-1]
        n = len(S)
        O = np.abs(prev.vectors.conj().T @ S.eigenvectors)  # (2, n)
        # best ordered score for every unordered set {i, j}
        forward = O[0][:, None] + O[1][None, :]
        best = np.maximum(forward, forward.T)
        iu, ju = np.triu_indices(n, k=1)
        scores = best[iu, ju]
        ranked = np.argsort(-scores, kind="stable")
        top = ranked[0]
        if scores.size > 1 and scores[top] - scores[ranked[1]] < AMBIGUITY_GAP:
            raise TrackingAmbiguity(
                f"step {step}: candidate pairs {(iu[top], ju[top])} and "
                f"{(iu[ranked[1]], ju[ranked[1]])} are equally continuous; refine the grid"
            )
        i, j = int(iu[top]), int(ju[top])
        straight, swapped = forward[i, j], forward[j, i]
        if abs(straight - swapped) < OVERLAP_TIE:
            E = S.eigenvalues
            d_straight = abs(prev.values[0] - E[i]) + abs(prev.values[1] - E[j])
            d_swapped = abs(prev.values[0] - E[j]) + abs(prev.values[1] - E[i])
            if d_swapped < d_straight:
                i, j = j, i
        elif swapped > straight:
            i, j = j, i
        out.append(_pair_at(S, i, j))
    return out
