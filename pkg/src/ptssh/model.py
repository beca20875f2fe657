"""Finite SSH chains with alternating gain and loss.

Sites are numbered ``m = 1..M`` in docstrings and ``0..M-1`` in arrays.  The
bond between sites ``m`` and ``m+1`` carries ``v`` for odd ``m`` (intra-cell)
and ``w`` for even ``m`` (inter-cell).  The on-site potential is
``i * (-1)**(m-1) * gamma_m``: gain on odd sites, loss on even sites.  Gain
magnitudes are stored unsigned; the sign is applied only when the matrix is
built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from os import PathLike

import numpy as np

__all__ = [
    "PROFILE_KINDS",
    "LatticeError",
    "GainProfile",
    "LatticeSpec",
    "make_gain_profile",
    "uniform_profile",
    "read_profile_file",
    "build_hamiltonian",
    "symmetry_residuals",
    "sublattice_signs",
    "exchange_matrix",
]

PROFILE_KINDS = ("uniform", "linear-decreasing", "linear-increasing", "random", "custom")

# short aliases accepted on input, matching the (a)/(b)/(c) family labels
_KIND_ALIASES = {
    "a": "linear-decreasing",
    "b": "linear-increasing",
    "c": "random",
}

CUSTOM_MIRROR_TOL = 1e-12


class LatticeError(ValueError):
    """Raised when a lattice or gain profile violates one of its invariants."""


def normalize_kind(kind: str) -> str:
    kind = str(kind).strip().lower()
    kind = _KIND_ALIASES.get(kind, kind)
    if kind not in PROFILE_KINDS:
        raise LatticeError(f"unknown profile kind {kind!r}; expected one of {PROFILE_KINDS}")
    return kind


def _check_even_size(M: int) -> int:
    if int(M) != M:
        raise LatticeError(f"site count M must be an integer, got {M!r}")
    M = int(M)
    if M % 2:
        raise LatticeError(f"site count M must be even, got M={M}")
    if M < 4:
        raise LatticeError(f"site count M must be >= 4 (at least two unit cells), got M={M}")
    return M


@dataclass(frozen=True)
class GainProfile:
    """Per-site gain/loss magnitudes ``gamma_m >= 0`` for ``m = 1..M``.

    ``amplitude`` is the overall scale ``U`` of the generated families, and
    ``seed`` is only meaningful for ``kind == "random"``.
    """

    magnitudes: tuple[float, ...]
    kind: str = "custom"
    amplitude: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        mags = tuple(float(x) for x in self.magnitudes)
        object.__setattr__(self, "magnitudes", mags)
        object.__setattr__(self, "kind", normalize_kind(self.kind))
        if not all(math.isfinite(x) for x in mags):
            raise LatticeError("gain magnitudes must be finite")
        if any(x < 0 for x in mags):
            raise LatticeError("gain magnitudes must be non-negative; the alternating sign is applied at build time")
        if self.amplitude < 0:
            raise LatticeError(f"profile amplitude U must be >= 0, got {self.amplitude}")

    def __len__(self) -> int:
        return len(self.magnitudes)

    def as_array(self) -> np.ndarray:
        return np.array(self.magnitudes, dtype=float)

    def mirror_defect(self) -> float:
        """Largest ``|gamma_m - gamma_{M-m+1}|`` over the chain."""
        g = self.as_array()
        if g.size == 0:
            return 0.0
        return float(np.max(np.abs(g - g[::-1])))

    def check_mirror(self, tol: float | None = None) -> None:
        """Raise unless the global PT constraint ``gamma_m == gamma_{M-m+1}`` holds.

        Generated profiles are mirrored by copy and must satisfy the
        constraint exactly; custom profiles get ``CUSTOM_MIRROR_TOL``.
        """
        if tol is None:
            tol = CUSTOM_MIRROR_TOL if self.kind == "custom" else 0.0
        defect = self.mirror_defect()
        if defect > tol:
            raise LatticeError(
                f"gain profile violates the global PT mirror constraint "
                f"gamma_m = gamma_(M-m+1) (max defect {defect:.3g} > {tol:.3g})"
            )

    def scaled(self, factor: float) -> "GainProfile":
        """Same shape with every magnitude (and ``U``) multiplied by ``factor``."""
        return GainProfile(
            tuple(factor * x for x in self.magnitudes),
            kind=self.kind,
            amplitude=factor * self.amplitude,
            seed=self.seed,
        )


@dataclass(frozen=True)
class LatticeSpec:
    """Chain length, hoppings and gain profile of one finite chain.

    Stored canonically as ``(v, w)``; use :meth:`from_u` to give the hopping
    ratio ``u = w / v`` instead.
    """

    M: int
    v: float
    w: float
    profile: GainProfile = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        M = _check_even_size(self.M)
        object.__setattr__(self, "M", M)
        v, w = float(self.v), float(self.w)
        if not (math.isfinite(v) and math.isfinite(w)):
            raise LatticeError("hoppings must be finite")
        if v <= 0 or w <= 0:
            raise LatticeError(f"hoppings must be positive, got v={v}, w={w}")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "w", w)
        if self.profile is None:
            object.__setattr__(self, "profile", uniform_profile(0.0, M))
        if len(self.profile) != M:
            raise LatticeError(f"gain profile has {len(self.profile)} entries but M={M}")

    @classmethod
    def from_u(cls, M: int, u: float, profile: GainProfile | None = None, w: float = 1.0) -> "LatticeSpec":
        if not (u > 0 and math.isfinite(u)):
            raise LatticeError(f"hopping ratio u = w/v must be finite and positive, got {u}")
        return cls(M, w / u, w, profile)

    @property
    def N(self) -> int:
        return self.M // 2

    @property
    def u(self) -> float:
        return self.w / self.v

    def with_profile(self, profile: GainProfile) -> "LatticeSpec":
        return LatticeSpec(self.M, self.v, self.w, profile)

    def validate(self) -> None:
        self.profile.check_mirror()


def uniform_profile(gamma: float, M: int) -> GainProfile:
    M = _check_even_size(M)
    return GainProfile((float(gamma),) * M, kind="uniform", amplitude=float(gamma))


def _left_half(kind: str, U: float, M: int, seed: int | None) -> np.ndarray:
    half = M // 2
    m = np.arange(1, half + 1, dtype=float)
    if kind == "uniform":
        return np.full(half, U)
    if kind == "linear-decreasing":
        return U * (half - m) / (half - 1)
    if kind == "linear-increasing":
        return U * (m - 1) / (half - 1)
    if kind == "random":
        if seed is None:
            raise LatticeError("random gain profile requires a seed")
        # PCG64 + Generator.random() is numpy's documented stable stream:
        # one 53-bit double per site m = 1..M/2, in site order.
        rng = np.random.Generator(np.random.PCG64(int(seed)))
        return U * rng.random(half)
    raise LatticeError(f"profile kind {kind!r} cannot be generated; load it from a file instead")


def make_gain_profile(kind: str, U: float, M: int, seed: int | None = None) -> GainProfile:
    """Generate one of the standard gain families on an ``M``-site chain.

    Parameters
    ----------
    kind : str
        ``uniform``, ``linear-decreasing`` (a), ``linear-increasing`` (b) or
        ``random`` (c).
    U : float
        Amplitude; every family is proportional to it.
    M : int
        Even site count, at least 4.
    seed : int, optional
        Required for ``random`` and rejected for the other kinds.

    The left half ``m = 1..M/2`` is computed and then mirrored onto
    ``m = M/2+1..M``.
    """
    kind = normalize_kind(kind)
    M = _check_even_size(M)
    U = float(U)
    if U < 0:
        raise LatticeError(f"profile amplitude U must be >= 0, got {U}")
    if kind != "random" and seed is not None:
        raise LatticeError(f"seed is only meaningful for random profiles, not {kind!r}")
    left = _left_half(kind, U, M, seed)
    full = np.concatenate([left, left[::-1]])
    return GainProfile(tuple(full.tolist()), kind=kind, amplitude=U, seed=None if seed is None else int(seed))


def read_profile_file(path: str | PathLike, M: int | None = None) -> GainProfile:
    """Load a custom profile: one non-negative magnitude per line, ``#`` comments."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise LatticeError(f"{path}:{lineno}: not a number: {text!r}") from None
    if M is not None and len(values) != M:
        raise LatticeError(f"{path}: expected {M} magnitudes, found {len(values)}")
    _check_even_size(len(values))
    amplitude = max(values) if values else 0.0
    profile = GainProfile(tuple(values), kind="custom", amplitude=amplitude)
    profile.check_mirror()
    return profile


def sublattice_signs(M: int) -> np.ndarray:
    """``(-1)**(m-1)`` for ``m = 1..M``: +1 on odd sites, -1 on even sites."""
    signs = np.ones(M)
    signs[1::2] = -1.0
    return signs


def exchange_matrix(M: int) -> np.ndarray:
    """Backward identity, the parity operator of the chain."""
    return np.eye(M)[::-1]


def build_hamiltonian(spec: LatticeSpec, validate: bool = True) -> np.ndarray:
    """Dense ``M x M`` complex Hamiltonian of the chain.

    ``validate=False`` skips the PT mirror check and exists only so that
    deliberately symmetry-broken matrices can be built for testing.
    """
    if validate:
        spec.validate()
    M = spec.M
    hops = np.empty(M - 1)
    hops[0::2] = spec.v
    hops[1::2] = spec.w
    H = np.zeros((M, M), dtype=complex)
    idx = np.arange(M - 1)
    H[idx, idx + 1] = hops
    H[idx + 1, idx] = hops
    H[np.arange(M), np.arange(M)] = 1j * sublattice_signs(M) * spec.profile.as_array()
    return H


def symmetry_residuals(H: np.ndarray) -> dict[str, float]:
    """Max-norm residuals of the chain symmetries.

    Returns a dict with

    ``chiral``
        ``{S, H}`` with ``S = diag(+1, -1, ...)``; nonzero whenever any gain
        is present, so only a diagnostic for PT chains.
    ``pt_commutator``
        ``P conj(H) - H P`` with ``P`` the exchange matrix.
    ``pseudo_anti_hermitian``
        ``S conj(H) + H S``.
    """
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    M = H.shape[0]
    if M % 2:
        raise ValueError(f"expected an even dimension, got {M}")
    s = sublattice_signs(M)
    S_H = s[:, None] * H
    H_S = H * s[None, :]
    chiral = S_H + H_S
    # P conj(H) P^-1 == H  <=>  conj(H)[::-1, ::-1] == H
    pt = np.conj(H)[::-1, ::-1] - H
    pah = s[:, None] * np.conj(H) + H_S
    return {
        "chiral": float(np.max(np.abs(chiral))),
        "pt_commutator": float(np.max(np.abs(pt))),
        "pseudo_anti_hermitian": float(np.max(np.abs(pah))),
    }

