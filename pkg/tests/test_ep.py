import math

import numpy as np
import pytest
from conftest import exact_uniform_gamma_cr
from hypothesis import given, settings
from hypothesis import strategies as st

from ptssh.edge import ansatz_residual, coupling_C
from ptssh.eig import eig_dense
from ptssh.ep import (
    BracketError,
    EdgeHybridizationError,
    LatticeFamily,
    edge_eigenpairs,
    edge_projections,
    ep_sweep,
    find_ep,
    identify_edge_pair,
    is_broken,
)
from ptssh.model import LatticeError, build_hamiltonian


def test_identify_edge_pair_at_zero_gain():
    fam = LatticeFamily.from_u(12, 1.5)
    S, (i, j) = edge_eigenpairs(fam, 0.0)
    p = edge_projections(S, fam.ansatz())
    assert p[i] > 0.99 and p[j] > 0.99
    C = abs(coupling_C(12, 1.5, 2 / 3))
    # the finite-chain splitting differs from the ansatz coupling by ~1.6% here
    assert sorted(S.eigenvalues[[i, j]].real) == pytest.approx([-C, C], rel=0.02)
    # the selected pair is the mid-gap pair
    assert (i, j) == (5, 6)


def test_uniform_gain_leaves_edge_projection_unchanged():
    # H + i gamma S maps each {E, -E} eigenspace of H into itself, so uniform
    # gain never mixes the edge pair with the bulk, even near the gap edge
    fam = LatticeFamily.from_u(12, 1.5)
    a = fam.ansatz()
    S0 = eig_dense(build_hamiltonian(fam.at(0.0)))
    S4 = eig_dense(build_hamiltonian(fam.at(0.4)))
    p0 = np.sort(edge_projections(S0, a))[-2]
    p4 = np.sort(edge_projections(S4, a))[-2]
    assert p4 == pytest.approx(p0, abs=1e-12)
    assert identify_edge_pair(S4, a) == (5, 6)


def test_shaped_gain_hybridizes_edge_with_bulk():
    fam = LatticeFamily.from_u(12, 1.5, "b")
    a = fam.ansatz()
    weak = [np.sort(edge_projections(eig_dense(build_hamiltonian(fam.at(U))), a))[-2] for U in (0.0, 0.4, 0.8)]
    assert weak[0] > weak[1] > weak[2]
    with pytest.raises(EdgeHybridizationError, match="hybridized"):
        edge_eigenpairs(fam, 1.0)


def test_family_validation():
    with pytest.raises(LatticeError):
        LatticeFamily.from_u(8, 1.5, "random")
    with pytest.raises(LatticeError):
        LatticeFamily.from_u(8, 1.5, "uniform", seed=3)
    with pytest.raises(LatticeError):
        LatticeFamily.from_u(7, 1.5)
    assert LatticeFamily.from_u(8, 1.5).parameter == "gamma"
    assert LatticeFamily.from_u(8, 1.5, "a").parameter == "U"


def test_find_ep_reference_chain():
    fam = LatticeFamily.from_u(12, 1.5)
    r = find_ep(fam, tol=1e-6)
    assert r.gamma_cr_analytic == pytest.approx(0.04915, abs=5e-5)
    assert r.relative_error <= 0.02
    assert r.gamma_cr_numeric == pytest.approx(exact_uniform_gamma_cr(12, 1.5), rel=2e-6)
    assert r.bracket_width <= 1e-6 * r.gamma_cr_numeric
    assert r.relative_error == abs(r.gamma_cr_numeric - r.gamma_cr_analytic) / r.gamma_cr_analytic
    assert r.gamma_bar_numeric == pytest.approx(r.gamma_cr_numeric, rel=1e-15)


def test_find_ep_large_ratio_and_small_ratio():
    r = find_ep(LatticeFamily.from_u(20, 2.0))
    assert r.relative_error <= 0.01
    r = find_ep(LatticeFamily.from_u(8, 1.2))
    assert r.relative_error <= 0.2
    assert r.gamma_cr_numeric == pytest.approx(exact_uniform_gamma_cr(8, 1.2), rel=2e-6)


@pytest.mark.parametrize("M, u", [(8, 1.5), (10, 2.0), (16, 1.5), (24, 2.0), (30, 1.2)])
def test_find_ep_matches_hermitian_oracle(M, u):
    r = find_ep(LatticeFamily.from_u(M, u), tol=1e-7)
    assert r.gamma_cr_numeric == pytest.approx(exact_uniform_gamma_cr(M, u), rel=2e-7)


def test_find_ep_bracket_errors():
    fam = LatticeFamily.from_u(12, 1.5)
    with pytest.raises(BracketError, match="still PT-unbroken"):
        find_ep(fam, lo=0.001, hi=0.01, expand=False)
    with pytest.raises(BracketError, match="already PT-broken"):
        find_ep(fam, lo=0.06, hi=0.1, expand=False)
    with pytest.raises(BracketError):
        find_ep(fam, lo=0.1, hi=0.05)
    with pytest.raises(ValueError):
        find_ep(fam, tol=0.0)
    # the same mis-placed brackets recover with expansion
    assert find_ep(fam, lo=0.06, hi=0.1).gamma_cr_numeric == pytest.approx(exact_uniform_gamma_cr(12, 1.5), rel=2e-6)


def test_shaped_family_beyond_gap_needs_upper_expansion():
    fam = LatticeFamily.from_u(8, 1.5, "b")
    r = find_ep(fam)
    assert r.gamma_cr_numeric > 0.9 * abs(fam.v - fam.w) / max(fam.unit_profile.magnitudes)
    assert r.parameter == "U"


@pytest.mark.parametrize("M, u, kind, seed", [(12, 1.5, "uniform", None), (16, 2.0, "a", None), (14, 1.5, "c", 2)])
def test_edge_pair_below_and_above_ep(M, u, kind, seed):
    fam = LatticeFamily.from_u(M, u, kind, seed)
    lam = find_ep(fam).gamma_cr_numeric
    S, idx = edge_eigenpairs(fam, 0.99 * lam)
    E = S.eigenvalues[list(idx)]
    assert np.max(np.abs(E.imag)) <= 1e-8
    assert abs(E[0] + E[1]) <= 1e-8
    S, idx = edge_eigenpairs(fam, 1.01 * lam)
    E = S.eigenvalues[list(idx)]
    assert np.max(np.abs(E.real)) <= 1e-8
    assert abs(E[0] - np.conj(E[1])) <= 1e-8


@settings(max_examples=25, deadline=None)
@given(N=st.integers(4, 15), u=st.floats(1.4, 4.0))
def test_zero_gain_edge_energies_near_coupling(N, u):
    M = 2 * N
    fam = LatticeFamily.from_u(M, u)
    S, idx = edge_eigenpairs(fam, 0.0)
    E = np.sort(S.eigenvalues[list(idx)].real)
    C = abs(coupling_C(M, u, 1 / u))
    bound = 2 * ansatz_residual(M, u, 1 / u)
    assert abs(E[0] + C) <= bound and abs(E[1] - C) <= bound


def test_square_root_opening():
    fam = LatticeFamily.from_u(12, 1.5)
    lam = find_ep(fam, tol=1e-12).gamma_cr_numeric
    ratios = []
    for d in (1e-4, 4e-4, 1.6e-3):
        S, idx = edge_eigenpairs(fam, lam * (1 + d))
        ratios.append(np.max(np.abs(S.eigenvalues[list(idx)].imag)) / math.sqrt(d * lam))
    assert max(ratios) / min(ratios) - 1 <= 0.2


@pytest.mark.parametrize("u", [1.2, 1.5, 2.0])
def test_critical_gain_decreases_with_length(u):
    crit = [find_ep(LatticeFamily.from_u(M, u)).gamma_cr_numeric for M in range(8, 24, 2)]
    assert all(b < a for a, b in zip(crit, crit[1:]))


def test_is_broken_indicator():
    fam = LatticeFamily.from_u(12, 1.5)
    g = exact_uniform_gamma_cr(12, 1.5)
    assert not is_broken(fam, 0.9 * g) and is_broken(fam, 1.1 * g)


def test_sweep_order_and_errors():
    rows = ep_sweep([10, 8], [2.0, 1.5, 0.8], "uniform")
    assert [(r.M, r.u) for r in rows] == [(10, 2.0), (10, 1.5), (10, 0.8), (8, 2.0), (8, 1.5), (8, 0.8)]
    assert [r.ok for r in rows] == [True, True, False, True, True, False]
    assert "trivial phase" in rows[2].error
    assert rows[0].result.gamma_cr_numeric == pytest.approx(exact_uniform_gamma_cr(10, 2.0), rel=2e-6)
    assert ep_sweep([8, 10], [], "uniform") == []


def test_sweep_random_rows_record_seed_and_are_thread_independent():
    a = ep_sweep([8, 10, 12], [1.5, 2.0], "random", seed=7, threads=1)
    b = ep_sweep([8, 10, 12], [1.5, 2.0], "random", seed=7, threads=4)
    assert a == b
    assert all(r.seed == 7 and r.profile == "random" for r in a)
    assert ep_sweep([8], [1.5], "uniform", seed=7)[0].seed is None


def test_largest_family_deviation_is_shaped_b_at_smallest_chain():
    worst = max(
        (r.result.relative_error, kind, r.u, r.M)
        for kind in ("uniform", "a", "b")
        for r in ep_sweep(range(8, 32, 2), [1.2, 1.5, 2.0], kind)
    )
    assert worst[1:] == ("b", 1.2, 8)
