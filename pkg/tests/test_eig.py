import math
import warnings

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import exact_uniform_gamma_cr
from ptssh.eig import Spectrum, TrackingAmbiguity, eig_dense, spectrum_symmetry_residuals, track_pair
from ptssh.ep import LatticeFamily, edge_eigenpairs
from ptssh.model import LatticeSpec, build_hamiltonian, uniform_profile


def test_two_state_closed_form():
    S = eig_dense(np.array([[0.5j, 1.0], [1.0, -0.5j]]))
    np.testing.assert_allclose(S.eigenvalues, [-math.sqrt(0.75), math.sqrt(0.75)], atol=1e-14)


def test_hermitian_m4_characteristic_polynomial():
    # det(H - E) = E^4 - 6E^2 + 1  =>  E = +/-(sqrt2 +/- 1)
    S = eig_dense(build_hamiltonian(LatticeSpec(4, 1.0, 2.0)))
    r2 = math.sqrt(2)
    np.testing.assert_allclose(S.eigenvalues, [-(r2 + 1), -(r2 - 1), r2 - 1, r2 + 1], atol=1e-14)
    assert spectrum_symmetry_residuals(S, "hermitian") <= 1e-12


def test_diagonal_matrix():
    S = eig_dense(np.diag([1 + 2j, 3]))
    np.testing.assert_array_equal(S.eigenvalues, [1 + 2j, 3])
    np.testing.assert_array_equal(S.eigenvectors, np.eye(2))


def test_hermitian_mode_residual_of_unpaired_spectrum():
    S = Spectrum(np.array([1.0 + 0j, 2.0 + 0j]), np.eye(2, dtype=complex))
    assert spectrum_symmetry_residuals(S, "hermitian") == 3.0


def test_pt_chain_spectrum_symmetry():
    S = eig_dense(build_hamiltonian(LatticeSpec.from_u(12, 1.5, uniform_profile(0.3, 12))))
    E = S.eigenvalues
    # oracle: every E has partners E* and -E* in the computed set
    for z in E:
        assert np.min(np.abs(E - np.conj(z))) <= 1e-10
        assert np.min(np.abs(E + np.conj(z))) <= 1e-10
    assert spectrum_symmetry_residuals(S, "pt") <= 1e-10


def test_spectrum_invariants_on_chain():
    H = build_hamiltonian(LatticeSpec.from_u(30, 1.3, uniform_profile(0.1, 30)))
    S = eig_dense(H)
    norm2 = np.linalg.norm(H, 2)
    assert np.all(S.residuals(H) <= 1e-10 * norm2)
    np.testing.assert_allclose(np.linalg.norm(S.eigenvectors, axis=0), 1.0, atol=1e-14)
    lead = np.argmax(np.abs(S.eigenvectors), axis=0)
    pivots = S.eigenvectors[lead, np.arange(30)]
    assert np.all(pivots.imag == 0) and np.all(pivots.real > 0)
    keys = list(zip(S.eigenvalues.real, S.eigenvalues.imag))
    assert keys == sorted(keys)


def test_deterministic():
    H = build_hamiltonian(LatticeSpec.from_u(24, 1.8, uniform_profile(0.05, 24)))
    a, b = eig_dense(H), eig_dense(H)
    assert a.eigenvalues.tobytes() == b.eigenvalues.tobytes()
    assert a.eigenvectors.tobytes() == b.eigenvectors.tobytes()


def test_rejects_non_square():
    with pytest.raises(ValueError):
        eig_dense(np.zeros((2, 3)))


def test_bad_mode():
    S = eig_dense(np.eye(2))
    with pytest.raises(ValueError):
        spectrum_symmetry_residuals(S, "chiral")


def _tridiagonal(n, diag, off_up, off_down):
    return np.diag(diag) + np.diag(off_up, 1) + np.diag(off_down, -1)


# hopping-scale entries: exact zeros or magnitudes within six decades of the
# largest; sub-normal couplings make geev's balancing lose ~sqrt(eps)
complex_entries = st.one_of(
    st.just(0j),
    st.complex_numbers(min_magnitude=1e-6, max_magnitude=3.0, allow_nan=False, allow_infinity=False),
)


@st.composite
def tridiagonal_complex(draw):
    n = draw(st.integers(2, 32))
    d = draw(arrays(complex, n, elements=complex_entries))
    up = draw(arrays(complex, n - 1, elements=complex_entries))
    dn = draw(arrays(complex, n - 1, elements=complex_entries))
    return _tridiagonal(n, d, up, dn)


@settings(max_examples=150, deadline=None)
@given(tridiagonal_complex())
def test_residual_trace_and_determinant(H):
    S = eig_dense(H)
    norm2 = np.linalg.norm(H, 2)
    assert np.all(S.residuals(H) <= 1e-10 * max(norm2, 1e-300))
    assert abs(np.trace(H) - S.eigenvalues.sum()) <= 1e-10 * max(norm2, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(H)
    det_lu = np.prod(np.diag(lu)) * (-1) ** np.count_nonzero(piv != np.arange(len(piv)))
    det_eig = np.prod(S.eigenvalues)
    # relative comparison, with an absolute floor for nearly singular draws
    assert abs(det_eig - det_lu) <= 1e-8 * max(abs(det_lu), norm2 ** H.shape[0] * 1e-6, 1e-300)


@settings(max_examples=80, deadline=None)
@given(arrays(complex, st.integers(2, 24).map(lambda n: (n, n)), elements=complex_entries))
def test_hermitian_input_gives_real_eigenvalues(A):
    H = A + A.conj().T
    S = eig_dense(H)
    norm2 = np.linalg.norm(H, 2)
    assert np.all(np.abs(S.eigenvalues.imag) <= 1e-12 * max(norm2, 1.0))


def test_track_constant_hamiltonian():
    H = build_hamiltonian(LatticeSpec.from_u(8, 2.0))
    spectra = [eig_dense(H)] * 3
    tracked = track_pair(spectra, (3, 4))
    assert [t.indices for t in tracked] == [(3, 4)] * 3
    for t in tracked:
        np.testing.assert_array_equal(t.values, spectra[0].eigenvalues[[3, 4]])


def test_track_two_state_model_through_ep():
    C = 1.0
    gammas = np.linspace(0.0, 2.0, 201)
    spectra = [eig_dense(np.array([[1j * g, C], [C, -1j * g]])) for g in gammas]
    tracked = track_pair(spectra, (0, 1))
    vals = np.array([t.values for t in tracked])
    exact = np.sqrt(C * C - gammas**2 + 0j)
    for k in range(len(gammas)):
        want = np.array([exact[k], -exact[k]])
        assert np.max(np.min(np.abs(vals[k][:, None] - want[None, :]), axis=1)) <= 1e-7
    # continuity: a step may only be as large as the exact curve moves; across
    # the EP (real -> imaginary) that is hypot of the two magnitudes
    real_side = gammas < C
    for k in range(len(gammas) - 1):
        if real_side[k] == real_side[k + 1]:
            allowed = abs(exact[k + 1] - exact[k])
        else:
            allowed = math.hypot(abs(exact[k]), abs(exact[k + 1]))
        assert np.all(np.abs(vals[k + 1] - vals[k]) <= allowed + 1e-7), k


def test_track_ambiguity_raises():
    # two identical candidate pairs: degenerate spectrum with repeated vectors
    S = Spectrum(np.array([0.0, 1.0, 1.0, 2.0], dtype=complex), np.eye(4, dtype=complex))
    S_dup = Spectrum(S.eigenvalues, np.eye(4, dtype=complex)[:, [0, 1, 1, 3]])
    with pytest.raises(TrackingAmbiguity):
        track_pair([S, S_dup], (1, 2))


def test_track_edge_pair_full_chain_sqrt_opening():
    fam = LatticeFamily.from_u(12, 1.5)
    gcr = exact_uniform_gamma_cr(12, 1.5)
    gammas = np.linspace(0.5 * gcr, 1.5 * gcr, 401)
    spectra = [eig_dense(build_hamiltonian(fam.at(g))) for g in gammas]
    _, seed = edge_eigenpairs(fam, gammas[0])
    tracked = track_pair(spectra, seed)
    for g, t in zip(gammas, tracked):
        # H_PT^2 = H^2 - g^2 on the uniform chain: edge pair is +/- sqrt(gcr^2 - g^2)
        want = math.sqrt(abs(gcr**2 - g**2))
        if g > gcr * (1 + 1e-3):
            np.testing.assert_allclose(sorted(t.values.imag), [-want, want], rtol=1e-6, atol=1e-9)
        elif g < gcr * (1 - 1e-3):
            np.testing.assert_allclose(sorted(t.values.real), [-want, want], rtol=1e-6, atol=1e-9)
