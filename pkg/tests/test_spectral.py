import math
import random
from fractions import Fraction

import numpy as np
import pytest

from twistlab import (
    AlgebraElement,
    GradedMatrix,
    MatrixPath,
    SpectralError,
    cycle_complex,
    eigh,
    eta_closed_form,
    eta_operator,
    eta_quadrature,
    harper_element,
    magnetic_multiplier,
    mckean_singer,
    product_eta_check,
    spectral_flow,
    twisted_betti,
)
from twistlab.spectral import default_zero_tol, kernel_report, require_hermitian


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (m + m.conj().T) / 2


def random_graded(rng: np.random.Generator, n_plus: int, n_minus: int) -> GradedMatrix:
    b = rng.normal(size=(n_minus, n_plus)) + 1j * rng.normal(size=(n_minus, n_plus))
    n = n_plus + n_minus
    mat = np.zeros((n, n), dtype=complex)
    mat[n_plus:, :n_plus] = b
    mat[:n_plus, n_plus:] = b.conj().T
    grading = np.array([1.0] * n_plus + [-1.0] * n_minus)
    return GradedMatrix(mat, grading)


def test_jacobi_matches_lapack_eigenvalues():
    rng = np.random.default_rng(0)
    for n in (1, 2, 5, 13, 24):
        a = random_hermitian(rng, n)
        dec = eigh(a)
        assert np.abs(dec.eigenvalues - np.linalg.eigvalsh(a)).max() < 1e-11
        assert dec.residual < 1e-10
        assert np.abs(dec.vectors @ dec.vectors.conj().T - np.eye(n)).max() < 1e-12


def test_jacobi_is_bitwise_deterministic():
    rng = np.random.default_rng(1)
    a = random_hermitian(rng, 9)
    d1, d2 = eigh(a.copy()), eigh(a.copy())
    assert d1.eigenvalues.tobytes() == d2.eigenvalues.tobytes()
    assert d1.vectors.tobytes() == d2.vectors.tobytes()


def test_require_hermitian_rejects_asymmetric():
    with pytest.raises(SpectralError):
        require_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(SpectralError):
        require_hermitian(np.ones((2, 3)))


def test_eta_closed_form_counts_signs():
    a = np.diag([3.0, 1.0, -2.0])
    assert eta_closed_form(a) == 0.5
    assert eta_closed_form(a, normalization="full") == 1.0
    assert eta_closed_form(np.diag([1.0, -1.0])) == 0.0
    assert eta_closed_form(np.zeros((3, 3))) == 0.0


def test_eta_quadrature_matches_closed_form():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(25):
        a = random_hermitian(rng, int(rng.integers(2, 16)))
        res = eta_quadrature(a)
        worst = max(worst, abs(res.eta - eta_closed_form(a)))
        assert res.error_bound < 1e-6
    assert worst < 1e-6


def test_eta_is_odd_and_unitarily_invariant():
    rng = np.random.default_rng(3)
    for _ in range(10):
        a = random_hermitian(rng, 8)
        assert abs(eta_closed_form(-a) + eta_closed_form(a)) < 1e-12
        q, _ = np.linalg.qr(rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8)))
        assert abs(eta_closed_form(q @ a @ q.conj().T) - eta_closed_form(a)) < 1e-9


def test_eta_quadrature_reports_insufficient_window():
    a = np.diag([1.0, -0.5])
    with pytest.raises(SpectralError):
        eta_quadrature(a, t_max=0.5)


def test_kernel_report_flags_ambiguous_values():
    ev = np.array([-1.0, 2e-10, 5.0])
    report = kernel_report(ev, zero_tol=1e-9)
    assert report.dim == 1
    assert report.ambiguous == [2e-10]
    clean = kernel_report(np.array([-1.0, 0.0, 5.0]), zero_tol=1e-12)
    assert clean.dim == 1
    assert clean.ambiguous == []


def test_default_zero_tol_scales_with_spectrum():
    assert default_zero_tol(np.array([1e6, -1e6])) > default_zero_tol(
        np.array([1.0, -1.0])
    )


def test_spectral_flow_on_shifted_diagonal():
    path = MatrixPath(lambda t: np.diag([t - 0.5]))
    res = spectral_flow(path)
    assert res.flow == 1
    assert abs(res.endpoint_formula - 1.0) < 1e-12
    assert len(res.crossings) >= 1


def test_spectral_flow_downward_crossing_counts_negative():
    path = MatrixPath(lambda t: np.diag([0.5 - t]))
    assert spectral_flow(path).flow == -1


def test_spectral_flow_no_crossing():
    path = MatrixPath.linear(np.diag([1.0, -2.0]), np.diag([2.0, -1.0]))
    assert spectral_flow(path).flow == 0


def test_spectral_flow_equals_endpoint_formula_on_random_paths():
    rng = np.random.default_rng(4)
    for _ in range(30):
        a0 = random_hermitian(rng, 6)
        a1 = random_hermitian(rng, 6)
        res = spectral_flow(MatrixPath.linear(a0, a1))
        assert res.flow == round(res.endpoint_formula)
        assert abs(res.endpoint_formula - res.flow) < 1e-9


def test_spectral_flow_stable_under_extra_refinement():
    rng = np.random.default_rng(5)
    a0, a1 = random_hermitian(rng, 7), random_hermitian(rng, 7)
    coarse = spectral_flow(MatrixPath.linear(a0, a1), initial_samples=9)
    fine = spectral_flow(MatrixPath.linear(a0, a1), initial_samples=65)
    assert coarse.flow == fine.flow


def test_matrix_path_from_samples_interpolates():
    mats = [np.diag([-1.0]), np.diag([0.0]), np.diag([3.0])]
    path = MatrixPath.from_samples(mats)
    assert path.matrix(0.0)[0, 0] == -1.0
    assert path.matrix(0.5)[0, 0] == 0.0
    assert path.matrix(1.0)[0, 0] == 3.0
    assert abs(path.matrix(0.25)[0, 0] + 0.5) < 1e-15


def test_graded_matrix_validates_anticommutation():
    with pytest.raises(SpectralError):
        GradedMatrix(np.diag([1.0, -1.0]), np.array([1.0, -1.0]))
    with pytest.raises(SpectralError):
        GradedMatrix(np.zeros((2, 2)), np.array([1.0, 2.0]))


def test_graded_index_matches_dimension_count():
    rng = np.random.default_rng(6)
    for _ in range(20):
        n_plus = int(rng.integers(1, 5))
        n_minus = int(rng.integers(1, 5))
        d = random_graded(rng, n_plus, n_minus)
        # generic off-diagonal block has full rank
        assert d.index() == n_plus - n_minus


def test_mckean_singer_supertrace_is_constant():
    rng = np.random.default_rng(7)
    for _ in range(15):
        d = random_graded(rng, int(rng.integers(1, 5)), int(rng.integers(1, 5)))
        out = mckean_singer(d)
        assert out["max_deviation"] < 1e-8
        assert out["index"] == d.index()


def test_product_eta_formula():
    rng = np.random.default_rng(8)
    for _ in range(10):
        d_l = random_hermitian(rng, int(rng.integers(2, 6)))
        d_n = random_graded(rng, int(rng.integers(1, 4)), int(rng.integers(1, 4)))
        out = product_eta_check(d_l, d_n)
        assert out["defect"] < 1e-8


def test_cycle_complex_betti_numbers():
    even, odd = cycle_complex(6)
    res = twisted_betti(even, odd)
    assert abs(res.b_even - 1.0) < 1e-10
    assert abs(res.b_odd - 1.0) < 1e-10
    assert abs(res.euler) < 1e-10
    assert res.index == 0


def test_twisted_betti_rejects_indefinite_blocks():
    with pytest.raises(SpectralError):
        twisted_betti(np.diag([-1.0, 1.0]), np.diag([1.0, 1.0]))


def test_twisted_betti_custom_functional():
    even, odd = cycle_complex(5)
    res = twisted_betti(even, odd, tau=lambda p: 2.0 * np.trace(p))
    assert abs(res.b_even - 2.0) < 1e-9


def test_eta_operator_dense_matches_closed_form():
    a = np.diag([2.0, -1.0, -1.0, 0.0])
    res = eta_operator(a, method="dense")
    assert res.eta == eta_closed_form(a)
    assert res.kernel.dim == 1


def test_eta_operator_bloch_and_truncation_agree():
    sigma = magnetic_multiplier(Fraction(1, 3))
    h = harper_element(sigma)
    shifted = h + 1.5 * AlgebraElement.unit(sigma)
    bloch = eta_operator(shifted, method="bloch", kgrid=36)
    trunc = eta_operator(shifted, method="truncation", radius=9)
    assert abs(bloch.eta - trunc.eta) < 0.08


def test_eta_operator_germ_tabulates_powers():
    sigma = magnetic_multiplier(Fraction(1, 3))
    h = harper_element(sigma)
    shifted = h + 1.5 * AlgebraElement.unit(sigma)
    res = eta_operator(shifted, kgrid=12, s_grid=["1", "2/3"])
    assert set(res.germ) == {"1", "2/3"}
    assert abs(res.germ["1"] - res.eta) < 1e-12
