import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.linalg import eigh_tridiagonal

from gcenter.errors import BracketError, ComputeError, FitError, UsageError
from gcenter.numerics import SymTridiag, eig_sym3, eig_tridiag, find_root, newton2
from gcenter.rates import RateParams, gamma
from gcenter.tensor import SymTensor3
from oracles import classical_jacobi, spin_ladder_matrix

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)


# ---------------------------------------------------------------- tridiagonal


@pytest.mark.parametrize(
    "diag, off, count, expected",
    [
        ([2, 2, 2], [0, 0], 3, [2, 2, 2]),
        ([0, 0], [1], 2, [-1, 1]),
        ([5.0], [], 1, [5.0]),
    ],
)
def test_eig_tridiag_small(diag, off, count, expected):
    np.testing.assert_allclose(eig_tridiag(SymTridiag(diag, off), count), expected, atol=1e-14)


def test_spin_ladder_exact():
    # 100x100 tridiagonal with the exact equally spaced spectrum -49.5 ... 49.5.
    d, e = spin_ladder_matrix(100)
    got = eig_tridiag(SymTridiag(d, e), 5)
    exact = -49.5 + np.arange(5)
    np.testing.assert_allclose(got, exact, rtol=1e-8)
    assert np.max(np.abs(got - exact)) <= 1e-12 * 49.5


def test_finite_difference_oscillator():
    # Three-point oscillator on [-10, 10]; converges to n + 1/2 as h^2.
    n = 100
    x = np.linspace(-10, 10, n)
    h = x[1] - x[0]
    d = 1.0 / h**2 + 0.5 * x**2
    e = np.full(n - 1, -0.5 / h**2)
    got = eig_tridiag(SymTridiag(d, e), 5)
    ref = eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, 4))
    np.testing.assert_allclose(got, ref, rtol=1e-12)
    np.testing.assert_allclose(got, np.arange(5) + 0.5, rtol=0.05)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 40), data=st.data())
def test_eig_tridiag_matches_lapack(n, data):
    d = data.draw(arrays(float, n, elements=finite))
    e = data.draw(arrays(float, n - 1, elements=finite))
    count = data.draw(st.integers(1, n))
    got = eig_tridiag(SymTridiag(d, e), count)
    ref = np.linalg.eigvalsh(SymTridiag(d, e).dense())[:count]
    scale = max(np.max(np.abs(d)), np.max(np.abs(e), initial=0.0))
    assert np.all(np.diff(got) >= 0)
    assert np.max(np.abs(got - ref)) <= 1e-12 * scale * max(1, n) ** 0.5 + 1e-300


def test_eig_tridiag_deterministic():
    rng = np.random.default_rng(7)
    m = SymTridiag(rng.normal(size=200), rng.normal(size=199))
    assert np.array_equal(eig_tridiag(m, 10), eig_tridiag(m, 10))


@pytest.mark.parametrize("diag, off", [([1.0, np.nan], [0.0]), ([1.0, 2.0], [np.inf])])
def test_eig_tridiag_nonfinite(diag, off):
    with pytest.raises(ComputeError):
        eig_tridiag(SymTridiag(diag, off), 1)


@pytest.mark.parametrize("count", [0, 4])
def test_eig_tridiag_count_range(count):
    with pytest.raises(UsageError):
        eig_tridiag(SymTridiag([1, 2, 3], [0, 0]), count)


def test_symtridiag_shapes():
    with pytest.raises(UsageError):
        SymTridiag([], [])
    with pytest.raises(UsageError):
        SymTridiag([1, 2, 3], [1])


# ---------------------------------------------------------------- 3x3


def test_eig_sym3_scaled_identity():
    vals, vecs = eig_sym3(3.5 * np.eye(3))
    np.testing.assert_array_equal(vals, [3.5, 3.5, 3.5])
    np.testing.assert_allclose(vecs @ vecs.T, np.eye(3), atol=1e-15)


def test_eig_sym3_table_values():
    vals, vecs = eig_sym3(SymTensor3.diagonal(307.0, 911.0, -1218.0))
    np.testing.assert_array_equal(vals, [-1218.0, 911.0, 307.0])
    np.testing.assert_allclose(np.abs(vecs), np.eye(3)[:, [2, 1, 0]], atol=1e-15)
    assert np.linalg.det(vecs) == pytest.approx(1.0)


# Entries are 0 or at least 1e-100 so the test's own norms cannot underflow.
moderate = finite.filter(lambda x: x == 0.0 or abs(x) >= 1e-100)
sym3 = arrays(float, (3, 3), elements=moderate).map(lambda a: 0.5 * (a + a.T))


@settings(max_examples=200, deadline=None)
@given(a=sym3)
def test_eig_sym3_properties(a):
    vals, vecs = eig_sym3(a)
    norm = np.linalg.norm(a)
    # residual, right-handed orthonormal frame, ordering
    assert np.max(np.linalg.norm(a @ vecs - vecs * vals, axis=0)) <= 1e-10 * max(norm, 1e-300)
    np.testing.assert_allclose(vecs.T @ vecs, np.eye(3), atol=1e-12)
    assert np.linalg.det(vecs) == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(np.abs(vals)) <= 1e-12 * max(norm, 1e-300))
    # invariants
    assert abs(vals.sum() - np.trace(a)) <= 1e-12 * max(norm, 1e-300) * 3
    assert abs(np.linalg.norm(vals) - norm) <= 1e-12 * max(norm, 1e-300)
    # independent Jacobi oracle
    np.testing.assert_allclose(np.sort(vals), classical_jacobi(a), atol=1e-10 * max(norm, 1e-300))


def test_eig_sym3_tiny_scale():
    # Squared entries underflow here; the sweep must still run.
    vals, _ = eig_sym3(np.full((3, 3), 1e-300))
    np.testing.assert_allclose(np.sort(vals), [0.0, 0.0, 3e-300], atol=1e-314)


def test_eig_sym3_nonfinite():
    with pytest.raises(ComputeError):
        eig_sym3(np.array([[np.nan, 0, 0], [0, 1, 0], [0, 0, 1]]))


# ---------------------------------------------------------------- roots


@pytest.mark.parametrize(
    "f, lo, hi, root",
    [
        (lambda x: x - 1.0, 0.0, 2.0, 1.0),
        (lambda x: x**3 - 8.0, 0.0, 3.0, 2.0),
        (lambda x: x, 0.0, 1.0, 0.0),
    ],
)
def test_find_root_examples(f, lo, hi, root):
    assert find_root(f, lo, hi) == pytest.approx(root, abs=1e-10 * (hi - lo))


def test_find_root_crossing_temperature():
    p = RateParams(delta=0.22, beta=1.11e7)
    t = find_root(lambda T: gamma(p, T) - 35e9, 0.0, 20.0)
    assert t == pytest.approx(5.0, abs=2e-3)


def test_find_root_no_sign_change():
    with pytest.raises(BracketError):
        find_root(lambda x: x * x + 1.0, -1.0, 1.0)


@given(c=st.floats(-0.99, 0.99), lo=st.floats(-10, -3), hi=st.floats(3, 10))
def test_find_root_inside_bracket(c, lo, hi):
    r = find_root(lambda x: np.tanh(x) - c, lo, hi)
    assert lo <= r <= hi
    assert abs(r - np.arctanh(c)) <= 1e-10 * (hi - lo) + 1e-12


# ---------------------------------------------------------------- Newton


def test_newton_shift():
    x = newton2(lambda v: np.array([v[0] - 1.0, v[1] - 2.0]), [0.0, 0.0])
    np.testing.assert_allclose(x, [1.0, 2.0], atol=1e-10)


def test_newton_linear_one_step():
    # One step is exact up to the rounding of the difference Jacobian.
    a = np.array([[2.0, 1.0], [1.0, 3.0]])
    b = np.array([1.0, -1.0])
    x, info = newton2(lambda v: a @ v - b, [0.0, 0.0], tol=1e-8, full_output=True)
    np.testing.assert_allclose(x, np.linalg.solve(a, b), atol=1e-8)
    assert info["iterations"] == 1


def test_newton_reports_last_iterate():
    with pytest.raises(FitError) as err:
        newton2(lambda v: np.array([v[0] ** 2 + 1.0, v[1]]), [3.0, 1.0], max_iter=5)
    assert err.value.last_iterate is not None
    assert err.value.last_iterate.shape == (2,)


def test_newton_bad_damping():
    with pytest.raises(UsageError):
        newton2(lambda v: v, [1.0, 1.0], damping=0.0)
