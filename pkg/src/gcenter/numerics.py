"""Small deterministic numerical kernels.

* :func:`eig_tridiag` -- lowest eigenvalues of a real symmetric tridiagonal
  matrix by Sturm-sequence bisection.
* :func:`eig_sym3` -- cyclic Jacobi diagonalisation of a 3x3 symmetric matrix.
* :func:`find_root` -- bracketed scalar root refinement.
* :func:`newton2` -- damped Newton iteration for small square systems.

Tolerances are module constants; every routine also takes them as keyword
arguments so callers (and the CLI config) can override them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import BracketError, ComputeError, FitError, UsageError

_EPS = np.finfo(float).eps

# Bisection stops once the bracket is this many ulps of the eigenvalue wide.
EIG_REL_TOL = 2.0 * _EPS
EIG_MAX_ITER = 256
JACOBI_MAX_SWEEPS = 50
ROOT_RTOL = 1e-10
NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 200
NEWTON_FD_STEP = 1e-7


@dataclass(frozen=True)
class SymTridiag:
    """Real symmetric tridiagonal matrix stored by its two diagonals."""

    diagonal: np.ndarray
    off_diagonal: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diagonal, dtype=float)
        e = np.asarray(self.off_diagonal, dtype=float)
        if d.ndim != 1 or d.size < 1:
            raise UsageError("diagonal must be a non-empty 1-D array")
        if e.shape != (d.size - 1,):
            raise UsageError(f"off_diagonal must have length {d.size - 1}, got {e.size}")
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "off_diagonal", e)

    @property
    def n(self) -> int:
        return self.diagonal.size

    def dense(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.off_diagonal, 1) + np.diag(self.off_diagonal, -1)


def _bisect_lowest(diag, off2, count, lower, upper, rel_tol, atol, pivmin, max_iter):
    # Sturm-sequence bisection for eigenvalues 0..count-1 of one matrix.
    # Plain scalar loops so the same code runs interpreted or under numba.
    n = diag.shape[0]
    out = np.empty(count)
    floor = lower
    for idx in range(count):
        lo = floor
        hi = upper
        converged = False
        for _ in range(max_iter):
            width = hi - lo
            if width <= rel_tol * max(abs(lo), abs(hi)) + atol:
                converged = True
                break
            mid = lo + 0.5 * width
            if mid <= lo or mid >= hi:
                converged = True
                break
            q = diag[0] - mid
            if abs(q) < pivmin:
                q = -pivmin
            below = 1 if q < 0 else 0
            for i in range(1, n):
                q = diag[i] - mid - off2[i - 1] / q
                if abs(q) < pivmin:
                    q = -pivmin
                if q < 0:
                    below += 1
            if below > idx:
                hi = mid
            else:
                lo = mid
        if not converged:
            return out, False
        out[idx] = lo + 0.5 * (hi - lo)
        # Eigenvalue idx+1 cannot lie below the bracket just closed.
        floor = lo
    return out, True


try:  # optional acceleration; results are identical either way
    import numba

    _bisect_lowest = numba.njit(cache=True)(_bisect_lowest)
except ImportError:  # pragma: no cover
    pass


def eig_tridiag_batch(
    matrices: Sequence[SymTridiag], count: int, rel_tol: float = EIG_REL_TOL
) -> np.ndarray:
    """Lowest ``count`` eigenvalues of several equally sized matrices.

    Returns an array of shape ``(len(matrices), count)``, each row ascending.
    """
    out = np.empty((len(matrices), count))
    for row, m in enumerate(matrices):
        if not 1 <= count <= m.n:
            raise UsageError(f"count must lie in [1, {m.n}], got {count}")
        diag, off = m.diagonal, m.off_diagonal
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(off))):
            raise ComputeError("tridiagonal matrix contains non-finite entries")
        off2 = off**2
        radius = np.zeros_like(diag)
        radius[:-1] += np.abs(off)
        radius[1:] += np.abs(off)
        lower = float(np.min(diag - radius))
        upper = float(np.max(diag + radius))
        scale = max(abs(lower), abs(upper))
        # Pad the Gershgorin interval so both ends are strict bounds.
        pad = 4.0 * _EPS * scale + np.finfo(float).tiny
        pivmin = np.finfo(float).tiny * max(1.0, float(off2.max()) if off2.size else 1.0)
        values, ok = _bisect_lowest(
            diag, off2, count, lower - pad, upper + pad,
            rel_tol, 1e-3 * _EPS * scale, pivmin, EIG_MAX_ITER,
        )
        if not ok:
            raise ComputeError("bisection did not converge")
        # Equal eigenvalues may differ in the last bit; keep the order exact.
        out[row] = np.sort(values)
    return out


def eig_tridiag(m: SymTridiag, count: int, rel_tol: float = EIG_REL_TOL) -> np.ndarray:
    """Lowest ``count`` eigenvalues of ``m`` in ascending order.

    Parameters
    ----------
    m : SymTridiag
    count : int
        Number of eigenvalues, ``1 <= count <= m.n``.
    rel_tol : float, optional
        Bisection stops when the bracket is narrower than ``rel_tol`` times the
        eigenvalue magnitude.

    Returns
    -------
    ndarray of shape (count,)
    """
    return eig_tridiag_batch([m], count, rel_tol=rel_tol)[0]


def _as_sym3(t) -> np.ndarray:
    a = np.asarray(t.matrix() if hasattr(t, "matrix") else t, dtype=float)
    if a.shape != (3, 3):
        raise UsageError("expected a 3x3 matrix")
    if not np.all(np.isfinite(a)):
        raise ComputeError("3x3 tensor contains non-finite entries")
    return 0.5 * (a + a.T)


def eig_sym3(t, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigen-decomposition of a symmetric 3x3 tensor by cyclic Jacobi sweeps.

    Accepts a ``SymTensor3`` or any 3x3 array. Eigenvalues are returned in
    order of decreasing magnitude (ties broken by decreasing value), with the
    matching eigenvectors as the columns of a proper rotation matrix.
    """
    a = _as_sym3(t)
    # Work on a unit-scale copy so squared sums cannot underflow or overflow.
    # Power of two, so the rescaling is exact.
    scale = float(np.ldexp(1.0, int(np.frexp(np.max(np.abs(a)))[1])))
    if np.max(np.abs(a)) > 0.0:
        a = a / scale
    v = np.eye(3)
    norm = np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
        if off <= (_EPS * norm) ** 2 * 1e-4 or off == 0.0:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = a[p, q]
            if apq == 0.0:
                continue
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            tan = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
            cos = 1.0 / np.sqrt(tan * tan + 1.0)
            sin = tan * cos
            rot = np.eye(3)
            rot[p, p] = rot[q, q] = cos
            rot[p, q] = sin
            rot[q, p] = -sin
            a = rot.T @ a @ rot
            v = v @ rot
    values = np.diag(a) * scale
    order = sorted(range(3), key=lambda i: (-abs(values[i]), -values[i]))
    values = values[order]
    vectors = v[:, order]
    if np.linalg.det(vectors) < 0:
        vectors[:, 2] = -vectors[:, 2]
    return values, vectors


def find_root(
    f: Callable[[float], float], lo: float, hi: float, rtol: float = ROOT_RTOL
) -> float:
    """Root of a scalar function inside ``[lo, hi]``.

    Raises
    ------
    BracketError
        If ``f(lo)`` and ``f(hi)`` have the same strict sign.
    """
    if not hi > lo:
        raise UsageError(f"empty bracket [{lo}, {hi}]")
    flo, fhi = f(lo), f(hi)
    if not (np.isfinite(flo) and np.isfinite(fhi)):
        raise ComputeError("function is not finite at the bracket ends")
    if flo == 0.0:
        return float(lo)
    if fhi == 0.0:
        return float(hi)
    if flo * fhi > 0:
        raise BracketError(f"no sign change on [{lo}, {hi}]: f = {flo:.6g}, {fhi:.6g}")
    return float(brentq(f, lo, hi, xtol=rtol * (hi - lo), rtol=4 * _EPS, maxiter=500))


def newton2(
    f: Callable[[np.ndarray], np.ndarray],
    start,
    damping: float = 1.0,
    tol: float = NEWTON_TOL,
    max_iter: int = NEWTON_MAX_ITER,
    fd_step: float = NEWTON_FD_STEP,
    full_output: bool = False,
):
    """Damped Newton iteration with a forward-difference Jacobian.

    Each step is ``damping`` times the Newton step, halved until the residual
    norm decreases.

    Returns
    -------
    x : ndarray
    info : dict
        Only if ``full_output``; keys ``iterations`` and ``residual_norm``.

    Raises
    ------
    FitError
        On a singular Jacobian, a failed line search or ``max_iter`` steps.
        The last iterate is attached.
    """
    if not 0.0 < damping <= 1.0:
        raise UsageError("damping must lie in (0, 1]")
    x = np.asarray(start, dtype=float).copy()
    r = np.asarray(f(x), dtype=float)
    norm = float(np.linalg.norm(r))
    for it in range(max_iter + 1):
        if not np.isfinite(norm):
            raise FitError("residual became non-finite", last_iterate=x, residual=norm)
        if norm < tol:
            if full_output:
                return x, {"iterations": it, "residual_norm": norm}
            return x
        if it == max_iter:
            break
        jac = np.empty((r.size, x.size))
        for i in range(x.size):
            h = fd_step * max(1.0, abs(x[i]))
            xh = x.copy()
            xh[i] += h
            jac[:, i] = (np.asarray(f(xh), dtype=float) - r) / h
        try:
            step = -np.linalg.solve(jac, r)
        except np.linalg.LinAlgError:
            raise FitError("singular Jacobian", last_iterate=x, residual=norm) from None
        t = damping
        for _ in range(40):
            trial = x + t * step
            r_trial = np.asarray(f(trial), dtype=float)
            n_trial = float(np.linalg.norm(r_trial))
            if np.isfinite(n_trial) and n_trial < norm:
                break
            t *= 0.5
        else:
            raise FitError("line search failed to reduce the residual", last_iterate=x, residual=norm)
        x, r, norm = trial, r_trial, n_trial
    raise FitError(f"no convergence in {max_iter} iterations", last_iterate=x, residual=norm)
