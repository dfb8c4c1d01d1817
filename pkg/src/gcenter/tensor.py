"""Symmetric 3x3 interaction tensors and motional averaging.

Tensors are in MHz. Motional averaging replaces a tensor T by
(1/n) sum_i R_i T R_i^T over the n-fold rotations about an axis, which is
what an ensemble hopping between equivalent orientations faster than the
measurement sees.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .numerics import eig_sym3

TRACELESS_RTOL = 1e-6
AXIS_NORM_TOL = 1e-12


@dataclass(frozen=True)
class SymTensor3:
    xx: float = 0.0
    yy: float = 0.0
    zz: float = 0.0
    xy: float = 0.0
    xz: float = 0.0
    yz: float = 0.0

    @classmethod
    def from_matrix(cls, m) -> "SymTensor3":
        a = np.asarray(m, dtype=float)
        if a.shape != (3, 3):
            raise UsageError("tensor must be 3x3")
        a = 0.5 * (a + a.T)
        return cls(a[0, 0], a[1, 1], a[2, 2], a[0, 1], a[0, 2], a[1, 2])

    @classmethod
    def diagonal(cls, xx, yy, zz) -> "SymTensor3":
        return cls(xx=xx, yy=yy, zz=zz)

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.xx, self.xy, self.xz], [self.xy, self.yy, self.yz], [self.xz, self.yz, self.zz]]
        )

    @property
    def trace(self) -> float:
        return self.xx + self.yy + self.zz

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix()))

    def rotated(self, rot) -> "SymTensor3":
        r = np.asarray(rot, dtype=float)
        return SymTensor3.from_matrix(r @ self.matrix() @ r.T)

    def is_traceless(self, rtol: float = TRACELESS_RTOL) -> bool:
        return abs(self.trace) <= rtol * max(self.norm(), np.finfo(float).tiny)

    def principal(self):
        """Principal values (decreasing magnitude) and axes as matrix columns."""
        return eig_sym3(self)


@dataclass(frozen=True)
class AxisFrame:
    axis: tuple
    rotation_order: int = 3

    def __post_init__(self):
        n = np.asarray(self.axis, dtype=float)
        if n.shape != (3,):
            raise UsageError("axis must be a 3-vector")
        if abs(np.linalg.norm(n) - 1.0) > AXIS_NORM_TOL:
            raise UsageError("axis must be a unit vector; use AxisFrame.along() to normalise")
        if int(self.rotation_order) != self.rotation_order or self.rotation_order < 1:
            raise UsageError("rotation order must be a positive integer")
        object.__setattr__(self, "axis", tuple(float(x) for x in n))

    @classmethod
    def along(cls, vector, rotation_order: int = 3) -> "AxisFrame":
        v = np.asarray(vector, dtype=float)
        length = np.linalg.norm(v)
        if length == 0:
            raise UsageError("axis vector is zero")
        return cls(tuple(v / length), rotation_order)

    @property
    def n(self) -> np.ndarray:
        return np.asarray(self.axis)

    def rotations(self) -> list:
        return [rotation_about(self.n, 2.0 * math.pi * i / self.rotation_order) for i in range(self.rotation_order)]


def rotation_about(axis, angle: float) -> np.ndarray:
    """Rotation matrix for ``angle`` (rad) about a unit ``axis`` (Rodrigues)."""
    n = np.asarray(axis, dtype=float)
    k = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    return np.eye(3) + math.sin(angle) * k + (1 - math.cos(angle)) * (k @ k)


def average_over_rotations(t: SymTensor3, frame: AxisFrame) -> SymTensor3:
    """Average of ``R t R^T`` over the ``rotation_order`` rotations about the frame axis."""
    m = t.matrix()
    acc = np.zeros((3, 3))
    for r in frame.rotations():
        acc += r @ m @ r.T
    acc /= frame.rotation_order
    # Restore the exact trace lost to rounding in the rotations.
    acc += np.eye(3) * (t.trace - np.trace(acc)) / 3.0
    return SymTensor3.from_matrix(acc)


def remove_isotropic(t: SymTensor3):
    """Split ``t`` into its isotropic value (trace / 3) and traceless part."""
    iso = t.trace / 3.0
    traceless = SymTensor3(t.xx - iso, t.yy - iso, t.zz - iso, t.xy, t.xz, t.yz)
    # Push any residual rounding into zz so the trace is exactly zero.
    residual = traceless.trace
    if residual:
        traceless = SymTensor3(traceless.xx, traceless.yy, -(traceless.xx + traceless.yy), t.xy, t.xz, t.yz)
    return iso, traceless


def axial_parameters(t: SymTensor3, n, rtol: float = TRACELESS_RTOL):
    """Axial and rhombic ZFS parameters (D, E) in MHz about the unit axis ``n``.

    D = (3/2) n.T.n. E is half the difference of the two principal values in
    the plane perpendicular to ``n`` (reported non-negative).
    """
    if not t.is_traceless(rtol):
        raise UsageError("tensor is not traceless; remove the isotropic part first")
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    m = t.matrix()
    D = 1.5 * float(n @ m @ n)
    helper = np.eye(3)[int(np.argmin(np.abs(n)))]
    a = np.cross(n, helper)
    a /= np.linalg.norm(a)
    b = np.cross(n, a)
    plane = np.array([[a @ m @ a, a @ m @ b], [b @ m @ a, b @ m @ b]])
    half_diff = 0.5 * (plane[0, 0] - plane[1, 1])
    E = math.hypot(half_diff, plane[0, 1])
    return D, E


def middle_axis(t: SymTensor3) -> np.ndarray:
    """Principal axis of the middle-magnitude principal value.

    Default averaging axis for the calculated D tensor: (3/2) * 911 MHz along
    it gives the axial value closest to the measured averaged D.
    """
    _, vectors = eig_sym3(t)
    return vectors[:, 1]


def traceless_sign_assignments(magnitudes, rtol: float = 1e-2):
    """Sign choices for principal-value magnitudes that leave the tensor near traceless.

    Returns a list of signed (xx, yy, zz) tuples with |trace| <= rtol * max
    magnitude, ordered by |trace| then lexicographically.
    """
    mags = [abs(float(x)) for x in magnitudes]
    if len(mags) != 3:
        raise UsageError("expected three principal magnitudes")
    out = []
    for signs in itertools.product((1, -1), repeat=3):
        vals = tuple(s * m for s, m in zip(signs, mags))
        if abs(sum(vals)) <= rtol * max(mags):
            out.append(vals)
    return sorted(out, key=lambda v: (abs(sum(v)), v))
