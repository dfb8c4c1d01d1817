"""S = 1 spin Hamiltonian: zero-field splitting, Zeeman and first-order hyperfine.

    H = S . D . S + g (mu_B / h) B . S   [+ m_I |A <S>| per electron level]

Energies are in MHz, fields in tesla. ``D`` and ``A`` are given in the defect
frame; ``frame`` rotates defect coordinates into crystal coordinates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BracketError, UsageError
from .numerics import find_root
from .tensor import AxisFrame, SymTensor3, average_over_rotations, middle_axis, rotation_about
from .units import G_DEFAULT, zeeman_mhz_per_tesla

SCAN_POINTS = 2000
FIELD_XTOL = 1e-12  # T
BRANCH_MERGE_TOL = 1e-5  # T
FRAME_TOL = 1e-10
# Transitions weaker than this (|<i|S_perp|j>|^2, spin-1 maximum 1) are not reported.
MIN_TRANSITION_WEIGHT = 1e-6
ROOT_CHECK_MHZ = 1e-4

_R2 = np.sqrt(0.5)
SX = _R2 * np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex)
SY = _R2 * np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex)
SZ = np.diag([1.0, 0.0, -1.0]).astype(complex)
SPIN = (SX, SY, SZ)


@dataclass(frozen=True)
class TripletSpinSystem:
    D: SymTensor3
    g: float = G_DEFAULT
    A: Optional[SymTensor3] = None
    frame: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        if not self.D.is_traceless():
            raise UsageError("D must be traceless; use tensor.remove_isotropic first")
        r = np.asarray(self.frame, dtype=float)
        if r.shape != (3, 3) or np.max(np.abs(r @ r.T - np.eye(3))) > FRAME_TOL:
            raise UsageError("frame must be an orthonormal 3x3 matrix")
        if not self.g > 0:
            raise UsageError("g must be positive")
        object.__setattr__(self, "frame", r)

    @property
    def D_lab(self) -> np.ndarray:
        return self.frame @ self.D.matrix() @ self.frame.T

    @property
    def A_lab(self) -> Optional[np.ndarray]:
        if self.A is None:
            return None
        return self.frame @ self.A.matrix() @ self.frame.T

    def reoriented(self, rot) -> "TripletSpinSystem":
        """The same defect with an extra crystal rotation applied."""
        return replace(self, frame=np.asarray(rot, dtype=float) @ self.frame)


@dataclass(frozen=True)
class Resonance:
    field: float  # T
    lower: int  # level indices in ascending energy order
    upper: int
    m_I: Optional[float] = None

    @property
    def transition(self) -> str:
        label = f"{self.lower}-{self.upper}"
        if self.m_I is not None:
            label += f" mI={self.m_I:+.1f}"
        return label


@dataclass
class Branch:
    resonances: list
    orientation_ids: list

    @property
    def multiplicity(self) -> int:
        return len(self.orientation_ids)

    @property
    def fields(self) -> list:
        return [r.field for r in self.resonances]


def hamiltonian(sys: TripletSpinSystem, B) -> np.ndarray:
    """3x3 Hermitian spin Hamiltonian in MHz, basis |+1>, |0>, |-1> along crystal z."""
    B = np.asarray(B, dtype=float)
    if B.shape != (3,) or not np.all(np.isfinite(B)):
        raise UsageError("field must be a finite 3-vector")
    d = sys.D_lab
    h = np.zeros((3, 3), dtype=complex)
    for a in range(3):
        for b in range(3):
            if d[a, b] != 0.0:
                h += d[a, b] * (SPIN[a] @ SPIN[b])
    z = zeeman_mhz_per_tesla(sys.g)
    for a in range(3):
        h += z * B[a] * SPIN[a]
    return 0.5 * (h + h.conj().T)


def levels(sys: TripletSpinSystem, B) -> np.ndarray:
    """Electron spin energies in MHz, ascending."""
    return np.linalg.eigvalsh(hamiltonian(sys, B))


def defect_frame() -> np.ndarray:
    """Default defect-to-crystal rotation for the monoclinic centre.

    Defect y (middle D axis, the averaging axis) along [111], defect z along
    [1-10] (normal to the {110} mirror plane), x = y cross z along [11-2].
    """
    x = np.array([1.0, 1.0, -2.0]) / np.sqrt(6.0)
    y = np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0)
    z = np.array([1.0, -1.0, 0.0]) / np.sqrt(2.0)
    return np.column_stack([x, y, z])


def _eig_with_hyperfine(h, A, bhat):
    # Energies plus the first-order hyperfine coefficient a_i of each level,
    # E(i, m_I) = E_i + m_I a_i with a_i = sign(<S>_i . bhat) |A <S>_i|.
    # Works on stacks of Hamiltonians (..., 3, 3).
    vals, vecs = np.linalg.eigh(h)
    if A is None:
        return vals, vecs, None
    s = np.stack([np.real(np.einsum("...ai,ab,...bi->...i", vecs.conj(), m, vecs)) for m in SPIN], axis=-1)
    proj = np.linalg.norm(s @ A.T, axis=-1)
    coef = np.where(s @ bhat >= 0, proj, -proj)
    return vals, vecs, coef


def _transition_weight(vecs, bhat):
    # Magnetic-dipole strength |<i|S_perp|j>|^2 for microwave field perpendicular to B,
    # summed over the two perpendicular directions.
    helper = np.eye(3)[int(np.argmin(np.abs(bhat)))]
    e1 = np.cross(bhat, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(bhat, e1)
    w = np.zeros(vecs.shape[:-2] + (3, 3))
    for e in (e1, e2):
        op = sum(e[a] * SPIN[a] for a in range(3))
        m = np.einsum("...ai,ab,...bj->...ij", vecs.conj(), op, vecs)
        w += np.abs(m) ** 2
    return w


def transition_weights(sys: TripletSpinSystem, B) -> np.ndarray:
    """3x3 matrix of |<i|S_perp|j>|^2 between levels (ascending order) at field ``B``."""
    B = np.asarray(B, dtype=float)
    n = np.linalg.norm(B)
    bhat = B / n if n > 0 else np.array([0.0, 0.0, 1.0])
    _, vecs = np.linalg.eigh(hamiltonian(sys, B))
    return _transition_weight(vecs, bhat)


def _transition_function(sys, bhat, probe_mhz, i, j, m_I):
    A = sys.A_lab

    def f(Bmag):
        vals, _, coef = _eig_with_hyperfine(hamiltonian(sys, Bmag * bhat), A, bhat)
        gap = vals[j] - vals[i]
        if m_I is not None:
            gap += m_I * (coef[j] - coef[i])
        return gap - probe_mhz

    return f


def resonance_fields(
    sys: TripletSpinSystem,
    direction,
    probe: float,
    B_max: float = 2.0,
    n_scan: int = SCAN_POINTS,
    hyperfine: bool = True,
    min_weight: float = MIN_TRANSITION_WEIGHT,
) -> list:
    """Fields in (0, B_max] where a level gap matches ``probe`` (GHz).

    Every level pair is scanned on ``n_scan`` uniform points. Sign changes
    are refined by bracketed root finding. Local minima of |gap - probe|
    without a sign change are searched for a hidden crossing pair, so
    near-tangent resonances at anticrossings are not lost. Transitions whose
    magnetic-dipole weight is below ``min_weight`` are dropped (pass 0 to keep
    all). Coincident lines from degenerate gaps are reported once. With a
    hyperfine tensor each transition yields one line per nuclear
    projection m_I = +-1/2.
    """
    if not probe > 0:
        raise UsageError("probe frequency must be positive")
    if not B_max > 0:
        raise UsageError("B_max must be positive")
    u = np.asarray(direction, dtype=float)
    if u.shape != (3,) or np.linalg.norm(u) == 0:
        raise UsageError("direction must be a non-zero 3-vector")
    u = u / np.linalg.norm(u)
    probe_mhz = probe * 1e3
    A = sys.A_lab if hyperfine else None
    nuclear = (0.5, -0.5) if A is not None else (None,)

    grid = np.linspace(0.0, B_max, n_scan + 1)
    h0 = hamiltonian(sys, np.zeros(3))
    hz = hamiltonian(replace(sys, D=SymTensor3()), u)
    vals_grid, _, coef_grid = _eig_with_hyperfine(h0[None] + grid[:, None, None] * hz[None], A, u)

    found = []
    for i, j in itertools.combinations(range(3), 2):
        for m_I in nuclear:
            f = _transition_function(sys, u, probe_mhz, i, j, m_I)
            vals = vals_grid[:, j] - vals_grid[:, i] - probe_mhz
            if m_I is not None:
                vals = vals + m_I * (coef_grid[:, j] - coef_grid[:, i])
            brackets = []
            for n in range(n_scan):
                if vals[n] == 0.0 or vals[n] * vals[n + 1] < 0:
                    brackets.append((grid[n], grid[n + 1]))
            for n in range(1, n_scan):
                # A dip towards zero between samples of equal sign.
                if vals[n - 1] * vals[n] > 0 and vals[n] * vals[n + 1] > 0:
                    if abs(vals[n]) < abs(vals[n - 1]) and abs(vals[n]) < abs(vals[n + 1]):
                        lo, hi = grid[n - 1], grid[n + 1]
                        sgn = np.sign(vals[n])
                        res = minimize_scalar(lambda b: sgn * f(b), bounds=(lo, hi), method="bounded",
                                              options={"xatol": FIELD_XTOL})
                        if sgn * res.fun < 0:
                            brackets.extend([(lo, res.x), (res.x, hi)])
            for lo, hi in brackets:
                try:
                    r = find_root(f, lo, hi, rtol=FIELD_XTOL / (hi - lo))
                except BracketError:
                    continue
                # Discard jumps (e.g. hyperfine sign flips at degeneracies) posing as roots.
                if r <= 0.0 or abs(f(r)) > ROOT_CHECK_MHZ:
                    continue
                if min_weight > 0 and transition_weights(sys, r * u)[i, j] < min_weight:
                    continue
                # Degenerate gaps (e.g. D = 0) give one observable line.
                if any(abs(r - q.field) < 1e-9 and q.m_I == m_I for q in found):
                    continue
                found.append(Resonance(field=float(r), lower=i, upper=j, m_I=m_I))
    found.sort(key=lambda r: (r.field, r.lower, r.upper, -(r.m_I or 0.0)))
    return found


def cubic_rotations() -> list:
    """The 24 proper rotations of the cube as signed permutation matrices."""
    out = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            m = np.zeros((3, 3))
            for row, (col, s) in enumerate(zip(perm, signs)):
                m[row, col] = s
            if np.linalg.det(m) > 0:
                out.append(m)
    return out


def distinct_orientations(sys: TripletSpinSystem, rotations: Optional[Sequence] = None, tol: float = 1e-9):
    """Rotations giving distinct lab-frame tensors; the first of each class is kept."""
    rotations = cubic_rotations() if rotations is None else rotations
    kept, tensors = [], []
    scale = max(sys.D.norm(), sys.A.norm() if sys.A is not None else 0.0, 1.0)
    for rot in rotations:
        img = sys.reoriented(rot)
        key = (img.D_lab, img.A_lab)
        dup = False
        for other in tensors:
            if np.max(np.abs(key[0] - other[0])) <= tol * scale and (
                key[1] is None or np.max(np.abs(key[1] - other[1])) <= tol * scale
            ):
                dup = True
                break
        if not dup:
            kept.append(np.asarray(rot, dtype=float))
            tensors.append(key)
    return kept


def orientation_branches(
    sys: TripletSpinSystem,
    orientations: Optional[Sequence] = None,
    direction=(0.0, 1.0, 1.0),
    probe: float = 35.0,
    B_max: float = 2.0,
    n_scan: int = SCAN_POINTS,
    merge_tol: float = BRANCH_MERGE_TOL,
) -> list:
    """Resonance sets of each defect orientation, merged where they coincide.

    ``orientations`` are crystal rotations applied on top of ``sys.frame``.
    By default the distinct images under the cubic rotation group are used.
    Branches are sorted by their lowest field.
    """
    if orientations is None:
        orientations = distinct_orientations(sys)
    if len(orientations) == 0:
        raise UsageError("orientation list is empty")
    branches = []
    for idx, rot in enumerate(orientations):
        res = resonance_fields(sys.reoriented(rot), direction, probe, B_max, n_scan)
        for br in branches:
            if len(br.resonances) == len(res) and all(
                abs(a.field - b.field) <= merge_tol for a, b in zip(br.resonances, res)
            ):
                br.orientation_ids.append(idx)
                break
        else:
            branches.append(Branch(resonances=res, orientation_ids=[idx]))
    branches.sort(key=lambda br: (br.fields[0] if br.resonances else np.inf, br.orientation_ids[0]))
    return branches


def motional_average(sys: TripletSpinSystem, frame: Optional[AxisFrame] = None) -> TripletSpinSystem:
    """Replace D (and A) by their averages over rotations about ``frame``.

    ``frame`` is in defect coordinates. The default axis is the D principal
    axis of middle magnitude, threefold.
    """
    if frame is None:
        frame = AxisFrame.along(middle_axis(sys.D), 3)
    D = average_over_rotations(sys.D, frame)
    A = average_over_rotations(sys.A, frame) if sys.A is not None else None
    return replace(sys, D=D, A=A)


def frame_aligning(vector_from, vector_to) -> np.ndarray:
    """Proper rotation taking the direction ``vector_from`` onto ``vector_to``."""
    a = np.asarray(vector_from, dtype=float)
    b = np.asarray(vector_to, dtype=float)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    axis = np.cross(a, b)
    s = np.linalg.norm(axis)
    c = float(np.clip(a @ b, -1.0, 1.0))
    if s < 1e-14:
        if c > 0:
            return np.eye(3)
        # Antiparallel: half turn about any perpendicular axis.
        perp = np.cross(a, np.eye(3)[int(np.argmin(np.abs(a)))])
        return rotation_about(perp / np.linalg.norm(perp), np.pi)
    return rotation_about(axis / s, np.arctan2(s, c))
