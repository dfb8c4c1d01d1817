import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from gcenter import presets
from gcenter.errors import UsageError
from gcenter.tensor import (
    AxisFrame, SymTensor3, average_over_rotations, axial_parameters, middle_axis, remove_isotropic,
    rotation_about, traceless_sign_assignments,
)
from oracles import rotation_sum

D_CALC = presets.D_CALCULATED

components = st.floats(-2000, 2000, allow_nan=False)
tensors = st.tuples(*[components] * 6).map(lambda c: SymTensor3(*c))
traceless = tensors.map(lambda t: remove_isotropic(t)[1])
unit_vectors = arrays(float, 3, elements=st.floats(-1, 1)).filter(lambda v: np.linalg.norm(v) > 0.1)


def test_symtensor_round_trip():
    t = SymTensor3(1, 2, 3, 4, 5, 6)
    assert SymTensor3.from_matrix(t.matrix()) == t
    assert t.trace == 6
    with pytest.raises(UsageError):
        SymTensor3.from_matrix(np.eye(2))


def test_principal_of_table_tensor():
    vals, vecs = D_CALC.principal()
    np.testing.assert_array_equal(vals, [-1218.0, 911.0, 307.0])
    np.testing.assert_allclose(np.abs(middle_axis(D_CALC)), [0, 1, 0], atol=1e-15)


@pytest.mark.parametrize("axis", [(0, 0, 2), (1, 1, 1), (1e-5, 0, 1)])
def test_axis_frame_needs_unit_vector(axis):
    with pytest.raises(UsageError):
        AxisFrame(axis)
    assert np.linalg.norm(AxisFrame.along(axis).n) == pytest.approx(1.0, abs=1e-15)


def test_axis_frame_validation():
    with pytest.raises(UsageError):
        AxisFrame.along((0, 0, 0))
    with pytest.raises(UsageError):
        AxisFrame((0, 0, 1), rotation_order=0)
    with pytest.raises(UsageError):
        AxisFrame((0, 1))


@settings(max_examples=50)
@given(axis=unit_vectors, angle=st.floats(-7, 7))
def test_rotation_about_is_proper(axis, angle):
    n = axis / np.linalg.norm(axis)
    r = rotation_about(n, angle)
    np.testing.assert_allclose(r @ r.T, np.eye(3), atol=1e-14)
    assert np.linalg.det(r) == pytest.approx(1.0)
    np.testing.assert_allclose(r @ n, n, atol=1e-14)


# ---------------------------------------------------------------- averaging


def test_table_tensor_average():
    axis = middle_axis(D_CALC)
    avg = average_over_rotations(D_CALC, AxisFrame.along(axis, 3))
    D, E = axial_parameters(avg, axis)
    assert D == pytest.approx(1366.5, abs=0.5)
    assert abs(D / 1365.0 - 1) <= 1.5e-3
    assert abs(E) <= 1e-9
    np.testing.assert_allclose(avg.matrix(), rotation_sum(D_CALC.matrix(), axis, 3), atol=1e-12 * D_CALC.norm())


def test_axial_fixed_point():
    t = SymTensor3.diagonal(-100.0, -100.0, 200.0)
    avg = average_over_rotations(t, AxisFrame((0.0, 0.0, 1.0), 3))
    np.testing.assert_allclose(avg.matrix(), t.matrix(), atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(t=traceless, axis=unit_vectors, order=st.integers(3, 8))
def test_average_properties(t, axis, order):
    frame = AxisFrame.along(axis, order)
    avg = average_over_rotations(t, frame)
    scale = max(t.norm(), 1.0)
    # brute force and closed form
    np.testing.assert_allclose(avg.matrix(), rotation_sum(t.matrix(), frame.n, order), atol=1e-12 * scale)
    n = frame.n
    closed = 0.5 * (3 * np.outer(n, n) - np.eye(3)) * (n @ t.matrix() @ n)
    np.testing.assert_allclose(avg.matrix(), closed, atol=1e-12 * scale)
    # trace, idempotence, commutation, contraction
    assert abs(avg.trace - t.trace) <= 1e-12 * scale
    again = average_over_rotations(avg, frame)
    np.testing.assert_allclose(again.matrix(), avg.matrix(), atol=1e-12 * scale)
    r = rotation_about(n, 2 * np.pi / order)
    assert np.max(np.abs(r @ avg.matrix() @ r.T - avg.matrix())) <= 1e-12 * scale
    assert avg.norm() <= t.norm() * (1 + 1e-12) + 1e-12
    # axial with E = 0
    assert axial_parameters(avg, n)[1] <= 1e-9 * scale


def test_orders_three_and_six_agree():
    axis = (1.0, 1.0, 1.0)
    a3 = average_over_rotations(D_CALC, AxisFrame.along(axis, 3))
    a6 = average_over_rotations(D_CALC, AxisFrame.along(axis, 6))
    np.testing.assert_allclose(a3.matrix(), a6.matrix(), atol=1e-12 * D_CALC.norm())


def test_order_two_keeps_rhombic_part():
    # A twofold average does not produce an axial tensor.
    t = SymTensor3(10.0, -4.0, -6.0, 3.0, 1.0, 2.0)
    avg = average_over_rotations(t, AxisFrame((0.0, 0.0, 1.0), 2))
    assert axial_parameters(avg, (0, 0, 1))[1] > 1.0


# ---------------------------------------------------------------- axial parameters


def test_axial_parameters_examples():
    assert axial_parameters(D_CALC, (0, 1, 0)) == (pytest.approx(1366.5), pytest.approx(762.5))
    D, E = axial_parameters(SymTensor3.diagonal(-300.0, -300.0, 600.0), (0, 0, 1))
    assert (D, E) == (pytest.approx(900.0), pytest.approx(0.0, abs=1e-12))


def test_axial_parameters_rejects_trace():
    with pytest.raises(UsageError):
        axial_parameters(SymTensor3.diagonal(1.0, 1.0, 1.0), (0, 0, 1))


# ---------------------------------------------------------------- isotropic part


@pytest.mark.parametrize(
    "t, iso, rest",
    [
        (SymTensor3.diagonal(273.0, 312.0, 339.0), 308.0, (-35.0, 4.0, 31.0)),
        (SymTensor3(), 0.0, (0.0, 0.0, 0.0)),
        (SymTensor3.diagonal(7.5, 7.5, 7.5), 7.5, (0.0, 0.0, 0.0)),
    ],
)
def test_remove_isotropic_examples(t, iso, rest):
    got_iso, part = remove_isotropic(t)
    assert got_iso == pytest.approx(iso)
    np.testing.assert_allclose((part.xx, part.yy, part.zz), rest, atol=1e-12)


@given(t=tensors)
def test_remove_isotropic_exact_trace(t):
    iso, part = remove_isotropic(t)
    assert part.xx + part.yy + part.zz == 0.0
    assert (part.xy, part.xz, part.yz) == (t.xy, t.xz, t.yz)


def test_sign_assignments_for_measured_magnitudes():
    options = traceless_sign_assignments(presets.D_MEASURED_MAGNITUDES)
    assert options == [(-142.0, -800.0, 941.0), (142.0, 800.0, -941.0)]
    with pytest.raises(UsageError):
        traceless_sign_assignments((1.0, 2.0))
