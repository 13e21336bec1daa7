import numpy as np
import pytest
from hypothesis import given, strategies as st

from llbm.errors import DegenerateBodyError, InputError, UnsupportedInstanceError
from llbm.geometry import (
    ClosedForm,
    LinearMap,
    Segment,
    SupportDifference,
    Zonotope,
    check_even,
    frame_for,
    linear_image,
    minkowski_diff_summand,
    minkowski_sum,
    project,
    restrict_function,
    support,
)
from llbm.sweep import random_segment, random_zonotope

from conftest import dims, rng_for, seeds


def unit_vectors(rng, k, n):
    U = rng.standard_normal((k, n))
    return U / np.linalg.norm(U, axis=1, keepdims=True)


def test_cube_support_is_l1_norm():
    C = Zonotope.cube(3)
    assert support(C, [1.0, -2.0, 0.5]) == pytest.approx(3.5)
    assert C.num_generators == 3


def test_segment_basics():
    I = Segment([3.0, -4.0])
    assert I.length == pytest.approx(10.0)
    assert I.support(np.array([0.0, 1.0])) == pytest.approx(4.0)
    with pytest.raises(InputError):
        Segment([0.0, 0.0])


def test_zero_direction_rejected():
    with pytest.raises(InputError):
        support(Zonotope.cube(2), [0.0, 0.0])


def test_canonical_form_merges_parallel_and_opposite_generators():
    Z = Zonotope([[1.0, 1.0], [-2.0, -2.0], [0.0, 1.0], [0.0, 0.0]])
    assert Z.num_generators == 2
    assert Z == Zonotope([[3.0, 3.0], [0.0, -1.0]])


@given(seeds, dims)
def test_support_is_even_and_sublinear(seed, n):
    rng = rng_for(seed, n)
    Z = random_zonotope(rng, n, n + 2)
    U, V = unit_vectors(rng, 16, n), unit_vectors(rng, 16, n)
    h = Z.support
    assert np.allclose(h(U), h(-U))
    assert np.all(h(U + V) <= h(U) + h(V) + 1e-12)


@given(seeds, dims)
def test_minkowski_sum_adds_support(seed, n):
    rng = rng_for(seed, n)
    A, B = random_zonotope(rng, n, 3, full=False), random_zonotope(rng, n, 2, full=False)
    U = unit_vectors(rng, 20, n)
    assert np.allclose(minkowski_sum(A, B).support(U), A.support(U) + B.support(U), rtol=1e-13)


@given(seeds, dims, st.floats(min_value=0.0, max_value=1.0))
def test_diff_summand_support_identity(seed, n, t):
    rng = rng_for(seed, n)
    K0 = random_zonotope(rng, n, n + 1)
    I = random_segment(rng, n)
    K = minkowski_sum(K0, I)
    U = unit_vectors(rng, 20, n)
    Kt = minkowski_diff_summand(K, I, t)
    assert np.allclose(Kt.support(U), K0.support(U) + t * I.support(U), rtol=1e-11, atol=1e-12)


def test_diff_summand_rejects_non_summands():
    C = Zonotope.cube(2)
    with pytest.raises(UnsupportedInstanceError):
        minkowski_diff_summand(C, Segment([1.0, 1.0]), 0.5)
    with pytest.raises(UnsupportedInstanceError):
        minkowski_diff_summand(C, Segment([2.0, 0.0]), 0.0)
    with pytest.raises(InputError):
        minkowski_diff_summand(C, Segment([1.0, 0.0]), 1.5)


def test_diff_summand_removes_whole_generator():
    C = Zonotope.cube(3)
    assert minkowski_diff_summand(C, Segment([0.0, 0.0, 1.0]), 0.0).num_generators == 2


@given(seeds, dims)
def test_projection_support_is_restriction(seed, n):
    rng = rng_for(seed, n)
    Z = random_zonotope(rng, n, n + 2)
    I = random_segment(rng, n)
    P, frame = project(Z, I)
    assert P.dim == n - 1
    V = unit_vectors(rng, 10, n - 1)
    assert np.allclose(P.support(V), Z.support(frame.lift(V)), rtol=1e-12)
    f = SupportDifference(Z, Zonotope.cube(n))
    fr = restrict_function(f, frame)
    assert np.allclose(fr(V), f(frame.lift(V)), rtol=1e-12, atol=1e-12)


def test_frame_is_orthonormal_and_perpendicular():
    frame = frame_for(Segment([1.0, 2.0, 2.0]))
    B = frame.basis
    assert np.allclose(B @ B.T, np.eye(2), atol=1e-14)
    assert np.allclose(B @ frame.normal, 0.0, atol=1e-14)


def test_projection_along_generator_drops_it():
    P, _ = project(Zonotope.cube(3), Segment([0.0, 0.0, 1.0]))
    assert P.num_generators == 2 and P.full_dimensional


def test_linear_image_support_rule():
    rng = np.random.default_rng(4)
    Z = random_zonotope(rng, 3, 5)
    A = LinearMap(rng.uniform(-1, 1, (3, 3)) + 2 * np.eye(3))
    U = unit_vectors(rng, 10, 3)
    assert np.allclose(linear_image(Z, A).support(U), Z.support(U @ A.matrix), rtol=1e-12)
    with pytest.raises(InputError):
        LinearMap(np.zeros((2, 2))).require_invertible()


def test_full_dimensional_flag():
    assert not Zonotope([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]).full_dimensional
    with pytest.raises(DegenerateBodyError):
        Zonotope([[1.0, 0.0]]).require_full_dimensional()


def test_check_even():
    check_even(SupportDifference(Zonotope.cube(2)))
    with pytest.raises(InputError):
        check_even(ClosedForm(lambda U: U[:, 0], 2, check=False))


def test_dimension_mismatch_rejected():
    with pytest.raises(InputError):
        minkowski_sum(Zonotope.cube(2), Zonotope.cube(3))
