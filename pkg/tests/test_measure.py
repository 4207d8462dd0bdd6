import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from circvoi.measure import (
    CostMatrix,
    DegenerateMeasureError,
    FiniteSpace,
    as_prob_vector,
    entropy,
    expected_cost,
    is_translation_invariant,
    load_cost_csv,
    marginals,
    mutual_information,
    normalize,
    partial_normalize_rows,
)
from circvoi.models import build_cost

from conftest import brute_mutual_information


def test_normalize_examples():
    np.testing.assert_array_equal(normalize([1, 1, 1, 1]), [0.25] * 4)
    np.testing.assert_array_equal(normalize([2, 0, 0, 0]), [1, 0, 0, 0])
    once = normalize([3, 1])
    np.testing.assert_array_equal(normalize(once), once)
    np.testing.assert_allclose(once, [0.75, 0.25])


def test_normalize_rejects_zero_mass():
    with pytest.raises(DegenerateMeasureError, match="degenerate measure"):
        normalize([0, 0, 0])


weights = arrays(float, st.integers(1, 12), elements=st.floats(0, 1e3, allow_nan=False)).filter(lambda v: v.sum() > 1e-6)


@given(weights, st.floats(1e-3, 1e3))
def test_normalize_idempotent_and_scale_invariant(v, c):
    p = normalize(v)
    assert abs(p.sum() - 1) < 1e-12
    np.testing.assert_allclose(normalize(p), p, atol=1e-15)
    np.testing.assert_allclose(normalize(c * v), p, atol=1e-14)
    np.testing.assert_allclose(normalize(-c * v), p, atol=1e-14)


def test_partial_normalize_rows():
    np.testing.assert_array_equal(partial_normalize_rows(np.eye(3)), np.eye(3))
    m = np.array([[2.0, 2.0], [1.0, 3.0]])
    np.testing.assert_allclose(partial_normalize_rows(m), [[0.5, 0.5], [0.25, 0.75]])
    np.testing.assert_allclose(partial_normalize_rows(m * np.array([[5.0], [7.0]])), [[0.5, 0.5], [0.25, 0.75]])


def test_partial_normalize_names_zero_row():
    with pytest.raises(DegenerateMeasureError, match="row 1"):
        partial_normalize_rows([[1, 2], [0, 0]])


def test_marginals():
    n = 5
    px, pu = marginals(np.full((n, n), 1 / n**2))
    np.testing.assert_allclose(px, 1 / n)
    np.testing.assert_allclose(pu, 1 / n)
    p = np.array([0.1, 0.2, 0.3, 0.4])
    px, pu = marginals(np.diag(p))
    np.testing.assert_array_equal(px, p)
    np.testing.assert_array_equal(pu, p)


def test_mutual_information_examples():
    assert mutual_information(np.outer([0.2, 0.8], [0.5, 0.3, 0.2])) == pytest.approx(0, abs=1e-15)
    assert mutual_information(np.eye(8) / 8, base="bits") == pytest.approx(3.0, abs=1e-14)


def test_entropy_examples():
    assert entropy([1, 0, 0]) == 0
    assert entropy(np.full(8, 1 / 8), base="bits") == pytest.approx(3.0, abs=1e-14)
    assert entropy([0.5, 0.25, 0.25], base="bits") == pytest.approx(1.5, abs=1e-14)
    assert entropy(np.full(6, 1 / 6)) == pytest.approx(math.log(6), abs=1e-14)


def test_expected_cost_examples():
    c = build_cost("circle-linear", 8)
    assert expected_cost(np.eye(8) / 8, c) == 0
    # mean of {0,1,1,2,2,3,3,4}
    assert expected_cost(np.full((8, 8), 1 / 64), c) == pytest.approx(2.0, abs=1e-14)
    for n in (4, 8, 10, 64):
        uc = build_cost("unit-circle-linear", n)
        assert expected_cost(np.full((n, n), 1 / n**2), uc) == pytest.approx(math.pi / 2, abs=1e-12)


def test_expected_cost_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        expected_cost(np.eye(3) / 3, np.zeros((4, 4)))


joints = arrays(float, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=st.floats(0, 1, allow_nan=False)).filter(
    lambda a: a.sum() > 1e-3
)


@settings(max_examples=200)
@given(joints)
def test_mutual_information_bounds(a):
    j = a / a.sum()
    info = mutual_information(j)
    px, pu = marginals(j)
    assert info >= 0
    assert info <= min(entropy(px), entropy(pu)) + 1e-12
    assert info == pytest.approx(brute_mutual_information(j.tolist()), abs=1e-12)


@given(arrays(float, 4, elements=st.floats(0.01, 1)), arrays(float, 5, elements=st.floats(0.01, 1)))
def test_product_measures_carry_no_information(a, b):
    assert mutual_information(np.outer(a / a.sum(), b / b.sum())) < 1e-12


@given(st.integers(0, 7), st.integers(1, 50))
def test_expected_cost_relabel_invariance(shift, seed):
    rng = np.random.default_rng(seed)
    c = build_cost("circle-linear", 8)
    j = rng.random((8, 8))
    j /= j.sum()
    rolled = np.roll(np.roll(j, shift, axis=0), shift, axis=1)
    assert expected_cost(rolled, c) == pytest.approx(expected_cost(j, c), abs=1e-12)


def test_translation_invariance_examples():
    assert is_translation_invariant(build_cost("circle-linear", 8))
    eye_cost = 1.0 - np.eye(6)
    assert is_translation_invariant(eye_cost)
    bumped = eye_cost.copy()
    bumped[2, 4] += 0.1
    assert not is_translation_invariant(bumped)
    assert not is_translation_invariant(bumped, geometry="line")
    toeplitz = np.subtract.outer(np.arange(4), np.arange(4)) ** 2.0
    assert is_translation_invariant(toeplitz, geometry="line")
    assert not is_translation_invariant(toeplitz, geometry="circle")


def test_finite_space():
    assert FiniteSpace(8, "circle_circumference_n").coordinates.tolist() == list(range(8))
    np.testing.assert_allclose(FiniteSpace(4, "unit_circle").coordinates, [0, math.pi / 2, math.pi, 3 * math.pi / 2])
    with pytest.raises(ValueError, match="even"):
        FiniteSpace(7, "unit_circle")
    with pytest.raises(ValueError):
        FiniteSpace(1, "one_way_line")


def test_prob_vector_must_be_normalized():
    with pytest.raises(ValueError, match="sum to 1"):
        as_prob_vector([0.5, 0.6])
    with pytest.raises(ValueError, match="nonnegative"):
        as_prob_vector([1.5, -0.5])


def test_cost_csv_roundtrip(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("3\n0,1,2\n1,0,1\n2,1,0\n1,2,1\n")
    cost, prior = load_cost_csv(path)
    assert isinstance(cost, CostMatrix)
    assert cost.entries[0, 2] == 2
    np.testing.assert_allclose(prior, [0.25, 0.5, 0.25])
    path.write_text("2\n0,1\n1,0\n")
    cost, prior = load_cost_csv(path)
    assert prior is None and cost.translation_invariant


def test_cost_csv_bad_shape(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("3\n0,1\n1,0\n")
    with pytest.raises(ValueError, match="row"):
        load_cost_csv(path)
