import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gl4whittaker.matrices import (
    BudgetError,
    GL2Fq,
    MatrixRing,
    RegularEllipticElement,
    brute_force_inertia,
    center,
    charpoly_irreducible,
    embed_quartic,
    enumerate_classes,
    gl2_order,
    inertia_group,
    key2,
    quad_units,
    residue_class_key,
    residue_class_type,
    unkey2,
)
from gl4whittaker.tower import Level, TowerError


def _random_gl2(table, data, n=1):
    idx = data.draw(st.lists(st.integers(0, table.order - 1), min_size=n, max_size=n))
    return table.elements[idx]


def test_class_count_and_sizes(wb3_any):
    t = wb3_any.classes
    assert t.order == gl2_order(3) == 81 * 8 * 6
    assert t.n_classes == 78  # frozen from the exhaustive enumeration
    assert t.sizes.sum() == t.order
    assert np.all(t.order % t.sizes == 0)


def test_representatives_are_minimal_keys(wb3):
    t = wb3.classes
    cls = t.element_classes
    for c in range(t.n_classes):
        assert t.element_keys[cls == c].min() == t.rep_keys[c]


@given(st.data())
def test_class_of_is_conjugation_invariant(wb3_any, data):
    t = wb3_any.classes
    g, h = _random_gl2(t, data, 2)
    ops = t.ops
    conj = ops.matmul(ops.matmul(h, g), ops.inv2(h))
    assert t.classes_of(conj) == t.classes_of(g)


@given(st.data())
def test_matrix_ring_group_laws(wb3_any, data):
    t = wb3_any.classes
    a, b, c = _random_gl2(t, data, 3)
    ops = t.ops
    assert np.array_equal(ops.matmul(ops.matmul(a, b), c), ops.matmul(a, ops.matmul(b, c)))
    assert np.array_equal(ops.matmul(a, ops.inv2(a)), np.eye(2, dtype=np.int64))
    assert np.array_equal(ops.inv(a), ops.inv2(a))
    T = wb3_any.tower
    assert ops.det2(ops.matmul(a, b)) == T.mul[ops.det2(a), ops.det2(b)]


def test_key_roundtrip():
    k = np.arange(6561)
    assert np.array_equal(key2(unkey2(k, 9), 9), k)


def test_class_budget(wb3):
    with pytest.raises(BudgetError):
        enumerate_classes(wb3.tower, max_q=2)


def test_residue_class_types():
    from gl4whittaker.fields import field_arith, make_field

    F = field_arith(make_field(3))
    G = GL2Fq(F)
    kinds = [residue_class_type(F, B) for B in G.all_matrices]
    # M_2(F_3) by type: scalars, nilpotent-shifted, split semisimple, elliptic
    assert kinds.count("scalar") == 3
    assert kinds.count("split-nss") == 3 * 8
    assert kinds.count("split-ss") == 3 * 12
    assert kinds.count("nonsplit") == 3 * 6
    assert len({residue_class_key(F, B) for B in G.all_matrices}) == 3 + 3 + 3 + 3


@pytest.mark.parametrize("coords", [(0, 0, 1, 0), (0, 1, 1, 0), (1, 2, 0, 1)])
def test_regular_elliptic_blocks(wb3, coords):
    x = RegularEllipticElement(wb3.tower, coords)
    assert charpoly_irreducible(wb3.tower, x.matrix)
    assert np.array_equal(x.matrix[2:, 2:], x.X1)
    assert x.X1_scalar == (coords[1] == 0)


def test_quadratic_x_rejected(wb3):
    with pytest.raises(TowerError):
        RegularEllipticElement(wb3.tower, (1, 1, 0, 0))


@given(st.data())
def test_quartic_embedding_is_multiplicative(wb3_any, data):
    T = wb3_any.tower
    c = st.lists(st.integers(0, T.Q - 1), min_size=4, max_size=4)
    x, y = (T.elem(Level.O2QUARTIC, data.draw(c)) for _ in range(2))
    ops = MatrixRing(T)
    assert np.array_equal(embed_quartic(x * y), ops.matmul(embed_quartic(x), embed_quartic(y)))


def test_quad_units_form_a_group(wb3_any):
    T = wb3_any.tower
    H = quad_units(T)
    assert len(H) == (T.q**2 - 1) * T.q**2
    keys = set(key2(H, T.Q).tolist())
    ops = MatrixRing(T)
    prod = ops.matmul(H[::7][:, None], H[::5][None])
    assert set(key2(prod, T.Q).ravel().tolist()) <= keys
    assert set(key2(center(T), T.Q).tolist()) <= keys


@pytest.mark.parametrize("B", [[[0, 1], [2, 0]], [[1, 0], [0, 2]], [[1, 1], [0, 1]]])
def test_inertia_matches_brute_force(wb3, B):
    T = wb3.tower
    B = np.array(B)
    I = inertia_group(T, B)
    brute = brute_force_inertia(T, B)
    assert set(key2(I % T.q, T.q).tolist()) == set(key2(brute, T.q).tolist())
    assert len(I) == len(brute) * T.q**4


def test_scalar_has_no_inertia_group(wb3):
    with pytest.raises(TowerError):
        inertia_group(wb3.tower, np.eye(2, dtype=np.int64))
