import numpy as np
import pytest

from gl4whittaker.fields import make_field
from gl4whittaker.gl2fq import gl2_irreps, gl2_table, validate_gl2_table
from gl4whittaker.tower import find_tower_params, tower_arith


@pytest.fixture(scope="module", params=[(3, 1), (5, 1), (7, 1), (3, 2)], ids=lambda pf: f"q={pf[0]**pf[1]}")
def T(request):
    return tower_arith(find_tower_params(make_field(*request.param)))


def test_table_is_orthonormal_and_complete(T):
    r = validate_gl2_table(T)
    q = T.q
    assert r["orthonormal"] and r["dims_match_identity"]
    assert r["sum_dim_sq"] == r["group_order"] == (q * q - 1) * (q * q - q)
    assert r["n_irreps"] == q * q - 1


def test_family_sizes(T):
    q = T.q
    kinds = [r.kind for r in gl2_irreps(q)]
    assert kinds.count("det") == kinds.count("steinberg") == q - 1
    assert kinds.count("principal") == (q - 1) * (q - 2) // 2
    assert kinds.count("cuspidal") == q * (q - 1) // 2


def test_class_functions(T):
    irreps, vals, G = gl2_table(T)
    ops = G.ops
    g = G.elements[:: max(1, G.order // 40)]
    h = G.elements[7]
    conj = ops.matmul(ops.matmul(h, g), ops.inv2(h))
    assert np.allclose(vals[:, G.index_of(g)], vals[:, G.index_of(conj)])
