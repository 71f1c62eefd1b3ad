import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gl4whittaker.fields import make_field
from gl4whittaker.tower import (
    Level,
    RingFlavor,
    TowerError,
    TowerParams,
    check_tower_invariants,
    find_tower_params,
    o2_unit_characters,
    psi0,
    rel_trace,
    teichmuller,
    tower_arith,
)

CASES = [(3, 1, "eq"), (3, 1, "witt"), (5, 1, "eq"), (5, 1, "witt"), (3, 2, "eq")]


@pytest.fixture(scope="module", params=CASES, ids=lambda c: f"q={c[0]**c[1]}-{c[2]}")
def T(request):
    p, f, fl = request.param
    return tower_arith(find_tower_params(make_field(p, f), RingFlavor(fl)))


def test_default_parameters():
    P3 = find_tower_params(make_field(3))
    P5 = find_tower_params(make_field(5))
    assert (P3.alpha, P3.a, P3.b) == (2, 1, 1)
    assert (P5.alpha, P5.a, P5.b) == (2, 0, 1)
    assert tower_arith(P3).norm == 2 and tower_arith(P5).norm == 3


def test_invariants_hold(T):
    assert all(check_tower_invariants(T.params).values())


def test_params_json_roundtrip(T):
    assert TowerParams.from_json(T.params.to_json()) == T.params


def test_uniformizer_squares_to_zero(T):
    w = T.uniformizer
    assert T.mul[w, w] == 0
    assert T.mul[w, 1] == w


def test_flavours_differ_in_characteristic(T):
    # p * 1 is 0 in F_q[w]/w^2 and a uniformizer multiple in W_2(F_q)
    s = 0
    for _ in range(T.p):
        s = int(T.add[s, 1])
    assert (s == 0) == (T.flavor is RingFlavor.EQUAL)
    if T.flavor is RingFlavor.MIXED:
        assert s % T.q == 0 and s != 0


def test_reduction_is_ring_map(T):
    a, b = np.meshgrid(np.arange(T.Q), np.arange(T.Q))
    q = T.q
    assert np.all(T.mul[a, b] % q == T.F.mul[a % q, b % q])
    assert np.all(T.add[a, b] % q == T.F.add[a % q, b % q])


@given(st.data())
def test_o2_ring_axioms(T, data):
    e = st.integers(0, T.Q - 1)
    a, b, c = data.draw(e), data.draw(e), data.draw(e)
    m, s = T.mul, T.add
    assert m[a, s[b, c]] == s[m[a, b], m[a, c]]
    assert m[m[a, b], c] == m[a, m[b, c]]
    assert s[s[a, b], c] == s[a, s[b, c]]
    assert m[a, b] == m[b, a]
    assert s[a, T.neg[a]] == 0


def test_units_and_inverses(T):
    u = np.nonzero(np.arange(T.Q) % T.q)[0]
    assert len(u) == T.q * (T.q - 1)
    assert np.all(T.mul[u, T.inv[u]] == 1)


def test_psi0_is_a_character_nontrivial_on_the_ideal(T):
    v = T.psi0_values()
    a, b = np.meshgrid(np.arange(T.Q), np.arange(T.Q))
    assert np.allclose(v[T.add[a, b]], v[a] * v[b])
    ideal = T.q * np.arange(T.q)
    assert not np.allclose(v[ideal], 1)
    x = T.from_o2(Level.O2, 5 % T.Q)
    assert np.isclose(psi0(x), v[5 % T.Q])


@given(st.data())
def test_quartic_multiplication(T, data):
    c = st.lists(st.integers(0, T.Q - 1), min_size=4, max_size=4)
    x, y, z = (T.elem(Level.O2QUARTIC, data.draw(c)) for _ in range(3))
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x


def test_beta_squares_into_quadratic_level(T):
    b = T.beta()
    assert b * b == T.beta_sq(Level.O2QUARTIC)


@given(st.data())
def test_inverse_and_teichmuller(T, data):
    c = data.draw(st.lists(st.integers(0, T.Q - 1), min_size=2, max_size=2))
    x = T.elem(Level.O2QUAD, c)
    if not x.is_unit():
        with pytest.raises(TowerError):
            x.inverse()
        return
    assert x * x.inverse() == T.one(Level.O2QUAD)
    t = teichmuller(x)
    assert t.reduce() == x.reduce()
    assert t ** (T.q**2 - 1) == T.one(Level.O2QUAD)


@given(st.data())
def test_relative_traces_compose(T, data):
    c = data.draw(st.lists(st.integers(0, T.Q - 1), min_size=4, max_size=4))
    x = T.elem(Level.O2QUARTIC, c)
    direct = rel_trace(x, Level.O2QUARTIC, Level.O2)
    via = rel_trace(rel_trace(x, Level.O2QUARTIC, Level.O2QUAD), Level.O2QUAD, Level.O2)
    assert direct == via


def test_unit_characters_orthonormal(T):
    labels, rows = o2_unit_characters(T)
    n = T.q * (T.q - 1)
    assert len(labels) == n
    g = rows @ rows.conj().T / n
    assert np.allclose(g, np.eye(n))


def test_elem_validation(T):
    with pytest.raises(TowerError):
        T.elem(Level.O2QUAD, (0, 0, 0))
    with pytest.raises(TowerError):
        T.elem(Level.O2, (T.Q,))
