import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gl4whittaker.fields import FieldError, field_arith, is_irreducible, make_field

FIELDS = [(3, 1), (5, 1), (7, 1), (3, 2)]


@pytest.fixture(scope="module", params=FIELDS, ids=lambda pf: f"q={pf[0]**pf[1]}")
def F(request):
    return field_arith(make_field(*request.param))


def test_modulus_irreducible(F):
    assert is_irreducible(list(F.params.modulus), F.p) or F.f == 1


def test_generator_has_full_order(F):
    assert len(set(F.exp.tolist())) == F.q - 1
    assert F.log[F.exp].tolist() == list(range(F.q - 1))


def test_inverse_table(F):
    x = np.arange(1, F.q)
    assert np.all(F.mul[x, F.inv[x]] == 1)


def test_squares_are_half(F):
    assert F.is_square[1:].sum() == (F.q - 1) // 2
    sq = np.nonzero(F.is_square)[0]
    assert np.all(F.mul[F.sqrt[sq], F.sqrt[sq]] == sq)


def test_trace_is_additive(F):
    a, b = np.meshgrid(np.arange(F.q), np.arange(F.q))
    assert np.all(F.trace[F.add[a, b]] == (F.trace[a] + F.trace[b]) % F.p)


def test_frobenius_is_ring_map(F):
    frob = np.array([F.pow(x, F.p) for x in range(F.q)])
    a, b = np.meshgrid(np.arange(F.q), np.arange(F.q))
    assert np.all(frob[F.mul[a, b]] == F.mul[frob[a], frob[b]])
    assert np.all(frob[F.add[a, b]] == F.add[frob[a], frob[b]])


@given(st.data())
def test_field_axioms(F, data):
    e = st.integers(0, F.q - 1)
    a, b, c = data.draw(e), data.draw(e), data.draw(e)
    m, s = F.mul, F.add
    assert m[a, s[b, c]] == s[m[a, b], m[a, c]]
    assert m[m[a, b], c] == m[a, m[b, c]]
    assert s[a, F.neg[a]] == 0
    assert F.sub[a, b] == s[a, F.neg[b]]


def test_rejects_non_prime():
    with pytest.raises(FieldError):
        make_field(9, 1)
