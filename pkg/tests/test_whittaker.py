import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gl4whittaker.classfunctions import decompose
from gl4whittaker.matrices import MatrixRing, embed_quartic, residue_class_type
from gl4whittaker.tower import Level, TowerError
from gl4whittaker.whittaker import SCHEMA_VERSION, WhittakerEngine, build_theta

XS = [(0, 0, 1, 0), (0, 1, 1, 0), (1, 2, 0, 1)]
# per-coset dimensions in build_omega0 order, frozen from the count-based oracle
DIMS = {(0, 0, 1, 0): [6, 24, 24, 0], (0, 1, 1, 0): [6, 0, 24, 24], (1, 2, 0, 1): [6, 0, 24, 24]}


@pytest.fixture(scope="module", params=[("eq", x) for x in XS] + [("witt", XS[0]), ("witt", XS[1])])
def engine(request):
    from gl4whittaker.verifier import workbench

    wb = workbench(3, request.param[0])
    return WhittakerEngine(wb.classes, wb.theta(request.param[1], 2))


def _unit(T, rng, level=Level.O2QUARTIC):
    while True:
        x = T.elem(level, rng.integers(0, T.Q, size=int(level)))
        if x.is_unit():
            return x


def _kernel(T, rng):
    A = rng.integers(0, T.q, size=(4, 4))
    return A, np.eye(4, dtype=np.int64) + T.mul[T.q, A]


def _t_element(T, rng):
    """Random element of O2quartic^x K1 as a 4x4 matrix."""
    return MatrixRing(T).matmul(embed_quartic(_unit(T, rng)), _kernel(T, rng)[1])


seeds = st.integers(0, 2**32 - 1)
thetas = st.tuples(st.sampled_from(XS), st.integers(0, 79))


@given(thetas, seeds)
def test_theta_is_multiplicative(wb3_any, xc, seed):
    T, rng = wb3_any.tower, np.random.default_rng(seed)
    th = wb3_any.theta(*xc)
    x, y = _unit(T, rng), _unit(T, rng)
    assert np.isclose(th.value(x * y), th.value(x) * th.value(y))


@given(thetas, seeds)
def test_phi_tilde_is_a_character_of_T(wb3_any, xc, seed):
    T, rng = wb3_any.tower, np.random.default_rng(seed)
    th = wb3_any.theta(*xc)
    g, h = _t_element(T, rng), _t_element(T, rng)
    gh = MatrixRing(T).matmul(g, h)
    assert np.isclose(th.phi_tilde(gh), th.phi_tilde(g) * th.phi_tilde(h))


@given(thetas, seeds)
def test_phi_tilde_extends_theta_and_phi_x(wb3_any, xc, seed):
    T, rng = wb3_any.tower, np.random.default_rng(seed)
    th = wb3_any.theta(*xc)
    u = _unit(T, rng)
    assert np.isclose(th.phi_tilde(embed_quartic(u)), th.value(u))
    A, k = _kernel(T, rng)
    F = T.F
    tr = MatrixRing(F).trace(MatrixRing(F).matmul(th.x.matrix, A))
    assert np.isclose(th.phi_tilde(k), np.exp(2j * np.pi * F.trace[tr] / T.p))


def test_phi_tilde_outside_T(wb3):
    th = wb3.theta(XS[0], 1)
    g = np.eye(4, dtype=np.int64)
    g[0, 1] = 1
    with pytest.raises(TowerError):
        th.phi_tilde(g)
    assert th.phi_tilde(g, outside=0.0) == 0


def test_theta_rejects_non_units(wb3):
    th = wb3.theta(XS[0], 1)
    with pytest.raises(TowerError):
        th.values(np.array([3, 0, 0, 0]))


def test_build_theta_type_check():
    with pytest.raises(TowerError):
        build_theta((0, 0, 1, 0), 1)


def test_dimensions(engine):
    dims = [engine.dim_pi_delta(d) for d in engine.omega0]
    assert dims == DIMS[engine.theta.x.coords]
    assert [engine.dim_by_count(d) for d in engine.omega0] == dims
    assert sum(dims) == 54


def test_pieces_are_characters(engine):
    from gl4whittaker.verifier import workbench

    wb = workbench(3, engine.tower.flavor.value)
    for d in engine.omega0:
        m = decompose(engine.character(d), wb.chars.values)
        assert m @ np.array([r.dim for r in wb.chars.rows]) == engine.dim_pi_delta(d)


def test_j1_restriction_is_one_orbit(engine):
    q = 3
    F = engine.tower.F
    for d in engine.omega0:
        if not d.nonvanishing:
            with pytest.raises(TowerError):
                engine.j1_values(d)
            continue
        m = engine.fourier.multiplicities(engine.character(d))
        B = engine.calB(d)
        orbit = set(engine.G.conj_class(B).tolist())
        assert set(np.nonzero(m)[0].tolist()) == orbit
        kind = residue_class_type(F, B)
        expect = {"split-ss": 2, "nonsplit": 4, "split-nss": 3}
        if d.is_identity:
            want = 6 if engine.theta.x.X1_scalar else 1
        else:
            want = expect[kind]
        assert set(m[list(orbit)].tolist()) == {want}


def test_identity_piece_case_formulas(engine):
    assert engine.identity_piece().allclose(engine.identity_piece_by_cases())


def test_central_character(engine):
    T = engine.tower
    total = engine.assemble().total
    z = 2 if T.flavor.value == "eq" else 4
    zI = np.eye(2, dtype=np.int64) * z
    assert np.isclose(total.at(zI[None])[0], engine.omega[z] * 54)


def test_report_dict(engine):
    rep = engine.assemble()
    d = rep.to_dict()
    assert d["schema_version"] == SCHEMA_VERSION
    assert d["dimension"] == 54 == rep.dimension
    assert [p["dim"] for p in d["pieces"]] == DIMS[engine.theta.x.coords]
    assert sum(p["calB"] is None for p in d["pieces"]) == 1
