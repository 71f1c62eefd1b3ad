import numpy as np
import pytest

from gl4whittaker.matrices import BudgetError, MatrixRing, unkey2
from gl4whittaker.oracle import MackeyOracle, residue_parabolic, sample_central_classes
from gl4whittaker.verifier import workbench
from gl4whittaker.whittaker import WhittakerEngine


@pytest.fixture(scope="module")
def setup():
    wb = workbench(3, "eq")
    th = wb.theta((0, 1, 1, 0), 2)
    eng = WhittakerEngine(wb.classes, th)
    return wb, th, eng


def test_residue_parabolic(setup):
    wb = setup[0]
    gam, gam_inv = residue_parabolic(wb.tower)
    assert len(gam) == 48 * 48 * 81
    ops = MatrixRing(wb.tower)
    idx = np.arange(0, len(gam), 9973)
    prod = ops.matmul(gam[idx], gam_inv[idx])
    assert np.all(prod == np.eye(4, dtype=np.int64))
    assert np.all(gam[:, 2:, :2] == 0)


def test_delta_inverse(setup):
    wb, th, eng = setup
    for d in eng.omega0:
        o = MackeyOracle(th, d)
        assert np.all(o.ops.matmul(o.delta, o.delta_inv) == np.eye(4, dtype=np.int64))


def test_subgroup_orders(setup):
    wb, th, eng = setup
    orders = [MackeyOracle(th, d).subgroup_order // 3**12 for d in eng.omega0]
    assert orders == [8, 2, 2, 2]


def test_induced_dimension(setup):
    wb, th, eng = setup
    for d in eng.omega0:
        o = MackeyOracle(th, d)
        parabolic = 48 * 48 * 81 * 3**12
        assert np.isclose(o.induced_value(np.eye(4, dtype=np.int64)), parabolic / o.subgroup_order)


def test_numba_matches_numpy(setup):
    wb, th, eng = setup
    d = eng.omega0[2]
    o = MackeyOracle(th, d)
    rng = np.random.default_rng(1)
    g = wb.classes.elements[rng.integers(wb.classes.order)]
    X = rng.integers(0, 9, size=(2, 2))
    p = np.zeros((4, 4), dtype=np.int64)
    p[:2, :2] = p[2:, 2:] = g
    p[:2, 2:] = X
    assert np.isclose(o.induced_value(p), o.induced_value_numpy(p))


def test_sub_sums(setup):
    wb, th, eng = setup
    T = wb.tower
    ops, fops = MatrixRing(T), MatrixRing(T.F)
    rng = np.random.default_rng(7)
    el = wb.classes.elements
    for d in eng.omega0[2:]:
        o = MackeyOracle(th, d)
        R = el[rng.integers(len(el))]
        S = ops.add(ops.matmul(R, d.L), T.mul[T.q, el[rng.integers(len(el))]])
        assert np.isclose(o.x_sum(S, R), 81)
        bad = el[rng.integers(len(el))]
        if not np.array_equal(bad % 3, fops.matmul(R % 3, d.L)):
            assert abs(o.x_sum(bad, R)) < 1e-9
        A = np.array([[1, 2], [0, 1]])
        assert np.isclose(o.q_sum(S, R, A), 3**8)


def test_value_matches_closed_form_at_one_class(setup):
    wb, th, eng = setup
    d = eng.omega0[3]
    o = MackeyOracle(th, d)
    c = sample_central_classes(wb.classes, 2)[1]
    assert abs(o.value(wb.classes.reps[c]) - eng.character(d).values[c]) < 1e-6


def test_sample_central_classes(setup):
    wb = setup[0]
    cls = sample_central_classes(wb.classes, 4)
    assert len(cls) == 4 and len(set(cls)) == 4
    rb = wb.classes.reps[cls] % 3
    assert np.all(rb[:, 0, 1] == 0) and np.all(rb[:, 1, 0] == 0)


def test_budget():
    wb = workbench(5, "eq")
    th = wb.theta((0, 1, 1, 0), 1)
    eng = WhittakerEngine(wb.classes, th)
    with pytest.raises(BudgetError):
        MackeyOracle(th, eng.omega0[0])


def test_pruned_residues_contribute_nothing(setup):
    wb, th, eng = setup
    o = MackeyOracle(th, eng.omega0[1])
    rng = np.random.default_rng(3)
    g = wb.classes.elements[rng.integers(wb.classes.order)]
    kept = set(o._possible_residues(g).tolist())
    dropped = [k for k in range(81) if k not in kept]
    assert dropped
    for rk in rng.choice(dropped, size=4, replace=False):
        X = unkey2(int(rk), 3) + 3 * unkey2(rng.integers(81, size=6), 3)
        p = np.zeros((6, 4, 4), dtype=np.int64)
        p[:, :2, :2] = p[:, 2:, 2:] = g
        p[:, :2, 2:] = X
        assert np.allclose(o.induced_values(p), 0)
