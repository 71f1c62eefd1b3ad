import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gl4whittaker.cosets import (
    CosetGeometry,
    annihilator_bruteforce,
    annihilator_family,
    check_gamma_system,
    gamma_system,
    grassmann_orbit_oracle,
    mobius_orbit_sizes,
)
from gl4whittaker.matrices import residue_class_key
from gl4whittaker.tower import TowerError
from gl4whittaker.verifier import workbench

XS = [(0, 0, 1, 0), (0, 1, 1, 0), (1, 2, 0, 1)]


@pytest.fixture(scope="module")
def wb5():
    return workbench(5, "eq")


def test_grassmannian_orbits(wb3_any, wb5):
    for wb in (wb3_any, wb5):
        q = wb.q
        o = grassmann_orbit_oracle(wb.tower)
        assert o.n_points == (q * q + 1) * (q * q + q + 1)
        # one orbit of F_{q^2}-lines, q free orbits
        assert sorted(o.orbit_sizes) == [q * q + 1] + [(q**4 - 1) // (q - 1)] * q
        assert set(o.omega_labels.tolist()) == set(range(q + 1))
        assert set(o.aw_labels.tolist()) <= set(o.omega_labels.tolist())


def test_mobius_orbits(wb3, wb5):
    for wb in (wb3, wb5):
        q = wb.q
        # F_{q^2} \ F_q is one orbit; the rest is q free PGL_2(F_q)-orbits
        assert sorted(mobius_orbit_sizes(wb.tower)) == [q * q - q] + [q * (q * q - 1)] * q


@pytest.mark.parametrize("x", XS)
def test_omega0_and_partition(wb3_any, wb5, x):
    for wb in (wb3_any, wb5):
        q = wb.q
        g = CosetGeometry(wb.element(x))
        omega0 = g.build_omega0()
        assert len(omega0) == q + 1
        o = grassmann_orbit_oracle(wb.tower)
        lab = g.c_partition()
        same_c = lab[:, None] == lab[None, :]
        same_g = o.omega_labels[:, None] == o.omega_labels[None, :]
        assert np.array_equal(same_c, same_g)


@pytest.mark.parametrize("x", XS)
def test_det_L_closed_form_everywhere(wb3_any, wb5, x):
    for wb in (wb3_any, wb5):
        g = CosetGeometry(wb.element(x))
        for d in g.omega():
            assert g.det_L_closed_form(d) == d.det_L


@pytest.mark.parametrize("x", XS)
def test_exactly_one_vanishing_coset(wb3, wb5, x):
    for wb in (wb3, wb5):
        omega0 = CosetGeometry(wb.element(x)).build_omega0()
        assert sum(not d.nonvanishing for d in omega0) == 1
        assert omega0[0].is_identity and omega0[0].nonvanishing


def test_frozen_omega0_q3(wb3):
    # (u, v, det L, calB type), frozen from the brute-force run
    expect = {
        (0, 0, 1, 0): [(0, 0, 1, "scalar"), (0, 1, 2, "split-ss"), (1, 1, 1, "nonsplit"), (1, 2, 0, None)],
        (0, 1, 1, 0): [(0, 0, 1, "nonsplit"), (0, 1, 0, None), (1, 1, 2, "split-ss"), (1, 2, 2, "split-nss")],
    }
    for x, rows in expect.items():
        got = [
            (d.u, d.v, d.det_L, d.calB_type if d.nonvanishing else None)
            for d in CosetGeometry(wb3.element(x)).build_omega0()
        ]
        assert got == rows


def test_calB_raises_when_vanishing(wb3):
    g = CosetGeometry(wb3.element((0, 0, 1, 0)))
    d = next(d for d in g.build_omega0() if not d.nonvanishing)
    with pytest.raises(TowerError):
        d.calB


@pytest.mark.parametrize("x", XS)
def test_calB_conjugacy_detects_same_coset(wb3_any, x):
    g = CosetGeometry(wb3_any.element(x))
    F = wb3_any.tower.F
    nv = [d for d in g.omega() if d.nonvanishing and not d.is_identity]
    for d in nv:
        for e in nv:
            same_B = residue_class_key(F, d.calB) == residue_class_key(F, e.calB)
            assert same_B == g.same_double_coset(d, e)


@given(st.data())
def test_c_relation_is_an_equivalence(wb3, data):
    x = data.draw(st.sampled_from(XS))
    g = CosetGeometry(wb3.element(x))
    M = g.c_relation_matrix()
    assert np.all(np.diag(M))
    assert np.array_equal(M, M.T)
    assert np.array_equal((M.astype(int) @ M.astype(int)) > 0, M)


@pytest.mark.parametrize("which,size3", [("Gamma", 6), ("Gamma0", 3), ("Gamma1", 3), ("Gamma2", 2)])
def test_gamma_systems(wb3_any, wb5, which, size3):
    r = check_gamma_system(which, wb3_any.tower)
    assert r["ok"] and r["size"] == size3
    assert check_gamma_system(which, wb5.tower)["ok"]


def test_gamma_system_sizes(wb5):
    q = 5
    sizes = {w: len(gamma_system(w, wb5.tower)) for w in ("Gamma", "Gamma0", "Gamma1", "Gamma2")}
    assert sizes == {"Gamma": q * (q - 1), "Gamma0": q, "Gamma1": q, "Gamma2": q - 1}


def test_unknown_gamma_system(wb3):
    with pytest.raises(ValueError):
        gamma_system("Gamma9", wb3.tower)


def test_trace_annihilator(wb3_any, wb5):
    for wb in (wb3_any, wb5):
        fam = annihilator_family(wb.tower)
        assert fam == annihilator_bruteforce(wb.tower)
        assert len(fam) == wb.q**2
