import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gl4whittaker.classfunctions import inner_product
from gl4whittaker.fields import make_field
from gl4whittaker.tower import RingFlavor, TowerError, TowerParams, find_tower_params
from gl4whittaker.verifier import (
    Workbench,
    flavor_signature,
    integer_multiplicities,
    mackey_multiplicities,
    predicted_B_classes,
    restriction_law,
    split_q,
    theta_Pi,
    verify,
    workbench,
)
from gl4whittaker.whittaker import SCHEMA_VERSION

XS = [(0, 0, 1, 0), (0, 1, 1, 0)]


@pytest.fixture(scope="module", params=XS)
def report(request):
    return verify(3, "eq", request.param, 2, sub_sum_samples=2).to_dict()


def test_split_q():
    assert split_q(3) == (3, 1) and split_q(9) == (3, 2) and split_q(25) == (5, 2)
    for bad in (2, 8, 15, 21):
        with pytest.raises(TowerError):
            split_q(bad)


def test_workbench_validation():
    with pytest.raises(TowerError):
        Workbench(9, "witt")
    p5 = find_tower_params(make_field(5))
    with pytest.raises(TowerError):
        Workbench(3, "eq", p5)
    p3 = find_tower_params(make_field(3))
    bad = TowerParams(p3.field, RingFlavor.EQUAL, 1, 0, 1)
    with pytest.raises(TowerError):
        Workbench(3, "eq", bad)


def test_report_schema(report):
    assert report["schema_version"] == SCHEMA_VERSION
    for key in ("params", "verdict", "main", "multiplicities", "structure", "checks", "timing", "signature"):
        assert key in report
    assert report["verdict"] and report["failed"] == []
    assert report["main"]["dimension"] == 54
    assert report["multiplicities"]["whittaker"] == report["multiplicities"]["induced"]
    for name, chk in report["checks"].items():
        assert set(chk) >= {"ok", "evidence"}, name


def test_structure(report):
    s = report["structure"]
    if report["params"]["x"][1] == 0:
        assert not s["block_irreducible"] and s["block_types"] == ["non-regular"]
    else:
        assert s["block_irreducible"] and s["block_types"] == ["nonsplit"]
    assert all(c["multiplicity"] == 1 and c["central_match"] for c in s["constituents"])
    assert s["mismatches"] == []


def test_predicted_classes(wb3):
    # X1 scalar: all non-scalar semisimple classes of the trace; else regular ones minus 2X1
    a = predicted_B_classes(wb3, wb3.element((0, 0, 1, 0)))
    b = predicted_B_classes(wb3, wb3.element((0, 1, 1, 0)))
    assert len(a) == 3 - 1
    assert len(b) == 3 - 1
    assert all(not k[2] for k in a | b)


@pytest.mark.parametrize("x", XS)
def test_restriction_law(wb3_any, x):
    th = wb3_any.theta(x, 3)
    r = restriction_law(wb3_any, th.x, theta_Pi(wb3_any, th))
    assert r["ok"] and r["sets_equal"] and r["annihilator_matches_bruteforce"]
    if x[1] != 0:
        assert r["mult_2X1"] == 1


@pytest.mark.parametrize("x", XS)
def test_mackey_matches_decomposition(wb3_any, x):
    th = wb3_any.theta(x, 1)
    m, _ = integer_multiplicities(wb3_any.chars, theta_Pi(wb3_any, th))
    mk = mackey_multiplicities(wb3_any, th)
    assert len(mk) == 54
    assert all(m[i] == n for i, n in mk.items())


def test_conjugated_embedding(wb3):
    th = wb3.theta(XS[1], 4)
    a = theta_Pi(wb3, th)
    b = theta_Pi(wb3, th, conjugator=((2, 1), (1, 1)))
    assert a.allclose(b)
    assert abs(a.degree - 54) < 1e-9


@settings(max_examples=8)
@given(st.sampled_from(XS), st.integers(0, 79))
def test_both_sides_multiplicity_free(x, c):
    wb = workbench(3, "eq")
    th = wb.theta(x, c)
    Pi = theta_Pi(wb, th)
    m, res = integer_multiplicities(wb.chars, Pi)
    assert res < 1e-6 and set(np.unique(m).tolist()) <= {0, 1}
    assert abs(inner_product(Pi, Pi) - m.sum()) < 1e-6


def test_flavor_signatures_agree():
    for x in XS:
        a = verify(3, "eq", x, 1, sub_sum_samples=0).to_dict()
        b = verify(3, "witt", x, 1, sub_sum_samples=0).to_dict()
        assert flavor_signature(a["structure"]) == flavor_signature(b["structure"])
        assert [p["dim"] for p in a["whittaker"]["pieces"]] == [p["dim"] for p in b["whittaker"]["pieces"]]
