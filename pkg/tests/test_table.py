import numpy as np
import pytest

from gl4whittaker.matrices import brute_force_inertia, key2
from gl4whittaker.table import CENTRALIZER_ORDER, EXPECTED_COUNT, EXPECTED_DIM, REGULAR_TYPES, regular_family


def test_completeness(wb3_any):
    info = wb3_any.chars.completeness()
    q = 3
    assert info["complete"]
    assert info["sum_dim_sq"] == q**4 * (q * q - 1) * (q * q - q)
    assert info["gram_error"] < 1e-6
    assert info["n_rows"] == info["n_classes"] == 78


def test_table1(wb3_any):
    chars, q = wb3_any.chars, 3
    assert chars.table1_counts() == {t: [EXPECTED_COUNT[t](q)] for t in REGULAR_TYPES}
    assert chars.table1_dims() == {t: [EXPECTED_DIM[t](q)] for t in REGULAR_TYPES}
    assert chars.table1_dims() == {"nonsplit": [6], "split-nss": [8], "split-ss": [12]}


def test_row_counts(wb3):
    assert len(wb3.chars.families) == 3 + 3 + 3
    s = wb3.chars.summary()
    assert s["n_regular_rows"] == 54 and s["n_inflated_rows"] == 24


def test_rows_have_single_orbit_types(wb3):
    chars = wb3.chars
    for i, r in enumerate(chars.rows):
        assert chars.type_of(i) == r.type


def test_central_characters_are_consistent(wb3):
    chars = wb3.chars
    from gl4whittaker.table import central_classes

    zc = central_classes(wb3.classes)
    units = np.nonzero(zc >= 0)[0]
    for i, r in enumerate(chars.rows):
        omega = chars.values[i][zc[units]] / r.dim
        assert np.allclose(omega, chars.unit_values[r.central][units])


@pytest.mark.parametrize("i", range(3))
def test_regular_family_inertia(wb3, i):
    fam = wb3.chars.families[i]
    q = 3
    assert fam.inertia_order == CENTRALIZER_ORDER[fam.type](q) * q**4
    brute = brute_force_inertia(wb3.tower, fam.B)
    assert len(brute) == CENTRALIZER_ORDER[fam.type](q)


def test_regular_family_extension_counts(wb3):
    # phi_B has |I / J1| = |centralizer of B| extensions, each inducing a distinct row
    q = 3
    for fam in wb3.chars.families:
        n_rows = sum(
            1 for r in wb3.chars.rows if r.kind == "regular" and r.provenance["B_key"] == int(key2(fam.B, q))
        )
        assert n_rows == len(fam.extensions)
        assert n_rows == CENTRALIZER_ORDER[fam.type](q)


def test_csv_export(wb3, tmp_path):
    out = tmp_path / "t.csv"
    wb3.chars.to_csv(out)
    lines = out.read_text().splitlines()
    assert lines[0].startswith("row,kind,type,dim")
    assert len(lines) == 1 + 78 * 78
