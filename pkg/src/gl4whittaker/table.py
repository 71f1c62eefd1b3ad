"""The irreducible character table of GL_2(o2).

Regular characters come from Clifford theory: for a regular residue matrix B
the character phi_B of J1 extends to its stabilizer o2[B^]^x J1 and induces
irreducibly.  The remaining characters are inflations from GL_2(F_q) twisted
by characters of o2^x composed with the determinant.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .classfunctions import TOL, ClassFunction, KernelFourier, NumericError, gram, induce_from_classes, to_integer
from .gl2fq import gl2_character_values, gl2_irreps
from .matrices import (
    ClassTable,
    GL2Fq,
    MatrixRing,
    center,
    congruence_kernel,
    gl2_order,
    key2,
    quad_matrix,
    residue_class_key,
    residue_class_type,
    unkey2,
)
from .tower import Tower, TowerError, o2_unit_characters

REGULAR_TYPES = ("nonsplit", "split-nss", "split-ss")
EXPECTED_DIM = {
    "nonsplit": lambda q: q * (q - 1),
    "split-nss": lambda q: q * q - 1,
    "split-ss": lambda q: q * (q + 1),
}
EXPECTED_COUNT = {"nonsplit": lambda q: q + 1, "split-nss": lambda q: q, "split-ss": lambda q: q - 1}
CENTRALIZER_ORDER = {"nonsplit": lambda q: q * q - 1, "split-nss": lambda q: q * (q - 1), "split-ss": lambda q: (q - 1) ** 2}


class IncompleteTableError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# regular matrices


def regular_class_reps(tower: Tower) -> list[np.ndarray]:
    """One regular residue matrix per conjugacy class.

    Split semisimple: diag(l, m) with l < m.  Split non-semisimple: [[l, 1], [0, l]].
    Non-split: the smaller-keyed of the two conjugates inside the embedded F_{q^2}.
    """
    F, q = tower.F, tower.q
    reps = []
    for l in range(q):
        for m in range(l + 1, q):
            reps.append(np.array([[l, 0], [0, m]], dtype=np.int64))
    for l in range(q):
        reps.append(np.array([[l, 1], [0, l]], dtype=np.int64))
    c = tower.res2.coords
    quad = quad_matrix(F, tower.params.a, tower.norm, c[:, 0], c[:, 1])
    best: dict[tuple, np.ndarray] = {}
    for X, (b0, b1) in zip(quad, c):
        if b1 == 0:
            continue
        k = residue_class_key(F, X)
        if k not in best or key2(X, q) < key2(best[k], q):
            best[k] = X
    reps += [best[k] for k in sorted(best)]
    return reps


def phi_B_phase(tower: Tower, B, digits) -> np.ndarray:
    """Phase (in units of 1/p) of phi_B on I + w M for residue matrices M."""
    F = tower.F
    ops = MatrixRing(F)
    return F.trace[ops.trace(ops.matmul(np.asarray(B), digits))]


def unit_algebra(tower: Tower, B) -> np.ndarray:
    """o2[B^]^x as 2x2 matrices x I + y B^ over o2 (constant lift B^ of B)."""
    T = tower
    Q = T.Q
    ops = MatrixRing(T)
    x, y = np.meshgrid(np.arange(Q), np.arange(Q), indexing="ij")
    x, y = x.reshape(-1), y.reshape(-1)
    Bh = np.asarray(B, dtype=np.int64)
    M = ops.add(_scalar(T, x), T.mul[y[:, None, None], Bh[None]])
    det = ops.det2(M)
    return M[T.inv[det] >= 0]


def _scalar(T: Tower, x) -> np.ndarray:
    x = np.asarray(x)
    out = np.zeros(x.shape + (2, 2), dtype=np.int64)
    out[..., 0, 0] = x
    out[..., 1, 1] = x
    return out


def extend_characters(tower: Tower, group, sub_keys, sub_phase) -> list[dict[int, Fraction]]:
    """All extensions of a character of a subgroup to a finite abelian group.

    ``group`` is a stack of 2x2 matrices over o2; ``sub_phase`` maps subgroup
    keys to exact phases in Q/Z.  The group is grown one cyclic step at a time:
    if k is minimal with g^k in H, the extension to H<g> is fixed by a phase w
    with k w = phi(g^k), giving k choices.
    """
    ops = MatrixRing(tower)
    Q = tower.Q
    gkeys = key2(group, Q)
    by_key = {int(k): m for k, m in zip(gkeys, group)}
    H = sorted(int(k) for k in sub_keys)
    H_mats = np.array([by_key[k] for k in H])
    branches = [dict(sub_phase)]
    while len(H) < len(by_key):
        Hset = set(H)
        g = next(int(k) for k in sorted(by_key) if int(k) not in Hset)
        gm = by_key[g]
        powers = [np.eye(2, dtype=np.int64)]
        cur = gm
        k = 1
        while int(key2(cur, Q)) not in Hset:
            powers.append(cur)
            cur = ops.matmul(cur, gm)
            k += 1
        gk = int(key2(cur, Q))
        new_keys = [key2(ops.matmul(H_mats, P), Q) for P in powers]
        out = []
        for phi in branches:
            for m in range(k):
                w = (phi[gk] + m) / k
                ext = {}
                for j in range(k):
                    shift = j * w
                    for h, nk in zip(H, new_keys[j].tolist()):
                        ext[nk] = (phi[h] + shift) % 1
                out.append(ext)
        branches = out
        H = sorted(branches[0])
        H_mats = np.array([by_key[k2] for k2 in H])
    return branches


@dataclass
class RegularFamily:
    """Data shared by all extensions attached to one regular class representative B."""

    B: np.ndarray
    type: str
    inertia_classes: np.ndarray  # class id of every element t*j of the inertia group
    transversal_keys: np.ndarray  # key of t for each element (aligned with inertia_classes)
    kernel_phase: np.ndarray  # phi_B phase (1/p units) of j for each element
    extensions: list[dict[int, Fraction]]
    inertia_order: int


def regular_family(table: ClassTable, B) -> RegularFamily:
    T = table.tower
    q, p, Q = T.q, T.p, T.Q
    F = T.F
    kind = residue_class_type(F, B)
    if kind == "scalar":
        raise TowerError("B is scalar, not regular")
    ops = MatrixRing(T)
    A = unit_algebra(T, B)
    Akeys = key2(A, Q)
    # K0 = A ∩ J1 with the restriction of phi_B, exact phases
    in_kernel = np.all((A % q) == np.eye(2, dtype=np.int64), axis=(-1, -2))
    K0 = A[in_kernel]
    kph = phi_B_phase(T, B, K0 // q)
    sub_phase = {int(k): Fraction(int(v), p) for k, v in zip(key2(K0, Q), kph)}
    exts = extend_characters(T, A, list(sub_phase), sub_phase)
    # transversal of A / K0: first element (by key) for every reduction
    order = np.argsort(Akeys)
    red = key2(A[order] % q, q)
    _, first = np.unique(red, return_index=True)
    trans = A[order][first]
    J = congruence_kernel(T)
    prod = ops.matmul(trans[:, None], J[None]).reshape(-1, 2, 2)
    cls = table.classes_of(prod)
    tkeys = np.repeat(key2(trans, Q), len(J))
    jph = np.tile(phi_B_phase(T, B, J // q), len(trans))
    return RegularFamily(np.asarray(B), kind, cls, tkeys, jph, exts, len(prod))


def regular_character_values(table: ClassTable, fam: RegularFamily, ext: dict[int, Fraction]) -> np.ndarray:
    p = table.tower.p
    tphase = np.array([float(ext[int(k)]) for k in fam.transversal_keys])
    vals = np.exp(2j * np.pi * (tphase + fam.kernel_phase / p))
    return induce_from_classes(table, fam.inertia_classes, vals).values


# ---------------------------------------------------------------------------
# the table


@dataclass(eq=False)
class TableRow:
    index: int
    kind: str  # "regular" or "inflated"
    type: str  # a REGULAR_TYPES entry or "non-regular"
    dim: int
    provenance: dict
    central: int = -1  # index into the o2^x character list


@dataclass(eq=False)
class CharacterTable:
    table: ClassTable
    rows: list[TableRow]
    values: np.ndarray
    unit_labels: list[tuple[int, int]]
    unit_values: np.ndarray
    families: list[RegularFamily] = field(repr=False, default_factory=list)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def character(self, i: int) -> ClassFunction:
        return ClassFunction(self.table, self.values[i])

    @cached_property
    def fourier(self) -> KernelFourier:
        return KernelFourier(self.table)

    @cached_property
    def gram(self) -> np.ndarray:
        return gram(self.values, self.table)

    def decompose(self, f: ClassFunction) -> np.ndarray:
        from .classfunctions import decompose

        return decompose(f, self.values)

    def kernel_support(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Residue keys B with phi_B in the J1-restriction of row i, and multiplicities."""
        m = self.fourier.multiplicities(self.character(i))
        nz = np.nonzero(m)[0]
        return nz, m[nz]

    def type_of(self, i: int) -> str:
        F = self.table.tower.F
        q = self.table.tower.q
        keys, mult = self.kernel_support(i)
        mats = unkey2(keys, q)
        classes = {residue_class_key(F, M) for M in mats}
        if len(classes) != 1 or len(set(mult.tolist())) != 1:
            raise AssertionError("J1-restriction is not a single orbit with uniform multiplicity")
        t = residue_class_type(F, mats[0])
        return "non-regular" if t == "scalar" else t

    def completeness(self) -> dict:
        dims = np.array([r.dim for r in self.rows])
        err = float(np.max(np.abs(self.gram - np.eye(self.n_rows))))
        return {
            "n_rows": self.n_rows,
            "n_classes": self.table.n_classes,
            "sum_dim_sq": int(np.sum(dims**2)),
            "group_order": self.table.order,
            "gram_error": err,
            "complete": bool(
                self.n_rows == self.table.n_classes and int(np.sum(dims**2)) == self.table.order and err < TOL
            ),
        }

    def table1_counts(self) -> dict[str, list[int]]:
        """Per regular type: number of rows with a given (B-class, central character)."""
        counts: dict[str, dict[tuple, int]] = {t: {} for t in REGULAR_TYPES}
        for r in self.rows:
            if r.kind != "regular":
                continue
            k = (r.provenance["B_key"], r.central)
            counts[r.type][k] = counts[r.type].get(k, 0) + 1
        return {t: sorted(set(c.values())) for t, c in counts.items()}

    def table1_dims(self) -> dict[str, list[int]]:
        out: dict[str, set] = {t: set() for t in REGULAR_TYPES}
        for r in self.rows:
            if r.kind == "regular":
                out[r.type].add(r.dim)
        return {t: sorted(v) for t, v in out.items()}

    def summary(self) -> dict:
        T = self.table.tower
        return {
            "q": T.q,
            "flavor": T.flavor.value,
            "n_classes": self.table.n_classes,
            "n_regular_rows": sum(r.kind == "regular" for r in self.rows),
            "n_inflated_rows": sum(r.kind == "inflated" for r in self.rows),
            "table1_counts": self.table1_counts(),
            "table1_dims": self.table1_dims(),
        }

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["row", "kind", "type", "dim", "provenance", "class_id", "re", "im"])
            for r in self.rows:
                prov = json.dumps(r.provenance, sort_keys=True)
                for cid, val in enumerate(self.values[r.index]):
                    w.writerow([r.index, r.kind, r.type, r.dim, prov, cid, repr(float(val.real)), repr(float(val.imag))])


def central_classes(table: ClassTable) -> np.ndarray:
    """Class id of the scalar matrix u I for every o2 index u (-1 for non-units)."""
    T = table.tower
    out = np.full(T.Q, -1, dtype=np.int64)
    Z = center(T)
    out[Z[:, 0, 0]] = table.classes_of(Z)
    return out


def identify_central_character(table: ClassTable, values, unit_values, zc=None) -> int:
    """Index of the o2^x character ``z -> chi(z I) / chi(1)``."""
    if zc is None:
        zc = central_classes(table)
    T = table.tower
    units = np.nonzero(zc >= 0)[0]
    one = values[zc[1]]
    omega = values[zc[units]] / one
    err = np.max(np.abs(unit_values[:, units] - omega[None]), axis=1)
    i = int(np.argmin(err))
    if err[i] >= 1e-6:
        raise NumericError("central values are not a character")
    return i


def build_table(table: ClassTable) -> CharacterTable:
    T = table.tower
    q = T.q
    zc = central_classes(table)
    unit_labels, unit_values = o2_unit_characters(T)
    rows: list[TableRow] = []
    vals: list[np.ndarray] = []
    families = []
    index: dict[tuple, list[int]] = {}

    def add(v, kind, typ, prov):
        sig = tuple(np.round(v[:8], 5).tolist())
        for j in index.get(sig, []):
            if np.max(np.abs(vals[j] - v)) < TOL:
                return False
        dim = to_integer(complex(v[zc[1]]))
        row = TableRow(len(rows), kind, typ, dim, prov)
        row.central = identify_central_character(table, v, unit_values, zc)
        rows.append(row)
        vals.append(v)
        index.setdefault(sig, []).append(row.index)
        return True

    for B in regular_class_reps(T):
        fam = regular_family(table, B)
        families.append(fam)
        for e, ext in enumerate(fam.extensions):
            v = regular_character_values(table, fam, ext)
            add(v, "regular", fam.type, {"B": B.tolist(), "B_key": int(key2(B, q)), "extension": e})

    reps_bar = table.residue_reps
    det = MatrixRing(T).det2(table.reps)
    for ir in gl2_irreps(q):
        base = gl2_character_values(T, ir, reps_bar)
        for u, lab in enumerate(unit_labels):
            v = base * unit_values[u][det]
            add(v, "inflated", "non-regular", {"gl2": [ir.kind, *ir.params], "twist": list(lab)})

    ct = CharacterTable(table, rows, np.array(vals), unit_labels, unit_values, families)
    info = ct.completeness()
    if not info["complete"]:
        raise IncompleteTableError(f"character table incomplete: {info}")
    return ct
