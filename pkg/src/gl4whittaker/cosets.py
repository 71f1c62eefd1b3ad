"""Double cosets of the elliptic torus and the block parabolic in GL_4(F_q).

The torus is the embedded F_{q^4}^x, the parabolic is the stabilizer of
``W0 = span(e1, e2)``.  Representatives are the lower unipotent matrices
``A(u, v) = [[I, 0], [U, I]]`` with ``U = [[0, u], [0, v]]``; the extra family
``A_w`` is only used to confirm coverage.  Each representative carries two
2x2 residue matrices, ``L`` and ``calB``, which drive the Whittaker side.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .fields import FiniteField
from .matrices import (
    GL2Fq,
    MatrixRing,
    RegularEllipticElement,
    quad_matrix,
    quad_units_residue,
    residue_class_key,
    residue_class_type,
    unkey2,
)
from .tower import Tower, TowerError

TYPE_NAMES = {
    "scalar": "scalar",
    "split-nss": "split non-semisimple",
    "split-ss": "split semisimple",
    "nonsplit": "non-split semisimple",
}


def coset_matrix(q: int, u: int, v: int) -> np.ndarray:
    A = np.eye(4, dtype=np.int64)
    A[2, 1], A[3, 1] = u, v
    return A


def coset_matrix_w(q: int, w: int) -> np.ndarray:
    A = np.zeros((4, 4), dtype=np.int64)
    A[0, 0] = A[1, 2] = A[2, 1] = A[3, 3] = 1
    A[3, 1] = w
    return A


class _Scalars:
    """Shorthand F_q arithmetic on python ints."""

    def __init__(self, F: FiniteField):
        self.F = F

    def add(self, *xs):
        acc = 0
        for x in xs:
            acc = int(self.F.add[acc, x])
        return acc

    def sub(self, x, y):
        return int(self.F.sub[x, y])

    def mul(self, *xs):
        acc = 1
        for x in xs:
            acc = int(self.F.mul[acc, x])
        return acc

    def neg(self, x):
        return int(self.F.neg[x])

    def c(self, n: int):
        return self.F.from_int(n)


@dataclass(frozen=True, eq=False)
class CosetRep:
    geometry: "CosetGeometry"
    u: int
    v: int

    @property
    def is_identity(self) -> bool:
        return self.u == 0 and self.v == 0

    @cached_property
    def U(self) -> np.ndarray:
        return np.array([[0, self.u], [0, self.v]], dtype=np.int64)

    @cached_property
    def matrix(self) -> np.ndarray:
        return coset_matrix(self.geometry.q, self.u, self.v)

    @cached_property
    def L(self) -> np.ndarray:
        g = self.geometry
        ops, U = g.ops, self.U
        X1, X2, X3 = g.x.X1, g.x.X2, g.x.X3
        t = ops.sub(ops.matmul(X1, U), ops.matmul(U, X1))
        t = ops.add(t, X3)
        return ops.sub(t, ops.matmul(ops.matmul(U, X2), U))

    @cached_property
    def det_L(self) -> int:
        return int(self.geometry.ops.det2(self.L))

    @property
    def nonvanishing(self) -> bool:
        return self.det_L != 0

    @cached_property
    def calB(self) -> np.ndarray:
        if not self.nonvanishing:
            raise TowerError("L is singular for this coset")
        g = self.geometry
        ops, U = g.ops, self.U
        X1, X2 = g.x.X1, g.x.X2
        inner = ops.add(X1, ops.matmul(X2, U))
        t = ops.conj(self.L, inner)
        return ops.sub(ops.add(t, X1), ops.matmul(U, X2))

    @property
    def calB_type(self) -> str:
        return residue_class_type(self.geometry.F, self.calB)

    def __repr__(self) -> str:
        return f"CosetRep(u={self.u}, v={self.v})"


class CosetGeometry:
    """Coset representatives and their invariants for a fixed regular elliptic ``x``."""

    def __init__(self, x: RegularEllipticElement):
        self.x = x
        self.tower: Tower = x.tower
        self.F = self.tower.F
        self.q = self.tower.q
        self.ops = MatrixRing(self.F)
        self.s = _Scalars(self.F)
        p = self.tower.params
        self.a, self.alpha, self.b = p.a, p.alpha, p.b
        self.N = self.tower.norm

    def rep(self, u: int, v: int) -> CosetRep:
        return CosetRep(self, int(u), int(v))

    def omega(self) -> list[CosetRep]:
        """All q^2 representatives, (u, v) lexicographic."""
        return [self.rep(u, v) for u in range(self.q) for v in range(self.q)]

    # closed forms ------------------------------------------------------
    def det_L_closed_form(self, d: CosetRep) -> int:
        s, X, Y = self.s, self.x.X, self.x.Y
        u, v, a, N = d.u, d.v, self.a, self.N
        two_a = s.add(a, a)
        t1 = s.mul(u, u, X)
        t2 = s.mul(u, v, s.add(s.mul(two_a, X), Y))
        t3 = s.mul(v, v, s.add(s.mul(two_a, Y), s.mul(X, N)))
        return s.add(s.neg(t1), s.neg(t2), s.neg(t3), Y)

    def C(self, d: CosetRep, e: CosetRep) -> int:
        """The double-coset criterion polynomial C(d, e) over F_q."""
        s = self.s
        u, v, u2, v2 = d.u, d.v, e.u, e.v
        a, N = self.a, self.N
        two_a = s.add(a, a)
        k = s.add(s.mul(s.c(3), a, a), s.mul(self.b, self.b, self.alpha))
        terms = [
            s.mul(u, u),
            s.neg(s.mul(u2, u2)),
            s.mul(u, v, u2, u2),
            s.neg(s.mul(u, u, u2, v2)),
            s.mul(two_a, s.sub(s.mul(v, v, u2, u2), s.mul(u, u, v2, v2))),
            s.mul(two_a, s.sub(s.mul(u, v), s.mul(u2, v2))),
            s.mul(k, s.sub(s.mul(u2, v2, v, v), s.mul(u, v, v2, v2))),
            s.mul(s.sub(s.mul(v, v), s.mul(v2, v2)), N),
        ]
        return s.add(*terms)

    def same_double_coset(self, d: CosetRep, e: CosetRep) -> bool:
        return self.C(d, e) == 0

    def aw_membership_poly(self, w: int, u: int, v: int) -> int:
        """Polynomial whose vanishing is claimed to put A_w and A(u, v) in one double coset."""
        s = self.s
        a, N = self.a, self.N
        k = s.add(s.mul(s.c(3), a, a), s.mul(self.b, self.b, self.alpha))
        one_2aw = s.add(1, s.mul(s.c(2), a, w))
        t1 = s.mul(u, u, w, one_2aw)
        t2 = s.mul(u, v, s.sub(1, s.mul(w, w, k)))
        t3 = s.mul(v, v, s.add(s.mul(s.c(2), a), s.mul(w, k)))
        t4 = s.add(one_2aw, s.mul(N, w, w))
        return s.add(t1, s.neg(t2), s.neg(t3), t4)

    def build_omega0(self) -> list[CosetRep]:
        """Lexicographic first-wins transversal of the C-relation; exactly q + 1 entries."""
        kept: list[CosetRep] = []
        for d in self.omega():
            if not any(self.same_double_coset(d, k) for k in kept):
                kept.append(d)
        if len(kept) != self.q + 1:
            raise AssertionError(f"expected {self.q + 1} double cosets, found {len(kept)}")
        return kept

    def c_partition(self) -> np.ndarray:
        """Class label of every A(u, v) (index u*q + v) under the C-relation, first-wins."""
        reps = self.omega()
        labels = np.full(len(reps), -1, dtype=np.int64)
        heads: list[CosetRep] = []
        for i, d in enumerate(reps):
            for j, h in enumerate(heads):
                if self.same_double_coset(d, h):
                    labels[i] = j
                    break
            else:
                labels[i] = len(heads)
                heads.append(d)
        return labels

    def c_relation_matrix(self) -> np.ndarray:
        reps = self.omega()
        return np.array([[self.same_double_coset(d, e) for e in reps] for d in reps])


# ---------------------------------------------------------------------------
# Grassmannian oracle


def _rref(F: FiniteField, M) -> tuple:
    M = np.array(M, dtype=np.int64)
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i, c]), None)
        if piv is None:
            continue
        M[[r, piv]] = M[[piv, r]]
        M[r] = F.mul[F.inv[M[r, c]], M[r]]
        for i in range(rows):
            if i != r and M[i, c]:
                M[i] = F.sub[M[i], F.mul[M[i, c], M[r]]]
        r += 1
        if r == rows:
            break
    return tuple(M.reshape(-1).tolist()), r


@dataclass
class GrassmannOracle:
    n_points: int
    orbit_sizes: list[int]
    omega_labels: np.ndarray  # orbit id of A(u, v)·W0, index u*q + v
    aw_labels: np.ndarray  # orbit id of A_w·W0

    @property
    def n_orbits(self) -> int:
        return len(self.orbit_sizes)


def _span_key(F, M4, cols=(0, 1)):
    return _rref(F, np.asarray(M4)[:, list(cols)].T)[0]


def grassmann_orbit_oracle(tower: Tower) -> GrassmannOracle:
    """F_{q^4}^x-orbits on Gr(4, 2) by direct action of a torus generator."""
    F, q = tower.F, tower.q
    points = _enumerate_gr42(F)
    index = {p: i for i, p in enumerate(points)}
    gen = tower.res4.emb[tower.res4.generator]
    ops = MatrixRing(F)
    parent = list(range(len(points)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, pt in enumerate(points):
        basis = np.array(pt, dtype=np.int64).reshape(2, 4).T
        img = ops.matmul(gen, basis)
        j = index[_rref(F, img.T)[0]]
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    roots = np.array([find(i) for i in range(len(points))])
    uniq, labels = np.unique(roots, return_inverse=True)
    sizes = np.bincount(labels).tolist()
    W0 = lambda A: labels[index[_span_key(F, A)]]
    omega_labels = np.array([W0(coset_matrix(q, u, v)) for u in range(q) for v in range(q)])
    aw_labels = np.array([W0(coset_matrix_w(q, w)) for w in range(q)])
    return GrassmannOracle(len(points), sizes, omega_labels, aw_labels)


def _enumerate_gr42(F: FiniteField) -> list[tuple]:
    """RREF 2x4 matrices by pivot pattern."""
    q = F.q
    out = []
    for p1 in range(4):
        for p2 in range(p1 + 1, 4):
            free = [(0, c) for c in range(p1 + 1, 4) if c != p2] + [(1, c) for c in range(p2 + 1, 4)]
            for vals in np.ndindex(*([q] * len(free))):
                M = np.zeros((2, 4), dtype=np.int64)
                M[0, p1] = M[1, p2] = 1
                for (r, c), val in zip(free, vals):
                    M[r, c] = val
                out.append(tuple(M.reshape(-1).tolist()))
    return sorted(out)


def mobius_orbit_sizes(tower: Tower) -> list[int]:
    """Orbit sizes of GL_2(F_q) acting on F_{q^4} minus F_q by y -> (a y + b)/(c y + d)."""
    R = tower.res4
    q = tower.q
    # F_q sits in F_{q^4} as the multiples of 1, i.e. indices < q
    elems = np.arange(q, R.Q)
    G = GL2Fq(tower.F).elements
    parent = {int(y): int(y) for y in elems}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for g in G:
        a, b, c, d = (int(t) for t in g.reshape(-1))
        num = R.add(R.mul(a, elems), b)
        den = R.add(R.mul(c, elems), d)
        img = R.mul(num, R.inv(den))
        for y, z in zip(elems.tolist(), img.tolist()):
            ry, rz = find(y), find(z)
            if ry != rz:
                parent[max(ry, rz)] = min(ry, rz)
    roots = [find(int(y)) for y in elems]
    _, counts = np.unique(roots, return_counts=True)
    return sorted(counts.tolist())


# ---------------------------------------------------------------------------
# representative systems in GL_2(F_q) for the quadratic torus


@dataclass(frozen=True)
class GammaRep:
    y: int
    z: int
    system: str

    def matrix(self) -> np.ndarray:
        return np.array([[1, self.y], [0, self.z]], dtype=np.int64)


def gamma_invariant(tower: Tower, y: int, z: int) -> int:
    """(y^2 + 2a y (z - 1) + (1 + z^2) N) / z."""
    s = _Scalars(tower.F)
    a, N = tower.params.a, tower.norm
    num = s.add(s.mul(y, y), s.mul(s.c(2), a, y, s.sub(z, 1)), s.mul(s.add(1, s.mul(z, z)), N))
    return s.mul(num, int(tower.F.inv[z]))


def gamma_system(which: str, tower: Tower) -> list[GammaRep]:
    q = tower.q
    if which == "Gamma":
        return [GammaRep(y, z, which) for y in range(q) for z in range(1, q)]
    if which == "Gamma0":
        seen, out = set(), []
        for y in range(q):
            for z in range(1, q):
                inv = gamma_invariant(tower, y, z)
                if inv not in seen:
                    seen.add(inv)
                    out.append(GammaRep(y, z, which))
        return out
    if which == "Gamma1":
        return [GammaRep(y, 1, which) for y in range(q)]
    if which == "Gamma2":
        return [GammaRep(0, z, which) for z in range(1, q)]
    raise ValueError(f"unknown system {which!r}")


def split_torus(F: FiniteField) -> np.ndarray:
    m, n = np.meshgrid(np.arange(1, F.q), np.arange(1, F.q), indexing="ij")
    out = np.zeros(m.shape + (2, 2), dtype=np.int64)
    out[..., 0, 0], out[..., 1, 1] = m, n
    return out.reshape(-1, 2, 2)


def unipotent_torus(F: FiniteField) -> np.ndarray:
    m, n = np.meshgrid(np.arange(1, F.q), np.arange(F.q), indexing="ij")
    out = np.zeros(m.shape + (2, 2), dtype=np.int64)
    out[..., 0, 0] = out[..., 1, 1] = m
    out[..., 0, 1] = n
    return out.reshape(-1, 2, 2)


def double_coset_labels(F: FiniteField, H, K) -> tuple[np.ndarray, np.ndarray]:
    """Label every element of GL_2(F_q) by its H\\G/K double coset (min key)."""
    G = GL2Fq(F)
    ops = G.ops
    H, K = np.asarray(H), np.asarray(K)
    labels = np.empty(G.order, dtype=np.int64)
    for i, g in enumerate(G.elements):
        prod = ops.matmul(ops.matmul(H[:, None], g), K[None, :])
        labels[i] = G.key(prod).min()
    return G.keys, labels


def check_gamma_system(which: str, tower: Tower) -> dict:
    """Brute-force check that a representative system is complete and irredundant."""
    F = tower.F
    G = GL2Fq(F)
    Hq = quad_units_residue(tower)
    reps = gamma_system(which, tower)
    mats = np.array([r.matrix() for r in reps])
    if which == "Gamma":
        K = np.eye(2, dtype=np.int64)[None]
    elif which == "Gamma0":
        K = Hq
    elif which == "Gamma1":
        K = split_torus(F)
    else:
        K = unipotent_torus(F)
    keys, labels = double_coset_labels(F, Hq, K)
    rep_labels = labels[np.searchsorted(keys, G.key(mats))]
    n_cosets = len(np.unique(labels))
    ok = len(set(rep_labels.tolist())) == len(reps) == n_cosets
    out = {"system": which, "size": len(reps), "n_double_cosets": n_cosets, "ok": bool(ok)}
    if which == "Gamma0":
        # the invariant separates double cosets of the whole of Gamma
        full = gamma_system("Gamma", tower)
        fm = np.array([r.matrix() for r in full])
        fl = labels[np.searchsorted(keys, G.key(fm))]
        inv = [gamma_invariant(tower, r.y, r.z) for r in full]
        agree = all(
            (fl[i] == fl[j]) == (inv[i] == inv[j]) for i in range(len(full)) for j in range(len(full))
        )
        out["invariant_matches"] = bool(agree)
        out["ok"] = out["ok"] and bool(agree)
    return out


# ---------------------------------------------------------------------------
# trace-annihilator of the embedded quadratic subfield


def annihilator_family(tower: Tower) -> set[int]:
    """Keys of ((m, n N + 2 a m), (n, -m)) for m, n in F_q."""
    F, q = tower.F, tower.q
    a, N = tower.params.a, tower.norm
    s = _Scalars(F)
    out = set()
    for m in range(q):
        for n in range(q):
            M = [[m, s.add(s.mul(n, N), s.mul(s.c(2), a, m))], [n, s.neg(m)]]
            out.add(_key_fq(q, M))
    return out


def _key_fq(q, M) -> int:
    return ((M[0][0] * q + M[0][1]) * q + M[1][0]) * q + M[1][1]


def annihilator_bruteforce(tower: Tower) -> set[int]:
    """Keys of all C in M_2(F_q) with tr(C D) = 0 for every D in the embedded F_{q^2}."""
    F, q = tower.F, tower.q
    ops = MatrixRing(F)
    allC = unkey2(np.arange(q**4), q)
    c = tower.res2.coords
    D = quad_matrix(F, tower.params.a, tower.norm, c[:, 0], c[:, 1])
    tr = ops.trace(ops.matmul(allC[:, None], D[None]))
    keep = np.all(tr == 0, axis=1)
    return set(np.nonzero(keep)[0].tolist())


def calB_signature(F: FiniteField, B) -> tuple[int, int, bool]:
    return residue_class_key(F, B)
