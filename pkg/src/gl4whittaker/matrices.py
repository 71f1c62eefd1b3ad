"""Matrices over F_q and o2, tower embeddings, and conjugacy classes of GL_2(o2).

Matrices are integer numpy arrays of shape ``(..., n, n)`` holding element
indices of the entry ring.  :class:`MatrixRing` supplies vectorised arithmetic
for either F_q (a :class:`FiniteField`) or o2 (a :class:`Tower`).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .fields import FiniteField
from .tower import Level, RingFlavor, Tower, TowerElem, TowerError


class BudgetError(RuntimeError):
    pass


class MatrixRing:
    """Vectorised matrix arithmetic over a table ring (F_q or o2)."""

    def __init__(self, ring):
        self.ring = ring
        self.is_o2 = isinstance(ring, Tower)
        self.size = ring.Q if self.is_o2 else ring.q
        self.add_t, self.sub_t, self.mul_t = ring.add, ring.sub, ring.mul
        self.neg_t, self.inv_t = ring.neg, ring.inv
        p = ring.p
        self._mode = "table"
        if ring.F.f == 1 if self.is_o2 else ring.f == 1:
            if not self.is_o2:
                self._mode, self._mod = "int", p
            elif ring.flavor is RingFlavor.MIXED:
                self._mode, self._mod = "int", p * p
            else:
                self._mode, self._mod = "dual", p

    # elementwise -------------------------------------------------------
    def add(self, A, B):
        if self._mode == "int":
            return (np.asarray(A) + B) % self._mod
        return self.add_t[A, B]

    def sub(self, A, B):
        if self._mode == "int":
            return (np.asarray(A) - B) % self._mod
        return self.sub_t[A, B]

    def neg(self, A):
        return self.neg_t[A]

    def emul(self, A, B):
        return self.mul_t[A, B]

    # matrix products ---------------------------------------------------
    def matmul(self, A, B):
        A, B = np.asarray(A, dtype=np.int64), np.asarray(B, dtype=np.int64)
        if self._mode == "int":
            return np.matmul(A, B) % self._mod
        if self._mode == "dual":
            p = self._mod
            A0, A1 = A % p, A // p
            B0, B1 = B % p, B // p
            C0 = np.matmul(A0, B0) % p
            C1 = (np.matmul(A0, B1) + np.matmul(A1, B0)) % p
            return C0 + p * C1
        n, m, k = A.shape[-2], B.shape[-1], A.shape[-1]
        shape = np.broadcast_shapes(A.shape[:-2], B.shape[:-2]) + (n, m)
        C = np.zeros(shape, dtype=np.int64)
        for i in range(n):
            for j in range(m):
                acc = np.zeros(shape[:-2], dtype=np.int64)
                for t in range(k):
                    acc = self.add_t[acc, self.mul_t[A[..., i, t], B[..., t, j]]]
                C[..., i, j] = acc
        return C

    def matadd(self, A, B):
        return self.add(A, B)

    def scale(self, c, A):
        return self.mul_t[c, A]

    def trace(self, A):
        A = np.asarray(A)
        acc = A[..., 0, 0]
        for i in range(1, A.shape[-1]):
            acc = self.add(acc, A[..., i, i])
        return acc

    def det2(self, A):
        A = np.asarray(A)
        return self.sub(self.emul(A[..., 0, 0], A[..., 1, 1]), self.emul(A[..., 0, 1], A[..., 1, 0]))

    def adj2(self, A):
        A = np.asarray(A)
        out = np.empty_like(A)
        out[..., 0, 0] = A[..., 1, 1]
        out[..., 1, 1] = A[..., 0, 0]
        out[..., 0, 1] = self.neg(A[..., 0, 1])
        out[..., 1, 0] = self.neg(A[..., 1, 0])
        return out

    def inv2(self, A):
        d = self.inv_t[self.det2(A)]
        if np.any(d < 0):
            raise TowerError("matrix not invertible")
        return self.mul_t[d[..., None, None], self.adj2(A)]

    def identity(self, n: int, batch=()):
        return np.broadcast_to(np.eye(n, dtype=np.int64), tuple(batch) + (n, n)).copy()

    def inv(self, A):
        """Gauss-Jordan inverse of a single square matrix over a local ring."""
        A = np.array(A, dtype=np.int64)
        n = A.shape[0]
        if n == 2:
            return self.inv2(A)
        M = np.concatenate([A, self.identity(n)], axis=1)
        for col in range(n):
            piv = next((r for r in range(col, n) if self.inv_t[M[r, col]] >= 0), None)
            if piv is None:
                raise TowerError("matrix not invertible")
            M[[col, piv]] = M[[piv, col]]
            M[col] = self.mul_t[self.inv_t[M[col, col]], M[col]]
            for r in range(n):
                if r != col and M[r, col]:
                    M[r] = self.sub(M[r], self.mul_t[M[r, col], M[col]])
        return M[:, n:]

    def conj(self, S, A, S_inv=None):
        """``S A S^-1``."""
        if S_inv is None:
            S_inv = self.inv2(S) if np.asarray(S).shape[-1] == 2 else self.inv(S)
        return self.matmul(self.matmul(S, A), S_inv)


def reduce_mod_varpi(A, q: int):
    """Entrywise reduction o2 -> F_q."""
    return np.asarray(A) % q


def varpi_digit(A, q: int):
    return np.asarray(A) // q


def const_lift(A):
    """Constant lift F_q -> o2 is the identity on indices."""
    return np.asarray(A, dtype=np.int64).copy()


# ---------------------------------------------------------------------------
# keys for 2x2 matrices


def key2(A, base: int):
    A = np.asarray(A, dtype=np.int64)
    return ((A[..., 0, 0] * base + A[..., 0, 1]) * base + A[..., 1, 0]) * base + A[..., 1, 1]


def unkey2(k, base: int):
    k = np.asarray(k, dtype=np.int64)
    out = np.empty(k.shape + (2, 2), dtype=np.int64)
    out[..., 1, 1] = k % base
    k = k // base
    out[..., 1, 0] = k % base
    k = k // base
    out[..., 0, 1] = k % base
    out[..., 0, 0] = k // base
    return out


# ---------------------------------------------------------------------------
# tower embeddings


def embed_quartic(x: TowerElem) -> np.ndarray:
    """Matrix of multiplication by ``x`` in the basis {1, beta^2, beta, beta^3} (columns)."""
    if x.level != Level.O2QUARTIC:
        raise TowerError("embed_quartic needs an O2quartic element")
    T = x.tower
    basis = np.eye(4, dtype=np.int64)
    cols = T.level_mul(Level.O2QUARTIC, np.array(x.coords)[None, :], basis)
    return cols.T.copy()


def embed_quad(x: TowerElem) -> np.ndarray:
    """Matrix of multiplication by ``x`` in the basis {1, beta^2} (columns)."""
    if x.level != Level.O2QUAD:
        raise TowerError("embed_quad needs an O2quad element")
    T = x.tower
    basis = np.eye(2, dtype=np.int64)
    cols = T.level_mul(Level.O2QUAD, np.array(x.coords)[None, :], basis)
    return cols.T.copy()


def quad_matrix(R, a, norm, c0, c1):
    """Vectorised ``embed_quad`` over a table ring: ((c0, -c1 N), (c1, c0 + 2a c1))."""
    c0, c1 = np.broadcast_arrays(np.asarray(c0), np.asarray(c1))
    out = np.empty(c0.shape + (2, 2), dtype=np.int64)
    out[..., 0, 0] = c0
    out[..., 0, 1] = R.neg[R.mul[c1, norm]]
    out[..., 1, 0] = c1
    out[..., 1, 1] = R.add[c0, R.mul[R.add[a, a], c1]]
    return out


@dataclass(frozen=True, eq=False)
class RingMatrix:
    """An n x n matrix over o2 (``tower`` set) or F_q."""

    ring: object
    entries: np.ndarray

    @cached_property
    def _ops(self):
        return MatrixRing(self.ring)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other: "RingMatrix") -> "RingMatrix":
        return RingMatrix(self.ring, self._ops.matmul(self.entries, other.entries))

    def __add__(self, other):
        return RingMatrix(self.ring, self._ops.add(self.entries, other.entries))

    def __eq__(self, other):
        return isinstance(other, RingMatrix) and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())

    def det(self) -> int:
        if self.n == 2:
            return int(self._ops.det2(self.entries))
        # Laplace along the first row is fine for n <= 4
        return _det_laplace(self._ops, self.entries)

    def inverse(self) -> "RingMatrix":
        return RingMatrix(self.ring, self._ops.inv(self.entries))

    def reduce(self) -> np.ndarray:
        if not self._ops.is_o2:
            raise TowerError("already a residue matrix")
        return reduce_mod_varpi(self.entries, self.ring.q)


def _det_laplace(ops: MatrixRing, A) -> int:
    n = A.shape[0]
    if n == 1:
        return int(A[0, 0])
    if n == 2:
        return int(ops.det2(A))
    acc = 0
    for j in range(n):
        minor = np.delete(np.delete(A, 0, axis=0), j, axis=1)
        term = int(ops.emul(A[0, j], _det_laplace(ops, minor)))
        acc = int(ops.add(acc, term) if j % 2 == 0 else ops.sub(acc, term))
    return acc


# ---------------------------------------------------------------------------
# regular elliptic elements


class RegularEllipticElement:
    """``x = a0 + a1 beta^2 + a2 beta + a3 beta^3`` with residue coordinates in F_q.

    ``X1, X2, X3`` are the 2x2 blocks over F_q of the regular representation,
    laid out as ((X1, X2), (X3, X1)).
    """

    def __init__(self, tower: Tower, coords):
        coords = tuple(int(c) for c in coords)
        if len(coords) != 4 or any(not 0 <= c < tower.q for c in coords):
            raise TowerError("x needs four F_q coordinates")
        if coords[2] == 0 and coords[3] == 0:
            raise TowerError("x lies in the quadratic subfield and is not regular elliptic")
        self.tower = tower
        self.coords = coords
        self.elem = tower.elem(Level.O2QUARTIC, coords)
        self.lift = embed_quartic(self.elem)
        bar = self.lift % tower.q
        self.matrix = bar
        self.X1 = bar[:2, :2].copy()
        self.X2 = bar[:2, 2:].copy()
        self.X3 = bar[2:, :2].copy()
        if not np.array_equal(bar[2:, 2:], self.X1):
            raise AssertionError("block structure of the quartic embedding broken")
        F = tower.F
        a0, a1, a2, a3 = coords
        m, ad = F.mul, F.add
        self.Y = int(ad[ad[m[a2, a2], m[m[a3, a3], tower.norm]], m[ad[tower.params.a, tower.params.a], m[a2, a3]]])
        two_a = int(ad[tower.params.a, tower.params.a])
        self.X = int(F.sub[F.sub[m[a1, a1], m[a2, a3]], m[two_a, m[a3, a3]]])
        if self.Y == 0:
            raise AssertionError("Y vanishes for a regular elliptic x")

    @property
    def X1_scalar(self) -> bool:
        """True when X1 is a scalar matrix, i.e. ``a1 == 0``."""
        return self.coords[1] == 0

    @property
    def residue_index(self) -> int:
        return int(self.tower.res4.index(np.array(self.coords)))

    def __repr__(self) -> str:
        return f"RegularEllipticElement{self.coords}"


def charpoly_irreducible(tower: Tower, M) -> bool:
    """Irreducibility over F_q of the characteristic polynomial of a 4x4 residue matrix.

    A 4x4 matrix has irreducible characteristic polynomial iff it has no
    invariant subspace of dimension 1 or 2; equivalently F_q[M] is a field of
    order q^4, tested via ``M^(q^4) == M`` and ``M^(q^2) != M`` on the algebra.
    """
    ops = MatrixRing(tower.F)
    q = tower.q

    def mpow(A, e):
        R = ops.identity(4)
        while e:
            if e & 1:
                R = ops.matmul(R, A)
            A = ops.matmul(A, A)
            e >>= 1
        return R

    M = np.asarray(M)
    if not np.array_equal(mpow(M, q**4), M):
        return False
    if np.array_equal(mpow(M, q**2), M):
        return False
    # M semisimple with eigenvalues in F_{q^4}\F_{q^2}; dimension of F_q[M] must be 4
    powers = np.stack([mpow(M, k).reshape(-1) for k in range(4)])
    return _rank_fq(tower.F, powers) == 4


def _rank_fq(F: FiniteField, rows) -> int:
    M = np.array(rows, dtype=np.int64)
    rank = 0
    for col in range(M.shape[1]):
        piv = next((r for r in range(rank, M.shape[0]) if M[r, col]), None)
        if piv is None:
            continue
        M[[rank, piv]] = M[[piv, rank]]
        M[rank] = F.mul[F.inv[M[rank, col]], M[rank]]
        for r in range(M.shape[0]):
            if r != rank and M[r, col]:
                M[r] = F.sub[M[r], F.mul[M[r, col], M[rank]]]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# GL_2(F_q)


class GL2Fq:
    """All of GL_2(F_q) as a key-sorted array, with residue matrix helpers."""

    def __init__(self, F: FiniteField):
        self.F = F
        self.q = F.q
        self.ops = MatrixRing(F)
        q = self.q
        keys = np.arange(q**4, dtype=np.int64)
        mats = unkey2(keys, q)
        det = self.ops.det2(mats)
        self.all_matrices = mats
        self.all_det = det
        self.keys = keys[det != 0]
        self.elements = mats[det != 0]
        self.order = len(self.keys)

    def key(self, A):
        return key2(A, self.q)

    def index_of(self, A):
        return np.searchsorted(self.keys, self.key(A))

    def centralizer(self, B) -> np.ndarray:
        B = np.asarray(B)
        E = self.elements
        lhs = self.ops.matmul(E, B)
        rhs = self.ops.matmul(B, E)
        return E[np.all(lhs == rhs, axis=(-1, -2))]

    def conj_class(self, B) -> np.ndarray:
        inv = self.ops.inv2(self.elements)
        return np.unique(self.key(self.ops.matmul(self.ops.matmul(self.elements, B), inv)))


def residue_class_type(F: FiniteField, B) -> str:
    """Conjugacy type of a 2x2 residue matrix: scalar, split-nss, split-ss or nonsplit."""
    B = np.asarray(B)
    if B[0, 1] == 0 and B[1, 0] == 0 and B[0, 0] == B[1, 1]:
        return "scalar"
    tr = int(F.add[B[0, 0], B[1, 1]])
    det = int(F.sub[F.mul[B[0, 0], B[1, 1]], F.mul[B[0, 1], B[1, 0]]])
    disc = int(F.sub[F.mul[tr, tr], F.mul[F.from_int(4), det]])
    if disc == 0:
        return "split-nss"
    return "split-ss" if F.is_square[disc] else "nonsplit"


def residue_class_key(F: FiniteField, B) -> tuple[int, int, bool]:
    """Complete conjugacy invariant of M_2(F_q): (trace, det, is_scalar)."""
    B = np.asarray(B)
    tr = int(F.add[B[0, 0], B[1, 1]])
    det = int(F.sub[F.mul[B[0, 0], B[1, 1]], F.mul[B[0, 1], B[1, 0]]])
    scalar = bool(B[0, 1] == 0 and B[1, 0] == 0 and B[0, 0] == B[1, 1])
    return tr, det, scalar


# ---------------------------------------------------------------------------
# GL_2(o2) and its conjugacy classes


def gl2_order(q: int) -> int:
    return q**4 * (q * q - 1) * (q * q - q)


@dataclass(eq=False)
class ClassTable:
    """Conjugacy classes of GL_2(o2).

    ``class_of`` maps every 2x2 key (base Q = q^2) to its class id, or -1 for
    non-invertible matrices.  Classes are ordered by their minimal key, which
    is also the representative.
    """

    tower: Tower
    order: int
    rep_keys: np.ndarray
    sizes: np.ndarray
    class_of: np.ndarray
    element_keys: np.ndarray = field(repr=False)

    @property
    def n_classes(self) -> int:
        return len(self.rep_keys)

    @cached_property
    def ops(self) -> MatrixRing:
        return MatrixRing(self.tower)

    @cached_property
    def reps(self) -> np.ndarray:
        return unkey2(self.rep_keys, self.tower.Q)

    @cached_property
    def elements(self) -> np.ndarray:
        return unkey2(self.element_keys, self.tower.Q)

    @cached_property
    def element_classes(self) -> np.ndarray:
        return self.class_of[self.element_keys]

    def classes_of(self, mats) -> np.ndarray:
        return self.class_of[key2(mats, self.tower.Q)]

    @cached_property
    def centralizer_orders(self) -> np.ndarray:
        return self.order // self.sizes

    @cached_property
    def residue_reps(self) -> np.ndarray:
        return self.reps % self.tower.q

    def inverse_class(self) -> np.ndarray:
        inv = self.ops.inv2(self.reps)
        return self.classes_of(inv)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["class_id", "e00", "e01", "e10", "e11", "class_size"])
            for cid, (rep, size) in enumerate(zip(self.reps, self.sizes)):
                w.writerow([cid, *rep.reshape(-1).tolist(), int(size)])


def _unit_generators(T: Tower) -> list[int]:
    F = T.F
    gens = [int(F.generator)]
    p = T.p
    for k in range(F.f):
        gens.append(1 + T.q * p**k)
    return gens


def _additive_generators(T: Tower) -> list[int]:
    p = T.p
    out = []
    for k in range(T.F.f):
        out += [p**k, T.q * p**k]
    return out


def conjugation_generators(T: Tower) -> np.ndarray:
    """Elementary matrices over additive generators, diagonal unit generators, a Weyl element."""
    gens = []
    for x in _additive_generators(T):
        gens.append([[1, x], [0, 1]])
        gens.append([[1, 0], [x, 1]])
    for u in _unit_generators(T):
        gens.append([[u, 0], [0, 1]])
    gens.append([[0, 1], [1, 0]])
    return np.array(gens, dtype=np.int64)


def enumerate_gl2(T: Tower) -> np.ndarray:
    """Sorted keys of GL_2(o2): matrices whose reduction is invertible."""
    q, Q = T.q, T.Q
    Fk = GL2Fq(T.F)
    red = Fk.keys  # residue keys with base q
    rmat = unkey2(red, q)
    digits = unkey2(np.arange(q**4, dtype=np.int64), q)
    full = rmat[:, None] + q * digits[None, :]
    keys = np.sort(key2(full, Q).reshape(-1))
    return keys


def enumerate_classes(T: Tower, max_q: int = 7) -> ClassTable:
    """Exhaustive conjugacy classes of GL_2(o2) via connected components of the conjugation graph."""
    if T.q > max_q:
        raise BudgetError(f"q={T.q} exceeds the class enumeration budget (q <= {max_q})")
    Q = T.Q
    keys = enumerate_gl2(T)
    n = len(keys)
    if n != gl2_order(T.q):
        raise AssertionError("GL_2(o2) enumeration has the wrong size")
    pos = np.full(Q**4, -1, dtype=np.int64)
    pos[keys] = np.arange(n)
    ops = MatrixRing(T)
    mats = unkey2(keys, Q)
    rows, cols = [], []
    for s in conjugation_generators(T):
        conj = ops.matmul(ops.matmul(s, mats), ops.inv2(s))
        rows.append(np.arange(n))
        cols.append(pos[key2(conj, Q)])
    rows, cols = np.concatenate(rows), np.concatenate(cols)
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="weak")
    # canonical ordering by minimal key: keys are sorted, so first occurrence is the min
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    relabel = np.empty(len(order), dtype=np.int64)
    relabel[order] = np.arange(len(order))
    cls = relabel[labels]
    rep_keys = keys[np.sort(first)]
    sizes = np.bincount(cls, minlength=len(rep_keys))
    class_of = np.full(Q**4, -1, dtype=np.int32)
    class_of[keys] = cls
    return ClassTable(T, n, rep_keys, sizes, class_of, keys)


# ---------------------------------------------------------------------------
# subgroups of GL_2(o2) given as preimages of residue subgroups


def congruence_kernel(T: Tower) -> np.ndarray:
    """J1 = I + w M_2(o2): all q^4 elements."""
    q = T.q
    digits = unkey2(np.arange(q**4, dtype=np.int64), q)
    return np.eye(2, dtype=np.int64) + q * digits


def preimage(T: Tower, residue_subgroup) -> np.ndarray:
    """All lifts of a subgroup of GL_2(F_q): constant lift times J1."""
    H = const_lift(residue_subgroup)
    J = congruence_kernel(T)
    ops = MatrixRing(T)
    return ops.matmul(H[:, None], J[None, :]).reshape(-1, 2, 2)


def center(T: Tower) -> np.ndarray:
    units = np.arange(T.Q)[np.arange(T.Q) % T.q != 0]
    out = np.zeros((len(units), 2, 2), dtype=np.int64)
    out[:, 0, 0] = units
    out[:, 1, 1] = units
    return out


def quad_units_residue(T: Tower) -> np.ndarray:
    """Embedded F_{q^2}^x inside GL_2(F_q)."""
    c = T.res2.coords[1:]
    return quad_matrix(T.F, T.params.a, T.norm, c[:, 0], c[:, 1])


def quad_units(T: Tower) -> np.ndarray:
    """Embedded O2quad^x inside GL_2(o2) (all (q^2 - 1) q^2 elements)."""
    Q = T.Q
    c0, c1 = np.meshgrid(np.arange(Q), np.arange(Q), indexing="ij")
    c0, c1 = c0.reshape(-1), c1.reshape(-1)
    unit = (c0 % T.q != 0) | (c1 % T.q != 0)
    return quad_matrix(T, T.a_hat, T.norm_hat, c0[unit], c1[unit])


def quad_units_times_kernel(T: Tower) -> np.ndarray:
    return preimage(T, quad_units_residue(T))


def inertia_group(T: Tower, B) -> np.ndarray:
    """Elements of o2[B^]^x J1 for a regular residue matrix B: the preimage of its centralizer."""
    if residue_class_type(T.F, B) == "scalar":
        raise TowerError("B is scalar, not regular")
    return preimage(T, GL2Fq(T.F).centralizer(B))


def brute_force_inertia(T: Tower, B) -> np.ndarray:
    """Residue images of {g : phi_B(g^-1 k g) = phi_B(k) for all k in J1}, by full scan.

    J1 acts trivially on its own characters, so the residue image determines membership.
    """
    F = T.F
    Fk = GL2Fq(T.F)
    ops = Fk.ops
    E = Fk.elements
    A = unkey2(np.arange(T.q**4, dtype=np.int64), T.q)
    conjA = ops.matmul(ops.matmul(ops.inv2(E)[:, None], A[None]), E[:, None])
    phase = F.trace[ops.trace(ops.matmul(np.asarray(B), conjA))]
    base = F.trace[ops.trace(ops.matmul(np.asarray(B), A))]
    return E[np.all(phase == base[None], axis=1)]
