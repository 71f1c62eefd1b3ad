"""Characters of the degenerate Whittaker space of a strongly cuspidal GL_4(o2) representation.

The representation is ``pi = Ind_T^G phi~_x`` with ``T = O2quartic^x K1``.  Its
N-psi part splits over the double cosets T\\G/P into pieces ``pi^delta``, each
of which is computed here as a class function on GL_2(o2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .classfunctions import ClassFunction, KernelFourier, induce
from .cosets import CosetGeometry, CosetRep
from .matrices import (
    ClassTable,
    GL2Fq,
    MatrixRing,
    RegularEllipticElement,
    key2,
    preimage,
    quad_matrix,
    quad_units_residue,
    quad_units_times_kernel,
    residue_class_type,
    unkey2,
)
from .tower import Level, Tower, TowerError

SCHEMA_VERSION = 1


def _e(x):
    return np.exp(2j * np.pi * np.asarray(x, dtype=float))


def quartic_pow(T: Tower, x, e: int) -> np.ndarray:
    """Vectorised ``x**e`` in O2quartic for coordinate arrays of shape ``(..., 4)``."""
    x = np.asarray(x, dtype=np.int64)
    out = np.zeros_like(x)
    out[..., 0] = 1
    base = x
    while e:
        if e & 1:
            out = T.level_mul(Level.O2QUARTIC, out, base)
        base = T.level_mul(Level.O2QUARTIC, base, base)
        e >>= 1
    return out


def quartic_matrix(T: Tower, coords) -> np.ndarray:
    """Vectorised multiplication matrices (columns) for O2quartic coordinate arrays."""
    coords = np.asarray(coords, dtype=np.int64)
    basis = np.eye(4, dtype=np.int64)
    cols = T.level_mul(Level.O2QUARTIC, coords[..., None, :], basis)
    return np.swapaxes(cols, -1, -2)


def _trace_pairing(F, X, A) -> np.ndarray:
    """``tr(X A)`` over F_q for stacks of square matrices."""
    n = X.shape[-1]
    acc = np.zeros(np.broadcast_shapes(X.shape[:-2], A.shape[:-2]), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            acc = F.add[acc, F.mul[X[..., i, j], A[..., j, i]]]
    return acc


class ThetaCharacter:
    """A strongly primitive character of O2quartic^x and its extension to T.

    ``theta(t^j (1 + w a)) = exp(2 pi i c j / (q^4 - 1)) * psi0(w Tr(x a))`` with
    ``t`` the Teichmuller lift of the residue generator.
    """

    def __init__(self, x: RegularEllipticElement, c: int):
        T = x.tower
        self.tower, self.x = T, x
        q, R4 = T.q, T.res4
        self.order = R4.Q - 1
        self.c = int(c) % self.order
        self.xbar = x.residue_index
        residues = np.arange(R4.Q)
        const = R4.coords[residues].copy()
        const[0, 0] = 1  # placeholder for the zero residue, never used
        self.teich = quartic_pow(T, const, R4.Q)
        self.teich_inv = self.teich[R4.inv(np.where(residues == 0, 1, residues))]
        self.teich_inv[0] = 0
        # inverse of a unit u has exponent |O2quartic^x| - 1
        inv_const = quartic_pow(T, const, (R4.Q - 1) * R4.Q - 1)
        self.const_inv_matrix = quartic_matrix(T, inv_const)
        self.const_values = self.values(const)
        self.const_values[0] = 0

    @property
    def is_primitive(self) -> bool:
        """The restriction to 1 + w O2quartic is not a trace from F_{q^2}: x is not in F_{q^2}."""
        return self.x.coords[2] != 0 or self.x.coords[3] != 0

    def values(self, coords) -> np.ndarray:
        """theta on O2quartic coordinate arrays of shape ``(..., 4)``; non-units raise."""
        T, R4 = self.tower, self.tower.res4
        q = T.q
        coords = np.asarray(coords, dtype=np.int64)
        ubar = R4.index(coords % q)
        if np.any(ubar == 0):
            raise TowerError("theta is defined on units only")
        principal = T.level_mul(Level.O2QUARTIC, coords, self.teich_inv[ubar])
        one = np.zeros(4, dtype=np.int64)
        one[0] = 1
        if np.any(principal % q != one):
            raise AssertionError("Teichmuller split failed")
        a = R4.index(principal // q)
        j = R4.log[ubar]
        tr = T.F.trace[R4.trace_to_fq(R4.mul(self.xbar, a))]
        return _e(self.c * j / self.order + tr / T.p)

    def value(self, elem) -> complex:
        return complex(self.values(np.array(elem.coords)))

    def omega(self) -> np.ndarray:
        """Central character on o2 indices (0 on non-units)."""
        T = self.tower
        idx = np.arange(T.Q)
        unit = idx % T.q != 0
        coords = np.zeros((T.Q, 4), dtype=np.int64)
        coords[:, 0] = np.where(unit, idx, 1)
        return np.where(unit, self.values(coords), 0)

    def on_quad(self, c0, c1) -> np.ndarray:
        """theta on O2quad^x elements ``c0 + c1 beta^2``."""
        c0, c1 = np.broadcast_arrays(np.asarray(c0), np.asarray(c1))
        z = np.zeros_like(c0)
        return self.values(np.stack([c0, c1, z, z], axis=-1))

    # extension to T = O2quartic^x K1 ----------------------------------
    def in_T(self, h) -> np.ndarray:
        T, R4 = self.tower, self.tower.res4
        hb = np.asarray(h) % T.q
        ubar = R4.index(hb[..., :, 0])
        return (ubar != 0) & np.all(hb == R4.emb[ubar], axis=(-1, -2))

    def phi_tilde(self, h, outside: float | None = None) -> np.ndarray:
        """phi~_x on 4x4 matrices over o2.

        Elements outside T raise unless ``outside`` is given, in which case they
        take that value (the extension by zero used in induced characters).
        """
        T, R4 = self.tower, self.tower.res4
        q = T.q
        h = np.asarray(h, dtype=np.int64)
        inside = self.in_T(h)
        if outside is None and not np.all(inside):
            raise TowerError("matrix is not in O2quartic^x K1")
        hb = h % q
        ubar = np.where(inside, R4.index(hb[..., :, 0]), 1)
        k = MatrixRing(T).matmul(self.const_inv_matrix[ubar], h)
        if np.any((k % q != np.eye(4, dtype=np.int64)) & inside[..., None, None]):
            raise AssertionError("T decomposition failed")
        tr = _trace_pairing(T.F, self.x.matrix, k // q)
        val = self.const_values[ubar] * _e(T.F.trace[tr] / T.p)
        if outside is None:
            return val
        return np.where(inside, val, outside)


def build_theta(x: RegularEllipticElement, c: int) -> ThetaCharacter:
    if not isinstance(x, RegularEllipticElement):
        raise TowerError("x must be a regular elliptic element")
    return ThetaCharacter(x, c)


# ---------------------------------------------------------------------------
# residue-level helpers


def quad_normalizer_residue(T: Tower) -> np.ndarray:
    """Normalizer of the embedded F_{q^2}^x in GL_2(F_q)."""
    G = GL2Fq(T.F)
    H = quad_units_residue(T)
    Hkeys = set(G.key(H).tolist())
    gen = H[int(np.argmax([T.res2.log[i + 1] == 1 for i in range(len(H))]))]
    ops = G.ops
    conj = ops.matmul(ops.matmul(G.elements, gen), ops.inv2(G.elements))
    mask = np.array([int(k) in Hkeys for k in G.key(conj)])
    return G.elements[mask]


def fq_coset_reps(T: Tower, H) -> np.ndarray:
    """Minimal-key representatives of the right cosets H\\GL_2(F_q)."""
    G = GL2Fq(T.F)
    ops = G.ops
    seen = np.zeros(T.q**4, dtype=bool)
    reps = []
    for g, k in zip(G.elements, G.keys):
        if seen[k]:
            continue
        reps.append(g)
        seen[G.key(ops.matmul(H, g))] = True
    return np.array(reps)


@dataclass
class DeltaPiece:
    coset: CosetRep
    dim: int
    dim_count: int
    character: ClassFunction | None = field(repr=False, default=None)

    @property
    def label(self) -> str:
        return f"A({self.coset.u},{self.coset.v})"


@dataclass
class WhittakerReport:
    q: int
    flavor: str
    x: tuple[int, ...]
    c: int
    pieces: list[DeltaPiece]
    total: ClassFunction = field(repr=False)
    omega: np.ndarray = field(repr=False)

    @property
    def dimension(self) -> int:
        return int(round(self.total.degree.real))

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "q": self.q,
            "flavor": self.flavor,
            "x": list(self.x),
            "theta_c": self.c,
            "dimension": self.dimension,
            "pieces": [
                {
                    "coset": [p.coset.u, p.coset.v],
                    "det_L": p.coset.det_L,
                    "dim": p.dim,
                    "dim_by_count": p.dim_count,
                    "calB": p.coset.calB.tolist() if p.coset.nonvanishing else None,
                    "calB_type": p.coset.calB_type if p.coset.nonvanishing else None,
                }
                for p in self.pieces
            ],
            "omega": [[float(z.real), float(z.imag)] for z in self.omega],
        }


class WhittakerEngine:
    """Per-coset characters of pi_{N,psi} on GL_2(o2) for one theta."""

    def __init__(self, table: ClassTable, theta: ThetaCharacter):
        self.table = table
        self.theta = theta
        self.tower = T = table.tower
        if theta.tower is not T:
            raise TowerError("theta and class table live on different towers")
        self.q = T.q
        self.geometry = CosetGeometry(theta.x)
        self.omega0 = self.geometry.build_omega0()
        self.fourier = KernelFourier(table)
        self.G = GL2Fq(T.F)
        self.omega = theta.omega()

    # dimensions -------------------------------------------------------
    def dim_pi_delta(self, d: CosetRep) -> int:
        q = self.q
        if d.is_identity:
            return q * (q - 1)
        return q * (q * q - 1) if d.nonvanishing else 0

    def dim_by_count(self, d: CosetRep) -> int:
        """Pairs (g1, g2) of coset representatives with g2 = L g1, counted by a character sum."""
        T, G = self.tower, self.G
        ops = G.ops
        if d.is_identity:
            H = quad_units_residue(T)
        else:
            H = np.array([np.eye(2, dtype=np.int64) * c for c in range(1, self.q)])
        g1 = fq_coset_reps(T, H)
        g2inv = ops.inv2(G.elements)
        lhs = ops.matmul(ops.matmul(g2inv[None], d.L), g1[:, None])
        diff = ops.sub(lhs, np.eye(2, dtype=np.int64))
        total = self.fourier.matrix[G.key(diff)].sum(axis=-1)
        return int(round(total.sum().real / self.q**4))

    # values on J1 -------------------------------------------------------
    def calB(self, d: CosetRep) -> np.ndarray:
        if d.is_identity:
            return MatrixRing(self.tower.F).scale(self.tower.F.from_int(2), self.theta.x.X1)
        return d.calB

    def torus_order(self, d: CosetRep) -> int:
        """|delta^-1 T delta cap P| as used in the J1 formula."""
        q = self.q
        return (q * q - 1) * q**12 if d.is_identity else (q - 1) * q**12

    def j1_values(self, d: CosetRep) -> np.ndarray:
        """Theta_{pi^delta}(I + w A) for every residue key A."""
        if not d.nonvanishing:
            raise TowerError("L is singular: the piece vanishes")
        G, ops = self.G, self.G.ops
        B = self.calB(d)
        conj = ops.matmul(ops.matmul(G.elements, B), ops.inv2(G.elements))
        s = self.fourier.matrix[G.key(conj)].sum(axis=0)
        return self.q**12 / self.torus_order(d) * s

    def theta_on_J1(self, d: CosetRep, A) -> complex:
        return complex(self.j1_values(d)[int(key2(np.asarray(A), self.q))])

    def _central_split(self):
        """For classes with scalar residue: (class ids, central o2 index, digit key of z^-1 g)."""
        T, q = self.tower, self.q
        reps = self.table.reps
        rb = reps % q
        scalar = (rb[:, 0, 1] == 0) & (rb[:, 1, 0] == 0) & (rb[:, 0, 0] == rb[:, 1, 1])
        ids = np.nonzero(scalar)[0]
        z = rb[ids, 0, 0]
        k = T.mul[T.inv[z][:, None, None], reps[ids]]
        if np.any(k % q != np.eye(2, dtype=np.int64)):
            raise AssertionError("central split failed")
        return ids, z, key2(k // q, q)

    def _central_supported(self, d: CosetRep, j1) -> np.ndarray:
        ids, z, keys = self._central_split()
        vals = np.zeros(self.table.n_classes, dtype=np.complex128)
        vals[ids] = self.omega[z] * j1[keys]
        return vals

    def character(self, d: CosetRep) -> ClassFunction:
        if not d.nonvanishing:
            return ClassFunction(self.table, np.zeros(self.table.n_classes))
        if d.is_identity:
            return self.identity_piece()
        return ClassFunction(self.table, self._central_supported(d, self.j1_values(d)))

    # the identity coset --------------------------------------------------
    @cached_property
    def _chi_on_H(self):
        """chi(g) = phi~_x(diag(g, g)) on H = O2quad^x J1, with H listed element by element."""
        T = self.tower
        H = quad_units_times_kernel(T)
        D = np.zeros(H.shape[:-2] + (4, 4), dtype=np.int64)
        D[..., :2, :2] = H
        D[..., 2:, 2:] = H
        return H, self.theta.phi_tilde(D)

    def identity_piece(self) -> ClassFunction:
        H, chi = self._chi_on_H
        return induce(self.table, H, chi)

    def identity_piece_by_cases(self) -> ClassFunction:
        """The identity piece from the case formulas: central part, vanishing part, normalizer sum."""
        T, q, table = self.tower, self.q, self.table
        d = self.omega0[0]
        vals = self._central_supported(d, self.j1_values(d))
        H, chi = self._chi_on_H
        Q = T.Q
        chi_dense = np.zeros(Q**4, dtype=np.complex128)
        hkeys = key2(H, Q)
        chi_dense[hkeys] = chi
        in_H = np.zeros(Q**4, dtype=bool)
        in_H[hkeys] = True
        hcls = table.class_of[hkeys]
        Nmat = preimage(T, quad_normalizer_residue(T))
        ops = table.ops
        Ninv = ops.inv2(Nmat)
        F = T.F
        for cid in range(table.n_classes):
            kind = residue_class_type(F, table.reps[cid] % q)
            if kind == "scalar":
                continue
            if kind != "nonsplit":
                vals[cid] = 0.0
                continue
            g = unkey2(hkeys[np.argmax(hcls == cid)], Q)
            conj = ops.matmul(ops.matmul(Ninv, g), Nmat)
            ck = key2(conj, Q)
            if not np.all(in_H[ck]):
                raise AssertionError("normalizer does not preserve the torus")
            vals[cid] = chi_dense[ck].sum() / (q**4 * (q * q - 1))
        return ClassFunction(table, vals)

    # assembly ------------------------------------------------------------
    def assemble(self) -> WhittakerReport:
        pieces = []
        total = np.zeros(self.table.n_classes, dtype=np.complex128)
        for d in self.omega0:
            ch = self.character(d)
            dim = self.dim_pi_delta(d)
            if abs(ch.degree - dim) > 1e-6:
                raise AssertionError(f"piece {d} has degree {ch.degree}, expected {dim}")
            pieces.append(DeltaPiece(d, dim, self.dim_by_count(d), ch))
            total = total + ch.values
        total_cf = ClassFunction(self.table, total)
        q = self.q
        if abs(total_cf.degree - q**3 * (q - 1)) > 1e-6:
            raise AssertionError("total dimension differs from q^3 (q - 1)")
        T = self.tower
        return WhittakerReport(
            q, T.flavor.value, self.theta.x.coords, self.theta.c, pieces, total_cf, self.omega
        )


def quad_unit_coords(T: Tower) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates (c0, c1) of every unit of O2quad, matching :func:`quad_units`."""
    Q = T.Q
    c0, c1 = np.meshgrid(np.arange(Q), np.arange(Q), indexing="ij")
    c0, c1 = c0.reshape(-1), c1.reshape(-1)
    unit = (c0 % T.q != 0) | (c1 % T.q != 0)
    return c0[unit], c1[unit]


def quad_embedding(T: Tower, c0, c1) -> np.ndarray:
    return quad_matrix(T, T.a_hat, T.norm_hat, c0, c1)
