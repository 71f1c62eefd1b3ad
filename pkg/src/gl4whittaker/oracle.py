"""Brute-force evaluation of the Whittaker characters straight from the definitions.

Nothing here uses the closed forms of :mod:`whittaker`.  A value is the
projection formula applied to the raw induced character of
``Ind_{delta^-1 T delta cap P}^P phi~_x^{delta^-1}``:

    Theta(g) = 1/|N| sum_X Theta_ind((g, X; 0, g)) conj(psi(X g^-1))
    Theta_ind(p) = 1/|H| sum_{gamma in P} phi~_x(delta gamma^-1 p gamma delta^-1)

with ``phi~_x`` extended by zero off T.  The integrand is right invariant under
``K1 cap P`` (phi~_x is a class function on T and K1 is normal in it), so the
gamma-sum runs over constant lifts of the residue parabolic, weighted by
``|K1 cap P| = q^12``.
"""
from __future__ import annotations

import numba
import numpy as np

from .cosets import CosetRep
from .matrices import BudgetError, ClassTable, GL2Fq, MatrixRing, key2, unkey2
from .tower import Tower
from .whittaker import ThetaCharacter

ORACLE_MAX_Q = 3


def _block(A, B, C, D):
    top = np.concatenate(np.broadcast_arrays(A, B), axis=-1)
    bot = np.concatenate(np.broadcast_arrays(C, D), axis=-1)
    return np.concatenate([top, bot], axis=-2)


@numba.njit(cache=True)
def _induced_sums(left, right, ps, add, mul, q, emb, cinv, cvals, xbar, fadd, fmul, ftrace, roots):
    """sum over gamma of phi~_x(left[gamma] p right[gamma]), zero off T, for each p in ``ps``."""
    n_g, n_p = left.shape[0], ps.shape[0]
    out = np.zeros(n_p, dtype=np.complex128)
    t = np.empty((4, 4), dtype=np.int64)
    m = np.empty((4, 4), dtype=np.int64)
    for ip in range(n_p):
        p = ps[ip]
        acc = 0j
        for ig in range(n_g):
            L, R = left[ig], right[ig]
            for i in range(4):
                for j in range(4):
                    s = 0
                    for k in range(4):
                        s = add[s, mul[L[i, k], p[k, j]]]
                    t[i, j] = s
            for i in range(4):
                for j in range(4):
                    s = 0
                    for k in range(4):
                        s = add[s, mul[t[i, k], R[k, j]]]
                    m[i, j] = s
            u = 0
            w = 1
            for i in range(4):
                u += (m[i, 0] % q) * w
                w *= q
            if u == 0:
                continue
            member = True
            for i in range(4):
                for j in range(4):
                    if m[i, j] % q != emb[u, i, j]:
                        member = False
            if not member:
                continue
            C = cinv[u]
            tr = 0
            for i in range(4):
                for j in range(4):
                    s = 0
                    for k in range(4):
                        s = add[s, mul[C[i, k], m[k, j]]]
                    # s = delta_ij + w a_ij; pair a_ij with xbar_ji
                    tr = fadd[tr, fmul[xbar[j, i], s // q]]
            acc += cvals[u] * roots[ftrace[tr]]
        out[ip] = acc
    return out


def residue_parabolic(T: Tower) -> tuple[np.ndarray, np.ndarray]:
    """Constant lifts of every element of the residue parabolic and of their inverses."""
    G = GL2Fq(T.F)
    ops = G.ops
    q = T.q
    g = G.elements
    ginv = ops.inv2(g)
    Y = unkey2(np.arange(q**4, dtype=np.int64), q)
    n = len(g)
    i1, i2, iy = np.meshgrid(np.arange(n), np.arange(n), np.arange(q**4), indexing="ij")
    i1, i2, iy = i1.ravel(), i2.ravel(), iy.ravel()
    zero = np.zeros((len(i1), 2, 2), dtype=np.int64)
    gam = _block(g[i1], Y[iy], zero, g[i2])
    corner = ops.neg(ops.matmul(ops.matmul(ginv[i1], Y[iy]), ginv[i2]))
    gam_inv = _block(ginv[i1], corner, zero, ginv[i2])
    return gam, gam_inv


class MackeyOracle:
    """Theta_{pi^delta_{N,psi}} on GL_2(o2) elements by exhaustive summation."""

    def __init__(self, theta: ThetaCharacter, coset: CosetRep, max_q: int = ORACLE_MAX_Q):
        T = theta.tower
        if T.q > max_q:
            raise BudgetError(f"oracle budget is q <= {max_q}, got q={T.q}")
        self.theta, self.coset, self.tower = theta, coset, T
        self.q = T.q
        self.ops = MatrixRing(T)
        self.delta = coset.matrix.copy()
        self.delta_inv = self.ops.inv(self.delta)
        gam, gam_inv = residue_parabolic(T)
        self.left = np.ascontiguousarray(self.ops.matmul(self.delta, gam_inv))
        self.right = np.ascontiguousarray(self.ops.matmul(gam, self.delta_inv))
        self.subgroup_order = self._subgroup_order()

    def _subgroup_order(self) -> int:
        """|delta^-1 T delta cap P| = q^12 |delta^-1 F_{q^4}^x delta cap residue parabolic|."""
        T, F = self.tower, self.tower.F
        fops = MatrixRing(F)
        emb = T.res4.emb[1:]
        conj = fops.matmul(fops.matmul(self.delta_inv % self.q, emb), self.delta % self.q)
        in_p = np.all(conj[:, 2:, :2] == 0, axis=(-1, -2))
        return int(in_p.sum()) * self.q**12

    def induced_values(self, ps) -> np.ndarray:
        """Raw induced character of pi^delta at a stack of 4x4 elements of P over o2."""
        T, th = self.tower, self.theta
        F = T.F
        ps = np.ascontiguousarray(np.asarray(ps, dtype=np.int64).reshape(-1, 4, 4))
        roots = np.exp(2j * np.pi * np.arange(T.p) / T.p)
        sums = _induced_sums(
            self.left, self.right, ps, T.add, T.mul, self.q, T.res4.emb,
            th.const_inv_matrix, th.const_values, np.ascontiguousarray(th.x.matrix),
            F.add, F.mul, F.trace, roots,
        )
        return sums * self.q**12 / self.subgroup_order

    def induced_value(self, p) -> complex:
        return complex(self.induced_values(p)[0])

    def induced_value_numpy(self, p) -> complex:
        """Same as :meth:`induced_value` through the vectorised phi~_x; slower, used to cross-check."""
        m = self.ops.matmul(self.ops.matmul(self.left, p), self.right)
        vals = self.theta.phi_tilde(m, outside=0.0)
        return complex(vals.sum()) * self.q**12 / self.subgroup_order

    def _possible_residues(self, g) -> np.ndarray:
        """Residue keys of X for which (g, X; 0, g) has order dividing q^4 - 1 mod w."""
        F, q = self.tower.F, self.q
        fops = MatrixRing(F)
        Xb = unkey2(np.arange(q**4, dtype=np.int64), q)
        gb = np.asarray(g) % q
        p = _block(gb, Xb, np.zeros_like(Xb), gb)
        e = q**4 - 1
        out = np.broadcast_to(np.eye(4, dtype=np.int64), p.shape).copy()
        base = p
        while e:
            if e & 1:
                out = fops.matmul(out, base)
            base = fops.matmul(base, base)
            e >>= 1
        return np.nonzero(np.all(out == np.eye(4, dtype=np.int64), axis=(-1, -2)))[0]

    def value(self, g) -> complex:
        """Theta_{pi^delta_{N,psi}}(g) by the projection formula."""
        T, q, ops = self.tower, self.q, self.ops
        g = np.asarray(g, dtype=np.int64)
        ginv = ops.inv2(g)
        digits = unkey2(np.arange(q**4, dtype=np.int64), q)
        psi = T.psi0_values()
        total = 0j
        for rk in self._possible_residues(g):
            X = unkey2(rk, q) + q * digits
            gg = np.broadcast_to(g, X.shape)
            ps = _block(gg, X, np.zeros_like(X), gg)
            w = psi[ops.trace(ops.matmul(X, ginv))].conjugate()
            total += (self.induced_values(ps) * w).sum()
        return total / q**8

    # sub-sums of the J1 computation --------------------------------------
    def _conj_unipotent(self, M):
        """delta (I, M; 0, I) delta^-1 for a stack of 2x2 blocks."""
        eye = np.broadcast_to(np.eye(2, dtype=np.int64), M.shape)
        u = _block(eye, M, np.zeros_like(M), eye)
        return self.ops.matmul(self.ops.matmul(self.delta, u), self.delta_inv)

    def x_sum(self, S, R) -> complex:
        """sum over X in w M_2(o2) of phi~^(delta^-1)((I, S^-1 X R; 0, I)) conj(psi(X))."""
        T, q, ops = self.tower, self.q, self.ops
        X = q * unkey2(np.arange(q**4, dtype=np.int64), q)
        Sinv = ops.inv2(np.asarray(S))
        M = ops.matmul(ops.matmul(Sinv, X), np.asarray(R))
        vals = self.theta.phi_tilde(self._conj_unipotent(M))
        psi = T.psi0_values()[ops.trace(X)].conjugate()
        return complex((vals * psi).sum())

    def q_sum(self, S, R, A) -> complex:
        """sum over Q in M_2(o2) of phi~^(delta^-1)((I, w(S^-1 A Q - S^-1 Q R^-1 A R); 0, I))."""
        T, q, ops = self.tower, self.q, self.ops
        Qm = unkey2(np.arange(T.Q**4, dtype=np.int64), T.Q)
        S, R, A = (np.asarray(m, dtype=np.int64) for m in (S, R, A))
        Sinv, Rinv = ops.inv2(S), ops.inv2(R)
        t1 = ops.matmul(ops.matmul(Sinv, A), Qm)
        t2 = ops.matmul(ops.matmul(ops.matmul(ops.matmul(Sinv, Qm), Rinv), A), R)
        M = T.mul[q, ops.sub(t1, t2)]
        vals = self.theta.phi_tilde(self._conj_unipotent(M))
        return complex(vals.sum())


def sample_central_classes(table: ClassTable, k: int) -> list[int]:
    """Deterministic sample of ``k`` classes inside Z J1, always including the identity."""
    q = table.tower.q
    rb = table.reps % q
    scalar = (rb[:, 0, 1] == 0) & (rb[:, 1, 0] == 0) & (rb[:, 0, 0] == rb[:, 1, 1])
    ids = np.nonzero(scalar)[0]
    ident = int(table.classes_of(np.eye(2, dtype=np.int64)))
    rest = [int(i) for i in ids if i != ident]
    picks = [rest[int(j)] for j in np.linspace(0, len(rest) - 1, max(k - 1, 0)).round().astype(int)] if rest else []
    return [ident] + sorted(set(picks))[: max(k - 1, 0)]
