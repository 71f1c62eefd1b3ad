"""Irreducible characters of GL_2(F_q) from the classical closed forms.

Values are produced on arbitrary stacks of residue matrices, so the same code
serves the finite group itself (for validation) and inflation to GL_2(o2).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrices import GL2Fq, MatrixRing
from .tower import Tower


@dataclass(frozen=True)
class GL2Irrep:
    kind: str  # "det", "steinberg", "principal", "cuspidal"
    params: tuple[int, ...]
    dim: int


def _eigen_data(tower: Tower, mats):
    """Classify residue matrices by eigenvalue data.

    Returns ``kind`` (0 central, 1 non-semisimple, 2 split, 3 elliptic) and
    two eigenvalue logs: F_q logs for kinds 0-2, an F_{q^2} log in ``e1`` for kind 3.
    """
    F, R = tower.F, tower.res2
    q = F.q
    ops = MatrixRing(F)
    mats = np.asarray(mats)
    tr = ops.trace(mats)
    det = ops.det2(mats)
    four = F.from_int(4)
    disc = F.sub[F.mul[tr, tr], F.mul[four, det]]
    half = F.inv[F.from_int(2)]
    scalar = (mats[..., 0, 1] == 0) & (mats[..., 1, 0] == 0) & (mats[..., 0, 0] == mats[..., 1, 1])
    kind = np.where(disc == 0, np.where(scalar, 0, 1), np.where(F.is_square[disc], 2, 3))
    root = F.sqrt[np.where(F.is_square[disc], disc, 0)]
    lam = F.mul[half, F.add[tr, root]]
    mu = F.mul[half, F.sub[tr, root]]
    e0 = F.log[np.where(kind <= 2, lam, 1)]
    e1 = F.log[np.where(kind <= 2, mu, 1)]
    # elliptic: a root of X^2 - t X + n in F_{q^2}; index by (trace, norm)
    lut = _elliptic_lookup(tower)
    ell = lut[tr, det]
    e1 = np.where(kind == 3, R.log[np.where(kind == 3, ell, 1)], e1)
    return kind, e0, e1


_LUT_CACHE: dict[int, np.ndarray] = {}


def _elliptic_lookup(tower: Tower) -> np.ndarray:
    key = id(tower)
    if key not in _LUT_CACHE:
        F, R = tower.F, tower.res2
        q = F.q
        lut = np.zeros((q, q), dtype=np.int64)
        for z in range(1, R.Q):
            zq = R.power(z, q)
            t = int(R.add(z, zq))
            n = int(R.mul(z, zq))
            # trace and norm lie in F_q, whose indices are < q
            if t < q and n < q and zq != z:
                lut[t, n] = z
        _LUT_CACHE[key] = lut
    return _LUT_CACHE[key]


def _e(x):
    return np.exp(2j * np.pi * x)


def gl2_irreps(q: int) -> list[GL2Irrep]:
    out = []
    Qm = q * q - 1
    for i in range(q - 1):
        out.append(GL2Irrep("det", (i,), 1))
    for i in range(q - 1):
        out.append(GL2Irrep("steinberg", (i,), q))
    for i in range(q - 1):
        for j in range(i + 1, q - 1):
            out.append(GL2Irrep("principal", (i, j), q + 1))
    for j in range(Qm):
        jq = (j * q) % Qm
        if j < jq:
            out.append(GL2Irrep("cuspidal", (j,), q - 1))
    return out


def gl2_character_values(tower: Tower, irrep: GL2Irrep, mats) -> np.ndarray:
    """Values of a GL_2(F_q) irreducible character on a stack of residue matrices."""
    q = tower.q
    kind, e0, e1 = _eigen_data(tower, mats)
    Qm = q * q - 1
    # F_q^x sits in F_{q^2}^x as the (q+1)-th powers: log_{q^2}(a) = (q+1) log_q(a)
    # when the F_{q^2} generator's norm is the F_q generator; check that relation explicitly.
    shift = _fq_in_fq2_log_factor(tower)
    if irrep.kind in ("det", "steinberg"):
        (i,) = irrep.params
        a = lambda lg: _e(i * lg / (q - 1))
        det_central = a(2 * e0)
        det_split = a(e0 + e1)
        det_ell = a(_norm_log(tower, e1))
        if irrep.kind == "det":
            return np.select([kind == 0, kind == 1, kind == 2], [det_central, det_central, det_split], det_ell)
        return np.select(
            [kind == 0, kind == 1, kind == 2], [q * det_central, 0 * det_central, det_split], -det_ell
        )
    if irrep.kind == "principal":
        i, j = irrep.params
        A = lambda lg: _e(i * lg / (q - 1))
        B = lambda lg: _e(j * lg / (q - 1))
        return np.select(
            [kind == 0, kind == 1, kind == 2],
            [(q + 1) * A(e0) * B(e0), A(e0) * B(e0), A(e0) * B(e1) + A(e1) * B(e0)],
            0,
        )
    (j,) = irrep.params
    nu = lambda lg: _e(j * lg / Qm)
    nu_fq = nu(shift * e0)
    ell = nu(e1) + nu((e1 * q) % Qm)
    return np.select([kind == 0, kind == 1, kind == 2], [(q - 1) * nu_fq, -nu_fq, 0 * nu_fq], -ell)


def _fq_in_fq2_log_factor(tower: Tower) -> int:
    """Integer k with log_{q^2}(a) = k log_q(a) for a in F_q^x."""
    F, R = tower.F, tower.res2
    g = int(F.generator)  # F_q elements embed in F_{q^2} with the same index
    lg = int(R.log[g])
    # log_q(g) = 1
    return lg


def _norm_log(tower: Tower, e1) -> np.ndarray:
    """log_q of the norm of the F_{q^2} element with log ``e1``."""
    q = tower.q
    shift = _fq_in_fq2_log_factor(tower)
    # norm(z) = z^(q+1); its F_{q^2}-log is (q+1) e1, convert back to an F_q log
    lg2 = ((q + 1) * np.asarray(e1)) % (q * q - 1)
    # shift * log_q(a) = log_{q^2}(a) mod q^2-1; solve for log_q
    inv_table = {(shift * k) % (q * q - 1): k for k in range(q - 1)}
    return np.vectorize(lambda v: inv_table[int(v)])(lg2)


def gl2_table(tower: Tower) -> tuple[list[GL2Irrep], np.ndarray, GL2Fq]:
    """Character values of all irreducibles on all of GL_2(F_q), element by element."""
    G = GL2Fq(tower.F)
    irreps = gl2_irreps(tower.q)
    vals = np.array([gl2_character_values(tower, r, G.elements) for r in irreps])
    return irreps, vals, G


def validate_gl2_table(tower: Tower, tol: float = 1e-6) -> dict:
    irreps, vals, G = gl2_table(tower)
    gram = vals @ vals.conj().T / G.order
    dims = np.array([r.dim for r in irreps])
    return {
        "n_irreps": len(irreps),
        "sum_dim_sq": int(np.sum(dims**2)),
        "group_order": G.order,
        "orthonormal": bool(np.max(np.abs(gram - np.eye(len(irreps)))) < tol),
        "dims_match_identity": bool(
            np.allclose(vals[:, int(G.index_of(np.eye(2, dtype=np.int64)))], dims)
        ),
    }
