"""The ring tower o2 ⊂ O2quad ⊂ O2quartic over a finite field F_q.

``o2`` is a length-two local ring with residue field F_q, either
``F_q[t]/(t^2)`` (equal characteristic) or the length-two Witt ring
``(Z/p^2)[y]/(m)`` (mixed characteristic).  An element of ``o2`` is stored as
the integer ``r + q*s`` where ``r`` is its reduction and ``s`` its
uniformizer digit, so ``x = lift(r) + w*lift(s)`` with ``w`` the uniformizer
(``t`` or ``p``).  Constant lifts of F_q are therefore the integers ``< q``
and ``w*lift(s)`` is the integer ``q*s`` in both flavors.

The unramified extensions are ``O2quad = o2[z]/(z^2 - 2a z + N)`` and
``O2quartic = o2[beta]/(beta^4 - 2a beta^2 + N)`` with ``N = a^2 - b^2 alpha``,
written in the ordered bases ``{1, z}`` and ``{1, beta^2, beta, beta^3}``.
"""
from __future__ import annotations

import cmath
import json
from dataclasses import dataclass
from enum import Enum, IntEnum
from functools import lru_cache

import numpy as np

from .fields import FieldParams, FiniteField, field_arith, _prime_factors


class RingFlavor(str, Enum):
    EQUAL = "eq"
    MIXED = "witt"


class Level(IntEnum):
    O2 = 1
    O2QUAD = 2
    O2QUARTIC = 4


class TowerError(ValueError):
    pass


@dataclass(frozen=True)
class TowerParams:
    field: FieldParams
    flavor: RingFlavor
    alpha: int
    a: int
    b: int

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def p(self) -> int:
        return self.field.p

    def _vec(self, x: int) -> list[int]:
        p = self.field.p
        return [(x // p**k) % p for k in range(self.field.f)]

    def to_json(self) -> str:
        return json.dumps(
            {
                "p": self.field.p,
                "f": self.field.f,
                "modulus": list(self.field.modulus),
                "flavor": self.flavor.value,
                "alpha": self._vec(self.alpha),
                "a": self._vec(self.a),
                "b": self._vec(self.b),
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "TowerParams":
        d = json.loads(text)
        p = d["p"]
        field = FieldParams(p, d["f"], tuple(d["modulus"]))

        def idx(v):
            return sum(int(c) * p**k for k, c in enumerate(v))

        return cls(field, RingFlavor(d["flavor"]), idx(d["alpha"]), idx(d["a"]), idx(d["b"]))


def _quad_mul(F: FiniteField, alpha: int, x, y):
    """Multiply ``x0 + x1*sqrt(alpha)`` by ``y0 + y1*sqrt(alpha)`` in F_q(sqrt(alpha))."""
    m, a = F.mul, F.add
    r0 = a[m[x[0], y[0]], m[alpha, m[x[1], y[1]]]]
    r1 = a[m[x[0], y[1]], m[x[1], y[0]]]
    return int(r0), int(r1)


def _quad_pow(F, alpha, x, e):
    result = (1, 0)
    while e:
        if e & 1:
            result = _quad_mul(F, alpha, result, x)
        x = _quad_mul(F, alpha, x, x)
        e >>= 1
    return result


def check_tower_invariants(params: TowerParams) -> dict[str, bool]:
    F = field_arith(params.field)
    q = F.q
    minus_one = int(F.neg[1])
    alpha, a, b = params.alpha, params.a, params.b
    norm = int(F.sub[F.mul[a, a], F.mul[alpha, F.mul[b, b]]])
    return {
        "alpha_nonsquare": alpha != 0 and F.pow(alpha, (q - 1) // 2) == minus_one,
        "a_plus_b_sqrt_alpha_nonsquare": _quad_pow(F, alpha, (a, b), (q * q - 1) // 2) == (minus_one, 0),
        "norm_nonsquare": norm != 0 and F.pow(norm, (q - 1) // 2) == minus_one,
    }


def find_tower_params(field: FieldParams, flavor: RingFlavor = RingFlavor.EQUAL) -> TowerParams:
    """First admissible ``(alpha, a, b)``.

    Scan order: ``alpha`` ascending over F_q^x, then ``(a, b)`` lexicographic,
    all in the integer element order of :mod:`fields`.
    """
    flavor = RingFlavor(flavor)
    F = field_arith(field)
    q = F.q
    alpha = next(x for x in range(1, q) if not F.is_square[x])
    for a in range(q):
        for b in range(q):
            cand = TowerParams(field, flavor, alpha, a, b)
            if all(check_tower_invariants(cand).values()):
                return cand
    raise AssertionError("no admissible (a, b)")  # existence is guaranteed for odd q


# ---------------------------------------------------------------------------
# table-based base ring o2


def _o2_tables(F: FiniteField, flavor: RingFlavor):
    q, p, f = F.q, F.p, F.f
    Q = q * q
    idx = np.arange(Q)
    r, s = idx % q, idx // q
    if flavor is RingFlavor.EQUAL:
        add = F.add[r[:, None], r[None, :]] + q * F.add[s[:, None], s[None, :]]
        sub = F.sub[r[:, None], r[None, :]] + q * F.sub[s[:, None], s[None, :]]
        neg = F.neg[r] + q * F.neg[s]
        mul = F.mul[r[:, None], r[None, :]] + q * F.add[
            F.mul[r[:, None], s[None, :]], F.mul[s[:, None], r[None, :]]
        ]
        phase = (p * (F.trace[r] + F.trace[s])) % (p * p)
        return add, sub, neg, mul, phase
    # mixed characteristic: coefficient vectors mod p^2 of polynomials mod the lifted modulus
    pp = p * p
    coef = (F.coeffs[r] + p * F.coeffs[s]) % pp  # (Q, f)
    weights = F._weights

    def encode(c):
        c = c % pp
        return (c % p) @ weights + q * ((c // p) @ weights)

    add = encode(coef[:, None, :] + coef[None, :, :])
    sub = encode(coef[:, None, :] - coef[None, :, :])
    neg = encode(-coef)
    if f == 1:
        mul = encode(coef[:, None, :] * coef[None, :, :])
    else:
        conv = np.zeros((Q, Q, 2 * f - 1), dtype=np.int64)
        for i in range(f):
            for j in range(f):
                conv[:, :, i + j] += coef[:, None, i] * coef[None, :, j]
        conv %= pp
        mod = np.array(F.params.modulus, dtype=np.int64)
        for k in range(2 * f - 2, f - 1, -1):
            c = conv[:, :, k].copy()
            conv[:, :, k] = 0
            for i in range(f):
                conv[:, :, k - f + i] -= c * mod[i]
            conv %= pp
        mul = encode(conv[:, :, :f])
    # regular-representation trace over Z/p^2 of multiplication by y^k
    basis_trace = np.zeros(f, dtype=np.int64)
    mod = list(F.params.modulus)
    for k in range(f):
        tr = 0
        for j in range(f):
            # y^k * y^j reduced, coefficient of y^j
            poly = [0] * (k + j) + [1]
            while len(poly) > f:
                c = poly.pop()
                for i in range(f):
                    poly[len(poly) - f + i] = (poly[len(poly) - f + i] - c * mod[i]) % pp
            poly += [0] * (f - len(poly))
            tr += poly[j]
        basis_trace[k] = tr % pp
    phase = (coef @ basis_trace) % pp
    return add, sub, neg, mul, phase


class ResidueField:
    """F_{q^d} realised as the reduction of a tower level, in the level basis.

    Elements are integers ``sum(coord_k * q**k)``.
    """

    def __init__(self, F: FiniteField, level: Level, a: int, norm: int):
        self.F = F
        self.d = int(level)
        self.level = level
        q, d = F.q, self.d
        self.Q = q**d
        self.coords = np.array(
            [[(i // q**k) % q for k in range(d)] for i in range(self.Q)], dtype=np.int64
        ).reshape(self.Q, d)
        self._weights = q ** np.arange(d, dtype=np.int64)
        self._a, self._norm = a, norm
        # regular representation: column j = coords of (x * basis_j)
        basis = np.eye(d, dtype=np.int64)
        emb = np.zeros((self.Q, d, d), dtype=np.int64)
        for j in range(d):
            emb[:, :, j] = level_mul(F, level, a, norm, self.coords, basis[j][None, :])
        self.emb = emb
        self.generator = self._find_generator()
        g = self.coords[self.generator]
        self.exp = np.zeros(self.Q - 1, dtype=np.int64)
        x = np.zeros(d, dtype=np.int64)
        x[0] = 1
        for k in range(self.Q - 1):
            self.exp[k] = int(x @ self._weights)
            x = self.emb[self.generator] @ x % q if F.f == 1 else self._mat_vec(self.emb[self.generator], x)
        self.log = np.full(self.Q, -1, dtype=np.int64)
        self.log[self.exp] = np.arange(self.Q - 1)
        if (self.log[1:] < 0).any():
            raise AssertionError("generator does not generate")

    def _mat_vec(self, M, v):
        F = self.F
        out = np.zeros(self.d, dtype=np.int64)
        for i in range(self.d):
            acc = 0
            for j in range(self.d):
                acc = F.add[acc, F.mul[M[i, j], v[j]]]
            out[i] = acc
        return out

    def index(self, coords) -> np.ndarray:
        return np.asarray(coords) @ self._weights

    def mul(self, x, y):
        x, y = np.asarray(x), np.asarray(y)
        out = self.exp[(self.log[x] + self.log[y]) % (self.Q - 1)]
        return np.where((x == 0) | (y == 0), 0, out)

    def add(self, x, y):
        cx, cy = self.coords[np.asarray(x)], self.coords[np.asarray(y)]
        return self.F.add[cx, cy] @ self._weights

    def inv(self, x):
        x = np.asarray(x)
        return self.exp[(-self.log[x]) % (self.Q - 1)]

    def power(self, x: int, e: int) -> int:
        if x == 0:
            return 0 if e else 1
        return int(self.exp[(int(self.log[x]) * e) % (self.Q - 1)])

    def _find_generator(self) -> int:
        q, d = self.F.q, self.d
        factors = _prime_factors(self.Q - 1)
        for g in range(1, self.Q):
            if all(self._slow_pow(g, (self.Q - 1) // r) != 1 for r in factors):
                return g
        raise AssertionError("no generator")

    def _slow_pow(self, g: int, e: int) -> int:
        M = self.emb[g]
        result = np.zeros(self.d, dtype=np.int64)
        result[0] = 1
        base = M
        while e:
            if e & 1:
                result = self._mat_vec(base, result)
            base = np.stack([self._mat_vec(base, base[:, j]) for j in range(self.d)], axis=1)
            e >>= 1
        return int(result @ self._weights)

    def trace_to_fq(self, x) -> np.ndarray:
        """Tr_{F_{q^d}/F_q} as the trace of the regular representation."""
        E = self.emb[np.asarray(x)]
        F = self.F
        acc = np.zeros(E.shape[:-2], dtype=np.int64)
        for i in range(self.d):
            acc = F.add[acc, E[..., i, i]]
        return acc


def level_mul(R, level: Level, a, norm, x, y):
    """Vectorised product in a tower level over a table ring ``R`` (needs ``add, sub, mul``).

    ``x, y`` are coordinate arrays of shape ``(..., d)`` in the level basis.
    """
    add, sub, mul = R.add, R.sub, R.mul
    x, y = np.broadcast_arrays(np.asarray(x), np.asarray(y))
    if level == Level.O2:
        return mul[x, y]
    if level == Level.O2QUAD:
        px, py = x, y
        deg = 2
    else:
        # basis {1, b^2, b, b^3} -> powers b^0..b^3
        order = [0, 2, 1, 3]
        px, py = x[..., order], y[..., order]
        deg = 4
    shape = x.shape[:-1]
    c = [np.zeros(shape, dtype=np.int64) for _ in range(2 * deg - 1)]
    for i in range(deg):
        for j in range(deg):
            c[i + j] = add[c[i + j], mul[px[..., i], py[..., j]]]
    two_a = add[a, a]
    step = 1 if level == Level.O2QUAD else 2
    # generator g with g^{2 step} = 2a g^step - N
    for k in range(2 * deg - 2, deg - 1, -1):
        ck = c[k]
        c[k - step] = add[c[k - step], mul[two_a, ck]]
        c[k - 2 * step] = sub[c[k - 2 * step], mul[norm, ck]]
    out = np.stack(c[:deg], axis=-1)
    if level == Level.O2QUARTIC:
        out = out[..., [0, 2, 1, 3]]
    return out


class Tower:
    """Arithmetic context for a :class:`TowerParams`.  Use :func:`tower_arith`."""

    def __init__(self, params: TowerParams):
        self.params = params
        self.flavor = params.flavor
        F = field_arith(params.field)
        self.F = F
        self.p, self.q = F.p, F.q
        self.Q = self.q**2
        self.add, self.sub, self.neg, self.mul, self.psi_phase = _o2_tables(F, params.flavor)
        units = np.arange(self.Q) % self.q != 0
        inv = np.full(self.Q, -1, dtype=np.int64)
        rows, cols = np.nonzero(self.mul == 1)
        inv[rows] = cols
        inv[~units] = -1
        self.inv = inv
        self.a_hat = params.a
        self.alpha_hat = params.alpha
        self.b_hat = params.b
        # lifted norm computed in o2 from the constant lifts
        m, s = self.mul, self.sub
        self.norm_hat = int(s[m[params.a, params.a], m[params.alpha, m[params.b, params.b]]])
        self.norm = self.norm_hat % self.q
        self.res2 = ResidueField(F, Level.O2QUAD, params.a, self.norm)
        self.res4 = ResidueField(F, Level.O2QUARTIC, params.a, self.norm)
        self.uniformizer = self.q  # integer encoding of w

    # -- o2 helpers ---------------------------------------------------------
    def psi0_values(self) -> np.ndarray:
        pp = self.p * self.p
        return np.exp(2j * np.pi * self.psi_phase / pp)

    def residue(self, level: Level) -> ResidueField | FiniteField:
        return {Level.O2: self.F, Level.O2QUAD: self.res2, Level.O2QUARTIC: self.res4}[Level(level)]

    def level_mul(self, level: Level, x, y):
        return level_mul(self, Level(level), self.a_hat, self.norm_hat, x, y)

    # -- element constructors ----------------------------------------------
    def elem(self, level: Level, coords) -> "TowerElem":
        level = Level(level)
        coords = tuple(int(c) for c in coords)
        if len(coords) != int(level):
            raise TowerError("coordinate count does not match level")
        if any(c < 0 or c >= self.Q for c in coords):
            raise TowerError("coordinate out of range")
        return TowerElem(self, level, coords)

    def from_o2(self, level: Level, x: int) -> "TowerElem":
        return self.elem(level, (x,) + (0,) * (int(level) - 1))

    def one(self, level: Level = Level.O2) -> "TowerElem":
        return self.from_o2(level, 1)

    def zero(self, level: Level = Level.O2) -> "TowerElem":
        return self.from_o2(level, 0)

    def const_lift(self, level: Level, residue_index: int) -> "TowerElem":
        R = self.residue(level)
        coords = R.coords[residue_index] if int(level) > 1 else [residue_index]
        return self.elem(level, coords)

    def beta(self) -> "TowerElem":
        return self.elem(Level.O2QUARTIC, (0, 0, 1, 0))

    def beta_sq(self, level: Level = Level.O2QUAD) -> "TowerElem":
        if Level(level) == Level.O2QUAD:
            return self.elem(Level.O2QUAD, (0, 1))
        return self.elem(Level.O2QUARTIC, (0, 1, 0, 0))

    def varpi(self, level: Level = Level.O2) -> "TowerElem":
        return self.from_o2(level, self.q)

    def unit_count(self, level: Level) -> int:
        d = int(level)
        return (self.q**d - 1) * self.q**d

    def __repr__(self) -> str:
        return f"Tower(q={self.q}, flavor={self.flavor.value})"


@lru_cache(maxsize=None)
def tower_arith(params: TowerParams) -> Tower:
    return Tower(params)


@dataclass(frozen=True, eq=False)
class TowerElem:
    tower: Tower
    level: Level
    coords: tuple[int, ...]

    def _check(self, other: "TowerElem"):
        if not isinstance(other, TowerElem):
            return NotImplemented
        if other.tower is not self.tower or other.level != self.level:
            raise TowerError("elements live at different tower levels")
        return other

    def __eq__(self, other):
        if not isinstance(other, TowerElem):
            return NotImplemented
        return self.tower is other.tower and self.level == other.level and self.coords == other.coords

    def __hash__(self):
        return hash((id(self.tower), int(self.level), self.coords))

    def __add__(self, other):
        other = self._check(other)
        add = self.tower.add
        return TowerElem(self.tower, self.level, tuple(int(add[x, y]) for x, y in zip(self.coords, other.coords)))

    def __sub__(self, other):
        other = self._check(other)
        sub = self.tower.sub
        return TowerElem(self.tower, self.level, tuple(int(sub[x, y]) for x, y in zip(self.coords, other.coords)))

    def __neg__(self):
        neg = self.tower.neg
        return TowerElem(self.tower, self.level, tuple(int(neg[x]) for x in self.coords))

    def __mul__(self, other):
        if isinstance(other, int):
            other = self.tower.from_o2(self.level, other)
        other = self._check(other)
        out = self.tower.level_mul(self.level, np.array(self.coords), np.array(other.coords))
        return TowerElem(self.tower, self.level, tuple(int(c) for c in np.atleast_1d(out)))

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.tower.one(self.level)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def reduce(self) -> int:
        """Residue index of the reduction mod the uniformizer."""
        q = self.tower.q
        return int(sum((c % q) * q**k for k, c in enumerate(self.coords)))

    def digit(self) -> int:
        """Residue index of the uniformizer digit."""
        q = self.tower.q
        return int(sum((c // q) * q**k for k, c in enumerate(self.coords)))

    def is_unit(self) -> bool:
        return self.reduce() != 0

    def inverse(self) -> "TowerElem":
        if not self.is_unit():
            raise TowerError("not a unit")
        return self ** (self.tower.unit_count(self.level) - 1)

    def __repr__(self) -> str:
        return f"TowerElem({self.level.name}, {self.coords})"


def psi0(x: TowerElem) -> complex:
    """The fixed additive character of o2."""
    if x.level != Level.O2:
        raise TowerError("psi0 is defined on o2 only")
    T = x.tower
    return cmath.exp(2j * cmath.pi * int(T.psi_phase[x.coords[0]]) / (T.p * T.p))


def teichmuller(x: TowerElem) -> TowerElem:
    """``x**Q`` for residue field order Q: the multiplicative lift of the reduction of ``x``."""
    if not x.is_unit():
        raise TowerError("teichmuller lift needs a unit")
    return x ** (x.tower.q ** int(x.level))


def _split_over(y: TowerElem, to_level: Level):
    """Coordinates of ``y`` over ``to_level`` in the relative basis."""
    c = y.coords
    if y.level == Level.O2QUARTIC and to_level == Level.O2QUAD:
        # y = (c0 + c1 z) + (c2 + c3 z) beta
        return [(c[0], c[1]), (c[2], c[3])]
    return [(ci,) for ci in c]


def rel_trace(x: TowerElem, from_level: Level, to_level: Level) -> TowerElem:
    """Trace of multiplication by ``x`` on ``from_level`` as a free ``to_level``-module."""
    from_level, to_level = Level(from_level), Level(to_level)
    if x.level != from_level:
        raise TowerError("element not at from_level")
    if int(from_level) % int(to_level) or from_level == to_level and False:
        raise TowerError("levels not nested")
    if int(to_level) > int(from_level):
        raise TowerError("levels not nested")
    T = x.tower
    if from_level == to_level:
        return x
    if to_level == Level.O2:
        basis = [T.elem(from_level, np.eye(int(from_level), dtype=int)[j]) for j in range(int(from_level))]
        acc = 0
        for j, e in enumerate(basis):
            acc = int(T.add[acc, (x * e).coords[j]])
        return T.from_o2(Level.O2, acc)
    # O2QUARTIC over O2QUAD, relative basis {1, beta}
    one, beta = T.one(Level.O2QUARTIC), T.beta()
    c0 = _split_over(x * one, to_level)[0]
    c1 = _split_over(x * beta, to_level)[1]
    return T.elem(Level.O2QUAD, c0) + T.elem(Level.O2QUAD, c1)


def o2_unit_split(T: Tower) -> tuple[np.ndarray, np.ndarray]:
    """Teichmuller lifts of F_q and the principal-unit digit of every unit of o2.

    Every unit factors uniquely as ``teich[r] * (1 + w s)``; returns ``teich``
    (length q, index 0 unused) and ``digit`` (length q^2, -1 on non-units).
    """
    q = T.q
    teich = np.zeros(q, dtype=np.int64)
    for r in range(1, q):
        teich[r] = teichmuller(T.from_o2(Level.O2, r)).coords[0]
    units = np.arange(T.Q)
    digit = np.full(T.Q, -1, dtype=np.int64)
    is_unit = units % q != 0
    u = units[is_unit]
    principal = T.mul[u, T.inv[teich[u % q]]]
    if np.any(principal % q != 1):
        raise AssertionError("unit split failed")
    digit[is_unit] = principal // q
    return teich, digit


def o2_unit_characters(T: Tower) -> tuple[list[tuple[int, int]], np.ndarray]:
    """All characters of o2^x as rows of values on o2 indices (0 on non-units).

    The character ``(i, c)`` sends ``teich[r] (1 + w s)`` to
    ``exp(2 pi i (i log r / (q - 1) + Tr(c s) / p))``.
    """
    F, q, p = T.F, T.q, T.p
    teich, digit = o2_unit_split(T)
    idx = np.arange(T.Q)
    unit = idx % q != 0
    lg = np.where(unit, F.log[np.where(unit, idx % q, 1)], 0)
    labels, rows = [], []
    for i in range(q - 1):
        for c in range(q):
            ph = i * lg / (q - 1) + F.trace[F.mul[c, np.where(unit, digit, 0)]] / p
            rows.append(np.where(unit, np.exp(2j * np.pi * ph), 0))
            labels.append((i, c))
    return labels, np.array(rows)
