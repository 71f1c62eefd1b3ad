"""Prime-power finite fields F_q = F_p[y]/(m) with dense lookup tables.

Elements are integers ``0 <= i < q``; the integer ``i = sum(c_k * p**k)``
encodes the polynomial ``sum(c_k * y**k)``.  This integer order is the fixed
element ordering used by every deterministic scan in the package.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np


class FieldError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# polynomials over F_p as coefficient lists, lowest degree first

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_sub(a, b, p):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _poly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _poly_mod(a, m, p):
    a = _trim(a)
    m = _trim(m)
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) >= len(m):
        c = (a[-1] * inv_lead) % p
        shift = len(a) - len(m)
        for i, y in enumerate(m):
            a[shift + i] = (a[shift + i] - c * y) % p
        a = _trim(a)
    return a


def _poly_gcd(a, b, p):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _poly_mod(a, b, p)
    return a


def _poly_powmod(base, e, m, p):
    result = [1]
    base = _poly_mod(base, m, p)
    while e:
        if e & 1:
            result = _poly_mod(_poly_mul(result, base, p), m, p)
        base = _poly_mod(_poly_mul(base, base, p), m, p)
        e >>= 1
    return result


def is_irreducible(modulus, p: int) -> bool:
    """Rabin's test: ``x^(p^f) = x mod m`` and ``gcd(x^(p^(f/r)) - x, m) = 1``."""
    m = _trim(modulus)
    f = len(m) - 1
    if f < 1:
        return False
    if f == 1:
        return True
    x = [0, 1]
    if _poly_sub(_poly_powmod(x, p**f, m, p), x, p):
        return False
    for r in _prime_factors(f):
        h = _poly_sub(_poly_powmod(x, p ** (f // r), m, p), x, p)
        g = _poly_gcd(h, m, p)
        if len(g) > 1:
            return False
    return True


@dataclass(frozen=True)
class FieldParams:
    p: int
    f: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p**self.f


def make_field(p: int, f: int = 1) -> FieldParams:
    """Field parameters with the lexicographically smallest monic irreducible modulus.

    Candidates are compared on their coefficient lists, lowest degree first.
    For ``f == 1`` the modulus is ``x`` and the field is ``F_p`` itself.
    """
    if not isinstance(p, int) or not _is_prime(p):
        raise FieldError(f"p={p} is not prime")
    if p == 2:
        raise FieldError("p = 2 is excluded (odd residue characteristic required)")
    if f < 1:
        raise FieldError("degree f must be positive")
    for low in product(range(p), repeat=f):
        modulus = tuple(low) + (1,)
        if is_irreducible(modulus, p):
            return FieldParams(p, f, modulus)
    raise AssertionError("no irreducible polynomial found")  # unreachable


class FiniteField:
    """Lookup-table arithmetic for F_q.  Use :func:`field_arith` to get a cached instance."""

    def __init__(self, params: FieldParams):
        self.params = params
        p, f = params.p, params.f
        self.p, self.f, self.q = p, f, params.q
        q = self.q
        self.coeffs = np.array(
            [[(i // p**k) % p for k in range(f)] for i in range(q)], dtype=np.int64
        ).reshape(q, f)
        weights = p ** np.arange(f, dtype=np.int64)
        self._weights = weights

        c = self.coeffs
        self.add = ((c[:, None, :] + c[None, :, :]) % p) @ weights
        self.sub = ((c[:, None, :] - c[None, :, :]) % p) @ weights
        self.neg = ((-c) % p) @ weights

        mod = list(params.modulus)
        mul = np.zeros((q, q), dtype=np.int64)
        for i in range(q):
            for j in range(i, q):
                prod = _poly_mod(_poly_mul(_trim(c[i]), _trim(c[j]), p), mod, p) if f > 1 else \
                    [(int(c[i, 0]) * int(c[j, 0])) % p]
                idx = sum(int(v) * p**k for k, v in enumerate(prod))
                mul[i, j] = mul[j, i] = idx
        self.mul = mul
        inv = np.full(q, -1, dtype=np.int64)
        for i in range(1, q):
            inv[i] = int(np.nonzero(mul[i] == 1)[0][0])
        self.inv = inv

        # absolute trace F_q -> F_p, as an integer in [0, p)
        self.trace = np.array(
            [self.coeffs[self._sum_field(i), 0] for i in range(q)], dtype=np.int64
        )

        self.generator = self._find_generator()
        self.exp = np.zeros(q - 1, dtype=np.int64)
        x = 1
        for k in range(q - 1):
            self.exp[k] = x
            x = int(mul[x, self.generator])
        self.log = np.full(q, -1, dtype=np.int64)
        self.log[self.exp] = np.arange(q - 1)
        self.is_square = np.zeros(q, dtype=bool)
        self.is_square[self.exp[0::2]] = True
        # smallest square root of each square, -1 for non-squares
        self.sqrt = np.full(q, -1, dtype=np.int64)
        for y in range(q - 1, -1, -1):
            self.sqrt[int(mul[y, y])] = y

    def _sum_field(self, i: int) -> int:
        s, y = 0, i
        for _ in range(self.f):
            s = int(self.add[s, y])
            y = self.pow(y, self.p)
        return s

    def pow(self, x: int, e: int) -> int:
        result = 1
        x = int(x)
        while e:
            if e & 1:
                result = int(self.mul[result, x])
            x = int(self.mul[x, x])
            e >>= 1
        return result

    def _find_generator(self) -> int:
        q = self.q
        factors = _prime_factors(q - 1)
        for g in range(1, q):
            if all(self.pow(g, (q - 1) // r) != 1 for r in factors):
                return g
        raise AssertionError("multiplicative group has no generator")

    def from_int(self, n: int) -> int:
        """Image of the integer ``n`` in the prime subfield."""
        return n % self.p

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def __repr__(self) -> str:
        return f"FiniteField(q={self.q}, modulus={self.params.modulus})"


@lru_cache(maxsize=None)
def field_arith(params: FieldParams) -> FiniteField:
    return FiniteField(params)
