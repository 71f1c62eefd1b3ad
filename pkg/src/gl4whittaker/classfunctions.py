"""Class functions on GL_2(o2): inner products, induction, restriction to J1."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .matrices import ClassTable, congruence_kernel, key2, unkey2

TOL = 1e-6


class NumericError(ArithmeticError):
    """An inner product that should be an integer is not, within tolerance."""


@dataclass(eq=False)
class ClassFunction:
    table: ClassTable
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.table.n_classes,):
            raise ValueError("class function has the wrong length")

    def _same(self, other):
        if other.table is not self.table:
            raise ValueError("class functions live on different tables")

    def __add__(self, other):
        self._same(other)
        return ClassFunction(self.table, self.values + other.values)

    def __sub__(self, other):
        self._same(other)
        return ClassFunction(self.table, self.values - other.values)

    def __mul__(self, c):
        if isinstance(c, ClassFunction):
            self._same(c)
            return ClassFunction(self.table, self.values * c.values)
        return ClassFunction(self.table, self.values * c)

    __rmul__ = __mul__

    def conj(self):
        return ClassFunction(self.table, self.values.conj())

    @property
    def degree(self) -> complex:
        return self.values[identity_class(self.table)]

    def allclose(self, other, tol: float = TOL) -> bool:
        self._same(other)
        return bool(np.max(np.abs(self.values - other.values), initial=0.0) < tol)

    def at(self, mats) -> np.ndarray:
        return self.values[self.table.classes_of(mats)]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["class_id", "re", "im"])
            for cid, val in enumerate(self.values):
                w.writerow([cid, repr(float(val.real)), repr(float(val.imag))])


def identity_class(table: ClassTable) -> int:
    return int(table.classes_of(np.eye(2, dtype=np.int64)))


def trivial(table: ClassTable) -> ClassFunction:
    return ClassFunction(table, np.ones(table.n_classes))


def inner_product(f: ClassFunction, g: ClassFunction) -> complex:
    f._same(g)
    t = f.table
    return complex(np.sum(t.sizes * f.values * g.values.conj()) / t.order)


def to_integer(z: complex, tol: float = TOL) -> int:
    n = int(round(z.real))
    if abs(z - n) >= tol:
        raise NumericError(f"expected an integer, got {z}")
    return n


def multiplicity(f: ClassFunction, g: ClassFunction, tol: float = TOL) -> int:
    return to_integer(inner_product(f, g), tol)


def gram(rows: np.ndarray, table: ClassTable) -> np.ndarray:
    """Gram matrix of a stack of class-function value vectors."""
    w = table.sizes / table.order
    return (rows * w) @ rows.conj().T


def induce(table: ClassTable, elements, chi_values) -> ClassFunction:
    """Induced character from a subgroup listed element by element.

    ``Ind(chi)(C) = [G:H] / |C| * sum over h in H meeting C of chi(h)``.
    """
    cls = table.classes_of(elements)
    return induce_from_classes(table, cls, chi_values)


def induce_from_classes(table: ClassTable, cls, chi_values) -> ClassFunction:
    cls = np.asarray(cls).reshape(-1)
    chi = np.asarray(chi_values, dtype=np.complex128).reshape(-1)
    if cls.shape != chi.shape:
        raise ValueError("one character value per subgroup element expected")
    if np.any(cls < 0):
        raise ValueError("subgroup contains non-invertible matrices")
    n = table.n_classes
    s = np.bincount(cls, weights=chi.real, minlength=n) + 1j * np.bincount(cls, weights=chi.imag, minlength=n)
    index = table.order / len(cls)
    return ClassFunction(table, index * s / table.sizes)


def decompose(f: ClassFunction, rows: np.ndarray, tol: float = TOL) -> np.ndarray:
    """Multiplicities of ``f`` against a complete stack of irreducible characters."""
    t = f.table
    raw = (rows.conj() * (t.sizes / t.order)) @ f.values
    mult = np.rint(raw.real).astype(np.int64)
    if np.max(np.abs(raw - mult), initial=0.0) >= tol:
        raise NumericError("non-integral multiplicity")
    if np.any(mult < 0):
        raise NumericError("negative multiplicity: not a character")
    recon = mult @ rows
    if np.max(np.abs(recon - f.values), initial=0.0) >= 1e-6 * max(1.0, abs(f.degree)):
        raise NumericError("decomposition does not reconstruct the class function")
    return mult


class KernelFourier:
    """Characters phi_B of J1 = I + w M_2(F_q) and restriction multiplicities.

    ``phi_B(I + w A) = psi0(w tr(B A)) = exp(2 pi i Tr(tr(B A)) / p)``.
    Rows and columns of :attr:`matrix` are indexed by residue keys (base q).
    """

    def __init__(self, table: ClassTable):
        self.table = table
        T = table.tower
        self.q, self.p = T.q, T.p
        F = T.F
        q = self.q
        A = unkey2(np.arange(q**4), q)
        from .matrices import MatrixRing

        ops = MatrixRing(F)
        # tr(B A) = sum_ij B_ij A_ji
        tr = np.zeros((q**4, q**4), dtype=np.int64)
        Bt = A.reshape(-1, 4)
        At = np.transpose(A, (0, 2, 1)).reshape(-1, 4)
        for k in range(4):
            tr = F.add[tr, F.mul[Bt[:, k][:, None], At[:, k][None, :]]]
        self.phase = F.trace[tr]
        self.matrix = np.exp(2j * np.pi * self.phase / self.p)
        self.kernel_classes = table.classes_of(congruence_kernel(T))

    def restriction(self, f: ClassFunction) -> np.ndarray:
        """Values of ``f`` on I + w A for every residue key A."""
        return f.values[self.kernel_classes]

    def multiplicities(self, f: ClassFunction) -> np.ndarray:
        vals = self.restriction(f)
        raw = self.matrix.conj() @ vals / self.q**4
        out = np.rint(raw.real).astype(np.int64)
        if np.max(np.abs(raw - out), initial=0.0) >= TOL:
            raise NumericError("non-integral J1 multiplicity")
        return out

    def phi(self, B) -> np.ndarray:
        return self.matrix[int(key2(np.asarray(B), self.q))]
