"""Quaternion scalars and dense quaternion matrices.

A quaternion a = a_r + a_i*i + a_j*j + a_k*k has one real and three imaginary
components, with i^2 = j^2 = k^2 = ijk = -1 (the product does not commute).
Matrices are stored as four stacked real component planes so that elementwise
operators stay plain numpy; products and decompositions go through the
complex-pair representation A = A1 + A2*j with A1 = r + i*1j, A2 = j + k*1j.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tolerances",
    "TOLERANCES",
    "Quaternion",
    "QMatrix",
    "hamilton",
    "conj_planes",
    "norm",
    "soft_threshold",
]


@dataclass(frozen=True)
class Tolerances:
    """Central numerical tolerances used by the library and its property tests."""

    algebra: float = 1e-12      # algebraic identities (associativity, inner products)
    svd: float = 1e-10          # relative SVD reconstruction / unitarity targets
    svd_pairing: float = 1e-9   # paired singular values of the complex embedding


TOLERANCES = Tolerances()


def hamilton(a, b):
    """Hamilton product of two (4, ...) component stacks, with broadcasting."""
    ar, ai, aj, ak = a
    br, bi, bj, bk = b
    return np.stack([
        ar * br - ai * bi - aj * bj - ak * bk,
        ar * bi + ai * br + aj * bk - ak * bj,
        ar * bj - ai * bk + aj * br + ak * bi,
        ar * bk + ai * bj - aj * bi + ak * br,
    ])


_CONJ_SIGNS = np.array([1.0, -1.0, -1.0, -1.0])


def conj_planes(p):
    """Quaternion conjugate of a (4, ...) component stack."""
    return p * _CONJ_SIGNS.reshape((4,) + (1,) * (np.ndim(p) - 1))


@dataclass(frozen=True)
class Quaternion:
    """A quaternion scalar."""

    r: float = 0.0
    i: float = 0.0
    j: float = 0.0
    k: float = 0.0

    def __post_init__(self):
        for name in ("r", "i", "j", "k"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def components(self):
        return np.array([self.r, self.i, self.j, self.k])

    def conjugate(self):
        return Quaternion(self.r, -self.i, -self.j, -self.k)

    def __abs__(self):
        return float(np.sqrt(self.r ** 2 + self.i ** 2 + self.j ** 2 + self.k ** 2))

    def __neg__(self):
        return Quaternion(-self.r, -self.i, -self.j, -self.k)

    def __add__(self, other):
        other = _as_quaternion(other)
        if other is None:
            return NotImplemented
        return Quaternion(self.r + other.r, self.i + other.i,
                          self.j + other.j, self.k + other.k)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_quaternion(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_quaternion(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _as_quaternion(other)
        if other is None:
            return NotImplemented
        return Quaternion(*hamilton(self.components, other.components))

    def __rmul__(self, other):
        other = _as_quaternion(other)
        if other is None:
            return NotImplemented
        return Quaternion(*hamilton(other.components, self.components))

    def __truediv__(self, other):
        if isinstance(other, numbers.Real):
            return Quaternion(self.r / other, self.i / other,
                              self.j / other, self.k / other)
        return NotImplemented


def _as_quaternion(value):
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, numbers.Real):
        return Quaternion(float(value))
    return None


class QMatrix:
    """Dense quaternion matrix held as a (4, n1, n2) float array of planes.

    Instances are treated as immutable values: every operation returns a new
    matrix, which makes them safe to share across threads.
    """

    __slots__ = ("planes",)

    def __init__(self, planes, copy=True):
        planes = np.array(planes, dtype=float, copy=copy)
        if planes.ndim != 3 or planes.shape[0] != 4:
            raise ValueError(f"expected (4, n1, n2) component planes, got {planes.shape}")
        self.planes = planes

    # -- construction -------------------------------------------------------

    @classmethod
    def zeros(cls, shape):
        n1, n2 = shape
        return cls(np.zeros((4, n1, n2)), copy=False)

    @classmethod
    def from_parts(cls, r=None, i=None, j=None, k=None):
        """Build from up to four real planes; missing parts are zero."""
        parts = [r, i, j, k]
        given = [np.asarray(p, dtype=float) for p in parts if p is not None]
        if not given:
            raise ValueError("at least one component plane is required")
        shape = given[0].shape
        planes = [np.zeros(shape) if p is None else np.asarray(p, dtype=float)
                  for p in parts]
        return cls(np.stack(planes), copy=False)

    @classmethod
    def from_complex_pair(cls, a1, a2):
        a1 = np.asarray(a1, dtype=complex)
        a2 = np.asarray(a2, dtype=complex)
        return cls(np.stack([a1.real, a1.imag, a2.real, a2.imag]), copy=False)

    def to_complex_pair(self):
        p = self.planes
        return p[0] + 1j * p[1], p[2] + 1j * p[3]

    def copy(self):
        return QMatrix(self.planes, copy=True)

    # -- structure ----------------------------------------------------------

    @property
    def shape(self):
        return self.planes.shape[1:]

    @property
    def n1(self):
        return self.planes.shape[1]

    @property
    def n2(self):
        return self.planes.shape[2]

    @property
    def r(self):
        return self.planes[0]

    @property
    def i(self):
        return self.planes[1]

    @property
    def j(self):
        return self.planes[2]

    @property
    def k(self):
        return self.planes[3]

    @property
    def is_pure(self):
        """True when the real plane is exactly zero (color-image encoding)."""
        return not np.any(self.planes[0])

    def __repr__(self):
        return f"QMatrix(shape={self.shape})"

    def __getitem__(self, key):
        if not (isinstance(key, tuple) and len(key) == 2):
            raise TypeError("indexing requires a (row, col) pair")
        a, b = key
        if isinstance(a, numbers.Integral) and isinstance(b, numbers.Integral):
            return Quaternion(*self.planes[:, a, b])
        if isinstance(a, slice) and isinstance(b, slice):
            return QMatrix(self.planes[:, a, b])
        raise TypeError("use either two integers or two slices")

    # -- algebra ------------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return QMatrix(self.planes + other.planes, copy=False)

    def __sub__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return QMatrix(self.planes - other.planes, copy=False)

    def __neg__(self):
        return QMatrix(-self.planes, copy=False)

    def __mul__(self, other):
        """Right multiplication by a real scalar/array or a quaternion scalar."""
        if isinstance(other, Quaternion):
            return QMatrix(hamilton(self.planes, other.components.reshape(4, 1, 1)),
                           copy=False)
        if isinstance(other, (numbers.Real, np.ndarray)):
            return QMatrix(self.planes * np.asarray(other, dtype=float), copy=False)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Quaternion):
            return QMatrix(hamilton(other.components.reshape(4, 1, 1), self.planes),
                           copy=False)
        if isinstance(other, (numbers.Real, np.ndarray)):
            return QMatrix(np.asarray(other, dtype=float) * self.planes, copy=False)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (numbers.Real, np.ndarray)):
            return QMatrix(self.planes / np.asarray(other, dtype=float), copy=False)
        return NotImplemented

    def __matmul__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        if self.n2 != other.n1:
            raise ValueError(f"dimension mismatch: {self.shape} @ {other.shape}")
        a1, a2 = self.to_complex_pair()
        b1, b2 = other.to_complex_pair()
        c1 = a1 @ b1 - a2 @ b2.conj()
        c2 = a1 @ b2 + a2 @ b1.conj()
        return QMatrix.from_complex_pair(c1, c2)

    def conj(self):
        return QMatrix(conj_planes(self.planes), copy=False)

    @property
    def H(self):
        """Conjugate transpose."""
        return QMatrix(conj_planes(self.planes).transpose(0, 2, 1))

    def abs(self):
        """Elementwise moduli as a real (n1, n2) array."""
        return np.sqrt((self.planes ** 2).sum(axis=0))

    def sign(self):
        """Elementwise unit-modulus directions; exact zeros stay zero."""
        m = self.abs()
        scale = np.zeros_like(m)
        np.divide(1.0, m, out=scale, where=m > 0)
        return QMatrix(self.planes * scale, copy=False)


def norm(A, kind="fro"):
    """Matrix norm of a quaternion matrix.

    kind: "l1" (sum of entry moduli), "linf" (max entry modulus),
    "fro" (Frobenius), "spectral" (largest singular value) or
    "nuclear" (sum of singular values).
    """
    if kind == "l1":
        return float(A.abs().sum())
    if kind == "linf":
        return float(A.abs().max())
    if kind == "fro":
        return float(np.sqrt((A.planes ** 2).sum()))
    if kind in ("spectral", "nuclear"):
        from .qsvd import singular_values

        s = singular_values(A)
        return float(s[0]) if kind == "spectral" else float(s.sum())
    raise ValueError(f"unknown norm kind: {kind!r}")


def soft_threshold(A, tau):
    """Shrink each entry's modulus by tau (floor at zero), keeping direction."""
    if tau <= 0:
        raise ValueError("threshold must be positive")
    m = A.abs()
    scale = np.zeros_like(m)
    np.divide(m - tau, m, out=scale, where=m > tau)
    return QMatrix(A.planes * scale, copy=False)
