"""Exact integer arithmetic in Z[zeta_e] on the power basis 1, z, ..., z^(phi(e)-1).

Values are integer coefficient vectors reduced modulo the e-th cyclotomic
polynomial.  Character values are algebraic integers, so no denominators
appear at this level; rational results of inner products are handled by
the callers with fractions.Fraction.

Reduction tables are built once per conductor e.  Multiplication is a
64-bit integer convolution followed by folding the high part through the
reduction table; every operation checks a conservative overflow bound, so
results are exact or an OverflowError is raised (never silently wrong).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["cyclotomic_polynomial", "CycloContext", "Cyclo"]


@lru_cache(maxsize=None)
def cyclotomic_polynomial(e: int) -> tuple[int, ...]:
    """Little-endian integer coefficients of the e-th cyclotomic polynomial."""
    if e < 1:
        raise ValueError("conductor must be positive")
    if e == 1:
        return (-1, 1)
    f = [-1] + [0] * (e - 1) + [1]  # x^e - 1
    for d in range(1, e):
        if e % d == 0:
            f = _divexact(f, list(cyclotomic_polynomial(d)))
    return tuple(f)


def _divexact(a, b):
    """Exact division of integer polynomials, b monic; remainder must vanish."""
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = a[i + len(b) - 1]
        out[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    if any(a[: len(b) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


_MAX_ABS = 1 << 40  # guard for reduction-table entries


class CycloContext:
    """Shared tables for Z[zeta_e]: reduction of every power z^j, j < e."""

    def __init__(self, e: int):
        phi_poly = cyclotomic_polynomial(e)
        self.e = e
        self.phi = len(phi_poly) - 1
        self.poly = phi_poly
        # red[j] = integer vector of x^j mod Phi_e over the power basis
        rows = []
        cur = [0] * self.phi
        cur[0] = 1
        head = [-c for c in phi_poly[:-1]]  # x^phi = head
        for _ in range(e):
            rows.append(list(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                for i, h in enumerate(head):
                    cur[i] += top * h
        if max(abs(c) for row in rows for c in row) >= _MAX_ABS:
            raise OverflowError(f"reduction table for e={e} exceeds the integer guard")
        self.red = np.array(rows, dtype=np.int64)
        self.red_max = int(np.abs(self.red).max())
        # conjugation z^a -> z^(-a), as a matrix on the power basis
        self.conj_mat = self.red[(-np.arange(self.phi)) % e]
        self._fold = self.red[np.arange(self.phi, 2 * self.phi - 1) % e] if self.phi > 1 else None
        self._galois = {}

    def zero(self) -> "Cyclo":
        return Cyclo(self, np.zeros(self.phi, dtype=np.int64))

    def one(self) -> "Cyclo":
        return self.from_integer(1)

    def from_integer(self, c: int) -> "Cyclo":
        v = np.zeros(self.phi, dtype=np.int64)
        v[0] = c
        return Cyclo(self, v)

    def root(self, j: int) -> "Cyclo":
        """zeta_e^j as an exact value."""
        return Cyclo(self, self.red[j % self.e].copy())

    def from_root_multiplicities(self, o: int, mults) -> "Cyclo":
        """sum_j mults[j] * zeta_o^j for o dividing e."""
        if self.e % o != 0:
            raise ValueError(f"order {o} does not divide conductor {self.e}")
        mults = np.asarray(mults, dtype=np.int64)
        pos = (np.arange(len(mults)) * (self.e // o)) % self.e
        return Cyclo(self, mults @ self.red[pos])

    def galois_matrix(self, t: int) -> np.ndarray:
        """Basis action of zeta -> zeta^t for gcd(t, e) = 1."""
        t %= self.e
        if np.gcd(t, self.e) != 1:
            raise ValueError(f"galois exponent {t} not coprime to {self.e}")
        if t not in self._galois:
            self._galois[t] = self.red[(t * np.arange(self.phi)) % self.e]
        return self._galois[t]

    def complex_basis(self) -> np.ndarray:
        """Float images of the power basis, for test oracles only."""
        z = np.exp(2j * np.pi / self.e)
        return z ** np.arange(self.phi)

    def __repr__(self):
        return f"CycloContext(e={self.e}, phi={self.phi})"


class Cyclo:
    """An element of Z[zeta_e] as a reduced power-basis vector."""

    __slots__ = ("ctx", "vec")

    def __init__(self, ctx: CycloContext, vec: np.ndarray):
        self.ctx = ctx
        self.vec = vec

    def _coerce(self, other):
        if isinstance(other, Cyclo):
            if other.ctx is not self.ctx and other.ctx.e != self.ctx.e:
                raise ValueError("mixed cyclotomic conductors")
            return other.vec
        if isinstance(other, (int, np.integer)):
            v = np.zeros(self.ctx.phi, dtype=np.int64)
            v[0] = int(other)
            return v
        return None

    def __add__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return Cyclo(self.ctx, self.vec + v)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return Cyclo(self.ctx, self.vec - v)

    def __rsub__(self, other):
        v = self._coerce(other)
        return Cyclo(self.ctx, v - self.vec)

    def __neg__(self):
        return Cyclo(self.ctx, -self.vec)

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return Cyclo(self.ctx, self.vec * int(other))
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        ctx = self.ctx
        ma = int(np.abs(self.vec).max(initial=0))
        mb = int(np.abs(v).max(initial=0))
        if ma and mb and ma * mb * ctx.phi * max(ctx.red_max, 1) >= (1 << 62):
            raise OverflowError("cyclotomic product exceeds the int64 guard")
        conv = np.convolve(self.vec, v)
        low = conv[: ctx.phi].copy()
        if len(conv) > ctx.phi:
            low += conv[ctx.phi :] @ ctx._fold[: len(conv) - ctx.phi]
        return Cyclo(ctx, low)

    __rmul__ = __mul__

    def __eq__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return bool(np.array_equal(self.vec, v))

    def __hash__(self):
        return hash((self.ctx.e, self.vec.tobytes()))

    def conjugate(self) -> "Cyclo":
        """Complex conjugation, zeta -> zeta^(-1)."""
        return Cyclo(self.ctx, self.vec @ self.ctx.conj_mat)

    def galois(self, t: int) -> "Cyclo":
        """Ring automorphism zeta -> zeta^t, gcd(t, e) = 1."""
        return Cyclo(self.ctx, self.vec @ self.ctx.galois_matrix(t))

    @property
    def is_zero(self) -> bool:
        return not self.vec.any()

    @property
    def is_rational(self) -> bool:
        return not self.vec[1:].any()

    def rational(self) -> int:
        if not self.is_rational:
            raise ValueError(f"not a rational integer: {self!r}")
        return int(self.vec[0])

    def to_complex(self) -> complex:
        return complex(np.dot(self.vec, self.ctx.complex_basis()))

    def __repr__(self):
        return f"Cyclo(e={self.ctx.e}, {self.vec.tolist()})"
