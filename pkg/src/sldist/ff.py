"""Exact arithmetic in the quadratic tower F_p <= F_q <= E = F_{q^2}.

Elements of E carry dense integer indices 0..q^2-1.  Index a + q*b stands
for a + b*t, where a and b index elements of F_q (coefficient tuples over
F_p packed little-endian in base p) and t is a root of the chosen
quadratic modulus over F_q.  Indices 0..q-1 are therefore exactly the
embedded copy of F_q, and all arithmetic is table-driven so that matrix
enumeration and character sums downstream can run as numpy gathers.

Moduli are chosen deterministically (smallest coefficient encoding that
is irreducible), so towers built from the same (p, k) are identical
across machines and runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TowerError",
    "FieldTower",
    "FieldElem",
    "MultChar",
    "AddChar",
    "build_tower",
    "frobenius",
    "norm",
    "trace",
    "chars_trivial_on_F",
    "addchars_trivial_on_F",
    "all_chars_E",
    "all_chars_F",
    "restrict_to_F",
    "compose_with_norm",
]


class TowerError(ValueError):
    """Invalid tower parameters or an internal consistency failure."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of n, ascending."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# dense polynomials over F_p, little-endian coefficient lists


def _ptrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _ptrim(out)


def _pmod(a, f, p):
    # f monic
    a = list(a)
    df = len(f) - 1
    while len(a) - 1 >= df and a:
        c = a[-1]
        if c:
            shift = len(a) - 1 - df
            for i in range(df + 1):
                a[shift + i] = (a[shift + i] - c * f[i]) % p
        a.pop()
    return _ptrim(a)


def _ppowmod(a, e, f, p):
    result = [1]
    base = _pmod(a, f, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        e >>= 1
    return result


def _pgcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        a, b = b, _pmod(a, b, p)
        if b:
            lead_inv = pow(b[-1], p - 2, p)
            b = [(c * lead_inv) % p for c in b]
    return a


def _p_is_irreducible(f, p):
    """Irreducibility of a monic f over F_p via x^(p^d) fixed-point tests."""
    k = len(f) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    x = [0, 1]
    xq = _ppowmod(x, p**k, f, p)
    if _ptrim([(c1 - c2) % p for c1, c2 in _zippad(xq, x, p)]):
        return False
    for r in prime_factors(k):
        xd = _ppowmod(x, p ** (k // r), f, p)
        diff = _ptrim([(c1 - c2) % p for c1, c2 in _zippad(xd, x, p)])
        g = _pgcd(f, diff, p) if diff else list(f)
        if len(g) - 1 != 0:
            return False
    return True


def _zippad(a, b, p):
    n = max(len(a), len(b))
    return zip(a + [0] * (n - len(a)), b + [0] * (n - len(b)))


def _least_base_modulus(p, k):
    """Monic irreducible of degree k over F_p, least coefficient encoding."""
    for code in range(p**k):
        coeffs = []
        c = code
        for _ in range(k):
            coeffs.append(c % p)
            c //= p
        f = coeffs + [1]
        if _p_is_irreducible(f, p):
            return tuple(f)
    raise TowerError(f"no monic irreducible of degree {k} over F_{p}")


# ---------------------------------------------------------------------------
# tower construction


class FieldTower:
    """The tower F_p <= F_q <= E = F_{q^2} with table-driven arithmetic.

    Immutable after construction; all lookups are pure, so instances are
    safe to share across threads and processes.
    """

    def __init__(self, p: int, k: int):
        if not is_prime(p):
            raise TowerError(f"p = {p} is not prime")
        if k < 1:
            raise TowerError(f"extension degree k = {k} must be >= 1")
        q = p**k
        if q * q > 1 << 20:
            raise TowerError(f"q^2 = {q * q} too large for dense tables")
        self.p = p
        self.k = k
        self.q = q
        self.order_E = q * q
        self.unit_order = q * q - 1
        self.base_modulus = _least_base_modulus(p, k)

        fq_add, fq_mul = self._subfield_tables()
        self._fq_add = fq_add
        self._fq_mul = fq_mul
        fq_neg = np.empty(q, dtype=np.int32)
        for x in range(q):
            fq_neg[x] = int(np.nonzero(fq_add[x] == 0)[0][0])
        self._fq_neg = fq_neg
        self.ext_modulus = self._least_ext_modulus()

        self._build_ext_tables()
        self._build_logs()
        self._build_traces()
        self._check_invariants()

    # -- construction helpers ------------------------------------------------

    def _subfield_tables(self):
        p, k, q = self.p, self.k, self.q
        f = list(self.base_modulus)

        def decode(i):
            coeffs = []
            for _ in range(k):
                coeffs.append(i % p)
                i //= p
            return coeffs

        def encode(coeffs):
            out = 0
            for c in reversed(coeffs):
                out = out * p + c
            return out

        add = np.empty((q, q), dtype=np.int32)
        mul = np.empty((q, q), dtype=np.int32)
        polys = [decode(i) for i in range(q)]
        for x in range(q):
            for y in range(q):
                add[x, y] = encode([(a + b) % p for a, b in zip(polys[x], polys[y])])
                prod = _pmod(_pmul(_ptrim(list(polys[x])), _ptrim(list(polys[y])), p), f, p)
                prod = prod + [0] * (k - len(prod))
                mul[x, y] = encode(prod)
        return add, mul

    def _least_ext_modulus(self):
        # monic t^2 + b*t + c over F_q; least (b, c) with no root in F_q
        q = self.q
        add, mul = self._fq_add, self._fq_mul
        for b in range(q):
            for c in range(q):
                has_root = False
                for x in range(q):
                    if add[mul[x, x], add[mul[b, x], c]] == 0:
                        has_root = True
                        break
                if not has_root:
                    return (c, b, 1)
        raise TowerError(f"no irreducible quadratic over F_{q}")

    def _build_ext_tables(self):
        q, q2 = self.q, self.order_E
        fq_add, fq_mul, fq_neg = self._fq_add, self._fq_mul, self._fq_neg
        c_mod, b_mod, _ = self.ext_modulus
        e0 = int(fq_neg[c_mod])  # t^2 = e0 + e1*t
        e1 = int(fq_neg[b_mod])

        idx = np.arange(q2, dtype=np.int32)
        lo, hi = idx % q, idx // q
        ax, ay = np.meshgrid(lo, lo, indexing="ij")
        bx, by = np.meshgrid(hi, hi, indexing="ij")

        self.add = (fq_add[ax, ay] + q * fq_add[bx, by]).astype(np.int32)
        ac = fq_mul[ax, ay]
        ad = fq_mul[ax, by]
        bc = fq_mul[bx, ay]
        bd = fq_mul[bx, by]
        lo_out = fq_add[ac, fq_mul[bd, e0]]
        hi_out = fq_add[fq_add[ad, bc], fq_mul[bd, e1]]
        self.mul = (lo_out + q * hi_out).astype(np.int32)
        self.neg = (fq_neg[lo] + q * fq_neg[hi]).astype(np.int32)

        inv = np.zeros(q2, dtype=np.int32)
        for x in range(1, q2):
            inv[x] = self.pow_idx(x, q2 - 2)
            if self.mul[x, inv[x]] != 1:
                raise TowerError("inverse table construction failed")
        self.inv = inv

        t_idx = q  # the element t itself
        tq = self.pow_idx(t_idx, q)
        self.frob = self.add[lo, self.mul[hi, tq]].astype(np.int32)

    def _build_logs(self):
        q2, m = self.order_E, self.unit_order
        gen = None
        for x in range(2, q2):
            ok = True
            for r in prime_factors(m):
                if self.pow_idx(x, m // r) == 1:
                    ok = False
                    break
            if ok:
                gen = x
                break
        if gen is None:
            raise TowerError("no multiplicative generator found")
        self.generator_E = gen
        exp = np.empty(m, dtype=np.int32)
        log = np.full(q2, -1, dtype=np.int32)
        acc = 1
        for t in range(m):
            exp[t] = acc
            log[acc] = t
            acc = int(self.mul[acc, gen])
        if acc != 1 or np.any(log[1:] < 0):
            raise TowerError("generator order check failed")
        self.exp = exp
        self.log = log
        self.generator_F = int(exp[(self.q + 1) % m]) if m > 1 else 1

    def _build_traces(self):
        q2, q, p, k = self.order_E, self.q, self.p, self.k
        idx = np.arange(q2, dtype=np.int32)
        self.norms = self.mul[idx, self.frob].astype(np.int32)
        self.traces = self.add[idx, self.frob].astype(np.int32)
        if np.any(self.norms >= q) or np.any(self.traces >= q):
            raise TowerError("norm or trace left the subfield")
        # absolute trace F_q -> F_p, then composed with Tr_{E/F_q}
        trq = np.empty(q, dtype=np.int32)
        for u in range(q):
            acc, s = u, u
            for _ in range(k - 1):
                s = self._fq_pow(s, p)
                acc = int(self._fq_add[acc, s])
            if acc >= p:
                raise TowerError("absolute trace left the prime field")
            trq[u] = acc
        self.trace_p = trq[self.traces].astype(np.int32)

    def _fq_pow(self, x, e):
        result, base = 1, x
        while e:
            if e & 1:
                result = int(self._fq_mul[result, base])
            base = int(self._fq_mul[base, base])
            e >>= 1
        return result

    def _check_invariants(self):
        idx = np.arange(self.order_E)
        if not np.array_equal(self.frob[self.frob], idx):
            raise TowerError("Frobenius is not an involution")
        fixed = np.nonzero(self.frob == idx)[0]
        if not np.array_equal(fixed, np.arange(self.q)):
            raise TowerError("Frobenius fixed field is not the embedded F_q")

    # -- public index-level operations ---------------------------------------

    def pow_idx(self, x: int, e: int) -> int:
        """x^e for an element index, with 0^0 = 1."""
        if e < 0:
            x, e = int(self.inv[x]), -e
        result, base = 1, x
        while e:
            if e & 1:
                result = int(self.mul[result, base])
            base = int(self.mul[base, base])
            e >>= 1
        return result

    def is_in_F(self, x: int) -> bool:
        return 0 <= x < self.q

    def f_log(self, y: int) -> int:
        """Discrete log of y in F^x with respect to generator_F."""
        if not (1 <= y < self.q):
            raise TowerError(f"f_log of {y}: not a unit of the subfield")
        t = int(self.log[y])
        if t % (self.q + 1) != 0:
            raise TowerError("subfield unit has log not divisible by q+1")
        return (t // (self.q + 1)) % max(self.q - 1, 1)

    def elem(self, index: int) -> "FieldElem":
        return FieldElem(self, int(index) % self.order_E)

    def elements(self):
        return [FieldElem(self, i) for i in range(self.order_E)]

    def units(self):
        return [FieldElem(self, i) for i in range(1, self.order_E)]

    def f_elements(self):
        return [FieldElem(self, i) for i in range(self.q)]

    def char_E(self, exponent: int) -> "MultChar":
        return MultChar(self.unit_order, exponent % self.unit_order)

    def char_F(self, exponent: int) -> "MultChar":
        o = max(self.q - 1, 1)
        return MultChar(o, exponent % o)

    def __repr__(self):
        return f"FieldTower(p={self.p}, k={self.k}, q={self.q})"


def build_tower(p: int, k: int = 1) -> FieldTower:
    """Construct the tower F_p <= F_(p^k) <= F_(p^2k), deterministically."""
    return FieldTower(p, k)


# ---------------------------------------------------------------------------
# element wrapper


class FieldElem:
    """An element of E addressed by index, with operator sugar.

    Hot paths in the group and character modules work on raw index arrays;
    this wrapper is the convenience surface for scalar work and tests.
    """

    __slots__ = ("tower", "index")

    def __init__(self, tower: FieldTower, index: int):
        self.tower = tower
        self.index = int(index)

    @property
    def coords(self):
        """Coordinates over the tower basis: (F_q coords of a, of b)."""
        q, p, k = self.tower.q, self.tower.p, self.tower.k

        def digits(i):
            out = []
            for _ in range(k):
                out.append(i % p)
                i //= p
            return tuple(out)

        return (digits(self.index % q), digits(self.index // q))

    def _binop(self, other, table):
        if isinstance(other, FieldElem):
            if other.tower is not self.tower and (
                other.tower.p != self.tower.p or other.tower.k != self.tower.k
            ):
                raise TowerError("elements from different towers")
            other = other.index
        return FieldElem(self.tower, int(table[self.index, other]))

    def __add__(self, other):
        return self._binop(other, self.tower.add)

    def __mul__(self, other):
        return self._binop(other, self.tower.mul)

    def __sub__(self, other):
        o = other.index if isinstance(other, FieldElem) else other
        return FieldElem(self.tower, int(self.tower.add[self.index, self.tower.neg[o]]))

    def __neg__(self):
        return FieldElem(self.tower, int(self.tower.neg[self.index]))

    def __truediv__(self, other):
        o = other.index if isinstance(other, FieldElem) else other
        if o == 0:
            raise ZeroDivisionError("division by zero field element")
        return FieldElem(self.tower, int(self.tower.mul[self.index, self.tower.inv[o]]))

    def __pow__(self, e):
        return FieldElem(self.tower, self.tower.pow_idx(self.index, e))

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.index == other.index and self.tower.q == other.tower.q
        return NotImplemented

    def __hash__(self):
        return hash((self.tower.p, self.tower.k, self.index))

    def is_zero(self):
        return self.index == 0

    def in_F(self):
        return self.tower.is_in_F(self.index)

    def __repr__(self):
        return f"FieldElem({self.index} in F_{self.tower.order_E})"


def frobenius(x: FieldElem) -> FieldElem:
    """The nontrivial E/F automorphism, x -> x^q."""
    return FieldElem(x.tower, int(x.tower.frob[x.index]))


def norm(x: FieldElem) -> FieldElem:
    """Norm E -> F, x -> x * x^q."""
    return FieldElem(x.tower, int(x.tower.norms[x.index]))


def trace(x: FieldElem) -> FieldElem:
    """Trace E -> F, x -> x + x^q."""
    return FieldElem(x.tower, int(x.tower.traces[x.index]))


# ---------------------------------------------------------------------------
# character groups


@dataclass(frozen=True)
class MultChar:
    """A character of a cyclic unit group, written against a fixed generator.

    ``order`` is the size of the group (q^2-1 for E^x, q-1 for F^x) and the
    character sends generator^t to the primitive ``order``-th root of unity
    raised to ``exponent * t``.  Group law is addition of exponents.
    """

    order: int
    exponent: int

    def __post_init__(self):
        object.__setattr__(self, "exponent", self.exponent % self.order if self.order else 0)

    def __mul__(self, other: "MultChar") -> "MultChar":
        if other.order != self.order:
            raise TowerError("characters on different groups")
        return MultChar(self.order, self.exponent + other.exponent)

    def inverse(self) -> "MultChar":
        return MultChar(self.order, -self.exponent)

    def __pow__(self, e: int) -> "MultChar":
        return MultChar(self.order, self.exponent * e)

    @property
    def is_trivial(self) -> bool:
        return self.exponent == 0

    def char_order(self) -> int:
        from math import gcd

        return self.order // gcd(self.order, self.exponent) if self.order else 1

    def value_exponent(self, t: int) -> int:
        """Exponent of the character value at generator^t, mod order."""
        return (self.exponent * t) % self.order


def all_chars_E(tower: FieldTower) -> tuple[MultChar, ...]:
    return tuple(MultChar(tower.unit_order, c) for c in range(tower.unit_order))


def all_chars_F(tower: FieldTower) -> tuple[MultChar, ...]:
    o = max(tower.q - 1, 1)
    return tuple(MultChar(o, a) for a in range(o))


def restrict_to_F(tower: FieldTower, chi: MultChar) -> MultChar:
    """Restriction of a character of E^x to the embedded F^x.

    With generator_F = Nm(generator_E) the restriction is plain exponent
    reduction mod q-1.
    """
    if chi.order != tower.unit_order:
        raise TowerError("not a character of E^x")
    o = max(tower.q - 1, 1)
    return MultChar(o, chi.exponent % o)


def compose_with_norm(tower: FieldTower, alpha: MultChar) -> MultChar:
    """alpha o Nm as a character of E^x, for alpha a character of F^x."""
    if alpha.order != max(tower.q - 1, 1):
        raise TowerError("not a character of F^x")
    return MultChar(tower.unit_order, alpha.exponent * (tower.q + 1))


def chars_trivial_on_F(tower: FieldTower) -> tuple[MultChar, ...]:
    """The subgroup of characters of E^x trivial on F^x; order q+1."""
    m, q = tower.unit_order, tower.q
    step = max(q - 1, 1)
    out = tuple(MultChar(m, c) for c in range(0, m, step))
    if len(out) != q + 1:
        raise TowerError("trivial-on-F character count is off")
    return out


@dataclass(frozen=True)
class AddChar:
    """Additive character psi_b(x) = zeta_p^(Tr_(E/F_p)(b*x)) of E."""

    b: int

    @property
    def is_trivial(self) -> bool:
        return self.b == 0

    def is_trivial_on_F(self, tower: FieldTower) -> bool:
        return int(tower.traces[self.b]) == 0

    def log_value(self, tower: FieldTower, x: int) -> int:
        """Value exponent in Z/p at element index x."""
        return int(tower.trace_p[tower.mul[self.b, x]])

    def log_values(self, tower: FieldTower, xs: np.ndarray) -> np.ndarray:
        return tower.trace_p[tower.mul[self.b, xs]]


def addchars_trivial_on_F(tower: FieldTower) -> tuple[AddChar, ...]:
    """All psi_b with Tr_(E/F)(b) = 0; q of them, q-1 nontrivial."""
    out = tuple(AddChar(int(b)) for b in np.nonzero(tower.traces == 0)[0])
    if len(out) != tower.q:
        raise TowerError("trace-zero kernel has wrong size")
    return out
