"""Exact irreducible character tables via the eigenvector method of Burnside
and Dixon, plus the character-level operations the distinction analysis needs.

The table is computed modulo a deterministic working prime ell = 1 (mod e),
ell > 2*sqrt(|G|), where e is the group exponent; values are then lifted to
Z[zeta_e] through root-of-unity multiplicities recovered by discrete
Fourier inversion along the power chain of each class representative.
Because a character value of degree d is a sum of exactly d roots of unity
and d < ell/2, the lift is unique, so the stored modular table plus the
lift is an exact representation of the character values.

Verification before a table is ever returned:

* structural: row count = class count, degrees divide |G|, sum of squared
  degrees = |G|, all rows distinct;
* multiplicity lift: every value lifts to nonnegative root multiplicities
  summing to the degree;
* orthogonality, proven exactly: row and column Gram matrices of the
  lifted table are evaluated modulo several primes = 1 (mod e) whose
  product exceeds twice a rigorous bound on the coefficients of the exact
  cyclotomic Gram entries.  Power-chain consistency of the lift makes the
  evaluated Gram independent of the choice of primitive root, so the
  congruences pin the exact entries; no tolerance is involved anywhere.

Degrees up to ~1400 and group orders up to the enumeration guard keep all
intermediate integers inside int64 by construction; bounds are checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product as iter_product

import numpy as np

from .cyclotomic import Cyclo, CycloContext
from .ff import AddChar, FieldTower, MultChar
from .groups import ConjugacyData, GroupView, UnipotentData

__all__ = [
    "CharTableError",
    "CharTable",
    "WhittakerCharacter",
    "dixon_schneider",
    "whittaker_characters",
    "restriction_matrix",
]

EXACT_GRAM_LIMIT = 40  # builder additionally runs the fully cyclotomic Gram below this


class CharTableError(RuntimeError):
    """A character table failed construction or verification."""


# ---------------------------------------------------------------------------
# modular linear algebra (int64 arrays, entries reduced mod ell)


def _inv_mod(a: int, ell: int) -> int:
    return pow(int(a) % ell, -1, ell)


def _row_rref(A: np.ndarray, ell: int):
    """Reduced row echelon form; returns (R, pivot_columns)."""
    R = A.copy() % ell
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if len(nz) == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            R[[r, pr]] = R[[pr, r]]
        R[r] = (R[r] * _inv_mod(R[r, c], ell)) % ell
        other = np.nonzero(R[:, c])[0]
        other = other[other != r]
        if len(other):
            R[other] = (R[other] - np.outer(R[other, c], R[r])) % ell
        pivots.append(c)
        r += 1
    return R[:r], pivots


def _kernel_mod(A: np.ndarray, ell: int) -> np.ndarray:
    """Columns spanning the null space of A mod ell."""
    n = A.shape[1]
    R, pivots = _row_rref(A, ell)
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((n, len(free)), dtype=np.int64)
    for j, fc in enumerate(free):
        basis[fc, j] = 1
        for i, pc in enumerate(pivots):
            basis[pc, j] = (-R[i, fc]) % ell
    return basis


def _col_echelon(B: np.ndarray, ell: int):
    """Canonical column echelon basis of the column span; (basis, pivot_rows)."""
    R, pivots = _row_rref(B.T, ell)
    return R.T, pivots


def _hessenberg_mod(A: np.ndarray, ell: int) -> np.ndarray:
    H = A.copy() % ell
    s = H.shape[0]
    for j in range(s - 2):
        nz = np.nonzero(H[j + 1 :, j])[0]
        if len(nz) == 0:
            continue
        piv = j + 1 + int(nz[0])
        if piv != j + 1:
            H[[j + 1, piv]] = H[[piv, j + 1]]
            H[:, [j + 1, piv]] = H[:, [piv, j + 1]]
        inv = _inv_mod(H[j + 1, j], ell)
        for i in range(j + 2, s):
            f = (H[i, j] * inv) % ell
            if f:
                H[i] = (H[i] - f * H[j + 1]) % ell
                H[:, j + 1] = (H[:, j + 1] + f * H[:, i]) % ell
    return H


def _charpoly_mod(A: np.ndarray, ell: int) -> np.ndarray:
    """Characteristic polynomial of A mod ell, little-endian, monic."""
    s = A.shape[0]
    if s == 0:
        return np.array([1], dtype=np.int64)
    H = _hessenberg_mod(A, ell)
    polys = [np.array([1], dtype=np.int64)]
    for m in range(1, s + 1):
        prev = polys[m - 1]
        p = np.zeros(m + 1, dtype=np.int64)
        p[1:] += prev
        p[:-1] -= H[m - 1, m - 1] * prev
        prod = 1
        for i in range(m - 1, 0, -1):
            prod = (prod * H[i, i - 1]) % ell
            term = (H[i - 1, m - 1] * prod) % ell
            p[: len(polys[i - 1])] -= term * polys[i - 1]
        polys.append(p % ell)
    return polys[s]


def _poly_roots_mod(coeffs: np.ndarray, ell: int) -> list[int]:
    """All roots in F_ell, ascending, by direct evaluation."""
    xs = np.arange(ell, dtype=np.int64)
    vals = np.zeros(ell, dtype=np.int64)
    for c in coeffs[::-1]:
        vals = (vals * xs + int(c)) % ell
    return np.nonzero(vals == 0)[0].tolist()


def _least_prime_1_mod(e: int, lower: int) -> int:
    """Least prime ell = 1 (mod e) with ell > lower."""
    from .ff import is_prime

    if e == 1:
        cand = max(lower + 1, 3)
        while not is_prime(cand):
            cand += 1
        return cand
    k = 1
    while True:
        cand = e * k + 1
        if cand > lower and is_prime(cand):
            return cand
        k += 1


def _primitive_root(ell: int) -> int:
    from .ff import prime_factors

    fac = prime_factors(ell - 1)
    for g in range(2, ell):
        if all(pow(g, (ell - 1) // r, ell) != 1 for r in fac):
            return g
    raise CharTableError(f"no primitive root mod {ell}")


# ---------------------------------------------------------------------------
# the table


class CharTable:
    """Exact irreducible characters of an enumerated group view.

    Rows are canonically ordered by (degree, modular row); values are exact
    cyclotomic integers materialized lazily from the lift.
    """

    def __init__(self, view: GroupView, conj: ConjugacyData, ell: int, omega: int,
                 degrees: np.ndarray, rows_mod: np.ndarray):
        self.view = view
        self.conj = conj
        self.e = int(conj.exponent)
        self.ell = int(ell)
        self.omega = int(omega)
        self.degrees = degrees
        self.X = rows_mod
        self.num_rows = len(degrees)
        pows = np.empty(self.e, dtype=np.int64)
        acc = 1
        for j in range(self.e):
            pows[j] = acc
            acc = (acc * omega) % ell
        self.omega_pows = pows
        self._ctx: CycloContext | None = None
        self._mults: dict[tuple[int, int], np.ndarray] = {}
        self._values: dict[tuple[int, int], Cyclo] = {}
        self._hists: dict = {}
        self._twist_cache: dict[int, np.ndarray] = {}
        self._row_lookup = {rows_mod[i].tobytes(): i for i in range(self.num_rows)}
        if len(self._row_lookup) != self.num_rows:
            raise CharTableError("modular rows are not distinct")
        self._sigma_rows: np.ndarray | None = None
        self._dual_rows: np.ndarray | None = None

    # -- basic data ------------------------------------------------------------

    @property
    def order(self) -> int:
        return self.view.order

    @property
    def ctx(self) -> CycloContext:
        if self._ctx is None:
            self._ctx = CycloContext(self.e)
        return self._ctx

    def degree(self, i: int) -> int:
        return int(self.degrees[i])

    # -- exact values ------------------------------------------------------------

    def _lift_class(self, k: int) -> np.ndarray:
        """Validated root-of-unity multiplicities of column k, all rows at once."""
        chain = self.conj.power_class[k]
        o = len(chain)
        vals = self.X[:, chain]
        step = self.e // o
        s = np.arange(o, dtype=np.int64)
        mat = self.omega_pows[(-step * np.outer(s, s)) % self.e]
        m = (vals @ mat % self.ell) * _inv_mod(o, self.ell) % self.ell
        if np.any(m.sum(axis=1) != self.degrees) or np.any(m.max(axis=1) > self.degrees):
            raise CharTableError(f"value lift failed at class {k}")
        return m

    def multiplicities(self, i: int, k: int) -> np.ndarray:
        """Root-of-unity multiplicities of value (i, k) over zeta_o, o = |rep_k|."""
        if k not in self._mults:
            col = self._lift_class(k)
            if self.num_rows * col.shape[1] > 400_000:
                return col[i]
            self._mults[k] = col
        return self._mults[k][i]

    def value(self, i: int, k: int) -> Cyclo:
        key = (i, k)
        if key not in self._values:
            o = int(self.conj.rep_orders[k])
            self._values[key] = self.ctx.from_root_multiplicities(o, self.multiplicities(i, k))
        return self._values[key]

    def value_in(self, ctx: CycloContext, i: int, k: int) -> Cyclo:
        """The value embedded into a larger cyclotomic context."""
        o = int(self.conj.rep_orders[k])
        return ctx.from_root_multiplicities(o, self.multiplicities(i, k))

    def row_values(self, i: int) -> list[Cyclo]:
        return [self.value(i, k) for k in range(self.num_rows)]

    # -- inner products ------------------------------------------------------------

    def inner_product(self, i: int, j: int) -> Fraction:
        """Exact <chi_i, chi_j> over the group."""
        acc = self.ctx.zero()
        for k in range(self.conj.num_classes):
            acc = acc + self.value(i, k) * self.value(j, k).conjugate() * int(self.conj.sizes[k])
        return Fraction(acc.rational(), self.order)

    def decompose_class_function(self, values: list[Cyclo]) -> list[Fraction]:
        """Exact <f, chi_i> for a class function f given by values per class."""
        if len(values) != self.conj.num_classes:
            raise CharTableError("class function length mismatch")
        out = []
        for i in range(self.num_rows):
            acc = self.ctx.zero()
            for k in range(self.conj.num_classes):
                acc = acc + values[k] * self.value(i, k).conjugate() * int(self.conj.sizes[k])
            out.append(Fraction(acc.rational(), self.order))
        return out

    # -- linear characters on subgroups, restriction multiplicities -----------------

    def _det_histogram(self, subview: GroupView) -> np.ndarray:
        """counts[class, det_log] over the subgroup's elements."""
        key = ("det", subview.kind)
        if key not in self._hists:
            master = self.view.master
            if not np.all(self.view.mask[subview.positions]):
                raise CharTableError(f"{subview.kind} is not contained in {self.view.kind}")
            cls = self.conj.class_of_positions(subview.positions)
            m_units = master.tower.unit_order
            dlog = master.det_log[subview.positions] % m_units
            joint = cls * m_units + dlog
            counts = np.bincount(joint, minlength=self.conj.num_classes * m_units)
            self._hists[key] = counts.reshape(self.conj.num_classes, m_units)
        return self._hists[key]

    def _root_exponent_in_e(self, order: int, x: int) -> int:
        """Exponent y with zeta_order^x = zeta_e^y, or raise if none exists."""
        num = (x % order) * self.e
        if num % order:
            raise CharTableError(
                f"root of unity of order {order // math.gcd(order, x)} "
                f"does not live in Q(zeta_{self.e})"
            )
        return (num // order) % self.e

    def restriction_multiplicities(self, subview: GroupView, lam: MultChar | None = None,
                                   ) -> np.ndarray:
        """<Res_H chi_i, lam> for every row i; lam = None means the trivial character.

        Exact: the result is an integer in [0, degree] and is recovered from
        a single congruence mod ell > 2*sqrt(|G|) >= 2*degree.
        """
        hist = self._det_histogram(subview)
        tower = self.view.master.tower
        ell = self.ell
        m_units = tower.unit_order
        u = np.ones(m_units, dtype=np.int64)
        if lam is not None and not lam.is_trivial:
            occupied = np.nonzero(hist.any(axis=0))[0]
            if lam.order == m_units:
                for t in occupied.tolist():
                    u[t] = self.omega_pows[self._root_exponent_in_e(m_units, -lam.value_exponent(t))]
            elif lam.order == max(tower.q - 1, 1):
                if np.any(occupied % (tower.q + 1)):
                    raise CharTableError(
                        f"{subview.kind}: determinants leave F^x, cannot apply an F^x character"
                    )
                for t in occupied.tolist():
                    tf = t // (tower.q + 1)  # determinant log in F^x
                    u[t] = self.omega_pows[self._root_exponent_in_e(lam.order, -lam.value_exponent(tf))]
            else:
                raise CharTableError(f"unexpected character group of order {lam.order}")
        weights = (hist % ell) @ (u % ell) % ell
        sums = (self.X @ weights) % ell
        h = int(hist.sum())
        mults = (sums * _inv_mod(h, ell)) % ell
        bad = mults > self.degrees
        if np.any(bad):
            i = int(np.nonzero(bad)[0][0])
            raise CharTableError(
                f"restriction multiplicity out of range at row {i}: {int(mults[i])}"
            )
        return mults.astype(np.int64)

    def restriction_multiplicity(self, i: int, subview: GroupView,
                                 lam: "MultChar | WhittakerCharacter | None" = None) -> int:
        if isinstance(lam, WhittakerCharacter):
            return int(self.whittaker_multiplicities(lam)[i])
        return int(self.restriction_multiplicities(subview, lam)[i])

    # -- Whittaker sums ------------------------------------------------------------

    def _unipotent_histogram(self) -> tuple[np.ndarray, "UnipotentData"]:
        key = ("unipotent",)
        if key not in self._hists:
            master = self.view.master
            uni = UnipotentData.build(master)
            if not np.all(self.view.mask[uni.view.positions]):
                raise CharTableError("unipotent subgroup leaves the view")
            cls = self.conj.class_of_positions(uni.view.positions)
            ncodes = master.radix ** max(master.n - 1, 0)
            joint = cls * ncodes + uni.superdiag_code
            counts = np.bincount(joint, minlength=self.conj.num_classes * ncodes)
            self._hists[key] = (counts.reshape(self.conj.num_classes, ncodes), uni)
        return self._hists[key]

    def whittaker_multiplicities(self, psi: "WhittakerCharacter") -> np.ndarray:
        """<Res_N chi_i, psi> for every row, exact via the modular congruence."""
        master = self.view.master
        tower = master.tower
        if len(psi.components) != master.n - 1:
            raise CharTableError("wrong number of superdiagonal components")
        if not psi.is_nondegenerate:
            raise CharTableError("degenerate character of the unipotent group rejected")
        hist, uni = self._unipotent_histogram()
        ncodes = hist.shape[1]
        logs = psi.log_table(tower, master.n)
        if master.n >= 2:
            if self.e % tower.p:
                raise CharTableError("additive character values leave the cyclotomic field")
            scale = self.e // tower.p
        else:
            scale = 0
        u = self.omega_pows[(-scale * logs) % self.e]
        ell = self.ell
        weights = (hist % ell) @ (u % ell) % ell
        sums = (self.X @ weights) % ell
        mults = (sums * _inv_mod(int(hist.sum()), ell)) % ell
        if np.any(mults > self.degrees):
            raise CharTableError("Whittaker multiplicity out of range")
        return mults.astype(np.int64)

    # -- row operations: twist, galois conjugate, dual ------------------------------

    def find_row(self, row_mod: np.ndarray) -> int:
        key = row_mod.astype(np.int64).tobytes()
        idx = self._row_lookup.get(key)
        if idx is None:
            raise CharTableError("row lookup failed; not an irreducible of this table")
        return idx

    def twist_rows(self, chi: MultChar) -> np.ndarray:
        """Permutation of rows under tensoring with chi o det."""
        tower = self.view.master.tower
        if chi.order != tower.unit_order:
            raise CharTableError("twists must come from characters of E^x")
        c = chi.exponent % chi.order
        if c not in self._twist_cache:
            dlog = self.conj.class_det_log % chi.order
            value_exps = (c * dlog) % chi.order
            exps = np.array(
                [self._root_exponent_in_e(chi.order, int(x)) for x in value_exps],
                dtype=np.int64,
            )
            factors = self.omega_pows[exps]
            twisted = (self.X * factors[None, :]) % self.ell
            perm = np.array([self.find_row(twisted[i]) for i in range(self.num_rows)])
            self._twist_cache[c] = perm
        return self._twist_cache[c]

    def twist_row(self, i: int, chi: MultChar) -> int:
        return int(self.twist_rows(chi)[i])

    def sigma_rows(self) -> np.ndarray:
        """Row permutation of the entrywise Galois conjugate."""
        if self._sigma_rows is None:
            sig = self.X[:, self.conj.sigma_perm]
            self._sigma_rows = np.array([self.find_row(sig[i]) for i in range(self.num_rows)])
        return self._sigma_rows

    def dual_rows(self) -> np.ndarray:
        """Row permutation of the contragredient."""
        if self._dual_rows is None:
            dual = self.X[:, self.conj.inverse_perm]
            self._dual_rows = np.array([self.find_row(dual[i]) for i in range(self.num_rows)])
        return self._dual_rows

    def sigma_row(self, i: int) -> int:
        return int(self.sigma_rows()[i])

    def dual_row(self, i: int) -> int:
        return int(self.dual_rows()[i])

    # -- verification ------------------------------------------------------------

    def verify(self):
        """Full integrity check; raises CharTableError on any failure."""
        conj, order = self.conj, self.order
        if self.num_rows != conj.num_classes:
            raise CharTableError("row count differs from class count")
        if int((self.degrees.astype(object) ** 2).sum()) != order:
            raise CharTableError("sum of squared degrees differs from the group order")
        if any(order % int(d) for d in self.degrees):
            raise CharTableError("a degree does not divide the group order")
        idc = conj.identity_class
        if not np.array_equal(self.X[:, idc] % self.ell, self.degrees % self.ell):
            raise CharTableError("value at the identity class is not the degree")
        self._verify_orthogonality_modular()
        r, phi = self.num_rows, self.ctx.phi
        if r <= EXACT_GRAM_LIMIT and r**3 * phi**2 <= 2_000_000_000:
            self.verify_orthogonality_exact()

    def _gram_checks(self, E: np.ndarray, ell: int):
        conj, order = self.conj, self.order
        w = conj.sizes % ell
        inv = conj.inverse_perm
        gram = (E * w[None, :]) @ E[:, inv].T % ell
        expected = np.zeros_like(gram)
        np.fill_diagonal(expected, order % ell)
        if not np.array_equal(gram, expected):
            raise CharTableError(f"row orthogonality fails mod {ell}")
        col = E.T @ E[:, inv] % ell
        cexp = np.zeros_like(col)
        np.fill_diagonal(cexp, np.array([(order // int(s)) % ell for s in conj.sizes]))
        if not np.array_equal(col, cexp):
            raise CharTableError(f"column orthogonality fails mod {ell}")

    def _verify_orthogonality_modular(self):
        """Exact orthogonality by CRT-bounded congruences (see module docstring)."""
        conj = self.conj
        dmax = int(self.degrees.max())
        bound = 2 * (self.order * dmax * dmax * max(self.ctx.red_max, 1) + self.order)
        primes = [self.ell]
        prod = self.ell
        while prod <= bound:
            primes.append(_least_prime_1_mod(self.e, primes[-1]))
            prod *= primes[-1]
        pow_tables = [self.omega_pows]
        for ell_s in primes[1:]:
            om_s = pow(_primitive_root(ell_s), (ell_s - 1) // self.e, ell_s)
            pows = np.empty(self.e, dtype=np.int64)
            acc = 1
            for j in range(self.e):
                pows[j] = acc
                acc = (acc * om_s) % ell_s
            pow_tables.append(pows)
        tables = [np.empty_like(self.X) for _ in primes]
        for k in range(conj.num_classes):
            m = self._lift_class(k)
            o = m.shape[1]
            idx = (np.arange(o) * (self.e // o)) % self.e
            for t, (ell_s, pows) in enumerate(zip(primes, pow_tables)):
                tables[t][:, k] = m @ pows[idx] % ell_s
        if not np.array_equal(tables[0], self.X % self.ell):
            raise CharTableError("lift does not evaluate back to the modular table")
        for ell_s, E in zip(primes, tables):
            self._gram_checks(E, ell_s)

    def verify_orthogonality_exact(self):
        """Row and column orthogonality with fully materialized cyclotomic values.

        Products are batched as integer matrix multiplications; a precomputed
        worst-case bound keeps everything inside int64 or the check refuses
        to run (it never silently overflows).
        """
        conj, ctx = self.conj, self.ctx
        r, phi = self.num_rows, self.ctx.phi
        dmax = int(self.degrees.max())
        bound = self.order * dmax * dmax * ctx.red_max**2 * max(phi, 1) * max(ctx.red_max, 1)
        if bound >= 1 << 62:
            raise CharTableError("exact Gram bound exceeds int64; rely on the modular proof")
        V = np.empty((r, r, phi), dtype=np.int64)
        for i in range(r):
            for k in range(r):
                V[i, k] = self.value(i, k).vec
        Vc = V @ ctx.conj_mat
        w = conj.sizes.astype(np.int64)

        def reduce_pair(P):
            T = np.zeros(2 * phi - 1, dtype=np.int64)
            for a in range(phi):
                T[a : a + phi] += P[a]
            low = T[:phi].copy()
            if phi > 1:
                low += T[phi:] @ ctx._fold
            return low

        for i in range(r):
            Vw = V[i] * w[:, None]
            for j in range(i, r):
                low = reduce_pair(Vw.T @ Vc[j])
                expected = self.order if i == j else 0
                if low[0] != expected or low[1:].any():
                    raise CharTableError(f"exact row orthogonality fails at ({i}, {j})")
        for k in range(r):
            for l in range(k, r):
                low = reduce_pair(V[:, k, :].T @ Vc[:, l, :])
                expected = self.order // int(conj.sizes[k]) if k == l else 0
                if low[0] != expected or low[1:].any():
                    raise CharTableError(f"exact column orthogonality fails at ({k}, {l})")

    def __repr__(self):
        return (
            f"CharTable({self.view.kind}, order={self.order}, rows={self.num_rows}, "
            f"e={self.e}, ell={self.ell})"
        )


# ---------------------------------------------------------------------------
# Dixon-Schneider construction


def dixon_schneider(view: GroupView, conj: ConjugacyData | None = None) -> CharTable:
    """Exact character table of the view; verified before it is returned."""
    if conj is None:
        conj = view.conjugacy()
    r = conj.num_classes
    order = view.order
    e = int(conj.exponent)
    ell = _least_prime_1_mod(e, max(2 * math.isqrt(order), 2))
    omega = pow(_primitive_root(ell), (ell - 1) // e, ell)

    vectors = _common_eigenvectors(conj, ell)
    idc = conj.identity_class
    degrees = np.empty(r, dtype=np.int64)
    rows = np.empty((r, r), dtype=np.int64)
    inv_sizes = np.array([_inv_mod(int(s), ell) for s in conj.sizes], dtype=np.int64)
    dmax = math.isqrt(order)
    for t, v in enumerate(vectors):
        if v[idc] == 0:
            raise CharTableError("eigenvector vanishes at the identity class")
        v = (v * _inv_mod(int(v[idc]), ell)) % ell
        s_val = int((v * v[conj.inverse_perm] % ell) @ inv_sizes % ell)
        if s_val == 0:
            raise CharTableError("degree normalization hit a zero sum")
        target = (order * _inv_mod(s_val, ell)) % ell
        d = next((c for c in range(1, dmax + 1) if c * c % ell == target), None)
        if d is None:
            raise CharTableError("no integer degree matches the eigenvector")
        degrees[t] = d
        rows[t] = (v * d % ell) * inv_sizes % ell
    order_key = sorted(range(r), key=lambda t: (int(degrees[t]), rows[t].tobytes()))
    table = CharTable(view, conj, ell, omega, degrees[order_key], rows[order_key])
    table.verify()
    return table


def _class_matrix(conj: ConjugacyData, i: int) -> np.ndarray:
    """Structure-constant matrix M[j, k] = #{x in C_i : x^-1 rep_k in C_j}."""
    master = conj.view.master
    r = conj.num_classes
    invs = master.inv_pos[conj.members(i)]
    M = np.empty((r, r), dtype=np.int64)
    for k in range(r):
        prods = master.mul_pos(invs, int(conj.reps[k]))
        M[:, k] = np.bincount(conj.class_of_positions(prods), minlength=r)
    return M


def _common_eigenvectors(conj: ConjugacyData, ell: int) -> list[np.ndarray]:
    """One-dimensional common eigenspaces of the class-sum matrices mod ell.

    Subspaces are kept in canonical column echelon form; classes are
    consumed in canonical (size-ascending) order and eigenvalues in
    ascending residue order, so the splitting is deterministic.
    """
    r = conj.num_classes
    spaces = [(np.eye(r, dtype=np.int64), list(range(r)))]
    for i in range(r):
        if all(b.shape[1] == 1 for b, _ in spaces):
            break
        if i == conj.identity_class:
            continue
        M = _class_matrix(conj, i) % ell
        new_spaces = []
        for basis, pivots in spaces:
            s = basis.shape[1]
            if s == 1:
                new_spaces.append((basis, pivots))
                continue
            MB = M @ basis % ell
            A = MB[pivots, :]
            if not np.array_equal(basis @ A % ell, MB):
                raise CharTableError("class-sum matrix does not preserve the subspace")
            roots = _poly_roots_mod(_charpoly_mod(A, ell), ell)
            dim_seen = 0
            for lam in roots:
                shifted = (A - lam * np.eye(s, dtype=np.int64)) % ell
                K = _kernel_mod(shifted, ell)
                if K.shape[1] == 0:
                    continue
                nb, np_piv = _col_echelon(basis @ K % ell, ell)
                new_spaces.append((nb, np_piv))
                dim_seen += K.shape[1]
            if dim_seen != s:
                raise CharTableError("class-sum matrix is not split-diagonalizable")
        spaces = new_spaces
    if any(b.shape[1] != 1 for b, _ in spaces):
        raise CharTableError("class-sum matrices did not separate all characters")
    return [b[:, 0] % ell for b, _ in spaces]


# ---------------------------------------------------------------------------
# characters of the unipotent radical


@dataclass(frozen=True)
class WhittakerCharacter:
    """A character of N(E) given by additive components on the superdiagonal."""

    components: tuple[AddChar, ...]

    @property
    def is_nondegenerate(self) -> bool:
        return all(not c.is_trivial for c in self.components)

    def is_trivial_on_NF(self, tower: FieldTower) -> bool:
        """Trivial on the rational points N(F)."""
        return all(c.is_trivial_on_F(tower) for c in self.components)

    def log_table(self, tower: FieldTower, n: int) -> np.ndarray:
        """Value exponents in Z/p over all packed superdiagonal codes."""
        card = tower.order_E
        ncodes = card ** max(n - 1, 0)
        codes = np.arange(ncodes, dtype=np.int64)
        logs = np.zeros(ncodes, dtype=np.int64)
        for d, comp in enumerate(self.components):
            digit = (codes // card**d) % card
            logs = (logs + comp.log_values(tower, digit)) % tower.p
        return logs


def whittaker_characters(tower: FieldTower, n: int, relative: bool = False,
                         ) -> list[WhittakerCharacter]:
    """All nondegenerate characters of N(E); relative = trivial on N(F)."""
    if n == 1:
        return [WhittakerCharacter(())]
    if relative:
        pool = [c for c in range(1, tower.order_E) if tower.traces[c] == 0]
    else:
        pool = list(range(1, tower.order_E))
    out = []
    for combo in iter_product(pool, repeat=n - 1):
        out.append(WhittakerCharacter(tuple(AddChar(b) for b in combo)))
    return out


# ---------------------------------------------------------------------------
# restriction between tables


def restriction_matrix(super_table: CharTable, sub_table: CharTable) -> np.ndarray:
    """Exact multiplicities <Res chi_i, chi_j> from a table to a subgroup's table."""
    sup, sub = super_table, sub_table
    if sup.e % sub.e:
        raise CharTableError("subgroup exponent does not divide the group exponent")
    if not np.all(sup.view.mask[sub.view.positions]):
        raise CharTableError("tables are not nested")
    ctx = sup.ctx
    class_map = sup.conj.class_of_positions(sub.conj.reps)
    h = sub.order
    out = np.empty((sup.num_rows, sub.num_rows), dtype=np.int64)
    sizes = [int(s) for s in sub.conj.sizes]
    sub_conj_vals = [
        [sub.value_in(ctx, j, k).conjugate() for k in range(sub.num_rows)]
        for j in range(sub.num_rows)
    ]
    for i in range(sup.num_rows):
        sup_vals = [sup.value_in(ctx, i, int(class_map[k])) for k in range(sub.num_rows)]
        for j in range(sub.num_rows):
            acc = ctx.zero()
            for k in range(sub.num_rows):
                acc = acc + sup_vals[k] * sub_conj_vals[j][k] * sizes[k]
            total = acc.rational()
            if total < 0 or total % h:
                raise CharTableError(f"restriction sum not a multiplicity at ({i}, {j})")
            out[i, j] = total // h
    return out
