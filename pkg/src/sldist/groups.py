"""Dense enumeration of GL_n(E) and its named subgroups, with conjugacy data.

One master index: every element of GL_n(E) is a row-major matrix of field
indices, encoded as an integer in base q^2 (entry (0,0) least significant)
and stored sorted by that encoding.  Subgroups are boolean bitmaps over
the master index, so cross-subgroup lookups during restriction sums never
re-hash elements.

Conjugacy classes are computed by orbit flood-fill under a small seeded
generating set whose closure is verified to be the whole group, which
makes the orbits provably exact; class labels are then canonicalized (size
ascending, then least master position) so reports do not depend on the
seed.  Construction is the only mutating phase; afterwards, every array is
treated as read-only, so batched character sums can share the data freely.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .ff import FieldTower

__all__ = [
    "SizeGuardError",
    "GroupStructureError",
    "GROUP_KINDS",
    "EnumeratedGL",
    "GroupView",
    "ConjugacyData",
    "UnipotentData",
    "enumerate_group",
    "conjugacy_classes",
    "glplus_cosets",
    "general_linear_order",
]

GROUP_KINDS = ("gl-e", "sl-e", "gl-f", "sl-f", "gl-plus", "n-e", "center")

DEFAULT_MAX_GROUP_ORDER = 2_000_000
DEFAULT_SEED = 7

_CENTRALIZER_CHECK_BUDGET = 20_000_000


class SizeGuardError(RuntimeError):
    """Requested group exceeds the configured enumeration guard."""


class GroupStructureError(RuntimeError):
    """Internal consistency failure in group construction."""


def general_linear_order(card: int, n: int) -> int:
    """|GL_n(F_card)| by the product formula."""
    return math.prod(card**n - card**i for i in range(n))


# ---------------------------------------------------------------------------
# batched matrix arithmetic on field-index arrays


def mat_mul(tower: FieldTower, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Entrywise-table matrix product; A, B broadcastable (..., n, n)."""
    n = A.shape[-1]
    mul, add = tower.mul, tower.add
    out = np.empty(np.broadcast_shapes(A.shape, B.shape), dtype=np.int32)
    for i in range(n):
        for j in range(n):
            acc = mul[A[..., i, 0], B[..., 0, j]]
            for k in range(1, n):
                acc = add[acc, mul[A[..., i, k], B[..., k, j]]]
            out[..., i, j] = acc
    return out


def mat_det(tower: FieldTower, A: np.ndarray) -> np.ndarray:
    """Determinant by signed permutation expansion (n <= 4 in practice)."""
    n = A.shape[-1]
    mul, add, neg = tower.mul, tower.add, tower.neg
    acc = None
    for perm in itertools.permutations(range(n)):
        term = A[..., 0, perm[0]]
        for i in range(1, n):
            term = mul[term, A[..., i, perm[i]]]
        if _perm_sign(perm) < 0:
            term = neg[term]
        acc = term if acc is None else add[acc, term]
    return acc


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def mat_inverse(tower: FieldTower, A: np.ndarray, det: np.ndarray | None = None) -> np.ndarray:
    """Inverse via the adjugate; requires invertible inputs."""
    n = A.shape[-1]
    if det is None:
        det = mat_det(tower, A)
    det_inv = tower.inv[det]
    if n == 1:
        return det_inv[..., None, None].astype(np.int32)
    out = np.empty_like(A)
    rows = list(range(n))
    for i in range(n):
        for j in range(n):
            sub = A[..., [r for r in rows if r != i], :][..., :, [c for c in rows if c != j]]
            cof = mat_det(tower, sub)
            if (i + j) % 2 == 1:
                cof = tower.neg[cof]
            out[..., j, i] = tower.mul[cof, det_inv]
    return out


def identity_matrix(n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=np.int32)
    np.fill_diagonal(out, 1)
    return out


# ---------------------------------------------------------------------------
# master enumeration


class EnumeratedGL:
    """GL_n(E) fully enumerated, plus bitmapped subgroup views.

    Elements are addressed by position in the encoding-sorted master list.
    """

    def __init__(
        self,
        tower: FieldTower,
        n: int,
        max_order: int = DEFAULT_MAX_GROUP_ORDER,
        seed: int = DEFAULT_SEED,
    ):
        if n < 1:
            raise SizeGuardError(f"n = {n} must be >= 1")
        card = tower.order_E
        order = general_linear_order(card, n)
        if order > max_order:
            raise SizeGuardError(
                f"|GL_{n}(F_{card})| = {order} exceeds max_group_order = {max_order}"
            )
        self.tower = tower
        self.n = n
        self.seed = seed
        self.order = order
        self.radix = card

        total = card ** (n * n)
        codes = np.arange(total, dtype=np.int64)
        mats = np.empty((total, n, n), dtype=np.int32)
        c = codes.copy()
        for i in range(n):
            for j in range(n):
                mats[:, i, j] = c % card
                c //= card
        dets = mat_det(tower, mats)
        keep = dets != 0
        self.elems = mats[keep]
        self.encodes = codes[keep]
        self.det_idx = dets[keep].astype(np.int32)
        if len(self.elems) != order:
            raise GroupStructureError("enumerated order disagrees with the product formula")
        self.det_log = tower.log[self.det_idx].astype(np.int64)

        self._powers = (card ** np.arange(n * n, dtype=np.int64)).reshape(n, n)
        self.identity_pos = int(self.position_of(self.encode(identity_matrix(n))))
        invs = mat_inverse(tower, self.elems, self.det_idx)
        self.inv_pos = self.position_of(self.encode(invs)).astype(np.int32)
        self.frob_pos = self.position_of(self.encode(tower.frob[self.elems])).astype(np.int32)
        self._views: dict[str, GroupView] = {}

    # -- encoding ------------------------------------------------------------

    def encode(self, mats: np.ndarray) -> np.ndarray:
        return (mats.astype(np.int64) * self._powers).sum(axis=(-2, -1))

    def position_of(self, codes: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self.encodes, codes)
        if np.any(pos >= len(self.encodes)) or np.any(self.encodes[pos] != codes):
            raise GroupStructureError("product left the enumerated group")
        return pos

    # -- group operations on positions ----------------------------------------

    def mul_pos(self, a, b) -> np.ndarray:
        prod = mat_mul(self.tower, self.elems[a], self.elems[b])
        return self.position_of(self.encode(prod))

    def conj_pos(self, g: int, xs: np.ndarray) -> np.ndarray:
        """Positions of g * x * g^-1 for a batch of positions xs."""
        left = mat_mul(self.tower, self.elems[g], self.elems[xs])
        prod = mat_mul(self.tower, left, self.elems[self.inv_pos[g]])
        return self.position_of(self.encode(prod))

    def element_order(self, pos: int) -> int:
        o, cur = 1, pos
        while cur != self.identity_pos:
            cur = int(self.mul_pos(cur, pos))
            o += 1
        return o

    # -- subgroup views --------------------------------------------------------

    def view(self, kind: str) -> "GroupView":
        if kind not in GROUP_KINDS:
            raise ValueError(f"unknown group kind {kind!r}; expected one of {GROUP_KINDS}")
        if kind not in self._views:
            self._views[kind] = GroupView(self, kind, self._mask(kind))
        return self._views[kind]

    def _mask(self, kind: str) -> np.ndarray:
        tower, n = self.tower, self.n
        q = tower.q
        if kind == "gl-e":
            return np.ones(self.order, dtype=bool)
        if kind == "sl-e":
            return self.det_idx == 1
        if kind == "gl-f":
            return (self.elems < q).all(axis=(1, 2))
        if kind == "sl-f":
            return self._mask("gl-f") & self._mask("sl-e")
        if kind == "gl-plus":
            d = self.glplus_index()
            return self.det_log % d == 0
        if kind == "n-e":
            mask = np.ones(self.order, dtype=bool)
            for i in range(n):
                mask &= self.elems[:, i, i] == 1
                for j in range(i):
                    mask &= self.elems[:, i, j] == 0
            return mask
        if kind == "center":
            mask = np.ones(self.order, dtype=bool)
            for i in range(n):
                for j in range(n):
                    if i != j:
                        mask &= self.elems[:, i, j] == 0
                if i > 0:
                    mask &= self.elems[:, i, i] == self.elems[:, 0, 0]
            return mask
        raise AssertionError(kind)

    def glplus_index(self) -> int:
        """Index of GL_n(E)+ in GL_n(E), from the cyclic group E^x."""
        return math.gcd(self.n, self.tower.q + 1)

    def __repr__(self):
        return f"EnumeratedGL(n={self.n}, q^2={self.tower.order_E}, order={self.order})"


class GroupView:
    """A named subgroup sharing the master element index."""

    def __init__(self, master: EnumeratedGL, kind: str, mask: np.ndarray):
        self.master = master
        self.kind = kind
        self.mask = mask
        self.positions = np.nonzero(mask)[0].astype(np.int64)
        self.order = len(self.positions)
        pos_in_view = np.full(master.order, -1, dtype=np.int64)
        pos_in_view[self.positions] = np.arange(self.order)
        self.pos_in_view = pos_in_view
        self._conjugacy: ConjugacyData | None = None
        self._validate()

    def _validate(self):
        m = self.master
        q2, q, n = m.tower.order_E, m.tower.q, m.n
        expected = {
            "gl-e": m.order,
            "sl-e": m.order // (q2 - 1),
            "gl-f": general_linear_order(q, n),
            "sl-f": general_linear_order(q, n) // max(q - 1, 1),
            "gl-plus": m.order // m.glplus_index(),
            "n-e": q2 ** (n * (n - 1) // 2),
            "center": q2 - 1,
        }[self.kind]
        if self.order != expected:
            raise GroupStructureError(
                f"view {self.kind}: enumerated order {self.order} != expected {expected}"
            )
        if not self.mask[m.identity_pos]:
            raise GroupStructureError(f"view {self.kind} misses the identity")

    def contains_positions(self, pos: np.ndarray) -> np.ndarray:
        return self.mask[pos]

    def conjugacy(self, seed: int | None = None) -> "ConjugacyData":
        if self._conjugacy is None:
            self._conjugacy = ConjugacyData(self, self.master.seed if seed is None else seed)
        return self._conjugacy

    @cached_property
    def mask_key(self) -> bytes:
        return np.packbits(self.mask).tobytes()

    def __repr__(self):
        return f"GroupView({self.kind}, order={self.order})"


# ---------------------------------------------------------------------------
# conjugacy


_KIND_CODE = {kind: i + 1 for i, kind in enumerate(GROUP_KINDS)}


class ConjugacyData:
    """Conjugacy classes of a view, canonically ordered.

    class ids are assigned by (size ascending, least master position);
    sigma_perm and inverse_perm are the induced permutations of class ids
    under entrywise Frobenius and group inversion.  power_class[k][s] is
    the class id of rep_k^s, which later drives the exact character lift.
    """

    def __init__(self, view: GroupView, seed: int):
        self.view = view
        master = view.master
        self.generators = _generating_set(view, seed)
        class_of = _flood_fill(view, self.generators)

        # canonical relabel
        num = int(class_of.max()) + 1
        sizes = np.bincount(class_of, minlength=num)
        first_member = np.full(num, np.iinfo(np.int64).max, dtype=np.int64)
        for vidx in range(len(class_of) - 1, -1, -1):
            first_member[class_of[vidx]] = view.positions[vidx]
        order_key = np.lexsort((first_member, sizes))
        relabel = np.empty(num, dtype=np.int64)
        relabel[order_key] = np.arange(num)
        self.class_of = relabel[class_of]
        self.sizes = sizes[order_key]
        self.reps = first_member[order_key]
        self.num_classes = num

        if int(self.sizes.sum()) != view.order:
            raise GroupStructureError("class sizes do not sum to the group order")
        if any(view.order % int(s) for s in self.sizes):
            raise GroupStructureError("a class size does not divide the group order")

        self.inverse_perm = self.class_of_positions(master.inv_pos[self.reps])
        self.sigma_perm = self.class_of_positions(master.frob_pos[self.reps])
        if not np.array_equal(self.inverse_perm[self.inverse_perm], np.arange(num)):
            raise GroupStructureError("inversion is not an involution on classes")
        if not np.array_equal(self.sigma_perm[self.sigma_perm], np.arange(num)):
            raise GroupStructureError("sigma is not an involution on classes")

        self.identity_class = int(self.class_of[view.pos_in_view[master.identity_pos]])
        self._build_power_chains()
        self.class_det_log = master.det_log[self.reps]
        self._members = None
        self._centralizer_check()

    # -- lookups ---------------------------------------------------------------

    def class_of_positions(self, pos) -> np.ndarray:
        vidx = self.view.pos_in_view[pos]
        if np.any(vidx < 0):
            raise GroupStructureError("position outside the view in class lookup")
        return self.class_of[vidx]

    def members(self, k: int) -> np.ndarray:
        """Master positions of class k, ascending."""
        if self._members is None:
            order = np.argsort(self.class_of, kind="stable")
            bounds = np.cumsum(np.bincount(self.class_of, minlength=self.num_classes))
            self._members = (order, np.concatenate([[0], bounds]))
        order, bounds = self._members
        return self.view.positions[order[bounds[k] : bounds[k + 1]]]

    # -- construction internals --------------------------------------------------

    def _build_power_chains(self):
        master = self.view.master
        chains = []
        orders = np.empty(self.num_classes, dtype=np.int64)
        for k, rep in enumerate(self.reps):
            chain = [self.identity_class]
            cur = int(rep)
            while cur != master.identity_pos:
                chain.append(int(self.class_of_positions(np.array([cur]))[0]))
                cur = int(master.mul_pos(cur, int(rep)))
            chains.append(np.array(chain, dtype=np.int64))
            orders[k] = len(chain)
        self.power_class = chains
        self.rep_orders = orders
        self.exponent = math.lcm(*orders.tolist())

    def power_map(self, t: int) -> np.ndarray:
        """Class permutation induced by g -> g^t for t coprime to the exponent."""
        return np.array(
            [self.power_class[k][t % o] for k, o in enumerate(self.rep_orders.tolist())],
            dtype=np.int64,
        )

    def _centralizer_check(self):
        view, master = self.view, self.view.master
        budget = _CENTRALIZER_CHECK_BUDGET // max(view.order, 1)
        check = range(self.num_classes) if self.num_classes <= budget else range(min(8, self.num_classes))
        elems = master.elems[view.positions]
        for k in check:
            g = master.elems[self.reps[k]]
            commute = (mat_mul(master.tower, elems, g) == mat_mul(master.tower, g, elems)).all(
                axis=(1, 2)
            )
            if int(commute.sum()) * int(self.sizes[k]) != view.order:
                raise GroupStructureError(
                    f"class {k}: centralizer order x class size != group order"
                )


def _generating_set(view: GroupView, seed: int) -> list[int]:
    """Seeded random generators whose closure provably equals the view."""
    if view.order == 1:
        return []
    master = view.master
    rng = np.random.default_rng(np.random.SeedSequence([seed, _KIND_CODE[view.kind]]))
    gens: list[int] = []
    for _ in range(64):
        cand = int(view.positions[int(rng.integers(view.order))])
        if cand == master.identity_pos or cand in gens:
            continue
        gens.append(cand)
        if _closure_size(view, gens) == view.order:
            return gens
    raise GroupStructureError(f"could not generate view {view.kind} in 64 draws")


def _closure_size(view: GroupView, gens: list[int]) -> int:
    master = view.master
    visited = np.zeros(view.order, dtype=bool)
    visited[view.pos_in_view[master.identity_pos]] = True
    frontier = np.array([master.identity_pos], dtype=np.int64)
    gen_arr = np.array(gens, dtype=np.int64)
    while len(frontier):
        prods = master.mul_pos(frontier[:, None], gen_arr[None, :]).ravel()
        vidx = view.pos_in_view[prods]
        if np.any(vidx < 0):
            raise GroupStructureError("closure left the view; view is not a subgroup")
        new = np.unique(vidx[~visited[vidx]])
        visited[new] = True
        frontier = view.positions[new]
    return int(visited.sum())


def _flood_fill(view: GroupView, gens: list[int]) -> np.ndarray:
    """Conjugation orbits under the verified generating set."""
    class_of = np.full(view.order, -1, dtype=np.int64)
    master = view.master
    next_id = 0
    for start in range(view.order):
        if class_of[start] >= 0:
            continue
        class_of[start] = next_id
        frontier = view.positions[[start]]
        while len(frontier):
            collected = []
            for g in gens:
                conj = master.conj_pos(g, frontier)
                vidx = view.pos_in_view[conj]
                if np.any(vidx < 0):
                    raise GroupStructureError("conjugation left the view")
                fresh = vidx[class_of[vidx] < 0]
                if len(fresh):
                    class_of[fresh] = next_id
                    collected.append(fresh)
            if collected:
                frontier = view.positions[np.unique(np.concatenate(collected))]
            else:
                frontier = view.positions[[]]
        next_id += 1
    return class_of


# ---------------------------------------------------------------------------
# unipotent data and cosets


@dataclass
class UnipotentData:
    """The upper unitriangular subgroup with its superdiagonal coordinates."""

    view: GroupView
    superdiag: np.ndarray  # (|N|, n-1) field indices u_(i,i+1)
    superdiag_code: np.ndarray  # base-q^2 packing of the superdiagonal

    @classmethod
    def build(cls, master: EnumeratedGL) -> "UnipotentData":
        view = master.view("n-e")
        n, card = master.n, master.radix
        mats = master.elems[view.positions]
        if n > 1:
            superdiag = np.stack([mats[:, i, i + 1] for i in range(n - 1)], axis=1)
        else:
            superdiag = np.zeros((view.order, 0), dtype=np.int32)
        code = (superdiag.astype(np.int64) * card ** np.arange(max(n - 1, 0))).sum(axis=1)
        data = cls(view, superdiag, code)
        covered = np.unique(code)
        if len(covered) != card ** max(n - 1, 0):
            raise GroupStructureError("superdiagonal map is not surjective")
        return data


def glplus_cosets(master: EnumeratedGL) -> list[int]:
    """Coset representatives of GL+ in GL, least position per det class.

    The coset count is computed independently on the group side (bitmap)
    and the cyclic side (gcd in E^x) and must agree.
    """
    d = master.glplus_index()
    plus = master.view("gl-plus")
    group_side = master.order // plus.order
    if group_side != d:
        raise GroupStructureError(f"GL+ index mismatch: group side {group_side}, cyclic side {d}")
    reps = []
    residues = master.det_log % d
    for j in range(d):
        reps.append(int(np.nonzero(residues == j)[0][0]))
    return reps


# ---------------------------------------------------------------------------
# spec-level helpers


def enumerate_group(
    tower: FieldTower,
    n: int,
    which: str,
    max_order: int = DEFAULT_MAX_GROUP_ORDER,
    seed: int = DEFAULT_SEED,
) -> GroupView:
    """Enumerate GL_n(E) and return the requested subgroup view."""
    return EnumeratedGL(tower, n, max_order=max_order, seed=seed).view(which)


def conjugacy_classes(view: GroupView, seed: int | None = None) -> ConjugacyData:
    return view.conjugacy(seed)
