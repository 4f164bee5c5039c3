"""Matrix group enumeration, subgroup views, and conjugacy structure."""

import numpy as np
import pytest

from sldist.ff import build_tower
from sldist.groups import (
    EnumeratedGL,
    SizeGuardError,
    UnipotentData,
    conjugacy_classes,
    enumerate_group,
    general_linear_order,
    glplus_cosets,
    identity_matrix,
    mat_det,
    mat_inverse,
    mat_mul,
)


@pytest.fixture(scope="module")
def gl2_f4():
    return EnumeratedGL(build_tower(2, 1), 2)


@pytest.fixture(scope="module")
def gl2_f9():
    return EnumeratedGL(build_tower(3, 1), 2)


def test_orders_q2_n2(gl2_f4):
    m = gl2_f4
    assert m.order == 180
    assert m.view("sl-e").order == 60
    assert m.view("gl-f").order == 6
    assert m.view("sl-f").order == 6
    assert m.view("n-e").order == 4
    assert m.view("center").order == 3


def test_orders_q3_n2(gl2_f9):
    m = gl2_f9
    assert m.order == 5760
    assert m.view("sl-e").order == 720
    assert m.view("gl-f").order == 48
    assert m.view("n-e").order == 9


def test_orders_q2_n3():
    m = EnumeratedGL(build_tower(2, 1), 3)
    assert m.order == 181440
    assert m.view("n-e").order == 64
    assert m.view("gl-f").order == general_linear_order(2, 3) == 168


def test_size_guard():
    with pytest.raises(SizeGuardError) as err:
        EnumeratedGL(build_tower(3, 1), 3)
    assert "exceeds" in str(err.value)


def test_matrix_arithmetic_roundtrip(gl2_f9):
    m = gl2_f9
    rng = np.random.default_rng(3)
    pos = rng.integers(0, m.order, size=200)
    mats = m.elems[pos]
    invs = mat_inverse(m.tower, mats, m.det_idx[pos])
    prod = mat_mul(m.tower, mats, invs)
    assert np.array_equal(prod, np.broadcast_to(identity_matrix(2), prod.shape))
    # det multiplicative on sampled pairs
    a, b = mats[:100], mats[100:]
    ab = mat_mul(m.tower, a, b)
    assert np.array_equal(
        mat_det(m.tower, ab), m.tower.mul[mat_det(m.tower, a), mat_det(m.tower, b)]
    )


def test_subgroup_closure_spot_checks(gl2_f9):
    m = gl2_f9
    rng = np.random.default_rng(5)
    for kind in ("sl-e", "gl-f", "sl-f", "gl-plus", "n-e", "center"):
        view = m.view(kind)
        pos = view.positions[rng.integers(0, view.order, size=64)]
        qos = view.positions[rng.integers(0, view.order, size=64)]
        prods = m.mul_pos(pos, qos)
        assert view.contains_positions(prods).all()
        assert view.contains_positions(m.inv_pos[pos]).all()


def test_class_counts_closed_forms(gl2_f4, gl2_f9):
    # number of classes of GL_2(F_card) is card^2 - 1
    assert gl2_f4.view("gl-e").conjugacy().num_classes == 15
    assert gl2_f9.view("gl-e").conjugacy().num_classes == 80


def test_class_count_gl3():
    m = EnumeratedGL(build_tower(2, 1), 3)
    # card^3 - card with card = 4
    assert m.view("gl-e").conjugacy().num_classes == 60


def test_class_equation_and_canonical_order(gl2_f9):
    cd = gl2_f9.view("gl-e").conjugacy()
    assert int(cd.sizes.sum()) == 5760
    assert all(5760 % int(s) == 0 for s in cd.sizes)
    assert list(cd.sizes) == sorted(cd.sizes)
    # representative is the least member of its class
    for k in (0, 10, 40, 79):
        assert cd.reps[k] == cd.members(k).min()
    assert cd.sizes[cd.identity_class] == 1


def test_seed_independence(gl2_f4):
    a = conjugacy_classes(gl2_f4.view("gl-e"), seed=7)
    b = ConjA = conjugacy_classes(GroupViewCopy(gl2_f4), seed=12345)
    assert np.array_equal(a.class_of, b.class_of)
    assert np.array_equal(a.reps, b.reps)


def GroupViewCopy(master):
    # fresh view object so the cached conjugacy is not reused
    from sldist.groups import GroupView

    return GroupView(master, "gl-e", master._mask("gl-e"))


def test_class_permutations(gl2_f4):
    cd = gl2_f4.view("gl-e").conjugacy()
    n = cd.num_classes
    assert np.array_equal(cd.sigma_perm[cd.sigma_perm], np.arange(n))
    assert np.array_equal(cd.inverse_perm[cd.inverse_perm], np.arange(n))
    # sigma and inversion commute
    assert np.array_equal(cd.sigma_perm[cd.inverse_perm], cd.inverse_perm[cd.sigma_perm])
    # identity class fixed by both
    assert cd.sigma_perm[cd.identity_class] == cd.identity_class
    assert cd.inverse_perm[cd.identity_class] == cd.identity_class
    # order-2 classes fixed by inversion
    for k in range(n):
        if cd.rep_orders[k] == 2:
            assert cd.inverse_perm[k] == k


def test_sigma_fixed_classes_match_rational_classes(gl2_f4):
    m = gl2_f4
    cd = m.view("gl-e").conjugacy()
    sigma_fixed = int((cd.sigma_perm == np.arange(cd.num_classes)).sum())
    glf = m.view("gl-f")
    rational = len({int(c) for c in cd.class_of_positions(glf.positions)})
    assert sigma_fixed == rational


def test_power_chains(gl2_f9):
    cd = gl2_f9.view("gl-e").conjugacy()
    m = gl2_f9
    for k in (0, 7, 33, 79):
        o = int(cd.rep_orders[k])
        assert m.element_order(int(cd.reps[k])) == o
        assert cd.power_class[k][0] == cd.identity_class
        if o > 1:
            assert cd.power_class[k][1] == k
        assert cd.exponent % o == 0


def test_glplus_cosets():
    # n odd with gcd(n, q^2-1) = 1: GL+ = GL
    m32 = EnumeratedGL(build_tower(2, 1), 3)
    assert m32.glplus_index() == 3  # gcd(3, q+1 = 3)
    m21 = EnumeratedGL(build_tower(2, 1), 2)
    assert len(glplus_cosets(m21)) == 1
    m23 = EnumeratedGL(build_tower(3, 1), 2)
    assert len(glplus_cosets(m23)) == 2


def test_glplus_factorization_witness(gl2_f9):
    """Every g in GL+ factors as z * h * s with z central, h rational, s in SL."""
    m = gl2_f9
    tower = m.tower
    plus = m.view("gl-plus")
    n, q = m.n, tower.q
    m_units = tower.unit_order
    for pos in plus.positions[:: max(1, plus.order // 97)]:
        dlog = int(m.det_log[pos])
        witness = None
        for zlog in range(m_units):
            rem = (dlog - n * zlog) % m_units
            if rem % (q + 1) == 0:  # remaining determinant lies in F^x
                witness = (zlog, rem)
                break
        assert witness is not None
        zlog, rem = witness
        z = int(tower.exp[zlog])
        h = identity_matrix(n)
        h[0, 0] = int(tower.exp[rem])  # in F^x, so h is in GL_n(F)
        assert tower.is_in_F(h[0, 0])
        zh = tower.mul[z, h].astype(np.int32)
        s = mat_mul(tower, mat_inverse(tower, zh), m.elems[pos][None])[0]
        assert int(mat_det(tower, s)) == 1
        recomposed = mat_mul(tower, zh, s)
        assert np.array_equal(recomposed, m.elems[pos])


def test_unipotent_data(gl2_f9):
    ud = UnipotentData.build(gl2_f9)
    assert ud.view.order == 9
    # superdiagonal map N -> E^(n-1) is onto with fibers of equal size
    codes, counts = np.unique(ud.superdiag_code, return_counts=True)
    assert len(codes) == 9 and len(set(counts.tolist())) == 1


def test_unipotent_kernel_size_n3():
    m = EnumeratedGL(build_tower(2, 1), 3)
    ud = UnipotentData.build(m)
    q2 = m.tower.order_E
    kernel = int((ud.superdiag_code == 0).sum())
    assert kernel == ud.view.order // q2 ** (m.n - 1)
    # superdiagonal map is a homomorphism: check on sampled pairs
    rng = np.random.default_rng(2)
    pos = ud.view.positions
    a = pos[rng.integers(0, len(pos), 50)]
    b = pos[rng.integers(0, len(pos), 50)]
    prods = m.mul_pos(a, b)
    vi = ud.view.pos_in_view
    add = m.tower.add
    for i in range(m.n - 1):
        lhs = ud.superdiag[vi[prods], i]
        rhs = add[ud.superdiag[vi[a], i], ud.superdiag[vi[b], i]]
        assert np.array_equal(lhs, rhs)


def test_enumerate_group_entry_point():
    view = enumerate_group(build_tower(2, 1), 2, "sl-e")
    assert view.order == 60
    with pytest.raises(ValueError):
        enumerate_group(build_tower(2, 1), 2, "so-3")


def test_n1_edge_case():
    m = EnumeratedGL(build_tower(3, 1), 1)
    assert m.order == 8
    assert m.view("sl-e").order == 1
    assert m.view("n-e").order == 1
    cd = m.view("gl-e").conjugacy()
    assert cd.num_classes == 8  # abelian
    ud = UnipotentData.build(m)
    assert ud.superdiag.shape == (1, 0)
