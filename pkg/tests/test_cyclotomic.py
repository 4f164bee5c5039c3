"""Cyclotomic integer arithmetic against independent oracles."""

import numpy as np
import pytest

from sldist.cyclotomic import Cyclo, CycloContext, cyclotomic_polynomial

CONDUCTORS = [1, 2, 3, 4, 5, 8, 12, 15, 30, 60, 105, 240, 420, 1260]


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


@pytest.mark.parametrize("e", CONDUCTORS)
def test_cyclotomic_product_identity(e):
    # prod over d | e of Phi_d(x) = x^e - 1, computed with plain int polys
    prod = [1]
    for d in range(1, e + 1):
        if e % d == 0:
            prod = _poly_mul(prod, list(cyclotomic_polynomial(d)))
    expected = [-1] + [0] * (e - 1) + [1]
    assert prod == expected


def test_known_small_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(2) == (1, 1)
    assert cyclotomic_polynomial(4) == (1, 0, 1)
    assert cyclotomic_polynomial(5) == (1, 1, 1, 1, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)


@pytest.mark.parametrize("e", [12, 30, 240])
def test_reduction_matches_complex_roots(e):
    ctx = CycloContext(e)
    z = np.exp(2j * np.pi / e)
    basis = ctx.complex_basis()
    for j in range(e):
        exact = ctx.red[j] @ basis
        assert abs(exact - z**j) < 1e-8


@pytest.mark.parametrize("e", [30, 240])
def test_ring_operations_numeric_oracle(e):
    ctx = CycloContext(e)
    rng = np.random.default_rng(7)
    for _ in range(25):
        a = ctx.root(int(rng.integers(e))) + ctx.from_integer(int(rng.integers(-3, 4)))
        b = ctx.root(int(rng.integers(e))) * int(rng.integers(1, 5))
        for exact, approx in [
            (a + b, a.to_complex() + b.to_complex()),
            (a - b, a.to_complex() - b.to_complex()),
            (a * b, a.to_complex() * b.to_complex()),
            (a.conjugate(), np.conj(a.to_complex())),
        ]:
            assert abs(exact.to_complex() - approx) < 1e-7


@pytest.mark.parametrize("e", [30, 60])
def test_conjugation_and_galois_are_ring_maps(e):
    ctx = CycloContext(e)
    rng = np.random.default_rng(11)
    ts = [t for t in range(1, e) if np.gcd(t, e) == 1]
    for _ in range(20):
        a = ctx.root(int(rng.integers(e))) + ctx.root(int(rng.integers(e)))
        b = ctx.root(int(rng.integers(e))) - ctx.from_integer(2)
        t = int(rng.choice(ts))
        assert (a * b).galois(t) == a.galois(t) * b.galois(t)
        assert (a + b).galois(t) == a.galois(t) + b.galois(t)
        assert (a * b).conjugate() == a.conjugate() * b.conjugate()
        # conjugation is the galois map t = e-1
        assert a.conjugate() == a.galois(e - 1)


def test_root_multiplicities_embedding():
    ctx = CycloContext(30)
    # zeta_5 embedded: 1 + zeta_5 + ... + zeta_5^4 = 0
    val = ctx.from_root_multiplicities(5, [1, 1, 1, 1, 1])
    assert val.is_zero
    # zeta_2 = -1
    assert ctx.from_root_multiplicities(2, [0, 1]) == ctx.from_integer(-1)
    with pytest.raises(ValueError):
        ctx.from_root_multiplicities(7, [1])


def test_rationality_detection():
    ctx = CycloContext(12)
    z = ctx.root(1)
    total = sum((z.galois(t) for t in (5, 7, 11)), z)  # full galois orbit sum
    assert total.is_rational  # it is the trace, an integer
    assert ctx.root(3) * ctx.root(9) == ctx.one()
    with pytest.raises(ValueError):
        z.rational()


def test_golden_ratio_value():
    # -(zeta_5^2 + zeta_5^3) = (1+sqrt(5))/2
    ctx = CycloContext(30)
    v = -(ctx.from_root_multiplicities(5, [0, 0, 1, 1]))
    assert abs(v.to_complex() - (1 + 5**0.5) / 2) < 1e-9
    # its galois conjugate under t coprime moving zeta_5 -> zeta_5^2
    w = v.galois(7)  # 7 = 1 mod 6, 2 mod 5: moves zeta_5 to zeta_5^2
    assert abs(w.to_complex() - (1 - 5**0.5) / 2) < 1e-9
    assert v + w == ctx.one()
    assert v * w == ctx.from_integer(-1)
