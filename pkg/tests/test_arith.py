import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.arith import (CharacterError, CharSpec, EisensteinElem, PrimeConfig, cyclo_conj,
                            cyclo_in_y_subring, cyclo_mul, cyclo_ring, decompose_m, fq2,
                            galois_act_F, omega2, root_of_unity, teichmuller, valid_characters,
                            w1_candidates, witt, witt_from_fq2)

PRIMES = [3, 5]


# -- F_{p^2} ------------------------------------------------------------------


@pytest.mark.parametrize("p", [3, 5, 7])
def test_fq2_frobenius_is_an_involution_and_group_order(p):
    F = fq2(p)
    for x in range(F.q):
        assert F.frob(F.frob(x)) == x
        if x:
            assert F.pow(x, F.q - 1) == 1
    assert any(F.frob(x) != x for x in range(F.q))
    assert len(F.log) == F.q - 1


@pytest.mark.parametrize("p", [3, 5])
def test_modulus_is_smallest_irreducible(p):
    F = fq2(p)
    a, b = F.a, F.b
    assert all((x * x + a * x + b) % p for x in range(p))
    for a2 in range(p):
        for b2 in range(p):
            if (a2, b2) < (a, b):
                assert any((x * x + a2 * x + b2) % p == 0 for x in range(p))


def test_prime_config_validation():
    assert PrimeConfig(3).K == 4 * 8
    with pytest.raises(ValueError):
        PrimeConfig(4)
    with pytest.raises(ValueError):
        PrimeConfig(3, N=1)
    with pytest.raises(ValueError):
        PrimeConfig(3, modulus=(0, 2))  # x^2 + 2 = (x-1)(x+1) over F_3


# -- Witt vectors ---------------------------------------------------------------


@pytest.mark.parametrize("p", PRIMES)
def test_witt_reduces_to_fq2(p):
    rng = random.Random(p)
    F = fq2(p)
    M = p ** 4
    for _ in range(200):
        x = witt(p, 4, rng.randrange(M), rng.randrange(M))
        y = witt(p, 4, rng.randrange(M), rng.randrange(M))
        assert (x * y).residue().code == F.mul(x.residue().code, y.residue().code)
        assert (x + y).residue().code == F.add(x.residue().code, y.residue().code)
        assert x.sigma().residue().code == F.frob(x.residue().code)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 3 ** 4 - 1), st.integers(0, 3 ** 4 - 1), st.integers(0, 3 ** 4 - 1),
       st.integers(0, 3 ** 4 - 1))
def test_witt_ring_laws(a, b, c, d):
    x, y = witt(3, 4, a, b), witt(3, 4, c, d)
    assert x * y == y * x
    assert (x + y) * x == x * x + y * x
    assert x.sigma().sigma() == x
    assert (x * y).sigma() == x.sigma() * y.sigma()
    if x.is_unit():
        assert x * x.inverse() == 1


def test_teichmuller_trivial_cases():
    for p in PRIMES:
        assert teichmuller(1, p, 4) == 1
        assert teichmuller(fq2(p).neg(1), p, 4) == -1
        assert teichmuller(0, p, 4).is_zero()


@pytest.mark.parametrize("p, N", [(3, 3), (3, 4), (5, 3)])
def test_teichmuller_against_frobenius_power_oracle(p, N):
    # naive lift raised to q^{N-1} is the root-of-unity lift mod p^N
    F = fq2(p)
    for a in range(1, F.q):
        oracle = witt_from_fq2(a, p, N) ** (F.q ** (N - 1))
        t = teichmuller(a, p, N)
        assert t == oracle
        assert t ** (F.q - 1) == 1
        assert t.residue().code == a


@pytest.mark.parametrize("p", PRIMES)
def test_teichmuller_multiplicative(p):
    F = fq2(p)
    rng = random.Random(0)
    for _ in range(50):
        a, b = rng.randrange(1, F.q), rng.randrange(1, F.q)
        assert teichmuller(a, p, 4) * teichmuller(b, p, 4) == teichmuller(F.mul(a, b), p, 4)


def test_w1_candidates():
    c = w1_candidates(3, 4)
    assert len(c) == 4
    for t in c:
        assert t ** 8 == 1 and t ** 4 == -1
    for p in PRIMES:
        cands = w1_candidates(p, 4)
        assert len(set(cands)) == p + 1
        for t in cands:
            assert t ** (p + 1) == -1
            assert t ** (2 * (p + 1)) == 1


# -- characters -------------------------------------------------------------------


def test_decompose_m_examples():
    assert decompose_m(13, 5) == (1, 2, 7)
    assert decompose_m(7, 3) == (3, 1, 3)
    with pytest.raises(CharacterError):
        decompose_m(4, 3)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_decompose_m_bijection(p):
    seen = set()
    for ch in valid_characters(p):
        assert ch.m == ch.i + (p + 1) * ch.j
        assert 1 <= ch.i <= p and 0 <= ch.j <= p - 2
        assert ch.bracket_minus_mp == (-ch.m * p) % (p * p - 1)
        seen.add((ch.i, ch.j))
    assert len(seen) == len(valid_characters(p)) == p * p - 2 - (p - 2)
    assert seen == {(i, j) for i in range(1, p + 1) for j in range(p - 1)
                    if i + (p + 1) * j <= p * p - 2}


def test_frobenius_twist_is_an_involution():
    for ch in valid_characters(5):
        tw = ch.frobenius_twist()
        assert tw != ch
        assert tw.frobenius_twist() == ch


# -- O_F ---------------------------------------------------------------------------


def _random_eis(p, N, rng):
    M = p ** N
    return EisensteinElem(p, N, tuple((rng.randrange(M), rng.randrange(M))
                                      for _ in range(p * p - 1)))


@pytest.mark.parametrize("p", PRIMES)
def test_varpi_relation(p):
    e = p * p - 1
    v = EisensteinElem.varpi_power(1, p, 4)
    assert v ** e == EisensteinElem.scalar(witt(p, 4, -p))
    assert v.valuation() == 1
    assert v.normalized_valuation() * e == 1


@pytest.mark.parametrize("p", PRIMES)
def test_eisenstein_valuation_additive(p):
    rng = random.Random(7)
    for _ in range(200):
        # random elements with a prescribed small valuation, so the product is nonzero mod p^N
        x = _random_eis(p, 4, rng) * EisensteinElem.varpi_power(rng.randrange(5), p, 4)
        y = _random_eis(p, 4, rng) * EisensteinElem.varpi_power(rng.randrange(5), p, 4)
        if x.is_zero() or y.is_zero():
            continue
        vx, vy = x.valuation(), y.valuation()
        if vx + vy < (p * p - 1) * 4:
            assert (x * y).valuation() == vx + vy


@pytest.mark.parametrize("p", PRIMES)
def test_eisenstein_ring_laws(p):
    rng = random.Random(1)
    for _ in range(20):
        x, y, z = (_random_eis(p, 3, rng) for _ in range(3))
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        if x.is_unit():
            assert x * x.inverse() == EisensteinElem.scalar(witt(p, 3, 1))


@pytest.mark.parametrize("p", PRIMES)
def test_galois_action(p):
    rng = random.Random(3)
    e = p * p - 1
    z = _random_eis(p, 3, rng)
    assert galois_act_F(0, z) == z
    v = EisensteinElem.varpi_power(1, p, 3)
    for g in range(e):
        assert galois_act_F(g, v) == v * EisensteinElem.scalar(omega2(g, p, 3))
        assert galois_act_F(g, v ** e) == v ** e
    for _ in range(10):
        g, h = rng.randrange(e), rng.randrange(e)
        assert galois_act_F(g, galois_act_F(h, z)) == galois_act_F((g + h) % e, z)
        w = _random_eis(p, 3, rng)
        assert galois_act_F(g, z * w) == galois_act_F(g, z) * galois_act_F(g, w)


def test_root_of_unity_orders():
    for p in PRIMES:
        g = root_of_unity(1, p, 4)
        assert g ** (p * p - 1) == 1
        assert all(g ** k != 1 for k in range(1, p * p - 1))


# -- cyclotomic ring ------------------------------------------------------------


@pytest.mark.parametrize("p", PRIMES)
def test_cyclo_relations(p):
    R = cyclo_ring(p)
    assert sum((R.x(k) for k in range(1, p)), R.one()).is_zero()
    assert R.y(p * p - 1) == R.one()
    assert cyclo_in_y_subring(R.y(3)) and not cyclo_in_y_subring(R.x(1))


@pytest.mark.parametrize("p", PRIMES)
def test_cyclo_conj_involution_and_multiplicative(p):
    R = cyclo_ring(p)
    rng = random.Random(5)
    for _ in range(10):
        u = R.from_exponents({(rng.randrange(p), rng.randrange(R.n)): rng.randint(-3, 3)
                              for _ in range(4)})
        v = R.from_exponents({(rng.randrange(p), rng.randrange(R.n)): rng.randint(-3, 3)
                              for _ in range(4)})
        assert cyclo_conj(cyclo_conj(u)) == u
        assert cyclo_conj(cyclo_mul(u, v)) == cyclo_mul(cyclo_conj(u), cyclo_conj(v))
        assert cyclo_mul(u, v) == cyclo_mul(v, u)


def test_charspec_from_ij():
    assert CharSpec.from_ij(5, 1, 2).m == 13
