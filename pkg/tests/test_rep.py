import random
from fractions import Fraction

import numpy as np
import pytest

from artifact.rep import (IndElem, SymVec, ball_elem, bracket_elem, double_T_term,
                          equivariance_trials, hecke_coset_reps, hecke_factorization, hecke_T,
                          hecke_T_by_definition, in_hecke_double_coset, pairing, phi_r, phi_t,
                          random_compact, restrict, single_T_terms, sym_act, sym_mat, t_matrix,
                          translate)
from artifact.tree import (GMatrix, central_vertex, distance, neighbors, random_G, random_K,
                           w_matrix)

PRIMES = [3, 5]


def test_sym_act_examples():
    p = 5
    # x -> a x + c y, y -> b x + d y; index k is the coefficient of x^k y^{r-k}
    assert sym_act((1, 1, 0, 1), SymVec(p, 1, 0, (1, 0))).coeffs == (1, 1)
    assert sym_act((1, 1, 0, 1), SymVec(p, 1, 0, (0, 1))).coeffs == (0, 1)
    assert sym_act((0, 1, 1, 0), SymVec.monomial(p, 2, 0, 0)).coeffs == (0, 0, 1)
    # det twist: diag(2, 1) on det^1 scales x^k y^{r-k} by 2^{k+1}
    out = sym_act((2, 0, 0, 1), SymVec(p, 2, 1, (1, 1, 1)))
    assert out.coeffs == (2, 4, 3)


@pytest.mark.parametrize("p", PRIMES)
def test_sym_is_a_representation(p):
    rng = random.Random(p)
    for _ in range(20):
        g, h = random_K(p, rng), random_K(p, rng)
        r, j = rng.randrange(p), rng.randrange(p - 1)
        assert (sym_mat(g, r, j, p) @ sym_mat(h, r, j, p) % p == sym_mat(g @ h, r, j, p)).all()


@pytest.mark.parametrize("p", PRIMES)
def test_hecke_factorization(p):
    rng = random.Random(3)
    t = t_matrix(p)
    for _ in range(30):
        k1, k2 = random_K(p, rng), random_K(p, rng)
        a = rng.randint(-2, 2)
        g = (k1 @ t @ k2).scale(Fraction(p) ** a)
        assert in_hecke_double_coset(g, p)
        h1, h2, e = hecke_factorization(g, p)
        assert (h1 @ t @ h2).scale(Fraction(p) ** e) == g
    assert not in_hecke_double_coset(GMatrix.identity(), p)


@pytest.mark.parametrize("p", PRIMES)
def test_phi_r_is_bi_equivariant(p):
    rng = random.Random(5)
    t = t_matrix(p)
    for r in range(p):
        assert (phi_r(t, r, 0, p) == phi_t(r)).all()
        assert not phi_r(GMatrix.identity(), r, 0, p).any()
    for _ in range(20):
        r, j = rng.randrange(p), rng.randrange(p - 1)
        k1, k2 = random_K(p, rng), random_K(p, rng)
        g = k1 @ t @ random_K(p, rng)
        lhs = phi_r(k1 @ g @ k2, r, j, p)
        rhs = sym_mat(k1, r, j, p) @ phi_r(g, r, j, p) @ sym_mat(k2, r, j, p) % p
        assert (lhs == rhs).all()


@pytest.mark.parametrize("p", PRIMES)
def test_single_T_term_identities(p):
    checks = single_T_terms(p)
    assert checks
    for c in checks:
        assert c.ok, c.to_json()


@pytest.mark.parametrize("p", PRIMES)
def test_double_T_term_identity(p):
    c = double_T_term(p)
    assert c.ok, c.to_json()
    assert c.expected[p - 2] == p - 1  # the code of -1


@pytest.mark.parametrize("p", PRIMES)
def test_T_equivariance_and_two_routes(p):
    passed, total = equivariance_trials(p, 25, seed=1)
    assert passed == total == 25


@pytest.mark.parametrize("p", PRIMES)
def test_T_support_on_neighbours(p):
    c = central_vertex(p)
    for k in range(p - 1):
        X = bracket_elem(GMatrix.identity(), SymVec.monomial(p, p - 2, 0, k))
        supp = hecke_T(X).support()
        assert supp <= set(neighbors(c))
    X = bracket_elem(GMatrix.identity(), SymVec.monomial(p, p - 1, 0, 0))
    assert hecke_T(X).support() <= set(neighbors(c))


@pytest.mark.parametrize("p", PRIMES)
def test_T_linear(p):
    rng = random.Random(2)
    for _ in range(5):
        a, b = random_compact(p, 1, 0, rng), random_compact(p, 1, 0, rng)
        lam = rng.randrange(1, p * p)
        assert hecke_T(a + b.scale(lam)).equals(hecke_T(a) + hecke_T(b).scale(lam))


@pytest.mark.parametrize("p", PRIMES)
def test_ball_truncation_is_exact_one_step_in(p):
    rng = random.Random(8)
    r, j, R = p - 2, 0, 2
    X = random_compact(p, r, j, rng, terms=5)
    full = hecke_T_by_definition(X)
    Xb = restrict(X, R).copy(kind="ball")
    Tb = hecke_T(Xb)
    assert Tb.radius == R - 1
    assert restrict(Tb, R - 1).equals(restrict(full, R - 1))
    with pytest.raises(ValueError):
        hecke_T(ball_elem(p, r, j, 0))


def test_coset_reps_count():
    for p in PRIMES:
        reps = hecke_coset_reps(p)
        assert len(reps) == p + 1
        assert all(in_hecke_double_coset(g.inv(), p) for g in reps)


@pytest.mark.parametrize("p", PRIMES)
def test_pairing_invariant_under_translation(p):
    rng = random.Random(4)
    verts = [central_vertex(p)] + neighbors(central_vertex(p))
    for _ in range(10):
        r, j = rng.randrange(p), rng.randrange(p - 1)

        def rand_vals():
            return {v: np.array([[rng.randrange(p), rng.randrange(p)] for _ in range(r + 1)])
                    for v in verts}

        f1 = IndElem(p, r, j, rand_vals(), dual=True)
        f2 = IndElem(p, r, j, rand_vals())
        g = random_G(p, rng)
        assert pairing(f1, f2) == pairing(translate(g, f1), translate(g, f2))
    with pytest.raises(ValueError):
        pairing(f2, f2)


@pytest.mark.parametrize("p", PRIMES)
def test_bracket_transforms_by_K(p):
    # [g k, v] = [g, sigma(k) v]
    rng = random.Random(7)
    for _ in range(10):
        g, k = random_G(p, rng), random_K(p, rng)
        v = SymVec(p, 2, 1, tuple(rng.randrange(p * p) for _ in range(3)))
        assert bracket_elem(g @ k, v).equals(bracket_elem(g, sym_act(k, v)))


def test_json_roundtrip():
    p = 3
    rng = random.Random(0)
    X = random_compact(p, 1, 1, rng, terms=4)
    Y = IndElem.from_json(X.to_json())
    assert Y.equals(X) and Y.to_json() == X.to_json()
    assert '"ind-elem/1"' in X.to_json()


def test_translation_by_w_moves_support():
    p = 3
    X = bracket_elem(GMatrix.identity(), SymVec.monomial(p, 1, 0, 0))
    Y = translate(w_matrix(p), X)
    (s,) = Y.support()
    assert distance(central_vertex(p), s) == 1
