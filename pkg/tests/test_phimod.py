import json
import random

import pytest

from artifact.arith import EisensteinElem, valid_characters, witt
from artifact.curve import calibrate_w1
from artifact.phimod import (DVec, FE, FilParam, FilParamError, build_dcrys, cx_formula,
                             dual_param, fil1, fil1_generator, fil1_member, fil1_member_fixed,
                             in_line, is_weakly_admissible, normalize_param, random_dvec,
                             random_fe, random_param, random_witt, verify_dual_witness)

PRIMES = [3, 5]


def chars(p):
    return valid_characters(p)


def rational(p, N, rng):
    """A random element of F_0 (x) E, i.e. with both components in W."""
    return FE(EisensteinElem.scalar(random_witt(p, N, rng)),
              EisensteinElem.scalar(random_witt(p, N, rng)))


@pytest.mark.parametrize("p", PRIMES)
def test_cx_has_valuation_one(p):
    w1 = calibrate_w1(p).w1
    for ch in chars(p):
        mod = build_dcrys(ch)
        assert mod.cx.valuation() == 1
        assert mod.cx == cx_formula(ch, w1)
        doc = json.loads(mod.to_json())
        assert doc["schema"] == "phi-module/1" and doc["c_x_valuation"] == 1
        assert doc["galois_weights"] == [ch.m, (p * ch.m) % (p * p - 1)]


@pytest.mark.parametrize("p", PRIMES)
def test_phi_semilinear_and_galois_compatible(p):
    rng = random.Random(p)
    e = p * p - 1
    for ch in chars(p):
        mod = build_dcrys(ch)
        f = random_dvec(p, 4, rng)
        lam = random_fe(p, 4, rng)
        assert (mod.phi(f.scale(lam)) - mod.phi(f).scale(lam.g_phi())).is_zero()
        assert (mod.g_phi(mod.phi(f)) - mod.phi(mod.g_phi(f))).is_zero()
        # on D itself inertia commutes with phi
        f0 = DVec(rational(p, 4, rng), rational(p, 4, rng))
        g = rng.randrange(e)
        assert (mod.phi(mod.galois(g, f0)) - mod.galois(g, mod.phi(f0))).is_zero()
        # g_phi g g_phi^{-1} = g^p on F
        assert (lam.galois(g).g_phi() - lam.g_phi().galois(g * p % e)).is_zero()


@pytest.mark.parametrize("p", PRIMES)
def test_fil1_membership_two_ways(p):
    rng = random.Random(1)
    for ch in chars(p):
        mod = build_dcrys(ch)
        for _ in range(3):
            par = random_param(p, 4, rng)
            v = fil1_generator(par, ch)
            assert fil1(par, ch, mod, samples=5).galois_stable
            for _ in range(3):
                f = v.scale(random_fe(p, 4, rng))
                assert fil1_member(f, par, ch, mod) and in_line(f, v)
                g = random_dvec(p, 4, rng)
                assert fil1_member(g, par, ch, mod) == in_line(g, v)


@pytest.mark.parametrize("p", PRIMES)
def test_fil1_fixed_criterion(p):
    rng = random.Random(2)
    for ch in chars(p)[:4]:
        mod = build_dcrys(ch)
        par = random_param(p, 4, rng)
        for _ in range(4):
            x = random_dvec(p, 4, rng)
            f = x + mod.g_phi(x)
            assert fil1_member_fixed(f, par, ch, mod) == fil1_member(f, par, ch, mod)
        with pytest.raises(ValueError):
            fil1_member_fixed(random_dvec(p, 4, rng), par, ch, mod)


@pytest.mark.parametrize("p", PRIMES)
def test_weak_admissibility(p):
    rng = random.Random(3)
    for ch in chars(p):
        mod = build_dcrys(ch)
        for par in [random_param(p, 4, rng), FilParam(witt(p, 4, 1), witt(p, 4, 0)),
                    FilParam(witt(p, 4, 0), witt(p, 4, 1))]:
            rep = is_weakly_admissible(mod, par)
            assert rep.passed, rep.to_json()
            assert rep.t_N == rep.t_H == 1
            assert rep.to_json()["schema"] == "weak-admissibility/1"
            assert len(rep.candidates) == 4


@pytest.mark.parametrize("p", PRIMES)
def test_dual_parameter(p):
    rng = random.Random(4)
    for ch in chars(p):
        mod = build_dcrys(ch)
        par = random_param(p, 4, rng)
        new, ch2, w = dual_param(par, ch, mod)
        assert ch2 == ch.frobenius_twist()
        assert all(verify_dual_witness(w, 5).values())
        back, ch3, _ = dual_param(new, ch2, w.target)
        assert ch3 == ch and back.proportional(par)


@pytest.mark.parametrize("p", PRIMES)
def test_scaling_parameter_keeps_line(p):
    rng = random.Random(5)
    ch = chars(p)[0]
    par = random_param(p, 4, rng)
    c = random_witt(p, 4, rng, allow_zero=False)
    while not c.is_unit():
        c = random_witt(p, 4, rng, allow_zero=False)
    scaled = FilParam(par.a * c, par.b * c)
    assert in_line(fil1_generator(scaled, ch), fil1_generator(par, ch))


@pytest.mark.parametrize("p", PRIMES)
def test_normalize_param(p):
    rng = random.Random(6)
    for ch in chars(p)[:3]:
        for _ in range(5):
            par = random_param(p, 4, rng)
            norm, ch2, moved = normalize_param(par, ch)
            assert norm.a == witt(p, 4, 1)
            assert norm.b.valuation() >= 0
            assert moved == (par.a.valuation() > par.b.valuation())


def test_zero_parameter_rejected():
    with pytest.raises(FilParamError):
        FilParam(witt(3, 4, 0), witt(3, 4, 0))
