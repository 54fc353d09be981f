import json
import random

import numpy as np
import pytest

from artifact.arith import CharSpec, fq2, valid_characters
from artifact.curve import calibrate_w1
from artifact.linalg import dense_rank_fq2
from artifact.rep import (IndElem, SymVec, bracket_elem, random_compact, restrict, translate)
from artifact.theta import (CSV_FIELDS, HeckePoly, _apply_by_definition, apply_theta,
                            block_positions, c_chi_b, dense_matrix_by_definition, kernel_elements,
                            kernel_truncated, residue_code, rows_to_csv, rows_to_json,
                            surjectivity_truncated, tau_w1, theta_ops, theta_sweep)
from artifact.tree import GMatrix, random_K, w_matrix


def test_tau_defaults_to_calibrated_root():
    for p in (3, 5):
        assert tau_w1(p) == calibrate_w1(p).w1.residue().code
        t = tau_w1(p)
        F = fq2(p)
        assert F.pow(t, p + 1) == F.neg(1)


def test_residue_code_inputs():
    w = calibrate_w1(3).w1
    assert residue_code(w, 3) == w.residue().code
    assert residue_code(10, 3) == 1
    assert residue_code(w.residue(), 3) == w.residue().code


@pytest.mark.parametrize("p", [3, 5])
def test_c_chi_b_is_linear_in_b_with_sign(p):
    F = fq2(p)
    t = tau_w1(p)
    for ch in valid_characters(p):
        sign = 1 if (ch.j + 1) % 2 == 0 else F.neg(1)
        unit = c_chi_b(ch, 1)
        assert unit == F.mul(sign, F.pow(t, -ch.i))
        assert c_chi_b(ch, 0) == 0
        for b in range(F.q):
            assert c_chi_b(ch, b) == F.mul(unit, b)


@pytest.mark.parametrize("p", [3, 5])
def test_theta_ops_shapes(p):
    F = fq2(p)
    t = tau_w1(p)
    for ch in valid_characters(p):
        i, j = ch.i, ch.j
        for b in range(p):
            ops = theta_ops(ch, b)
            if i in (1, p):
                (op,) = ops
                assert (op.r, op.j) == (p - 2, (j + 1) % (p - 1))
                assert op.label == "theta"
                if i == p:
                    assert op.c0 == op.c2 == F.neg(b)
                    assert op.degree == (2 if b else 1)
                else:
                    assert op.c0 == op.c2 == 1 and op.degree == 2
            else:
                first, second = ops
                assert (first.r, first.j) == (i - 2, (j + 1) % (p - 1))
                assert (second.r, second.j) == (p - 1 - i, (i + j) % (p - 1))
                assert first.coefficients[0] == F.neg(b)
                sign = 1 if (j + 1) % 2 == 0 else F.neg(1)
                assert first.coefficients[1] == F.mul(sign, F.pow(t, i))
                assert second.coefficients == (1, F.neg(c_chi_b(ch, b)), 0)
                assert second.degree == (1 if b else 0)


def test_theta_ops_rejects_bad_i():
    with pytest.raises(ValueError):
        HeckePoly(3, 0, 9, 0, 0, 0)
    with pytest.raises(ValueError):
        HeckePoly(3, 0, 1, 0, 3, 0)


@pytest.mark.parametrize("p", [3, 5])
def test_apply_theta_matches_coset_definition(p):
    rng = random.Random(p)
    for ch in valid_characters(p)[::3]:
        for op in theta_ops(ch, rng.randrange(p)):
            X = random_compact(p, op.r, op.j, rng, terms=3)
            Y = apply_theta(op, X)
            Z = _apply_by_definition(op, X, 4)
            assert restrict(Y, 4).equals(Z)


def test_identity_operator_and_linearity():
    p = 5
    rng = random.Random(1)
    ident = HeckePoly(p, 1, 0, 0, 2, 1)
    X = random_compact(p, 2, 1, rng)
    assert apply_theta(ident, X).equals(X)
    op = HeckePoly(p, 3, 7, 11, 2, 1)
    A, B = random_compact(p, 2, 1, rng), random_compact(p, 2, 1, rng)
    assert apply_theta(op, A + B.scale(6)).equals(apply_theta(op, A) + apply_theta(op, B).scale(6))


@pytest.mark.parametrize("p, i", [(5, 2), (5, 3), (3, 2)])
def test_second_operator_term_at_w(p, i):
    # (Id - cT)[Id, y^r] has coefficient -c x^r at w, r = p-1-i
    F = fq2(p)
    ch = CharSpec.from_ij(p, i, 0)
    _, second = theta_ops(ch, 1)
    r = second.r
    X = bracket_elem(GMatrix.identity(), SymVec.monomial(p, r, second.j, 0))
    Y = apply_theta(second, X)
    coef = Y.coefficient_at(w_matrix(p))
    want = np.zeros((r + 1, 2), dtype=np.int64)
    want[r] = F.coords(second.c1)
    assert (coef % p == want).all()
    assert (Y.coefficient_at(GMatrix.identity()) % p == X.values[next(iter(X.values))] % p).all()


def test_kernel_of_T_against_dense_rank():
    p = 3
    op = HeckePoly(p, 0, 1, 0, 1, 1, "T")
    rep, ker, lay = kernel_truncated(op, 2)
    dense = dense_matrix_by_definition(op, 2)
    assert rep.rank == dense_rank_fq2(dense, p)
    assert rep.oracle_agrees and rep.consistent
    assert rep.domain_dim == 17 * 2 and rep.codomain_dim == 5 * 2


@pytest.mark.parametrize("b", [0, 1, 2])
def test_kernel_elements_are_annihilated_and_K_stable(b):
    p, R = 3, 2
    rng = random.Random(b)
    ch = CharSpec.from_ij(p, 2, 0)
    op = theta_ops(ch, b)[0]
    elems = kernel_elements(op, R)
    assert elems
    for X in elems[:4]:
        assert not apply_theta(op, X).support()
        k = random_K(p, rng)
        Y = translate(k, X)
        assert Y.kind == "ball"
        assert not apply_theta(op, Y).support()


def test_surjectivity_report():
    p = 3
    ch = CharSpec.from_ij(p, 1, 0)
    (op,) = theta_ops(ch, 1)
    ok, info = surjectivity_truncated(op, 3)
    assert ok and info["oracle_agrees"] and info["rank"] == info["codomain_dim"]


def test_radius_and_twist_checks():
    p = 3
    op = HeckePoly(p, 1, 0, 1, 1, 0)
    with pytest.raises(ValueError):
        kernel_truncated(op, 2)
    X = IndElem(p, 1, 1, {})
    with pytest.raises(ValueError):
        apply_theta(op, X)


def test_block_positions():
    p = 3
    assert block_positions(CharSpec.from_ij(p, 1, 0)) == ("whole",)
    assert block_positions(CharSpec.from_ij(p, 3, 1)) == ("whole",)
    # m = 2: 8 - 2 = 6 >= [-6] = 2
    assert block_positions(CharSpec.from_ij(p, 2, 0)) == ("sub", "quotient")
    # m = 6: 8 - 6 = 2 < [-18] = 6
    assert block_positions(CharSpec.from_ij(p, 2, 1)) == ("quotient", "sub")


def test_sweep_exports():
    p = 3
    chars = [CharSpec.from_ij(p, 2, 0), CharSpec.from_ij(p, 1, 1)]
    rows = theta_sweep(p, [1], 3, chars=chars)
    assert len(rows) == 3
    text = rows_to_csv(rows)
    assert text.splitlines()[0].split(",") == CSV_FIELDS
    docs = rows_to_json(rows)
    assert all(d["anchor"] and d["oracle_agrees"] for d in docs)
    json.dumps(docs)
