"""End to end acceptance checks, one test function (possibly parametrized) per criterion."""
import json
import random
import time
from pathlib import Path

import pytest

from artifact import curve
from artifact.arith import fq2, valid_characters, witt, xi_values
from artifact.curve import (_block_cx, basis_labels, block_scalar, calibrate_w1, default_spec,
                            expected_cx, frobenius_matrix, gauss_sum_report, h0_basis, h1O_basis,
                            lefschetz_count, h1O_frobenius_table, point_count)
from artifact.phimod import (build_dcrys, fil1_generator, fil1_member, in_line,
                             is_weakly_admissible, random_dvec, random_fe, random_param)
from artifact.rep import double_T_term, equivariance_trials, single_T_terms
from artifact.theta import theta_sweep
from artifact.tree import (Vertex, act_component, ball_size_formula, build_special_fibre,
                           central_vertex, component_by_substitution, connected_components,
                           distance, random_K)

SNAPSHOT = Path(__file__).parent / "snapshots" / "theta_p3_R3.json"


@pytest.mark.parametrize("p", [3, 5])
def test_criterion_01_frobenius_formula(p):
    curve._FROB_CACHE.clear()
    t0 = time.perf_counter()
    rows = h1O_frobenius_table(default_spec(p))
    elapsed = time.perf_counter() - t0
    assert len(rows) == p * (p - 1) // 2
    bad = [r for r in rows if not r.ok]
    assert not bad, bad
    assert elapsed < 300


@pytest.mark.parametrize("p", [3, 5])
def test_criterion_02_phi_squared_scalar(p):
    F = fq2(p)
    cal = calibrate_w1(p)
    w1 = cal.w1
    assert F.pow(w1.residue().code, p + 1) == F.neg(1)
    assert w1 ** (p + 1) == witt(p, w1.N, -1)
    spec = default_spec(p)
    assert spec.w1 == w1
    data = frobenius_matrix(spec)
    w2 = w1.reduce_precision(2)
    for i in range(1, p + 1):
        ok, lam = block_scalar(data, i)
        assert ok and lam is not None
        assert _block_cx(data, i) == expected_cx(p, i, w2)


@pytest.mark.parametrize("p", [3, 5])
def test_criterion_03_gauss_sum_certificates(p):
    for i in range(1, p + 1):
        rep = gauss_sum_report(p, i)
        assert rep.norm_ok and rep.in_y_subring and rep.in_mu_p_plus_1 and rep.inner_ok, \
            rep.to_json()


def _brute_count(spec):
    F = fq2(spec.p)
    p = spec.p
    c = spec.c.residue().code
    n = 1
    for x in range(F.q):
        rhs = F.mul(c, F.sub(F.pow(x, p), x))
        n += sum(1 for y in range(F.q) if F.pow(y, p + 1) == rhs)
    return n


@pytest.mark.parametrize("p", [3, 5])
def test_criterion_04_lefschetz_cross_check(p):
    spec = default_spec(p)
    brute = _brute_count(spec)
    assert brute == point_count(spec, 1)
    assert brute == lefschetz_count(frobenius_matrix(spec))


@pytest.mark.parametrize("p", [3, 5])
def test_criterion_05_hecke_certification(p):
    terms = single_T_terms(p)
    assert terms and all(c.ok for c in terms), [c.to_json() for c in terms if not c.ok]
    tt = double_T_term(p)
    assert tt.ok, tt.to_json()
    assert equivariance_trials(p, 100, seed=2) == (100, 100)


@pytest.fixture(scope="module")
def sweep():
    t0 = time.perf_counter()
    rows = theta_sweep(3, [0, 1, 2], 3)
    return rows, time.perf_counter() - t0


def test_criterion_06_theta_surjectivity(sweep):
    rows, elapsed = sweep
    ms = {r.m for r in rows}
    assert ms == {m for m in range(1, 8) if m % 4}
    assert {r.b for r in rows} == {0, 1, 2}
    for r in rows:
        rp = r.report
        assert rp.radius == 3
        assert rp.codomain_dim == (rp.r + 1) * ball_size_formula(3, 3 - rp.degree)
        assert rp.surjective and rp.rank == rp.codomain_dim, rp.to_json()
    assert elapsed <= 60


def test_criterion_07_kernel_oracle_equivalence(sweep):
    rows, _ = sweep
    snap = json.loads(SNAPSHOT.read_text())["dims"]
    seen = set()
    for r in rows:
        rp = r.report
        assert rp.oracle_agrees and rp.consistent
        assert (rp.oracle_rank, rp.oracle_kernel_dim) == (rp.rank, rp.kernel_dim)
        key = f"m={r.m},b={r.b},{rp.label}"
        seen.add(key)
        assert snap[key] == {"domain_dim": rp.domain_dim, "codomain_dim": rp.codomain_dim,
                             "rank": rp.rank, "kernel_dim": rp.kernel_dim,
                             "degree": rp.degree}
    assert seen == set(snap)


@pytest.mark.parametrize("p", [3, 5])
def test_criterion_08_weak_admissibility(p):
    rng = random.Random(100 + p)
    for ch in valid_characters(p):
        mod = build_dcrys(ch)
        pars = [random_param(p, 4, rng) for _ in range(50)]
        for par in pars:
            rep = is_weakly_admissible(mod, par)
            assert rep.passed, rep.to_json()
        for n in range(100):
            par = pars[n % 50]
            v = fil1_generator(par, ch)
            f = v.scale(random_fe(p, 4, rng)) if n % 2 else random_dvec(p, 4, rng)
            assert fil1_member(f, par, ch, mod) == in_line(f, v)


@pytest.mark.parametrize("p, R", [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (5, 3)])
def test_criterion_09_graph_model(p, R):
    G = build_special_fibre(p, R)
    nb = ball_size_formula(p, R)
    centre = central_vertex(p)
    assert len(connected_components(G)) == p - 1 == len(xi_values(p))
    curves = [k for k, d in G.nodes.items() if d["kind"] == "curve"]
    rational = [k for k, d in G.nodes.items() if d["kind"] == "rational"]
    assert len(curves) == (p - 1) * nb
    # a tree on nb vertices has nb - 1 edges, each subdivided p - 2 times
    assert len(rational) == (p - 1) * (nb - 1) * (p - 2)
    per_edge = {}
    for k in rational:
        d = G.nodes[k]
        per_edge.setdefault((tuple(d["edge"]), d["xi"]), set()).add(d["step"])
        assert G.degree(k) == 2
    assert all(s == set(range(1, p - 1)) for s in per_edge.values())
    for k in curves:
        v = Vertex.from_id(p, G.nodes[k]["vertex"])
        if distance(centre, v) < R:
            assert G.degree(k) == p + 1
    rng = random.Random(R)
    for _ in range(100):
        g = random_K(p, rng)
        xi = rng.choice(xi_values(p))
        assert act_component(xi, g) == component_by_substitution(xi, g)


@pytest.mark.parametrize("p", [3, 5])
def test_criterion_10_structural_dimensions(p):
    spec = default_spec(p)
    g = p * (p - 1) // 2
    hol = [len(h0_basis(spec, i)) for i in range(1, p + 1)]
    h1 = [len(h1O_basis(spec, i)) for i in range(1, p + 1)]
    assert hol == [i - 1 for i in range(1, p + 1)]
    assert h1 == [p - i for i in range(1, p + 1)]
    assert sum(hol) == sum(h1) == g
    assert len(basis_labels(p)) == 2 * g == frobenius_matrix(spec).matrix.shape[0]
