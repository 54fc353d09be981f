"""Sym^r tensor det^j, induced representations on the tree and the Hecke operator T.

Coefficients live in F_{p^2}.  An induced element f is stored through its values
F(s) = f(G_s) on the canonical representatives G_s of the vertices.  The
symbol [g, v] denotes the function supported on K Q_p^x g^{-1} with value v at
g^{-1}; so h.[g, v] = [hg, v] and [gk, v] = [g, sigma(k) v].
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import fq2
from .linalg import fp_matvec, fq_mul, fq_scalar
from .tree import (GMatrix, Vertex, canonical_form, central_vertex, coset_decomposition, distance,
                   vp)


# ---------------------------------------------------------------------------
# Sym^r (x) det^j


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for k, y in enumerate(b):
                out[i + k] = (out[i + k] + x * y) % p
    return out


def sym_matrix(g: tuple[int, int, int, int], r: int, j: int, p: int) -> np.ndarray:
    """Matrix over F_p of g on the basis x^k y^{r-k}, k = 0..r (column k = image)."""
    a, b, c, d = (x % p for x in g)
    det = (a * d - b * c) % p
    if det == 0:
        raise ValueError("singular matrix mod p")
    M = np.zeros((r + 1, r + 1), dtype=np.int64)
    if r < 0:
        return M
    # (a x + c y) and (b x + d y) as polynomials in x with y = 1: index = power of x
    lin1 = [c, a]
    lin2 = [d, b]
    for k in range(r + 1):
        poly = [1]
        for _ in range(k):
            poly = _poly_mul(poly, lin1, p)
        for _ in range(r - k):
            poly = _poly_mul(poly, lin2, p)
        for l, coef in enumerate(poly):
            M[l, k] = coef
    return M * pow(det, j % (p - 1), p) % p


def sym_mat(g: GMatrix, r: int, j: int, p: int) -> np.ndarray:
    return sym_matrix(g.mod_p(p), r, j, p)


def dual_sym_mat(g: GMatrix, r: int, j: int, p: int) -> np.ndarray:
    """Contragredient: transpose of the action of g^{-1}."""
    return sym_mat(g.inv(), r, j, p).T.copy()


@dataclass(frozen=True)
class SymVec:
    p: int
    r: int
    j: int
    coeffs: tuple  # F_{p^2} codes, index k for x^k y^{r-k}

    @classmethod
    def monomial(cls, p, r, j, k, code=1):
        c = [0] * (r + 1)
        c[k] = code
        return cls(p, r, j, tuple(c))

    def pairs(self) -> np.ndarray:
        F = fq2(self.p)
        return np.array([F.coords(c) for c in self.coeffs], dtype=np.int64).reshape(self.r + 1, 2)

    @classmethod
    def from_pairs(cls, p, r, j, arr):
        return cls(p, r, j, tuple(int(x[0] % p + p * (x[1] % p)) for x in arr))


def sym_act(g: GMatrix | tuple, v: SymVec) -> SymVec:
    gm = g if isinstance(g, tuple) else g.mod_p(v.p)
    M = sym_matrix(gm, v.r, v.j, v.p)
    return SymVec.from_pairs(v.p, v.r, v.j, fp_matvec(M, v.pairs(), v.p))


# ---------------------------------------------------------------------------
# phi_r


def t_matrix(p) -> GMatrix:
    return GMatrix.of(1, 0, 0, Fraction(1, p))


def phi_t(r: int) -> np.ndarray:
    """phi_r(diag(1, 1/p)): keep y^r, kill every x^k y^{r-k} with k > 0."""
    M = np.zeros((r + 1, r + 1), dtype=np.int64)
    if r >= 0:
        M[0, 0] = 1
    return M


def in_hecke_double_coset(g: GMatrix, p: int) -> bool:
    return g.det_val(p) - 2 * g.min_val(p) == 1


def hecke_factorization(g: GMatrix, p: int) -> tuple[GMatrix, GMatrix, int]:
    """Write g = h1 t h2 p^a with h1, h2 in K and t = diag(1, 1/p)."""
    if not in_hecke_double_coset(g, p):
        raise ValueError("g is not in K t K Q_p^x")
    a0 = g.min_val(p)
    M = g.scale(Fraction(p) ** (-a0))     # integral, elementary divisors (1, p)
    ents = list(M.entries())
    k = next(i for i, x in enumerate(ents) if x != 0 and vp(x, p) == 0)
    swap = GMatrix.of(0, 1, 1, 0)
    ident = GMatrix.identity()
    Pr = swap if k in (2, 3) else ident
    Pc = swap if k in (1, 3) else ident
    N = Pr @ M @ Pc                       # unit in the corner
    u, b, c, d = N.entries()
    L = GMatrix.of(1, 0, -c / u, 1)
    Rm = GMatrix.of(1, -b / u, 0, 1)
    D = L @ N @ Rm                        # diag(u, delta), v(delta) = 1
    delta = D.d
    unit = GMatrix.of(u, 0, 0, delta / p)
    # M = Pr^-1 L^-1 unit diag(1,p) Rm^-1 Pc^-1 and diag(1, p) = p * J t J
    P = Pr.inv() @ L.inv() @ unit
    Q = Rm.inv() @ Pc.inv()
    h1 = P @ swap
    h2 = swap @ Q
    # g = p^{a0} M = p^{a0+1} h1 t h2
    assert h1.in_K(p) and h2.in_K(p)
    assert (h1 @ t_matrix(p) @ h2).scale(Fraction(p) ** (a0 + 1)) == g
    return h1, h2, a0 + 1


def phi_r(g: GMatrix, r: int, j: int, p: int) -> np.ndarray:
    """phi_r(g) as an F_p matrix on Sym^r (x) det^j; zero off the double coset."""
    if r < 0:
        return np.zeros((0, 0), dtype=np.int64)
    if not in_hecke_double_coset(g, p):
        return np.zeros((r + 1, r + 1), dtype=np.int64)
    h1, h2, _ = hecke_factorization(g, p)
    return sym_mat(h1, r, j, p) @ phi_t(r) @ sym_mat(h2, r, j, p) % p


# ---------------------------------------------------------------------------
# induced elements


@dataclass
class IndElem:
    """Values F(s) = f(G_s) on vertices; each value an (r+1, 2) array of F_{p^2} pairs.

    kind is "compact" for finite support or "ball" for a truncation of the full
    induction to the ball of the given radius about the central vertex; valid
    records the radius on which stored values are exact.
    """
    p: int
    r: int
    j: int
    values: dict = field(default_factory=dict)
    kind: str = "compact"
    radius: int | None = None
    dual: bool = False

    def copy(self, **kw):
        d = dict(p=self.p, r=self.r, j=self.j, values={k: v.copy() for k, v in self.values.items()},
                 kind=self.kind, radius=self.radius, dual=self.dual)
        d.update(kw)
        return IndElem(**d)

    def zero_like(self, **kw):
        e = self.copy(**kw)
        e.values = {}
        return e

    def rep_matrix(self, k: GMatrix) -> np.ndarray:
        return (dual_sym_mat if self.dual else sym_mat)(k, self.r, self.j, self.p)

    def accumulate(self, s: Vertex, vec: np.ndarray):
        if s in self.values:
            self.values[s] = (self.values[s] + vec) % self.p
        else:
            self.values[s] = vec % self.p

    def add_term(self, g: GMatrix, vec: np.ndarray):
        """Add [g, vec]."""
        ginv = g.inv()
        s = canonical_form(ginv, self.p)
        k, _ = coset_decomposition(ginv, s)
        # value at G_s is sigma(k^-1) vec
        self.accumulate(s, fp_matvec(self.rep_matrix(k.inv()), vec, self.p))

    def coefficient_at(self, g: GMatrix) -> np.ndarray:
        """The vector u with f = [g, u] + (terms at other vertices)."""
        ginv = g.inv()
        s = canonical_form(ginv, self.p)
        k, _ = coset_decomposition(ginv, s)
        val = self.values.get(s)
        if val is None:
            return np.zeros((self.r + 1, 2), dtype=np.int64)
        return fp_matvec(self.rep_matrix(k), val, self.p)

    def support(self):
        return {s for s, v in self.values.items() if np.any(v % self.p)}

    def pruned(self):
        e = self.copy()
        e.values = {s: v for s, v in e.values.items() if np.any(v % self.p)}
        return e

    def __add__(self, o):
        e = self.copy()
        for s, v in o.values.items():
            e.accumulate(s, v)
        if o.radius is not None:
            e.radius = o.radius if e.radius is None else min(e.radius, o.radius)
        return e

    def scale(self, code: int):
        z = fq_scalar(code, self.p)
        e = self.copy()
        e.values = {s: fq_mul(v, np.broadcast_to(z, v.shape), self.p) for s, v in e.values.items()}
        return e

    def equals(self, o) -> bool:
        a, b = self.pruned().values, o.pruned().values
        if set(a) != set(b):
            return False
        return all(np.array_equal(a[s] % self.p, b[s] % self.p) for s in a)

    def to_json(self) -> str:
        items = sorted(self.values.items(), key=lambda kv: (distance(central_vertex(self.p), kv[0]),
                                                           kv[0].key()))
        doc = {"schema": "ind-elem/1", "p": self.p, "r": self.r, "j": self.j, "kind": self.kind,
               "radius": self.radius, "dual": self.dual,
               "terms": [{"vertex": s.id, "coefficients": v.tolist()} for s, v in items
                         if np.any(v % self.p)]}
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> IndElem:
        d = json.loads(text)
        e = cls(d["p"], d["r"], d["j"], kind=d["kind"], radius=d["radius"], dual=d["dual"])
        for t in d["terms"]:
            e.values[Vertex.from_id(d["p"], t["vertex"])] = np.array(t["coefficients"], dtype=np.int64)
        return e


def bracket_elem(g: GMatrix, v: SymVec, dual=False) -> IndElem:
    e = IndElem(v.p, v.r, v.j, dual=dual)
    e.add_term(g, v.pairs())
    return e


def translate(h: GMatrix, f: IndElem) -> IndElem:
    """h . f, the left action h.[g, v] = [hg, v]."""
    out = f.zero_like()
    for s, val in f.values.items():
        out.add_term(h @ s.matrix().inv(), val)
    return out


# ---------------------------------------------------------------------------
# Hecke operator


def hecke_coset_reps(p) -> list[GMatrix]:
    """Representatives g' of the p+1 cosets g'K with phi_r(g'^{-1}) != 0."""
    return [GMatrix.of(p, k, 0, 1) for k in range(p)] + [GMatrix.of(1, 0, 0, p)]


@lru_cache(maxsize=None)
def _hecke_stencil(p: int, r: int, j: int, s: Vertex, dual: bool):
    """Contributions of the value at s: list of (target vertex, F_p matrix)."""
    out = []
    G = s.matrix()
    for gp in hecke_coset_reps(p):
        phi = phi_r(gp.inv(), r, j, p)
        if dual:
            raise NotImplementedError("T on the dual side is not needed")
        target = gp.inv() @ G
        t = canonical_form(target, p)
        k, _ = coset_decomposition(target, t)
        M = sym_mat(k.inv(), r, j, p) @ phi % p
        out.append((t, M))
    return tuple(out)


def hecke_T(X: IndElem) -> IndElem:
    if X.kind == "ball":
        if X.radius is None or X.radius < 1:
            raise ValueError("truncated input must have radius at least 1")
    out = X.zero_like()
    centre = central_vertex(X.p)
    new_radius = None if X.kind != "ball" else X.radius - 1
    for s, val in X.values.items():
        if not np.any(val):
            continue
        for t, M in _hecke_stencil(X.p, X.r, X.j, s, X.dual):
            if new_radius is not None and distance(centre, t) > new_radius:
                continue
            out.accumulate(t, fp_matvec(M, val, X.p))
    out.radius = new_radius
    return out


def hecke_T_by_definition(X: IndElem) -> IndElem:
    """T([g, v]) = sum over g' of [g g', phi_r(g'^{-1}) v], term by term."""
    out = X.zero_like()
    for s, val in X.values.items():
        g = s.matrix().inv()
        for gp in hecke_coset_reps(X.p):
            w = fp_matvec(phi_r(gp.inv(), X.r, X.j, X.p), val, X.p)
            out.add_term(g @ gp, w)
    return out


# ---------------------------------------------------------------------------
# pairing


def pairing(f1: IndElem, f2: IndElem) -> int:
    """sum over vertices of <f1(G_s), f2(G_s)>, as an F_{p^2} code."""
    if (f1.p, f1.r, f1.j) != (f2.p, f2.r, f2.j):
        raise ValueError("mismatched (r, j) parameters")
    if not f1.dual or f2.dual:
        raise ValueError("first argument must be on the dual side")
    if f1.kind != "compact":
        raise ValueError("first argument must be finitely supported")
    p = f1.p
    acc = np.zeros(2, dtype=np.int64)
    for s, a in f1.values.items():
        b = f2.values.get(s)
        if b is not None:
            acc = (acc + fq_mul(a, b, p).sum(axis=0)) % p
    return int(acc[0] + p * acc[1])


# ---------------------------------------------------------------------------
# helpers


def monomial_pairs(p, r, k, code=1) -> np.ndarray:
    v = np.zeros((r + 1, 2), dtype=np.int64)
    v[k] = fq2(p).coords(code)
    return v


def ball_elem(p, r, j, R, values: dict | None = None) -> IndElem:
    return IndElem(p, r, j, values=dict(values or {}), kind="ball", radius=R)


def restrict(X: IndElem, R: int) -> IndElem:
    c = central_vertex(X.p)
    e = X.copy()
    e.values = {s: v for s, v in X.values.items() if distance(c, s) <= R}
    e.radius = R if X.radius is None else min(R, X.radius)
    return e


# ---------------------------------------------------------------------------
# certification of T against its explicit terms


@dataclass
class TermCheck:
    p: int
    label: str
    at: str
    expected: list
    observed: list

    @property
    def ok(self) -> bool:
        return self.expected == self.observed

    def to_json(self) -> dict:
        return {"p": self.p, "label": self.label, "at": self.at, "expected": self.expected,
                "observed": self.observed, "ok": self.ok}


def _codes(v: np.ndarray, p: int) -> list[int]:
    return [int(c) for c in (v[:, 0] % p + p * (v[:, 1] % p))]


def single_T_terms(p: int, j: int = 0) -> list[TermCheck]:
    """Coefficient at w of T([Id, x^k y^{r-k}]) for r = p-1-i, i = 1..p-1.

    Expected: x^r when k = 0 and 0 otherwise.
    """
    from .tree import w_matrix
    out = []
    for i in range(1, p):
        r = p - 1 - i
        for k in range(r + 1):
            X = bracket_elem(GMatrix.identity(), SymVec.monomial(p, r, j, k))
            got = _codes(hecke_T(X).coefficient_at(w_matrix(p)), p)
            want = [0] * (r + 1)
            if k == 0:
                want[r] = 1
            out.append(TermCheck(p, f"T[Id, x^{k} y^{r - k}] (i={i})", "w", want, got))
    return out


def double_T_term(p: int, j: int = 0) -> TermCheck:
    """Coefficient of T^2([Id, y^{p-2}]) at [[1, 1/p], [0, 1]]; expected -x^{p-2}."""
    from .tree import upper_unipotent
    r = p - 2
    X = bracket_elem(GMatrix.identity(), SymVec.monomial(p, r, j, 0))
    got = _codes(hecke_T(hecke_T(X)).coefficient_at(upper_unipotent(p)), p)
    want = [0] * (r + 1)
    want[r] = fq2(p).neg(1)
    return TermCheck(p, f"T^2[Id, y^{r}]", "[[1,1/p],[0,1]]", want, got)


def random_compact(p: int, r: int, j: int, rng, terms: int = 3) -> IndElem:
    from .tree import random_G
    F = fq2(p)
    X = IndElem(p, r, j)
    for _ in range(terms):
        v = np.array([F.coords(rng.randrange(F.q)) for _ in range(r + 1)], dtype=np.int64)
        X.add_term(random_G(p, rng), v)
    return X


def equivariance_trials(p: int, trials: int, seed: int = 0) -> tuple[int, int]:
    """(passed, total) for T(h.X) = h.T(X) and agreement with the coset-sum definition."""
    import random
    from .tree import random_G
    rng = random.Random(seed)
    passed = 0
    for _ in range(trials):
        r, j = rng.randrange(p), rng.randrange(p - 1)
        X = random_compact(p, r, j, rng, terms=rng.randint(1, 3))
        h = random_G(p, rng)
        TX = hecke_T(X)
        ok = hecke_T(translate(h, X)).equals(translate(h, TX)) and TX.equals(hecke_T_by_definition(X))
        passed += ok
    return passed, trials
