"""The Bruhat-Tits tree of PGL_2(Q_p) and the dual graph of the special fibre.

Vertices are right cosets K Q_p^x g with K = GL_2(Z_p).  The group acts on the
right.  Matrices have exact rational entries, which is all the computations
here need; a rational number is read in Q_p through its valuation and its
residues modulo powers of p.
"""

from __future__ import annotations

import csv
import io
import json
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .arith import Fq2Elem, fq2, vp, xi_values


class PrecisionError(ArithmeticError):
    pass


@dataclass(frozen=True)
class GMatrix:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    @classmethod
    def of(cls, a, b, c, d):
        return cls(Fraction(a), Fraction(b), Fraction(c), Fraction(d))

    @classmethod
    def identity(cls):
        return cls.of(1, 0, 0, 1)

    def __matmul__(self, o: GMatrix) -> GMatrix:
        return GMatrix(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                       self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def scale(self, s) -> GMatrix:
        s = Fraction(s)
        return GMatrix(self.a * s, self.b * s, self.c * s, self.d * s)

    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def inv(self) -> GMatrix:
        dt = self.det()
        if dt == 0:
            raise PrecisionError("singular matrix")
        return GMatrix(self.d / dt, -self.b / dt, -self.c / dt, self.a / dt)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def min_val(self, p) -> int:
        return min(vp(x, p) for x in self.entries())

    def det_val(self, p) -> int:
        dt = self.det()
        if dt == 0:
            raise PrecisionError("singular matrix")
        return vp(dt, p)

    def is_integral(self, p) -> bool:
        return self.min_val(p) >= 0

    def in_K(self, p) -> bool:
        return self.is_integral(p) and self.det_val(p) == 0

    def mod_p(self, p) -> tuple[int, int, int, int]:
        if not self.is_integral(p):
            raise ValueError("matrix is not p-integral")
        return tuple(residue(x, p) for x in self.entries())

    def to_json(self):
        return [[str(self.a), str(self.b)], [str(self.c), str(self.d)]]


def residue(x: Fraction, p: int, k: int = 1) -> int:
    """x mod p^k for a p-integral rational x."""
    x = Fraction(x)
    m = p ** k
    if x.denominator % p == 0:
        raise ValueError("not p-integral")
    return x.numerator * pow(x.denominator, -1, m) % m


def mod_Zp(x: Fraction, p: int) -> Fraction:
    """Representative of x in Q_p/Z_p of the form U/p^k with 0 <= U < p^k."""
    x = Fraction(x)
    den, k = x.denominator, 0
    while den % p == 0:
        den //= p
        k += 1
    if k == 0:
        return Fraction(0)
    m = p ** k
    U = x.numerator * pow(den, -1, m) % m
    return Fraction(U, m)


def w_matrix(p):
    return GMatrix.of(0, -1, p, 0)


def upper_unipotent(p, t=None):
    """[[1, t], [0, 1]] with default t = 1/p."""
    return GMatrix.of(1, Fraction(1, p) if t is None else t, 0, 1)


@dataclass(frozen=True, order=True)
class Vertex:
    """Class of [[p^n, u], [0, 1]] with u in Q_p/Z_p."""
    p: int
    n: int
    u: Fraction

    def matrix(self) -> GMatrix:
        return GMatrix.of(Fraction(self.p) ** self.n, self.u, 0, 1)

    @property
    def parity(self) -> int:
        return self.n % 2

    @property
    def id(self) -> str:
        return f"{self.n}|{self.u.numerator}/{self.u.denominator}"

    @classmethod
    def from_id(cls, p, s):
        n, u = s.split("|")
        return cls(p, int(n), Fraction(u))

    def key(self):
        return (self.n, self.u)


def central_vertex(p) -> Vertex:
    return Vertex(p, 0, Fraction(0))


def canonical_form(g: GMatrix, p: int) -> Vertex:
    a, b, c, d = g.entries()
    if g.det() == 0:
        raise PrecisionError("determinant vanishes")
    if a != 0 and (c == 0 or vp(a, p) <= vp(c, p)):
        alpha, beta, delta = a, b, d - c * b / a
    else:
        alpha, beta, delta = c, d, b - a * d / c
    n = vp(alpha, p) - vp(delta, p)
    u = mod_Zp(beta * Fraction(p) ** n / alpha, p)
    return Vertex(p, n, u)


def coset_decomposition(g: GMatrix, v: Vertex) -> tuple[GMatrix, int]:
    """Return (k, a) with g = k * p^a * v.matrix(), k in K; g must lie in the coset v."""
    p = v.p
    m = g @ v.matrix().inv()
    dv = m.det_val(p)
    if dv % 2:
        raise ValueError("g does not lie in the coset")
    a = dv // 2
    k = m.scale(Fraction(p) ** (-a))
    if not k.in_K(p):
        raise ValueError("g does not lie in the coset")
    return k, a


_NEIGHBOR_STEPS: dict[int, list[GMatrix]] = {}


def neighbor_steps(p) -> list[GMatrix]:
    if p not in _NEIGHBOR_STEPS:
        _NEIGHBOR_STEPS[p] = [GMatrix.of(p, 0, 0, 1)] + [GMatrix.of(1, k, 0, p) for k in range(p)]
    return _NEIGHBOR_STEPS[p]


def act(v: Vertex, g: GMatrix) -> Vertex:
    return canonical_form(v.matrix() @ g, v.p)


def neighbors(v: Vertex) -> list[Vertex]:
    G = v.matrix()
    return sorted(canonical_form(t @ G, v.p) for t in neighbor_steps(v.p))


def distance(v: Vertex, w: Vertex) -> int:
    m = v.matrix() @ w.matrix().inv()
    return m.det_val(v.p) - 2 * m.min_val(v.p)


def ball(center: Vertex, R: int) -> list[Vertex]:
    """Vertices within distance R, in breadth-first order with sorted neighbours."""
    seen = {center: 0}
    order = [center]
    queue = deque([center])
    while queue:
        v = queue.popleft()
        if seen[v] == R:
            continue
        for w in neighbors(v):
            if w not in seen:
                seen[w] = seen[v] + 1
                order.append(w)
                queue.append(w)
    return order


def ball_size_formula(p, R) -> int:
    return 1 + (p + 1) * (p ** R - 1) // (p - 1)


# ---------------------------------------------------------------------------
# named vertices


def s0_prime(p) -> Vertex:
    return central_vertex(p)


def s0(p) -> Vertex:
    return canonical_form(w_matrix(p), p)


def s0_second(p) -> Vertex:
    """Coset of [[1, 1/p], [0, 1]]^{-1}, a neighbour of s0 other than s0_prime."""
    return canonical_form(upper_unipotent(p).inv(), p)


# ---------------------------------------------------------------------------
# edge charts


@dataclass(frozen=True)
class EdgeChart:
    """Chart Z_p[zeta, eta]/(zeta*eta - p) on the edge [even, odd]; eta lives at the even end."""
    even: Vertex
    odd: Vertex

    @classmethod
    def of(cls, s: Vertex, t: Vertex) -> EdgeChart:
        if distance(s, t) != 1:
            raise ValueError("not an edge")
        return cls(s, t) if s.parity == 0 else cls(t, s)

    def coordinate_at(self, v: Vertex) -> str:
        if v == self.even:
            return "eta"
        if v == self.odd:
            return "zeta"
        raise ValueError("vertex not on edge")

    def relation(self, p) -> str:
        return f"zeta*eta = {p}"


def w_action_on_edge_chart(v1):
    """w acts on the edge coordinates by e -> v1 e', e' -> v1^{-1} e."""
    return {"e": (v1, "e'"), "e'": (v1.inverse(), "e")}


@dataclass(frozen=True)
class ChartSubstitution:
    """eta -> (a eta + c)/(b eta + d), e~ -> e~/(b eta + d), entries mod p."""
    p: int
    a: int
    b: int
    c: int
    d: int

    def apply(self, eta, et):
        """Apply to a point (eta, e~) with coordinates in F_{p^2} codes."""
        F = fq2(self.p)
        den = F.add(F.mul(self.b, eta), self.d)
        if den == 0:
            raise ZeroDivisionError("point maps to infinity")
        num = F.add(F.mul(self.a, eta), self.c)
        inv = F.inv(den)
        return F.mul(num, inv), F.mul(et, inv)

    def then(self, other: ChartSubstitution) -> ChartSubstitution:
        """Substitution obtained by applying self first and other second.

        Applying the substitution of h and then that of g gives the substitution
        of h @ g, i.e. points are acted on from the right.
        """
        p = self.p
        a = (self.a * other.a + self.b * other.c) % p
        b = (self.a * other.b + self.b * other.d) % p
        c = (self.c * other.a + self.d * other.c) % p
        d = (self.c * other.b + self.d * other.d) % p
        return ChartSubstitution(p, a, b, c, d)


def act_central_chart(g: GMatrix, p: int) -> ChartSubstitution:
    if not g.in_K(p):
        raise ValueError("g must lie in GL_2(Z_p)")
    a, b, c, d = g.mod_p(p)
    return ChartSubstitution(p, a, b, c, d)


def act_component(xi: Fq2Elem, g: GMatrix) -> Fq2Elem:
    """xi -> xi * chi_1(det g), chi_1(det g) read through its residue."""
    p = xi.p
    if not g.in_K(p):
        raise ValueError("g must lie in GL_2(Z_p)")
    return xi * residue(g.det(), p)


def _fp_poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def _fp_poly_pow(a: list[int], n: int, p: int) -> list[int]:
    out = [1]
    for _ in range(n):
        out = _fp_poly_mul(out, a, p)
    return out


def component_by_substitution(xi: Fq2Elem, g: GMatrix) -> Fq2Elem:
    """Pull the component equation e~^{p+1} + k xi (eta^p - eta) back along g.

    After clearing (b eta + d)^{p+1}, the pulled back equation is
    e~^{p+1} + k xi Q(eta) with Q = (a eta + c)^p (b eta + d) - (a eta + c)(b eta + d)^p;
    Q is a constant multiple of eta^p - eta, and that constant rescales xi.
    """
    p = xi.p
    sub = act_central_chart(g, p)
    num, den = [sub.c, sub.a], [sub.d, sub.b]
    left = _fp_poly_mul(_fp_poly_pow(num, p, p), den, p)
    right = _fp_poly_mul(num, _fp_poly_pow(den, p, p), p)
    Q = [(x - y) % p for x, y in zip(left, right)]
    lam = Q[p]
    base = [0] * (p + 2)
    base[1], base[p] = p - 1, 1
    if any((q - lam * t) % p for q, t in zip(Q, base)):
        raise AssertionError("pulled back equation is not proportional to eta^p - eta")
    return xi * lam


# ---------------------------------------------------------------------------
# special fibre dual graph


@dataclass
class SpecialFibreGraph:
    p: int
    R: int
    xis: list
    curve_vertices: list
    nodes: dict
    adjacency: dict

    @property
    def components(self):
        return len(self.xis)

    def degree(self, node) -> int:
        return len(self.adjacency[node])

    def to_json(self) -> str:
        nodes = []
        for key in sorted(self.nodes):
            nodes.append({"id": key, **self.nodes[key]})
        edges = sorted({tuple(sorted((u, w))) for u in self.adjacency for w in self.adjacency[u]})
        doc = {"schema": "special-fibre-graph/1", "p": self.p, "radius": self.R,
               "nodes": nodes, "edges": [list(e) for e in edges]}
        return json.dumps(doc, indent=1, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["source", "target"])
        for e in sorted({tuple(sorted((u, w))) for u in self.adjacency for w in self.adjacency[u]}):
            wr.writerow(e)
        return buf.getvalue()

    def component_of(self, node) -> int:
        return self.nodes[node]["xi"]


def _xi_label(xi: Fq2Elem) -> str:
    c0, c1 = fq2(xi.p).coords(xi.code)
    return f"{c0}+{c1}s"


def build_special_fibre(p: int, R: int) -> SpecialFibreGraph:
    """Dual graph over ball(s'_0, R): one copy per xi, every edge subdivided p-2 times."""
    if R < 1:
        raise ValueError("R must be at least 1")
    verts = ball(central_vertex(p), R)
    vset = set(verts)
    xis = xi_values(p)
    nodes, adj = {}, {}

    def add(key, data):
        nodes[key] = data
        adj.setdefault(key, set())

    def link(u, w):
        adj[u].add(w)
        adj[w].add(u)

    edges = []
    for v in verts:
        for w in neighbors(v):
            if w in vset and v.key() < w.key():
                edges.append(EdgeChart.of(v, w))
    for xi in xis:
        xl = _xi_label(xi)
        for v in verts:
            add(f"C[{v.id}][{xl}]", {"kind": "curve", "vertex": v.id, "xi": xl,
                                     "parity": v.parity})
        for e in edges:
            prev = f"C[{e.even.id}][{xl}]"
            for t in range(1, p - 1):
                key = f"P[{e.even.id}~{e.odd.id}][{t}][{xl}]"
                add(key, {"kind": "rational", "edge": [e.even.id, e.odd.id], "step": t, "xi": xl})
                link(prev, key)
                prev = key
            link(prev, f"C[{e.odd.id}][{xl}]")
    return SpecialFibreGraph(p, R, [_xi_label(x) for x in xis], verts, nodes,
                             {k: sorted(v) for k, v in adj.items()})


def connected_components(graph: SpecialFibreGraph) -> list[set]:
    seen, comps = set(), []
    for start in sorted(graph.adjacency):
        if start in seen:
            continue
        comp, stack = set(), [start]
        while stack:
            u = stack.pop()
            if u in comp:
                continue
            comp.add(u)
            stack.extend(graph.adjacency[u])
        seen |= comp
        comps.append(comp)
    return comps


# ---------------------------------------------------------------------------
# random group elements for fuzzing


def random_K(p: int, rng: random.Random, height: int = 3) -> GMatrix:
    m = p ** height
    while True:
        a, b, c, d = (rng.randrange(m) for _ in range(4))
        if (a * d - b * c) % p:
            return GMatrix.of(a, b, c, d)


def random_G(p: int, rng: random.Random, height: int = 3) -> GMatrix:
    """A random element of GL_2(Q) with small p-adic spread."""
    k1, k2 = random_K(p, rng, height), random_K(p, rng, height)
    e1, e2 = rng.randint(-2, 2), rng.randint(-2, 2)
    dg = GMatrix.of(Fraction(p) ** e1, 0, 0, Fraction(p) ** e2)
    return k1 @ dg @ k2
