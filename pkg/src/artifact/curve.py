"""De Rham cohomology and crystalline Frobenius of y^{p+1} = c (x^p - x).

The curve is covered by V0 (the affine chart, coordinates x, y) and V_inf
(coordinates u = 1/x, v = y/x, equation v^{p+1} = c (u - u^p)).  Their overlap
has coordinate ring B = A0[1/x] with basis x^e y^b (b <= p); A0 is spanned by
e >= 0 and A_inf by e <= -b.  Differential forms are written g * Omega with
Omega = dx / ((p+1) y^p) = dy / (c (p x^{p-1} - 1)); Omega is a generator on V0
and x^e y^b Omega is regular on V_inf iff e + b <= p - 2.

Classes in H^1_dR are triples (omega0, omega_inf, f) with omega0 - omega_inf = df
on the overlap.  Coboundaries are (dg0, dg_inf, g0 - g_inf).  The Frobenius
lifts are
    F0:    y -> y^p,  x -> X,  X^p - X = (x^p - x)^p,
    F_inf: v -> v^p,  u -> U,  U^p - U = (u^p - u)^p,
which are sigma-semilinear ring maps because c is a Teichmuller lift.  The
discrepancy between F0 and F_inf on the overlap is absorbed by the Taylor
homotopy K(h dy) = sum_n F_inf(d^{n-1}h/dy^{n-1}) (F0(y) - F_inf(y))^n / n!.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

import numpy as np

from .arith import (CycloElem, Fq2Elem, WittElem, cyclo_conj, cyclo_in_y_subring, cyclo_mul,
                    cyclo_ring, fq2, teich_log, teichmuller, v1_default, vp, w1_candidates, witt,
                    xi_values)
from .laurent import BElem, ChartRing, artin_schreier_lift, univariate


class PrecisionExhausted(ArithmeticError):
    pass


class ReductionError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# curve data


@dataclass(frozen=True)
class CurveSpec:
    """The curve y^{p+1} = c (x^p - x) with c = v1 w1^{-1} xi (or v1^{-1} w1 xi when odd)."""
    p: int
    xi: int                     # F_{p^2} code, xi^{p-1} = -1
    w1: WittElem
    v1: WittElem | None = None
    odd: bool = False
    N: int = 4

    def __post_init__(self):
        if self.v1 is None:
            object.__setattr__(self, "v1", v1_default(self.p, self.N))
        F = fq2(self.p)
        if F.pow(self.xi, self.p - 1) != F.neg(1):
            raise ValueError("xi must satisfy xi^{p-1} = -1")
        if self.w1 ** (self.p + 1) != -1 % self.p ** self.N:
            raise ValueError("w1 must satisfy w1^{p+1} = -1")

    @property
    def c(self) -> WittElem:
        xi = teichmuller(self.xi, self.p, self.N)
        if self.odd:
            return self.v1.inverse() * self.w1 * xi
        return self.v1 * self.w1.inverse() * xi

    @property
    def genus(self) -> int:
        return self.p * (self.p - 1) // 2

    def ring(self) -> ChartRing:
        c = self.c
        return ChartRing(self.p, self.N, (c.c0, c.c1))

    def to_json(self):
        return {"p": self.p, "N": self.N, "xi": Fq2Elem(self.p, self.xi).to_json(),
                "w1_log": teich_log(self.w1), "v1_log": teich_log(self.v1), "odd": self.odd,
                "c": self.c.to_json()}


def default_spec(p: int, N: int = 4, xi_index: int = 0, w1_index: int | None = None) -> CurveSpec:
    w1s = w1_candidates(p, N)
    w1 = w1s[0] if w1_index is None else w1s[w1_index]
    return CurveSpec(p, xi_values(p)[xi_index].code, w1, N=N)


@dataclass
class CechClass:
    """(omega0, omega_inf, f): forms given by their coefficient g in g * Omega."""
    g0: BElem
    ginf: BElem
    f: BElem
    label: str = ""

    def __add__(self, o):
        return CechClass(self.g0 + o.g0, self.ginf + o.ginf, self.f + o.f)

    def __sub__(self, o):
        return CechClass(self.g0 - o.g0, self.ginf - o.ginf, self.f - o.f)

    def scale(self, w):
        return CechClass(self.g0.scale(w), self.ginf.scale(w), self.f.scale(w), self.label)

    def is_cocycle(self) -> bool:
        return (self.g0 - self.ginf) == d(self.f)

    def to_json(self):
        def enc(b: BElem):
            return [[e, bb, list(v)] for (e, bb), v in sorted(b.terms().items())]
        return {"label": self.label, "omega0": enc(self.g0), "omega_inf": enc(self.ginf),
                "f": enc(self.f)}


# ---------------------------------------------------------------------------
# differential calculus on the overlap


def _series_inverse_p_minus_one(Z: BElem) -> BElem:
    """(p Z - 1)^{-1} = - sum_k p^k Z^k, truncated at p^N."""
    R = Z.R
    out = BElem.monomial(R, 0, 0, (R.M - 1, 0))
    term = BElem.monomial(R, 0, 0)
    for k in range(1, R.N):
        term = term * Z
        out = out - term.scale(R.p ** k)
    return out


@lru_cache(maxsize=None)
def _inv_px_minus_one(R: ChartRing) -> BElem:
    return _series_inverse_p_minus_one(BElem.monomial(R, R.p - 1, 0))


def d(g: BElem) -> BElem:
    """The coefficient of dg with respect to Omega."""
    R = g.R
    p, M = R.p, R.M
    if g.is_zero():
        return BElem.zero(R)
    L = g.data.shape[2]
    es = np.arange(g.emin, g.emin + L, dtype=np.int64)
    bs = np.arange(p + 1, dtype=np.int64)
    # e (p+1) x^{e-1} y^{b+p}
    raw = np.zeros((2, 2 * p + 1, L), dtype=np.int64)
    raw[:, p:] = g.data * ((p + 1) * es % M)[None, None, :]
    part1 = BElem._normalize(R, raw, g.emin - 1)
    # b c x^e y^{b-1} (p x^{p-1} - 1)
    raw2 = np.zeros((2, p + 1, L), dtype=np.int64)
    raw2[:, :p] = g.data[:, 1:] * bs[None, 1:, None]
    h = BElem(R, raw2, g.emin).scale(R.c)
    part2 = h.shift(p - 1).scale(p) - h
    return part1 + part2


def d_dy(g: BElem) -> BElem:
    """The derivation d/dy of B, where dx/dy = (p+1) y^p / (c (p x^{p-1} - 1))."""
    R = g.R
    p, M = R.p, R.M
    if g.is_zero():
        return BElem.zero(R)
    L = g.data.shape[2]
    es = np.arange(g.emin, g.emin + L, dtype=np.int64)
    dx_part = BElem(R, g.data * (es % M)[None, None, :], g.emin - 1)._trim()
    dxdy = BElem.monomial(R, 0, p, ((p + 1) % M, 0)).scale(R.cinv) * _inv_px_minus_one(R)
    raw2 = np.zeros((2, p + 1, L), dtype=np.int64)
    raw2[:, :p] = g.data[:, 1:] * np.arange(1, p + 1)[None, :, None]
    return dx_part * dxdy + BElem(R, raw2, g.emin)._trim()


# ---------------------------------------------------------------------------
# Frobenius lifts


@lru_cache(maxsize=None)
def _lift_defect(R: ChartRing) -> BElem:
    """P with X = x^p (1 + P)."""
    Z = np.array(artin_schreier_lift(R.p, R.N), dtype=np.int64)
    P = Z[R.p:].copy()
    P[0] -= 1
    return univariate(R, P, 0)


@lru_cache(maxsize=None)
def _lift_defect_inf(R: ChartRing) -> BElem:
    """Q with U = u^p (1 + Q), written in x = 1/u."""
    Z = np.array(artin_schreier_lift(R.p, R.N), dtype=np.int64)
    Q = Z[R.p:].copy()
    Q[0] -= 1
    return univariate(R, Q[::-1], -(len(Q) - 1))


@lru_cache(maxsize=None)
def _defect_powers(R: ChartRing, which: str) -> tuple[BElem, ...]:
    P = _lift_defect(R) if which == "0" else _lift_defect_inf(R)
    out = [BElem.monomial(R, 0, 0)]
    for _ in range(1, R.N):
        out.append(out[-1] * P)
    return tuple(out)


def _frob_substitute(g: BElem, which: str) -> BElem:
    """Apply F0 ('0') or F_inf ('inf') to an element of B.

    F0(x^e y^b)    = sigma(.) x^{pe} y^{pb} (1 + P)^e
    F_inf(x^e y^b) = sigma(.) x^{pe} y^{pb} (1 + Q)^{-(e+b)}
    and (1 + P)^n = sum_k C(n, k) P^k with P^k = 0 mod p^N for k >= N.
    """
    R = g.R
    p, M, N = R.p, R.M, R.N
    if g.is_zero():
        return BElem.zero(R)
    gs = g.sigma()
    L = gs.data.shape[2]
    es = np.arange(gs.emin, gs.emin + L, dtype=np.int64)
    powers = _defect_powers(R, which)
    out = BElem.zero(R)
    for k in range(N):
        raw = np.zeros((2, p * p + 1, p * (L - 1) + 1), dtype=np.int64)
        any_term = False
        for b in range(p + 1):
            n = es if which == "0" else -(es + b)
            coeffs = np.array([comb_signed(int(x), k) % M for x in n], dtype=np.int64)
            row = gs.data[:, b] * coeffs[None, :] % M
            if row.any():
                any_term = True
                raw[:, p * b, ::p] = row
        if not any_term:
            continue
        H = BElem._normalize(R, raw, p * gs.emin)
        out = out + (H if k == 0 else H * powers[k])
    return out


def comb_signed(n: int, k: int) -> int:
    """Binomial coefficient C(n, k) for any integer n."""
    if k == 0:
        return 1
    if n >= 0:
        return comb(n, k)
    return (-1) ** k * comb(k - n - 1, k)


def frob0(g: BElem) -> BElem:
    return _frob_substitute(g, "0")


def frob_inf(g: BElem) -> BElem:
    return _frob_substitute(g, "inf")


@lru_cache(maxsize=None)
def _frob_omega(R: ChartRing, which: str) -> BElem:
    """F^*(Omega) / Omega = d(F y) / (sigma(c) (p F(x)^{p-1} - 1))."""
    p = R.p
    Fy = _frob_substitute(BElem.monomial(R, 0, 1), which)
    Fx = _frob_substitute(BElem.monomial(R, 1, 0), which)
    denom = _series_inverse_p_minus_one(Fx ** (p - 1))
    return (d(Fy) * denom).scale(R.winv(R.csigma))


@lru_cache(maxsize=None)
def _delta_over_p(R: ChartRing) -> BElem:
    """(F0(y) - F_inf(y)) / p."""
    y = BElem.monomial(R, 0, 1)
    return (frob0(y) - frob_inf(y)).divide_by_p()


def _homotopy(ginf: BElem) -> BElem:
    """K(omega_inf) with F0 omega - F_inf omega = dK(omega) on the overlap."""
    R = ginf.R
    p, M, N = R.p, R.M, R.N
    if ginf.is_zero():
        return BElem.zero(R)
    h = ginf.scale(R.cinv) * _inv_px_minus_one(R)
    D = _delta_over_p(R)
    out = BElem.zero(R)
    deriv = h
    Dn = BElem.monomial(R, 0, 0)
    n = 1
    while True:
        vnum = n - vp(factorial(n), p)
        if vnum >= N:
            break
        Dn = Dn * D
        unit = factorial(n) // p ** vp(factorial(n), p)
        coef = p ** vnum * pow(unit, -1, M) % M
        out = out + (frob_inf(deriv) * Dn).scale(coef)
        deriv = d_dy(deriv)
        n += 1
    return out


def frobenius(cls: CechClass) -> CechClass:
    """The sigma-semilinear Frobenius on a hypercocycle, before reduction."""
    R = cls.f.R if not cls.f.is_zero() else cls.g0.R
    g0 = frob0(cls.g0) * _frob_omega(R, "0") if not cls.g0.is_zero() else BElem.zero(R)
    ginf = frob_inf(cls.ginf) * _frob_omega(R, "inf") if not cls.ginf.is_zero() else BElem.zero(R)
    f = frob0(cls.f) + _homotopy(cls.ginf)
    return CechClass(g0, ginf, f, label=f"phi({cls.label})")


# ---------------------------------------------------------------------------
# bases


@dataclass(frozen=True)
class BasisLabel:
    kind: str   # "hol" or "h1O"
    i: int      # isotypic block
    n: int      # r for "hol", k for "h1O"

    def describe(self, p) -> str:
        if self.kind == "hol":
            return f"x^{self.n} y^{p - self.i} dy"
        return f"y^{p + 1 - self.i} / x^{self.n}"


def _is_holomorphic(g: BElem) -> bool:
    return all(e >= 0 and e + b <= g.R.p - 2 for (e, b) in g.terms())


def h0_form(R: ChartRing, i: int, r: int) -> BElem:
    """x^r y^{p-i} dy = -c (1 - p x^{p-1}) x^r y^{p-i} Omega; we use its Omega-normalisation.

    The representative -c x^r y^{p-i} Omega is holomorphic on both charts and
    agrees with x^r y^{p-i} dy modulo p.
    """
    mc = ((-R.c[0]) % R.M, (-R.c[1]) % R.M)
    return BElem.monomial(R, r, R.p - i, mc)


def h0_basis(spec: CurveSpec, i: int) -> list[CechClass]:
    """The i-1 holomorphic classes x^r y^{p-i} dy, r = 0..i-2 (empty when i = 1)."""
    p = spec.p
    if not 1 <= i <= p:
        raise ValueError("block index must lie in 1..p")
    R = spec.ring()
    out = []
    for r in range(i - 1):
        g = h0_form(R, i, r)
        out.append(CechClass(g, g, BElem.zero(R), label=BasisLabel("hol", i, r).describe(p)))
    return out


def _h1O_lift(R: ChartRing, b: int, k: int) -> CechClass:
    """(alpha0, alpha_inf, y^b x^{-k}) with the exact form split by sign of e."""
    f = BElem.monomial(R, -k, b)
    df = d(f)
    a0 = df.select(lambda e, bb: e >= 0)
    ainf = a0 - df
    if not _is_on_inf(ainf):
        raise ReductionError("split of an H^1(O) lift is not regular at infinity")
    return CechClass(a0, ainf, f)


def _is_on_inf(g: BElem) -> bool:
    return all(e + b <= g.R.p - 2 for (e, b) in g.terms())


def h1O_basis(spec: CurveSpec, i: int) -> list[CechClass]:
    """The p-i classes y^{p+1-i} / x^k, k = 1..p-i (empty when i = p)."""
    p = spec.p
    if not 1 <= i <= p:
        raise ValueError("block index must lie in 1..p")
    R = spec.ring()
    out = []
    for k in range(1, p - i + 1):
        cl = _h1O_lift(R, p + 1 - i, k)
        cl.label = BasisLabel("h1O", i, k).describe(p)
        out.append(cl)
    return out


def basis_labels(p: int) -> list[BasisLabel]:
    out = []
    for i in range(1, p + 1):
        out += [BasisLabel("hol", i, r) for r in range(i - 1)]
        out += [BasisLabel("h1O", i, k) for k in range(1, p - i + 1)]
    return out


def basis_classes(spec: CurveSpec) -> list[CechClass]:
    out = []
    for i in range(1, spec.p + 1):
        out += h0_basis(spec, i) + h1O_basis(spec, i)
    return out


# ---------------------------------------------------------------------------
# reduction


@dataclass
class Reduced:
    coords: dict            # BasisLabel -> (c0, c1)
    certificate: bool       # the remaining triple was a global holomorphic form

    def vector(self, p) -> list[tuple[int, int]]:
        return [self.coords.get(l, (0, 0)) for l in basis_labels(p)]


def reduce_class(cls: CechClass) -> Reduced:
    """Coordinates of a hypercocycle in the basis of h0_basis and h1O_basis lifts."""
    R = (cls.f if not cls.f.is_zero() else cls.g0).R
    p = R.p
    if not cls.is_cocycle():
        raise ReductionError("input is not a hypercocycle at the working precision")
    f = cls.f
    f0 = f.select(lambda e, b: e >= 0)
    finf = f.select(lambda e, b: e < 0 and e <= -b)
    fH = f - f0 - finf
    g0 = cls.g0 - d(f0)
    ginf = cls.ginf + d(finf)
    coords = {}
    for (e, b), a in fH.terms().items():
        k = -e
        i = p + 1 - b
        lift = _h1O_lift(R, b, k)
        g0 = g0 - lift.g0.scale(a)
        ginf = ginf - lift.ginf.scale(a)
        coords[BasisLabel("h1O", i, k)] = a
    if not (g0 == ginf):
        raise ReductionError("residual forms disagree on the overlap")
    if not _is_holomorphic(g0):
        raise ReductionError("residual form is not holomorphic; poles outside the allowed locus")
    mcinv = R.winv(((-R.c[0]) % R.M, (-R.c[1]) % R.M))
    for (e, b), a in g0.terms().items():
        i = p - b
        coords[BasisLabel("hol", i, e)] = R.wmul(a, mcinv)
    return Reduced({k: v for k, v in coords.items() if v != (0, 0)}, True)


def reduce_function(f: BElem) -> Reduced:
    """H^1(O) coordinates of an overlap function viewed as a Cech 1-cocycle."""
    p = f.R.p
    fH = f - f.select(lambda e, b: e >= 0) - f.select(lambda e, b: e < 0 and e <= -b)
    coords = {BasisLabel("h1O", p + 1 - b, -e): a for (e, b), a in fH.terms().items()}
    return Reduced(coords, True)



@dataclass
class CocycleTransfer:
    """Moving the cocycle with f'_{s0} = y^{-i} onto the covering {V_0, V_inf}."""
    i: int
    identity_holds: bool     # -y^{-i} + g_{s0} = y^{p+1-i} / (c x), checked in B after clearing denominators
    cocycle: BElem           # y^{p+1-i} / (c x) on the overlap
    coords: dict             # its H^1(O) coordinates

    def to_json(self):
        return {"i": self.i, "identity_holds": self.identity_holds,
                "cocycle": [[e, b, list(v)] for (e, b), v in sorted(self.cocycle.terms().items())],
                "coords": {l.describe(self.cocycle.R.p): list(v) for l, v in self.coords.items()}}


def transfer_cocycle(spec: CurveSpec, i: int) -> CocycleTransfer:
    """Replace y^{-i} at s0 by g_{s0} = x^{p-2} y^{p+1-i} / (c (x^{p-1} - 1)).

    Multiplying by c x (x^{p-1} - 1) y^i, the difference of the local pieces
    becomes -c x (x^{p-1} - 1) + x^{p-1} y^{p+1}, which must equal
    (x^{p-1} - 1) y^{p+1} on the curve.
    """
    p = spec.p
    if not 1 <= i <= p:
        raise ValueError("block index must lie in 1..p")
    R = spec.ring()
    one = BElem.monomial(R, 0, 0)
    q = BElem.monomial(R, p - 1, 0) - one                      # x^{p-1} - 1
    y_top = BElem.monomial(R, 0, p + 1)                         # reduces to c (x^p - x)
    lhs = -(BElem.monomial(R, 1, 0) * q).scale(R.c) + BElem.monomial(R, p - 1, 0) * y_top
    rhs = q * y_top
    cocycle = BElem.monomial(R, -1, p + 1 - i, R.cinv)
    return CocycleTransfer(i, lhs == rhs, cocycle, reduce_function(cocycle).coords)


# ---------------------------------------------------------------------------
# Frobenius matrix


@dataclass
class FrobeniusData:
    spec: CurveSpec
    labels: list
    matrix: np.ndarray                 # shape (2g, 2g, 2): column j = phi(basis_j)
    seconds: float = 0.0

    @property
    def R(self) -> ChartRing:
        return self.spec.ring()

    def phi_squared(self) -> np.ndarray:
        return mat_mul(self.R, self.matrix, mat_sigma(self.R, self.matrix))

    def block_indices(self, i: int) -> list[int]:
        return [n for n, l in enumerate(self.labels) if l.i == i]

    def to_json(self) -> str:
        doc = {"schema": "frobenius-matrix/1", "curve": self.spec.to_json(),
               "basis": [l.describe(self.spec.p) for l in self.labels],
               "blocks": [l.i for l in self.labels],
               "matrix": [[list(map(int, self.matrix[r, c])) for c in range(self.matrix.shape[1])]
                          for r in range(self.matrix.shape[0])],
               "modulus": self.spec.p ** self.spec.N}
        return json.dumps(doc, sort_keys=True)


def mat_mul(R: ChartRing, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    a, b = R.ab
    M = R.M
    A0, A1 = A[..., 0], A[..., 1]
    B0, B1 = B[..., 0], B[..., 1]
    t = (A1 @ B1) % M
    return np.stack([(A0 @ B0 - b * t) % M, (A0 @ B1 + A1 @ B0 - a * t) % M], axis=-1)


def mat_sigma(R: ChartRing, A: np.ndarray) -> np.ndarray:
    a, _ = R.ab
    return np.stack([(A[..., 0] - a * A[..., 1]) % R.M, (-A[..., 1]) % R.M], axis=-1)


_FROB_CACHE: dict = {}


def frobenius_matrix(spec: CurveSpec) -> FrobeniusData:
    key = (spec.p, spec.N, spec.c)
    if key in _FROB_CACHE:
        cached = _FROB_CACHE[key]
        return FrobeniusData(spec, cached.labels, cached.matrix, cached.seconds)
    t0 = time.perf_counter()
    labels = basis_labels(spec.p)
    classes = basis_classes(spec)
    n = len(labels)
    Mx = np.zeros((n, n, 2), dtype=np.int64)
    for j, cl in enumerate(classes):
        red = reduce_class(frobenius(cl))
        Mx[:, j] = np.array(red.vector(spec.p), dtype=np.int64).reshape(n, 2)
    out = FrobeniusData(spec, labels, Mx, time.perf_counter() - t0)
    _FROB_CACHE[key] = out
    return out


def block_scalar(data: FrobeniusData, i: int) -> tuple[bool, tuple[int, int] | None]:
    """(phi^2 is scalar on block i, the scalar)."""
    P = data.phi_squared()
    idx = data.block_indices(i)
    if not idx:
        return True, None
    sub = P[np.ix_(idx, idx)]
    lam = tuple(int(x) for x in sub[0, 0])
    ok = True
    for a in range(len(idx)):
        for b in range(len(idx)):
            want = lam if a == b else (0, 0)
            if tuple(int(x) for x in sub[a, b]) != want:
                ok = False
    # off-block entries of the block's columns vanish
    others = [n for n in range(len(data.labels)) if n not in idx]
    if others and P[np.ix_(others, idx)].any():
        ok = False
    return ok, lam


def expected_cx(p: int, i: int, w1: WittElem, N: int = 2) -> WittElem:
    """-p * w1^{-2i}."""
    w = w1.reduce_precision(N) if w1.N != N else w1
    return -(w.inverse() ** (2 * i)) * p


def h1O_frobenius_coefficient(spec: CurveSpec, i: int, k: int) -> Fq2Elem:
    """c^{p-i} (-1)^{p-i-k} k C(p-i, k) in F_{p^2}."""
    p = spec.p
    cres = spec.c.residue()
    val = cres ** (p - i) * ((-1) ** (p - i - k) * k * comb(p - i, k) % p)
    return val


@dataclass
class H1OFrobRow:
    i: int
    k: int
    expected: int
    observed: int
    other_zero: bool

    @property
    def ok(self):
        return self.expected == self.observed and self.other_zero


def h1O_frobenius_table(spec: CurveSpec) -> list[H1OFrobRow]:
    """Frobenius of y^{p+1-i}/x^k modulo p against the closed form, for all admissible (i, k)."""
    p = spec.p
    data = frobenius_matrix(spec)
    F = fq2(p)
    rows = []
    for j, lab in enumerate(data.labels):
        if lab.kind != "h1O":
            continue
        i, k = lab.i, lab.n
        target = BasisLabel("hol", p + 1 - i, p - i - k)
        col = data.matrix[:, j] % p
        obs = 0
        other_zero = True
        for n, l in enumerate(data.labels):
            code = F.elem(int(col[n, 0]), int(col[n, 1]))
            if l == target:
                obs = code
            elif code:
                other_zero = False
        rows.append(H1OFrobRow(i, k, h1O_frobenius_coefficient(spec, i, k).code, obs, other_zero))
    return rows


def hol_image_divisible(spec: CurveSpec) -> bool:
    """phi maps holomorphic classes into p H^1."""
    data = frobenius_matrix(spec)
    for j, lab in enumerate(data.labels):
        if lab.kind == "hol" and np.any(data.matrix[:, j] % spec.p):
            return False
    return True


# ---------------------------------------------------------------------------
# calibration


@dataclass
class Calibration:
    p: int
    w1: WittElem
    w1_index: int
    fits: list            # per candidate: True/False
    cx: dict              # i -> WittElem at precision 2
    note: str = ("the eigenvalue identity holds for every candidate (the curve constant moves "
                 "with w1), so the first fitting candidate in discrete-log order is returned")

    def to_json(self):
        return {"p": self.p, "w1_index": self.w1_index, "w1_log": teich_log(self.w1),
                "fits": self.fits, "cx": {str(i): v.to_json() for i, v in self.cx.items()},
                "note": self.note}


def _block_cx(data: FrobeniusData, i: int) -> WittElem | None:
    ok, lam = block_scalar(data, i)
    if not ok:
        raise ReductionError(f"phi^2 is not scalar on block {i}")
    if lam is None:
        return None
    return witt(data.spec.p, 2, lam[0], lam[1])


def candidate_fits(p: int, w1: WittElem, N: int = 4, xi_index: int = 0) -> tuple[bool, dict]:
    spec = CurveSpec(p, xi_values(p)[xi_index].code, w1, N=N)
    data = frobenius_matrix(spec)
    cx = {}
    ok = True
    for i in range(1, p + 1):
        val = _block_cx(data, i)
        if val is None:
            continue
        cx[i] = val
        if val != expected_cx(p, i, w1.reduce_precision(2)):
            ok = False
    return ok, cx


def fits_on_fixed_curve(p: int, N: int = 4, base_index: int = 0, xi_index: int = 0) -> list[bool]:
    """Which candidates match the eigenvalues of one fixed curve (built from candidate base_index).

    Only the block scalars -p w1^{-2i} enter, so w1 is pinned up to sign.
    """
    cands = w1_candidates(p, N)
    spec = CurveSpec(p, xi_values(p)[xi_index].code, cands[base_index], N=N)
    data = frobenius_matrix(spec)
    out = []
    for w in cands:
        w2 = w.reduce_precision(2)
        out.append(all(_block_cx(data, i) in (None, expected_cx(p, i, w2)) for i in range(1, p + 1)))
    return out


@lru_cache(maxsize=None)
def calibrate_w1(p: int, N: int = 4) -> Calibration:
    cands = w1_candidates(p, N)
    fits = []
    chosen = None
    cx_chosen = None
    for idx, w in enumerate(cands):
        ok, cx = candidate_fits(p, w, N)
        fits.append(ok)
        if ok and chosen is None:
            chosen, cx_chosen = idx, cx
    if chosen is None:
        raise ReductionError("no w1 candidate matches the Frobenius eigenvalues")
    return Calibration(p, cands[chosen], chosen, fits, cx_chosen)


# ---------------------------------------------------------------------------
# point counts


class _Ext:
    """F_{p^{2k}} = F_{p^2}[t]/(t^k - mu t - nu), vectorised over arrays of codes."""

    def __init__(self, p: int, k: int):
        self.F = fq2(p)
        self.p, self.k = p, k
        self.q = p * p
        self.size = self.q ** k
        self.poly = self._find_poly()

    def _find_poly(self):
        F = self.F
        if self.k == 1:
            return None
        for nu in range(1, self.q):
            for mu in range(self.q):
                # t^k = mu t + nu, irreducible iff no root (k <= 3)
                rootless = True
                for t in range(self.q):
                    val = F.sub(F.sub(F.pow(t, self.k), F.mul(mu, t)), nu)
                    if val == 0:
                        rootless = False
                        break
                if rootless:
                    return mu, nu
        raise AssertionError("no irreducible trinomial")

    def all_elements(self) -> np.ndarray:
        idx = np.arange(self.size)
        return np.stack([(idx // self.q ** j) % self.q for j in range(self.k)], axis=-1)

    def mul(self, A, B):
        F = self.F
        k = self.k
        mt, at = F.mul_table, F.add_table
        prod = [np.zeros(A.shape[0], dtype=np.int64) for _ in range(2 * k - 1)]
        for i in range(k):
            for j in range(k):
                prod[i + j] = at[prod[i + j], mt[A[:, i], B[:, j]]]
        if k > 1:
            mu, nu = self.poly
            for deg in range(2 * k - 2, k - 1, -1):
                top = prod[deg]
                prod[deg - k + 1] = at[prod[deg - k + 1], mt[top, mu]]
                prod[deg - k] = at[prod[deg - k], mt[top, nu]]
                prod[deg] = np.zeros_like(top)
        return np.stack(prod[:k], axis=-1)

    def pow(self, A, n):
        result = np.zeros_like(A)
        result[:, 0] = 1
        base = A
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def sub(self, A, B):
        return self.F.sub_table[A, B]

    def scale(self, A, code):
        return self.F.mul_table[A, code]

    def encode(self, A):
        return sum(A[:, j] * self.q ** j for j in range(self.k))


def point_count(spec: CurveSpec, k: int = 1) -> int:
    """Number of F_{p^{2k}}-points of the projective curve, by enumeration."""
    if k < 1 or k > 3:
        raise ValueError("k must lie in 1..3")
    p = spec.p
    E = _Ext(p, k)
    X = E.all_elements()
    cres = spec.c.residue().code
    rhs = E.scale(E.sub(E.pow(X, p), X), cres)
    ypow = E.pow(X, p + 1)
    hist = np.bincount(E.encode(ypow), minlength=E.size)
    affine = int(hist[E.encode(rhs)].sum())
    return affine + 1   # the single point [1:0:0] at infinity


def lefschetz_count(data: FrobeniusData) -> int:
    """1 + p^2 - trace(phi^2) using the symmetric lift of the trace mod p^N."""
    p, M = data.spec.p, data.R.M
    P = data.phi_squared()
    tr0 = int(np.trace(P[..., 0]) % M)
    tr1 = int(np.trace(P[..., 1]) % M)
    if tr1:
        raise ReductionError("trace of phi^2 is not rational")
    bound = 2 * data.spec.genus * p
    if 2 * bound >= M:
        raise PrecisionExhausted(f"precision N={data.spec.N} too small for an exact trace;"
                                 f" need p^N > {2 * bound}")
    tr = tr0 if tr0 <= M // 2 else tr0 - M
    return 1 + p * p - tr


def point_counts_csv(rows: list[tuple[int, int, int]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "k", "count"])
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Gauss sums


def psi(p: int, z: int) -> int:
    """Exponent of x in psi_{p^2}(z) = zeta_p^{Tr z}, Tr z = z + z^p."""
    F = fq2(p)
    t = F.add(z, F.frob(z))
    c0, c1 = F.coords(t)
    assert c1 == 0
    return c0


@dataclass
class GaussSumReport:
    p: int
    i: int
    S: CycloElem
    norm_ok: bool
    in_y_subring: bool
    root_exponent: int | None      # S/p = y^k
    in_mu_p_plus_1: bool
    inner_ok: bool

    @property
    def ok(self):
        return self.norm_ok and self.in_y_subring and self.in_mu_p_plus_1 and self.inner_ok

    def to_json(self):
        return {"p": self.p, "i": self.i, "S": self.S.to_json(), "S_conj_S_is_p2": self.norm_ok,
                "S_over_p_exponent": self.root_exponent, "S_over_p_in_mu": self.in_mu_p_plus_1,
                "in_y_subring": self.in_y_subring, "inner_sum_dichotomy": self.inner_ok}


def gauss_sum(p: int, i: int) -> CycloElem:
    """sum over z in F_{p^2}^x of psi(z) z^{-i(p-1)}, with z = g^n read as y^n."""
    R = cyclo_ring(p)
    F = fq2(p)
    n = p * p - 1
    terms = {}
    for e in range(n):
        z = F.exp[e]
        key = (psi(p, z), (-e * i * (p - 1)) % n)
        terms[key] = terms.get(key, 0) + 1
    return R.from_exponents(terms)


def inner_sum_dichotomy(p: int) -> bool:
    """sum_{a in F_p^x} psi(a z) is -1 if z^p + z != 0 and p - 1 otherwise."""
    R = cyclo_ring(p)
    F = fq2(p)
    for z in range(1, p * p):
        terms = {}
        for a in range(1, p):
            key = (psi(p, F.mul(F.from_int(a), z)), 0)
            terms[key] = terms.get(key, 0) + 1
        val = R.from_exponents(terms)
        want = R.from_exponents({(0, 0): p - 1}) if F.add(z, F.frob(z)) == 0 \
            else R.from_exponents({(0, 0): -1})
        if val != want:
            return False
    return True


def gauss_sum_report(p: int, i: int) -> GaussSumReport:
    R = cyclo_ring(p)
    S = gauss_sum(p, i)
    norm_ok = cyclo_mul(S, cyclo_conj(S)) == R.from_exponents({(0, 0): p * p})
    in_y = cyclo_in_y_subring(S)
    k = None
    for e in range(R.n):
        if S == R.from_exponents({(0, e): p}):
            k = e
            break
    in_mu = k is not None and (k * (p + 1)) % R.n == 0
    return GaussSumReport(p, i, S, norm_ok, in_y, k, in_mu, inner_sum_dichotomy(p))
