"""Rank-2 filtered phi-modules attached to a character of F_{p^2}^x.

F (x)_{Q_p} E with E = Q_{p^2} is modelled as F x F through the two embeddings
tau = id and taubar = sigma: z (x) e goes to (z e, z sigma(e)).  In these
coordinates
    g in Gal(F/F_0)  acts componentwise,
    g_phi            acts by (A, B) -> (g_phi B, g_phi A),
    1 (x) e          is (e, sigma e).
An element of F (x)_{F_0} D is a 2x2 table: for each of e1, e2 a pair (A, B).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from itertools import product

from .arith import (CharSpec, EisensteinElem, WittElem, galois_act_F, omega2, witt)


class FilParamError(ValueError):
    pass


# ---------------------------------------------------------------------------
# F (x) E


@dataclass(frozen=True)
class FE:
    """An element of F (x)_{Q_p} E as its tau and taubar components."""
    A: EisensteinElem
    B: EisensteinElem

    @classmethod
    def from_E(cls, e: WittElem) -> FE:
        return cls(EisensteinElem.scalar(e), EisensteinElem.scalar(e.sigma()))

    @classmethod
    def from_F(cls, z: EisensteinElem) -> FE:
        return cls(z, z)

    @classmethod
    def zero(cls, p, N):
        z = EisensteinElem.zero(p, N)
        return cls(z, z)

    def __add__(self, o):
        return FE(self.A + o.A, self.B + o.B)

    def __sub__(self, o):
        return FE(self.A - o.A, self.B - o.B)

    def __mul__(self, o):
        return FE(self.A * o.A, self.B * o.B)

    def g_phi(self) -> FE:
        return FE(self.B.sigma(), self.A.sigma())

    def galois(self, g_index: int) -> FE:
        return FE(galois_act_F(g_index, self.A), galois_act_F(g_index, self.B))

    def is_zero(self):
        return self.A.is_zero() and self.B.is_zero()

    def to_json(self):
        return {"tau": self.A.to_json(), "taubar": self.B.to_json()}


@dataclass(frozen=True)
class DVec:
    """f = c1 e1 + c2 e2 in F (x)_{F_0} D."""
    c1: FE
    c2: FE

    def __add__(self, o):
        return DVec(self.c1 + o.c1, self.c2 + o.c2)

    def __sub__(self, o):
        return DVec(self.c1 - o.c1, self.c2 - o.c2)

    def scale(self, lam: FE) -> DVec:
        return DVec(lam * self.c1, lam * self.c2)

    def is_zero(self):
        return self.c1.is_zero() and self.c2.is_zero()

    def to_json(self):
        return {"e1": self.c1.to_json(), "e2": self.c2.to_json()}


# ---------------------------------------------------------------------------
# the module


@dataclass(frozen=True)
class PhiModule:
    """phi(e1) = e2, phi(e2) = c_x e1; Gal(F/F_0) acts by omega^m on e1, omega^{pm} on e2."""
    char: CharSpec
    cx: WittElem
    N: int = 4

    @property
    def p(self):
        return self.char.p

    @property
    def m(self):
        return self.char.m

    @property
    def weight_e2(self):
        return (self.p * self.m) % (self.p * self.p - 1)

    def phi(self, f: DVec) -> DVec:
        """g_phi (x) phi on F (x)_{F_0} D."""
        # (g_phi (x) phi)(lambda e1) = g_phi(lambda) e2, (lambda e2) -> g_phi(lambda) c_x e1
        return DVec(f.c2.g_phi() * FE.from_E(self.cx), f.c1.g_phi())

    def galois(self, g_index: int, f: DVec) -> DVec:
        """g in Gal(F/F_0), indexed by the Teichmuller exponent of g(varpi)/varpi."""
        w = omega2(g_index, self.p, self.N)
        w1 = FE.from_F(EisensteinElem.scalar(w ** self.m))
        w2 = FE.from_F(EisensteinElem.scalar(w ** self.weight_e2))
        return DVec(f.c1.galois(g_index) * w1, f.c2.galois(g_index) * w2)

    def g_phi(self, f: DVec) -> DVec:
        return DVec(f.c1.g_phi(), f.c2.g_phi())

    def matrix_json(self):
        return {"phi": [["0", "c_x"], ["1", "0"]], "c_x": self.cx.to_json(),
                "c_x_valuation": self.cx.valuation(), "galois_weights": [self.m, self.weight_e2],
                "monodromy": [[0, 0], [0, 0]]}

    def to_json(self) -> str:
        doc = {"schema": "phi-module/1", "p": self.p, "m": self.m, "i": self.char.i,
               "j": self.char.j}
        doc.update(self.matrix_json())
        return json.dumps(doc, sort_keys=True)


def cx_formula(char: CharSpec, w1: WittElem) -> WittElem:
    """-p w1^{-2i}."""
    return -(w1.inverse() ** (2 * char.i)) * char.p


def build_dcrys(char: CharSpec, w1: WittElem | None = None, N: int = 4) -> PhiModule:
    if w1 is None:
        from .curve import calibrate_w1
        w1 = calibrate_w1(char.p, N).w1
    if w1.N != N:
        w1 = w1.reduce_precision(N)
    return PhiModule(char, cx_formula(char, w1), N)


# ---------------------------------------------------------------------------
# filtration


@dataclass(frozen=True)
class FilParam:
    a: WittElem
    b: WittElem

    def __post_init__(self):
        if self.a.is_zero() and self.b.is_zero():
            raise FilParamError("(a, b) must not be (0, 0)")

    def to_json(self):
        return {"a": self.a.to_json(), "b": self.b.to_json()}

    def proportional(self, o: FilParam) -> bool:
        return (self.a * o.b - self.b * o.a).is_zero()


def fil1_generator(par: FilParam, char: CharSpec) -> DVec:
    """(varpi^{(p-1)i} (x) a) e1 + (1 (x) b) e2."""
    p, N = char.p, par.a.N
    vpow = FE.from_F(EisensteinElem.varpi_power((p - 1) * char.i, p, N))
    return DVec(vpow * FE.from_E(par.a), FE.from_E(par.b))


@dataclass
class FilLine:
    generator: DVec
    galois_stable: bool
    checked: int

    def to_json(self):
        return {"generator": self.generator.to_json(), "galois_stable": self.galois_stable,
                "checked_elements": self.checked}


def in_line(f: DVec, v: DVec) -> bool:
    """Direct test: f lies in the F (x) E line spanned by v (componentwise 2x2 minors vanish).

    Over each factor F the line through (v1, v2) contains (f1, f2) iff
    f1 v2 - f2 v1 = 0, provided v is nonzero in that factor.
    """
    for fa, fb, va, vb in ((f.c1.A, f.c2.A, v.c1.A, v.c2.A), (f.c1.B, f.c2.B, v.c1.B, v.c2.B)):
        if va.is_zero() and vb.is_zero():
            raise FilParamError("generator vanishes in one factor")
        if not (fa * vb - fb * va).is_zero():
            return False
    return True


def fil1(par: FilParam, char: CharSpec, module: PhiModule | None = None, samples: int = 20,
         seed: int = 0) -> FilLine:
    """The line Fil^1 and a check that it is stable under sampled Galois elements."""
    v = fil1_generator(par, char)
    stable = True
    mod = module or build_dcrys(char, N=par.a.N)
    rng = random.Random(seed)
    for _ in range(samples):
        g = rng.randrange(char.p ** 2 - 1)
        if not in_line(mod.galois(g, v), v):
            stable = False
    if not in_line(mod.g_phi(v), v):
        stable = False
    return FilLine(v, stable, samples + 1)


def fil1_member(f: DVec, par: FilParam, char: CharSpec, module: PhiModule) -> bool:
    """(1 (x) b)(g_phi (x) phi)(f1) = (varpi^{(p-1)i} (x) a) g_phi(f2).

    With a = 1 this is the membership criterion for [1 : b]; the factor a makes
    it homogeneous in the parameter.
    """
    p, N = char.p, module.N
    f1 = DVec(f.c1, FE.zero(p, N))
    lhs = module.phi(f1).c2 * FE.from_E(par.b)
    vpow = FE.from_F(EisensteinElem.varpi_power((p - 1) * char.i, p, N))
    rhs = vpow * FE.from_E(par.a) * f.c2.g_phi()
    return (lhs - rhs).is_zero()


def fil1_member_fixed(f: DVec, par: FilParam, char: CharSpec, module: PhiModule) -> bool:
    """The simplified criterion for g_phi-fixed f."""
    if not (module.g_phi(f) - f).is_zero():
        raise ValueError("f is not fixed by g_phi")
    p, N = char.p, module.N
    lhs = module.phi(DVec(f.c1, FE.zero(p, N))).c2 * FE.from_E(par.b)
    vpow = FE.from_F(EisensteinElem.varpi_power((p - 1) * char.i, p, N))
    return (lhs - vpow * FE.from_E(par.a) * f.c2).is_zero()


# ---------------------------------------------------------------------------
# weak admissibility

# F_0-basis of D: e1 tau, e1 taubar, e2 tau, e2 taubar
_BASIS = [(1, "tau"), (1, "taubar"), (2, "tau"), (2, "taubar")]


def _phi_on_basis(module: PhiModule):
    """phi of each F_0-basis vector as (target index, scalar)."""
    cx = module.cx
    # phi((A, B) e1) = (sigma B, sigma A) e2; phi((A, B) e2) = (sigma B cx, sigma A sigma cx) e1
    return {0: (3, witt(module.p, module.N, 1)), 1: (2, witt(module.p, module.N, 1)),
            2: (1, cx.sigma()), 3: (0, cx)}


@dataclass
class SubmoduleWitness:
    basis: tuple
    phi_stable: bool
    galois_stable: bool       # Gal(F/F_0)
    g_phi_stable: bool
    t_N: int
    t_H: int

    def to_json(self):
        return {"basis": [f"e{k}{'' if c == 'tau' else '_bar'}" for k, c in self.basis],
                "phi_stable": self.phi_stable, "inertia_stable": self.galois_stable,
                "g_phi_stable": self.g_phi_stable, "t_N": self.t_N, "t_H": self.t_H}


@dataclass
class AdmissibilityReport:
    p: int
    m: int
    par: FilParam
    t_N_raw: int
    t_H_raw: int
    e_dim: int
    candidates: list
    violations: list
    precision: int

    @property
    def t_N(self):
        return self.t_N_raw // self.e_dim

    @property
    def t_H(self):
        return self.t_H_raw // self.e_dim

    @property
    def passed(self) -> bool:
        return self.t_N_raw == self.t_H_raw and not self.violations

    def to_json(self):
        return {"schema": "weak-admissibility/1", "p": self.p, "m": self.m,
                "parameter": self.par.to_json(), "t_N_raw": self.t_N_raw,
                "t_H_raw": self.t_H_raw, "t_N": self.t_N, "t_H": self.t_H,
                "stable_submodules": [c.to_json() for c in self.candidates],
                "violations": [c.to_json() for c in self.violations], "passed": self.passed,
                "deciding_precision": self.precision}


def _t_H_of(subset, v: DVec) -> int:
    """dim_F of Fil^1 intersected with the span of subset."""
    chosen = set(subset)
    total = 0
    for comp, (x1, x2) in (("tau", (v.c1.A, v.c2.A)), ("taubar", (v.c1.B, v.c2.B))):
        need = []
        if not x1.is_zero():
            need.append((1, comp))
        if not x2.is_zero():
            need.append((2, comp))
        if all(n in chosen for n in need):
            total += 1
    return total


def is_weakly_admissible(module: PhiModule, par: FilParam) -> AdmissibilityReport:
    """Hodge and Newton numbers of D and of every stable subobject spanned by basis vectors.

    Gal(F/F_0) acts on e1 and e2 through distinct characters, so a stable
    F_0 (x) E-submodule is spanned by a subset of the four F_0-basis vectors.
    Every phi- and inertia-stable subset is tested, whether or not g_phi
    preserves it; only proper nonzero ones can violate.
    """
    v = fil1_generator(par, module.char)
    phi_b = _phi_on_basis(module)
    candidates, violations = [], []
    for mask in product([0, 1], repeat=4):
        idx = [k for k in range(4) if mask[k]]
        subset = tuple(_BASIS[k] for k in idx)
        phi_stable = all(phi_b[k][0] in idx for k in idx)
        g_phi_stable = all({0: 1, 1: 0, 2: 3, 3: 2}[k] in idx for k in idx)
        t_N = sum(phi_b[k][1].valuation() for k in idx) if phi_stable else 0
        t_H = _t_H_of(subset, v)
        w = SubmoduleWitness(subset, phi_stable, True, g_phi_stable, int(t_N), t_H)
        if not phi_stable:
            continue
        candidates.append(w)
        if 0 < len(idx) < 4 and t_H > t_N:
            violations.append(w)
    t_full = next(c for c in candidates if len(c.basis) == 4)
    return AdmissibilityReport(module.p, module.m, par, t_full.t_N, t_full.t_H, 2, candidates,
                               violations, module.N)


# ---------------------------------------------------------------------------
# duality of parameters


@dataclass
class DualWitness:
    """The E-linear isomorphism D_{chi^p} -> D_chi sending e1' to e2 and e2' to c_x e1.

    It is stored in this direction because its matrix is integral; its inverse
    needs c_x^{-1}.
    """
    source: PhiModule
    target: PhiModule
    par: FilParam
    par_target: FilParam

    def apply_inverse(self, f: DVec) -> DVec:
        """Target coordinates c1' e1' + c2' e2' to source: c2' c_x e1 + c1' e2."""
        return DVec(f.c2 * FE.from_E(self.source.cx), f.c1)


def dual_param(par: FilParam, char: CharSpec, module: PhiModule | None = None):
    """[a : b] on chi corresponds to [b c_x / p : -a] on chi^p through e1' = e2, e2' = c_x e1."""
    module = module or build_dcrys(char, N=par.a.N)
    cx_over_p = module.cx.divide_by_p(1)
    new = FilParam(par.b * cx_over_p, -par.a)
    target_char = char.frobenius_twist()
    target = PhiModule(target_char, module.cx, module.N)
    return new, target_char, DualWitness(module, target, par, new)


def verify_dual_witness(w: DualWitness, samples: int = 20, seed: int = 0) -> dict:
    """Check that the inverse witness intertwines phi, Galois and the filtrations."""
    p, N = w.source.p, w.source.N
    rng = random.Random(seed)
    phi_ok = gal_ok = True
    for _ in range(samples):
        f = random_dvec(p, N, rng)
        if not (w.apply_inverse(w.target.phi(f)) - w.source.phi(w.apply_inverse(f))).is_zero():
            phi_ok = False
        g = rng.randrange(p * p - 1)
        if not (w.apply_inverse(w.target.galois(g, f))
                - w.source.galois(g, w.apply_inverse(f))).is_zero():
            gal_ok = False
        if not (w.apply_inverse(w.target.g_phi(f)) - w.source.g_phi(w.apply_inverse(f))).is_zero():
            gal_ok = False
    # the image of the target's Fil^1 generator lies on the source's Fil^1 line
    gen_t = fil1_generator(w.par_target, w.target.char)
    fil_ok = in_line(w.apply_inverse(gen_t), fil1_generator(w.par, w.source.char))
    return {"phi": phi_ok, "galois": gal_ok, "filtration": fil_ok}


def normalize_param(par: FilParam, char: CharSpec, module: PhiModule | None = None):
    """Rescale to a = 1 with v_p(b) >= 0, after one dual move if v(a) > v(b).

    Returns (parameter, character, moved).
    """
    moved = False
    if par.a.valuation() > par.b.valuation():
        par, char, _ = dual_param(par, char, module)
        moved = True
    k = int(par.a.valuation())
    a, b = par.a, par.b
    if k:
        a, b = a.divide_by_p(k), b.divide_by_p(k)
    ainv = a.inverse()
    return FilParam(a * ainv, b * ainv), char, moved


# ---------------------------------------------------------------------------
# random data


def random_witt(p, N, rng, allow_zero=True) -> WittElem:
    while True:
        w = witt(p, N, rng.randrange(p ** N), rng.randrange(p ** N))
        if allow_zero or not w.is_zero():
            return w


def random_eisenstein(p, N, rng, terms: int = 4) -> EisensteinElem:
    e = p * p - 1
    coef = [(0, 0)] * e
    for k in rng.sample(range(e), min(terms, e)):
        coef[k] = (rng.randrange(p ** N), rng.randrange(p ** N))
    return EisensteinElem(p, N, tuple(coef))


def random_fe(p, N, rng) -> FE:
    return FE(random_eisenstein(p, N, rng), random_eisenstein(p, N, rng))


def random_dvec(p, N, rng) -> DVec:
    return DVec(random_fe(p, N, rng), random_fe(p, N, rng))


def random_param(p, N, rng) -> FilParam:
    while True:
        a, b = random_witt(p, N, rng), random_witt(p, N, rng)
        if not (a.is_zero() and b.is_zero()):
            return FilParam(a, b)
