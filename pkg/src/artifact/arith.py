"""Exact arithmetic: F_p, F_{p^2}, truncated Z_{p^2}, the Eisenstein ring O_F and
cyclotomic integers.

Everything here is an immutable value.  Elements of Z_{p^2}/p^N are stored as
pairs over the integral basis {1, s} where s is a root of the lifted modulus
x^2 + a x + b, so the Frobenius is s -> -a - s.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np


class CharacterError(ValueError):
    """Raised for characters that are fixed by Frobenius."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def vp(n, p: int) -> int | float:
    """p-adic valuation of an integer or Fraction; inf for zero."""
    if n == 0:
        return float("inf")
    n = Fraction(n)
    v = 0
    num, den = n.numerator, n.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def smallest_modulus(p: int) -> tuple[int, int]:
    """Lexicographically smallest (a, b) with x^2 + a x + b irreducible over F_p."""
    for a in range(p):
        for b in range(p):
            if all((x * x + a * x + b) % p for x in range(p)):
                return a, b
    raise AssertionError("no irreducible quadratic")


@dataclass(frozen=True)
class PrimeConfig:
    p: int
    N: int = 4
    K: int | None = None
    modulus: tuple[int, int] | None = None

    def __post_init__(self):
        if self.p < 3 or not is_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.N < 2:
            raise ValueError("Witt precision N must be at least 2")
        if self.K is None:
            object.__setattr__(self, "K", self.N * (self.p ** 2 - 1))
        if self.K < self.p ** 2 - 1:
            raise ValueError("K must cover at least one p-digit")
        if self.modulus is None:
            object.__setattr__(self, "modulus", smallest_modulus(self.p))
        a, b = self.modulus
        if any((x * x + a * x + b) % self.p == 0 for x in range(self.p)):
            raise ValueError("modulus is reducible")

    @property
    def q(self) -> int:
        return self.p * self.p


# ---------------------------------------------------------------------------
# F_{p^2}


class Fq2:
    """The field F_p[s]/(s^2 + a s + b).  Elements are coded as c0 + p*c1."""

    def __init__(self, p: int, modulus: tuple[int, int] | None = None):
        self.p = p
        self.q = p * p
        self.a, self.b = modulus if modulus is not None else smallest_modulus(p)
        q = self.q
        c0 = np.arange(q) % p
        c1 = np.arange(q) // p
        self.add_table = (((c0[:, None] + c0[None, :]) % p)
                          + p * ((c1[:, None] + c1[None, :]) % p)).astype(np.int64)
        # (x0 + x1 s)(y0 + y1 s) with s^2 = -a s - b
        t0 = c0[:, None] * c0[None, :] - self.b * c1[:, None] * c1[None, :]
        t1 = c0[:, None] * c1[None, :] + c1[:, None] * c0[None, :] - self.a * c1[:, None] * c1[None, :]
        self.mul_table = ((t0 % p) + p * (t1 % p)).astype(np.int64)
        self.neg_table = (((-c0) % p) + p * ((-c1) % p)).astype(np.int64)
        self.sub_table = self.add_table[:, self.neg_table]
        inv = np.zeros(q, dtype=np.int64)
        for x in range(1, q):
            inv[x] = int(np.nonzero(self.mul_table[x] == 1)[0][0])
        self.inv_table = inv
        self.gen = self._find_generator()
        self.log = {}
        x = 1
        for k in range(q - 1):
            self.log[x] = k
            x = self.mul(x, self.gen)
        self.exp = [0] * (q - 1)
        for x, k in self.log.items():
            self.exp[k] = x

    def _find_generator(self) -> int:
        for g in range(2, self.q):
            x, order = g, 1
            while x != 1:
                x = int(self.mul_table[x, g])
                order += 1
            if order == self.q - 1:
                return g
        raise AssertionError

    def elem(self, c0: int, c1: int = 0) -> int:
        return (c0 % self.p) + self.p * (c1 % self.p)

    def coords(self, x: int) -> tuple[int, int]:
        return x % self.p, x // self.p

    def add(self, x, y):
        return int(self.add_table[x, y])

    def sub(self, x, y):
        return int(self.sub_table[x, y])

    def mul(self, x, y):
        return int(self.mul_table[x, y])

    def neg(self, x):
        return int(self.neg_table[x])

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("0 in F_q")
        return int(self.inv_table[x])

    def pow(self, x, n: int):
        if x == 0:
            return 0 if n > 0 else 1
        return self.exp[(self.log[x] * n) % (self.q - 1)]

    def frob(self, x):
        return self.pow(x, self.p)

    def from_int(self, n: int) -> int:
        return n % self.p

    def elements(self):
        return range(self.q)


@lru_cache(maxsize=None)
def fq2(p: int) -> Fq2:
    return Fq2(p)


@dataclass(frozen=True)
class Fq2Elem:
    """Scalar wrapper around an F_{p^2} code, for readable client code."""
    p: int
    code: int

    @property
    def field(self) -> Fq2:
        return fq2(self.p)

    @classmethod
    def of(cls, p, c0, c1=0):
        return cls(p, fq2(p).elem(c0, c1))

    def __add__(self, o):
        return Fq2Elem(self.p, self.field.add(self.code, _code(o, self.p)))

    __radd__ = __add__

    def __sub__(self, o):
        return Fq2Elem(self.p, self.field.sub(self.code, _code(o, self.p)))

    def __rsub__(self, o):
        return Fq2Elem(self.p, self.field.sub(_code(o, self.p), self.code))

    def __mul__(self, o):
        return Fq2Elem(self.p, self.field.mul(self.code, _code(o, self.p)))

    __rmul__ = __mul__

    def __neg__(self):
        return Fq2Elem(self.p, self.field.neg(self.code))

    def __truediv__(self, o):
        return Fq2Elem(self.p, self.field.mul(self.code, self.field.inv(_code(o, self.p))))

    def __pow__(self, n):
        return Fq2Elem(self.p, self.field.pow(self.code, n))

    def frob(self):
        return Fq2Elem(self.p, self.field.frob(self.code))

    def is_zero(self):
        return self.code == 0

    def to_json(self):
        return {"type": "fq2", "p": self.p, "coords": list(self.field.coords(self.code))}


def _code(o, p):
    if isinstance(o, Fq2Elem):
        return o.code
    return fq2(p).from_int(int(o))


# ---------------------------------------------------------------------------
# Z_{p^2} / p^N


@dataclass(frozen=True)
class WittElem:
    """c0 + c1*s in Z_{p^2}/p^N."""
    p: int
    N: int
    c0: int
    c1: int

    @property
    def mod(self):
        return self.p ** self.N

    @property
    def _ab(self):
        return smallest_modulus(self.p)

    def _new(self, c0, c1):
        m = self.mod
        return WittElem(self.p, self.N, c0 % m, c1 % m)

    def _lift(self, o) -> WittElem:
        if isinstance(o, WittElem):
            if (o.p, o.N) != (self.p, self.N):
                raise ValueError("precision mismatch")
            return o
        return self._new(int(o), 0)

    def __add__(self, o):
        o = self._lift(o)
        return self._new(self.c0 + o.c0, self.c1 + o.c1)

    __radd__ = __add__

    def __sub__(self, o):
        o = self._lift(o)
        return self._new(self.c0 - o.c0, self.c1 - o.c1)

    def __rsub__(self, o):
        return self._lift(o) - self

    def __neg__(self):
        return self._new(-self.c0, -self.c1)

    def __mul__(self, o):
        o = self._lift(o)
        a, b = self._ab
        t = self.c1 * o.c1
        return self._new(self.c0 * o.c0 - b * t, self.c0 * o.c1 + self.c1 * o.c0 - a * t)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self._new(1, 0)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, o):
        if isinstance(o, int):
            o = self._lift(o)
        if not isinstance(o, WittElem):
            return NotImplemented
        return (self.p, self.N, self.c0, self.c1) == (o.p, o.N, o.c0, o.c1)

    def __hash__(self):
        return hash((self.p, self.N, self.c0, self.c1))

    def sigma(self) -> WittElem:
        a, _ = self._ab
        return self._new(self.c0 - a * self.c1, -self.c1)

    def norm(self) -> int:
        """N(x) = x * sigma(x), an element of Z/p^N."""
        n = self * self.sigma()
        assert n.c1 == 0
        return n.c0

    def valuation(self):
        if self.c0 == 0 and self.c1 == 0:
            return float("inf")
        return min(vp(self.c0, self.p) if self.c0 else self.N,
                   vp(self.c1, self.p) if self.c1 else self.N)

    def is_zero(self):
        return self.c0 == 0 and self.c1 == 0

    def is_unit(self):
        return self.c0 % self.p != 0 or self.c1 % self.p != 0

    def residue(self) -> Fq2Elem:
        return Fq2Elem.of(self.p, self.c0, self.c1)

    def inverse(self) -> WittElem:
        if not self.is_unit():
            raise ZeroDivisionError("not a unit in Z_{p^2}/p^N")
        # x^{-1} = sigma(x) / N(x)
        n = self.norm()
        return self.sigma() * pow(n, -1, self.mod)

    def __truediv__(self, o):
        return self * self._lift(o).inverse()

    def divide_by_p(self, k: int = 1) -> WittElem:
        """Exact division by p^k; the top k digits become unknown and are set to 0."""
        pk = self.p ** k
        if self.c0 % pk or self.c1 % pk:
            raise ValueError("not divisible")
        return self._new(self.c0 // pk, self.c1 // pk)

    def reduce_precision(self, n: int) -> WittElem:
        return WittElem(self.p, n, self.c0 % self.p ** n, self.c1 % self.p ** n)

    def digits(self):
        out = []
        for c in (self.c0, self.c1):
            ds = []
            for _ in range(self.N):
                ds.append(c % self.p)
                c //= self.p
            out.append(ds)
        return out

    def to_json(self):
        return {"type": "witt", "p": self.p, "N": self.N, "digits": self.digits()}

    @classmethod
    def from_json(cls, d):
        p, N = d["p"], d["N"]
        c = [sum(x * p ** k for k, x in enumerate(ds)) for ds in d["digits"]]
        return cls(p, N, c[0], c[1])

    def __repr__(self):
        return f"W({self.c0}+{self.c1}s mod {self.p}^{self.N})"


def witt(p: int, N: int, c0: int = 0, c1: int = 0) -> WittElem:
    m = p ** N
    return WittElem(p, N, c0 % m, c1 % m)


def witt_from_fq2(a: Fq2Elem | int, p: int, N: int) -> WittElem:
    """Naive digit lift of a residue (not the Teichmuller lift)."""
    code = a.code if isinstance(a, Fq2Elem) else a
    c0, c1 = fq2(p).coords(code)
    return witt(p, N, c0, c1)


def teichmuller(a: Fq2Elem | int, p: int, N: int) -> WittElem:
    """Root-of-unity lift, by Newton iteration on t^{q-1} = 1."""
    t = witt_from_fq2(a, p, N)
    if t.is_zero():
        return t
    q1 = p * p - 1
    for _ in range(N + 1):
        # t <- t - (t^{q-1} - 1) / ((q-1) t^{q-2})
        tq2 = t ** (q1 - 1)
        t = t - (tq2 * t - 1) / (tq2 * q1)
    assert t ** q1 == 1
    return t


def teichmuller_gen(p: int, N: int) -> WittElem:
    return teichmuller(fq2(p).gen, p, N)


def root_of_unity(k: int, p: int, N: int) -> WittElem:
    """zeta^k where zeta is the Teichmuller lift of the fixed generator of F_{p^2}^x."""
    return _tpow(p, N, k % (p * p - 1))


@lru_cache(maxsize=None)
def _tpow(p, N, k):
    return teichmuller_gen(p, N) ** k


def all_roots_of_unity(p: int, N: int):
    return [root_of_unity(k, p, N) for k in range(p * p - 1)]


def w1_candidates(p: int, N: int) -> list[WittElem]:
    """All Teichmuller lifts t with t^{p+1} = -1, ordered by discrete log."""
    half = (p - 1) // 2
    out = [root_of_unity(half + (p - 1) * l, p, N) for l in range(p + 1)]
    for t in out:
        assert t ** (p + 1) == -1 % p ** N
    return out


def minus_one_roots(p: int, N: int) -> list[WittElem]:
    """All t in mu_{2(p-1)} with t^{p-1} = -1; the first one is the fixed v1."""
    half = (p + 1) // 2
    out = [root_of_unity(half + (p + 1) * l, p, N) for l in range(p - 1)]
    for t in out:
        assert t ** (p - 1) == -1 % p ** N
    return out


def v1_default(p: int, N: int) -> WittElem:
    return minus_one_roots(p, N)[0]


def xi_values(p: int) -> list[Fq2Elem]:
    """The p-1 residues xi with xi^{p-1} = -1, indexing the fibre components."""
    return [r.residue() for r in minus_one_roots(p, 2)]


def teich_log(t: WittElem) -> int:
    """Discrete log of a root of unity with respect to the fixed generator."""
    code = t.residue().code
    return fq2(t.p).log[code]


# ---------------------------------------------------------------------------
# characters


@dataclass(frozen=True)
class CharSpec:
    p: int
    m: int
    i: int = field(init=False)
    j: int = field(init=False)
    bracket_minus_mp: int = field(init=False)

    def __post_init__(self):
        i, j, br = decompose_m(self.m, self.p)
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "bracket_minus_mp", br)

    @classmethod
    def from_ij(cls, p, i, j):
        return cls(p, i + (p + 1) * j)

    def frobenius_twist(self) -> CharSpec:
        """The character chi^p."""
        return CharSpec(self.p, bracket(self.p * self.m, self.p))


def bracket(n: int, p: int) -> int:
    return n % (p * p - 1)


def decompose_m(m: int, p: int) -> tuple[int, int, int]:
    if not 1 <= m <= p * p - 2:
        raise ValueError(f"m must lie in 1..{p * p - 2}")
    if m % (p + 1) == 0:
        raise CharacterError(f"character is Frobenius-fixed: (p+1) divides m={m}")
    j, i = divmod(m, p + 1)
    # i in 1..p since (p+1) does not divide m
    return i, j, bracket(-m * p, p)


def valid_characters(p: int) -> list[CharSpec]:
    return [CharSpec(p, m) for m in range(1, p * p - 1) if m % (p + 1)]


# ---------------------------------------------------------------------------
# O_F = Z_{p^2}[varpi]/(varpi^{p^2-1} + p), truncated mod p^N


@dataclass(frozen=True)
class EisensteinElem:
    """sum_k coef[k] varpi^k, k < p^2-1, coefficients in Z_{p^2}/p^N.

    coef is a tuple of (c0, c1) integer pairs.  Precision in varpi is
    N*(p^2-1), since p^N = 0.
    """
    p: int
    N: int
    coef: tuple

    @property
    def e(self):
        return self.p * self.p - 1

    @classmethod
    def zero(cls, p, N):
        return cls(p, N, tuple((0, 0) for _ in range(p * p - 1)))

    @classmethod
    def scalar(cls, w: WittElem):
        c = [(0, 0)] * (w.p * w.p - 1)
        c[0] = (w.c0, w.c1)
        return cls(w.p, w.N, tuple(c))

    @classmethod
    def varpi_power(cls, k: int, p: int, N: int):
        """varpi^k for k >= 0, using varpi^{p^2-1} = -p."""
        e = p * p - 1
        q, r = divmod(k, e)
        c = [(0, 0)] * e
        c[r] = ((-p) ** q % p ** N, 0)
        return cls(p, N, tuple(c))

    def coefficient(self, k) -> WittElem:
        c0, c1 = self.coef[k]
        return WittElem(self.p, self.N, c0, c1)

    def _w(self):
        return [self.coefficient(k) for k in range(self.e)]

    @classmethod
    def _from_w(cls, ws, p, N):
        return cls(p, N, tuple((w.c0, w.c1) for w in ws))

    def _lift(self, o):
        if isinstance(o, EisensteinElem):
            return o
        if isinstance(o, WittElem):
            return EisensteinElem.scalar(o)
        return EisensteinElem.scalar(witt(self.p, self.N, int(o)))

    def __add__(self, o):
        o = self._lift(o)
        return EisensteinElem._from_w([a + b for a, b in zip(self._w(), o._w())], self.p, self.N)

    __radd__ = __add__

    def __neg__(self):
        return EisensteinElem._from_w([-a for a in self._w()], self.p, self.N)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        e, p, M = self.e, self.p, self.p ** self.N
        a, b = smallest_modulus(p)
        x = np.array(self.coef, dtype=np.int64)
        y = np.array(o.coef, dtype=np.int64)
        p00 = np.convolve(x[:, 0], y[:, 0]) % M
        p11 = np.convolve(x[:, 1], y[:, 1]) % M
        p01 = (np.convolve(x[:, 0], y[:, 1]) + np.convolve(x[:, 1], y[:, 0])) % M
        c0 = (p00 - b * p11) % M
        c1 = (p01 - a * p11) % M
        # fold varpi^{e+k} = -p varpi^k
        r0 = np.zeros(e, dtype=np.int64)
        r1 = np.zeros(e, dtype=np.int64)
        r0[:] = c0[:e]
        r1[:] = c1[:e]
        r0[:e - 1] -= p * c0[e:]
        r1[:e - 1] -= p * c1[e:]
        return EisensteinElem(p, self.N, tuple(zip((r0 % M).tolist(), (r1 % M).tolist())))

    __rmul__ = __mul__

    def __pow__(self, n):
        result = self._lift(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, o):
        if not isinstance(o, EisensteinElem):
            o = self._lift(o)
        return (self.p, self.N, self.coef) == (o.p, o.N, o.coef)

    def __hash__(self):
        return hash((self.p, self.N, self.coef))

    def is_zero(self):
        return all(c == (0, 0) for c in self.coef)

    def valuation(self) -> int | float:
        """Valuation in units of v(varpi) = 1/(p^2-1); inf if zero at precision."""
        best = float("inf")
        for k, w in enumerate(self._w()):
            if not w.is_zero():
                best = min(best, self.e * w.valuation() + k)
        return best

    def normalized_valuation(self):
        v = self.valuation()
        return v if v == float("inf") else Fraction(v, self.e)

    def residue(self) -> Fq2Elem:
        return self.coefficient(0).residue()

    def is_unit(self):
        return self.coefficient(0).is_unit()

    def inverse(self) -> EisensteinElem:
        if not self.is_unit():
            raise ZeroDivisionError("not a unit in O_F")
        x = EisensteinElem.scalar(self.coefficient(0).inverse())
        steps = 1
        while (1 << steps) < self.N * self.e + 2:
            steps += 1
        for _ in range(steps + 1):
            x = x * (2 - self * x)
        return x

    def sigma(self) -> EisensteinElem:
        """The lift of Frobenius fixing varpi."""
        return EisensteinElem._from_w([w.sigma() for w in self._w()], self.p, self.N)

    def galois(self, g_index: int) -> EisensteinElem:
        return galois_act_F(g_index, self)

    def to_json(self):
        return {"type": "eisenstein", "p": self.p, "N": self.N,
                "coefficients": [self.coefficient(k).digits() for k in range(self.e)]}


def galois_act_F(g_index: int, z: EisensteinElem) -> EisensteinElem:
    """F_0-linear automorphism varpi -> zeta*varpi, zeta = root_of_unity(g_index)."""
    zeta = root_of_unity(g_index, z.p, z.N)
    out, zk = [], witt(z.p, z.N, 1)
    for k in range(z.e):
        out.append(z.coefficient(k) * zk)
        zk = zk * zeta
    return EisensteinElem._from_w(out, z.p, z.N)


def omega2(g_index: int, p: int, N: int) -> WittElem:
    """g(varpi)/varpi for the Galois element with the given index."""
    return root_of_unity(g_index, p, N)


# ---------------------------------------------------------------------------
# cyclotomic integers Z[x, y]/(Phi_p(x), Phi_{p^2-1}(y))


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _poly_exact_div(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _poly_exact_div(a, b):
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = a[k + len(b) - 1] // b[-1]
        out[k] = c
        for l, bl in enumerate(b):
            a[k + l] -= c * bl
    assert not any(a), "inexact division"
    return out


def _reduce_axis(arr: np.ndarray, phi: tuple, axis: int) -> np.ndarray:
    arr = np.moveaxis(arr.copy(), axis, 0)
    d = len(phi) - 1
    phi = np.array(phi, dtype=object)
    for k in range(arr.shape[0] - 1, d - 1, -1):
        c = arr[k].copy()
        if np.any(c != 0):
            for l in range(d + 1):
                arr[k - d + l] = arr[k - d + l] - c * phi[l]
    return np.moveaxis(arr[:d], 0, axis)


class CycloRing:
    def __init__(self, p: int):
        self.p = p
        self.n = p * p - 1
        self.phi_x = cyclotomic_poly(p)
        self.phi_y = cyclotomic_poly(self.n)
        self.dx = len(self.phi_x) - 1
        self.dy = len(self.phi_y) - 1

    def from_exponents(self, terms: dict[tuple[int, int], int]) -> CycloElem:
        arr = np.zeros((self.p, self.n), dtype=object)
        for (a, b), c in terms.items():
            arr[a % self.p, b % self.n] += c
        return CycloElem(self, self._reduce(arr))

    def _reduce(self, arr):
        arr = _reduce_axis(arr, self.phi_x, 0) if arr.shape[0] > self.dx else arr
        arr = _reduce_axis(arr, self.phi_y, 1) if arr.shape[1] > self.dy else arr
        out = np.zeros((self.dx, self.dy), dtype=object)
        out[:arr.shape[0], :arr.shape[1]] = arr
        return out

    def zero(self):
        return CycloElem(self, np.zeros((self.dx, self.dy), dtype=object))

    def one(self):
        return self.from_exponents({(0, 0): 1})

    def x(self, k=1):
        return self.from_exponents({(k, 0): 1})

    def y(self, k=1):
        return self.from_exponents({(0, k): 1})


@lru_cache(maxsize=None)
def cyclo_ring(p: int) -> CycloRing:
    return CycloRing(p)


class CycloElem:
    __slots__ = ("ring", "c")

    def __init__(self, ring: CycloRing, c: np.ndarray):
        self.ring = ring
        self.c = c

    def __add__(self, o):
        o = self._lift(o)
        return CycloElem(self.ring, self.c + o.c)

    __radd__ = __add__

    def __sub__(self, o):
        o = self._lift(o)
        return CycloElem(self.ring, self.c - o.c)

    def __neg__(self):
        return CycloElem(self.ring, -self.c)

    def _lift(self, o):
        if isinstance(o, CycloElem):
            if o.ring.p != self.ring.p:
                raise ValueError("operands must share p")
            return o
        return self.ring.one() * int(o) if o != 1 else self.ring.one()

    def __mul__(self, o):
        if isinstance(o, int):
            return CycloElem(self.ring, self.c * o)
        return cyclo_mul(self, o)

    __rmul__ = __mul__

    def __eq__(self, o):
        o = self._lift(o)
        return bool(np.all(self.c == o.c))

    def __hash__(self):
        return hash(tuple(self.c.flatten().tolist()))

    def __pow__(self, n):
        r = self.ring.one()
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def terms(self):
        out = {}
        for a in range(self.c.shape[0]):
            for b in range(self.c.shape[1]):
                if self.c[a, b]:
                    out[(a, b)] = int(self.c[a, b])
        return out

    def is_zero(self):
        return not np.any(self.c != 0)

    def to_json(self):
        return {"type": "cyclo", "p": self.ring.p,
                "coefficients": [[int(v) for v in row] for row in self.c]}


def cyclo_mul(u: CycloElem, v: CycloElem) -> CycloElem:
    if u.ring.p != v.ring.p:
        raise ValueError("operands must share p")
    R = u.ring
    out = np.zeros((2 * R.dx - 1, 2 * R.dy - 1), dtype=object)
    for (a, b), c in u.terms().items():
        out[a:a + R.dx, b:b + R.dy] += c * v.c
    return CycloElem(R, R._reduce(out))


def cyclo_conj(u: CycloElem) -> CycloElem:
    return u.ring.from_exponents({(-a, -b): c for (a, b), c in u.terms().items()})


def cyclo_in_y_subring(u: CycloElem) -> bool:
    return not np.any(u.c[1:, :] != 0)


def cyclo_root_of_unity_y(u: CycloElem) -> int | None:
    """Return k if u = y^k exactly, else None."""
    R = u.ring
    for k in range(R.n):
        if u == R.y(k):
            return k
    return None
