"""The overlap ring B = A0[1/x] of an Artin-Schreier chart, truncated mod p^N.

Elements of Z_{p^2}/p^N[x, 1/x, y]/(y^{p+1} - c(x^p - x)) are stored in the
basis x^e y^b, 0 <= b <= p, as an int64 array of shape (2, p+1, L): the first
axis holds the coordinates on {1, s}, the last axis runs over e = emin .. emin+L-1.
Products use FFT convolution split into small limbs; every rounded value is
checked to sit within 0.1 of an integer, so the arithmetic stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import smallest_modulus


class ConvolutionError(ArithmeticError):
    pass


def _direct_conv2(A: np.ndarray, B: np.ndarray, M: int) -> np.ndarray:
    ya, la = A.shape
    yb, lb = B.shape
    out = np.zeros((ya + yb - 1, la + lb - 1), dtype=np.int64)
    for i in range(ya):
        if not A[i].any():
            continue
        for j in range(yb):
            if B[j].any():
                out[i + j] = (out[i + j] + np.convolve(A[i], B[j])) % M
    return out


def _limbs(A: np.ndarray, bits: int, count: int):
    mask = (1 << bits) - 1
    return [(A >> (bits * k)) & mask for k in range(count)]


def exact_conv2(A: np.ndarray, B: np.ndarray, M: int) -> np.ndarray:
    """2-d convolution of nonnegative integer arrays, reduced mod M."""
    ya, la = A.shape
    yb, lb = B.shape
    if la == 0 or lb == 0:
        return np.zeros((ya + yb - 1, max(la + lb - 1, 0)), dtype=np.int64)
    terms = min(ya, yb) * min(la, lb)
    if la * lb < 4096 and (M - 1) ** 2 * terms < 2 ** 62:
        return _direct_conv2(A, B, M)
    # limb width chosen so each limb product sum stays below 2^36
    total_bits = max(1, (M - 1).bit_length())
    bits = max(1, min(total_bits, (36 - terms.bit_length()) // 2))
    count = -(-total_bits // bits)
    shape = (ya + yb - 1, la + lb - 1)
    fa = [np.fft.rfft2(x.astype(np.float64), shape) for x in _limbs(A, bits, count)]
    fb = [np.fft.rfft2(x.astype(np.float64), shape) for x in _limbs(B, bits, count)]
    out = np.zeros(shape, dtype=np.int64)
    for s in range(2 * count - 1):
        acc = 0
        for k in range(count):
            l = s - k
            if 0 <= l < count:
                acc = acc + fa[k] * fb[l]
        real = np.fft.irfft2(acc, shape)
        rounded = np.rint(real)
        if real.size and np.max(np.abs(real - rounded)) > 0.1:
            raise ConvolutionError("floating point convolution lost exactness")
        out = (out + (rounded.astype(np.int64) % M) * pow(2, bits * s, M)) % M
    return out


@dataclass(frozen=True)
class ChartRing:
    """Parameters of the overlap ring: prime p, precision N and curve constant c."""
    p: int
    N: int
    c: tuple[int, int]

    @property
    def M(self) -> int:
        return self.p ** self.N

    @property
    def ab(self) -> tuple[int, int]:
        return smallest_modulus(self.p)

    def wmul(self, x: tuple[int, int], y: tuple[int, int]) -> tuple[int, int]:
        a, b = self.ab
        t = x[1] * y[1]
        return ((x[0] * y[0] - b * t) % self.M, (x[0] * y[1] + x[1] * y[0] - a * t) % self.M)

    def wsigma(self, x):
        a, _ = self.ab
        return ((x[0] - a * x[1]) % self.M, (-x[1]) % self.M)

    def winv(self, x):
        # x^{-1} = sigma(x) / norm(x)
        a, b = self.ab
        sx = self.wsigma(x)
        n = self.wmul(x, sx)
        assert n[1] == 0
        ninv = pow(n[0], -1, self.M)
        return (sx[0] * ninv % self.M, sx[1] * ninv % self.M)

    @property
    def cinv(self):
        return self.winv(self.c)

    @property
    def csigma(self):
        return self.wsigma(self.c)


class BElem:
    __slots__ = ("R", "data", "emin")

    def __init__(self, R: ChartRing, data: np.ndarray, emin: int):
        self.R = R
        self.data = data % R.M
        self.emin = emin

    # -- construction ---------------------------------------------------------

    @classmethod
    def zero(cls, R: ChartRing) -> BElem:
        return cls(R, np.zeros((2, R.p + 1, 0), dtype=np.int64), 0)

    @classmethod
    def monomial(cls, R: ChartRing, e: int, b: int, coef=(1, 0)) -> BElem:
        out = cls.from_terms(R, {(e, b): coef})
        return out

    @classmethod
    def from_terms(cls, R: ChartRing, terms: dict) -> BElem:
        """terms maps (e, b) to an int or a pair; y-degrees above p are reduced."""
        if not terms:
            return cls.zero(R)
        es = [e for e, _ in terms]
        bs = [b for _, b in terms]
        emin, emax, bmax = min(es), max(es), max(bs)
        raw = np.zeros((2, bmax + 1, emax - emin + 1), dtype=np.int64)
        for (e, b), c in terms.items():
            if isinstance(c, int):
                c = (c, 0)
            raw[0, b, e - emin] += c[0]
            raw[1, b, e - emin] += c[1]
        return cls._normalize(R, raw, emin)

    @classmethod
    def _normalize(cls, R: ChartRing, raw: np.ndarray, emin: int) -> BElem:
        """Reduce y^{p+1} = c (x^p - x) until every y-degree is at most p."""
        p, M = R.p, R.M
        raw = raw % M
        ydeg = raw.shape[1] - 1
        if ydeg <= p:
            pad = np.zeros((2, p + 1, raw.shape[2]), dtype=np.int64)
            pad[:, :ydeg + 1] = raw
            return cls(R, pad, emin)._trim()
        steps = (ydeg - p + p) // (p + 1)   # number of reductions along the longest chain
        L = raw.shape[2]
        ext = np.zeros((2, ydeg + 1, L + p * steps + 1), dtype=np.int64)
        # old x-index k sits at k; reductions only raise x-degrees, so emin stays
        ext[:, :, :L] = raw
        c0, c1 = R.c
        a, b = R.ab
        for k in range(ydeg, p, -1):
            r0, r1 = ext[0, k].copy(), ext[1, k].copy()
            if not (r0.any() or r1.any()):
                continue
            # c * row
            t = c1 * r1
            m0 = (c0 * r0 - b * t) % M
            m1 = (c0 * r1 + c1 * r0 - a * t) % M
            tgt = k - p - 1
            # (x^p - x) * row
            ext[0, tgt, p:] += m0[:ext.shape[2] - p]
            ext[1, tgt, p:] += m1[:ext.shape[2] - p]
            ext[0, tgt, 1:] -= m0[:ext.shape[2] - 1]
            ext[1, tgt, 1:] -= m1[:ext.shape[2] - 1]
            ext[:, tgt] %= M
            ext[:, k] = 0
        return cls(R, ext[:, :p + 1].copy(), emin)._trim()

    def _trim(self) -> BElem:
        nz = np.nonzero(self.data.any(axis=(0, 1)))[0]
        if nz.size == 0:
            self.data = np.zeros((2, self.R.p + 1, 0), dtype=np.int64)
            self.emin = 0
            return self
        lo, hi = nz[0], nz[-1]
        self.data = self.data[:, :, lo:hi + 1].copy()
        self.emin += int(lo)
        return self

    # -- inspection -----------------------------------------------------------

    @property
    def emax(self) -> int:
        return self.emin + self.data.shape[2] - 1

    def is_zero(self) -> bool:
        return not self.data.any()

    def terms(self) -> dict:
        out = {}
        c0, c1 = self.data
        idx = np.argwhere((c0 != 0) | (c1 != 0))
        for b, k in idx:
            out[(self.emin + int(k), int(b))] = (int(c0[b, k]), int(c1[b, k]))
        return out

    def coeff(self, e: int, b: int) -> tuple[int, int]:
        k = e - self.emin
        if 0 <= k < self.data.shape[2]:
            return int(self.data[0, b, k]), int(self.data[1, b, k])
        return (0, 0)

    def __eq__(self, o) -> bool:
        return (self - o).is_zero()

    def __hash__(self):
        return hash(tuple(sorted(self.terms().items())))

    def select(self, pred) -> BElem:
        """Keep only monomials x^e y^b with pred(e, b)."""
        out = self.data.copy()
        for b in range(self.R.p + 1):
            for k in range(out.shape[2]):
                if not pred(self.emin + k, b):
                    out[:, b, k] = 0
        return BElem(self.R, out, self.emin)._trim()

    # -- arithmetic -----------------------------------------------------------

    def _aligned(self, o: BElem):
        if self.is_zero():
            return np.zeros((2, self.R.p + 1, o.data.shape[2]), dtype=np.int64), o.data, o.emin
        if o.is_zero():
            return self.data, np.zeros_like(self.data), self.emin
        lo = min(self.emin, o.emin)
        hi = max(self.emax, o.emax)
        A = np.zeros((2, self.R.p + 1, hi - lo + 1), dtype=np.int64)
        B = np.zeros_like(A)
        A[:, :, self.emin - lo:self.emin - lo + self.data.shape[2]] = self.data
        B[:, :, o.emin - lo:o.emin - lo + o.data.shape[2]] = o.data
        return A, B, lo

    def __add__(self, o: BElem) -> BElem:
        A, B, lo = self._aligned(o)
        return BElem(self.R, A + B, lo)._trim()

    def __sub__(self, o: BElem) -> BElem:
        A, B, lo = self._aligned(o)
        return BElem(self.R, A - B, lo)._trim()

    def __neg__(self) -> BElem:
        return BElem(self.R, -self.data, self.emin)

    def scale(self, w) -> BElem:
        if isinstance(w, int):
            return BElem(self.R, self.data * (w % self.R.M), self.emin)._trim()
        a, b = self.R.ab
        M = self.R.M
        d0, d1 = self.data
        t = (w[1] * d1) % M
        n0 = w[0] * d0 - b * t
        n1 = w[0] * d1 + w[1] * d0 - a * t
        return BElem(self.R, np.stack([n0, n1]), self.emin)._trim()

    def shift(self, k: int) -> BElem:
        """Multiply by x^k."""
        return BElem(self.R, self.data.copy(), self.emin + k)

    def sigma(self) -> BElem:
        a, _ = self.R.ab
        d0, d1 = self.data
        return BElem(self.R, np.stack([d0 - a * d1, -d1]), self.emin)

    def __mul__(self, o: BElem) -> BElem:
        R = self.R
        if self.is_zero() or o.is_zero():
            return BElem.zero(R)
        M = R.M
        a, b = R.ab
        A0, A1 = self.data
        B0, B1 = o.data
        P00 = exact_conv2(A0, B0, M)
        P11 = exact_conv2(A1, B1, M) if (A1.any() and B1.any()) else np.zeros_like(P00)
        if A1.any() or B1.any():
            S = exact_conv2((A0 + A1) % M, (B0 + B1) % M, M)
            P01 = S - P00 - P11
        else:
            P01 = np.zeros_like(P00)
        raw = np.stack([P00 - b * P11, P01 - a * P11])
        return BElem._normalize(R, raw, self.emin + o.emin)

    def __pow__(self, n: int) -> BElem:
        result = BElem.monomial(self.R, 0, 0)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def divide_by_p(self) -> BElem:
        if np.any(self.data % self.R.p):
            raise ArithmeticError("element is not divisible by p")
        return BElem(self.R, self.data // self.R.p, self.emin)

    def valuation(self) -> int:
        """Minimal p-adic valuation of the coefficients (N if zero)."""
        if self.is_zero():
            return self.R.N
        d = self.data
        v = 0
        while v < self.R.N and not np.any(d % self.R.p ** (v + 1)):
            v += 1
        return v

    def __repr__(self):
        return f"BElem({self.terms()})"


def univariate(R: ChartRing, coeffs: np.ndarray, emin: int = 0) -> BElem:
    """Integer polynomial sum coeffs[k] x^{emin+k} as an element of B."""
    data = np.zeros((2, R.p + 1, len(coeffs)), dtype=np.int64)
    data[0, 0] = np.asarray(coeffs, dtype=np.int64) % R.M
    return BElem(R, data, emin)._trim()


def poly_mul_mod(a: np.ndarray, b: np.ndarray, M: int) -> np.ndarray:
    return exact_conv2(np.asarray(a, dtype=np.int64)[None, :] % M,
                       np.asarray(b, dtype=np.int64)[None, :] % M, M)[0]


def poly_pow_mod(a: np.ndarray, n: int, M: int) -> np.ndarray:
    result = np.array([1], dtype=np.int64)
    base = np.asarray(a, dtype=np.int64) % M
    while n:
        if n & 1:
            result = poly_mul_mod(result, base, M)
        n >>= 1
        if n:
            base = poly_mul_mod(base, base, M)
    return result


@lru_cache(maxsize=None)
def artin_schreier_lift(p: int, N: int) -> tuple[int, ...]:
    """Coefficients of the polynomial Z(t) with Z^p - Z = (t^p - t)^p, Z = t^p mod p.

    Computed mod p^N by iterating Z <- Z^p - (t^p - t)^p from Z = t^p; each step
    gains one p-adic digit.
    """
    M = p ** N
    base = np.zeros(p + 1, dtype=np.int64)
    base[p], base[1] = 1, -1
    target = poly_pow_mod(base, p, M)
    Z = np.zeros(p + 1, dtype=np.int64)
    Z[p] = 1
    for _ in range(N - 1):
        Zp = poly_pow_mod(Z, p, M)
        n = max(len(Zp), len(target))
        new = np.zeros(n, dtype=np.int64)
        new[:len(Zp)] += Zp
        new[:len(target)] -= target
        Z = np.trim_zeros(new % M, "b")
    return tuple(int(x) for x in Z)
