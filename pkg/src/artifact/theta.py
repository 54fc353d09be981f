"""Mod p boundary maps as Hecke polynomials, and their truncated kernels.

An operator c0 + c1 T + c2 T^2 acts on functions on the tree with values in
sigma_r(j).  Truncated to the ball of radius R about the central vertex, it is
an F_{p^2}-linear map onto functions on the ball of radius R - deg, which is
exactly the region where the output only depends on the stored input.

Two independent routes compute its rank and kernel:

* sparse: columns come from the cached Hecke stencil (rep.hecke_T) and are
  reduced with linalg.sparse_echelon over F_{p^2} codes;
* dense: columns come from the term-by-term definition of T
  (rep.hecke_T_by_definition) on compactly supported inputs, and the
  realified F_p matrix is reduced with linalg.rank_mod_p / nullspace_mod_p.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .arith import CharSpec, WittElem, fq2
from .linalg import (SparseMatrix, codes_to_pairs, nullspace_mod_p, pairs_to_codes, rank_mod_p,
                     realify, sparse_apply, sparse_echelon, sparse_kernel)
from .rep import IndElem, ball_elem, hecke_T, hecke_T_by_definition, monomial_pairs, restrict
from .tree import ball, central_vertex


# ---------------------------------------------------------------------------
# scalars


def residue_code(x, p: int) -> int:
    """Reduction mod p of an O_E element given as a WittElem, an F_{p^2} code or an int."""
    if isinstance(x, WittElem):
        return x.residue().code
    if hasattr(x, "code"):
        return int(x.code)
    return int(x) % (p * p)


def tau_w1(p: int, w1: WittElem | None = None) -> int:
    """tau(w1) as an F_{p^2} code; defaults to the calibrated root."""
    if w1 is None:
        from .curve import calibrate_w1
        w1 = calibrate_w1(p).w1
    return w1.residue().code


def _sign(j: int, p: int) -> int:
    return 1 if (j + 1) % 2 == 0 else fq2(p).neg(1)


def c_chi_b(char: CharSpec, b, w1: WittElem | None = None) -> int:
    """c(chi, b) = (-1)^{j+1} tau(w1^{-i}) b in O_E/p, as a code."""
    F = fq2(char.p)
    t = tau_w1(char.p, w1)
    return F.mul(_sign(char.j, char.p), F.mul(F.pow(t, -char.i), residue_code(b, char.p)))


# ---------------------------------------------------------------------------
# Hecke polynomials


@dataclass(frozen=True)
class HeckePoly:
    """c0 Id + c1 T + c2 T^2 acting on sigma_r(j); coefficients are F_{p^2} codes."""
    p: int
    c0: int
    c1: int
    c2: int
    r: int
    j: int
    label: str = ""

    def __post_init__(self):
        q = self.p * self.p
        for c in (self.c0, self.c1, self.c2):
            if not 0 <= c < q:
                raise ValueError(f"coefficient {c} is not an F_{q} code")
        if not 0 <= self.r <= self.p - 1:
            raise ValueError(f"Sym^{self.r} is outside 0..p-1")

    @property
    def coefficients(self) -> tuple[int, int, int]:
        return (self.c0, self.c1, self.c2)

    @property
    def degree(self) -> int:
        for d in (2, 1, 0):
            if self.coefficients[d]:
                return d
        return 0

    def pairs(self):
        F = fq2(self.p)
        return [list(F.coords(c)) for c in self.coefficients]

    def to_json(self) -> dict:
        return {"p": self.p, "r": self.r, "j": self.j, "label": self.label,
                "coefficients": self.pairs(), "degree": self.degree}

    def describe(self) -> str:
        F = fq2(self.p)
        parts = []
        for d, c in enumerate(self.coefficients):
            if c:
                c0, c1 = F.coords(c)
                coef = f"{c0}" if not c1 else f"({c0}+{c1}s)"
                parts.append(coef + ("" if d == 0 else " T" if d == 1 else " T^2"))
        return " + ".join(parts) or "0"


def theta_ops(char: CharSpec, b, w1: WittElem | None = None) -> tuple[HeckePoly, ...]:
    """The operators whose kernels give M(chi, [1, b]) / p.

    For 2 <= i <= p-1 a pair (on sigma_{i-2}(j+1), on sigma_{p-1-i}(i+j));
    for i = 1 or i = p one quadratic operator on sigma_{p-2}(j+1).
    """
    p, i, j = char.p, char.i, char.j
    if not 1 <= i <= p:
        raise ValueError(f"i = {i} outside 1..p")
    F = fq2(p)
    t = tau_w1(p, w1)
    bb = residue_code(b, p)
    sg = _sign(j, p)
    jj = (j + 1) % (p - 1)
    if i == 1:
        return (HeckePoly(p, 1, F.mul(sg, F.mul(bb, F.pow(t, -1))), 1, p - 2, jj, "theta"),)
    if i == p:
        return (HeckePoly(p, F.neg(bb), F.mul(sg, F.pow(t, p)), F.neg(bb), p - 2, jj, "theta"),)
    first = HeckePoly(p, F.neg(bb), F.mul(sg, F.pow(t, i)), 0, i - 2, jj, "theta_1")
    second = HeckePoly(p, 1, F.neg(c_chi_b(char, b, w1)), 0, p - 1 - i, (i + j) % (p - 1), "theta_2")
    return (first, second)


def _check_kind(op: HeckePoly, X: IndElem):
    if (X.p, X.r) != (op.p, op.r) or (X.j - op.j) % (op.p - 1):
        raise ValueError("operator and section live on different sigma_r(j)")
    if X.kind == "ball" and (X.radius is None or X.radius < op.degree):
        raise ValueError(f"radius {X.radius} is smaller than the operator degree {op.degree}")


def apply_theta(op: HeckePoly, X: IndElem) -> IndElem:
    """op(X); for ball input the result is exact on the ball of radius R - deg."""
    _check_kind(op, X)
    deg = op.degree
    out_radius = None if X.kind != "ball" else X.radius - deg
    out = X.zero_like(radius=out_radius)
    power = X
    for d in range(deg + 1):
        if d:
            power = hecke_T(power)
        c = op.coefficients[d]
        if c:
            term = power.scale(c)
            if out_radius is not None:
                term = restrict(term, out_radius)
            out = out + term
    out.radius = out_radius
    return out.pruned()


def _apply_by_definition(op: HeckePoly, X: IndElem, out_radius: int) -> IndElem:
    """Same operator via the coset-sum definition of T, for compact input."""
    out = X.zero_like(kind="compact", radius=None)
    power = X.copy(kind="compact", radius=None)
    for d in range(op.degree + 1):
        if d:
            power = hecke_T_by_definition(power)
        c = op.coefficients[d]
        if c:
            out = out + power.scale(c)
    return restrict(out, out_radius)


# ---------------------------------------------------------------------------
# truncated linear algebra


@dataclass
class TruncatedKernelReport:
    p: int
    r: int
    j: int
    label: str
    coefficients: list
    radius: int
    degree: int
    domain_dim: int
    codomain_dim: int
    rank: int
    kernel_dim: int
    surjective: bool
    oracle_rank: int
    oracle_kernel_dim: int
    oracle_agrees: bool
    basis_sample: list = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return self.rank + self.kernel_dim == self.domain_dim

    def to_json(self) -> dict:
        return {"p": self.p, "r": self.r, "j": self.j, "label": self.label,
                "coefficients": self.coefficients, "radius": self.radius, "degree": self.degree,
                "domain_dim": self.domain_dim, "codomain_dim": self.codomain_dim,
                "rank": self.rank, "kernel_dim": self.kernel_dim, "surjective": self.surjective,
                "oracle_rank": self.oracle_rank, "oracle_kernel_dim": self.oracle_kernel_dim,
                "oracle_agrees": self.oracle_agrees, "rank_nullity": self.consistent,
                "basis_sample": self.basis_sample}


@dataclass
class _Layout:
    p: int
    r: int
    radius: int
    out_radius: int

    def __post_init__(self):
        c = central_vertex(self.p)
        self.domain = ball(c, self.radius)
        self.codomain = ball(c, self.out_radius)
        self.dom_index = {s: n for n, s in enumerate(self.domain)}
        self.cod_index = {s: n for n, s in enumerate(self.codomain)}
        self.width = self.r + 1

    @property
    def ncols(self):
        return len(self.domain) * self.width

    @property
    def nrows(self):
        return len(self.codomain) * self.width

    def unit(self, col: int, j: int, compact=False) -> IndElem:
        s, k = self.domain[col // self.width], col % self.width
        vals = {s: monomial_pairs(self.p, self.r, k)}
        if compact:
            return IndElem(self.p, self.r, j, values=vals)
        return ball_elem(self.p, self.r, j, self.radius, vals)

    def read(self, Y: IndElem) -> dict[int, int]:
        """Coordinates of Y on the codomain, {row: code}."""
        out = {}
        for s, v in Y.values.items():
            n = self.cod_index.get(s)
            if n is None:
                continue
            codes = pairs_to_codes(v % self.p, self.p)
            for k, c in enumerate(codes):
                if c:
                    out[n * self.width + k] = int(c)
        return out

    def to_elem(self, vec: dict[int, int], j: int) -> IndElem:
        vals = {}
        for col, code in vec.items():
            s, k = self.domain[col // self.width], col % self.width
            arr = vals.setdefault(s, np.zeros((self.width, 2), dtype=np.int64))
            arr[k] = fq2(self.p).coords(code)
        return ball_elem(self.p, self.r, j, self.radius, vals)


def _check_radius(op: HeckePoly, R: int):
    if R < op.degree + 1:
        raise ValueError(f"radius {R} must be at least degree + 1 = {op.degree + 1}")


def truncated_matrix(op: HeckePoly, R: int) -> tuple[SparseMatrix, _Layout]:
    """Sparse matrix of op from ball R to ball R - deg (stencil route)."""
    lay = _Layout(op.p, op.r, R, R - op.degree)
    cols = [lay.read(apply_theta(op, lay.unit(c, op.j))) for c in range(lay.ncols)]
    rows: list[dict[int, int]] = [{} for _ in range(lay.nrows)]
    for c, col in enumerate(cols):
        for r, v in col.items():
            rows[r][c] = v
    S = SparseMatrix(op.p, lay.ncols)
    for row in rows:
        S.add_row(row)
    return S, lay


def dense_matrix_by_definition(op: HeckePoly, R: int) -> np.ndarray:
    """Pairs array (rows, cols, 2) assembled from the coset-sum definition of T."""
    lay = _Layout(op.p, op.r, R, R - op.degree)
    M = np.zeros((lay.nrows, lay.ncols), dtype=np.int64)
    for c in range(lay.ncols):
        Y = _apply_by_definition(op, lay.unit(c, op.j, compact=True), lay.out_radius)
        for r, v in lay.read(Y).items():
            M[r, c] = v
    return codes_to_pairs(M, op.p)


def dense_oracle(op: HeckePoly, R: int) -> tuple[int, int, np.ndarray, np.ndarray]:
    """(rank, nullity) over F_{p^2}, the realified matrix and its F_p kernel basis."""
    A = realify(dense_matrix_by_definition(op, R), op.p)
    rk = rank_mod_p(A, op.p)
    ker = nullspace_mod_p(A, op.p)
    if rk % 2 or ker.shape[0] % 2:
        raise AssertionError("realified F_{p^2}-linear map has odd rank")
    return rk // 2, ker.shape[0] // 2, A, ker


def _realify_vec(vec: dict[int, int], n: int, p: int) -> np.ndarray:
    out = np.zeros(2 * n, dtype=np.int64)
    for c, code in vec.items():
        out[2 * c], out[2 * c + 1] = code % p, code // p
    return out


def kernel_truncated(op: HeckePoly, R: int, sample: int = 2, oracle: bool = True
                     ) -> tuple[TruncatedKernelReport, list[dict[int, int]], _Layout]:
    """Exact kernel of op: functions on ball R -> functions on ball R - deg."""
    _check_radius(op, R)
    S, lay = truncated_matrix(op, R)
    _, rank = sparse_echelon(S)
    ker = sparse_kernel(S)
    if len(ker) + rank != lay.ncols:
        raise AssertionError("rank-nullity failed in sparse elimination")
    for v in ker:
        if any(sparse_apply(S, v)):
            raise AssertionError("sparse kernel vector is not annihilated")
    if oracle:
        o_rank, o_null, A, _ = dense_oracle(op, R)
        agrees = o_rank == rank and o_null == len(ker)
        # sparse kernel vectors must lie in the dense kernel as well
        for v in ker:
            if np.any(A @ _realify_vec(v, lay.ncols, op.p) % op.p):
                agrees = False
                break
    else:
        o_rank, o_null, agrees = -1, -1, False
    report = TruncatedKernelReport(
        op.p, op.r, op.j, op.label, op.pairs(), R, op.degree, lay.ncols, lay.nrows, rank,
        len(ker), rank == lay.nrows, o_rank, o_null, agrees,
        [json.loads(lay.to_elem(v, op.j).to_json()) for v in ker[:sample]])
    return report, ker, lay


def surjectivity_truncated(op: HeckePoly, R: int) -> tuple[bool, dict]:
    rep, _, _ = kernel_truncated(op, R, sample=0)
    return rep.surjective, {"rank": rep.rank, "codomain_dim": rep.codomain_dim,
                            "oracle_rank": rep.oracle_rank, "oracle_agrees": rep.oracle_agrees}


def kernel_elements(op: HeckePoly, R: int) -> list[IndElem]:
    _, ker, lay = kernel_truncated(op, R, sample=0, oracle=False)
    return [lay.to_elem(v, op.j) for v in ker]


# ---------------------------------------------------------------------------
# sweeps over characters


@dataclass
class ThetaRow:
    p: int
    m: int
    i: int
    j: int
    b: int
    report: TruncatedKernelReport
    position: str      # "sub", "quotient" or "whole" in the mod p reduction

    def key(self):
        return (self.p, self.m, self.i, self.j, self.b, self.report.radius, self.report.label)


def block_positions(char: CharSpec) -> tuple[str, ...]:
    """Where each kernel sits in M(chi, [1, b]) / p."""
    if char.i in (1, char.p):
        return ("whole",)
    if char.p * char.p - 1 - char.m >= char.bracket_minus_mp:
        return ("sub", "quotient")
    return ("quotient", "sub")


def theta_sweep(p: int, bs, R: int, chars=None, w1: WittElem | None = None,
                oracle: bool = True) -> list[ThetaRow]:
    from .arith import valid_characters
    rows = []
    for char in (chars or valid_characters(p)):
        pos = block_positions(char)
        for b in bs:
            for op, where in zip(theta_ops(char, b, w1), pos):
                rep, _, _ = kernel_truncated(op, R, sample=0, oracle=oracle)
                rows.append(ThetaRow(p, char.m, char.i, char.j, residue_code(b, p), rep, where))
    return rows


ANCHORS = {
    "theta_1": "X -> -b X + (-1)^{j+1} tau(w1^i) T X on sigma_{i-2}(j+1)",
    "theta_2": "X -> X - c(chi,b) T X on sigma_{p-1-i}(i+j)",
    "theta": "quadratic Hecke polynomial on sigma_{p-2}(j+1) (i = 1 or i = p)",
}


def anchor_for(label: str) -> str:
    return ANCHORS[label]


CSV_FIELDS = ["p", "m", "i", "j", "b", "radius", "block", "position", "r", "twist", "operator",
              "degree", "domain_dim", "codomain_dim", "rank", "kernel_dim", "surjective",
              "oracle_rank", "oracle_kernel_dim", "oracle_agrees", "anchor"]


def rows_to_csv(rows: list[ThetaRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for row in rows:
        rp = row.report
        op_text = ";".join(f"{a}+{b}s" for a, b in rp.coefficients)
        w.writerow([row.p, row.m, row.i, row.j, row.b, rp.radius, rp.label, row.position, rp.r,
                    rp.j, op_text, rp.degree, rp.domain_dim, rp.codomain_dim, rp.rank,
                    rp.kernel_dim, int(rp.surjective), rp.oracle_rank, rp.oracle_kernel_dim,
                    int(rp.oracle_agrees), anchor_for(rp.label)])
    return buf.getvalue()


def rows_to_json(rows: list[ThetaRow]) -> list[dict]:
    out = []
    for row in rows:
        d = {"p": row.p, "m": row.m, "i": row.i, "j": row.j, "b": row.b,
             "position": row.position}
        d.update(row.report.to_json())
        d["anchor"] = anchor_for(row.report.label)
        out.append(d)
    return out
