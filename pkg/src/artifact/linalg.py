"""Exact linear algebra over F_p and F_{p^2}.

F_{p^2} arrays carry a trailing axis of length 2 holding the coordinates on {1, s}.
Two independent solvers live here: a sparse row-reduction working on F_{p^2}
codes through lookup tables, and a dense F_p elimination applied to the
realification of the matrix.
"""

from __future__ import annotations

import numpy as np

from .arith import fq2


# -- F_{p^2} pair arrays ------------------------------------------------------


def fq_mul(x: np.ndarray, y: np.ndarray, p: int) -> np.ndarray:
    F = fq2(p)
    x0, x1 = x[..., 0], x[..., 1]
    y0, y1 = y[..., 0], y[..., 1]
    t = x1 * y1
    out = np.stack([x0 * y0 - F.b * t, x0 * y1 + x1 * y0 - F.a * t], axis=-1)
    return out % p


def fq_scalar(code: int, p: int) -> np.ndarray:
    return np.array(fq2(p).coords(code), dtype=np.int64)


def pairs_to_codes(x: np.ndarray, p: int) -> np.ndarray:
    return (x[..., 0] % p) + p * (x[..., 1] % p)


def codes_to_pairs(c: np.ndarray, p: int) -> np.ndarray:
    c = np.asarray(c, dtype=np.int64)
    return np.stack([c % p, c // p], axis=-1)


def fp_matvec(M: np.ndarray, v: np.ndarray, p: int) -> np.ndarray:
    """F_p matrix times F_{p^2} vector (pairs)."""
    return np.stack([M @ v[:, 0], M @ v[:, 1]], axis=-1) % p


# -- realification ------------------------------------------------------------


def realify(M: np.ndarray, p: int) -> np.ndarray:
    """F_p matrix of an F_{p^2}-linear map given as pairs of shape (m, n, 2).

    Coordinates (c0, c1) of each F_{p^2} entry are laid out consecutively, so an
    m x n matrix becomes 2m x 2n.
    """
    F = fq2(p)
    m, n = M.shape[:2]
    # multiplication by z = z0 + z1 s on the basis {1, s}:
    # 1 -> z0 + z1 s, s -> -b z1 + (z0 - a z1) s
    z0, z1 = M[..., 0], M[..., 1]
    out = np.zeros((2 * m, 2 * n), dtype=np.int64)
    out[0::2, 0::2] = z0
    out[1::2, 0::2] = z1
    out[0::2, 1::2] = -F.b * z1
    out[1::2, 1::2] = z0 - F.a * z1
    return out % p


def rank_mod_p(A: np.ndarray, p: int) -> int:
    """Dense Gaussian elimination over F_p."""
    A = np.array(A, dtype=np.int64) % p
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = np.nonzero(A[r:, c])[0]
        if piv.size == 0:
            continue
        k = r + piv[0]
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, p) % p
        col = A[:, c].copy()
        col[r] = 0
        nz = np.nonzero(col)[0]
        if nz.size:
            A[nz] = (A[nz] - np.outer(col[nz], A[r])) % p
        r += 1
    return r


def nullspace_mod_p(A: np.ndarray, p: int) -> np.ndarray:
    """Basis of the right kernel over F_p, as rows."""
    A = np.array(A, dtype=np.int64) % p
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = np.nonzero(A[r:, c])[0]
        if piv.size == 0:
            continue
        k = r + piv[0]
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, p) % p
        col = A[:, c].copy()
        col[r] = 0
        nz = np.nonzero(col)[0]
        if nz.size:
            A[nz] = (A[nz] - np.outer(col[nz], A[r])) % p
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for row, c in enumerate(pivots):
            v[c] = (-A[row, f]) % p
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), cols)


def dense_rank_fq2(M: np.ndarray, p: int) -> int:
    """Rank over F_{p^2} via the F_p rank of the realification."""
    rk = rank_mod_p(realify(M, p), p)
    assert rk % 2 == 0
    return rk // 2


# -- sparse elimination over F_{p^2} ------------------------------------------


class SparseMatrix:
    """Rows as dicts {column: nonzero F_{p^2} code}."""

    def __init__(self, p: int, ncols: int):
        self.p = p
        self.ncols = ncols
        self.rows: list[dict[int, int]] = []

    def add_row(self, row: dict[int, int]):
        self.rows.append({c: v for c, v in row.items() if v})

    @property
    def nrows(self):
        return len(self.rows)

    def to_dense_pairs(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=np.int64)
        for r, row in enumerate(self.rows):
            for c, v in row.items():
                out[r, c] = v
        return codes_to_pairs(out, self.p)


def sparse_echelon(S: SparseMatrix):
    """Row-reduce; returns (pivot_rows keyed by pivot column, rank)."""
    F = fq2(S.p)
    pivots: dict[int, dict[int, int]] = {}
    for row in S.rows:
        row = dict(row)
        while row:
            c = min(row)
            if c not in pivots:
                inv = F.inv(row[c])
                pivots[c] = {k: F.mul(v, inv) for k, v in row.items()}
                break
            coef = row[c]
            for k, v in pivots[c].items():
                nv = F.sub(row.get(k, 0), F.mul(coef, v))
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return pivots, len(pivots)


def sparse_rank(S: SparseMatrix) -> int:
    return sparse_echelon(S)[1]


def sparse_kernel(S: SparseMatrix) -> list[dict[int, int]]:
    """Basis of {v : S v = 0} over F_{p^2}, each vector as a sparse dict."""
    F = fq2(S.p)
    pivots, _ = sparse_echelon(S)
    # back-substitute into fully reduced form
    cols = sorted(pivots, reverse=True)
    for c in cols:
        row = pivots[c]
        for c2 in list(row):
            coef = row.get(c2, 0)
            if c2 != c and c2 in pivots and coef:
                for k, v in pivots[c2].items():
                    nv = F.sub(row.get(k, 0), F.mul(coef, v))
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
    free = [c for c in range(S.ncols) if c not in pivots]
    basis = []
    for f in free:
        v = {f: 1}
        for c, row in pivots.items():
            if f in row:
                v[c] = F.neg(row[f])
        basis.append(v)
    return basis


def sparse_apply(S: SparseMatrix, v: dict[int, int]) -> list[int]:
    F = fq2(S.p)
    out = []
    for row in S.rows:
        acc = 0
        for c, a in row.items():
            if c in v:
                acc = F.add(acc, F.mul(a, v[c]))
        out.append(acc)
    return out
