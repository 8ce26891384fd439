"""Dense F_p linear algebra on numpy int64 arrays.

This is the bulk lane used by the interpolation determinant backend, the
basepoint certificate and the sampling oracles.  Everything here is exact
modular arithmetic: the float64 matmul path is used only when the inner
dimension k satisfies k*(p-1)^2 < 2^53, where float64 integer arithmetic is
exact; otherwise products are accumulated in int64 chunks with
chunk*(p-1)^2 < 2^62.
"""

from __future__ import annotations

import numpy as np

_F64_LIMIT = 1 << 53
_I64_LIMIT = 1 << 62


def _mm(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Exact (A @ B) mod p for int64 arrays already reduced mod p."""
    k = A.shape[1]
    if k == 0:
        return np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    pp = (p - 1) * (p - 1)
    if k * pp < _F64_LIMIT:
        C = A.astype(np.float64) @ B.astype(np.float64)
        return C.astype(np.int64) % p
    chunk = max(1, _I64_LIMIT // pp)
    acc = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for s in range(0, k, chunk):
        e = min(k, s + chunk)
        acc = (acc + A[:, s:e] @ B[s:e, :]) % p
    return acc


def _inv_vec(xs, p: int) -> np.ndarray:
    return np.array([pow(int(x), p - 2, p) for x in xs], dtype=np.int64)


def _inv_small(C: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a small invertible matrix mod p (Gauss-Jordan)."""
    k = C.shape[0]
    M = np.concatenate([C % p, np.eye(k, dtype=np.int64)], axis=1)
    for c in range(k):
        pr = c + int(np.argmax(M[c:, c] != 0))
        if M[pr, c] == 0:
            raise ValueError("singular pivot block")
        if pr != c:
            M[[c, pr]] = M[[pr, c]]
        M[c] = M[c] * pow(int(M[c, c]), p - 2, p) % p
        others = [i for i in range(k) if i != c and M[i, c]]
        if others:
            M[others] = (M[others] - np.outer(M[others, c], M[c])) % p
    return M[:, k:]


def rref_modp(A: np.ndarray, p: int, block: int = 48) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod p; returns (R, pivot columns).

    Blocked Gauss-Jordan: pivots for a panel of `block` columns are found by
    a local elimination on a scratch copy, then one matmul applies the whole
    panel's reduction to the trailing matrix.  Pivot rows end up at the top
    in pivot-column order, remaining rows are zero.
    """
    A = np.array(A, dtype=np.int64) % p
    m, n = A.shape
    pivots: list[int] = []
    r = 0
    c0 = 0
    while c0 < n and r < m:
        c1 = min(c0 + block, n)
        width = c1 - c0
        panel = A[r:, c0:c1].copy()
        mc = panel.shape[0]
        used = np.zeros(mc, dtype=bool)
        loc: list[tuple[int, int]] = []
        for lc in range(width):
            col = panel[:, lc]
            cand = np.nonzero((col != 0) & ~used)[0]
            if cand.size == 0:
                continue
            pr = int(cand[0])
            used[pr] = True
            loc.append((pr, lc))
            prow = panel[pr] * pow(int(panel[pr, lc]), p - 2, p) % p
            rows_upd = np.nonzero((panel[:, lc] != 0) & ~used)[0]
            if rows_upd.size:
                panel[rows_upd] = (panel[rows_upd]
                                   - np.outer(panel[rows_upd, lc], prow)) % p
        if not loc:
            c0 = c1
            continue
        sel = np.array([r + pr for pr, _ in loc])
        pcols = [c0 + lc for _, lc in loc]
        orig = A[sel, :]
        Cinv = _inv_small(orig[:, pcols], p)
        rpr = _mm(Cinv, orig, p)
        mask = np.ones(m, dtype=bool)
        mask[sel] = False
        F = A[mask][:, pcols]
        A[mask] = (A[mask] - _mm(F, rpr, p)) % p
        A[sel] = rpr
        # move the new pivot rows up to the frontier, preserving order
        order = np.concatenate([np.arange(r), sel,
                                np.setdiff1d(np.arange(r, m), sel)])
        A = A[order]
        r += len(loc)
        pivots.extend(pcols)
        c0 = c1
    return A, pivots


def rank_modp(A: np.ndarray, p: int) -> int:
    if A.size == 0:
        return 0
    return len(rref_modp(A, p)[1])


def kernel_modp(A: np.ndarray, p: int) -> np.ndarray:
    """Right kernel basis mod p as columns of an (ncols x nullity) array."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[1]
    R, pivots = rref_modp(A, p)
    free = [c for c in range(n) if c not in set(pivots)]
    K = np.zeros((n, len(free)), dtype=np.int64)
    for j, f in enumerate(free):
        K[f, j] = 1
        for i, c in enumerate(pivots):
            K[c, j] = (-int(R[i, f])) % p
    return K


def batch_det_modp(mats: np.ndarray, p: int) -> np.ndarray:
    """Determinants mod p of a batch of square matrices, shape (B, n, n).

    Requires (p-1)^2 < 2^62 (any p below 2^31).  Zero pivot columns simply
    leave a zero on the diagonal, which zeroes that determinant.
    """
    M = np.array(mats, dtype=np.int64) % p
    B, n, _ = M.shape
    sign = np.ones(B, dtype=np.int64)
    bidx = np.arange(B)
    for k in range(n - 1):
        nz = M[:, k:, k] != 0
        idx = np.argmax(nz, axis=1)
        swap = idx > 0
        if swap.any():
            bi = bidx[swap]
            ri = k + idx[swap]
            tmp = M[bi, k, :].copy()
            M[bi, k, :] = M[bi, ri, :]
            M[bi, ri, :] = tmp
            sign[swap] = -sign[swap]
        inv = _inv_vec(M[:, k, k], p)
        f = M[:, k + 1 :, k] * inv[:, None] % p
        M[:, k + 1 :, k + 1 :] = (M[:, k + 1 :, k + 1 :]
                                  - f[:, :, None] * M[:, k : k + 1, k + 1 :]) % p
    det = sign % p
    for k in range(n):
        det = det * M[:, k, k] % p
    return det


def det_modp(A: np.ndarray, p: int) -> int:
    return int(batch_det_modp(np.asarray(A, dtype=np.int64)[None, :, :], p)[0])
