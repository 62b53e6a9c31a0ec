"""Almost-block-diagonal (ABD) linear systems of 1-D collocation.

Structure of an order-M matrix, M = n*(r-1) + 2:

    row 0               boundary row, columns 0 .. r
    rows 1+i(r-1) ..    block i, (r-1) rows over the r+1 columns starting
         (i+1)(r-1)     at i*(r-1); adjacent blocks overlap in 2 columns
    row M-1             boundary row, last r+1 columns

Factorization is a block-sequential LU: the working set for block i is
the single carried row from the previous block plus the block's r-1
rows; its r-1 exclusive columns are eliminated with partial pivoting
confined to those rows, leaving one row that carries into the next
block's 2-column overlap.  The last block absorbs the second boundary
row and is finished densely.  Fill never leaves the ABD envelope and
the cost is O(n r^3).

Solves apply the stored elimination with a compiled kernel that walks
the blocks once forward (carry recurrence) and once backward (overlap
back substitution) per right-hand side, at O(n r^2) cost each.  The
kernel processes every RHS row with the same fixed scalar operation
sequence, so a multi-RHS solve is bitwise identical to solving the
columns one at a time, and results never depend on batch composition.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["AbdMatrix", "AbdFactorization", "SingularMatrixError", "factorize"]

_PIVOT_FLOOR = 1e-300


class SingularMatrixError(np.linalg.LinAlgError):
    """Zero pivot during ABD elimination; .row is the offending row index."""

    def __init__(self, row: int):
        super().__init__(f"singular ABD system: zero pivot at row {row}")
        self.row = row


class AbdMatrix:
    """Dense-by-block storage of an ABD matrix.

    Parameters
    ----------
    top, bottom : (r+1,) boundary rows (top starting at column 0, bottom
        ending at the last column).
    blocks : (n, r-1, r+1) interior collocation blocks; block i starts
        at column i*(r-1).
    """

    def __init__(self, top, blocks, bottom):
        top = np.asarray(top, dtype=float)
        blocks = np.asarray(blocks, dtype=float)
        bottom = np.asarray(bottom, dtype=float)
        if blocks.ndim != 3:
            raise ValueError("blocks must have shape (n, r-1, r+1)")
        n, m, w = blocks.shape
        if w != m + 2 or m < 2:
            raise ValueError("block shape must be (r-1, r+1) with r >= 3")
        if top.shape != (w,) or bottom.shape != (w,):
            raise ValueError("boundary rows must have length r+1")
        self.top = top
        self.blocks = blocks
        self.bottom = bottom
        self.nblocks = n
        self.brows = m            # r - 1
        self.width = w            # r + 1
        self.order = n * m + 2

    @property
    def degree(self) -> int:
        return self.brows + 1

    def to_dense(self) -> np.ndarray:
        n, m, w, M = self.nblocks, self.brows, self.width, self.order
        a = np.zeros((M, M))
        a[0, :w] = self.top
        for i in range(n):
            a[1 + i * m:1 + (i + 1) * m, i * m:i * m + w] = self.blocks[i]
        a[M - 1, M - w:] = self.bottom
        return a

    def matmat(self, x: np.ndarray) -> np.ndarray:
        """A @ x for x of shape (M,) or (M, k)."""
        x = np.asarray(x, dtype=float)
        vec = x.ndim == 1
        xc = x[:, None] if vec else x
        n, m, w, M = self.nblocks, self.brows, self.width, self.order
        y = np.empty((M, xc.shape[1]))
        y[0] = self.top @ xc[:w]
        for i in range(n):
            y[1 + i * m:1 + (i + 1) * m] = self.blocks[i] @ xc[i * m:i * m + w]
        y[M - 1] = self.bottom @ xc[M - w:]
        return y[:, 0] if vec else y


@njit(cache=True, nogil=True)
def _apply_elimination(bt, alpha, beta, etb, etc, fov, g, x):
    """Forward/backward substitution for all RHS rows of bt into x.

    Per row: the carry entering each leading block follows
    c_{i+1} = alpha_i c_i + beta_i . b_i; the final (r+1)-window is
    solved with the dense inverse g; back substitution recovers each
    block's exclusive unknowns from its reduced rows (etb, etc) minus
    the overlap coupling fov into the next block's first two unknowns.
    """
    k, M = bt.shape
    q, m = beta.shape
    w = m + 2
    cin = np.empty(q)
    wf = np.empty(w)
    for row in range(k):
        c = bt[row, 0]
        for i in range(q):
            cin[i] = c
            acc = alpha[i] * c
            for j in range(m):
                acc += beta[i, j] * bt[row, 1 + i * m + j]
            c = acc
        for p in range(w):
            s = g[p, 0] * c + g[p, w - 1] * bt[row, M - 1]
            for j in range(m):
                s += g[p, 1 + j] * bt[row, 1 + q * m + j]
            wf[p] = s
        for p in range(w):
            x[row, q * m + p] = wf[p]
        z0 = wf[0]
        z1 = wf[1]
        for i in range(q - 1, -1, -1):
            for p in range(m):
                s = etc[i, p] * cin[i]
                for j in range(m):
                    s += etb[i, p, j] * bt[row, 1 + i * m + j]
                s -= fov[i, p, 0] * z0 + fov[i, p, 1] * z1
                x[row, i * m + p] = s
            z0 = x[row, i * m + 0]
            z1 = x[row, i * m + 1]


class AbdFactorization:
    """Reusable elimination record produced by factorize()."""

    def __init__(self, matrix: AbdMatrix):
        n, m, w = matrix.nblocks, matrix.brows, matrix.width
        self.nblocks = n
        self.brows = m
        self.width = w
        self.order = matrix.order

        T_list, U_list, carries = [], [], []
        carry = matrix.top.copy()
        for i in range(n - 1):
            carries.append(carry)
            W = np.empty((m + 1, w))
            W[0] = carry
            W[1:] = matrix.blocks[i]
            T = np.eye(m + 1)
            for j in range(m):
                p = j + int(np.argmax(np.abs(W[j:, j])))
                if abs(W[p, j]) < _PIVOT_FLOOR:
                    raise SingularMatrixError(i * m + j)
                if p != j:
                    W[[j, p]] = W[[p, j]]
                    T[[j, p]] = T[[p, j]]
                mult = W[j + 1:, j] / W[j, j]
                W[j + 1:, j + 1:] -= mult[:, None] * W[j, j + 1:]
                W[j + 1:, j] = 0.0
                T[j + 1:, :] -= mult[:, None] * T[j, :]
            T_list.append(T)
            U_list.append(W[:m].copy())
            carry = np.zeros(w)
            carry[:2] = W[m, m:]
        carries.append(carry)

        Wf = np.empty((w, w))
        Wf[0] = carry
        Wf[1:m + 1] = matrix.blocks[n - 1]
        Wf[m + 1] = matrix.bottom
        Tf = np.eye(w)
        for j in range(w):
            p = j + int(np.argmax(np.abs(Wf[j:, j])))
            if abs(Wf[p, j]) < _PIVOT_FLOOR:
                raise SingularMatrixError((n - 1) * m + j)
            if p != j:
                Wf[[j, p]] = Wf[[p, j]]
                Tf[[j, p]] = Tf[[p, j]]
            if j < w - 1:
                mult = Wf[j + 1:, j] / Wf[j, j]
                Wf[j + 1:, j + 1:] -= mult[:, None] * Wf[j, j + 1:]
                Wf[j + 1:, j] = 0.0
                Tf[j + 1:, :] -= mult[:, None] * Tf[j, :]

        q = n - 1
        self._q = q
        self._T = np.array(T_list).reshape(q, m + 1, m + 1)
        self._U = np.array(U_list).reshape(q, m, w)
        self._carries = np.array(carries)
        self._Wf = Wf
        self._Tf = Tf
        self._G = np.ascontiguousarray(np.linalg.solve(Wf, Tf))   # (w, w)

        # solve-kernel operators: the carry recurrence row of T, and the
        # reduced rows premultiplied by inv(U_exclusive) so that back
        # substitution is a plain evaluation
        self._alpha = np.ascontiguousarray(self._T[:, m, 0])
        self._beta = np.ascontiguousarray(self._T[:, m, 1:])
        if q:
            e_inv = np.linalg.inv(self._U[:, :, :m])              # upper triangular
            self._F = np.ascontiguousarray(e_inv @ self._U[:, :, m:])
            self._ETB = np.ascontiguousarray(e_inv @ self._T[:, :m, 1:])
            self._ETc = np.ascontiguousarray((e_inv @ self._T[:, :m, 0:1])[:, :, 0])
        else:
            self._F = np.zeros((0, m, 2))
            self._ETB = np.zeros((0, m, m))
            self._ETc = np.zeros((0, m))

    def solve_rows(self, rhs_rows: np.ndarray) -> np.ndarray:
        """Solve with right-hand sides stored one per row, shape (k, M)."""
        bt = np.ascontiguousarray(rhs_rows, dtype=float)
        if bt.ndim != 2 or bt.shape[1] != self.order:
            raise ValueError(f"right-hand sides must have {self.order} entries")
        x = np.empty_like(bt)
        _apply_elimination(bt, self._alpha, self._beta, self._ETB, self._ETc,
                           self._F, self._G, x)
        return x

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Solve A x = b for b of shape (M,) or (M, k)."""
        b = np.asarray(b, dtype=float)
        if b.ndim == 1:
            return self.solve_rows(b[None, :])[0]
        if b.ndim != 2:
            raise ValueError("right-hand side must be a vector or matrix")
        return self.solve_rows(np.ascontiguousarray(b.T)).T.copy()

    def reconstruct(self) -> AbdMatrix:
        """Rebuild the original matrix from the stored elimination."""
        n, m, w = self.nblocks, self.brows, self.width
        blocks = np.empty((n, m, w))
        for i in range(n - 1):
            wout = np.zeros((m + 1, w))
            wout[:m] = self._U[i]
            # the outgoing carry lives in the next window; its two entries
            # sit on this window's overlap columns
            wout[m, m:] = self._carries[i + 1][:2]
            blocks[i] = (np.linalg.inv(self._T[i]) @ wout)[1:]
        wf_rows = np.linalg.inv(self._Tf) @ self._Wf
        blocks[n - 1] = wf_rows[1:m + 1]
        top = self._carries[0]
        bottom = wf_rows[m + 1]
        return AbdMatrix(top, blocks, bottom)


def factorize(matrix: AbdMatrix) -> AbdFactorization:
    """Eliminate once; the result serves any number of solves."""
    return AbdFactorization(matrix)
