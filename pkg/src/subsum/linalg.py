"""Small dense numerical kernels: one-sided Jacobi SVD and damped power iteration."""

from __future__ import annotations

import numpy as np


def _round_robin(q: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rounds of disjoint column pairs covering every pair once (circle method)."""
    players = list(range(q)) + ([-1] if q % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        left, right = [], []
        for k in range(m // 2):
            a, b = players[k], players[m - 1 - k]
            if a >= 0 and b >= 0:
                left.append(min(a, b))
                right.append(max(a, b))
        rounds.append((np.array(left, dtype=int), np.array(right, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _jacobi_columns(x: np.ndarray, tol: float, max_sweeps: int) -> tuple[np.ndarray, np.ndarray]:
    # Columns of ``x`` and of the accumulated rotation live side by side as rows
    # of one array, so a round is a single gather and a single scatter.
    p, q = x.shape
    w = np.empty((q, p + q))
    w[:, :p] = x.T
    w[:, p:] = np.eye(q)
    rounds = _round_robin(q)
    for _ in range(max_sweeps):
        rotated = False
        for i, j in rounds:
            if i.size == 0:
                continue
            wi, wj = w[i], w[j]
            xi, xj = wi[:, :p], wj[:, :p]
            gamma = np.einsum("ij,ij->i", xi, xj)
            alpha = np.einsum("ij,ij->i", xi, xi)
            beta = np.einsum("ij,ij->i", xj, xj)
            active = np.abs(gamma) > tol * np.sqrt(alpha * beta)
            if not active.any():
                continue
            rotated = True
            if not active.all():
                i, j = i[active], j[active]
                wi, wj = wi[active], wj[active]
                alpha, beta, gamma = alpha[active], beta[active], gamma[active]
            zeta = (beta - alpha) / (2.0 * gamma)
            t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
            c = (1.0 / np.sqrt(1.0 + t * t))[:, None]
            s = c * t[:, None]
            w[i] = c * wi - s * wj
            wj *= c
            wi *= s
            wj += wi
            w[j] = wj
        if not rotated:
            break
    return w[:, :p].T, w[:, p:].T


def _householder_r(x: np.ndarray) -> np.ndarray:
    """Upper-triangular factor of a QR decomposition of a tall matrix."""
    r = np.array(x, dtype=float)
    p, q = r.shape
    for k in range(q):
        col = r[k:, k]
        norm = np.linalg.norm(col)
        if norm == 0.0:
            continue
        v = col.copy()
        v[0] += norm if v[0] >= 0 else -norm
        v /= np.linalg.norm(v)
        r[k:, k:] -= 2.0 * np.outer(v, v @ r[k:, k:])
        r[k + 1 :, k] = 0.0
    return r[:q]


def svd(a, tol: float = 1e-15, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``a = u @ diag(s) @ vt`` with ``s`` in descending order.

    One-sided Jacobi (Hestenes) on the narrower orientation of ``a``. Tall inputs
    are first reduced to their triangular QR factor, which has the same singular
    values and right singular vectors; pairs are rotated a round at a time so each
    round is one vectorized update.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError("svd expects a 2-D array")
    m, n = a.shape
    transposed = n > m
    x = a.T if transposed else a
    core = _householder_r(x) if x.shape[0] > x.shape[1] else x
    cols, v = _jacobi_columns(core, tol, max_sweeps)
    s = np.linalg.norm(cols, axis=0)
    order = np.argsort(-s, kind="stable")
    s, v = s[order], v[:, order]
    u = x @ v
    nz = s > 0
    u[:, nz] /= s[nz]
    u[:, ~nz] = 0.0
    if transposed:
        return v, s, u.T
    return u, s, v.T


def numerical_rank(s: np.ndarray, shape: tuple[int, int]) -> int:
    if s.size == 0 or s[0] == 0:
        return 0
    cutoff = s[0] * max(shape) * np.finfo(float).eps * 10
    return int(np.count_nonzero(s > cutoff))


def power_iteration(
    weights, damping: float = 0.85, epsilon: float = 1e-6, max_iter: int = 200
) -> tuple[np.ndarray, int]:
    """Damped random-walk stationary vector over a non-negative weight matrix.

    Rows are normalized to sum to one; an all-zero row becomes uniform. Iterates
    ``r <- (1 - d)/n + d * M.T @ r`` from the uniform vector until the L1 change
    drops below ``epsilon`` or ``max_iter`` is hit. Returns the vector and the
    number of iterations run.
    """
    w = np.asarray(weights, dtype=float)
    n = w.shape[0]
    if w.shape != (n, n) or n == 0:
        raise ValueError("weights must be a non-empty square matrix")
    rows = w.sum(axis=1)
    m = np.empty_like(w)
    zero = rows == 0
    m[~zero] = w[~zero] / rows[~zero, None]
    m[zero] = 1.0 / n
    mt = m.T
    r = np.full(n, 1.0 / n)
    teleport = (1.0 - damping) / n
    for it in range(1, max_iter + 1):
        nxt = teleport + damping * (mt @ r)
        change = np.abs(nxt - r).sum()
        r = nxt
        if change < epsilon:
            return r, it
    return r, max_iter
