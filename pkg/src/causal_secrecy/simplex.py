"""
Dense two-phase simplex method.

Small problems only (a few hundred columns).  Bland's rule is used for both
entering and leaving variables, which rules out cycling on degenerate vertices.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

PIVOT_TOL = 1e-11
FEAS_TOL = 1e-9


class InfeasibleError(NumericalError):
    pass


class UnboundedError(NumericalError):
    pass


@dataclass
class LPResult:
    x: np.ndarray
    value: float
    iterations: int


def _pivot(T, basis, r, c):
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    basis[r] = c


def _run(T, basis, ncols, max_iter):
    """Minimise the objective held in the last row of T over the first ``ncols`` columns."""
    it = 0
    m = T.shape[0] - 1
    while True:
        reduced = T[-1, :ncols]
        entering = np.flatnonzero(reduced < -FEAS_TOL * 1e-2)
        if entering.size == 0:
            return it
        c = int(entering[0])
        col = T[:m, c]
        pos = np.flatnonzero(col > PIVOT_TOL)
        if pos.size == 0:
            raise UnboundedError("linear program is unbounded")
        ratios = T[pos, -1] / col[pos]
        best = ratios.min()
        ties = pos[ratios <= best + 1e-12 * max(1.0, abs(best))]
        r = int(min(ties, key=lambda i: basis[i]))
        _pivot(T, basis, r, c)
        it += 1
        if it > max_iter:
            raise NumericalError("simplex iteration limit reached")


def linprog_min(c, A_eq=None, b_eq=None, A_ub=None, b_ub=None, max_iter=50_000) -> LPResult:
    """Minimise ``c @ x`` subject to ``A_eq x = b_eq``, ``A_ub x <= b_ub``, ``x >= 0``."""
    c = np.asarray(c, float)
    n = c.size
    rows, rhs = [], []
    n_slack = 0 if A_ub is None else np.asarray(A_ub).shape[0]
    if A_eq is not None:
        A_eq = np.atleast_2d(np.asarray(A_eq, float))
        for a, b in zip(A_eq, np.atleast_1d(np.asarray(b_eq, float))):
            rows.append(np.concatenate([a, np.zeros(n_slack)]))
            rhs.append(b)
    if A_ub is not None:
        A_ub = np.atleast_2d(np.asarray(A_ub, float))
        for i, (a, b) in enumerate(zip(A_ub, np.atleast_1d(np.asarray(b_ub, float)))):
            s = np.zeros(n_slack)
            s[i] = 1.0
            rows.append(np.concatenate([a, s]))
            rhs.append(b)
    A = np.array(rows, float).reshape(len(rows), n + n_slack)
    b = np.array(rhs, float)
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1
    m, nv = A.shape

    # phase 1: one artificial per row
    T = np.zeros((m + 1, nv + m + 1))
    T[:m, :nv] = A
    T[:m, nv:nv + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :nv] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(nv, nv + m))
    it = _run(T, basis, nv + m, max_iter)
    if -T[-1, -1] > FEAS_TOL * max(1.0, b.sum()):
        raise InfeasibleError(f"linear program is infeasible (phase-1 residual {-T[-1, -1]:.3g})")

    # drive remaining artificials out of the basis; drop redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= nv:
            cand = np.flatnonzero(np.abs(T[r, :nv]) > 1e-9)
            if cand.size:
                _pivot(T, basis, r, int(cand[0]))
                keep.append(r)
        else:
            keep.append(r)
    T = np.vstack([T[keep][:, list(range(nv)) + [T.shape[1] - 1]], np.zeros((1, nv + 1))])
    basis = [basis[r] for r in keep]

    # phase 2
    cost = np.concatenate([c, np.zeros(n_slack)])
    T[-1, :nv] = cost
    T[-1, -1] = 0.0
    for r, j in enumerate(basis):
        T[-1] -= cost[j] * T[r]
    it += _run(T, basis, nv, max_iter)
    x = np.zeros(nv)
    for r, j in enumerate(basis):
        x[j] = T[r, -1]
    x = np.maximum(x[:n], 0.0)
    return LPResult(x=x, value=float(c @ x), iterations=it)


def linprog_max(c, A_eq=None, b_eq=None, A_ub=None, b_ub=None, max_iter=50_000) -> LPResult:
    res = linprog_min(-np.asarray(c, float), A_eq, b_eq, A_ub, b_ub, max_iter)
    res.value = -res.value
    return res
