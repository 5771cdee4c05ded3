"""
Heuristic search for good inner-bound points under rate and key budgets.

The search never claims optimality: whatever it returns is re-evaluated with
:func:`inner_point` on the witness system, so the triple is certified achievable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..prob import Channel, PayoffTable, Pmf, as_probs
from ..simplex import linprog_max
from .aux import AuxSystem, RateTriple, inner_point

PENALTY = 10.0
GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 64
    sweeps: int = 200
    tol: float = 1e-9
    seed: int = 0
    u_size: int | None = None       # default |X| + 2
    v_size: int | None = None       # default |X|
    line_points: int = 9
    refine_steps: int = 12


@dataclass
class SearchResult:
    triple: RateTriple
    witness: AuxSystem
    objective: float
    restarts_run: int
    seed: int


def _plogp(p):
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


class _Evaluator:
    """Fast (R, R0, Pi) for dense parameter arrays, mirroring inner_point."""

    def __init__(self, px, payoff: PayoffTable, wx, wy):
        self.px = px
        self.vals = payoff.values
        self.finite = bool(np.all(np.isfinite(self.vals)))
        self.wx = wx
        self.wy = wy
        self.w_trivial = Channel(wx).is_trivial() and Channel(wy).is_trivial()

    def __call__(self, A, B):
        pxuv = self.px[:, None, None] * A                    # (x, u, v)
        puv = pxuv.sum(axis=0)
        r = _plogp(puv.ravel()) + _plogp(self.px) - _plogp(pxuv.ravel())
        pxuvy = pxuv[..., None] * B[None]                   # (x, u, v, y)
        if self.w_trivial:
            r0 = 0.0
        else:
            # P(u, v, wx, wy)
            t = np.einsum("xuvy,xa,yb->uvab", pxuvy, self.wx, self.wy).reshape(puv.shape + (-1,))
            pu = puv.sum(axis=1)
            r0 = (_plogp(t.sum(axis=1).ravel()) + _plogp(puv.ravel())
                  - _plogp(t.ravel()) - _plogp(pu))
        pxyu = pxuvy.sum(axis=2).transpose(0, 2, 1)
        return max(r, 0.0), max(r0, 0.0), self._payoff(pxyu)

    def _payoff(self, pxyu):
        if self.finite:
            per = np.einsum("xyu,xyz->uz", pxyu, self.vals)
            return float(per.min(axis=1).sum())
        w = pxyu[..., None]
        v = self.vals[:, :, None, :]
        c = np.where(w > 0, w * np.where(np.isfinite(v), v, 0.0), 0.0).sum(axis=(0, 1))
        neg = np.any((w > 0) & np.isneginf(v), axis=(0, 1))
        mass = pxyu.sum(axis=(0, 1)) > 0
        c = np.where(neg, -np.inf, c)
        best = c.min(axis=1)
        if np.any(np.isneginf(best[mass])):
            return -math.inf
        return float(best[mass].sum())


def _objective(triple, r_budget, r0_budget):
    r, r0, pi = triple
    viol = max(0.0, r - r_budget) + max(0.0, r0 - r0_budget)
    return pi - PENALTY * viol, viol


def _polish_y(ev: _Evaluator, A, B):
    """Optimal P_{Y|UV} for fixed P_{UV|X} when the reconstruction is not disclosed."""
    if not ev.finite or not Channel(ev.wy).is_trivial():
        return B
    pxuv = ev.px[:, None, None] * A
    nu, nv, ny = B.shape
    nz = ev.vals.shape[2]
    out = B.copy()
    for u in range(nu):
        if pxuv[:, u, :].sum() <= 0:
            continue
        # c[v, y, z] = sum_x P(x, u, v) pi(x, y, z)
        c = np.einsum("xv,xyz->vyz", pxuv[:, u, :], ev.vals)
        lo = float(np.minimum(c.min(), 0.0) * nv)            # lower bound on the optimum
        nvar = nv * ny + 1
        cost = np.zeros(nvar)
        cost[-1] = 1.0
        a_ub = np.zeros((nz, nvar))
        b_ub = np.zeros(nz)
        for z in range(nz):
            a_ub[z, :-1] = -c[:, :, z].ravel()
            a_ub[z, -1] = 1.0
            b_ub[z] = -lo
        a_eq = np.zeros((nv, nvar))
        for v in range(nv):
            a_eq[v, v * ny:(v + 1) * ny] = 1.0
        res = linprog_max(cost, A_eq=a_eq, b_eq=np.ones(nv), A_ub=a_ub, b_ub=b_ub)
        q = res.x[:-1].reshape(nv, ny)
        q = np.clip(q, 0, None)
        q /= q.sum(axis=1, keepdims=True)
        out[u] = q
    return out


def _line_search(f, row, a, b, npts, refine):
    """Maximise f over moving mass t from entry a to entry b of ``row`` (in place)."""
    lo, hi = -row[b], row[a]
    if hi - lo <= 1e-15:
        return f(row)
    base_a, base_b = row[a], row[b]

    def at(t):
        row[a], row[b] = base_a - t, base_b + t
        return f(row)

    ts = np.linspace(lo, hi, npts)
    vals = [at(t) for t in ts]
    i = int(np.argmax(vals))
    best_t, best_v = ts[i], vals[i]
    left, right = ts[max(i - 1, 0)], ts[min(i + 1, npts - 1)]
    # golden-section refinement inside the bracket around the best grid point
    x1 = right - GOLDEN * (right - left)
    x2 = left + GOLDEN * (right - left)
    f1, f2 = at(x1), at(x2)
    for _ in range(refine):
        if f1 >= f2:
            right, x2, f2 = x2, x1, f1
            x1 = right - GOLDEN * (right - left)
            f1 = at(x1)
        else:
            left, x1, f1 = x1, x2, f2
            x2 = left + GOLDEN * (right - left)
            f2 = at(x2)
    for t, v in ((x1, f1), (x2, f2)):
        if v > best_v:
            best_t, best_v = t, v
    at(best_t)
    return best_v


def _ascend(ev, A, B, r_budget, r0_budget, cfg):
    nx, nu, nv = A.shape
    ny = B.shape[2]
    A2 = A.reshape(nx, nu * nv)
    B2 = B.reshape(nu * nv, ny)

    def score():
        return _objective(ev(A2.reshape(A.shape), B2.reshape(B.shape)), r_budget, r0_budget)[0]

    current = score()
    for _ in range(cfg.sweeps):
        start = current
        for mat in (A2, B2):
            ncol = mat.shape[1]
            for r in range(mat.shape[0]):
                for a in range(ncol):
                    for b in range(ncol):
                        if a == b or mat[r, a] <= 0:
                            continue
                        current = _line_search(lambda _row: score(), mat[r], a, b,
                                               cfg.line_points, cfg.refine_steps)
        B2[:] = _polish_y(ev, A2.reshape(A.shape), B2.reshape(B.shape)).reshape(B2.shape)
        current = score()
        if current - start <= cfg.tol:
            break
    return A2.reshape(A.shape), B2.reshape(B.shape)


def _structured_starts(nx, nu, nv, ny):
    starts = []
    A = np.zeros((nx, nu, nv))
    A[:, 0, 0] = 1.0
    starts.append(A)                                        # nothing is sent
    A = np.zeros((nx, nu, nv))
    for x in range(nx):
        A[x, 0, x % nv] = 1.0
    starts.append(A)                                        # V carries X, U empty
    A = np.zeros((nx, nu, nv))
    for x in range(nx):
        A[x, x % nu, 0] = 1.0
    starts.append(A)                                        # U carries X
    B = np.zeros((nu, nv, ny))
    for u in range(nu):
        for v in range(nv):
            B[u, v, v % ny] = 1.0
    return [(a, B.copy()) for a in starts]


def inner_bound_search(px, payoff: PayoffTable, wx=None, wy=None, R_budget: float = math.inf,
                       R0_budget: float = math.inf, config: SearchConfig | None = None) -> SearchResult:
    """Best certified triple found by structured starts plus random restarts of coordinate ascent."""
    cfg = config or SearchConfig()
    if R_budget < 0 or R0_budget < 0:
        raise ValueError("budgets must be nonnegative")
    p = as_probs(px)
    nx, ny, _ = payoff.sizes
    nu = cfg.u_size or nx + 2
    nv = cfg.v_size or nx
    wx_rows = np.ones((nx, 1)) if wx is None else np.asarray(getattr(wx, "rows", wx), float)
    wy_rows = np.ones((ny, 1)) if wy is None else np.asarray(getattr(wy, "rows", wy), float)
    ev = _Evaluator(p, payoff, wx_rows, wy_rows)
    rng = np.random.default_rng(cfg.seed)

    best = None
    starts = _structured_starts(nx, nu, nv, ny)
    for _ in range(cfg.restarts):
        A = rng.dirichlet(np.ones(nu * nv), size=nx).reshape(nx, nu, nv)
        B = rng.dirichlet(np.ones(ny), size=(nu, nv))
        starts.append((A, B))
    for i, (A, B) in enumerate(starts):
        B = _polish_y(ev, A, B)
        A, B = _ascend(ev, A.copy(), B.copy(), R_budget, R0_budget, cfg)
        r, r0, pi = ev(A, B)
        if r > R_budget + 1e-9 or r0 > R0_budget + 1e-9:
            continue
        if best is None or pi > best[0] + 1e-12:
            best = (pi, A.copy(), B.copy())
    pi, A, B = best                                         # the empty start is always feasible
    A = np.clip(A, 0, None)
    A /= A.sum(axis=(1, 2), keepdims=True)
    B = np.clip(B, 0, None)
    B /= B.sum(axis=2, keepdims=True)
    witness = AuxSystem.build(Pmf(p), A, B, payoff, Channel(wx_rows), Channel(wy_rows))
    triple = inner_point(witness)
    return SearchResult(triple, witness, pi, cfg.restarts, cfg.seed)

