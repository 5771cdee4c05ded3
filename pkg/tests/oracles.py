"""Independent reference computations used by the tests (loops, scipy, brute force)."""

import itertools
import math

import numpy as np
from scipy.optimize import linprog
from scipy.stats import entropy as sp_entropy


def h2(p):
    return float(sp_entropy(np.ravel(p), base=2))


def binary_h(a):
    if a in (0.0, 1.0):
        return 0.0
    return -a * math.log2(a) - (1 - a) * math.log2(1 - a)


def typical_bruteforce(p, n, eps):
    out = []
    for seq in itertools.product(range(len(p)), repeat=n):
        counts = np.bincount(seq, minlength=len(p)) / n
        ok = all(abs(counts[a] - p[a]) < eps * p[a] for a in range(len(p)) if p[a] > 0)
        ok = ok and all(counts[a] == 0 for a in range(len(p)) if p[a] == 0)
        if ok:
            out.append(seq)
    return out


def rotation_orbits(k, n):
    seen, orbits = set(), []
    for seq in itertools.product(range(k), repeat=n):
        if seq in seen:
            continue
        orb = {seq[s:] + seq[:s] for s in range(n)}
        seen |= orb
        orbits.append(sorted(orb))
    return orbits


def lossless_grid_oracle(px, xz, r0, steps=60):
    """LP over a lattice of conditionals: a lower bound that tightens with ``steps``."""
    k = len(px)
    pts = []
    for c in itertools.product(range(steps + 1), repeat=k - 1):
        if sum(c) <= steps:
            pts.append(list(c) + [steps - sum(c)])
    pts = np.array(pts, float) / steps
    ent = np.array([h2(p) for p in pts])
    pay = (pts @ xz).min(axis=1)
    res = linprog(-pay, A_ub=ent[None, :], b_ub=[r0], A_eq=pts.T, b_eq=px, bounds=(0, None), method="highs")
    return -res.fun


def best_test_channel_lp(px, values):
    """max over P_{Y|X} of min_z sum P(x) P(y|x) pi(x, y, z)."""
    nx, ny, nz = values.shape
    nv = nx * ny + 1
    c = np.zeros(nv)
    c[-1] = -1.0
    a_ub = np.zeros((nz, nv))
    for z in range(nz):
        a_ub[z, :-1] = -(px[:, None] * values[:, :, z]).ravel()
        a_ub[z, -1] = 1.0
    a_eq = np.zeros((nx, nv))
    for x in range(nx):
        a_eq[x, x * ny:(x + 1) * ny] = 1.0
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(nz), A_eq=a_eq, b_eq=np.ones(nx),
                  bounds=[(0, None)] * (nv - 1) + [(None, None)], method="highs")
    return -res.fun


def superposition_tables_loops(cb):
    """P and Q by summing the likelihood-encoder definition cell by cell."""
    aux = cb.aux
    nx, ny = aux.symbol_sizes
    n = cb.n
    px = aux.px.probs
    pxuv = px[:, None, None] * aux.uv_tensor()
    puv = pxuv.sum(axis=0)
    py = aux.y_tensor()
    wx, wy = aux.wx.rows, aux.wy.rows
    nwy = wy.shape[1]
    nw = wx.shape[1] * nwy
    nm, nk = cb.num_messages, cb.num_keys
    xs = list(itertools.product(range(nx), repeat=n))
    ys = list(itertools.product(range(ny), repeat=n))
    ws = list(itertools.product(range(nw), repeat=n))
    P = np.zeros((len(xs), nm, nk, len(ys), len(ws)))
    Q = np.zeros_like(P)

    def pxgiven(x, u, v):
        return pxuv[x, u, v] / puv[u, v] if puv[u, v] > 0 else 1.0 / nx

    for xi, x in enumerate(xs):
        px_n = math.prod(px[a] for a in x)
        for k in range(nk):
            lik = [math.prod(pxgiven(x[i], cb.cu[m, i], cb.cv[m, k, i]) for i in range(n)) for m in range(nm)]
            tot = sum(lik)
            for m in range(nm):
                enc = lik[m] / tot if tot > 0 else 1.0 / nm
                for yi, y in enumerate(ys):
                    dec = math.prod(py[cb.cu[m, i], cb.cv[m, k, i], y[i]] for i in range(n))
                    if dec == 0:
                        continue
                    for wi, w in enumerate(ws):
                        pw = math.prod(wx[x[i], w[i] // nwy] * wy[y[i], w[i] % nwy] for i in range(n))
                        P[xi, m, k, yi, wi] = px_n / nk * enc * dec * pw
                        Q[xi, m, k, yi, wi] = lik[m] / (nm * nk) * dec * pw
    return P, Q


def posterior_value_loops(table_cells, n, payoff, observe):
    """
    Best-response value by explicit posterior bookkeeping.

    table_cells: iterable of (prob, x, m, y, w) with per-position tuples.
    observe(i, w) -> hashable observation at step i.
    """
    per = []
    for i in range(n):
        acc = {}
        for p, x, m, y, w in table_cells:
            key = (m, observe(i, w))
            acc.setdefault(key, np.zeros(payoff.shape[2]))
            acc[key] += p * payoff[x[i], y[i], :]
        per.append(sum(v.min() for v in acc.values()))
    return float(np.mean(per)), per
