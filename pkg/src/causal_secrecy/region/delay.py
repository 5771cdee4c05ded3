"""
Delayed causal disclosure: the adversary sees W^{i-d} instead of W^{i-1}.

Inner bounds come from treating d consecutive symbols as one super-symbol; outer bounds
divide the key term of the single-letter region by d.  The two are reported separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import NumericalError
from ..prob import (Channel, PayoffTable, Pmf, as_probs, conditional_entropy, entropy, is_product,
                    per_symbol_marginal, product_pmf, sequences)
from ..simplex import InfeasibleError, linprog_min
from .aux import AuxSystem, RateTriple, inner_point
from .lossless import lossless_extreme_set, lossless_min_key
from .lossy import TradeoffCurve


def delay_inner_point(aux_d: AuxSystem, d: int) -> RateTriple:
    """Per-symbol triple of a super-symbol system; the block source must be i.i.d."""
    if d < 1:
        raise ValueError("delay d must be >= 1")
    if aux_d.block_length != d:
        raise ValueError(f"auxiliary system has block length {aux_d.block_length}, expected {d}")
    nx, _ = aux_d.symbol_sizes
    block = aux_d.px.probs
    single = per_symbol_marginal(block, nx, d)
    if not is_product(block, single, d, tol=1e-12):
        raise ValueError("block source is not the d-fold product of its per-symbol marginal")
    return inner_point(aux_d)


def delay_outer_point(aux: AuxSystem, d: int) -> RateTriple:
    """Single-letter triple with the key term divided by d."""
    if d < 1:
        raise ValueError("delay d must be >= 1")
    if aux.block_length != 1:
        raise ValueError("outer bound takes a single-letter auxiliary system")
    t = inner_point(aux)
    return RateTriple(t.R, t.R0 / d, t.Pi)


def delay_modular_aux(px, d: int) -> Channel:
    """
    P_{U|X^d} for U = (X_1 + K, ..., X_d + K) mod |X| with K uniform and independent.

    Output symbols are d-tuples over the source alphabet in lexicographic order.
    """
    if d < 1:
        raise ValueError("delay d must be >= 1")
    k = as_probs(px).size
    seqs = sequences(k, d)
    weights = k ** np.arange(d - 1, -1, -1)
    rows = np.zeros((k ** d, k ** d))
    for i, x in enumerate(seqs):
        for key in range(k):
            rows[i, int(((x + key) % k) @ weights)] += 1.0 / k
    return Channel(rows)


@dataclass(frozen=True)
class ModularCertificate:
    key_rate: float             # (1/d) H(X^d | U)
    target: float               # H(X) / d
    independence_gap: float     # max_j max |P(x_j, u) - P(x_j) P(u)|
    tol: float

    @property
    def entropy_ok(self) -> bool:
        return abs(self.key_rate - self.target) <= self.tol

    @property
    def independence_ok(self) -> bool:
        return self.independence_gap <= self.tol

    @property
    def ok(self) -> bool:
        return self.entropy_ok and self.independence_ok


def modular_certificate(px, d: int, tol: float = 1e-10) -> ModularCertificate:
    """Check (1/d) H(X^d|U) = H(X)/d and X_j independent of U.  Both hold for uniform sources."""
    p = as_probs(px)
    k = p.size
    ch = delay_modular_aux(p, d)
    joint = product_pmf(p, d)[:, None] * ch.rows            # (x^d, u)
    key_rate = conditional_entropy(joint, (0,), (1,)) / d
    t = joint.reshape((k,) * d + (k ** d,))
    pu = joint.sum(axis=0)
    gap = 0.0
    for j in range(d):
        pxu = t.sum(axis=tuple(a for a in range(d) if a != j))
        gap = max(gap, float(np.max(np.abs(pxu - p[:, None] * pu[None, :]))))
    return ModularCertificate(key_rate, entropy(p) / d, gap, tol)


def delay_modular_system(px, d: int, payoff) -> AuxSystem:
    """Lossless super-symbol system: U modular, V = X^d, Y = V, full source disclosure."""
    p = px if isinstance(px, Pmf) else Pmf(px)
    k = p.alphabet_size
    table = payoff if isinstance(payoff, PayoffTable) else PayoffTable.from_xz(payoff, ny=k)
    if table.sizes[1] == 1:
        table = PayoffTable.from_xz(table.xz_matrix(), ny=k)
    n = k ** d
    pu = delay_modular_aux(p, d).rows
    puv = pu[:, :, None] * np.eye(n)[:, None, :]            # (x^d, u, v) with v = x^d
    py = np.broadcast_to(np.eye(n)[None, :, :], (n, n, n))  # y = v
    return AuxSystem.build(Pmf(product_pmf(p.probs, d)), puv, py, table,
                           wx=Channel.identity(k), block_length=d)


def delay_outer_min_key(px, payoff, target: float, d: int) -> float:
    """Outer bound on the smallest key rate for payoff ``target`` under lossless decoding."""
    if d < 1:
        raise ValueError("delay d must be >= 1")
    return lossless_min_key(px, payoff, target) / d


def delay_inner_min_key(px, payoff, target: float, d: int) -> float:
    """
    Achievable key rate for payoff ``target`` under lossless decoding and delay d.

    Time-shares the single-letter lossless schemes (always available) with the modular
    super-symbol scheme; the latter enters the key LP as one extra column.
    """
    if d < 1:
        raise ValueError("delay d must be >= 1")
    probs = as_probs(px)
    xz = payoff.xz_matrix() if isinstance(payoff, PayoffTable) else np.asarray(payoff, float)
    ext = lossless_extreme_set(xz, np.flatnonzero(probs > 0))
    mod = delay_inner_point(delay_modular_system(probs, d, xz), d)
    T = np.column_stack([ext.points.T, probs])
    h = np.append(ext.entropies, mod.R0)
    pay = np.append(ext.payoffs, mod.Pi)
    try:
        res = linprog_min(h, A_eq=T, b_eq=probs, A_ub=-pay[None, :], b_ub=[-target])
    except InfeasibleError:
        return math.inf
    return res.value


def delay_boundary(px, payoff, d: int, pi_grid) -> TradeoffCurve:
    """Inner and outer key rates over a grid of payoff targets."""
    rows = []
    for pi in np.atleast_1d(np.asarray(pi_grid, float)):
        inner = delay_inner_min_key(px, payoff, pi, d)
        outer = delay_outer_min_key(px, payoff, pi, d)
        if outer > inner + 1e-9:
            raise NumericalError(f"delay outer bound {outer} exceeds inner bound {inner} at Pi={pi}")
        rows.append((pi, inner, outer, d))
    return TradeoffCurve(("Pi", "R0_inner", "R0_outer", "d"), rows, "delay", {"d": d})
