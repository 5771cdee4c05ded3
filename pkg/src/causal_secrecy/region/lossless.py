"""
Key-payoff tradeoff when decoding must be lossless and the source is disclosed causally.

The boundary ``Pi(R0)`` is the maximum of ``sum_u P(u) d(P_{X|U=u})`` over
decompositions of P_X into conditionals whose average entropy is at most R0,
where ``d(p) = min_z E_p pi(X, z)``.  Restricting the conditionals to the
vertices of the cells on which a single z is optimal turns this into an LP.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..errors import NumericalError, ResourceError
from ..prob import PayoffTable, Pmf, as_probs, entropy
from ..simplex import InfeasibleError, linprog_max, linprog_min

MAX_X = 6
MAX_Z = 10
DEDUPE_TOL = 1e-9


@dataclass(frozen=True)
class ExtremePointSet:
    points: np.ndarray          # (num_points, |X|), one pmf per row
    entropies: np.ndarray       # H(X | U = u) per point
    payoffs: np.ndarray         # min_z E pi(X, z) per point

    def __len__(self):
        return self.points.shape[0]

    def pmfs(self) -> list[Pmf]:
        return [Pmf(p) for p in self.points]


def _xz(payoff) -> np.ndarray:
    if isinstance(payoff, PayoffTable):
        return payoff.xz_matrix()
    xz = np.asarray(payoff, float)
    if xz.ndim != 2:
        raise ValueError("lossless payoff must be an (|X|, |Z|) matrix or a PayoffTable")
    return xz


def envelope(points: np.ndarray, xz: np.ndarray) -> np.ndarray:
    """d(p) = min_z sum_x p(x) pi(x, z), row-wise."""
    return (np.atleast_2d(points) @ xz).min(axis=1)


def hamming_uniform_set(k: int) -> np.ndarray:
    """All 2^k - 1 uniform distributions on nonempty subsets, ordered by support size then lexicographically."""
    out = []
    for size in range(1, k + 1):
        for subset in itertools.combinations(range(k), size):
            p = np.zeros(k)
            p[list(subset)] = 1.0 / size
            out.append(p)
    return np.array(out)


def _is_hamming(xz):
    k = xz.shape[0]
    return xz.shape == (k, k) and np.array_equal(xz, 1.0 - np.eye(k))


def cell_vertices(xz: np.ndarray) -> np.ndarray:
    """
    Vertices of the simplex cells {p : z minimises E_p pi(X, z)} over all z.

    Every choice of |X|-1 active constraints (pairwise ties between z and another action,
    or p(x) = 0) is solved together with sum(p) = 1; feasible, z-optimal solutions are kept.
    """
    nx, nz = xz.shape
    pts = []
    for z in range(nz):
        cons = []
        for z2 in range(nz):
            if z2 != z:
                cons.append(xz[:, z] - xz[:, z2])
        for x in range(nx):
            e = np.zeros(nx)
            e[x] = 1.0
            cons.append(e)
        cons = np.array(cons)
        for active in itertools.combinations(range(len(cons)), nx - 1):
            A = np.vstack([cons[list(active)], np.ones(nx)])
            rhs = np.zeros(nx)
            rhs[-1] = 1.0
            if abs(np.linalg.det(A)) < 1e-12:
                continue
            p = np.linalg.solve(A, rhs)
            if np.any(p < -DEDUPE_TOL):
                continue
            vals = p @ xz
            if vals[z] > vals.min() + DEDUPE_TOL:
                continue
            p = np.clip(p, 0.0, None)
            pts.append(p / p.sum())
    return _dedupe(np.array(pts).reshape(-1, nx))


def _dedupe(pts):
    out = []
    for p in pts:
        if not any(np.max(np.abs(p - q)) <= DEDUPE_TOL for q in out):
            out.append(p)
    out.sort(key=lambda p: (np.count_nonzero(p > DEDUPE_TOL), tuple(-p)))
    return np.array(out)


def lossless_extreme_set(payoff, px_support=None) -> ExtremePointSet:
    """
    Candidate conditionals P_{X|U=u} for the lossless LP.

    ``px_support`` restricts the construction to the listed symbols (the LP cannot put
    weight outside the source support); points are embedded back into the full alphabet.
    """
    xz = _xz(payoff)
    nx, nz = xz.shape
    support = np.arange(nx) if px_support is None else np.asarray(sorted(px_support), int)
    if support.size > MAX_X or nz > MAX_Z:
        raise ResourceError(f"vertex enumeration budget: |X|={support.size} (max {MAX_X}), |Z|={nz} (max {MAX_Z})")
    sub = xz[support]
    if _is_hamming(xz):
        local = hamming_uniform_set(support.size)
    else:
        local = cell_vertices(sub)
    pts = np.zeros((local.shape[0], nx))
    pts[:, support] = local
    return ExtremePointSet(
        points=pts,
        entropies=np.array([entropy(p) for p in pts]),
        payoffs=envelope(pts, xz),
    )


def _lp_matrices(px, eps: ExtremePointSet):
    probs = as_probs(px)
    # rows of T outside the support force zero weight on points that use them
    return eps.points.T, probs


def lossless_lp(px, payoff, r0: float, extreme: ExtremePointSet | None = None) -> float:
    """Maximum payoff at key rate ``r0`` (lossless decoding, causal source disclosure)."""
    if r0 < 0:
        raise ValueError("lossless_lp: R0 must be nonnegative")
    probs = as_probs(px)
    if extreme is None:
        extreme = lossless_extreme_set(payoff, np.flatnonzero(probs > 0))
    T, b = _lp_matrices(probs, extreme)
    try:
        res = linprog_max(extreme.payoffs, A_eq=T, b_eq=b,
                          A_ub=extreme.entropies[None, :], b_ub=[r0])
    except InfeasibleError as exc:
        raise NumericalError(f"lossless LP infeasible; extreme set is broken: {exc}") from exc
    return res.value


def lossless_min_key(px, payoff, target: float, extreme: ExtremePointSet | None = None) -> float:
    """Smallest R0 with Pi(R0) >= target; ``inf`` if the target exceeds the maximum payoff."""
    probs = as_probs(px)
    if extreme is None:
        extreme = lossless_extreme_set(payoff, np.flatnonzero(probs > 0))
    T, b = _lp_matrices(probs, extreme)
    try:
        res = linprog_min(extreme.entropies, A_eq=T, b_eq=b,
                          A_ub=-extreme.payoffs[None, :], b_ub=[-target])
    except InfeasibleError:
        return math.inf
    return res.value


def phi(r0: float) -> float:
    """Piecewise-linear interpolation of the points (log2 k, (k-1)/k), k = 1, 2, ..."""
    if r0 < 0:
        raise ValueError("phi: R0 must be nonnegative")
    k = 1
    while math.log2(k + 1) < r0:
        k += 1
    x0, x1 = math.log2(k), math.log2(k + 1)
    y0, y1 = (k - 1) / k, k / (k + 1)
    t = (r0 - x0) / (x1 - x0)
    return y0 + t * (y1 - y0)


def pi_max_hamming(px) -> float:
    return 1.0 - float(np.max(as_probs(px)))


def hamming_tradeoff(px, r0: float) -> float:
    """Closed-form boundary for hamming payoff: min(phi(R0), 1 - max_x P_X(x))."""
    if r0 < 0:
        raise ValueError("hamming_tradeoff: R0 must be nonnegative")
    return min(phi(r0), pi_max_hamming(px))


def phi_knots(k_max: int) -> list[tuple[float, float]]:
    return [(math.log2(k), (k - 1) / k) for k in range(1, k_max + 1)]


@dataclass
class UniformMixture:
    weights: np.ndarray
    components: np.ndarray      # one pmf per row, each uniform on its support
    mode: str                   # "equal-size" or "anchored"

    def mixture(self) -> np.ndarray:
        return self.weights @ self.components

    def supports(self) -> list[tuple[int, ...]]:
        return [tuple(np.flatnonzero(c > 0)) for c in self.components]


def max_uniform_size(p) -> int:
    """The N with max_x p(x) in [1/(N+1), 1/N]."""
    return int(math.floor(1.0 / float(np.max(as_probs(p))) + 1e-12))


def _equal_size(r, n, tol=1e-13):
    """Split mass vector r (max r <= sum r / n) into weighted uniforms on n-subsets."""
    r = np.array(r, float)
    weights, comps = [], []
    k = r.size
    if n == 0:
        return weights, comps
    for _ in range(4 * k + 4):
        s = r.sum()
        if s <= tol:
            break
        order = sorted(range(k), key=lambda i: (-r[i], i))
        inside, outside = order[:n], order[n:]
        w = n * min(r[i] for i in inside)
        if outside:
            w = min(w, s - n * max(r[i] for i in outside))
        w = min(w, s)
        if w <= tol:
            raise NumericalError("uniform decomposition stalled")
        comp = np.zeros(k)
        comp[inside] = 1.0 / n
        r[inside] -= w / n
        r[np.abs(r) < tol] = 0.0
        weights.append(w)
        comps.append(comp)
    if r.sum() > 1e-10:
        raise NumericalError("uniform decomposition did not exhaust the mass")
    return weights, comps


def decompose_into_uniforms(p, n: int) -> UniformMixture:
    """
    Write p as a convex combination of uniform distributions.

    For ``1 <= n <= N`` (N = floor(1 / max p)) every component is uniform on exactly n symbols.
    For ``n = N + 1`` every component is uniform on N or N + 1 symbols and contains the
    most likely symbol of p.
    """
    probs = as_probs(p)
    N = max_uniform_size(probs)
    if n < 1 or n > N + 1:
        raise ValueError(f"decompose_into_uniforms: n={n} outside admissible range 1..{N + 1}")
    if n <= N:
        w, c = _equal_size(probs, n)
        return _mixture(w, c, "equal-size")

    top = int(np.argmax(probs))
    pt = probs[top]
    lo, hi = 1.0 / (N + 1), 1.0 / N
    a = 1.0 if hi == lo else (pt - lo) / (hi - lo)
    a = min(max(a, 0.0), 1.0)
    c1, c2 = a / N, (1 - a) / (N + 1)
    rest = probs.copy()
    rest[top] = 0.0
    lower = np.maximum(0.0, rest - c2)
    upper = np.minimum(rest, c1)
    target = a * (N - 1) / N
    L, U = lower.sum(), upper.sum()
    if not L - 1e-12 <= target <= U + 1e-12:
        raise NumericalError("anchored uniform decomposition infeasible")
    theta = 0.0 if U - L <= 1e-15 else min(max((target - L) / (U - L), 0.0), 1.0)
    u = lower + theta * (upper - lower)
    v = rest - u
    weights, comps = [], []
    # u is the mass the N-symbol components give to the other symbols, v the (N+1)-symbol part
    for mass, size, share in ((u, N - 1, a), (v, N, 1 - a)):
        if share <= 1e-15:
            continue
        if size == 0:
            sub_w, sub_c = [1.0], [np.zeros(probs.size)]
        else:
            sub_w, sub_c = _equal_size(mass / mass.sum(), size)
        for w, comp in zip(sub_w, sub_c):
            full = comp * size / (size + 1)
            full[top] = 1.0 / (size + 1)
            weights.append(w * share)
            comps.append(full)
    return _mixture(weights, comps, "anchored")


def _mixture(weights, comps, mode):
    w = np.array(weights, float)
    c = np.array(comps, float).reshape(len(weights), -1)
    order = sorted(range(len(w)), key=lambda i: tuple(-c[i]))
    return UniformMixture(weights=w[order], components=c[order], mode=mode)
