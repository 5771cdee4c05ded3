"""
Exact finite-alphabet probability.

Distributions, channels and payoff tables are thin immutable wrappers around
numpy arrays.  All information measures are in bits, with 0 log 0 = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ResourceError, budget

NORM_TOL = 1e-12
CMP_TOL = 1e-9
NEG_INF = float("-inf")

DEFAULT_MAX_SEQUENCES = 2**24


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def _check_simplex(probs, what):
    if probs.size == 0:
        raise ValueError(f"{what}: empty distribution")
    if not np.all(np.isfinite(probs)):
        raise ValueError(f"{what}: non-finite entries")
    if np.any(probs < 0):
        raise ValueError(f"{what}: negative entries")
    s = probs.sum()
    if abs(s - 1.0) > NORM_TOL * max(1, probs.size):
        raise ValueError(f"{what}: entries sum to {s!r}, not 1")


@dataclass(frozen=True)
class Pmf:
    probs: np.ndarray

    def __post_init__(self):
        p = _frozen(self.probs)
        if p.ndim != 1:
            raise ValueError("Pmf: probs must be a vector")
        _check_simplex(p, "Pmf")
        object.__setattr__(self, "probs", p)

    @property
    def alphabet_size(self) -> int:
        return self.probs.size

    @classmethod
    def uniform(cls, k: int) -> "Pmf":
        return cls(np.full(k, 1.0 / k))

    @classmethod
    def point(cls, k: int, at: int = 0) -> "Pmf":
        p = np.zeros(k)
        p[at] = 1.0
        return cls(p)

    @classmethod
    def bernoulli(cls, p1: float) -> "Pmf":
        return cls([1.0 - p1, p1])

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.probs > 0)

    def __len__(self):
        return self.alphabet_size


@dataclass(frozen=True)
class Channel:
    """Row-stochastic conditional table, ``rows[a, b] = P(b | a)``."""

    rows: np.ndarray

    def __post_init__(self):
        r = _frozen(self.rows)
        if r.ndim != 2:
            raise ValueError("Channel: rows must be a matrix")
        for i, row in enumerate(r):
            _check_simplex(row, f"Channel row {i}")
        object.__setattr__(self, "rows", r)

    @property
    def input_size(self) -> int:
        return self.rows.shape[0]

    @property
    def output_size(self) -> int:
        return self.rows.shape[1]

    def row(self, a: int) -> Pmf:
        return Pmf(self.rows[a])

    @classmethod
    def identity(cls, k: int) -> "Channel":
        return cls(np.eye(k))

    @classmethod
    def constant(cls, k_in: int, out: Pmf | Sequence[float] | None = None) -> "Channel":
        """Channel whose output ignores its input (a single-symbol output by default)."""
        probs = np.array([1.0]) if out is None else np.asarray(getattr(out, "probs", out), float)
        return cls(np.tile(probs, (k_in, 1)))

    def is_identity(self) -> bool:
        return self.input_size == self.output_size and np.array_equal(self.rows, np.eye(self.input_size))

    def is_trivial(self) -> bool:
        """True when the output carries no information about the input."""
        return bool(np.allclose(self.rows, self.rows[0], atol=NORM_TOL, rtol=0))


def bsc(alpha: float) -> Channel:
    _check_unit(alpha, "alpha")
    return Channel([[1 - alpha, alpha], [alpha, 1 - alpha]])


@dataclass(frozen=True)
class JointPmf:
    probs: np.ndarray

    def __post_init__(self):
        p = _frozen(self.probs)
        if p.ndim == 0:
            raise ValueError("JointPmf: need at least one axis")
        _check_simplex(p.ravel(), "JointPmf")
        object.__setattr__(self, "probs", p)

    @property
    def axis_sizes(self) -> tuple[int, ...]:
        return self.probs.shape

    @property
    def ndim(self) -> int:
        return self.probs.ndim

    def marginal(self, axes: Iterable[int]) -> np.ndarray:
        return marginal(self.probs, axes)

    @classmethod
    def from_channel(cls, px: Pmf, ch: Channel) -> "JointPmf":
        return cls(px.probs[:, None] * ch.rows)


@dataclass(frozen=True)
class PayoffTable:
    """Per-symbol payoff ``values[x, y, z]``; ``-inf`` only when ``allow_neg_inf``."""

    values: np.ndarray
    allow_neg_inf: bool = False

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 3:
            raise ValueError("PayoffTable: values must have shape (|X|, |Y|, |Z|)")
        if np.any(np.isnan(v)) or np.any(v == np.inf):
            raise ValueError("PayoffTable: NaN or +inf entries")
        if np.any(v == NEG_INF) and not self.allow_neg_inf:
            raise ValueError("PayoffTable: -inf entries need allow_neg_inf (whp criterion only)")
        object.__setattr__(self, "values", v)

    @property
    def sizes(self) -> tuple[int, int, int]:
        return self.values.shape

    @classmethod
    def from_xz(cls, xz, ny: int = 1) -> "PayoffTable":
        """Payoff that ignores the reconstruction, ``pi(x, z)`` broadcast over ``ny`` values of y."""
        xz = np.asarray(xz, float)
        return cls(np.repeat(xz[:, None, :], ny, axis=1))

    @classmethod
    def hamming(cls, k: int, ny: int = 1) -> "PayoffTable":
        return cls.from_xz(1.0 - np.eye(k), ny)

    @classmethod
    def agree_and_hide(cls, k: int) -> "PayoffTable":
        """``1{x = y, x != z}`` on a k-ary alphabet."""
        x, y, z = np.meshgrid(np.arange(k), np.arange(k), np.arange(k), indexing="ij")
        return cls(((x == y) & (x != z)).astype(float))

    @classmethod
    def lossless(cls, xz) -> "PayoffTable":
        """``pi(x, z)`` when x = y, ``-inf`` otherwise (forces lossless decoding under whp)."""
        xz = np.asarray(xz, float)
        k = xz.shape[0]
        v = np.full((k, k, xz.shape[1]), NEG_INF)
        v[np.arange(k), np.arange(k), :] = xz
        return cls(v, allow_neg_inf=True)

    def xz_matrix(self) -> np.ndarray:
        """The ``pi(x, z)`` matrix for lossless use (diagonal y = x, or a trivial y axis)."""
        nx, ny, _ = self.sizes
        if ny == 1:
            return np.array(self.values[:, 0, :])
        if ny != nx:
            raise ValueError("PayoffTable: no lossless (x, z) view when |Y| differs from |X|")
        return np.array(self.values[np.arange(nx), np.arange(nx), :])


def as_probs(p) -> np.ndarray:
    if isinstance(p, (Pmf, JointPmf)):
        return p.probs
    return np.asarray(p, float)


def marginal(probs: np.ndarray, axes: Iterable[int]) -> np.ndarray:
    axes = tuple(sorted(set(axes)))
    drop = tuple(a for a in range(probs.ndim) if a not in axes)
    return probs.sum(axis=drop) if drop else probs


def plogp_sum(p: np.ndarray) -> float:
    p = np.asarray(p, float).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def entropy(p) -> float:
    """Shannon entropy in bits."""
    return max(0.0, plogp_sum(as_probs(p)))


def _axes(joint, axes):
    axes = tuple(axes)
    nd = as_probs(joint).ndim
    for a in axes:
        if not 0 <= a < nd:
            raise ValueError(f"axis {a} out of range for a {nd}-axis joint")
    return axes


def joint_entropy(joint, axes) -> float:
    axes = _axes(joint, axes)
    if not axes:
        return 0.0
    return entropy(marginal(as_probs(joint), axes))


def conditional_entropy(joint, target_axes, given_axes=()) -> float:
    """H(target | given) = H(target, given) - H(given)."""
    t, g = _axes(joint, target_axes), _axes(joint, given_axes)
    if set(t) & set(g):
        raise ValueError("conditional_entropy: target and given axes overlap")
    h = joint_entropy(joint, t + g) - joint_entropy(joint, g)
    return max(0.0, h)


def mutual_information(joint, axes_a, axes_b, given_axes=()) -> float:
    """I(A; B | C) from a dense joint table, clamped at zero."""
    a, b, c = _axes(joint, axes_a), _axes(joint, axes_b), _axes(joint, given_axes)
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise ValueError("mutual_information: axis sets must be disjoint")
    val = (joint_entropy(joint, a + c) + joint_entropy(joint, b + c)
           - joint_entropy(joint, a + b + c) - joint_entropy(joint, c))
    return max(0.0, val)


def information_density(joint, a, b, axes_a=(0,), axes_b=(1,)) -> float:
    """log2 P(a,b) / (P(a) P(b)) for outcomes ``a`` on ``axes_a`` and ``b`` on ``axes_b``."""
    probs = as_probs(joint)
    axes_a, axes_b = _axes(probs, axes_a), _axes(probs, axes_b)
    if set(axes_a) & set(axes_b):
        raise ValueError("information_density: axis sets overlap")
    a = (a,) if np.isscalar(a) else tuple(a)
    b = (b,) if np.isscalar(b) else tuple(b)
    pab = marginal(probs, axes_a + axes_b)
    # marginal() sorts axes; index accordingly
    order = sorted(axes_a + axes_b)
    idx = dict(zip(axes_a + axes_b, a + b))
    p_joint = pab[tuple(idx[ax] for ax in order)]
    pa = marginal(probs, axes_a)[tuple(dict(zip(axes_a, a))[ax] for ax in sorted(axes_a))]
    pb = marginal(probs, axes_b)[tuple(dict(zip(axes_b, b))[ax] for ax in sorted(axes_b))]
    if p_joint <= 0:
        raise ValueError("information_density: undefined for a zero-probability pair")
    return float(np.log2(p_joint / (pa * pb)))


def total_variation(p, q) -> float:
    """Half the L1 distance between two tables of the same shape."""
    p, q = as_probs(p), as_probs(q)
    if p.shape != q.shape:
        raise ValueError(f"total_variation: shape mismatch {p.shape} vs {q.shape}")
    return float(0.5 * np.abs(p - q).sum())


def _check_unit(x, name):
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")


def binary_entropy(alpha: float) -> float:
    _check_unit(alpha, "alpha")
    return plogp_sum([alpha, 1.0 - alpha])


def crossover_star(alpha: float, beta: float) -> float:
    """Crossover of two cascaded binary symmetric channels."""
    _check_unit(alpha, "alpha")
    _check_unit(beta, "beta")
    return alpha * (1 - beta) + beta * (1 - alpha)


def binary_entropy_inverse(h: float, tol: float = 1e-15) -> float:
    """The alpha in [0, 1/2] with binary_entropy(alpha) = h."""
    if not -1e-12 <= h <= 1 + 1e-12:
        raise ValueError(f"binary entropy value {h!r} outside [0, 1]")
    h = min(max(h, 0.0), 1.0)
    lo, hi = 0.0, 0.5
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < h:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def product_pmf(p, n: int) -> np.ndarray:
    """Distribution of n i.i.d. draws, flattened in lexicographic order (first symbol most significant)."""
    p = as_probs(p)
    out = np.ones(1)
    for _ in range(n):
        out = np.multiply.outer(out, p).ravel()
    return out


def product_channel(rows: np.ndarray, n: int) -> np.ndarray:
    """n-fold memoryless extension of a channel matrix, lexicographic on both sides."""
    out = np.ones((1, 1))
    for _ in range(n):
        out = np.kron(out, rows)
    return out


def sequences(k: int, n: int) -> np.ndarray:
    """All k-ary sequences of length n as rows, in lexicographic order."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((k,) * n).reshape(n, -1).T
    return grids.astype(np.int64)


def sequence_index(seq, k: int) -> int:
    idx = 0
    for s in seq:
        idx = idx * k + int(s)
    return idx


def empirical_type(seq, k: int) -> np.ndarray:
    seq = np.asarray(seq)
    return np.bincount(seq, minlength=k) / max(1, seq.size)


def typical_set(px, n: int, eps: float, max_sequences: int | None = None) -> np.ndarray:
    """
    Epsilon-typical sequences of length n, as rows of symbol indices in lexicographic order.

    A sequence is kept when ``|T(x) - P(x)| < eps * P(x)`` for every symbol with P(x) > 0.
    Zero-mass symbols are removed from the alphabet first, so no returned sequence uses them.
    """
    probs = as_probs(px)
    if n < 1:
        raise ValueError("typical_set: n must be >= 1")
    if eps <= 0:
        raise ValueError("typical_set: eps must be positive")
    cap = budget("max_sequences", DEFAULT_MAX_SEQUENCES) if max_sequences is None else max_sequences
    support = np.flatnonzero(probs > 0)
    k = support.size
    if float(k) ** n > cap:
        raise ResourceError(f"typical_set: {k}^{n} sequences exceed budget {cap}")
    ps = probs[support]
    # enumerate by type, then expand each typical type into its sequences
    rows = []
    for counts in _compositions(n, k):
        t = np.asarray(counts) / n
        if np.all(np.abs(t - ps) < eps * ps):
            rows.extend(_arrangements(counts))
    if not rows:
        return np.zeros((0, n), dtype=np.int64)
    out = support[np.array(sorted(rows), dtype=np.int64)]
    return out


def _compositions(n, k):
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def _arrangements(counts):
    """All distinct sequences with the given symbol counts (multiset permutations)."""
    n = sum(counts)
    k = len(counts)
    result = []
    cur = [0] * n
    left = list(counts)

    def rec(pos):
        if pos == n:
            result.append(tuple(cur))
            return
        for s in range(k):
            if left[s]:
                left[s] -= 1
                cur[pos] = s
                rec(pos + 1)
                left[s] += 1

    rec(0)
    return result


def is_product(block: np.ndarray, px, d: int, tol: float = CMP_TOL) -> bool:
    return bool(np.allclose(np.asarray(block, float), product_pmf(px, d), atol=tol, rtol=0))


def per_symbol_marginal(block: np.ndarray, k: int, d: int) -> np.ndarray:
    """Marginal of the first coordinate of a block distribution over k^d symbols."""
    return np.asarray(block, float).reshape((k,) * d).sum(axis=tuple(range(1, d)))


def random_pmf(rng: np.random.Generator, k: int, alpha: float = 1.0) -> Pmf:
    return Pmf(rng.dirichlet(np.full(k, alpha)))


def random_channel(rng: np.random.Generator, k_in: int, k_out: int, alpha: float = 1.0) -> Channel:
    return Channel(rng.dirichlet(np.full(k_out, alpha), size=k_in))


__all__ = [
    "NEG_INF", "Pmf", "Channel", "JointPmf", "PayoffTable", "bsc",
    "entropy", "joint_entropy", "conditional_entropy", "mutual_information",
    "information_density", "total_variation", "binary_entropy", "crossover_star",
    "binary_entropy_inverse", "typical_set", "product_pmf", "product_channel", "sequences",
    "sequence_index", "marginal", "random_pmf", "random_channel",
]
