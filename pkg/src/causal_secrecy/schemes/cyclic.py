"""
Lossless scheme built from cyclic-rotation bins of the typical set.

Each kept bin holds the n rotations of one typical sequence.  The message names the bin
and the position of the source inside it, with the position one-time-padded by a key
uniform on {0, ..., n-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import budget, check_budget
from ..prob import DEFAULT_MAX_SEQUENCES, as_probs, empirical_type, product_pmf, typical_set


@dataclass
class CyclicBinCode:
    n: int
    epsilon: float
    px: np.ndarray
    bins: np.ndarray            # (num_bins, n, n): bin j, row l, position i
    types: np.ndarray           # (num_bins, |X|) row type P_j
    alphas: np.ndarray          # probability of each single row of bin j
    lookup: np.ndarray          # sequence index -> j * n + l, or -1 outside the codebook
    typical_mass: float
    fallback: np.ndarray = field(default=None)

    @property
    def num_bins(self) -> int:
        return self.bins.shape[0]

    @property
    def alphabet_size(self) -> int:
        return self.px.size

    @property
    def kept_mass(self) -> float:
        return float(self.n * self.alphas.sum())

    @property
    def discarded_mass(self) -> float:
        return self.typical_mass - self.kept_mass

    @property
    def rate(self) -> float:
        if self.num_bins == 0:
            return 0.0
        return math.ceil(math.log2(self.num_bins * self.n)) / self.n

    def members(self) -> np.ndarray:
        """All codebook sequences, bin-major."""
        return self.bins.reshape(-1, self.n)


def _seq_indices(rows, k):
    w = k ** np.arange(rows.shape[1] - 1, -1, -1, dtype=np.int64)
    return rows.astype(np.int64) @ w


def build_cyclic_bin_code(px, n: int, epsilon: float, max_sequences: int | None = None) -> CyclicBinCode:
    """Partition the typical set into rotation orbits and keep those of full size n."""
    p = as_probs(px)
    k = p.size
    cap = budget("max_sequences", DEFAULT_MAX_SEQUENCES) if max_sequences is None else max_sequences
    check_budget(k ** n, cap, "cyclic code lookup table")
    typ = typical_set(p, n, epsilon, cap)
    if typ.shape[0] == 0:
        raise ValueError(f"typical set is empty for n={n}, eps={epsilon}")
    probs = product_pmf(p, n)
    idx = _seq_indices(typ, k)
    rot = np.stack([_seq_indices(np.roll(typ, -s, axis=1), k) for s in range(n)], axis=1)
    least = rot.min(axis=1)
    sizes = np.array([np.unique(r).size for r in rot])
    bins, types, alphas = [], [], []
    lookup = np.full(k ** n, -1, dtype=np.int64)
    # typ is lexicographic, so orbits appear in the order of their least member
    seen = set()
    for row, canon, size in zip(range(typ.shape[0]), least, sizes):
        if size != n or canon in seen:
            continue
        seen.add(canon)
        members = np.unique(rot[row])                       # sorted = lexicographic
        j = len(bins)
        lookup[members] = j * n + np.arange(n)
        mat = np.array([[(m // k ** (n - 1 - i)) % k for i in range(n)] for m in members])
        bins.append(mat)
        types.append(empirical_type(mat[0], k))
        alphas.append(probs[members[0]])
    bins_arr = np.array(bins, dtype=np.int64).reshape(len(bins), n, n)
    fallback = bins_arr[0, 0] if len(bins) else typ[0]
    return CyclicBinCode(
        n=n, epsilon=epsilon, px=p, bins=bins_arr,
        types=np.array(types, float).reshape(len(bins), k),
        alphas=np.array(alphas, float), lookup=lookup,
        typical_mass=float(probs[idx].sum()), fallback=np.array(fallback),
    )


def cyclic_encode(code: CyclicBinCode, x, k: int) -> tuple[int, int]:
    """m = (J, L + k mod n); sequences outside the codebook are sent as (0, k)."""
    if not 0 <= k < code.n:
        raise ValueError(f"key {k} outside 0..{code.n - 1}")
    x = np.asarray(x)
    if x.shape != (code.n,):
        raise ValueError(f"source block must have length {code.n}")
    pos = code.lookup[int(_seq_indices(x[None, :], code.alphabet_size)[0])]
    if pos < 0:
        return 0, k
    j, l = divmod(int(pos), code.n)
    return j, (l + k) % code.n


def cyclic_decode(code: CyclicBinCode, m: tuple[int, int], k: int) -> np.ndarray:
    j, t = m
    if code.num_bins == 0:
        return code.fallback.copy()
    if not 0 <= j < code.num_bins or not 0 <= t < code.n or not 0 <= k < code.n:
        raise ValueError(f"message {m} or key {k} out of range")
    return code.bins[j, (t - k) % code.n].copy()


def encode_batch(code: CyclicBinCode, xs: np.ndarray, keys: np.ndarray):
    """Vectorised encoder: returns (J, T, in_codebook) arrays."""
    pos = code.lookup[_seq_indices(xs, code.alphabet_size)]
    inside = pos >= 0
    j = np.where(inside, pos // code.n, 0)
    t = np.where(inside, (pos % code.n + keys) % code.n, keys)
    return j, t, inside


def decode_batch(code: CyclicBinCode, j: np.ndarray, t: np.ndarray, keys: np.ndarray) -> np.ndarray:
    if code.num_bins == 0:
        return np.broadcast_to(code.fallback, (j.size, code.n)).copy()
    return code.bins[j, (t - keys) % code.n]


@dataclass(frozen=True)
class BinReport:
    ok: bool
    violations: tuple                 # (bin, "row" | "column", index)


def verify_bin_property(code_or_bins) -> BinReport:
    """Every row and every column of each bin matrix has the same empirical type."""
    if isinstance(code_or_bins, CyclicBinCode):
        bins, k = code_or_bins.bins, code_or_bins.alphabet_size
    else:
        bins = np.asarray(code_or_bins)
        if bins.ndim == 2:
            bins = bins[None]
        k = int(bins.max()) + 1 if bins.size else 1
    bad = []
    for j, mat in enumerate(bins):
        rows = [tuple(np.bincount(r, minlength=k)) for r in mat]
        cols = [tuple(np.bincount(c, minlength=k)) for c in mat.T]
        # the reference is the most common row type, so a single corrupted row is the one reported
        vals, counts = np.unique(np.array(rows), axis=0, return_counts=True)
        ref = tuple(vals[int(np.argmax(counts))])
        bad += [(j, "row", i) for i, r in enumerate(rows) if r != ref]
        bad += [(j, "column", i) for i, c in enumerate(cols) if c != ref]
    return BinReport(not bad, tuple(bad))
