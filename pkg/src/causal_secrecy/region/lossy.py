"""
Lossy examples: the binary symmetric family of achievable regions and the
equivocation boundaries obtained from log-loss payoffs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..prob import (as_probs, binary_entropy, binary_entropy_inverse, crossover_star, entropy,
                    mutual_information)

VARIANTS = ("none", "A", "B", "AB")
DEFAULT_GRID = 201


@dataclass
class TradeoffCurve:
    """Sampled curve; ``columns`` names the entries of every row of ``rows``."""

    columns: tuple[str, ...]
    rows: np.ndarray
    variant: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rows = np.atleast_2d(np.asarray(self.rows, float)).reshape(-1, len(self.columns))
        if self.columns[:2] == ("R0", "Pi") and len(self.rows) > 1:
            if np.any(np.diff(self.rows[:, 0]) <= 0):
                raise ValueError("TradeoffCurve: R0 must be strictly increasing")

    def column(self, name) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]

    def __len__(self):
        return self.rows.shape[0]


def _check_grid(grid, name):
    g = np.atleast_1d(np.asarray(grid, float))
    if np.any(g < 0) or np.any(g > 0.5):
        raise ValueError(f"{name} grid must lie in [0, 1/2]")
    return g


def bsc_point(variant: str, alpha: float, beta: float = 0.0) -> tuple[float, float, float]:
    """(R, R0, Pi) of one parametric point for Bern(1/2), agree-and-hide payoff."""
    ha = binary_entropy(alpha)
    r = 1.0 - ha
    if variant == "none":
        return r, 0.0, 0.5 * (1 - alpha)
    if variant == "A":
        return r, r, 0.5 * (1 - alpha)
    star = crossover_star(alpha, beta)
    if variant == "B":
        return r, 1.0 - binary_entropy(beta), 0.5 * (1 - star)
    if variant == "AB":
        r0 = 1.0 + binary_entropy(star) - ha - binary_entropy(beta)
        return r, max(0.0, r0), 0.5 * (1 - star)
    raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def upper_hull(points: np.ndarray) -> np.ndarray:
    """Upper concave hull of 2-D points (monotone chain), left to right."""
    pts = np.unique(np.asarray(points, float), axis=0)
    # keep the highest point for each abscissa
    last = np.append(pts[1:, 0] != pts[:-1, 0], True)
    pts = pts[last]
    hull = []
    for p in pts[::-1]:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 1e-15:
                hull.pop()
            else:
                break
        hull.append(tuple(p))
    return np.array(hull[::-1])


def pareto_front(points: np.ndarray) -> np.ndarray:
    """Points not dominated by another with smaller-or-equal x and larger y."""
    pts = np.asarray(points, float)
    pts = pts[np.lexsort((-pts[:, 1], pts[:, 0]))]
    best = np.maximum.accumulate(pts[:, 1])
    keep = np.ones(len(pts), bool)
    keep[1:] = pts[1:, 1] > best[:-1]
    return pts[keep]


def hull_value(hull: np.ndarray, x: float) -> float:
    """max over hull points left of x of the concave hull, i.e. the nondecreasing closure."""
    if x < hull[0, 0] - 1e-15:
        return float("nan")
    top = int(np.argmax(hull[:, 1]))
    if x >= hull[top, 0]:
        return float(hull[top, 1])
    return float(np.interp(x, hull[: top + 1, 0], hull[: top + 1, 1]))


def bsc_example_curve(variant: str, alpha_grid, beta_grid=None) -> TradeoffCurve:
    """
    Sampled (R, R0, Pi) points of the parametric regions.

    For ``AB`` each R slice (one per alpha) is replaced by the vertices of the upper hull
    in (R0, Pi) of all sampled points whose R does not exceed the slice value.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    alphas = _check_grid(alpha_grid, "alpha")
    betas = _check_grid([0.0] if beta_grid is None else beta_grid, "beta")
    if variant in ("none", "A"):
        rows = [(a, np.nan) + bsc_point(variant, a) for a in alphas]
        return TradeoffCurve(("alpha", "beta", "R", "R0", "Pi"), rows, variant,
                             {"alpha_grid": alphas.tolist()})
    raw = np.array([(a, b) + bsc_point(variant, a, b) for a in alphas for b in betas])
    if variant == "B":
        return TradeoffCurve(("alpha", "beta", "R", "R0", "Pi"), raw, variant,
                             {"alpha_grid": alphas.tolist(), "beta_grid": betas.tolist()})
    rows = []
    for a in np.unique(alphas):
        r = 1.0 - binary_entropy(a)
        pool = raw[raw[:, 2] <= r + 1e-15]
        for r0, pi in upper_hull(pool[:, 3:5]):
            rows.append((a, np.nan, r, r0, pi))
    return TradeoffCurve(("alpha", "beta", "R", "R0", "Pi"), rows, variant,
                         {"alpha_grid": alphas.tolist(), "beta_grid": betas.tolist(), "hull": "per-R upper"})


def _alpha_for_rate(rate):
    """Smallest alpha in [0, 1/2] with 1 - h(alpha) <= rate."""
    if rate >= 1.0:
        return 0.0
    if rate <= 0.0:
        return 0.5
    return binary_entropy_inverse(1.0 - rate)


def bsc_variant_payoff(variant: str, R: float, R0: float, grid: int = DEFAULT_GRID) -> float:
    """
    Best payoff of a parametric region at the rate pair (R, R0).

    ``none``, ``A`` and ``B`` are exact (the payoff is monotone in the parameters);
    ``AB`` maximises over the per-R upper hull of a ``grid`` x ``grid`` sample.
    """
    if R < 0 or R0 < 0:
        raise ValueError("rates must be nonnegative")
    if variant == "none":
        return 0.5 * (1 - _alpha_for_rate(R))
    if variant == "A":
        return 0.5 * (1 - _alpha_for_rate(min(R, R0)))
    if variant == "B":
        return 0.5 * (1 - crossover_star(_alpha_for_rate(R), _alpha_for_rate(R0)))
    if variant == "AB":
        a0 = _alpha_for_rate(R)
        alphas = np.linspace(a0, 0.5, grid)
        betas = np.linspace(0.0, 0.5, grid)
        return hull_value(upper_hull(pareto_front(_ab_cloud(alphas, betas))), R0)
    raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def _h(p):
    p = np.clip(p, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = -p * np.log2(p) - (1 - p) * np.log2(1 - p)
    return np.nan_to_num(t, nan=0.0)


def _ab_cloud(alphas, betas):
    """(R0, Pi) of every AB parametric point on the product grid."""
    a, b = np.meshgrid(alphas, betas, indexing="ij")
    star = a * (1 - b) + b * (1 - a)
    r0 = np.maximum(0.0, 1.0 + _h(star) - _h(a) - _h(b))
    return np.column_stack([r0.ravel(), 0.5 * (1 - star).ravel()])


def variant_payoff_grid(R_grid, R0_grid, grid: int = DEFAULT_GRID) -> dict[str, np.ndarray]:
    """Payoff of every variant on the matched grid, arrays indexed [i_R, i_R0]."""
    R_grid = np.atleast_1d(np.asarray(R_grid, float))
    R0_grid = np.atleast_1d(np.asarray(R0_grid, float))
    out = {}
    for v in VARIANTS:
        out[v] = np.array([[bsc_variant_payoff(v, r, r0, grid) for r0 in R0_grid] for r in R_grid])
    return out


# -- equivocation -----------------------------------------------------------------


@dataclass(frozen=True)
class EquivocationPoint:
    R: float
    R0: float
    D: float
    E: float


def _rows(ch):
    return np.asarray(getattr(ch, "rows", ch), float)


def _distortion(pxy, distortion):
    if distortion is None:
        nx, ny = pxy.shape
        if nx != ny:
            return float("nan")
        distortion = 1.0 - np.eye(nx)
    return float((pxy * np.asarray(distortion, float)).sum())


def equivocation_boundary(variant: str, px, channel, R0: float, distortion=None) -> EquivocationPoint:
    """
    Boundary equivocation for a fixed test channel.

    ``X``:  channel is P_{Y|X};  E = H(X) - [I(X;Y) - R0]_+, R = I(X;Y).
    ``Y``:  channel is (P_{U|X}, P_{Y|U});  E = H(Y) - [I(Y;U) - R0]_+, R = I(X;U).
    ``XY``: as ``Y`` with E = H(X,Y) - [I(X,Y;U) - R0]_+.
    D = E d(X, Y), hamming by default when the alphabets agree.
    """
    if R0 < 0:
        raise ValueError("R0 must be nonnegative")
    p = as_probs(px)
    if variant == "X":
        pxy = p[:, None] * _rows(channel)
        i = mutual_information(pxy, (0,), (1,))
        e = entropy(p) - max(0.0, i - R0)
        return EquivocationPoint(i, R0, _distortion(pxy, distortion), e)
    if variant in ("Y", "XY"):
        pu_x, py_u = (_rows(c) for c in channel)
        pxuy = p[:, None, None] * pu_x[:, :, None] * py_u[None, :, :]
        r = mutual_information(pxuy, (0,), (1,))
        pxy = pxuy.sum(axis=1)
        if variant == "Y":
            i = mutual_information(pxuy, (2,), (1,))
            h = entropy(pxy.sum(axis=0))
        else:
            i = mutual_information(pxuy, (0, 2), (1,))
            h = entropy(pxy)
        return EquivocationPoint(r, R0, _distortion(pxy, distortion), h - max(0.0, i - R0))
    raise ValueError(f"unknown equivocation variant {variant!r}; expected X, Y or XY")
