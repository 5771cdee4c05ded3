"""
Auxiliary systems and single-point evaluation of the rate / key / payoff triple.

An :class:`AuxSystem` fixes ``P_X P_{UV|X} P_{Y|UV} P_{Wx|X} P_{Wy|Y}`` and a payoff.
The source may be a block ``X^d`` (for delayed disclosure); disclosure channels and
payoff are always per symbol and are extended memorylessly over the block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..prob import NEG_INF, Channel, PayoffTable, Pmf, mutual_information, product_channel


@dataclass(frozen=True)
class RateTriple:
    R: float
    R0: float
    Pi: float

    def __post_init__(self):
        if self.R < -1e-12 or self.R0 < -1e-12:
            raise ValueError(f"RateTriple: negative rate ({self.R}, {self.R0})")
        object.__setattr__(self, "R", max(0.0, float(self.R)))
        object.__setattr__(self, "R0", max(0.0, float(self.R0)))
        object.__setattr__(self, "Pi", float(self.Pi))

    def as_tuple(self):
        return (self.R, self.R0, self.Pi)


@dataclass(frozen=True)
class AuxSystem:
    """
    ``p_uv_given_x`` maps x to the flattened pair (u, v) with u most significant;
    ``p_y_given_uv`` is indexed by the same flattened pair.
    """

    px: Pmf
    p_uv_given_x: Channel
    p_y_given_uv: Channel
    wx: Channel
    wy: Channel
    payoff: PayoffTable
    u_size: int
    block_length: int = 1

    def __post_init__(self):
        d = self.block_length
        if d < 1:
            raise ValueError("block_length must be >= 1")
        nx, ny, _ = self.payoff.sizes
        if self.px.alphabet_size != nx ** d:
            raise ValueError(f"source alphabet {self.px.alphabet_size} does not match payoff |X|^{d} = {nx ** d}")
        if self.p_uv_given_x.input_size != self.px.alphabet_size:
            raise ValueError("P_{UV|X} input size must match the source alphabet")
        nuv = self.p_uv_given_x.output_size
        if self.u_size < 1 or nuv % self.u_size:
            raise ValueError(f"|U|*|V| = {nuv} is not divisible by |U| = {self.u_size}")
        if self.p_y_given_uv.input_size != nuv:
            raise ValueError("P_{Y|UV} input size must equal |U|*|V|")
        if self.p_y_given_uv.output_size != ny ** d:
            raise ValueError(f"reconstruction alphabet {self.p_y_given_uv.output_size} does not match |Y|^{d} = {ny ** d}")
        if self.wx.input_size != nx:
            raise ValueError("P_{Wx|X} input size must equal |X|")
        if self.wy.input_size != ny:
            raise ValueError("P_{Wy|Y} input size must equal |Y|")

    @classmethod
    def build(cls, px, p_uv_given_x, p_y_given_uv, payoff: PayoffTable, wx=None, wy=None,
              block_length: int = 1) -> "AuxSystem":
        """Build from dense arrays shaped (|X|, |U|, |V|) and (|U|, |V|, |Y|)."""
        px = px if isinstance(px, Pmf) else Pmf(px)
        puv = np.asarray(p_uv_given_x, float)
        py = np.asarray(p_y_given_uv, float)
        if puv.ndim != 3 or py.ndim != 3 or puv.shape[1:] != py.shape[:2]:
            raise ValueError("expected P_{UV|X} as (|X|,|U|,|V|) and P_{Y|UV} as (|U|,|V|,|Y|)")
        nx, ny, _ = payoff.sizes
        wx = Channel.constant(nx) if wx is None else (wx if isinstance(wx, Channel) else Channel(wx))
        wy = Channel.constant(ny) if wy is None else (wy if isinstance(wy, Channel) else Channel(wy))
        return cls(px=px, p_uv_given_x=Channel(puv.reshape(puv.shape[0], -1)),
                   p_y_given_uv=Channel(py.reshape(-1, py.shape[2])), wx=wx, wy=wy,
                   payoff=payoff, u_size=puv.shape[1], block_length=block_length)

    @property
    def v_size(self) -> int:
        return self.p_uv_given_x.output_size // self.u_size

    @property
    def symbol_sizes(self) -> tuple[int, int]:
        nx, ny, _ = self.payoff.sizes
        return nx, ny

    def uv_tensor(self) -> np.ndarray:
        return self.p_uv_given_x.rows.reshape(-1, self.u_size, self.v_size)

    def y_tensor(self) -> np.ndarray:
        return self.p_y_given_uv.rows.reshape(self.u_size, self.v_size, -1)

    def joint_xuvy(self) -> np.ndarray:
        """P[x, u, v, y] over block alphabets."""
        puv = self.px.probs[:, None, None] * self.uv_tensor()
        return puv[..., None] * self.y_tensor()[None]

    def joint(self) -> np.ndarray:
        """P[x, u, v, y, wx, wy] with the disclosure channels extended over the block."""
        d = self.block_length
        wx = product_channel(self.wx.rows, d)
        wy = product_channel(self.wy.rows, d)
        base = self.joint_xuvy()
        j = base[..., None, None] * wx[:, None, None, None, :, None] * wy[None, None, None, :, None, :]
        return j

    def with_block(self, px_block, p_uv_given_x, p_y_given_uv, d) -> "AuxSystem":
        return AuxSystem.build(px_block, p_uv_given_x, p_y_given_uv, self.payoff, self.wx, self.wy, d)


def conditional_min_payoff(p_xyu: np.ndarray, payoff: PayoffTable) -> float:
    """
    sum_u min_z sum_{x,y} P(x, y, u) pi(x, y, z) for a per-symbol joint P[x, y, u].

    Zero-probability cells contribute 0 even when the payoff is -inf.
    """
    vals = payoff.values                                    # (x, y, z)
    w = p_xyu[:, :, :, None]                                # (x, y, u, 1)
    v = vals[:, :, None, :]                                 # (x, y, 1, z)
    contrib = np.where(w > 0, w * np.where(np.isfinite(v), v, 0.0), 0.0)
    neg = np.any((w > 0) & np.isneginf(v), axis=(0, 1))     # (u, z)
    per_uz = contrib.sum(axis=(0, 1))
    per_uz = np.where(neg, NEG_INF, per_uz)
    mass_u = p_xyu.sum(axis=(0, 1))
    total = 0.0
    for u in range(p_xyu.shape[2]):
        if mass_u[u] <= 0:
            continue
        best = per_uz[u].min()
        if best == NEG_INF:
            return NEG_INF
        total += best
    return float(total)


def best_actions(p_xyu: np.ndarray, payoff: PayoffTable) -> np.ndarray:
    """Argmin z per u (lowest index on ties), -1 where P(u) = 0."""
    vals = payoff.values
    w = p_xyu[:, :, :, None]
    v = vals[:, :, None, :]
    contrib = np.where(w > 0, w * np.where(np.isfinite(v), v, 0.0), 0.0).sum(axis=(0, 1))
    neg = np.any((w > 0) & np.isneginf(v), axis=(0, 1))
    contrib = np.where(neg, -np.inf, contrib)
    out = np.argmin(contrib, axis=1)
    out[p_xyu.sum(axis=(0, 1)) <= 0] = -1
    return out


def _position_joint(p_x_y_u: np.ndarray, nx: int, ny: int, d: int, j: int) -> np.ndarray:
    """Marginal P[x_j, y_j, u] from a block joint P[x^d, y^d, u]."""
    nu = p_x_y_u.shape[-1]
    t = p_x_y_u.reshape((nx,) * d + (ny,) * d + (nu,))
    keep = (j, d + j, 2 * d)
    drop = tuple(a for a in range(2 * d + 1) if a not in keep)
    return t.sum(axis=drop)


def _block_payoff(p_x_y_c: np.ndarray, aux: AuxSystem) -> float:
    """Average over block positions of the per-position best-response payoff given the context axis."""
    nx, ny = aux.symbol_sizes
    d = aux.block_length
    vals = [conditional_min_payoff(_position_joint(p_x_y_c, nx, ny, d, j), aux.payoff) for j in range(d)]
    if any(v == NEG_INF for v in vals):
        return NEG_INF
    return float(np.mean(vals))


def inner_point(aux: AuxSystem) -> RateTriple:
    """
    R = I(X; U, V), R0 = I(Wx Wy; V | U), Pi = min_{z(u)} E pi(X, Y, z(U)).

    For a block system every quantity is normalised by the block length and the
    adversary picks a separate action for each block position.
    """
    d = aux.block_length
    j = aux.joint()                                         # (x, u, v, y, wx, wy)
    nwx, nwy = j.shape[4], j.shape[5]
    r = mutual_information(j, (0,), (1, 2))
    w = j.reshape(j.shape[:4] + (nwx * nwy,))               # (x, u, v, y, w)
    r0 = mutual_information(w, (4,), (2,), (1,))
    pxyu = aux.joint_xuvy().sum(axis=2).transpose(0, 2, 1)  # (x, y, u)
    pi = _block_payoff(pxyu, aux)
    return RateTriple(r / d, r0 / d, pi)


def disclosure_variant_point(mode: str, aux: AuxSystem) -> RateTriple:
    """
    Triples when the current disclosure symbol replaces the causal history.

    ``current``: only W_i is seen; R = I(X; Y), R0 = 0, Pi = min over z(wx, wy).
    ``full``: W^i or W^n is seen; rates as for causal disclosure, Pi = min over z(u, wx, wy).
    """
    if aux.block_length != 1:
        raise ValueError("disclosure variants are defined for single-letter systems")
    j = aux.joint()                                         # (x, u, v, y, wx, wy)
    nwx, nwy = j.shape[4], j.shape[5]
    if mode == "current":
        pxy = j.sum(axis=(1, 2, 4, 5))
        r = mutual_information(pxy, (0,), (1,))
        pxyw = j.sum(axis=(1, 2)).reshape(pxy.shape + (nwx * nwy,))
        return RateTriple(r, 0.0, conditional_min_payoff(pxyw, aux.payoff))
    if mode == "full":
        base = inner_point(aux)
        pxyuw = j.sum(axis=2).transpose(0, 2, 1, 3, 4)      # (x, y, u, wx, wy)
        pxyc = pxyuw.reshape(pxyuw.shape[:2] + (-1,))
        return RateTriple(base.R, base.R0, conditional_min_payoff(pxyc, aux.payoff))
    raise ValueError(f"unknown disclosure variant {mode!r} (expected 'current' or 'full')")


def trivial_aux(px, payoff: PayoffTable, wx=None, wy=None, y_dist=None) -> AuxSystem:
    """Singleton U and V; Y drawn independently of everything (first symbol by default)."""
    px = px if isinstance(px, Pmf) else Pmf(px)
    nx, ny, _ = payoff.sizes
    py = np.zeros(ny)
    if y_dist is None:
        py[0] = 1.0
    else:
        py = np.asarray(y_dist, float)
    return AuxSystem.build(px, np.ones((px.alphabet_size, 1, 1)), py[None, None, :], payoff, wx, wy)


def lossy_aux(px, p_y_given_x, payoff: PayoffTable, wx=None, wy=None) -> AuxSystem:
    """U singleton and V = Y, so the system reduces to a test channel P_{Y|X}."""
    ch = np.asarray(getattr(p_y_given_x, "rows", p_y_given_x), float)
    ny = ch.shape[1]
    return AuxSystem.build(px, ch[:, None, :], np.eye(ny)[None, :, :], payoff, wx, wy)


def min_payoff_no_info(px, payoff: PayoffTable, p_y_given_x=None) -> float:
    """min_z E pi(X, Y, z) with no side information."""
    probs = px.probs if isinstance(px, Pmf) else np.asarray(px, float)
    nx, ny, _ = payoff.sizes
    ch = np.ones((nx, 1)) if p_y_given_x is None else np.asarray(getattr(p_y_given_x, "rows", p_y_given_x), float)
    pxy = probs[:, None] * ch
    if pxy.shape[1] == 1 and ny > 1:
        raise ValueError("a reconstruction channel is required when |Y| > 1")
    return conditional_min_payoff(pxy[:, :, None], payoff)


__all__ = [
    "RateTriple", "AuxSystem", "inner_point", "disclosure_variant_point", "conditional_min_payoff",
    "best_actions", "trivial_aux", "lossy_aux", "min_payoff_no_info",
]
