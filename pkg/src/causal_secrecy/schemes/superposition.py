"""
Superposition codebook, likelihood encoder and stochastic decoder, plus the exact
induced distribution P, the idealized distribution Q and its per-symbol surrogate Q-hat.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ..errors import budget, check_budget
from ..prob import as_probs, product_pmf, total_variation
from ..region.aux import AuxSystem
from .system import FULL_AXES, SystemJoint, disclosure_tensor, max_cells, sequence_channel

DEFAULT_MAX_CODEWORDS = 2**20


def _as_int(x, what):
    r = round(x)
    if abs(x - r) > 1e-9 or r < 0:
        raise ValueError(f"{what} = {x} must be a nonnegative integer")
    return int(r)


@dataclass
class SuperpositionCodebook:
    n: int
    nR: int
    nR0: int
    seed: int
    cu: np.ndarray              # (2^{nR}, n) U codewords
    cv: np.ndarray              # (2^{nR}, 2^{nR0}, n) V codewords
    aux: AuxSystem

    @property
    def R(self) -> float:
        return self.nR / self.n

    @property
    def R0(self) -> float:
        return self.nR0 / self.n

    @property
    def num_messages(self) -> int:
        return self.cu.shape[0]

    @property
    def num_keys(self) -> int:
        return self.cv.shape[1]

    def to_json(self, explicit: bool = True) -> str:
        doc = {"n": self.n, "nR": self.nR, "nR0": self.nR0, "seed": self.seed,
               "u_size": self.aux.u_size, "v_size": self.aux.v_size}
        if explicit:
            doc["cu"] = self.cu.tolist()
            doc["cv"] = self.cv.tolist()
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str, aux: AuxSystem) -> "SuperpositionCodebook":
        doc = json.loads(text)
        if "cu" not in doc:
            return sample_superposition_codebook(aux, doc["n"], doc["nR"] / doc["n"], doc["nR0"] / doc["n"], doc["seed"])
        return cls(doc["n"], doc["nR"], doc["nR0"], doc["seed"], np.array(doc["cu"], np.int64),
                   np.array(doc["cv"], np.int64).reshape(2 ** doc["nR"], 2 ** doc["nR0"], doc["n"]), aux)


def aux_marginals(aux: AuxSystem):
    """P_U, P_{V|U}, P_{X|UV} (rows of zero-probability pairs are uniform) and P_{Y|UV}."""
    if aux.block_length != 1:
        raise ValueError("superposition codes use single-letter auxiliary systems")
    pxuv = aux.px.probs[:, None, None] * aux.uv_tensor()
    puv = pxuv.sum(axis=0)
    pu = puv.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        pv_u = np.where(pu[:, None] > 0, puv / pu[:, None], 1.0 / puv.shape[1])
        px_uv = np.where(puv[None] > 0, pxuv / puv[None], 1.0 / pxuv.shape[0])
    return pu, pv_u, np.moveaxis(px_uv, 0, 2), aux.y_tensor()


def sample_superposition_codebook(aux: AuxSystem, n: int, R: float, R0: float, seed: int) -> SuperpositionCodebook:
    if n < 1:
        raise ValueError("blocklength must be >= 1")
    nR = _as_int(n * R, "nR")
    nR0 = _as_int(n * R0, "nR0")
    check_budget(2 ** (nR + nR0) * n, budget("max_codewords", DEFAULT_MAX_CODEWORDS) * n, "codebook symbols")
    pu, pv_u, _, _ = aux_marginals(aux)
    rng = np.random.default_rng(seed)
    nm, nk = 2 ** nR, 2 ** nR0
    cu = rng.choice(pu.size, size=(nm, n), p=pu)
    # inverse-CDF draw of V_i from P_{V|U=u_i}
    cdf = np.cumsum(pv_u, axis=1)
    cdf[:, -1] = 1.0
    r = rng.random((nm, nk, n))
    rows = cdf[cu]                                          # (nm, n, |V|)
    cv = (r[..., None] > rows[:, None, :, :]).sum(axis=-1)
    return SuperpositionCodebook(n, nR, nR0, seed, cu, cv.astype(np.int64), aux)


def _likelihoods(cb: SuperpositionCodebook, x, k: int) -> np.ndarray:
    _, _, px_uv, _ = aux_marginals(cb.aux)
    x = np.asarray(x)
    return px_uv[cb.cu, cb.cv[:, k, :], x[None, :]].prod(axis=1)


def encoder_row(cb: SuperpositionCodebook, x, k: int) -> tuple[np.ndarray, bool]:
    """P_{M|X^n K}(. | x, k) and whether the all-zero fallback was used."""
    lik = _likelihoods(cb, x, k)
    s = lik.sum()
    if s <= 0:
        return np.full(cb.num_messages, 1.0 / cb.num_messages), True
    return lik / s, False


def likelihood_encode(cb: SuperpositionCodebook, x, k: int, rng: np.random.Generator) -> tuple[int, bool]:
    if not 0 <= k < cb.num_keys:
        raise ValueError(f"key {k} outside 0..{cb.num_keys - 1}")
    row, flagged = encoder_row(cb, x, k)
    return int(rng.choice(row.size, p=row)), flagged


def stochastic_decode(cb: SuperpositionCodebook, m: int, k: int, rng: np.random.Generator) -> np.ndarray:
    if not 0 <= m < cb.num_messages or not 0 <= k < cb.num_keys:
        raise ValueError(f"message {m} or key {k} out of range")
    py = cb.aux.y_tensor()
    rows = py[cb.cu[m], cb.cv[m, k]]                         # (n, |Y|)
    cdf = np.cumsum(rows, axis=1)
    cdf[:, -1] = 1.0
    return (rng.random(cb.n)[:, None] > cdf).sum(axis=1)


def _product_rows(rows: np.ndarray) -> np.ndarray:
    """Row-wise product distributions: rows (..., n, k) -> (..., k^n)."""
    lead = rows.shape[:-2]
    out = np.ones(lead + (1,))
    for i in range(rows.shape[-2]):
        out = (out[..., :, None] * rows[..., i, None, :]).reshape(lead + (-1,))
    return out


def _codeword_rows(cb):
    """Per (m, k): P_{X^n|UV} and P_{Y^n|UV} along the codeword pair."""
    _, _, px_uv, py_uv = aux_marginals(cb.aux)
    return _product_rows(px_uv[cb.cu[:, None, :], cb.cv]), _product_rows(py_uv[cb.cu[:, None, :], cb.cv])


def _check_cells(cb):
    nx, ny = cb.aux.symbol_sizes
    nw = cb.aux.wx.output_size * cb.aux.wy.output_size
    cells = (nx * ny * nw) ** cb.n * cb.num_messages * cb.num_keys
    check_budget(cells, max_cells(), "exact superposition table cells")


def _wn(cb):
    return sequence_channel(disclosure_tensor(cb.aux.wx, cb.aux.wy), cb.n)


def _joint(cb, table, tag):
    nx, ny = cb.aux.symbol_sizes
    return SystemJoint(table, FULL_AXES, tag, cb.n, nx, ny, cb.aux.wx.output_size, cb.aux.wy.output_size,
                       {"nR": cb.nR, "nR0": cb.nR0, "seed": cb.seed})


def encoder_table(cb: SuperpositionCodebook) -> tuple[np.ndarray, int]:
    """P_{M|X^n K}[x^n, k, m] and the number of (x^n, k) rows that needed the fallback."""
    px_n, _ = _codeword_rows(cb)                            # (m, k, x^n)
    lik = np.transpose(px_n, (2, 1, 0))                     # (x^n, k, m)
    s = lik.sum(axis=2, keepdims=True)
    zero = s[..., 0] <= 0
    enc = np.where(s > 0, lik / np.where(s > 0, s, 1.0), 1.0 / cb.num_messages)
    return enc, int(zero.sum())


def induced_joint_exact(cb: SuperpositionCodebook) -> SystemJoint:
    """P = P_{X^n} P_K P_{M|X^n K} P_{Y^n|M K} P_{W^n|X^n Y^n}."""
    _check_cells(cb)
    enc, flagged = encoder_table(cb)
    _, py_n = _codeword_rows(cb)
    pxn = product_pmf(cb.aux.px.probs, cb.n)
    pk = 1.0 / cb.num_keys
    table = np.einsum("x,xkm,mky,xyw->xmkyw", pxn * pk, enc, py_n, _wn(cb))
    j = _joint(cb, table, "P")
    j.meta["fallback_rows"] = flagged
    return j


def idealized_joint_exact(cb: SuperpositionCodebook) -> SystemJoint:
    """Q: (M, K) uniform, then X^n, Y^n drawn memorylessly along the codeword pair."""
    _check_cells(cb)
    px_n, py_n = _codeword_rows(cb)
    w = 1.0 / (cb.num_messages * cb.num_keys)
    table = np.einsum("mkx,mky,xyw->xmkyw", px_n * w, py_n, _wn(cb))
    return _joint(cb, table, "Q")


def _block(block, n):
    b = (block,) if isinstance(block, (int, np.integer)) else tuple(block)
    if not b or any(not 0 <= i < n for i in b) or len(set(b)) != len(b):
        raise ValueError(f"block {block} is not a nonempty set of positions in 0..{n - 1}")
    return tuple(sorted(b))


def qhat_joint(cb: SuperpositionCodebook, block) -> SystemJoint:
    """
    Q-hat on (m, w^n, x_B, y_B):
    Q_M * prod_i P_{W|U}(w_i | U_i(M)) * prod_{i in B} P_{XY|WU}(x_i, y_i | w_i, U_i(M)).
    """
    b = _block(block, cb.n)
    aux = cb.aux
    nx, ny = aux.symbol_sizes
    pw = disclosure_tensor(aux.wx, aux.wy)                  # (x, y, w)
    pxuvy = aux.joint_xuvy()
    pxyuw = np.einsum("xuvy,xyw->uxyw", pxuvy, pw)          # (u, x, y, w)
    pu = pxyuw.sum(axis=(1, 2, 3))
    puw = pxyuw.sum(axis=(1, 2))
    with np.errstate(invalid="ignore", divide="ignore"):
        pw_u = np.where(pu[:, None] > 0, puw / pu[:, None], 0.0)
        pxy_wu = np.where(puw[:, None, None, :] > 0, pxyuw / puw[:, None, None, :], 0.0)
    nm = cb.num_messages
    check_budget(nm * pw.shape[2] ** cb.n * (nx * ny) ** len(b), max_cells(), "Q-hat cells")
    rows = []
    for m in range(nm):
        t = np.array(1.0 / nm)
        for i in range(cb.n):
            u = cb.cu[m, i]
            if i in b:
                f = pw_u[u][:, None, None] * np.transpose(pxy_wu[u], (2, 0, 1))  # (w, x, y)
            else:
                f = pw_u[u][:, None, None]
            t = np.multiply.outer(t, f)
        rows.append(t)
    t = np.stack(rows)                                      # (m, w_1, a_1, b_1, w_2, ...)
    nw = pw.shape[2]
    # reorder to (m, w^n, x_B, y_B)
    ax_w, ax_x, ax_y, pos = [], [], [], 1
    for i in range(cb.n):
        ax_w.append(pos)
        if i in b:
            ax_x.append(pos + 1)
            ax_y.append(pos + 2)
        pos += 3
    t = np.transpose(t, [0] + ax_w + ax_x + ax_y + [a for a in range(1, t.ndim) if a not in ax_w + ax_x + ax_y])
    t = t.reshape(nm, nw ** cb.n, nx ** len(b), ny ** len(b))
    return SystemJoint(t, ("m", "w^n", "x_B", "y_B"), "Qhat", cb.n, nx, ny, aux.wx.output_size,
                       aux.wy.output_size, {"block": list(b), "seed": cb.seed})


def block_marginal(joint: SystemJoint, block) -> np.ndarray:
    """Marginal of a full table on (m, w^n, x_B, y_B), matching the Q-hat layout."""
    b = _block(block, joint.n)
    v = joint.symbol_view()
    n = joint.n
    keep = [n] + [2 * n + 2 + i for i in range(n)] + [i for i in b] + [n + 2 + i for i in b]
    drop = tuple(a for a in range(v.ndim) if a not in keep)
    t = np.transpose(v.sum(axis=drop), np.argsort(np.argsort(keep)))
    return t.reshape(joint.num_messages, joint.nw ** n, joint.nx ** len(b), joint.ny ** len(b))


def pq_distance(cb: SuperpositionCodebook) -> float:
    """||P - Q|| over (x^n, m, k, y^n, w^n)."""
    return total_variation(induced_joint_exact(cb).table, idealized_joint_exact(cb).table)


def lemma_block_distance(cb: SuperpositionCodebook, block) -> float:
    """||Q_{M W^n X_B Y_B} - Q-hat_{M W^n X_B Y_B}||."""
    q = idealized_joint_exact(cb)
    return total_variation(block_marginal(q, block), qhat_joint(cb, block).table)


def soft_covering_tv(codewords, channel, target) -> float:
    """TV between the uniform mixture of memoryless channel outputs over the codewords and a product target."""
    cw = np.asarray(codewords, np.int64)
    if cw.ndim != 2:
        raise ValueError("codewords must be an (M, n) array")
    rows = np.asarray(getattr(channel, "rows", channel), float)
    t = as_probs(target)
    n = cw.shape[1]
    check_budget(rows.shape[1] ** n * max(cw.shape[0], 1), max_cells(), "soft covering output table")
    q = _product_rows(rows[cw]).mean(axis=0)
    return total_variation(q, product_pmf(t, n))


def soft_covering_codebook(pu, n: int, rate: float, seed: int) -> np.ndarray:
    """ceil(2^{nR}) codewords drawn i.i.d. from P_U."""
    size = math.ceil(2 ** (n * rate) - 1e-9)
    rng = np.random.default_rng(seed)
    p = as_probs(pu)
    return rng.choice(p.size, size=(size, n), p=p)


def soft_covering_mean_tv(pu, channel, n: int, rate: float, seeds) -> tuple[float, float]:
    """Mean and standard error of the exact soft-covering TV over seeded codebooks."""
    rows = np.asarray(getattr(channel, "rows", channel), float)
    target = as_probs(pu) @ rows
    vals = np.array([soft_covering_tv(soft_covering_codebook(pu, n, rate, s), rows, target) for s in seeds])
    se = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
    return float(vals.mean()), se
