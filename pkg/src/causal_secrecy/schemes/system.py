"""
Exact joint tables of a code together with the source, key, reconstruction and disclosure.

Axis layout of a full table is ``(x^n, m, k, y^n, w^n)``, each sequence axis flattened in
lexicographic order.  A disclosure symbol is the pair (wx, wy) flattened as ``wx * |Wy| + wy``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import budget, check_budget
from ..prob import Channel, product_pmf, sequences

DEFAULT_MAX_CELLS = 2**22
FULL_AXES = ("x^n", "m", "k", "y^n", "w^n")


def max_cells() -> int:
    return budget("max_cells", DEFAULT_MAX_CELLS)


@dataclass
class SystemJoint:
    table: np.ndarray
    axes: tuple[str, ...]
    tag: str                            # "P", "Q" or "Qhat"
    n: int
    nx: int
    ny: int
    nwx: int
    nwy: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.table = np.asarray(self.table, float)
        if len(self.axes) != self.table.ndim:
            raise ValueError("axis names do not match the table rank")
        s = self.table.sum()
        if abs(s - 1.0) > 1e-10:
            raise ValueError(f"joint table sums to {s}, not 1")
        if np.any(self.table < -1e-15):
            raise ValueError("joint table has negative entries")

    @property
    def nw(self) -> int:
        return self.nwx * self.nwy

    @property
    def num_messages(self) -> int:
        return self.table.shape[self.axes.index("m")]

    @property
    def num_keys(self) -> int:
        return self.table.shape[self.axes.index("k")]

    def marginal(self, *names) -> np.ndarray:
        keep = [self.axes.index(a) for a in names]
        drop = tuple(i for i in range(self.table.ndim) if i not in keep)
        t = self.table.sum(axis=drop)
        order = np.argsort(np.argsort(keep))
        return np.transpose(t, order)

    def symbol_view(self) -> np.ndarray:
        """Table with every sequence axis split into per-position axes."""
        if self.axes != FULL_AXES:
            raise ValueError("per-position view needs the full (x^n, m, k, y^n, w^n) layout")
        n = self.n
        shape = (self.nx,) * n + self.table.shape[1:3] + (self.ny,) * n + (self.nw,) * n
        return self.table.reshape(shape)

    def sidecar(self) -> dict:
        return {"tag": self.tag, "axes": list(self.axes), "shape": list(self.table.shape),
                "n": self.n, "nx": self.nx, "ny": self.ny, "nwx": self.nwx, "nwy": self.nwy,
                "dtype": "float64", "order": "C", "meta": self.meta}

    def export(self, path) -> tuple[Path, Path]:
        """Write ``<path>.bin`` (raw little-endian float64, C order) and ``<path>.json``."""
        base = Path(path)
        data, side = base.with_suffix(".bin"), base.with_suffix(".json")
        self.table.astype("<f8").tofile(data)
        side.write_text(json.dumps(self.sidecar(), indent=2, sort_keys=True))
        return data, side

    @classmethod
    def load(cls, path) -> "SystemJoint":
        base = Path(path)
        side = json.loads(base.with_suffix(".json").read_text())
        table = np.fromfile(base.with_suffix(".bin"), dtype="<f8").reshape(side["shape"])
        return cls(table, tuple(side["axes"]), side["tag"], side["n"], side["nx"], side["ny"],
                   side["nwx"], side["nwy"], side.get("meta", {}))


def disclosure_tensor(wx: Channel, wy: Channel) -> np.ndarray:
    """Per-symbol P[w | x, y] shaped (|X|, |Y|, |Wx| |Wy|)."""
    t = wx.rows[:, None, :, None] * wy.rows[None, :, None, :]
    return t.reshape(wx.input_size, wy.input_size, -1)


def sequence_channel(per_symbol: np.ndarray, n: int) -> np.ndarray:
    """Memoryless extension of P[w | x, y] to P[w^n | x^n, y^n]."""
    nx, ny, nw = per_symbol.shape
    out = np.ones((1, 1, 1))
    for _ in range(n):
        out = (out[:, None, :, None, :, None] * per_symbol[None, :, None, :, None, :])
        out = out.reshape(out.shape[0] * nx, out.shape[2] * ny, out.shape[4] * nw)
    return out


def system_joint_from_code(px, n: int, encoder: np.ndarray, decoder: np.ndarray,
                           wx: Channel | None = None, wy: Channel | None = None,
                           key_pmf=None, tag: str = "P", meta: dict | None = None) -> SystemJoint:
    """
    Joint table of an arbitrary code.

    ``encoder[x^n, k, m]`` is P_{M|X^n K} and ``decoder[m, k, y^n]`` is P_{Y^n|M K}.
    The key is uniform unless ``key_pmf`` is given.
    """
    p = np.asarray(getattr(px, "probs", px), float)
    nx = p.size
    enc = np.asarray(encoder, float)
    dec = np.asarray(decoder, float)
    nk, nm = enc.shape[1], enc.shape[2]
    ny = round(dec.shape[2] ** (1.0 / n))
    if enc.shape[0] != nx ** n or dec.shape[:2] != (nm, nk) or ny ** n != dec.shape[2]:
        raise ValueError("encoder/decoder shapes do not match the blocklength and alphabets")
    if not np.allclose(enc.sum(axis=2), 1.0, atol=1e-12) or not np.allclose(dec.sum(axis=2), 1.0, atol=1e-12):
        raise ValueError("encoder and decoder rows must sum to 1")
    wx = Channel.identity(nx) if wx is None else wx
    wy = Channel.identity(ny) if wy is None else wy
    pw = sequence_channel(disclosure_tensor(wx, wy), n)
    check_budget(nx ** n * nm * nk * ny ** n * pw.shape[2], max_cells(), "system joint cells")
    pk = np.full(nk, 1.0 / nk) if key_pmf is None else np.asarray(key_pmf, float)
    table = np.einsum("x,k,xkm,mky,xyw->xmkyw", product_pmf(p, n), pk, enc, dec, pw)
    return SystemJoint(table, FULL_AXES, tag, n, nx, ny, wx.output_size, wy.output_size, meta or {})


def _xor_table(n, key_seqs, k_alph=2):
    """Encoder and identity decoder for M = X^n + pad(K) mod |X|, with pads given per key."""
    seqs = sequences(k_alph, n)
    w = k_alph ** np.arange(n - 1, -1, -1)
    nseq = seqs.shape[0]
    nk = key_seqs.shape[0]
    enc = np.zeros((nseq, nk, nseq))
    dec = np.zeros((nseq, nk, nseq))
    for key, pad in enumerate(key_seqs):
        m = ((seqs + pad) % k_alph) @ w
        enc[np.arange(nseq), key, m] = 1.0
        dec[m, key, np.arange(nseq)] = 1.0
    return enc, dec


def one_bit_pad_system(n: int, wx: Channel | None = None, wy: Channel | None = None) -> SystemJoint:
    """Bern(1/2) source, one key bit, every source bit flipped when the key is 1."""
    pads = np.array([np.zeros(n, int), np.ones(n, int)])
    enc, dec = _xor_table(n, pads)
    return system_joint_from_code([0.5, 0.5], n, enc, dec, wx, wy, meta={"code": "one-bit pad"})


def one_time_pad_system(px, n: int, wx: Channel | None = None, wy: Channel | None = None) -> SystemJoint:
    """Key uniform over all of X^n, M = X^n + K symbol-wise mod |X|."""
    k = np.asarray(getattr(px, "probs", px)).size
    enc, dec = _xor_table(n, sequences(k, n), k)
    return system_joint_from_code(px, n, enc, dec, wx, wy, meta={"code": "one-time pad"})


def cyclic_system_joint(code, wx: Channel | None = None, wy: Channel | None = None) -> SystemJoint:
    """Exact table of a cyclic-bin code (key uniform on {0..n-1})."""
    from .cyclic import cyclic_decode, cyclic_encode

    n, k = code.n, code.alphabet_size
    seqs = sequences(k, n)
    nm = max(code.num_bins, 1) * n
    enc = np.zeros((seqs.shape[0], n, nm))
    dec = np.zeros((nm, n, seqs.shape[0]))
    w = k ** np.arange(n - 1, -1, -1)
    for key in range(n):
        for i, x in enumerate(seqs):
            j, t = cyclic_encode(code, x, key)
            enc[i, key, j * n + t] = 1.0
        for m in range(nm):
            dec[m, key, int(cyclic_decode(code, divmod(m, n), key) @ w)] = 1.0
    return system_joint_from_code(code.px, n, enc, dec, wx, wy, meta={"code": "cyclic", "epsilon": code.epsilon})
