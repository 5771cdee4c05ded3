"""
Best-response adversaries on exact system tables, plus Monte-Carlo play against codes.

The adversary minimises the payoff.  At step i it knows the message and whatever the
disclosure model reveals of the per-symbol signals W_1..W_n.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import NumericalError, ResourceError, check_budget
from .prob import PayoffTable, conditional_entropy, product_pmf
from .region.aux import best_actions, conditional_min_payoff
from .schemes.cyclic import CyclicBinCode, decode_batch, encode_batch
from .schemes.superposition import SuperpositionCodebook, likelihood_encode, stochastic_decode
from .schemes.system import SystemJoint, max_cells

KINDS = ("none", "causal_delay", "current_symbol", "causal_inclusive", "full_block")
SIGNALS = ("w", "wx", "wy")
WILSON_Z = 1.959963984540054


@dataclass(frozen=True)
class DisclosureSpec:
    kind: str = "none"
    d: int = 1
    signal: str = "w"           # both components, or only the source / reconstruction part

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown disclosure kind {self.kind!r}; expected one of {KINDS}")
        if self.signal not in SIGNALS:
            raise ValueError(f"unknown disclosure signal {self.signal!r}; expected one of {SIGNALS}")
        if self.kind == "causal_delay" and self.d < 1:
            raise ValueError("causal_delay needs d >= 1")

    @classmethod
    def causal(cls, d: int = 1, signal: str = "w") -> "DisclosureSpec":
        return cls("causal_delay", d, signal)

    def positions(self, i: int, n: int) -> tuple[int, ...]:
        """Block positions whose signal is visible when choosing Z_i (0-based)."""
        if self.kind == "none":
            return ()
        if self.kind == "causal_delay":
            return tuple(range(max(0, i - self.d + 1)))
        if self.kind == "current_symbol":
            return (i,)
        if self.kind == "causal_inclusive":
            return tuple(range(i + 1))
        return tuple(range(n))

    @property
    def nested(self) -> bool:
        """Whether what is seen at step i is also seen at every later step."""
        return self.kind != "current_symbol"

    def label(self) -> str:
        d = f"({self.d})" if self.kind == "causal_delay" else ""
        return f"{self.kind}{d}:{self.signal}"


@dataclass
class Strategy:
    """actions[i] maps (m, observed signal tuple) to an action index (or a pmf for log-loss)."""

    n: int
    disclosure: DisclosureSpec
    actions: list = field(default_factory=list)

    def action(self, i, m, obs):
        return self.actions[i][(int(m), tuple(int(o) for o in obs))]

    def to_json(self) -> str:
        doc = {"n": self.n, "disclosure": self.disclosure.label(),
               "actions": [{f"{m}|{','.join(map(str, o))}": (a if np.isscalar(a) else list(map(float, a)))
                            for (m, o), a in sorted(step.items())} for step in self.actions]}
        return json.dumps(doc, sort_keys=True)


@dataclass
class PayoffReport:
    avg_value: float
    min_value: float
    avg_se: float = 0.0
    min_se: float = 0.0
    whp_threshold: float | None = None
    whp_estimate: float | None = None
    whp_interval: tuple[float, float] | None = None
    logloss_value: float | None = None
    trials: int = 0
    seed: int | None = None
    strategy: str = ""
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["whp_interval"] = list(self.whp_interval) if self.whp_interval else None
        return d


# -- exact tables ---------------------------------------------------------------------


def _projection(sys: SystemJoint, signal: str) -> np.ndarray:
    nw = sys.nw
    if signal == "w":
        return np.eye(nw)
    a, b = np.divmod(np.arange(nw), sys.nwy)
    size = sys.nwx if signal == "wx" else sys.nwy
    g = np.zeros((nw, size))
    g[np.arange(nw), a if signal == "wx" else b] = 1.0
    return g


def _check_payoff(sys, payoff):
    nx, ny, _ = payoff.sizes
    if (nx, ny) != (sys.nx, sys.ny):
        raise ValueError(f"payoff is for |X|={nx}, |Y|={ny} but the system has |X|={sys.nx}, |Y|={sys.ny}")


class _Positions:
    """Per-position marginals P[x_i, y_i, m, o_1, ..., o_r] of an exact table."""

    def __init__(self, sys: SystemJoint, disclosure: DisclosureSpec):
        if sys.tag not in ("P", "Q"):
            raise ValueError("best responses need a full (x^n, m, k, y^n, w^n) table")
        self.sys, self.disc, self.n = sys, disclosure, sys.n
        view = sys.symbol_view()
        n = self.n
        if disclosure.kind != "none":
            g = _projection(sys, disclosure.signal)
            if g.shape[1] != g.shape[0] or not np.array_equal(g, np.eye(g.shape[0])):
                for a in range(2 * n + 2, 3 * n + 2):
                    view = np.moveaxis(np.tensordot(view, g, axes=([a], [0])), -1, a)
        self.view = view
        self.no = view.shape[-1] if n else 1

    def joint(self, i):
        """(P[x_i, y_i, c], context shape) with c the flattened (m, o...) index."""
        n = self.n
        obs = self.disc.positions(i, n)
        keep = [i, n + 2 + i, n] + [2 * n + 2 + j for j in obs]
        drop = tuple(a for a in range(self.view.ndim) if a not in keep)
        t = self.view.sum(axis=drop)
        t = np.transpose(t, np.argsort(np.argsort(keep)))
        ctx = t.shape[2:]
        return t.reshape(t.shape[0], t.shape[1], -1), ctx


def _contexts(ctx_shape, mass):
    for c in np.flatnonzero(mass > 0):
        idx = np.unravel_index(c, ctx_shape)
        yield c, (int(idx[0]), tuple(int(v) for v in idx[1:]))


def best_response_exact(sys: SystemJoint, payoff: PayoffTable, disclosure: DisclosureSpec):
    """Per-step posterior best response; returns (Strategy, avg_value, min_value)."""
    _check_payoff(sys, payoff)
    pos = _Positions(sys, disclosure)
    strategy = Strategy(sys.n, disclosure)
    values = []
    for i in range(sys.n):
        p, ctx = pos.joint(i)
        check_budget(p.shape[2], max_cells(), "observation contexts")
        values.append(conditional_min_payoff(p, payoff))
        acts = best_actions(p, payoff)
        strategy.actions.append({key: int(acts[c]) for c, key in _contexts(ctx, p.sum(axis=(0, 1)))})
    return strategy, float(np.mean(values)), float(np.min(values))


def evaluate_strategy(sys: SystemJoint, payoff: PayoffTable, strategy: Strategy) -> tuple[float, np.ndarray]:
    """Expected average payoff and per-position expectations of a deterministic strategy."""
    _check_payoff(sys, payoff)
    pos = _Positions(sys, strategy.disclosure)
    per = []
    for i in range(sys.n):
        p, ctx = pos.joint(i)
        total = 0.0
        for c, key in _contexts(ctx, p.sum(axis=(0, 1))):
            z = strategy.actions[i][key]
            w = p[:, :, c]
            v = payoff.values[:, :, z]
            total += float(np.where(w > 0, w * np.where(np.isfinite(v), v, 0.0), 0.0).sum())
            if np.any((w > 0) & np.isneginf(v)):
                total = -math.inf
        per.append(total)
    per = np.array(per)
    return float(per.mean()), per


def _target_joint(p, target):
    if target == "X":
        return p.sum(axis=1)
    if target == "Y":
        return p.sum(axis=0)
    if target == "XY":
        return p.reshape(-1, p.shape[2])
    raise ValueError(f"unknown log-loss target {target!r}; expected X, Y or XY")


def logloss_components(sys: SystemJoint, target: str, disclosure: DisclosureSpec) -> tuple[float, float, Strategy]:
    """Per-symbol log-loss of the posterior strategy and the matching conditional entropy sum."""
    pos = _Positions(sys, disclosure)
    strategy = Strategy(sys.n, disclosure)
    loss, ent = 0.0, 0.0
    for i in range(sys.n):
        p, ctx = pos.joint(i)
        t = _target_joint(p, target)                        # (target, c)
        mass = t.sum(axis=0)
        post = np.divide(t, mass, out=np.zeros_like(t), where=mass > 0)
        strategy.actions.append({key: post[:, c] for c, key in _contexts(ctx, mass)})
        with np.errstate(divide="ignore"):
            logs = np.where(t > 0, np.log2(np.where(post > 0, post, 1.0)), 0.0)
        loss -= float((t * logs).sum())
        ent += conditional_entropy(t, (0,), (1,))
    return loss / sys.n, ent / sys.n, strategy


def best_response_logloss(sys: SystemJoint, target: str, disclosure: DisclosureSpec, tol: float = 1e-9) -> float:
    """Minimal expected log-loss in bits per symbol: the posterior is the optimal soft guess."""
    loss, ent, _ = logloss_components(sys, target, disclosure)
    if abs(loss - ent) > tol:
        raise NumericalError(f"posterior log-loss {loss} and conditional entropy {ent} disagree")
    return loss


def equivocation(sys: SystemJoint, target: str = "X") -> float:
    """(1/n) H(T^n | M) straight from the table."""
    axes = {"X": ("x^n",), "Y": ("y^n",), "XY": ("x^n", "y^n")}[target]
    t = sys.marginal(*axes, "m")
    t = t.reshape(-1, t.shape[-1])
    return conditional_entropy(t, (0,), (1,)) / sys.n


# -- with high probability ------------------------------------------------------------


class _Lattice:
    """Payoff values as integers on a common grid so block sums compare exactly."""

    SENTINEL = -(2**55)

    def __init__(self, values, max_den=10**6):
        finite = values[np.isfinite(values)]
        fr = [Fraction(float(v)).limit_denominator(max_den) for v in finite.ravel()]
        den = 1
        for f in fr:
            den = den * f.denominator // math.gcd(den, f.denominator)
        exact = den <= max_den and all(abs(float(f) - v) <= 1e-15 for f, v in zip(fr, finite.ravel()))
        if not exact:
            warnings.warn("payoff values are not on a small rational grid; sums are quantised to 1e-12")
            den = 10**12
        self.den = den
        self.exact = exact
        self.ints = np.where(np.isfinite(values), np.round(np.where(np.isfinite(values), values, 0) * den),
                             self.SENTINEL).astype(np.int64)

    def threshold(self, n, pi):
        return math.ceil(n * pi * self.den - 1e-6)


class _Outcomes:
    def __init__(self, sys, disclosure):
        pos = _Positions(sys, disclosure)
        v = pos.view
        n = sys.n
        nz = np.flatnonzero(v.ravel() > 0)
        idx = np.unravel_index(nz, v.shape)
        self.prob = v.ravel()[nz]
        self.x = np.stack(idx[:n], axis=1)
        self.m = idx[n]
        self.y = np.stack(idx[n + 2:2 * n + 2], axis=1)
        self.w = np.stack(idx[2 * n + 2:], axis=1) if n else np.zeros((nz.size, 0), int)
        self.n = n
        self.disc = disclosure

    def key(self, i, j):
        obs = self.disc.positions(i, self.n)
        return (int(self.m[j]), tuple(int(self.w[j, a]) for a in obs))


def _group(keys, ids):
    groups = {}
    for j in ids:
        groups.setdefault(keys[j], []).append(j)
    return groups


def best_response_whp_exact(sys: SystemJoint, payoff: PayoffTable, disclosure: DisclosureSpec, pi: float):
    """
    Strategy minimising P[(1/n) sum pi(X_i, Y_i, Z_i) >= pi] and that probability.

    Nested disclosures are solved by backward induction over information sets carrying the
    exact running sums; the current-symbol model has no perfect recall and is enumerated.
    """
    _check_payoff(sys, payoff)
    out = _Outcomes(sys, disclosure)
    nz = payoff.sizes[2]
    check_budget(len(out.prob) * nz ** sys.n, max_cells(), "whp search states")
    if not disclosure.nested:
        return whp_exhaustive(sys, payoff, disclosure, pi)
    lat = _Lattice(payoff.values)
    thr = lat.threshold(sys.n, pi)
    keys = [[out.key(i, j) for j in range(len(out.prob))] for i in range(sys.n)]
    strategy = Strategy(sys.n, disclosure, [dict() for _ in range(sys.n)])
    memo = {}

    def solve(i, ids, sums):
        state = (i, ids, sums)
        if state in memo:
            return memo[state]
        best = None
        for z in range(nz):
            s2 = tuple(s + int(lat.ints[out.x[j, i], out.y[j, i], z]) for j, s in zip(ids, sums))
            plan = {}
            if i == sys.n - 1:
                val = float(sum(out.prob[j] for j, s in zip(ids, s2) if s >= thr))
            else:
                val = 0.0
                lookup = dict(zip(ids, s2))
                for key, part in _group(keys[i + 1], ids).items():
                    part = tuple(part)
                    v, zc, p = solve(i + 1, part, tuple(lookup[j] for j in part))
                    val += v
                    plan.update(p)
                    plan[(i + 1, key)] = zc
            if best is None or val < best[0] - 1e-15:
                best = (val, z, plan)
        memo[state] = best
        return best

    total = 0.0
    for key, part in _group(keys[0], range(len(out.prob))).items():
        part = tuple(part)
        v, z, plan = solve(0, part, (0,) * len(part))
        total += v
        strategy.actions[0][key] = z
        for (i, k2), zz in plan.items():
            strategy.actions[i][k2] = zz
    return strategy, total


def _root_groups(out, disclosure):
    """Independent strategy components: by message (and first observation when nested)."""
    roots = {}
    for j in range(len(out.prob)):
        r = out.key(0, j) if disclosure.nested else int(out.m[j])
        roots.setdefault(r, []).append(j)
    return roots


def whp_exhaustive(sys: SystemJoint, payoff: PayoffTable, disclosure: DisclosureSpec, pi: float,
                   max_assignments: int = 2**18):
    """Enumerate every deterministic strategy (per independent component) and keep the best."""
    _check_payoff(sys, payoff)
    out = _Outcomes(sys, disclosure)
    lat = _Lattice(payoff.values)
    thr = lat.threshold(sys.n, pi)
    nz = payoff.sizes[2]
    strategy = Strategy(sys.n, disclosure, [dict() for _ in range(sys.n)])
    total = 0.0
    for ids in _root_groups(out, disclosure).values():
        infos = sorted({(i, out.key(i, j)) for j in ids for i in range(sys.n)})
        where = {info: c for c, info in enumerate(infos)}
        count = nz ** len(infos)
        if count > max_assignments:
            raise ResourceError(f"exhaustive whp search: {count} strategies exceed {max_assignments}")
        assign = np.array(list(itertools.product(range(nz), repeat=len(infos))), dtype=np.int64)
        cols = np.array([[where[(i, out.key(i, j))] for i in range(sys.n)] for j in ids])
        sums = np.zeros((assign.shape[0], len(ids)), dtype=np.int64)
        for i in range(sys.n):
            z = assign[:, cols[:, i]]                       # (assignments, outcomes)
            sums += lat.ints[out.x[ids, i], out.y[ids, i]][np.arange(len(ids)), z]
        probs = ((sums >= thr) * out.prob[ids]).sum(axis=1)
        a = int(np.argmin(probs))
        total += float(probs[a])
        for info, c in where.items():
            strategy.actions[info[0]][info[1]] = int(assign[a, c])
    return strategy, total


def whp_probability(sys: SystemJoint, payoff: PayoffTable, strategy: Strategy, pi: float) -> float:
    """P[(1/n) sum pi >= pi] under a deterministic strategy."""
    out = _Outcomes(sys, strategy.disclosure)
    lat = _Lattice(payoff.values)
    thr = lat.threshold(sys.n, pi)
    total = 0.0
    for j in range(len(out.prob)):
        s = sum(int(lat.ints[out.x[j, i], out.y[j, i], strategy.actions[i][out.key(i, j)]]) for i in range(sys.n))
        if s >= thr:
            total += out.prob[j]
    return float(total)


# -- Monte-Carlo play -----------------------------------------------------------------


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    if trials < 1:
        raise ValueError("wilson_interval needs at least one trial")
    p = successes / trials
    den = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / den
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / den
    return max(0.0, centre - half), min(1.0, centre + half)


def _summarise(pay, trials, seed, strategy, pi, extra):
    """pay: (trials, n) realised per-symbol payoffs."""
    block = pay.mean(axis=1)
    avg = float(block.mean())
    se = float(block.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    per = pay.mean(axis=0)
    i = int(np.argmin(per))
    mse = float(pay[:, i].std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    rep = PayoffReport(avg, float(per[i]), se, mse, trials=trials, seed=seed, strategy=strategy, extra=extra)
    if pi is not None:
        hits = int((block >= pi - 1e-12).sum())
        rep.whp_threshold = pi
        rep.whp_estimate = hits / trials
        rep.whp_interval = wilson_interval(hits, trials)
    return rep


def _cyclic_play(code: CyclicBinCode, payoff: PayoffTable, disclosure: DisclosureSpec, xs, ys, j, inside):
    """Exact-posterior best response of the adversary for every trial and position."""
    n, k = code.n, code.alphabet_size
    vals = payoff.values
    nx, ny, nzs = payoff.sizes
    if nx != k or ny not in (1, k):
        raise ValueError("cyclic codes need a payoff over the source alphabet (and |Y| = |X| or 1)")
    yi = (lambda a: a) if ny == k else (lambda a: np.zeros_like(a))
    trials = xs.shape[0]
    # probability of every codebook sequence, grouped later by prefix for the fallback posterior
    seq_p = product_pmf(code.px, n)
    in_book = np.zeros(k ** n)
    in_book[code.lookup >= 0] = seq_p[code.lookup >= 0]
    fb = code.fallback
    causal = disclosure.kind == "causal_delay" and disclosure.d == 1 and disclosure.signal in ("w", "wx")
    if disclosure.kind != "none" and not causal:
        raise ValueError("cyclic simulation supports no disclosure or causal source disclosure (d = 1)")
    rows = code.bins[j] if code.num_bins else np.zeros((trials, 0, n), int)   # (trials, n, n)
    alpha = code.alphas[j] if code.num_bins else np.zeros(trials)
    mask = np.ones(rows.shape[:2], bool)
    prefix = np.zeros(trials, np.int64)
    pay = np.zeros((trials, n))
    col_mass = (code.alphas[:, None, None, None] * (code.bins[..., None] == np.arange(k))).sum(axis=(0, 1)) \
        if code.num_bins else np.zeros((n, k))                # (n, k) codebook mass with x_i = a
    for i in range(n):
        if causal and i > 0:
            mask &= rows[:, :, i - 1] == xs[:, i - 1, None]
            prefix = prefix * k + xs[:, i - 1]
        # posterior weights on (x_i = a) from codebook rows, placed at y = a
        cb_w = (mask[..., None] * (rows[:, :, i, None] == np.arange(k))).sum(axis=1) * alpha[:, None]
        if causal:
            book = in_book.reshape((k ** i) * k, -1).sum(axis=1)
            tot = product_pmf(code.px, i + 1)
            fb_w = np.clip(tot - book, 0.0, None)[prefix[:, None] * k + np.arange(k)]
        else:
            fb_w = np.broadcast_to(np.clip(code.px - col_mass[i], 0.0, None), (trials, k))
        fb_w = np.where((j == 0)[:, None], fb_w, 0.0)
        ya = np.arange(k)
        exp_cb = cb_w @ vals[ya, yi(ya), :]                 # (trials, |Z|)
        exp_fb = fb_w @ vals[ya, yi(np.full(k, fb[i])), :]
        z = np.argmin(exp_cb + exp_fb, axis=1)
        pay[:, i] = vals[xs[:, i], yi(ys[:, i]) if ny == k else 0, z]
    return pay


def simulate_payoff(code, payoff: PayoffTable, disclosure: DisclosureSpec, trials: int, seed: int,
                    pi: float | None = None, strategy: Strategy | None = None) -> PayoffReport:
    """
    Monte-Carlo payoff of a code against a best-responding adversary.

    Cyclic codes face the exact posterior adversary (candidate rows of the bin, minus those
    contradicted by disclosed source symbols).  Superposition codes face ``strategy`` when
    given, otherwise the per-symbol best response to the codeword U_i(m).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    if isinstance(code, CyclicBinCode):
        n, k = code.n, code.alphabet_size
        xs = rng.choice(k, size=(trials, n), p=code.px)
        keys = rng.integers(0, n, size=trials)
        j, t, inside = encode_batch(code, xs, keys)
        ys = decode_batch(code, j, t, keys)
        pay = _cyclic_play(code, payoff, disclosure, xs, ys, j, inside)
        err = (ys != xs).any(axis=1)
        extra = {"error_rate": float(err.mean()),
                 "error_se": float(err.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0,
                 "decoded_fraction": float(inside.mean()), "disclosure": disclosure.label()}
        dec = pay[inside]
        if dec.shape[0] > 1:
            b = dec.mean(axis=1)
            extra["decoded_avg"] = float(b.mean())
            extra["decoded_se"] = float(b.std(ddof=1) / math.sqrt(b.size))
        return _summarise(pay, trials, seed, "posterior", pi, extra)
    if isinstance(code, SuperpositionCodebook):
        return _simulate_superposition(code, payoff, disclosure, trials, rng, seed, pi, strategy)
    raise TypeError(f"unsupported code type {type(code).__name__}")


def _simulate_superposition(cb, payoff, disclosure, trials, rng, seed, pi, strategy):
    aux = cb.aux
    n = cb.n
    nx, ny = aux.symbol_sizes
    if payoff.sizes[:2] != (nx, ny):
        raise ValueError("payoff alphabets do not match the codebook's auxiliary system")
    if strategy is None:
        pxuvy = aux.joint_xuvy()
        pxyu = pxuvy.sum(axis=2).transpose(0, 2, 1)
        per_u = best_actions(pxyu, payoff)
        per_u = np.where(per_u < 0, 0, per_u)
        label = "codeword"
    else:
        label = "table"
    wx, wy = aux.wx.rows, aux.wy.rows
    nwy = wy.shape[1]
    g = None
    if strategy is not None and disclosure.kind != "none":
        nw = wx.shape[1] * nwy
        a, b = np.divmod(np.arange(nw), nwy)
        g = {"w": np.arange(nw), "wx": a, "wy": b}[disclosure.signal]
    pay = np.zeros((trials, n))
    flags = 0
    for t in range(trials):
        x = rng.choice(nx, size=n, p=aux.px.probs)
        k = int(rng.integers(cb.num_keys))
        m, flag = likelihood_encode(cb, x, k, rng)
        flags += flag
        y = stochastic_decode(cb, m, k, rng)
        if strategy is None:
            z = per_u[cb.cu[m]]
        else:
            w = np.array([(rng.choice(wx.shape[1], p=wx[x[i]]) * nwy + rng.choice(nwy, p=wy[y[i]]))
                          for i in range(n)])
            obs = g[w] if g is not None else w
            z = np.array([strategy.action(i, m, obs[list(disclosure.positions(i, n))]) for i in range(n)])
        pay[t] = payoff.values[x, y, z]
    return _summarise(pay, trials, seed, label, pi, {"encoder_fallbacks": flags, "disclosure": disclosure.label()})
