"""
Command-line front end.

Every job renders its whole output in memory first, so a failing job leaves no partial file.
Exit codes: 1 configuration error, 2 resource budget exceeded, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from pathlib import Path

import numpy as np

from . import io as cio
from .adversary import DisclosureSpec, simulate_payoff
from .errors import NumericalError, ResourceError
from .prob import PayoffTable, total_variation
from .region import (VARIANTS, bsc_example_curve, delay_boundary, equivocation_boundary, hamming_tradeoff,
                     inner_bound_search, lossless_lp, phi, phi_knots, pi_max_hamming, variant_payoff_grid)
from .region.search import SearchConfig
from .schemes.cyclic import build_cyclic_bin_code
from .schemes.superposition import (idealized_joint_exact, induced_joint_exact, lemma_block_distance,
                                    sample_superposition_codebook, soft_covering_mean_tv)

EXIT_CONFIG, EXIT_RESOURCE, EXIT_NUMERICAL = 1, 2, 3


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


DEFAULTS = {
    "r0_grid": "0:2:0.1",
    "alpha_grid": "0:0.5:0.01",
    "beta_grid": "0:0.5:0.05",
    "pi_grid": "0.1:0.5:0.1",
    "R_grid": "0:1:0.25",
    "R0_grid": "0:1:0.25",
    "grid": 201,
    "variant": "none",
    "d": 1,
    "restarts": 16,
    "trials": 10000,
    "seeds": 200,
    "block": "0",
    "disclosure": "none",
    "format": "csv",
}


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="causal-secrecy", description="Rate / key / payoff regions and secrecy scheme experiments.")
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value file; command-line flags take precedence")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    region = sub.add_parser("region", help="tradeoff regions")
    rsub = region.add_subparsers(dest="job", required=True, parser_class=_Parser)
    h = rsub.add_parser("hamming", parents=[common])
    h.add_argument("--px")
    h.add_argument("--r0-grid", dest="r0_grid")
    lp = rsub.add_parser("lp", parents=[common])
    lp.add_argument("--px")
    lp.add_argument("--payoff", help="hamming:k or JSON (xz matrix)")
    lp.add_argument("--r0-grid", dest="r0_grid")
    b = rsub.add_parser("bsc", parents=[common])
    b.add_argument("--variant", choices=VARIANTS)
    b.add_argument("--alpha-grid", dest="alpha_grid")
    b.add_argument("--beta-grid", dest="beta_grid")
    e = rsub.add_parser("equivocation", parents=[common])
    e.add_argument("--variant", choices=("X", "Y", "XY"))
    e.add_argument("--px")
    e.add_argument("--channel", help="P_{Y|X} for X; for Y and XY use --pu-x and --py-u")
    e.add_argument("--pu-x", dest="pu_x")
    e.add_argument("--py-u", dest="py_u")
    e.add_argument("--r0-grid", dest="r0_grid")
    d = rsub.add_parser("delay", parents=[common])
    d.add_argument("--px")
    d.add_argument("--d", type=int)
    d.add_argument("--pi-grid", dest="pi_grid")
    s = rsub.add_parser("search", parents=[common])
    s.add_argument("--px")
    s.add_argument("--payoff")
    s.add_argument("--wx")
    s.add_argument("--wy")
    s.add_argument("--R", type=float)
    s.add_argument("--R0", type=float)
    s.add_argument("--restarts", type=int)
    s.add_argument("--seed", type=int)
    v = rsub.add_parser("variant", parents=[common])
    v.add_argument("--R-grid", dest="R_grid")
    v.add_argument("--R0-grid", dest="R0_grid")
    v.add_argument("--grid", type=int)

    scheme = sub.add_parser("scheme", help="build codes and measure exact distances")
    ssub = scheme.add_subparsers(dest="job", required=True, parser_class=_Parser)
    c = ssub.add_parser("cyclic", parents=[common])
    c.add_argument("--px")
    c.add_argument("--n", type=int)
    c.add_argument("--eps", type=float)
    sp = ssub.add_parser("superposition", parents=[common])
    sp.add_argument("--aux", help="JSON auxiliary system")
    sp.add_argument("--n", type=int)
    sp.add_argument("--R", type=float)
    sp.add_argument("--R0", type=float)
    sp.add_argument("--block", help="comma list of positions for the per-symbol surrogate")
    sp.add_argument("--seed", type=int)

    a = sub.add_parser("attack", parents=[common], help="Monte-Carlo adversary against a cyclic-bin code")
    a.add_argument("--px")
    a.add_argument("--n", type=int)
    a.add_argument("--eps", type=float)
    a.add_argument("--disclosure", choices=("none", "causal"))
    a.add_argument("--trials", type=int)
    a.add_argument("--pi", type=float, help="threshold for the with-high-probability frequency")
    a.add_argument("--seed", type=int)

    sc = sub.add_parser("softcover", parents=[common], help="exact soft covering distances")
    sc.add_argument("--pu")
    sc.add_argument("--channel")
    sc.add_argument("--rate", type=float)
    sc.add_argument("--n-list", dest="n_list")
    sc.add_argument("--seeds", type=int, help="number of codebooks per blocklength")
    sc.add_argument("--seed", type=int, help="first codebook seed")

    r = sub.add_parser("reproduce", parents=[common], help="curves behind a figure")
    r.add_argument("figure", choices=("fig3", "fig5", "delay"))
    r.add_argument("--px")
    return p


STOCHASTIC = {("region", "search"), ("scheme", "superposition"), ("attack", None), ("softcover", None)}


def _read_config(path) -> dict:
    out = {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    for lineno, line in enumerate(p.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        k, v = (t.strip() for t in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def _merge(args):
    if getattr(args, "config", None):
        for k, v in _read_config(args.config).items():
            if not hasattr(args, k):
                raise ConfigError(f"unknown config key {k!r} for this command")
            if getattr(args, k) is None:
                setattr(args, k, v)
    for k, v in DEFAULTS.items():
        if hasattr(args, k) and getattr(args, k) is None:
            setattr(args, k, v)
    # config values arrive as strings
    for k in ("n", "d", "restarts", "trials", "seeds", "seed", "grid"):
        if getattr(args, k, None) is not None:
            try:
                setattr(args, k, int(args.__dict__[k]))
            except ValueError as exc:
                raise ConfigError(f"{k} must be an integer") from exc
    for k in ("eps", "R", "R0", "rate", "pi"):
        if getattr(args, k, None) is not None:
            setattr(args, k, float(args.__dict__[k]))
    key = (args.command, getattr(args, "job", None))
    if key in STOCHASTIC and getattr(args, "seed", None) is None:
        raise ConfigError("--seed is required for stochastic jobs")
    return args


def _need(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise ConfigError(f"--{n.replace('_', '-')} is required")


# -- jobs -----------------------------------------------------------------------------


def _px(a, default="0.5,0.5"):
    return cio.parse_pmf(a.px if a.px is not None else default)


def _region_hamming(a):
    px = _px(a)
    rows = [(r0, hamming_tradeoff(px.probs, r0)) for r0 in cio.parse_grid(a.r0_grid)]
    return ("R0", "Pi"), rows


def _region_lp(a):
    px = _px(a)
    payoff = cio.parse_payoff(a.payoff or f"hamming:{px.alphabet_size}")
    rows = [(r0, lossless_lp(px.probs, payoff, r0)) for r0 in cio.parse_grid(a.r0_grid)]
    return ("R0", "Pi"), rows


def _region_bsc(a):
    curve = bsc_example_curve(a.variant, cio.parse_grid(a.alpha_grid),
                              cio.parse_grid(a.beta_grid) if a.variant in ("B", "AB") else None)
    return curve.columns, curve.rows.tolist()


def _region_equivocation(a):
    _need(a, "variant")
    px = _px(a)
    if a.variant == "X":
        _need(a, "channel")
        ch = cio.parse_channel(a.channel)
    else:
        _need(a, "pu_x", "py_u")
        ch = (cio.parse_channel(a.pu_x), cio.parse_channel(a.py_u))
    rows = []
    for r0 in cio.parse_grid(a.r0_grid):
        pt = equivocation_boundary(a.variant, px.probs, ch, r0)
        rows.append((pt.R, pt.R0, pt.D, pt.E))
    return ("R", "R0", "D", "E"), rows


def _region_delay(a):
    px = _px(a)
    xz = 1.0 - np.eye(px.alphabet_size)
    curve = delay_boundary(px.probs, xz, a.d, cio.parse_grid(a.pi_grid))
    return curve.columns, curve.rows.tolist()


def _region_search(a):
    px = _px(a)
    payoff = cio.parse_payoff(a.payoff or "agree_and_hide:2", ny=px.alphabet_size)
    wx = cio.parse_channel(a.wx) if a.wx else None
    wy = cio.parse_channel(a.wy) if a.wy else None
    cfg = SearchConfig(restarts=a.restarts, seed=a.seed)
    res = inner_bound_search(px, payoff, wx, wy, a.R if a.R is not None else np.inf,
                             a.R0 if a.R0 is not None else np.inf, cfg)
    t = res.triple
    return ("R", "R0", "Pi", "restarts", "seed"), [(t.R, t.R0, t.Pi, res.restarts_run, res.seed)]


def _region_variant(a):
    rg, r0g = cio.parse_grid(a.R_grid), cio.parse_grid(a.R0_grid)
    grid = variant_payoff_grid(rg, r0g, a.grid)
    rows = [(r, r0) + tuple(grid[v][i, j] for v in VARIANTS) for i, r in enumerate(rg) for j, r0 in enumerate(r0g)]
    return ("R", "R0") + tuple(f"Pi_{v}" for v in VARIANTS), rows


def _scheme_cyclic(a):
    _need(a, "n", "eps")
    code = build_cyclic_bin_code(_px(a).probs, a.n, a.eps)
    rows = []
    for j in range(code.num_bins):
        for l in range(code.n):
            rows.append((j, l, "".join(map(str, code.bins[j, l])), code.alphas[j]))
    meta = {"bins": code.num_bins, "rate": code.rate, "typical_mass": code.typical_mass,
            "kept_mass": code.kept_mass, "discarded_mass": code.discarded_mass}
    return ("bin", "row", "sequence", "alpha"), rows, meta


def _scheme_superposition(a):
    _need(a, "aux", "n", "R", "R0")
    aux = cio.parse_aux(a.aux)
    cb = sample_superposition_codebook(aux, a.n, a.R, a.R0, a.seed)
    p, q = induced_joint_exact(cb), idealized_joint_exact(cb)
    block = tuple(int(v) for v in str(a.block).split(","))
    rows = [(a.n, cb.nR, cb.nR0, a.seed, total_variation(p.table, q.table), lemma_block_distance(cb, block),
             p.meta["fallback_rows"])]
    return ("n", "nR", "nR0", "seed", "tv_P_Q", "tv_Q_Qhat", "encoder_fallbacks"), rows


def _attack(a):
    _need(a, "n", "eps")
    px = _px(a)
    code = build_cyclic_bin_code(px.probs, a.n, a.eps)
    disc = DisclosureSpec() if a.disclosure == "none" else DisclosureSpec.causal(1, "wx")
    payoff = PayoffTable.hamming(px.alphabet_size, px.alphabet_size)
    rep = simulate_payoff(code, payoff, disc, a.trials, a.seed, pi=a.pi)
    e = rep.extra
    row = (a.n, a.eps, a.disclosure, a.trials, a.seed, rep.avg_value, rep.avg_se, rep.min_value, rep.min_se,
           e.get("decoded_avg", float("nan")), e.get("decoded_se", float("nan")), e["error_rate"], e["error_se"],
           pi_max_hamming(px.probs),
           rep.whp_estimate if rep.whp_estimate is not None else float("nan"))
    cols = ("n", "eps", "disclosure", "trials", "seed", "avg", "avg_se", "min", "min_se", "decoded_avg",
            "decoded_se", "error_rate", "error_se", "pi_max", "whp")
    return cols, [row]


def _softcover(a):
    _need(a, "pu", "channel", "rate", "n_list")
    pu = cio.parse_pmf(a.pu)
    ch = cio.parse_channel(a.channel)
    seeds = range(a.seed, a.seed + a.seeds)
    rows = []
    for n in cio.parse_grid(a.n_list):
        mean, se = soft_covering_mean_tv(pu.probs, ch, int(n), a.rate, seeds)
        rows.append((int(n), a.rate, a.seeds, mean, se))
    return ("n", "rate", "codebooks", "mean_tv", "se"), rows


def _reproduce(a):
    if a.figure == "fig3":
        px = _px(a, "0.25,0.25,0.5")
        rows = [("solid", r0, hamming_tradeoff(px.probs, r0)) for r0 in cio.parse_grid("0:3:0.05")]
        rows += [("phi", r0, phi(r0)) for r0 in cio.parse_grid("0:3:0.05")]
        rows += [("knot", x, y) for x, y in phi_knots(8)]
        rows += [("pi_max", 0.0, pi_max_hamming(px.probs))]
        return ("series", "R0", "Pi"), rows
    if a.figure == "fig5":
        rows = []
        for v in VARIANTS:
            curve = bsc_example_curve(v, cio.parse_grid("0:0.5:0.01"),
                                      cio.parse_grid("0:0.5:0.02") if v in ("B", "AB") else None)
            rows += [(v,) + tuple(r) for r in curve.rows]
        return ("panel", "alpha", "beta", "R", "R0", "Pi"), rows
    px = _px(a)
    rows = []
    for d in (1, 2, 4):
        curve = delay_boundary(px.probs, 1.0 - np.eye(px.alphabet_size), d, cio.parse_grid("0.1:0.5:0.1"))
        for pi, inner, outer, _ in curve.rows:
            rows.append((d, pi, inner, outer, d * inner))
    return ("d", "Pi", "R0_inner", "R0_outer", "R0_times_d"), rows


JOBS = {
    ("region", "hamming"): _region_hamming, ("region", "lp"): _region_lp, ("region", "bsc"): _region_bsc,
    ("region", "equivocation"): _region_equivocation, ("region", "delay"): _region_delay,
    ("region", "search"): _region_search, ("region", "variant"): _region_variant,
    ("scheme", "cyclic"): _scheme_cyclic, ("scheme", "superposition"): _scheme_superposition,
    ("attack", None): _attack, ("softcover", None): _softcover, ("reproduce", None): _reproduce,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _parser()
    try:
        args = _merge(parser.parse_args(argv))
        out = JOBS[(args.command, getattr(args, "job", None))](args)
        columns, rows = out[0], out[1]
        meta = out[2] if len(out) > 2 else None
        header = cio.provenance("causal-secrecy " + shlex.join(argv), getattr(args, "seed", None))
        if meta:
            header.append("summary: " + json.dumps(meta, sort_keys=True))
        if args.format == "json":
            text = cio.json_text({"columns": list(columns), "rows": [list(r) for r in rows], "summary": meta},
                                 header)
        else:
            text = cio.csv_text(columns, rows, header)
    except SystemExit as exc:                       # --help
        return int(exc.code or 0)
    except ResourceError as exc:
        print(f"resource budget exceeded: {exc}", file=stderr)
        return EXIT_RESOURCE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=stderr)
        return EXIT_CONFIG
    if args.out:
        Path(args.out).write_text(text)
    else:
        stdout.write(text)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
