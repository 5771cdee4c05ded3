"""Exception types shared across the toolkit."""

import os


class ResourceError(RuntimeError):
    """An enumeration or table would exceed its configured budget."""


class NumericalError(RuntimeError):
    """A numerical routine failed in a way that should not happen (e.g. an infeasible LP)."""


def budget(name, default):
    """Read an integer budget cap from ``CAUSAL_SECRECY_<NAME>`` if set."""
    raw = os.environ.get(f"CAUSAL_SECRECY_{name.upper()}")
    if raw is None:
        return default
    try:
        return int(float(raw))
    except ValueError:
        raise ValueError(f"budget variable CAUSAL_SECRECY_{name.upper()}={raw!r} is not a number")


def check_budget(size, cap, what):
    if size > cap:
        raise ResourceError(f"{what}: {size} exceeds budget {cap}")
