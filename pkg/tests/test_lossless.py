import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causal_secrecy.errors import ResourceError
from causal_secrecy.prob import PayoffTable, entropy
from causal_secrecy.region import (decompose_into_uniforms, hamming_tradeoff, lossless_extreme_set, lossless_lp,
                                   lossless_min_key, phi, phi_knots)
from causal_secrecy.region.lossless import cell_vertices, max_uniform_size

from .oracles import lossless_grid_oracle


def test_hamming_extreme_sets():
    pts = lossless_extreme_set(1 - np.eye(2)).points
    assert sorted(map(tuple, pts)) == [(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)]
    assert len(lossless_extreme_set(1 - np.eye(3))) == 7


def test_general_vertices_are_tight():
    rng = np.random.default_rng(3)
    xz = rng.random((3, 3))
    for p in cell_vertices(xz):
        vals = p @ xz
        zstar = np.flatnonzero(vals <= vals.min() + 1e-9)
        tight = np.count_nonzero(p <= 1e-9) + len(zstar) - 1
        assert tight >= 2
        assert p.sum() == pytest.approx(1.0)


def test_vertex_budget():
    with pytest.raises(ResourceError):
        lossless_extreme_set(1 - np.eye(7))


@pytest.mark.parametrize("px,r0,want", [([0.5, 0.5], 1.0, 0.5), ([0.3, 0.7], 0.0, 0.0), ([0.2, 0.5, 0.3], 0.0, 0.0),
                                        ([0.25, 0.25, 0.5], 1.0, 0.5)])
def test_lossless_lp_examples(px, r0, want):
    assert lossless_lp(px, 1 - np.eye(len(px)), r0) == pytest.approx(want, abs=1e-9)


def test_lp_accepts_payoff_table_and_checks_r0():
    assert lossless_lp([0.5, 0.5], PayoffTable.hamming(2), 0.5) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        lossless_lp([0.5, 0.5], 1 - np.eye(2), -0.1)


def test_hamming_tradeoff_examples():
    assert hamming_tradeoff([0.5, 0.5], 0.5) == pytest.approx(0.25)
    assert hamming_tradeoff([0.25, 0.25, 0.5], 2.0) == pytest.approx(0.5)
    assert hamming_tradeoff([0.3, 0.7], 0.0) == 0.0


def test_phi_knots_exact():
    for k, (x, y) in enumerate(phi_knots(6), start=1):
        assert x == math.log2(k) and y == (k - 1) / k
        assert phi(x) == pytest.approx(y, abs=1e-12)


@pytest.mark.parametrize("seed", range(6))
def test_general_payoff_against_grid_oracle(seed):
    rng = np.random.default_rng(seed)
    px = rng.dirichlet(np.ones(3))
    xz = rng.random((3, 3))
    for r0 in (0.0, 0.4, 0.9, 1.6):
        ours = lossless_lp(px, xz, r0)
        grid = lossless_grid_oracle(px, xz, r0)
        # the lattice LP is a restriction, so it can only be lower
        assert grid <= ours + 1e-9
        assert ours - grid < 2e-2


def test_min_key_inverts_lp():
    px = [0.2, 0.5, 0.3]
    for target in (0.1, 0.3, 0.45):
        r0 = lossless_min_key(px, 1 - np.eye(3), target)
        assert lossless_lp(px, 1 - np.eye(3), r0) == pytest.approx(target, abs=1e-7)
    assert lossless_min_key(px, 1 - np.eye(3), 0.9) == math.inf


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**31 - 1))
def test_lp_monotone_concave(k, seed):
    px = np.random.default_rng(seed).dirichlet(np.ones(k))
    grid = np.linspace(0, math.log2(k) + 0.5, 15)
    vals = np.array([lossless_lp(px, 1 - np.eye(k), r) for r in grid])
    assert np.all(np.diff(vals) >= -1e-9)
    assert np.all(vals[1:-1] >= 0.5 * (vals[:-2] + vals[2:]) - 1e-9)


def test_decompose_examples():
    m = decompose_into_uniforms([0.5, 0.25, 0.25], 2)
    got = {s: w for s, w in zip(m.supports(), m.weights)}
    assert got == pytest.approx({(0, 1): 0.5, (0, 2): 0.5})
    m = decompose_into_uniforms(np.full(4, 0.25), 4)
    assert m.weights.tolist() == pytest.approx([1.0])
    p = np.array([0.1, 0.6, 0.3])
    m = decompose_into_uniforms(p, 1)
    assert np.allclose(m.mixture(), p)
    assert all(len(s) == 1 for s in m.supports())
    with pytest.raises(ValueError):
        decompose_into_uniforms(p, 3)


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**31 - 1), st.data())
def test_decomposition_invariants(k, seed, data):
    p = np.random.default_rng(seed).dirichlet(np.ones(k))
    N = max_uniform_size(p)
    n = data.draw(st.integers(1, min(N + 1, k)))
    m = decompose_into_uniforms(p, n)
    assert np.all(m.weights >= -1e-15)
    assert m.weights.sum() == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(m.mixture(), p, atol=1e-10)
    top = int(np.argmax(p))
    for comp, supp in zip(m.components, m.supports()):
        if n <= N:
            assert len(supp) == n
        else:
            assert len(supp) in (N, N + 1) and top in supp
            assert int(np.argmax(comp)) == top or comp[top] == comp.max()


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**31 - 1))
def test_uniform_decomposition_achieves_boundary(k, seed):
    p = np.random.default_rng(seed).dirichlet(np.ones(k))
    N = max_uniform_size(p)
    for n in range(1, min(N + 1, k) + 1):
        m = decompose_into_uniforms(p, n)
        key = float(sum(w * entropy(c) for w, c in zip(m.weights, m.components)))
        pay = float(sum(w * (1 - c.max()) for w, c in zip(m.weights, m.components)))
        assert pay == pytest.approx(hamming_tradeoff(p, key), abs=1e-9)


def test_all_hamming_vertices_sorted_by_support():
    pts = lossless_extreme_set(1 - np.eye(3)).points
    sizes = [np.count_nonzero(p) for p in pts]
    assert sizes == sorted(sizes)
    assert {tuple(np.flatnonzero(p)) for p in pts} == {s for r in (1, 2, 3) for s in itertools.combinations(range(3), r)}
