import numpy as np
import pytest

from causal_secrecy.prob import Channel, PayoffTable, Pmf, bsc, mutual_information
from causal_secrecy.region import (AuxSystem, disclosure_variant_point, inner_point, lossy_aux, min_payoff_no_info,
                                   trivial_aux)

from .oracles import binary_h


def test_singleton_auxiliaries():
    px = Pmf([0.3, 0.7])
    pay = PayoffTable.hamming(2)
    t = inner_point(trivial_aux(px, pay, wx=Channel.identity(2)))
    assert t.as_tuple() == pytest.approx((0.0, 0.0, 0.3))


def test_lossless_identity_point():
    aux = lossy_aux(Pmf.uniform(2), np.eye(2), PayoffTable.hamming(2, 2), wx=Channel.identity(2))
    assert inner_point(aux).as_tuple() == pytest.approx((1.0, 1.0, 0.5), abs=1e-12)


def test_agree_and_hide_bsc_point():
    aux = lossy_aux(Pmf.uniform(2), bsc(0.11), PayoffTable.agree_and_hide(2), wx=Channel.identity(2))
    r, r0, pi = inner_point(aux).as_tuple()
    assert r == pytest.approx(1 - binary_h(0.11), abs=1e-12)
    assert r0 == pytest.approx(1 - binary_h(0.11), abs=1e-12)
    assert pi == pytest.approx(0.445, abs=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_lossy_specialisation(seed):
    rng = np.random.default_rng(seed)
    nx, ny, nz = rng.integers(2, 4, size=3)
    px = Pmf(rng.dirichlet(np.ones(nx)))
    ch = rng.dirichlet(np.ones(ny), size=nx)
    payoff = PayoffTable(rng.random((nx, ny, nz)))
    wx = Channel(rng.dirichlet(np.ones(2), size=nx))
    wy = Channel(rng.dirichlet(np.ones(2), size=ny))
    t = inner_point(lossy_aux(px, ch, payoff, wx, wy))
    pxy = px.probs[:, None] * ch
    pxyw = pxy[:, :, None, None] * wx.rows[:, None, :, None] * wy.rows[None, :, None, :]
    assert t.R == pytest.approx(mutual_information(pxy, (0,), (1,)), abs=1e-12)
    assert t.R0 == pytest.approx(mutual_information(pxyw, (2, 3), (1,)), abs=1e-12)
    assert t.Pi == pytest.approx(min_payoff_no_info(px, payoff, ch), abs=1e-12)


def test_current_symbol_variant():
    px = Pmf.uniform(2)
    pay = PayoffTable.hamming(2, 2)
    aux = lossy_aux(px, np.eye(2), pay, wx=Channel.identity(2))
    assert disclosure_variant_point("current", aux).Pi == pytest.approx(0.0)
    aux = lossy_aux(px, np.eye(2), pay)
    assert disclosure_variant_point("current", aux).Pi == pytest.approx(0.5)
    aux = lossy_aux(px, np.eye(2), pay, wx=bsc(0.2))
    t = disclosure_variant_point("current", aux)
    assert t.Pi == pytest.approx(0.2)
    assert (t.R, t.R0) == pytest.approx((1.0, 0.0))


def test_full_variant_never_beats_causal():
    rng = np.random.default_rng(7)
    for _ in range(10):
        puv = rng.dirichlet(np.ones(4), size=2).reshape(2, 2, 2)
        py = rng.dirichlet(np.ones(2), size=(2, 2))
        aux = AuxSystem.build(Pmf([0.4, 0.6]), puv, py, PayoffTable.agree_and_hide(2), wx=bsc(0.1))
        full, causal = disclosure_variant_point("full", aux), inner_point(aux)
        assert full.Pi <= causal.Pi + 1e-12
        assert (full.R, full.R0) == pytest.approx((causal.R, causal.R0))
    with pytest.raises(ValueError):
        disclosure_variant_point("sideways", aux)


def test_neg_inf_payoff_with_zero_mass():
    pay = PayoffTable.lossless(1 - np.eye(2))
    aux = lossy_aux(Pmf.uniform(2), np.eye(2), pay, wx=Channel.identity(2))
    assert inner_point(aux).Pi == pytest.approx(0.5)
    aux = lossy_aux(Pmf.uniform(2), bsc(0.1), pay)
    assert inner_point(aux).Pi == -np.inf


def test_aux_shape_checks():
    with pytest.raises(ValueError):
        AuxSystem.build(Pmf.uniform(2), np.ones((3, 1, 1)), np.ones((1, 1, 2)) / 2, PayoffTable.hamming(2, 2))
    with pytest.raises(ValueError):
        AuxSystem.build(Pmf.uniform(2), np.ones((2, 1, 1)), np.ones((1, 1, 3)) / 3, PayoffTable.hamming(2, 2))
