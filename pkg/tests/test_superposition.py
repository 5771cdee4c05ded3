import itertools

import numpy as np
import pytest

from causal_secrecy.errors import ResourceError
from causal_secrecy.prob import Channel, PayoffTable, bsc, product_pmf, total_variation
from causal_secrecy.region import AuxSystem
from causal_secrecy.schemes import (SuperpositionCodebook, encoder_table, idealized_joint_exact, induced_joint_exact,
                                    likelihood_encode, pq_distance, qhat_joint, sample_superposition_codebook,
                                    soft_covering_codebook, soft_covering_tv, stochastic_decode)

from .oracles import superposition_tables_loops

HAM = PayoffTable.hamming(2, 2)


def u_copies_x(noise=0.0, wx=None):
    """U is X through BSC(noise), V trivial, Y = U."""
    puv = bsc(noise).rows[:, :, None]
    py = np.eye(2)[:, None, :]
    return AuxSystem.build([0.5, 0.5], puv, py, HAM, wx=wx)


def two_layer(wx=None):
    """U and V are independent noisy views of X; Y = V."""
    puv = bsc(0.3).rows[:, :, None] * bsc(0.35).rows[:, None, :]
    py = np.broadcast_to(np.eye(2)[None], (2, 2, 2))
    return AuxSystem.build([0.5, 0.5], puv, py, HAM, wx=wx)


def test_zero_rates_single_pair():
    cb = sample_superposition_codebook(two_layer(), 4, 0.0, 0.0, seed=3)
    assert cb.cu.shape == (1, 4) and cb.cv.shape == (1, 1, 4)
    rng = np.random.default_rng(0)
    assert all(likelihood_encode(cb, [0, 1, 1, 0], 0, rng)[0] == 0 for _ in range(20))


def test_seed_determinism_and_json():
    a = sample_superposition_codebook(two_layer(), 5, 0.4, 0.2, seed=11)
    b = sample_superposition_codebook(two_layer(), 5, 0.4, 0.2, seed=11)
    assert np.array_equal(a.cu, b.cu) and np.array_equal(a.cv, b.cv)
    for explicit in (True, False):
        c = SuperpositionCodebook.from_json(a.to_json(explicit), two_layer())
        assert np.array_equal(a.cu, c.cu) and np.array_equal(a.cv, c.cv)


def test_non_integer_rate_rejected():
    with pytest.raises(ValueError):
        sample_superposition_codebook(two_layer(), 3, 0.5, 0.0, seed=0)


def test_codebook_budget():
    with pytest.raises(ResourceError):
        sample_superposition_codebook(two_layer(), 40, 1.0, 0.0, seed=0)


def test_codeword_statistics():
    fr = np.array([sample_superposition_codebook(u_copies_x(), 8, 0.5, 0.0, s).cu.mean() for s in range(200)])
    assert fr.shape == (200,)
    sigma = 0.5 / np.sqrt(16 * 8 * 200)
    assert abs(fr.mean() - 0.5) <= 3 * sigma


def test_deterministic_likelihood_picks_match():
    aux = u_copies_x()
    cu = np.array([[0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 0]])
    cb = SuperpositionCodebook(3, 2, 0, 0, cu, np.zeros((4, 1, 3), np.int64), aux)
    rng = np.random.default_rng(1)
    assert {likelihood_encode(cb, [1, 1, 1], 0, rng)[0] for _ in range(50)} == {2}
    m, flagged = likelihood_encode(cb, [1, 1, 0], 0, rng)
    assert flagged


def test_likelihood_ratio_nine_to_one():
    cb = SuperpositionCodebook(2, 1, 0, 0, np.array([[0, 0], [0, 1]]), np.zeros((2, 1, 2), np.int64),
                               u_copies_x(0.1))
    rng = np.random.default_rng(2)
    draws = np.array([likelihood_encode(cb, [0, 0], 0, rng)[0] for _ in range(10_000)])
    f = np.mean(draws == 0)
    assert abs(f - 0.9) <= 3 * np.sqrt(0.09 / 10_000)


def test_decoder_identity_and_uniform():
    cb = sample_superposition_codebook(two_layer(), 4, 0.5, 0.5, seed=4)
    rng = np.random.default_rng(0)
    for m in range(4):
        for k in range(4):
            assert stochastic_decode(cb, m, k, rng).tolist() == cb.cv[m, k].tolist()
    flat = AuxSystem.build([0.5, 0.5], np.ones((2, 1, 1)), np.full((1, 1, 2), 0.5), HAM)
    cb = sample_superposition_codebook(flat, 2, 0.0, 0.0, seed=0)
    ys = np.array([stochastic_decode(cb, 0, 0, rng) for _ in range(10_000)])
    counts = np.bincount(ys[:, 0] * 2 + ys[:, 1], minlength=4)
    chi2 = ((counts - 2500) ** 2 / 2500).sum()
    assert chi2 < 16.27                                     # 0.999 quantile, 3 dof


def test_independent_encoder_gives_p_equal_q():
    aux = AuxSystem.build([0.3, 0.7], np.ones((2, 1, 1)), np.full((1, 1, 2), 0.5), HAM, wx=Channel.identity(2))
    cb = sample_superposition_codebook(aux, 3, 0.0, 0.0, seed=0)
    assert pq_distance(cb) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("seed", range(3))
def test_tables_match_loop_oracle(seed):
    cb = sample_superposition_codebook(two_layer(wx=bsc(0.2)), 3, 2 / 3, 1 / 3, seed)
    P, Q = superposition_tables_loops(cb)
    p, q = induced_joint_exact(cb), idealized_joint_exact(cb)
    assert np.allclose(p.table.reshape(P.shape), P, atol=1e-14)
    assert np.allclose(q.table.reshape(Q.shape), Q, atol=1e-14)
    assert pq_distance(cb) == pytest.approx(total_variation(P, Q), abs=1e-12)


def test_source_marginal_and_encoder_rows():
    cb = sample_superposition_codebook(two_layer(wx=Channel.identity(2)), 4, 0.5, 0.25, seed=9)
    p = induced_joint_exact(cb)
    assert np.allclose(p.marginal("x^n").ravel(), product_pmf([0.5, 0.5], 4), atol=1e-12)
    enc, fallback = encoder_table(cb)
    assert fallback == 0
    assert np.allclose(enc.sum(axis=-1), 1.0, atol=1e-12)


def test_fallback_rows_counted():
    cu = np.array([[0, 0], [0, 1]])
    cb = SuperpositionCodebook(2, 1, 0, 0, cu, np.zeros((2, 1, 2), np.int64), u_copies_x())
    enc, fallback = encoder_table(cb)
    assert fallback == 2                                    # x = 10 and 11 match no codeword
    assert np.allclose(enc.sum(axis=-1), 1.0)


@pytest.mark.parametrize("i", range(3))
def test_qhat_markov_chain(i):
    aux = two_layer(wx=bsc(0.1))
    cb = sample_superposition_codebook(aux, 3, 1 / 3, 1 / 3, seed=5)
    t = qhat_joint(cb, i).table                             # (m, w^n, x_i, y_i)
    nm = cb.num_messages
    t = t.reshape((nm,) + (2,) * 3 + (2, 2))
    # keep w^{i-1}, sum out w_i and the future
    cond = t.sum(axis=tuple(range(1 + i, 4)))
    pxy_u = np.einsum("xuvy->uxy", aux.joint_xuvy())
    pxy_u = pxy_u / pxy_u.sum(axis=(1, 2), keepdims=True)
    for m in range(nm):
        for hist in itertools.product(range(2), repeat=i):
            c = cond[(m,) + hist]
            if c.sum() > 0:
                assert np.allclose(c / c.sum(), pxy_u[cb.cu[m, i]], atol=1e-12)


def test_soft_covering_examples():
    flat = np.full((2, 2), 0.5)
    assert soft_covering_tv([[0, 1, 0]], flat, [0.5, 0.5]) == pytest.approx(0.0, abs=1e-15)
    ch = bsc(0.1).rows
    hand = 0.0
    for y1 in range(2):
        for y2 in range(2):
            hand += abs(ch[0, y1] * ch[1, y2] - 0.25)
    assert soft_covering_tv([[0, 1]], ch, [0.5, 0.5]) == pytest.approx(hand / 2, abs=1e-15)
    assert soft_covering_codebook([0.5, 0.5], 4, 0.5, 0).shape == (4, 4)
