from itertools import permutations

import numpy as np
import numpy.testing as npt
import pytest
from scipy import stats

from ...codec.vocab import BOS, BOI, SEP, EOS
from ...errors import LengthMismatch, InvalidPermutation, EmptyQuestion, ShapeMismatch
from ...tests.decorators import set_sampling_params_iftrue
from ...tests.flags import SMALL_SAMPLES
from ..streams import (build_generation_sequence,
                       build_understanding_sequence,
                       TEXT, IMAGE, BOI_ENTRY, ENCFEAT, GEN, UND, SENTINEL)
from ..masks import AttentionMask
from ..permutations import Permutation, sample_permutation, RASTER, RANDOM
from ..batching import collate, PAD_CODE, IMAGE_CODE, TEXT_CODE


def _latents(n_img=16, token_dim=16, seed=0):
    return np.random.default_rng(seed).standard_normal((n_img, token_dim))


def test_generation_layout():
    latents = _latents()
    stream, mask = build_generation_sequence([7, 8, 9], latents, Permutation.identity(16))
    assert len(stream) == 21
    assert stream.task == GEN
    assert stream.modalities == [TEXT] * 4 + [BOI_ENTRY] + [IMAGE] * 16
    assert stream[0].payload == BOS and stream[4].payload == BOI
    npt.assert_array_equal([e.pos1d for e in stream], np.arange(21))

    # rows 0-4 see each other, image rows are causal
    assert mask.allow[:5, :5].all()
    assert not mask.allow[:5, 5:].any()
    for k in range(16):
        npt.assert_array_equal(mask.allow[5 + k], np.arange(21) <= 5 + k)

    assert stream.loss_positions == list(range(5, 21))
    # raster order enumerates cells row-major
    assert [e.pos2d for e in stream.entries[5:]] == [divmod(k, 4) for k in range(16)]
    assert stream[4].target_pos2d == (0, 0)
    assert stream[5].target_pos2d == (0, 1)
    assert stream[20].target_pos2d == SENTINEL
    npt.assert_array_equal(stream[7].payload, latents[2])


def test_empty_prompt():
    stream, mask = build_generation_sequence([], _latents(), Permutation.identity(16))
    assert len(stream) == 18
    assert mask.prefix_len == 2


def test_reversal_permutation():
    latents = _latents(n_img=4, token_dim=3)
    stream, _ = build_generation_sequence([5], latents, Permutation([3, 2, 1, 0]))
    first = stream[3]
    assert first.modality == IMAGE
    assert first.pos2d == (1, 1)
    assert first.target_pos2d == (1, 0)
    assert stream[2].target_pos2d == (1, 1)
    npt.assert_array_equal(first.payload, latents[3])


def test_generation_errors():
    with pytest.raises(LengthMismatch):
        build_generation_sequence([1], _latents(16), Permutation.identity(9))
    with pytest.raises(LengthMismatch):
        build_generation_sequence([1], _latents(6), Permutation.identity(6), grid=(2, 2))
    with pytest.raises(InvalidPermutation):
        build_generation_sequence([1], _latents(4), [0, 0, 1, 2])
    with pytest.raises(InvalidPermutation):
        Permutation([1, 2, 3])
    with pytest.raises(InvalidPermutation):
        Permutation([])


def test_understanding_layout():
    feats = np.random.default_rng(1).standard_normal((16, 8))
    stream, mask = build_understanding_sequence(feats, [20, 21, 22], [30])
    assert len(stream) == 23
    assert stream.task == UND
    assert stream.modalities[:16] == [ENCFEAT] * 16
    assert [e.payload for e in stream.entries[16:]] == [BOS, 20, 21, 22, SEP, 30, EOS]
    assert stream.loss_positions == [21, 22]
    assert mask.prefix_len == 21
    assert mask.allow[:21, :21].all()
    for i in range(21, 23):
        for j in range(i + 1, 23):
            assert not mask.allow[i, j]

    prefix, pmask = build_understanding_sequence(feats, [20, 21, 22], [])
    assert len(prefix) == 21
    assert pmask.allow.all()
    assert prefix.loss_positions == []

    with pytest.raises(EmptyQuestion):
        build_understanding_sequence(feats, [], [30])


def test_mask_checks():
    assert AttentionMask.causal(4).allow.sum() == 10
    with pytest.raises(ShapeMismatch):
        AttentionMask(np.ones((3, 4), bool))
    with pytest.raises(ValueError):
        AttentionMask(np.zeros((3, 3), bool))
    with pytest.raises(ValueError):
        AttentionMask.prefix_lm(3, 4)


def test_permutation_inverse():
    perm = Permutation([2, 0, 3, 1])
    inv = perm.inverse()
    npt.assert_array_equal(perm.order[inv.order], np.arange(4))
    assert not perm.is_raster
    assert Permutation.identity(5).is_raster


def test_sample_permutation():
    rng = np.random.default_rng(0)
    assert sample_permutation(RASTER, 16, rng) == Permutation.identity(16)
    a = sample_permutation(RANDOM, 3, np.random.default_rng(5))
    b = sample_permutation(RANDOM, 3, np.random.default_rng(5))
    assert a == b
    with pytest.raises(ValueError):
        sample_permutation('spiral', 3, rng)
    with pytest.raises(ValueError):
        sample_permutation(RANDOM, 0, rng)


@set_sampling_params_iftrue(SMALL_SAMPLES, ndraw=6000)
def test_random_permutation_uniform(ndraw=100000):
    rng = np.random.default_rng(2)
    index = dict((p, i) for i, p in enumerate(permutations(range(3))))
    counts = np.zeros(6)
    for _ in range(ndraw):
        counts[index[tuple(sample_permutation(RANDOM, 3, rng).order)]] += 1
    if ndraw >= 100000:
        npt.assert_allclose(counts / ndraw, 1 / 6., atol=0.01)
    assert stats.chisquare(counts).pvalue > 1e-4


def test_collate_mixed():
    latents = _latents(n_img=4, token_dim=3)
    gen = build_generation_sequence([6, 7], latents, Permutation([1, 0, 3, 2]), grid=(2, 2))
    feats = np.ones((2, 5))
    und = build_understanding_sequence(feats, [9, 12], [10, 11])
    batch = collate([gen, und], token_dim=3, d_model=5)

    assert batch.shape == (2, 9)
    npt.assert_array_equal(batch.lengths, [8, 9])
    assert batch.tasks == [GEN, UND]
    assert batch.count(GEN) == 1

    # padding of the GEN row
    assert batch.modality[0, 8] == PAD_CODE
    npt.assert_array_equal(batch.allow[0, 8], np.arange(9) == 8)
    assert not batch.allow[0, :8, 8].any()
    assert not batch.text_pred[0].any()

    # BOI (position 3) predicts the first image token
    npt.assert_array_equal(np.nonzero(batch.image_pred[0])[0], [3, 4, 5, 6])
    npt.assert_array_equal(batch.image_target[0, 3], latents[1])
    assert batch.modality[0, 4] == IMAGE_CODE
    npt.assert_array_equal(batch.pos2d[0, 4:8], [1, 0, 3, 2])
    npt.assert_array_equal(batch.target2d[0, 3:8], [1, 0, 3, 2, 4])

    # SEP (position 5) predicts the first answer token, the last answer token predicts EOS
    npt.assert_array_equal(np.nonzero(batch.text_pred[1])[0], [5, 6, 7])
    npt.assert_array_equal(batch.text_target[1, 5:8], [10, 11, EOS])
    assert batch.modality[1, 2] == TEXT_CODE
    assert not batch.image_pred[1].any()
