import numpy as np
import numpy.testing as npt
import pytest
from traitlets import TraitError

from ...errors import UnknownWord, DimensionMismatch
from ...tests.decorators import set_seed_iftrue
from ...tests.flags import SET_SEED
from ...data.scenes import ALL_SPECS, render, make_caption
from ..vocab import Vocab, default_vocab, tokenize_text, SPECIALS, EOS, BOS
from ..config import CodecConfig
from ..visual import (codec_matrix,
                      encode_image,
                      decode_image,
                      encode_for_understanding,
                      encode_tokens,
                      decode_tokens,
                      grid_to_tokens,
                      tokens_to_grid,
                      psnr)

# regression floor for clean renders with codec_seed=0
PSNR_FLOOR = 10.


def test_vocab_layout():
    vocab = default_vocab()
    assert vocab.size == 64
    assert [vocab.word(i) for i in range(5)] == list(SPECIALS)
    assert len(set(vocab.tokens)) == vocab.size
    with pytest.raises(ValueError):
        Vocab(size=10)


def test_tokenize_text():
    vocab = default_vocab()
    assert tokenize_text('red square', vocab) == [vocab.id('red'), vocab.id('square')]
    assert tokenize_text('', vocab) == []
    with pytest.raises(UnknownWord) as e:
        tokenize_text('red blorp', vocab)
    assert e.value.word == 'blorp'
    # UnknownWord is a KeyError for callers unaware of jointar
    with pytest.raises(KeyError):
        vocab.id('blorp')


def test_detokenize_roundtrip():
    vocab = default_vocab()
    for spec in ALL_SPECS:
        caption = make_caption(spec)
        ids = tokenize_text(caption, vocab)
        assert vocab.detokenize(ids) == caption
        assert vocab.detokenize([BOS] + ids + [EOS, vocab.id('red')]) == caption
    assert vocab.detokenize(tokenize_text('  blue   circle ', vocab)) == 'blue circle'


def test_codec_matrix_orthonormal():
    for seed in range(3):
        E = codec_matrix(seed)
        assert E.shape == (4, 12)
        npt.assert_allclose(E.dot(E.T), np.identity(4), atol=1e-12)
    assert not np.allclose(codec_matrix(0), codec_matrix(1))


def test_zero_and_gray():
    zero = np.zeros((16, 16, 3))
    grid = encode_image(zero, 0)
    assert grid.shape == (8, 8, 4)
    npt.assert_array_equal(grid, 0)
    npt.assert_array_equal(decode_image(np.zeros((8, 8, 4)), 0), 0)

    gray = 0.5 * np.ones((16, 16, 3))
    expected = codec_matrix(0).dot(0.5 * np.ones(12))
    npt.assert_allclose(encode_image(gray, 0), np.tile(expected, (8, 8, 1)), atol=1e-12)
    # uniform patches survive the round trip
    npt.assert_allclose(decode_image(encode_image(gray, 0), 0), gray, atol=1e-12)


@set_seed_iftrue(SET_SEED)
def test_projection_idempotent():
    img = np.random.uniform(size=(16, 16, 3))
    grid = encode_image(img, 3)
    again = encode_image(decode_image(grid, 3, clip=False), 3)
    npt.assert_allclose(again, grid, atol=1e-6)


@set_seed_iftrue(SET_SEED)
def test_linearity():
    x, y = np.random.uniform(size=(2, 8, 8, 3))
    a, b = 0.3, -1.7
    npt.assert_allclose(encode_image(a * x + b * y, 0),
                        a * encode_image(x, 0) + b * encode_image(y, 0), atol=1e-6)


def test_odd_dimensions():
    with pytest.raises(DimensionMismatch):
        encode_image(np.zeros((15, 16, 3)), 0)
    with pytest.raises(DimensionMismatch):
        encode_for_understanding(np.zeros((14, 16, 3)), 1, 16)
    with pytest.raises(DimensionMismatch):
        decode_image(np.zeros((8, 8, 3)), 0)


def test_primary_colors_preserved():
    for channel in range(3):
        img = np.zeros((16, 16, 3))
        img[..., channel] = 1.
        out = decode_image(encode_image(img, 0), 0)
        assert np.all(out.argmax(-1) == channel)


def test_roundtrip_psnr():
    for spec in ALL_SPECS[::7]:
        img = render(spec)
        assert psnr(img, decode_tokens(encode_tokens(img, 0), 0, 16)) >= PSNR_FLOOR


@set_seed_iftrue(SET_SEED)
def test_token_layout():
    grid = np.random.standard_normal((8, 8, 4))
    tokens = grid_to_tokens(grid)
    assert tokens.shape == (16, 16)
    npt.assert_array_equal(tokens[0], grid[:2, :2].reshape(-1))
    npt.assert_array_equal(tokens[1], grid[:2, 2:4].reshape(-1))
    npt.assert_array_equal(tokens_to_grid(tokens, grid.shape), grid)
    with pytest.raises(DimensionMismatch):
        tokens_to_grid(tokens[:-1], grid.shape)


@set_seed_iftrue(SET_SEED)
def test_understanding_features():
    img = np.random.uniform(size=(16, 16, 3))
    feats = encode_for_understanding(img, 1, 32)
    assert feats.shape == (16, 32)
    npt.assert_array_equal(feats, encode_for_understanding(img.copy(), 1, 32))
    npt.assert_array_equal(encode_for_understanding(np.zeros((16, 16, 3)), 1, 32), 0)

    # one pixel of patch (1, 2) changes only its feature vector
    other = img.copy()
    other[5, 9, 0] += 0.25
    changed = np.any(encode_for_understanding(other, 1, 32) != feats, axis=1)
    npt.assert_array_equal(np.nonzero(changed)[0], [1 * 4 + 2])


def test_codec_config():
    config = CodecConfig()
    assert (config.codec_seed, config.enc_seed, config.image_size) == (0, 1, 16)
    with pytest.raises(TraitError):
        CodecConfig(image_size=10)


def test_aligned_square_exact():
    # squares cover whole 2 x 2 patches, which are uniform
    for spec in ALL_SPECS:
        if spec.shape == 'square':
            img = render(spec)
            npt.assert_allclose(decode_tokens(encode_tokens(img, 0), 0, 16), img, atol=1e-12)
