from itertools import combinations

import numpy as np
import numpy.testing as npt
import pytest

from ...codec.vocab import default_vocab, tokenize_text, COLORS, SHAPES
from ...errors import UnparseablePrompt
from ..scenes import (ALL_SPECS,
                      SceneSpec,
                      render,
                      make_caption,
                      make_qa,
                      parse_prompt)
from ..oracle import extract_attributes, attribute_hits
from ..corpus import (build_corpus,
                      choose_heldout,
                      write_corpus,
                      read_corpus,
                      reference_images,
                      TRAIN,
                      HELDOUT)


def test_all_specs():
    assert len(ALL_SPECS) == 120
    assert len(set(ALL_SPECS)) == 120
    with pytest.raises(ValueError):
        SceneSpec('hexagon', 'red', 'center', 'small').validate()


def test_render_square():
    img = render(SceneSpec('square', 'red', 'top-left', 'large'))
    red = np.all(img == (1., 0., 0.), axis=-1)
    rows, cols = np.nonzero(red)
    assert rows.max() <= 7 and cols.max() <= 7
    assert red.sum() == 64
    assert np.all(img[~red] == 1.)
    npt.assert_array_equal(img, render(SceneSpec('square', 'red', 'top-left', 'large')))


def test_renders_distinct():
    images = reference_images()
    for i, j in combinations(range(len(ALL_SPECS)), 2):
        assert np.any(images[i] != images[j]), (ALL_SPECS[i], ALL_SPECS[j])


def test_templates():
    spec = SceneSpec('circle', 'blue', 'center', 'small')
    assert make_caption(spec) == 'a small blue circle at center'
    qa = dict(make_qa(spec))
    assert qa['what color is the shape'] == 'blue'
    assert qa['what shape is it'] == 'circle'
    assert qa['where is the shape'] == 'center'
    assert qa['how big is the shape'] == 'small'

    vocab = default_vocab()
    for spec in ALL_SPECS:
        tokenize_text(make_caption(spec), vocab)
        for question, answer in make_qa(spec):
            tokenize_text(question, vocab)
            assert len(tokenize_text(answer, vocab)) == 1
        assert parse_prompt(make_caption(spec)) == spec


def test_parse_prompt_errors():
    with pytest.raises(UnparseablePrompt):
        parse_prompt('a red square')
    with pytest.raises(UnparseablePrompt):
        parse_prompt('a huge red square at center')


def test_oracle_sound():
    for spec in ALL_SPECS:
        img = render(spec)
        assert extract_attributes(img) == spec
        assert all(attribute_hits(spec, img).values())


def test_oracle_color_flip():
    spec = SceneSpec('triangle', 'green', 'bottom-right', 'large')
    hits = attribute_hits(spec, render(spec._replace(color='yellow')))
    assert hits == {'shape': True, 'color': False, 'position': True, 'size': True}
    assert extract_attributes(np.ones((16, 16, 3))) == SceneSpec(None, None, None, None)


def test_build_corpus():
    corpus = build_corpus(3, holdout_frac=0.1, n_augment=2)
    assert len(corpus.specs(HELDOUT)) == 12
    assert len(corpus.heldout) == 12
    assert len(corpus.train) == 108 * 2
    assert not set(corpus.specs(HELDOUT)) & set(corpus.specs(TRAIN))

    for ex in corpus.heldout:
        npt.assert_array_equal(ex.image, render(ex.spec))
    for ex in corpus.train:
        assert ex.image.min() >= 0 and ex.image.max() <= 1
        assert ex.caption == make_caption(ex.spec)
        assert ex.split == TRAIN

    again = build_corpus(3, holdout_frac=0.1, n_augment=2)
    assert again.specs(HELDOUT) == corpus.specs(HELDOUT)
    for a, b in zip(corpus, again):
        npt.assert_array_equal(a.image, b.image)
    assert build_corpus(4, n_augment=1).specs(HELDOUT) != corpus.specs(HELDOUT)


def test_compositional_holdout():
    heldout = choose_heldout(0, holdout_frac=0.1, compositional_holdout=True)
    pairs = set((s.color, s.shape) for s in heldout)
    assert len(pairs) == 1
    assert len(heldout) == 10
    train_pairs = set((s.color, s.shape) for s in ALL_SPECS if s not in heldout)
    assert not pairs & train_pairs
    assert len(train_pairs) == len(COLORS) * len(SHAPES) - 1
    with pytest.raises(ValueError):
        choose_heldout(0, holdout_frac=1.)


def test_corpus_file(tmp_path):
    corpus = build_corpus(0, n_augment=1)
    path = str(tmp_path / 'corpus.bin')
    write_corpus(corpus, path)
    back = read_corpus(path)
    assert len(back) == len(corpus)
    for a, b in zip(corpus, back):
        assert (a.spec, a.split, a.caption) == (b.spec, b.split, b.caption)
        npt.assert_array_equal(b.image, a.image.astype(np.float32))
