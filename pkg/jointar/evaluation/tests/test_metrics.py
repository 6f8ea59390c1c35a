import os

import numpy as np
import numpy.testing as npt
import pytest

from ...codec.config import CodecConfig
from ...codec.visual import encode_for_understanding, encode_tokens
from ...codec.vocab import EOS, default_vocab, tokenize_text
from ...data.corpus import reference_images, make_example, TRAIN
from ...data.oracle import extract_attributes
from ...data.scenes import ALL_SPECS, render, make_caption, make_qa, parse_prompt
from ...errors import DimensionMismatch, UnparseablePrompt
from ...model.pipeline import JointModel
from ...training.latent_stats import LatentStats
from ...tests.instance import tiny_corpus, tiny_examples, tiny_model
from ..config import EvalConfig
from ..features import oracle_features, D_FEAT
from ..metrics import (toy_fid,
                       fid_noise_floor,
                       attr_match,
                       eval_understanding,
                       teacher_forced_qa_accuracy,
                       generate_for_specs)
from ..report import EvalReport, evaluate


class OracleModel(object):

    """
    Renders prompts exactly and answers from the attribute oracle.
    """

    codec_config = CodecConfig()

    def __init__(self, wrong_answer=None):
        self.vocab = default_vocab()
        self.wrong_answer = wrong_answer
        self.seeds = []

    def generate(self, prompt, n=1, seed=0, order='raster'):
        self.seeds.append(seed)
        return np.array([render(parse_prompt(prompt))] * n)

    def answer(self, image, question, max_tokens=16):
        if self.wrong_answer is not None:
            return self.wrong_answer
        spec = extract_attributes(image)
        return dict(make_qa(spec)).get(question, make_caption(spec))

    def teacher_forced(self, image, question, answer):
        reference = np.array(tokenize_text(answer, self.vocab) + [EOS])
        if self.wrong_answer is not None:
            return np.full_like(reference, EOS), reference
        return reference.copy(), reference


def test_oracle_features():
    refs = reference_images()
    feats = oracle_features(refs)
    assert feats.shape == (len(ALL_SPECS), D_FEAT)
    npt.assert_array_equal(oracle_features(refs[0]), feats[:1])
    npt.assert_allclose(feats[0], encode_for_understanding(refs[0], CodecConfig().enc_seed, D_FEAT).mean(0))
    # patch means of a linear encoder
    npt.assert_allclose(oracle_features(0.5 * refs[:3]), 0.5 * feats[:3], atol=1e-12)
    white = oracle_features(np.ones((2, 16, 16, 3)))
    npt.assert_array_equal(white[0], white[1])
    assert oracle_features(np.ones((0, 16, 16, 3))).shape == (0, D_FEAT)
    with pytest.raises(DimensionMismatch):
        oracle_features(np.ones((1, 14, 14, 3)))


def test_toy_fid():
    refs = reference_images()
    npt.assert_allclose(toy_fid(refs, refs), 0, atol=1e-8)
    floor = fid_noise_floor(refs)
    assert floor > 0
    black = np.zeros((50, 16, 16, 3))
    assert toy_fid(black, refs) > 5 * floor
    assert fid_noise_floor(refs, seed=0) == floor
    with pytest.raises(ValueError):
        toy_fid(black[:0], refs)


def test_attr_match():
    specs = ALL_SPECS[::10]
    prompts = [make_caption(s) for s in specs]
    perfect = attr_match(prompts, [render(s) for s in specs])
    assert list(perfect) == ['shape', 'color', 'position', 'size', 'all']
    assert all(v == 1. for v in perfect.values())

    blank = attr_match(prompts, np.ones((len(specs), 16, 16, 3)))
    assert blank['all'] == 0.

    with pytest.raises(ValueError):
        attr_match(prompts[:2], [render(specs[0])])
    with pytest.raises(UnparseablePrompt):
        attr_match(['a red thing'], [render(specs[0])])


def test_attr_match_on_noise():
    prompts = [make_caption(ALL_SPECS[i % len(ALL_SPECS)]) for i in range(200)]
    noise = np.random.default_rng(0).uniform(size=(200, 16, 16, 3))
    assert attr_match(prompts, noise)['all'] < 0.05


def test_eval_understanding():
    examples = tiny_examples(6)
    text_acc, caption_acc = eval_understanding(OracleModel(), examples)
    assert (text_acc, caption_acc) == (1., 1.)
    assert teacher_forced_qa_accuracy(OracleModel(), examples) == 1.

    wrong = OracleModel(wrong_answer='red')
    text_acc, caption_acc = eval_understanding(wrong, examples)
    expected = np.mean([a == 'red' for ex in examples for _, a in ex.qa])
    npt.assert_allclose(text_acc, expected)
    assert 0 < caption_acc < 1
    with pytest.raises(ValueError):
        eval_understanding(wrong, [])


def test_untrained_model_color_accuracy():
    config, params = tiny_model(seed=0)
    images = [render(spec) for spec in ALL_SPECS]
    stats = LatentStats.from_tokens([encode_tokens(img, 0) for img in images])
    model = JointModel(params, config, CodecConfig(), stats)
    # only the colour question, over every scene
    examples = [make_example(spec, img, TRAIN) for spec, img in zip(ALL_SPECS, images)]
    examples = [ex._replace(qa=[ex.qa[0]]) for ex in examples]
    assert examples[0].qa[0][0] == 'what color is the shape'
    text_acc, _ = eval_understanding(model, examples, max_tokens=4)
    assert text_acc <= 0.3


def test_generate_for_specs():
    model = OracleModel()
    specs = ALL_SPECS[:5]
    prompts, images = generate_for_specs(model, specs, 7, seed=3)
    assert len(prompts) == 7 and images.shape == (7, 16, 16, 3)
    assert model.seeds == list(range(3, 10))
    assert set(prompts) <= set(make_caption(s) for s in specs)
    again, _ = generate_for_specs(OracleModel(), specs, 7, seed=3)
    assert again == prompts


def test_evaluate_and_report(tmpdir):
    corpus = tiny_corpus(8, 2)
    config = EvalConfig(n_gen_samples=30, n_heldout_samples=4, eval_seed=2)
    report = evaluate(OracleModel(), corpus, config, checkpoint_hash='abc123')
    assert report.attr_match['all'] == 1.
    assert report['heldout_attr_all'] == 1.
    assert report.text_acc == 1. and report.caption_token_acc == 1.
    assert report['train_text_acc'] == 1.
    assert np.isfinite(report.toy_fid) and report.toy_fid > 0
    assert report.provenance['checkpoint'] == 'abc123'

    path = report.write(str(tmpdir))
    assert os.path.basename(path) == 'eval_abc123.txt'
    again = EvalReport.read(path)
    assert list(again.metrics) == list(report.metrics)
    npt.assert_array_equal(list(again.metrics.values()), list(report.metrics.values()))
    assert again.provenance['eval_seed'] == '2'

    second = evaluate(OracleModel(), corpus, config, checkpoint_hash='abc123')
    assert second.text() == report.text()


def test_report_checks():
    with pytest.raises(ValueError):
        EvalReport({'text_acc': 1.5})
    report = EvalReport({'text_acc': np.nan, 'toy_fid': 3.})
    assert np.isnan(report.text_acc)
