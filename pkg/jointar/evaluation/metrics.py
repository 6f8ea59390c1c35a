"""
Generation and understanding metrics.
"""
from collections import OrderedDict
import logging

import numpy as np

from ..data.scenes import SceneSpec, CAPTION_QUESTION, make_caption, parse_prompt
from ..data.oracle import attribute_hits
from ..utils.tools import timethis
from .features import oracle_features
from .frechet import FeatureMoments, frechet_distance

logger = logging.getLogger(__name__)

ATTRIBUTES = SceneSpec._fields


def toy_fid(gen_images, ref_images):
    """
    Fréchet distance between oracle-feature moments of two image sets.
    """
    if len(gen_images) == 0 or len(ref_images) == 0:
        raise ValueError('toy_fid needs two non-empty image sets')
    return frechet_distance(FeatureMoments.from_features(oracle_features(gen_images)),
                            FeatureMoments.from_features(oracle_features(ref_images)))


def fid_noise_floor(ref_images, seed=0):
    """
    Toy-FID between two disjoint random halves of a reference set.
    """
    ref_images = np.asarray(ref_images)
    idx = np.random.default_rng(seed).permutation(ref_images.shape[0])
    half = ref_images.shape[0] // 2
    return toy_fid(ref_images[idx[:half]], ref_images[idx[half:2 * half]])


def attr_match(prompts, gen_images):
    """
    Oracle attribute accuracy of generated images against their prompts.

    Parameters
    ----------

    prompts : list of str
        Captions of the form "a <size> <color> <shape> at <position>".

    gen_images : sequence of images

    Returns
    -------

    accuracy : OrderedDict
        Accuracy per attribute and 'all', the rate of images with every
        attribute correct.

    Raises
    ------

    UnparseablePrompt
    """
    if len(prompts) != len(gen_images):
        raise ValueError('%d prompts for %d images' % (len(prompts), len(gen_images)))
    if len(prompts) == 0:
        raise ValueError('attr_match needs at least one image')
    hits = np.array([[attribute_hits(parse_prompt(p), img)[a] for a in ATTRIBUTES]
                     for p, img in zip(prompts, gen_images)])
    accuracy = OrderedDict((a, float(hits[:, i].mean())) for i, a in enumerate(ATTRIBUTES))
    accuracy['all'] = float(hits.all(1).mean())
    return accuracy


def eval_understanding(model, examples, max_tokens=16):
    """
    Exact-match QA accuracy and teacher-forced caption token accuracy.

    Parameters
    ----------

    model : object
        Provides `answer(image, question, max_tokens=...)` returning a
        string and `teacher_forced(image, question, answer)` returning
        predicted and reference token arrays, e.g. `JointModel`.

    examples : list of Example

    Returns
    -------

    text_acc : float
        Fraction of QA pairs whose greedy answer equals the reference.

    caption_token_acc : float
        Fraction of caption positions (EOS included) where the greedy
        prediction under teacher forcing equals the reference token.
    """
    if len(examples) == 0:
        raise ValueError('eval_understanding needs at least one example')
    correct, total = 0, 0
    tok_correct, tok_total = 0, 0
    for ex in examples:
        for question, answer in ex.qa:
            correct += model.answer(ex.image, question, max_tokens=max_tokens) == answer
            total += 1
        predicted, reference = model.teacher_forced(ex.image, CAPTION_QUESTION, ex.caption)
        tok_correct += int(np.sum(np.asarray(predicted) == np.asarray(reference)))
        tok_total += len(reference)
    return correct / float(total), tok_correct / float(tok_total)


def teacher_forced_qa_accuracy(model, examples):
    """
    Token accuracy of QA answers under teacher forcing.
    """
    tok_correct, tok_total = 0, 0
    for ex in examples:
        for question, answer in ex.qa:
            predicted, reference = model.teacher_forced(ex.image, question, answer)
            tok_correct += int(np.sum(np.asarray(predicted) == np.asarray(reference)))
            tok_total += len(reference)
    return tok_correct / float(tok_total)


@timethis
def generate_for_specs(model, specs, n_samples, seed, order='raster'):
    """
    Sample `n_samples` images with prompts drawn uniformly from `specs`.

    Sample `i` uses seed `seed + i`.

    Returns
    -------

    prompts : list of str

    images : np.float((n_samples, S, S, 3))
    """
    specs = list(specs)
    if not specs:
        return [], np.zeros((0,))
    rng = np.random.default_rng([seed, len(specs)])
    chosen = rng.integers(len(specs), size=n_samples)
    prompts = [make_caption(specs[i]) for i in chosen]
    images = [model.generate(p, n=1, seed=seed + i, order=order)[0]
              for i, p in enumerate(prompts)]
    logger.info('generated %d images over %d specs', n_samples, len(specs))
    return prompts, np.array(images)
