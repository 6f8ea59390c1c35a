"""
Procedural corpus of (image, caption, QA) examples and its file format.

The corpus is a pure function of the seed and flags: all 120 scene
specs are enumerated, a seeded draw picks the held-out specs, and
each training spec is repeated `n_augment` times with independent
pixel noise. Held-out images stay clean.
"""
from concurrent.futures import ThreadPoolExecutor
import logging
from typing import NamedTuple

import numpy as np

from ..codec.vocab import COLORS, SHAPES
from ..formats.tensors import write_tensor, read_tensor
from ..errors import FormatError
from ..utils.tools import max_workers
from .scenes import (ALL_SPECS,
                     IMAGE_SIZE,
                     SceneSpec,
                     render,
                     make_caption,
                     make_qa)

logger = logging.getLogger(__name__)

TRAIN, HELDOUT = 'TRAIN', 'HELDOUT'


class Example(NamedTuple):

    spec : SceneSpec
    image : np.ndarray
    caption : str
    qa : list
    split : str


def make_example(spec, image, split):
    return Example(spec, image, make_caption(spec), make_qa(spec), split)


class Corpus(object):

    def __init__(self, examples, seed=None, flags=None):
        self.examples = list(examples)
        self.seed = seed
        self.flags = dict(flags or {})

    def __len__(self):
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    def split(self, which):
        return [ex for ex in self.examples if ex.split == which]

    @property
    def train(self):
        return self.split(TRAIN)

    @property
    def heldout(self):
        return self.split(HELDOUT)

    def specs(self, which):
        """
        Distinct specs of a split, in enumeration order.
        """
        seen = set(ex.spec for ex in self.examples if ex.split == which)
        return [s for s in ALL_SPECS if s in seen]


def choose_heldout(seed, holdout_frac=0.1, compositional_holdout=False):
    """
    Held-out specs.

    With `compositional_holdout`, whole colour-shape pairs are held
    out (round(holdout_frac * 12) of the 12 pairs, at least one), so
    the held-out set contains compositions absent from training.
    Otherwise round(holdout_frac * 120) specs are drawn.
    """
    if not 0 <= holdout_frac < 1:
        raise ValueError('holdout_frac must be in [0, 1), got %s' % holdout_frac)
    rng = np.random.default_rng([seed, 0])
    if compositional_holdout:
        pairs = [(c, s) for s in SHAPES for c in COLORS]
        npair = max(1, int(round(holdout_frac * len(pairs))))
        chosen = set(pairs[i] for i in rng.choice(len(pairs), npair, replace=False))
        return frozenset(spec for spec in ALL_SPECS if (spec.color, spec.shape) in chosen)
    nheld = int(round(holdout_frac * len(ALL_SPECS)))
    idx = rng.choice(len(ALL_SPECS), nheld, replace=False)
    return frozenset(ALL_SPECS[i] for i in idx)


def build_corpus(seed,
                 holdout_frac=0.1,
                 compositional_holdout=False,
                 n_augment=4,
                 noise_sigma=0.02,
                 image_size=IMAGE_SIZE):
    """
    Generate the corpus.

    Parameters
    ----------

    seed : int

    holdout_frac : float
        Fraction of specs held out from training.

    compositional_holdout : bool
        Hold out whole colour-shape pairs.

    n_augment : int
        Copies of each training spec, each with its own noise.

    noise_sigma : float
        SD of the Gaussian pixel noise added to training images
        before clamping to [0,1].

    image_size : int

    Returns
    -------

    corpus : Corpus
    """
    heldout = choose_heldout(seed, holdout_frac, compositional_holdout)

    def _examples(idx_spec):
        idx, spec = idx_spec
        clean = render(spec, image_size)
        if spec in heldout:
            return [make_example(spec, clean, HELDOUT)]
        out = []
        for copy in range(n_augment):
            rng = np.random.default_rng([seed, 1, idx, copy])
            noisy = np.clip(clean + noise_sigma * rng.standard_normal(clean.shape), 0, 1)
            out.append(make_example(spec, noisy, TRAIN))
        return out

    with ThreadPoolExecutor(max_workers=max_workers()) as pool:
        chunks = list(pool.map(_examples, enumerate(ALL_SPECS)))
    examples = [ex for chunk in chunks for ex in chunk]
    logger.info('built corpus: %d examples, %d held-out specs', len(examples), len(heldout))
    return Corpus(examples,
                  seed=seed,
                  flags={'holdout_frac': holdout_frac,
                         'compositional_holdout': compositional_holdout,
                         'n_augment': n_augment,
                         'noise_sigma': noise_sigma})


def reference_images(image_size=IMAGE_SIZE):
    """
    Clean renders of every spec.
    """
    return np.array([render(spec, image_size) for spec in ALL_SPECS])


def _record_line(example):
    spec = example.spec
    return ('shape=%s color=%s position=%s size=%s split=%s\n'
            % (spec.shape, spec.color, spec.position, spec.size, example.split)).encode('ascii')


def write_corpus(corpus, path):
    """
    One record per example: an ASCII ``key=value`` line with the spec
    fields and split, then the image as a UFT0 tensor.
    """
    with open(path, 'wb') as fobj:
        for example in corpus:
            fobj.write(_record_line(example))
            write_tensor(fobj, example.image)


def read_corpus(path):
    examples = []
    with open(path, 'rb') as fobj:
        lineno = 0
        while True:
            line = fobj.readline()
            if not line:
                break
            lineno += 1
            try:
                fields = dict(item.split('=', 1) for item in line.decode('ascii').split())
                spec = SceneSpec(fields['shape'], fields['color'],
                                 fields['position'], fields['size']).validate()
                split = fields['split']
            except (KeyError, ValueError, UnicodeDecodeError) as e:
                raise FormatError('%s: bad record %d: %s' % (path, lineno, e))
            if split not in (TRAIN, HELDOUT):
                raise FormatError('%s: bad split %r in record %d' % (path, split, lineno))
            image = read_tensor(fobj).astype(np.float64)
            examples.append(make_example(spec, image, split))
    return Corpus(examples)
