"""
Encoded training examples and mixed-task batch assembly.
"""
from concurrent.futures import ThreadPoolExecutor
import logging

import numpy as np

from ..codec.visual import encode_tokens, encode_for_understanding
from ..codec.vocab import default_vocab, tokenize_text
from ..data.scenes import CAPTION_QUESTION
from ..errors import ShapeMismatch, EmptyBatch
from ..sequence.batching import collate
from ..sequence.permutations import RANDOM, sample_permutation
from ..sequence.streams import build_generation_sequence, build_understanding_sequence
from ..utils.tools import max_workers
from .latent_stats import LatentStats
from .schedules import order_mode

logger = logging.getLogger(__name__)


def _encode(example, codec_config, d_model):
    return (encode_tokens(example.image, codec_config.codec_seed),
            encode_for_understanding(example.image, codec_config.enc_seed, d_model))


def question_pairs(example, vocab):
    """
    (question ids, answer ids) of the QA templates plus the caption task.
    """
    pairs = [(tokenize_text(q, vocab), tokenize_text(a, vocab)) for q, a in example.qa]
    pairs.append((tokenize_text(CAPTION_QUESTION, vocab), tokenize_text(example.caption, vocab)))
    return pairs


class TrainingSet(object):

    """
    Codec-encoded examples ready for batching.

    Attributes
    ----------

    tokens : np.float((N, n_img, token_dim))
        Standardized continuous tokens.

    features : np.float((N, n_enc, d_model))
        Frozen encoder features.

    prompts : list of list of int
        Caption ids, the generation prompt of each example.

    pairs : list of list of (list of int, list of int)
        Question/answer ids of each example.

    stats : LatentStats
    """

    def __init__(self, examples, tokens, features, prompts, pairs, stats):
        self.examples = list(examples)
        self.tokens = tokens
        self.features = features
        self.prompts = prompts
        self.pairs = pairs
        self.stats = stats

    def __len__(self):
        return len(self.examples)

    @staticmethod
    def from_examples(examples, model_config, codec_config, stats=None, vocab=None):
        """
        Encode examples with the frozen codec and encoder.

        Parameters
        ----------

        examples : list of Example

        model_config : ModelConfig

        codec_config : CodecConfig

        stats : LatentStats (optional)
            Computed from these examples when omitted.

        vocab : Vocab (optional)
        """
        examples = list(examples)
        if not examples:
            raise EmptyBatch('no examples to train on')
        vocab = vocab or default_vocab()
        with ThreadPoolExecutor(max_workers=max_workers()) as pool:
            encoded = list(pool.map(lambda ex: _encode(ex, codec_config, model_config.d_model),
                                    examples))
        raw = np.array([tok for tok, _ in encoded])
        features = np.array([feat for _, feat in encoded]).astype(model_config.dtype)
        if raw.shape[1:] != (model_config.n_img, model_config.token_dim):
            raise ShapeMismatch('codec produces tokens of shape %s, model expects %s'
                                % (raw.shape[1:], (model_config.n_img, model_config.token_dim)))
        if features.shape[1] != model_config.n_enc:
            raise ShapeMismatch('encoder produces %d features, model expects n_enc=%d'
                                % (features.shape[1], model_config.n_enc))
        if stats is None:
            stats = LatentStats.from_tokens(raw)
        tokens = stats.standardize(raw).astype(model_config.dtype)
        prompts = [tokenize_text(ex.caption, vocab) for ex in examples]
        pairs = [question_pairs(ex, vocab) for ex in examples]
        logger.info('encoded %d training examples', len(examples))
        return TrainingSet(examples, tokens, features, prompts, pairs, stats)

    def subset(self, indices):
        indices = list(indices)
        return TrainingSet([self.examples[i] for i in indices],
                           self.tokens[indices],
                           self.features[indices],
                           [self.prompts[i] for i in indices],
                           [self.pairs[i] for i in indices],
                           self.stats)

    def generation_item(self, idx, perm, grid):
        return build_generation_sequence(self.prompts[idx], self.tokens[idx], perm, grid)

    def understanding_item(self, idx, pair):
        question, answer = self.pairs[idx][pair]
        return build_understanding_sequence(self.features[idx], question, answer)


def generation_count(batch_size, task_mix_gen, rng):
    """
    Number of generation examples in a batch: batch_size * task_mix_gen,
    stochastically rounded so the long-run fraction is exact.
    """
    target = batch_size * task_mix_gen
    base = int(np.floor(target))
    return base + int(rng.random() < target - base)


def make_batch(tset, step, train_config, model_config, rng):
    """
    Assemble the batch of one training step.

    Returns
    -------

    batch : Batch

    n_gen : int
        Generation examples in the batch.

    n_random : int
        Generation examples using a random order.
    """
    n_gen = generation_count(train_config.batch_size, train_config.task_mix_gen, rng)
    items = []
    n_random = 0
    for _ in range(n_gen):
        idx = int(rng.integers(len(tset)))
        mode = order_mode(step, train_config, rng)
        n_random += mode == RANDOM
        perm = sample_permutation(mode, model_config.n_img, rng)
        items.append(tset.generation_item(idx, perm, model_config.grid))
    for _ in range(train_config.batch_size - n_gen):
        idx = int(rng.integers(len(tset)))
        pair = int(rng.integers(len(tset.pairs[idx])))
        items.append(tset.understanding_item(idx, pair))
    batch = collate(items, model_config.token_dim, model_config.d_model, model_config.dtype)
    return batch, n_gen, n_random
