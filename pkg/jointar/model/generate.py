"""
Inference: image-token generation and text decoding.

Every routine has a cached path (KV cache, one incremental step per
token) and a cache-free path that recomputes the full forward at each
step. Both consume the rng identically, so they agree up to rounding.
"""
import logging

import numpy as np
from scipy.special import softmax

from ..codec.vocab import EOS
from ..sequence.masks import AttentionMask
from ..sequence.permutations import Permutation, RASTER, sample_permutation
from ..sequence.streams import (build_generation_sequence,
                                build_understanding_sequence,
                                text_entry,
                                TokenStream,
                                UND)
from .backbone import forward
from .diffusion import DiffusionHead, DiffusionSchedule, diffusion_sample
from .heads import text_logits
from .kv_cache import KVCache, forward_incremental, BIDIRECTIONAL, CAUSAL

logger = logging.getLogger(__name__)

MAX_ANSWER_TOKENS = 16


def _head_and_schedule(params, config, schedule):
    head = DiffusionHead.from_params(params, config)
    if schedule is None:
        schedule = DiffusionSchedule.from_config(config)
    return head, schedule


def generate_image_tokens(params, config, prompt_ids, rng, perm=None,
                          schedule=None, use_cache=True):
    """
    Generate the continuous tokens of one image.

    Parameters
    ----------

    params : ModelParams

    config : ModelConfig

    prompt_ids : list of int
        Prompt without specials.

    rng : np.random.Generator
        Drives the diffusion sampler.

    perm : Permutation (optional)
        Generation order, raster by default.

    schedule : DiffusionSchedule (optional)

    use_cache : bool
        Incremental decoding with a KV cache; otherwise recompute the
        full stream at every step.

    Returns
    -------

    tokens : np.float((n_img, token_dim))
        Standardized tokens in raster order.
    """
    n_img, grid = config.n_img, config.grid
    if perm is None:
        perm = Permutation.identity(n_img)
    head, schedule = _head_and_schedule(params, config, schedule)
    tokens = np.zeros((n_img, config.token_dim), config.dtype)
    stream, mask = build_generation_sequence(prompt_ids, tokens, perm, grid)
    prefix_len = mask.prefix_len

    if use_cache:
        cache = KVCache(config)
        z = forward_incremental(params, cache, stream.entries[:prefix_len],
                                BIDIRECTIONAL, config, grid)[-1]
        for k in range(n_img):
            x = diffusion_sample(head, schedule, z, rng)
            tokens[perm[k]] = x
            if k + 1 < n_img:
                entry = stream.entries[prefix_len + k]._replace(payload=x)
                z = forward_incremental(params, cache, [entry], CAUSAL, config, grid)[-1]
    else:
        for k in range(n_img):
            # not-yet-generated tokens sit after position prefix_len - 1 + k
            # and are invisible to it under the causal mask
            stream, mask = build_generation_sequence(prompt_ids, tokens, perm, grid)
            z = forward(params, stream, mask, config)[prefix_len - 1 + k]
            tokens[perm[k]] = diffusion_sample(head, schedule, z, rng)
    return tokens


def sample_image_tokens(params, config, prompt_ids, n, seed, order=RASTER,
                        schedule=None, use_cache=True):
    """
    Generate `n` images; sample `i` uses its own generator seeded
    with `seed + i`, which also draws its order when `order` is random.

    Returns
    -------

    tokens : np.float((n, n_img, token_dim))
    """
    if n < 1:
        raise ValueError('n must be at least 1')
    out = []
    for i in range(n):
        rng = np.random.default_rng(seed + i)
        logger.debug('sampling image %d of %d with seed %d', i + 1, n, seed + i)
        perm = sample_permutation(order, config.n_img, rng)
        out.append(generate_image_tokens(params, config, prompt_ids, rng, perm=perm,
                                         schedule=schedule, use_cache=use_cache))
    return np.array(out)


def _choose(logits, greedy, rng):
    if greedy:
        return int(np.argmax(logits))
    p = softmax(logits.astype(float))
    return int(rng.choice(p.shape[0], p=p))


def decode_text(params, config, enc_feats, question_ids,
                max_tokens=MAX_ANSWER_TOKENS, greedy=True, rng=None, use_cache=True):
    """
    Decode an answer to a question about encoded image features.

    Decoding stops at EOS, which is not returned, or after
    `max_tokens` tokens.

    Parameters
    ----------

    params : ModelParams

    config : ModelConfig

    enc_feats : np.float((n_enc, d_model))

    question_ids : list of int

    max_tokens : int

    greedy : bool
        Argmax decoding; otherwise sample from the softmax with `rng`.

    rng : np.random.Generator (optional)

    use_cache : bool

    Returns
    -------

    answer_ids : list of int
    """
    if not greedy and rng is None:
        raise ValueError('categorical decoding needs an rng')
    stream, mask = build_understanding_sequence(enc_feats, question_ids, [])
    prefix_len = len(stream)
    answer = []

    if use_cache:
        cache = KVCache(config)
        z = forward_incremental(params, cache, stream.entries, BIDIRECTIONAL, config)[-1]
        while len(answer) < max_tokens:
            tok = _choose(text_logits(params, z), greedy, rng)
            if tok == EOS:
                break
            answer.append(tok)
            if len(answer) == max_tokens:
                break
            entry = text_entry(tok, prefix_len + len(answer) - 1, UND)
            z = forward_incremental(params, cache, [entry], CAUSAL, config)[-1]
    else:
        entries = list(stream.entries)
        while len(answer) < max_tokens:
            mask = AttentionMask.prefix_lm(len(entries), prefix_len)
            z = forward(params, TokenStream(entries, UND), mask, config)[-1]
            tok = _choose(text_logits(params, z), greedy, rng)
            if tok == EOS:
                break
            answer.append(tok)
            entries.append(text_entry(tok, len(entries), UND))
    return answer


def teacher_forced_predictions(params, config, enc_feats, question_ids, answer_ids):
    """
    Greedy predictions at every answer position (including EOS) when
    the reference answer is fed as input.

    Returns
    -------

    predicted : np.int(len(answer_ids) + 1)

    reference : np.int(len(answer_ids) + 1)
    """
    stream, mask = build_understanding_sequence(enc_feats, question_ids, answer_ids)
    z = forward(params, stream, mask, config)
    flagged = np.array(stream.loss_positions)
    logits = text_logits(params, z[flagged - 1])
    reference = np.array([stream[p].payload for p in flagged])
    return np.argmax(logits, -1), reference
