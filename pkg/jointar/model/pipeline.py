"""
Image-level and text-level entry points around a trained model.
"""
import numpy as np

from ..codec.visual import decode_tokens, encode_for_understanding
from ..codec.vocab import default_vocab, tokenize_text
from ..data.scenes import CAPTION_QUESTION
from ..sequence.permutations import RASTER
from .diffusion import DiffusionSchedule
from .generate import (sample_image_tokens,
                       decode_text,
                       teacher_forced_predictions,
                       MAX_ANSWER_TOKENS)


class JointModel(object):

    """
    Parameters together with the frozen codec, latent statistics and
    vocabulary needed to go from prompts to images and from images and
    questions to answers.
    """

    def __init__(self, params, config, codec_config, stats, vocab=None, schedule=None):
        self.params = params
        self.config = config
        self.codec_config = codec_config
        self.stats = stats
        self.vocab = vocab or default_vocab()
        self.schedule = schedule or DiffusionSchedule.from_config(config)

    def generate_tokens(self, prompt, n=1, seed=0, order=RASTER, use_cache=True):
        """
        Standardized tokens of `n` images, shape (n, n_img, token_dim).

        Raises
        ------

        UnknownWord
        """
        prompt_ids = tokenize_text(prompt, self.vocab)
        return sample_image_tokens(self.params, self.config, prompt_ids, n, seed,
                                   order=order, schedule=self.schedule, use_cache=use_cache)

    def decode(self, tokens):
        """
        Standardized tokens of one image back to pixels.
        """
        raw = self.stats.destandardize(np.asarray(tokens, np.float64))
        return decode_tokens(raw, self.codec_config.codec_seed, self.codec_config.image_size)

    def generate(self, prompt, n=1, seed=0, order=RASTER, use_cache=True):
        """
        Images of shape (n, image_size, image_size, 3) in [0,1].
        """
        tokens = self.generate_tokens(prompt, n=n, seed=seed, order=order, use_cache=use_cache)
        return np.array([self.decode(t) for t in tokens])

    def encode(self, image):
        feats = encode_for_understanding(image, self.codec_config.enc_seed, self.config.d_model)
        return feats.astype(self.config.dtype)

    def answer_ids(self, image, question, greedy=True, rng=None, use_cache=True,
                   max_tokens=MAX_ANSWER_TOKENS):
        question_ids = tokenize_text(question, self.vocab)
        return decode_text(self.params, self.config, self.encode(image), question_ids,
                           max_tokens=max_tokens, greedy=greedy, rng=rng, use_cache=use_cache)

    def answer(self, image, question, greedy=True, rng=None, use_cache=True,
               max_tokens=MAX_ANSWER_TOKENS):
        return self.vocab.detokenize(self.answer_ids(image, question, greedy=greedy, rng=rng,
                                                     use_cache=use_cache,
                                                     max_tokens=max_tokens))

    def caption(self, image, **kwargs):
        return self.answer(image, CAPTION_QUESTION, **kwargs)

    def teacher_forced(self, image, question, answer):
        """
        Greedy predictions and references at every answer position.
        """
        return teacher_forced_predictions(self.params, self.config, self.encode(image),
                                          tokenize_text(question, self.vocab),
                                          tokenize_text(answer, self.vocab))
