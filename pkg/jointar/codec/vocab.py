"""
Closed word-level vocabulary for the synthetic scenes corpus.

Token ids are dense in [0, V); the five special tokens occupy ids 0-4.
"""
import numpy as np

from ..errors import UnknownWord

PAD, BOS, EOS, BOI, SEP = 0, 1, 2, 3, 4
SPECIALS = ('<pad>', '<bos>', '<eos>', '<boi>', '<sep>')

COLORS = ('red', 'green', 'blue', 'yellow')
SHAPES = ('square', 'circle', 'triangle')
POSITIONS = ('top-left', 'top-right', 'bottom-left', 'bottom-right', 'center')
SIZES = ('small', 'large')

TEMPLATE_WORDS = ('a', 'at', 'what', 'color', 'is', 'the', 'shape',
                  'where', 'how', 'big', 'describe', 'image')

# words a user may type in a prompt; none of the templates emit them
EXTRA_WORDS = ('an', 'of', 'in', 'on', 'this', 'it', 'picture', 'object',
               'which', 'size', 'position', 'located', 'and', 'with',
               'there', 'one')

DEFAULT_SIZE = 64


class Vocab(object):

    def __init__(self, words=None, size=DEFAULT_SIZE):
        """
        Parameters
        ----------

        words : sequence of str (optional)
            Ordinary (non-special) words, in id order. Defaults
            to the scene vocabulary.

        size : int
            Total vocabulary size V. Remaining ids are filled
            with reserved `<unusedK>` entries.
        """
        if words is None:
            words = (COLORS + SHAPES + POSITIONS + SIZES +
                     TEMPLATE_WORDS + EXTRA_WORDS)
        tokens = list(SPECIALS) + list(words)
        if len(set(tokens)) != len(tokens):
            raise ValueError('vocabulary words must be unique')
        if len(tokens) > size:
            raise ValueError('%d words do not fit in a vocabulary of size %d'
                             % (len(tokens), size))
        tokens.extend('<unused%d>' % i for i in range(size - len(tokens)))
        self.tokens = tokens
        self._index = dict((w, i) for i, w in enumerate(tokens))

    @property
    def size(self):
        return len(self.tokens)

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, word):
        return word in self._index

    def id(self, word):
        try:
            return self._index[word]
        except KeyError:
            raise UnknownWord(word)

    def word(self, token_id):
        return self.tokens[int(token_id)]

    def tokenize(self, text):
        return tokenize_text(text, self)

    def detokenize(self, ids, stop_at_eos=True):
        """
        Inverse of `tokenize`; special tokens are dropped and
        decoding stops at the first EOS.
        """
        words = []
        for i in ids:
            i = int(i)
            if i == EOS and stop_at_eos:
                break
            if i < len(SPECIALS):
                continue
            words.append(self.tokens[i])
        return ' '.join(words)


def tokenize_text(text, vocab):
    """
    Map whitespace-separated words to token ids.

    No BOS/EOS are added; callers add specials.

    Raises
    ------

    UnknownWord
        If a word is out of vocabulary.
    """
    return [vocab.id(w) for w in text.split()]


_default = None

def default_vocab():
    global _default
    if _default is None:
        _default = Vocab()
    return _default
