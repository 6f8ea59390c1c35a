r"""
Packed multimodal token streams.

Generation (GEN) layout::

    [BOS, prompt..., BOI, image tokens in generation order]

with the BOS/prompt/BOI block bidirectional and the image tokens
causal. Image entry $k$ holds the token of grid cell $\pi(k)$, carries
that cell as its 2D position and the cell $\pi(k+1)$ of the *next*
token as its target position; BOI carries $\pi(0)$ and the last image
entry carries the sentinel. There is no end-of-image token.

Understanding (UND) layout::

    [encoder features..., BOS, question..., SEP, answer..., EOS]

with everything up to SEP bidirectional and the answer plus EOS
causal. An empty answer gives the inference prefix (no EOS).

The backbone output at position $p$ predicts the entry at $p+1$;
loss flags mark the entries being predicted.
"""
from typing import NamedTuple, Optional, Tuple, Any

import numpy as np

from ..codec.vocab import BOS, EOS, BOI, SEP
from ..errors import LengthMismatch, EmptyQuestion
from .masks import AttentionMask
from .permutations import Permutation

TEXT, IMAGE, BOI_ENTRY, ENCFEAT = 'text', 'image', 'boi', 'encfeat'
GEN, UND = 'gen', 'und'

SENTINEL = (-1, -1)


class Entry(NamedTuple):

    modality : str
    payload : Any
    pos1d : int
    pos2d : Optional[Tuple[int, int]] = None
    target_pos2d : Optional[Tuple[int, int]] = None
    loss_flag : bool = False
    task : str = GEN


class TokenStream(object):

    def __init__(self, entries, task, grid=None):
        """
        Parameters
        ----------

        entries : list of Entry

        task : str
            'gen' or 'und'.

        grid : (int, int) (optional)
            Rows and columns of the image-token grid, needed to
            turn 2D positions into cell indices.
        """
        self.entries = list(entries)
        self.task = task
        self.grid = grid

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, idx):
        return self.entries[idx]

    def extend(self, entries):
        return TokenStream(self.entries + list(entries), self.task, self.grid)

    @property
    def loss_positions(self):
        return [i for i, e in enumerate(self.entries) if e.loss_flag]

    @property
    def modalities(self):
        return [e.modality for e in self.entries]


def cell(index, grid):
    """
    (row, col) of a row-major cell index.
    """
    return divmod(int(index), grid[1])


def cell_index(pos2d, grid):
    row, col = pos2d
    return row * grid[1] + col


def text_entry(token_id, pos1d, task, loss_flag=False):
    return Entry(TEXT, int(token_id), pos1d, loss_flag=loss_flag, task=task)


def build_generation_sequence(prompt_ids, latent_tokens, perm, grid=None):
    """
    Build a GEN stream and its mask.

    Parameters
    ----------

    prompt_ids : list of int
        Prompt token ids without specials; may be empty.

    latent_tokens : np.float((n_img, token_dim))
        Continuous tokens in raster order.

    perm : Permutation
        Generation order.

    grid : (int, int) (optional)
        Token grid; a square grid is assumed when omitted.

    Returns
    -------

    stream : TokenStream

    mask : AttentionMask
    """
    latent_tokens = np.asarray(latent_tokens)
    n_img = latent_tokens.shape[0]
    if not isinstance(perm, Permutation):
        perm = Permutation(perm)
    if len(perm) != n_img:
        raise LengthMismatch('permutation of length %d for %d image tokens'
                             % (len(perm), n_img))
    if grid is None:
        side = int(round(np.sqrt(n_img)))
        grid = (side, side)
    if grid[0] * grid[1] != n_img:
        raise LengthMismatch('%d image tokens do not fill a %dx%d grid'
                             % (n_img, grid[0], grid[1]))

    entries = [text_entry(BOS, 0, GEN)]
    entries.extend(text_entry(t, 1 + i, GEN) for i, t in enumerate(prompt_ids))
    pos = len(entries)
    entries.append(Entry(BOI_ENTRY, BOI, pos,
                         target_pos2d=cell(perm[0], grid),
                         task=GEN))
    prefix_len = pos + 1
    for k in range(n_img):
        target = cell(perm[k + 1], grid) if k + 1 < n_img else SENTINEL
        entries.append(Entry(IMAGE,
                             latent_tokens[perm[k]],
                             prefix_len + k,
                             pos2d=cell(perm[k], grid),
                             target_pos2d=target,
                             loss_flag=True,
                             task=GEN))
    stream = TokenStream(entries, GEN, grid)
    return stream, AttentionMask.prefix_lm(len(entries), prefix_len)


def build_understanding_sequence(enc_feats, question_ids, answer_ids):
    """
    Build an UND stream and its mask.

    Parameters
    ----------

    enc_feats : np.float((n_enc, d_model))
        Frozen encoder features.

    question_ids : list of int
        Must be non-empty.

    answer_ids : list of int
        Empty for an inference prefix.

    Returns
    -------

    stream : TokenStream

    mask : AttentionMask
    """
    if len(question_ids) == 0:
        raise EmptyQuestion('an understanding sequence needs a question')
    enc_feats = np.asarray(enc_feats)
    entries = [Entry(ENCFEAT, enc_feats[i], i, task=UND) for i in range(enc_feats.shape[0])]
    entries.append(text_entry(BOS, len(entries), UND))
    for t in question_ids:
        entries.append(text_entry(t, len(entries), UND))
    entries.append(text_entry(SEP, len(entries), UND))
    prefix_len = len(entries)
    if len(answer_ids):
        for t in list(answer_ids) + [EOS]:
            entries.append(text_entry(t, len(entries), UND, loss_flag=True))
    stream = TokenStream(entries, UND)
    return stream, AttentionMask.prefix_lm(len(entries), prefix_len)
