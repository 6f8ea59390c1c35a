"""
Collation of token streams into padded array batches.

Streams of both tasks and different lengths share a batch. Padding
rows attend only to themselves and are never loss-flagged, so they
do not influence any real position.
"""
import numpy as np

from .streams import TEXT, IMAGE, BOI_ENTRY, ENCFEAT, SENTINEL, cell_index

PAD_CODE, TEXT_CODE, BOI_CODE, IMAGE_CODE, ENCFEAT_CODE = range(5)

_codes = {TEXT: TEXT_CODE,
          BOI_ENTRY: BOI_CODE,
          IMAGE: IMAGE_CODE,
          ENCFEAT: ENCFEAT_CODE}

FIELD_NAMES = ('modality', 'token_ids', 'image_in', 'features',
               'pos1d', 'pos2d', 'target2d')


def _empty_fields(shape, token_dim, d_model, dtype):
    return {'modality': np.zeros(shape, np.int8),
            'token_ids': np.zeros(shape, np.int64),
            'image_in': np.zeros(shape + (token_dim,), dtype),
            'features': np.zeros(shape + (d_model,), dtype),
            'pos1d': np.zeros(shape, np.int64),
            'pos2d': -np.ones(shape, np.int64),
            'target2d': -np.ones(shape, np.int64)}


def _fill_row(fields, b, entries, grid):
    n_img = grid[0] * grid[1] if grid is not None else 0
    for p, e in enumerate(entries):
        fields['modality'][b, p] = _codes[e.modality]
        fields['pos1d'][b, p] = e.pos1d
        if e.modality in (TEXT, BOI_ENTRY):
            fields['token_ids'][b, p] = e.payload
        elif e.modality == IMAGE:
            fields['image_in'][b, p] = e.payload
        elif e.modality == ENCFEAT:
            fields['features'][b, p] = e.payload
        if e.pos2d is not None:
            fields['pos2d'][b, p] = cell_index(e.pos2d, grid)
        if e.target_pos2d is not None:
            if tuple(e.target_pos2d) == SENTINEL:
                fields['target2d'][b, p] = n_img
            else:
                fields['target2d'][b, p] = cell_index(e.target_pos2d, grid)


class Batch(object):

    """
    Array view of a list of (TokenStream, AttentionMask) pairs.

    Attributes
    ----------

    modality, token_ids, image_in, features, pos1d, pos2d, target2d :
        Per-position inputs, shape (B, n[, dim]).

    allow : np.bool((B, n, n))
        Attention masks, padded.

    text_pred, image_pred : np.bool((B, n))
        Position p predicts a loss-flagged text / image entry at p+1.

    text_target : np.int((B, n))

    image_target : np.float((B, n, token_dim))

    lengths : np.int(B)

    tasks : list of str
    """

    def __init__(self, fields, allow, text_pred, text_target, image_pred,
                 image_target, lengths, tasks):
        for name in FIELD_NAMES:
            setattr(self, name, fields[name])
        self.allow = allow
        self.text_pred = text_pred
        self.text_target = text_target
        self.image_pred = image_pred
        self.image_target = image_target
        self.lengths = lengths
        self.tasks = tasks

    @property
    def shape(self):
        return self.modality.shape

    @property
    def fields(self):
        return dict((name, getattr(self, name)) for name in FIELD_NAMES)

    def count(self, task):
        return sum(1 for t in self.tasks if t == task)


def collate(items, token_dim, d_model, dtype=np.float64):
    """
    Pad and stack streams.

    Parameters
    ----------

    items : list of (TokenStream, AttentionMask)

    token_dim : int
        Dimension of continuous image tokens.

    d_model : int
        Width of encoder features.

    dtype : numpy float type

    Returns
    -------

    batch : Batch
    """
    B = len(items)
    n = max(len(stream) for stream, _ in items) if B else 0
    fields = _empty_fields((B, n), token_dim, d_model, dtype)
    allow = np.zeros((B, n, n), bool)
    allow[:, np.arange(n), np.arange(n)] = True
    text_pred = np.zeros((B, n), bool)
    text_target = np.zeros((B, n), np.int64)
    image_pred = np.zeros((B, n), bool)
    image_target = np.zeros((B, n, token_dim), dtype)
    lengths = np.zeros(B, np.int64)
    tasks = []

    for b, (stream, mask) in enumerate(items):
        L = len(stream)
        lengths[b] = L
        tasks.append(stream.task)
        _fill_row(fields, b, stream.entries, stream.grid)
        allow[b, :L, :L] = mask.allow
        for p in range(L - 1):
            nxt = stream.entries[p + 1]
            if not nxt.loss_flag:
                continue
            if nxt.modality == TEXT:
                text_pred[b, p] = True
                text_target[b, p] = nxt.payload
            elif nxt.modality == IMAGE:
                image_pred[b, p] = True
                image_target[b, p] = nxt.payload

    return Batch(fields, allow, text_pred, text_target, image_pred,
                 image_target, lengths, tasks)


def entry_fields(entries, grid, token_dim, d_model, dtype=np.float64):
    """
    Input fields of a run of entries, shape (1, len(entries)), for
    incremental decoding.
    """
    fields = _empty_fields((1, len(entries)), token_dim, d_model, dtype)
    _fill_row(fields, 0, entries, grid)
    return fields
