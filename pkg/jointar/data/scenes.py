r"""
Synthetic single-object scenes.

A `SceneSpec` fixes shape, colour, position and size; `render` draws it
on a white canvas without anti-aliasing. Captions and question/answer
pairs are filled in from fixed templates, so every text target is
determined by the spec.

Geometry uses pixel centres $(r + 1/2, c + 1/2)$. For a canvas of side
$S$ the anchors are the quadrant centres $(S/4, S/4)$, ... and the
canvas centre $(S/2, S/2)$; a large object has half-extent $7S/32$ and
a small one $S/8$ (3.5 and 2 pixels on the default 16 x 16 canvas).
"""
from itertools import product
from typing import NamedTuple

import numpy as np

from ..codec.vocab import COLORS, SHAPES, POSITIONS, SIZES
from ..errors import UnparseablePrompt

IMAGE_SIZE = 16

PALETTE = {'red': (1., 0., 0.),
           'green': (0., 1., 0.),
           'blue': (0., 0., 1.),
           'yellow': (1., 1., 0.)}

BACKGROUND = (1., 1., 1.)

CAPTION_QUESTION = 'describe the image'

QA_TEMPLATES = (('what color is the shape', 'color'),
                ('what shape is it', 'shape'),
                ('where is the shape', 'position'),
                ('how big is the shape', 'size'))


class SceneSpec(NamedTuple):

    shape : str
    color : str
    position : str
    size : str

    def validate(self):
        for field, allowed in zip(self._fields, (SHAPES, COLORS, POSITIONS, SIZES)):
            value = getattr(self, field)
            if value not in allowed:
                raise ValueError('%s must be one of %s, got %r' % (field, allowed, value))
        return self


ALL_SPECS = tuple(SceneSpec(shape, color, position, size)
                  for shape, color, position, size in product(SHAPES, COLORS, POSITIONS, SIZES))


def anchor(position, image_size=IMAGE_SIZE):
    """
    Centre (row, col) of a position, in pixel-centre coordinates.
    """
    q, h = image_size / 4., image_size / 2.
    return {'top-left': (q, q),
            'top-right': (q, 3 * q),
            'bottom-left': (3 * q, q),
            'bottom-right': (3 * q, 3 * q),
            'center': (h, h)}[position]


def half_extent(size, image_size=IMAGE_SIZE):
    return {'large': 7 * image_size / 32.,
            'small': image_size / 8.}[size]


def shape_mask(shape, position, size, image_size=IMAGE_SIZE):
    """
    Boolean (S, S) mask of the pixels covered by an object.
    """
    cy, cx = anchor(position, image_size)
    h = half_extent(size, image_size)
    centres = np.arange(image_size) + 0.5
    dy = centres[:, None] - cy
    dx = centres[None, :] - cx
    if shape == 'square':
        return (np.fabs(dy) <= h) & (np.fabs(dx) <= h)
    elif shape == 'circle':
        return dy**2 + dx**2 <= h**2
    elif shape == 'triangle':
        # apex at the top, base at the bottom
        return (np.fabs(dy) <= h) & (np.fabs(dx) <= (dy + h) / 2.)
    raise ValueError('unknown shape %r' % shape)


def render(spec, image_size=IMAGE_SIZE):
    """
    Rasterize a scene.

    Parameters
    ----------

    spec : SceneSpec

    image_size : int

    Returns
    -------

    img : np.float((image_size, image_size, 3))
        White background, object filled with its palette colour.
    """
    spec = SceneSpec(*spec).validate()
    img = np.empty((image_size, image_size, 3))
    img[:] = BACKGROUND
    img[shape_mask(spec.shape, spec.position, spec.size, image_size)] = PALETTE[spec.color]
    return img


def make_caption(spec):
    return 'a %s %s %s at %s' % (spec.size, spec.color, spec.shape, spec.position)


def make_qa(spec):
    """
    Question/answer pairs for a scene, one per template.
    """
    return [(question, getattr(spec, field)) for question, field in QA_TEMPLATES]


def parse_prompt(text):
    """
    Invert `make_caption`.

    Raises
    ------

    UnparseablePrompt
    """
    words = text.split()
    if len(words) != 6 or words[0] != 'a' or words[4] != 'at':
        raise UnparseablePrompt('prompt %r does not follow "a <size> <color> <shape> at <position>"'
                                % text)
    spec = SceneSpec(shape=words[3], color=words[2], position=words[5], size=words[1])
    try:
        return spec.validate()
    except ValueError as e:
        raise UnparseablePrompt('prompt %r: %s' % (text, e))
