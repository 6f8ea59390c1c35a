"""
Named parameter tensors of the backbone and both heads.
"""
from collections import OrderedDict
import zlib

import numpy as np

from ..errors import ShapeMismatch

TEXT_HEAD_PREFIX = 'text_head.'
DIFFUSION_PREFIX = 'diffusion.'


def param_shapes(config):
    """
    Expected name -> shape of every learnable tensor.

    Parameters
    ----------

    config : ModelConfig

    Returns
    -------

    shapes : OrderedDict
    """
    d, V, td = config.d_model, config.vocab_size, config.token_dim
    shapes = OrderedDict()
    shapes['embed.token'] = (V, d)
    shapes['embed.image_in'] = (td, d)
    shapes['embed.pos1d'] = (config.max_seq, d)
    shapes['embed.pos2d'] = (config.n_img, d)
    # one extra row: the sentinel target of the last image token
    shapes['embed.target2d'] = (config.n_img + 1, d)
    for l in range(config.n_layers):
        pre = 'blocks.%d.' % l
        shapes[pre + 'ln1.gain'] = (d,)
        shapes[pre + 'ln1.bias'] = (d,)
        for w in ('wq', 'wk', 'wv', 'wo'):
            shapes[pre + 'attn.' + w] = (d, d)
        shapes[pre + 'ln2.gain'] = (d,)
        shapes[pre + 'ln2.bias'] = (d,)
        shapes[pre + 'ffn.w1'] = (d, config.d_ff)
        shapes[pre + 'ffn.b1'] = (config.d_ff,)
        shapes[pre + 'ffn.w2'] = (config.d_ff, d)
        shapes[pre + 'ffn.b2'] = (d,)
    shapes['final_norm.gain'] = (d,)
    shapes['final_norm.bias'] = (d,)

    shapes[TEXT_HEAD_PREFIX + 'weight'] = (d, V)
    shapes[TEXT_HEAD_PREFIX + 'bias'] = (V,)

    width = config.head_width
    shapes[DIFFUSION_PREFIX + 'w1'] = (td + d + config.d_time, width)
    shapes[DIFFUSION_PREFIX + 'b1'] = (width,)
    shapes[DIFFUSION_PREFIX + 'w2'] = (width, width)
    shapes[DIFFUSION_PREFIX + 'b2'] = (width,)
    shapes[DIFFUSION_PREFIX + 'w3'] = (width, td)
    shapes[DIFFUSION_PREFIX + 'b3'] = (td,)
    return shapes


class ModelParams(OrderedDict):

    """
    Ordered name -> array mapping holding every learnable tensor.
    Gradients use the same container.
    """

    def check_finite(self):
        """
        Names of tensors containing a non-finite value.
        """
        return [name for name, value in self.items() if not np.all(np.isfinite(value))]

    def check_shapes(self, config):
        expected = param_shapes(config)
        if list(expected) != list(self):
            missing = set(expected) - set(self)
            extra = set(self) - set(expected)
            raise ShapeMismatch('parameter names differ from config: missing %s, unexpected %s'
                                % (sorted(missing), sorted(extra)))
        for name, shape in expected.items():
            if self[name].shape != shape:
                raise ShapeMismatch('%s has shape %s, config expects %s'
                                    % (name, self[name].shape, shape))
        return self

    def copy(self):
        return ModelParams((k, v.copy()) for k, v in self.items())

    def astype(self, dtype):
        return ModelParams((k, v.astype(dtype)) for k, v in self.items())

    def zeros_like(self):
        return ModelParams((k, np.zeros_like(v)) for k, v in self.items())

    def subset(self, prefix):
        return ModelParams((k, v) for k, v in self.items() if k.startswith(prefix))

    def checksum(self):
        """
        Order-sensitive checksum of all values, for determinism checks.
        """
        crc = 0
        for name, value in self.items():
            crc = zlib.crc32(name.encode('ascii'), crc)
            crc = zlib.crc32(np.ascontiguousarray(value).tobytes(), crc)
        return crc


def init_params(config, rng, zero=False):
    """
    Initialize parameters.

    Matrices and embeddings are N(0, init_std^2); residual output
    projections are further scaled by 1/sqrt(2 n_layers); the hidden
    layers of the diffusion head use 1/sqrt(fan_in); norm gains are
    one and biases zero. With `zero`, every tensor except the norm
    gains is zero.

    Parameters
    ----------

    config : ModelConfig

    rng : np.random.Generator

    zero : bool

    Returns
    -------

    params : ModelParams
    """
    dtype = config.dtype
    std = config.init_std
    params = ModelParams()
    for name, shape in param_shapes(config).items():
        if name.endswith('.gain'):
            value = np.ones(shape)
        elif zero or len(shape) == 1:
            value = np.zeros(shape)
        elif name.endswith(('attn.wo', 'ffn.w2')):
            value = rng.standard_normal(shape) * std / np.sqrt(2 * config.n_layers)
        elif name in (DIFFUSION_PREFIX + 'w1', DIFFUSION_PREFIX + 'w2'):
            value = rng.standard_normal(shape) / np.sqrt(shape[0])
        else:
            value = rng.standard_normal(shape) * std
        params[name] = value.astype(dtype)
    return params
