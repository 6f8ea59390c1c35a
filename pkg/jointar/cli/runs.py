"""
Checkpoints of a run: parameters, optimizer state, latent statistics
and the step count, stored next to the run config.
"""
from collections import OrderedDict
import glob
import logging
import os

import numpy as np

from ..errors import FormatError
from ..formats.checkpoint import save_checkpoint, load_checkpoint
from ..model.params import ModelParams, param_shapes
from ..model.pipeline import JointModel
from ..training.latent_stats import LatentStats
from ..training.optimizer import AdamW, STATE_PREFIX
from .config import parse_config

logger = logging.getLogger(__name__)

STEP_TENSOR = 'train.step'
CHECKPOINT_PATTERN = 'ckpt_%07d.ufld'


def checkpoint_tensors(params, optimizer, stats, step):
    tensors = OrderedDict(params)
    if optimizer is not None:
        tensors.update(optimizer.state_tensors())
    tensors.update(stats.to_tensors())
    tensors[STEP_TENSOR] = np.array([step], np.float64)
    return tensors


def write_run_checkpoint(run_config, step, params, optimizer, stats):
    """
    Save `ckpt_<step>.ufld` in the run directory; returns its path.
    """
    path = os.path.join(run_config.run_dir, CHECKPOINT_PATTERN % step)
    crc = save_checkpoint(path, run_config.text,
                          checkpoint_tensors(params, optimizer, stats, step))
    logger.info('step %d: wrote %s (crc %08x)', step, path, crc)
    return path


def latest_checkpoint(run_dir):
    paths = sorted(glob.glob(os.path.join(run_dir, 'ckpt_*.ufld')))
    return paths[-1] if paths else None


class RunState(object):

    """
    Everything restored from a checkpoint.
    """

    def __init__(self, config, params, optimizer, stats, step, checkpoint):
        self.config = config
        self.params = params
        self.optimizer = optimizer
        self.stats = stats
        self.step = step
        self.checkpoint = checkpoint

    @property
    def hash(self):
        return self.checkpoint.hash

    def model(self):
        return JointModel(self.params, self.config.model, self.config.codec, self.stats)


def restore(path, **overrides):
    """
    Load a checkpoint and check its tensors against its own config.

    Parameters
    ----------

    path : str

    overrides : dict
        Config keys replaced after reading the stored config, e.g.
        ``precision='f64'``.

    Returns
    -------

    state : RunState

    Raises
    ------

    FormatError, ChecksumError, ShapeMismatch, ConfigError
    """
    checkpoint = load_checkpoint(path)
    config = parse_config(checkpoint.config_text).with_overrides(**overrides)
    model_config = config.model
    params = ModelParams()
    for name in param_shapes(model_config):
        if name not in checkpoint.tensors:
            raise FormatError('%s: missing parameter tensor %s' % (path, name))
        params[name] = checkpoint.tensors[name].astype(model_config.dtype)
    params.check_shapes(model_config)

    optimizer = AdamW.from_config(config.train)
    optimizer.load_state(OrderedDict((k, v) for k, v in checkpoint.tensors.items()
                                     if k.startswith(STATE_PREFIX)))
    try:
        stats = LatentStats.from_tensors(checkpoint.tensors)
        step = int(checkpoint.tensors[STEP_TENSOR][0])
    except KeyError as e:
        raise FormatError('%s: missing tensor %s' % (path, e))
    logger.debug('restored %s at step %d', path, step)
    return RunState(config, params, optimizer, stats, step, checkpoint)
