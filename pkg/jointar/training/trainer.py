"""
Joint training loop.

Step `s` draws everything random (task mix, examples, orders,
diffusion noise) from a generator seeded with `[seed, s]`, so a run
resumed from a checkpoint taken after step `k` repeats the remaining
steps of the uninterrupted run exactly.
"""
from collections import OrderedDict
import logging
import os

import numpy as np
import pandas as pd
from tqdm import tqdm

from ..errors import NonFiniteLoss, NonFiniteActivation
from ..model.diffusion import DiffusionSchedule
from ..model.params import init_params
from .batches import make_batch
from .objective import unified_loss
from .optimizer import AdamW
from .schedules import lr_at

logger = logging.getLogger(__name__)

METRIC_KEYS = ('step', 'L', 'Lv', 'Lt', 'lr', 'rnd_frac')


def format_record(record):
    """
    One metrics-log line; floats use `repr` so the log replays bitwise.
    """
    fields = ['step=%d' % record['step']]
    fields.extend('%s=%r' % (key, float(record[key])) for key in METRIC_KEYS[1:])
    return ' '.join(fields) + '\n'


def parse_record(line):
    record = dict(item.split('=', 1) for item in line.split())
    return OrderedDict((key, int(record[key]) if key == 'step' else float(record[key]))
                       for key in METRIC_KEYS)


def read_metrics_log(path):
    """
    Metrics log as a DataFrame with one row per record.
    """
    with open(path) as fobj:
        records = [parse_record(line) for line in fobj if line.strip()]
    return pd.DataFrame.from_records(records, columns=METRIC_KEYS)


def write_nonfinite_dump(directory, step, losses, params, grads=None):
    """
    Per-tensor finiteness and norms, written before aborting a run.
    """
    path = os.path.join(directory or '.', 'nonfinite_%d.txt' % step)
    with open(path, 'w') as fobj:
        fobj.write('step=%d\n' % step)
        if losses is not None:
            fobj.write('L=%r Lv=%r Lt=%r\n' % tuple(float(v) for v in losses))
        for name, value in params.items():
            fobj.write('param %s finite=%s norm=%r\n'
                       % (name, bool(np.all(np.isfinite(value))), float(np.linalg.norm(value))))
        for name, value in (grads or {}).items():
            fobj.write('grad %s finite=%s norm=%r\n'
                       % (name, bool(np.all(np.isfinite(value))), float(np.linalg.norm(value))))
    return path


class TrainResult(object):

    def __init__(self, params, optimizer, history, stats):
        self.params = params
        self.optimizer = optimizer
        self.history = history
        self.stats = stats

    @property
    def metrics(self):
        return pd.DataFrame.from_records(self.history, columns=METRIC_KEYS)


def train(model_config,
          train_config,
          tset,
          params=None,
          optimizer=None,
          start_step=0,
          run_dir=None,
          metrics_path=None,
          on_save=None,
          progress=False):
    """
    Run training steps `start_step, ..., total_steps - 1`.

    Parameters
    ----------

    model_config : ModelConfig

    train_config : TrainConfig

    tset : TrainingSet

    params : ModelParams (optional)
        Initialized from `train_config.seed` when omitted.

    optimizer : AdamW (optional)
        State to resume from.

    start_step : int

    run_dir : str (optional)
        Where a non-finite diagnostic dump is written.

    metrics_path : str (optional)
        Metrics log, appended to.

    on_save : callable (optional)
        Called as `on_save(steps_done, params, optimizer)` every
        `save_every` steps and at the end.

    progress : bool
        Show a progress bar.

    Returns
    -------

    result : TrainResult
    """
    model_config.check()
    train_config.check()
    if params is None:
        params = init_params(model_config, np.random.default_rng(train_config.seed))
    params.check_shapes(model_config)
    if optimizer is None:
        optimizer = AdamW.from_config(train_config)
    schedule = DiffusionSchedule.from_config(model_config)
    history = []

    steps = range(start_step, train_config.total_steps)
    if progress:
        steps = tqdm(steps, desc='train', unit='step')

    for step in steps:
        rng = np.random.default_rng([train_config.seed, step])
        batch, n_gen, n_random = make_batch(tset, step, train_config, model_config, rng)
        try:
            losses, grads = unified_loss(params, batch, model_config,
                                         train_config.lambda_text, schedule, rng,
                                         mode='both')
        except NonFiniteActivation as e:
            logger.error('step %d: %s', step, e)
            path = write_nonfinite_dump(run_dir, step, None, params)
            raise NonFiniteLoss(step, path)
        if not np.isfinite(losses[0]) or grads.check_finite():
            path = write_nonfinite_dump(run_dir, step, losses, params, grads)
            logger.error('non-finite loss or gradient at step %d', step)
            raise NonFiniteLoss(step, path)

        lr = lr_at(step, train_config)
        optimizer.step(params, grads, lr)

        if step % train_config.log_every == 0 or step == train_config.total_steps - 1:
            record = OrderedDict([('step', step),
                                  ('L', losses[0]),
                                  ('Lv', losses[1]),
                                  ('Lt', losses[2]),
                                  ('lr', lr),
                                  ('rnd_frac', n_random / n_gen if n_gen else 0.)])
            history.append(record)
            logger.info(format_record(record).strip())
            if metrics_path is not None:
                with open(metrics_path, 'a') as fobj:
                    fobj.write(format_record(record))
            if progress:
                steps.set_postfix(L='%.4f' % losses[0])

        done = step + 1
        if on_save is not None and (done % train_config.save_every == 0
                                    or done == train_config.total_steps):
            on_save(done, params, optimizer)

    return TrainResult(params, optimizer, history, tset.stats)
