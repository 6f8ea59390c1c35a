"""
Experiment tables: the lambda sweep with single-task baselines and
the raster versus random-order comparison.

Both harnesses take a `run` callable, `run(label, train_config)`,
that trains one model and returns its `EvalReport`; every run shares
the seed of the base config.
"""
from collections import OrderedDict
import logging

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ('run', 'lambda', 'steps', 'task_mix_gen', 'gen_examples',
                 'toy_fid', 'attr_match', 'text_acc')


def generation_budget(train_config):
    """
    Expected number of generation examples seen in training; each has
    the same number of image tokens, so this also fixes the visual-token
    budget.
    """
    return train_config.total_steps * train_config.batch_size * train_config.task_mix_gen


def single_task_configs(train_config):
    """
    Baselines of a unified run.

    The generation-only run sees the same number of generation
    examples as the unified one, in fewer steps; the understanding-only
    run keeps the step count and drops generation examples.

    Returns
    -------

    configs : OrderedDict
        'T2I-only' and 'I2T-only' configs.
    """
    steps = max(1, int(round(train_config.total_steps * train_config.task_mix_gen)))
    t2i = train_config.copy(task_mix_gen=1., total_steps=steps,
                            save_every=min(train_config.save_every, steps))
    i2t = train_config.copy(task_mix_gen=0., lambda_text=1.)
    return OrderedDict([('T2I-only', t2i), ('I2T-only', i2t)])


def _row(label, lam, train_config, report):
    return OrderedDict([('run', label),
                        ('lambda', lam),
                        ('steps', train_config.total_steps),
                        ('task_mix_gen', train_config.task_mix_gen),
                        ('gen_examples', generation_budget(train_config)),
                        ('toy_fid', report.toy_fid),
                        ('attr_match', report.attr_match['all']),
                        ('text_acc', report.text_acc)])


def run_lambda_sweep(train_config, lambdas, run, baselines=True):
    """
    Train one model per text-loss weight, plus single-task baselines.

    Parameters
    ----------

    train_config : TrainConfig
        Base recipe; only `lambda_text` varies across unified runs.

    lambdas : sequence of float

    run : callable
        `run(label, train_config) -> EvalReport`.

    baselines : bool
        Also train the generation-only and understanding-only runs.

    Returns
    -------

    table : pd.DataFrame
        One row per run with columns `SWEEP_COLUMNS`; baselines have
        NaN lambda.
    """
    lambdas = list(lambdas)
    if not lambdas:
        raise ValueError('lambda sweep needs at least one value')
    rows = []
    for lam in lambdas:
        config = train_config.copy(lambda_text=lam)
        label = 'lambda=%g' % lam
        logger.info('sweep: training %s', label)
        rows.append(_row(label, lam, config, run(label, config)))
    if baselines:
        for label, config in single_task_configs(train_config).items():
            logger.info('sweep: training %s', label)
            rows.append(_row(label, np.nan, config, run(label, config)))
    return pd.DataFrame.from_records(rows, columns=SWEEP_COLUMNS)


def tradeoff_violations(table):
    """
    Adjacent pairs of unified runs, ordered by lambda, that break the
    expected trade-off: text accuracy should not fall and toy-FID
    should not improve as lambda grows.
    """
    unified = table[table['lambda'].notnull()].sort_values('lambda')
    text = unified['text_acc'].values
    fid = unified['toy_fid'].values
    return int(np.sum(np.diff(text) < 0) + np.sum(np.diff(fid) < 0))


def tradeoff_holds(table, allowed=1):
    return tradeoff_violations(table) <= allowed


def unified_vs_generation_only(table):
    """
    Toy-FID of the smallest-lambda unified run against the
    generation-only baseline at the same generation budget.
    """
    unified = table[table['lambda'].notnull()].sort_values('lambda').iloc[0]
    t2i = table[table['run'] == 'T2I-only'].iloc[0]
    return OrderedDict([('unified_lambda', unified['lambda']),
                        ('unified_toy_fid', unified['toy_fid']),
                        ('t2i_toy_fid', t2i['toy_fid']),
                        ('unified_better', bool(unified['toy_fid'] <= t2i['toy_fid']))])


def raster_only(train_config):
    """
    The same recipe with raster order throughout.
    """
    return train_config.copy(order_random_frac=0., order_anneal_end_frac=0.)


def run_order_comparison(train_config, run):
    """
    Always-raster training against the random-then-raster schedule.

    Returns
    -------

    table : pd.DataFrame
        Columns order, toy_fid, attr_match, text_acc, and
        random_fid_not_worse, whether the random-order schedule reached
        a toy-FID at most that of raster order.
    """
    reports = OrderedDict()
    reports['raster'] = run('order=raster', raster_only(train_config))
    reports['random'] = run('order=random', train_config)
    rows = [OrderedDict([('order', order),
                         ('toy_fid', report.toy_fid),
                         ('attr_match', report.attr_match['all']),
                         ('text_acc', report.text_acc)])
            for order, report in reports.items()]
    table = pd.DataFrame.from_records(rows)
    table['random_fid_not_worse'] = bool(reports['random'].toy_fid <= reports['raster'].toy_fid)
    return table
