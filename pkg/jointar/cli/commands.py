"""
The commands behind ``jointar <command>``.

Each ``cmd_*`` function does the work of one command and returns its
result; `jointar.cli.main` parses arguments, calls it and turns the
result into an exit code.
"""
from collections import OrderedDict
import logging
import os

from ..data.corpus import build_corpus, read_corpus, write_corpus
from ..errors import ConfigError
from ..evaluation.experiments import (run_lambda_sweep,
                                      run_order_comparison,
                                      tradeoff_holds,
                                      unified_vs_generation_only)
from ..evaluation.report import evaluate
from ..formats.images import read_ppm, write_ppm
from ..model.config import tiny_config
from ..sequence.permutations import RASTER
from ..training.batches import TrainingSet
from ..training.gradcheck import grad_check
from ..training.trainer import train
from .config import read_config
from .runs import restore, write_run_checkpoint

logger = logging.getLogger(__name__)

METRICS_LOG = 'metrics.log'
DEFAULT_LAMBDAS = (0.005, 0.1, 1.)


def _overrides(seed=None, f64=False):
    overrides = OrderedDict()
    if seed is not None:
        overrides['seed'] = seed
    if f64:
        overrides['precision'] = 'f64'
    return overrides


def load_run_config(config_path, seed=None, f64=False):
    """
    Read a run config and apply the global command-line flags.
    """
    return read_config(config_path).with_overrides(**_overrides(seed, f64))


def cmd_gen_data(run_config):
    """
    Generate the corpus and write it to `corpus_path`.
    """
    corpus = build_corpus(run_config.corpus_seed,
                          holdout_frac=run_config.holdout_frac,
                          compositional_holdout=run_config.compositional_holdout,
                          n_augment=run_config.n_augment,
                          noise_sigma=run_config.noise_sigma,
                          image_size=run_config.codec.image_size)
    dirname = os.path.dirname(run_config.corpus_path)
    if dirname:
        os.makedirs(dirname, exist_ok=True)
    write_corpus(corpus, run_config.corpus_path)
    logger.info('wrote %d examples to %s', len(corpus), run_config.corpus_path)
    return corpus


def load_corpus(run_config):
    if not os.path.exists(run_config.corpus_path):
        raise ConfigError('corpus %s does not exist; run gen-data first'
                          % run_config.corpus_path)
    return read_corpus(run_config.corpus_path)


def cmd_train(run_config, resume=None, progress=False, corpus=None):
    """
    Train, checkpointing every `save_every` steps and at the end.

    Parameters
    ----------

    run_config : RunConfig

    resume : str (optional)
        Checkpoint to continue from. Its parameters, optimizer state,
        latent statistics and step count are restored; the metrics log
        is appended to.

    progress : bool

    corpus : Corpus (optional)
        Read from `corpus_path` when omitted.

    Returns
    -------

    result : TrainResult

    checkpoint : str
        Path of the final checkpoint.
    """
    if corpus is None:
        corpus = load_corpus(run_config)
    os.makedirs(run_config.run_dir, exist_ok=True)
    metrics_path = os.path.join(run_config.run_dir, METRICS_LOG)

    params = optimizer = stats = None
    start_step = 0
    if resume is not None:
        state = restore(resume, precision=run_config.model.precision)
        params, optimizer, stats, start_step = (state.params, state.optimizer,
                                                state.stats, state.step)
        logger.info('resuming from %s at step %d', resume, start_step)
    elif os.path.exists(metrics_path):
        os.remove(metrics_path)

    tset = TrainingSet.from_examples(corpus.train, run_config.model, run_config.codec,
                                     stats=stats)
    saved = []

    def on_save(step, params, optimizer):
        saved.append(write_run_checkpoint(run_config, step, params, optimizer, tset.stats))

    result = train(run_config.model, run_config.train, tset,
                   params=params,
                   optimizer=optimizer,
                   start_step=start_step,
                   run_dir=run_config.run_dir,
                   metrics_path=metrics_path,
                   on_save=on_save,
                   progress=progress)
    if not saved:
        on_save(start_step, result.params, result.optimizer)
    return result, saved[-1]


def load_model(checkpoint_path, seed=None, f64=False):
    state = restore(checkpoint_path, **_overrides(seed, f64))
    return state.model(), state


def cmd_sample(checkpoint_path, prompt, n=1, seed=0, order=RASTER, out_dir='.',
               f64=False, use_cache=True):
    """
    Generate `n` images for `prompt` and write them as PPM files.

    Sample `i` uses seed `seed + i`, so one call with `n` images
    writes the same files as `n` calls with one image each.

    Returns
    -------

    paths : list of str
    """
    if n < 1:
        raise ValueError('n must be positive, got %d' % n)
    model, state = load_model(checkpoint_path, f64=f64)
    images = model.generate(prompt, n=n, seed=seed, order=order, use_cache=use_cache)
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for i, image in enumerate(images):
        path = os.path.join(out_dir, 'sample_%s_%d.ppm' % (state.hash, seed + i))
        write_ppm(path, image)
        paths.append(path)
    logger.info('wrote %d samples for %r', n, prompt)
    return paths


def cmd_caption(checkpoint_path, image_path, f64=False):
    model, _ = load_model(checkpoint_path, f64=f64)
    return model.caption(read_ppm(image_path))


def cmd_vqa(checkpoint_path, image_path, question, f64=False):
    model, _ = load_model(checkpoint_path, f64=f64)
    return model.answer(read_ppm(image_path), question)


def cmd_eval(checkpoint_path, out_dir=None, seed=None, f64=False, corpus=None):
    """
    Evaluate a checkpoint; the report is written to `out_dir`
    (default: the run directory) as ``eval_<hash>.txt``.

    Returns
    -------

    report : EvalReport

    path : str
    """
    model, state = load_model(checkpoint_path, f64=f64)
    eval_config = state.config.eval
    if seed is not None:
        eval_config.eval_seed = seed
    if corpus is None:
        corpus = load_corpus(state.config)
    report = evaluate(model, corpus, eval_config, checkpoint_hash=state.hash)
    out_dir = out_dir or state.config.run_dir
    os.makedirs(out_dir, exist_ok=True)
    return report, report.write(out_dir)


def _slug(label):
    return label.replace('=', '_').replace(' ', '_')


def sweep_runner(run_config, corpus, progress=False):
    """
    `run(label, train_config)` for the experiment harnesses: train into
    ``<run_dir>/<label>`` and evaluate the final checkpoint there.
    """
    def run(label, train_config):
        values = OrderedDict((name, getattr(train_config, name))
                             for name in sorted(train_config.trait_names()))
        values['run_dir'] = os.path.join(run_config.run_dir, _slug(label))
        sub_config = run_config.with_overrides(**values)
        _, checkpoint = cmd_train(sub_config, progress=progress, corpus=corpus)
        report, path = cmd_eval(checkpoint, corpus=corpus)
        logger.info('%s: toy_fid=%.4f text_acc=%.4f (%s)', label, report.toy_fid,
                    report.text_acc, path)
        return report
    return run


def cmd_sweep(run_config, lambdas=DEFAULT_LAMBDAS, baselines=True, orders=True,
              allowed_violations=1, progress=False):
    """
    Lambda sweep with single-task baselines and, optionally, the
    raster versus random-order comparison. Tables are written to
    ``sweep.txt`` and ``orders.txt`` in the run directory.

    Returns
    -------

    passed : bool
        Whether the generation/understanding trade-off held.

    tables : OrderedDict
    """
    corpus = load_corpus(run_config)
    os.makedirs(run_config.run_dir, exist_ok=True)
    run = sweep_runner(run_config, corpus, progress=progress)
    tables = OrderedDict()
    tables['sweep'] = run_lambda_sweep(run_config.train, lambdas, run, baselines=baselines)
    passed = tradeoff_holds(tables['sweep'], allowed_violations)
    lines = [tables['sweep'].to_string(index=False),
             'tradeoff_holds=%s' % passed]
    if baselines:
        for key, value in unified_vs_generation_only(tables['sweep']).items():
            lines.append('%s=%s' % (key, value))
    lines.append('seed=%d' % run_config.train.seed)
    _write_lines(os.path.join(run_config.run_dir, 'sweep.txt'), lines)

    if orders:
        tables['orders'] = run_order_comparison(run_config.train, run)
        _write_lines(os.path.join(run_config.run_dir, 'orders.txt'),
                     [tables['orders'].to_string(index=False),
                      'seed=%d' % run_config.train.seed])
    return passed, tables


def _write_lines(path, lines):
    with open(path, 'w') as fobj:
        fobj.write('\n'.join(lines) + '\n')
    logger.info('wrote %s', path)


def cmd_gradcheck(seed=0, n_coords=10, lambda_text=1.):
    """
    Finite-difference check of the unified-loss gradient on the tiny
    float64 model.

    Returns
    -------

    report : GradCheckReport
    """
    return grad_check(tiny_config(), lambda_text=lambda_text, seed=seed, n_coords=n_coords)
