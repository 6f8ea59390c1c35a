"""
Evaluation reports.

A report file holds an ASCII table followed by one ``key=value``
record per line; only the records are read back.
"""
from collections import OrderedDict
import logging
import os

import numpy as np
import pandas as pd

from ..data.corpus import TRAIN, HELDOUT, reference_images, make_example
from ..data.scenes import render
from .metrics import (toy_fid,
                      fid_noise_floor,
                      attr_match,
                      eval_understanding,
                      teacher_forced_qa_accuracy,
                      generate_for_specs)

logger = logging.getLogger(__name__)

RECORDS_MARKER = '# records'
PROVENANCE_KEYS = ('checkpoint', 'eval_seed', 'n_gen_samples', 'sample_order')


def _format_value(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


class EvalReport(object):

    """
    Metrics of one checkpoint.

    Attributes
    ----------

    metrics : OrderedDict
        Name to float; accuracies lie in [0, 1].

    provenance : OrderedDict
        Checkpoint hash, seeds and sample sizes.
    """

    def __init__(self, metrics, provenance=None):
        for key, value in metrics.items():
            if (key.endswith('acc') or key.startswith('attr_')) and not np.isnan(value):
                if not 0 <= value <= 1:
                    raise ValueError('%s=%s outside [0, 1]' % (key, value))
        self.metrics = OrderedDict((k, float(v)) for k, v in metrics.items())
        self.provenance = OrderedDict(provenance or {})

    def __getitem__(self, key):
        return self.metrics[key]

    @property
    def toy_fid(self):
        return self.metrics['toy_fid']

    @property
    def text_acc(self):
        return self.metrics['text_acc']

    @property
    def caption_token_acc(self):
        return self.metrics['caption_token_acc']

    @property
    def attr_match(self):
        return OrderedDict((k[len('attr_'):], v) for k, v in self.metrics.items()
                           if k.startswith('attr_'))

    def table(self):
        return pd.DataFrame({'metric': list(self.metrics),
                             'value': list(self.metrics.values())})

    def records(self):
        lines = ['%s=%s' % (k, _format_value(v)) for k, v in self.provenance.items()]
        lines.extend('%s=%s' % (k, _format_value(v)) for k, v in self.metrics.items())
        return lines

    def text(self):
        return '\n'.join([self.table().to_string(index=False), RECORDS_MARKER]
                         + self.records()) + '\n'

    def filename(self):
        return 'eval_%s.txt' % self.provenance.get('checkpoint', 'unknown')

    def write(self, directory):
        path = os.path.join(directory, self.filename())
        with open(path, 'w') as fobj:
            fobj.write(self.text())
        return path

    @staticmethod
    def read(path):
        with open(path) as fobj:
            lines = fobj.read().splitlines()
        records = lines[lines.index(RECORDS_MARKER) + 1:]
        provenance, metrics = OrderedDict(), OrderedDict()
        for line in records:
            key, value = line.split('=', 1)
            if key in PROVENANCE_KEYS:
                provenance[key] = value
            else:
                metrics[key] = float(value)
        return EvalReport(metrics, provenance)


def evaluate(model, corpus, eval_config, checkpoint_hash='unknown'):
    """
    Full evaluation of a model on a corpus.

    Generation is scored on prompts drawn uniformly from the TRAIN
    specs, toy-FID against clean renders of all specs; the HELDOUT
    specs are reported separately. Understanding is scored on clean
    renders of the held-out specs and of the training specs.

    Parameters
    ----------

    model : JointModel

    corpus : Corpus

    eval_config : EvalConfig

    checkpoint_hash : str

    Returns
    -------

    report : EvalReport
    """
    image_size = model.codec_config.image_size
    refs = reference_images(image_size)
    seed = eval_config.eval_seed
    order = eval_config.sample_order
    metrics = OrderedDict()

    prompts, images = generate_for_specs(model, corpus.specs(TRAIN),
                                         eval_config.n_gen_samples, seed, order)
    metrics['toy_fid'] = toy_fid(images, refs)
    metrics['fid_noise_floor'] = fid_noise_floor(refs, seed)
    for key, value in attr_match(prompts, images).items():
        metrics['attr_' + key] = value

    heldout_specs = corpus.specs(HELDOUT)
    if heldout_specs and eval_config.n_heldout_samples:
        h_prompts, h_images = generate_for_specs(model, heldout_specs,
                                                 eval_config.n_heldout_samples,
                                                 seed + eval_config.n_gen_samples, order)
        metrics['heldout_attr_all'] = attr_match(h_prompts, h_images)['all']
    else:
        metrics['heldout_attr_all'] = np.nan

    und_heldout = [make_example(spec, render(spec, image_size), HELDOUT)
                   for spec in heldout_specs]
    und_train = [make_example(spec, render(spec, image_size), TRAIN)
                 for spec in corpus.specs(TRAIN)]
    max_tokens = eval_config.max_answer_tokens
    if und_heldout:
        metrics['text_acc'], metrics['caption_token_acc'] = eval_understanding(
            model, und_heldout, max_tokens=max_tokens)
        metrics['qa_token_acc'] = teacher_forced_qa_accuracy(model, und_heldout)
    else:
        metrics['text_acc'] = metrics['caption_token_acc'] = metrics['qa_token_acc'] = np.nan
    metrics['train_text_acc'], metrics['train_caption_token_acc'] = eval_understanding(
        model, und_train, max_tokens=max_tokens)

    provenance = OrderedDict([('checkpoint', checkpoint_hash),
                              ('eval_seed', seed),
                              ('n_gen_samples', eval_config.n_gen_samples),
                              ('sample_order', order)])
    report = EvalReport(metrics, provenance)
    logger.info('evaluation of %s: %s', checkpoint_hash,
                ' '.join('%s=%.4f' % kv for kv in report.metrics.items()))
    return report
