"""
Run configuration files.

A run config is plain ASCII, one ``key = value`` per line; ``#``
starts a comment and blank lines are ignored. Every key names a trait
of the run itself or of one of its sections (codec, model, train,
eval); a later line overrides an earlier one. The text is kept as read
and written verbatim into every checkpoint of the run.
"""
from collections import OrderedDict

from traitlets import (HasTraits,
                       Unicode,
                       Integer,
                       Float,
                       Bool,
                       TraitError,
                       validate)

from ..codec.config import CodecConfig
from ..errors import ConfigError
from ..evaluation.config import EvalConfig
from ..model.config import ModelConfig
from ..training.config import TrainConfig

REQUIRED_KEYS = ('corpus_path', 'run_dir')
OVERRIDES_HEADER = '# command-line overrides'


class RunConfig(HasTraits):

    """
    Paths and corpus flags of a run, together with its codec, model,
    training and evaluation sections.
    """

    corpus_path = Unicode()
    run_dir = Unicode()

    # gen-data
    corpus_seed = Integer(0)
    holdout_frac = Float(0.1)
    compositional_holdout = Bool(False)
    n_augment = Integer(4)
    noise_sigma = Float(0.02)

    @validate('holdout_frac')
    def _check_holdout(self, proposal):
        if not 0 <= proposal['value'] < 1:
            raise TraitError('holdout_frac must be in [0, 1)')
        return proposal['value']

    @validate('n_augment')
    def _check_augment(self, proposal):
        if proposal['value'] < 1:
            raise TraitError('n_augment must be positive')
        return proposal['value']

    def __init__(self, text='', **kwargs):
        self.codec = CodecConfig()
        self.model = ModelConfig()
        self.train = TrainConfig()
        self.eval = EvalConfig()
        self.text = text
        HasTraits.__init__(self, **kwargs)

    def sections(self):
        return OrderedDict([('run', self),
                            ('codec', self.codec),
                            ('model', self.model),
                            ('train', self.train),
                            ('eval', self.eval)])

    def owner(self, key):
        """
        The config object holding trait `key`, or None.
        """
        for section in self.sections().values():
            if section.has_trait(key):
                return section
        return None

    def set(self, key, value, lineno=None):
        """
        Cast `value` (a string) by the type of trait `key` and assign it.
        """
        where = 'line %d: ' % lineno if lineno is not None else ''
        section = self.owner(key)
        if section is None:
            raise ConfigError("%sunknown key '%s'" % (where, key))
        trait = section.traits()[key]
        try:
            setattr(section, key, trait.from_string(value))
        except (TraitError, ValueError) as e:
            raise ConfigError('%sbad value %r for %s: %s' % (where, value, key, e))

    def check(self):
        for key in REQUIRED_KEYS:
            if not getattr(self, key):
                raise ConfigError("missing required key '%s'" % key)
        try:
            self.model.check()
            self.train.check()
        except TraitError as e:
            raise ConfigError(str(e))
        return self

    def with_overrides(self, **overrides):
        """
        A new config whose text is this one's plus the override lines.
        """
        overrides = OrderedDict((k, v) for k, v in overrides.items() if v is not None)
        if not overrides:
            return parse_config(self.text)
        lines = [self.text.rstrip('\n'), OVERRIDES_HEADER]
        lines.extend('%s = %s' % (k, v) for k, v in overrides.items())
        return parse_config('\n'.join(lines) + '\n')

    def values(self):
        """
        Every key and its current value, sections in order.
        """
        out = OrderedDict()
        for section in self.sections().values():
            for name in sorted(section.trait_names()):
                out[name] = getattr(section, name)
        return out


def _check_unique_keys():
    seen = {}
    for cls in (RunConfig, CodecConfig, ModelConfig, TrainConfig, EvalConfig):
        for name in cls.class_trait_names():
            if name in seen:
                raise ConfigError('key %s defined by both %s and %s'
                                  % (name, seen[name], cls.__name__))
            seen[name] = cls.__name__

_check_unique_keys()


def parse_config(text):
    """
    Parse run-config text.

    Raises
    ------

    ConfigError
        On a malformed line, unknown key or bad value (with its line
        number) and on a missing required key.
    """
    config = RunConfig(text=text)
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError("line %d: expected 'key = value', got %r" % (lineno, line))
        key, value = [s.strip() for s in line.split('=', 1)]
        if not key:
            raise ConfigError('line %d: empty key' % lineno)
        config.set(key, value, lineno)
    return config.check()


def read_config(path):
    try:
        with open(path) as fobj:
            text = fobj.read()
    except UnicodeDecodeError:
        raise ConfigError('%s is not an ASCII config file' % path)
    except OSError as e:
        raise ConfigError('cannot read config %s: %s' % (path, e))
    try:
        text.encode('ascii')
    except UnicodeEncodeError:
        raise ConfigError('%s is not an ASCII config file' % path)
    return parse_config(text)


def config_text(**values):
    """
    Config text assigning `values`, one line each.
    """
    return ''.join('%s = %s\n' % (k, v) for k, v in values.items())
