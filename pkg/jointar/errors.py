"""
Exceptions raised across jointar.

Every error derives from `JointARError` and from the builtin
that a caller not aware of jointar would expect to catch.
"""


class JointARError(Exception):
    """
    Base class of all jointar errors.
    """


# codec

class UnknownWord(JointARError, KeyError):

    def __init__(self, word):
        self.word = word
        JointARError.__init__(self, 'word %r is not in the vocabulary' % word)

    def __str__(self):
        return self.args[0]


class DimensionMismatch(JointARError, ValueError):
    pass


# sequence

class LengthMismatch(JointARError, ValueError):
    pass


class InvalidPermutation(JointARError, ValueError):
    pass


class EmptyQuestion(JointARError, ValueError):
    pass


# backbone

class ShapeMismatch(JointARError, ValueError):
    pass


class NonFiniteActivation(JointARError, ArithmeticError):

    def __init__(self, layer, where='block'):
        self.layer = layer
        JointARError.__init__(self,
                              'non-finite activation in %s at layer %d' % (where, layer))


class CacheOverflow(JointARError, RuntimeError):
    pass


class PolicyViolation(JointARError, RuntimeError):
    pass


# heads / training

class NoLossPositions(JointARError, ValueError):
    pass


class EmptyBatch(JointARError, ValueError):
    pass


class NonFiniteLoss(JointARError, ArithmeticError):

    def __init__(self, step, dump_path=None):
        self.step = step
        self.dump_path = dump_path
        msg = 'non-finite loss at step %d' % step
        if dump_path is not None:
            msg += ' (diagnostics written to %s)' % dump_path
        JointARError.__init__(self, msg)


class GradientCheckFailure(JointARError, AssertionError):

    def __init__(self, name, coordinate, rel_error):
        self.name = name
        self.coordinate = coordinate
        self.rel_error = rel_error
        JointARError.__init__(self,
                              'gradient check failed for %s at %s: relative error %.3e'
                              % (name, coordinate, rel_error))


# evaluation

class NumericalFailure(JointARError, ArithmeticError):
    pass


class UnparseablePrompt(JointARError, ValueError):
    pass


# cli / formats

class ConfigError(JointARError, ValueError):
    pass


class FormatError(JointARError, IOError):
    pass


class ChecksumError(FormatError):
    pass
