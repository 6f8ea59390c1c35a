"""
jointar: joint autoregressive generation and understanding over
mixed discrete/continuous token sequences.
"""
from .info import __version__
