""" This file contains defines parameters for jointar that we use to fill
settings in setup.py and the jointar top-level docstring.
In setup.py in particular, we exec this file, so it cannot import jointar
"""

# jointar version information.  An empty _version_extra corresponds to a
# full release.  '.dev' as a _version_extra string means this is a development
# version
_version_major = 0
_version_minor = 1
_version_micro = 0
_version_extra = '.dev'

# Format expected by setup.py: string of form "X.Y.Z"
__version__ = "%s.%s.%s%s" % (_version_major,
                              _version_minor,
                              _version_micro,
                              _version_extra)

CLASSIFIERS = ["Development Status :: 3 - Alpha",
               "Environment :: Console",
               "Intended Audience :: Science/Research",
               "License :: OSI Approved :: BSD License",
               "Operating System :: OS Independent",
               "Programming Language :: Python",
               "Topic :: Scientific/Engineering"]

description  = 'Joint autoregressive image generation and understanding over mixed discrete/continuous tokens'

# Note: this long_description is actually a copy/paste from the top-level
# README.rst, so that it shows up nicely on PyPI.  So please remember to edit
# it only in one place and sync it correctly.
long_description = \
"""
=======
jointar
=======

A desk-scale unified autoregressive model. A single decoder-only
transformer reads text token ids and continuous image tokens in one
sequence; a categorical head predicts text and a per-token diffusion
head predicts image tokens. Everything, including the synthetic
shapes corpus and the evaluation oracles, runs on numpy.
"""

# versions
NUMPY_MIN_VERSION = '1.21'
SCIPY_MIN_VERSION = '1.7'
PANDAS_MIN_VERSION = '1.3'
TRAITLETS_MIN_VERSION = '5.0'
TQDM_MIN_VERSION = '4.60'

NAME                = 'jointar'
MAINTAINER          = "jointar developers"
MAINTAINER_EMAIL    = ""
DESCRIPTION         = description
LONG_DESCRIPTION    = long_description
URL                 = ""
DOWNLOAD_URL        = ""
LICENSE             = "BSD license"
CLASSIFIERS         = CLASSIFIERS
AUTHOR              = "jointar developers"
AUTHOR_EMAIL        = ""
PLATFORMS           = "OS Independent"
MAJOR               = _version_major
MINOR               = _version_minor
MICRO               = _version_micro
ISRELEASE           = _version_extra == ''
VERSION             = __version__
STATUS              = 'alpha'
PROVIDES            = ["jointar"]
REQUIRES            = ["numpy (>=%s)" % NUMPY_MIN_VERSION,
                       "scipy (>=%s)" % SCIPY_MIN_VERSION,
                       "pandas (>=%s)" % PANDAS_MIN_VERSION,
                       "traitlets (>=%s)" % TRAITLETS_MIN_VERSION,
                       "tqdm (>=%s)" % TQDM_MIN_VERSION]
