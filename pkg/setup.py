#!/usr/bin/env python
''' Installation script for jointar package '''

import os
from os.path import join as pjoin, exists

# BEFORE importing setuptools, remove MANIFEST. It isn't properly
# updated when the contents of directories change.
if exists('MANIFEST'): os.remove('MANIFEST')

from setuptools import setup


def read_vars_from(ver_file):
    """ Read variables from Python text file

    Parameters
    ----------
    ver_file : str
        Filename of file to read

    Returns
    -------
    info_vars : dict
        Variables defined in `ver_file`
    """
    ns = {}
    with open(ver_file, 'rt') as fobj:
        exec(fobj.read(), ns)
    return ns


# Get various parameters for this version, stored in jointar/info.py
info = read_vars_from(pjoin('jointar', 'info.py'))

install_requires = ['numpy>=%s' % info['NUMPY_MIN_VERSION'],
                    'scipy>=%s' % info['SCIPY_MIN_VERSION'],
                    'pandas>=%s' % info['PANDAS_MIN_VERSION'],
                    'traitlets>=%s' % info['TRAITLETS_MIN_VERSION'],
                    'tqdm>=%s' % info['TQDM_MIN_VERSION']]

extra_setuptools_args = dict(
    zip_safe=False,
    install_requires=install_requires,
    extras_require=dict(test=['pytest']),
    entry_points={'console_scripts': ['jointar = jointar.cli.main:main']})

with open('README.rst', 'rt', encoding='utf-8') as fobj:
    long_description = fobj.read()


def main(**extra_args):
    setup(name=info['NAME'],
          maintainer=info['MAINTAINER'],
          maintainer_email=info['MAINTAINER_EMAIL'],
          description=info['DESCRIPTION'],
          url=info['URL'],
          download_url=info['DOWNLOAD_URL'],
          license=info['LICENSE'],
          classifiers=info['CLASSIFIERS'],
          author=info['AUTHOR'],
          author_email=info['AUTHOR_EMAIL'],
          platforms=info['PLATFORMS'],
          version=info['VERSION'],
          provides=info['PROVIDES'],
          packages     = ['jointar',
                          'jointar.utils',
                          'jointar.tests',
                          'jointar.codec',
                          'jointar.codec.tests',
                          'jointar.sequence',
                          'jointar.sequence.tests',
                          'jointar.data',
                          'jointar.data.tests',
                          'jointar.formats',
                          'jointar.formats.tests',
                          'jointar.model',
                          'jointar.model.tests',
                          'jointar.training',
                          'jointar.training.tests',
                          'jointar.evaluation',
                          'jointar.evaluation.tests',
                          'jointar.cli',
                          'jointar.cli.tests',
                          ],
          package_data = {},
          data_files=[],
          long_description=long_description,
          **extra_args
         )

#simple way to test what setup will do
#python setup.py install --prefix=/tmp
if __name__ == "__main__":
    main(**extra_setuptools_args)
