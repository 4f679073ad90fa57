# ------------------------------------------------------------------------------
# Purpose:       remirl is a package for fitting relational event models and
#                recovering behavioral rewards from dyadic event sequences.
#
# Authors:       remirl contributors
#
# Copyright:     (c) 2026 remirl contributors
# License:       MIT, see LICENSE
# ------------------------------------------------------------------------------

from setuptools import setup, find_packages
import pathlib

remirlversion = '1.0.0'

here = pathlib.Path(__file__).parent.resolve()

long_description = (here / 'pypi_README.md').read_text(encoding='utf-8')

if __name__ == '__main__':
    setup(
        name='remirl',
        version=remirlversion,

        description='Relational event models and inverse reinforcement learning for dyadic event sequences',
        long_description=long_description,
        long_description_content_type='text/markdown',

        author='remirl contributors',

        classifiers=[
            'Development Status :: 4 - Beta',
            'License :: OSI Approved :: MIT License',
            'Programming Language :: Python :: 3 :: Only',
            'Operating System :: OS Independent',
            'Natural Language :: English',
            'Intended Audience :: Science/Research',
            'Topic :: Scientific/Engineering :: Information Analysis',
        ],

        keywords=[
            'relational event model',
            'REM',
            'inverse reinforcement learning',
            'IRL',
            'maximum entropy',
            'Markov decision process',
            'social network',
            'event history',
            'team communication',
        ],

        packages=find_packages(exclude=['tests', 'tests.*']),
        package_data={'remirl': ['py.typed']},

        python_requires='>=3.10',

        install_requires=[
            'numpy',
            'scipy',
            'pandas>=1.5',
        ],

        extras_require={
            'test': [
                'pytest',
                'hypothesis',
            ],
        },

        entry_points={
            'console_scripts': [
                'remirl=remirl.__main__:main',
            ],
        },
    )
