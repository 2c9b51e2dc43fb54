# -*- coding: utf-8 -*-
"""
TLAPSGen
-----------------------
Proof generation for the TLA+ proof system: recursive decomposition of
obligations by a language model, retrieval of similar proof statements and
checking of every step with the TLAPS prover
"""
import sys
import os
from setuptools import setup

if sys.version_info < (3, 4):
    raise Exception("TLAPSGen requires Python 3.4 or higher.")

# Hard linking doesn't work inside VirtualBox shared folders. This means that
# you can't use tox in a directory that is being shared with Vagrant,
# since tox relies on `python setup.py sdist` which uses hard links. As a
# workaround, disable hard-linking if setup.py is a descendant of /vagrant.
if os.path.abspath(__file__).split(os.path.sep)[1] == 'vagrant':
    del os.link

setup(
    name="TLAPSGen",
    version="0.3",
    packages=["tlapsgen", "tlapsgen.backends", "tlapsgen.verifiers"],
    package_data={"tlapsgen": ["templates/*.txt"]},
    license="MIT",
    description='Generation of TLAPS proofs by decomposition and retrieval.',
    long_description=__doc__,
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Developers',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: Unix',
        'Operating System :: MacOS',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Software Development :: Libraries :: Python Modules'
    ],
    install_requires=["pexpect", "numpy", "requests", "PyYAML"],
    entry_points={'console_scripts': ['tlapsgen = tlapsgen.cli:main']},
    extras_require={'docs': ["Sphinx>=1.2.3", "alabaster>=0.6.3"]}
)
