# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause

import os.path
from setuptools import setup, find_packages
import rabinowitzLab


# Utility function to read the README file.
# Used for the long_description.
def read(fname):
    with open(os.path.join(os.path.dirname(__file__), fname)) as f:
        return f.read()

required_packages = ["numpy>=1.20", "scipy>=1.6", "jinja2",
                     "jsonschema>=3.2"]

setup(name="rabinowitzLab",
      version=rabinowitzLab.__version__,
      author="rabinowitzLab developers",
      description=("Numerical experiments on the gradient flows of the "
                   "Rabinowitz action functional"),
      long_description=read("README"),
      keywords=["kazdan-warner", "rabinowitz action", "symplectization",
                "gradient flow", "floer", "boundary value problem",
                "continuation"],
      packages=find_packages(exclude=["tests*"]),
      package_data={"rabinowitzLab": ["schema/*.json"]},
      platforms=["any"],
      license="http://www.opensource.org/licenses/bsd-license.php",
      classifiers=[
          "Programming Language :: Python :: 3",
          "License :: OSI Approved :: BSD License",
          "Operating System :: OS Independent",
          "Development Status :: 3 - Alpha",
          "Intended Audience :: Science/Research",
          "Topic :: Scientific/Engineering :: Mathematics",
      ],
      python_requires=">=3.7",
      install_requires=required_packages,
      tests_require=["hypothesis"],
      extras_require={"test": ["hypothesis"], "docs": ["sphinx"]},
      test_suite="tests",
      entry_points={
          "console_scripts": ["rabinowitz-lab=rabinowitzLab.cli:main"],
      },
)
