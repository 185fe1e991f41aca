# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause

import os
import logging

import jinja2
import numpy

logger = logging.getLogger(__name__)


def mkdir(path):
    """Creates a directory in the given path, an existing directory is not an
    error
    """
    try:
        os.makedirs(path)
    except OSError:
        if not os.path.isdir(path):
            raise


def render_template(template_code, **kwargs):
    """renders the given jinja2 template code with the given keyword
    arguments

    Output file names and the acceptance summary are produced this way, so
    users can change them from their ``config.py``.
    """
    return jinja2.Template(template_code).render(**kwargs)


def format_number(value):
    """returns a short file name friendly representation of a number, ``0.5``
    becomes ``0p5`` and ``-1`` becomes ``m1``
    """
    if float(value) == int(value):
        text = "%d" % int(value)
    else:
        text = repr(float(value))
    return text.replace("-", "m").replace(".", "p")


def make_rng(seed=None):
    """returns a seeded numpy Generator, falling back to the ``random_seed``
    config value
    """
    from rabinowitzLab import conf
    if seed is None:
        seed = conf.random_seed
    return numpy.random.default_rng(seed)


def sup_distance(first, second):
    """the L-infinity distance of two arrays of the same shape
    """
    first = numpy.asarray(first, dtype=float)
    second = numpy.asarray(second, dtype=float)
    if first.shape != second.shape:
        raise ValueError("arrays should have the same shape, got %s and %s"
                         % (first.shape, second.shape))
    if first.size == 0:
        return 0.0
    return float(numpy.max(numpy.abs(first - second)))
