# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause
"""
Serialization
=============

JSON and CSV codecs for grid functions, loops, cylinder maps and reports.

JSON floats are written by ``repr`` which round trips exactly, CSV floats
with the ``float_format`` from the config (17 significant digits). Keys are
sorted so identical data gives identical bytes.
"""

import csv
import io
import json
import logging
import os

import numpy

from rabinowitzLab.models.grid import GridFunction, LineGrid

logger = logging.getLogger(__name__)


def to_builtin(value):
    """converts numpy scalars and arrays, nested in dicts, lists and tuples,
    to plain python objects
    """
    if isinstance(value, dict):
        return dict((str(key), to_builtin(item))
                    for key, item in value.items())
    if isinstance(value, (list, tuple)):
        return [to_builtin(item) for item in value]
    if isinstance(value, numpy.ndarray):
        return [to_builtin(item) for item in value.tolist()]
    if isinstance(value, (numpy.bool_, bool)):
        return bool(value)
    if isinstance(value, (numpy.integer, int)):
        return int(value)
    if isinstance(value, (numpy.floating, float)):
        value = float(value)
        if not numpy.isfinite(value):
            # json has no inf or nan
            return None
        return value
    if hasattr(value, "to_dict"):
        return to_builtin(value.to_dict())
    return value


def dumps(data):
    """the canonical JSON text of data, sorted keys and a trailing newline
    """
    return json.dumps(to_builtin(data), sort_keys=True, indent=2) + "\n"


def write_json(data, path):
    from rabinowitzLab import utils
    utils.mkdir(os.path.dirname(os.path.abspath(path)))
    with open(path, "w") as json_file:
        json_file.write(dumps(data))
    logger.debug("wrote %s" % path)
    return path


def read_json(path):
    with open(path) as json_file:
        return json.load(json_file)


def format_float(value, float_format=None):
    from rabinowitzLab import conf
    float_format = conf.value_or_default(float_format, "float_format")
    return float_format % float(value)


def csv_text(columns, float_format=None):
    """renders columns as CSV

    :param columns: A list of ``(name, values)`` pairs, all values of the
      same length.
    """
    names = [name for name, _ in columns]
    lengths = set(len(values) for _, values in columns)
    if len(lengths) > 1:
        raise ValueError("all CSV columns should have the same length")
    buffer_ = io.StringIO()
    writer = csv.writer(buffer_, lineterminator="\n")
    writer.writerow(names)
    for row in zip(*[values for _, values in columns]):
        writer.writerow([format_float(value, float_format) for value in row])
    return buffer_.getvalue()


def write_csv(columns, path, float_format=None):
    from rabinowitzLab import utils
    utils.mkdir(os.path.dirname(os.path.abspath(path)))
    with open(path, "w") as csv_file:
        csv_file.write(csv_text(columns, float_format=float_format))
    logger.debug("wrote %s" % path)
    return path


def read_csv(path):
    """reads a CSV written by :func:`write_csv` into a dict of float arrays
    keyed by the column names
    """
    with open(path) as csv_file:
        reader = csv.DictReader(csv_file)
        rows = list(reader)
        names = reader.fieldnames or []
    return dict((name, numpy.array([float(row[name]) for row in rows]))
                for name in names)


def grid_function_to_dict(f):
    return {"grid": f.grid.to_dict(),
            "values": [float(value) for value in f.values]}


def grid_function_from_dict(data):
    for key in ("grid", "values"):
        if key not in data:
            raise ValueError("grid function records should have a %s key" %
                             key)
    grid = LineGrid(float(data["grid"]["S"]), int(data["grid"]["n"]))
    return GridFunction(grid, data["values"])


def grid_function_csv(f, name="value", float_format=None):
    """the ``s,value`` CSV of a grid function
    """
    return csv_text([("s", f.points), (name, f.values)],
                    float_format=float_format)


def write_loop(loop, path):
    return write_json(loop.to_dict(), path)


def read_loop(path):
    from rabinowitzLab.models.symplectization import LoopInSymplectization
    return LoopInSymplectization.from_dict(read_json(path))


def write_cylinder(cylinder, path, tau=None):
    return write_json(cylinder.to_dict(tau=tau), path)


def read_cylinder(path):
    """returns ``(CylinderMap, MultiplierPath or None)``
    """
    from rabinowitzLab.models.flows import CylinderMap
    return CylinderMap.from_dict(read_json(path))
