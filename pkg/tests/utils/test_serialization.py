# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause

import json
import os
import shutil
import tempfile
import unittest

import numpy

from rabinowitzLab.models import flows
from rabinowitzLab.models.grid import CircleGrid, GridFunction, LineGrid
from rabinowitzLab.models.symplectization import LoopInSymplectization
from rabinowitzLab.utils import serialization


class BuiltinTester(unittest.TestCase):
    """tests the conversion to plain python objects and the JSON text
    """

    def test_to_builtin(self):
        """testing if numpy values become python values and non finite
        floats become None
        """
        data = {
            1: numpy.float64(0.5),
            "count": numpy.int64(3),
            "flag": numpy.bool_(True),
            "array": numpy.array([1.0, numpy.inf]),
            "pair": (numpy.nan, 2),
        }
        converted = serialization.to_builtin(data)
        self.assertEqual(converted, {"1": 0.5, "count": 3, "flag": True,
                                     "array": [1.0, None],
                                     "pair": [None, 2]})
        self.assertTrue(isinstance(converted["count"], int))
        self.assertTrue(isinstance(converted["flag"], bool))

    def test_to_builtin_uses_to_dict(self):
        """testing if objects with a to_dict method are converted through it
        """
        grid = LineGrid(1.0, 5)
        self.assertEqual(serialization.to_builtin(grid), grid.to_dict())

    def test_dumps(self):
        """testing if dumps sorts the keys and ends with a newline
        """
        text = serialization.dumps({"b": 1, "a": 0.1})
        self.assertTrue(text.endswith("\n"))
        self.assertTrue(text.index('"a"') < text.index('"b"'))
        self.assertEqual(serialization.dumps({"a": 0.1, "b": 1}), text)
        self.assertEqual(json.loads(text)["a"], 0.1)


class FilesTester(unittest.TestCase):
    """tests writing and reading JSON and CSV files
    """

    def setUp(self):
        """setup the test
        """
        self.temp_root = tempfile.mkdtemp()

    def tearDown(self):
        """clean the test
        """
        shutil.rmtree(self.temp_root)

    def test_json_files(self):
        """testing if write_json creates missing folders and read_json reads
        the same data back
        """
        path = os.path.join(self.temp_root, "deep", "report.json")
        data = {"value": 1.0 / 3.0, "items": [1, 2]}
        self.assertEqual(serialization.write_json(data, path), path)
        self.assertEqual(serialization.read_json(path), data)

    def test_csv_text(self):
        """testing if csv_text writes a header and 17 significant digits
        """
        text = serialization.csv_text([("s", [0.0, 1.0]),
                                       ("value", [1.0 / 3.0, -2.0])])
        lines = text.splitlines()
        self.assertEqual(lines[0], "s,value")
        self.assertEqual(lines[1], "0,0.33333333333333331")
        self.assertEqual(lines[2], "1,-2")
        self.assertRaises(ValueError, serialization.csv_text,
                          [("s", [0.0]), ("value", [1.0, 2.0])])

    def test_csv_files(self):
        """testing if read_csv gives back the written columns exactly
        """
        path = os.path.join(self.temp_root, "profile.csv")
        values = numpy.exp(numpy.linspace(-1.0, 1.0, 7))
        serialization.write_csv([("s", numpy.arange(7.0)),
                                 ("value", values)], path)
        columns = serialization.read_csv(path)
        self.assertEqual(sorted(columns.keys()), ["s", "value"])
        numpy.testing.assert_array_equal(columns["value"], values)

    def test_grid_function_records(self):
        """testing if grid functions go through their dict and CSV forms
        """
        grid = LineGrid(2.0, 5)
        f = GridFunction(grid, grid.points ** 2)
        data = serialization.grid_function_to_dict(f)
        g = serialization.grid_function_from_dict(data)
        self.assertEqual(g.grid, grid)
        numpy.testing.assert_array_equal(g.values, f.values)
        self.assertRaises(ValueError, serialization.grid_function_from_dict,
                          {"values": [1.0]})
        text = serialization.grid_function_csv(f, name="b")
        self.assertEqual(text.splitlines()[0], "s,b")
        self.assertEqual(len(text.splitlines()), 6)

    def test_loop_files(self):
        """testing if a loop is read back with the same samples
        """
        circle = CircleGrid(8)
        t = circle.points
        r = 0.1 * numpy.cos(2 * numpy.pi * t)
        loop = LoopInSymplectization(circle, r, 2 * t + 0.3, 2)
        path = os.path.join(self.temp_root, "loop.json")
        serialization.write_loop(loop, path)
        read_back = serialization.read_loop(path)
        self.assertTrue(read_back.same_loop(loop))
        self.assertEqual(read_back.winding, 2)

    def test_cylinder_files(self):
        """testing if a cylinder map and its multiplier are read back
        """
        line = LineGrid(1.0, 5)
        loop = LoopInSymplectization.critical(CircleGrid(8), 1)
        cylinder = flows.CylinderMap.constant(line, loop).translated(0.25)
        tau = flows.MultiplierPath.constant(line, 1.0)
        path = os.path.join(self.temp_root, "cylinder.json")
        serialization.write_cylinder(cylinder, path, tau=tau)
        read_back, read_tau = serialization.read_cylinder(path)
        numpy.testing.assert_array_equal(read_back.a, cylinder.a)
        numpy.testing.assert_array_equal(read_back.theta_lift,
                                         cylinder.theta_lift)
        numpy.testing.assert_array_equal(read_tau.values, tau.values)

        serialization.write_cylinder(cylinder, path)
        self.assertEqual(serialization.read_cylinder(path)[1], None)
