# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause

import io
import json
import os
import shutil
import tempfile
import unittest
from unittest import mock

import numpy

from rabinowitzLab import cli
from rabinowitzLab.acceptance import synthetic_constrained_field
from rabinowitzLab.models import flows
from rabinowitzLab.models.errors import ConfigError
from rabinowitzLab.models.grid import CircleGrid, LineGrid
from rabinowitzLab.models.symplectization import LoopInSymplectization
from rabinowitzLab.utils import serialization


class ExperimentConfigTester(unittest.TestCase):
    """tests the ExperimentConfig class
    """

    def test_command_argument_is_skipped(self):
        """testing if a TypeError will be raised when the command argument is
        skipped
        """
        self.assertRaises(TypeError, cli.ExperimentConfig)

    def test_command_argument_is_not_a_string(self):
        """testing if a TypeError will be raised when the command argument is
        not a string
        """
        self.assertRaises(TypeError, cli.ExperimentConfig, 5)

    def test_command_argument_is_unknown(self):
        """testing if a ValueError will be raised for an unknown command
        """
        self.assertRaises(ValueError, cli.ExperimentConfig, "solve")

    def test_seed_argument(self):
        """testing if the seed defaults to the random_seed config value and
        should be an integer
        """
        from rabinowitzLab import conf
        config = cli.ExperimentConfig("verify-all")
        self.assertEqual(config.seed, conf.random_seed)
        self.assertRaises(TypeError, cli.ExperimentConfig, "verify-all", "1")
        self.assertRaises(TypeError, cli.ExperimentConfig, "verify-all",
                          True)

    def test_unknown_parameter(self):
        """testing if a ConfigError will be raised for a key which is not in
        the schema
        """
        self.assertRaises(ConfigError, cli.ExperimentConfig, "solve-kw",
                          size=3)

    def test_parameter_types(self):
        """testing if a TypeError will be raised for values of the wrong type
        """
        self.assertRaises(TypeError, cli.ExperimentConfig, "solve-kw",
                          half_width="5")
        self.assertRaises(TypeError, cli.ExperimentConfig, "solve-kw",
                          points="11")
        self.assertRaises(TypeError, cli.ExperimentConfig, "solve-kw",
                          points=True)
        self.assertRaises(TypeError, cli.ExperimentConfig, "loop-ops",
                          input="loop.json", op="reparam", args=["0.5"])

    def test_whole_floats_are_integers(self):
        """testing if a float with an integer value is accepted for an
        integer parameter and handed on as an int
        """
        config = cli.ExperimentConfig("solve-kw", points=11.0)
        self.assertEqual(config.get("points"), 11)
        self.assertTrue(isinstance(config.get("points"), int))

    def test_parameter_ranges(self):
        """testing if a ConfigError will be raised for values out of range or
        not in the allowed choices
        """
        self.assertRaises(ConfigError, cli.ExperimentConfig, "solve-kw",
                          half_width=0.0)
        self.assertRaises(ConfigError, cli.ExperimentConfig, "solve-kw",
                          points=2)
        self.assertRaises(ConfigError, cli.ExperimentConfig, "solve-kw",
                          report="xml")
        self.assertRaises(ConfigError, cli.ExperimentConfig, "gen-flow",
                          epsilon=1.5)
        self.assertRaises(ConfigError, cli.ExperimentConfig, "verify-all",
                          criteria=[1, 13])

    def test_schema_error_diagnostics(self):
        """testing if the ConfigError names the offending parameter and the
        schema rule it breaks
        """
        try:
            cli.ExperimentConfig("verify-all", criteria=(1, 13))
        except ConfigError as err:
            self.assertEqual(err.diagnostics["parameter"], "criteria.1")
            self.assertEqual(err.diagnostics["rule"], "maximum")
        else:
            self.fail("ConfigError was not raised")

    def test_command_needs(self):
        """testing if the commands which read files ask for them
        """
        self.assertRaises(ValueError, cli.ExperimentConfig, "roundtrip")
        self.assertRaises(ValueError, cli.ExperimentConfig, "loop-ops",
                          input="loop.json")
        self.assertRaises(ValueError, cli.ExperimentConfig, "loop-ops",
                          input="loop.json", op="concat")
        self.assertRaises(ValueError, cli.ExperimentConfig, "loop-ops",
                          input="loop.json", op="iterate")
        self.assertRaises(ValueError, cli.ExperimentConfig, "loop-ops",
                          input="loop.json", op="iterate", args=[1.5])

    def test_get_and_dict_form(self):
        """testing if get falls back to the default and the dict form gives
        the same config back
        """
        config = cli.ExperimentConfig("solve-kw", 3, points=11, out=None)
        self.assertEqual(config.get("points"), 11)
        self.assertEqual(config.get("out", "rho.csv"), "rho.csv")
        self.assertEqual(config.get("tol", 1e-8), 1e-8)
        data = config.to_dict()
        self.assertEqual(data["command"], "solve-kw")
        self.assertEqual(data["seed"], 3)
        self.assertEqual(cli.ExperimentConfig.from_dict(data).to_dict(),
                         data)


class ParserTester(unittest.TestCase):
    """tests the argument parser
    """

    def test_flags_not_given_are_missing(self):
        """testing if the flags which are not given do not show up in the
        namespace
        """
        namespace = cli.build_parser().parse_args(
            ["solve-kw", "--points", "11"]
        )
        self.assertEqual(namespace.command, "solve-kw")
        self.assertEqual(namespace.points, 11)
        self.assertFalse(hasattr(namespace, "half_width"))

    def test_loop_ops_flags(self):
        """testing if the loop-ops flags are parsed
        """
        namespace = cli.build_parser().parse_args(
            ["loop-ops", "--op", "reparam", "--args", "0.25", "--in",
             "loop.json", "--check-laws"]
        )
        self.assertEqual(namespace.op, "reparam")
        self.assertEqual(namespace.args, [0.25])
        self.assertEqual(namespace.input, "loop.json")
        self.assertTrue(namespace.check_laws)


class MainTester(unittest.TestCase):
    """tests the commands through the main function
    """

    def setUp(self):
        """setup the test
        """
        self.temp_root = tempfile.mkdtemp()

    def tearDown(self):
        """clean the test
        """
        shutil.rmtree(self.temp_root)

    def path(self, name):
        return os.path.join(self.temp_root, name)

    def test_no_command(self):
        """testing if main returns 2 without a subcommand
        """
        self.assertEqual(cli.main([]), 2)

    def test_invalid_config_file(self):
        """testing if main returns 2 for a missing or broken config file
        """
        self.assertEqual(
            cli.main(["--config", self.path("missing.json"), "verify-all"]), 2
        )
        with open(self.path("broken.json"), "w") as config_file:
            config_file.write("{not json")
        self.assertEqual(
            cli.main(["--config", self.path("broken.json"), "verify-all"]), 2
        )
        serialization.write_json({"points": 2}, self.path("range.json"))
        self.assertEqual(
            cli.main(["--config", self.path("range.json"), "solve-kw"]), 2
        )

    def test_solve_kw(self):
        """testing if solve-kw writes the profile CSV and the report
        """
        serialization.write_json(
            {"bumps": [{"center": 0.0, "width": 1.0, "mass": 0.5}]},
            self.path("bumps.json")
        )
        out = self.path("rho.csv")
        code = cli.main(["solve-kw", "--b-spec", self.path("bumps.json"),
                         "--half-width", "10", "--points", "401", "--out",
                         out, "--report", "json"])
        self.assertEqual(code, 0)
        columns = serialization.read_csv(out)
        self.assertEqual(sorted(columns.keys()),
                         ["b", "residual", "rho", "s"])
        self.assertEqual(len(columns["rho"]), 401)
        self.assertAlmostEqual(columns["rho"][0], 0.0, places=12)
        self.assertTrue(numpy.all(columns["rho"] >= -1e-8))
        report = serialization.read_json(self.path("rho.json"))
        self.assertEqual(report["command"], "solve-kw")
        self.assertTrue(report["bounds"]["passed"])
        self.assertEqual(report["grid"], {"S": 10.0, "n": 401})

    def test_solve_kw_zero_forcing(self):
        """testing if solve-kw without a b-spec gives rho = 0
        """
        out = self.path("zero.csv")
        code = cli.main(["solve-kw", "--half-width", "2", "--points", "21",
                         "--out", out])
        self.assertEqual(code, 0)
        numpy.testing.assert_array_equal(
            serialization.read_csv(out)["rho"], numpy.zeros(21)
        )

    def test_loop_ops_iterate(self):
        """testing if loop-ops iterates a loop and prints the law table
        """
        loop = LoopInSymplectization.critical(CircleGrid(16), 1)
        serialization.write_loop(loop, self.path("loop.json"))
        out = self.path("loop2.json")
        with mock.patch("sys.stdout", new_callable=io.StringIO) as stdout:
            code = cli.main(["loop-ops", "--op", "iterate", "--args", "2",
                             "--in", self.path("loop.json"), "--out", out,
                             "--check-laws"])
        self.assertEqual(code, 0)
        self.assertEqual(serialization.read_loop(out).winding, 2)
        report = json.loads(stdout.getvalue())
        self.assertTrue(report["passed"])
        self.assertEqual(report["op"], "iterate")

    def test_loop_ops_failure(self):
        """testing if a rotation off the grid exits with 1 and writes the
        error to stderr
        """
        loop = LoopInSymplectization.critical(CircleGrid(16), 1)
        serialization.write_loop(loop, self.path("loop.json"))
        with mock.patch("sys.stderr", new_callable=io.StringIO) as stderr:
            code = cli.main(["loop-ops", "--op", "reparam", "--args",
                             "0.01", "--in", self.path("loop.json"),
                             "--out", self.path("rotated.json")])
        self.assertEqual(code, 1)
        self.assertEqual(json.loads(stderr.getvalue())["error"],
                         "RotationError")

    def test_roundtrip(self):
        """testing if roundtrip reports a passing psi-phi round trip and
        asks for tau in the phi-psi direction
        """
        field = synthetic_constrained_field(
            LineGrid(5.0, 101), CircleGrid(16), 1, alpha=0.2, beta=0.4,
            gamma0=0.2, center=0.5, width=1.0
        )
        serialization.write_cylinder(field, self.path("field.json"))
        out = self.path("roundtrip.json")
        code = cli.main(["roundtrip", "--in", self.path("field.json"),
                         "--direction", "psi-phi", "--out", out])
        self.assertEqual(code, 0)
        report = serialization.read_json(out)
        self.assertTrue(report["passed"])
        self.assertLess(report["distance"], 1e-10)

        self.assertEqual(
            cli.main(["roundtrip", "--in", self.path("field.json"),
                      "--direction", "phi-psi", "--out", out]), 2
        )

    def test_roundtrip_of_a_flow_file(self):
        """testing if a gen-flow file goes through the phi-psi round trip
        """
        u = flows.CylinderMap.constant(
            LineGrid(1.0, 11), LoopInSymplectization.critical(CircleGrid(8),
                                                              1)
        )
        tau = flows.MultiplierPath.constant(u.line_grid, 1.0)
        serialization.write_cylinder(u, self.path("flow.json"), tau=tau)
        out = self.path("roundtrip.json")
        code = cli.main(["roundtrip", "--in", self.path("flow.json"),
                         "--direction", "phi-psi", "--out", out])
        self.assertEqual(code, 0)
        report = serialization.read_json(out)
        self.assertEqual(report["direction"], "phi-psi")
        self.assertLess(report["distance"], 1e-12)
