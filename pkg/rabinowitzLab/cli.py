# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause
"""
The ``rabinowitz-lab`` command.

Subcommands::

  rabinowitz-lab solve-kw --b-spec bumps.json --half-width 20 --points 2001
      --tol 1e-10 --out rho.csv --report json
  rabinowitz-lab gen-flow --winding 1 --perturb 0.05 --half-width 5
      --points 401 --circle 64 --epsilon 1 --out flows/
  rabinowitz-lab roundtrip --in flows/flow.json --direction phi-psi
      --report json --out roundtrip.json
  rabinowitz-lab loop-ops --op iterate --args 2 --in loop.json
      --out loop2.json --check-laws
  rabinowitz-lab verify-all --quick

Global flags go in front of the subcommand: ``--verbose`` switches the
package logger to DEBUG and ``--config file.json`` reads default values for
the flags from a JSON file, see ``rabinowitzLab/schema/experiment_config.json``
for the keys it may hold.

The exit code is 0 when every executed check passes, 1 when a check fails
or a solver fails numerically (the diagnostics are written to stderr as
JSON) and 2 for an invalid configuration.
"""

import argparse
import json
import logging
import os
import sys

import jsonschema

from rabinowitzLab import acceptance
from rabinowitzLab import utils
from rabinowitzLab.models import correspondence
from rabinowitzLab.models import flows
from rabinowitzLab.models import kazdan_warner
from rabinowitzLab.models import loopspace
from rabinowitzLab.models.errors import ConfigError, RabinowitzLabError
from rabinowitzLab.models.grid import CircleGrid, GridFunction, LineGrid
from rabinowitzLab.models.kazdan_warner import BumpProfile, KWProblem
from rabinowitzLab.utils import serialization

logger = logging.getLogger(__name__)

COMMANDS = ("solve-kw", "gen-flow", "roundtrip", "loop-ops", "verify-all")

SCHEMA_PATH = os.path.join(os.path.dirname(__file__), "schema",
                           "experiment_config.json")


def load_schema():
    with open(SCHEMA_PATH) as schema_file:
        return json.load(schema_file)


class ExperimentConfig(object):
    """The validated parameters of one command.

    :param command: One of :data:`COMMANDS`.
    :param seed: The random seed, ``random_seed`` from the config when
      skipped.
    :param parameters: The remaining keys of the schema, flags not given are
      simply missing and the solvers fall back to their defaults.

    Parameters are validated with jsonschema against the shipped draft 7
    schema. A wrong type raises a TypeError, any other violation (a value out
    of range, not in the allowed choices or an unknown key) a
    :class:`~rabinowitzLab.models.errors.ConfigError`.
    """

    def __init__(self, command=None, seed=None, **parameters):
        self._validator = jsonschema.Draft7Validator(load_schema())
        self.command = command
        self.seed = seed
        self.parameters = parameters

    def _validate_command(self, command):
        """validates the given command value
        """
        if command is None:
            raise TypeError("ExperimentConfig.command can not be None, "
                            "give one of %s" % ", ".join(COMMANDS))
        if not isinstance(command, str):
            raise TypeError("ExperimentConfig.command should be a string not "
                            "%s" % command.__class__.__name__)
        if command not in COMMANDS:
            raise ValueError("ExperimentConfig.command should be one of %s "
                             "not %s" % (", ".join(COMMANDS), command))
        return command

    def _validate_seed(self, seed):
        """validates the given seed value
        """
        from rabinowitzLab import conf
        seed = conf.value_or_default(seed, "random_seed")
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise TypeError("ExperimentConfig.seed should be an integer not "
                            "%s" % seed.__class__.__name__)
        return seed

    def _check_schema(self, instance):
        """runs the schema validator on the parameters
        """
        try:
            self._validator.validate(instance)
        except jsonschema.ValidationError as err:
            name = ".".join(str(part) for part in err.absolute_path) or \
                "parameters"
            if err.validator == "type":
                expected = err.validator_value
                if not isinstance(expected, str):
                    expected = " or ".join(expected)
                raise TypeError("ExperimentConfig.%s should be of type %s "
                                "not %s" % (name, expected,
                                            err.instance.__class__.__name__))
            raise ConfigError(
                "ExperimentConfig.%s is invalid: %s" % (name, err.message),
                diagnostics={"parameter": name, "rule": err.validator,
                             "schema_path": list(err.absolute_schema_path)}
            )

    def _validate_parameters(self, parameters):
        """validates the given parameters against the schema and the needs of
        the command
        """
        validated = {}
        for name, value in parameters.items():
            if isinstance(value, tuple):
                value = list(value)
            validated[name] = value
        self._check_schema(validated)
        # draft 7 counts 3.0 as an integer
        properties = self._validator.schema["properties"]
        for name, value in validated.items():
            if properties[name].get("type") == "integer":
                validated[name] = int(value)

        if self._command in ("roundtrip", "loop-ops") and \
           not validated.get("input"):
            raise ValueError("%s needs an input file (--in)" % self._command)
        if self._command == "loop-ops":
            op = validated.get("op")
            if op is None:
                raise ValueError("loop-ops needs an operation (--op)")
            if op == "concat" and not validated.get("input2"):
                raise ValueError("concat needs a second loop (--in2)")
            if op in ("reparam", "iterate") and not validated.get("args"):
                raise ValueError("%s needs an argument (--args)" % op)
            if op == "iterate" and \
               not float(validated["args"][0]).is_integer():
                raise ValueError("iterate needs an integer argument")
        return validated

    @property
    def command(self):
        """The name of the subcommand to run.
        """
        return self._command

    @command.setter
    def command(self, command):
        self._command = self._validate_command(command)

    @property
    def seed(self):
        return self._seed

    @seed.setter
    def seed(self, seed):
        self._seed = self._validate_seed(seed)

    @property
    def parameters(self):
        return self._parameters

    @parameters.setter
    def parameters(self, parameters):
        self._parameters = self._validate_parameters(parameters)

    def get(self, name, default=None):
        value = self._parameters.get(name)
        if value is None:
            return default
        return value

    def to_dict(self):
        data = dict(self._parameters)
        data["command"] = self._command
        data["seed"] = self._seed
        return data

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        return cls(data.pop("command", None), data.pop("seed", None), **data)


def read_config_file(path):
    """reads a ``--config`` file, a JSON object whose keys are in the schema
    """
    try:
        data = serialization.read_json(path)
    except (IOError, OSError) as err:
        raise ConfigError("can not read the config file %s: %s" % (path, err))
    except ValueError as err:
        raise ConfigError("the config file %s is not valid JSON: %s" %
                          (path, err))
    if not isinstance(data, dict):
        raise ConfigError("the config file should hold a JSON object")
    return data


def _add(parser, *flags, **kwargs):
    kwargs.setdefault("default", argparse.SUPPRESS)
    parser.add_argument(*flags, **kwargs)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rabinowitz-lab",
        description="Numerical experiments on the two gradient flows of the "
                    "Rabinowitz action functional."
    )
    parser.add_argument("--verbose", "-v", action="store_true",
                        help="log solver progress at DEBUG level")
    parser.add_argument("--config", help="JSON file with default values for "
                                         "the flags")
    subparsers = parser.add_subparsers(dest="command")

    solve_kw = subparsers.add_parser(
        "solve-kw", help="solve the Kazdan-Warner boundary value problem"
    )
    _add(solve_kw, "--b-spec", dest="b_spec",
         help="JSON file with the Gaussian bumps of b, b = 0 when skipped")
    _add(solve_kw, "--half-width", dest="half_width", type=float)
    _add(solve_kw, "--points", type=int)
    _add(solve_kw, "--tol", type=float)
    _add(solve_kw, "--out", help="the CSV file of s, b, rho, residual")
    _add(solve_kw, "--report", choices=["json"],
         help="also write the bounds, energy and W22 reports")

    gen_flow = subparsers.add_parser(
        "gen-flow", help="solve a flow segment between perturbed Reeb orbits"
    )
    _add(gen_flow, "--winding", type=int)
    _add(gen_flow, "--perturb", type=float)
    _add(gen_flow, "--half-width", dest="half_width", type=float)
    _add(gen_flow, "--points", type=int)
    _add(gen_flow, "--circle", type=int)
    _add(gen_flow, "--epsilon", type=float)
    _add(gen_flow, "--tol", type=float)
    _add(gen_flow, "--no-normalize", dest="normalize", action="store_false",
         help="keep the boundary loops off the constraint hypersurface")
    _add(gen_flow, "--out", help="the output directory")
    _add(gen_flow, "--report", choices=["json"])

    roundtrip = subparsers.add_parser(
        "roundtrip", help="compose the maps between the two moduli spaces"
    )
    _add(roundtrip, "--in", dest="input", help="a cylinder map JSON file")
    _add(roundtrip, "--direction", choices=["psi-phi", "phi-psi"])
    _add(roundtrip, "--tol", type=float,
         help="the largest accepted round trip distance")
    _add(roundtrip, "--report", choices=["json"])
    _add(roundtrip, "--out", help="the report file, stdout when skipped")

    loop_ops = subparsers.add_parser(
        "loop-ops", help="apply a loop space operation"
    )
    _add(loop_ops, "--op", choices=["reparam", "reverse", "iterate",
                                    "concat"])
    _add(loop_ops, "--args", nargs="*", type=float,
         help="r for reparam, n for iterate")
    _add(loop_ops, "--in", dest="input")
    _add(loop_ops, "--in2", dest="input2")
    _add(loop_ops, "--out")
    _add(loop_ops, "--tau", type=float)
    _add(loop_ops, "--sigma", type=float)
    _add(loop_ops, "--interpolate", action="store_true",
         help="allow rotations off the grid")
    _add(loop_ops, "--check-laws", dest="check_laws", action="store_true",
         help="print the table of transformation laws on the inputs")

    verify_all = subparsers.add_parser(
        "verify-all", help="run the acceptance suite"
    )
    _add(verify_all, "--quick", action="store_true")
    _add(verify_all, "--seed", type=int)
    _add(verify_all, "--criteria", nargs="*", type=int)
    _add(verify_all, "--out", help="the report file, stdout when skipped")

    return parser


def _write_report(report, path):
    if path:
        serialization.write_json(report, path)
    else:
        sys.stdout.write(serialization.dumps(report))


def _report_path(path):
    return os.path.splitext(path)[0] + ".json"


def solve_kw(config):
    from rabinowitzLab import conf

    half_width = config.get("half_width", conf.default_half_width)
    points = config.get("points", conf.default_line_points)
    grid = LineGrid(half_width, points)

    spec = config.get("b_spec")
    if spec is None:
        b = GridFunction.zeros(grid)
        profile = BumpProfile([])
    else:
        if isinstance(spec, str):
            spec = serialization.read_json(spec)
        profile = BumpProfile(spec)
        b = profile.to_grid_function(grid)

    problem = KWProblem(b)
    tol = config.get("tol", conf.kw_newton_tol)
    solution = kazdan_warner.continuation_solve(problem, tol=tol)
    residual = kazdan_warner.kw_residual(solution.rho, problem)

    out = config.get("out") or utils.render_template(
        conf.kw_output_filename, half_width=utils.format_number(half_width),
        points=points
    )
    serialization.write_csv([("s", grid.points), ("b", b.values),
                             ("rho", solution.rho.values),
                             ("residual", residual.values)], out)

    bounds = kazdan_warner.check_pointwise_bounds(solution, problem)
    if config.get("report") == "json":
        serialization.write_json({
            "command": "solve-kw",
            "grid": grid.to_dict(),
            "b_spec": profile.to_dict(),
            "kw": solution.to_dict(),
            "bounds": bounds,
            "energy_residual": kazdan_warner.energy_identity_residual(
                solution, problem),
            "w22": kazdan_warner.w22_estimates(solution, problem),
        }, _report_path(out))
    return bounds["passed"] and solution.final_residual_Linf <= tol


def gen_flow(config):
    from rabinowitzLab import conf

    winding = config.get("winding", 1)
    perturb = config.get("perturb", 0.05)
    half_width = config.get("half_width", conf.flow_half_width)
    points = config.get("points", conf.flow_line_points)
    circle_points = config.get("circle", conf.flow_circle_points)
    epsilon = config.get("epsilon", 1.0)
    tol = config.get("tol", conf.flow_tol)
    normalize = config.get("normalize", True)

    circle = CircleGrid(circle_points)
    left, right = flows.perturbed_boundary_loops(circle, winding, perturb,
                                                 normalize=normalize)
    u, tau, diagnostics = flows.solve_flow_segment(
        left, right, epsilon=epsilon, half_width=half_width,
        line_points=points, tol=tol, return_diagnostics=True
    )

    name = utils.render_template(
        conf.flow_output_filename, winding=winding, points=points,
        circle=circle_points, epsilon=utils.format_number(epsilon)
    )
    out = config.get("out", ".")
    serialization.write_cylinder(u, os.path.join(out, name + ".json"),
                                 tau=tau)
    serialization.write_csv([
        ("s", u.line_grid.points),
        ("tau", tau.values),
        ("mean_h", flows.mean_hamiltonians(u).values),
        ("energy_density", flows.energy_density(u).values),
    ], os.path.join(out, name + ".csv"))

    if config.get("report") == "json":
        serialization.write_json({
            "command": "gen-flow",
            "winding": winding,
            "perturb": perturb,
            "epsilon": epsilon,
            "normalize": normalize,
            "grid": u.line_grid.to_dict(),
            "circle": u.circle_grid.to_dict(),
            "diagnostics": dict(diagnostics._asdict()),
            "nodal_residual": flows.grad1_residual(
                u, tau, epsilon=epsilon).to_dict(),
            "energy_grad1": flows.energy_grad1(u, tau),
            "energy_grad2": flows.energy_grad2(u),
        }, os.path.join(out, name + ".report.json"))
    return diagnostics.solver_residual_Linf <= tol


def roundtrip(config):
    from rabinowitzLab import conf

    u, tau = serialization.read_cylinder(config.get("input"))
    direction = config.get("direction", "psi-phi")
    tol = config.get("tol", conf.admission_tol)

    if direction == "psi-phi":
        report = correspondence.roundtrip_psi_phi(correspondence.M2Element(u))
        passed = report["distance"] <= tol
    else:
        if tau is None:
            raise ConfigError("phi-psi needs a cylinder map with a tau "
                              "record")
        report = correspondence.roundtrip_phi_psi(
            correspondence.M1Element(u, tau)
        )
        passed = report["distance"] <= tol and \
            report["maximum_principle_holds"]
    report["tol"] = tol
    report["passed"] = bool(passed)
    report["input"] = config.get("input")
    _write_report(report, config.get("out"))
    return passed


def loop_ops(config):
    from rabinowitzLab import conf

    u = serialization.read_loop(config.get("input"))
    v = None
    if config.get("input2"):
        v = serialization.read_loop(config.get("input2"))
    op = config.get("op")
    args = config.get("args", [])

    if op == "reparam":
        result = loopspace.reparametrize(
            args[0], u, interpolate=config.get("interpolate", False)
        )
    elif op == "reverse":
        result = loopspace.reverse(u)
    elif op == "iterate":
        result = loopspace.iterate(int(args[0]), u)
    else:
        result = loopspace.concatenate(u, v)

    out = config.get("out") or utils.render_template(
        conf.loop_output_filename, op=op
    )
    serialization.write_loop(result, out)

    if not config.get("check_laws"):
        return True

    m = u.point_count
    rotation = None
    if op == "reparam" and not config.get("interpolate"):
        rotation = args[0]
    laws = loopspace.check_laws(
        u, config.get("tau", 0.0), v, config.get("sigma", 0.0),
        rotation=rotation,
        iterations=tuple(n for n in (2, 3) if 2 * n < m),
    )
    report = {"op": op, "input": config.get("input"),
              "input2": config.get("input2"), "output": out, "laws": laws,
              "passed": all(law["passed"] for law in laws)}
    _write_report(report, None)
    return report["passed"]


def verify_all(config):
    suite = acceptance.AcceptanceSuite(quick=config.get("quick", False),
                                       seed=config.seed)
    report = suite.run(config.get("criteria") or None)
    _write_report(report, config.get("out"))
    sys.stderr.write(acceptance.render_summary(report))
    return report["passed"]


HANDLERS = {
    "solve-kw": solve_kw,
    "gen-flow": gen_flow,
    "roundtrip": roundtrip,
    "loop-ops": loop_ops,
    "verify-all": verify_all,
}


def run(config):
    """runs the command of the given :class:`ExperimentConfig` and returns
    the exit code
    """
    logger.debug("running %s" % config.command)
    try:
        passed = HANDLERS[config.command](config)
    except ConfigError as err:
        logger.error("invalid configuration: %s" % err.value)
        return 2
    except RabinowitzLabError as err:
        logger.error("%s failed: %s" % (config.command, err.value))
        sys.stderr.write(serialization.dumps({
            "error": err.__class__.__name__,
            "message": str(err.value),
            "diagnostics": err.diagnostics,
        }))
        return 1
    except (IOError, OSError, TypeError, ValueError) as err:
        logger.error("invalid input for %s: %s" % (config.command, err))
        return 2
    return 0 if passed else 1


def main(argv=None):
    parser = build_parser()
    namespace = parser.parse_args(argv)
    if namespace.verbose:
        logging.getLogger("rabinowitzLab").setLevel(logging.DEBUG)

    arguments = {}
    try:
        if namespace.config:
            arguments.update(read_config_file(namespace.config))
        for name, value in vars(namespace).items():
            if name in ("config", "verbose"):
                continue
            if name == "command" and value is None:
                continue
            arguments[name] = value
        if arguments.pop("verbose", False):
            logging.getLogger("rabinowitzLab").setLevel(logging.DEBUG)
        config = ExperimentConfig.from_dict(arguments)
    except (ConfigError, TypeError, ValueError) as err:
        logger.error("invalid configuration: %s" % err)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
