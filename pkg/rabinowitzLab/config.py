# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause

import os
import logging

logger = logging.getLogger(__name__)


class Config(object):
    """Config abstraction

    Idea is coming from Sphinx config.

    Holds system wide numerical defaults: grid sizes, solver tolerances,
    continuation step control and the templates used to name output files.
    Every solver in :mod:`rabinowitzLab.models` falls back to these values
    when an argument is skipped or given as None.

    A user config is read from ``$RABINOWITZLAB_PATH/config.py``. Only the
    keys which already exist in :attr:`default_config_values` are taken, any
    other name defined in the user file is ignored.
    """

    env_key = "RABINOWITZLAB_PATH"

    default_config_values = dict(

        # grids
        default_half_width=20.0,
        default_line_points=2001,
        default_circle_points=64,

        # Kazdan-Warner solver
        kw_newton_tol=1e-10,
        kw_max_iter=50,
        kw_bound_tol=1e-8,
        kw_clamp=50.0,
        kw_relaxation_step=1.0,
        kw_relaxation_max_sweeps=20000,

        continuation_initial_step=1.0,
        continuation_max_step=0.25,
        continuation_growth=1.5,
        continuation_min_step=1e-6,

        # flow segments
        flow_half_width=5.0,
        flow_line_points=401,
        flow_circle_points=64,
        flow_tol=1e-10,
        flow_max_iter=30,
        periodic_derivative="centered",

        # loops and moduli spaces
        constraint_tol=1e-9,
        b_clamp_tol=1e-8,
        admission_tol=1e-2,
        psi_constraint_tol=1e-12,
        concat_denominator_tol=1e-9,
        basepoint_tol=1e-12,
        rotation_tol=1e-9,
        alias_tol=1e-9,

        # output
        float_format="%.17g",
        random_seed=12345,

        kw_output_filename="kw_S{{half_width}}_n{{points}}.csv",
        flow_output_filename="flow_k{{winding}}_n{{points}}_m{{circle}}"
                             "_eps{{epsilon}}",
        loop_output_filename="loop_{{op}}.json",

        report_template="""rabinowitzLab acceptance summary ({{ mode }})
{% for item in criteria %}  [{{ 'PASS' if item.passed else 'FAIL' }}] {{ item.number }}. {{ item.name }}
{% endfor %}{{ passed_count }}/{{ criteria|length }} criteria passed
""",
    )

    def __init__(self):

        self.config_values = Config.default_config_values.copy()
        self.user_config = {}

        # the priority order is
        # rabinowitzLab.config
        # config.py under $RABINOWITZLAB_PATH

        self._parse_settings()

    def _parse_settings(self):
        # try to get the environment variable
        if self.env_key not in os.environ:
            # don't do anything
            logger.debug("no environment key found for user settings")
        else:
            logger.debug("environment key found")

            resolved_path = os.path.expanduser(
                os.path.join(
                    os.environ[self.env_key],
                    "config.py"
                )
            )

            # expand nested variables until nothing is left to expand
            expanded_path = os.path.expandvars(resolved_path)
            while expanded_path != resolved_path:
                resolved_path = expanded_path
                expanded_path = os.path.expandvars(resolved_path)

            try:
                with open(resolved_path) as config_file:
                    source = config_file.read()
            except IOError:
                logger.warning("The $%s:%s doesn't exists! skipping user "
                               "config" % (self.env_key, resolved_path))
                return

            try:
                logger.debug("importing user config")
                exec(compile(source, resolved_path, "exec"), self.user_config)
            except SyntaxError as err:
                raise RuntimeError("There is a syntax error in your "
                                   "configuration file: " + str(err))

            # append the data to the current settings
            logger.debug("updating system config")
            for key in self.user_config:
                if key in self.config_values:
                    self.config_values[key] = self.user_config[key]

    def __getattr__(self, name):
        if name in ("config_values", "user_config"):
            raise AttributeError(name)
        try:
            return self.config_values[name]
        except KeyError:
            raise AttributeError("Config has no value called %s" % name)

    def __setattr__(self, name, value):
        if name in ("config_values", "user_config"):
            object.__setattr__(self, name, value)
        else:
            self.config_values[name] = value

    def __getitem__(self, name):
        return self.config_values[name]

    def __setitem__(self, name, value):
        self.config_values[name] = value

    def __delitem__(self, name):
        del self.config_values[name]

    def __contains__(self, name):
        return name in self.config_values

    def get(self, name, default=None):
        """returns the value of the given name or the default
        """
        return self.config_values.get(name, default)

    def value_or_default(self, value, name):
        """returns the given value, or the config value stored under
        ``name`` when the value is None
        """
        if value is None:
            return self.config_values[name]
        return value
