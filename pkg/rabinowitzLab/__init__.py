# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause

__version__ = "0.1.0"

import logging
logging.basicConfig(
    format='%(asctime)s:%(levelname)s:%(module)s:%(funcName)s:%(message)s',
    datefmt="%Y-%d-%m %H:%M:%S"
)

logging.debug("Init rabinowitzLab")

from rabinowitzLab import config
conf = config.Config()

from rabinowitzLab.models.errors import (RabinowitzLabError, GridError,
                                         ConvergenceError, NonFiniteError,
                                         SingularSystemError, ConstraintError,
                                         LiftError, WindingError,
                                         BasepointError, AliasingError,
                                         RotationError, ConfigError)
from rabinowitzLab.models.grid import LineGrid, CircleGrid, GridFunction
from rabinowitzLab.models.kazdan_warner import (KWProblem, KWSolution,
                                                BumpProfile)
from rabinowitzLab.models.symplectization import (CircleContact,
                                                  SymplectizationPoint,
                                                  LoopInSymplectization)
from rabinowitzLab.models.flows import (CylinderMap, MultiplierPath,
                                        FlowResidual)
from rabinowitzLab.models.correspondence import M1Element, M2Element
from rabinowitzLab.models.loopspace import (LoopWithMultiplier,
                                            UndefinedMultiplier)
