# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause


class RabinowitzLabError(Exception):
    """Base class of every error raised by the numerical routines.

    :param value: The message.

    :param diagnostics: A dictionary holding whatever the raising routine
      knew at the time of the failure (residual histories, step sizes,
      offending indices). Reports and the command line tool serialize it.
    """

    def __init__(self, value="", diagnostics=None):
        super(RabinowitzLabError, self).__init__(value)
        self.value = value
        if diagnostics is None:
            diagnostics = {}
        self.diagnostics = diagnostics

    def __str__(self):
        return repr(self.value)


class GridError(RabinowitzLabError):
    """Raised when a grid is too small or two grids do not match
    """


class ConvergenceError(RabinowitzLabError):
    """Raised when Newton iteration or continuation does not converge
    """


class NonFiniteError(ConvergenceError):
    """Raised when an iteration produces inf or nan values
    """


class SingularSystemError(RabinowitzLabError):
    """Raised when a zero pivot is met while solving a linear system
    """


class ConstraintError(RabinowitzLabError):
    """Raised when a loop or a field violates the mean Hamiltonian
    constraint or a sign condition beyond tolerance
    """


class LiftError(RabinowitzLabError):
    """Raised when the lifted angle of a loop is inconsistent with its
    winding
    """


class WindingError(RabinowitzLabError):
    """Raised when loops with different windings are combined
    """


class BasepointError(RabinowitzLabError):
    """Raised when loops without a common basepoint are concatenated
    """


class AliasingError(RabinowitzLabError):
    """Raised when an iteration would alias on the circle grid
    """


class RotationError(RabinowitzLabError):
    """Raised when a rotation is not compatible with the circle grid
    """


class ConfigError(RabinowitzLabError):
    """Raised when an experiment configuration is invalid
    """
