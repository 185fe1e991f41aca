# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause
"""
Finite dimensional Lagrange multiplier model
============================================

The model problem behind the loop space flows: critical points of ``f``
restricted to ``h^{-1}(0)`` are the critical points of ``F(x, tau) = f(x) +
tau h(x)`` on ``R^d x R``. F is unbounded in tau, so the flow used here
descends in x and ascends in tau for the metric ``g + eps g_R``

    x' = -(grad f + tau grad h),   eps tau' = h(x)

and at ``eps = 0`` the constrained gradient flow on ``h^{-1}(0)`` with
``tau = -<grad f, grad h>/|grad h|**2``. Both flows have the same rest
points but different flow lines.
"""

import logging

import numpy
import scipy.integrate
import scipy.optimize

from rabinowitzLab.models.errors import ConstraintError, ConvergenceError

logger = logging.getLogger(__name__)


class LagrangeModel(object):
    """The data ``f, grad f, h, grad h`` on ``R^d``.

    :param f: callable returning a float.
    :param grad_f: callable returning an array of length d.
    :param h: callable, 0 must be a regular value.
    :param grad_h: callable returning an array of length d.
    """

    def __init__(self, f, grad_f, h, grad_h):
        for name, value in (("f", f), ("grad_f", grad_f), ("h", h),
                            ("grad_h", grad_h)):
            if not callable(value):
                raise TypeError("LagrangeModel.%s should be callable" % name)
        self.f = f
        self.grad_f = grad_f
        self.h = h
        self.grad_h = grad_h

    @classmethod
    def linear_on_sphere(cls, direction):
        """``f(x) = <direction, x>`` restricted to the unit sphere
        ``h(x) = |x|**2 - 1``; its rest points are
        ``x = +-direction/|direction|`` with ``tau = -+|direction|/2``
        """
        direction = numpy.asarray(direction, dtype=float)
        return cls(
            lambda x: float(numpy.dot(direction, x)),
            lambda x: direction,
            lambda x: float(numpy.dot(x, x) - 1.0),
            lambda x: 2.0 * numpy.asarray(x, dtype=float),
        )

    def action(self, x, tau):
        """``F(x, tau) = f(x) + tau h(x)``
        """
        return self.f(x) + tau * self.h(x)


def lagrange_gradient(model, x, tau):
    """the gradient of ``F`` at ``(x, tau)`` as ``(grad f + tau grad h,
    h(x))``
    """
    x = numpy.asarray(x, dtype=float)
    return (numpy.asarray(model.grad_f(x), dtype=float) +
            tau * numpy.asarray(model.grad_h(x), dtype=float),
            float(model.h(x)))


def constrained_multiplier(model, x):
    """``-<grad f, grad h>/|grad h|**2``, the multiplier keeping the flow on
    the level set of h
    """
    grad_f = numpy.asarray(model.grad_f(x), dtype=float)
    grad_h = numpy.asarray(model.grad_h(x), dtype=float)
    norm = float(numpy.dot(grad_h, grad_h))
    if norm == 0.0:
        raise ConstraintError("grad h vanishes, 0 is not a regular value")
    return -float(numpy.dot(grad_f, grad_h)) / norm


def lagrange_flow(model, x0, tau0, epsilon, s_span, s_eval=None,
                  rtol=1e-10, atol=1e-12):
    """integrates ``x' = -(grad f + tau grad h)``, ``eps tau' = h(x)`` with
    scipy.integrate.solve_ivp

    For :meth:`LagrangeModel.linear_on_sphere` the minimum of f on the
    sphere attracts the flow for every ``eps > 0``.

    :returns: ``(s, x, tau)`` arrays, x of shape ``(len(s), d)``.
    """
    if epsilon <= 0:
        raise ValueError("epsilon should be positive, use constrained_flow "
                         "for epsilon = 0")
    x0 = numpy.asarray(x0, dtype=float)
    d = x0.shape[0]

    def rhs(s, state):
        gradient, h_value = lagrange_gradient(model, state[:d], state[d])
        return numpy.append(-gradient, h_value / epsilon)

    result = scipy.integrate.solve_ivp(
        rhs, s_span, numpy.append(x0, tau0), t_eval=s_eval, method="LSODA",
        rtol=rtol, atol=atol
    )
    if not result.success:
        raise ConvergenceError("lagrange flow integration failed: %s" %
                               result.message)
    return result.t, result.y[:d].T, result.y[d]


def constrained_flow(model, x0, s_span, s_eval=None, rtol=1e-10,
                     atol=1e-12):
    """integrates the gradient flow of f on ``h^{-1}(0)``, the
    ``eps = 0`` limit of :func:`lagrange_flow`

    :returns: ``(s, x, tau)`` arrays with tau the constrained multiplier.
    """
    x0 = numpy.asarray(x0, dtype=float)

    def rhs(s, state):
        tau = constrained_multiplier(model, state)
        return -lagrange_gradient(model, state, tau)[0]

    result = scipy.integrate.solve_ivp(rhs, s_span, x0, t_eval=s_eval,
                                       method="LSODA", rtol=rtol, atol=atol)
    if not result.success:
        raise ConvergenceError("constrained flow integration failed: %s" %
                               result.message)
    x = result.y.T
    tau = numpy.array([constrained_multiplier(model, point) for point in x])
    return result.t, x, tau


def find_critical_point(model, x0, tau0, tol=1e-12):
    """solves ``grad F = 0`` from the given guess with scipy.optimize.root
    """
    x0 = numpy.asarray(x0, dtype=float)
    d = x0.shape[0]

    def equations(state):
        gradient, h_value = lagrange_gradient(model, state[:d], state[d])
        return numpy.append(gradient, h_value)

    result = scipy.optimize.root(equations, numpy.append(x0, tau0), tol=tol)
    if not result.success:
        raise ConvergenceError("critical point search failed: %s" %
                               result.message)
    return result.x[:d], float(result.x[d])


def critical_points_agree(model, points, tol=1e-10):
    """True if every ``(x, tau)`` in points is a rest point of both flows:
    ``grad f + tau grad h = 0`` with ``h(x) = 0``, and tau is the
    constrained multiplier at x
    """
    for x, tau in points:
        gradient, h_value = lagrange_gradient(model, x, tau)
        if numpy.max(numpy.abs(gradient)) > tol or abs(h_value) > tol:
            logger.debug("%s is not a rest point of the lagrange flow" % x)
            return False
        if abs(constrained_multiplier(model, x) - tau) > tol:
            logger.debug("%s is not a rest point of the constrained flow" %
                         x)
            return False
    return True
