# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause
"""
Loop space operations
=====================

The symmetries of the free loop space acting on sampled loops: rotation
``r_* u(t) = u(t + r)``, reversal ``u^-(t) = u(-t)``, iteration ``n_* u(t) =
u(nt)`` and concatenation of two loops with a common basepoint. On loops with
a multiplier they act by ``(r_* u, tau)``, ``(u^-, -tau)`` and ``(n_* u, n
tau)``.

All operations work by index arithmetic on the samples, so the
transformation laws of the action hold exactly up to rounding:

  * rotation and reversal for every loop area mode,
  * iteration in the ``"spectral"`` mode for loops whose Fourier modes stay
    below ``m/(2n)``,
  * concatenation additivity in the ``"piecewise_linear"`` mode, the
    concatenated loop keeps all samples of both halves on a ``2m`` grid.

:func:`check_laws` evaluates every law on given loops and returns the table
the ``loop-ops --check-laws`` command prints.
"""

import logging
import math

import numpy
import scipy.optimize

from rabinowitzLab.models import symplectization
from rabinowitzLab.models.errors import (AliasingError, BasepointError,
                                         ConstraintError, RotationError)
from rabinowitzLab.models.grid import CircleGrid
from rabinowitzLab.models.symplectization import LoopInSymplectization

logger = logging.getLogger(__name__)


class LoopWithMultiplier(object):
    """A loop together with a real multiplier tau.
    """

    def __init__(self, loop, tau):
        if not isinstance(loop, LoopInSymplectization):
            raise TypeError("LoopWithMultiplier.loop should be a "
                            "LoopInSymplectization instance not %s" %
                            loop.__class__.__name__)
        self.loop = loop
        self.tau = float(tau)

    def action(self, mode=None):
        return symplectization.rabinowitz_action(self.loop, self.tau,
                                                 mode=mode)

    def reparametrized(self, r, interpolate=False):
        return LoopWithMultiplier(reparametrize(r, self.loop,
                                                interpolate=interpolate),
                                  self.tau)

    def reversed(self):
        return LoopWithMultiplier(reverse(self.loop), -self.tau)

    def iterated(self, n):
        return LoopWithMultiplier(iterate(n, self.loop), n * self.tau)

    def __repr__(self):
        return "<LoopWithMultiplier %r tau=%s>" % (self.loop, self.tau)


class UndefinedMultiplier(object):
    """The value of :func:`concat_multiplier` when ``mean H(u) + mean H(v)``
    vanishes. It is falsy and keeps the offending denominator.
    """

    def __init__(self, denominator):
        self.denominator = float(denominator)

    def __bool__(self):
        return False

    __nonzero__ = __bool__

    def to_dict(self):
        return {"defined": False, "denominator": self.denominator}

    def __repr__(self):
        return "<UndefinedMultiplier denominator=%s>" % self.denominator


def reparametrize(r, u, interpolate=False, tol=None):
    """``r_* u(t) = u(t + r)``

    ``r * m`` has to be an integer (up to ``rotation_tol``) and the samples
    are rotated cyclically, otherwise a
    :class:`~rabinowitzLab.models.errors.RotationError` is raised. With
    ``interpolate`` a general r is allowed and the loop is resampled by
    Fourier interpolation, which is no longer exact.
    """
    from rabinowitzLab import conf
    tol = conf.value_or_default(tol, "rotation_tol")

    m = u.point_count
    shift = float(r) * m
    index_shift = int(round(shift))
    if abs(shift - index_shift) > tol:
        if not interpolate:
            raise RotationError(
                "the rotation %s is not a multiple of 1/%s" % (r, m),
                diagnostics={"r": float(r), "m": m}
            )
        return _interpolated_rotation(float(r), u)

    index_shift %= m
    indices = (numpy.arange(m) + index_shift) % m
    wraps = (numpy.arange(m) + index_shift) // m
    return u.with_values(r_values=u.r_values[indices],
                         theta_lift=u.theta_lift[indices] +
                         u.winding * wraps)


def _fourier_shift(values, r):
    m = values.shape[0]
    frequencies = numpy.fft.rfftfreq(m, d=1.0 / m)
    coefficients = numpy.fft.rfft(values) * numpy.exp(
        2.0j * numpy.pi * frequencies * r
    )
    return numpy.fft.irfft(coefficients, n=m)


def _interpolated_rotation(r, u):
    t = u.circle.points
    r_values = _fourier_shift(u.r_values, r)
    periodic = _fourier_shift(u.periodic_part, r)
    return u.with_values(r_values=r_values,
                         theta_lift=periodic + u.winding * (t + r))


def reverse(u):
    """``u^-(t) = u(-t)``, the winding changes sign
    """
    m = u.point_count
    indices = (-numpy.arange(m)) % m
    theta = u.theta_lift[indices] - u.winding
    theta[0] = u.theta_lift[0]
    return LoopInSymplectization(u.circle, u.r_values[indices], theta,
                                 -u.winding)


def _check_band_limit(values, n, name, tol):
    """raises AliasingError when values carry a Fourier mode ``k`` with
    ``n k >= m/2``
    """
    m = values.shape[0]
    coefficients = numpy.abs(numpy.fft.rfft(values)) / m
    first_aliased = -(-m // (2 * n))
    aliased = float(numpy.max(coefficients[first_aliased:], initial=0.0))
    scale = max(1.0, float(numpy.max(coefficients)))
    if aliased > tol * scale:
        raise AliasingError(
            "the %s of the loop has Fourier modes which alias when iterated "
            "%s times on a grid of %s points" % (name, n, m),
            diagnostics={"n": int(n), "m": m, "first_aliased_mode":
                         int(first_aliased), "coefficient": aliased}
        )


def iterate(n, u, tol=None):
    """``n_* u(t) = u(nt)`` sampled on the same grid by reading u at the
    indices ``n j mod m``, the winding is multiplied by n

    The samples are the exact values ``u(n t_j)``, a trigonometric
    resampling would give the same numbers. Raises
    :class:`~rabinowitzLab.models.errors.AliasingError` when ``n >= m/2``
    or when r or the periodic part of the angle has a Fourier mode ``k``
    with ``n k >= m/2`` bigger than ``alias_tol``.
    """
    from rabinowitzLab import conf
    if isinstance(n, bool) or not isinstance(n, (int, numpy.integer)) or \
       n < 1:
        raise ValueError("n should be a positive integer")
    m = u.point_count
    if 2 * n >= m:
        raise AliasingError(
            "iterating %s times aliases on a grid of %s points" % (n, m),
            diagnostics={"n": int(n), "m": m}
        )
    if n > 1:
        tol = conf.value_or_default(tol, "alias_tol")
        _check_band_limit(u.r_values, n, "r profile", tol)
        _check_band_limit(u.periodic_part, n, "angle", tol)
    if math.gcd(int(n), m) != 1:
        logger.debug("gcd(%s, %s) > 1, the iterate repeats every %s "
                     "samples" % (n, m, m // math.gcd(int(n), m)))
    positions = n * numpy.arange(m)
    indices = positions % m
    wraps = positions // m
    return LoopInSymplectization(
        u.circle, u.r_values[indices],
        u.theta_lift[indices] + u.winding * wraps, n * u.winding
    )


def _check_basepoints(u, v, tol):
    if u.circle != v.circle:
        raise BasepointError("the loops should share the circle grid")
    r_gap = abs(u.r_values[0] - v.r_values[0])
    angle_gap = abs(u.theta_lift[0] - v.theta_lift[0])
    angle_gap = abs(angle_gap - round(angle_gap))
    if r_gap > tol or angle_gap > tol:
        raise BasepointError(
            "the loops do not start at the same point",
            diagnostics={"r_gap": float(r_gap),
                         "angle_gap": float(angle_gap)}
        )


def concatenate(u, v, resample=False, tol=None):
    """``u # v``, u at double speed on ``[0, 1/2]`` followed by v

    The loops have to start at the same point up to ``basepoint_tol``,
    otherwise a :class:`~rabinowitzLab.models.errors.BasepointError` is
    raised. The result lives on a grid of ``2m`` points and keeps all the
    samples of both loops; the corner at ``t = 1/2`` stays. With
    ``resample`` every second sample is kept so the result is on the
    original grid, which needs an even m.
    """
    from rabinowitzLab import conf
    tol = conf.value_or_default(tol, "basepoint_tol")
    _check_basepoints(u, v, tol)

    m = u.point_count
    offset = u.theta_lift[0] + u.winding - v.theta_lift[0]
    r_values = numpy.concatenate([u.r_values, v.r_values])
    theta = numpy.concatenate([u.theta_lift, v.theta_lift + offset])
    winding = u.winding + v.winding

    if not resample:
        return LoopInSymplectization(CircleGrid(2 * m), r_values, theta,
                                     winding)
    if m % 2:
        raise ValueError("resampled concatenation needs an even number of "
                         "points")
    return LoopInSymplectization(u.circle, r_values[::2], theta[::2],
                                 winding)


def concat_multiplier(u, v, tau, sigma, tol=None, speed_corrected=False):
    """``(tau mean H(u) + sigma mean H(v)) / (mean H(u) + mean H(v))``

    Returns an :class:`UndefinedMultiplier` when the denominator is not
    bigger than ``concat_denominator_tol`` in absolute value, which is the
    case for every pair of loops on the constraint hypersurface.

    :param speed_corrected: The mean Hamiltonian of ``u # v`` is the
      average of the two, so additivity of the action at ``u # v`` needs
      twice the value above. Return that one instead.
    """
    from rabinowitzLab import conf
    tol = conf.value_or_default(tol, "concat_denominator_tol")

    mean_u = symplectization.mean_hamiltonian(u)
    mean_v = symplectization.mean_hamiltonian(v)
    denominator = mean_u + mean_v
    if abs(denominator) <= tol:
        return UndefinedMultiplier(denominator)
    value = (float(tau) * mean_u + float(sigma) * mean_v) / denominator
    if speed_corrected:
        value *= 2.0
    return value


def random_loop(rng, circle, winding, max_mode=2, amplitude=0.3):
    """a loop with random trigonometric r and periodic angle part of
    Fourier modes up to max_mode
    """
    t = circle.points
    r_values = numpy.zeros_like(t)
    periodic = numpy.zeros_like(t)
    for mode in range(1, max_mode + 1):
        r_values = r_values + amplitude / mode * (
            rng.uniform(-1, 1) * numpy.cos(2 * numpy.pi * mode * t) +
            rng.uniform(-1, 1) * numpy.sin(2 * numpy.pi * mode * t)
        )
        periodic = periodic + amplitude / (2 * numpy.pi * mode) * (
            rng.uniform(-1, 1) * numpy.cos(2 * numpy.pi * mode * t) +
            rng.uniform(-1, 1) * numpy.sin(2 * numpy.pi * mode * t)
        )
    r_values = r_values + rng.uniform(-0.5, 0.5)
    periodic = periodic + rng.uniform(0.0, 1.0)
    return LoopInSymplectization(circle, r_values, winding * t + periodic,
                                 winding)


def random_constrained_loop(rng, circle, winding, basepoint=None,
                            max_mode=2, amplitude=0.3, max_scale=2.0,
                            attempts=100):
    """a random loop on the constraint hypersurface ``mean H = 0``

    :param basepoint: Optional ``(r0, theta0)``. The loop then starts there:
      ``r = r0 + lam q(t)`` with ``q(0) = 0``, ``max |q| = 1`` and ``lam``
      in ``[0, max_scale]`` found by scipy.optimize.brentq so that the mean
      of ``exp(r)`` is 1, which needs ``r0 < 0``. Profiles which need a
      bigger ``lam`` are drawn again, at most ``attempts`` times, so r stays
      within ``max_scale`` of the basepoint. Without a basepoint the loop is
      simply shifted.
    """
    if basepoint is None:
        loop = random_loop(rng, circle, winding, max_mode=max_mode,
                           amplitude=amplitude)
        return loop.translated(symplectization.sigma_shift(loop))

    r0, theta0 = float(basepoint[0]), float(basepoint[1])
    if r0 >= 0:
        raise ConstraintError("a constrained loop through r0 >= 0 needs a "
                              "bump above r0 and is not generated")

    def excess(lam, q):
        return numpy.mean(numpy.exp(r0 + lam * q)) - 1.0

    for attempt in range(attempts):
        loop = random_loop(rng, circle, winding, max_mode=max_mode,
                           amplitude=amplitude)
        q = loop.r_values - loop.r_values[0]
        size = float(numpy.max(numpy.abs(q)))
        if size == 0.0:
            continue
        q = q / size
        if excess(max_scale, -q) > excess(max_scale, q):
            q = -q
        if excess(max_scale, q) < 0:
            logger.debug("constrained loop attempt %s needs lam > %s" %
                         (attempt, max_scale))
            continue
        lam = scipy.optimize.brentq(excess, 0.0, max_scale, args=(q,),
                                    xtol=1e-15, rtol=1e-15)
        periodic = loop.periodic_part - loop.periodic_part[0] + theta0
        return LoopInSymplectization(circle, r0 + lam * q,
                                     winding * circle.points + periodic,
                                     winding)

    raise ConstraintError(
        "no constrained loop through the basepoint in %s attempts" %
        attempts,
        diagnostics={"r0": r0, "max_scale": max_scale}
    )


def _law(name, lhs, rhs, tol):
    error = abs(lhs - rhs)
    return {"law": name, "lhs": float(lhs), "rhs": float(rhs),
            "error": float(error), "passed": bool(error <= tol)}


def check_laws(u, tau=0.0, v=None, sigma=0.0, rotation=None,
               iterations=(2, 3), tol=1e-10, mode="spectral",
               concat_mode="piecewise_linear"):
    """evaluates every transformation law of the action functionals on the
    given loops and returns a list of law records ``{"law", "lhs", "rhs",
    "error", "passed"}``

    The restricted action laws are only evaluated when u (and v for the
    concatenation laws) lie on the constraint hypersurface.
    """
    from rabinowitzLab import conf

    laws = []
    m = u.point_count
    if rotation is None:
        rotation = 3.0 / m
    constraint_tol = conf.constraint_tol
    u_mean = symplectization.mean_hamiltonian(u)
    u_constrained = abs(u_mean) <= constraint_tol

    def action(loop, value, area_mode=mode):
        return symplectization.rabinowitz_action(loop, value, mode=area_mode)

    def area(loop, area_mode=mode):
        return -symplectization.loop_area(loop, mode=area_mode)

    base = LoopWithMultiplier(u, tau)
    rotated = base.reparametrized(rotation)
    laws.append(_law("action_rotation", rotated.action(mode),
                     base.action(mode), tol))
    reversed_ = base.reversed()
    laws.append(_law("action_reversal", reversed_.action(mode),
                     -base.action(mode), tol))
    for n in iterations:
        iterated = base.iterated(n)
        laws.append(_law("action_iterate_%s" % n, iterated.action(mode),
                         n * base.action(mode), tol))

    laws.append(_law("mean_h_rotation", symplectization.mean_hamiltonian(
        rotated.loop), u_mean, tol))
    laws.append(_law("mean_h_reversal", symplectization.mean_hamiltonian(
        reversed_.loop), u_mean, tol))
    for n in iterations:
        laws.append(_law("mean_h_iterate_%s" % n,
                         symplectization.mean_hamiltonian(iterate(n, u)),
                         u_mean, tol))

    if u_constrained:
        laws.append(_law("restricted_rotation", area(rotated.loop), area(u),
                         tol))
        laws.append(_law("restricted_reversal", area(reversed_.loop),
                         -area(u), tol))
        for n in iterations:
            laws.append(_law("restricted_iterate_%s" % n,
                             area(iterate(n, u)), n * area(u), tol))

    # O(2) relation and composition of iterates
    flipped_then_rotated = reparametrize(-rotation % 1.0, reverse(u))
    rotated_then_flipped = reverse(reparametrize(rotation, u))
    laws.append(_law("reversal_rotation_relation",
                     float(flipped_then_rotated.same_loop(
                         rotated_then_flipped, tol=tol)), 1.0, tol))
    if len(iterations) >= 2 and 2 * iterations[0] * iterations[1] < m:
        first, second = iterations[0], iterations[1]
        composed = iterate(first, iterate(second, u))
        direct = iterate(first * second, u)
        laws.append(_law("iterate_composition",
                         float(composed.same_loop(direct, tol=tol)), 1.0,
                         tol))

    if v is not None:
        joined = concatenate(u, v)
        v_mean = symplectization.mean_hamiltonian(v)
        laws.append(_law("mean_h_concatenation",
                         symplectization.mean_hamiltonian(joined),
                         0.5 * (u_mean + v_mean), tol))
        laws.append(_law("area_concatenation",
                         area(joined, concat_mode),
                         area(u, concat_mode) + area(v, concat_mode), tol))
        if u_constrained and abs(v_mean) <= constraint_tol:
            multiplier = concat_multiplier(u, v, tau, sigma)
            laws.append({"law": "concat_multiplier_undefined",
                         "lhs": float(getattr(multiplier, "denominator",
                                              numpy.nan)),
                         "rhs": 0.0, "error": 0.0,
                         "passed": isinstance(multiplier,
                                              UndefinedMultiplier)})
        else:
            multiplier = concat_multiplier(u, v, tau, sigma,
                                           speed_corrected=True)
            if not isinstance(multiplier, UndefinedMultiplier):
                laws.append(_law(
                    "action_concatenation",
                    action(joined, multiplier, concat_mode),
                    action(u, tau, concat_mode) +
                    action(v, sigma, concat_mode), tol))

    return laws
