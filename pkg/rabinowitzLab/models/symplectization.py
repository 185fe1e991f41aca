# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause
"""
Symplectization
===============

Geometry of ``R x Sigma`` for a contact manifold ``(Sigma, lambda)``: the
Hamiltonian ``H(r, x) = exp(r) - 1``, the translation action on the ``r``
coordinate, the translation invariant almost complex structure ``J`` and the
loop functionals the Rabinowitz action is built from.

:class:`ContactModel` is the capability record a contact manifold has to
fill in. Only the circle, :class:`CircleContact`, is shipped. Loops on the
circle store the lifted angle ``theta_lift`` and an explicit integer
winding, so ``d theta/dt`` is single valued.

Tangent vectors of the symplectization are :data:`Tangent` tuples
``(dr, reeb, xi)``, the components along ``d/dr``, the Reeb field ``R`` and
the contact distribution.
"""

import collections
import logging

import numpy
import scipy.special

from rabinowitzLab.models import grid as grid_module
from rabinowitzLab.models.errors import ConstraintError, LiftError
from rabinowitzLab.models.grid import CircleGrid

logger = logging.getLogger(__name__)


Tangent = collections.namedtuple("Tangent", ["dr", "reeb", "xi"])


class ContactModel(object):
    """The data a contact manifold ``(Sigma, lambda)`` provides.

    Subclasses implement :meth:`eval_lambda`, :meth:`d_lambda`,
    :meth:`reeb`, :meth:`xi_projection` and :meth:`J_xi`. Tangent vectors of
    Sigma are numpy arrays of length :attr:`dim_sigma`.
    """

    dim_sigma = None

    def eval_lambda(self, x, tangent):
        raise NotImplementedError

    def d_lambda(self, x, first, second):
        raise NotImplementedError

    def reeb(self, x):
        raise NotImplementedError

    def xi_projection(self, x, tangent):
        raise NotImplementedError

    def J_xi(self, x, tangent, t=0.0):
        raise NotImplementedError

    def check_reeb(self, points, rng=None):
        """returns the largest violations of ``lambda(R) = 1`` and
        ``d lambda(R, .) = 0`` over the given points, the second one tested
        on random tangent vectors
        """
        if rng is None:
            rng = numpy.random.default_rng(0)
        normalization = 0.0
        annihilation = 0.0
        for x in points:
            reeb = self.reeb(x)
            normalization = max(normalization,
                                abs(self.eval_lambda(x, reeb) - 1.0))
            vector = rng.standard_normal(self.dim_sigma)
            annihilation = max(annihilation,
                               abs(self.d_lambda(x, reeb, vector)))
        return {"lambda_of_reeb": normalization,
                "d_lambda_of_reeb": annihilation}

    def check_J_xi(self, points, rng=None, t=0.0):
        """returns the largest violation of ``J_xi**2 = -1`` on random
        vectors of xi
        """
        if rng is None:
            rng = numpy.random.default_rng(0)
        defect = 0.0
        for x in points:
            w = self.xi_projection(x, rng.standard_normal(self.dim_sigma))
            twice = self.J_xi(x, self.J_xi(x, w, t), t)
            defect = max(defect, float(numpy.max(numpy.abs(twice + w),
                                                  initial=0.0)))
        return defect


class CircleContact(ContactModel):
    """The circle ``R/Z`` with ``lambda = d theta``, ``R = d/d theta`` and
    the zero contact distribution
    """

    dim_sigma = 1

    def normalize(self, x):
        """stores angles modulo 1
        """
        return numpy.mod(x, 1.0)

    def eval_lambda(self, x, tangent):
        return float(numpy.asarray(tangent, dtype=float).reshape(-1)[0])

    def d_lambda(self, x, first, second):
        # d(d theta) = 0
        return 0.0

    def reeb(self, x):
        return numpy.ones(1)

    def xi_projection(self, x, tangent):
        tangent = numpy.asarray(tangent, dtype=float).reshape(-1)
        return tangent - self.eval_lambda(x, tangent) * self.reeb(x)

    def J_xi(self, x, tangent, t=0.0):
        return numpy.zeros_like(numpy.asarray(tangent, dtype=float))

    def __eq__(self, other):
        return isinstance(other, CircleContact)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash("CircleContact")

    def __repr__(self):
        return "<CircleContact>"


CIRCLE = CircleContact()


class SymplectizationPoint(object):
    """A point ``(r, x)`` of ``R x Sigma``.

    :param r: The cylindrical coordinate.
    :param x: The point of Sigma, an angle for the circle which is stored
      modulo 1.
    :param contact: The :class:`ContactModel`, the circle when skipped.
    """

    def __init__(self, r, x=0.0, contact=None):
        if contact is None:
            contact = CIRCLE
        self.contact = contact
        self.r = self._validate_r(r)
        if isinstance(contact, CircleContact):
            x = float(contact.normalize(x))
        self.x = x

    def _validate_r(self, r):
        """validates the given r value
        """
        if isinstance(r, bool) or \
           not isinstance(r, (int, float, numpy.integer, numpy.floating)):
            raise TypeError("SymplectizationPoint.r should be a real number "
                            "not %s" % r.__class__.__name__)
        return float(r)

    def translated(self, shift):
        return SymplectizationPoint(self.r + float(shift), self.x,
                                    self.contact)

    def __eq__(self, other):
        return isinstance(other, SymplectizationPoint) and \
            other.r == self.r and numpy.all(other.x == self.x)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return "<SymplectizationPoint r=%s x=%s>" % (self.r, self.x)


class LoopInSymplectization(object):
    """A loop ``t -> (r(t), theta(t))`` in ``R x S^1`` sampled on a
    :class:`~rabinowitzLab.models.grid.CircleGrid`.

    The angle is stored lifted, ``theta_lift[j]`` approximates a continuous
    lift of theta at ``t_j`` and ``theta_lift(1) = theta_lift(0) + winding``.
    Neighbouring lifted samples, including the closing pair, must differ by
    less than 0.5, otherwise a
    :class:`~rabinowitzLab.models.errors.LiftError` is raised.

    :param circle: A :class:`~rabinowitzLab.models.grid.CircleGrid`.
    :param r_values: m real numbers.
    :param theta_lift: m real numbers.
    :param winding: An integer.
    """

    def __init__(self, circle, r_values, theta_lift, winding=0):
        self._circle = self._validate_circle(circle)
        self._r = self._validate_samples(r_values, "r_values")
        self._theta = self._validate_samples(theta_lift, "theta_lift")
        self._winding = self._validate_winding(winding)
        self._check_lift()

    def _validate_circle(self, circle):
        """validates the given circle value
        """
        if not isinstance(circle, CircleGrid):
            raise TypeError("LoopInSymplectization.circle should be a "
                            "CircleGrid instance not %s" %
                            circle.__class__.__name__)
        return circle

    def _validate_samples(self, values, name):
        """validates the given sample arrays
        """
        values = numpy.array(values, dtype=float)
        if values.shape != (self._circle.point_count,):
            raise ValueError("LoopInSymplectization.%s should have %s "
                             "entries" % (name, self._circle.point_count))
        if not numpy.all(numpy.isfinite(values)):
            raise ValueError("LoopInSymplectization.%s should be finite" %
                             name)
        values.flags.writeable = False
        return values

    def _validate_winding(self, winding):
        """validates the given winding value
        """
        if isinstance(winding, bool) or \
           not isinstance(winding, (int, numpy.integer)):
            if isinstance(winding, (float, numpy.floating)) and \
               float(winding).is_integer():
                return int(winding)
            raise TypeError("LoopInSymplectization.winding should be an "
                            "integer not %s" % winding.__class__.__name__)
        return int(winding)

    def _check_lift(self):
        closed = numpy.append(self._theta, self._theta[0] + self._winding)
        jumps = numpy.abs(numpy.diff(closed))
        if numpy.max(jumps) >= 0.5:
            raise LiftError(
                "the lifted angle jumps by %s between neighbouring samples, "
                "it is not consistent with winding %s" %
                (numpy.max(jumps), self._winding),
                diagnostics={"index": int(numpy.argmax(jumps))}
            )

    @classmethod
    def from_angles(cls, circle, r_values, angles, winding):
        """builds a loop from angles given modulo 1 by unwrapping them

        Raises :class:`~rabinowitzLab.models.errors.LiftError` when the
        unwrapped angle does not close up with the given winding.
        """
        angles = numpy.asarray(angles, dtype=float)
        lift = numpy.unwrap(2.0 * numpy.pi * angles) / (2.0 * numpy.pi)
        return cls(circle, r_values, lift, winding)

    @classmethod
    def critical(cls, circle, winding, r_value=0.0):
        """the loop ``r = r_value``, ``theta = winding * t``; with the
        default ``r_value`` it is a Reeb orbit on ``Sigma`` of period
        ``winding``
        """
        return cls(circle, numpy.full(circle.point_count, float(r_value)),
                   winding * circle.points, winding)

    @property
    def circle(self):
        return self._circle

    @property
    def point_count(self):
        return self._circle.point_count

    @property
    def r_values(self):
        return self._r

    @property
    def theta_lift(self):
        return self._theta

    @property
    def x_values(self):
        """The angles modulo 1
        """
        return numpy.mod(self._theta, 1.0)

    @property
    def winding(self):
        return self._winding

    @property
    def periodic_part(self):
        """``theta_lift - winding * t``, a periodic sequence
        """
        return self._theta - self._winding * self._circle.points

    def point(self, index):
        return SymplectizationPoint(self._r[index], self._theta[index])

    def theta_derivative(self, mode=None):
        """``d theta/dt`` at the samples
        """
        return self._winding + grid_module.periodic_derivative(
            self.periodic_part, self._circle, mode=mode
        )

    def r_derivative(self, mode=None):
        return grid_module.periodic_derivative(self._r, self._circle,
                                               mode=mode)

    def with_values(self, r_values=None, theta_lift=None, winding=None):
        if r_values is None:
            r_values = self._r
        if theta_lift is None:
            theta_lift = self._theta
        if winding is None:
            winding = self._winding
        return LoopInSymplectization(self._circle, r_values, theta_lift,
                                     winding)

    def translated(self, shift):
        return self.with_values(r_values=self._r + float(shift))

    def same_loop(self, other, tol=1e-12):
        """True if other samples the same loop, the lifts may differ by a
        constant integer

        :param tol: The allowed deviation relative to the size of the
          samples, so shifting a lift by an integer compares equal.
        """
        if not isinstance(other, LoopInSymplectization) or \
           other.circle != self._circle or other.winding != self._winding:
            return False
        r_scale = max(1.0, float(numpy.max(numpy.abs(self._r))))
        if numpy.max(numpy.abs(other.r_values - self._r)) > tol * r_scale:
            return False
        offset = other.theta_lift - self._theta
        integer = numpy.round(offset[0])
        theta_scale = max(1.0, float(numpy.max(numpy.abs(self._theta))),
                          float(numpy.max(numpy.abs(other.theta_lift))))
        return bool(numpy.max(numpy.abs(offset - integer)) <=
                    tol * theta_scale)

    def to_dict(self):
        return {
            "m": self._circle.point_count,
            "winding": self._winding,
            "r": [float(value) for value in self._r],
            "theta_lift": [float(value) for value in self._theta],
        }

    @classmethod
    def from_dict(cls, data):
        for key in ("m", "winding", "r", "theta_lift"):
            if key not in data:
                raise ValueError("loop records should have a %s key" % key)
        return cls(CircleGrid(int(data["m"])), data["r"], data["theta_lift"],
                   data["winding"])

    def __repr__(self):
        return "<LoopInSymplectization m=%s winding=%s>" % (
            self._circle.point_count, self._winding
        )


def hamiltonian(p):
    """``H(r, x) = exp(r) - 1``

    :param p: A :class:`SymplectizationPoint`, or r values directly.
    """
    if isinstance(p, SymplectizationPoint):
        return float(numpy.expm1(p.r))
    result = numpy.expm1(numpy.asarray(p, dtype=float))
    if numpy.ndim(result) == 0:
        return float(result)
    return result


def translate(shift, target):
    """the translation action ``(r, x) -> (r + shift, x)``

    :param shift: A real number. Cylinder maps also take one shift per
      line grid point, an array or a GridFunction.
    :param target: A :class:`SymplectizationPoint`,
      :class:`LoopInSymplectization` or
      :class:`~rabinowitzLab.models.flows.CylinderMap`.
    """
    return target.translated(shift)


AREA_MODES = ("centered", "spectral", "piecewise_linear")


def _area_mode(mode):
    if mode is None:
        from rabinowitzLab import conf
        mode = conf.periodic_derivative
    if mode not in AREA_MODES:
        raise ValueError("loop area mode should be one of %s not %s" %
                         (", ".join(AREA_MODES), mode))
    return mode


def _relative_exp(x):
    """``expm1(x)/x`` with the value 1 at 0
    """
    x = numpy.asarray(x, dtype=float)
    safe = numpy.where(x == 0.0, 1.0, x)
    return numpy.where(x == 0.0, 1.0, numpy.expm1(safe) / safe)


def loop_area(v, mode=None):
    """``int_0^1 exp(r) d theta``, the integral of the Liouville form
    ``exp(r) lambda`` over the loop

    :param mode: ``"centered"`` or ``"spectral"`` differentiate the lifted
      angle periodically and apply the rectangle rule,
      ``"piecewise_linear"`` integrates exactly along the polygon through
      the samples. Skipping it uses ``periodic_derivative`` from the config.
    """
    mode = _area_mode(mode)
    if mode == "piecewise_linear":
        closed_r = numpy.append(v.r_values, v.r_values[0])
        closed_theta = numpy.append(v.theta_lift,
                                    v.theta_lift[0] + v.winding)
        dr = numpy.diff(closed_r)
        dtheta = numpy.diff(closed_theta)
        return float(numpy.sum(numpy.exp(v.r_values) * _relative_exp(dr) *
                               dtheta))
    return grid_module.integrate_circle(
        numpy.exp(v.r_values) * v.theta_derivative(mode=mode)
    )


def mean_hamiltonian(v):
    """the circle mean of ``exp(r) - 1`` along the loop
    """
    return grid_module.integrate_circle(numpy.expm1(v.r_values))


def rabinowitz_action(u, tau, mode=None):
    """``-loop_area(u) + tau * mean_hamiltonian(u)``
    """
    return -loop_area(u, mode=mode) + float(tau) * mean_hamiltonian(u)


def restricted_action(u, tol=None, mode=None):
    """``-loop_area(u)`` for a loop with vanishing mean Hamiltonian

    Raises :class:`~rabinowitzLab.models.errors.ConstraintError` when
    ``|mean_hamiltonian(u)|`` exceeds tol, ``constraint_tol`` when skipped.
    """
    from rabinowitzLab import conf
    tol = conf.value_or_default(tol, "constraint_tol")
    mean = mean_hamiltonian(u)
    if abs(mean) > tol:
        raise ConstraintError("the loop is not on the constraint "
                              "hypersurface, mean H is %s" % mean,
                              diagnostics={"mean_hamiltonian": mean})
    return -loop_area(u, mode=mode)


def sigma_shift_values(r_values, axis=-1):
    """``-ln(mean(exp(r)))`` along ``axis``, evaluated stably
    """
    r_values = numpy.asarray(r_values, dtype=float)
    count = r_values.shape[axis]
    return numpy.log(count) - scipy.special.logsumexp(r_values, axis=axis)


def sigma_shift(u):
    """the shift ``sigma`` with ``mean_hamiltonian(translate(sigma, u)) = 0``,
    that is ``-ln(mean_hamiltonian(u) + 1)``
    """
    return float(sigma_shift_values(u.r_values))


def _as_tangent(tangent):
    if isinstance(tangent, Tangent):
        return tangent
    tangent = tuple(tangent)
    if len(tangent) == 2:
        tangent = tangent + (numpy.zeros(0),)
    return Tangent(*tangent)


def apply_J(p, tangent, t=0.0):
    """the translation invariant almost complex structure

        a d/dr + b R + w  ->  -b d/dr + a R + J_xi w

    so ``J d/dr = R`` and ``J R = -d/dr``.

    :param p: A :class:`SymplectizationPoint`, its r coordinate is not used.
    :param tangent: A :data:`Tangent` or a ``(dr, reeb[, xi])`` sequence.
    """
    tangent = _as_tangent(tangent)
    xi = numpy.asarray(tangent.xi, dtype=float)
    if xi.size:
        xi = p.contact.J_xi(p.x, xi, t)
    return Tangent(-tangent.reeb, tangent.dr, xi)


def omega(p, first, second):
    """``d(exp(r) lambda)`` at p evaluated on two :data:`Tangent` vectors
    """
    first = _as_tangent(first)
    second = _as_tangent(second)
    value = first.dr * second.reeb - first.reeb * second.dr
    first_xi = numpy.asarray(first.xi, dtype=float)
    second_xi = numpy.asarray(second.xi, dtype=float)
    if first_xi.size and second_xi.size:
        value += p.contact.d_lambda(p.x, first_xi, second_xi)
    return float(numpy.exp(p.r) * value)
