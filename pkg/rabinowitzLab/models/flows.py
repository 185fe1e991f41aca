# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause
"""
Flows
=====

Residuals, energies and a truncated cylinder solver for the two gradient
flow equations of the Rabinowitz action on ``R x S^1``.

A field ``u(s, t) = (a(s, t), theta(s, t))`` is stored as a
:class:`CylinderMap`, the multiplier ``tau(s)`` as a :class:`MultiplierPath`.
With ``J d/dr = R`` and ``X_H = R`` the equation

    d_s u + J(u)(d_t u - tau X_H(u)) = 0

reads ``d_s a - d_t theta + tau = 0`` and ``d_s theta + d_t a = 0`` on the
circle. The first flow couples it to ``eps d_s tau + mean H(u_s) = 0``
(``eps = 1`` is the unconstrained flow), the second one replaces the
multiplier equation with the constraint ``mean H(v_s) = 0`` and recovers
``tau`` as the loop area.

Forward evolution in ``s`` is ill posed, so flow lines are computed as two
point boundary value problems on ``[-S, S]`` by
:func:`solve_flow_segment`.
"""

import collections
import logging

import numpy
import scipy.sparse
import scipy.sparse.linalg

from rabinowitzLab.models import grid as grid_module
from rabinowitzLab.models import symplectization
from rabinowitzLab.models.errors import (ConvergenceError, GridError,
                                         LiftError, NonFiniteError,
                                         SingularSystemError, WindingError)
from rabinowitzLab.models.grid import CircleGrid, GridFunction, LineGrid
from rabinowitzLab.models.symplectization import LoopInSymplectization

logger = logging.getLogger(__name__)


class CylinderMap(object):
    """A map ``u(s, t)`` of the cylinder into ``R x S^1`` sampled on a line
    grid times a circle grid.

    :param line_grid: The :class:`~rabinowitzLab.models.grid.LineGrid` of
      the ``s`` direction.
    :param circle_grid: The :class:`~rabinowitzLab.models.grid.CircleGrid`
      of the ``t`` direction.
    :param a: An ``(n, m)`` array of r values.
    :param theta_lift: An ``(n, m)`` array of lifted angles. Every row is
      shifted by an integer so it joins its predecessor continuously.
    :param winding: The common winding of all the loops.
    """

    def __init__(self, line_grid, circle_grid, a, theta_lift, winding):
        self._line_grid = self._validate_line_grid(line_grid)
        self._circle_grid = self._validate_circle_grid(circle_grid)
        self._a = self._validate_samples(a, "a")
        self._theta = self._align_lifts(
            self._validate_samples(theta_lift, "theta_lift")
        )
        self._theta.flags.writeable = False
        self._winding = self._validate_winding(winding)
        self._check_lift()

    def _validate_line_grid(self, line_grid):
        """validates the given line_grid value
        """
        if not isinstance(line_grid, LineGrid):
            raise TypeError("CylinderMap.line_grid should be a LineGrid "
                            "instance not %s" % line_grid.__class__.__name__)
        return line_grid

    def _validate_circle_grid(self, circle_grid):
        """validates the given circle_grid value
        """
        if not isinstance(circle_grid, CircleGrid):
            raise TypeError("CylinderMap.circle_grid should be a CircleGrid "
                            "instance not %s" %
                            circle_grid.__class__.__name__)
        return circle_grid

    def _validate_samples(self, values, name):
        """validates the given sample arrays
        """
        values = numpy.array(values, dtype=float)
        shape = (self._line_grid.point_count, self._circle_grid.point_count)
        if values.shape != shape:
            raise GridError("CylinderMap.%s should have the shape %s, got "
                            "%s" % (name, shape, values.shape))
        if not numpy.all(numpy.isfinite(values)):
            raise ValueError("CylinderMap.%s should be finite" % name)
        values.flags.writeable = False
        return values

    def _validate_winding(self, winding):
        """validates the given winding value
        """
        if isinstance(winding, bool) or \
           not isinstance(winding, (int, numpy.integer)):
            raise TypeError("CylinderMap.winding should be an integer not %s"
                            % winding.__class__.__name__)
        return int(winding)

    def _align_lifts(self, theta):
        theta = numpy.array(theta)
        for i in range(1, theta.shape[0]):
            theta[i] -= numpy.round(theta[i, 0] - theta[i - 1, 0])
        return theta

    def _check_lift(self):
        closing = self._theta[:, :1] + self._winding
        closed = numpy.concatenate([self._theta, closing], axis=1)
        jumps = numpy.abs(numpy.diff(closed, axis=1))
        if numpy.max(jumps) >= 0.5:
            raise LiftError("the lifted angle of the cylinder map is not "
                            "consistent with winding %s" % self._winding)

    @classmethod
    def from_loops(cls, line_grid, loops):
        """stacks one :class:`LoopInSymplectization` per line grid point
        """
        loops = list(loops)
        if len(loops) != line_grid.point_count:
            raise GridError("there should be one loop per line grid point")
        circle = loops[0].circle
        winding = loops[0].winding
        for loop in loops:
            if loop.circle != circle:
                raise GridError("all loops should share the circle grid")
            if loop.winding != winding:
                raise WindingError("all loops should share the winding")
        return cls(line_grid, circle,
                   numpy.array([loop.r_values for loop in loops]),
                   numpy.array([loop.theta_lift for loop in loops]),
                   winding)

    @classmethod
    def constant(cls, line_grid, loop):
        """the map which is the given loop at every s
        """
        n = line_grid.point_count
        return cls(line_grid, loop.circle,
                   numpy.tile(loop.r_values, (n, 1)),
                   numpy.tile(loop.theta_lift, (n, 1)), loop.winding)

    @property
    def line_grid(self):
        return self._line_grid

    @property
    def circle_grid(self):
        return self._circle_grid

    @property
    def a(self):
        """The ``(n, m)`` array of r values
        """
        return self._a

    @property
    def theta_lift(self):
        return self._theta

    @property
    def winding(self):
        return self._winding

    @property
    def periodic_part(self):
        """``theta_lift - winding * t``
        """
        return self._theta - self._winding * self._circle_grid.points

    @property
    def loops(self):
        return [self.loop(i) for i in range(self._line_grid.point_count)]

    def loop(self, index):
        """the loop ``u(s_index, .)``
        """
        return LoopInSymplectization(self._circle_grid, self._a[index],
                                     self._theta[index], self._winding)

    def with_values(self, a=None, theta_lift=None):
        if a is None:
            a = self._a
        if theta_lift is None:
            theta_lift = self._theta
        return CylinderMap(self._line_grid, self._circle_grid, a, theta_lift,
                           self._winding)

    def translated(self, shift):
        """adds shift to every r value, shift is a number or one value per s
        """
        if isinstance(shift, GridFunction):
            if shift.grid != self._line_grid:
                raise GridError("the shift should live on the line grid of "
                                "the cylinder map")
            shift = shift.values
        shift = numpy.asarray(shift, dtype=float)
        if shift.ndim == 1:
            if shift.shape[0] != self._line_grid.point_count:
                raise GridError("the shift should have one value per s")
            shift = shift[:, numpy.newaxis]
        return self.with_values(a=self._a + shift)

    def to_dict(self, tau=None):
        data = {
            "grid": self._line_grid.to_dict(),
            "circle": self._circle_grid.to_dict(),
            "winding": self._winding,
            "loops": [loop.to_dict() for loop in self.loops],
        }
        if tau is not None:
            values = tau.values if isinstance(tau, (GridFunction,
                                                    MultiplierPath)) else tau
            data["tau"] = [float(value) for value in values]
        return data

    @classmethod
    def from_dict(cls, data):
        """returns a ``(CylinderMap, MultiplierPath or None)`` tuple
        """
        for key in ("grid", "circle", "winding", "loops"):
            if key not in data:
                raise ValueError("cylinder map records should have a %s key"
                                 % key)
        line = LineGrid(float(data["grid"]["S"]), int(data["grid"]["n"]))
        loops = [LoopInSymplectization.from_dict(loop)
                 for loop in data["loops"]]
        cylinder = cls.from_loops(line, loops)
        tau = None
        if data.get("tau") is not None:
            tau = MultiplierPath(GridFunction(line, data["tau"]))
        return cylinder, tau

    def __repr__(self):
        return "<CylinderMap n=%s m=%s winding=%s>" % (
            self._line_grid.point_count, self._circle_grid.point_count,
            self._winding
        )


class MultiplierPath(object):
    """The Lagrange multiplier ``tau(s)``

    :param tau: A :class:`~rabinowitzLab.models.grid.GridFunction`.
    """

    def __init__(self, tau):
        if not isinstance(tau, GridFunction):
            raise TypeError("MultiplierPath.tau should be a GridFunction "
                            "instance not %s" % tau.__class__.__name__)
        self.tau = tau

    @classmethod
    def constant(cls, grid, value):
        return cls(GridFunction.constant(grid, value))

    @property
    def grid(self):
        return self.tau.grid

    @property
    def values(self):
        return self.tau.values

    def __repr__(self):
        return "<MultiplierPath on %r>" % self.tau.grid


class FlowResidual(object):
    """The pointwise residuals of a flow equation.

    :param field_residual: ``(n, m)`` magnitudes of the field equation.
    :param field_components: The two ``(n, m)`` components
      ``(d_s a - d_t theta + tau, d_s theta + d_t a)``.
    :param multiplier_residual: GridFunction of ``eps d_s tau + mean H``,
      None for the constrained flow.
    :param constraint_residual: GridFunction of ``|mean H|``, only for the
      constrained flow.

    The ``*_Linf`` properties leave out the two boundary rows.
    """

    def __init__(self, field_residual, field_components,
                 multiplier_residual=None, constraint_residual=None):
        self.field_residual = field_residual
        self.field_components = field_components
        self.multiplier_residual = multiplier_residual
        self.constraint_residual = constraint_residual

    @staticmethod
    def _interior_max(values):
        interior = numpy.abs(numpy.asarray(values)[1:-1])
        if interior.size == 0:
            return 0.0
        return float(numpy.max(interior))

    @property
    def field_Linf(self):
        return self._interior_max(self.field_residual)

    @property
    def multiplier_Linf(self):
        if self.multiplier_residual is None:
            return None
        return self._interior_max(self.multiplier_residual.values)

    @property
    def constraint_Linf(self):
        if self.constraint_residual is None:
            return None
        return self._interior_max(self.constraint_residual.values)

    @property
    def Linf(self):
        """the largest interior residual of all the components
        """
        values = [self.field_Linf, self.multiplier_Linf,
                  self.constraint_Linf]
        return max(value for value in values if value is not None)

    def to_dict(self):
        return {"field_Linf": self.field_Linf,
                "multiplier_Linf": self.multiplier_Linf,
                "constraint_Linf": self.constraint_Linf}


def _check_tau(u, tau):
    if isinstance(tau, MultiplierPath):
        tau = tau.tau
    if not isinstance(tau, GridFunction):
        raise TypeError("tau should be a MultiplierPath instance not %s" %
                        tau.__class__.__name__)
    if tau.grid != u.line_grid:
        raise GridError("the multiplier and the field should share the line "
                        "grid")
    return tau


def _field_components(u, tau_values, mode=None):
    line = u.line_grid
    circle = u.circle_grid
    a_s = grid_module.derivative_values(u.a, line, axis=0)
    theta_s = grid_module.derivative_values(u.theta_lift, line, axis=0)
    a_t = grid_module.periodic_derivative(u.a, circle, mode=mode, axis=1)
    theta_t = u.winding + grid_module.periodic_derivative(
        u.periodic_part, circle, mode=mode, axis=1
    )
    first = a_s - theta_t + numpy.asarray(tau_values)[:, numpy.newaxis]
    second = theta_s + a_t
    return first, second


def mean_hamiltonians(u):
    """GridFunction of ``mean H(u_s)`` for every s
    """
    return GridFunction(u.line_grid, grid_module.integrate_circle(
        numpy.expm1(u.a), axis=1
    ))


def grad1_residual(u, tau, epsilon=1.0, mode=None):
    """the residual of the first flow equation

        d_s a - d_t theta + tau = 0,  d_s theta + d_t a = 0,
        eps d_s tau + mean H(u_s) = 0

    :param u: A :class:`CylinderMap`.
    :param tau: A :class:`MultiplierPath` on the line grid of u.
    :param epsilon: The nonnegative weight of ``d_s tau``.
    :param mode: The periodic derivative mode, see
      :func:`~rabinowitzLab.models.grid.periodic_derivative`.
    """
    if epsilon < 0:
        raise ValueError("epsilon should be nonnegative")
    tau = _check_tau(u, tau)
    first, second = _field_components(u, tau.values, mode)
    multiplier = epsilon * grid_module.derivative_values(tau.values,
                                                         tau.grid) + \
        mean_hamiltonians(u).values
    return FlowResidual(
        numpy.hypot(first, second), (first, second),
        multiplier_residual=tau.with_values(multiplier),
    )


def field_residual_generic(u, tau, mode=None):
    """the field residual assembled pointwise with
    :func:`~rabinowitzLab.models.symplectization.apply_J`, for cross checking
    the hard coded circle reduction of :func:`grad1_residual`
    """
    tau = _check_tau(u, tau)
    line = u.line_grid
    circle = u.circle_grid
    a_s = grid_module.derivative_values(u.a, line, axis=0)
    theta_s = grid_module.derivative_values(u.theta_lift, line, axis=0)
    a_t = grid_module.periodic_derivative(u.a, circle, mode=mode, axis=1)
    theta_t = u.winding + grid_module.periodic_derivative(
        u.periodic_part, circle, mode=mode, axis=1
    )
    first = numpy.zeros_like(u.a)
    second = numpy.zeros_like(u.a)
    for i in range(line.point_count):
        for j in range(circle.point_count):
            point = symplectization.SymplectizationPoint(u.a[i, j],
                                                         u.theta_lift[i, j])
            rotated = symplectization.apply_J(
                point,
                (a_t[i, j], theta_t[i, j] - tau.values[i]),
                t=circle.points[j]
            )
            first[i, j] = a_s[i, j] + rotated.dr
            second[i, j] = theta_s[i, j] + rotated.reeb
    return first, second


def lagrange_multiplier_from_loops(v, mode=None):
    """the multiplier ``tau(s) = loop_area(v_s)`` of the constrained flow
    """
    areas = [symplectization.loop_area(loop, mode=mode) for loop in v.loops]
    return MultiplierPath(GridFunction(v.line_grid, areas))


def grad2_residual(v, mode=None):
    """the residual of the constrained flow, with ``tau`` taken from the loop
    areas and the constraint residual ``|mean H(v_s)|``
    """
    tau = lagrange_multiplier_from_loops(v, mode=mode)
    first, second = _field_components(v, tau.values, mode)
    constraint = numpy.abs(mean_hamiltonians(v).values)
    return FlowResidual(
        numpy.hypot(first, second), (first, second),
        constraint_residual=GridFunction(v.line_grid, constraint),
    )


def energy_density(u):
    """GridFunction of ``int_0^1 exp(a)((d_s a)**2 + (d_s theta)**2) dt``,
    the ``omega(d_s u, J d_s u)`` density integrated over the circle
    """
    line = u.line_grid
    a_s = grid_module.derivative_values(u.a, line, axis=0)
    theta_s = grid_module.derivative_values(u.theta_lift, line, axis=0)
    density = numpy.exp(u.a) * (a_s ** 2 + theta_s ** 2)
    return GridFunction(line, grid_module.integrate_circle(density, axis=1))


def _half_cell_density(u):
    """``int_0^1 exp(a)((d_s a)**2 + (d_s theta)**2) dt`` at the half points
    ``s_{i+1/2}``, with centered differences and ``exp(a)`` averaged over
    the two rows
    """
    h = u.line_grid.spacing
    weight = 0.5 * (numpy.exp(u.a[1:]) + numpy.exp(u.a[:-1]))
    a_s = numpy.diff(u.a, axis=0) / h
    theta_s = numpy.diff(u.theta_lift, axis=0) / h
    return grid_module.integrate_circle(weight * (a_s ** 2 + theta_s ** 2),
                                        axis=1)


def energy_grad2(v):
    """``int int omega(d_s v, J d_s v) dt ds``, summed over the half cells
    of the line grid
    """
    return float(v.line_grid.spacing * numpy.sum(_half_cell_density(v)))


def energy_grad1(u, tau):
    """``energy_grad2(u) + int (d_s tau)**2 ds``, both summed over the half
    cells
    """
    tau = _check_tau(u, tau)
    h = tau.grid.spacing
    slope = numpy.diff(tau.values) / h
    return energy_grad2(u) + float(h * numpy.sum(slope ** 2))


FlowSegmentDiagnostics = collections.namedtuple(
    "FlowSegmentDiagnostics",
    ["iterations", "residual_history", "solver_residual_Linf",
     "residual_Linf", "field_Linf", "multiplier_Linf", "constraint_Linf",
     "epsilon"]
)


class FlowSegmentSolver(object):
    """Newton solver of the first flow equation on ``[-S, S] x S^1``.

    The r values of the two boundary loops are imposed at ``s = -S`` and
    ``s = S``, the mean lifted angle of the left loop fixes the rotation of
    the solution. Everything else is unknown: ``a`` at the interior nodes,
    the periodic part of the angle at the cell centers
    ``(s_{i+1/2}, t_{j+1/2})`` and ``tau`` at the half points
    ``s_{i+1/2}``. The equations are compact differences:

      * ``d_s a - winding - d_t phi + tau`` at ``(s_{i+1/2}, t_j)``
      * ``d_s phi + d_t a`` at ``(s_i, t_{j+1/2})``, interior i
      * ``eps d_s tau + mean H`` at the interior nodes, or
        ``mean H`` alone when ``eps = 0``
      * the mean of ``phi`` over the first cell row equals the mean
        periodic angle of the left loop

    The staggering keeps every Fourier mode in ``t``, including the
    Nyquist mode of an even grid, out of the kernel of the Jacobian. The
    field equations are linear, so only the multiplier rows change between
    Newton steps. Linear systems are solved by
    scipy.sparse.linalg.spsolve.

    The solution is handed back on the nodes. The two boundary rows of the
    angle and the multiplier are closed with ghost half rows taken from
    ``d_s phi + d_t a = 0`` and ``eps d_s tau + mean H = 0`` at the
    boundary nodes, so the nodal error is centered on every row. With
    ``eps = 0`` the boundary multiplier is extrapolated quadratically.
    :attr:`diagnostics` keeps the last discrete residual as
    ``solver_residual_Linf`` and the nodal :func:`grad1_residual` of the
    returned pair as ``residual_Linf``.

    :param line_grid: The :class:`~rabinowitzLab.models.grid.LineGrid` of
      the segment.
    :param epsilon: The weight of ``d_s tau`` in ``[0, 1]``.
    :param tol: The max norm of the discrete residual to reach,
      ``flow_tol`` when skipped.
    :param max_iter: ``flow_max_iter`` when skipped.
    """

    def __init__(self, line_grid, epsilon=1.0, tol=None, max_iter=None):
        from rabinowitzLab import conf

        if not isinstance(line_grid, LineGrid):
            raise TypeError("FlowSegmentSolver.line_grid should be a "
                            "LineGrid instance not %s" %
                            line_grid.__class__.__name__)
        self.line_grid = line_grid
        self.epsilon = self._validate_epsilon(epsilon)
        self.tol = conf.value_or_default(tol, "flow_tol")
        self.max_iter = conf.value_or_default(max_iter, "flow_max_iter")
        self.diagnostics = None

    def _validate_epsilon(self, epsilon):
        """validates the given epsilon value
        """
        if isinstance(epsilon, bool) or \
           not isinstance(epsilon, (int, float, numpy.integer,
                                    numpy.floating)):
            raise TypeError("FlowSegmentSolver.epsilon should be a real "
                            "number not %s" % epsilon.__class__.__name__)
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError("FlowSegmentSolver.epsilon should be in [0, 1]")
        return float(epsilon)

    # layout of the unknown vector
    def _sizes(self, m):
        n = self.line_grid.point_count
        a_count = (n - 2) * m
        phi_count = (n - 1) * m
        return n, a_count, phi_count, n - 1

    def _split(self, x, m):
        n, a_count, phi_count, tau_count = self._sizes(m)
        a = x[:a_count].reshape(n - 2, m)
        phi = x[a_count:a_count + phi_count].reshape(n - 1, m)
        tau = x[a_count + phi_count:]
        return a, phi, tau

    def _residual(self, x, left, right, winding, phase, m):
        n = self.line_grid.point_count
        h = self.line_grid.spacing
        dt = 1.0 / m
        a_inner, phi, tau = self._split(x, m)
        a = numpy.vstack([left, a_inner, right])

        field_first = (a[1:] - a[:-1]) / h - winding - \
            (phi - numpy.roll(phi, 1, axis=1)) / dt + tau[:, numpy.newaxis]
        field_second = (phi[1:] - phi[:-1]) / h + \
            (numpy.roll(a[1:-1], -1, axis=1) - a[1:-1]) / dt
        mean_h = numpy.mean(numpy.expm1(a[1:-1]), axis=1)
        if self.epsilon > 0:
            multiplier = self.epsilon * (tau[1:] - tau[:-1]) / h + mean_h
        else:
            multiplier = mean_h
        gauge = numpy.array([numpy.mean(phi[0]) - phase])

        return numpy.concatenate([field_first.ravel(), field_second.ravel(),
                                  multiplier, gauge]), \
            (field_first, field_second, multiplier, n)

    def _linear_jacobian(self, m):
        n, a_count, phi_count, tau_count = self._sizes(m)
        h = self.line_grid.spacing
        dt = 1.0 / m
        rows = []
        cols = []
        data = []

        def a_index(i, j):
            # i is the node row, 1..n-2
            return (i - 1) * m + j

        def phi_index(i, j):
            return a_count + i * m + numpy.mod(j, m)

        def tau_index(i):
            return a_count + phi_count + i

        def add(row, col, value):
            rows.append(numpy.ravel(row))
            cols.append(numpy.ravel(col))
            data.append(numpy.broadcast_to(value, numpy.shape(numpy.ravel(
                row))).astype(float))

        half_rows, columns = numpy.meshgrid(numpy.arange(n - 1),
                                            numpy.arange(m), indexing="ij")
        first_rows = half_rows * m + columns

        # d_s a at the half rows, the boundary nodes are data
        upper = half_rows + 1 <= n - 2
        add(first_rows[upper], a_index(half_rows[upper] + 1,
                                       columns[upper]), 1.0 / h)
        lower = half_rows >= 1
        add(first_rows[lower], a_index(half_rows[lower], columns[lower]),
            -1.0 / h)
        # - d_t phi
        add(first_rows, phi_index(half_rows, columns), -1.0 / dt)
        add(first_rows, phi_index(half_rows, columns - 1), 1.0 / dt)
        # + tau
        add(first_rows, tau_index(half_rows), 1.0)

        offset = (n - 1) * m
        nodes, columns = numpy.meshgrid(numpy.arange(1, n - 1),
                                        numpy.arange(m), indexing="ij")
        second_rows = offset + (nodes - 1) * m + columns
        add(second_rows, phi_index(nodes, columns), 1.0 / h)
        add(second_rows, phi_index(nodes - 1, columns), -1.0 / h)
        add(second_rows, a_index(nodes, numpy.mod(columns + 1, m)), 1.0 / dt)
        add(second_rows, a_index(nodes, columns), -1.0 / dt)

        offset += (n - 2) * m
        if self.epsilon > 0:
            inner = numpy.arange(n - 2)
            add(offset + inner, tau_index(inner + 1), self.epsilon / h)
            add(offset + inner, tau_index(inner), -self.epsilon / h)

        offset += n - 2
        add(numpy.full(m, offset), phi_index(0, numpy.arange(m)), 1.0 / m)

        size = a_count + phi_count + tau_count
        return scipy.sparse.csr_matrix(
            (numpy.concatenate(data),
             (numpy.concatenate(rows), numpy.concatenate(cols))),
            shape=(size, size)
        )

    def _nonlinear_jacobian(self, x, m):
        n, a_count, phi_count, tau_count = self._sizes(m)
        a_inner, _, _ = self._split(x, m)
        size = a_count + phi_count + tau_count
        offset = (n - 1) * m + (n - 2) * m
        rows = offset + numpy.repeat(numpy.arange(n - 2), m)
        cols = numpy.arange(a_count)
        return scipy.sparse.csr_matrix(
            (numpy.exp(a_inner).ravel() / m, (rows, cols)),
            shape=(size, size)
        )

    def _initial_guess(self, left, right, winding, m):
        """linear interpolation of the boundary loops in s
        """
        n = self.line_grid.point_count
        h = self.line_grid.spacing
        weights = numpy.linspace(0.0, 1.0, n)[:, numpy.newaxis]
        a = (1.0 - weights) * left.r_values + weights * right.r_values

        left_phi = _cell_average_t(left.periodic_part)
        right_phi = _cell_average_t(right.periodic_part)
        right_phi = right_phi - numpy.mean(right_phi) + numpy.mean(left_phi)
        half_weights = 0.5 * (weights[1:] + weights[:-1])
        phi = (1.0 - half_weights) * left_phi + half_weights * right_phi

        tau = winding - numpy.mean(a[1:] - a[:-1], axis=1) / h
        return numpy.concatenate([a[1:-1].ravel(), phi.ravel(), tau])

    def solve(self, boundary_loop_minus, boundary_loop_plus, winding=None,
              initial=None):
        """returns the ``(CylinderMap, MultiplierPath)`` of the segment

        :param initial: Optional ``(CylinderMap, MultiplierPath)`` to start
          Newton from, the boundary interpolation when skipped.
        """
        left, right = boundary_loop_minus, boundary_loop_plus
        if left.circle != right.circle:
            raise GridError("the boundary loops should share the circle "
                            "grid")
        if winding is None:
            winding = left.winding
        if left.winding != winding or right.winding != winding:
            raise WindingError(
                "the boundary loops have windings %s and %s, expected %s" %
                (left.winding, right.winding, winding)
            )

        m = left.circle.point_count
        phase = float(numpy.mean(left.periodic_part))

        if initial is None:
            x = self._initial_guess(left, right, winding, m)
        else:
            x = self._from_nodes(initial[0], initial[1], m)

        linear = self._linear_jacobian(m)
        history = []

        for iteration in range(self.max_iter + 1):
            residual, parts = self._residual(x, left.r_values,
                                             right.r_values, winding, phase,
                                             m)
            if not numpy.all(numpy.isfinite(residual)):
                raise NonFiniteError(
                    "non finite flow residual at iteration %s" % iteration,
                    diagnostics={"residual_history": history}
                )
            norm = float(numpy.max(numpy.abs(residual)))
            history.append(norm)
            logger.debug("flow newton iteration %s residual %s" %
                         (iteration, norm))

            if norm <= self.tol:
                return self._finish(x, left, right, winding, m, iteration,
                                    history, parts)
            if iteration == self.max_iter:
                break

            jacobian = (linear + self._nonlinear_jacobian(x, m)).tocsc()
            step = scipy.sparse.linalg.spsolve(jacobian, residual)
            if not numpy.all(numpy.isfinite(step)):
                raise SingularSystemError(
                    "the flow Jacobian is singular at iteration %s" %
                    iteration,
                    diagnostics={"residual_history": history}
                )
            x = x - step

        raise ConvergenceError(
            "the flow segment did not converge in %s iterations" %
            self.max_iter,
            diagnostics={"residual_history": history}
        )

    def _from_nodes(self, cylinder, tau, m):
        phi = cylinder.periodic_part
        phi_cells = 0.5 * (phi[1:] + phi[:-1])
        phi_cells = _cell_average_t(phi_cells)
        tau_values = tau.values if isinstance(tau, (MultiplierPath,
                                                    GridFunction)) else tau
        tau_half = 0.5 * (tau_values[1:] + tau_values[:-1])
        return numpy.concatenate([cylinder.a[1:-1].ravel(),
                                  phi_cells.ravel(), tau_half])

    def _finish(self, x, left, right, winding, m, iteration, history, parts):
        n = self.line_grid.point_count
        h = self.line_grid.spacing
        dt = 1.0 / m
        a_inner, phi, tau_half = self._split(x, m)
        a = numpy.vstack([left.r_values, a_inner, right.r_values])

        # ghost rows from d_s phi + d_t a = 0 at the two boundary nodes
        a_t = (numpy.roll(a, -1, axis=1) - a) / dt
        phi_rows = numpy.empty((n, m))
        phi_rows[1:-1] = 0.5 * (phi[1:] + phi[:-1])
        phi_rows[0] = phi[0] + 0.5 * h * a_t[0]
        phi_rows[-1] = phi[-1] - 0.5 * h * a_t[-1]
        phi_nodes = 0.5 * (phi_rows + numpy.roll(phi_rows, 1, axis=1))
        theta = phi_nodes + winding * left.circle.points

        tau = numpy.empty(n)
        tau[1:-1] = 0.5 * (tau_half[1:] + tau_half[:-1])
        tau[0], tau[-1] = self._boundary_tau(tau_half, a, h)

        field_first, field_second, multiplier, _ = parts
        field_norm = float(max(numpy.max(numpy.abs(field_first)),
                               numpy.max(numpy.abs(field_second),
                                         initial=0.0)))
        multiplier_norm = float(numpy.max(numpy.abs(multiplier),
                                          initial=0.0))
        cylinder = CylinderMap(self.line_grid, left.circle, a, theta,
                               winding)
        tau = MultiplierPath(GridFunction(self.line_grid, tau))
        nodal = grad1_residual(cylinder, tau, epsilon=self.epsilon)
        self.diagnostics = FlowSegmentDiagnostics(
            iterations=iteration,
            residual_history=history,
            solver_residual_Linf=history[-1],
            residual_Linf=nodal.Linf,
            field_Linf=field_norm,
            multiplier_Linf=multiplier_norm if self.epsilon > 0 else None,
            constraint_Linf=multiplier_norm if self.epsilon == 0 else None,
            epsilon=self.epsilon,
        )
        return cylinder, tau

    def _boundary_tau(self, tau_half, a, h):
        """tau at the two boundary nodes, from ``eps d_s tau + mean H = 0``
        at the nodes when ``eps > 0``
        """
        if self.epsilon > 0:
            mean_h = numpy.mean(numpy.expm1(a[[0, -1]]), axis=1)
            step = 0.5 * h * mean_h / self.epsilon
            return tau_half[0] + step[0], tau_half[-1] - step[1]
        if tau_half.size < 3:
            return (1.5 * tau_half[0] - 0.5 * tau_half[1],
                    1.5 * tau_half[-1] - 0.5 * tau_half[-2])
        first = (15.0 * tau_half[0] - 10.0 * tau_half[1] +
                 3.0 * tau_half[2]) / 8.0
        last = (15.0 * tau_half[-1] - 10.0 * tau_half[-2] +
                3.0 * tau_half[-3]) / 8.0
        return first, last


def _cell_average_t(values):
    """averages periodic samples at ``t_j`` and ``t_{j+1}`` onto
    ``t_{j+1/2}``
    """
    return 0.5 * (values + numpy.roll(values, -1, axis=-1))


def solve_flow_segment(boundary_loop_minus, boundary_loop_plus, winding=None,
                       epsilon=1.0, half_width=None, line_points=None,
                       tol=None, max_iter=None, initial=None,
                       return_diagnostics=False):
    """solves the first flow equation between two boundary loops

    See :class:`FlowSegmentSolver` for the discretization. Grid sizes not
    given fall back to ``flow_half_width`` and ``flow_line_points``.

    :returns: ``(CylinderMap, MultiplierPath)``, and the
      :data:`FlowSegmentDiagnostics` as a third item when
      ``return_diagnostics`` is True.
    """
    from rabinowitzLab import conf
    line = LineGrid(conf.value_or_default(half_width, "flow_half_width"),
                    conf.value_or_default(line_points, "flow_line_points"))
    solver = FlowSegmentSolver(line, epsilon=epsilon, tol=tol,
                               max_iter=max_iter)
    cylinder, tau = solver.solve(boundary_loop_minus, boundary_loop_plus,
                                 winding=winding, initial=initial)
    if return_diagnostics:
        return cylinder, tau, solver.diagnostics
    return cylinder, tau


def perturbed_boundary_loops(circle, winding, delta, normalize=True):
    """the critical loop of the given winding with ``a = -delta sin(2 pi t)``
    at ``s = -S`` and ``a = +delta sin(2 pi t)`` at ``s = S``

    :param normalize: Shift both loops into the constraint hypersurface.
    """
    base = numpy.sin(2.0 * numpy.pi * circle.points)
    loops = []
    for sign in (-1.0, 1.0):
        loop = LoopInSymplectization(circle, sign * delta * base,
                                     winding * circle.points, winding)
        if normalize:
            loop = loop.translated(symplectization.sigma_shift(loop))
        loops.append(loop)
    return tuple(loops)
