# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause
"""
Kazdan-Warner solver
====================

Solves the boundary value problem

    rho'' = 1 - exp(-rho) - b,    rho(-S) = rho(S) = boundary_value

for a nonnegative forcing ``b`` on a
:class:`~rabinowitzLab.models.grid.LineGrid` and checks the a priori
estimates its solutions are known to satisfy.

The map ``F_b(rho) = rho'' + exp(-rho) - 1 + b`` is evaluated by
:func:`kw_residual`, its derivative ``D_rho xi = xi'' - exp(-rho) xi`` by
:func:`kw_linearize`. :func:`newton_solve` iterates full Newton steps,
:func:`continuation_solve` walks the family ``r*b`` from ``r = 0`` to
``r = 1`` seeding every solve with the previous answer, and
:func:`relaxation_solve` is an independent semi-implicit pseudo time
iteration used as an oracle for both.

A typical session::

  from rabinowitzLab.models import grid, kazdan_warner

  line = grid.LineGrid(20, 2001)
  profile = kazdan_warner.BumpProfile([{"center": 0, "width": 1,
                                        "mass": 0.5}])
  problem = kazdan_warner.KWProblem(profile.to_grid_function(line))
  solution = kazdan_warner.continuation_solve(problem)
  kazdan_warner.check_pointwise_bounds(solution, problem)["passed"]

"""

import logging

import numpy
import scipy.linalg
import scipy.sparse

from rabinowitzLab.models import grid as grid_module
from rabinowitzLab.models.errors import (ConvergenceError, GridError,
                                         NonFiniteError, SingularSystemError)
from rabinowitzLab.models.grid import GridFunction, LineGrid

logger = logging.getLogger(__name__)


TWO_LN_TWO = 2.0 * numpy.log(2.0)


class BumpProfile(object):
    """A forcing term made of Gaussian bumps.

    Every bump is a dictionary with the ``center``, ``width`` and ``mass``
    keys and contributes ``mass * exp(-((s - center)/width)**2) /
    (width * sqrt(pi))``, so its integral over the real line is ``mass``.

    This is also the b-spec JSON format of the command line tool, either a
    list of bumps or a dictionary with a ``bumps`` key. An empty list is the
    zero forcing.

    :param bumps: A list of bump dictionaries.
    """

    def __init__(self, bumps=None):
        if bumps is None:
            bumps = []
        self._bumps = self._validate_bumps(bumps)

    def _validate_bumps(self, bumps):
        """validates the given bumps
        """
        if isinstance(bumps, dict):
            bumps = bumps.get("bumps", [])

        if not isinstance(bumps, (list, tuple)):
            raise TypeError("BumpProfile.bumps should be a list of "
                            "dictionaries not %s" % bumps.__class__.__name__)

        validated = []
        for bump in bumps:
            if not isinstance(bump, dict):
                raise TypeError("BumpProfile.bumps should contain "
                                "dictionaries not %s" %
                                bump.__class__.__name__)
            for key in ("center", "width", "mass"):
                if key not in bump:
                    raise ValueError("BumpProfile.bumps entries should have "
                                     "a %s key" % key)
            center = float(bump["center"])
            width = float(bump["width"])
            mass = float(bump["mass"])
            if width <= 0:
                raise ValueError("BumpProfile bump width should be positive")
            if mass < 0:
                raise ValueError("BumpProfile bump mass should be "
                                 "nonnegative")
            validated.append({"center": center, "width": width,
                              "mass": mass})
        return validated

    @property
    def bumps(self):
        return [dict(bump) for bump in self._bumps]

    @property
    def mass(self):
        """The analytic L1 norm of the profile on the whole line
        """
        return float(sum(bump["mass"] for bump in self._bumps))

    def __call__(self, s):
        s = numpy.asarray(s, dtype=float)
        values = numpy.zeros_like(s)
        for bump in self._bumps:
            z = (s - bump["center"]) / bump["width"]
            values = values + bump["mass"] * numpy.exp(-z * z) / \
                (bump["width"] * numpy.sqrt(numpy.pi))
        return values

    def scaled(self, factor):
        """returns a new profile with every mass multiplied by factor
        """
        return BumpProfile([
            {"center": bump["center"], "width": bump["width"],
             "mass": factor * bump["mass"]}
            for bump in self._bumps
        ])

    def to_grid_function(self, grid):
        return GridFunction.from_callable(grid, self)

    def to_dict(self):
        return {"bumps": self.bumps}

    @classmethod
    def from_dict(cls, data):
        return cls(data)

    def __repr__(self):
        return "<BumpProfile mass=%s bumps=%s>" % (self.mass,
                                                  len(self._bumps))


def random_bump_profile(rng, mass_range=(0.1, 4.0), max_bumps=3,
                        center_range=(-5.0, 5.0), width_range=(0.5, 2.0)):
    """returns a :class:`BumpProfile` with a random total mass drawn
    uniformly from ``mass_range``, split between one to ``max_bumps`` bumps

    :param rng: A numpy random Generator, see
      :func:`rabinowitzLab.utils.make_rng`.
    """
    total_mass = rng.uniform(*mass_range)
    count = int(rng.integers(1, max_bumps + 1))
    weights = rng.dirichlet(numpy.ones(count))
    bumps = []
    for weight in weights:
        bumps.append({
            "center": float(rng.uniform(*center_range)),
            "width": float(rng.uniform(*width_range)),
            "mass": float(total_mass * weight),
        })
    return BumpProfile(bumps)


class KWProblem(object):
    """The data of one Kazdan-Warner boundary value problem.

    :param b: A nonnegative :class:`~rabinowitzLab.models.grid.GridFunction`.
      Samples below ``-kw_bound_tol`` raise a ValueError.

    :param grid: Optional, must be the grid of ``b`` when given.

    :param boundary_value: The Dirichlet value of rho at both ends,
      defaults to 0.
    """

    def __init__(self, b, grid=None, boundary_value=0.0):
        self._b = self._validate_b(b)
        self._grid = self._validate_grid(grid)
        self._boundary_value = self._validate_boundary_value(boundary_value)

    def _validate_b(self, b):
        """validates the given b value
        """
        from rabinowitzLab import conf

        if not isinstance(b, GridFunction):
            raise TypeError("KWProblem.b should be a GridFunction instance "
                            "not %s" % b.__class__.__name__)
        if not numpy.all(numpy.isfinite(b.values)):
            raise ValueError("KWProblem.b should be finite")
        if numpy.min(b.values) < -conf.kw_bound_tol:
            raise ValueError("KWProblem.b should be nonnegative, its minimum "
                             "is %s" % numpy.min(b.values))
        return b

    def _validate_grid(self, grid):
        """validates the given grid value
        """
        if grid is None:
            return self._b.grid
        if not isinstance(grid, LineGrid):
            raise TypeError("KWProblem.grid should be a LineGrid instance "
                            "not %s" % grid.__class__.__name__)
        if grid != self._b.grid:
            raise GridError("KWProblem.grid should be the grid of b")
        return grid

    def _validate_boundary_value(self, boundary_value):
        """validates the given boundary_value
        """
        if isinstance(boundary_value, bool) or \
           not isinstance(boundary_value, (int, float, numpy.integer,
                                           numpy.floating)):
            raise TypeError("KWProblem.boundary_value should be a real number "
                            "not %s" % boundary_value.__class__.__name__)
        return float(boundary_value)

    @property
    def b(self):
        return self._b

    @property
    def grid(self):
        return self._grid

    @property
    def boundary_value(self):
        return self._boundary_value

    @property
    def b_l1(self):
        """The L1 norm of b by trapezoid quadrature
        """
        return grid_module.integrate_line(
            self._b.with_values(numpy.abs(self._b.values))
        )

    def scaled(self, factor):
        """returns the homotopy problem with forcing ``factor * b``
        """
        return KWProblem(self._b * float(factor), self._grid,
                         self._boundary_value)

    def __repr__(self):
        return "<KWProblem %r |b|=%s>" % (self._grid, self.b_l1)


class KWSolution(object):
    """A converged solution together with its convergence diagnostics.

    :param rho: The solution as a GridFunction.
    :param newton_iterations: Newton iterations spent, summed over all
      continuation steps.
    :param final_residual_Linf: The max norm of :func:`kw_residual` at rho.
    :param continuation_steps: Accepted continuation steps, 0 for a plain
      Newton solve.
    :param clamp_events: How many times an exponent had to be clamped.
    :param residual_history: The residual max norms of the last solve.
    """

    def __init__(self, rho, newton_iterations=0, final_residual_Linf=0.0,
                 continuation_steps=0, clamp_events=0,
                 residual_history=None):
        if not isinstance(rho, GridFunction):
            raise TypeError("KWSolution.rho should be a GridFunction "
                            "instance not %s" % rho.__class__.__name__)
        self.rho = rho
        self.newton_iterations = int(newton_iterations)
        self.final_residual_Linf = float(final_residual_Linf)
        self.continuation_steps = int(continuation_steps)
        self.clamp_events = int(clamp_events)
        if residual_history is None:
            residual_history = []
        self.residual_history = [float(value) for value in residual_history]

    def to_dict(self):
        return {
            "newton_iterations": self.newton_iterations,
            "final_residual_Linf": self.final_residual_Linf,
            "continuation_steps": self.continuation_steps,
            "clamp_events": self.clamp_events,
            "residual_history": list(self.residual_history),
        }

    def __repr__(self):
        return "<KWSolution iterations=%s residual=%s>" % (
            self.newton_iterations, self.final_residual_Linf
        )


class TridiagonalOperator(object):
    """A tridiagonal matrix stored as three diagonals of equal length.

    Row ``i`` reads ``lower[i]*x[i-1] + diagonal[i]*x[i] + upper[i]*x[i+1]``,
    ``lower[0]`` and ``upper[-1]`` are ignored.
    """

    def __init__(self, lower, diagonal, upper, grid=None):
        self.diagonal = numpy.array(diagonal, dtype=float)
        self.lower = numpy.array(lower, dtype=float)
        self.upper = numpy.array(upper, dtype=float)
        size = self.diagonal.shape[0]
        if self.lower.shape != (size,) or self.upper.shape != (size,):
            raise ValueError("TridiagonalOperator diagonals should have the "
                             "same length")
        self.lower[0] = 0.0
        self.upper[-1] = 0.0
        self.grid = grid

    @property
    def size(self):
        return self.diagonal.shape[0]

    def dot(self, x):
        """returns the product of this operator with the array x
        """
        x = numpy.asarray(x, dtype=float)
        result = self.diagonal * x
        result[1:] += self.lower[1:] * x[:-1]
        result[:-1] += self.upper[:-1] * x[1:]
        return result

    def to_sparse(self):
        return scipy.sparse.diags(
            [self.lower[1:], self.diagonal, self.upper[:-1]], [-1, 0, 1],
            format="csr"
        )

    def to_dense(self):
        return self.to_sparse().toarray()

    def to_banded(self):
        """returns the ``(1, 1)`` banded storage scipy.linalg.solve_banded
        expects
        """
        ab = numpy.zeros((3, self.size))
        ab[0, 1:] = self.upper[:-1]
        ab[1] = self.diagonal
        ab[2, :-1] = self.lower[1:]
        return ab


def _exp_minus(values, clamp=None):
    """returns exp(-values) after clamping values to [-clamp, clamp] and the
    number of clamped samples
    """
    from rabinowitzLab import conf
    clamp = conf.value_or_default(clamp, "kw_clamp")
    clipped = numpy.clip(values, -clamp, clamp)
    clamp_events = int(numpy.count_nonzero(clipped != values))
    if clamp_events:
        logger.warning("clamped %s exponent arguments to +-%s" %
                       (clamp_events, clamp))
    return numpy.exp(-clipped), clamp_events


def _residual_values(rho_values, problem, clamp=None):
    grid = problem.grid
    exp_minus, clamp_events = _exp_minus(rho_values, clamp)
    residual = grid_module.second_derivative_values(rho_values, grid,
                                                    boundary="zero")
    residual[1:-1] += exp_minus[1:-1] - 1.0 + problem.b.values[1:-1]
    residual[0] = rho_values[0] - problem.boundary_value
    residual[-1] = rho_values[-1] - problem.boundary_value
    return residual, clamp_events


def kw_residual(rho, problem):
    """returns ``F_b(rho) = rho'' + exp(-rho) - 1 + b`` at the interior points
    and ``rho(+-S) - boundary_value`` at the two ends

    :param rho: A :class:`~rabinowitzLab.models.grid.GridFunction` on the
      grid of the problem.
    :param problem: A :class:`KWProblem` instance.
    """
    grid_module.check_same_grid(rho, problem.b)
    residual, _ = _residual_values(rho.values, problem)
    return rho.with_values(residual)


def kw_linearize(rho, clamp=None):
    """returns ``D_rho xi = xi'' - exp(-rho) xi`` as a
    :class:`TridiagonalOperator` with identity rows at both ends
    """
    grid = rho.grid
    n = grid.point_count
    h2 = grid.spacing ** 2
    exp_minus, _ = _exp_minus(rho.values, clamp)

    lower = numpy.full(n, 1.0 / h2)
    upper = numpy.full(n, 1.0 / h2)
    diagonal = -2.0 / h2 - exp_minus

    diagonal[0] = diagonal[-1] = 1.0
    lower[0] = upper[0] = 0.0
    lower[-1] = upper[-1] = 0.0
    return TridiagonalOperator(lower, diagonal, upper, grid=grid)


def solve_tridiagonal(operator, rhs, method="thomas"):
    """solves ``operator * x = rhs``

    :param operator: A :class:`TridiagonalOperator`.
    :param rhs: A GridFunction or an array of matching length. The result is
      of the same kind.
    :param method: ``"thomas"`` for the plain Thomas algorithm, which raises
      :class:`~rabinowitzLab.models.errors.SingularSystemError` on a zero
      pivot, or ``"banded"`` for scipy.linalg.solve_banded.
    """
    values = rhs.values if isinstance(rhs, GridFunction) else \
        numpy.asarray(rhs, dtype=float)
    if values.shape != (operator.size,):
        raise ValueError("rhs should have %s entries" % operator.size)

    if method == "banded":
        try:
            solution = scipy.linalg.solve_banded((1, 1), operator.to_banded(),
                                                 values)
        except numpy.linalg.LinAlgError as err:
            raise SingularSystemError(str(err))
    elif method == "thomas":
        solution = _thomas(operator.lower, operator.diagonal, operator.upper,
                           values)
    else:
        raise ValueError("method should be one of 'thomas' or 'banded' not "
                         "%s" % method)

    if isinstance(rhs, GridFunction):
        return rhs.with_values(solution)
    return solution


def _thomas(lower, diagonal, upper, rhs):
    n = diagonal.shape[0]
    c_prime = numpy.zeros(n)
    d_prime = numpy.zeros(n)
    tiny = numpy.finfo(float).tiny

    pivot = diagonal[0]
    if abs(pivot) <= tiny:
        raise SingularSystemError("zero pivot at row 0",
                                  diagnostics={"row": 0})
    c_prime[0] = upper[0] / pivot
    d_prime[0] = rhs[0] / pivot
    for i in range(1, n):
        pivot = diagonal[i] - lower[i] * c_prime[i - 1]
        if abs(pivot) <= tiny:
            raise SingularSystemError("zero pivot at row %s" % i,
                                      diagnostics={"row": i})
        c_prime[i] = upper[i] / pivot
        d_prime[i] = (rhs[i] - lower[i] * d_prime[i - 1]) / pivot

    x = numpy.zeros(n)
    x[-1] = d_prime[-1]
    for i in range(n - 2, -1, -1):
        x[i] = d_prime[i] - c_prime[i] * x[i + 1]
    return x


def newton_solve(problem, rho0=None, tol=None, max_iter=None):
    """solves the problem by full Newton steps ``rho <- rho - D_rho^{-1}
    F_b(rho)``

    :param problem: A :class:`KWProblem`.
    :param rho0: The initial guess, zero when skipped.
    :param tol: The max norm of the residual to reach, ``kw_newton_tol``
      when skipped.
    :param max_iter: ``kw_max_iter`` when skipped.

    Raises :class:`~rabinowitzLab.models.errors.ConvergenceError` when
    max_iter is exceeded and
    :class:`~rabinowitzLab.models.errors.NonFiniteError` when the iteration
    produces inf or nan. The residual history is in the diagnostics.
    """
    from rabinowitzLab import conf

    tol = conf.value_or_default(tol, "kw_newton_tol")
    max_iter = conf.value_or_default(max_iter, "kw_max_iter")
    if tol <= 0:
        raise ValueError("tol should be positive")

    if rho0 is None:
        rho0 = GridFunction.zeros(problem.grid)
    grid_module.check_same_grid(rho0, problem.b)

    rho_values = numpy.array(rho0.values)
    history = []
    clamp_events = 0

    for iteration in range(max_iter + 1):
        residual, clamps = _residual_values(rho_values, problem)
        clamp_events += clamps
        if not numpy.all(numpy.isfinite(residual)):
            raise NonFiniteError(
                "non finite residual at iteration %s" % iteration,
                diagnostics={"residual_history": history,
                             "clamp_events": clamp_events}
            )
        norm = float(numpy.max(numpy.abs(residual)))
        history.append(norm)
        logger.debug("newton iteration %s residual %s" % (iteration, norm))

        if norm <= tol:
            return KWSolution(
                rho0.with_values(rho_values),
                newton_iterations=iteration,
                final_residual_Linf=norm,
                continuation_steps=0,
                clamp_events=clamp_events,
                residual_history=history,
            )

        if iteration == max_iter:
            break

        operator = kw_linearize(rho0.with_values(rho_values))
        step = solve_tridiagonal(operator, residual)
        rho_values = rho_values - step

        if not numpy.all(numpy.isfinite(rho_values)):
            raise NonFiniteError(
                "non finite iterate at iteration %s" % iteration,
                diagnostics={"residual_history": history,
                             "clamp_events": clamp_events}
            )

    raise ConvergenceError(
        "Newton did not converge in %s iterations" % max_iter,
        diagnostics={"residual_history": history,
                     "clamp_events": clamp_events}
    )


def continuation_solve(problem, tol=None, rho0=None, initial_step=None,
                       max_step=None, growth=None, min_step=None,
                       max_iter=None):
    """solves the family ``rho'' = 1 - exp(-rho) - r*b`` for r stepping from
    0 to 1 and returns the ``r = 1`` solution

    The first step tries to reach ``r = 1`` at once. A failed Newton solve
    halves the step, an accepted one seeds the next solve and grows the step
    by ``growth``, capped at ``max_step``. A step smaller than ``min_step``
    raises :class:`~rabinowitzLab.models.errors.ConvergenceError`.
    """
    from rabinowitzLab import conf

    step = conf.value_or_default(initial_step, "continuation_initial_step")
    max_step = conf.value_or_default(max_step, "continuation_max_step")
    growth = conf.value_or_default(growth, "continuation_growth")
    min_step = conf.value_or_default(min_step, "continuation_min_step")

    start = newton_solve(problem.scaled(0.0), rho0=rho0, tol=tol,
                         max_iter=max_iter)
    rho = start.rho
    total_iterations = start.newton_iterations
    clamp_events = start.clamp_events
    accepted_steps = 0
    current = 0.0
    history = []
    last = start

    while current < 1.0:
        target = min(1.0, current + step)
        try:
            last = newton_solve(problem.scaled(target), rho0=rho, tol=tol,
                                max_iter=max_iter)
        except ConvergenceError as err:
            step *= 0.5
            history.append({"r": target, "accepted": False})
            logger.warning("continuation step to r=%s failed, halving the "
                           "step to %s" % (target, step))
            if step < min_step:
                history_values = err.diagnostics.get("residual_history", [])
                raise ConvergenceError(
                    "continuation step underflow at r=%s" % current,
                    diagnostics={"r": current, "step": step,
                                 "steps": history,
                                 "residual_history": history_values}
                )
            continue

        total_iterations += last.newton_iterations
        clamp_events += last.clamp_events
        accepted_steps += 1
        history.append({"r": target, "accepted": True})
        logger.debug("continuation reached r=%s with step %s" %
                     (target, step))
        current = target
        rho = last.rho
        step = min(step * growth, max_step)

    return KWSolution(
        rho,
        newton_iterations=total_iterations,
        final_residual_Linf=last.final_residual_Linf,
        continuation_steps=accepted_steps,
        clamp_events=clamp_events,
        residual_history=last.residual_history,
    )


def relaxation_solve(problem, tol=None, dt=None, max_sweeps=None,
                     rho0=None):
    """solves the problem by the pseudo time iteration

        (I - dt*L) rho_next = rho + dt*(exp(-rho) - 1 + b)

    with ``L`` the Dirichlet Laplacian, until the max norm of
    :func:`kw_residual` drops below tol. Being implicit in the linear part it
    does not suffer the ``h**2`` step restriction of explicit relaxation, and
    it shares nothing with Newton but the residual, so it serves as an
    independent oracle.
    """
    from rabinowitzLab import conf

    tol = conf.value_or_default(tol, "kw_newton_tol")
    dt = conf.value_or_default(dt, "kw_relaxation_step")
    max_sweeps = conf.value_or_default(max_sweeps,
                                       "kw_relaxation_max_sweeps")

    grid = problem.grid
    n = grid.point_count
    h2 = grid.spacing ** 2

    ab = numpy.zeros((3, n))
    ab[0, 2:] = -dt / h2
    ab[1, 1:-1] = 1.0 + 2.0 * dt / h2
    ab[1, 0] = ab[1, -1] = 1.0
    ab[2, :-2] = -dt / h2

    if rho0 is None:
        rho0 = GridFunction.zeros(grid)
    rho_values = numpy.array(rho0.values)
    clamp_events = 0
    norm = float("inf")

    for sweep in range(max_sweeps + 1):
        residual, clamps = _residual_values(rho_values, problem)
        clamp_events += clamps
        norm = float(numpy.max(numpy.abs(residual)))
        if not numpy.isfinite(norm):
            raise NonFiniteError("non finite residual in relaxation sweep "
                                 "%s" % sweep)
        if norm <= tol:
            logger.debug("relaxation converged in %s sweeps" % sweep)
            return KWSolution(rho0.with_values(rho_values),
                              newton_iterations=sweep,
                              final_residual_Linf=norm,
                              clamp_events=clamp_events,
                              residual_history=[norm])
        if sweep == max_sweeps:
            break

        exp_minus, _ = _exp_minus(rho_values)
        rhs = rho_values + dt * (exp_minus - 1.0 + problem.b.values)
        rhs[0] = rhs[-1] = problem.boundary_value
        rho_values = scipy.linalg.solve_banded((1, 1), ab, rhs)

    raise ConvergenceError(
        "relaxation did not converge in %s sweeps" % max_sweeps,
        diagnostics={"residual": norm, "clamp_events": clamp_events}
    )


def lemma_bound(b_l1):
    """``max(2 ln 2, 4*||b||_1**2)``, the upper bound of every solution
    """
    return max(TWO_LN_TWO, 4.0 * float(b_l1) ** 2)


def convexity_constant(kappa):
    """``c1 = kappa/(1 - exp(-kappa))``, the smallest constant with
    ``x <= c1*(1 - exp(-x))`` on ``[0, kappa]``
    """
    return float(kappa / (-numpy.expm1(-kappa)))


def check_pointwise_bounds(sol, problem, tol=None):
    """returns a report dictionary comparing rho with
    ``0 <= rho <= max(2 ln 2, 4*||b||_1**2)`` and ``|rho'|`` with
    ``||b||_1``
    """
    from rabinowitzLab import conf
    tol = conf.value_or_default(tol, "kw_bound_tol")

    rho = sol.rho
    b_l1 = problem.b_l1
    upper = lemma_bound(b_l1)
    min_rho = float(numpy.min(rho.values))
    max_rho = float(numpy.max(rho.values))
    max_slope = float(numpy.max(numpy.abs(
        grid_module.derivative_values(rho.values, rho.grid)
    )))
    # the slope bound holds in the continuum, allow the O(h**2) scheme error
    slope_tol = tol + rho.grid.spacing ** 2 * (1.0 + upper)

    lower_holds = min_rho >= -tol
    upper_holds = max_rho <= upper + tol
    slope_holds = max_slope <= b_l1 + slope_tol

    return {
        "min_rho": min_rho,
        "max_rho": max_rho,
        "lower_bound": 0.0,
        "upper_bound": upper,
        "b_l1": b_l1,
        "tol": tol,
        "lower_holds": bool(lower_holds),
        "upper_holds": bool(upper_holds),
        "max_abs_derivative": max_slope,
        "derivative_bound": b_l1,
        "derivative_holds": bool(slope_holds),
        "passed": bool(lower_holds and upper_holds),
    }


def energy_identity_residual(sol, problem, pointwise=False):
    """returns ``|int exp(-rho)(b + rho'**2) + int (1 - exp(-rho))**2 -
    ||b||_1|``

    :param pointwise: When True return a tuple of the residual and the
      GridFunction defect of ``(rho + exp(-rho))'' = (1 - exp(-rho))**2 +
      exp(-rho)(rho'**2 + b) - b``, the identity whose integral gives the
      energy identity. The defect is meaningful at interior points only.
    """
    rho = sol.rho
    grid = rho.grid
    b = problem.b.values
    exp_minus, _ = _exp_minus(rho.values)
    slope = grid_module.derivative_values(rho.values, grid)

    lhs = grid_module.integrate_line_values(exp_minus * (b + slope ** 2),
                                            grid) + \
        grid_module.integrate_line_values((1.0 - exp_minus) ** 2, grid)
    residual = float(abs(lhs - problem.b_l1))

    if not pointwise:
        return residual

    left = grid_module.second_derivative_values(rho.values + exp_minus, grid)
    right = (1.0 - exp_minus) ** 2 + exp_minus * (slope ** 2 + b) - b
    return residual, rho.with_values(left - right)


def _inequality(lhs, rhs, tol):
    return {
        "lhs": float(lhs),
        "rhs": float(rhs),
        "margin": float(rhs - lhs),
        "holds": bool(lhs <= rhs + tol),
    }


def w22_estimates(sol, problem, tol=1e-6):
    """returns the three component bounds of the W22 estimate

      * ``second_derivative``: ``||rho''||_2 <= sqrt(||b||_1) + ||b||_2``
      * ``l2``: ``||rho||_2**2 <= c1**2 ||b||_1`` with
        ``c1 = kappa/(1 - exp(-kappa))``, ``kappa = max(2 ln 2,
        4||b||_1**2)``
      * ``interpolation``: ``||rho'||_2**2 <= ||rho||_2 ||rho''||_2``

    each reported with both sides, the margin and a holds flag.
    """
    rho = sol.rho
    grid = rho.grid
    b_norms = grid_module.norms(problem.b)
    b_l1 = problem.b_l1
    kappa = lemma_bound(b_l1)
    c1 = convexity_constant(kappa)

    rho_l2 = numpy.sqrt(grid_module.integrate_line_values(rho.values ** 2,
                                                          grid))
    slope_l2_sq = grid_module.integrate_line_values(
        grid_module.derivative_values(rho.values, grid) ** 2, grid
    )
    curvature = grid_module.second_derivative_values(rho.values, grid)
    curvature_l2 = numpy.sqrt(
        grid_module.integrate_line_values(curvature ** 2, grid)
    )

    return {
        "kappa": kappa,
        "c1": c1,
        "b_l1": b_l1,
        "b_l2": b_norms.L2,
        "rho_W22": grid_module.norms(rho).W22,
        "second_derivative": _inequality(curvature_l2,
                                         numpy.sqrt(b_l1) + b_norms.L2, tol),
        "l2": _inequality(rho_l2 ** 2, c1 ** 2 * b_l1, tol),
        "interpolation": _inequality(slope_l2_sq, rho_l2 * curvature_l2,
                                     tol),
    }


def linearization_pairing(rho, xi):
    """returns the discrete pairing ``<D_rho xi, xi>`` and the coercivity
    bound ``-(||xi'||**2 + int exp(-rho) xi**2)`` for a ``xi`` vanishing at
    both ends

    With forward differences for ``xi'`` the two agree exactly (summation by
    parts), so the pairing is strictly negative for every nonzero xi.
    """
    grid_module.check_same_grid(rho, xi)
    values = xi.values
    if values[0] != 0.0 or values[-1] != 0.0:
        raise ValueError("xi should vanish at both ends")

    h = rho.grid.spacing
    operator = kw_linearize(rho)
    applied = operator.dot(values)
    pairing = h * float(numpy.dot(applied[1:-1], values[1:-1]))

    differences = numpy.diff(values)
    exp_minus, _ = _exp_minus(rho.values)
    bound = -(float(numpy.sum(differences ** 2)) / h +
              h * float(numpy.sum(exp_minus * values ** 2)))

    return {
        "pairing": pairing,
        "bound": bound,
        "defect": abs(pairing - bound),
        "negative": bool(pairing < 0.0),
    }
