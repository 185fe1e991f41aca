# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause
"""
Acceptance suite
================

The twelve numbered acceptance criteria run by ``rabinowitz-lab
verify-all``. Every criterion is a method of :class:`AcceptanceSuite`
returning a plain dict with at least ``number``, ``name`` and ``passed``.

The quick mode keeps the Kazdan-Warner grids but uses fewer random samples
and coarser cylinder grids. All randomness comes from one seeded generator
per criterion, so two runs with the same seed produce the same report.
Timings are logged, they are not part of the report.
"""

import logging
import time

import numpy

from rabinowitzLab.models import correspondence
from rabinowitzLab.models import flows
from rabinowitzLab.models import grid as grid_module
from rabinowitzLab.models import kazdan_warner
from rabinowitzLab.models import lagrange
from rabinowitzLab.models import loopspace
from rabinowitzLab.models import symplectization
from rabinowitzLab.models.errors import RabinowitzLabError
from rabinowitzLab.models.flows import CylinderMap
from rabinowitzLab.models.grid import CircleGrid, GridFunction, LineGrid
from rabinowitzLab.models.kazdan_warner import BumpProfile, KWProblem

logger = logging.getLogger(__name__)


FULL_SIZES = dict(
    kw_half_width=20.0,
    kw_points=2001,
    kw_fine_points=4001,
    forcing_count=20,
    synthetic_count=10,
    synthetic_grid=(401, 64),
    flow_half_width=5.0,
    flow_grids=((201, 32), (401, 64)),
    loop_count=20,
    loop_points=64,
)

QUICK_SIZES = dict(
    FULL_SIZES,
    forcing_count=5,
    synthetic_count=4,
    synthetic_grid=(101, 16),
    flow_grids=((101, 16), (201, 32)),
    loop_count=5,
)

CRITERIA = [
    (1, "kw_trivial_solve"),
    (2, "kw_pointwise_bounds"),
    (3, "kw_energy_identity"),
    (4, "kw_uniqueness"),
    (5, "kw_jacobian_consistency"),
    (6, "kw_continuation_robustness"),
    (7, "psi_phi_identity"),
    (8, "phi_psi_identity"),
    (9, "area_multiplier_and_monotonicity"),
    (10, "energy_equals_b_l1"),
    (11, "loop_space_laws"),
    (12, "epsilon_interpolation"),
]

FLOW_WINDING = 1
FLOW_PERTURBATION = 0.05


def synthetic_constrained_field(line, circle, winding, alpha, beta, gamma0,
                                center, width):
    """a field on the constraint hypersurface with nondecreasing loop areas,
    which is not a flow solution

    ``a = alpha sin(2 pi t + beta)`` shifted on every row into the
    constraint and ``theta = winding t - gamma(s)/(2 pi) cos(2 pi t + beta)``
    with ``gamma = gamma0 (1 + tanh((s - center)/width))``. The loop area is
    ``winding + gamma(s) I1(alpha)/I0(alpha)``.
    """
    s = line.points[:, numpy.newaxis]
    phase = 2.0 * numpy.pi * circle.points[numpy.newaxis, :] + beta
    a = alpha * numpy.sin(phase) * numpy.ones_like(s)
    a = a + symplectization.sigma_shift_values(a, axis=1)[:, numpy.newaxis]
    gamma = gamma0 * (1.0 + numpy.tanh((s - center) / width))
    theta = winding * circle.points[numpy.newaxis, :] - \
        gamma / (2.0 * numpy.pi) * numpy.cos(phase)
    return CylinderMap(line, circle, a, theta, winding)


class AcceptanceSuite(object):
    """Runs the acceptance criteria.

    :param quick: Use :data:`QUICK_SIZES` instead of :data:`FULL_SIZES`.
    :param seed: The base random seed, ``random_seed`` from the config when
      skipped. Criterion ``k`` draws from a generator seeded with
      ``seed + k``.
    """

    def __init__(self, quick=False, seed=None):
        from rabinowitzLab import conf
        self.quick = bool(quick)
        self.seed = int(conf.value_or_default(seed, "random_seed"))
        self.sizes = QUICK_SIZES if self.quick else FULL_SIZES
        self._segments = {}
        self._forcings = None

    @property
    def mode(self):
        return "quick" if self.quick else "full"

    def _rng(self, number):
        return numpy.random.default_rng(self.seed + number)

    # shared data
    def _kw_grid(self, points=None):
        return LineGrid(self.sizes["kw_half_width"],
                        points or self.sizes["kw_points"])

    def _random_forcings(self):
        if self._forcings is None:
            rng = self._rng(2)
            self._forcings = [
                kazdan_warner.random_bump_profile(rng, mass_range=(0.1, 4.0))
                for _ in range(self.sizes["forcing_count"])
            ]
        return self._forcings

    def _segment(self, epsilon, points, circle_points):
        """the cached flow segment ``(u, tau, diagnostics)``
        """
        key = (float(epsilon), points, circle_points)
        if key not in self._segments:
            circle = CircleGrid(circle_points)
            left, right = flows.perturbed_boundary_loops(
                circle, FLOW_WINDING, FLOW_PERTURBATION
            )
            logger.debug("solving flow segment eps=%s n=%s m=%s" % key)
            self._segments[key] = flows.solve_flow_segment(
                left, right, epsilon=epsilon,
                half_width=self.sizes["flow_half_width"], line_points=points,
                return_diagnostics=True
            )
        return self._segments[key]

    # criteria
    def kw_trivial_solve(self):
        problem = KWProblem(GridFunction.zeros(self._kw_grid()))
        solution = kazdan_warner.newton_solve(problem)
        rho_linf = float(numpy.max(numpy.abs(solution.rho.values)))
        return {
            "rho_Linf": rho_linf,
            "newton_iterations": solution.newton_iterations,
            "passed": rho_linf <= 1e-12 and solution.newton_iterations <= 2,
        }

    def kw_pointwise_bounds(self):
        grid = self._kw_grid()
        reports = []
        for profile in self._random_forcings():
            problem = KWProblem(profile.to_grid_function(grid))
            solution = kazdan_warner.continuation_solve(problem)
            reports.append(kazdan_warner.check_pointwise_bounds(solution,
                                                                problem))
        return {
            "forcings": len(reports),
            "reports": reports,
            "passed": all(report["passed"] for report in reports),
        }

    def kw_energy_identity(self):
        profile = BumpProfile([{"center": 0.0, "width": 1.0, "mass": 1.0}])
        residuals = []
        points = (self.sizes["kw_points"], self.sizes["kw_fine_points"])
        for n in points:
            problem = KWProblem(profile.to_grid_function(self._kw_grid(n)))
            solution = kazdan_warner.continuation_solve(problem)
            residuals.append(kazdan_warner.energy_identity_residual(
                solution, problem))
        ratio = residuals[0] / residuals[1] if residuals[1] > 0 else \
            float("inf")
        return {
            "points": list(points),
            "residuals": residuals,
            "ratio": ratio,
            "observed_order": grid_module.observed_order(*residuals),
            "passed": residuals[0] <= 1e-3 and 3.0 <= ratio <= 5.0,
        }

    def _second_initialization(self, problem):
        """a solve started from the parabola under the a priori bound,
        through the relaxation iteration
        """
        grid = problem.grid
        kappa = kazdan_warner.lemma_bound(problem.b_l1)
        start = grid.points / grid.half_width
        rho0 = GridFunction(grid, kappa * (1.0 - start ** 2))
        return kazdan_warner.relaxation_solve(problem, tol=1e-11, rho0=rho0)

    def kw_uniqueness(self):
        grid = self._kw_grid()
        distances = []
        for profile in self._random_forcings():
            problem = KWProblem(profile.to_grid_function(grid))
            first = kazdan_warner.continuation_solve(problem)
            second = self._second_initialization(problem)
            distances.append(grid_module.norms(first.rho - second.rho).Linf)
        return {
            "forcings": len(distances),
            "max_distance": max(distances),
            "passed": max(distances) <= 1e-8,
        }

    def kw_jacobian_consistency(self):
        rng = self._rng(5)
        grid = self._kw_grid()
        profile = BumpProfile([{"center": 1.0, "width": 1.5, "mass": 1.5}])
        problem = KWProblem(profile.to_grid_function(grid))
        rho = kazdan_warner.continuation_solve(problem).rho
        step = 1e-5
        errors = []
        for _ in range(5):
            direction = rng.uniform(-1.0, 1.0, grid.point_count)
            shifted = rho.with_values(rho.values + step * direction)
            difference = (kazdan_warner.kw_residual(shifted, problem).values -
                          kazdan_warner.kw_residual(rho, problem).values) / \
                step
            exact = kazdan_warner.kw_linearize(rho).dot(direction)
            errors.append(float(numpy.max(numpy.abs(difference - exact))))
        return {
            "step": step,
            "errors": errors,
            "passed": max(errors) <= 1e-5,
        }

    def kw_continuation_robustness(self):
        grid = self._kw_grid()
        profile = BumpProfile([{"center": 0.0, "width": 0.5, "mass": 4.0}])
        problem = KWProblem(profile.to_grid_function(grid))
        try:
            kazdan_warner.newton_solve(problem)
            cold_converged = True
        except RabinowitzLabError as err:
            logger.debug("cold newton failed: %s" % err)
            cold_converged = False
        solution = kazdan_warner.continuation_solve(problem)
        bounds = kazdan_warner.check_pointwise_bounds(solution, problem)
        energy = kazdan_warner.energy_identity_residual(solution, problem)
        other = self._second_initialization(problem)
        distance = grid_module.norms(solution.rho - other.rho).Linf
        return {
            "b_l1": problem.b_l1,
            "cold_newton_converged": cold_converged,
            "continuation": solution.to_dict(),
            "bounds": bounds,
            "energy_residual": energy,
            "uniqueness_distance": distance,
            "passed": bounds["passed"] and energy <= 1e-3 and
            distance <= 1e-8,
        }

    def psi_phi_identity(self):
        rng = self._rng(7)
        n, m = self.sizes["synthetic_grid"]
        line = LineGrid(self.sizes["flow_half_width"], n)
        circle = CircleGrid(m)
        reports = []
        for _ in range(self.sizes["synthetic_count"]):
            v = synthetic_constrained_field(
                line, circle, FLOW_WINDING,
                alpha=rng.uniform(0.05, 0.3),
                beta=rng.uniform(0.0, 2.0 * numpy.pi),
                gamma0=rng.uniform(0.05, 0.3),
                center=rng.uniform(-2.0, 2.0),
                width=rng.uniform(0.5, 2.0),
            )
            element = correspondence.M2Element(v)
            reports.append(correspondence.roundtrip_psi_phi(element))
        distance = max(report["distance"] for report in reports)
        defect = max(report["exp_chi_defect"] for report in reports)
        return {
            "fields": len(reports),
            "n": n,
            "m": m,
            "max_distance": distance,
            "max_exp_chi_defect": defect,
            "passed": distance <= 1e-6 and defect <= 1e-6,
        }

    def phi_psi_identity(self):
        levels = []
        for n, m in self.sizes["flow_grids"]:
            u, tau, diagnostics = self._segment(1.0, n, m)
            element = correspondence.M1Element(u, tau)
            report = correspondence.roundtrip_phi_psi(element)
            report["solver_residual"] = diagnostics.solver_residual_Linf
            levels.append(report)
        tolerances = [level["distance"] for level in levels]
        order = grid_module.observed_order(*tolerances)
        fine = levels[-1]
        return {
            "levels": levels,
            "tol_rt": tolerances,
            "observed_order": order,
            "passed": bool(order >= 1.5 and
                           fine["chi_Linf"] <= tolerances[-1] and
                           fine["kw2_residual_Linf"] <= 10.0 * tolerances[-1]),
        }

    def area_multiplier_and_monotonicity(self):
        levels = []
        for n, m in self.sizes["flow_grids"]:
            u, tau, _ = self._segment(1.0, n, m)
            image = correspondence.psi(correspondence.M1Element(u, tau))
            areas = flows.lagrange_multiplier_from_loops(image.v).values
            gap = numpy.abs(areas - image.implied_tau.values)[1:-1]
            levels.append({
                "n": n,
                "m": m,
                "max_gap": float(numpy.max(gap)),
                "min_increment": float(numpy.min(numpy.diff(areas))),
            })
        gaps = [level["max_gap"] for level in levels]
        order = grid_module.observed_order(*gaps)
        converging = order >= 1.5 or gaps[-1] <= 1e-9
        monotone = levels[-1]["min_increment"] >= -1e-8
        return {
            "levels": levels,
            "observed_order": order,
            "monotone": bool(monotone),
            "passed": bool(converging and monotone),
        }

    def energy_equals_b_l1(self):
        levels = []
        for n, m in self.sizes["flow_grids"]:
            v, _, _ = self._segment(0.0, n, m)
            energy = flows.energy_grad2(v)
            b_l1 = correspondence.b_l1(v)
            levels.append({"n": n, "m": m, "energy": energy, "b_l1": b_l1,
                           "gap": abs(energy - b_l1)})
        gaps = [level["gap"] for level in levels]
        ratio = gaps[0] / gaps[1] if gaps[1] > 0 else float("inf")
        return {
            "levels": levels,
            "ratio": ratio,
            "passed": 3.0 <= ratio <= 5.0,
        }

    def loop_space_laws(self):
        rng = self._rng(11)
        circle = CircleGrid(self.sizes["loop_points"])
        tables = []
        for _ in range(self.sizes["loop_count"]):
            winding = int(rng.integers(1, 3))
            basepoint = (rng.uniform(-0.5, -0.05), rng.uniform(0.0, 1.0))
            u = loopspace.random_constrained_loop(rng, circle, winding,
                                                  basepoint=basepoint)
            v = loopspace.random_constrained_loop(rng, circle, winding,
                                                  basepoint=basepoint)
            tau, sigma = rng.uniform(-2.0, 2.0, 2)
            tables.append(loopspace.check_laws(u, tau, v, sigma))

            # an off-constraint pair sharing the basepoint of w
            w = loopspace.random_loop(rng, circle, winding)
            tables.append(loopspace.check_laws(w, tau,
                                               loopspace.iterate(2, w),
                                               sigma))
        failed = sorted(set(law["law"] for table in tables for law in table
                            if not law["passed"]))
        worst = max(law["error"] for table in tables for law in table)
        return {
            "loops": self.sizes["loop_count"],
            "laws_checked": sum(len(table) for table in tables),
            "max_error": worst,
            "failed_laws": failed,
            "passed": not failed,
        }

    def epsilon_interpolation(self):
        from rabinowitzLab import conf
        n, m = self.sizes["flow_grids"][0]
        v, _, constrained = self._segment(0.0, n, m)
        u, _, unconstrained = self._segment(1.0, n, m)
        nodal_constraint = float(numpy.max(numpy.abs(
            flows.mean_hamiltonians(v).values[1:-1]
        )))

        model = lagrange.LagrangeModel.linear_on_sphere([1.0, 2.0, 2.0])
        start = numpy.array([0.0, 0.6, -0.8])
        s_eval = numpy.linspace(0.0, 1.0, 11)
        _, x_eps, _ = lagrange.lagrange_flow(
            model, start, lagrange.constrained_multiplier(model, start), 1.0,
            (0.0, 1.0), s_eval=s_eval
        )
        _, x_zero, _ = lagrange.constrained_flow(model, start, (0.0, 1.0),
                                                 s_eval=s_eval)
        rest_points = [lagrange.find_critical_point(model, sign * start,
                                                    -sign * 1.5)
                       for sign in (1.0, -1.0)]
        shared = lagrange.critical_points_agree(model, rest_points)
        separation = float(numpy.max(numpy.abs(x_eps - x_zero)))

        return {
            "n": n,
            "m": m,
            "constraint_Linf": constrained.constraint_Linf,
            "nodal_constraint_Linf": nodal_constraint,
            "multiplier_Linf": unconstrained.multiplier_Linf,
            "flow_tol": conf.flow_tol,
            "model_rest_points_shared": bool(shared),
            "model_flow_line_separation": separation,
            "passed": bool(constrained.constraint_Linf <= 1e-10 and
                           nodal_constraint <= 1e-10 and
                           unconstrained.multiplier_Linf <= conf.flow_tol and
                           shared and separation > 1e-6),
        }

    # driver
    def run_criterion(self, number):
        names = dict(CRITERIA)
        if number not in names:
            raise ValueError("there is no criterion %s" % number)
        name = names[number]
        start = time.time()
        try:
            result = getattr(self, name)()
        except RabinowitzLabError as err:
            logger.warning("criterion %s failed with %s" % (number, err))
            result = {"passed": False,
                      "error": err.__class__.__name__,
                      "message": str(err.value),
                      "diagnostics": err.diagnostics}
        logger.debug("criterion %s took %.3f s" % (number,
                                                  time.time() - start))
        result["number"] = number
        result["name"] = name
        result["passed"] = bool(result["passed"])
        return result

    def run(self, numbers=None):
        """runs the given criteria, all of them when skipped, and returns the
        report dict
        """
        if numbers is None:
            numbers = [number for number, _ in CRITERIA]
        criteria = [self.run_criterion(number) for number in numbers]
        passed_count = sum(1 for item in criteria if item["passed"])
        return {
            "mode": self.mode,
            "seed": self.seed,
            "criteria": criteria,
            "passed_count": passed_count,
            "total": len(criteria),
            "passed": passed_count == len(criteria),
        }


def render_summary(report):
    """renders the report with the ``report_template`` of the config
    """
    from rabinowitzLab import conf
    from rabinowitzLab import utils
    return utils.render_template(conf.report_template, **report)
