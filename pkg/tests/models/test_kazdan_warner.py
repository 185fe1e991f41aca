# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause

import unittest

import numpy
from hypothesis import given, settings
from hypothesis import strategies as st

from rabinowitzLab import utils
from rabinowitzLab.models import kazdan_warner as kw
from rabinowitzLab.models.errors import (ConvergenceError, GridError,
                                         SingularSystemError)
from rabinowitzLab.models.grid import GridFunction, LineGrid


class BumpProfileTester(unittest.TestCase):
    """tests the BumpProfile class
    """

    def setUp(self):
        """setup the test
        """
        self.bumps = [
            {"center": -1.0, "width": 0.8, "mass": 0.5},
            {"center": 2.0, "width": 1.2, "mass": 1.0},
        ]
        self.profile = kw.BumpProfile(self.bumps)

    def test_bumps_argument_is_not_a_list(self):
        """testing if a TypeError will be raised when the bumps argument is
        not a list
        """
        self.assertRaises(TypeError, kw.BumpProfile, "bumps")
        self.assertRaises(TypeError, kw.BumpProfile, [1.0])

    def test_bumps_argument_misses_a_key(self):
        """testing if a ValueError will be raised when a bump has no mass
        """
        self.assertRaises(ValueError, kw.BumpProfile,
                          [{"center": 0.0, "width": 1.0}])

    def test_bump_width_and_mass_are_checked(self):
        """testing if a ValueError will be raised for a non positive width
        and for a negative mass
        """
        self.assertRaises(ValueError, kw.BumpProfile,
                          [{"center": 0.0, "width": 0.0, "mass": 1.0}])
        self.assertRaises(ValueError, kw.BumpProfile,
                          [{"center": 0.0, "width": 1.0, "mass": -1.0}])

    def test_dictionary_form_is_accepted(self):
        """testing if a dictionary with a bumps key is accepted
        """
        profile = kw.BumpProfile({"bumps": self.bumps})
        self.assertEqual(profile.bumps, self.profile.bumps)
        restored = kw.BumpProfile.from_dict(self.profile.to_dict())
        self.assertEqual(restored.bumps, self.profile.bumps)

    def test_empty_profile_is_zero(self):
        """testing if an empty list is the zero forcing
        """
        profile = kw.BumpProfile([])
        self.assertEqual(profile.mass, 0.0)
        numpy.testing.assert_array_equal(profile(numpy.linspace(-1, 1, 5)),
                                         numpy.zeros(5))

    def test_mass_is_the_integral(self):
        """testing if the mass matches the integral of the profile
        """
        self.assertEqual(self.profile.mass, 1.5)
        from rabinowitzLab.models import grid
        f = self.profile.to_grid_function(LineGrid(20.0, 4001))
        self.assertAlmostEqual(grid.integrate_line(f), 1.5, places=8)

    def test_scaled(self):
        """testing if scaled multiplies every mass
        """
        self.assertAlmostEqual(self.profile.scaled(2.0).mass, 3.0)
        self.assertEqual(self.profile.mass, 1.5)

    def test_random_bump_profile(self):
        """testing if random profiles have their total mass in range and are
        reproducible
        """
        first = kw.random_bump_profile(utils.make_rng(7),
                                       mass_range=(0.5, 1.0))
        second = kw.random_bump_profile(utils.make_rng(7),
                                        mass_range=(0.5, 1.0))
        self.assertTrue(0.5 - 1e-12 <= first.mass <= 1.0 + 1e-12)
        self.assertEqual(first.bumps, second.bumps)


class KWProblemTester(unittest.TestCase):
    """tests the KWProblem class
    """

    def setUp(self):
        """setup the test
        """
        self.line = LineGrid(10.0, 201)

    def test_b_argument_is_not_a_grid_function(self):
        """testing if a TypeError will be raised when b is not a GridFunction
        """
        self.assertRaises(TypeError, kw.KWProblem, numpy.zeros(201))

    def test_b_argument_is_negative(self):
        """testing if a ValueError will be raised when b is negative
        """
        b = GridFunction.constant(self.line, -0.1)
        self.assertRaises(ValueError, kw.KWProblem, b)

    def test_b_argument_is_not_finite(self):
        """testing if a ValueError will be raised when b has nan values
        """
        values = numpy.zeros(201)
        values[3] = numpy.nan
        self.assertRaises(ValueError, kw.KWProblem,
                          GridFunction(self.line, values))

    def test_grid_argument_does_not_match(self):
        """testing if a GridError will be raised when grid is not the grid of
        b
        """
        b = GridFunction.zeros(self.line)
        self.assertRaises(GridError, kw.KWProblem, b, LineGrid(10.0, 101))

    def test_b_l1(self):
        """testing if b_l1 is the trapezoid integral of |b|
        """
        b = GridFunction.constant(self.line, 0.5)
        self.assertAlmostEqual(kw.KWProblem(b).b_l1, 10.0)
        self.assertAlmostEqual(kw.KWProblem(b).scaled(0.1).b_l1, 1.0)


class KWOperatorsTester(unittest.TestCase):
    """tests the residual, its linearization and the tridiagonal solvers
    """

    def setUp(self):
        """setup the test
        """
        self.line = LineGrid(10.0, 201)
        profile = kw.BumpProfile([{"center": 0.5, "width": 1.0,
                                   "mass": 1.0}])
        self.problem = kw.KWProblem(profile.to_grid_function(self.line))
        self.rho = GridFunction.from_callable(
            self.line, lambda s: 0.3 * numpy.exp(-s ** 2)
        )

    def test_residual_vanishes_on_trivial_problem(self):
        """testing if rho = 0 solves the problem with b = 0
        """
        problem = kw.KWProblem(GridFunction.zeros(self.line))
        residual = kw.kw_residual(GridFunction.zeros(self.line), problem)
        numpy.testing.assert_array_equal(residual.values, numpy.zeros(201))

    def test_residual_boundary_rows(self):
        """testing if the end rows of the residual are the boundary defects
        """
        rho = GridFunction.constant(self.line, 0.25)
        residual = kw.kw_residual(rho, self.problem)
        self.assertEqual(residual[0], 0.25)
        self.assertEqual(residual[-1], 0.25)

    def test_linearization_matches_finite_differences(self):
        """testing if kw_linearize is the derivative of kw_residual
        """
        xi = numpy.sin(numpy.pi * (self.line.points + 10.0) / 20.0)
        eps = 1e-6
        plus = kw.kw_residual(self.rho + eps * xi, self.problem).values
        minus = kw.kw_residual(self.rho - eps * xi, self.problem).values
        numerical = (plus - minus) / (2 * eps)
        exact = kw.kw_linearize(self.rho).dot(xi)
        numpy.testing.assert_allclose(exact, numerical, atol=1e-6)

    def test_thomas_and_banded_agree(self):
        """testing if the Thomas algorithm and solve_banded give the same
        solution
        """
        operator = kw.kw_linearize(self.rho)
        rhs = numpy.cos(self.line.points)
        thomas = kw.solve_tridiagonal(operator, rhs, method="thomas")
        banded = kw.solve_tridiagonal(operator, rhs, method="banded")
        numpy.testing.assert_allclose(thomas, banded, atol=1e-10)
        numpy.testing.assert_allclose(operator.dot(thomas), rhs, atol=1e-8)
        numpy.testing.assert_allclose(operator.to_dense().dot(thomas), rhs,
                                      atol=1e-8)

    def test_solve_tridiagonal_keeps_grid_functions(self):
        """testing if a GridFunction right hand side gives a GridFunction
        """
        operator = kw.kw_linearize(self.rho)
        result = kw.solve_tridiagonal(operator, self.rho)
        self.assertTrue(isinstance(result, GridFunction))

    def test_zero_pivot_raises_singular_system_error(self):
        """testing if a SingularSystemError will be raised on a zero pivot
        """
        operator = kw.TridiagonalOperator([0, 1, 1], [0, 1, 1], [1, 1, 0])
        with self.assertRaises(SingularSystemError) as cm:
            kw.solve_tridiagonal(operator, [1, 1, 1])
        self.assertEqual(cm.exception.diagnostics["row"], 0)

    def test_solve_tridiagonal_unknown_method(self):
        """testing if a ValueError will be raised for an unknown method
        """
        operator = kw.kw_linearize(self.rho)
        self.assertRaises(ValueError, kw.solve_tridiagonal, operator,
                          numpy.zeros(201), "lu")

    def test_linearization_pairing_is_negative(self):
        """testing if the pairing equals the coercivity bound and is negative
        """
        xi = GridFunction(self.line,
                          numpy.sin(numpy.pi * (self.line.points + 10) / 20))
        values = numpy.array(xi.values)
        values[0] = values[-1] = 0.0
        result = kw.linearization_pairing(self.rho, xi.with_values(values))
        self.assertTrue(result["negative"])
        self.assertLess(result["defect"], 1e-9 * abs(result["bound"]))

    def test_linearization_pairing_needs_vanishing_ends(self):
        """testing if a ValueError will be raised when xi does not vanish at
        the ends
        """
        self.assertRaises(ValueError, kw.linearization_pairing, self.rho,
                          GridFunction.constant(self.line, 1.0))


class KWSolversTester(unittest.TestCase):
    """tests the Newton, continuation and relaxation solvers and the a
    priori estimates
    """

    def setUp(self):
        """setup the test
        """
        self.line = LineGrid(10.0, 801)
        profile = kw.BumpProfile([
            {"center": -1.0, "width": 0.8, "mass": 0.4},
            {"center": 1.5, "width": 1.0, "mass": 0.6},
        ])
        self.problem = kw.KWProblem(profile.to_grid_function(self.line))

    def test_trivial_problem_needs_no_iteration(self):
        """testing if b = 0 returns rho = 0 without any Newton step
        """
        problem = kw.KWProblem(GridFunction.zeros(self.line))
        sol = kw.newton_solve(problem)
        self.assertEqual(sol.newton_iterations, 0)
        self.assertEqual(numpy.max(numpy.abs(sol.rho.values)), 0.0)

    def test_newton_converges(self):
        """testing if Newton reaches the tolerance and the solution is
        positive inside
        """
        sol = kw.newton_solve(self.problem, tol=1e-10)
        self.assertLessEqual(sol.final_residual_Linf, 1e-10)
        self.assertGreater(numpy.min(sol.rho.values[1:-1]), 0.0)
        self.assertEqual(sol.residual_history[-1], sol.final_residual_Linf)
        self.assertEqual(sol.to_dict()["continuation_steps"], 0)

    def test_newton_raises_convergence_error(self):
        """testing if a ConvergenceError with the residual history will be
        raised when max_iter is too small
        """
        with self.assertRaises(ConvergenceError) as cm:
            kw.newton_solve(self.problem, tol=1e-12, max_iter=1)
        self.assertEqual(len(cm.exception.diagnostics["residual_history"]), 2)

    def test_newton_tol_should_be_positive(self):
        """testing if a ValueError will be raised for a non positive tol
        """
        self.assertRaises(ValueError, kw.newton_solve, self.problem, None,
                          0.0)

    def test_continuation_agrees_with_newton(self):
        """testing if the continuation solve reaches the Newton solution
        """
        newton = kw.newton_solve(self.problem)
        continued = kw.continuation_solve(self.problem, max_step=0.5)
        self.assertGreaterEqual(continued.continuation_steps, 1)
        self.assertLess(utils.sup_distance(newton.rho.values,
                                            continued.rho.values), 1e-8)

    def test_relaxation_agrees_with_newton(self):
        """testing if the relaxation oracle converges to the Newton solution
        """
        newton = kw.newton_solve(self.problem)
        relaxed = kw.relaxation_solve(self.problem, tol=1e-10)
        self.assertLess(utils.sup_distance(newton.rho.values,
                                            relaxed.rho.values), 1e-7)

    def test_relaxation_raises_convergence_error(self):
        """testing if relaxation raises ConvergenceError without enough
        sweeps
        """
        self.assertRaises(ConvergenceError, kw.relaxation_solve,
                          self.problem, 1e-12, 1.0, 2)

    def test_pointwise_bounds(self):
        """testing if the solution lies between 0 and the a priori upper
        bound and its slope is bounded by the mass of b
        """
        sol = kw.newton_solve(self.problem)
        report = kw.check_pointwise_bounds(sol, self.problem)
        self.assertTrue(report["passed"])
        self.assertTrue(report["derivative_holds"])
        self.assertEqual(report["upper_bound"],
                         kw.lemma_bound(report["b_l1"]))

    def test_energy_identity(self):
        """testing if the energy identity holds up to the discretization
        error
        """
        sol = kw.newton_solve(self.problem)
        residual, defect = kw.energy_identity_residual(sol, self.problem,
                                                        pointwise=True)
        self.assertLess(residual, 1e-3)
        self.assertLess(numpy.max(numpy.abs(defect.values[2:-2])), 1e-2)

    def test_energy_identity_clamps_the_exponent(self):
        """testing if the energy identity stays finite for a profile far
        below the clamp
        """
        grid = self.problem.grid
        rho = GridFunction(grid, numpy.full(grid.point_count, -1000.0))
        residual, defect = kw.energy_identity_residual(
            kw.KWSolution(rho), self.problem, pointwise=True
        )
        self.assertTrue(numpy.isfinite(residual))
        self.assertTrue(numpy.all(numpy.isfinite(defect.values)))

    def test_w22_estimates(self):
        """testing if the three W22 component bounds hold
        """
        sol = kw.newton_solve(self.problem)
        report = kw.w22_estimates(sol, self.problem)
        for key in ("second_derivative", "l2", "interpolation"):
            self.assertTrue(report[key]["holds"], key)
        self.assertGreater(report["rho_W22"], 0.0)

    def test_lemma_bound_and_convexity_constant(self):
        """testing the closed forms of the upper bound and c1
        """
        self.assertEqual(kw.lemma_bound(0.1), kw.TWO_LN_TWO)
        self.assertEqual(kw.lemma_bound(2.0), 16.0)
        self.assertAlmostEqual(kw.convexity_constant(kw.TWO_LN_TWO),
                               8.0 * numpy.log(2.0) / 3.0)

    @settings(max_examples=10, deadline=None)
    @given(st.floats(min_value=0.05, max_value=3.0),
           st.floats(min_value=-2.0, max_value=2.0))
    def test_bounds_hold_for_any_mass(self, mass, center):
        """testing if the pointwise bounds hold for bumps of any mass and
        position
        """
        line = LineGrid(10.0, 401)
        profile = kw.BumpProfile([{"center": center, "width": 1.0,
                                   "mass": mass}])
        problem = kw.KWProblem(profile.to_grid_function(line))
        sol = kw.continuation_solve(problem)
        self.assertTrue(kw.check_pointwise_bounds(sol, problem)["passed"])
