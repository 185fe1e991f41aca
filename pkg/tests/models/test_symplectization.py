# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause

import unittest

import numpy
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from rabinowitzLab.models import symplectization as sym
from rabinowitzLab.models.errors import ConstraintError, LiftError
from rabinowitzLab.models.grid import CircleGrid


class CircleContactTester(unittest.TestCase):
    """tests the CircleContact model
    """

    def test_reeb_field_is_normalized(self):
        """testing if lambda(R) = 1 and d lambda(R, .) = 0
        """
        report = sym.CIRCLE.check_reeb([0.0, 0.3, 0.9])
        self.assertEqual(report["lambda_of_reeb"], 0.0)
        self.assertEqual(report["d_lambda_of_reeb"], 0.0)

    def test_contact_distribution_is_zero(self):
        """testing if xi projection kills every tangent vector of the circle
        """
        numpy.testing.assert_array_equal(
            sym.CIRCLE.xi_projection(0.2, [3.0]), [0.0]
        )
        self.assertEqual(sym.CIRCLE.check_J_xi([0.1, 0.5]), 0.0)

    def test_equality(self):
        """testing if every CircleContact is the same model
        """
        self.assertEqual(sym.CircleContact(), sym.CIRCLE)
        self.assertNotEqual(sym.CIRCLE, sym.ContactModel())


class SymplectizationPointTester(unittest.TestCase):
    """tests the SymplectizationPoint class
    """

    def test_r_argument_is_not_a_number(self):
        """testing if a TypeError will be raised when r is not a number
        """
        self.assertRaises(TypeError, sym.SymplectizationPoint, "1")
        self.assertRaises(TypeError, sym.SymplectizationPoint, None)

    def test_angle_is_stored_modulo_one(self):
        """testing if the circle angle is stored modulo 1
        """
        p = sym.SymplectizationPoint(0.5, 2.25)
        self.assertAlmostEqual(p.x, 0.25)
        self.assertEqual(p.contact, sym.CIRCLE)

    def test_translated(self):
        """testing if translated only moves the r coordinate
        """
        p = sym.translate(1.5, sym.SymplectizationPoint(-0.5, 0.1))
        self.assertEqual(p, sym.SymplectizationPoint(1.0, 0.1))

    def test_hamiltonian(self):
        """testing if H(r, x) = exp(r) - 1 on points and arrays
        """
        self.assertEqual(sym.hamiltonian(sym.SymplectizationPoint(0.0)), 0.0)
        self.assertAlmostEqual(sym.hamiltonian(1.0), numpy.e - 1.0)
        numpy.testing.assert_allclose(sym.hamiltonian([0.0, numpy.log(2.0)]),
                                      [0.0, 1.0])


class LoopInSymplectizationTester(unittest.TestCase):
    """tests the LoopInSymplectization class
    """

    def setUp(self):
        """setup the test
        """
        self.circle = CircleGrid(16)
        self.t = self.circle.points
        self.r = 0.2 * numpy.sin(2 * numpy.pi * self.t)
        self.theta = 2 * self.t + 0.05 * numpy.cos(2 * numpy.pi * self.t)
        self.loop = sym.LoopInSymplectization(self.circle, self.r, self.theta,
                                              2)

    def test_circle_argument_is_not_a_circle_grid(self):
        """testing if a TypeError will be raised when circle is not a
        CircleGrid
        """
        self.assertRaises(TypeError, sym.LoopInSymplectization, 16, self.r,
                          self.theta, 2)

    def test_samples_have_wrong_length_or_are_not_finite(self):
        """testing if a ValueError will be raised for samples of the wrong
        length or with nan values
        """
        self.assertRaises(ValueError, sym.LoopInSymplectization, self.circle,
                          self.r[:-1], self.theta, 2)
        r = numpy.array(self.r)
        r[2] = numpy.inf
        self.assertRaises(ValueError, sym.LoopInSymplectization, self.circle,
                          r, self.theta, 2)

    def test_winding_argument(self):
        """testing if an integral float winding is accepted and a fractional
        one raises TypeError
        """
        loop = sym.LoopInSymplectization(self.circle, self.r, self.theta, 2.0)
        self.assertEqual(loop.winding, 2)
        self.assertTrue(isinstance(loop.winding, int))
        self.assertRaises(TypeError, sym.LoopInSymplectization, self.circle,
                          self.r, self.theta, 1.5)
        self.assertRaises(TypeError, sym.LoopInSymplectization, self.circle,
                          self.r, self.theta, True)

    def test_inconsistent_lift_raises_lift_error(self):
        """testing if a LiftError will be raised when the lift does not close
        up with the winding
        """
        self.assertRaises(LiftError, sym.LoopInSymplectization, self.circle,
                          self.r, self.theta, 0)
        theta = numpy.array(self.theta)
        theta[5] += 1.0
        self.assertRaises(LiftError, sym.LoopInSymplectization, self.circle,
                          self.r, theta, 2)

    def test_from_angles_unwraps(self):
        """testing if from_angles rebuilds the lift from angles modulo 1
        """
        loop = sym.LoopInSymplectization.from_angles(
            self.circle, self.r, self.loop.x_values, 2
        )
        self.assertTrue(loop.same_loop(self.loop, tol=1e-12))

    def test_samples_are_read_only(self):
        """testing if the samples can not be changed
        """
        self.assertRaises(ValueError, self.loop.r_values.__setitem__, 0, 1.0)
        self.assertRaises(ValueError, self.loop.theta_lift.__setitem__, 0,
                          1.0)

    def test_periodic_part_and_derivatives(self):
        """testing if the periodic part removes the winding and the
        derivatives are the expected trigonometric ones
        """
        numpy.testing.assert_allclose(
            self.loop.periodic_part, 0.05 * numpy.cos(2 * numpy.pi * self.t),
            atol=1e-15
        )
        numpy.testing.assert_allclose(
            self.loop.theta_derivative(mode="spectral"),
            2 - 0.1 * numpy.pi * numpy.sin(2 * numpy.pi * self.t), atol=1e-12
        )
        numpy.testing.assert_allclose(
            self.loop.r_derivative(mode="spectral"),
            0.4 * numpy.pi * numpy.cos(2 * numpy.pi * self.t), atol=1e-12
        )

    def test_same_loop_ignores_integer_lift_offsets(self):
        """testing if lifts differing by an integer give the same loop
        """
        shifted = self.loop.with_values(theta_lift=self.loop.theta_lift + 3)
        self.assertTrue(self.loop.same_loop(shifted))
        moved = self.loop.with_values(theta_lift=self.loop.theta_lift + 0.1)
        self.assertFalse(self.loop.same_loop(moved, tol=1e-3))
        self.assertFalse(self.loop.same_loop(self.loop.translated(0.1)))
        self.assertFalse(self.loop.same_loop("loop"))

    def test_same_loop_for_far_away_lifts(self):
        """testing if lifts shifted by large integers still give the same
        loop and the tolerance can be tightened to exact equality
        """
        for shift in (-7, 250, 10 ** 6):
            shifted = self.loop.with_values(
                theta_lift=self.loop.theta_lift + shift
            )
            self.assertTrue(self.loop.same_loop(shifted))
            self.assertTrue(shifted.same_loop(self.loop))
        self.assertTrue(self.loop.same_loop(self.loop, tol=0.0))
        nudged = self.loop.with_values(
            theta_lift=self.loop.theta_lift + 1e-9
        )
        self.assertFalse(self.loop.same_loop(nudged))

    def test_dict_round_trip(self):
        """testing if from_dict restores the loop written by to_dict
        """
        data = self.loop.to_dict()
        self.assertEqual(data["m"], 16)
        self.assertEqual(data["winding"], 2)
        restored = sym.LoopInSymplectization.from_dict(data)
        numpy.testing.assert_array_equal(restored.r_values, self.r)
        numpy.testing.assert_array_equal(restored.theta_lift,
                                         self.loop.theta_lift)

    def test_from_dict_missing_key(self):
        """testing if a ValueError will be raised for a record without r
        """
        data = self.loop.to_dict()
        del data["r"]
        self.assertRaises(ValueError, sym.LoopInSymplectization.from_dict,
                          data)

    def test_critical_loop(self):
        """testing if the critical loop is r = const, theta = k t
        """
        loop = sym.LoopInSymplectization.critical(self.circle, 3)
        numpy.testing.assert_array_equal(loop.r_values, numpy.zeros(16))
        numpy.testing.assert_allclose(loop.periodic_part, numpy.zeros(16),
                                      atol=1e-15)
        self.assertEqual(loop.point(4), sym.SymplectizationPoint(0.0, 0.75))


class LoopFunctionalsTester(unittest.TestCase):
    """tests the loop area, the mean Hamiltonian and the action
    """

    def setUp(self):
        """setup the test
        """
        self.circle = CircleGrid(64)
        self.t = self.circle.points

    def _oscillating_loop(self, amplitude=0.4, winding=1):
        return sym.LoopInSymplectization(
            self.circle, amplitude * numpy.sin(2 * numpy.pi * self.t),
            winding * self.t, winding
        )

    def test_area_of_critical_loops(self):
        """testing if the area of r = c, theta = k t is k exp(c) in every
        mode
        """
        loop = sym.LoopInSymplectization.critical(self.circle, 2, 0.5)
        for mode in sym.AREA_MODES:
            self.assertAlmostEqual(sym.loop_area(loop, mode=mode),
                                   2 * numpy.exp(0.5), places=12)

    def test_area_of_oscillating_loop(self):
        """testing if the area of r = a sin(2 pi t), theta = t is I0(a)
        """
        loop = self._oscillating_loop()
        expected = scipy.special.i0(0.4)
        self.assertAlmostEqual(sym.loop_area(loop, mode="spectral"),
                               expected, places=12)
        self.assertAlmostEqual(sym.loop_area(loop, mode="centered"),
                               expected, places=12)
        self.assertAlmostEqual(sym.loop_area(loop, mode="piecewise_linear"),
                               expected, places=3)

    def test_area_unknown_mode(self):
        """testing if a ValueError will be raised for an unknown area mode
        """
        self.assertRaises(ValueError, sym.loop_area, self._oscillating_loop(),
                          "simpson")

    def test_mean_hamiltonian_and_action(self):
        """testing if the action is -area + tau * mean H
        """
        loop = self._oscillating_loop()
        mean = sym.mean_hamiltonian(loop)
        self.assertAlmostEqual(mean, scipy.special.i0(0.4) - 1.0, places=12)
        self.assertAlmostEqual(
            sym.rabinowitz_action(loop, 2.0, mode="spectral"),
            -sym.loop_area(loop, mode="spectral") + 2.0 * mean, places=14
        )

    def test_restricted_action_needs_the_constraint(self):
        """testing if restricted_action raises ConstraintError off the
        constraint and agrees with the action on it
        """
        loop = self._oscillating_loop()
        self.assertRaises(ConstraintError, sym.restricted_action, loop)
        on = sym.translate(sym.sigma_shift(loop), loop)
        self.assertAlmostEqual(sym.restricted_action(on, mode="spectral"),
                               sym.rabinowitz_action(on, 5.0,
                                                     mode="spectral"),
                               places=9)

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(-30.0, 30.0), min_size=8, max_size=8))
    def test_sigma_shift_moves_onto_the_constraint(self, r_values):
        """testing if translating by sigma_shift zeroes the mean Hamiltonian
        """
        circle = CircleGrid(8)
        loop = sym.LoopInSymplectization(circle, r_values,
                                         numpy.zeros(8), 0)
        shifted = sym.translate(sym.sigma_shift(loop), loop)
        self.assertAlmostEqual(sym.mean_hamiltonian(shifted), 0.0, places=12)


class AlmostComplexStructureTester(unittest.TestCase):
    """tests apply_J and omega
    """

    def setUp(self):
        """setup the test
        """
        self.p = sym.SymplectizationPoint(0.7, 0.2)

    def test_J_on_the_basis(self):
        """testing if J d/dr = R and J R = -d/dr
        """
        self.assertEqual(tuple(sym.apply_J(self.p, (1.0, 0.0))[:2]),
                         (0.0, 1.0))
        self.assertEqual(tuple(sym.apply_J(self.p, (0.0, 1.0))[:2]),
                         (-1.0, 0.0))

    def test_J_squares_to_minus_one(self):
        """testing if J J v = -v
        """
        v = sym.Tangent(0.3, -1.2, numpy.zeros(0))
        twice = sym.apply_J(self.p, sym.apply_J(self.p, v))
        self.assertEqual((twice.dr, twice.reeb), (-0.3, 1.2))

    def test_J_is_compatible_with_omega(self):
        """testing if omega(v, Jv) is positive and omega is J invariant
        """
        v = (0.3, -1.2)
        w = (2.0, 0.5)
        value = sym.omega(self.p, v, sym.apply_J(self.p, v))
        self.assertAlmostEqual(value, numpy.exp(0.7) * (0.09 + 1.44))
        self.assertAlmostEqual(
            sym.omega(self.p, sym.apply_J(self.p, v), sym.apply_J(self.p, w)),
            sym.omega(self.p, v, w)
        )
        self.assertAlmostEqual(sym.omega(self.p, v, v), 0.0)
