# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause
"""
Correspondence
==============

The maps between the solutions of the two flow equations.

:func:`psi` shifts every loop ``u_s`` of a field by ``sigma_u(s)`` so that it
lands on the constraint hypersurface. :func:`phi` goes back: it takes the
increase ``b_v = d_s loop_area(v_s)`` of the loop areas, solves the
Kazdan-Warner equation ``rho'' = 1 - exp(-rho) - b_v`` and returns
``(translate(-rho, v), loop_area(v) + rho')``.

Both maps are defined on every field. Whether a field actually solves a flow
equation is recorded in the residual certificates of :class:`M1Element` and
:class:`M2Element`, so the identities that hold for all fields can be
told apart from the ones that need the flow equation. The round trip
reports expose the shift ``chi`` whose vanishing makes the two maps inverse
to each other.
"""

import logging

import numpy

from rabinowitzLab.models import flows
from rabinowitzLab.models import grid as grid_module
from rabinowitzLab.models import kazdan_warner
from rabinowitzLab.models import symplectization
from rabinowitzLab.models.errors import ConstraintError
from rabinowitzLab.models.flows import CylinderMap, MultiplierPath
from rabinowitzLab.models.grid import GridFunction
from rabinowitzLab.utils import sup_distance

logger = logging.getLogger(__name__)


class M1Element(object):
    """A field with multiplier and the certificate of how well it solves the
    first flow equation.

    :param u: A :class:`~rabinowitzLab.models.flows.CylinderMap`.
    :param tau: A :class:`~rabinowitzLab.models.flows.MultiplierPath`.
    :param residual_certificate: The interior max norm of
      :func:`~rabinowitzLab.models.flows.grad1_residual`, computed when
      skipped.
    :param epsilon: The weight of ``d_s tau`` the certificate is taken with.
    """

    def __init__(self, u, tau, residual_certificate=None, epsilon=1.0,
                 mode=None):
        if not isinstance(u, CylinderMap):
            raise TypeError("M1Element.u should be a CylinderMap instance "
                            "not %s" % u.__class__.__name__)
        if isinstance(tau, GridFunction):
            tau = MultiplierPath(tau)
        if not isinstance(tau, MultiplierPath):
            raise TypeError("M1Element.tau should be a MultiplierPath "
                            "instance not %s" % tau.__class__.__name__)
        self.u = u
        self.tau = tau
        self.epsilon = float(epsilon)
        if residual_certificate is None:
            residual_certificate = flows.grad1_residual(
                u, tau, epsilon=self.epsilon, mode=mode
            ).Linf
        self.residual_certificate = float(residual_certificate)

    @classmethod
    def admit(cls, u, tau, tol=None, epsilon=1.0, mode=None):
        """returns the element, raises a
        :class:`~rabinowitzLab.models.errors.ConstraintError` when its
        residual certificate exceeds tol, ``admission_tol`` when skipped
        """
        element = cls(u, tau, epsilon=epsilon, mode=mode)
        if not element.is_admitted(tol):
            raise ConstraintError(
                "the field is not a solution, its residual is %s" %
                element.residual_certificate,
                diagnostics={"residual_certificate":
                             element.residual_certificate}
            )
        return element

    def is_admitted(self, tol=None):
        from rabinowitzLab import conf
        tol = conf.value_or_default(tol, "admission_tol")
        return self.residual_certificate <= tol

    def __repr__(self):
        return "<M1Element %r residual=%s>" % (self.u,
                                               self.residual_certificate)


class M2Element(object):
    """A field with the certificates of how well it solves the constrained
    flow equation.

    :param v: A :class:`~rabinowitzLab.models.flows.CylinderMap`.
    :param residual_certificate: The interior max norm of the field residual
      of :func:`~rabinowitzLab.models.flows.grad2_residual`.
    :param constraint_certificate: ``max |mean H(v_s)|`` over all s.
    """

    def __init__(self, v, residual_certificate=None,
                 constraint_certificate=None, mode=None):
        if not isinstance(v, CylinderMap):
            raise TypeError("M2Element.v should be a CylinderMap instance "
                            "not %s" % v.__class__.__name__)
        self.v = v
        if residual_certificate is None:
            residual_certificate = flows.grad2_residual(
                v, mode=mode
            ).field_Linf
        if constraint_certificate is None:
            constraint_certificate = float(numpy.max(numpy.abs(
                flows.mean_hamiltonians(v).values
            )))
        self.residual_certificate = float(residual_certificate)
        self.constraint_certificate = float(constraint_certificate)
        # set by psi, the multiplier carried over from the first flow
        self.implied_tau = None
        self.sigma = None

    @classmethod
    def admit(cls, v, tol=None, mode=None):
        """returns the element, raises a
        :class:`~rabinowitzLab.models.errors.ConstraintError` when one of its
        certificates exceeds tol, ``admission_tol`` when skipped
        """
        element = cls(v, mode=mode)
        if not element.is_admitted(tol):
            raise ConstraintError(
                "the field is not a solution of the constrained flow",
                diagnostics={
                    "residual_certificate": element.residual_certificate,
                    "constraint_certificate": element.constraint_certificate,
                }
            )
        return element

    def is_admitted(self, tol=None):
        from rabinowitzLab import conf
        tol = conf.value_or_default(tol, "admission_tol")
        return self.residual_certificate <= tol and \
            self.constraint_certificate <= tol

    def __repr__(self):
        return "<M2Element %r residual=%s constraint=%s>" % (
            self.v, self.residual_certificate, self.constraint_certificate
        )


def sigma_profile(u):
    """GridFunction of ``sigma_u(s) = -ln(mean H(u_s) + 1)``
    """
    mean_exp = numpy.mean(numpy.exp(u.a), axis=1)
    if numpy.min(mean_exp) <= 0:
        raise ConstraintError("the mean of exp(r) should be positive")
    return GridFunction(u.line_grid,
                        symplectization.sigma_shift_values(u.a, axis=1))


def psi(e, mode=None):
    """``Psi(u, tau)(s, t) = sigma_u(s)_* u(s, t)``

    The returned element carries ``sigma`` and the ``implied_tau = tau -
    d_s sigma`` the shifted field solves the flow equation with.
    """
    sigma = sigma_profile(e.u)
    v = e.u.translated(sigma)
    element = M2Element(v, mode=mode)
    element.sigma = sigma
    element.implied_tau = MultiplierPath(
        e.tau.tau - grid_module.derivative(sigma)
    )
    return element


def b_profile(v, clamp_tol=None, mode=None, return_report=False):
    """``b_v(s) = d_s loop_area(v_s)``

    Negative samples down to ``-clamp_tol`` (``b_clamp_tol`` when skipped)
    are set to 0 with a warning, anything below raises a
    :class:`~rabinowitzLab.models.errors.ConstraintError`.

    :param return_report: Return a ``(b, report)`` tuple, the report holds
      the raw minimum and the number of clamped samples.
    """
    from rabinowitzLab import conf
    clamp_tol = conf.value_or_default(clamp_tol, "b_clamp_tol")

    areas = flows.lagrange_multiplier_from_loops(v, mode=mode).tau
    raw = grid_module.derivative(areas).values
    minimum = float(numpy.min(raw))
    if minimum < -clamp_tol:
        raise ConstraintError(
            "the loop areas decrease, b_v reaches %s" % minimum,
            diagnostics={"min_b": minimum,
                         "index": int(numpy.argmin(raw))}
        )
    negative = raw < 0
    clamped = int(numpy.count_nonzero(negative))
    if clamped:
        logger.warning("clamped %s negative b_v samples, the smallest is %s"
                       % (clamped, minimum))
    b = areas.with_values(numpy.where(negative, 0.0, raw))
    if return_report:
        return b, {"min_b": minimum, "clamped": clamped,
                   "clamp_tol": clamp_tol}
    return b


def _rho_slope(rho, areas):
    """``d_s rho`` centered at the interior nodes

    At the two ends ``rho'' = 1 - exp(-rho) - b`` is integrated over the
    boundary cell, ``int b`` being the area increment and the rest taken
    with a quadrature exact for quadratics.
    """
    values = rho.values
    h = rho.grid.spacing
    slope = grid_module.derivative_values(values, rho.grid)
    if values.size < 3:
        return rho.with_values(slope)
    g = -numpy.expm1(-values)
    area = areas.values
    slope[0] = (values[2] - values[0]) / (2.0 * h) + \
        (area[1] - area[0]) - h * (5.0 * g[0] + 8.0 * g[1] - g[2]) / 12.0
    slope[-1] = (values[-1] - values[-3]) / (2.0 * h) - \
        (area[-1] - area[-2]) + h * (5.0 * g[-1] + 8.0 * g[-2] - g[-3]) / 12.0
    return rho.with_values(slope)


def b_l1(v, mode=None):
    """``int |b_v| ds`` as the total variation of the sampled loop areas,
    ``sum |loop_area(v_{i+1}) - loop_area(v_i)|``
    """
    areas = flows.lagrange_multiplier_from_loops(v, mode=mode).values
    return float(numpy.sum(numpy.abs(numpy.diff(areas))))


def phi(e, tol=None, constraint_tol=None, mode=None):
    """``Phi(v) = (translate(-rho_v, v), loop_area(v) + d_s rho_v)`` with
    rho_v the Kazdan-Warner solution for ``b_v``

    :param e: An :class:`M2Element` whose constraint certificate is below
      ``constraint_tol`` (``constraint_tol`` of the config when skipped).
    :param tol: The Kazdan-Warner Newton tolerance.

    The returned :class:`M1Element` carries the ``kw_solution``, the
    forcing ``b`` and ``rho``.
    """
    from rabinowitzLab import conf
    constraint_tol = conf.value_or_default(constraint_tol, "constraint_tol")
    if e.constraint_certificate > constraint_tol:
        raise ConstraintError(
            "the field is not on the constraint hypersurface, mean H reaches "
            "%s" % e.constraint_certificate,
            diagnostics={"constraint_certificate":
                         e.constraint_certificate}
        )

    v = e.v
    b = b_profile(v, mode=mode)
    problem = kazdan_warner.KWProblem(b)
    solution = kazdan_warner.continuation_solve(problem, tol=tol)
    rho = solution.rho

    u = v.translated(-rho.values)
    areas = flows.lagrange_multiplier_from_loops(v, mode=mode).tau
    tau = MultiplierPath(areas + _rho_slope(rho, areas))
    element = M1Element(u, tau, mode=mode)
    element.kw_solution = solution
    element.b = b
    element.rho = rho
    return element


def kw2_residual(chi, mean_hamiltonian):
    """``chi'' - (exp(chi) - 1)(mean H + 1)`` at the interior points, zero at
    the two ends
    """
    residual = grid_module.second_derivative_values(chi.values, chi.grid,
                                                    boundary="zero")
    residual[1:-1] -= numpy.expm1(chi.values[1:-1]) * \
        (mean_hamiltonian.values[1:-1] + 1.0)
    return chi.with_values(residual)


def roundtrip_psi_phi(e, tol=None, mode=None):
    """computes ``Psi(Phi(v))`` and reports its distance to v

    The report holds the sup distance in ``(a, theta)``, the composed shift
    ``chi = sigma_{Phi(v)} - rho_v`` of the round trip with
    ``max |exp(chi) - 1|`` and the diagnostics of the Kazdan-Warner solve.
    """
    forward = phi(e, tol=tol, mode=mode)
    back = psi(forward, mode=mode)
    chi = back.sigma - forward.rho

    a_distance = sup_distance(back.v.a, e.v.a)
    theta_distance = sup_distance(back.v.theta_lift, e.v.theta_lift)
    return {
        "direction": "psi-phi",
        "distance": max(a_distance, theta_distance),
        "a_distance": a_distance,
        "theta_distance": theta_distance,
        "chi_Linf": float(numpy.max(numpy.abs(chi.values))),
        "exp_chi_defect": float(numpy.max(numpy.abs(numpy.expm1(
            chi.values)))),
        "input_constraint": e.constraint_certificate,
        "output_constraint": back.constraint_certificate,
        "phi_residual": forward.residual_certificate,
        "rho_min": float(numpy.min(forward.rho.values)),
        "b_l1": float(kazdan_warner.KWProblem(forward.b).b_l1),
        "kw": forward.kw_solution.to_dict(),
        "n": e.v.line_grid.point_count,
        "m": e.v.circle_grid.point_count,
    }


def roundtrip_phi_psi(e, tol=None, mode=None, chi_tol=None):
    """computes ``Phi(Psi(u, tau))`` and reports its distance to ``(u, tau)``

    Besides the field and multiplier distances the report holds ``chi =
    sigma_u - rho_v`` with the residual of
    ``chi'' = (exp(chi) - 1)(mean H(u) + 1)`` and its extreme interior
    values, which the maximum principle keeps at 0.

    :param chi_tol: The tolerance of the sign check, ``admission_tol`` when
      skipped.
    """
    from rabinowitzLab import conf
    chi_tol = conf.value_or_default(chi_tol, "admission_tol")

    image = psi(e, mode=mode)
    back = phi(image, tol=tol, mode=mode)
    chi = image.sigma - back.rho
    residual = kw2_residual(chi, flows.mean_hamiltonians(e.u))

    interior = chi.values[1:-1]
    positive_max = float(max(numpy.max(interior, initial=0.0), 0.0))
    negative_min = float(min(numpy.min(interior, initial=0.0), 0.0))

    field_distance = max(sup_distance(back.u.a, e.u.a),
                         sup_distance(back.u.theta_lift, e.u.theta_lift))
    tau_distance = sup_distance(back.tau.values, e.tau.values)
    return {
        "direction": "phi-psi",
        "field_distance": field_distance,
        "tau_distance": tau_distance,
        "distance": max(field_distance, tau_distance),
        "chi_Linf": float(numpy.max(numpy.abs(chi.values))),
        "kw2_residual_Linf": float(numpy.max(numpy.abs(
            residual.values[1:-1]), initial=0.0)),
        "chi_positive_max": positive_max,
        "chi_negative_min": negative_min,
        "maximum_principle_holds": bool(positive_max <= chi_tol and
                                        -negative_min <= chi_tol),
        "input_residual": e.residual_certificate,
        "psi_residual": image.residual_certificate,
        "psi_constraint": image.constraint_certificate,
        "phi_residual": back.residual_certificate,
        "rho_min": float(numpy.min(back.rho.values)),
        "kw": back.kw_solution.to_dict(),
        "n": e.u.line_grid.point_count,
        "m": e.u.circle_grid.point_count,
    }
