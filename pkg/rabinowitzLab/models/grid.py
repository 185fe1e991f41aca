# -*- coding: utf-8 -*-
# Copyright (c) 2024, rabinowitzLab developers
#
# This module is part of rabinowitzLab and is released under the BSD 2
# License: http://www.opensource.org/licenses/BSD-2-Clause
"""
Grids
=====

Discretized one dimensional calculus on a truncated real line
``[-S, S]`` and on the circle ``S^1 = R/Z``.

Every other module builds on the three classes defined here:

  * :class:`~rabinowitzLab.models.grid.LineGrid`, the uniform grid
    ``s_i = -S + i*h``,
  * :class:`~rabinowitzLab.models.grid.CircleGrid`, the uniform periodic grid
    ``t_j = j/m``,
  * :class:`~rabinowitzLab.models.grid.GridFunction`, samples of a real
    function on a :class:`~rabinowitzLab.models.grid.LineGrid`.

All the difference operators are second order accurate, the quadratures are
the trapezoid rule on the line and the rectangle rule on the circle, so one
refinement study governs the whole package::

  from rabinowitzLab.models import grid

  line = grid.LineGrid(half_width=10, point_count=2001)
  f = grid.GridFunction.from_callable(line, numpy.sin)
  df = grid.derivative(f)
  grid.integrate_line(f)

"""

import collections
import logging

import numpy
import scipy.integrate
import scipy.sparse

from rabinowitzLab.models.errors import GridError

logger = logging.getLogger(__name__)


Norms = collections.namedtuple("Norms", ["L1", "L2", "Linf", "W22"])


class LineGrid(object):
    """A uniform grid on the truncated real line ``[-S, S]``.

    :param half_width: The truncation half width ``S``. Should be a positive
      real number, anything else raises TypeError or ValueError. Skipping it
      uses ``default_half_width`` from the config.

    :param point_count: The number of grid points ``n``, an integer bigger
      than or equal to 3. Skipping it uses ``default_line_points`` from the
      config.
    """

    def __init__(self, half_width=None, point_count=None):
        from rabinowitzLab import conf

        if half_width is None:
            half_width = conf.default_half_width
        if point_count is None:
            point_count = conf.default_line_points

        self._half_width = self._validate_half_width(half_width)
        self._point_count = self._validate_point_count(point_count)
        self._points = numpy.linspace(
            -self._half_width, self._half_width, self._point_count
        )
        # linspace already hits both ends, pin them anyway
        self._points[0] = -self._half_width
        self._points[-1] = self._half_width
        self._points.flags.writeable = False

    def _validate_half_width(self, half_width):
        """validates the given half_width value
        """
        if isinstance(half_width, bool) or \
           not isinstance(half_width, (int, float, numpy.integer,
                                       numpy.floating)):
            raise TypeError("LineGrid.half_width should be a real number not "
                            "%s" % half_width.__class__.__name__)
        half_width = float(half_width)
        if not numpy.isfinite(half_width) or half_width <= 0:
            raise ValueError("LineGrid.half_width should be positive")
        return half_width

    def _validate_point_count(self, point_count):
        """validates the given point_count value
        """
        if isinstance(point_count, bool) or \
           not isinstance(point_count, (int, numpy.integer)):
            raise TypeError("LineGrid.point_count should be an integer not "
                            "%s" % point_count.__class__.__name__)
        if point_count < 3:
            raise GridError("LineGrid.point_count should be at least 3, got "
                            "%s" % point_count)
        return int(point_count)

    @property
    def half_width(self):
        """The truncation half width ``S``
        """
        return self._half_width

    @property
    def point_count(self):
        """The number of grid points ``n``
        """
        return self._point_count

    @property
    def spacing(self):
        """The grid spacing ``h = 2S/(n-1)``
        """
        return 2.0 * self._half_width / (self._point_count - 1)

    @property
    def points(self):
        """The read-only array of grid points
        """
        return self._points

    def refined(self, factor=2):
        """returns a grid with the same half width and ``factor`` times
        smaller spacing
        """
        return LineGrid(self._half_width,
                        factor * (self._point_count - 1) + 1)

    def to_dict(self):
        return {"S": self._half_width, "n": self._point_count}

    def __eq__(self, other):
        return isinstance(other, LineGrid) and \
            other.half_width == self.half_width and \
            other.point_count == self.point_count

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash((self._half_width, self._point_count))

    def __repr__(self):
        return "<LineGrid S=%s n=%s>" % (self._half_width, self._point_count)


class CircleGrid(object):
    """A uniform grid on the circle ``R/Z``.

    :param point_count: The number of points ``m``, an integer bigger than or
      equal to 4. Skipping it uses ``default_circle_points`` from the config.
    """

    def __init__(self, point_count=None):
        from rabinowitzLab import conf

        if point_count is None:
            point_count = conf.default_circle_points

        self._point_count = self._validate_point_count(point_count)
        self._points = numpy.arange(self._point_count) / \
            float(self._point_count)
        self._points.flags.writeable = False

    def _validate_point_count(self, point_count):
        """validates the given point_count value
        """
        if isinstance(point_count, bool) or \
           not isinstance(point_count, (int, numpy.integer)):
            raise TypeError("CircleGrid.point_count should be an integer not "
                            "%s" % point_count.__class__.__name__)
        if point_count < 4:
            raise GridError("CircleGrid.point_count should be at least 4, "
                            "got %s" % point_count)
        return int(point_count)

    @property
    def point_count(self):
        """The number of points ``m``
        """
        return self._point_count

    @property
    def spacing(self):
        """The spacing ``1/m``
        """
        return 1.0 / self._point_count

    @property
    def points(self):
        """The read-only array ``t_j = j/m``
        """
        return self._points

    def refined(self, factor=2):
        return CircleGrid(factor * self._point_count)

    def to_dict(self):
        return {"m": self._point_count}

    def __eq__(self, other):
        return isinstance(other, CircleGrid) and \
            other.point_count == self.point_count

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return hash(self._point_count)

    def __repr__(self):
        return "<CircleGrid m=%s>" % self._point_count


class GridFunction(object):
    """Samples of a real valued function on a
    :class:`~rabinowitzLab.models.grid.LineGrid`.

    The values are copied into a read-only float array, so a GridFunction
    never changes after it is created. The usual arithmetic between two
    GridFunctions on the same grid, and with scalars, returns new
    GridFunctions.

    :param grid: A :class:`~rabinowitzLab.models.grid.LineGrid` instance.

    :param values: A sequence of ``grid.point_count`` real numbers.
    """

    def __init__(self, grid, values):
        self._grid = self._validate_grid(grid)
        self._values = self._validate_values(values)

    def _validate_grid(self, grid):
        """validates the given grid value
        """
        if not isinstance(grid, LineGrid):
            raise TypeError("GridFunction.grid should be a LineGrid instance "
                            "not %s" % grid.__class__.__name__)
        return grid

    def _validate_values(self, values):
        """validates the given values
        """
        values = numpy.array(values, dtype=float)
        if values.ndim != 1:
            raise ValueError("GridFunction.values should be one dimensional")
        if values.shape[0] != self._grid.point_count:
            raise GridError("GridFunction.values should have %s entries, got "
                            "%s" % (self._grid.point_count, values.shape[0]))
        values.flags.writeable = False
        return values

    @classmethod
    def from_callable(cls, grid, func):
        """samples ``func`` on the points of the given grid
        """
        return cls(grid, func(grid.points))

    @classmethod
    def zeros(cls, grid):
        return cls(grid, numpy.zeros(grid.point_count))

    @classmethod
    def constant(cls, grid, value):
        return cls(grid, numpy.full(grid.point_count, float(value)))

    @property
    def grid(self):
        return self._grid

    @property
    def values(self):
        """The read-only sample array
        """
        return self._values

    @property
    def points(self):
        return self._grid.points

    def with_values(self, values):
        """returns a GridFunction on the same grid holding the given values
        """
        return GridFunction(self._grid, values)

    def _other_values(self, other):
        if isinstance(other, GridFunction):
            check_same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return self.with_values(self._values + self._other_values(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.with_values(self._values - self._other_values(other))

    def __rsub__(self, other):
        return self.with_values(self._other_values(other) - self._values)

    def __mul__(self, other):
        return self.with_values(self._values * self._other_values(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self._values)

    def __len__(self):
        return self._grid.point_count

    def __getitem__(self, index):
        return self._values[index]

    def __repr__(self):
        return "<GridFunction on %r>" % self._grid


def check_same_grid(*functions):
    """raises a GridError if the given GridFunctions are not defined on the
    same LineGrid
    """
    first = functions[0].grid
    for function in functions[1:]:
        if function.grid != first:
            raise GridError("grid mismatch: %r != %r" % (first, function.grid))


def _check_size(grid):
    if grid.point_count < 3:
        raise GridError("the grid should have at least 3 points")


def derivative_values(values, grid, axis=0):
    """second order first derivative of a sample array along the ``axis``
    that runs over the points of ``grid``

    Centered differences at interior points, one-sided second order
    differences at both ends.
    """
    _check_size(grid)
    return numpy.gradient(numpy.asarray(values, dtype=float), grid.spacing,
                          axis=axis, edge_order=2)


def derivative(f):
    """returns the first derivative of the given GridFunction

    Centered differences ``(f[i+1] - f[i-1])/2h`` at interior points and
    second order one-sided differences at the two ends. Exact on
    polynomials of degree two or less.
    """
    _check_size(f.grid)
    return f.with_values(derivative_values(f.values, f.grid))


def second_derivative_values(values, grid, axis=0, boundary="one_sided"):
    """three point Laplacian of a sample array along ``axis``

    :param boundary: ``"one_sided"`` fills the two end values with the second
      order one sided stencil ``(2f0 - 5f1 + 4f2 - f3)/h^2`` (falling back to
      the neighbouring interior value on three point grids), ``"zero"``
      leaves them at zero so the caller can close the system itself.
    """
    _check_size(grid)
    values = numpy.moveaxis(numpy.asarray(values, dtype=float), axis, 0)
    h2 = grid.spacing ** 2
    result = numpy.zeros_like(values)
    result[1:-1] = (values[:-2] - 2.0 * values[1:-1] + values[2:]) / h2

    if boundary == "one_sided":
        if values.shape[0] >= 4:
            result[0] = (2.0 * values[0] - 5.0 * values[1] +
                         4.0 * values[2] - values[3]) / h2
            result[-1] = (2.0 * values[-1] - 5.0 * values[-2] +
                          4.0 * values[-3] - values[-4]) / h2
        else:
            result[0] = result[1]
            result[-1] = result[-2]
    elif boundary != "zero":
        raise ValueError("boundary should be one of 'one_sided' or 'zero' "
                         "not %s" % boundary)

    return numpy.moveaxis(result, 0, axis)


def second_derivative(f, boundary="one_sided"):
    """returns the second derivative of the given GridFunction

    The standard stencil ``(f[i-1] - 2f[i] + f[i+1])/h^2`` at interior
    points; the end values follow ``boundary``, see
    :func:`~rabinowitzLab.models.grid.second_derivative_values`.
    """
    return f.with_values(
        second_derivative_values(f.values, f.grid, boundary=boundary)
    )


def integrate_line_values(values, grid, axis=0):
    """trapezoid rule over ``[-S, S]`` along ``axis``
    """
    return scipy.integrate.trapezoid(numpy.asarray(values, dtype=float),
                                     dx=grid.spacing, axis=axis)


def integrate_line(f):
    """trapezoid rule of the given GridFunction over ``[-S, S]``
    """
    return float(integrate_line_values(f.values, f.grid))


def integrate_circle(g, axis=-1):
    """rectangle rule ``(1/m) sum g_j`` over the circle

    For smooth periodic samples this is spectrally accurate. Works along
    ``axis`` for stacked samples.
    """
    g = numpy.asarray(g, dtype=float)
    result = numpy.mean(g, axis=axis)
    if numpy.ndim(result) == 0:
        return float(result)
    return result


def norms(f):
    """returns the L1, L2, Linf and W22 norms of the given GridFunction as a
    :data:`~rabinowitzLab.models.grid.Norms` tuple

    ``W22^2 = ||f||^2 + ||f'||^2 + ||f''||^2`` with the discrete derivatives
    of this module and trapezoid quadrature.
    """
    values = f.values
    l1 = integrate_line_values(numpy.abs(values), f.grid)
    l2_sq = integrate_line_values(values ** 2, f.grid)
    linf = float(numpy.max(numpy.abs(values))) if len(values) else 0.0
    d1 = derivative_values(values, f.grid)
    d2 = second_derivative_values(values, f.grid)
    w22_sq = l2_sq + integrate_line_values(d1 ** 2, f.grid) + \
        integrate_line_values(d2 ** 2, f.grid)
    return Norms(float(l1), float(numpy.sqrt(l2_sq)), linf,
                 float(numpy.sqrt(w22_sq)))


def derivative_matrix(grid):
    """returns the sparse matrix of
    :func:`~rabinowitzLab.models.grid.derivative`
    """
    _check_size(grid)
    n = grid.point_count
    h = grid.spacing
    rows = []
    cols = []
    data = []

    def add(i, j, value):
        rows.append(i)
        cols.append(j)
        data.append(value / (2.0 * h))

    for j, value in zip((0, 1, 2), (-3.0, 4.0, -1.0)):
        add(0, j, value)
    for i in range(1, n - 1):
        add(i, i - 1, -1.0)
        add(i, i + 1, 1.0)
    for j, value in zip((n - 3, n - 2, n - 1), (1.0, -4.0, 3.0)):
        add(n - 1, j, value)

    return scipy.sparse.csr_matrix((data, (rows, cols)), shape=(n, n))


# circle calculus
PERIODIC_MODES = ("centered", "spectral")


def _periodic_mode(mode):
    if mode is None:
        from rabinowitzLab import conf
        mode = conf.periodic_derivative
    if mode not in PERIODIC_MODES:
        raise ValueError("periodic derivative mode should be one of %s not "
                         "%s" % (", ".join(PERIODIC_MODES), mode))
    return mode


def periodic_derivative(values, circle, mode=None, axis=-1):
    """derivative of periodic samples on the given CircleGrid

    :param mode: ``"centered"`` for ``(g[j+1] - g[j-1])/(2/m)`` or
      ``"spectral"`` for Fourier differentiation (the Nyquist mode is
      dropped). Skipping it uses ``periodic_derivative`` from the config.
    """
    mode = _periodic_mode(mode)
    values = numpy.asarray(values, dtype=float)
    m = circle.point_count
    if values.shape[axis] != m:
        raise GridError("periodic samples should have %s entries along the "
                        "circle axis" % m)

    if mode == "centered":
        return (numpy.roll(values, -1, axis=axis) -
                numpy.roll(values, 1, axis=axis)) / (2.0 * circle.spacing)

    wave_numbers = 2.0j * numpy.pi * numpy.fft.rfftfreq(m, d=1.0 / m)
    if m % 2 == 0:
        wave_numbers[-1] = 0.0
    shape = [1] * values.ndim
    shape[axis] = wave_numbers.shape[0]
    coefficients = numpy.fft.rfft(values, axis=axis)
    return numpy.fft.irfft(coefficients * wave_numbers.reshape(shape), n=m,
                           axis=axis)


def periodic_derivative_matrix(circle, mode=None):
    """returns the matrix of
    :func:`~rabinowitzLab.models.grid.periodic_derivative`, sparse for the
    centered mode and dense (as a sparse container) for the spectral one
    """
    mode = _periodic_mode(mode)
    m = circle.point_count
    if mode == "centered":
        factor = 1.0 / (2.0 * circle.spacing)
        return scipy.sparse.diags(
            [factor, -factor, factor, -factor],
            [1, -1, -(m - 1), m - 1],
            shape=(m, m), format="csr"
        )
    dense = periodic_derivative(numpy.eye(m), circle, mode="spectral", axis=0)
    return scipy.sparse.csr_matrix(dense)


def observed_order(coarse_error, fine_error, ratio=2.0):
    """returns the observed convergence order of two errors measured on
    grids whose spacings differ by ``ratio``
    """
    if coarse_error <= 0 or fine_error <= 0:
        return float("inf")
    return float(numpy.log(coarse_error / fine_error) / numpy.log(ratio))
