"""Fourier transforms on lines, Cauchy integrals, Plemelj values, convolution.

Conventions: F(x) = (1/sqrt(2pi)) int f(t) e^{ixt} dt and its inverse with
kernel e^{-ixt}.  A TimeGrid of length N with half-width T transforms to a
LineGrid with half-width R = N pi / (2T); the pair is exactly invertible.

The inverse direction carries an automatic tail-pole correction (see
_tails): line data decaying like 1/x is split into a fitted rational model,
transformed in closed form, plus a fast-decaying residual handled by the
FFT.  The forward direction applies an Euler-Maclaurin correction for a
derivative kink at t = 0, estimated from the samples, so half-line shaped
inputs keep spectral accuracy.
"""

from __future__ import annotations

import math

import numpy as np

from . import _tails
from .core import LineGrid, TimeGrid
from .errors import GridError, OnLineError

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def fourier(f: TimeGrid) -> LineGrid:
    """Transform a TimeGrid to the dual LineGrid (kernel e^{ixt})."""
    n = f.count
    dt = f.spacing
    values = _tails.centered_forward(f.samples, dt)
    # Euler-Maclaurin correction for a t=0 kink at the middle node:
    # error of the trapezoid is (dt^2/12)[f'] - (dt^4/720)([f'''] + 3(ix)^2 [f'])
    v = f.samples
    m = n // 2
    if m >= 4:
        d1p = (-25 * v[m] + 48 * v[m + 1] - 36 * v[m + 2] + 16 * v[m + 3] - 3 * v[m + 4]) / (12 * dt)
        d1m = (25 * v[m] - 48 * v[m - 1] + 36 * v[m - 2] - 16 * v[m - 3] + 3 * v[m - 4]) / (12 * dt)
        d3p = (-v[m] + 3 * v[m + 1] - 3 * v[m + 2] + v[m + 3]) / dt**3
        d3m = (v[m] - 3 * v[m - 1] + 3 * v[m - 2] - v[m - 3]) / dt**3
        j1 = d1p - d1m
        j3 = d3p - d3m
        R = _tails.dual_half_width(f.half_width, f.count)
        x = -R + np.arange(n) * (2.0 * R / n)
        taper = np.exp(-np.abs(x * dt / 0.8) ** 4)
        values = values + taper * (
            (dt**2 / 12.0) * j1 - (dt**4 / 720.0) * (j3 + 3 * (1j * x) ** 2 * j1)
        ) / _SQRT_2PI
    R = _tails.dual_half_width(f.half_width, f.count)
    return LineGrid(offset=f.weight_offset, half_width=R, count=n, samples=values)


def inverse_fourier(F: LineGrid) -> TimeGrid:
    """Transform a LineGrid to the dual TimeGrid (kernel e^{-ixt})."""
    grid, _ = analyzed_inverse(F)
    return grid


def analyzed_inverse(F: LineGrid):
    """inverse_fourier plus the tail analysis it was computed from."""
    analysis = _tails.analyze_line(F.abscissae, F.samples)
    T = _tails.dual_half_width(F.half_width, F.count)
    grid = TimeGrid(
        half_width=T, count=F.count, samples=analysis.time_values,
        weight_offset=F.offset,
    )
    return grid, analysis


def cauchy(F: LineGrid, z: complex) -> complex:
    """Cauchy-type integral (1/2pi i) int F(tau)/(tau - z) dtau along the
    grid's line, for z off the line.

    Trapezoid quadrature of the tail-corrected residual over the sampled
    range plus the exact Cauchy transform of the fitted tail model.
    """
    z = complex(z)
    if z.imag == F.offset:
        raise OnLineError(
            "z lies on the grid's line; use plemelj_boundary for boundary values"
        )
    x = F.abscissae
    model = _tails.fit_tail_model(x, F.samples, _model_distance(F))
    residual = F.samples - _tails.model_line_values(model, x)
    w = np.ones(F.count)
    w[0] = w[-1] = 0.5
    zx = z - 1j * F.offset  # line coordinates
    core = np.sum(w * residual / (x - zx)) * F.spacing / (2j * np.pi)
    if z.imag > F.offset:
        tail = _tails.model_point_values(model, np.array([zx]), side="plus")[0]
    else:
        tail = -_tails.model_point_values(model, np.array([zx]), side="minus")[0]
    return complex(core + tail)


def _model_distance(F: LineGrid) -> float:
    rough = _tails.centered_inverse(F.samples, F.spacing)
    T = _tails.dual_half_width(F.half_width, F.count)
    t = -T + np.arange(F.count) * (math.pi / F.half_width)
    mag = np.abs(rough)
    pos = t >= 0
    rp, _ = _tails.fit_decay_rate(t[pos], mag[pos])
    rm, _ = _tails.fit_decay_rate(-t[~pos][::-1], mag[~pos][::-1])
    rate = min(rp, rm)
    if not math.isfinite(rate) or rate <= 0:
        rate = 1.0
    return min(max(0.8 * rate, 0.25), 20.0)


def plemelj_boundary(F: LineGrid, x: float):
    """Boundary values (plus, minus) of the Cauchy integral at a point x
    strictly inside the sampled range, satisfying

        plus - minus = F(x),   plus + minus = (1/pi i) PV int F/(tau - x).

    The principal value uses symmetric pairing around x (odd differences),
    excluding the singular cell and restoring it from a local linear model.
    """
    x = float(x)
    R = F.half_width
    if not (-R < x < R - F.spacing):
        raise GridError(f"x={x} outside the open sampled range (-{R}, {R})")
    dx = F.spacing
    xs = F.abscissae
    model = _tails.fit_tail_model(xs, F.samples, _model_distance(F))
    residual = F.samples - _tails.model_line_values(model, xs)

    fx_res = _interp(xs, residual, x)
    fx_model = _tails.model_line_values(model, np.array([x]))[0]
    fx = fx_res + fx_model

    # symmetric principal value of the residual around x
    k_max = int(min((x + R) / dx, (R - dx - x) / dx)) - 2
    if k_max < 3:
        raise GridError("x too close to the grid edge for the symmetric rule")
    u = np.arange(1, k_max + 1) * dx
    phi = (_interp(xs, residual, x + u) - _interp(xs, residual, x - u)) / u
    phi0 = (4.0 * phi[0] - phi[1]) / 3.0  # even extrapolation to u = 0
    sym = dx * (0.5 * phi0 + np.sum(phi[:-1]) + 0.5 * phi[-1])
    # leftover asymmetric piece: nodes beyond the symmetric window
    lo, hi = x - (k_max + 0.5) * dx, x + (k_max + 0.5) * dx
    far = (xs < lo) | (xs > hi)
    leftover = dx * np.sum(residual[far] / (xs[far] - x))
    pv_residual = sym + leftover

    s_val = (pv_residual / (1j * np.pi)
             + _tails.model_point_values(model, np.array([x]), side="plus")[0]
             - _tails.model_point_values(model, np.array([x]), side="minus")[0])
    plus = 0.5 * (fx + s_val)
    minus = 0.5 * (s_val - fx)
    return complex(plus), complex(minus)


def _interp(xs, values, x):
    """Cubic 4-point Lagrange interpolation on the uniform grid."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    dx = xs[1] - xs[0]
    pos = (x - xs[0]) / dx
    j = np.clip(np.floor(pos).astype(int), 1, len(xs) - 3)
    s = pos - j  # in [-0.x, 1.x] around node j
    vm1, v0, v1, v2 = values[j - 1], values[j], values[j + 1], values[j + 2]
    w_m1 = -s * (s - 1) * (s - 2) / 6.0
    w_0 = (s + 1) * (s - 1) * (s - 2) / 2.0
    w_1 = -(s + 1) * s * (s - 2) / 2.0
    w_2 = (s + 1) * s * (s - 1) / 6.0
    out = w_m1 * vm1 + w_0 * v0 + w_1 * v1 + w_2 * v2
    return out if out.shape != (1,) else out[0]


def convolve(f: TimeGrid, g: TimeGrid) -> TimeGrid:
    """Convolution with prefactor 1/sqrt(2pi), so that
    fourier(convolve(f, g)) = fourier(f) * fourier(g)."""
    if (f.half_width, f.count, f.weight_offset) != (g.half_width, g.count, g.weight_offset):
        raise GridError("convolve requires identical grids")
    n = f.count
    fa = np.fft.fft(f.samples, 2 * n)
    ga = np.fft.fft(g.samples, 2 * n)
    conv = np.fft.ifft(fa * ga)[n // 2 : n // 2 + n]
    samples = conv * f.spacing / _SQRT_2PI
    return TimeGrid(f.half_width, n, samples, f.weight_offset)
