"""Scalar functional-equation solver: A(x) Phi+(x) + Psi-(x) + C(x) = 0.

The pipeline factors A, splits C / A-, and closes with the Liouville
argument at polynomial degree zero: the entire function joining the two
half-plane sides vanishes, so

    Phi+ = -C+ / A+        Psi- = -A- C-.

Half-line convolution equations reduce to this form through the Fourier
transform; forward_apply provides the independent quadrature of the
original integral operator for round-trip checks.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _tails, factor as _factor, split as _split, transforms
from .core import LineGrid, StripClass, TimeGrid
from .errors import (
    GridError,
    KernelLimitError,
    KernelVanishesError,
    NumericsWarning,
    UnderdeterminedProblemError,
)

_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class FirstKind:
    """Equation integral k(x-y) f(y) dy = g(x) on x > 0."""


@dataclass(frozen=True)
class SecondKind:
    """Equation f(x) + lam * integral k(x-y) f(y) dy = g(x) on x > 0."""

    lam: complex


@dataclass(frozen=True)
class HalfLineConvProblem:
    """Half-line convolution problem: kernel samples, right-hand side
    restricted to x > 0 (negative-axis samples zeroed), and the kind."""

    kernel: TimeGrid
    rhs: TimeGrid
    form: FirstKind | SecondKind

    def __post_init__(self):
        if (self.kernel.half_width, self.kernel.count) != (
                self.rhs.half_width, self.rhs.count):
            raise GridError("kernel and rhs must share the same time grid")
        restricted = self.rhs.samples.copy()
        restricted[self.rhs.abscissae < 0] = 0.0
        object.__setattr__(self, "rhs", self.rhs.with_samples(restricted))


@dataclass(frozen=True)
class WhProblem:
    """Functional-equation data: kernel A and forcing C on a common line,
    the strip the equation extends to (None when only the line itself is
    available), and the Liouville polynomial degree bound."""

    kernel: LineGrid
    forcing: LineGrid
    strip: StripClass | None = None
    growth_degree: int = 0

    def __post_init__(self):
        if (self.kernel.offset, self.kernel.half_width, self.kernel.count) != (
                self.forcing.offset, self.forcing.half_width, self.forcing.count):
            raise GridError("kernel and forcing must share the same line grid")


def _decay_rates(grid: TimeGrid):
    t = grid.abscissae
    mag = np.abs(grid.samples)
    peak = float(np.max(mag)) if grid.count else 0.0
    pos = t >= 0
    rp, _ = _tails.fit_decay_rate(t[pos], mag[pos], peak=peak)
    rm, _ = _tails.fit_decay_rate(-t[~pos][::-1], mag[~pos][::-1], peak=peak)
    return rp, rm


def halfline_transform(g: TimeGrid, side: str = "plus") -> LineGrid:
    """Transform of g restricted to one half-axis, with the t = 0 sample
    treated as the one-sided value (half trapezoid weight) and the
    endpoint-exponential correction of the half-line quadrature."""
    from .core import HalfPlaneHandle, Side

    n = g.count
    mid = n // 2
    if side == "plus":
        times = g.abscissae[mid:]
        values = g.samples[mid:].copy()
        sd = Side.ABOVE_PLUS
    else:
        times = g.abscissae[: mid + 1]
        values = g.samples[: mid + 1].copy()
        sd = Side.BELOW_MINUS
    weights = np.ones(len(times))
    weights[0] = weights[-1] = 0.5
    handle = HalfPlaneHandle(
        side=sd, boundary_offset=g.weight_offset if sd is Side.ABOVE_PLUS
        else g.weight_offset, line_offset=g.weight_offset,
        half_width=_tails.dual_half_width(g.half_width, n), count=n,
        times=times, values=values, weights=weights,
    )
    # boundary_offset equal to the line itself would refuse the
    # evaluation; line values on the source line are always defined
    handle.boundary_offset = g.weight_offset - 1e-9 if sd is Side.ABOVE_PLUS \
        else g.weight_offset + 1e-9
    samples = handle.line_values(g.weight_offset, corrected=True)
    R = _tails.dual_half_width(g.half_width, n)
    return LineGrid(g.weight_offset, R, n, samples)


def reduce_to_wh(p: HalfLineConvProblem) -> WhProblem:
    """Fourier image of the half-line problem.

    A = sqrt(2pi) K for the first kind, 1 + lam sqrt(2pi) K for the
    second; C = -G+ with G+ the half-line transform of the data.  The
    strip is class arithmetic from the fitted decay rates of kernel and
    data, None when it degenerates to the line.
    """
    K = transforms.fourier(p.kernel)
    G_plus = halfline_transform(p.rhs, "plus")
    if isinstance(p.form, SecondKind):
        A = K.with_samples(1.0 + p.form.lam * _SQRT_2PI * K.samples)
    else:
        A = K.with_samples(_SQRT_2PI * K.samples)
    if float(np.min(np.abs(A.samples))) <= 1e-12:
        raise KernelVanishesError("kernel transform vanishes on the line")
    C = G_plus.with_samples(-G_plus.samples)

    k_plus, k_minus = _decay_rates(p.kernel)
    g_plus, _ = _decay_rates(p.rhs)
    c = p.kernel.weight_offset
    lower = c - min(k_plus, g_plus)
    upper = c + k_minus
    strip = StripClass(lower, upper) if lower < upper else None
    return WhProblem(kernel=A, forcing=C, strip=strip, growth_degree=0)


@dataclass(frozen=True)
class WhSolution:
    """Solution handles and the residual of the functional equation on
    the working line."""

    phi_plus: "_QuotientHandle"
    psi_minus: "_ProductHandle"
    factorization: _factor.FactorPair
    residual: float


class _QuotientHandle:
    """Phi+ = -C+(z) / A+(z): analytic above the line."""

    def __init__(self, c_plus, a_plus):
        self.c_plus = c_plus
        self.a_plus = a_plus

    @property
    def side(self):
        return self.c_plus.side

    @property
    def boundary_offset(self):
        return max(self.c_plus.boundary_offset, self.a_plus.boundary_offset)

    @property
    def line_offset(self):
        return self.c_plus.line_offset

    @property
    def half_width(self):
        return self.c_plus.half_width

    @property
    def count(self):
        return self.c_plus.count

    @property
    def evaluator(self):
        return self.__call__

    def __call__(self, z):
        return -self.c_plus(z) / self.a_plus(z)

    def line_values(self, offset, corrected=True):
        return -self.c_plus.line_values(offset, corrected) \
            / self.a_plus.line_values(offset, corrected)


class _ProductHandle:
    """Psi- = -A-(z) C-(z): analytic below the line."""

    def __init__(self, c_minus, a_minus):
        self.c_minus = c_minus
        self.a_minus = a_minus

    @property
    def side(self):
        return self.c_minus.side

    @property
    def boundary_offset(self):
        return min(self.c_minus.boundary_offset, self.a_minus.boundary_offset)

    @property
    def line_offset(self):
        return self.c_minus.line_offset

    @property
    def half_width(self):
        return self.c_minus.half_width

    @property
    def count(self):
        return self.c_minus.count

    @property
    def evaluator(self):
        return self.__call__

    def __call__(self, z):
        return -self.a_minus(z) * self.c_minus(z)

    def line_values(self, offset, corrected=True):
        return -self.a_minus.line_values(offset, corrected) \
            * self.c_minus.line_values(offset, corrected)


def wh_solve(p: WhProblem) -> WhSolution:
    """Solve A Phi+ + Psi- + C = 0 with the degree-zero Liouville closure.

    Raises UnderdeterminedProblemError for growth_degree > 0 (auxiliary
    conditions would be needed), KernelLimitError when A does not tend
    to 1 at the grid ends, IndexNotZeroError for nonzero index.
    """
    if p.growth_degree > 0:
        raise UnderdeterminedProblemError(
            "undetermined polynomial coefficients: supply auxiliary conditions"
        )
    A = p.kernel
    l_left, l_right = _tails.fit_limit(A.abscissae, A.samples)
    if abs(l_left - 1.0) > 0.05 or abs(l_right - 1.0) > 0.05:
        raise KernelLimitError(
            f"kernel limit != 1 at the grid ends "
            f"(fitted {l_left:.4g} and {l_right:.4g})"
        )
    pair = _factor.factor_line(A)
    a_minus_line = pair.minus.line_values(A.offset, corrected=False)
    D = A.with_samples(p.forcing.samples / a_minus_line)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NumericsWarning)
        parts = _split.split_line(D)
    phi = _QuotientHandle(parts.plus, pair.plus)
    psi = _ProductHandle(parts.minus, pair.minus)
    residual = float(np.max(np.abs(
        A.samples * phi.line_values(A.offset, corrected=False)
        + psi.line_values(A.offset, corrected=False)
        + p.forcing.samples
    )))
    return WhSolution(phi_plus=phi, psi_minus=psi, factorization=pair,
                      residual=residual)


def solve_halfline(p: HalfLineConvProblem):
    """Solve the half-line convolution problem; returns (f, solution).

    f is a TimeGrid supported on t >= 0 whose samples carry the one-sided
    limit at t = 0 (cubic extrapolation replaces the transform's two-sided
    average there).
    """
    wh = reduce_to_wh(p)
    sol = wh_solve(wh)
    phi_line = sol.phi_plus.line_values(wh.kernel.offset, corrected=False)
    grid = LineGrid(wh.kernel.offset, wh.kernel.half_width, wh.kernel.count,
                    phi_line)
    f_time = transforms.inverse_fourier(grid)
    samples = f_time.samples.copy()
    t = f_time.abscissae
    samples[t < 0] = 0.0
    mid = len(samples) // 2
    samples[mid] = 3.0 * samples[mid + 1] - 3.0 * samples[mid + 2] + samples[mid + 3]
    f = TimeGrid(p.kernel.half_width, p.kernel.count, samples,
                 p.kernel.weight_offset)
    return f, sol


def forward_apply(p: HalfLineConvProblem, f: TimeGrid) -> TimeGrid:
    """Direct quadrature of integral_0^inf k(x - y) f(y) dy on the grid.

    Trapezoid in y with Euler-Maclaurin corrections for the y = 0
    endpoint and for the kernel's derivative kink where y crosses x,
    estimated from the samples.  Independent of the transform pipeline;
    this is the oracle for round-trip checks.
    """
    if (p.kernel.half_width, p.kernel.count) != (f.half_width, f.count):
        raise GridError("f must live on the kernel's grid")
    k = p.kernel.samples
    n = f.count
    dy = f.spacing
    mid = n // 2
    fv = f.samples.copy()
    fv[f.abscissae < 0] = 0.0
    w = np.ones(n)
    w[mid] = 0.5  # y = 0 endpoint of the half-line integral
    conv = np.convolve(k, np.where(f.abscissae >= 0, w * fv, 0.0))
    g = conv[mid: mid + n] * dy

    x = f.abscissae
    # Euler-Maclaurin y=0 endpoint term: phi'(0+) with phi = k(x-y) f(y)
    kp = np.gradient(k, dy)
    f0 = fv[mid]
    fp0 = (-3.0 * fv[mid] + 4.0 * fv[mid + 1] - fv[mid + 2]) / (2.0 * dy)
    phi_p0 = -kp * f0 + k * fp0          # indexed by x - 0 = x
    g = g + (dy**2 / 12.0) * phi_p0
    # interior kink at y = x (only for x > 0): jump of d/dy k(x-y) f(y)
    # is -[k'](0) f(x) with [k'] the kernel's derivative jump at 0
    jk = ((-3.0 * k[mid] + 4.0 * k[mid + 1] - k[mid + 2])
          - (3.0 * k[mid] - 4.0 * k[mid - 1] + k[mid - 2])) / (2.0 * dy)
    g = g + (dy**2 / 12.0) * jk * fv * (x > 0)
    return TimeGrid(f.half_width, n, g, f.weight_offset)


def solve_riemann_hilbert(D: LineGrid, H: LineGrid):
    """Solve D(t) F-(t) + H(t) = F+(t) on the line.

    Factor D = D+ D- (zero index required), split H / D+ = S+ + S-;
    analytic continuation and Liouville give F+ = D+ S+ and
    F- = -S- / D-.  Returns (f_plus, f_minus, factorization).
    """
    if (D.offset, D.half_width, D.count) != (H.offset, H.half_width, H.count):
        raise GridError("coefficient and data must share the same grid")
    pair = _factor.factor_line(D)
    d_plus_line = pair.plus.line_values(D.offset, corrected=False)
    S = D.with_samples(H.samples / d_plus_line)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NumericsWarning)
        parts = _split.split_line(S)
    f_plus = _RHPlusHandle(parts.plus, pair.plus)
    f_minus = _QuotientHandle(parts.minus, pair.minus)
    return f_plus, f_minus, pair


class _RHPlusHandle:
    """F+ = D+(z) S+(z)."""

    def __init__(self, s_plus, d_plus):
        self.s_plus = s_plus
        self.d_plus = d_plus

    @property
    def side(self):
        return self.s_plus.side

    @property
    def boundary_offset(self):
        return max(self.s_plus.boundary_offset, self.d_plus.boundary_offset)

    @property
    def line_offset(self):
        return self.s_plus.line_offset

    @property
    def half_width(self):
        return self.s_plus.half_width

    @property
    def count(self):
        return self.s_plus.count

    @property
    def evaluator(self):
        return self.__call__

    def __call__(self, z):
        return self.d_plus(z) * self.s_plus(z)

    def line_values(self, offset, corrected=True):
        return self.d_plus.line_values(offset, corrected) \
            * self.s_plus.line_values(offset, corrected)
