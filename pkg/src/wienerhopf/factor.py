"""Winding-number index, index normalization, multiplicative factorization.

factor_line computes K = plus * minus with both factors analytic and
zero-free in their half-planes: take the continuous logarithm (single
valued since the index is zero), split it additively, exponentiate.
The factors carry the natural normalization plus -> 1 at +i infinity;
the measured value of that limit is reported on the pair.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _tails, split as _split
from .core import HalfPlaneHandle, LineGrid, Side, StripClass
from .errors import (
    CrossLineMismatchError,
    EvalDomainError,
    IndexNotZeroError,
    InequivalentFactorizationsError,
    KernelVanishesError,
    NonIntegralIndexError,
    NumericsWarning,
    OutsideDomainError,
)

_VANISH_TOL = 1e-12


class ExpHandle:
    """Multiplicative half-plane factor scale * prefactor(z) * exp(log_handle).

    The rational prefactor carries the Mobius pieces reattached after
    index normalization; it is analytic and zero-free in the handle's
    half-plane.  time_samples expose the inverse transform of the
    logarithm, the quantity the Paley-Wiener certificates constrain.
    """

    def __init__(self, log_handle: HalfPlaneHandle, scale: complex = 1.0,
                 prefactor=None, boundary_limit: float | None = None):
        self.log_handle = log_handle
        self.scale = complex(scale)
        self.prefactor = prefactor
        self._boundary_limit = boundary_limit

    @property
    def side(self) -> Side:
        return self.log_handle.side

    @property
    def boundary_offset(self) -> float:
        b = self.log_handle.boundary_offset
        if self._boundary_limit is None:
            return b
        if self.side is Side.ABOVE_PLUS:
            return max(b, self._boundary_limit)
        return min(b, self._boundary_limit)

    @property
    def line_offset(self) -> float:
        return self.log_handle.line_offset

    @property
    def half_width(self) -> float:
        return self.log_handle.half_width

    @property
    def count(self) -> int:
        return self.log_handle.count

    @property
    def evaluator(self) -> Callable:
        return self.__call__

    @property
    def time_samples(self):
        return self.log_handle.time_samples

    def _domain_check(self, im):
        bad = im <= self.boundary_offset if self.side is Side.ABOVE_PLUS \
            else im >= self.boundary_offset
        if np.any(bad):
            from .errors import OutsideDomainError as _ODE
            raise _ODE(
                f"{self.side.value} factor is only valid "
                f"{'above' if self.side is Side.ABOVE_PLUS else 'below'} "
                f"Im z = {self.boundary_offset:.6g}"
            )

    def __call__(self, z):
        zz = np.asarray(z, dtype=complex)
        self._domain_check(np.atleast_1d(zz).imag)
        out = self.scale * np.exp(self.log_handle(z))
        if self.prefactor is not None:
            out = out * self.prefactor(zz)
        return out

    def line_values(self, offset: float, corrected: bool = True) -> np.ndarray:
        self._domain_check(np.asarray(offset))
        out = self.scale * np.exp(self.log_handle.line_values(offset, corrected))
        if self.prefactor is not None:
            n = self.count
            x = -self.half_width + np.arange(n) * (2.0 * self.half_width / n)
            out = out * self.prefactor(x + 1j * offset)
        return out


@dataclass(frozen=True)
class FactorPair:
    """Multiplicative factorization plus * minus of a line kernel.

    normalization is the measured limit of plus along +i infinity (the
    factors are built so that limit is 1; its deviation is a certificate,
    and the uniqueness constant freedom is left untouched).
    index_removed records the winding number cancelled by
    normalize_index before factoring, 0 when factoring directly.
    """

    plus: ExpHandle
    minus: ExpHandle
    normalization: complex
    index_removed: int
    source_line: float

    def reconstruct(self, grid: LineGrid, corrected: bool = True) -> np.ndarray:
        return (_split._handle_values_on(self.plus, grid, corrected)
                * _split._handle_values_on(self.minus, grid, corrected))


# ---------------------------------------------------------------------------
# Index


def index_with_residual(K: LineGrid) -> tuple[int, float]:
    """Winding number of K along the line and the rounding residual.

    The unwrapped argument across the grid is closed through the fitted
    end limit; the total divided by 2 pi must land near an integer.
    """
    samples = K.samples
    if float(np.min(np.abs(samples))) <= _VANISH_TOL:
        raise KernelVanishesError("kernel vanishes on line")
    l_left, l_right = _tails.fit_limit(K.abscissae, samples)
    if abs(l_right) > 0 and abs(l_left - l_right) > 0.1 * abs(l_right):
        warnings.warn(
            f"kernel end limits disagree ({l_left:.6g} vs {l_right:.6g}); "
            "winding closure is approximate",
            NumericsWarning, stacklevel=2,
        )
    theta = np.unwrap(np.angle(samples))
    total = theta[-1] - theta[0]
    limit = l_right if abs(l_right) > 0 else 1.0 + 0j
    closure_right = _principal(np.angle(limit) - np.angle(samples[-1]))
    closure_left = _principal(np.angle(samples[0]) - np.angle(limit))
    raw = (total + closure_right + closure_left) / (2.0 * math.pi)
    kappa = int(np.round(raw))
    residual = float(abs(raw - kappa))
    if residual > 0.05:
        raise NonIntegralIndexError(
            f"index not integral: winding {raw:.4f} is {residual:.3f} from "
            "an integer; insufficient resolution"
        )
    return kappa, residual


def _principal(angle: float) -> float:
    return float((angle + math.pi) % (2.0 * math.pi) - math.pi)


def index(K: LineGrid) -> int:
    """Winding number (argument-principle index) of K along its line."""
    return index_with_residual(K)[0]


def normalize_index(K: LineGrid, kappa: int) -> LineGrid:
    """Multiply K by ((z-i)/(z+i))^-kappa so the result has index zero."""
    if kappa == 0:
        return K
    z = K.points
    factor = ((z - 1j) / (z + 1j)) ** (-kappa)
    return K.with_samples(K.samples * factor)


# ---------------------------------------------------------------------------
# Factorization


def _continuous_log(K: LineGrid) -> LineGrid:
    logk = np.log(np.abs(K.samples)) + 1j * np.unwrap(np.angle(K.samples))
    return K.with_samples(logk)


def factor_line(K: LineGrid) -> FactorPair:
    """Factor a zero-index kernel on its line into plus * minus.

    Raises IndexNotZeroError for nonzero index (run normalize_index
    first) and KernelVanishesError for (near-)zeros on the line.
    """
    kappa, _ = index_with_residual(K)
    if kappa != 0:
        raise IndexNotZeroError(
            f"kernel has index {kappa}; apply normalize_index before factoring"
        )
    ends = max(abs(K.samples[0] - 1.0), abs(K.samples[-1] - 1.0))
    if ends > 0.1:
        warnings.warn(
            f"kernel does not approach 1 at the grid ends (deviation {ends:.3g}); "
            "factor accuracy is degraded",
            NumericsWarning, stacklevel=2,
        )
    logk = _continuous_log(K)
    parts = _split.split_line(logk)
    plus = ExpHandle(parts.plus)
    minus = ExpHandle(parts.minus)
    normalization = _limit_at_top(parts.plus)
    return FactorPair(
        plus=plus, minus=minus, normalization=normalization,
        index_removed=0, source_line=K.offset,
    )


def _limit_at_top(log_plus: HalfPlaneHandle) -> complex:
    """exp of the log-factor evaluated at z = i * 10 R: the certificate
    that the plus factor tends to 1 along the imaginary axis."""
    z = 1j * (log_plus.line_offset + 10.0 * log_plus.half_width)
    return complex(np.exp(log_plus(z)))


def factor_with_normalization(K: LineGrid) -> FactorPair:
    """index -> normalize_index -> factor_line -> reattach the removed
    Mobius power to the factors.

    The index-kappa kernel is K = K0 * ((z-i)/(z+i))^kappa with K0 of
    index zero; K0 = P+ P- gives

        K = [P+ / (z+i)^kappa] * [P- * (z-i)^kappa],

    each bracket analytic and zero-free in its half-plane, so the pair
    still multiplies back to K on the line.
    """
    kappa, _ = index_with_residual(K)
    pair = factor_line(normalize_index(K, kappa))
    if kappa == 0:
        return pair
    plus = ExpHandle(
        pair.plus.log_handle, pair.plus.scale,
        prefactor=lambda z: (z + 1j) ** (-kappa),
        boundary_limit=-1.0 + 1e-9 if kappa > 0 else None,
    )
    minus = ExpHandle(
        pair.minus.log_handle, pair.minus.scale,
        prefactor=lambda z: (z - 1j) ** kappa,
        boundary_limit=1.0 - 1e-9 if kappa < 0 else None,
    )
    return FactorPair(
        plus=plus, minus=minus, normalization=pair.normalization,
        index_removed=kappa, source_line=pair.source_line,
    )


def factor_strip(K_on_a: LineGrid, K_on_b: LineGrid, strip: StripClass,
                 tol: float = 1e-6) -> FactorPair:
    """Factor a kernel given on two lines of its strip of analyticity.

    Factors on the lower line; the upper line certifies the extension:
    K on the upper line divided by the plus factor (evaluated there, a
    stable upward continuation) must be a minus-type function, measured
    by splitting it and taking the sup of its spurious plus part.  An
    index mismatch between the lines means the kernel must vanish
    somewhere inside the strip.
    """
    if not K_on_a.offset < K_on_b.offset:
        raise KernelVanishesError("lower grid must lie below upper grid")
    if (K_on_a.half_width, K_on_a.count) != (K_on_b.half_width, K_on_b.count):
        raise KernelVanishesError("the two grids must share half_width and count")
    kappa_a, _ = index_with_residual(K_on_a)
    kappa_b, _ = index_with_residual(K_on_b)
    if kappa_a != kappa_b:
        raise KernelVanishesError(
            f"kernel vanishes inside strip: index {kappa_a} on the lower line "
            f"but {kappa_b} on the upper line"
        )
    pair = factor_line(K_on_a)
    disc = _upper_line_discrepancy(pair, K_on_b)
    if disc > tol:
        raise CrossLineMismatchError(
            "factorization does not extend to the upper line", disc
        )
    return pair


def _upper_line_discrepancy(pair: FactorPair, K_on_b: LineGrid) -> float:
    """Sup norm of the plus-type content of K_b / plus(b-line): zero for
    a factorization whose minus factor extends across the strip.

    Measured on the central quarter of the grid, where the kernel
    carries its structure and the upward continuation of the plus factor
    is at full accuracy.
    """
    plus_b = pair.plus.line_values(K_on_b.offset)
    implied_minus = K_on_b.samples / plus_b
    n = K_on_b.count
    lo, hi = 3 * n // 8, 5 * n // 8
    inner = LineGrid(
        offset=K_on_b.offset, half_width=K_on_b.half_width / 4.0,
        count=n // 4, samples=implied_minus[lo:hi],
    )
    l_left, l_right = _tails.fit_limit(inner.abscissae, inner.samples)
    limit = 0.5 * (l_left + l_right)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NumericsWarning)
        parts = _split.split_line(inner.with_samples(inner.samples - limit))
    spurious = parts.plus.line_values(inner.offset, corrected=False)
    return float(np.max(np.abs(spurious)))


def cross_line_check_factors(pair: FactorPair, other_line: LineGrid) -> float:
    """Sup-norm discrepancy of plus * minus against samples on another
    line; inf if a handle refuses the line."""
    try:
        recon = pair.reconstruct(other_line)
    except OutsideDomainError:
        return float("inf")
    return float(np.max(np.abs(recon - other_line.samples)))


def uniqueness_constant(a: FactorPair, b: FactorPair, probe: LineGrid,
                        cov_tol: float = 1e-6) -> complex:
    """The constant c with a.plus = c * b.plus and a.minus = b.minus / c.

    Evaluated pointwise on the probe grid; a coefficient of variation
    above cov_tol, or an inconsistent minus ratio, means the two pairs
    do not factor the same kernel.
    """
    z = probe.points
    ratio_plus = a.plus(z) / b.plus(z)
    c = complex(np.mean(ratio_plus))
    if c == 0:
        raise InequivalentFactorizationsError("plus ratio vanishes on probe")
    cov = float(np.std(ratio_plus) / abs(c))
    if cov > cov_tol:
        raise InequivalentFactorizationsError(
            f"plus ratio is not constant (coefficient of variation {cov:.3e})"
        )
    ratio_minus = a.minus(z) / b.minus(z)
    dev = float(np.max(np.abs(ratio_minus * c - 1.0)))
    if dev > 100 * cov_tol:
        raise InequivalentFactorizationsError(
            f"minus ratio is not the reciprocal constant (deviation {dev:.3e})"
        )
    return c


# ---------------------------------------------------------------------------
# Generalized-Liouville rational reconstruction


@dataclass(frozen=True)
class PrincipalPartSpec:
    """Constant, polynomial part (coefficients of z^1..z^m), and pole
    principal parts: (location, (c_1, ..., c_m)) with c_j / (z - z_k)^j."""

    constant: complex = 0j
    polynomial: tuple = ()
    poles: tuple = ()

    def __post_init__(self):
        locations = [p for p, _ in self.poles]
        if len(set(locations)) != len(locations):
            raise EvalDomainError("pole locations must be distinct")


def rational_from_principal_parts(spec: PrincipalPartSpec) -> Callable:
    """Evaluator for c + G0(z) + sum of pole principal parts.

    Raises EvalDomainError when evaluated at a listed pole.
    """

    def evaluate(z):
        scalar = np.isscalar(z) or isinstance(z, complex)
        zz = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.full(zz.shape, spec.constant, dtype=complex)
        for power, coeff in enumerate(spec.polynomial, start=1):
            out += coeff * zz**power
        for location, coeffs in spec.poles:
            diff = zz - location
            if np.any(diff == 0):
                raise EvalDomainError(f"evaluation at pole z = {location}")
            for order, coeff in enumerate(coeffs, start=1):
                out += coeff / diff**order
        if scalar:
            return complex(out[0])
        return out.reshape(np.shape(z))

    return evaluate
