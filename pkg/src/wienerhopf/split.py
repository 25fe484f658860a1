"""Additive splitting: the jump problem on a line and on a strip.

split_line produces F = plus + minus with plus analytic above the line and
minus below, via the half-line pieces of the inverse transform.  The sum
convention follows the boundary-value identities: plus is the upper Cauchy
boundary value and minus is the negative of the lower one, so the pair from
plemelj_boundary is (plus, -minus).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _tails, transforms
from .core import HalfPlaneHandle, LineGrid, Side, SplitPair, Convention, StripClass
from .errors import CrossLineMismatchError, GridError, NumericsWarning, OutsideDomainError


@dataclass(frozen=True)
class AdditiveSplit:
    """Plus/minus pair whose sum reproduces the source line samples."""

    plus: HalfPlaneHandle
    minus: HalfPlaneHandle
    source_line: float

    def as_pair(self) -> SplitPair:
        return SplitPair(self.plus, self.minus, Convention.ADDITIVE)

    def reconstruct(self, grid: LineGrid, corrected: bool = True) -> np.ndarray:
        """plus + minus on another grid with the same geometry."""
        return (_handle_values_on(self.plus, grid, corrected)
                + _handle_values_on(self.minus, grid, corrected))


def _handle_values_on(handle, grid: LineGrid, corrected: bool = True) -> np.ndarray:
    """Evaluate a handle at a grid's nodes: one FFT when the geometry
    matches the handle's native grid, direct quadrature otherwise."""
    if (grid.half_width, grid.count) == (handle.half_width, handle.count):
        return handle.line_values(grid.offset, corrected=corrected)
    return handle(grid.points)


def _margin(rate_fit: float, pole_depth: float) -> float:
    """Evaluation margin: the fitted decay rate less a 10% safety factor,
    never reaching the fitted tail-model pole."""
    m = min(0.9 * max(rate_fit, 0.0), 0.97 * pole_depth)
    if not np.isfinite(m):
        return np.inf
    return m


def split_line(F: LineGrid) -> AdditiveSplit:
    """Split line samples into plus/minus half-plane handles.

    The input should decay toward the grid ends; if the end magnitude
    exceeds 1e-2 of the peak a warning is issued and the split proceeds.
    """
    peak = float(np.max(np.abs(F.samples))) if F.count else 0.0
    ends = max(abs(F.samples[0]), abs(F.samples[-1]))
    if peak > 0 and ends > 1e-2 * peak:
        warnings.warn(
            f"line data does not decay at the grid ends "
            f"(|F| at ends = {ends:.3g}, peak = {peak:.3g}); "
            "splitting accuracy is degraded",
            NumericsWarning, stacklevel=2,
        )
    _, analysis = transforms.analyzed_inverse(F)
    return _split_from_analysis(F, analysis)


def _split_from_analysis(F: LineGrid, analysis: _tails.LineAnalysis) -> AdditiveSplit:
    n = F.count
    c = F.offset
    times = analysis.times
    rt = analysis.residual_time
    mid = n // 2
    scale = max(float(np.max(np.abs(analysis.time_values))), 1e-300)
    floor = 1e-14 * scale

    plus_model = [t for t in analysis.model if t.side == "plus"]
    minus_model = [t for t in analysis.model if t.side == "minus"]

    plus_times = times[mid:]
    plus_values = rt[mid:].copy()
    plus_weights = np.ones(len(plus_times))
    plus_weights[0] = plus_weights[-1] = 0.5

    minus_times = times[: mid + 1]
    minus_values = rt[: mid + 1].copy()
    minus_weights = np.ones(len(minus_times))
    minus_weights[0] = minus_weights[-1] = 0.5
    depth_plus = min((abs(t.center.imag) for t in plus_model), default=np.inf)
    depth_minus = min((abs(t.center.imag) for t in minus_model), default=np.inf)

    plus = HalfPlaneHandle(
        side=Side.ABOVE_PLUS,
        boundary_offset=c - _margin(analysis.rate_plus, depth_plus),
        line_offset=c, half_width=F.half_width, count=n,
        times=plus_times, values=plus_values, weights=plus_weights,
        model_terms=plus_model, value_floor=floor,
    )
    minus = HalfPlaneHandle(
        side=Side.BELOW_MINUS,
        boundary_offset=c + _margin(analysis.rate_minus, depth_minus),
        line_offset=c, half_width=F.half_width, count=n,
        times=minus_times, values=minus_values, weights=minus_weights,
        model_terms=minus_model, value_floor=floor,
    )
    return AdditiveSplit(plus=plus, minus=minus, source_line=c)


def split_strip(F_on_a: LineGrid, F_on_b: LineGrid, strip: StripClass,
                tol: float = 1e-6) -> AdditiveSplit:
    """Split on a strip from samples of the same function on two lines.

    Splits on the lower line and on the upper line; the assembled pair
    (plus from below, minus from above) is certified by reconstructing
    both sample sets.  A discrepancy above tol raises
    CrossLineMismatchError carrying the measured value.
    """
    if not strip.is_finite:
        raise GridError("split_strip requires finite strip bounds")
    if not F_on_a.offset < F_on_b.offset:
        raise GridError("lower grid must lie below upper grid")
    if (F_on_a.half_width, F_on_a.count) != (F_on_b.half_width, F_on_b.count):
        raise GridError("the two grids must share half_width and count")
    low = split_line(F_on_a)
    high = split_line(F_on_b)
    assembled = AdditiveSplit(
        plus=low.plus, minus=high.minus, source_line=F_on_a.offset
    )
    disc = max(
        float(np.max(np.abs(assembled.reconstruct(F_on_a) - F_on_a.samples))),
        float(np.max(np.abs(assembled.reconstruct(F_on_b) - F_on_b.samples))),
    )
    if disc > tol:
        raise CrossLineMismatchError(
            "two-line data are inconsistent with one analytic function", disc
        )
    return assembled


def cross_line_check(split: AdditiveSplit, other_line: LineGrid) -> float:
    """Sup-norm discrepancy between the split reconstructed on another
    line and the provided samples.

    A handle refusing the line (its fitted margin excludes it, which
    corrupted or non-decaying data will cause) reports as inf.
    """
    try:
        recon = split.reconstruct(other_line)
    except OutsideDomainError:
        return float("inf")
    return float(np.max(np.abs(recon - other_line.samples)))


def wrong_side_mass(handle) -> float:
    """Paley-Wiener certificate: relative L2 mass of the handle's inverse
    transform on the wrong half-axis.

    The handle is re-evaluated on its source line and run back through
    the tail-corrected inverse transform; a genuine half-plane function
    leaves (almost) no energy on the wrong side of t = 0.  For
    multiplicative factors pass the log handle.
    """
    log_handle = getattr(handle, "log_handle", handle)
    values = log_handle.line_values(log_handle.line_offset, corrected=False)
    n = log_handle.count
    R = log_handle.half_width
    x = -R + np.arange(n) * (2.0 * R / n)
    # subtract the handle's declared tail model (its one-sided transform
    # is known in closed form) so the finite-grid inversion of the
    # remainder is an exact round trip rather than ringing at the jump
    model = log_handle.model_terms
    residual = values - _tails.model_line_values(model, x)
    f = _tails.centered_inverse(residual, 2.0 * R / n)
    T = _tails.dual_half_width(R, n)
    t = -T + np.arange(n) * (math.pi / R)
    f = f + _tails.model_time_values(model, t)
    total = float(np.sum(np.abs(f) ** 2))
    if total == 0.0:
        return 0.0
    if log_handle.side is Side.ABOVE_PLUS:
        wrong = float(np.sum(np.abs(f[t < 0]) ** 2))
    else:
        wrong = float(np.sum(np.abs(f[t > 0]) ** 2))
    return float(np.sqrt(wrong / total))
