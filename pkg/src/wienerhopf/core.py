"""Shared value types: sampled lines, strips, classes, half-plane handles.

All types are immutable after construction and safe to share between
threads.  Sample arrays are stored with the write flag cleared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from . import _tails
from . import expr as _expr
from .errors import EmptyStripError, EvalDomainError, GridError, OutsideDomainError

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _frozen_array(a, dtype=complex):
    out = np.asarray(a, dtype=dtype).copy()
    out.setflags(write=False)
    return out


def _check_count(count):
    if count < 8 or (count & (count - 1)) != 0:
        raise GridError(f"count must be a power of two >= 8, got {count}")


# ---------------------------------------------------------------------------
# Grids


@dataclass(frozen=True)
class LineGrid:
    """Uniform complex samples of a function along the line Im z = offset.

    Abscissae are t_j = -R + j*(2R/N) for j = 0..N-1 with R = half_width
    and N = count (a power of two, at least 8).
    """

    offset: float
    half_width: float
    count: int
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_count(self.count)
        if not self.half_width > 0:
            raise GridError("half_width must be positive")
        samples = _frozen_array(self.samples)
        if samples.shape != (self.count,):
            raise GridError(
                f"expected {self.count} samples, got shape {samples.shape}"
            )
        object.__setattr__(self, "samples", samples)

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.count

    @property
    def abscissae(self) -> np.ndarray:
        return -self.half_width + np.arange(self.count) * self.spacing

    @property
    def points(self) -> np.ndarray:
        """Complex sample locations x_j + i*offset."""
        return self.abscissae + 1j * self.offset

    def with_samples(self, samples) -> "LineGrid":
        return LineGrid(self.offset, self.half_width, self.count, samples)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform samples on the transform side, t_j = -T + j*(2T/N).

    weight_offset records the height c of the line the data came from:
    the samples are the plain transform of F restricted to Im z = c, so
    recovering the transform along Im z = 0 requires an e^{c t} reweight.
    """

    half_width: float
    count: int
    samples: np.ndarray = field(repr=False)
    weight_offset: float = 0.0

    def __post_init__(self):
        _check_count(self.count)
        if not self.half_width > 0:
            raise GridError("half_width must be positive")
        samples = _frozen_array(self.samples)
        if samples.shape != (self.count,):
            raise GridError(
                f"expected {self.count} samples, got shape {samples.shape}"
            )
        object.__setattr__(self, "samples", samples)

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.count

    @property
    def abscissae(self) -> np.ndarray:
        return -self.half_width + np.arange(self.count) * self.spacing

    def with_samples(self, samples) -> "TimeGrid":
        return TimeGrid(self.half_width, self.count, samples, self.weight_offset)


def make_grid(expression, offset: float, half_width: float, count: int) -> LineGrid:
    """Sample an expression along Im z = offset.

    ``expression`` is an AST from expr.parse, or source text.  Evaluation
    failure at any node raises EvalDomainError naming the abscissa.
    """
    if isinstance(expression, str):
        expression = _expr.parse(expression)
    _check_count(count)
    if not half_width > 0:
        raise GridError("half_width must be positive")
    x = -half_width + np.arange(count) * (2.0 * half_width / count)
    z = x + 1j * offset
    samples, ok = _expr.evaluate_masked(expression, z)
    if not ok.all():
        j = int(np.argmax(~ok))
        raise EvalDomainError(
            f"grid evaluation failed at abscissa t={x[j]!r} (z={z[j]!r})"
        )
    return LineGrid(offset, half_width, count, samples)


def make_time_grid(expression, half_width: float, count: int,
                   weight_offset: float = 0.0) -> TimeGrid:
    """Sample an expression of a real variable on a time grid."""
    if isinstance(expression, str):
        expression = _expr.parse(expression)
    _check_count(count)
    t = -half_width + np.arange(count) * (2.0 * half_width / count)
    samples, ok = _expr.evaluate_masked(expression, t.astype(complex))
    if not ok.all():
        j = int(np.argmax(~ok))
        raise EvalDomainError(f"grid evaluation failed at abscissa t={t[j]!r}")
    return TimeGrid(half_width, count, samples, weight_offset)


# ---------------------------------------------------------------------------
# Strip classes


@dataclass(frozen=True)
class StripClass:
    """The pair (a, b) naming a decay class; Fourier images are analytic
    on the strip a < Im z < b.  Endpoints may be -inf / +inf."""

    lower: float
    upper: float

    def __post_init__(self):
        if math.isnan(self.lower) or math.isnan(self.upper):
            raise GridError("strip bounds must not be NaN")
        if not self.lower < self.upper:
            raise GridError(
                f"strip requires lower < upper, got ({self.lower}, {self.upper})"
            )

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.lower) and math.isfinite(self.upper)

    def contains(self, level: float) -> bool:
        return self.lower < level < self.upper


FULL_STRIP = StripClass(-math.inf, math.inf)


def class_of_convolution(f: StripClass, g: StripClass) -> StripClass:
    """Class of a convolution: (max of lowers, min of uppers).

    Raises EmptyStripError when the common strip is empty.
    """
    lower = max(f.lower, g.lower)
    upper = min(f.upper, g.upper)
    if not lower < upper:
        raise EmptyStripError(
            f"empty common strip: max(lowers)={lower} >= min(uppers)={upper}"
        )
    return StripClass(lower, upper)


@dataclass(frozen=True)
class StripEstimate:
    """Advisory decay-rate estimate for a sampled line.

    ``strip`` holds (offset - rate_plus, offset + rate_minus); the
    residuals are RMS misfits of the log-magnitude line fits.  Estimates
    feed warnings and evaluator margins, never control flow.
    """

    strip: StripClass
    rate_plus: float
    rate_minus: float
    residual_plus: float
    residual_minus: float

    @property
    def lower(self) -> float:
        return self.strip.lower

    @property
    def upper(self) -> float:
        return self.strip.upper


def estimate_strip(grid: LineGrid) -> StripEstimate:
    """Estimate the analyticity strip of a sampled line.

    Fits exponential decay rates of the inverse transform on the outer
    part of each half-axis (log-magnitude least squares, noise-floor
    aware).  The rate for t -> +inf bounds the strip from below relative
    to the grid offset, the rate for t -> -inf from above.
    """
    analysis = _tails.analyze_line(grid.abscissae, grid.samples)
    c = grid.offset
    lo = c - analysis.rate_plus
    hi = c + analysis.rate_minus
    if not lo < hi:  # degenerate fit; report the full class
        lo, hi = -math.inf, math.inf
    return StripEstimate(
        strip=StripClass(lo, hi),
        rate_plus=analysis.rate_plus,
        rate_minus=analysis.rate_minus,
        residual_plus=analysis.residual_plus,
        residual_minus=analysis.residual_minus,
    )


# ---------------------------------------------------------------------------
# Half-plane handles


class Side(Enum):
    ABOVE_PLUS = "plus"
    BELOW_MINUS = "minus"


class HalfPlaneHandle:
    """A function analytic in an open half-plane, represented by the
    half-line piece of an inverse transform (fitted tail-model terms
    already folded into the samples, so the data is one-sided exactly).

    Evaluation is a half-line quadrature of ``e^{i(z - i c) t}`` against
    the stored time samples with Euler-Maclaurin endpoint corrections
    and adaptive truncation of amplified truncation junk.
    ``boundary_offset`` is the refusal line: the evaluator rejects
    points on the wrong side of it, where the quadrature would diverge.
    """

    def __init__(self, side: Side, boundary_offset: float, line_offset: float,
                 half_width: float, count: int,
                 times: np.ndarray, values: np.ndarray, weights: np.ndarray,
                 model_terms=(), zero_value_onesided: complex | None = None,
                 value_floor: float | None = None):
        self.side = side
        self.boundary_offset = float(boundary_offset)
        self.line_offset = float(line_offset)
        self.half_width = float(half_width)   # of the originating line grid
        self.count = int(count)
        self._times = _frozen_array(times, dtype=float)
        self._values = _frozen_array(values)
        self._weights = _frozen_array(weights, dtype=float)
        self._model = tuple(model_terms)      # _tails.PoleTerm in x-coordinates
        self.spacing = float(times[1] - times[0]) if len(times) > 1 else 0.0
        self._z0 = zero_value_onesided
        if value_floor is None:
            vmax = float(np.max(np.abs(self._values))) if len(values) else 0.0
            value_floor = 1e-14 * vmax
        self._floor = float(value_floor)
        self._keep = np.abs(self._values) >= self._floor if len(values) else \
            np.zeros(0, dtype=bool)
        self._vmax = float(np.max(np.abs(self._values[self._keep]))) \
            if self._keep.any() else 0.0
        with np.errstate(divide="ignore"):
            self._logv = np.where(
                self._keep, np.log(np.maximum(np.abs(self._values), 1e-300)), -np.inf
            )
        self._derivs = self._endpoint_derivatives()
        self._endpoint = self._fit_endpoint()

    # -- construction helpers ------------------------------------------------

    def _endpoint_derivatives(self):
        """One-sided value/derivative estimates of the numeric part at t=0,
        used by the Euler-Maclaurin endpoint corrections."""
        v = self._values
        dt = self.spacing
        if len(v) < 5 or dt == 0.0:
            return (0j, 0j, 0j, 0j)
        if self.side is Side.ABOVE_PLUS:
            a = v[:5]
            s = 1.0
        else:
            a = v[::-1][:5]
            s = -1.0
        v0 = self._z0 if self._z0 is not None else a[0]
        d1 = s * (-25 * a[0] + 48 * a[1] - 36 * a[2] + 16 * a[3] - 3 * a[4]) / (12 * dt)
        d2 = (2 * a[0] - 5 * a[1] + 4 * a[2] - a[3]) / dt**2
        d3 = s * (-a[0] + 3 * a[1] - 3 * a[2] + a[3]) / dt**3
        return (v0, d1, d2, d3)

    # -- public surface --------------------------------------------------

    @property
    def evaluator(self) -> Callable:
        return self.__call__

    @property
    def time_samples(self):
        """(times, values): the half-line inverse transform this handle
        represents, tail model included.  Support is one-sided."""
        model_t = _tails.model_time_values(self._model, self._times,
                                           side=self.side.value,
                                           onesided_at_zero=True)
        return self._times, self._values + model_t

    @property
    def model_terms(self):
        return self._model

    def _domain_check(self, im):
        if self.side is Side.ABOVE_PLUS:
            bad = im <= self.boundary_offset
            where = "above"
        else:
            bad = im >= self.boundary_offset
            where = "below"
        if np.any(bad):
            raise OutsideDomainError(
                f"{self.side.value} handle is only valid {where} "
                f"Im z = {self.boundary_offset:.6g}"
            )

    def __call__(self, z):
        """Evaluate at complex z (scalar or array) inside the half-plane."""
        scalar = np.isscalar(z) or isinstance(z, complex)
        zz = np.atleast_1d(np.asarray(z, dtype=complex))
        self._domain_check(zz.imag)
        out = _tails.model_point_values(self._model, zz - 1j * self.line_offset,
                                        side=self.side.value)
        out += self._quadrature(zz)
        if scalar:
            return complex(out[0])
        return out.reshape(np.shape(z))

    def _amp_mask(self, h_eff: float) -> np.ndarray:
        """Keep mask for a reweighting that amplifies by e^{h_eff |t|}.

        A decaying signal reweighted within its margin has a
        non-increasing block envelope, so the profile is cut (walking
        outward from t = 0) once it climbs more than three decades above
        its running minimum: that climb is amplified truncation junk.
        A global cap of 4x the peak value backstops the cut."""
        if h_eff <= 0 or self._vmax == 0.0:
            return self._keep
        prof = np.where(self._keep, self._logv + h_eff * np.abs(self._times), -np.inf)
        outward = prof if self.side is Side.ABOVE_PLUS else prof[::-1]
        n = len(outward)
        width = 8
        nblk = (n + width - 1) // width
        padded = np.full(nblk * width, -np.inf)
        padded[:n] = outward
        benv = padded.reshape(nblk, width).max(axis=1)
        # empty blocks must not lower the running minimum
        run = np.minimum.accumulate(np.where(np.isfinite(benv), benv, 1e300))
        allowed = np.repeat(run + math.log(1e3), width)[:n]
        keep_out = outward <= np.minimum(allowed, math.log(4.0 * self._vmax))
        breach = ~keep_out & np.isfinite(outward)
        if breach.any():
            keep_out[int(np.argmax(breach)):] = False
        keep = keep_out if self.side is Side.ABOVE_PLUS else keep_out[::-1]
        return self._keep & keep

    def _quadrature(self, zz, corrected=True):
        dt = self.spacing
        t = self._times
        wv = self._weights * self._values
        zeta = zz.ravel() - 1j * self.line_offset
        out = np.empty(zeta.shape, dtype=complex)
        chunk = max(1, int(4e6) // max(len(t), 1))
        for lo in range(0, len(zeta), chunk):
            zc = zeta[lo:lo + chunk, None]
            im = zc.imag.ravel()
            if self.side is Side.ABOVE_PLUS:
                h_eff = max(0.0, float(-np.min(im)))
            else:
                h_eff = max(0.0, float(np.max(im)))
            keep = self._amp_mask(h_eff)
            ph = 1j * zc * t[None, :]
            np.clip(ph.real, -745.0, 600.0, out=ph.real)
            out[lo:lo + chunk] = (np.exp(ph) * np.where(keep, wv, 0.0)[None, :]).sum(axis=1)
        out *= dt / _SQRT_2PI
        if corrected:
            out += self._endpoint_correction(zeta)
        return out.reshape(zz.shape)

    def _fit_endpoint(self):
        """Exponential model of the numeric data at the t=0 endpoint.

        Tries a two-term Prony fit matching value through third
        derivative, falls back to one exponential matching value and
        slope, then to a bare (tapered) Euler-Maclaurin expansion.
        Returns (mode, terms, rem2, rem3) with terms = ((a, mu), ...)
        for v(t) ~ sum a e^{mu t}.
        """
        v0, d1, d2, d3 = self._derivs
        dt = self.spacing
        if dt == 0.0 or v0 == 0:
            return ("taper", (), d1, d3)
        plus = self.side is Side.ABOVE_PLUS

        def usable(mu):
            if not (np.isfinite(mu.real) and np.isfinite(mu.imag)):
                return False
            if abs(mu) * dt >= 3.0:
                return False
            return mu.real < -1e-12 if plus else mu.real > 1e-12

        det = -(d1 * d1) + v0 * d2
        if abs(det) > 1e-12 * (abs(d1) ** 2 + abs(v0 * d2) + 1e-300):
            e1 = (-d1 * d2 + v0 * d3) / det
            e2 = (d1 * d3 - d2 * d2) / det
            disc = np.sqrt(complex(e1 * e1 - 4.0 * e2))
            mu1 = 0.5 * (e1 + disc)
            mu2 = 0.5 * (e1 - disc)
            if usable(mu1) and usable(mu2) and abs(mu1 - mu2) > 1e-8 * (1 + abs(mu1)):
                a1 = (d1 - v0 * mu2) / (mu1 - mu2)
                a2 = v0 - a1
                return ("prony", ((a1, mu1), (a2, mu2)), 0j, 0j)
        mu = d1 / v0
        if usable(mu):
            return ("exp", ((v0, mu),),
                    d2 - v0 * mu**2, d3 - v0 * mu**3)
        return ("taper", (), d1, d3)

    def _endpoint_correction(self, zeta):
        """t=0 endpoint correction of the half-line quadrature.

        For the fitted endpoint exponentials the difference between the
        exact integral and the trapezoid sum is closed-form and valid at
        every zeta; what the fit leaves behind is handled by (tapered)
        Euler-Maclaurin terms.
        """
        dt = self.spacing
        if dt == 0.0:
            return np.zeros(zeta.shape, dtype=complex)
        mode, terms, rem2, rem3 = self._endpoint
        v0, d1, d2, d3 = self._derivs
        iz = 1j * zeta
        sgn = 1.0 if self.side is Side.ABOVE_PLUS else -1.0
        if mode == "taper":
            phi1 = d1 + iz * v0
            phi3 = d3 + 3 * iz * d2 + 3 * iz**2 * d1 + iz**3 * v0
            taper = np.exp(-np.abs(zeta * dt / 0.8) ** 4)
            return (sgn * (dt**2 / 12.0) * phi1
                    - sgn * (dt**4 / 720.0) * phi3) * taper / _SQRT_2PI
        corr = np.zeros(zeta.shape, dtype=complex)
        for a, mu in terms:
            if self.side is Side.ABOVE_PLUS:
                ex = (mu + iz) * dt
                exact = -a / (mu + iz)
            else:
                ex = -(mu + iz) * dt
                exact = a / (mu + iz)
            q = np.exp(np.clip(ex.real, -745.0, -1e-12) + 1j * ex.imag)
            corr += exact - a * dt * (1.0 + q) / (2.0 * (1.0 - q))
        if mode == "exp":
            # remainder vanishes to first order; quartic term only
            mu = terms[0][1]
            phi3 = rem3 + 3 * iz * (d2 - v0 * mu**2)
            corr = corr - sgn * (dt**4 / 720.0) * phi3
        return corr / _SQRT_2PI

    def line_values(self, offset: float, corrected: bool = True) -> np.ndarray:
        """Boundary values on the line Im z = offset at the originating
        grid's abscissae, computed by one FFT.

        corrected=False gives the raw masked trapezoid values, which are
        exactly the transform of the one-sided time samples: that is the
        path reconstruction identities and Paley-Wiener certificates use.
        """
        self._domain_check(np.asarray(offset))
        N = self.count
        R = self.half_width
        dt = self.spacing
        h = offset - self.line_offset
        decay = -h * self._times
        np.clip(decay, -745.0, 600.0, out=decay)
        w = self._weights * np.exp(decay)
        if self.side is Side.ABOVE_PLUS:
            keep = self._amp_mask(max(0.0, -h))
        else:
            keep = self._amp_mask(max(0.0, h))
        data = np.zeros(N, dtype=complex)
        if self.side is Side.ABOVE_PLUS:
            data[N // 2:] = np.where(keep, w * self._values, 0.0)
        else:
            data[:N // 2 + 1] = np.where(keep, w * self._values, 0.0)
        vals = _tails.centered_forward(data, dt)
        x = -R + np.arange(N) * (2.0 * R / N)
        out = vals + _tails.model_point_values(
            self._model, x + 1j * h, side=self.side.value)
        if corrected:
            out = out + self._endpoint_correction(x + 1j * h)
        return out


class Convention(Enum):
    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"


@dataclass(frozen=True)
class SplitPair:
    """A plus/minus pair of half-plane handles with its combination rule:
    plus + minus (additive) or plus * minus (multiplicative) reproduces
    the source data on its line."""

    plus: HalfPlaneHandle
    minus: HalfPlaneHandle
    convention: Convention


# ---------------------------------------------------------------------------
# CSV serialization


def write_line_grid(grid: LineGrid, path) -> None:
    """Write a LineGrid as CSV: '#' metadata line, 't,re,im' header, one
    row per sample with 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f"# offset={grid.offset:.17g} half_width={grid.half_width:.17g} "
            f"count={grid.count}\n"
        )
        fh.write("t,re,im\n")
        for t, v in zip(grid.abscissae, grid.samples):
            fh.write(f"{t:.17g},{v.real:.17g},{v.imag:.17g}\n")


def read_line_grid(path) -> LineGrid:
    """Read a LineGrid written by write_line_grid."""
    with open(path, "r", encoding="utf-8") as fh:
        meta_line = fh.readline()
        if not meta_line.startswith("#"):
            raise GridError("missing metadata line")
        meta = dict(item.split("=") for item in meta_line[1:].split())
        header = fh.readline().strip()
        if header != "t,re,im":
            raise GridError(f"unexpected header {header!r}")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    samples = np.array([float(r[1]) + 1j * float(r[2]) for r in rows])
    return LineGrid(
        offset=float(meta["offset"]),
        half_width=float(meta["half_width"]),
        count=int(meta["count"]),
        samples=samples,
    )


def write_time_grid(grid: TimeGrid, path) -> None:
    """Write a TimeGrid in the same CSV shape (weight_offset metadata)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f"# weight_offset={grid.weight_offset:.17g} "
            f"half_width={grid.half_width:.17g} count={grid.count}\n"
        )
        fh.write("t,re,im\n")
        for t, v in zip(grid.abscissae, grid.samples):
            fh.write(f"{t:.17g},{v.real:.17g},{v.imag:.17g}\n")


def read_time_grid(path) -> TimeGrid:
    with open(path, "r", encoding="utf-8") as fh:
        meta_line = fh.readline()
        if not meta_line.startswith("#"):
            raise GridError("missing metadata line")
        meta = dict(item.split("=") for item in meta_line[1:].split())
        header = fh.readline().strip()
        if header != "t,re,im":
            raise GridError(f"unexpected header {header!r}")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    samples = np.array([float(r[1]) + 1j * float(r[2]) for r in rows])
    return TimeGrid(
        half_width=float(meta["half_width"]),
        count=int(meta["count"]),
        samples=samples,
        weight_offset=float(meta["weight_offset"]),
    )
