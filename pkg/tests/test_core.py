import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wienerhopf import core
from wienerhopf.errors import EmptyStripError, EvalDomainError, GridError


class TestMakeGrid:
    def test_direct_evaluation(self):
        g = core.make_grid("1/(t*t+1)", 0.0, 8.0, 16)
        j0 = np.argmin(np.abs(g.abscissae))
        assert g.abscissae[j0] == 0.0
        assert g.samples[j0] == 1.0 + 0j

    def test_constant(self):
        g = core.make_grid("1", 2.0, 1.0, 8)
        assert np.all(g.samples == 1.0 + 0j)
        assert g.offset == 2.0

    def test_pole_on_line_names_abscissa(self):
        with pytest.raises(EvalDomainError, match="0"):
            core.make_grid("1/(t-2*i)", 2.0, 4.0, 16)

    def test_count_validation(self):
        with pytest.raises(GridError):
            core.make_grid("1", 0.0, 1.0, 12)
        with pytest.raises(GridError):
            core.make_grid("1", 0.0, 1.0, 4)

    def test_spacing_and_abscissae(self):
        g = core.make_grid("1", 0.0, 10.0, 16)
        assert g.spacing == 2 * 10.0 / 16
        assert g.abscissae[0] == -10.0
        assert np.allclose(np.diff(g.abscissae), g.spacing)

    def test_samples_immutable(self):
        g = core.make_grid("1", 0.0, 1.0, 8)
        with pytest.raises(ValueError):
            g.samples[0] = 2.0


class TestStripClass:
    def test_convolution_class(self):
        got = core.class_of_convolution(
            core.StripClass(-1.0, 1.0), core.StripClass(-2.0, 0.5))
        assert got == core.StripClass(-1.0, 0.5)

    def test_infinite_endpoints_drop_out(self):
        got = core.class_of_convolution(
            core.StripClass(-math.inf, 0.0), core.StripClass(-1.0, math.inf))
        assert got == core.StripClass(-1.0, 0.0)

    def test_empty_strip(self):
        with pytest.raises(EmptyStripError):
            core.class_of_convolution(
                core.StripClass(0.0, 1.0), core.StripClass(2.0, 3.0))

    def test_degenerate_rejected(self):
        with pytest.raises(GridError):
            core.StripClass(1.0, 1.0)
        with pytest.raises(GridError):
            core.StripClass(math.nan, 1.0)


_strips = st.builds(
    core.StripClass,
    st.one_of(st.floats(-50, 49, allow_nan=False), st.just(-math.inf)),
    st.just(math.inf),
).flatmap(
    lambda s: st.one_of(
        st.floats(s.lower + 1e-6, 50, allow_nan=False)
        if math.isfinite(s.lower) else st.floats(-50, 50, allow_nan=False),
        st.just(math.inf),
    ).map(lambda u: core.StripClass(s.lower, u))
)


@settings(max_examples=200, deadline=None)
@given(_strips, _strips)
def test_convolution_commutative(a, b):
    try:
        left = core.class_of_convolution(a, b)
    except EmptyStripError:
        with pytest.raises(EmptyStripError):
            core.class_of_convolution(b, a)
        return
    assert left == core.class_of_convolution(b, a)


@settings(max_examples=100, deadline=None)
@given(_strips, _strips, _strips)
def test_convolution_associative(a, b, c):
    try:
        left = core.class_of_convolution(core.class_of_convolution(a, b), c)
        right = core.class_of_convolution(a, core.class_of_convolution(b, c))
    except EmptyStripError:
        return
    assert left == right


@settings(max_examples=100, deadline=None)
@given(_strips)
def test_full_strip_is_identity(s):
    assert core.class_of_convolution(s, core.FULL_STRIP) == s


class TestCsv:
    def test_line_grid_roundtrip(self, tmp_path):
        g = core.make_grid("1/(t-2*i)", 0.0, 30.0, 64)
        path = tmp_path / "grid.csv"
        core.write_line_grid(g, path)
        text = path.read_text()
        first, header = text.splitlines()[:2]
        assert first.startswith("#")
        assert "offset=" in first and "half_width=" in first and "count=" in first
        assert header == "t,re,im"
        back = core.read_line_grid(path)
        assert back.offset == g.offset
        assert back.half_width == g.half_width
        assert back.count == g.count
        assert np.array_equal(back.samples, g.samples)

    def test_seventeen_digits(self, tmp_path):
        g = core.LineGrid(0.0, 1.0, 8, np.full(8, 1 / 3 + 1j / 7))
        path = tmp_path / "g.csv"
        core.write_line_grid(g, path)
        back = core.read_line_grid(path)
        assert np.array_equal(back.samples, g.samples)

    def test_time_grid_roundtrip(self, tmp_path):
        g = core.make_time_grid("exp(-t*t)", 5.0, 32, weight_offset=0.5)
        path = tmp_path / "t.csv"
        core.write_time_grid(g, path)
        back = core.read_time_grid(path)
        assert back.weight_offset == 0.5
        assert np.array_equal(back.samples, g.samples)


class TestEstimateStrip:
    def test_lorentzian(self):
        g = core.make_grid("1/(t*t+1)", 0.0, 50.0, 2**12)
        est = core.estimate_strip(g)
        assert abs(est.lower + 1.0) < 0.1
        assert abs(est.upper - 1.0) < 0.1

    def test_asymmetric_poles(self):
        g = core.make_grid("1/((t-2*i)*(t+i))", 0.0, 50.0, 2**12)
        est = core.estimate_strip(g)
        assert abs(est.lower + 1.0) < 0.1
        assert abs(est.upper - 2.0) < 0.1

    def test_gaussian_reports_wide_strip(self):
        g = core.make_grid("exp(-t*t)", 0.0, 30.0, 2**12)
        est = core.estimate_strip(g)
        assert est.lower <= -10.0
        assert est.upper >= 10.0

    def test_offset_line(self):
        g = core.make_grid("1/(t*t+1)", 0.5, 50.0, 2**12)
        est = core.estimate_strip(g)
        assert abs(est.lower + 0.5) < 0.1
        assert abs(est.upper - 1.5) < 0.1

    @pytest.mark.parametrize("source,lo,hi", [
        ("1/((t-2*i)*(t+2*i))", -2.0, 2.0),
        ("1/((t-i-3)*(t+i+3))", -1.0, 1.0),
        ("(t+1)/((t*t+2*i*t-2)*(t-4*i))", -1.0, 4.0),
    ])
    def test_pole_distance_bracket(self, source, lo, hi):
        # rational functions with no singularity within the fit margin:
        # the estimate brackets the pole-distance strip within 20%
        g = core.make_grid(source, 0.0, 50.0, 2**14)
        est = core.estimate_strip(g)
        assert abs(est.lower - lo) <= 0.2 * abs(lo)
        assert abs(est.upper - hi) <= 0.2 * abs(hi)
