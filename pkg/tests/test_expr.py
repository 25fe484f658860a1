import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wienerhopf import expr
from wienerhopf.errors import EvalDomainError, ExprSyntaxError


class TestParse:
    def test_quotient_of_chains(self):
        ast = expr.parse("(t-i+2)/(t+i+3/2)")
        assert isinstance(ast, expr.Div)
        assert isinstance(ast.left, (expr.Add, expr.Sub))

    def test_factor_expression(self):
        # an Eq-style factor with sqrt of a Moebius ratio
        ast = expr.parse("sqrt((t-i-1/2)/(t-2*i))*(t-i+2)")
        assert isinstance(ast, expr.Mul)
        assert isinstance(ast.left, expr.Sqrt)

    def test_incomplete_input_offset(self):
        with pytest.raises(ExprSyntaxError) as err:
            expr.parse("t+")
        assert err.value.offset == 2
        assert err.value.expected

    def test_unbalanced_paren(self):
        with pytest.raises(ExprSyntaxError):
            expr.parse("(t+1")

    def test_unknown_name(self):
        with pytest.raises(ExprSyntaxError):
            expr.parse("sin(t)")

    def test_power_binds_tighter_than_unary_minus(self):
        assert expr.evaluate(expr.parse("-t^2"), 3.0) == -9.0

    def test_negative_integer_exponent(self):
        assert expr.evaluate(expr.parse("t^-2"), 2.0) == 0.25

    def test_fractional_exponent_rejected(self):
        with pytest.raises(ExprSyntaxError):
            expr.parse("t^0.5")

    def test_z_and_t_are_synonyms(self):
        assert expr.parse("z+1") == expr.parse("t+1")

    def test_whitespace_insignificant(self):
        assert expr.parse(" t + 2*i ") == expr.parse("t+2*i")


class TestEval:
    def test_i_squared(self):
        assert expr.evaluate(expr.parse("i*i"), 5.0) == -1.0

    def test_principal_sqrt_on_cut(self):
        # arg = pi is included in the principal branch
        assert expr.evaluate(expr.parse("sqrt(t)"), complex(-1)) == 1j

    def test_eq2_plus_factor_at_zero(self):
        # sqrt((z+i/2-1/2)/(z+i/2)) / (z+i+3/2) at z=0:
        # (i/2-1/2)/(i/2) = 1+i by direct algebra, so sqrt(1+i)/(3/2+i)
        ast = expr.parse("sqrt((t+0.5*i-0.5)/(t+0.5*i))/(t+i+3/2)")
        got = expr.evaluate(ast, 0.0)
        expected = cmath.sqrt(1 + 1j) / (1.5 + 1j)
        assert abs(got - expected) < 1e-15
        # independent arbitrary-precision confirmation
        mpmath = pytest.importorskip("mpmath")
        with mpmath.workdps(40):
            num = (mpmath.mpc(0, "0.5") - mpmath.mpf("0.5")) / mpmath.mpc(0, "0.5")
            ref = mpmath.sqrt(num) / (mpmath.mpf("1.5") + mpmath.mpc(0, 1))
        assert abs(got - complex(ref)) < 1e-15

    def test_division_by_zero(self):
        with pytest.raises(EvalDomainError):
            expr.evaluate(expr.parse("1/t"), 0.0)

    def test_log_of_zero(self):
        with pytest.raises(EvalDomainError):
            expr.evaluate(expr.parse("log(t)"), 0.0)

    def test_sqrt_of_zero_is_fine(self):
        assert expr.evaluate(expr.parse("sqrt(t)"), 0.0) == 0.0

    def test_array_evaluation_matches_scalar(self):
        ast = expr.parse("exp(t)/(t+i)")
        z = np.array([0.3 + 0.2j, -1.5j + 2, 4.0 + 0j])
        vals = expr.evaluate(ast, z)
        for zk, vk in zip(z, vals):
            assert abs(vk - expr.evaluate(ast, complex(zk))) < 1e-14

    def test_masked_evaluation_absorbs_singularities(self):
        ast = expr.parse("1/t")
        vals, ok = expr.evaluate_masked(ast, np.array([0.0 + 0j, 1.0 + 0j]))
        assert not ok[0] and ok[1]
        assert vals[1] == 1.0

    def test_sqrt_square_roundtrip(self):
        ast = expr.parse("sqrt(t)")
        rng = np.random.default_rng(7)
        z = rng.normal(size=50) + 1j * rng.normal(size=50)
        w = expr.evaluate(ast, z)
        assert np.max(np.abs(w * w - z) / np.abs(z)) < 1e-14


# -- printer round trip ------------------------------------------------------

_ATOMS = st.one_of(
    st.builds(expr.Number, st.floats(0.0, 100.0, allow_nan=False).map(complex)),
    st.just(expr.Number(1j)),
    st.just(expr.Variable()),
)


def _trees(depth):
    if depth == 0:
        return _ATOMS
    sub = _trees(depth - 1)
    return st.one_of(
        _ATOMS,
        st.builds(expr.Add, sub, sub),
        st.builds(expr.Sub, sub, sub),
        st.builds(expr.Mul, sub, sub),
        st.builds(expr.Div, sub, sub),
        st.builds(expr.Neg, sub),
        st.builds(expr.Pow, sub, st.integers(-3, 3)),
        st.builds(expr.Sqrt, sub),
        st.builds(expr.Exp, sub),
        st.builds(expr.Log, sub),
    )


@settings(max_examples=200, deadline=None)
@given(_trees(3))
def test_parse_print_parse_is_parse(tree):
    printed = expr.to_source(tree)
    once = expr.parse(printed)
    assert expr.parse(expr.to_source(once)) == once


@settings(max_examples=50, deadline=None)
@given(st.text(alphabet="ti+-*/^() 0123456789.", max_size=30))
def test_parser_never_crashes_unstructured(text):
    try:
        expr.parse(text)
    except ExprSyntaxError:
        pass
