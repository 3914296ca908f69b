import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surfcurv.errors import DomainError, ParseError
from surfcurv.jets import (BiJet2, Bin, Call, Const, Pow, SmoothFn1, UniJet3,
                           Var, bijet_combine, eval_value, expr_vars,
                           format_sexpr, jet_eval, lift_s, lift_t, parse_sexpr,
                           poly_expr)


def jets_tuple(j):
    return (j.v, j.d1, j.d2, j.d3)


class TestUniJet3Examples:
    def test_exp_at_zero(self):
        j = jet_eval(SmoothFn1.parse("(exp x)"), 0.0)
        assert jets_tuple(j) == (1.0, 1.0, 1.0, 1.0)

    def test_tan_at_zero(self):
        # symbolic oracle: tan''' = (1 + tan^2)(2 + 6 tan^2) evaluates to 2 at 0
        j = jet_eval(SmoothFn1.parse("(tan x)", (-1.0, 1.0)), 0.0)
        assert jets_tuple(j) == (0.0, 1.0, 0.0, 2.0)

    def test_square_at_three(self):
        j = jet_eval(SmoothFn1.parse("(mul x x)"), 3.0)
        assert jets_tuple(j) == (9.0, 6.0, 2.0, 0.0)

    def test_tan_regression_frozen(self):
        # frozen from a symbolic differentiation run at x = 0.3
        j = jet_eval(SmoothFn1.parse("(tan x)", (-1.0, 1.0)), 0.3)
        expected = (0.30933624960962325, 1.095688915322547,
                    0.6778725996094256, 2.8204495336740107)
        for got, want in zip(jets_tuple(j), expected):
            assert got == pytest.approx(want, rel=1e-14)

    def test_constant_lift(self):
        j = jet_eval(SmoothFn1.constant(4.25), 0.7)
        assert jets_tuple(j) == (4.25, 0.0, 0.0, 0.0)

    def test_identity_seed(self):
        j = jet_eval(SmoothFn1.identity(), 1.5)
        assert jets_tuple(j) == (1.5, 1.0, 0.0, 0.0)

    def test_quotient_rule(self):
        # sin/cos == tan, two different evaluation routes
        a = jet_eval(SmoothFn1.parse("(div (sin x) (cos x))", (-1.0, 1.0)), 0.4)
        b = jet_eval(SmoothFn1.parse("(tan x)", (-1.0, 1.0)), 0.4)
        for x, y in zip(jets_tuple(a), jets_tuple(b)):
            assert x == pytest.approx(y, rel=1e-13)

    def test_integer_power_negative_base(self):
        j = jet_eval(SmoothFn1.parse("(pow x 3.0)"), -2.0)
        assert jets_tuple(j) == (-8.0, 12.0, -12.0, 6.0)

    def test_real_power(self):
        j = jet_eval(SmoothFn1.parse("(pow x 0.5)", (0.01, 10.0)), 4.0)
        assert j.v == pytest.approx(2.0)
        assert j.d1 == pytest.approx(0.25)
        assert j.d2 == pytest.approx(-1.0 / 32.0)
        assert j.d3 == pytest.approx(3.0 / 256.0)


class TestDomainErrors:
    def test_log_of_negative(self):
        with pytest.raises(DomainError):
            jet_eval(SmoothFn1.parse("(log x)"), -1.0)

    def test_division_by_zero(self):
        with pytest.raises(DomainError):
            jet_eval(SmoothFn1.parse("(div 1.0 x)"), 0.0)

    def test_non_integer_power_of_negative(self):
        with pytest.raises(DomainError):
            jet_eval(SmoothFn1.parse("(pow x 0.5)"), -4.0)

    def test_outside_interval(self):
        fn = SmoothFn1.parse("x", (-1.0, 1.0))
        with pytest.raises(DomainError):
            jet_eval(fn, 2.0)

    def test_overflow_is_domain_error(self):
        with pytest.raises(DomainError):
            jet_eval(SmoothFn1.parse("(exp (mul x x))"), 40.0)

    def test_value_path_matches(self):
        fn = SmoothFn1.parse("(log x)", (-2.0, 2.0))
        with pytest.raises(DomainError):
            fn.value(-0.5)


class TestBiJet2:
    def test_add_separates_variables(self):
        u = UniJet3(2.0, 3.0, 4.0, 0.0)
        w = UniJet3(5.0, 7.0, 1.0, 0.0)
        b = bijet_combine(u, w, "add")
        assert (b.v, b.ds, b.dt, b.dss, b.dst, b.dtt) == (7.0, 3.0, 7.0, 4.0, 0.0, 1.0)

    def test_mul_product_rule(self):
        u = UniJet3(2.0, 3.0, 4.0, 0.0)
        w = UniJet3(5.0, 7.0, 1.0, 0.0)
        b = bijet_combine(u, w, "mul")
        assert (b.v, b.ds, b.dt, b.dss, b.dst, b.dtt) == (10.0, 15.0, 14.0, 20.0, 21.0, 2.0)

    def test_mul_by_one_is_lift(self):
        w = UniJet3(0.7, -1.2, 0.4, 2.0)
        b = bijet_combine(UniJet3.constant(1.0), w, "mul")
        assert b == lift_t(w)

    def test_add_mixed_partial_exactly_zero(self):
        u = UniJet3(1.234, 5.0, -2.0, 1.0)
        w = UniJet3(-0.6, 0.25, 8.0, -3.0)
        assert bijet_combine(u, w, "add").dst == 0.0

    def test_lift_invariants(self):
        u = UniJet3(1.0, 2.0, 3.0, 4.0)
        ls = lift_s(u)
        assert (ls.dt, ls.dst, ls.dtt) == (0.0, 0.0, 0.0)
        lt = lift_t(u)
        assert (lt.ds, lt.dst, lt.dss) == (0.0, 0.0, 0.0)

    def test_unknown_op(self):
        with pytest.raises(ValueError):
            bijet_combine(UniJet3.constant(1.0), UniJet3.constant(1.0), "sub")

    def test_bivariate_chain(self):
        # h(s,t) = sin(s*t): h_st at (s,t) = cos(st) - st sin(st)
        s, t = 0.4, 0.8
        b = (BiJet2.seed_s(s) * BiJet2.seed_t(t)).sin()
        st_ = s * t
        assert b.dst == pytest.approx(math.cos(st_) - st_ * math.sin(st_), rel=1e-13)


class TestParser:
    def test_documented_example(self):
        e = parse_sexpr("(mul (pow (add (mul 0.5 x) 1.0) 2.0) 3.0)")
        fn = SmoothFn1(e)
        j = jet_eval(fn, 2.0)  # 3 (0.5 x + 1)^2 -> 12 at x=2
        assert j.v == pytest.approx(12.0)
        assert j.d1 == pytest.approx(6.0)   # 3 (x/2+1) = 6
        assert j.d2 == pytest.approx(1.5)
        assert j.d3 == 0.0

    def test_roundtrip(self):
        text = "(mul (pow (add (mul 0.5 x) 1.0) 2.0) 3.0)"
        e = parse_sexpr(text)
        again = parse_sexpr(format_sexpr(e))
        assert e == again

    def test_bare_variable(self):
        assert parse_sexpr("x") == Var("x")

    def test_negative_literal(self):
        assert parse_sexpr("-1.5e-3") == Const(-0.0015)

    @pytest.mark.parametrize("bad", [
        "",
        "(add 1.0)",
        "(mul 1.0 2.0 3.0)",
        "(sin)",
        "(frob x)",
        "(add x 1.0",
        "(add x 1.0))",
        "(pow x y)",
        "(add @ 1.0)",
    ])
    def test_parse_errors(self, bad):
        with pytest.raises(ParseError):
            parse_sexpr(bad)

    def test_error_carries_position(self):
        with pytest.raises(ParseError, match="position"):
            parse_sexpr("(add x (frob y))")

    def test_one_variable_enforced(self):
        with pytest.raises(ParseError):
            SmoothFn1.parse("(add x y)")

    def test_any_single_variable_name(self):
        fn = SmoothFn1.parse("(tan y)", (-0.7, 0.7))
        assert fn.var_name == "y"
        assert fn.jet(0.0).d1 == 1.0

    def test_expr_vars(self):
        e = parse_sexpr("(add (sin s) (cos t))")
        assert expr_vars(e) == {"s", "t"}


# --------------------------------------------------------------------------
# property tests
# --------------------------------------------------------------------------

def _safe_exprs():
    leaves = st.one_of(
        st.just(Var("x")),
        st.floats(min_value=-2.0, max_value=2.0).map(lambda c: Const(c)),
    )

    def extend(children):
        def wrap_log(e):
            return Call("log", Bin("add", Const(1.5), Call("sin", e)))

        def wrap_div(pair):
            a, b = pair
            return Bin("div", a, Bin("add", Const(2.0), Call("cos", b)))

        def wrap_pow(e):
            return Pow(Bin("add", Const(1.6), Call("sin", e)), 1.7)

        return st.one_of(
            st.tuples(children, children).map(lambda p: Bin("add", p[0], p[1])),
            st.tuples(children, children).map(lambda p: Bin("sub", p[0], p[1])),
            st.tuples(children, children).map(
                lambda p: Bin("mul", Bin("mul", Const(0.5), p[0]), p[1])),
            st.tuples(children, children).map(wrap_div),
            children.map(lambda e: Call("sin", e)),
            children.map(lambda e: Call("cos", e)),
            children.map(lambda e: Call("tan", Bin("mul", Const(0.4), Call("sin", e)))),
            children.map(lambda e: Call("exp", Call("sin", e))),
            children.map(lambda e: Call("sinh", Call("cos", e))),
            children.map(lambda e: Call("cosh", Call("sin", e))),
            children.map(wrap_log),
            children.map(wrap_pow),
        )

    return st.recursive(leaves, extend, max_leaves=8)


def _fd_jets(fn: SmoothFn1, x: float, h: float = 1e-2):
    """Richardson-extrapolated central differences to order 3."""
    f = fn.value

    def d1(hh):
        return (f(x + hh) - f(x - hh)) / (2.0 * hh)

    def d2(hh):
        return (f(x + hh) - 2.0 * f(x) + f(x - hh)) / (hh * hh)

    def d3(hh):
        return (f(x + 2 * hh) - 2.0 * f(x + hh) + 2.0 * f(x - hh)
                - f(x - 2 * hh)) / (2.0 * hh ** 3)

    rich = lambda d: (4.0 * d(h / 2.0) - d(h)) / 3.0
    return rich(d1), rich(d2), rich(d3)


@settings(max_examples=80, deadline=None)
@given(expr=_safe_exprs(), x=st.floats(min_value=-1.5, max_value=1.5))
def test_jets_agree_with_richardson_differences(expr, x):
    fn = SmoothFn1(expr, (-2.0, 2.0))
    j = jet_eval(fn, x)
    fd1, fd2, fd3 = _fd_jets(fn, x)
    assert abs(j.d1 - fd1) <= 1e-5 * (1.0 + abs(j.d1))
    assert abs(j.d2 - fd2) <= 1e-5 * (1.0 + abs(j.d2))
    assert abs(j.d3 - fd3) <= 1e-5 * (1.0 + abs(j.d3))


@settings(max_examples=60, deadline=None)
@given(f=_safe_exprs(), g=_safe_exprs(),
       a=st.integers(min_value=-4, max_value=4).map(float),
       b=st.integers(min_value=-4, max_value=4).map(float),
       x=st.floats(min_value=-1.5, max_value=1.5))
def test_linearity_is_float_exact(f, g, a, b, x):
    combo = Bin("add", Bin("mul", Const(a), f), Bin("mul", Const(b), g))
    jc = jet_eval(SmoothFn1(combo, (-2.0, 2.0)), x)
    jf = jet_eval(SmoothFn1(f, (-2.0, 2.0)), x)
    jg = jet_eval(SmoothFn1(g, (-2.0, 2.0)), x)
    manual = jf * a + jg * b
    assert jets_tuple(jc) == jets_tuple(manual)


@settings(max_examples=60, deadline=None)
@given(coeffs=st.lists(st.integers(min_value=-5, max_value=5), min_size=1, max_size=4),
       x=st.integers(min_value=-3, max_value=3).map(float))
def test_cubic_polynomials_are_exact(coeffs, x):
    c = [float(v) for v in coeffs] + [0.0] * (4 - len(coeffs))
    j = jet_eval(SmoothFn1(poly_expr(c)), x)
    assert j.v == c[0] + c[1] * x + c[2] * x * x + c[3] * x ** 3
    assert j.d1 == c[1] + 2.0 * c[2] * x + 3.0 * c[3] * x * x
    assert j.d2 == 2.0 * c[2] + 6.0 * c[3] * x
    assert j.d3 == 6.0 * c[3]


def test_eval_value_matches_jet_value():
    fn = SmoothFn1.parse("(mul (exp (mul 0.3 x)) (add 1.0 (sin x)))")
    for x in (-1.2, 0.0, 0.7, 2.4):
        assert fn.value(x) == pytest.approx(jet_eval(fn, x).v, rel=1e-15)
