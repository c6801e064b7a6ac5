import math
import warnings

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from harma.errors import PrecisionWarning, UnknownFamilyError
from harma.humbert import (
    PolyFamily,
    coeff_explicit,
    coeff_explicit_type1,
    coeff_explicit_type2,
    coeff_recurrence,
    coeff_series_oracle,
    explicit_series,
    humbert_coefficients,
    pochhammer,
    specialization,
)


def sympy_coefficients(variant, m, nu, u, N):
    """Taylor coefficients of the generating function computed by sympy."""
    t = sp.Symbol("t")
    nu_r, u_r = sp.Rational(nu), sp.Rational(u)
    a = m * u_r if variant == "type1" else 2 * u_r
    ser = sp.series((1 - a * t + t**m) ** (-nu_r), t, 0, N + 1).removeO()
    return [float(ser.coeff(t, n)) for n in range(N + 1)]


ORACLE_CASES = [
    ("type1", 1, "3/10", "1/5"),
    ("type1", 2, "-3/10", "1/2"),
    ("type1", 3, "3/10", "1/10"),
    ("type1", 4, "9/20", "1/4"),
    ("type2", 1, "-9/20", "7/10"),
    ("type2", 2, "3/10", "3/10"),
    ("type2", 3, "3/10", "1/10"),
    ("type2", 5, "1/4", "3/5"),
]


@pytest.mark.parametrize("variant,m,nu,u", ORACLE_CASES)
def test_all_routes_match_sympy_series(variant, m, nu, u):
    nu_f, u_f = float(sp.Rational(nu)), float(sp.Rational(u))
    want = np.array(sympy_coefficients(variant, m, nu, u, 15))
    scale = np.maximum(np.abs(want), 1e-300)
    for series in (explicit_series(variant, m, nu_f, u_f, 15),
                   coeff_series_oracle(variant, m, nu_f, u_f, 15),
                   coeff_recurrence(variant, m, nu_f, u_f, 15)):
        err = np.abs(series.values - want)
        assert np.all(err <= 1e-10 * scale + 1e-14), series.method


def test_gegenbauer_closed_forms():
    nu, u = 0.37, 0.61
    c = humbert_coefficients(specialization("gegenbauer", nu, u), 2)
    assert c[0] == 1.0
    assert c[1] == pytest.approx(2 * nu * u, rel=1e-12)
    assert c[2] == pytest.approx(2 * nu * (nu + 1) * u**2 - nu, rel=1e-12)


def test_pincherle_second_coefficient():
    nu, u = 0.3, 0.4
    val = coeff_explicit_type1(3, nu, u, 2)
    assert val == pytest.approx(9 * nu * (nu + 1) * u**2 / 2, rel=1e-12)


def test_pincherle_first_coefficient_is_three_nu_u():
    nu, u = 0.3, 0.4
    assert coeff_explicit_type1(3, nu, u, 1) == pytest.approx(3 * nu * u, rel=1e-14)


def test_reference_value_q53():
    assert coeff_explicit_type2(3, 0.3, 0.4, 5) == pytest.approx(-0.25228290048, abs=1e-11)
    assert coeff_recurrence("type2", 3, 0.3, 0.4, 5).values[5] == pytest.approx(
        -0.25228290048, abs=1e-11)


def test_recurrence_reports_plus_sign():
    s = coeff_recurrence("type1", 3, 0.3, 0.1, 10)
    assert s.metadata["third_term_sign"] == "+"
    assert s.method == "recurrence"


def test_nu_zero_is_identity():
    c = humbert_coefficients(PolyFamily("type2", 3, 0.0, 0.4), 8)
    assert c.tolist() == [1.0] + [0.0] * 8


def test_nu_one_m_one_is_geometric():
    # (1 - a t + t)^-1 = sum (a - 1)^n t^n
    fam = PolyFamily("type2", 1, 1.0, 0.8)
    c = humbert_coefficients(fam, 10)
    assert np.allclose(c, 0.6 ** np.arange(11), rtol=1e-13)


def test_generic_dispatch_matches_typed():
    assert coeff_explicit("type1", 4, 0.2, 0.3, 9) == coeff_explicit_type1(4, 0.2, 0.3, 9)
    assert coeff_explicit("type2", 4, 0.2, 0.3, 9) == coeff_explicit_type2(4, 0.2, 0.3, 9)


def test_exact_route_survives_cancellation():
    # a = 2, n = 50: the alternating sum cancels over ~15 digits
    want = sympy_coefficients("type2", 2, "3/10", "1", 50)[50]
    assert coeff_explicit_type2(2, 0.3, 1.0, 50) == pytest.approx(want, rel=1e-12)


def test_float_route_warns_on_cancellation():
    with pytest.warns(PrecisionWarning):
        coeff_explicit_type2(2, 0.3, 1.0, 50, exact=False)


def test_pochhammer():
    assert pochhammer(0.5, 0) == 1.0
    assert pochhammer(0.5, 3) == pytest.approx(0.5 * 1.5 * 2.5)
    assert pochhammer(-2.0, 3) == pytest.approx(-2.0 * -1.0 * 0.0)


def test_specialization_names():
    assert specialization("pincherle", 0.3, 0.1) == PolyFamily("type1", 3, 0.3, 0.1)
    assert specialization("horadam-pethe", 0.3, 0.1) == PolyFamily("type2", 3, 0.3, 0.1)
    assert specialization("horadam_pethe", 0.3, 0.1).m == 3
    assert specialization("horadam", 0.3, 0.1) == PolyFamily("type2", 1, 0.3, 0.1)
    assert specialization("gegenbauer", 0.3, 0.1) == PolyFamily("type2", 2, 0.3, 0.1)
    with pytest.raises(UnknownFamilyError):
        specialization("legendre", 0.3, 0.1)


@pytest.mark.parametrize("bad", [0, -1, 2.5])
def test_invalid_m(bad):
    with pytest.raises(ValueError):
        PolyFamily("type1", bad, 0.3, 0.1)


def test_invalid_variant():
    with pytest.raises(ValueError):
        PolyFamily("type3", 2, 0.3, 0.1)


@settings(max_examples=60, deadline=None)
@given(variant=st.sampled_from(["type1", "type2"]),
       m=st.integers(1, 6),
       nu=st.floats(-0.49, 0.49),
       u=st.floats(0.0, 1.0))
def test_recurrence_agrees_with_exact_explicit(variant, m, nu, u):
    N = 30
    rec = coeff_recurrence(variant, m, nu, u, N).values
    ex = explicit_series(variant, m, nu, u, N).values
    scale = np.max(np.abs(ex))
    assert np.all(np.abs(rec - ex) <= 1e-9 * np.maximum(np.abs(ex), 1e-6 * scale) + 1e-300)


@settings(max_examples=40, deadline=None)
@given(m=st.integers(1, 5), nu=st.floats(-0.45, 0.45), u=st.floats(0.0, 0.9))
def test_generating_function_product_rule(m, nu, u):
    # (1 - a t + t^m)^-nu * (1 - a t + t^m)^nu = 1
    N = 20
    c_pos = humbert_coefficients(PolyFamily("type2", m, nu, u), N)
    c_neg = humbert_coefficients(PolyFamily("type2", m, -nu, u), N)
    prod = np.convolve(c_pos, c_neg)[: N + 1]
    scale = max(1.0, float(np.max(np.abs(c_pos)) * np.max(np.abs(c_neg))))
    assert abs(prod[0] - 1.0) < 1e-14
    assert np.all(np.abs(prod[1:]) < 1e-10 * scale)


def test_type1_is_type2_at_rescaled_u():
    # m u = 2 u'  =>  identical generating functions
    a = explicit_series("type1", 4, 0.3, 0.25, 20).values
    b = explicit_series("type2", 4, 0.3, 0.5, 20).values
    assert np.allclose(a, b, rtol=1e-14, atol=0)


def test_large_order_recurrence_finite():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        c = humbert_coefficients(PolyFamily("type2", 2, 0.3, 0.5), 5000)
    assert np.all(np.isfinite(c))
    assert math.isclose(c[0], 1.0)
