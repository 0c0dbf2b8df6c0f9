# tests/test_special.py
import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from GFRAG.critical_gf.errors import BalancedCase, PoleProximity
from GFRAG.critical_gf.special import (
    cgamma,
    clog_gamma,
    crgamma,
    f21,
    gamma_ratio,
    hyp2f1_limit_z1,
    hyp2f1_regularized,
)

finite = dict(allow_nan=False, allow_infinity=False)
re_part = st.floats(min_value=-6.0, max_value=8.0, **finite)
im_part = st.floats(min_value=-15.0, max_value=15.0, **finite)


def _away_from_poles(s: complex, gap: float = 1e-3) -> bool:
    return abs(s - round(s.real)) > gap or round(s.real) > 0


# --- Γ ---

@pytest.mark.parametrize("s", [0.5, 1.0, 3.7, 2.5 + 1.5j, -0.5, -2.3 + 0.1j, 0.1 - 7j, 4 + 30j])
def test_cgamma_matches_mpmath(s):
    expected = complex(mpmath.gamma(s))
    assert cgamma(s) == pytest.approx(expected, rel=1e-11)


def test_gamma_recurrence_on_wide_strip():
    # 10⁴ puntos en |Re s| ≤ 20, |Im s| ≤ 50, lejos de los polos
    rng = np.random.default_rng(2024)
    points = rng.uniform(-20.0, 20.0, 10_000) + 1j * rng.uniform(-50.0, 50.0, 10_000)
    worst = 0.0
    for s in points:
        s = complex(s)
        if not (_away_from_poles(s, 0.05) and _away_from_poles(s + 1, 0.05)):
            continue
        lhs, rhs = cgamma(s + 1), s * cgamma(s)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    assert worst <= 1e-12


@given(re_part, st.floats(min_value=-5.0, max_value=5.0, **finite))
@settings(max_examples=200, deadline=None)
def test_gamma_reflection(x, y):
    s = complex(x, y)
    assume(abs(s - round(s.real)) > 1e-3)
    assert cgamma(s) * cgamma(1 - s) == pytest.approx(math.pi / cmath.sin(math.pi * s), rel=1e-9)


@given(re_part, im_part)
@settings(max_examples=100, deadline=None)
def test_log_gamma_is_a_branch_of_log(x, y):
    s = complex(x, y)
    assume(_away_from_poles(s))
    assert cmath.exp(clog_gamma(s)) == pytest.approx(cgamma(s), rel=1e-9)


def test_reciprocal_gamma_vanishes_at_nonpositive_integers():
    for n in range(0, 6):
        assert crgamma(-n) == 0
    assert crgamma(2.5) == pytest.approx(1 / complex(mpmath.gamma(2.5)), rel=1e-12)


def test_gamma_pole_raises():
    with pytest.raises(PoleProximity):
        cgamma(-3.0)
    with pytest.raises(PoleProximity):
        cgamma(1e-10)


def test_gamma_ratio_zero_for_denominator_pole():
    assert gamma_ratio([1.5], [-2.0]) == 0


def test_gamma_ratio_large_arguments_use_logs():
    # Γ(60.5)/Γ(60) ≈ √60 (1 − 1/(8·60))
    value = gamma_ratio([60.5], [60.0])
    assert value == pytest.approx(complex(mpmath.gamma(60.5) / mpmath.gamma(60)), rel=1e-10)


# --- ₂F₁ ---

A, B, C = 0.3 + 0.2j, 1.7, 2.1 - 0.4j


@pytest.mark.parametrize("z", [0.3, -0.45, 0.5 + 0.5j, 0.8, 0.97, -2.0, -10.0 + 1j, 3.0 + 1.0j, -0.7 - 0.8j])
def test_f21_matches_mpmath(z):
    expected = complex(mpmath.hyp2f1(A, B, C, z))
    assert f21(A, B, C, z) == pytest.approx(expected, rel=1e-9)


def _extended_series(a, b, c, z, terms=200):
    with mpmath.workdps(30):
        a, b, c, z = (mpmath.mpc(v) for v in (a, b, c, z))
        term, total, magnitude = mpmath.mpc(1), mpmath.mpc(1), mpmath.mpf(1)
        for n in range(terms):
            term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
            total += term
            magnitude += abs(term)
        return complex(total), float(magnitude)


def test_f21_matches_extended_precision_series():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(200):
        a = complex(rng.uniform(-1.0, 2.0), rng.uniform(-1.0, 1.0))
        b = complex(rng.uniform(-1.0, 2.0), rng.uniform(-1.0, 1.0))
        c = complex(rng.uniform(0.5, 3.0), rng.uniform(-1.0, 1.0))
        z = rng.uniform(0.0, 0.5) * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
        expected, magnitude = _extended_series(a, b, c, z)
        if magnitude > 1e3 * abs(expected):
            # cancelación fuerte: la precisión relativa no está definida
            continue
        checked += 1
        assert abs(f21(a, b, c, z) - expected) <= 1e-10 * abs(expected)
    assert checked >= 180


def test_f21_annulus_matches_mpmath():
    # 0.6 < |z| < 1 en todas las direcciones
    rng = np.random.default_rng(11)
    for _ in range(200):
        z = rng.uniform(0.6, 1.0) * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
        expected = complex(mpmath.hyp2f1(A, B, C, z))
        assert abs(f21(A, B, C, z) - expected) <= 1e-9 * max(abs(expected), 1e-2)


def test_f21_outside_unit_disk_matches_mpmath():
    # |z| > 1 fuera del corte [1, ∞), incluyendo Re z ≥ 0.5
    rng = np.random.default_rng(13)
    right_half = 0
    for _ in range(200):
        phase = rng.uniform(0.05, math.pi) * rng.choice([-1.0, 1.0])
        z = rng.uniform(1.0, 6.0) * cmath.exp(1j * phase)
        right_half += z.real >= 0.5
        expected = complex(mpmath.hyp2f1(A, B, C, z))
        assert abs(f21(A, B, C, z) - expected) <= 1e-9 * max(abs(expected), 1e-2)
    assert right_half > 20


@pytest.mark.parametrize("z", [0.5 + 0.5j, 0.1 + 0.99j, 0.95 + 0.2j, 2.0 + 0.5j])
def test_f21_hard_points(z):
    expected = complex(mpmath.hyp2f1(0.3, 1.7, 2.1, z))
    assert f21(0.3, 1.7, 2.1, z) == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("eps", [1e-3, 1e-5, 1e-6])
def test_f21_near_one_with_integer_exponent(eps):
    # c − a − b = −2: la conexión 1−z es degenerada y F ~ (1−z)^{−2}
    z = 1.0 - eps
    expected = complex(mpmath.hyp2f1(1.5, 2.5, 2.0, z))
    assert f21(1.5, 2.5, 2.0, z) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("z", [0.9, 0.99, 1.0 - 1e-6, -2.0])
def test_f21_logarithmic_case(z):
    # F(1,1;2;z) = −log(1−z)/z (c−a−b = 0: la conexión 1−z es degenerada)
    assert f21(1, 1, 2, z) == pytest.approx(-math.log(1 - z) / z, rel=1e-10)


def test_f21_terminating_series_is_a_polynomial():
    z = 0.37 + 0.2j
    expected = 1 + (-2) * 1.5 / 2.5 * z + (-2) * (-1) * 1.5 * 2.5 / (2.5 * 3.5 * 2) * z ** 2
    assert f21(-2, 1.5, 2.5, z) == pytest.approx(expected, rel=1e-13)


def test_f21_gauss_summation_at_one():
    limit = hyp2f1_limit_z1(0.5, 0.25, 2.0)
    assert limit.regime == "regular"
    assert limit.value == pytest.approx(complex(mpmath.hyp2f1(0.5, 0.25, 2.0, 1)), rel=1e-12)


def test_f21_singular_limit_coefficient():
    # Re(c−a−b) < 0: F ~ Γ(c)Γ(a+b−c)/(Γ(a)Γ(b))·(1−z)^{c−a−b}
    a, b, c = 1.5, 1.25, 2.0
    limit = hyp2f1_limit_z1(a, b, c)
    assert limit.regime == "singular"
    z = 1 - 1e-6
    approx = complex(mpmath.hyp2f1(a, b, c, z)) * (1 - z) ** (a + b - c)
    assert limit.value == pytest.approx(approx, rel=1e-3)


def test_balanced_limit_is_refused():
    with pytest.raises(BalancedCase):
        hyp2f1_limit_z1(1.0, 1.0, 2.0)


def test_regularized_hypergeometric_is_continuous_in_c():
    a, b, z = 0.4, 1.3, 0.3
    at_pole = hyp2f1_regularized(a, b, -1.0, z)
    nearby = hyp2f1_regularized(a, b, -1.0 + 1e-7, z)
    assert at_pole == pytest.approx(nearby, rel=1e-4)
    # en c = −1 sólo sobrevive la serie desplazada desde el término n = 2
    expected = complex(a * (a + 1) * b * (b + 1) * z ** 2 / 2 * mpmath.hyp2f1(a + 2, b + 2, 3, z))
    assert at_pole == pytest.approx(expected, rel=1e-11)


@given(st.floats(min_value=0.05, max_value=0.55, **finite), st.floats(min_value=-0.5, max_value=0.5, **finite))
@settings(max_examples=100, deadline=None)
def test_contiguous_relation(x, y):
    # c(c−1)(z−1)F(c−1) + c[c−1−(2c−a−b−1)z]F(c) + (c−a)(c−b)zF(c+1) = 0
    a, b, c = 0.7 + 0.3j, 1.2, 2.6
    z = complex(x, y)
    lhs = (c * (c - 1) * (z - 1) * f21(a, b, c - 1, z)
           + c * (c - 1 - (2 * c - a - b - 1) * z) * f21(a, b, c, z)
           + (c - a) * (c - b) * z * f21(a, b, c + 1, z))
    assert abs(lhs) <= 1e-9 * max(1.0, abs(c * c * f21(a, b, c, z)))
