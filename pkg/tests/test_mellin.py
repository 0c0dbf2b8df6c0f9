# tests/test_mellin.py
import cmath
import math

import pytest

from GFRAG.critical_gf.contour import numerical_residue
from GFRAG.critical_gf.errors import DomainError, NonConvergence, PoleProximity
from GFRAG.critical_gf.mellin import (
    MellinSolution,
    a_coefficient,
    extrapolate,
    h_coefficient,
    omega,
    omega_forms,
    omega_limit,
    richardson_ladder,
    series_oracle,
    u2,
    u2_normalized,
    u2_real,
    u2_real_residue,
    u2_residue,
    u_closed,
    u_residue_at_lattice,
    u_residue_at_sigma2,
    u_sym,
)
from GFRAG.critical_gf.model import ModelParams, phi

H = 1e-5


def _time_derivative(f, t):
    return (f(t + H) - f(t - H)) / (2 * H)


# --- Ω ---

def test_omega_initial_value(oscillating):
    assert omega(oscillating, 0.0, 0.7 + 2j) == 1.0


def test_omega_at_first_root_is_one(malthusian):
    assert omega(malthusian, 0.6, malthusian.sigma1) == pytest.approx(1.0, rel=1e-12)


def test_omega_first_order_in_t(oscillating):
    # W ≈ 1 + tΦ(s) con Φ(2) = θ/2 = 1
    assert omega(oscillating, 0.1, 2.0) == pytest.approx(1.1, abs=1e-2)


@pytest.mark.parametrize("t, s", [(0.5, 2.0), (0.3, 0.4 + 1.2j), (0.7, 1.3), (0.5, 25.0)])
def test_omega_matches_power_series(oscillating, t, s):
    assert omega(oscillating, t, s) == pytest.approx(series_oracle(oscillating, t, s).value, rel=1e-9)


@pytest.mark.parametrize("gamma, theta, t, s", [(1.0, 0.75, 0.4, 1.2), (0.5, 4.0, 1.2, 0.3 + 0.5j), (2.0, 2.0, 0.3, 3.1)])
def test_omega_two_forms_agree(gamma, theta, t, s):
    direct, euler = omega_forms(ModelParams(gamma, theta), t, s)
    assert direct == pytest.approx(euler, rel=1e-9)


@pytest.mark.parametrize("gamma, theta, t, s", [(1.0, 0.75, 0.4, 1.2), (1.0, 2.0, 0.6, 0.5 + 0.5j), (0.5, 4.0, 1.0, 1.7)])
def test_omega_functional_equation(gamma, theta, t, s):
    params = ModelParams(gamma, theta)
    lhs = _time_derivative(lambda tt: omega(params, tt, s), t)
    rhs = phi(params, s) * omega(params, t, s + gamma)
    assert abs(lhs - rhs) <= 1e-5 * max(1.0, abs(rhs))


@pytest.mark.parametrize("gamma, theta, s, expected", [
    (2.0, 1.0, 1.0, 1.0),
    (1.0, 0.75, 1.0, 2 / math.pi),
    (1.0, 2.0, 1.5, math.sinh(math.pi) / 2),
])
def test_omega_limit_closed_values(gamma, theta, s, expected):
    assert omega_limit(ModelParams(gamma, theta), s) == pytest.approx(expected, rel=1e-12)


def test_omega_limit_is_reached_from_below(malthusian):
    limit = omega_limit(malthusian, 0.8)
    assert omega(malthusian, 1.0 - 1e-7, 0.8) == pytest.approx(limit, rel=1e-5)


def test_omega_domain_errors(oscillating):
    with pytest.raises(DomainError):
        omega_limit(oscillating, 2.0)
    with pytest.raises(DomainError):
        omega(oscillating, 1.2, 1.0)
    with pytest.raises(PoleProximity):
        omega(oscillating, 0.5, -1.0)
    with pytest.raises(DomainError):
        omega(ModelParams(-1.0, 2.0), 0.3, 1.0)


# --- oráculo ---

def test_series_oracle_truncation(oscillating):
    assert series_oracle(oscillating, 0.0, 2.0).value == 1.0
    assert series_oracle(oscillating, 0.1, 2.0, n_terms=1).value == pytest.approx(1.1, rel=1e-15)


def test_series_oracle_domain(oscillating):
    with pytest.raises(DomainError):
        series_oracle(oscillating, 1.0, 2.0)
    with pytest.raises(NonConvergence):
        series_oracle(oscillating, 0.99, 2.0, n_terms=5, strict=True)


# --- U ---

def test_u_at_first_root_is_one(malthusian):
    assert u_closed(malthusian, 2.0, malthusian.sigma1) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("gamma, theta, t, s", [(1.0, 0.75, 2.0, 0.7), (1.0, 2.0, 1.5, 0.5 + 0.5j), (0.5, 0.75, 3.0, 1.1)])
def test_u_functional_equation(gamma, theta, t, s):
    params = ModelParams(gamma, theta)
    lhs = _time_derivative(lambda tt: u_closed(params, tt, s), t)
    rhs = phi(params, s) * u_closed(params, t, s + gamma)
    assert abs(lhs - rhs) <= 1e-5 * max(1.0, abs(rhs))


def test_u_is_continuous_at_the_junction():
    params = ModelParams(2.0, 1.0)
    assert u_closed(params, 0.5 + 1e-9, 0.6) == pytest.approx(omega_limit(params, 0.6), rel=1e-4)


def test_u_sym_is_real_on_the_real_axis(oscillating):
    value = u_sym(oscillating, 2.0, 0.8)
    assert abs(value.imag) <= 1e-12 * abs(value)
    assert value.real == pytest.approx(u_closed(oscillating, 2.0, 0.8).real, rel=1e-12)


def test_large_x_coefficient(malthusian):
    # A(t)·H(t) = γΓ(1+σ₂/γ)/(Γ(σ₁/γ)Γ(1+(σ₂−σ₁)/γ))·(γt−1)^{σ₁/γ−1}/(γt)^{σ₂/γ}
    t = 2.0
    g, s1, s2 = 1.0, 0.5, 1.5
    expected = (g * math.gamma(1 + s2) / (math.gamma(s1) * math.gamma(1 + s2 - s1))
                * (g * t - 1) ** (s1 - 1) / (g * t) ** s2)
    product = a_coefficient(malthusian, t) * h_coefficient(malthusian, t)
    assert product == pytest.approx(expected, rel=1e-12)


def test_u_residues_match_numerical_residues(malthusian, oscillating):
    for params in (malthusian, oscillating):
        u = lambda s: u_closed(params, 2.0, s)
        pole = params.sigma2 + params.gamma
        assert u_residue_at_sigma2(params, 2.0, 0) == pytest.approx(numerical_residue(u, pole), rel=1e-7)
        assert u_residue_at_lattice(params, 2.0, 1) == pytest.approx(numerical_residue(u, -1.0 + 0j), rel=1e-7)


# --- U₂ ---

def test_u2_initial_value(negative_oscillating):
    assert u2(negative_oscillating, 0.0, 1.5) == pytest.approx(0.5j / math.pi)
    assert u2_normalized(negative_oscillating, 0.0, 1.5) == pytest.approx(1.0)
    assert u2_real(negative_oscillating, 0.0, 1.5) == 1.0


@pytest.mark.parametrize("theta, t, s", [(2.0, 0.3, 1.7), (0.75, 0.5, 2.2), (2.0, 0.6, 0.8 + 0.4j)])
def test_u2_functional_equation(theta, t, s):
    params = ModelParams(-1.0, theta)
    lhs = _time_derivative(lambda tt: u2(params, tt, s), t)
    rhs = phi(params, s) * u2(params, t, s - 1.0)
    assert abs(lhs - rhs) <= 1e-5 * max(1.0, abs(rhs))


@pytest.mark.parametrize("theta", [0.75, 2.0])
def test_u2_has_no_pole_at_zero(theta):
    params = ModelParams(-1.0, theta)
    inner = max(abs(u2(params, 0.3, 0.01 * cmath.exp(2j * math.pi * k / 16))) for k in range(16))
    outer = max(abs(u2(params, 0.3, 0.1 * cmath.exp(2j * math.pi * k / 16))) for k in range(16))
    assert inner <= 10.0 * outer


def test_u2_lattice_value_is_the_local_mean(negative_oscillating):
    at_lattice = u2(negative_oscillating, 0.3, 1.0)
    nearby = u2(negative_oscillating, 0.3, 1.0 + 2e-3)
    assert at_lattice == pytest.approx(nearby, rel=1e-2)


def test_u2_real_is_the_real_part_of_the_normalized_transform(negative_oscillating):
    value = u2_real(negative_oscillating, 0.5, 1.3)
    assert abs(value.imag) <= 1e-10 * abs(value)
    assert value.real == pytest.approx(u2_normalized(negative_oscillating, 0.5, 1.3).real, rel=1e-10)


def test_u2_residues_match_numerical_residues():
    # σ = (0.7, 1.3): cot(πσ/γ) ≠ 0, el residuo de W_real no se anula
    params, t = ModelParams(-1.0, 0.91), 0.3
    pole = params.sigma2 - 1.0
    assert u2_residue(params, t, 2, 0) == pytest.approx(numerical_residue(lambda s: u2(params, t, s), pole), rel=1e-7)
    expected = numerical_residue(lambda s: u2_real(params, t, s), pole)
    assert u2_real_residue(params, t, 2, 0) == pytest.approx(expected, rel=1e-7)


# --- polos ---

def test_pole_sets():
    omega_poles = MellinSolution("Omega", ModelParams(1.0, 2.0)).pole_set((-2.5, 3.0))
    assert [p.location for p in omega_poles] == pytest.approx([-2.0, -1.0, 0.0])
    u_poles = MellinSolution("U", ModelParams(1.0, 0.75)).pole_set((0.0, 4.0))
    assert [p.location for p in u_poles] == pytest.approx([2.5, 3.5])
    u2_poles = MellinSolution("U2", ModelParams(-1.0, 0.75)).pole_set((-2.0, 1.0))
    assert [p.location for p in u2_poles] == pytest.approx([-1.5, -0.5, 0.5])


def test_omega_lattice_residue(malthusian):
    (pole,) = MellinSolution("Omega", malthusian).pole_set((-1.5, -0.5), t=0.5)
    expected = numerical_residue(lambda s: omega(malthusian, 0.5, s), pole.location)
    assert pole.residue == pytest.approx(expected, rel=1e-7)


def test_solution_validity(oscillating):
    solution = MellinSolution("U", oscillating)
    assert solution.validity.strip == pytest.approx((0.0, 2.0))
    with pytest.raises(DomainError):
        solution(0.5, 1.0)
    with pytest.raises(DomainError):
        MellinSolution("U2", oscillating)


# --- extrapolación ---

def test_extrapolation_removes_polynomial_corrections():
    eps = [2.0 ** -k for k in range(4, 10)]
    values = [3.0 + 2.0 * e - 5.0 * e ** 2 for e in eps]
    assert extrapolate(values, [eps, [e ** 2 for e in eps]]) == pytest.approx(3.0, rel=1e-12)
    assert richardson_ladder(2.0, [1, 2]) == pytest.approx([0.25, 0.375])
