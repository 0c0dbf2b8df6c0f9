# tests/test_physical.py
import math

import pytest

from GFRAG.critical_gf.errors import DomainError, InconclusiveGrid, SeriesSwitchPoint
from GFRAG.critical_gf.mellin import (
    omega,
    series_oracle,
    u2_real,
    u2_real_residue,
    u_residue_at_lattice,
    u_residue_at_sigma2,
)
from GFRAG.critical_gf.model import ModelParams
from GFRAG.critical_gf.physical import (
    Atom,
    AsymptoticLaw,
    Bump,
    MeasureSolution,
    NegativeGammaDensity,
    OmegaSeries,
    forward_mellin,
    global_w,
    large_x_fit,
    large_x_law,
    limit_profile,
    moment_asymptotics,
    moment_law,
    omega_density,
    omega_inverse_mellin,
    omega_profile,
    omega_series,
    pde_residual,
    probe_points,
    scan_solution,
    sign_scan,
    total_mass,
    u_density,
    u_local,
    u_measure,
    weak_form_residual,
)


# --- u: átomo y densidad regular ---

def test_u_at_time_zero_is_the_initial_atom(malthusian):
    measure = u_measure(malthusian, 0.0)
    assert measure.atoms == (Atom(1.0, 1.0),)
    assert u_density(malthusian, 0.0, 0.5) == 0.0


def test_atom_is_transported_and_loses_mass(malthusian):
    local = u_local(malthusian, 0.5, 2.0)
    assert local.atom.location == pytest.approx(2.0, rel=1e-14)
    assert local.atom.weight == pytest.approx(0.5, rel=1e-14)


def test_u_vanishes_right_of_the_atom(malthusian):
    assert u_density(malthusian, 0.5, 2.5) == 0.0
    assert u_density(malthusian, 0.5, 1.0) > 0.0


def test_u_domain(malthusian, negative_oscillating):
    with pytest.raises(DomainError):
        u_density(malthusian, 1.2, 0.5)
    with pytest.raises(DomainError):
        u_density(negative_oscillating, 0.2, 0.5)
    with pytest.raises(DomainError):
        u_density(malthusian, 0.5, -1.0)


def test_total_mass_matches_oracle(malthusian):
    assert total_mass(malthusian, 0.5) == pytest.approx(series_oracle(malthusian, 0.5, 1.0).value.real, rel=1e-9)


def test_forward_mellin_of_u(malthusian):
    measure = u_measure(malthusian, 0.5)
    s = complex(1.3, 0.4)
    assert forward_mellin(measure, s) == pytest.approx(omega(malthusian, 0.5, s), rel=1e-6)
    # Φ(σ₁) = 0: la transformada vale 1 en σ₁ para todo t
    assert forward_mellin(measure, malthusian.sigma1) == pytest.approx(1.0, abs=1e-8)


# --- perfil límite en t = 1/γ ---

def test_limit_profile_closed_values(oscillating):
    assert limit_profile(ModelParams(2.0, 1.0), 0.0) == pytest.approx(2.0 / math.pi, rel=1e-12)
    assert limit_profile(oscillating, 0.0) == pytest.approx(math.sinh(math.pi) / math.pi, rel=1e-11)


def test_limit_profile_decay():
    params = ModelParams(2.0, 1.0)
    # (1 + x²)^{−1}
    assert limit_profile(params, 3.0) == pytest.approx(2.0 / math.pi / 10.0, rel=1e-12)
    assert limit_profile(params, 1e200) == pytest.approx(0.0, abs=1e-300)


@pytest.mark.parametrize("eps", [1e-3, 1e-5, 1e-6])
def test_u_approaches_limit_profile(malthusian, eps):
    t = (1.0 - eps) / malthusian.gamma
    near = global_w(malthusian, t, 0.5)
    assert near.atom is None
    assert near.density == pytest.approx(limit_profile(malthusian, 0.5), abs=1e-3)
    assert u_local(malthusian, t, 0.5).density == near.density
    assert u_density(malthusian, t, 2.0) == pytest.approx(limit_profile(malthusian, 2.0), abs=1e-3)


def test_global_w_dispatch(malthusian):
    assert global_w(malthusian, 1.0, 0.5).density == limit_profile(malthusian, 0.5)
    assert global_w(malthusian, 0.5, 2.0).atom is not None
    assert global_w(malthusian, 2.0, 3.0).density == pytest.approx(omega_density(malthusian, 2.0, 3.0))
    with pytest.raises(DomainError):
        global_w(ModelParams(-1.0, 0.75), 0.2, 0.5)


# --- ω: series e inversión ---

def test_omega_series_matches_inverse_mellin(malthusian):
    series = omega_series(malthusian, 2.0, 3.0)
    assert series == pytest.approx(omega_inverse_mellin(malthusian, 2.0, 3.0).real, rel=1e-7)


def test_omega_inside_band_uses_grid(malthusian):
    # banda de ω para γt = 2: (0.5, 1)
    assert omega_density(malthusian, 2.0, 0.7) == pytest.approx(
        omega_inverse_mellin(malthusian, 2.0, 0.7).real, rel=1e-6)
    with pytest.raises(SeriesSwitchPoint):
        omega_series(malthusian, 2.0, 0.7)


def test_omega_profile_agrees_with_pointwise(malthusian):
    xs = [0.1, 0.7, 3.0]
    profile = omega_profile(malthusian, 2.0, xs)
    assert list(profile) == pytest.approx([omega_density(malthusian, 2.0, x) for x in xs], rel=1e-10)


def test_omega_series_domain(malthusian):
    with pytest.raises(DomainError):
        OmegaSeries(malthusian, 0.5)


def test_small_x_coefficients_are_lattice_residues(malthusian):
    t = 2.0
    tables = OmegaSeries(malthusian, t)
    gt = malthusian.gamma * t
    for m, c in enumerate(tables.small_coefficients(6)):
        assert c * gt ** m == pytest.approx(u_residue_at_lattice(malthusian, t, m), rel=1e-8)


def test_large_x_coefficients_are_sigma2_residues(malthusian):
    t = 2.0
    tables = OmegaSeries(malthusian, t)
    shift = malthusian.gamma * t - 1.0
    for m, d in enumerate(tables.large_coefficients(6)):
        assert d * shift ** (-m) == pytest.approx(-u_residue_at_sigma2(malthusian, t, m), rel=1e-8)


def test_large_x_slope(malthusian):
    fit = large_x_fit(malthusian, 2.0)
    assert fit.expected_slope == pytest.approx(-2.5)
    assert abs(fit.slope - fit.expected_slope) < 0.02
    assert fit.phase_error is None


def test_large_x_leading_coefficient(malthusian):
    law = large_x_law(malthusian, 2.0).constants
    x = 1e4
    scaled = omega_profile(malthusian, 2.0, [x])[0] * x ** 2.5
    assert scaled == pytest.approx((law["A"] * law["H"]).real, rel=1e-2)


@pytest.mark.slow
def test_large_x_phase_for_oscillating(oscillating):
    fit = large_x_fit(oscillating, 2.0)
    assert fit.phase_error < 0.05


# --- v: γ < 0 ---

def test_v_coefficients_are_residues():
    params = ModelParams(-1.0, 0.91)
    t = 0.3
    density = NegativeGammaDensity(params, t)
    assert not density.degenerate
    for ell in (1, 2):
        for m, d in enumerate(density.coefficients(ell, 5)):
            assert d == pytest.approx(u2_real_residue(params, t, ell, m) * (0.3 ** m), rel=1e-8)


def test_v_geometry(negative_oscillating):
    density = NegativeGammaDensity(negative_oscillating, 0.3)
    assert density.x_star == pytest.approx(0.3)
    assert density.x_a == pytest.approx(1.3)
    assert density(1.5) == 0.0


def test_v_degenerate_connection_is_averaged(negative_malthusian):
    # (σ₂ − σ₁)/γ = −1: polos dobles
    assert NegativeGammaDensity(negative_malthusian, 0.3).degenerate


def test_v_small_x_law_oscillates(negative_oscillating):
    law = NegativeGammaDensity(negative_oscillating, 0.3).small_x_law()
    assert law.kind == "SmallXOscillation"
    assert set(law.constants) == {"h1", "h2", "zeta", "exponent"}


def test_v_domain():
    with pytest.raises(DomainError):
        NegativeGammaDensity(ModelParams(1.0, 2.0), 0.3)
    with pytest.raises(DomainError):
        NegativeGammaDensity(ModelParams(-1.0, 2.0), 1.5)


@pytest.mark.slow
def test_forward_mellin_of_v():
    params = ModelParams(-1.0, 0.91)
    t = 0.3
    s = complex(1.1, 0.3)
    measure = NegativeGammaDensity(params, t).measure()
    assert forward_mellin(measure, s) == pytest.approx(u2_real(params, t, s), rel=1e-6)


# --- medidas ---

def test_measure_rejects_negative_atom(malthusian):
    with pytest.raises(DomainError):
        MeasureSolution(malthusian, 0.0, (Atom(1.0, -0.1),), lambda x: 0.0)


def test_measure_at_reports_atom_only_at_its_location(malthusian):
    measure = u_measure(malthusian, 0.5)
    assert measure.at(2.0).atom == Atom(2.0, 0.5)
    assert measure.at(1.0).atom is None
    assert measure.at(3.0).density == 0.0


def test_asymptotic_law_rejects_non_finite():
    with pytest.raises(DomainError):
        AsymptoticLaw("LargeX", {"A": complex(math.inf, 0.0)})


# --- barrido de signo ---

def test_probe_points():
    assert probe_points(ModelParams(1.0, 0.75), 1.0, 1e3) == []
    assert probe_points(ModelParams(1.0, 2.0), 1.0, 1e3) == pytest.approx([1.0, math.exp(math.pi),
                                                                          math.exp(2 * math.pi)])
    assert probe_points(ModelParams(-1.0, 2.0), 1e-3, 1.0) == pytest.approx([1.0, math.exp(-math.pi),
                                                                            math.exp(-2 * math.pi)])


def test_sign_scan_brackets_known_zeros():
    report = sign_scan(lambda x: math.cos(math.log(x)), 0.1, 100.0, points_per_decade=16)
    assert report.verdict == "Oscillates"
    assert len(report.sign_changes) == 2
    root = math.exp(math.pi / 2)
    bracket = report.sign_changes[1]
    assert bracket.lo <= root <= bracket.hi
    assert bracket.hi / bracket.lo - 1.0 <= 1e-9


def test_sign_scan_verdicts():
    positive = sign_scan(lambda x: 1.0 / (1.0 + x), 0.1, 10.0, points_per_decade=8)
    assert positive.verdict == "Nonnegative"
    assert positive.min_value > 0
    critical = sign_scan(lambda x: 1.0 / (1.0 + x), 0.1, 10.0, points_per_decade=8, critical=True)
    assert critical.verdict == "Inconclusive"
    with pytest.raises(InconclusiveGrid):
        sign_scan(lambda x: 0.0, 0.1, 10.0, points_per_decade=8, strict=True)
    with pytest.raises(DomainError):
        sign_scan(lambda x: 1.0, 10.0, 0.1)


def test_omega_oscillates_for_large_theta(oscillating):
    report = scan_solution(oscillating, 2.0, decades=4, points_per_decade=64)
    assert report.verdict == "Oscillates"


def test_v_oscillates_for_large_theta(negative_oscillating):
    report = scan_solution(negative_oscillating, 0.3, decades=4, points_per_decade=64)
    assert report.verdict == "Oscillates"


def test_omega_nonnegative_for_small_theta(malthusian):
    report = scan_solution(malthusian, 2.0, decades=4, points_per_decade=64)
    assert report.verdict == "Nonnegative"
    assert report.sign_changes == []


# --- momentos cerca de t = 1/γ ---

def test_moment_blowup(malthusian):
    check = moment_asymptotics(malthusian, 2.0)
    assert check.law.kind == "MomentBlowup"
    assert check.target == pytest.approx(16.0 / (3.0 * math.pi), rel=1e-12)
    assert check.relative_error < 1e-2


def test_subcritical_moment(malthusian):
    check = moment_asymptotics(malthusian, 0.5)
    assert check.law.kind == "SubcriticalMoment"
    assert check.target == pytest.approx(1.0, rel=1e-12)
    assert check.relative_error < 1e-2


def test_log_moment(oscillating):
    check = moment_asymptotics(oscillating, 1.0)
    assert check.law.kind == "LogMoment"
    assert check.target == pytest.approx(math.sinh(math.pi) / math.pi, rel=1e-11)
    assert check.relative_error < 1e-2


def test_moment_law_domain(malthusian):
    with pytest.raises(DomainError):
        moment_law(malthusian, 0.0)
    with pytest.raises(DomainError):
        moment_law(ModelParams(-1.0, 0.75), 2.0)


# --- forma débil y residuo puntual ---

def test_bump_support():
    bump = Bump(0.1, 0.5, 0.2, 1.0)
    assert bump.psi(0.1) == (0.0, 0.0)
    assert bump.psi_integral(0.2) == 0.0
    assert bump.psi_integral(1.0) > 0.0
    with pytest.raises(DomainError):
        Bump(0.5, 0.1, 0.2, 1.0)


@pytest.mark.slow
def test_weak_form_for_u(malthusian):
    result = weak_form_residual(malthusian, Bump(0.1, 0.5, 0.2, 1.0))
    assert result.relative < 1e-5


@pytest.mark.slow
def test_pointwise_equation_for_omega(malthusian):
    result = pde_residual(malthusian, 2.0, 3.0)
    assert result.relative < 1e-5


def test_pde_residual_domain(malthusian):
    with pytest.raises(DomainError):
        pde_residual(malthusian, 0.5, 3.0)
