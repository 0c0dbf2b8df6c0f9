# GFRAG/critical_gf/model.py

import cmath
import math
from dataclasses import dataclass, replace

from typing_extensions import Self

from . import schemas
from .errors import DomainError, PoleProximity
from .settings import CRITICAL_WINDOW, EPS_POLE


# ----------------------------------------------------------------------
# ----------------- PARÁMETROS DEL MODELO -----------------
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    """
    Parámetros (γ, θ) de la ecuación de crecimiento-fragmentación crítica con
    densidad de dislocación k₀(x) = θ·H(1−x). Valor inmutable.
    """
    gamma: float
    theta: float

    def __post_init__(self):
        if not math.isfinite(self.gamma) or self.gamma == 0.0:
            raise DomainError("gamma", self.gamma, "γ ≠ 0 finito")
        if not math.isfinite(self.theta) or self.theta <= 0.0:
            raise DomainError("theta", self.theta, "θ > 0 finito")

    # --- raíces de sΦ(s) ---
    @property
    def root(self) -> complex:
        # rama principal: Im ≥ 0
        return cmath.sqrt(complex(1.0 - self.theta, 0.0))

    @property
    def sigma1(self) -> complex:
        return 1.0 - self.root

    @property
    def sigma2(self) -> complex:
        return 1.0 + self.root

    def sigma(self, ell: int) -> complex:
        """σ_ℓ para ℓ ∈ {1, 2}."""
        if ell not in (1, 2):
            raise DomainError("ell", ell, "{1, 2}")
        return self.sigma1 if ell == 1 else self.sigma2

    @property
    def zeta(self) -> float:
        """Frecuencia de oscilación Im σ₂ (0 si θ ≤ 1)."""
        return self.sigma2.imag

    @property
    def nu(self) -> float:
        """ν = min(2, Re σ₂ + γ) para γ > 0."""
        if self.gamma <= 0:
            raise DomainError("gamma", self.gamma, "γ > 0")
        return min(2.0, self.sigma2.real + self.gamma)

    @property
    def critical(self) -> bool:
        return abs(self.theta - 1.0) < CRITICAL_WINDOW

    @property
    def malthusian(self) -> bool:
        return self.theta < 1.0 and not self.critical

    def nudged(self, dtheta: float = 0.0, dgamma: float = 0.0) -> Self:
        """Copia con θ y γ desplazados (para esquivar conexiones degeneradas)."""
        return replace(self, theta=self.theta + dtheta, gamma=self.gamma + dgamma)

    # --- geometría de la solución física ---
    def x_atom(self, t: float) -> float:
        """Posición (1−γt)^{−1/γ} del átomo transportado."""
        return (1.0 - self.gamma * t) ** (-1.0 / self.gamma)

    def atom_weight(self, t: float) -> float:
        return (1.0 - self.gamma * t) ** (1.0 / self.gamma)

    def x_star(self, t: float) -> float:
        """Para γ < 0: x* = (−γt)^{−1/γ}, borde de la región de características."""
        if self.gamma >= 0:
            raise DomainError("gamma", self.gamma, "γ < 0")
        return (-self.gamma * t) ** (-1.0 / self.gamma)


# ----------------------------------------------------------------------
# ----------------- FUNCIÓN CARACTERÍSTICA -----------------
# ----------------------------------------------------------------------

def phi(params: ModelParams, s: complex) -> complex:
    """Φ(s) = θ/s + s − 2 = (s−σ₁)(s−σ₂)/s."""
    s = complex(s)
    if abs(s) <= EPS_POLE:
        raise PoleProximity(s, 0.0)
    return params.theta / s + s - 2.0


def dislocation_mellin(params: ModelParams, s: complex) -> complex:
    """K(s) = θ/s, transformada de Mellin de θH(1−x)."""
    s = complex(s)
    if abs(s) <= EPS_POLE:
        raise PoleProximity(s, 0.0)
    if s.real <= 0:
        raise DomainError("Re s", s.real, "Re s > 0")
    return params.theta / s


def inf_phi(params: ModelParams) -> float:
    """inf_{s>0} Φ(s), alcanzado en s = √θ."""
    return 2.0 * (math.sqrt(params.theta) - 1.0)


def classify(params: ModelParams) -> schemas.RegimeReport:
    """Clasifica el régimen (Malthusiano, crítico, signo de γ) y el comportamiento esperado."""
    if params.critical:
        expected = "Inconclusive"
    elif params.theta < 1.0:
        expected = "GlobalNonneg"
    elif params.gamma > 0:
        expected = "BlowupNoExtension"
    else:
        expected = "NoLocalNonneg"
    return schemas.RegimeReport(
        gamma=params.gamma,
        theta=params.theta,
        sigma1=schemas.ComplexOut.of(params.sigma1),
        sigma2=schemas.ComplexOut.of(params.sigma2),
        malthusian=params.malthusian,
        critical=params.critical,
        inf_phi=inf_phi(params),
        gamma_sign=1 if params.gamma > 0 else -1,
        nu=params.nu if params.gamma > 0 else None,
        expected_behavior=expected,
    )
