# GFRAG/critical_gf/contour.py
"""
Caminos en el plano complejo y las representaciones integrales de las
soluciones en el dominio de Mellin.

Convenciones de rama (fijas en todo el módulo):
  (−t)^w = t^w·e^{−iπw},  (−γ)^{s/γ} = γ^{s/γ}·e^{iπs/γ} (γ > 0),
  γ^{s/γ} = |γ|^{s/γ}·e^{iπs/γ} (γ < 0).
Con w = (σ−s)/γ el factor 1/(Γ(1+w)(e^{−2iπw}−1)) se evalúa mediante
Γ(1+w)·sin(πw) = −π/Γ(−w), siempre en aritmética logarítmica.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Literal, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, SlowDecay, TiltViolation
from .model import ModelParams, phi
from .quadrature import adaptive_gk, gauss_legendre_panels, integrate_ray
from .settings import EPS_POLE, V_MAX
from .special import clog_gamma, log_gamma_ratio

logger = logging.getLogger("gfrag.contorno")

MellinFunction = Callable[[complex], complex]
PathKind = Literal["VerticalLine", "BentC", "BentCRight", "TiltedC"]

_SQRT_HALF = math.sqrt(0.5)
_LOG_MINUS_I_OVER_2PI = cmath.log(-1j / (2.0 * math.pi))


# ----------------------------------------------------------------------
# ----------------- CAMINOS -----------------
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    """Tramo start + direction·τ, τ ∈ [0, length]; sign = −1 invierte el recorrido."""
    start: complex
    direction: complex
    length: float
    sign: int = 1

    def point(self, tau: float) -> complex:
        return self.start + self.direction * tau


@dataclass(frozen=True)
class ContourPath:
    """Camino por tramos, orientado hacia Im σ creciente."""
    kind: PathKind
    sigma0: float
    segments: Tuple[Segment, ...]
    theta_tilt: Optional[float] = None

    @classmethod
    def vertical_line(cls, s0: float) -> "ContourPath":
        return cls("VerticalLine", s0, (
            Segment(complex(s0, 0.0), 1j, math.inf, 1),
            Segment(complex(s0, 0.0), -1j, math.inf, -1),
        ))

    @classmethod
    def bent_c(cls, sigma0: float, opening: Literal["left", "right"] = "left") -> "ContourPath":
        """Tramo vertical |Im| ≤ 1 en Re = σ₀ y dos rayos a 45° hacia la izquierda o la derecha."""
        horizontal = -1.0 if opening == "left" else 1.0
        top = complex(sigma0, 1.0)
        bottom = complex(sigma0, -1.0)
        kind = "BentC" if opening == "left" else "BentCRight"
        return cls(kind, sigma0, (
            Segment(bottom, 1j, 2.0, 1),
            Segment(top, complex(horizontal, 1.0) * _SQRT_HALF, math.inf, 1),
            Segment(bottom, complex(horizontal, -1.0) * _SQRT_HALF, math.inf, -1),
        ))

    @classmethod
    def tilted_c(cls, sigma0: float, theta_tilt: float) -> "ContourPath":
        """Rayo ξ = σ₀ + θ_tilt·ζ para ζ ≥ 0 y recta vertical ξ = σ₀ para ζ < 0."""
        direction = complex(theta_tilt, 1.0)
        direction /= abs(direction)
        start = complex(sigma0, 0.0)
        return cls("TiltedC", sigma0, (
            Segment(start, direction, math.inf, 1),
            Segment(start, -1j, math.inf, -1),
        ), theta_tilt=theta_tilt)

    def abscissa(self, y: float) -> float:
        """Parte real del camino a la altura Im σ = y."""
        if self.kind == "VerticalLine":
            return self.sigma0
        if self.kind == "BentC":
            return self.sigma0 - max(0.0, abs(y) - 1.0)
        if self.kind == "BentCRight":
            return self.sigma0 + max(0.0, abs(y) - 1.0)
        return self.sigma0 + self.theta_tilt * y if y >= 0 else self.sigma0

    def is_left(self, p: complex) -> bool:
        return p.real < self.abscissa(p.imag)

    def distance_hint(self, p: complex) -> float:
        return abs(p.real - self.abscissa(p.imag))

    def integrate(self, f: MellinFunction, tol: float = 1e-12,
                  period: Optional[float] = None, v_max: float = V_MAX) -> Tuple[complex, float]:
        """∫ f(σ)dσ a lo largo del camino. Retorna (valor, error estimado)."""
        total = 0j
        err = 0.0
        for seg in self.segments:
            g = lambda tau, seg=seg: f(seg.point(tau)) * seg.direction
            if math.isinf(seg.length):
                value, e = integrate_ray(g, tol / 4.0, v_max=v_max, period=period)
            else:
                value, e = adaptive_gk(g, 0.0, seg.length, tol / 4.0)
            total += seg.sign * value
            err += e
        return total, err


def _clear_path(build: Callable[[float], ContourPath], sigma0: float, poles: Sequence[complex],
                step: float) -> ContourPath:
    """Desplaza σ₀ a la derecha hasta que ningún polo quede a menos de 0.4·step del camino."""
    for _ in range(16):
        path = build(sigma0)
        if all(path.distance_hint(p) >= 0.4 * step for p in poles):
            return path
        sigma0 += 0.5 * step
    return build(sigma0)


# ----------------------------------------------------------------------
# ----------------- FUNCIONES AUXILIARES V, Ṽ, V₂ -----------------
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class AuxV:
    """
    Funciones auxiliares de las representaciones integrales; cada una cumple
    V(s+γ) = −Φ(s)·V(s).
      V  : γ^{s/γ} Γ((s−σ₁)/γ) / (Γ(s/γ) Γ(1−(s−σ₂)/γ))                 (γ > 0)
      Ṽ  : (−γ)^{s/γ} Γ((s−σ₁)/γ) Γ((s−σ₂)/γ) / Γ(s/γ)                   (γ > 0)
      V₂ : γ^{s/γ} Γ(1−s/γ) / (Γ(1−(s−σ₁)/γ) Γ(1−(s−σ₂)/γ))             (γ < 0)
    """
    kind: Literal["V", "Vtilde", "V2"]
    params: ModelParams

    def __post_init__(self):
        gamma = self.params.gamma
        if self.kind == "V2" and gamma >= 0:
            raise DomainError("gamma", gamma, "γ < 0 para V₂")
        if self.kind != "V2" and gamma <= 0:
            raise DomainError("gamma", gamma, f"γ > 0 para {self.kind}")

    def log_gamma_part(self, s: complex) -> complex:
        """log del cociente de Γ (sin el factor potencia)."""
        g = self.params.gamma
        s1, s2 = self.params.sigma1, self.params.sigma2
        if self.kind == "V":
            return log_gamma_ratio([(s - s1) / g], [s / g, 1.0 - (s - s2) / g])
        if self.kind == "Vtilde":
            return log_gamma_ratio([(s - s1) / g, (s - s2) / g], [s / g])
        return log_gamma_ratio([1.0 - s / g], [1.0 - (s - s1) / g, 1.0 - (s - s2) / g])

    def log_power(self, s: complex) -> complex:
        g = self.params.gamma
        if self.kind == "V":
            return (s / g) * math.log(g)
        return (s / g) * complex(math.log(abs(g)), math.pi)

    def value(self, s: complex) -> complex:
        s = complex(s)
        return cmath.exp(self.log_power(s) + self.log_gamma_part(s))


# ----------------------------------------------------------------------
# ----------------- INVERSIÓN DE MELLIN -----------------
# ----------------------------------------------------------------------

def inverse_mellin(W: MellinFunction, s0: float, x: float, tol: float = 1e-10,
                   v_max: float = V_MAX) -> complex:
    """
    (1/2πi)∫_{Re s = s0} x^{−s} W(s) ds. La parte imaginaria del resultado se
    retorna tal cual (debe ser ≤ tol para densidades reales).
    """
    if x <= 0:
        raise DomainError("x", x, "x > 0")
    log_x = math.log(x)
    path = ContourPath.vertical_line(s0)
    period = 2.0 * math.pi / abs(log_x) if abs(log_x) > 1e-3 else None
    value, _ = path.integrate(lambda s: cmath.exp(-s * log_x) * W(s), tol=2.0 * math.pi * tol,
                              period=period, v_max=v_max)
    return value / (2j * math.pi)


def decay_horizon(W: MellinFunction, s0: float, rel_tol: float = 1e-13, v_max: float = V_MAX,
                  symmetric: bool = True) -> float:
    """
    Menor V = 2^k tal que |W(s0 ± iv)| ≤ rel_tol·|W(s0)| en dos potencias de 2
    consecutivas. Lanza SlowDecay si no ocurre antes de v_max.
    """
    reference = max(abs(W(complex(s0, 0.0))), 1e-300)
    quiet = 0
    v = 1.0
    while v <= v_max:
        sample = abs(W(complex(s0, v)))
        if not symmetric:
            sample = max(sample, abs(W(complex(s0, -v))))
        if sample <= rel_tol * reference:
            quiet += 1
            if quiet >= 2:
                return v
        else:
            quiet = 0
        v *= 2.0
    raise SlowDecay(sample / reference, v_max)


class MellinGrid:
    """
    Recta Re s = s0 discretizada con paneles fijos de Gauss–Legendre para
    invertir una misma transformada en muchos x a la vez.
    Con symmetric=True se usa W(s̄) = conj W(s) y sólo se muestrea v ≥ 0.
    """

    def __init__(self, s0: float, v_max: float, log_x_span: float = 10.0, order: int = 16,
                 symmetric: bool = True):
        self.s0 = s0
        self.symmetric = symmetric
        width = min(1.0, 2.0 / (1.0 + log_x_span))
        panels = max(1, int(math.ceil(v_max / width)))
        lower = 0.0 if symmetric else -v_max
        edges = np.linspace(lower, v_max, panels * (1 if symmetric else 2) + 1)
        v, w = gauss_legendre_panels(edges, order)
        self.v = v
        self.weights = w
        self.nodes = s0 + 1j * v

    def sample(self, W: MellinFunction) -> np.ndarray:
        return np.array([complex(W(complex(s))) for s in self.nodes])

    def invert(self, x: Sequence[float], values: np.ndarray) -> np.ndarray:
        """ℳ⁻¹ en cada x (arreglo). Real si symmetric, complejo en otro caso."""
        log_x = np.log(np.asarray(x, dtype=float))
        kernel = np.exp(-np.outer(log_x, self.nodes))
        raw = kernel @ (self.weights * values)
        if self.symmetric:
            return raw.real / math.pi
        return raw / (2.0 * math.pi)


def numerical_residue(f: MellinFunction, pole: complex, radius: float = 1e-3, points: int = 64) -> complex:
    """Residuo por la regla del trapecio sobre la circunferencia |s − pole| = radius."""
    total = 0j
    for k in range(points):
        e = cmath.exp(2j * math.pi * k / points)
        total += f(pole + radius * e) * e
    return total * radius / points


# ----------------------------------------------------------------------
# ----------------- REPRESENTACIONES INTEGRALES -----------------
# ----------------------------------------------------------------------

def _series_terms(params: ModelParams, t: float, s: complex, keep: Callable[[complex], bool],
                  k_max: int = 400) -> complex:
    """
    Σ tᵏ/k! ∏_{j<k} Φ(s+jγ) sobre los primeros k con keep(s+kγ). Los puntos
    s+kγ se mueven en una sola dirección, así que keep deja de cumplirse
    para siempre en cuanto falla una vez.
    """
    total = 0j
    term = 1.0 + 0j
    for k in range(k_max):
        p = s + k * params.gamma
        if not keep(p):
            break
        total += term
        term *= t * phi(params, p) / (k + 1)
    return total


def _integrand(aux: AuxV, s: complex, log_base: float, phase: bool) -> MellinFunction:
    """σ ↦ base^w·e^{iπw·phase}·(Γ-parte(σ)/Γ-parte(s))·(−i/2π)·Γ(−w)/γ."""
    g = aux.params.gamma
    log_ref = aux.log_gamma_part(s)
    log_scale = _LOG_MINUS_I_OVER_2PI - cmath.log(g)

    def h(sigma: complex) -> complex:
        w = (sigma - s) / g
        log_value = w * log_base + aux.log_gamma_part(sigma) - log_ref + clog_gamma(-w) + log_scale
        if phase:
            log_value += 1j * math.pi * w
        if log_value.real < -745.0:
            return 0j
        return cmath.exp(log_value)

    return h


def u_integrand(params: ModelParams, t: float, s: complex) -> MellinFunction:
    """Integrando de la representación de U sobre el camino 𝒞 (γt > 1)."""
    return _integrand(AuxV("V", params), complex(s), math.log(params.gamma * t), phase=False)


def contour_u(params: ModelParams, t: float, s: complex, path: Optional[ContourPath] = None,
              tol: float = 1e-12) -> complex:
    """
    U(t,s) = ∫_𝒞 h + Σ_{s+kγ a la izquierda de 𝒞} tᵏ/k!∏Φ(s+jγ), con 𝒞 abierto a
    la izquierda y σ₀ > Re σ₁.
    """
    s = complex(s)
    g = params.gamma
    if g <= 0 or g * t <= 1:
        raise DomainError("γt", g * t, "γ > 0 y γt > 1")
    s1 = params.sigma1
    poles = [s + k * g for k in range(64)] + [s1 - m * g for m in range(8)]
    if path is None:
        # los polos σ₁ − mγ de V deben quedar a la izquierda también sobre los rayos
        start = s1.real + max(0.0, abs(s1.imag) - 1.0) + 0.5 * min(1.0, g)
        path = _clear_path(lambda x: ContourPath.bent_c(x, "left"), start, poles, min(1.0, g))
    elif path.kind != "BentC" or path.sigma0 <= s1.real or not path.is_left(s1):
        raise DomainError("path", path.kind, "BentC con σ₀ > Re σ₁ y σ₁ a la izquierda")
    h = u_integrand(params, t, s)
    scale = max(1.0, abs(h(complex(path.sigma0, 0.0))))
    integral, _ = path.integrate(h, tol=tol * scale)
    correction = _series_terms(params, t, s, path.is_left)
    logger.debug("contour_u: σ₀=%.3f, integral=%s, corrección=%s", path.sigma0, integral, correction)
    return integral + correction


def contour_omega(params: ModelParams, t: float, s: complex, s0: Optional[float] = None,
                  tol: float = 1e-12) -> complex:
    """
    Ω(t,s) = ∫ h + Σ_{s+kγ a la izquierda} tᵏ/k!∏Φ(s+jγ) sobre el camino abierto a la
    derecha con σ₀ > max(0, Re σ₂).
    """
    s = complex(s)
    g = params.gamma
    if g <= 0 or not (0 <= g * t < 1):
        raise DomainError("γt", g * t, "γ > 0 y 0 ≤ γt < 1")
    if t == 0:
        return 1.0 + 0j
    floor = max(0.0, params.sigma2.real)
    if s0 is not None and s0 <= floor:
        raise DomainError("s0", s0, f"σ₀ > {floor:g}")
    poles = [s + k * g for k in range(64)]
    start = s0 if s0 is not None else floor + 0.5 * min(1.0, g)
    path = _clear_path(lambda x: ContourPath.bent_c(x, "right"), start, poles, min(1.0, g))
    h = _integrand(AuxV("Vtilde", params), s, math.log(g * t), phase=True)
    scale = max(1.0, abs(h(complex(path.sigma0, 0.0))))
    integral, _ = path.integrate(h, tol=tol * scale)
    return integral + _series_terms(params, t, s, path.is_left)


def tilt_bound(params: ModelParams, t: float, tau: Optional[float] = None) -> Tuple[float, float]:
    """Retorna (τ, π/log τ) para el camino inclinado C̃."""
    x = -params.gamma * t
    if tau is None:
        tau = min(1.05 * x, 0.5 * (1.0 + x))
    if not (x < tau < 1.0):
        raise DomainError("tau", tau, f"(−γt, 1) = ({x:g}, 1)")
    return tau, math.pi / math.log(tau)


def contour_u2(params: ModelParams, t: float, s: complex, theta_tilt: Optional[float] = None,
               sigma0: Optional[float] = None, tau: Optional[float] = None, tol: float = 1e-12) -> complex:
    """
    U₂(t,s) = (I − Σ_{s+kγ a la derecha de C̃} tᵏ/k!∏Φ(s+jγ)) / (2πi), donde I es la
    integral sobre C̃ recorrido hacia arriba.
    """
    s = complex(s)
    g = params.gamma
    if g >= 0 or not (0 < -g * t < 1):
        raise DomainError("−γt", -g * t, "γ < 0 y 0 < −γt < 1")
    _, bound = tilt_bound(params, t, tau)
    if theta_tilt is None:
        theta_tilt = 1.5 * bound
    if theta_tilt >= bound:
        raise TiltViolation(theta_tilt, bound)
    poles = [s + k * g for k in range(64)] + [(m + 1) * g for m in range(8)]
    start = sigma0 if sigma0 is not None else max(s.real, 0.0) + 0.5
    path = _clear_path(lambda x: ContourPath.tilted_c(x, theta_tilt), start, poles, min(1.0, abs(g)))
    h = _integrand(AuxV("V2", params), s, math.log(-g * t), phase=True)
    scale = max(1.0, abs(h(complex(path.sigma0, 0.0))))
    integral, _ = path.integrate(h, tol=tol * scale)
    right = _series_terms(params, t, s, lambda p: not path.is_left(p), k_max=64)
    return (integral - right) / (2j * math.pi)
