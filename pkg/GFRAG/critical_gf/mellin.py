# GFRAG/critical_gf/mellin.py
"""
Soluciones en el dominio de Mellin, ∂W/∂t(t,s) = Φ(s)·W(t,s+γ):

  Ω(t,s)  = F((s−σ₁)/γ, (s−σ₂)/γ; s/γ; γt)                      γ > 0, γt < 1
  U(t,s)  = (γt)^{(σ₁−s)/γ} Γ(s/γ)Γ(1−(s−σ₂)/γ)/(Γ(σ₁/γ)Γ(1+(σ₂−σ₁)/γ))
            · F(1−σ₁/γ, (s−σ₁)/γ; 1+(σ₂−σ₁)/γ; 1/(γt))             γ > 0, γt > 1
  U₂(t,s) = Ω₁ − Ω₂,  Ω₂ = −(i/2π)·Ω,  Ω₁ = R·E                     γ < 0, −γt < 1
  R(t,s)  = −(−γt)^{1−s/γ} Γ(1−(s−σ₁)/γ)Γ(1−(s−σ₂)/γ)
            / (Γ(σ₁/γ)Γ(σ₂/γ)Γ(1−s/γ)) · F̃(1−σ₁/γ, 1−σ₂/γ; 2−s/γ; γt)
  E(s)    = 1/(e^{2iπs/γ} − 1)

F̃ es la hipergeométrica regularizada F/Γ(c).
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Literal, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, IdentityMismatch, NonConvergence, PoleProximity
from .model import ModelParams, phi
from .settings import EPS_POLE, ORACLE_CAP, ORACLE_TERMS
from .special import f21, gamma_ratio, hyp2f1_regularized

logger = logging.getLogger("gfrag.mellin")

SolutionKind = Literal["Omega", "U", "U2", "Omega1", "Omega2"]

TWO_FORMS_TOL = 1e-9
TWO_FORMS_MAX = 20.0        # |s/γ| hasta el que se compara con la segunda forma
LATTICE_RADIUS = 1e-2       # circunferencia de regularización en s = k|γ|
LATTICE_POINTS = 32
LATTICE_SNAP = 1e-3


# ----------------------------------------------------------------------
# ----------------- VALIDACIONES -----------------
# ----------------------------------------------------------------------

def _require_positive_gamma(params: ModelParams) -> None:
    if params.gamma <= 0:
        raise DomainError("gamma", params.gamma, "γ > 0")


def _require_negative_gamma(params: ModelParams, t: float) -> None:
    if params.gamma >= 0:
        raise DomainError("gamma", params.gamma, "γ < 0")
    if not (0 <= -params.gamma * t < 1):
        raise DomainError("−γt", -params.gamma * t, "[0, 1)")


def _check_lattice(s: complex, gamma: float) -> None:
    """PoleProximity si s está cerca de un punto −mγ (s/γ entero no positivo)."""
    q = s / gamma
    n = min(round(q.real), 0)
    if abs(q - n) * abs(gamma) < EPS_POLE:
        raise PoleProximity(s, n * gamma)


# ----------------------------------------------------------------------
# ----------------- Ω (γ > 0, γt < 1) -----------------
# ----------------------------------------------------------------------

def omega_forms(params: ModelParams, t: float, s: complex) -> Tuple[complex, complex]:
    """Las dos formas equivalentes de Ω: la directa y la de Euler (1−γt)^{(2−s)/γ}F(σ₁/γ, σ₂/γ; s/γ; γt)."""
    _require_positive_gamma(params)
    g = params.gamma
    z = g * t
    if not (0 <= z < 1):
        raise DomainError("γt", z, "[0, 1)")
    s = complex(s)
    _check_lattice(s, g)
    direct = f21((s - params.sigma1) / g, (s - params.sigma2) / g, s / g, z)
    return direct, _omega_euler(params, z, s)


def _omega_euler(params: ModelParams, z: float, s: complex) -> complex:
    g = params.gamma
    return cmath.exp(((2.0 - s) / g) * math.log1p(-z)) * f21(params.sigma1 / g, params.sigma2 / g, s / g, z)


def omega(params: ModelParams, t: float, s: complex, check: bool = True) -> complex:
    """
    Ω(t,s). Para |s/γ| ≤ 20 se evalúan ambas formas y se exige que coincidan
    (IdentityMismatch en caso contrario); más allá sólo la forma de Euler,
    cuya serie no sufre cancelación para |s| grande.
    """
    _require_positive_gamma(params)
    s = complex(s)
    if t == 0:
        _check_lattice(s, params.gamma)
        return 1.0 + 0j
    if abs(s / params.gamma) > TWO_FORMS_MAX:
        z = params.gamma * t
        if not (0 <= z < 1):
            raise DomainError("γt", z, "[0, 1)")
        _check_lattice(s, params.gamma)
        return _omega_euler(params, z, s)
    direct, euler = omega_forms(params, t, s)
    if check:
        scale = max(abs(direct), abs(euler), 1e-8)
        residual = abs(direct - euler) / scale
        if residual > TWO_FORMS_TOL:
            raise IdentityMismatch("omega-two-forms", residual, TWO_FORMS_TOL)
    return direct


def omega_limit(params: ModelParams, s: complex) -> complex:
    """Ω(1/γ, s) = Γ(s/γ)Γ((2−s)/γ)/(Γ(σ₁/γ)Γ(σ₂/γ)), Re s < 2."""
    _require_positive_gamma(params)
    s = complex(s)
    if s.real >= 2:
        raise DomainError("Re s", s.real, "Re s < 2")
    g = params.gamma
    _check_lattice(s, g)
    return gamma_ratio([s / g, (2.0 - s) / g], [params.sigma1 / g, params.sigma2 / g])


# ----------------------------------------------------------------------
# ----------------- U (γ > 0, γt > 1) -----------------
# ----------------------------------------------------------------------

def u_closed(params: ModelParams, t: float, s: complex) -> complex:
    """Forma cerrada de U(t,s), continuación de Ω más allá de t = 1/γ."""
    _require_positive_gamma(params)
    g = params.gamma
    if g * t <= 1:
        raise DomainError("γt", g * t, "γt > 1")
    s = complex(s)
    s1, s2 = params.sigma1, params.sigma2
    _check_lattice(s, g)
    n = round(((s - s2) / g - 1.0).real)
    if n >= 0 and abs(s - (s2 + (n + 1) * g)) < EPS_POLE:
        raise PoleProximity(s, s2 + (n + 1) * g)
    log_gt = math.log(g * t)
    power = cmath.exp(((s1 - s) / g) * log_gt)
    ratio = gamma_ratio([s / g, 1.0 - (s - s2) / g], [s1 / g])
    return power * ratio * hyp2f1_regularized(1.0 - s1 / g, (s - s1) / g, 1.0 + (s2 - s1) / g, 1.0 / (g * t))


def u_sym(params: ModelParams, t: float, s: complex) -> complex:
    """Parte simétrica (U(s) + conj U(s̄))/2; su inversa de Mellin es Re ℳ⁻¹U."""
    s = complex(s)
    value = u_closed(params, t, s)
    if params.theta <= 1.0:
        return value
    return 0.5 * (value + u_closed(params, t, s.conjugate()).conjugate())


def u_residue_at_lattice(params: ModelParams, t: float, m: int) -> complex:
    """Res(U; s = −mγ)."""
    g = params.gamma
    s1, s2 = params.sigma1, params.sigma2
    gt = g * t
    head = cmath.exp((s1 / g + m) * math.log(gt)) * g * (-1) ** m / math.factorial(m)
    ratio = gamma_ratio([1.0 + m + s2 / g], [s1 / g])
    return head * ratio * hyp2f1_regularized(1.0 - s1 / g, -m - s1 / g, 1.0 + (s2 - s1) / g, 1.0 / gt)


def u_residue_at_sigma2(params: ModelParams, t: float, m: int) -> complex:
    """Res(U; s = σ₂ + (m+1)γ)."""
    g = params.gamma
    s1, s2 = params.sigma1, params.sigma2
    gt = g * t
    head = -g * (-1) ** m / math.factorial(m) * cmath.exp(((s1 - s2) / g - (m + 1)) * math.log(gt))
    ratio = gamma_ratio([s2 / g + m + 1.0], [s1 / g])
    c = 1.0 + (s2 - s1) / g
    return head * ratio * hyp2f1_regularized(1.0 - s1 / g, c + m, c, 1.0 / gt)


def a_coefficient(params: ModelParams, t: float) -> complex:
    """A(t) = γΓ(1+σ₂/γ)/(Γ(σ₁/γ)Γ(1+(σ₂−σ₁)/γ)) · (γt)^{(σ₁−σ₂)/γ−1}."""
    g = params.gamma
    s1, s2 = params.sigma1, params.sigma2
    ratio = gamma_ratio([1.0 + s2 / g], [s1 / g, 1.0 + (s2 - s1) / g])
    return g * ratio * cmath.exp(((s1 - s2) / g - 1.0) * math.log(g * t))


def h_coefficient(params: ModelParams, t: float) -> complex:
    """H(t) = (1 − 1/(γt))^{σ₁/γ−1}, de modo que A·H es el coeficiente de x^{−σ₂−γ}."""
    g = params.gamma
    return cmath.exp((params.sigma1 / g - 1.0) * math.log1p(-1.0 / (g * t)))


# ----------------------------------------------------------------------
# ----------------- U₂ (γ < 0) -----------------
# ----------------------------------------------------------------------

def _e_factor(s: complex, gamma: float) -> complex:
    """1/(e^{2iπs/γ} − 1) sin desbordamiento."""
    arg = 2j * math.pi * s / gamma
    if arg.real > 0:
        inv = cmath.exp(-arg)
        return inv / (1.0 - inv)
    return 1.0 / (cmath.exp(arg) - 1.0)


def cot_pi(z: complex) -> complex:
    """cot(πz) estable para |Im z| grande."""
    if z.imag >= 0:
        e = cmath.exp(2j * math.pi * z)
        return 1j * (e + 1.0) / (e - 1.0)
    e = cmath.exp(-2j * math.pi * z)
    return 1j * (1.0 + e) / (1.0 - e)


def r_part(params: ModelParams, t: float, s: complex) -> complex:
    """R(t,s) = Ω₁·(e^{2iπs/γ} − 1), analítica salvo en σ_ℓ + (m+1)γ."""
    _require_negative_gamma(params, t)
    s = complex(s)
    g = params.gamma
    s1, s2 = params.sigma1, params.sigma2
    if t == 0:
        return 0j
    for sl in (s1, s2):
        n = round(((s - sl) / g - 1.0).real)
        if n >= 0 and abs(s - (sl + (n + 1) * g)) < EPS_POLE:
            raise PoleProximity(s, sl + (n + 1) * g)
    power = -cmath.exp((1.0 - s / g) * math.log(-g * t))
    gammas = gamma_ratio([1.0 - (s - s1) / g, 1.0 - (s - s2) / g], [s1 / g, s2 / g, 1.0 - s / g])
    return power * gammas * hyp2f1_regularized(1.0 - s1 / g, 1.0 - s2 / g, 2.0 - s / g, g * t)


def omega1(params: ModelParams, t: float, s: complex) -> complex:
    s = complex(s)
    _check_lattice_negative(s, params.gamma)
    return r_part(params, t, s) * _e_factor(s, params.gamma)


def omega2(params: ModelParams, t: float, s: complex) -> complex:
    """Ω₂ = −(i/2π)·F((s−σ₁)/γ, (s−σ₂)/γ; s/γ; γt)."""
    _require_negative_gamma(params, t)
    s = complex(s)
    _check_lattice_negative(s, params.gamma)
    g = params.gamma
    value = f21((s - params.sigma1) / g, (s - params.sigma2) / g, s / g, g * t) if t > 0 else 1.0
    return -0.5j / math.pi * value


def _check_lattice_negative(s: complex, gamma: float) -> None:
    # polos de Ω y de E en s = k|γ|, k ≥ 0
    k = round((s / gamma).real)
    if k <= 0 and abs(s - k * gamma) < EPS_POLE:
        raise PoleProximity(s, k * gamma)


def _near_lattice(s: complex, gamma: float) -> bool:
    k = round((s / gamma).real)
    return k <= 0 and abs(s - k * gamma) < LATTICE_SNAP


def _circle_mean(f: Callable[[complex], complex], center: complex) -> complex:
    total = 0j
    for k in range(LATTICE_POINTS):
        total += f(center + LATTICE_RADIUS * cmath.exp(2j * math.pi * (k + 0.5) / LATTICE_POINTS))
    return total / LATTICE_POINTS


def _u2_raw(params: ModelParams, t: float, s: complex) -> complex:
    return omega1(params, t, s) - omega2(params, t, s)


def u2(params: ModelParams, t: float, s: complex) -> complex:
    """U₂ = Ω₁ − Ω₂. En s = k|γ| los polos de Ω₁ y Ω₂ se cancelan; allí se usa la media sobre una circunferencia."""
    _require_negative_gamma(params, t)
    s = complex(s)
    if t == 0:
        return 0.5j / math.pi
    if _near_lattice(s, params.gamma):
        return _circle_mean(lambda p: _u2_raw(params, t, p), s)
    return _u2_raw(params, t, s)


def u2_normalized(params: ModelParams, t: float, s: complex) -> complex:
    """W₂ = −2πi·U₂ = Ω − 2πi·Ω₁, con W₂(0,s) = 1."""
    return -2j * math.pi * u2(params, t, s)


def _u2_real_raw(params: ModelParams, t: float, s: complex) -> complex:
    g = params.gamma
    _check_lattice_negative(s, g)
    value = f21((s - params.sigma1) / g, (s - params.sigma2) / g, s / g, g * t)
    return value - math.pi * cot_pi(s / g) * r_part(params, t, s)


def u2_real(params: ModelParams, t: float, s: complex) -> complex:
    """
    Parte real-simétrica de W₂: Ω − π·cot(πs/γ)·R. Sobre el eje real coincide
    con Re(−2πiU₂) y es la transformada de Mellin de la densidad v.
    """
    _require_negative_gamma(params, t)
    s = complex(s)
    if t == 0:
        return 1.0 + 0j
    if _near_lattice(s, params.gamma):
        return _circle_mean(lambda p: _u2_real_raw(params, t, p), s)
    return _u2_real_raw(params, t, s)


def r_residue(params: ModelParams, t: float, ell: int, m: int) -> complex:
    """Res(R; s = σ_ℓ + (m+1)γ); incluye el jacobiano γ."""
    g = params.gamma
    sl = params.sigma(ell)
    other = params.sigma(3 - ell)
    p = sl + (m + 1) * g
    head = cmath.exp((1.0 - p / g) * math.log(-g * t)) * g * (-1) ** m / math.factorial(m)
    gammas = gamma_ratio([1.0 - (p - other) / g], [params.sigma1 / g, params.sigma2 / g, 1.0 - p / g])
    return head * gammas * hyp2f1_regularized(1.0 - params.sigma1 / g, 1.0 - params.sigma2 / g, 2.0 - p / g, g * t)


def u2_residue(params: ModelParams, t: float, ell: int, m: int) -> complex:
    """Res(U₂; s = σ_ℓ + (m+1)γ) = E(s)·Res R."""
    p = params.sigma(ell) + (m + 1) * params.gamma
    return _e_factor(p, params.gamma) * r_residue(params, t, ell, m)


def u2_real_residue(params: ModelParams, t: float, ell: int, m: int) -> complex:
    """Res(W_real; s = σ_ℓ + (m+1)γ) = −π·cot(πσ_ℓ/γ)·Res R."""
    g = params.gamma
    sl = params.sigma(ell)
    return -math.pi * cot_pi(sl / g) * r_residue(params, t, ell, m)


# ----------------------------------------------------------------------
# ----------------- ORÁCULO DE SERIE DE POTENCIAS -----------------
# ----------------------------------------------------------------------

class OracleValue(NamedTuple):
    value: complex
    tail: float
    terms: int


def series_oracle(params: ModelParams, t: float, s: complex, n_terms: Optional[int] = None,
                  tol: float = 1e-15, strict: bool = False) -> OracleValue:
    """
    Σ_{n=0}^{N} tⁿ/n! ∏_{j<n} Φ(s+jγ), la única solución en serie formal con W(0,s) = 1.
    Sin n_terms se suman al menos ORACLE_TERMS términos y se sigue hasta que la
    cola estimada baje de tol (tope ORACLE_CAP). Con n_terms se suma exactamente
    hasta N y la cola sólo se informa, salvo strict=True.
    """
    g = params.gamma
    if abs(g * t) >= 1:
        raise DomainError("|γt|", abs(g * t), "|γt| < 1")
    s = complex(s)
    cap = ORACLE_CAP if n_terms is None else n_terms
    if cap > ORACLE_CAP:
        raise DomainError("n_terms", n_terms, f"≤ {ORACLE_CAP}")
    terms = [1.0 + 0j]
    term = 1.0 + 0j
    tail = math.inf
    for n in range(1, cap + 1):
        term = term * t * phi(params, s + (n - 1) * g) / n
        terms.append(term)
        previous = abs(terms[-2])
        if term == 0:
            tail = 0.0
        elif previous > 0:
            ratio = abs(term) / previous
            tail = abs(term) * ratio / (1.0 - ratio) if ratio < 1 else math.inf
        if n_terms is None and n >= ORACLE_TERMS:
            total = abs(math.fsum(x.real for x in terms)) + abs(math.fsum(x.imag for x in terms))
            if tail <= tol * max(1.0, total):
                break
    value = complex(math.fsum(x.real for x in terms), math.fsum(x.imag for x in terms))
    if (n_terms is None or strict) and tail > tol * max(1.0, abs(value)):
        raise NonConvergence(len(terms) - 1, tail)
    return OracleValue(value, tail, len(terms) - 1)


# ----------------------------------------------------------------------
# ----------------- SOLUCIONES Y POLOS -----------------
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Validity:
    t_interval: Tuple[float, float]
    strip: Tuple[float, float]


@dataclass(frozen=True)
class Pole:
    location: complex
    residue: Optional[complex] = None


@dataclass(frozen=True)
class MellinSolution:
    """Una solución del dominio de Mellin con su dominio de validez."""
    kind: SolutionKind
    params: ModelParams

    def __post_init__(self):
        if self.kind in ("Omega", "U") and self.params.gamma <= 0:
            raise DomainError("gamma", self.params.gamma, f"γ > 0 para {self.kind}")
        if self.kind in ("U2", "Omega1", "Omega2") and self.params.gamma >= 0:
            raise DomainError("gamma", self.params.gamma, f"γ < 0 para {self.kind}")

    @property
    def validity(self) -> Validity:
        g = self.params.gamma
        s2 = self.params.sigma2.real
        if self.kind == "Omega":
            return Validity((0.0, 1.0 / g), (0.0, math.inf))
        if self.kind == "U":
            return Validity((1.0 / g, math.inf), (0.0, s2 + g))
        return Validity((0.0, -1.0 / g), (s2 + g, math.inf))

    def __call__(self, t: float, s: complex) -> complex:
        lo, hi = self.validity.t_interval
        if not (lo <= t <= hi) or (self.kind == "U" and t == lo):
            raise DomainError("t", t, f"[{lo:g}, {hi:g}]")
        evaluator = {
            "Omega": omega,
            "U": u_closed,
            "U2": u2,
            "Omega1": omega1,
            "Omega2": omega2,
        }[self.kind]
        return evaluator(self.params, t, s)

    def pole_set(self, window: Tuple[float, float], t: Optional[float] = None, m_max: int = 200) -> List[Pole]:
        """
        Polos con lo < Re p < hi, ordenados por parte real (y luego imaginaria).
        Con t se adjuntan los residuos cerrados.
        """
        lo, hi = window
        g = self.params.gamma
        found = {}

        def add(p: complex, residue: Callable[[], complex]):
            if lo < p.real < hi:
                key = (round(p.real, 12), round(p.imag, 12))
                if key not in found:
                    found[key] = Pole(p, residue() if t is not None else None)

        for m in range(m_max):
            lattice = complex(-m * g, 0.0)
            sigma_poles = [(ell, self.params.sigma(ell) + (m + 1) * g) for ell in (1, 2)]
            if self.kind == "Omega":
                add(lattice, lambda m=m: _omega_lattice_residue(self.params, t, m))
            elif self.kind == "U":
                add(lattice, lambda m=m: u_residue_at_lattice(self.params, t, m))
                add(self.params.sigma2 + (m + 1) * g, lambda m=m: u_residue_at_sigma2(self.params, t, m))
            elif self.kind == "U2":
                for ell, p in sigma_poles:
                    add(p, lambda ell=ell, m=m: u2_residue(self.params, t, ell, m))
            elif self.kind == "Omega1":
                for ell, p in sigma_poles:
                    add(p, lambda ell=ell, m=m: u2_residue(self.params, t, ell, m))
                add(lattice, lambda m=m: _omega1_lattice_residue(self.params, t, m))
            else:
                add(lattice, lambda m=m: -0.5j / math.pi * _omega_lattice_residue(self.params, t, m))
        return sorted(found.values(), key=lambda p: (p.location.real, p.location.imag))


def _omega_lattice_residue(params: ModelParams, t: float, m: int) -> complex:
    """Res(Ω; s = −mγ) = γ(−1)^m/m!·F̃(a, b; −m; γt) con a, b evaluados en s = −mγ."""
    g = params.gamma
    s = -m * g
    value = hyp2f1_regularized((s - params.sigma1) / g, (s - params.sigma2) / g, -m, g * t)
    return g * (-1) ** m / math.factorial(m) * value


def _omega1_lattice_residue(params: ModelParams, t: float, m: int) -> complex:
    # Res E en s/γ = −m es γ/(2πi)
    return r_part(params, t, -m * params.gamma) * params.gamma / (2j * math.pi)


# ----------------------------------------------------------------------
# ----------------- EXTRAPOLACIÓN t → 1/γ -----------------
# ----------------------------------------------------------------------

def richardson_ladder(gamma: float, ladder: Sequence[int]) -> List[float]:
    """t_k = (1 − 2^{−k})/γ."""
    return [(1.0 - 2.0 ** (-k)) / gamma for k in ladder]


def extrapolate(values: Sequence[complex], basis: Sequence[Sequence[float]]) -> complex:
    """
    Ajuste por mínimos cuadrados de f_k = L + Σ_j c_j·basis[j][k]; retorna L.
    Con tantas funciones como puntos menos uno es la extrapolación exacta.
    """
    values = np.asarray(values, dtype=complex)
    columns = [np.ones(len(values))] + [np.asarray(b, dtype=float) for b in basis]
    matrix = np.column_stack(columns)
    solution, *_ = np.linalg.lstsq(matrix, values, rcond=None)
    return complex(solution[0])
