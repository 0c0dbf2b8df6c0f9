# GFRAG/critical_gf/physical.py
"""
Soluciones en el espacio físico.

  u(t,x) = (1−γt)^{1/γ}·δ(x − x_a) + u^R(t,x)·H(x_a − x)          γ > 0, 0 ≤ γt < 1
  u^R    = θ(1−γt)^{2/γ}·t·F(1+σ₁/γ, 1+σ₂/γ; 2; γt(1+(γt−1)x^γ))
  ω(t,x) = Re ℳ⁻¹[U(t,·)](x)                                       γ > 0, γt > 1
  v(t,x) = ℳ⁻¹[W_real(t,·)](x)                                     γ < 0, 0 < −γt < 1

con x_a = (1−γt)^{−1/γ}. Los átomos se guardan como (posición, peso) y se
suman analíticamente en toda integral; nunca se suavizan sobre una malla.
"""

import cmath
import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache, partial
from typing import Callable, Dict, List, Literal, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import schemas
from .contour import MellinGrid, decay_horizon, inverse_mellin
from .errors import DomainError, InconclusiveGrid, NonConvergence, SeriesSwitchPoint
from .mellin import (
    a_coefficient,
    cot_pi,
    extrapolate,
    h_coefficient,
    omega,
    omega_limit,
    richardson_ladder,
    u2_real,
    u_sym,
)
from .model import ModelParams
from .quadrature import gauss_legendre_panels, tanh_sinh
from .settings import (
    BISECTION_REL_WIDTH,
    NUDGE,
    RICHARDSON_LADDER,
    SCAN_DECADES,
    SCAN_POINTS_PER_DECADE,
    SERIES_CAP,
)
from .special import crgamma, f21, gamma_ratio, hyp2f1_regularized

logger = logging.getLogger("gfrag.fisico")

LawKind = Literal["LimitProfile", "MomentBlowup", "LogMoment", "SubcriticalMoment", "LargeX", "SmallXOscillation"]

SERIES_SWITCH = 0.75      # razón por encima de la cual ω pasa a la inversión numérica
SERIES_LIMIT = 0.99       # razón máxima que acepta la serie pura de ω
V_SERIES_LIMIT = 0.995    # ídem para la serie de residuos de v
SERIES_TOL = 1e-15
EDGE_REL = 1e-12          # tolerancia relativa para "x está en el átomo / en el borde"
DEGENERATE_TOL = 1e-5
IMAG_RESIDUE_TOL = 1e-8


# ----------------------------------------------------------------------
# ----------------- TIPOS -----------------
# ----------------------------------------------------------------------

class Atom(NamedTuple):
    location: float
    weight: float


class LocalValue(NamedTuple):
    """Valor puntual: el átomo (sólo si x es su posición) y la densidad."""
    atom: Optional[Atom]
    density: float


@dataclass(frozen=True)
class MeasureSolution:
    """
    Medida en (0, ∞) formada por átomos exactos y una densidad.

    `breakpoints` marca dónde la densidad pierde regularidad (allí se parte
    la cuadratura). Si `series_mellin` existe, (s, lo, hi) ↦ ∫_lo^hi x^{s−1}·densidad
    es analítica en (0, lower_cut] y la cuadratura sólo cubre el resto.
    `transform`, si existe, es la transformada completa de la densidad (sin átomos).
    """
    params: ModelParams
    time: float
    atoms: Tuple[Atom, ...]
    density: Callable[[float], float]
    support_upper: float = math.inf
    breakpoints: Tuple[float, ...] = ()
    lower_cut: float = 0.0
    series_mellin: Optional[Callable[[complex, float, float], complex]] = None
    transform: Optional[Callable[[complex], complex]] = None

    def __post_init__(self):
        for atom in self.atoms:
            if atom.location <= 0 or atom.weight < 0:
                raise DomainError("atom", atom, "posición > 0 y peso ≥ 0")

    def at(self, x: float) -> LocalValue:
        atom = next((a for a in self.atoms if abs(x - a.location) <= EDGE_REL * a.location), None)
        value = self.density(x) if x <= self.support_upper * (1.0 + EDGE_REL) else 0.0
        return LocalValue(atom, value)


@dataclass(frozen=True)
class AsymptoticLaw:
    kind: LawKind
    constants: Dict[str, complex]

    def __post_init__(self):
        for name, value in self.constants.items():
            if not cmath.isfinite(complex(value)):
                raise DomainError(name, value, "constante finita")


@dataclass(frozen=True)
class MomentCheck:
    """Sucesión de momentos reescalados sobre la escalera t_k y su extrapolación."""
    r: float
    law: AsymptoticLaw
    times: List[float]
    scaled: List[float]
    limit: float
    target: float

    @property
    def relative_error(self) -> float:
        return abs(self.limit - self.target) / max(abs(self.target), 1e-300)


@dataclass(frozen=True)
class LargeXFit:
    slope: float
    expected_slope: float
    phase_error: Optional[float] = None


class WeakFormResult(NamedTuple):
    residual: float
    scale: float
    parts: Tuple[float, ...]

    @property
    def relative(self) -> float:
        return abs(self.residual) / max(self.scale, 1e-300)


# ----------------------------------------------------------------------
# ----------------- UTILIDADES -----------------
# ----------------------------------------------------------------------

def _require_positive_x(x: float) -> None:
    if not (x > 0 and math.isfinite(x)):
        raise DomainError("x", x, "x > 0 finito")


def _power_sum(extend: Callable[[int], None], table: List[complex], q: float) -> complex:
    """Σ_m table[m]·q^m, 0 ≤ q < 1, con cota geométrica de la cola."""
    total = 0j
    power = 1.0
    quiet = 0
    term = 0j
    for m in range(SERIES_CAP):
        if m >= len(table):
            extend(min(SERIES_CAP, 2 * m + 32))
        term = table[m] * power
        total += term
        if abs(term) * q / (1.0 - q) <= SERIES_TOL * abs(total):
            quiet += 1
            if quiet >= 3:
                return total
        else:
            quiet = 0
        power *= q
        if power == 0.0:
            return total
    raise NonConvergence(SERIES_CAP, abs(term))


def _log1p_power(x: float, g: float) -> float:
    """log(1 + x^g) sin desbordar para x^g grande."""
    if x == 0.0:
        return 0.0
    lp = g * math.log(x)
    if lp > 0:
        return lp + math.log1p(math.exp(-lp))
    return math.log1p(math.exp(lp))


# ----------------------------------------------------------------------
# ----------------- u: 0 ≤ γt < 1 -----------------
# ----------------------------------------------------------------------

def _require_u_domain(params: ModelParams, t: float) -> None:
    if params.gamma <= 0:
        raise DomainError("gamma", params.gamma, "γ > 0")
    if not (0 <= params.gamma * t < 1):
        raise DomainError("γt", params.gamma * t, "[0, 1)")


def _regular_density(params: ModelParams, t: float, x: float) -> float:
    """u^R(t,x) sin el corte de Heaviside; vale para ambos signos de γ."""
    g = params.gamma
    gt = g * t
    x_a = params.x_atom(t)
    if abs(x - x_a) <= EDGE_REL * x_a:
        z = 0.0
    elif x == 0.0:
        z = gt
    else:
        z = min(1.0, gt * (1.0 + (gt - 1.0) * math.exp(g * math.log(x))))
    prefactor = params.theta * math.exp((2.0 / g) * math.log1p(-gt)) * t
    return (prefactor * f21(1.0 + params.sigma1 / g, 1.0 + params.sigma2 / g, 2.0, z)).real


def u_density(params: ModelParams, t: float, x: float) -> float:
    """Parte regular de u, nula a la derecha del átomo."""
    _require_u_domain(params, t)
    if x < 0 or not math.isfinite(x):
        raise DomainError("x", x, "x ≥ 0 finito")
    if t == 0:
        return 0.0
    if x > params.x_atom(t) * (1.0 + EDGE_REL):
        return 0.0
    return _regular_density(params, t, x)


def u_local(params: ModelParams, t: float, x: float) -> LocalValue:
    density = u_density(params, t, x)
    x_a = params.x_atom(t)
    atom = Atom(x_a, params.atom_weight(t)) if abs(x - x_a) <= EDGE_REL * x_a else None
    return LocalValue(atom, density)


def u_measure(params: ModelParams, t: float) -> MeasureSolution:
    _require_u_domain(params, t)
    x_a = params.x_atom(t)
    return MeasureSolution(params, t, (Atom(x_a, params.atom_weight(t)),), partial(u_density, params, t),
                           support_upper=x_a)


def limit_profile(params: ModelParams, x: float) -> float:
    """Perfil en t = 1/γ: γΓ(2/γ)/(Γ(σ₁/γ)Γ(σ₂/γ))·(1+x^γ)^{−2/γ}."""
    if params.gamma <= 0:
        raise DomainError("gamma", params.gamma, "γ > 0")
    if x < 0 or not math.isfinite(x):
        raise DomainError("x", x, "x ≥ 0 finito")
    g = params.gamma
    constant = g * gamma_ratio([2.0 / g], [params.sigma1 / g, params.sigma2 / g])
    return constant.real * math.exp(-(2.0 / g) * _log1p_power(x, g))


def limit_profile_law(params: ModelParams) -> AsymptoticLaw:
    g = params.gamma
    constant = g * gamma_ratio([2.0 / g], [params.sigma1 / g, params.sigma2 / g])
    return AsymptoticLaw("LimitProfile", {"constant": constant, "exponent": -2.0 / g})


# ----------------------------------------------------------------------
# ----------------- ω: γt > 1 -----------------
# ----------------------------------------------------------------------

def omega_abscissa(params: ModelParams) -> float:
    """Recta de inversión dentro de la banda (0, Re σ₂ + γ)."""
    return 0.5 * min(2.0, params.sigma2.real + params.gamma)


class OmegaSeries:
    """
    Series de residuos de ω(t,·):

      caso 1, γt·x^γ < 1:       ω = Re Σ_m c_m (γt·x^γ)^m          (polos −mγ)
      caso 2, (γt−1)·x^γ > 1:   ω = Re x^{−σ₂−γ} Σ_m d_m ((γt−1)x^γ)^{−m}   (polos σ₂+(m+1)γ)

    Los ₂F₁ de los coeficientes salen de la recurrencia contigua en b; las
    tablas crecen bajo demanda y se reutilizan. Entre ambos umbrales se
    invierte U sobre una MellinGrid fija.
    """

    def __init__(self, params: ModelParams, t: float):
        g = params.gamma
        if g <= 0 or g * t <= 1:
            raise DomainError("γt", g * t, "γ > 0 y γt > 1")
        self.params = params
        self.t = t
        self.gt = g * t
        self.x1 = self.gt ** (-1.0 / g)
        self.x2 = (self.gt - 1.0) ** (-1.0 / g)
        s1, s2 = params.sigma1, params.sigma2
        self._a = 1.0 - s1 / g
        self._c = 1.0 + (s2 - s1) / g
        self._z = 1.0 / self.gt
        self._shift = s2 / g
        self._small: List[complex] = []
        self._large: List[complex] = []
        self._small_state: Optional[list] = None
        self._large_state: Optional[list] = None
        self._grid: Optional[Tuple[MellinGrid, np.ndarray]] = None
        self._lock = threading.RLock()

    @property
    def band(self) -> Tuple[float, float]:
        return self.x1, self.x2

    def ratios(self, x: float) -> Tuple[float, float]:
        """(γt·x^γ, 1/((γt−1)x^γ)): razones de convergencia de los casos 1 y 2."""
        lx = self.params.gamma * math.log(x)
        q1 = math.exp(min(700.0, math.log(self.gt) + lx))
        q2 = math.exp(min(700.0, -math.log(self.gt - 1.0) - lx))
        return q1, q2

    # --- coeficientes ---
    def _extend_small(self, count: int) -> None:
        with self._lock:
            a, c, z = self._a, self._c, self._z
            if self._small_state is None:
                g = self.params.gamma
                b0 = -self.params.sigma1 / g
                prefactor = g * cmath.exp((self.params.sigma1 / g) * math.log(self.gt)) \
                    * gamma_ratio([1.0 + self._shift], [self.params.sigma1 / g, c])
                f_prev = f21(a, b0 + 1.0, c, z)
                f_cur = f21(a, b0, c, z)
                self._small_state = [b0, prefactor, f_prev, f_cur, 1.0 + 0j]
                self._small.append(prefactor * f_cur)
            b0, prefactor, f_prev, f_cur, p = self._small_state
            while len(self._small) < count:
                m = len(self._small)
                b = b0 - (m - 1)
                # (c−b)F(b−1) + (2b−c+(a−b)z)F(b) + b(z−1)F(b+1) = 0
                f_next = -((2.0 * b - c + (a - b) * z) * f_cur + b * (z - 1.0) * f_prev) / (c - b)
                f_prev, f_cur = f_cur, f_next
                p *= (m + self._shift) / m
                self._small.append(prefactor * (-1) ** m * p * f_cur)
            self._small_state = [b0, prefactor, f_prev, f_cur, p]

    def _extend_large(self, count: int) -> None:
        # G_m = F(a, c+m; c; z)·(1−z)^m
        with self._lock:
            a, c, z = self._a, self._c, self._z
            if self._large_state is None:
                prefactor = a_coefficient(self.params, self.t)
                g_first = cmath.exp(-a * math.log1p(-z))
                self._large_state = [prefactor, 0j, g_first, 1.0 + 0j]
                self._large.append(prefactor * g_first)
            prefactor, g_prev, g_cur, p = self._large_state
            while len(self._large) < count:
                m = len(self._large) - 1
                # contigua en b escalada por (1−z)^m; en m = 0 el término en G_{m−1} se anula
                g_next = (-m * (1.0 - z) * g_prev + (c + 2.0 * m + (a - c - m) * z) * g_cur) / (c + m)
                g_prev, g_cur = g_cur, g_next
                p *= (m + 1 + self._shift) / (m + 1)
                self._large.append(prefactor * (-1) ** (m + 1) * p * g_cur)
            self._large_state = [prefactor, g_prev, g_cur, p]

    def small_coefficients(self, count: int) -> List[complex]:
        self._extend_small(count)
        return self._small[:count]

    def large_coefficients(self, count: int) -> List[complex]:
        self._extend_large(count)
        return self._large[:count]

    # --- evaluación ---
    def series(self, x: float, limit: float = SERIES_LIMIT) -> float:
        """Serie pura; SeriesSwitchPoint si x cae donde ninguna converge con razón ≤ limit."""
        _require_positive_x(x)
        q1, q2 = self.ratios(x)
        if q1 <= q2 and q1 <= limit:
            return _power_sum(self._extend_small, self._small, q1).real
        if q2 < q1 and q2 <= limit:
            lead = cmath.exp(-(self.params.sigma2 + self.params.gamma) * math.log(x))
            return (lead * _power_sum(self._extend_large, self._large, q2)).real
        raise SeriesSwitchPoint(x, self.band)

    def _band_grid(self) -> Tuple[MellinGrid, np.ndarray]:
        with self._lock:
            if self._grid is None:
                g = self.params.gamma
                s0 = omega_abscissa(self.params)
                W = partial(u_sym, self.params, self.t)
                v_max = decay_horizon(W, s0, rel_tol=1e-14)
                margin = (1.0 / g) * math.log(1.0 / SERIES_SWITCH) + 1.0
                span = max(abs(math.log(self.x1)), abs(math.log(self.x2))) + margin
                grid = MellinGrid(s0, v_max, log_x_span=span)
                self._grid = (grid, grid.sample(W))
                logger.debug("ω: malla de inversión con %d nodos (v_max=%.1f).", len(grid.nodes), v_max)
            return self._grid

    def evaluate_many(self, xs: Sequence[float]) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        out = np.empty(len(xs))
        inside = []
        for k, x in enumerate(xs):
            if min(self.ratios(float(x))) <= SERIES_SWITCH:
                out[k] = self.series(float(x))
            else:
                inside.append(k)
        if inside:
            grid, values = self._band_grid()
            out[inside] = grid.invert(xs[inside], values)
        return out

    def __call__(self, x: float) -> float:
        _require_positive_x(x)
        return float(self.evaluate_many([x])[0])


@lru_cache(maxsize=64)
def omega_series_tables(params: ModelParams, t: float) -> OmegaSeries:
    return OmegaSeries(params, t)


def omega_series(params: ModelParams, t: float, x: float) -> float:
    return omega_series_tables(params, t).series(x)


def omega_inverse_mellin(params: ModelParams, t: float, x: float, s0: Optional[float] = None,
                         tol: float = 1e-10) -> complex:
    """ℳ⁻¹ de la parte simétrica de U por cuadratura adaptativa (referencia independiente de las series)."""
    value = inverse_mellin(partial(u_sym, params, t), omega_abscissa(params) if s0 is None else s0, x, tol)
    if abs(value.imag) > IMAG_RESIDUE_TOL:
        logger.warning("ω(%g, %g): residuo imaginario %.2e.", t, x, abs(value.imag))
    return value


def omega_density(params: ModelParams, t: float, x: float, exact: bool = False) -> float:
    """
    ω(t,x). Fuera de la banda se usa la serie; dentro, la malla de inversión
    (o la cuadratura adaptativa con exact=True).
    """
    tables = omega_series_tables(params, t)
    _require_positive_x(x)
    if exact and min(tables.ratios(x)) > SERIES_SWITCH:
        return omega_inverse_mellin(params, t, x).real
    return tables(x)


def omega_profile(params: ModelParams, t: float, xs: Sequence[float]) -> np.ndarray:
    return omega_series_tables(params, t).evaluate_many(xs)


def omega_measure(params: ModelParams, t: float) -> MeasureSolution:
    tables = omega_series_tables(params, t)
    return MeasureSolution(params, t, (), tables, support_upper=math.inf, breakpoints=tables.band,
                           transform=partial(u_sym, params, t))


def large_x_law(params: ModelParams, t: float) -> AsymptoticLaw:
    """ω ≈ A(t)·H(t)·x^{−σ₂−γ} para x → ∞ (parte real si θ > 1)."""
    return AsymptoticLaw("LargeX", {
        "A": a_coefficient(params, t),
        "H": h_coefficient(params, t),
        "exponent": -(params.sigma2 + params.gamma),
    })


def large_x_fit(params: ModelParams, t: float, x_lo: float = 1e2, x_hi: float = 1e4,
                points: int = 41) -> LargeXFit:
    """
    Pendiente log-log de |ω| en [x_lo, x_hi]. Para θ > 1 la envolvente se mide
    con dos ajustes c₁cos(ζ log x) + c₂sin(ζ log x) sobre ω·x^{Re σ₂+γ}, y la
    fase ajustada se compara con arg(A·H).
    """
    xs = np.logspace(math.log10(x_lo), math.log10(x_hi), points)
    values = omega_profile(params, t, xs)
    expected = -(params.sigma2.real + params.gamma)
    logs = np.log(xs)
    if params.zeta == 0.0:
        slope = float(np.polyfit(logs, np.log(np.abs(values)), 1)[0])
        return LargeXFit(slope, expected)

    zeta = params.zeta
    scaled = values * np.exp(-expected * logs)

    def fit(mask):
        design = np.column_stack([np.cos(zeta * logs[mask]), np.sin(zeta * logs[mask])])
        coef, *_ = np.linalg.lstsq(design, scaled[mask], rcond=None)
        return coef

    half = points // 2
    first = np.arange(points) <= half
    second = np.arange(points) >= half
    amp1 = math.hypot(*fit(first))
    amp2 = math.hypot(*fit(second))
    distance = float(logs[second].mean() - logs[first].mean())
    slope = expected + math.log(amp2 / amp1) / distance
    c1, c2 = fit(np.ones(points, dtype=bool))
    law = large_x_law(params, t).constants
    predicted = cmath.phase(law["A"] * law["H"])
    error = (math.atan2(c2, c1) - predicted + math.pi) % (2.0 * math.pi) - math.pi
    return LargeXFit(slope, expected, abs(error))


# ----------------------------------------------------------------------
# ----------------- w GLOBAL -----------------
# ----------------------------------------------------------------------

def global_w(params: ModelParams, t: float, x: float) -> LocalValue:
    """w(t) = u(t) para t < 1/γ, el perfil límite en t = 1/γ y ω(t) para t > 1/γ."""
    if params.gamma <= 0:
        raise DomainError("gamma", params.gamma, "γ > 0")
    if t < 0:
        raise DomainError("t", t, "t ≥ 0")
    gt = params.gamma * t
    if abs(gt - 1.0) <= 1e-14:
        return LocalValue(None, limit_profile(params, x))
    if gt < 1.0:
        return u_local(params, t, x)
    return LocalValue(None, omega_density(params, t, x))


# ----------------------------------------------------------------------
# ----------------- v: γ < 0 -----------------
# ----------------------------------------------------------------------

def v_abscissa(params: ModelParams) -> float:
    """s₀ por defecto: a la derecha del primer polo σ₂ + γ de W_real."""
    return params.sigma2.real + params.gamma + 0.5 * min(1.0, abs(params.gamma))


class NegativeGammaDensity:
    """
    Densidad v(t,·):

      x > x_a          0
      x* ≤ x ≤ x_a     forma cerrada u^R (región alcanzada por las características)
      x < x*           Σ_{ℓ,m} Res(W_real; σ_ℓ+(m+1)γ)·x^{−σ_ℓ−(m+1)γ}

    con x* = (−γt)^{−1/γ} y un átomo de peso (1−γt)^{1/γ} en x_a. Los
    coeficientes usan la recurrencia contigua en c de F̃. Si (σ₂−σ₁)/γ es
    entero (polos dobles) se promedian dos copias con θ ± NUDGE.
    """

    def __init__(self, params: ModelParams, t: float, resolve_degenerate: bool = True):
        g = params.gamma
        if g >= 0:
            raise DomainError("gamma", g, "γ < 0")
        if not (0 < -g * t < 1):
            raise DomainError("−γt", -g * t, "(0, 1)")
        if g < -2.0:
            logger.warning("γ = %g < −2: la integrabilidad de la inversión no está garantizada.", g)
        self.params = params
        self.t = t
        self.gt = -g * t
        self.x_a = params.x_atom(t)
        self.weight = params.atom_weight(t)
        self.x_star = params.x_star(t)
        self._pair: Optional[Tuple["NegativeGammaDensity", "NegativeGammaDensity"]] = None
        self._tables: Dict[int, List[complex]] = {1: [], 2: []}
        self._states: Dict[int, list] = {}
        self._lock = threading.RLock()
        alpha = (params.sigma2 - params.sigma1) / g
        if resolve_degenerate and abs(alpha - round(alpha.real)) < DEGENERATE_TOL:
            logger.warning("θ desplazado ±%g: (σ₂−σ₁)/γ = %.6g es entero (polos dobles).", NUDGE, alpha.real)
            self._pair = (NegativeGammaDensity(params.nudged(dtheta=NUDGE), t, False),
                          NegativeGammaDensity(params.nudged(dtheta=-NUDGE), t, False))

    @property
    def degenerate(self) -> bool:
        return self._pair is not None

    # --- coeficientes d_m = Res(W_real; σ_ℓ+(m+1)γ)·(−γt)^m ---
    def _extend(self, ell: int, count: int) -> None:
        with self._lock:
            p = self.params
            g = p.gamma
            table = self._tables[ell]
            z = g * self.t
            A = 1.0 - p.sigma1 / g
            B = 1.0 - p.sigma2 / g
            C = 1.0 - p.sigma(ell) / g
            if ell not in self._states:
                alpha = -(p.sigma(ell) - p.sigma(3 - ell)) / g
                beta = -p.sigma(ell) / g
                prefactor = (-math.pi * cot_pi(p.sigma(ell) / g) * cmath.exp(beta * math.log(self.gt))
                             * g * crgamma(p.sigma1 / g) * crgamma(p.sigma2 / g))
                k_up = hyp2f1_regularized(A, B, C + 1.0, z)
                k_cur = hyp2f1_regularized(A, B, C, z)
                q_cur = gamma_ratio([alpha], [beta])
                self._states[ell] = [0, alpha, beta, prefactor, k_up, k_cur, q_cur]
                table.append(prefactor * q_cur * k_cur)
            m, alpha, beta, prefactor, k_prev, k_cur, q_cur = self._states[ell]
            while len(table) < count:
                c = C - m
                # (z−1)F̃(c−1) + (c−1−(2c−A−B−1)z)F̃(c) + (c−A)(c−B)z·F̃(c+1) = 0, con K_m = F̃_m/m!
                head = (c - 1.0 - (2.0 * c - A - B - 1.0) * z) * k_cur / (m + 1)
                if m == 0:
                    tail = (C - A) * (C - B) * z * k_prev
                else:
                    tail = (c - A) * (c - B) * z * k_prev / (m * (m + 1))
                k_prev, k_cur = k_cur, (head + tail) / (1.0 - z)
                m += 1
                q_cur *= (beta - m) / (alpha - m)
                table.append(prefactor * (-1) ** m * q_cur * k_cur)
            self._states[ell] = [m, alpha, beta, prefactor, k_prev, k_cur, q_cur]

    def coefficients(self, ell: int, count: int) -> List[complex]:
        self._extend(ell, count)
        return self._tables[ell][:count]

    # --- evaluación ---
    def series(self, x: float) -> float:
        _require_positive_x(x)
        g = self.params.gamma
        lx = math.log(x)
        q = math.exp(-g * lx - math.log(self.gt))
        if q > V_SERIES_LIMIT:
            raise SeriesSwitchPoint(x, (self.x_star * V_SERIES_LIMIT ** (1.0 / abs(g)), self.x_star))
        total = 0j
        for ell in (1, 2):
            lead = cmath.exp(-(self.params.sigma(ell) + g) * lx)
            total += lead * _power_sum(partial(self._extend, ell), self._tables[ell], q)
        return total.real

    def __call__(self, x: float) -> float:
        if self._pair is not None:
            return 0.5 * (self._pair[0](x) + self._pair[1](x))
        _require_positive_x(x)
        if x > self.x_a * (1.0 + EDGE_REL):
            return 0.0
        if x >= self.x_star:
            return _regular_density(self.params, self.t, x)
        q = (x / self.x_star) ** abs(self.params.gamma)
        if q <= V_SERIES_LIMIT:
            return self.series(x)
        return v_inverse_mellin(self.params, self.t, x).real

    def segment_mellin(self, s: complex, lo: float, hi: float) -> complex:
        """
        ∫_lo^hi x^{s−1}v(x)dx para 0 ≤ lo < hi ≤ x*, integrando la serie de
        residuos término a término. Con lo = 0 exige Re s > Re σ₂ + γ.
        """
        if self._pair is not None:
            return 0.5 * (self._pair[0].segment_mellin(s, lo, hi) + self._pair[1].segment_mellin(s, lo, hi))
        s = complex(s)
        g = self.params.gamma
        if not (0 <= lo < hi <= self.x_star * (1.0 + EDGE_REL)):
            raise DomainError("segment", (lo, hi), f"0 ≤ lo < hi ≤ x* = {self.x_star:g}")
        if lo == 0 and s.real <= self.params.sigma2.real + g:
            raise DomainError("Re s", s.real, f"Re s > {self.params.sigma2.real + g:g}")
        log_gt = math.log(self.gt)
        ends = [(1.0, math.log(hi))] + ([(-1.0, math.log(lo))] if lo > 0 else [])
        total = 0j
        for ell in (1, 2):
            sl = self.params.sigma(ell)
            partial_sum = 0j
            quiet = 0
            term = 0j
            for m in range(SERIES_CAP):
                if m >= len(self._tables[ell]):
                    self._extend(ell, min(SERIES_CAP, 2 * m + 32))
                e = s - sl - (m + 1) * g
                # Res·x^{s−p} = d_m·(−γt)^{−m}·x^{s−σ_ℓ−γ}·x^{−mγ}
                if abs(e) < 1e-12:
                    value = cmath.exp(-m * log_gt) * (ends[0][1] - ends[1][1])
                else:
                    value = sum(sign * cmath.exp((s - sl - g) * lx + m * (-g * lx - log_gt)) for sign, lx in ends) / e
                term = self._tables[ell][m] * value
                partial_sum += term
                if abs(term) * (m + 1) <= 1e-13 * abs(partial_sum):
                    quiet += 1
                    if quiet >= 3:
                        break
                else:
                    quiet = 0
            else:
                if abs(term) * SERIES_CAP > 1e-8 * abs(partial_sum):
                    raise NonConvergence(SERIES_CAP, abs(term) * SERIES_CAP)
            total += partial_sum
        return total

    def small_x_law(self) -> AsymptoticLaw:
        """Términos dominantes x → 0 (los residuos en σ₁+γ y σ₂+γ)."""
        if self._pair is not None:
            laws = [half.small_x_law() for half in self._pair]
            averaged = {k: 0.5 * (laws[0].constants[k] + laws[1].constants[k]) for k in laws[0].constants}
            return AsymptoticLaw(laws[0].kind, averaged)
        c1 = self.coefficients(1, 1)[0]
        c2 = self.coefficients(2, 1)[0]
        g = self.params.gamma
        if self.params.zeta > 0:
            return AsymptoticLaw("SmallXOscillation", {
                "h1": 2.0 * c2.real,
                "h2": 2.0 * c2.imag,
                "zeta": self.params.zeta,
                "exponent": -(self.params.sigma2.real + g),
            })
        return AsymptoticLaw("SmallXOscillation", {
            "A0": c2,
            "B0": c1,
            "exponent_A": -(self.params.sigma2 + g),
            "exponent_B": -(self.params.sigma1 + g),
        })

    def measure(self) -> MeasureSolution:
        return MeasureSolution(self.params, self.t, (Atom(self.x_a, self.weight),), self,
                               support_upper=self.x_a, breakpoints=(self.x_star,),
                               lower_cut=self.x_star, series_mellin=self.segment_mellin)


@lru_cache(maxsize=64)
def v_tables(params: ModelParams, t: float) -> NegativeGammaDensity:
    return NegativeGammaDensity(params, t)


def v_inverse_mellin(params: ModelParams, t: float, x: float, s0: Optional[float] = None,
                     tol: float = 1e-10) -> complex:
    """
    ℳ⁻¹[W_real](x) sobre Re s = s₀, sin la contribución del átomo
    (x_a^{s−1}·peso, que no decae sobre la recta) para x ≠ x_a.
    """
    x_a = params.x_atom(t)
    weight = params.atom_weight(t)
    log_xa = math.log(x_a)

    def W(s: complex) -> complex:
        return u2_real(params, t, s) - weight * cmath.exp((s - 1.0) * log_xa)

    value = inverse_mellin(W, v_abscissa(params) if s0 is None else s0, x, tol)
    if abs(value.imag) > IMAG_RESIDUE_TOL:
        logger.warning("v(%g, %g): residuo imaginario %.2e.", t, x, abs(value.imag))
    return value


def v_negative_gamma(params: ModelParams, t: float, x: float) -> float:
    return v_tables(params, t)(x)


def small_x_approximation(params: ModelParams, t: float, x: float) -> float:
    """Ley de x pequeño: h₁cos(ζ log x)+h₂sin(ζ log x) por x^{−1−γ} si θ > 1; Re(A₀x^{−σ₂−γ}+B₀x^{−σ₁−γ}) si no."""
    law = v_tables(params, t).small_x_law().constants
    lx = math.log(x)
    if "h1" in law:
        zeta = complex(law["zeta"]).real
        envelope = math.exp(law["exponent"].real * lx)
        return envelope * (law["h1"].real * math.cos(zeta * lx) + law["h2"].real * math.sin(zeta * lx))
    return (law["A0"] * cmath.exp(law["exponent_A"] * lx) + law["B0"] * cmath.exp(law["exponent_B"] * lx)).real


# ----------------------------------------------------------------------
# ----------------- TRANSFORMADA DE MELLIN DIRECTA -----------------
# ----------------------------------------------------------------------

def measure_at(params: ModelParams, t: float) -> MeasureSolution:
    """La solución física relevante para (γ, θ, t)."""
    g = params.gamma
    if g < 0:
        return v_tables(params, t).measure()
    if g * t < 1:
        return u_measure(params, t)
    if abs(g * t - 1.0) <= 1e-14:
        return MeasureSolution(params, t, (), partial(limit_profile, params))
    return omega_measure(params, t)


def _density_moment(measure: MeasureSolution, s: complex, lo: float, hi: float, tol: float) -> complex:
    """∫_lo^hi x^{s−1}·densidad dx, partiendo en los puntos de quiebre; hi puede ser ∞."""
    s = complex(s)
    total = 0j
    if measure.series_mellin is not None and lo < measure.lower_cut:
        top = min(hi, measure.lower_cut)
        total += measure.series_mellin(s, lo, top)
        lo = top
        if lo >= hi:
            return total

    def f(x: float) -> complex:
        return cmath.exp((s - 1.0) * math.log(x)) * measure.density(x)

    edges = [lo] + sorted(p for p in measure.breakpoints if lo < p < hi)
    if math.isfinite(hi):
        edges.append(hi)
    for left, right in zip(edges[:-1], edges[1:]):
        total += tanh_sinh(f, left, right, tol)[0]
    if not math.isfinite(hi):
        last = edges[-1] if edges[-1] > 0 else 1.0
        if edges[-1] == 0:
            total += tanh_sinh(f, 0.0, last, tol)[0]
        # x = last/y
        total += tanh_sinh(lambda y: f(last / y) * last / (y * y), 0.0, 1.0, tol)[0]
    return total


def forward_mellin(solution: MeasureSolution, s: complex, tol: float = 1e-10) -> complex:
    """ℳ(s) = Σ peso·posición^{s−1} + ∫ x^{s−1}·densidad."""
    s = complex(s)
    total = sum((a.weight * cmath.exp((s - 1.0) * math.log(a.location)) for a in solution.atoms), 0j)
    return total + _density_moment(solution, s, 0.0, solution.support_upper, tol)


def total_mass(params: ModelParams, t: float) -> float:
    """Masa total = transformada de Mellin en s = 1."""
    g = params.gamma
    if g < 0:
        return u2_real(params, t, 1.0).real
    if abs(g * t - 1.0) <= 1e-14:
        return omega_limit(params, 1.0).real
    if g * t < 1:
        return omega(params, t, 1.0).real
    return u_sym(params, t, 1.0).real


# ----------------------------------------------------------------------
# ----------------- BARRIDO DE SIGNO -----------------
# ----------------------------------------------------------------------

def probe_points(params: ModelParams, x_lo: float, x_hi: float) -> List[float]:
    """
    Puntos e^{∓kπ/ζ} (− para γ < 0, hacia x → 0; + para γ > 0, hacia x → ∞)
    donde x^{−iζ} alterna de signo. Vacío si θ ≤ 1.
    """
    zeta = params.zeta
    if zeta <= 0:
        return []
    sign = -1.0 if params.gamma < 0 else 1.0
    points = []
    for k in range(100_000):
        x = math.exp(sign * k * math.pi / zeta)
        if (sign < 0 and x < x_lo) or (sign > 0 and x > x_hi):
            break
        if x_lo <= x <= x_hi:
            points.append(x)
    return points


def _bisect(density: Callable[[float], float], lo: float, hi: float, f_lo: float, f_hi: float) -> schemas.Bracket:
    for _ in range(200):
        if hi / lo - 1.0 <= BISECTION_REL_WIDTH:
            break
        mid = math.sqrt(lo * hi)
        f_mid = density(mid)
        if f_lo * f_mid <= 0:
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    return schemas.Bracket(lo=lo, hi=hi, f_lo=f_lo, f_hi=f_hi)


def probe_brackets(density: Callable[[float], float], probes: Sequence[float]) -> List[schemas.Bracket]:
    """Pares consecutivos de puntos de prueba con signos opuestos (sin refinar)."""
    values = [density(x) for x in probes]
    return [schemas.Bracket(lo=min(a, b), hi=max(a, b), f_lo=fa if a < b else fb, f_hi=fb if a < b else fa)
            for (a, fa), (b, fb) in zip(zip(probes, values), zip(probes[1:], values[1:])) if fa * fb < 0]


def sign_scan(density: Callable[[float], float], x_lo: float, x_hi: float, probes: Sequence[float] = (),
              points_per_decade: int = SCAN_POINTS_PER_DECADE,
              batch: Optional[Callable[[np.ndarray], np.ndarray]] = None,
              critical: bool = False, tol: float = 0.0, strict: bool = False,
              threads: int = 1) -> schemas.SignReport:
    """
    Barre una densidad real sobre una malla logarítmica (más los puntos de
    prueba) y refina por bisección cada cambio de signo. Sin cambios de signo
    el veredicto es Nonnegative si min > tol; si no (o si θ = 1) Inconclusive.
    """
    if not (0 < x_lo < x_hi):
        raise DomainError("x_range", (x_lo, x_hi), "0 < x_lo < x_hi")
    decades = math.log10(x_hi / x_lo)
    n = max(2, int(math.ceil(decades * points_per_decade)) + 1)
    grid = np.unique(np.concatenate([np.logspace(math.log10(x_lo), math.log10(x_hi), n),
                                     np.asarray([p for p in probes if x_lo <= p <= x_hi], dtype=float)]))
    if batch is not None:
        values = np.asarray(batch(grid), dtype=float)
    elif threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = np.asarray(list(pool.map(density, grid)), dtype=float)
    else:
        values = np.asarray([density(float(x)) for x in grid], dtype=float)

    finite = np.isfinite(values)
    if not finite.all():
        logger.warning("sign_scan: %d valores no finitos descartados.", int((~finite).sum()))
        grid, values = grid[finite], values[finite]
    k_min = int(np.argmin(values))
    min_value, argmin = float(values[k_min]), float(grid[k_min])

    brackets = [_bisect(density, float(grid[k]), float(grid[k + 1]), float(values[k]), float(values[k + 1]))
                for k in range(len(grid) - 1) if values[k] * values[k + 1] < 0]
    if brackets:
        verdict = "Oscillates"
    elif critical or min_value <= tol:
        verdict = "Inconclusive"
    else:
        verdict = "Nonnegative"
    logger.info("sign_scan: %d puntos, mínimo %.3e en %.3e, %d cambios de signo → %s.",
                len(grid), min_value, argmin, len(brackets), verdict)
    if verdict == "Inconclusive" and strict and not critical:
        raise InconclusiveGrid(min_value, argmin)
    return schemas.SignReport(min_value=min_value, argmin=argmin, sign_changes=brackets,
                              verdict=verdict, points=len(grid))


def scan_range(params: ModelParams, t: float, decades: int = SCAN_DECADES) -> Tuple[float, float]:
    """Rango de barrido por defecto: `decades` décadas dentro del soporte."""
    g = params.gamma
    if g < 0 or g * t < 1:
        hi = params.x_atom(t) * (1.0 - 1e-9)
        lo = (params.x_star(t) if g < 0 else hi) * 10.0 ** (-decades)
        return lo, hi
    # ω: un cuarto hacia x → 0 y el resto hacia x → ∞, donde vive la oscilación
    return 10.0 ** (-decades / 4.0), 10.0 ** (3.0 * decades / 4.0)


def scan_solution(params: ModelParams, t: float, decades: int = SCAN_DECADES,
                  points_per_decade: int = SCAN_POINTS_PER_DECADE, threads: int = 1,
                  strict: bool = False, x_range: Optional[Tuple[float, float]] = None) -> schemas.SignReport:
    """
    sign_scan de la solución física de (γ, θ, t) con los puntos de prueba del
    régimen. `x_range` reemplaza el rango por defecto de scan_range.
    """
    g = params.gamma
    x_lo, x_hi = x_range if x_range is not None else scan_range(params, t, decades)
    batch = None
    if g < 0:
        density = v_tables(params, t)
    elif g * t < 1:
        density = partial(u_density, params, t)
    elif abs(g * t - 1.0) <= 1e-14:
        density = partial(limit_profile, params)
    else:
        density = omega_series_tables(params, t)
        batch = density.evaluate_many
    return sign_scan(density, x_lo, x_hi, probe_points(params, x_lo, x_hi), points_per_decade,
                     batch=batch, critical=params.critical, strict=strict, threads=threads)


# ----------------------------------------------------------------------
# ----------------- MOMENTOS CERCA DE t = 1/γ -----------------
# ----------------------------------------------------------------------

def moment_law(params: ModelParams, r: float) -> AsymptoticLaw:
    g = params.gamma
    if g <= 0:
        raise DomainError("gamma", g, "γ > 0")
    if r <= 0:
        raise DomainError("r", r, "r > 0")
    s1, s2 = params.sigma1, params.sigma2
    if abs(r - 1.0) < 1e-12:
        return AsymptoticLaw("LogMoment", {"target": gamma_ratio([2.0 / g], [s1 / g, s2 / g])})
    if r > 1:
        target = gamma_ratio([(r + 1.0) / g, (r - 1.0) / g], [(r + 1.0 - s1) / g, (r + 1.0 - s2) / g])
        return AsymptoticLaw("MomentBlowup", {"target": target, "rate": (r - 1.0) / g})
    return AsymptoticLaw("SubcriticalMoment", {"target": omega_limit(params, r + 1.0)})


def moment_asymptotics(params: ModelParams, r: float,
                       ladder: Sequence[int] = RICHARDSON_LADDER) -> MomentCheck:
    """
    Momentos ∫x^r u = Ω(t, r+1) sobre t_k = (1−2^{−k})/γ, reescalados según la
    ley de explosión, y su límite extrapolado (Richardson por mínimos cuadrados).
    """
    law = moment_law(params, r)
    g = params.gamma
    times = richardson_ladder(g, ladder)
    eps = [1.0 - g * t for t in times]
    raw = [omega(params, t, r + 1.0, check=False).real for t in times]
    if law.kind == "LogMoment":
        logs = [math.log(e) for e in eps]
        scaled = [-m / L for m, L in zip(raw, logs)]
        basis = [[1.0 / L for L in logs], eps]
    else:
        p = (r - 1.0) / g if law.kind == "MomentBlowup" else (1.0 - r) / g
        scaled = [m * e ** p for m, e in zip(raw, eps)] if law.kind == "MomentBlowup" else raw
        exponents = sorted({1.0, round(p, 12)})
        basis = [[e ** q for e in eps] for q in exponents]
        if abs(p - round(p)) < 1e-9:
            # c − a − b entero en la forma de Euler: aparecen términos ε^p·log ε
            basis.append([e ** p * math.log(e) for e in eps])
    limit = extrapolate(scaled, basis).real
    target = complex(law.constants["target"]).real
    logger.debug("momento r=%g: límite %.10g, objetivo %.10g.", r, limit, target)
    return MomentCheck(r, law, times, scaled, limit, target)


# ----------------------------------------------------------------------
# ----------------- FORMA DÉBIL Y RESIDUO PUNTUAL -----------------
# ----------------------------------------------------------------------

def _bump_profile(u: float) -> Tuple[float, float]:
    """exp(−1/(1−u²)) y su derivada; cero fuera de (−1, 1)."""
    if abs(u) >= 1.0:
        return 0.0, 0.0
    w = 1.0 - u * u
    value = math.exp(-1.0 / w)
    return value, value * (-2.0 * u / (w * w))


@dataclass(frozen=True)
class Bump:
    """Función test φ(t,x) = η(t)ψ(x) con soporte (t0, t1) × (a, b)."""
    t0: float
    t1: float
    a: float
    b: float
    _nodes: Tuple[np.ndarray, np.ndarray] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (0 <= self.t0 < self.t1) or not (0 < self.a < self.b):
            raise DomainError("bump", (self.t0, self.t1, self.a, self.b), "0 ≤ t0 < t1, 0 < a < b")
        object.__setattr__(self, "_nodes", np.polynomial.legendre.leggauss(48))

    def eta(self, t: float) -> Tuple[float, float]:
        value, d = _bump_profile((2.0 * t - self.t0 - self.t1) / (self.t1 - self.t0))
        return value, d * 2.0 / (self.t1 - self.t0)

    def psi(self, x: float) -> Tuple[float, float]:
        value, d = _bump_profile((2.0 * x - self.a - self.b) / (self.b - self.a))
        return value, d * 2.0 / (self.b - self.a)

    def psi_integral(self, y: float) -> float:
        """Ψ(y) = ∫_a^y ψ."""
        top = min(y, self.b)
        if top <= self.a:
            return 0.0
        nodes, weights = self._nodes
        half = 0.5 * (top - self.a)
        center = 0.5 * (top + self.a)
        return half * math.fsum(w * self.psi(center + half * u)[0] for u, w in zip(nodes, weights))


def _tail_moment(measure: MeasureSolution, y: float, gamma: float, tol: float = 1e-11) -> float:
    """∫_y^∞ densidad·z^{γ−1} dz (sin átomos)."""
    upper = measure.support_upper
    if y >= upper:
        return 0.0
    s = complex(gamma, 0.0)
    if measure.transform is not None and measure.breakpoints and y < min(measure.breakpoints):
        # complemento: evita cuadrar a través de la banda de inversión
        return (measure.transform(s) - _density_moment(measure, s, 0.0, y, tol)).real
    return _density_moment(measure, complex(gamma, 0.0), y, upper, tol).real


def weak_form_residual(params: ModelParams, bump: Bump, t_order: int = 24, x_order: int = 48) -> WeakFormResult:
    """
    ∫∫ u(φ_t + x^{γ+1}φ_x − x^γφ) + θ∫∫ u(t,y)y^{γ−1}∫_0^y φ(t,x)dx dy dt,
    con los átomos sumados exactamente. Retorna el residuo y la escala
    Σ|término| de sus cuatro partes.
    """
    g = params.gamma
    t_nodes, t_weights = gauss_legendre_panels([bump.t0, bump.t1], t_order)
    psi_total = bump.psi_integral(bump.b)
    parts = np.zeros(4)
    for t, wt in zip(t_nodes, t_weights):
        eta, eta_dot = bump.eta(float(t))
        if eta == 0.0 and eta_dot == 0.0:
            continue
        measure = measure_at(params, float(t))
        cuts = [p for p in (*measure.breakpoints, measure.support_upper) if bump.a < p < bump.b]
        edges = sorted({bump.a, bump.b, *cuts})
        xn, xw = gauss_legendre_panels(edges, x_order)
        dens = np.array([measure.density(float(x)) for x in xn])
        psi = np.array([bump.psi(float(x)) for x in xn])
        big_psi = np.array([bump.psi_integral(float(x)) for x in xn])
        p_t = eta_dot * np.sum(xw * dens * psi[:, 0])
        p_x = eta * np.sum(xw * dens * xn ** (g + 1.0) * psi[:, 1])
        p_0 = -eta * np.sum(xw * dens * xn ** g * psi[:, 0])
        inner = np.sum(xw * dens * xn ** (g - 1.0) * big_psi) + psi_total * _tail_moment(measure, bump.b, g)
        for atom in measure.atoms:
            x, w = atom
            if bump.a < x < bump.b:
                value, d = bump.psi(x)
                p_t += w * eta_dot * value
                p_x += w * eta * x ** (g + 1.0) * d
                p_0 -= w * eta * x ** g * value
            if x > bump.a:
                inner += w * x ** (g - 1.0) * bump.psi_integral(x)
        parts += wt * np.array([p_t, p_x, p_0, params.theta * eta * inner])
    return WeakFormResult(float(parts.sum()), float(np.abs(parts).sum()), tuple(float(p) for p in parts))


def pde_residual(params: ModelParams, t: float, x: float, rel_step: float = 1e-4) -> WeakFormResult:
    """∂_tω + ∂_x(x^{γ+1}ω) + x^γω − θ∫_x^∞ ω(t,y)y^{γ−1}dy en un punto, por diferencias centradas."""
    g = params.gamma
    if g <= 0 or g * t <= 1:
        raise DomainError("γt", g * t, "γ > 0 y γt > 1")
    _require_positive_x(x)
    h_t = rel_step * (t - 1.0 / g)
    h_x = rel_step * x
    d_t = (omega_density(params, t + h_t, x) - omega_density(params, t - h_t, x)) / (2.0 * h_t)
    flux = lambda y: y ** (g + 1.0) * omega_density(params, t, y)
    d_x = (flux(x + h_x) - flux(x - h_x)) / (2.0 * h_x)
    loss = x ** g * omega_density(params, t, x)
    gain = params.theta * _tail_moment(omega_measure(params, t), x, g)
    parts = (d_t, d_x, loss, -gain)
    return WeakFormResult(math.fsum(parts), math.fsum(abs(p) for p in parts), parts)
