# GFRAG/critical_gf/special.py
"""
Funciones especiales de argumento complejo: Γ, log Γ, 1/Γ y la función
hipergeométrica de Gauss ₂F₁(a, b; c; z) con parámetros complejos.

Regímenes de ₂F₁ (rama principal en todos los casos):
  - |z| ≤ 0.6: serie directa con monitor de condicionamiento.
  - 0.6 < |z| < 1: conexión z → 1−z si |1−z| ≤ 0.6, Pfaff z → z/(z−1) si
    Re z < 0; en otro caso continuación analítica por Taylor recentrado de
    la EDO hipergeométrica a lo largo del rayo de 0 a z.
  - |z| > 1 fuera del corte [1, ∞): Pfaff si Re z < 0.5, si no conexión
    z → 1/z.
  - Una conexión degenerada o mal condicionada cae en la continuación.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Literal, NamedTuple, Sequence, Tuple

from .errors import BalancedCase, DegenerateConnection, DomainError, NonConvergence, PoleProximity
from .settings import EPS_POLE, GAMMA_LOG_SWITCH, SERIES_CAP, SERIES_REL_TOL

logger = logging.getLogger("gfrag.especial")

Number = complex

# --- Lanczos (g = 7, n = 9) ---
LANCZOS_G = 7
LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)

# Condicionamiento Σ|términos| / |suma| aceptado sin buscar otra ruta
COND_LIMIT = 1e5
# Pasos máximos de la continuación a lo largo de un rayo
CONTINUATION_STEPS = 2000


# ----------------------------------------------------------------------
# ----------------- GAMMA -----------------
# ----------------------------------------------------------------------

def _nearest_nonpositive_integer(s: complex) -> int:
    n = round(s.real)
    return min(n, 0)


def _check_gamma_pole(s: complex) -> None:
    n = _nearest_nonpositive_integer(s)
    if abs(s - n) < EPS_POLE:
        raise PoleProximity(s, n)


def _sin_pi(z: complex) -> complex:
    """sin(πz) con reducción del argumento (exacto en los enteros)."""
    n = round(z.real)
    f = z - n
    value = cmath.sin(math.pi * f)
    return -value if n % 2 else value


def _log_sin_pi(z: complex) -> complex:
    """Una rama de log sin(πz), estable para |Im z| grande."""
    n = round(z.real)
    f = z - n
    shift = 1j * math.pi * (n % 2)
    y = f.imag
    if abs(y) < 5.0:
        return cmath.log(cmath.sin(math.pi * f)) + shift
    if y > 0:
        w = cmath.exp(2j * math.pi * f)
        return math.log(0.5) + 0.5j * math.pi - 1j * math.pi * f + cmath.log(1.0 - w) + shift
    w = cmath.exp(-2j * math.pi * f)
    return math.log(0.5) - 0.5j * math.pi + 1j * math.pi * f + cmath.log(1.0 - w) + shift


def _lanczos_sum(z: complex) -> Tuple[complex, complex]:
    z = z - 1.0
    x = LANCZOS_COEFFS[0]
    for i in range(1, len(LANCZOS_COEFFS)):
        x += LANCZOS_COEFFS[i] / (z + i)
    return z, x


def _gamma_right(z: complex) -> complex:
    """Γ(z) para Re z ≥ 0.5."""
    z, x = _lanczos_sum(z)
    t = z + LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * cmath.exp((z + 0.5) * cmath.log(t) - t) * x


def _log_gamma_right(z: complex) -> complex:
    z, x = _lanczos_sum(z)
    t = z + LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def clog_gamma(s: Number) -> complex:
    """
    Una rama de log Γ(s) (coincide con el logaritmo principal de Γ salvo
    múltiplos de 2πi). Sirve para productos y cocientes sin desbordamiento.
    """
    s = complex(s)
    _check_gamma_pole(s)
    if s.real >= 0.5:
        return _log_gamma_right(s)
    return _LOG_PI - _log_sin_pi(s) - _log_gamma_right(1.0 - s)


def cgamma(s: Number) -> complex:
    """
    Γ(s) para s complejo. Para |Im s| > GAMMA_LOG_SWITCH se calcula como
    exp(log Γ(s)); en otro caso Lanczos directo con reflexión para Re s < 0.5.
    """
    s = complex(s)
    _check_gamma_pole(s)
    if abs(s.imag) > GAMMA_LOG_SWITCH:
        return cmath.exp(clog_gamma(s))
    if s.real < 0.5:
        return math.pi / (_sin_pi(s) * _gamma_right(1.0 - s))
    return _gamma_right(s)


def crgamma(s: Number) -> complex:
    """1/Γ(s), función entera: vale exactamente 0 en los enteros no positivos."""
    s = complex(s)
    if s.real < 0.5:
        if abs(s.imag) > GAMMA_LOG_SWITCH:
            return cmath.exp(_log_sin_pi(s) + _log_gamma_right(1.0 - s) - _LOG_PI)
        return _sin_pi(s) * _gamma_right(1.0 - s) / math.pi
    if abs(s.imag) > GAMMA_LOG_SWITCH:
        return cmath.exp(-_log_gamma_right(s))
    return 1.0 / _gamma_right(s)


def gamma_ratio(num: Sequence[Number], den: Sequence[Number]) -> complex:
    """
    ∏Γ(num)/∏Γ(den). Un polo en el denominador anula el cociente; un polo en
    el numerador lanza PoleProximity.
    """
    num = [complex(v) for v in num]
    den = [complex(v) for v in den]
    for d in den:
        if d.real < 0.5 and abs(d - round(d.real)) < 1e-14 and round(d.real) <= 0:
            return 0j
    if all(abs(v) <= 30.0 and abs(v.imag) <= GAMMA_LOG_SWITCH for v in num + den):
        value = 1.0 + 0j
        for v in num:
            value *= cgamma(v)
        for d in den:
            value *= crgamma(d)
        return value
    log_value = sum(clog_gamma(v) for v in num)
    factor = 1.0 + 0j
    for d in den:
        if d.real < 0.5 and abs(d) <= 30.0:
            # cerca de un polo de Γ(d): usar 1/Γ directamente
            factor *= crgamma(d)
        else:
            log_value -= clog_gamma(d)
    return cmath.exp(log_value) * factor


def log_gamma_ratio(num: Sequence[Number], den: Sequence[Number]) -> complex:
    """
    Una rama de log(∏Γ(num)/∏Γ(den)). Si un argumento del denominador es un
    polo de Γ el cociente es 0 y se retorna −∞ (exp(−∞) = 0).
    """
    total = 0j
    for d in den:
        d = complex(d)
        n = _nearest_nonpositive_integer(d)
        if abs(d - n) < 1e-14:
            return complex(-math.inf, 0.0)
        total -= clog_gamma(d)
    for v in num:
        total += clog_gamma(v)
    return total


# ----------------------------------------------------------------------
# ----------------- HIPERGEOMÉTRICA ₂F₁ -----------------
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Hyp2F1Params:
    """Parámetros (a, b, c, z) de ₂F₁."""
    a: complex
    b: complex
    c: complex
    z: complex

    def validate(self) -> None:
        c = complex(self.c)
        n = _nearest_nonpositive_integer(c)
        if abs(c - n) < EPS_POLE and not _terminates_before(self.a, self.b, n):
            raise PoleProximity(c, n)
        z = complex(self.z)
        if abs(1.0 - z) < EPS_POLE and (complex(self.c) - self.a - self.b).real <= 0:
            raise DomainError("z", z, "|1−z| ≥ ε_pole cuando Re(c−a−b) ≤ 0 (usar hyp2f1_limit_z1)")


class Z1Limit(NamedTuple):
    value: complex
    regime: Literal["regular", "singular"]


def _nonpositive_int(v: complex, tol: float = 1e-14) -> int:
    """Retorna −n si v es el entero no positivo −n; si no, retorna 1."""
    v = complex(v)
    n = round(v.real)
    if n <= 0 and abs(v - n) < tol * max(1.0, abs(n)):
        return n
    return 1


def _terminates_before(a: complex, b: complex, c_pole: int) -> bool:
    for p in (a, b):
        n = _nonpositive_int(p)
        if n <= 0 and n > c_pole:
            return True
    return False


def _direct_series(a: complex, b: complex, c: complex, z: complex, cap: int = SERIES_CAP) -> Tuple[complex, float]:
    """Serie de Gauss. Retorna (suma, condicionamiento Σ|términos|/|suma|)."""
    term = 1.0 + 0j
    total = 1.0 + 0j
    abs_total = 1.0
    small = 0
    for n in range(cap):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
        abs_total += abs(term)
        if term == 0:
            return total, abs_total / max(abs(total), 1e-300)
        if abs(term) < SERIES_REL_TOL * abs(total):
            small += 1
            if small >= 3:
                return total, abs_total / max(abs(total), 1e-300)
        else:
            small = 0
    raise NonConvergence(cap, abs(term))


def _terminating_sum(a: complex, b: complex, c: complex, z: complex, n_max: int) -> complex:
    term = 1.0 + 0j
    total = 1.0 + 0j
    for n in range(n_max):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
    return total


def _is_integer(v: complex, tol: float = EPS_POLE) -> bool:
    v = complex(v)
    return abs(v - round(v.real)) < tol


def _connection_one_minus_z(a: complex, b: complex, c: complex, z: complex) -> Tuple[complex, float]:
    """F(a,b;c;z) vía 1−z. Requiere c−a−b no entero."""
    d = c - a - b
    if _is_integer(d):
        raise DegenerateConnection("1-z", d)
    w = 1.0 - z
    f1, k1 = _dispatch(a, b, a + b - c + 1.0, w, depth=1)
    f2, k2 = _dispatch(c - a, c - b, d + 1.0, w, depth=1)
    t1 = gamma_ratio([c, d], [c - a, c - b]) * f1
    t2 = cmath.exp(d * cmath.log(w)) * gamma_ratio([c, -d], [a, b]) * f2
    total = t1 + t2
    cond = (abs(t1) * k1 + abs(t2) * k2) / max(abs(total), 1e-300)
    return total, cond


def _connection_inverse_z(a: complex, b: complex, c: complex, z: complex) -> Tuple[complex, float]:
    """F(a,b;c;z) vía 1/z para |z| > 1 fuera del corte. Requiere a−b no entero."""
    d = a - b
    if _is_integer(d):
        raise DegenerateConnection("1/z", d)
    w = 1.0 / z
    log_mz = cmath.log(-z)
    f1, k1 = _dispatch(a, a - c + 1.0, 1.0 + d, w, depth=1)
    f2, k2 = _dispatch(b, b - c + 1.0, 1.0 - d, w, depth=1)
    t1 = gamma_ratio([c, -d], [b, c - a]) * cmath.exp(-a * log_mz) * f1
    t2 = gamma_ratio([c, d], [a, c - b]) * cmath.exp(-b * log_mz) * f2
    total = t1 + t2
    cond = (abs(t1) * k1 + abs(t2) * k2) / max(abs(total), 1e-300)
    return total, cond


def _pfaff(a: complex, b: complex, c: complex, z: complex) -> Tuple[complex, float]:
    """Transformación de Pfaff hacia w = z/(z−1)."""
    w = z / (z - 1.0)
    log_1mz = cmath.log(1.0 - z)
    if abs(a) <= abs(b):
        f, k = _dispatch(a, c - b, c, w, depth=1)
        return cmath.exp(-a * log_1mz) * f, k
    f, k = _dispatch(c - a, b, c, w, depth=1)
    return cmath.exp(-b * log_1mz) * f, k


def _taylor_step(a, b, c, z0: complex, f0: complex, d0: complex, h: complex) -> Tuple[complex, complex]:
    """
    Un paso de Taylor de la EDO hipergeométrica desde z0 hasta z0+h. La
    recurrencia se lleva sobre e_n = c_n·hⁿ, que decrece como (|h|/ρ)ⁿ con ρ
    la distancia de z0 a la singularidad más cercana.
    """
    p0 = z0 * (1.0 - z0)
    p1 = 1.0 - 2.0 * z0
    q0 = c - (a + b + 1.0) * z0
    q1 = -(a + b + 1.0)
    r = -a * b
    e_prev, e_curr = f0, d0 * h
    value = e_prev + e_curr
    deriv_h = e_curr        # h·f'(z0+h) = Σ n·e_n
    small = 0
    for n in range(0, SERIES_CAP):
        e_next = -((p1 * n + q0) * (n + 1) * h * e_curr
                   + (-n * (n - 1) + q1 * n + r) * h * h * e_prev) / (p0 * (n + 2) * (n + 1))
        value += e_next
        deriv_h += (n + 2) * e_next
        if abs(e_next) * (n + 2) < 1e-17 * max(abs(value), abs(deriv_h)) or e_next == 0:
            small += 1
            if small >= 3:
                return value, deriv_h / h
        else:
            small = 0
        e_prev, e_curr = e_curr, e_next
    raise NonConvergence(SERIES_CAP, abs(e_next))


def _continuation(a: complex, b: complex, c: complex, z: complex) -> complex:
    """
    Continuación analítica de la EDO a lo largo del rayo de 0 a z, partiendo
    de |z0| = 0.5 con la serie de Gauss. Cada paso avanza la mitad de la
    distancia a la singularidad más cercana (0 o 1). El rayo cruza el eje
    real sólo en 0, así que nunca atraviesa el corte [1, ∞).
    """
    direction = z / abs(z)
    z0 = 0.5 * direction
    f0, _ = _direct_series(a, b, c, z0)
    fp, _ = _direct_series(a + 1.0, b + 1.0, c + 1.0, z0)
    d0 = a * b / c * fp
    radius = 0.5
    target = abs(z)
    for _ in range(CONTINUATION_STEPS):
        if radius >= target:
            return f0
        reach = min(abs(z0), abs(1.0 - z0))
        new_radius = min(target, radius + 0.5 * reach)
        h = (new_radius - radius) * direction
        f0, d0 = _taylor_step(a, b, c, z0, f0, d0, h)
        radius = new_radius
        z0 = radius * direction
    raise NonConvergence(CONTINUATION_STEPS, abs(target - radius))


def _dispatch(a: complex, b: complex, c: complex, z: complex, depth: int = 0) -> Tuple[complex, float]:
    """
    Selecciona la ruta de evaluación. Retorna (valor, condicionamiento).
    Las llamadas internas (depth > 0) no vuelven a entrar en las rutas 1−z ni
    Pfaff desde el anillo 0.6 < |z| < 1; ahí se usa la continuación.
    """
    if z == 0:
        return 1.0 + 0j, 1.0
    for p in (a, b):
        n = _nonpositive_int(p)
        if n <= 0:
            return _terminating_sum(a, b, c, z, -n), 1.0
    real_z = abs(z.imag) <= 1e-15 * max(1.0, abs(z))
    az = abs(z)

    if az <= 0.6:
        value, cond = _direct_series(a, b, c, z)
        if cond <= COND_LIMIT or depth > 0 or abs(1.0 - z) >= 1.0:
            return value, cond
        try:
            alt, alt_cond = _connection_one_minus_z(a, b, c, z)
        except (DegenerateConnection, NonConvergence):
            return value, cond
        logger.debug("Serie directa mal condicionada (%.2e); ruta 1−z con %.2e.", cond, alt_cond)
        return (alt, alt_cond) if alt_cond < cond else (value, cond)

    if real_z:
        x = z.real
        if x < 0.0:
            return _pfaff(a, b, c, complex(x, 0.0))
        if x >= 1.0:
            raise DomainError("z", z, "fuera del corte [1, ∞)")
        # 0.6 < x < 1; 1−x < 0.4 cae en la serie directa
        d = c - a - b
        if abs(d - round(d.real)) > 1e-3:
            try:
                value, cond = _connection_one_minus_z(a, b, c, z)
                if cond <= COND_LIMIT:
                    return value, cond
            except NonConvergence:
                pass
        return _continuation(a, b, c, complex(x, 0.0)), 1.0

    if az > 1.0:
        if z.real < 0.5 and depth == 0:
            return _pfaff(a, b, c, z)
        try:
            value, cond = _connection_inverse_z(a, b, c, z)
            if cond <= COND_LIMIT:
                return value, cond
        except (DegenerateConnection, NonConvergence):
            pass
        return _continuation(a, b, c, z), 1.0

    # anillo 0.6 < |z| ≤ 1 fuera del eje real
    if depth == 0:
        if abs(1.0 - z) <= 0.6 and not _is_integer(c - a - b):
            try:
                value, cond = _connection_one_minus_z(a, b, c, z)
                if cond <= COND_LIMIT:
                    return value, cond
            except NonConvergence:
                pass
        elif z.real < 0.0:
            value, cond = _pfaff(a, b, c, z)
            if cond <= COND_LIMIT:
                return value, cond
    return _continuation(a, b, c, z), 1.0


def hyp2f1(p: Hyp2F1Params) -> complex:
    """₂F₁(a, b; c; z) con precisión relativa ~1e−10 en los regímenes del módulo."""
    p.validate()
    a, b, c, z = complex(p.a), complex(p.b), complex(p.c), complex(p.z)
    if abs(1.0 - z) < EPS_POLE:
        return hyp2f1_limit_z1(a, b, c).value
    value, cond = _dispatch(a, b, c, z)
    if cond > 1e8:
        logger.warning("₂F₁(%s, %s; %s; %s) con condicionamiento %.1e.", a, b, c, z, cond)
    return value


def f21(a: Number, b: Number, c: Number, z: Number) -> complex:
    """Atajo de hyp2f1 con argumentos posicionales."""
    return hyp2f1(Hyp2F1Params(complex(a), complex(b), complex(c), complex(z)))


def hyp2f1_regularized(a: Number, b: Number, c: Number, z: Number) -> complex:
    """F(a,b;c;z)/Γ(c), finita también cuando c es un entero no positivo."""
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    n = _nonpositive_int(c, tol=1e-13)
    if n <= 0:
        m = -n + 1
        coeff = 1.0 + 0j
        for k in range(m):
            coeff *= (a + k) * (b + k)
        coeff *= z ** m / math.factorial(m)
        return coeff * f21(a + m, b + m, m + 1.0, z)
    if abs(1.0 - z) < EPS_POLE:
        return crgamma(c) * hyp2f1_limit_z1(a, b, c).value
    value, _ = _dispatch(a, b, c, z)
    return crgamma(c) * value


def hyp2f1_limit_z1(a: Number, b: Number, c: Number) -> Z1Limit:
    """
    Límite z → 1⁻. Régimen regular (Re(c−a−b) > 0): el valor de Gauss
    Γ(c)Γ(c−a−b)/(Γ(c−a)Γ(c−b)). Régimen singular (Re(c−a−b) < 0): el
    coeficiente de (1−z)^{c−a−b}, Γ(c)Γ(a+b−c)/(Γ(a)Γ(b)).
    """
    a, b, c = complex(a), complex(b), complex(c)
    d = c - a - b
    if abs(d.real) < EPS_POLE:
        raise BalancedCase(d)
    for p in (a, b):
        n = _nonpositive_int(p)
        if n <= 0:
            # polinomio: el valor en z = 1 es la suma finita
            return Z1Limit(_terminating_sum(a, b, c, 1.0 + 0j, -n), "regular")
    if d.real > 0:
        return Z1Limit(gamma_ratio([c, d], [c - a, c - b]), "regular")
    return Z1Limit(gamma_ratio([c, -d], [a, b]), "singular")
