# GFRAG/critical_gf/quadrature.py
"""
Cuadraturas sobre intervalos reales para integrandos complejos. Los paneles
finitos se delegan a scipy.integrate (Gauss–Kronrod adaptativa con
`quad_vec` y tanh-sinh para singularidades en los extremos); aquí quedan los
paneles de Gauss–Legendre y la integración de semirrectas infinitas por
paneles diádicos con aceleración de Wynn.
"""

import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .errors import QuadratureFailure, SlowDecay
from .settings import V_MAX

logger = logging.getLogger("gfrag.contorno")

Integrand = Callable[[float], complex]

# estados de quad_vec
_CONVERGED, _NOT_CONVERGED, _ROUNDING, _NOT_A_NUMBER = 0, 1, 2, 3


# ----------------------------------------------------------------------
# ----------------- GAUSS–KRONROD -----------------
# ----------------------------------------------------------------------

def adaptive_gk(f: Integrand, a: float, b: float, tol: float = 1e-12, limit: int = 4000) -> Tuple[complex, float]:
    """
    Integración adaptativa G7/K15 con control global del error (siempre se
    subdivide el panel con mayor error). Retorna (integral, error estimado).
    """
    if a == b:
        return 0j, 0.0
    value, err, info = integrate.quad_vec(f, a, b, epsabs=tol, epsrel=0.0, limit=limit,
                                          quadrature="gk15", full_output=True)
    if info.status == _NOT_A_NUMBER:
        raise QuadratureFailure(math.inf, tol)
    if info.status == _NOT_CONVERGED:
        if err > 100.0 * tol:
            raise QuadratureFailure(err, tol)
        logger.warning("Cuadratura agotó %d paneles con error %.2e (tol %.2e).", limit, err, tol)
    elif info.status == _ROUNDING:
        logger.debug("Cuadratura limitada por redondeo en [%g, %g]: error %.2e.", a, b, err)
    return complex(value), float(err)


# ----------------------------------------------------------------------
# ----------------- TANH-SINH -----------------
# ----------------------------------------------------------------------

def _elementwise(f: Integrand, a: float, b: float) -> Callable[[np.ndarray], np.ndarray]:
    # tanhsinh evalúa arreglos; los nodos que el redondeo deja sobre un extremo aportan 0
    def g(x: np.ndarray) -> np.ndarray:
        x = np.real(np.asarray(x))
        out = np.zeros(x.shape, dtype=complex)
        for idx, xi in np.ndenumerate(x):
            if a < xi < b:
                out[idx] = f(float(xi))
        return out
    return g


def tanh_sinh(f: Integrand, a: float, b: float, tol: float = 1e-12, max_level: int = 10) -> Tuple[complex, float]:
    """
    Cuadratura doble exponencial en (a, b) vía scipy.integrate.tanhsinh;
    admite singularidades integrables en los extremos. Se detiene cuando el
    error estimado es menor que tol·max(1, |integral|).
    """
    if a == b:
        return 0j, 0.0
    res = integrate.tanhsinh(_elementwise(f, a, b), a, b, atol=tol, rtol=tol, maxlevel=max_level)
    value, err = complex(res.integral), float(res.error)
    if not res.success:
        bound = 100.0 * tol * max(1.0, abs(value))
        if res.status == -2 and math.isfinite(err) and err <= bound:
            logger.warning("tanh-sinh agotó %d niveles con error %.2e (tol %.2e).", max_level, err, tol)
        else:
            raise QuadratureFailure(err if math.isfinite(err) else math.inf, tol)
    return value, err


# ----------------------------------------------------------------------
# ----------------- GAUSS–LEGENDRE POR PANELES -----------------
# ----------------------------------------------------------------------

def gauss_legendre_panels(edges: Sequence[float], order: int = 16) -> Tuple[np.ndarray, np.ndarray]:
    """Nodos y pesos compuestos de Gauss–Legendre sobre los paneles [edges[i], edges[i+1]]."""
    x, w = np.polynomial.legendre.leggauss(order)
    nodes, weights = [], []
    for left, right in zip(edges[:-1], edges[1:]):
        half = 0.5 * (right - left)
        nodes.append(half * x + 0.5 * (left + right))
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


# ----------------------------------------------------------------------
# ----------------- SEMIRRECTAS INFINITAS -----------------
# ----------------------------------------------------------------------

def wynn_epsilon(partials: Sequence[complex]) -> complex:
    """Aceleración épsilon de Wynn de una sucesión de sumas parciales."""
    row = [complex(p) for p in partials]
    prev = [0j] * (len(row) + 1)
    best = row[-1]
    k = 0
    while len(row) > 1:
        new_row = []
        for j in range(len(row) - 1):
            diff = row[j + 1] - row[j]
            if diff == 0:
                return row[j + 1]
            new_row.append(prev[j + 1] + 1.0 / diff)
        prev, row = row, new_row
        k += 1
        if k % 2 == 0 and row:
            best = row[-1]
    return best


def integrate_ray(f: Integrand, tol: float = 1e-12, v_max: float = V_MAX,
                  first: float = 1.0, period: Optional[float] = None) -> Tuple[complex, float]:
    """
    ∫_0^∞ f(τ)dτ. Paneles diádicos [L, 2L] hasta que dos paneles seguidos
    aporten menos de tol/10. Si se da `period` (integrando oscilante con
    decaimiento algebraico), se integra entre múltiplos del período y la
    sucesión de sumas parciales se acelera con épsilon de Wynn.
    Lanza SlowDecay si |τ| llega a v_max sin cumplir el criterio.
    """
    total, err = adaptive_gk(f, 0.0, first, tol / 4.0)
    left = first
    quiet = 0
    piece = total
    while left < v_max:
        right = min(2.0 * left, v_max)
        piece, e = adaptive_gk(f, left, right, tol / 4.0)
        total += piece
        err += e
        if abs(piece) <= tol / 10.0:
            quiet += 1
            if quiet >= 2:
                return total, err + abs(piece)
        else:
            quiet = 0
        left = right
        if period is not None and left >= 16.0 * period:
            return _accelerated_tail(f, total, err, left, period, tol, v_max)
    raise SlowDecay(abs(piece), v_max)


def _accelerated_tail(f: Integrand, head: complex, err: float, start: float, period: float,
                      tol: float, v_max: float) -> Tuple[complex, float]:
    # medios períodos: las sumas parciales alternan de signo
    step = 0.5 * period
    partials: List[complex] = []
    running = head
    left = start
    previous = None
    while left < v_max:
        piece, e = adaptive_gk(f, left, left + step, tol / 4.0)
        running += piece
        err += e
        partials.append(running)
        left += step
        if len(partials) >= 12:
            current = wynn_epsilon(partials[-12:])
            if previous is not None and abs(current - previous) <= tol:
                return current, err + abs(current - previous)
            previous = current
    raise SlowDecay(abs(partials[-1] - partials[-2]) if len(partials) > 1 else math.inf, v_max)
