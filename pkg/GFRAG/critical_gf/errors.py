# GFRAG/critical_gf/errors.py

from typing import Any, Optional, Tuple


# --- Definición de Errores ---

class GFragError(Exception):
    """Excepción base de la librería. Todas las demás heredan de esta."""

    def context(self) -> dict:
        """Retorna los atributos estructurados del error (para reportes JSON)."""
        return {k: _plain(v) for k, v in vars(self).items() if not k.startswith("_")}


def _plain(value: Any) -> Any:
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value


class PoleProximity(GFragError):
    """El argumento está a menos de ε_pole de un polo (o de un entero no positivo)."""

    def __init__(self, s: complex, nearest_pole: complex):
        self.s = complex(s)
        self.nearest_pole = complex(nearest_pole)
        super().__init__(f"s={s} está demasiado cerca del polo {nearest_pole}.")


class DegenerateConnection(GFragError):
    """Una fórmula de conexión requeriría el caso logarítmico (c−a−b o a−b entero)."""

    def __init__(self, route: str, defect: complex):
        self.route = route
        self.defect = complex(defect)
        super().__init__(f"Conexión degenerada en la ruta '{route}' (defecto {defect}).")


class BalancedCase(GFragError):
    """Re(c−a−b) ≈ 0: el límite z→1 no tiene régimen regular ni singular definido."""

    def __init__(self, defect: complex):
        self.defect = complex(defect)
        super().__init__(f"Caso balanceado: c−a−b = {defect}.")


class NonConvergence(GFragError):
    """Una serie no alcanzó la tolerancia dentro del tope de términos."""

    def __init__(self, terms: int, tail: float):
        self.terms = terms
        self.tail = tail
        super().__init__(f"Serie sin convergencia tras {terms} términos (cola estimada {tail:.3e}).")


class DomainError(GFragError):
    """Argumento fuera del dominio de validez de la fórmula."""

    def __init__(self, what: str, value: Any, domain: str):
        self.what = what
        self.value = value
        self.domain = domain
        super().__init__(f"{what}={value} fuera del dominio {domain}.")


class SlowDecay(GFragError):
    """El integrando no decae lo suficiente antes de |v| = V_max."""

    def __init__(self, bound: float, v_max: float):
        self.bound = bound
        self.v_max = v_max
        super().__init__(f"Cota de truncación {bound:.3e} no alcanzada con |v| ≤ {v_max:g}.")


class QuadratureFailure(GFragError):
    """La cuadratura adaptativa agotó su presupuesto sin alcanzar la tolerancia."""

    def __init__(self, estimate: float, tol: float):
        self.estimate = estimate
        self.tol = tol
        super().__init__(f"Error estimado {estimate:.3e} > tolerancia {tol:.3e}.")


class TiltViolation(GFragError):
    """La inclinación del contorno C̃ no cumple θ_tilt < π/log τ."""

    def __init__(self, theta_tilt: float, bound: float):
        self.theta_tilt = theta_tilt
        self.bound = bound
        super().__init__(f"θ_tilt={theta_tilt:.6g} no es menor que π/log τ = {bound:.6g}.")


class SeriesSwitchPoint(GFragError):
    """x cae en la banda donde ninguna de las dos series de residuos converge."""

    def __init__(self, x: float, band: Tuple[float, float]):
        self.x = x
        self.band = band
        super().__init__(f"x={x:g} dentro de la banda {band}: usar la inversión numérica.")


class InconclusiveGrid(GFragError):
    """El barrido no encontró cambio de signo y el mínimo está en la tolerancia de 0."""

    def __init__(self, min_value: float, argmin: Optional[float] = None):
        self.min_value = min_value
        self.argmin = argmin
        super().__init__(f"Barrido inconcluso: mínimo {min_value:.3e} en x={argmin}.")


class IdentityMismatch(GFragError):
    """Dos expresiones que deben coincidir difieren más que la tolerancia."""

    def __init__(self, name: str, residual: float, tol: float):
        self.name = name
        self.residual = residual
        self.tol = tol
        super().__init__(f"Identidad '{name}' violada: residuo {residual:.3e} > {tol:.1e}.")
