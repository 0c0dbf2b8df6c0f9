import math
from typing import Optional, List, Dict, Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# --------------------------------------------------------
# --- 1. Valores básicos ---
# --------------------------------------------------------

class ComplexOut(BaseModel):
    """Número complejo serializable (JSON no tiene tipo complejo)."""
    re: float
    im: float = 0.0

    @classmethod
    def of(cls, value: complex) -> "ComplexOut":
        value = complex(value)
        return cls(re=value.real, im=value.imag)


class ParamsIn(BaseModel):
    """Parámetros del modelo tal como llegan de la CLI o del archivo TOML."""
    gamma: float = Field(..., description="Exponente de crecimiento γ (≠ 0).")
    theta: float = Field(..., gt=0.0, description="Intensidad de dislocación θ.")

    @field_validator("gamma")
    @classmethod
    def validate_gamma(cls, v: float):
        if v == 0.0 or not math.isfinite(v):
            raise ValueError("gamma debe ser un real finito distinto de 0.")
        return v


class GridSpec(BaseModel):
    """
    Malla 'log:a:b:n' o 'lin:a:b:n' (reales) y 'line:s0:vmin:vmax:n'
    (puntos s0 + iv de una recta vertical).
    """
    kind: Literal["log", "lin", "line"]
    a: float
    b: float
    n: int = Field(..., ge=1, le=1_000_000)
    s0: Optional[float] = None

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.strip().split(":")
        try:
            if parts[0] == "line" and len(parts) == 5:
                return cls(kind="line", s0=float(parts[1]), a=float(parts[2]), b=float(parts[3]), n=int(parts[4]))
            if len(parts) != 4:
                raise ValueError
            return cls(kind=parts[0], a=float(parts[1]), b=float(parts[2]), n=int(parts[3]))
        except (ValueError, IndexError):
            raise ValueError(f"Malla inválida '{text}': use log:a:b:n, lin:a:b:n o line:s0:vmin:vmax:n.")

    @model_validator(mode="after")
    def validate_bounds(self):
        values = [self.a, self.b] + ([self.s0] if self.s0 is not None else [])
        if not all(math.isfinite(v) for v in values):
            raise ValueError("Los extremos de la malla deben ser finitos.")
        if self.kind in ("log", "lin") and (self.a <= 0 or self.b <= 0):
            raise ValueError("Los extremos de la malla deben ser estrictamente positivos.")
        if self.b < self.a:
            raise ValueError("La malla requiere a ≤ b.")
        return self

    def points(self) -> List[complex]:
        """Puntos de la malla en orden creciente."""
        if self.n == 1:
            raw = [self.a]
        elif self.kind == "log":
            la, lb = math.log(self.a), math.log(self.b)
            raw = [math.exp(la + (lb - la) * k / (self.n - 1)) for k in range(self.n)]
        else:
            raw = [self.a + (self.b - self.a) * k / (self.n - 1) for k in range(self.n)]
        if self.kind == "line":
            return [complex(self.s0, v) for v in raw]
        return [complex(v, 0.0) for v in raw]


# --------------------------------------------------------
# --- 2. Reportes de régimen y de signo ---
# --------------------------------------------------------

class RegimeReport(BaseModel):
    """Clasificación del régimen (salida del comando classify)."""
    gamma: float
    theta: float
    sigma1: ComplexOut
    sigma2: ComplexOut
    malthusian: bool
    critical: bool
    inf_phi: float
    gamma_sign: Literal[-1, 1]
    nu: Optional[float] = None
    expected_behavior: Literal["GlobalNonneg", "BlowupNoExtension", "NoLocalNonneg", "Inconclusive"]


class Bracket(BaseModel):
    """Intervalo [lo, hi] con cambio de signo certificado."""
    lo: float
    hi: float
    f_lo: float
    f_hi: float


class SignReport(BaseModel):
    """Resultado del barrido de signo de una densidad."""
    min_value: float
    argmin: float
    sign_changes: List[Bracket] = Field(default_factory=list)
    verdict: Literal["Nonnegative", "Oscillates", "Inconclusive"]
    points: int


# --------------------------------------------------------
# --- 3. Reportes de verificación ---
# --------------------------------------------------------

class CaseResult(BaseModel):
    """Un caso de una suite: valor medido frente a objetivo (o cota) con tolerancia."""
    id: str
    anchor: str = Field(..., description="Resultado matemático que respalda el caso.")
    params: Dict[str, float] = Field(default_factory=dict)
    inputs: Dict[str, Any] = Field(default_factory=dict)
    measured: Optional[float] = None
    target: Optional[float] = None
    bound: Optional[float] = None
    tol: float = 0.0
    passed: bool = Field(..., alias="pass")
    error: Optional[str] = None

    model_config = ConfigDict(populate_by_name=True)

    @model_validator(mode="after")
    def validate_pass(self):
        if self.error is not None or self.measured is None or not math.isfinite(self.measured):
            if self.passed:
                raise ValueError(f"Caso {self.id}: no puede aprobar sin un valor medido finito.")
            return self
        if self.target is not None:
            expected = abs(self.measured - self.target) <= self.tol
        elif self.bound is not None:
            expected = self.measured <= self.bound
        else:
            raise ValueError(f"Caso {self.id}: requiere target o bound.")
        if expected != self.passed:
            raise ValueError(f"Caso {self.id}: 'pass' inconsistente con measured/target/tol.")
        return self


class Environment(BaseModel):
    seed: int
    grid: Dict[str, Any] = Field(default_factory=dict)
    versions: Dict[str, str] = Field(default_factory=dict)


class VerificationReport(BaseModel):
    """Reporte serializable de una suite (JSON) con una fila por caso (CSV)."""
    suite: str
    cases: List[CaseResult] = Field(..., min_length=1)
    environment: Environment

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.cases)


# --------------------------------------------------------
# --- 4. Configuración de ejecución (Input de la CLI) ---
# --------------------------------------------------------

class RunConfig(BaseModel):
    """Configuración validada de una ejecución de la CLI."""
    command: Literal["classify", "eval-mellin", "eval-density", "moments", "suite", "scan-sign"]
    params: ParamsIn
    t: Optional[float] = Field(None, description="Tiempo para eval-density / scan-sign / eval-mellin.")
    x_grid: Optional[GridSpec] = None
    s_grid: Optional[GridSpec] = None
    kind: Literal["omega", "u", "u2", "u2-real", "oracle"] = "omega"
    r_values: List[float] = Field(default_factory=lambda: [0.5, 2.0])
    suite: Optional[Literal["mellin-core", "blowup", "nonexistence", "stitching",
                            "contour", "roundtrip", "weak-form", "large-x", "all"]] = None
    output: Optional[str] = None
    format: Optional[Literal["csv", "json"]] = None
    tolerances: Dict[str, float] = Field(default_factory=dict)
    seed: int = 12345
    nudge: bool = True

    model_config = ConfigDict(extra="forbid")

    @field_validator("x_grid", "s_grid", mode="before")
    @classmethod
    def parse_grid(cls, v):
        if isinstance(v, str):
            return GridSpec.parse(v)
        return v

    @model_validator(mode="after")
    def validate_command(self):
        gamma = self.params.gamma
        if self.t is not None and (not math.isfinite(self.t) or self.t < 0):
            raise ValueError("t debe ser un real finito no negativo.")
        if self.command in ("eval-density", "scan-sign"):
            if self.t is None:
                raise ValueError(f"{self.command} requiere --t.")
            if gamma < 0 and not (0 < -gamma * self.t < 1):
                raise ValueError("t fuera del dominio: se requiere 0 < −γt < 1 para γ < 0.")
        if self.command == "eval-density" and self.x_grid is None:
            raise ValueError("eval-density requiere --x-grid.")
        if self.x_grid is not None and self.x_grid.kind == "line":
            raise ValueError("x_grid debe ser log o lin.")
        if self.command == "eval-mellin":
            if self.s_grid is None or self.t is None:
                raise ValueError("eval-mellin requiere --t y --s-grid.")
            if self.kind in ("omega", "oracle") and (gamma < 0 or gamma * self.t >= 1):
                raise ValueError("omega requiere γ > 0 y 0 ≤ γt < 1.")
            if self.kind == "u" and (gamma < 0 or gamma * self.t <= 1):
                raise ValueError("u requiere γ > 0 y γt > 1.")
            if self.kind in ("u2", "u2-real") and (gamma > 0 or not (0 < -gamma * self.t < 1)):
                raise ValueError("u2 requiere γ < 0 y 0 < −γt < 1.")
        if self.command == "moments" and gamma < 0:
            raise ValueError("moments requiere γ > 0.")
        if self.command == "moments" and any(r <= 0 for r in self.r_values):
            raise ValueError("Los órdenes r deben ser positivos.")
        if self.command == "suite" and self.suite is None:
            raise ValueError("suite requiere --name.")
        if self.format is None:
            self.format = "json" if self.command == "suite" else "csv"
        return self
