# GFRAG/critical_gf/verify.py
"""
Suites de verificación.

Cada caso compara un valor medido con un objetivo (|medido − objetivo| ≤ tol)
o con una cota (medido ≤ cota) y lleva el enunciado matemático que lo
respalda. Los errores de evaluación se convierten en casos fallidos: una
suite nunca se interrumpe. Los casos corren en paralelo y el reporte se
arma en el orden en que se construyeron.
"""

import itertools
import logging
import math
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence

import numpy as np
import pydantic
import scipy

from . import __version__, schemas
from .contour import contour_omega, contour_u, contour_u2
from .errors import DomainError, GFragError
from .mellin import (
    extrapolate,
    omega,
    omega_forms,
    omega_limit,
    series_oracle,
    u2,
    u2_normalized,
    u2_real,
    u_closed,
    u_sym,
)
from .model import ModelParams, phi
from .physical import (
    Bump,
    forward_mellin,
    large_x_fit,
    large_x_law,
    limit_profile,
    moment_asymptotics,
    moment_law,
    omega_measure,
    omega_profile,
    pde_residual,
    probe_brackets,
    probe_points,
    scan_solution,
    u_density,
    u_measure,
    v_tables,
    weak_form_residual,
)
from .settings import DEFAULT_SEED, load_settings

logger = logging.getLogger("gfrag.verificacion")

SUITE_ORDER = ("mellin-core", "blowup", "nonexistence", "stitching", "contour", "roundtrip", "weak-form", "large-x")

TOLERANCES: Dict[str, float] = {
    "functional": 1e-5,
    "oracle": 1e-9,
    "two-forms": 1e-9,
    "conservation": 1e-8,
    "initial": 1e-12,
    "moment": 0.01,
    "continuity": 1e-4,
    "profile": 1e-4,
    "junction": 1e-5,
    "cancellation": 10.0,
    "contour": 1e-6,
    "roundtrip": 1e-6,
    "weak-form": 1e-5,
    "pde": 1e-5,
    "slope": 0.02,
    "phase": 0.05,
    "coefficient": 1e-2,
    "control": 1e-8,
    "literal": 1e-12,
}

# --- Enunciados que respaldan cada tipo de caso ---
ANCHORS = {
    "functional": "∂ₜW(t,s) = Φ(s)·W(t,s+γ)",
    "oracle": "W(t,s) = Σ tⁿ/n!·∏_{j<n} Φ(s+jγ) para |γt| < 1",
    "two-forms": "Ω = (1−γt)^{(2−s)/γ}·F(σ₁/γ, σ₂/γ; s/γ; γt) (transformación de Euler)",
    "conservation": "Φ(σᵢ) = 0 ⇒ ℳ_u(t,σᵢ) = 1",
    "initial": "W(0,s) = 1",
    "MomentBlowup": "∫x^r u(t,x)dx ~ Γ((r+1)/γ)Γ((r−1)/γ)/(Γ((r+1−σ₁)/γ)Γ((r+1−σ₂)/γ))·(1−γt)^{−(r−1)/γ}, r > 1",
    "LogMoment": "∫x u(t,x)dx ~ −Γ(2/γ)/(Γ(σ₁/γ)Γ(σ₂/γ))·log(1−γt)",
    "SubcriticalMoment": "∫x^r u(t,x)dx → Ω(1/γ, r+1), r < 1",
    "oscillation": "θ > 1: la solución cambia de signo (no existe extensión no negativa)",
    "probe": "v(t,x) ~ x^{−Re σ₂−γ}(h₁cos(ζ log x) + h₂sin(ζ log x)) para x → 0",
    "control": "θ < 1: la solución es no negativa",
    "continuity": "w(t) = u(t) para t < 1/γ y w(t) = ω(t) para t > 1/γ, continua en t = 1/γ",
    "profile": "w(1/γ,x) = γΓ(2/γ)/(Γ(σ₁/γ)Γ(σ₂/γ))·(1+x^γ)^{−2/γ}",
    "junction": "lím U(t,s) = lím Ω(t,s) = Γ(s/γ)Γ((2−s)/γ)/(Γ(σ₁/γ)Γ(σ₂/γ)) en t = 1/γ, Re s < 2",
    "cancellation": "Los residuos de Ω₁ y Ω₂ en s = 0 se cancelan: U₂ es analítica en 0",
    "contour-u": "Representación integral de U sobre el camino 𝒞 = forma cerrada, γt > 1",
    "contour-omega": "Representación integral de Ω (camino abierto a la derecha) = forma hipergeométrica",
    "contour-u2": "Representación integral de U₂ sobre C̃ = Ω₁ − Ω₂",
    "roundtrip-u": "ℳ_u(t) = Ω(t)",
    "roundtrip-omega": "ℳ_ω(t) = Re U(t)",
    "roundtrip-v": "ℳ_v(t) = Re(−2πi·U₂(t))",
    "weak-form": "∫∫ w(φₜ + x^{γ+1}φₓ − x^γφ) + θ∫∫ w(t,y)y^{γ−1}∫_0^y φ(t,x)dx dy dt = 0",
    "pde": "∂ₜω + ∂ₓ(x^{γ+1}ω) + x^γω = θ∫_x^∞ ω(t,y)y^{γ−1}dy",
    "slope": "ω(t,x) = A(t)x^{−σ₂−γ}(H(t) + o(1)) para x → ∞",
    "coefficient": "x^{σ₂+γ}ω(t,x) → A(t)H(t) para x → ∞",
    "literal": "Valor exacto conocido",
}

# --- Mallas por defecto ---
OMEGA_S = (0.37, 0.81, 1.23, 1.77, 2.41, 3.13, complex(0.6, 0.9), complex(1.4, -1.3),
           complex(2.2, 2.5), complex(4.05, 0.5))
STRIP_FRACTIONS = (0.074, 0.274, 0.474, 0.674, 0.874)
U_GT = (1.2, 1.5, 2.0, 3.0, 5.0)
STITCH_X = tuple(float(x) for x in np.logspace(-2.0, 2.0, 50))
STITCH_DELTA = 1e-3
JUNCTION_S = (0.5, 0.8, 1.0)
JUNCTION_LADDER = tuple(range(6, 14))
CONTROL_THETA = 0.75
ROUNDTRIP_DRAWS = 20
U_BUMPS = ((0.1, 0.5, 0.2, 1.0), (0.1, 0.5, 0.5, 3.0), (0.2, 0.8, 0.05, 0.6),
           (0.3, 0.9, 1.0, 4.0), (0.05, 0.4, 0.8, 2.5))
V_WINDOWS = ((0.1, 0.3), (0.15, 0.35), (0.2, 0.4))

DEFAULT_GRIDS: Dict[str, List[ModelParams]] = {
    "mellin-core": [ModelParams(g, th) for g, th in itertools.product((0.5, 1.0, 2.0), (0.5, 0.75, 1.0, 2.0, 4.0))],
    "blowup": [ModelParams(1.0, 0.75), ModelParams(1.0, 2.0), ModelParams(0.5, 0.75), ModelParams(1.5, 4.0)],
    "nonexistence": [ModelParams(1.0, 2.0), ModelParams(-1.0, 2.0)],
    "stitching": [ModelParams(1.0, 0.75), ModelParams(1.0, 2.0), ModelParams(0.5, 0.75),
                  ModelParams(-1.0, 0.75), ModelParams(-1.0, 2.0)],
    "contour": [ModelParams(g, th) for g, th in itertools.product((0.5, 1.0, 2.0), (0.75, 2.0))]
    + [ModelParams(-1.0, 0.75), ModelParams(-1.0, 2.0), ModelParams(-0.5, 2.0)],
    "roundtrip": [ModelParams(1.0, 0.75), ModelParams(2.0, 2.0), ModelParams(-1.0, 2.0)],
    "weak-form": [ModelParams(1.0, 0.75), ModelParams(1.0, 2.0), ModelParams(-1.0, 2.0)],
    "large-x": [ModelParams(1.0, 0.75), ModelParams(1.0, 2.0), ModelParams(0.5, 0.75)],
}

# precondición de cada suite sobre (γ, θ)
APPLIES: Dict[str, Callable[[ModelParams], bool]] = {
    "mellin-core": lambda p: True,
    "blowup": lambda p: p.gamma > 0,
    "nonexistence": lambda p: p.theta > 1.0 and not p.critical,
    "stitching": lambda p: p.gamma < 2.0,
    "contour": lambda p: True,
    "roundtrip": lambda p: True,
    "weak-form": lambda p: True,
    "large-x": lambda p: p.gamma > 0,
}


# ----------------------------------------------------------------------
# ----------------- CASOS -----------------
# ----------------------------------------------------------------------

class Measurement(NamedTuple):
    """Resultado de evaluar un caso. `target` activa el modo objetivo; `tol` reemplaza la del caso."""
    measured: float
    target: Optional[float] = None
    tol: Optional[float] = None
    details: Optional[Dict[str, Any]] = None


@dataclass(frozen=True)
class CaseSpec:
    id: str
    anchor: str
    params: Optional[ModelParams]
    inputs: Dict[str, Any]
    evaluate: Callable[[], Measurement]
    tol: float = 0.0
    bound: Optional[float] = None


@dataclass
class SuiteOptions:
    tolerances: Dict[str, float] = field(default_factory=lambda: dict(TOLERANCES))
    seed: int = DEFAULT_SEED
    r_values: Sequence[float] = (0.5, 1.0, 2.0)

    def tol(self, key: str) -> float:
        return self.tolerances[key]


def _c(z: complex) -> List[float]:
    z = complex(z)
    return [z.real, z.imag]


def _fmt(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}i"


def _case_id(suite: str, params: Optional[ModelParams], *parts: str) -> str:
    head = [suite] + ([f"g={params.gamma:g}", f"th={params.theta:g}"] if params is not None else [])
    return ":".join(head + list(parts))


def _params_dict(params: Optional[ModelParams]) -> Dict[str, float]:
    return {} if params is None else {"gamma": params.gamma, "theta": params.theta}


def _rel(value: complex, reference: complex) -> float:
    """Error relativo respecto de |reference|; el piso sólo evita dividir por cero."""
    return abs(complex(value) - complex(reference)) / max(abs(complex(reference)), 1e-300)


def run_case(spec: CaseSpec) -> schemas.CaseResult:
    """Evalúa un caso; cualquier error de evaluación produce un caso fallido con su contexto."""
    base = dict(id=spec.id, anchor=spec.anchor, params=_params_dict(spec.params), inputs=dict(spec.inputs))
    try:
        m = spec.evaluate()
    except (GFragError, ArithmeticError, ValueError) as e:
        logger.warning("Caso %s falló con %s: %s", spec.id, type(e).__name__, e)
        if isinstance(e, GFragError):
            base["inputs"]["error_context"] = e.context()
        return schemas.CaseResult(**base, tol=spec.tol, bound=spec.bound if spec.bound is not None else spec.tol,
                                  passed=False, error=f"{type(e).__name__}: {e}")
    base["inputs"].update(m.details or {})
    tol = spec.tol if m.tol is None else m.tol
    bound = None if m.target is not None else (spec.bound if spec.bound is not None else tol)
    measured = float(m.measured)
    if not math.isfinite(measured):
        logger.warning("Caso %s: valor medido no finito.", spec.id)
        return schemas.CaseResult(**base, target=m.target, bound=bound, tol=tol, passed=False,
                                  error="Valor medido no finito.")
    passed = abs(measured - m.target) <= tol if m.target is not None else measured <= bound
    if not passed:
        logger.info("Caso %s no aprobó: medido %.6g.", spec.id, measured)
    return schemas.CaseResult(**base, measured=measured, target=m.target, bound=bound, tol=tol, passed=passed)


# ----------------------------------------------------------------------
# ----------------- mellin-core -----------------
# ----------------------------------------------------------------------

def _functional(W: Callable[[float, complex], complex], params: ModelParams, t: float, s: complex,
                h: float) -> Measurement:
    derivative = (W(t + h, s) - W(t - h, s)) / (2.0 * h)
    rhs = phi(params, s) * W(t, s + params.gamma)
    return Measurement(_rel(derivative, rhs), details={"h": h})


def _oracle(params: ModelParams, t: float, s: complex) -> Measurement:
    oracle = series_oracle(params, t, s)
    return Measurement(_rel(omega(params, t, s), oracle.value), details={"terms": oracle.terms})


def _two_forms(params: ModelParams, t: float, s: complex) -> Measurement:
    direct, euler = omega_forms(params, t, s)
    return Measurement(_rel(direct, euler))


def _distance_to_one(W: Callable[[], complex]) -> Measurement:
    return Measurement(abs(W() - 1.0))


def _build_mellin_core(grid: Sequence[ModelParams], opts: SuiteOptions) -> List[CaseSpec]:
    specs: List[CaseSpec] = []
    for params in grid:
        g = params.gamma
        case = partial(_case_id, "mellin-core", params)
        if g > 0:
            W = partial(omega, params)
            for k in range(1, 11):
                t = 0.08 * k / g
                h = 1e-4 * min(t, 1.0 / g - t)
                for s in OMEGA_S:
                    inputs = {"t": t, "s": _c(s)}
                    specs.append(CaseSpec(case("Omega", f"t={t:.6g}", f"s={_fmt(s)}", "functional"),
                                          ANCHORS["functional"], params, inputs,
                                          partial(_functional, W, params, t, s, h), opts.tol("functional")))
                    specs.append(CaseSpec(case("Omega", f"t={t:.6g}", f"s={_fmt(s)}", "oracle"),
                                          ANCHORS["oracle"], params, inputs,
                                          partial(_oracle, params, t, s), opts.tol("oracle")))
                    specs.append(CaseSpec(case("Omega", f"t={t:.6g}", f"s={_fmt(s)}", "two-forms"),
                                          ANCHORS["two-forms"], params, inputs,
                                          partial(_two_forms, params, t, s), opts.tol("two-forms")))
                for ell in (1, 2):
                    sigma = params.sigma(ell)
                    specs.append(CaseSpec(case("Omega", f"t={t:.6g}", f"sigma{ell}", "conservation"),
                                          ANCHORS["conservation"], params, {"t": t, "s": _c(sigma)},
                                          partial(_distance_to_one, partial(omega, params, t, sigma)),
                                          opts.tol("conservation")))
            specs.append(CaseSpec(case("Omega", "t=0", "initial"), ANCHORS["initial"], params,
                                  {"t": 0.0, "s": _c(OMEGA_S[0])},
                                  partial(_distance_to_one, partial(omega, params, 0.0, OMEGA_S[0])),
                                  opts.tol("initial")))
            upper = params.sigma2.real + g
            u_points = [f * upper for f in STRIP_FRACTIONS] + [complex(0.3 * upper, 0.7), complex(0.6 * upper, -1.1)]
            W_u = partial(u_closed, params)
            for gt in U_GT:
                t = gt / g
                h = 1e-4 * (t - 1.0 / g)
                for s in u_points:
                    specs.append(CaseSpec(case("U", f"t={t:.6g}", f"s={_fmt(s)}", "functional"),
                                          ANCHORS["functional"], params, {"t": t, "s": _c(s)},
                                          partial(_functional, W_u, params, t, s, h), opts.tol("functional")))
        else:
            T = -1.0 / g
            lower = params.sigma2.real + g
            u2_points = [lower + d for d in (0.37, 0.81, 1.23, 1.77, 2.41)] \
                + [complex(lower + 0.6, 0.9), complex(lower + 1.4, -1.3)]
            W_2 = partial(u2, params)
            for k in range(1, 11):
                t = 0.08 * k * T
                h = 1e-4 * min(t, T - t)
                for s in u2_points:
                    specs.append(CaseSpec(case("U2", f"t={t:.6g}", f"s={_fmt(s)}", "functional"),
                                          ANCHORS["functional"], params, {"t": t, "s": _c(s)},
                                          partial(_functional, W_2, params, t, s, h), opts.tol("functional")))
            specs.append(CaseSpec(case("U2", "t=0", "initial"), ANCHORS["initial"], params,
                                  {"t": 0.0, "s": _c(u2_points[0])},
                                  partial(_distance_to_one, partial(u2_normalized, params, 0.0, u2_points[0])),
                                  opts.tol("initial")))
    return specs


# ----------------------------------------------------------------------
# ----------------- blowup -----------------
# ----------------------------------------------------------------------

BLOWUP_LITERALS = (
    (1.0, 0.75, 2.0, 16.0 / (3.0 * math.pi)),
    (1.0, 0.75, 0.5, 1.0),
    (1.0, 2.0, 1.0, math.sinh(math.pi) / math.pi),
)


def _moment(params: ModelParams, r: float, rel_tol: float, literal: Optional[float] = None) -> Measurement:
    check = moment_asymptotics(params, r)
    target = check.target if literal is None else literal
    details = {"law": check.law.kind, "times": check.times, "scaled": check.scaled, "law_target": check.target}
    return Measurement(check.limit, target=target, tol=rel_tol * abs(target), details=details)


def _build_blowup(grid: Sequence[ModelParams], opts: SuiteOptions) -> List[CaseSpec]:
    specs: List[CaseSpec] = []
    for params in grid:
        for r in opts.r_values:
            kind = moment_law(params, r).kind
            specs.append(CaseSpec(_case_id("blowup", params, f"r={r:g}"), ANCHORS[kind], params, {"r": r},
                                  partial(_moment, params, r, opts.tol("moment")), opts.tol("moment")))
    for g, th, r, value in BLOWUP_LITERALS:
        params = ModelParams(g, th)
        kind = moment_law(params, r).kind
        specs.append(CaseSpec(_case_id("blowup", params, f"r={r:g}", "literal"), ANCHORS[kind], params,
                              {"r": r}, partial(_moment, params, r, opts.tol("moment"), value), opts.tol("moment")))
    return specs


# ----------------------------------------------------------------------
# ----------------- nonexistence -----------------
# ----------------------------------------------------------------------

def _scan_details(report: schemas.SignReport) -> Dict[str, Any]:
    return {
        "verdict": report.verdict,
        "min_value": report.min_value,
        "argmin": report.argmin,
        "points": report.points,
        "brackets": [b.model_dump() for b in report.sign_changes[:8]],
    }


def _oscillation(params: ModelParams, t: float) -> Measurement:
    # conteo negado de cambios de signo certificados: aprueba con al menos uno
    report = scan_solution(params, t)
    return Measurement(-float(len(report.sign_changes)), details=_scan_details(report))


def _probe(params: ModelParams, t: float) -> Measurement:
    x_lo = math.exp(-13.5 * math.pi / params.zeta)
    probes = probe_points(params, x_lo, 0.99 * params.x_star(t))
    brackets = probe_brackets(v_tables(params, t), probes)
    details = {"probes": probes, "brackets": [b.model_dump() for b in brackets]}
    return Measurement(-float(len(brackets)), details=details)


def _control(params: ModelParams, t: float) -> Measurement:
    report = scan_solution(params, t)
    return Measurement(-report.min_value, details=_scan_details(report))


def _build_nonexistence(grid: Sequence[ModelParams], opts: SuiteOptions) -> List[CaseSpec]:
    specs: List[CaseSpec] = []
    for params in grid:
        g = params.gamma
        times = (1.25 / g, 2.0 / g) if g > 0 else tuple(f / -g for f in (0.25, 0.3, 0.5))
        control = ModelParams(g, CONTROL_THETA)
        for t in times:
            specs.append(CaseSpec(_case_id("nonexistence", params, f"t={t:.6g}", "scan"), ANCHORS["oscillation"],
                                  params, {"t": t}, partial(_oscillation, params, t), bound=-1.0))
            if g < 0:
                specs.append(CaseSpec(_case_id("nonexistence", params, f"t={t:.6g}", "probe"), ANCHORS["probe"],
                                      params, {"t": t}, partial(_probe, params, t), bound=-1.0))
            specs.append(CaseSpec(_case_id("nonexistence", control, f"t={t:.6g}", "control"), ANCHORS["control"],
                                  control, {"t": t}, partial(_control, control, t), opts.tol("control")))
    return specs


# ----------------------------------------------------------------------
# ----------------- stitching -----------------
# ----------------------------------------------------------------------

def _w_profile(params: ModelParams, t: float, xs: Sequence[float]) -> np.ndarray:
    if params.gamma * t < 1:
        return np.array([u_density(params, t, float(x)) for x in xs])
    return omega_profile(params, t, xs)


def _two_sided(params: ModelParams) -> Dict[int, np.ndarray]:
    T = 1.0 / params.gamma
    return {k: _w_profile(params, T + k * STITCH_DELTA, STITCH_X) for k in (-2, -1, 1, 2)}


def _continuity(params: ModelParams) -> Measurement:
    """
    Estimador de salto 2(w⁺−w⁻) − (w⁺⁺−w⁻⁻): se anula a orden δ³ si w es
    suave en t = 1/γ y vale −J ante un salto J.
    """
    w = _two_sided(params)
    jump = 2.0 * (w[1] - w[-1]) - (w[2] - w[-2])
    k = int(np.argmax(np.abs(jump)))
    raw = float(np.max(np.abs(w[1] - w[-1])))
    return Measurement(float(np.abs(jump[k])), details={"argmax": STITCH_X[k], "raw_difference": raw,
                                                         "delta": STITCH_DELTA})


def _profile_match(params: ModelParams) -> Measurement:
    w = _two_sided(params)
    mean = 0.5 * (w[1] + w[-1])
    profile = np.array([limit_profile(params, x) for x in STITCH_X])
    k = int(np.argmax(np.abs(mean - profile)))
    return Measurement(float(abs(mean[k] - profile[k])), details={"argmax": STITCH_X[k]})


def _junction_limit(f: Callable[[float], complex], gamma: float, s: float, side: int) -> complex:
    """
    Límite de f en t → 1/γ desde la izquierda (side=−1) o la derecha (+1).
    Con ε = |1−γt| y q = (2−s)/γ las correcciones son ε^n y ε^{q+n}
    (más ε^p·log ε si q es entero).
    """
    q = (2.0 - s) / gamma
    eps = [2.0 ** (-k) for k in JUNCTION_LADDER]
    values = [f((1.0 + side * e) / gamma) for e in eps]
    exponents = sorted({round(p, 9) for p in (1.0, 2.0, 3.0, q, q + 1.0, q + 2.0) if p <= 3.5})
    basis = [[e ** p for e in eps] for p in exponents]
    if abs(q - round(q)) < 1e-9:
        basis += [[e ** p * math.log(e) for e in eps] for p in exponents if p >= q - 1e-9]
    return extrapolate(values, basis)


def _junction(params: ModelParams, s: float) -> Measurement:
    g = params.gamma
    target = omega_limit(params, s)
    left = _junction_limit(lambda t: omega(params, t, s, check=False), g, s, -1)
    right = _junction_limit(lambda t: u_closed(params, t, s), g, s, 1)
    details = {"omega_limit": _c(left), "u_limit": _c(right), "target": _c(target)}
    return Measurement(max(abs(left - target), abs(right - target)), details=details)


def _cancellation(params: ModelParams, t: float) -> Measurement:
    def circle_max(radius: float) -> float:
        return max(abs(u2(params, t, radius * complex(math.cos(a), math.sin(a))))
                   for a in (2.0 * math.pi * (k + 0.5) / 16 for k in range(16)))

    near, far = circle_max(0.01), circle_max(0.1)
    return Measurement(near / far, details={"max_r0.01": near, "max_r0.1": far})


def _literal(value: Callable[[], float], target: float) -> Measurement:
    return Measurement(value(), target=target)


def _build_stitching(grid: Sequence[ModelParams], opts: SuiteOptions) -> List[CaseSpec]:
    specs: List[CaseSpec] = []
    x_spec = {"x_grid": "log:0.01:100:50", "delta": STITCH_DELTA}
    for params in grid:
        g = params.gamma
        if g > 0:
            specs.append(CaseSpec(_case_id("stitching", params, "continuity"), ANCHORS["continuity"], params,
                                  dict(x_spec), partial(_continuity, params), opts.tol("continuity")))
            specs.append(CaseSpec(_case_id("stitching", params, "profile"), ANCHORS["profile"], params,
                                  dict(x_spec), partial(_profile_match, params), opts.tol("profile")))
            for s in JUNCTION_S:
                if s >= min(2.0, params.sigma2.real + g):
                    continue
                specs.append(CaseSpec(_case_id("stitching", params, f"s={s:g}", "junction"), ANCHORS["junction"],
                                      params, {"s": s, "ladder": list(JUNCTION_LADDER)},
                                      partial(_junction, params, s), opts.tol("junction")))
        else:
            t = 0.3 / -g
            specs.append(CaseSpec(_case_id("stitching", params, f"t={t:.6g}", "cancellation"),
                                  ANCHORS["cancellation"], params, {"t": t, "radii": [0.01, 0.1]},
                                  partial(_cancellation, params, t), opts.tol("cancellation")))
    critical = ModelParams(2.0, 1.0)
    specs.append(CaseSpec(_case_id("stitching", critical, "x=0", "literal"), ANCHORS["profile"], critical,
                          {"x": 0.0}, partial(_literal, partial(limit_profile, critical, 0.0), 2.0 / math.pi),
                          opts.tol("literal")))
    return specs


# ----------------------------------------------------------------------
# ----------------- contour -----------------
# ----------------------------------------------------------------------

def _agreement(numeric: Callable[[], complex], closed: Callable[[], complex]) -> Measurement:
    a, b = numeric(), closed()
    return Measurement(_rel(a, b), details={"contour": _c(a), "closed_form": _c(b)})


def _build_contour(grid: Sequence[ModelParams], opts: SuiteOptions) -> List[CaseSpec]:
    specs: List[CaseSpec] = []
    tol = opts.tol("contour")
    for params in grid:
        g = params.gamma
        case = partial(_case_id, "contour", params)
        if g > 0:
            upper = params.sigma2.real + g
            for gt in (1.2, 2.0):
                t = gt / g
                for s in (0.3 * upper, complex(0.6 * upper, 0.5)):
                    specs.append(CaseSpec(case("U", f"t={t:.6g}", f"s={_fmt(s)}"), ANCHORS["contour-u"], params,
                                          {"t": t, "s": _c(s)},
                                          partial(_agreement, partial(contour_u, params, t, s),
                                                  partial(u_closed, params, t, s)), tol))
            for gt in (0.3, 0.7):
                t = gt / g
                s = complex(0.9, 0.4)
                specs.append(CaseSpec(case("Omega", f"t={t:.6g}", f"s={_fmt(s)}"), ANCHORS["contour-omega"], params,
                                      {"t": t, "s": _c(s)},
                                      partial(_agreement, partial(contour_omega, params, t, s),
                                              partial(omega, params, t, s)), tol))
        else:
            lower = params.sigma2.real + g
            for gx in (0.3, 0.6):
                t = gx / -g
                for s in (lower + 0.45, complex(lower + 0.9, 0.6)):
                    specs.append(CaseSpec(case("U2", f"t={t:.6g}", f"s={_fmt(s)}"), ANCHORS["contour-u2"], params,
                                          {"t": t, "s": _c(s)},
                                          partial(_agreement, partial(contour_u2, params, t, s),
                                                  partial(u2, params, t, s)), tol))
    return specs


# ----------------------------------------------------------------------
# ----------------- roundtrip -----------------
# ----------------------------------------------------------------------

def _build_roundtrip(grid: Sequence[ModelParams], opts: SuiteOptions) -> List[CaseSpec]:
    specs: List[CaseSpec] = []
    rng = np.random.default_rng(opts.seed)
    tol = opts.tol("roundtrip")
    for params in grid:
        g = params.gamma
        case = partial(_case_id, "roundtrip", params)
        if g > 0:
            for k in range(ROUNDTRIP_DRAWS):
                t = float(rng.uniform(0.05, 0.9)) / g
                s = complex(rng.uniform(0.3, 3.0), rng.uniform(-2.0, 2.0))
                specs.append(CaseSpec(case("u", f"draw={k}"), ANCHORS["roundtrip-u"], params, {"t": t, "s": _c(s)},
                                      partial(_agreement, lambda t=t, s=s: forward_mellin(u_measure(params, t), s),
                                              partial(omega, params, t, s)), tol))
            for t in np.linspace(0.0, 0.9 / g, 5):
                t = float(t)
                for ell in (1, 2):
                    sigma = params.sigma(ell)
                    specs.append(CaseSpec(case("u", f"t={t:.6g}", f"sigma{ell}"), ANCHORS["conservation"], params,
                                          {"t": t, "s": _c(sigma)},
                                          partial(_distance_to_one,
                                                  lambda t=t, sigma=sigma: forward_mellin(u_measure(params, t), sigma)),
                                          opts.tol("conservation")))
            upper = params.sigma2.real + g
            for k in range(5):
                t = float(rng.uniform(1.3, 2.5)) / g
                s = complex(rng.uniform(0.2, 0.8) * upper, rng.uniform(-1.0, 1.0))
                specs.append(CaseSpec(case("omega", f"draw={k}"), ANCHORS["roundtrip-omega"], params,
                                      {"t": t, "s": _c(s)},
                                      partial(_agreement, lambda t=t, s=s: forward_mellin(omega_measure(params, t), s),
                                              partial(u_sym, params, t, s)), tol))
        else:
            lower = params.sigma2.real + g
            for k in range(ROUNDTRIP_DRAWS):
                t = float(rng.uniform(0.1, 0.8)) / -g
                s = complex(lower + rng.uniform(0.3, 2.0), rng.uniform(-1.0, 1.0))
                specs.append(CaseSpec(case("v", f"draw={k}"), ANCHORS["roundtrip-v"], params, {"t": t, "s": _c(s)},
                                      partial(_agreement, lambda t=t, s=s: forward_mellin(v_tables(params, t).measure(), s),
                                              partial(u2_real, params, t, s)), tol))
    return specs


# ----------------------------------------------------------------------
# ----------------- weak-form -----------------
# ----------------------------------------------------------------------

def _weak(params: ModelParams, bump: Bump) -> Measurement:
    result = weak_form_residual(params, bump)
    return Measurement(result.relative, details={"residual": result.residual, "scale": result.scale,
                                                 "parts": list(result.parts)})


def _pde(params: ModelParams, t: float, x: float) -> Measurement:
    result = pde_residual(params, t, x)
    return Measurement(result.relative, details={"residual": result.residual, "parts": list(result.parts)})


def _bumps(params: ModelParams) -> List[Bump]:
    """Cinco funciones test por régimen, lejos de la banda de inversión de ω y de x*(t) para v."""
    g = params.gamma
    if g > 0:
        T = 1.0 / g
        bumps = [Bump(t0 * T, t1 * T, a, b) for t0, t1, a, b in U_BUMPS]
        # banda de ω para γt ∈ [1.5, 2.5] ⊂ [2.5^{−1/γ}, 2^{1/γ}]
        lo, hi = 2.5 ** (-1.0 / g), 2.0 ** (1.0 / g)
        bumps += [Bump(1.5 * T, 2.5 * T, 0.05 * lo, 0.8 * lo), Bump(1.6 * T, 2.2 * T, 0.2 * lo, 0.9 * lo),
                  Bump(1.5 * T, 2.5 * T, 1.2 * hi, 4.0 * hi), Bump(1.6 * T, 2.2 * T, 1.5 * hi, 10.0 * hi),
                  Bump(1.8 * T, 2.4 * T, 2.0 * hi, 5.0 * hi)]
        return bumps
    T = -1.0 / g
    (a0, a1), (b0, b1), (c0, c1) = [(t0 * T, t1 * T) for t0, t1 in V_WINDOWS]
    return [
        Bump(a0, a1, 0.1 * params.x_star(a0), 0.8 * params.x_star(a0)),
        Bump(b0, b1, 0.3 * params.x_star(b0), 0.9 * params.x_star(b0)),
        Bump(a0, a1, 1.2 * params.x_star(a1), 0.95 * params.x_atom(a0)),
        Bump(b0, b1, 1.1 * params.x_star(b1), 1.2 * params.x_atom(b1)),
        Bump(c0, c1, 1.5 * params.x_star(c1), 1.1 * params.x_atom(c1)),
    ]


def _build_weak_form(grid: Sequence[ModelParams], opts: SuiteOptions) -> List[CaseSpec]:
    specs: List[CaseSpec] = []
    for params in grid:
        for k, bump in enumerate(_bumps(params)):
            regime = "v" if params.gamma < 0 else ("u" if bump.t1 * params.gamma < 1 else "omega")
            inputs = {"t0": bump.t0, "t1": bump.t1, "a": bump.a, "b": bump.b}
            specs.append(CaseSpec(_case_id("weak-form", params, regime, f"bump={k}"), ANCHORS["weak-form"], params,
                                  inputs, partial(_weak, params, bump), opts.tol("weak-form")))
        if params.gamma > 0:
            g = params.gamma
            t = 2.0 / g
            for x in (0.2 * 2.0 ** (-1.0 / g), 3.0):
                specs.append(CaseSpec(_case_id("weak-form", params, "omega", f"x={x:.6g}", "pde"), ANCHORS["pde"],
                                      params, {"t": t, "x": x}, partial(_pde, params, t, x), opts.tol("pde")))
    return specs


# ----------------------------------------------------------------------
# ----------------- large-x -----------------
# ----------------------------------------------------------------------

def _slope(params: ModelParams, t: float) -> Measurement:
    fit = large_x_fit(params, t)
    return Measurement(abs(fit.slope - fit.expected_slope),
                       details={"slope": fit.slope, "expected_slope": fit.expected_slope, "x_range": [1e2, 1e4]})


def _phase(params: ModelParams, t: float) -> Measurement:
    fit = large_x_fit(params, t)
    return Measurement(fit.phase_error, details={"slope": fit.slope})


def _coefficient(params: ModelParams, t: float, x: float) -> Measurement:
    law = large_x_law(params, t).constants
    lead = law["A"] * law["H"]
    scaled = omega_profile(params, t, [x])[0] * x ** (params.sigma2.real + params.gamma)
    return Measurement(abs(scaled / lead.real - 1.0), details={"AH": _c(lead), "x": x})


def _build_large_x(grid: Sequence[ModelParams], opts: SuiteOptions) -> List[CaseSpec]:
    specs: List[CaseSpec] = []
    for params in grid:
        t = 2.0 / params.gamma
        specs.append(CaseSpec(_case_id("large-x", params, f"t={t:.6g}", "slope"), ANCHORS["slope"], params,
                              {"t": t}, partial(_slope, params, t), opts.tol("slope")))
        if params.zeta > 0:
            specs.append(CaseSpec(_case_id("large-x", params, f"t={t:.6g}", "phase"), ANCHORS["slope"], params,
                                  {"t": t}, partial(_phase, params, t), opts.tol("phase")))
        else:
            specs.append(CaseSpec(_case_id("large-x", params, f"t={t:.6g}", "coefficient"), ANCHORS["coefficient"],
                                  params, {"t": t, "x": 1e4}, partial(_coefficient, params, t, 1e4),
                                  opts.tol("coefficient")))
    return specs


BUILDERS: Dict[str, Callable[[Sequence[ModelParams], SuiteOptions], List[CaseSpec]]] = {
    "mellin-core": _build_mellin_core,
    "blowup": _build_blowup,
    "nonexistence": _build_nonexistence,
    "stitching": _build_stitching,
    "contour": _build_contour,
    "roundtrip": _build_roundtrip,
    "weak-form": _build_weak_form,
    "large-x": _build_large_x,
}


# ----------------------------------------------------------------------
# ----------------- EJECUCIÓN -----------------
# ----------------------------------------------------------------------

def build_cases(name: str, params_grid: Optional[Sequence[ModelParams]] = None,
                opts: Optional[SuiteOptions] = None) -> List[CaseSpec]:
    """Casos de una suite (o de todas con name='all'), en orden determinista."""
    opts = opts or SuiteOptions()
    if name == "all":
        specs: List[CaseSpec] = []
        for suite in SUITE_ORDER:
            grid = DEFAULT_GRIDS[suite] if params_grid is None else [p for p in params_grid if APPLIES[suite](p)]
            if not grid:
                logger.info("Suite %s omitida: ningún parámetro cumple su precondición.", suite)
                continue
            specs.extend(BUILDERS[suite](grid, opts))
        return specs
    if name not in BUILDERS:
        raise DomainError("suite", name, "|".join(SUITE_ORDER + ("all",)))
    grid = DEFAULT_GRIDS[name] if params_grid is None else list(params_grid)
    rejected = [p for p in grid if not APPLIES[name](p)]
    if rejected:
        raise DomainError("params", [(p.gamma, p.theta) for p in rejected], f"precondición de la suite {name}")
    return BUILDERS[name](grid, opts)


def environment(params_grid: Optional[Sequence[ModelParams]], opts: SuiteOptions) -> schemas.Environment:
    grid = {
        "params": None if params_grid is None else [[p.gamma, p.theta] for p in params_grid],
        "tolerances": dict(sorted(opts.tolerances.items())),
        "r_values": list(opts.r_values),
    }
    versions = {
        "gfrag": __version__,
        "numpy": np.__version__,
        "pydantic": pydantic.VERSION,
        "python": platform.python_version(),
        "scipy": scipy.__version__,
    }
    return schemas.Environment(seed=opts.seed, grid=grid, versions=versions)


def run_suite(name: str, params_grid: Optional[Sequence[ModelParams]] = None,
              tolerances: Optional[Dict[str, float]] = None, seed: int = DEFAULT_SEED,
              r_values: Optional[Sequence[float]] = None, threads: Optional[int] = None) -> schemas.VerificationReport:
    """
    Ejecuta una suite y arma su reporte. `tolerances` reemplaza claves de
    TOLERANCES (una clave desconocida es un error de dominio).
    """
    unknown = sorted(set(tolerances or {}) - set(TOLERANCES))
    if unknown:
        raise DomainError("tolerances", unknown, "|".join(sorted(TOLERANCES)))
    opts = SuiteOptions(tolerances={**TOLERANCES, **(tolerances or {})}, seed=seed,
                        r_values=tuple(r_values) if r_values else (0.5, 1.0, 2.0))
    specs = build_cases(name, params_grid, opts)
    if not specs:
        raise DomainError("suite", name, "al menos un caso")
    workers = threads or load_settings().threads
    logger.info("Suite %s: %d casos con %d hilos.", name, len(specs), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        cases = list(pool.map(run_case, specs))
    report = schemas.VerificationReport(suite=name, cases=cases, environment=environment(params_grid, opts))
    failed = sum(not c.passed for c in cases)
    logger.info("Suite %s: %d/%d casos aprobados.", name, len(cases) - failed, len(cases))
    return report


# --- Nombres por operación ---

def suite_mellin_core(params_grid: Optional[Sequence[ModelParams]] = None, **kwargs) -> schemas.VerificationReport:
    return run_suite("mellin-core", params_grid, **kwargs)


def suite_blowup(params_grid: Optional[Sequence[ModelParams]] = None, **kwargs) -> schemas.VerificationReport:
    return run_suite("blowup", params_grid, **kwargs)


def suite_nonexistence_evidence(params_grid: Optional[Sequence[ModelParams]] = None,
                                **kwargs) -> schemas.VerificationReport:
    return run_suite("nonexistence", params_grid, **kwargs)


def suite_stitching(params_grid: Optional[Sequence[ModelParams]] = None, **kwargs) -> schemas.VerificationReport:
    return run_suite("stitching", params_grid, **kwargs)


def suite_contour(params_grid: Optional[Sequence[ModelParams]] = None, **kwargs) -> schemas.VerificationReport:
    return run_suite("contour", params_grid, **kwargs)


def suite_roundtrip(params_grid: Optional[Sequence[ModelParams]] = None, **kwargs) -> schemas.VerificationReport:
    return run_suite("roundtrip", params_grid, **kwargs)


def suite_weak_form(params_grid: Optional[Sequence[ModelParams]] = None, **kwargs) -> schemas.VerificationReport:
    return run_suite("weak-form", params_grid, **kwargs)


def suite_large_x(params_grid: Optional[Sequence[ModelParams]] = None, **kwargs) -> schemas.VerificationReport:
    return run_suite("large-x", params_grid, **kwargs)
