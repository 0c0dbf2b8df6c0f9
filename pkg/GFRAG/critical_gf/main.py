# GFRAG/critical_gf/main.py

import argparse
import logging
import math
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

from pydantic import ValidationError
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from . import schemas
from .artifact_service import ArtifactError, ArtifactService
from .errors import DegenerateConnection, GFragError
from .mellin import omega, series_oracle, u2, u2_real, u_closed
from .model import ModelParams, classify
from .physical import measure_at, moment_asymptotics, scan_solution
from .settings import NUDGE, configure_logging, load_settings
from .verify import run_suite

logger = logging.getLogger("gfrag.cli")

T = TypeVar("T")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILED_CASES = 2
NUDGE_ATTEMPTS = 3

MELLIN_KINDS: Dict[str, Callable[[ModelParams, float, complex], complex]] = {
    "omega": omega,
    "u": u_closed,
    "u2": u2,
    "u2-real": u2_real,
    "oracle": lambda params, t, s: series_oracle(params, t, s).value,
}


# ----------------------------------------------------------------------
# ----------------- DESPLAZAMIENTO ANTE CONEXIONES DEGENERADAS -----------------
# ----------------------------------------------------------------------

def with_nudge(config: schemas.RunConfig, action: Callable[[ModelParams], T]) -> T:
    """
    Ejecuta `action` con los parámetros de la configuración. Salvo con
    --no-nudge, una DegenerateConnection reintenta con θ desplazado NUDGE·(intento−1).
    """
    params = ModelParams(config.params.gamma, config.params.theta)
    if not config.nudge:
        return action(params)
    for attempt in Retrying(retry=retry_if_exception_type(DegenerateConnection),
                            stop=stop_after_attempt(NUDGE_ATTEMPTS), reraise=True):
        with attempt:
            shift = NUDGE * (attempt.retry_state.attempt_number - 1)
            if shift:
                logger.warning("θ desplazado %g por una conexión degenerada (θ = %.17g).",
                               shift, params.theta + shift)
            return action(params.nudged(dtheta=shift))
    raise AssertionError("unreachable")


def _point_error(config: schemas.RunConfig, error: Exception) -> str:
    # con el desplazamiento activo la conexión degenerada debe llegar a with_nudge
    if config.nudge and isinstance(error, DegenerateConnection):
        raise error
    logger.debug("Punto fallido: %s", error)
    return type(error).__name__


# ----------------------------------------------------------------------
# ----------------- COMANDOS -----------------
# ----------------------------------------------------------------------

def _classify_rows(report: schemas.RegimeReport) -> List[List[Any]]:
    return [[report.gamma, report.theta, report.sigma1.re, report.sigma1.im, report.sigma2.re,
             report.sigma2.im, report.malthusian, report.critical, report.inf_phi, report.gamma_sign,
             report.nu, report.expected_behavior]]


def _eval_mellin(config: schemas.RunConfig, params: ModelParams) -> List[List[Any]]:
    evaluate = MELLIN_KINDS[config.kind]
    rows = []
    for s in config.s_grid.points():
        try:
            value = complex(evaluate(params, config.t, s))
            rows.append([s.real, s.imag, value.real, value.imag, None])
        except (GFragError, ArithmeticError) as e:
            rows.append([s.real, s.imag, math.nan, math.nan, _point_error(config, e)])
    return rows


def _eval_density(config: schemas.RunConfig, params: ModelParams) -> List[List[Any]]:
    measure = measure_at(params, config.t)
    rows = []
    for point in config.x_grid.points():
        x = point.real
        try:
            local = measure.at(x)
            rows.append([x, local.density, local.atom.weight if local.atom else 0.0, None])
        except (GFragError, ArithmeticError) as e:
            rows.append([x, math.nan, math.nan, _point_error(config, e)])
    return rows


def _moments(config: schemas.RunConfig, params: ModelParams) -> List[List[Any]]:
    rows = []
    for r in config.r_values:
        check = moment_asymptotics(params, r)
        rows.append([r, check.law.kind, check.limit, check.target, check.relative_error])
    return rows


def _scan_sign(config: schemas.RunConfig, params: ModelParams) -> schemas.SignReport:
    threads = load_settings().threads
    if config.x_grid is None:
        return scan_solution(params, config.t, threads=threads)
    lo, hi = config.x_grid.a, config.x_grid.b
    # densidad de la malla explícita, expresada por década
    decades = math.log10(hi / lo) if hi > lo else 1.0
    per_decade = max(1, math.ceil((config.x_grid.n - 1) / decades))
    return scan_solution(params, config.t, points_per_decade=per_decade, threads=threads, x_range=(lo, hi))


def run(config: schemas.RunConfig) -> int:
    """
    Ejecuta un comando validado y escribe su artefacto.
    Retorna 0 si todo salió bien y 2 si algún caso de la suite falló.
    """
    service = ArtifactService(config.output)
    fmt = config.format

    # --- 1. Suites de verificación ---
    if config.command == "suite":
        report = with_nudge(config, lambda p: _run_suite(config, p))
        service.write_report(report, fmt)
        failed = [c.id for c in report.cases if not c.passed]
        if failed:
            logger.warning("Suite %s: %d casos fallidos (primero: %s).", report.suite, len(failed), failed[0])
            return EXIT_FAILED_CASES
        return EXIT_OK

    # --- 2. Clasificación ---
    if config.command == "classify":
        report = with_nudge(config, classify)
        if fmt == "json":
            service.write_text(report.model_dump_json(indent=2) + "\n")
        else:
            service.write_table("classify", _classify_rows(report))
        return EXIT_OK

    # --- 3. Barrido de signo ---
    if config.command == "scan-sign":
        sign_report = with_nudge(config, lambda p: _scan_sign(config, p))
        if fmt == "json":
            service.write_text(sign_report.model_dump_json(indent=2) + "\n")
        else:
            service.write_table("scan-sign", [[b.lo, b.hi, b.f_lo, b.f_hi] for b in sign_report.sign_changes])
        return EXIT_OK

    # --- 4. Tablas de evaluación ---
    builders = {"eval-mellin": _eval_mellin, "eval-density": _eval_density, "moments": _moments}
    rows = with_nudge(config, lambda p: builders[config.command](config, p))
    service.write_rows(config.command, rows, fmt)
    return EXIT_OK


def _run_suite(config: schemas.RunConfig, params: ModelParams) -> schemas.VerificationReport:
    return run_suite(config.suite, [params], tolerances=config.tolerances, seed=config.seed)


# ----------------------------------------------------------------------
# ----------------- ARGUMENTOS -----------------
# ----------------------------------------------------------------------

def _tolerance(text: str) -> Tuple[str, float]:
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"'{text}': use clave=valor.")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"'{text}': el valor debe ser numérico.")


class _Parser(argparse.ArgumentParser):
    """Errores de uso con el código de salida de validación (1), no el 2 de argparse."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"[ERROR CONFIG] {message}", file=sys.stderr)
        sys.exit(EXIT_INVALID)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--gamma", type=float, help="Exponente de crecimiento γ (≠ 0).")
    common.add_argument("--theta", type=float, help="Intensidad de dislocación θ > 0.")
    common.add_argument("--config", help="Archivo TOML con campos de la configuración.")
    common.add_argument("--seed", type=int, help="Semilla de los casos aleatorios.")
    common.add_argument("--output", help="Archivo de salida (por defecto, salida estándar).")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--tol", type=_tolerance, action="append", metavar="CLAVE=VALOR",
                        help="Reemplaza una tolerancia de las suites.")
    common.add_argument("--nudge", action=argparse.BooleanOptionalAction, default=None,
                        help="Desplaza θ ante conexiones degeneradas (activo por defecto).")
    common.add_argument("--verbose", action="store_true", help="Logging en nivel DEBUG.")

    parser = _Parser(prog="gfrag", description="Soluciones explícitas de la ecuación de "
                                     "crecimiento-fragmentación crítica.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="Régimen de (γ, θ).")

    p = sub.add_parser("eval-mellin", parents=[common], help="Transformada de Mellin sobre una malla en s.")
    p.add_argument("--t", type=float)
    p.add_argument("--s-grid", dest="s_grid")
    p.add_argument("--kind", choices=sorted(MELLIN_KINDS))

    p = sub.add_parser("eval-density", parents=[common], help="Densidad física sobre una malla en x.")
    p.add_argument("--t", type=float)
    p.add_argument("--x-grid", dest="x_grid")

    p = sub.add_parser("moments", parents=[common], help="Momentos cerca de t = 1/γ.")
    p.add_argument("--r", dest="r_values", type=float, nargs="+")

    p = sub.add_parser("suite", parents=[common], help="Suite de verificación.")
    p.add_argument("--name", dest="suite")

    p = sub.add_parser("scan-sign", parents=[common], help="Barrido de signo de la solución física.")
    p.add_argument("--t", type=float)
    p.add_argument("--x-grid", dest="x_grid")
    return parser


def merge_config(args: argparse.Namespace, file_values: Dict[str, Any]) -> Dict[str, Any]:
    """Valores del TOML con los de la línea de comandos encima."""
    merged = dict(file_values)
    merged["command"] = args.command
    params = dict(merged.get("params", {}))
    for key in ("gamma", "theta"):
        if getattr(args, key) is not None:
            params[key] = getattr(args, key)
    merged["params"] = params
    for key in ("t", "s_grid", "x_grid", "kind", "r_values", "suite", "output", "format", "seed", "nudge"):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if args.tol:
        merged["tolerances"] = {**merged.get("tolerances", {}), **dict(args.tol)}
    return merged


def _report_validation(error: ValidationError) -> None:
    for item in error.errors():
        field = ".".join(str(part) for part in item["loc"]) or "config"
        print(f"[ERROR CONFIG] campo '{field}': {item['msg']}", file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging("DEBUG" if args.verbose else None)

    try:
        config = schemas.RunConfig(**merge_config(args, ArtifactService.load_config(args.config)))
    except ValidationError as e:
        _report_validation(e)
        return EXIT_INVALID
    except ArtifactError as e:
        print(f"[ERROR CONFIG] {e}", file=sys.stderr)
        return EXIT_INVALID

    try:
        return run(config)
    except (GFragError, ArithmeticError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        print(f"[ERROR {config.command}] {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
