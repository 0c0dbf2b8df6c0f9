# GFRAG/critical_gf/artifact_service.py

import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from typing import Any, Dict, Iterable, List, Optional, Sequence

import toml
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt, wait_fixed

from . import schemas
from .errors import GFragError

logger = logging.getLogger("gfrag.artefactos")


# --- Definición de Errores ---
class ArtifactError(GFragError):
    """Excepción para errores de lectura/escritura de archivos de configuración o resultados."""

    def __init__(self, path: str, cause: str):
        self.path = path
        self.cause = cause
        super().__init__(f"Archivo '{path}': {cause}")


# Cabeceras fijas por comando (el orden de columnas es parte del formato)
HEADERS: Dict[str, List[str]] = {
    "classify": ["gamma", "theta", "sigma1_re", "sigma1_im", "sigma2_re", "sigma2_im", "malthusian",
                 "critical", "inf_phi", "gamma_sign", "nu", "expected_behavior"],
    "eval-mellin": ["s_re", "s_im", "value_re", "value_im", "error"],
    "eval-density": ["x", "density", "atom", "error"],
    "moments": ["r", "law", "limit", "target", "relative_error"],
    "suite": ["id", "anchor", "gamma", "theta", "measured", "target", "bound", "tol", "pass", "error"],
    "scan-sign": ["lo", "hi", "f_lo", "f_hi"],
}


def format_value(value: Any) -> str:
    """Números con 17 cifras significativas (ida y vuelta exacta); None como celda vacía."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Tabla RFC-4180 (separador ',', fin de línea CRLF)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"Fila con {len(row)} columnas; se esperaban {len(header)}.")
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def _json_value(value: Any) -> Any:
    # JSON estricto: NaN e infinitos como null
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def rows_json(command: str, rows: Iterable[Sequence[Any]]) -> str:
    """Las filas de una tabla como lista de objetos JSON (mismas claves que la cabecera CSV)."""
    header = HEADERS[command]
    records = [{key: _json_value(v) for key, v in zip(header, row)} for row in rows]
    return json.dumps({"command": command, "rows": records}, ensure_ascii=False, indent=2) + "\n"


def report_rows(report: schemas.VerificationReport) -> List[List[Any]]:
    """Una fila por caso, en el orden del reporte."""
    return [
        [c.id, c.anchor, c.params.get("gamma"), c.params.get("theta"), c.measured, c.target, c.bound, c.tol,
         c.passed, c.error]
        for c in report.cases
    ]


def report_json(report: schemas.VerificationReport) -> str:
    return report.model_dump_json(by_alias=True, indent=2) + "\n"


class ArtifactService:
    """Escritura de artefactos (CSV/JSON) y lectura de la configuración TOML."""

    WRITE_ATTEMPTS = 3

    def __init__(self, output: Optional[str] = None):
        """Sin `output` los artefactos van a la salida estándar."""
        self.output = output

    # --- ESCRITURA ---

    def write_text(self, text: str) -> None:
        if self.output is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        try:
            self._atomic_write(self.output, text)
            logger.info("Artefacto escrito en '%s' (%d bytes).", self.output, len(text.encode("utf-8")))
        except OSError as e:
            logger.error("No se pudo escribir '%s': %s", self.output, e)
            raise ArtifactError(self.output, str(e))

    def write_table(self, command: str, rows: Iterable[Sequence[Any]]) -> None:
        self.write_text(to_csv(HEADERS[command], rows))

    def write_rows(self, command: str, rows: Sequence[Sequence[Any]], fmt: str) -> None:
        if fmt == "json":
            self.write_text(rows_json(command, rows))
        else:
            self.write_table(command, rows)

    def write_report(self, report: schemas.VerificationReport, fmt: str) -> None:
        if fmt == "json":
            self.write_text(report_json(report))
        else:
            self.write_table("suite", report_rows(report))

    def _atomic_write(self, path: str, text: str) -> None:
        """Archivo temporal en el mismo directorio + os.replace (reintentado si el reemplazo falla)."""
        directory = os.path.dirname(os.path.abspath(path))
        # 1. Escribir el contenido completo en un temporal
        fd, tmp_path = tempfile.mkstemp(prefix=".gfrag-", suffix=".tmp", dir=directory)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
                handle.flush()
                os.fsync(handle.fileno())
            # 2. Reemplazo atómico
            for attempt in Retrying(retry=retry_if_exception_type(OSError), stop=stop_after_attempt(self.WRITE_ATTEMPTS),
                                    wait=wait_fixed(0.1), reraise=True):
                with attempt:
                    os.replace(tmp_path, path)
        except BaseException:
            if os.path.exists(tmp_path):
                os.remove(tmp_path)
            raise

    # --- LECTURA DE CONFIGURACIÓN ---

    @staticmethod
    def load_config(path: Optional[str]) -> Dict[str, Any]:
        """
        Lee un archivo TOML con campos de RunConfig. Las claves gamma/theta de
        nivel superior se mueven a la tabla [params]. Sin ruta retorna {}.
        """
        if path is None:
            return {}
        try:
            data = toml.load(path)
        except FileNotFoundError:
            raise ArtifactError(path, "no existe")
        except (toml.TomlDecodeError, OSError) as e:
            raise ArtifactError(path, f"TOML inválido ({e})")
        params = dict(data.pop("params", {}) or {})
        for key in ("gamma", "theta"):
            if key in data:
                params[key] = data.pop(key)
        if params:
            data["params"] = params
        logger.debug("Configuración leída de '%s': %s", path, sorted(data))
        return data
