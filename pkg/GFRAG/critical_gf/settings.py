# GFRAG/critical_gf/settings.py

import logging
import os
import sys
from typing import Optional

from pydantic import BaseModel, Field, field_validator


# ----------------------------------------------------------------------
# ----------------- CONSTANTES NUMÉRICAS -----------------
# ----------------------------------------------------------------------

EPS_POLE = 1e-8                 # distancia mínima a un polo
CRITICAL_WINDOW = 1e-10         # |θ−1| por debajo de esto: caso crítico
SERIES_REL_TOL = 1e-16          # criterio de corte de series (3 términos seguidos)
SERIES_CAP = 5000
ORACLE_TERMS = 80
ORACLE_CAP = 500
V_MAX = 1e4                     # truncación máxima de rectas verticales
RICHARDSON_LADDER = tuple(range(4, 10))
SCAN_POINTS_PER_DECADE = 512
SCAN_DECADES = 8
BISECTION_REL_WIDTH = 1e-10
DEFAULT_SEED = 12345
GAMMA_LOG_SWITCH = 20.0         # |Im s| a partir del cual Γ se calcula vía log Γ
NUDGE = 1e-6                    # desplazamiento de θ/γ ante conexiones degeneradas

# Fallback si las variables de entorno no existen o son inválidas
DEFAULTS = {
    "GFRAG_THREADS": 1,
    "GFRAG_LOG_LEVEL": "WARNING",
}


class Settings(BaseModel):
    """Configuración de proceso leída del entorno."""
    threads: int = Field(1, ge=1, le=256)
    log_level: str = "WARNING"

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str):
        clean_v = v.strip().upper()
        if clean_v not in ["DEBUG", "INFO", "WARNING", "ERROR"]:
            raise ValueError("GFRAG_LOG_LEVEL debe ser DEBUG, INFO, WARNING o ERROR.")
        return clean_v


def load_settings() -> Settings:
    """Construye Settings desde GFRAG_THREADS / GFRAG_LOG_LEVEL con valores por defecto."""
    raw_threads = os.environ.get("GFRAG_THREADS", str(DEFAULTS["GFRAG_THREADS"]))
    raw_level = os.environ.get("GFRAG_LOG_LEVEL", DEFAULTS["GFRAG_LOG_LEVEL"])
    try:
        return Settings(threads=int(raw_threads), log_level=raw_level)
    except (ValueError, TypeError) as e:
        logging.getLogger("gfrag.config").warning(
            "Variables de entorno inválidas (%s); se usan los valores por defecto.", e)
        return Settings(threads=DEFAULTS["GFRAG_THREADS"], log_level=DEFAULTS["GFRAG_LOG_LEVEL"])


# ----------------------------------------------------------------------
# ----------------- LOGGING -----------------
# ----------------------------------------------------------------------

_HANDLER_NAME = "gfrag-console"


def configure_logging(level: Optional[str] = None) -> logging.Logger:
    """
    Configura el logger raíz 'gfrag' con líneas etiquetadas '[NIVEL area] mensaje'.
    Es idempotente: llamadas repetidas sólo ajustan el nivel.
    """
    root = logging.getLogger("gfrag")
    level = (level or load_settings().log_level).upper()
    root.setLevel(level)
    if not any(h.get_name() == _HANDLER_NAME for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.set_name(_HANDLER_NAME)
        handler.setFormatter(logging.Formatter("[%(levelname)s %(name)s] %(message)s"))
        root.addHandler(handler)
        root.propagate = False
    return root
