# tests/conftest.py
import pytest

from GFRAG.critical_gf.model import ModelParams


@pytest.fixture
def malthusian() -> ModelParams:
    """θ < 1: raíces reales σ = (0.5, 1.5)."""
    return ModelParams(gamma=1.0, theta=0.75)


@pytest.fixture
def oscillating() -> ModelParams:
    """θ > 1: raíces 1 ± i."""
    return ModelParams(gamma=1.0, theta=2.0)


@pytest.fixture
def negative_oscillating() -> ModelParams:
    return ModelParams(gamma=-1.0, theta=2.0)


@pytest.fixture
def negative_malthusian() -> ModelParams:
    return ModelParams(gamma=-1.0, theta=0.75)


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    # las pruebas no dependen de la configuración del proceso
    monkeypatch.delenv("GFRAG_THREADS", raising=False)
    monkeypatch.delenv("GFRAG_LOG_LEVEL", raising=False)
