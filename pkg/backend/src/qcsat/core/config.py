# src/qcsat/core/config.py

from pathlib import Path
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Desde backend/src/qcsat/core/config.py hasta la raíz del repositorio
BASE_DIR = Path(__file__).resolve().parent.parent.parent.parent.parent
ENV_PATH = BASE_DIR / ".env"


class Settings(BaseSettings):
    # === ENTORNO ===
    app_env: Literal["development", "production"] = "development"
    log_level: str = "INFO"

    # === LÍMITES DE RECURSOS ===
    max_set_size: int = Field(default=10**6, ge=1)
    oracle_wire_cap: int = Field(default=12, ge=1)
    oracle_assignment_cap: int = Field(default=4096, ge=1)
    exhaustive_quotient_limit: int = Field(default=10, ge=1, le=16)
    threads: int = Field(default=1, ge=1)

    # === PARÁMETROS NUMÉRICOS ===
    epsilon_floor: float = Field(default=1e-12, gt=0.0, lt=1.0)
    clamp_bound: float = Field(default=1.0, gt=0.0)
    kraus_tolerance: float = Field(default=1e-9, gt=0.0)
    imag_warning_threshold: float = Field(default=1e-6, gt=0.0)

    model_config = SettingsConfigDict(
        env_file=str(ENV_PATH) if ENV_PATH.exists() else None,
        env_file_encoding="utf-8",
        env_prefix="QCSAT_",
        case_sensitive=False,
        extra="ignore",
    )


settings = Settings()
