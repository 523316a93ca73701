from pydantic_settings import BaseSettings, SettingsConfigDict
from pathlib import Path


class Settings(BaseSettings):
    """Application settings"""

    PROJECT_NAME: str = "Nullspace Embed"
    API_V1_STR: str = "/api/v1"

    DEBUG: bool = False
    LOG_DIR: str = "logs"
    LOG_TO_FILE: bool = False

    # Numerics
    EIGEN_TOLERANCE: float = 1e-9
    JUMP_SAMPLES: int = 1024
    BISECTION_WIDTH: float = 1e-12

    # Drivers
    DEFAULT_SEED: int = 0
    RETRY_BUDGET: int = 3
    ESCALATION_BUDGET: int = 16
    RANDOM_OFFDIAG_LOW: float = -2.0
    RANDOM_OFFDIAG_HIGH: float = -0.5

    # Oracles
    ORACLE_SIZE_CAP: int = 12
    CROSSCHECK_SIZE_CAP: int = 9

    model_config = SettingsConfigDict(
        env_file = ".env",
        case_sensitive = False,
        extra="ignore"
    )

    @property
    def log_path(self) -> Path:
        return Path(self.LOG_DIR)


settings = Settings()
