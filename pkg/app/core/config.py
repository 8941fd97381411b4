from pydantic_settings import BaseSettings
from typing import Optional


class Settings(BaseSettings):
    # Application
    PROJECT_NAME: str = "Rumin Currents Toolkit"
    ENVIRONMENT: str = "development"  # development, ci, production
    DEBUG: bool = False
    LOG_LEVEL: str = "WARNING"

    # Arithmetic mode used when a command does not pass --mode
    DEFAULT_MODE: str = "exact"  # exact, float
    DEFAULT_SEED: int = 0

    # Linear programming
    FLOAT_LP_TOLERANCE: float = 1e-9  # relative feasibility / gap tolerance of the float path
    EXACT_LP_MAX_PIVOTS: int = 200000
    LP_DEBUG_DUMP_DIR: Optional[str] = None

    # Discrete homotopy
    HARMONIC_RCOND: float = 1e-10
    HOMOTOPY_TOLERANCE: float = 1e-6

    # Compactness probe
    PROBE_MAX_SAMPLES: int = 400
    PROBE_WORKERS: int = 1
    PROBE_PADDING_CELLS: int = 2
    PROBE_SUPPORT_SIZE: int = 3

    # Curve quadrature
    QUADRATURE_NODES: int = 12

    class Config:
        env_file = ".env"
        case_sensitive = True

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self._validate_critical_settings()

    def _validate_critical_settings(self):
        """Reject settings that would make numerical results meaningless"""

        if self.DEFAULT_MODE not in ("exact", "float"):
            raise ValueError("DEFAULT_MODE must be 'exact' or 'float'")

        for name in ("FLOAT_LP_TOLERANCE", "HARMONIC_RCOND", "HOMOTOPY_TOLERANCE"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {value}")

        if self.EXACT_LP_MAX_PIVOTS < 1:
            raise ValueError("EXACT_LP_MAX_PIVOTS must be positive")

        if self.PROBE_WORKERS < 1:
            raise ValueError("PROBE_WORKERS must be at least 1")

        if self.PROBE_PADDING_CELLS < 1:
            raise ValueError("PROBE_PADDING_CELLS must be at least 1")

        if self.PROBE_SUPPORT_SIZE < 1 or self.PROBE_MAX_SAMPLES < 1:
            raise ValueError("probe sizes must be positive")

        if self.QUADRATURE_NODES < 2:
            raise ValueError("QUADRATURE_NODES must be at least 2")


settings = Settings()
