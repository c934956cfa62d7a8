from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache

class Settings(BaseSettings):
    # Logging
    DEBUG: bool = False
    LOG_LEVEL: str = "WARNING"

    # Output
    SCHEMA_VERSION: str = "1"
    CSV_SIGNIFICANT_DIGITS: int = 17  # round-trip exact for doubles

    # Auto truncation: n_max = ceil(nbar + AUTO_TAIL_SIGMAS * sqrt(nbar) + AUTO_SAFETY_MARGIN)
    AUTO_TAIL_SIGMAS: float = 10.0
    AUTO_SAFETY_MARGIN: int = 25
    AUTO_TAIL_TARGET: float = 1e-12

    # Spherical Bessel recurrence
    BESSEL_SMALL_RHO: float = 1e-8
    BESSEL_MIN_EXTRA_ORDERS: int = 20

    # Scattering coefficients
    CONDITIONING_RTOL: float = 1e-8
    LARGE_RHO_THRESHOLD: float = 1e4
    COEFF_BOUND_SLACK: float = 1e-9
    # Entries failing CONDITIONING_RTOL are recomputed with mpmath at this many
    # digits plus the decimal exponent of the largest term
    EXTENDED_PRECISION_REFINE: bool = True
    EXTENDED_PRECISION_DIGITS: int = 30

    # Generating kernel
    KERNEL_SERIES_THRESHOLD: float = 1e-4
    KERNEL_TAYLOR_TERMS: int = 6
    KERNEL_SERIES_TERMS: int = 60
    ROOT_CONFLUENT_THRESHOLD: float = 1e-6

    # Distributions
    NEGATIVITY_TOLERANCE: float = 1e-9
    FD_BASE_STEP: float = 1e-3
    FD_STEP_GROWTH: float = 4.0

    # Continuum limit
    SQUEEZED_TRANSMISSION_POWER: int = 2  # exponent of T inside arctanh
    MAX_STATE_SUPPORT: int = 4096

    # Sweeps
    DEFAULT_JOBS: int = 1

    model_config = SettingsConfigDict(
        env_prefix="WGFCS_",
        env_file=".env",
        env_file_encoding="utf-8",
        # Environment variables take precedence over .env file
        case_sensitive=False,
    )

@lru_cache
def get_settings():
    return Settings()
