"""
Application configuration and settings.
"""
from fractions import Fraction
from pathlib import Path
from typing import List

from pydantic_settings import BaseSettings


DEFAULT_CATALOG = Path(__file__).resolve().parent.parent / "catalog" / "data" / "catalog.txt"


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Catalog
    HPG_CATALOG: str = str(DEFAULT_CATALOG)

    # Certification
    HPG_ORDER: int = 24
    HPG_SAMPLES: str = "1/5,3/7,-2/9"
    HPG_JOBS: int = 1

    # Solver / pull-back guards
    HPG_MAX_SOLVER_DEGREE: int = 6
    HPG_FROBENIUS_LIMIT: int = 10_000

    # Logging
    HPG_LOG_LEVEL: str = "WARNING"

    class Config:
        env_file = ".env"
        case_sensitive = True

    def sample_values(self) -> List[Fraction]:
        """Parse HPG_SAMPLES into exact rationals."""
        return parse_samples(self.HPG_SAMPLES)


def parse_samples(text: str) -> List[Fraction]:
    """Parse a comma separated list like ``1/5,3/7,-2/9``."""
    values = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if chunk.startswith("a="):
            chunk = chunk[2:]
        if chunk:
            values.append(Fraction(chunk))
    return values


settings = Settings()
