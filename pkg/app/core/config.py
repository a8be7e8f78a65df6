import os
from typing import List, Optional

from dotenv import load_dotenv
from pydantic_settings import BaseSettings

load_dotenv()


class Settings(BaseSettings):
    PROJECT_NAME: str = "Unavoidable Patterns"

    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # Exact solvers
    EXACT_FAS_CAP: int = 22  # 2^n numerator table
    DETECT_NODE_BUDGET: Optional[int] = None
    EXTREMAL_BUDGET: int = 2_000_000  # canonical forms per search
    RAMSEY_COLOURING_CAP: int = 7
    RAMSEY_TOURNAMENT_CAP: int = 7

    # Heuristics
    HEURISTIC_RESTARTS: int = 8
    THREADS: int = os.cpu_count() or 1

    # HTTP
    CORS_ORIGINS: List[str] = []

    # Storage
    DATABASE_URI: str = os.getenv("DATABASE_URI", "sqlite:///./patterns.db")
    WITNESS_DIR: Optional[str] = os.getenv("WITNESS_DIR")  # unset: no witness files

    # Versioned contracts
    RNG_VERSION: int = 1
    SCHEMA_VERSION: int = 1

    class Config:
        case_sensitive = True


settings = Settings()
