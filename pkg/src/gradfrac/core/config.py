import os
from dataclasses import dataclass

from dotenv import load_dotenv
from gradfrac.paths import PROJECT_ROOT

load_dotenv(PROJECT_ROOT / ".env")


def _get_int(name: str, default: int) -> int:
    raw = os.getenv(name, "")
    if not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise RuntimeError(f"Env var {name} must be an integer, got {raw!r}") from exc


@dataclass
class Settings:
    # Parallelism (0 keeps numba's own default)
    threads: int = _get_int("GRADFRAC_THREADS", 0)

    # Logging / output
    log_level: str = os.getenv("GRADFRAC_LOG_LEVEL", "INFO").upper()
    output_dir: str = os.getenv("GRADFRAC_OUTPUT_DIR", "runs")


settings = Settings()


def apply_thread_cap(threads: int) -> int:
    """Cap numba's element-kernel threads; returns the count in effect."""
    import numba

    available = numba.config.NUMBA_NUM_THREADS
    if threads > 0:
        numba.set_num_threads(min(threads, available))
    return numba.get_num_threads()
