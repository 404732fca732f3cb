"""Environment-driven settings for the CLI and the property harness."""

import os
from dataclasses import dataclass, replace

from dotenv import load_dotenv

from errors import ConfigError

load_dotenv()


def _env_int(name, default):
    raw = os.getenv(name, str(default))
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}", variable=name)


@dataclass(frozen=True)
class Settings:
    seed: int = 0
    samples: int = 200
    max_degree: int = 4
    coord_bound: int = 3
    max_power: int = 6
    n_jobs: int = 1
    log_level: str = "WARNING"
    field: str = "rational"

    def override(self, **changes):
        """Return a copy with every non-None keyword applied."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def load_settings():
    return Settings(
        seed=_env_int('HAMLIE_SEED', 0),
        samples=_env_int('HAMLIE_SAMPLES', 200),
        max_degree=_env_int('HAMLIE_MAX_DEGREE', 4),
        coord_bound=_env_int('HAMLIE_COORD_BOUND', 3),
        max_power=_env_int('HAMLIE_MAX_POWER', 6),
        n_jobs=_env_int('HAMLIE_N_JOBS', 1),
        log_level=os.getenv('HAMLIE_LOG_LEVEL', 'WARNING').upper(),
        field=os.getenv('HAMLIE_FIELD', 'rational'),
    )
