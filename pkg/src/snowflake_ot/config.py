"""Size caps and run configuration.

Caps can be raised through environment variables:

``SNOWFLAKE_OT_MAX_POINTS``
    largest point count for dense n x n distance matrices (default 4096).
``SNOWFLAKE_OT_MAX_SUPPORT``
    largest support size N of an embedding measure (default 1_000_000).
"""

import os
from dataclasses import dataclass, field

DEFAULT_MAX_POINTS = 4096
DEFAULT_MAX_SUPPORT = 1_000_000


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    return int(raw)


def max_points() -> int:
    return _env_int("SNOWFLAKE_OT_MAX_POINTS", DEFAULT_MAX_POINTS)


def max_support() -> int:
    return _env_int("SNOWFLAKE_OT_MAX_SUPPORT", DEFAULT_MAX_SUPPORT)


@dataclass
class RunConfig:
    """Everything that determines a CLI run besides its input files.

    The seed alone fixes every sampled configuration.
    """

    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    max_points: int = field(default_factory=max_points)
    max_support: int = field(default_factory=max_support)
    out: str | None = None

    def tol(self, name, default):
        return float(self.tolerances.get(name, default))
