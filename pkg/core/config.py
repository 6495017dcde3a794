"""Runtime defaults read from ERASER_* environment variables (and a .env file)."""

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

ENV_PREFIX = "ERASER_"

load_dotenv()


def _lookup(env: Mapping[str, str], key: str) -> Optional[str]:
    value = env.get(ENV_PREFIX + key, "").strip()
    return value or None


def _lookup_ps(env: Mapping[str, str], key: str, default: int) -> int:
    """Positive picosecond count; malformed values fall back to the default."""
    raw = _lookup(env, key)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value <= 0:
        logger.warning("Ignoring %s%s=%r: expected a positive integer of picoseconds", ENV_PREFIX, key, raw)
        return default
    return value


@dataclass(frozen=True)
class Settings:
    output_dir: Path = Path("outputs")
    window_ps: int = 1000
    offset_bin_ps: int = 100
    offset_span_ps: int = 2_000_000
    scenario_dir: Optional[Path] = None

    @classmethod
    def from_env(cls, env: Optional[Mapping[str, str]] = None) -> "Settings":
        env = os.environ if env is None else env
        defaults = cls()
        output_dir = _lookup(env, "OUTPUT_DIR")
        scenario_dir = _lookup(env, "SCENARIO_DIR")
        return cls(
            output_dir=Path(output_dir).expanduser() if output_dir else defaults.output_dir,
            window_ps=_lookup_ps(env, "WINDOW_PS", defaults.window_ps),
            offset_bin_ps=_lookup_ps(env, "OFFSET_BIN_PS", defaults.offset_bin_ps),
            offset_span_ps=_lookup_ps(env, "OFFSET_SPAN_PS", defaults.offset_span_ps),
            scenario_dir=Path(scenario_dir).expanduser() if scenario_dir else None,
        )


settings = Settings.from_env()


__all__ = ["ENV_PREFIX", "Settings", "settings"]
