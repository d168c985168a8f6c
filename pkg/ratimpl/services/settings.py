"""
Settings Service - solver limits and defaults from the active config
"""

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class Settings:
    profile_cap: int
    event_state_cap: int
    refinement_cap: int
    default_nmax: int
    validation: str
    belief_model: str
    examples_path: str
    random_seed: int
    random_instances: int


class SolverSettings:
    """Process-wide solver settings"""

    _settings: Optional[Settings] = None

    @classmethod
    def init_app(cls, config) -> Settings:
        """Initialize settings from a config class"""
        cls._settings = Settings(
            profile_cap=int(config.PROFILE_CAP),
            event_state_cap=int(config.EVENT_STATE_CAP),
            refinement_cap=int(config.REFINEMENT_CAP),
            default_nmax=int(config.DEFAULT_NMAX),
            validation=config.VALIDATION,
            belief_model=config.BELIEF_MODEL,
            examples_path=config.EXAMPLES_PATH,
            random_seed=int(config.RANDOM_SEED),
            random_instances=int(config.RANDOM_INSTANCES),
        )
        return cls._settings

    @classmethod
    def get_settings(cls) -> Settings:
        """Get settings, initializing from the default config if needed"""
        if cls._settings is None:
            from config import config
            cls.init_app(config['default'])
        return cls._settings

    @classmethod
    def override(cls, **changes) -> Settings:
        """Replace individual settings (used by the CLI flags and tests)"""
        from dataclasses import replace
        cls._settings = replace(cls.get_settings(), **changes)
        return cls._settings


def get_settings() -> Settings:
    """Convenience function to get settings"""
    return SolverSettings.get_settings()
