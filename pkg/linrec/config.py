"""Configuration: all knobs env-driven via pydantic-settings."""

from pathlib import Path

from pydantic import BaseModel, Field, PositiveInt
from pydantic_settings import BaseSettings, SettingsConfigDict

BASE_DIR = Path(__file__).resolve().parent.parent


class Caps(BaseModel):
    """Exploration limits shared by reduct search and saturation."""

    model_config = {"frozen": True, "extra": "forbid"}

    fuel: PositiveInt = 1_000_000
    max_states: PositiveInt = 20_000
    max_steps: PositiveInt = 10_000
    max_trees: PositiveInt = 10_000
    max_label_size: PositiveInt = 1_000
    max_stack_depth: PositiveInt = 32
    ceiling_bits: PositiveInt = Field(default=2**20)

    @classmethod
    def parse(cls, text: str, base: "Caps | None" = None) -> "Caps":
        """Read `key=value,key=value` on top of `base` (or the defaults)."""
        values = (base or cls()).model_dump()
        for item in filter(None, (part.strip() for part in text.split(","))):
            key, sep, raw = item.partition("=")
            key = key.strip()
            if not sep or key not in values:
                raise ValueError(f"unknown cap {item!r}; expected one of {sorted(values)}")
            values[key] = int(raw)
        return cls(**values)


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="LINREC_", env_file=".env", case_sensitive=False, extra="ignore"
    )

    # `key=value,...` overrides, e.g. LINREC_CAPS="max_trees=500,max_states=200"
    CAPS: str = ""

    FUEL: int = 1_000_000
    MAX_STATES: int = 20_000
    MAX_STEPS: int = 10_000
    MAX_TREES: int = 10_000
    MAX_LABEL_SIZE: int = 1_000
    MAX_STACK_DEPTH: int = 32

    # Bound values longer than this many bits are reported as "exceeds ceiling"
    BOUND_CEILING_BITS: int = 2**20

    LOG_LEVEL: str = "WARNING"

    SUBSYSTEMS_DIR: Path = BASE_DIR / "config" / "subsystems"

    @property
    def caps(self) -> Caps:
        base = Caps(
            fuel=self.FUEL,
            max_states=self.MAX_STATES,
            max_steps=self.MAX_STEPS,
            max_trees=self.MAX_TREES,
            max_label_size=self.MAX_LABEL_SIZE,
            max_stack_depth=self.MAX_STACK_DEPTH,
            ceiling_bits=self.BOUND_CEILING_BITS,
        )
        return Caps.parse(self.CAPS, base)


settings = Settings()
