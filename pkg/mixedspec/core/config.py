# mixedspec/core/config.py
from functools import lru_cache
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

class Settings(BaseSettings):
    # Worker threads for per-mode maps; results never depend on this value
    THREADS: int = Field(default=1, ge=1)

    model_config = SettingsConfigDict(
        env_prefix="MIXEDSPEC_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )

# Create a global settings instance
settings = Settings()

@lru_cache()
def get_settings() -> Settings:
    return Settings()
