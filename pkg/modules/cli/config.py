"""Configuration for the command-line interface."""

from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv

load_dotenv()

SCHEMA_VERSION = "1"


class CLIConfig(BaseSettings):
    """Defaults of the command-line flags (environment prefix ``KMS_``)."""

    depth: int = 256
    row_limit: int = 64
    tol: float = 1e-10
    format: str = "json"
    log_level: str = "WARNING"
    seed: int = 0
    suite_trials: int = 20

    model_config = SettingsConfigDict(env_prefix="KMS_", env_file=".env", extra="ignore")
