from pathlib import Path
import sys

from dotenv import load_dotenv
from loguru import logger
from pydantic_settings import BaseSettings, SettingsConfigDict

from thcodec.config_loader import PROJECT_ROOT, get_config, resolve_path

# Load environment variables from .env file if it exists
load_dotenv()


class Settings(BaseSettings):
    """Process-level knobs, overridable with THC_* environment variables."""

    model_config = SettingsConfigDict(env_prefix="THC_", env_file=".env", extra="ignore")

    log_level: str = "INFO"
    log_to_file: bool = True
    workers: int = 4


SETTINGS = Settings()

# Paths
PROJ_ROOT = PROJECT_ROOT
PATHS_CFG = get_config("paths")

DATA_DIR = resolve_path(PATHS_CFG.get("data_dir"), PROJ_ROOT / "data")
SYNTHETIC_DIR = resolve_path(PATHS_CFG.get("synthetic_dir"), DATA_DIR / "synthetic")
STREAMS_DIR = resolve_path(PATHS_CFG.get("streams_dir"), DATA_DIR / "streams")
DECODED_DIR = resolve_path(PATHS_CFG.get("decoded_dir"), DATA_DIR / "decoded")
REPORTS_DIR = resolve_path(PATHS_CFG.get("reports_dir"), PROJ_ROOT / "reports")
LOG_DIR = REPORTS_DIR / "logs"


def init_logger(log_dir: Path = LOG_DIR, level: str = SETTINGS.log_level, to_file: bool = True):
    logger.remove()

    fmt = (
        "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | "
        "<level>{level: <8}</level> | "
        "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - "
        "<level>{message}</level>"
    )

    # If tqdm is installed, route console output through tqdm.write
    # https://github.com/Delgan/loguru/issues/135
    try:
        from tqdm import tqdm

        logger.add(lambda msg: tqdm.write(msg, end="", file=sys.stderr), format=fmt,
                   level=level, colorize=True)
    except ModuleNotFoundError:
        logger.add(sys.stderr, format=fmt, level=level)

    if to_file:
        try:
            log_dir.mkdir(parents=True, exist_ok=True)
            logger.add(
                log_dir / "thcodec.log",
                rotation="10 MB",
                retention="30 days",
                encoding="utf-8",
                level="DEBUG",
            )
        except OSError as e:
            logger.warning(f"File logging disabled, cannot write to {log_dir}: {e}")

    return logger


# Initialize immediately when imported
LOGGER = init_logger(LOG_DIR, SETTINGS.log_level, SETTINGS.log_to_file)
