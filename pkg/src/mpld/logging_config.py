import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path

LOG_DIR = Path(os.getenv("MPLD_LOG_DIR", str(Path.home() / ".mpld" / "logs")))
LOG_FILE = LOG_DIR / "mpld.log"

# Loggers that emit one line per sweep or pass; quiet unless --verbose.
CHATTY_MODULES = (
    "mpld.solvers.relax",
    "mpld.solvers.fm",
    "mpld.flow",
)


def set_debug_lvl_for_modules(verbose: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.INFO
    for name in CHATTY_MODULES:
        logging.getLogger(name).setLevel(level)


def setup_logging(level: int = logging.INFO, verbose: bool = False, log_dir: Path | None = None) -> Path:
    """
    Configures the root logger to output to both stderr and a rotating file.
    Called once by the command-line entry point; the library never configures
    logging on import. Returns the log file path.
    """
    directory = log_dir or LOG_DIR
    directory.mkdir(parents=True, exist_ok=True)
    log_file = directory / LOG_FILE.name

    log_formatter = logging.Formatter(
        '%(asctime)s - %(levelname)s - %(name)s - %(message)s'
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(logging.DEBUG if verbose else level)
    set_debug_lvl_for_modules(verbose)

    # --- File Handler ---
    file_handler = RotatingFileHandler(
        log_file,
        maxBytes=5 * 1024 * 1024,  # 5 MB
        backupCount=5,
        encoding='utf-8'
    )
    file_handler.setFormatter(log_formatter)

    # --- Console Handler ---
    # stdout carries command output, so the console handler stays on stderr.
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(log_formatter)

    if root_logger.hasHandlers():
        root_logger.handlers.clear()

    root_logger.addHandler(file_handler)
    root_logger.addHandler(console_handler)

    logging.debug(f"Logging initialized. Persistent logs will be stored in: {log_file}")
    return log_file
