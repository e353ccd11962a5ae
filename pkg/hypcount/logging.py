import logging
import sys

__all__ = ["init_logger"]


def init_logger(name: str | None = None, level: int = logging.INFO) -> logging.Logger:
    logger = logging.getLogger(name)
    if not logger.handlers:
        try:
            from rich.logging import RichHandler

            handler: logging.Handler = RichHandler(show_path=False, rich_tracebacks=False)
        except ImportError:
            handler = logging.StreamHandler(sys.stdout)
        logger.addHandler(handler)
    logger.setLevel(level)
    return logger
