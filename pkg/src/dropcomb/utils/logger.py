"""Logging module for DropComb."""
import logging
import sys
from typing import Optional


class DropLogger:
    """Application logger for DropComb.

    Wraps a stdlib logger with a console handler and, when a path is
    configured, a file handler sharing the same format.
    """

    def __init__(self, name: str = "DropComb", level: int = logging.INFO,
                 log_file: Optional[str] = None) -> None:
        """Initialize the logger.

        Args:
            name: Name of the logger instance
            level: Logging level (default: INFO)
            log_file: Optional path of a log file to append to
        """
        self.logger = logging.getLogger(name)
        self.logger.setLevel(level)
        self._formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )
        self._file_handler: Optional[logging.FileHandler] = None

        if not self.logger.handlers:
            self._setup_handlers()
        if log_file:
            self.set_log_file(log_file)

    def _setup_handlers(self) -> None:
        """Set up the console handler."""
        console_handler = logging.StreamHandler(sys.stdout)
        console_handler.setFormatter(self._formatter)
        self.logger.addHandler(console_handler)

    def set_log_file(self, log_file: Optional[str]) -> None:
        """Replace the file handler, or drop it when ``log_file`` is None."""
        if self._file_handler is not None:
            self.logger.removeHandler(self._file_handler)
            self._file_handler.close()
            self._file_handler = None
        if log_file:
            self._file_handler = logging.FileHandler(log_file, encoding='utf-8')
            self._file_handler.setFormatter(self._formatter)
            self.logger.addHandler(self._file_handler)

    def configure(self, level: int = logging.INFO,
                  log_file: Optional[str] = None) -> None:
        """Re-target the logger (used by the command line entry point)."""
        self.logger.setLevel(level)
        self.set_log_file(log_file)

    def debug(self, message: str) -> None:
        """Log a debug message."""
        self.logger.debug(message)

    def info(self, message: str) -> None:
        """Log an info message."""
        self.logger.info(message)

    def warning(self, message: str) -> None:
        """Log a warning message."""
        self.logger.warning(message)

    def error(self, message: str) -> None:
        """Log an error message."""
        self.logger.error(message)

    def critical(self, message: str) -> None:
        """Log a critical message."""
        self.logger.critical(message)


# Create a default logger instance
logger = DropLogger()
