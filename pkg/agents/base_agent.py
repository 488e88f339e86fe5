"""Base agent class for all QUARK command agents."""
import logging
from abc import ABC, abstractmethod
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional, Union

from core.config import RunConfig, write_config_file
from core.constants import CONFIG_SNAPSHOT_FILE, RUN_LOG_FILE
from core.logger import attach_file_handler, get_logger
from core.utils import atomic_write


class BaseAgent(ABC):
    """Base class for the agents behind each command; one agent owns one run directory."""

    def __init__(self, name: str, config: RunConfig, run_dir: Optional[Union[str, Path]] = None):
        """
        Initialize the agent.

        Args:
            name: Agent name
            config: Fully resolved run configuration
            run_dir: Output directory; defaults to config.output_dir
        """
        self.name = name
        self.config = config
        self.run_dir = Path(run_dir or config.output_dir)
        self.logger = get_logger(f"agents.{name}")

    @abstractmethod
    def run(self, **kwargs):
        """
        Run the agent's command.

        Args:
            **kwargs: Agent-specific parameters
        """
        raise NotImplementedError(f"{self.__class__.__name__} must implement run()")

    @contextmanager
    def run_context(self, log_to_file: bool = True) -> Iterator[Path]:
        """
        Create the run directory, snapshot the config and mirror logging into run.log.

        Yields:
            The run directory
        """
        self.run_dir.mkdir(parents=True, exist_ok=True)
        write_config_file(self.run_dir / CONFIG_SNAPSHOT_FILE, self.config)
        handler = None
        if log_to_file:
            handler = attach_file_handler(logging.getLogger(), self.run_dir / RUN_LOG_FILE)
        try:
            self.log(f"Run directory: {self.run_dir}")
            yield self.run_dir
        finally:
            if handler is not None:
                logging.getLogger().removeHandler(handler)
                handler.close()

    def save_artifact(self, filename: str, text: str) -> Path:
        """
        Write a text artifact atomically into the run directory.

        Args:
            filename: File name relative to the run directory
            text: File contents

        Returns:
            Path of the written file
        """
        path = self.run_dir / filename
        with atomic_write(path) as handle:
            handle.write(text)
        self.log(f"Wrote {path}", "debug")
        return path

    def log(self, message: str, level: str = "info"):
        """
        Log a message.

        Args:
            message: Message to log
            level: Log level ('debug', 'info', 'warning', 'error')
        """
        log_method = getattr(self.logger, level.lower(), self.logger.info)
        log_method(message)
