from abc import ABC, abstractmethod
import argparse
from . import settings


class Base_Component(ABC):
    _instances = {}

    def __init__(self, name="", title="", config=None):
        """
        The name parameter must not be empty: it becomes the subcommand name.
        """
        self.registered = False
        self.name = name
        self.title = title if title else name
        self.threads = 1
        self.show_progress = True
        self.csv_digits = 12
        if config is not None:
            self.update_cfg(config)
        super().__init__()

    def register(self, subparsers):
        if not self.registered:
            self.registered = True
            parser = subparsers.add_parser(self.name, help=self.title, description=self.title)
            self._arguments(parser)
            parser.set_defaults(component=self)
            return parser
        else:
            raise RuntimeError(f"Command '{self.name}' is already registered")

    def update_cfg(self, config: settings.Settings):
        """
        Receive the global configuration and store the desired settings in class members.
        """
        self.threads = config.concurrency_count
        self.show_progress = config.show_progress
        self.csv_digits = config.csv_digits

    def check_args(self, args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
        """
        Reject invalid flag combinations with parser.error (exit code 2).
        """
        pass

    @abstractmethod
    def _arguments(self, parser: argparse.ArgumentParser) -> None:
        """
        Define the subcommand flags here.
        """
        raise NotImplementedError

    @abstractmethod
    def run(self, args: argparse.Namespace) -> int:
        """
        Execute the command and return the process exit code.
        """
        raise NotImplementedError

    def __new__(cls, *args, **kwargs):
        if cls not in cls._instances:
            cls._instances[cls] = super().__new__(cls)
        return cls._instances[cls]
