"""
Colored console output on stderr.

stdout is reserved for machine-readable output (manifests and error JSON),
so every human-facing message goes through these helpers.
"""

import sys
from colorama import Fore, Style

_quiet = False


def set_quiet(quiet: bool) -> None:
    """Suppress everything except errors."""
    global _quiet
    _quiet = quiet


def is_quiet() -> bool:
    return _quiet


def _emit(color: str, message: str) -> None:
    print(f"{color}{message}{Style.RESET_ALL}", file=sys.stderr)


def info(message: str) -> None:
    if not _quiet:
        _emit(Fore.CYAN, message)


def success(message: str) -> None:
    if not _quiet:
        _emit(Fore.GREEN, message)


def warn(message: str) -> None:
    if not _quiet:
        _emit(Fore.YELLOW, f"Warning: {message}")


def detail(message: str) -> None:
    if not _quiet:
        _emit(Style.DIM, message)


def error(message: str) -> None:
    _emit(Fore.RED, message)
