"""
Console logging for the screening pipeline
Color-coded, leveled lines on stderr so stdout reports stay reproducible
"""

import os
import sys
from typing import Optional, TextIO

from colorama import Fore, Style, init

# Strip ANSI codes automatically when stderr is not a terminal
init(autoreset=True)

_LEVELS = {
    "success": (Fore.GREEN, "✓"),
    "error": (Fore.RED, "✗"),
    "warning": (Fore.YELLOW, "⚠"),
    "info": (Fore.CYAN, "ℹ"),
}


class Console:
    """Leveled console logger."""

    def __init__(self, verbose: Optional[bool] = None, stream: Optional[TextIO] = None):
        """
        Initialize console.

        Args:
            verbose: Emit log_verbose lines (default from DISCSCREEN_VERBOSE)
            stream: Output stream (default stderr)
        """
        if verbose is None:
            verbose = os.getenv("DISCSCREEN_VERBOSE", "0").lower() in ("1", "true", "yes")
        self.verbose = verbose
        self.stream = stream

    def _write(self, text: str) -> None:
        print(text, file=self.stream or sys.stderr, flush=True)

    def log(self, message: str, level: str = "info") -> None:
        """Log message with color coding."""
        color, symbol = _LEVELS.get(level, ("", ""))
        if not color:
            self._write(message)
            return
        self._write(f"{color}{symbol} {message}{Style.RESET_ALL}")

    def log_verbose(self, message: str) -> None:
        """Log verbose message."""
        if self.verbose:
            self._write(f"{Fore.MAGENTA}  → {message}{Style.RESET_ALL}")


_default_console = Console()


def get_console() -> Console:
    """Shared console used by library code that was not handed one."""
    return _default_console


def set_console(console: Console) -> None:
    """Replace the shared console (the CLI installs one honoring --verbose)."""
    global _default_console
    _default_console = console
