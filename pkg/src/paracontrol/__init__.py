"""Paraphrase generation controlled by 40 linguistic attributes."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("paracontrol")
except PackageNotFoundError:  # running from a source tree without installation
    __version__ = "0.0.0"

__all__ = ["__version__"]
