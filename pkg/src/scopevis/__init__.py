"""Aiming analytics and composite visualization videos from rifle-scope footage."""
from ._backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
