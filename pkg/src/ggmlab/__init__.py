"""Generic group model simulators, compression codecs and lower-bound experiments."""
from __future__ import annotations

__version__ = "0.1.0"
