"""Morse-trap Gross-Pitaevskii toolkit."""

from ._morsegpe import *  # noqa: F401,F403
from ._morsegpe import MorseGPEError, __version__  # noqa: F401
