"""Road-graph HMM place recognition: filtering, smoothing and Monte Carlo evaluation."""

from ._core import *  # noqa: F401,F403
from ._core import MapError, InferenceError  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
