"""Real-analytic extension of the 3x+1 map: certified numerics and experiments."""

from .errors import *  # noqa: F401,F403
from .kernel import DEFAULT_POLICY, Ball, PrecisionPolicy
from .maps import f_ext, t_map, u_map

__version__ = "0.1.0"

__all__ = ["Ball", "PrecisionPolicy", "DEFAULT_POLICY", "f_ext", "t_map", "u_map", "__version__"]
