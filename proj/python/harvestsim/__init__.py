"""Time series harvesting simulator for mobile ad hoc networks."""

try:
    from ._harvestsim import *  # noqa: F401,F403
    from ._harvestsim import __doc__  # noqa: F401
except ImportError:  # pragma: no cover - build-tree layout
    from _harvestsim import *  # noqa: F401,F403

__version__ = "0.1.0"
