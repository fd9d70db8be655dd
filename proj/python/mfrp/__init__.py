"""Lower bounds on log partition functions of pairwise binary models.

Mean-field coordinate ascent sharpened by random parity-constraint
projections, with exact enumeration references for small instances.
"""

from ._core import *  # noqa: F401,F403

__all__ = [name for name in dir() if not name.startswith("_")]
