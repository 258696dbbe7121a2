"""Constructors that bypass validation, for exercising checkers on bad input.

Nothing here is reachable from the public constructors or the DSL.
"""

import numpy as np

from .operators import AffineScale


def unchecked_affine_scale(beta, a):
    """``x -> beta * x - a`` without the ``beta in [0, 1]`` guard."""
    op = object.__new__(AffineScale)
    a = np.array(a, dtype=float).reshape(-1)
    a.flags.writeable = False
    for name, value in (("dim", a.size), ("label", None), ("beta", float(beta)), ("a", a)):
        object.__setattr__(op, name, value)
    return op
