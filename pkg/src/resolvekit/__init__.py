"""Exact resolution of marked ideals on affine charts, with equiresolution
checks for one-parameter families."""

__version__ = "0.1.0"

from .errors import (InputError, InvariantViolation, ParseError, ResolveKitError,  # noqa: F401
                     ResourceCapError)
from .exactalg import Poly, parse  # noqa: F401
from .idealkit import Ideal  # noqa: F401
from .geom import GENERIC, MarkedChart, Truncate, fiberize  # noqa: F401
from .resolver import principalize, resolve, resolve_embedded  # noqa: F401
from .families import FamilyObject, run_conditions  # noqa: F401
