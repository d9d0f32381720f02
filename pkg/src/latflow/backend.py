"""Scalar backends: exact rationals (gmpy2 if present) and plain floats.

Every compound object in this package (matrices, lattices, boxes, window
specs) is tagged with a backend, either "exact" or "float".  Exact objects
hold rationals and all comparisons are decided exactly; float objects hold
machine floats and decision functions either refuse them or attach margin
warnings.  Mixing backends in one operation is a hard error, never a silent
coercion.
"""

from __future__ import annotations

import math
import warnings
from fractions import Fraction

try:  # gmpy2's mpq is drop-in for Fraction here and much faster
    from gmpy2 import mpq as Rat

    _HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - exercised only without gmpy2
    Rat = Fraction
    _HAVE_GMPY2 = False

EXACT = "exact"
FLOAT = "float"

#: relative inflation applied to float-path sphere radii so that points
#: sitting numerically on the boundary are not lost to roundoff
FLOAT_SLACK = 1e-9


class BackendMismatch(TypeError):
    """Operands carry different scalar backends."""


class BudgetExceeded(RuntimeError):
    """An enumeration walked more nodes than its budget allows."""


class FaceProximity(UserWarning):
    """A float-backend point sits within 1e-9 of a box face."""


def rat(x):
    """Coerce x to the exact rational type.

    Accepts ints, Fractions, mpq, and strings like "3/4" or "-2". Floats are
    rejected: silently rationalizing a float is exactly the bug the backend
    tagging exists to prevent.
    """
    if isinstance(x, float):
        raise BackendMismatch(
            "refusing to coerce float %r into the exact backend; "
            "use Fraction/int/str or the float backend" % (x,)
        )
    if isinstance(x, int):
        return Rat(x)
    if isinstance(x, (Fraction, str)):
        return Rat(x)
    if type(x) is type(Rat(0)):
        return x
    if isinstance(x, Rat if isinstance(Rat, type) else tuple()):  # pragma: no cover
        return x
    # last resort: things exposing integer numerator/denominator
    num = getattr(x, "numerator", None)
    den = getattr(x, "denominator", None)
    if isinstance(num, int) and isinstance(den, int):
        return Rat(num, den)
    try:
        n2, d2 = int(num), int(den)  # gmpy2 mpz numerator/denominator
        return Rat(n2, d2)
    except (TypeError, ValueError):
        pass
    raise BackendMismatch("cannot coerce %r into the exact backend" % (x,))


def scalar(x, backend):
    """Coerce x to the given backend's scalar type."""
    if backend == EXACT:
        return rat(x)
    if backend == FLOAT:
        return float(x)
    raise ValueError("unknown backend %r" % (backend,))


def is_zero(x):
    return x == 0


def rat_floor(q) -> int:
    """Exact floor of a rational."""
    q = rat(q)
    return int(q.numerator) // int(q.denominator)


def rat_ceil(q) -> int:
    q = rat(q)
    return -((-int(q.numerator)) // int(q.denominator))


def as_fraction(q) -> Fraction:
    """Exact value as a stdlib Fraction (for JSON/printing interop)."""
    return Fraction(int(q.numerator), int(q.denominator))


def format_scalar(x, backend) -> str:
    """Serialize one scalar: 'num/den' on the exact backend, repr on float."""
    if backend == EXACT:
        q = rat(x)
        n, d = int(q.numerator), int(q.denominator)
        return "%d" % n if d == 1 else "%d/%d" % (n, d)
    return repr(float(x))


def parse_scalar(s: str, backend):
    if backend == EXACT:
        return rat(str(s))
    return float(s)


def check_same_backend(*backends):
    first = backends[0]
    for b in backends[1:]:
        if b != first:
            raise BackendMismatch(
                "mixed backends in one operation: %r vs %r" % (first, b)
            )
    return first


def warn_if_near_face(margin: float, where: str = "") -> None:
    if abs(margin) <= FLOAT_SLACK:
        warnings.warn(
            "float-backend point within %.1e of a box face%s; "
            "the in/out decision is not trustworthy at this precision"
            % (FLOAT_SLACK, (" (%s)" % where) if where else ""),
            FaceProximity,
            stacklevel=3,
        )


def sqrt_float(x: float) -> float:
    return math.sqrt(x) if x > 0.0 else 0.0
