"""Exact rational arithmetic backend.

All durations, event times and LP results in this package are exact
rationals.  ``gmpy2.mpq`` is used when available (noticeably faster inside
the simplex); otherwise ``fractions.Fraction``.  Public interfaces always
hand out ``Fraction`` so callers never see backend types.
"""

from fractions import Fraction

try:
    from gmpy2 import mpq as _mpq

    def rat(p, q=1):
        return _mpq(p, q)

    HAVE_GMPY2 = True
except ImportError:  # pragma: no cover - exercised only without gmpy2
    def rat(p, q=1):
        return Fraction(p, q)

    HAVE_GMPY2 = False

RAT_ZERO = rat(0)
RAT_ONE = rat(1)


def to_fraction(x):
    """Convert a backend rational (or int/Fraction) to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(int(x.numerator), int(x.denominator))


def ceil_frac(x) -> int:
    """Exact ceiling of a rational."""
    return -((-x.numerator) // x.denominator)


def floor_frac(x) -> int:
    """Exact floor of a rational."""
    return x.numerator // x.denominator


def parse_rational(text) -> Fraction:
    """Parse 'p/q', decimal or integer text into an exact Fraction."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return Fraction(str(text))


def format_rational(x) -> str:
    """Serialize a rational as 'p' or 'p/q' (golden-file friendly)."""
    f = to_fraction(x)
    return str(f)
