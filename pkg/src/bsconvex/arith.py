"""Exact arithmetic on Z[1/p]: fractions whose denominator is a power of p.

A value is stored as a normalized pair ``(num, exp)`` meaning ``num / p**exp``
with ``exp >= 0`` minimal, i.e. either ``exp == 0`` or ``p`` does not divide
``num`` (and ``num == 0`` forces ``exp == 0``).  The base ``p`` is any integer
with ``|p| >= 2`` and may be negative; signs live entirely in the numerator,
so the denominator ``|p|**exp`` is always a positive integer.

Everything here is integer arithmetic on arbitrary-precision ints; there is
no floating point and no general rational reduction (denominators are always
p-powers by construction).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConfigError


def check_base(p: int) -> int:
    """Validate the base: an integer with |p| >= 2 (negative allowed)."""
    if not isinstance(p, int) or abs(p) < 2:
        raise ConfigError(f"base must be an integer with |p| >= 2, got {p!r}")
    return p


def normalize_pair(num: int, exp: int, p: int) -> tuple[int, int]:
    """Normalized ``(num, exp)`` for the value ``num / p**exp``, ``exp >= 0``."""
    if exp < 0:
        raise ValueError(f"exponent must be nonnegative, got {exp}")
    if num == 0:
        return (0, 0)
    while exp > 0 and num % p == 0:
        num //= p
        exp -= 1
    return (num, exp)


@dataclass(frozen=True, slots=True)
class PFraction:
    """A normalized element of Z[1/p]: ``num / p**exp``.

    Instances are immutable and hash on the pair, which is the canonical
    form used as a deduplication key everywhere downstream.  Construct via
    :func:`normalize` unless the pair is already known to be normalized.
    """

    num: int
    exp: int

    def is_zero(self) -> bool:
        return self.num == 0

    def as_fraction(self, p: int) -> Fraction:
        """Exact value as a stdlib Fraction (reports and test oracles only)."""
        return Fraction(self.num, p ** self.exp)

    def render(self, p: int) -> str:
        """Exact text form ``num/p^exp``, with the power omitted when exp=0."""
        if self.exp == 0:
            return str(self.num)
        return f"{self.num}/{p}^{self.exp}"


ZERO = PFraction(0, 0)
ONE = PFraction(1, 0)


def normalize(num: int, exp: int, p: int) -> PFraction:
    return PFraction(*normalize_pair(num, exp, p))


def add(a: PFraction, b: PFraction, p: int) -> PFraction:
    """Exact sum of two normalized values over the same base."""
    if a.exp >= b.exp:
        num = a.num + b.num * p ** (a.exp - b.exp)
        exp = a.exp
    else:
        num = a.num * p ** (b.exp - a.exp) + b.num
        exp = b.exp
    return PFraction(*normalize_pair(num, exp, p))


def negate(a: PFraction) -> PFraction:
    # Sign flips cannot introduce divisibility by p, so the pair stays normalized.
    return PFraction(-a.num, a.exp)


def sub(a: PFraction, b: PFraction, p: int) -> PFraction:
    return add(a, negate(b), p)


def scale_p_pow(a: PFraction, k: int, p: int) -> PFraction:
    """Exact value ``a * p**k``; negative k raises the denominator exponent."""
    exp = a.exp - k
    num = a.num
    if exp < 0:
        num *= p ** (-exp)
        exp = 0
    return PFraction(*normalize_pair(num, exp, p))


def denom(a: PFraction, p: int) -> int:
    """The denominator ``|p|**exp``, always a positive integer."""
    return abs(p) ** a.exp


def abs_compare(a: PFraction, b: PFraction, p: int) -> int:
    """Compare |a| and |b| exactly: -1, 0 or 1.

    Cross-multiplies with |p|-powers so no division or floating point occurs.
    """
    q = abs(p)
    lhs = abs(a.num) * q ** b.exp
    rhs = abs(b.num) * q ** a.exp
    return (lhs > rhs) - (lhs < rhs)


def abs_fraction(a: PFraction, p: int) -> Fraction:
    """|a| as an exact Fraction (used by audit reports)."""
    return Fraction(abs(a.num), abs(p) ** a.exp)


def parse_pfraction(text: str, p: int) -> PFraction:
    """Parse ``num`` or ``num/exp`` (exp = denominator exponent, default 0)."""
    text = text.strip()
    if "/" in text:
        num_s, exp_s = text.split("/", 1)
    else:
        num_s, exp_s = text, "0"
    try:
        num = int(num_s)
        exp = int(exp_s)
    except ValueError as e:
        raise ConfigError(f"bad fraction {text!r}: expected num or num/exp") from e
    if exp < 0:
        raise ConfigError(f"bad fraction {text!r}: exponent must be >= 0")
    return normalize(num, exp, p)
