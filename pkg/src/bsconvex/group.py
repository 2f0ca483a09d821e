"""The group B(1,p) = Z[1/p] ⋊ Z: elements, product formula, words.

An element is a pair ``(f, c)`` with ``f`` in Z[1/p] (the horocyclic
coordinate) and ``c`` an integer (the t-exponent).  The pair is a unique
normal form, so equality and hashing are structural.  The product is

    (f1, c1) * (f2, c2) = (f1 + f2 * p**(-c1), c1 + c2)

which encodes the defining relation t^-1 a t = a^p.

For search hot loops, an element is a plain ``(num, exp, c)`` int triple
("key"); :func:`mul_key` is the one multiplication kernel, and the public
:func:`multiply` delegates to it so there is a single code path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import arith
from .arith import PFraction
from .errors import ConfigError

Key = tuple[int, int, int]  # (num, exp, c) with (num, exp) normalized


@dataclass(frozen=True, slots=True)
class GroupElement:
    f: PFraction
    c: int

    def key(self) -> Key:
        return (self.f.num, self.f.exp, self.c)

    def render(self, p: int) -> str:
        return f"({self.f.render(p)}, {self.c})"

    def flag(self) -> str:
        """Compact ``num/exp:c`` form used by the CLI and CSV cells."""
        return f"{self.f.num}/{self.f.exp}:{self.c}"


IDENTITY = GroupElement(arith.ZERO, 0)
IDENTITY_KEY: Key = (0, 0, 0)


def identity() -> GroupElement:
    return IDENTITY


def from_key(key: Key) -> GroupElement:
    num, exp, c = key
    return GroupElement(PFraction(num, exp), c)


def element(num: int, exp: int, c: int, p: int) -> GroupElement:
    """Element (num/p**exp, c), normalizing the fraction."""
    return GroupElement(arith.normalize(num, exp, p), c)


def mul_key(a: Key, b: Key, p: int) -> Key:
    """Product of two elements in key form: the group law, inlined."""
    num, exp, c = a
    bnum, bexp, bc = b
    # b's fraction scaled by p**(-c)
    e2 = bexp + c
    if e2 < 0:
        bnum = bnum * p ** (-e2)
        e2 = 0
    if exp >= e2:
        m = num + bnum * p ** (exp - e2)
        e = exp
    else:
        m = num * p ** (e2 - exp) + bnum
        e = e2
    if m == 0:
        return (0, 0, c + bc)
    while e > 0 and m % p == 0:
        m //= p
        e -= 1
    return (m, e, c + bc)


def inv_key(a: Key, p: int) -> Key:
    """Inverse in key form: (f, c)^-1 = (-f * p**c, -c)."""
    num, exp, c = a
    e = exp - c
    if e < 0:
        num *= p ** (-e)
        e = 0
    if num == 0:
        return (0, 0, -c)
    while e > 0 and num % p == 0:
        num //= p
        e -= 1
    return (-num, e, -c)


def multiply(g: GroupElement, h: GroupElement, p: int) -> GroupElement:
    return from_key(mul_key(g.key(), h.key(), p))


def inverse(g: GroupElement, p: int) -> GroupElement:
    return from_key(inv_key(g.key(), p))


def conjugate(g: GroupElement, h: GroupElement, p: int) -> GroupElement:
    """h^-1 * g * h."""
    hk = h.key()
    return from_key(mul_key(mul_key(inv_key(hk, p), g.key(), p), hk, p))


def power(g: GroupElement, k: int, p: int) -> GroupElement:
    """g**k by repeated squaring with exact coordinates."""
    if k < 0:
        return power(inverse(g, p), -k, p)
    acc = IDENTITY_KEY
    base = g.key()
    while k:
        if k & 1:
            acc = mul_key(acc, base, p)
        base = mul_key(base, base, p)
        k >>= 1
    return from_key(acc)


def word_product(word: Sequence[int], gens: Sequence[GroupElement], p: int) -> GroupElement:
    """Evaluate a word of generator indices via the closed summation formula.

    The product of (f_1,c_1)...(f_n,c_n) is (sum_i f_i * p**(-(c_1+...+c_{i-1})),
    sum_i c_i).  This is an independent route from iterated :func:`multiply`;
    the two are required to agree exactly and the tests enforce it.
    """
    total = arith.ZERO
    cexp = 0
    for idx in word:
        if not 0 <= idx < len(gens):
            raise ConfigError(f"word index {idx} out of range for {len(gens)} generators")
        g = gens[idx]
        total = arith.add(total, arith.scale_p_pow(g.f, -cexp, p), p)
        cexp += g.c
    return GroupElement(total, cexp)


def parse_element(text: str, p: int) -> GroupElement:
    """Parse the flag syntax ``num/exp:c`` (exp defaults to 0: ``num:c``)."""
    text = text.strip()
    if ":" not in text:
        raise ConfigError(f"bad element {text!r}: expected num/exp:c")
    frac_s, c_s = text.rsplit(":", 1)
    try:
        c = int(c_s)
    except ValueError as e:
        raise ConfigError(f"bad element {text!r}: t-exponent must be an integer") from e
    return GroupElement(arith.parse_pfraction(frac_s, p), c)
