"""p-adic integers and the depth-first ordering they induce.

A branching tree with p children per node is coordinatized by p-adic
integers: the digit list (least significant first) is the branch choice
at successive levels.  The p-adic norm |x|_p = p^(-v), with v the index
of the first nonzero digit, measures depth: smaller norm means the
value sits deeper in the tree.  Comparison is therefore two-staged:

    vertical:   |x|_p < |y|_p  puts x strictly before y
    horizontal: equal norms are broken lexicographically on the digits
                from the shared valuation upward

Zero (all digits zero) has norm 0 and precedes everything else.  The
horizontal tie-break is a fixed convention of this module; any rule
that starts at the first nonzero digit would order the tree levels the
same way.
"""

from __future__ import annotations

from dataclasses import dataclass

BEFORE = "before"
AFTER = "after"
EQUAL = "equal"


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PAdicInt:
    """Finite-precision p-adic integer, digits least significant first.

    Digits are canonicalized on construction: trailing (most
    significant) zeros are stripped, so zero is the empty digit tuple.
    """

    p: int
    digits: tuple

    def __init__(self, p: int, digits):
        if not _is_prime(p):
            raise ValueError(f"base must be a prime >= 2, got {p}")
        digits = tuple(int(d) for d in digits)
        if any(d < 0 or d >= p for d in digits):
            raise ValueError(f"digits must lie in [0, {p})")
        while digits and digits[-1] == 0:
            digits = digits[:-1]
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "digits", digits)

    @classmethod
    def from_int(cls, p: int, value: int) -> "PAdicInt":
        if value < 0:
            raise ValueError(f"only non-negative values supported, got {value}")
        digits = []
        while value:
            value, d = divmod(value, p)
            digits.append(d)
        return cls(p, digits)

    def to_int(self) -> int:
        return sum(d * self.p**i for i, d in enumerate(self.digits))

    @property
    def valuation(self) -> int | None:
        """Index of the first nonzero digit; None for zero."""
        for i, d in enumerate(self.digits):
            if d:
                return i
        return None

    @property
    def norm(self) -> float:
        """|x|_p = p^(-valuation); 0 for the zero element."""
        v = self.valuation
        return 0.0 if v is None else float(self.p) ** (-v)


def padic_compare(x: PAdicInt, y: PAdicInt) -> str:
    """Order two p-adic integers: 'before', 'after' or 'equal'.

    Smaller norm (deeper tree level) comes first; equal norms compare
    lexicographically digit by digit starting at the common valuation.
    """
    if x.p != y.p:
        raise ValueError(f"mismatched bases {x.p} and {y.p}")
    if x.digits == y.digits:
        return EQUAL
    if x.norm != y.norm:
        return BEFORE if x.norm < y.norm else AFTER
    # equal nonzero norms: same valuation; compare upward from it
    v = x.valuation
    n = max(len(x.digits), len(y.digits))
    for i in range(v, n):
        dx = x.digits[i] if i < len(x.digits) else 0
        dy = y.digits[i] if i < len(y.digits) else 0
        if dx != dy:
            return BEFORE if dx < dy else AFTER
    return EQUAL
