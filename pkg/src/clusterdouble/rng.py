"""SplitMix64: a tiny generator that is easy to reproduce in any language.

State update and output mixing follow the reference constants; every draw
used by the verification suites is derived from :meth:`SplitMix64.next_u64`
by the documented reductions below, so a run can be replayed bit for bit
elsewhere.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = ["SplitMix64"]

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """``lo + next_u64() mod (hi - lo + 1)``; inclusive bounds."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.next_u64() % (hi - lo + 1)

    def choice(self, items):
        return items[self.randint(0, len(items) - 1)]

    def rational(self, max_num: int = 9, max_den: int = 9, positive: bool = False) -> Fraction:
        """Nonzero ``p/q`` with ``1 <= |p| <= max_num`` and ``1 <= q <= max_den``.

        Draw order: numerator, denominator, then (unless ``positive``) one
        sign draw whose lowest bit selects a negative value.
        """
        p = self.randint(1, max_num)
        q = self.randint(1, max_den)
        if not positive and self.next_u64() & 1:
            p = -p
        return Fraction(p, q)

    def fork(self) -> "SplitMix64":
        """An independent stream seeded from the next output."""
        return SplitMix64(self.next_u64())
