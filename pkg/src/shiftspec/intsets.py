"""Arithmetic progressions over the integers, clipped to an interval.

Every integer rule in :mod:`shiftspec.index_maps` is decomposed into cells
of the form ``{n : lo <= n <= hi, n = r (mod m)}``; images and preimages of
affine pieces stay in this family, which is what makes injectivity,
surjectivity and involution checks exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterator, Optional


def _ceil_div(p: int, q: int) -> int:
    return -((-p) // q)


def crt(r1: int, m1: int, r2: int, m2: int) -> Optional[tuple[int, int]]:
    """Solve ``x = r1 (mod m1)``, ``x = r2 (mod m2)`` for non-coprime moduli.

    Returns ``(r, lcm)`` or ``None`` when the system is inconsistent.
    """
    g = gcd(m1, m2)
    if (r2 - r1) % g:
        return None
    lcm = m1 // g * m2
    if lcm == 1:
        return 0, 1
    m1g, m2g = m1 // g, m2 // g
    k = ((r2 - r1) // g) * pow(m1g, -1, m2g) % m2g if m2g > 1 else 0
    return (r1 + m1 * k) % lcm, lcm


@dataclass(frozen=True)
class AP:
    """Nonempty set ``{n : lo <= n <= hi, n = residue (mod modulus)}``.

    ``lo``/``hi`` of ``None`` mean unbounded. Instances are normalized so
    that finite bounds are members; use :meth:`make`, which returns ``None``
    for the empty set.
    """

    lo: Optional[int]
    hi: Optional[int]
    residue: int
    modulus: int

    @classmethod
    def make(cls, lo: Optional[int], hi: Optional[int], residue: int = 0, modulus: int = 1) -> Optional["AP"]:
        if modulus < 1:
            raise ValueError("modulus must be >= 1")
        residue %= modulus
        if lo is not None:
            lo = lo + (residue - lo) % modulus
        if hi is not None:
            hi = hi - (hi - residue) % modulus
        if lo is not None and hi is not None and lo > hi:
            return None
        if lo is not None and lo == hi:
            # a single point is its own residue class
            return cls(lo, lo, 0, 1)
        return cls(lo, hi, residue, modulus)

    @classmethod
    def everything(cls) -> "AP":
        return cls(None, None, 0, 1)

    @classmethod
    def point(cls, n: int) -> "AP":
        return cls(n, n, 0, 1)

    @property
    def is_finite(self) -> bool:
        return self.lo is not None and self.hi is not None

    def __len__(self) -> int:
        if not self.is_finite:
            raise OverflowError("infinite progression has no length")
        return (self.hi - self.lo) // self.modulus + 1

    def __contains__(self, n: object) -> bool:
        if not isinstance(n, int) or isinstance(n, bool):
            return False
        if self.lo is not None and n < self.lo:
            return False
        if self.hi is not None and n > self.hi:
            return False
        return (n - self.residue) % self.modulus == 0

    def __iter__(self) -> Iterator[int]:
        if not self.is_finite:
            raise OverflowError("refusing to iterate an infinite progression")
        return iter(range(self.lo, self.hi + 1, self.modulus))

    def some_members(self, count: int) -> list[int]:
        """Up to ``count`` members, starting from the end closest to zero."""
        if self.lo is not None and (self.hi is None or abs(self.lo) <= abs(self.hi)):
            start, step = self.lo, self.modulus
        elif self.hi is not None:
            start, step = self.hi, -self.modulus
        else:
            start, step = self.residue, self.modulus
        out = []
        n = start
        while len(out) < count and n in self:
            out.append(n)
            n += step
        return out

    def members_between(self, lo: int, hi: int) -> Iterator[int]:
        clipped = self.intersect(AP(lo, hi, 0, 1))
        return iter(()) if clipped is None else iter(clipped)

    def intersect(self, other: "AP") -> Optional["AP"]:
        solved = crt(self.residue, self.modulus, other.residue, other.modulus)
        if solved is None:
            return None
        lo = _max_opt(self.lo, other.lo)
        hi = _min_opt(self.hi, other.hi)
        return AP.make(lo, hi, *solved)

    def negate(self) -> "AP":
        lo = None if self.hi is None else -self.hi
        hi = None if self.lo is None else -self.lo
        return AP.make(lo, hi, -self.residue, self.modulus)

    def affine_image(self, a: int, b: int) -> "AP":
        """``{a*n + b : n in self}``; exact for ``a != 0``."""
        if a == 0:
            return AP.point(b)
        lo = None if self.lo is None else a * self.lo + b
        hi = None if self.hi is None else a * self.hi + b
        if a < 0:
            lo, hi = hi, lo
        result = AP.make(lo, hi, a * self.residue + b, abs(a) * self.modulus)
        assert result is not None
        return result

    def affine_preimage(self, a: int, b: int, target: "AP") -> Optional["AP"]:
        """``{n in self : a*n + b in target}`` for ``a != 0``."""
        if a == 0:
            raise ValueError("constant pieces have no progression preimage")
        # a*n = target.residue - b (mod target.modulus)
        g = gcd(a, target.modulus)
        rhs = target.residue - b
        if rhs % g:
            return None
        mod = target.modulus // g
        res = (rhs // g) * pow(a // g, -1, mod) % mod if mod > 1 else 0
        if a > 0:
            lo = None if target.lo is None else _ceil_div(target.lo - b, a)
            hi = None if target.hi is None else (target.hi - b) // a
        else:
            lo = None if target.hi is None else _ceil_div(target.hi - b, a)
            hi = None if target.lo is None else (target.lo - b) // a
        solved = AP.make(lo, hi, res, mod)
        return None if solved is None else self.intersect(solved)

    def finite_bounds(self) -> list[int]:
        return [v for v in (self.lo, self.hi) if v is not None]


def _max_opt(x: Optional[int], y: Optional[int]) -> Optional[int]:
    if x is None:
        return y
    if y is None:
        return x
    return max(x, y)


def _min_opt(x: Optional[int], y: Optional[int]) -> Optional[int]:
    if x is None:
        return y
    if y is None:
        return x
    return min(x, y)
