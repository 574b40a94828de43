"""Exact scalar arithmetic: truncated power series in the deformation parameter h.

All coefficients are exact rationals (fractions.Fraction); there is no floating
point anywhere in the engine.  An HSeries represents an element of
Q[[h]] / (h^(N+1)) where N is the truncation order.  Two series with different
truncation orders never mix.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

try:
    from gmpy2 import mpq as _mpq
except ImportError:  # pragma: no cover
    _mpq = Fraction

_MPQ_T = type(_mpq(0))
_RATS = (int, Fraction, _MPQ_T)

DEFAULT_ORDER = 6

RatLike = Union[int, Fraction]

_F0 = _mpq(0)


class TruncationMismatch(ValueError):
    """Raised when two series with different truncation orders are combined."""


class NonUnitSeries(ValueError):
    """Raised when inverting a series whose constant term vanishes."""


class HSeries:
    """Polynomial in h modulo h^(order+1), with Fraction coefficients.

    Immutable; safe to share between tasks.
    """

    __slots__ = ("coeffs", "order", "_hash")

    def __init__(self, coeffs: Iterable[RatLike], order: int = DEFAULT_ORDER):
        cs = [_mpq(c) for c in coeffs]
        if len(cs) > order + 1:
            cs = cs[: order + 1]
        else:
            cs.extend([_F0] * (order + 1 - len(cs)))
        self.coeffs = tuple(cs)
        self.order = order
        self._hash = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def _raw(cls, coeffs: tuple, order: int) -> "HSeries":
        """Internal fast path: coeffs is already a tuple of order+1 Fractions."""
        obj = object.__new__(cls)
        obj.coeffs = coeffs
        obj.order = order
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c: RatLike, order: int = DEFAULT_ORDER) -> "HSeries":
        return cls([c], order)

    @classmethod
    def zero(cls, order: int = DEFAULT_ORDER) -> "HSeries":
        return cls([], order)

    @classmethod
    def one(cls, order: int = DEFAULT_ORDER) -> "HSeries":
        return cls([1], order)

    @classmethod
    def h_power(cls, k: int, c: RatLike = 1, order: int = DEFAULT_ORDER) -> "HSeries":
        """c * h^k (zero if k exceeds the truncation order)."""
        if k > order:
            return cls.zero(order)
        coeffs = [_F0] * k + [_mpq(c)]
        return cls(coeffs, order)

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def valuation(self) -> int:
        """Index of the lowest nonzero coefficient; order+1 for the zero series."""
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        return self.order + 1

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "HSeries") -> None:
        if self.order != other.order:
            raise TruncationMismatch(
                f"truncation orders differ: {self.order} vs {other.order}"
            )

    def __add__(self, other):
        if isinstance(other, _RATS):
            other = HSeries.const(other, self.order)
        self._check(other)
        return HSeries._raw(
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.order
        )

    __radd__ = __add__

    def __neg__(self):
        return HSeries._raw(tuple(-a for a in self.coeffs), self.order)

    def __sub__(self, other):
        if isinstance(other, _RATS):
            other = HSeries.const(other, self.order)
        self._check(other)
        return HSeries._raw(
            tuple(a - b for a, b in zip(self.coeffs, other.coeffs)), self.order
        )

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, _RATS):
            f = _mpq(other)
            return HSeries._raw(tuple(a * f for a in self.coeffs), self.order)
        self._check(other)
        n = self.order
        bc = other.coeffs
        out = [_F0] * (n + 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j in range(n + 1 - i):
                b = bc[j]
                if b:
                    out[i + j] += a * b
        return HSeries._raw(tuple(out), n)

    __rmul__ = __mul__

    def inv(self) -> "HSeries":
        """Multiplicative inverse modulo h^(order+1); requires a unit constant term."""
        if self.coeffs[0] == 0:
            raise NonUnitSeries("non-unit series")
        n = self.order
        out = [_F0] * (n + 1)
        out[0] = 1 / self.coeffs[0]
        for k in range(1, n + 1):
            s = _F0
            for i in range(1, k + 1):
                s += self.coeffs[i] * out[k - i]
            out[k] = -s / self.coeffs[0]
        return HSeries(out, n)

    def __truediv__(self, other):
        if isinstance(other, _RATS):
            return HSeries._raw(tuple(a / other for a in self.coeffs), self.order)
        self._check(other)
        return self * other.inv()

    def shift_down(self, k: int = 1) -> "HSeries":
        """Exact division by h^k.

        Only valid when the low k coefficients vanish.  The top k coefficients
        of the result are unknown after the shift; they are filled with zeros,
        so callers must only rely on orders <= order - k.
        """
        if any(c != 0 for c in self.coeffs[:k]):
            raise ValueError("series not divisible by h^%d" % k)
        return HSeries(list(self.coeffs[k:]), self.order)

    def shift_up(self, k: int = 1) -> "HSeries":
        """Multiplication by h^k."""
        return HSeries._raw(tuple([_F0] * k + list(self.coeffs))[: self.order + 1], self.order)

    def truncate(self, m: int) -> "HSeries":
        """Zero out all coefficients of h^j for j > m (same truncation order)."""
        return HSeries(list(self.coeffs[: m + 1]), self.order)

    def at_h0(self):
        return self.coeffs[0]

    def coefficient(self, k: int):
        return self.coeffs[k] if k <= self.order else _F0

    # -- comparison / hashing ---------------------------------------------

    def __eq__(self, other):
        if isinstance(other, _RATS):
            other = HSeries.const(other, self.order)
        if not isinstance(other, HSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.coeffs, self.order))
        return self._hash

    def __repr__(self):
        return f"HSeries({self})"

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            elif k == 1:
                terms.append(f"{c}*h" if c != 1 else "h")
            else:
                terms.append(f"{c}*h^{k}" if c != 1 else f"h^{k}")
        if not terms:
            return "0"
        return " + ".join(terms).replace("+ -", "- ")


def hs(c: RatLike, order: int = DEFAULT_ORDER) -> HSeries:
    """Shorthand constant-series constructor."""
    return HSeries.const(c, order)


def frac(p: int, q: int = 1) -> Fraction:
    return Fraction(p, q)
