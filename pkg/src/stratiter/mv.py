"""Complete MV-chains and assignments over them.

Two chains are supported: the unit interval [0, 1] with exact rational
values, and the finite chain {0, ..., k}.  Chain objects carry the
arithmetic on raw values (``Fraction`` or ``int``); :class:`MVValue` wraps
a raw value together with its chain for the checked scalar API, and
:class:`Assignment` is an immutable map from positions to raw values.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class ChainMismatch(ValueError):
    """Operands live on different chains."""


class DomainMismatch(ValueError):
    """An assignment does not have the positions an operation needs."""


@dataclass(frozen=True)
class UnitInterval:
    """The MV-chain [0, 1] with truncated sum and exact rationals."""

    @property
    def top(self):
        return ONE

    @property
    def bottom(self):
        return ZERO

    def coerce(self, x):
        if isinstance(x, float):
            raise TypeError("floating point values are not accepted; use Fraction")
        q = Fraction(x)
        if q < 0 or q > 1:
            raise ValueError(f"{x} is outside [0, 1]")
        return q

    def oplus(self, x, y):
        s = x + y
        return s if s < 1 else ONE

    def ominus(self, x, y):
        d = x - y
        return d if d > 0 else ZERO

    def complement(self, x):
        return ONE - x

    def __str__(self):
        return "[0,1]"


@dataclass(frozen=True)
class FiniteChain:
    """The MV-chain {0, ..., k} with truncated integer sum."""

    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"finite chain bound must be a positive integer, got {self.k!r}")

    @property
    def top(self):
        return self.k

    @property
    def bottom(self):
        return 0

    def coerce(self, x):
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            x = x.numerator
        if not isinstance(x, int):
            raise TypeError(f"{x!r} is not an integer")
        if x < 0 or x > self.k:
            raise ValueError(f"{x} is outside {{0..{self.k}}}")
        return x

    def oplus(self, x, y):
        s = x + y
        return s if s < self.k else self.k

    def ominus(self, x, y):
        d = x - y
        return d if d > 0 else 0

    def complement(self, x):
        return self.k - x

    def __str__(self):
        return f"{{0..{self.k}}}"


Chain = UnitInterval | FiniteChain


@dataclass(frozen=True, order=False)
class MVValue:
    """A single chain element, checked against its chain on every operation."""

    chain: Chain
    value: object

    def __post_init__(self):
        object.__setattr__(self, "value", self.chain.coerce(self.value))

    def _other(self, other):
        if not isinstance(other, MVValue):
            return NotImplemented
        if other.chain != self.chain:
            raise ChainMismatch(f"{self.chain} vs {other.chain}")
        return other.value

    def __lt__(self, other):
        return self.value < self._other(other)

    def __le__(self, other):
        return self.value <= self._other(other)

    def __gt__(self, other):
        return self.value > self._other(other)

    def __ge__(self, other):
        return self.value >= self._other(other)

    def __repr__(self):
        return f"MVValue({self.chain}, {self.value})"


def oplus(x: MVValue, y: MVValue) -> MVValue:
    return MVValue(x.chain, x.chain.oplus(x.value, x._other(y)))


def ominus(x: MVValue, y: MVValue) -> MVValue:
    return MVValue(x.chain, x.chain.ominus(x.value, x._other(y)))


def complement(x: MVValue) -> MVValue:
    return MVValue(x.chain, x.chain.complement(x.value))


def join(x: MVValue, y: MVValue) -> MVValue:
    # x ⊔ y = (x ⊖ y) ⊕ y
    return oplus(ominus(x, y), y)


def meet(x: MVValue, y: MVValue) -> MVValue:
    # x ⊓ y = x ⊖ (x ⊖ y)
    return ominus(x, ominus(x, y))


class Assignment(Mapping):
    """An immutable map from an ordered, finite set of positions to chain values.

    Iteration follows the domain order given at construction.  ``<=`` and
    ``<`` are the pointwise order and its strict version; equality is exact.
    """

    __slots__ = ("chain", "domain", "_values")

    def __init__(self, chain: Chain, values, domain=None, *, check=True):
        values = dict(values)
        if domain is None:
            domain = tuple(values)
        else:
            domain = tuple(domain)
            if len(domain) != len(values) or any(y not in values for y in domain):
                raise DomainMismatch("values must cover exactly the given domain")
        if check:
            values = {y: chain.coerce(values[y]) for y in domain}
        self.chain = chain
        self.domain = domain
        self._values = values

    @classmethod
    def constant(cls, chain: Chain, domain, value=None) -> Assignment:
        v = chain.bottom if value is None else chain.coerce(value)
        return cls(chain, {y: v for y in domain}, domain, check=False)

    def __getitem__(self, y):
        return self._values[y]

    def __iter__(self):
        return iter(self.domain)

    def __len__(self):
        return len(self.domain)

    def __eq__(self, other):
        if not isinstance(other, Assignment):
            return NotImplemented
        return self.chain == other.chain and self._values == other._values

    def __hash__(self):
        return hash((self.chain, frozenset(self._values.items())))

    def _same_shape(self, other):
        if self.chain != other.chain:
            raise ChainMismatch(f"{self.chain} vs {other.chain}")
        if self._values.keys() != other._values.keys():
            raise DomainMismatch("assignments have different domains")

    def __le__(self, other):
        self._same_shape(other)
        o = other._values
        return all(v <= o[y] for y, v in self._values.items())

    def __lt__(self, other):
        return self <= other and self != other

    def __ge__(self, other):
        return other <= self

    def __gt__(self, other):
        return other < self

    def __repr__(self):
        body = ", ".join(f"{y!r}: {self._values[y]}" for y in self.domain)
        return f"Assignment({self.chain}, {{{body}}})"

    def value(self, y) -> MVValue:
        return MVValue(self.chain, self._values[y])

    def support(self) -> frozenset:
        """The positions with a non-zero value."""
        return frozenset(y for y, v in self._values.items() if v != 0)

    def min_support_value(self):
        """Smallest non-zero value, or None on the all-zero assignment."""
        nz = [v for v in self._values.values() if v != 0]
        return min(nz) if nz else None

    def norm(self):
        if not self.domain:
            raise DomainMismatch("norm of an assignment with empty domain")
        return max(self._values.values())

    def ominus(self, other: Assignment) -> Assignment:
        self._same_shape(other)
        sub, o = self.chain.ominus, other._values
        return Assignment(self.chain, {y: sub(v, o[y]) for y, v in self._values.items()},
                          self.domain, check=False)

    def decrease(self, positions, delta) -> Assignment:
        """Subtract ``delta`` (truncated) at ``positions``, leave the rest."""
        positions = frozenset(positions)
        if not positions <= self._values.keys():
            raise DomainMismatch("decrease positions outside the domain")
        if isinstance(delta, MVValue):
            if delta.chain != self.chain:
                raise ChainMismatch(f"{self.chain} vs {delta.chain}")
            delta = delta.value
        delta = self.chain.coerce(delta)
        sub = self.chain.ominus
        vals = {y: (sub(v, delta) if y in positions else v) for y, v in self._values.items()}
        return Assignment(self.chain, vals, self.domain, check=False)

    def restrict(self, positions) -> Assignment:
        keep = [y for y in self.domain if y in positions]
        return Assignment(self.chain, {y: self._values[y] for y in keep}, keep, check=False)

    def replace(self, updates) -> Assignment:
        vals = dict(self._values)
        for y, v in dict(updates).items():
            if y not in vals:
                raise DomainMismatch(f"{y!r} is not in the domain")
            vals[y] = self.chain.coerce(v)
        return Assignment(self.chain, vals, self.domain, check=False)

    def raw(self) -> dict:
        """A fresh ``dict`` copy of the underlying values."""
        return dict(self._values)


def norm(a: Assignment):
    return MVValue(a.chain, a.norm())


def decrease(a: Assignment, positions, delta) -> Assignment:
    return a.decrease(positions, delta)
