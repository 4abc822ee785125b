"""Min/max-decompositions, strategies and the two strategy-iteration loops.

The loops in :func:`si_above` and :func:`si_below` only talk to a
decomposition object through a small protocol:

``kind``                 ``"min"`` or ``"max"``
``initial()``            the starting strategy
``restrict(C)``          the function ``f_C`` (anything with ``evaluate``)
``induced()``            the function ``f`` (``evaluate`` and ``approximation``)
``improve(C, mu)``       a stable improvement of ``C`` at ``mu = mu f_C``, or None
``argbest(a)``           a strategy choosing an optimal option at ``a``
``check_fixpoint(C, mu)`` raise unless ``f_C(mu) = mu``
``strategies()``         iterate over all strategies (for the brute-force oracle)

:class:`Decomposition` implements it for option lists of combinator terms;
the behavioural-distance instance in :mod:`stratiter.pametrics` provides its
own implementation.
"""

from __future__ import annotations

from collections.abc import Mapping
from itertools import product
from math import prod
from typing import NamedTuple

from .mv import Assignment
from .nonexp import (
    Compose,
    DisjointUnion,
    MaxRel,
    MinRel,
    NotAFixpoint,
    Reindex,
    decrease_to_prefixpoint,
    nu_approx,
)

MIN, MAX = "min", "max"


class StrategySpaceTooLarge(ValueError):
    pass


class Strategy(Mapping):
    """An immutable choice ``y -> option index``."""

    __slots__ = ("_choice",)

    def __init__(self, choice):
        self._choice = dict(choice)

    def __getitem__(self, y):
        return self._choice[y]

    def __iter__(self):
        return iter(self._choice)

    def __len__(self):
        return len(self._choice)

    def __hash__(self):
        return hash(frozenset(self._choice.items()))

    def __eq__(self, other):
        if isinstance(other, Strategy):
            return self._choice == other._choice
        return NotImplemented

    def replace(self, updates) -> Strategy:
        choice = dict(self._choice)
        choice.update(updates)
        return Strategy(choice)

    def __repr__(self):
        return f"Strategy({self._choice!r})"


class Skip(NamedTuple):
    """A skip step from above: the vicious cycle and the decrease used."""

    cycle: frozenset
    delta: object
    prefixpoint: Assignment


class TraceStep(NamedTuple):
    index: int
    strategy: object
    values: Assignment
    skip: Skip | None = None


class Solution(NamedTuple):
    values: Assignment
    strategy: object
    trace: list

    @property
    def iterations(self) -> int:
        """Number of strategy switches performed (the last trace index)."""
        return self.trace[-1].index if self.trace else 0


class Decomposition:
    """Per-position option lists of terms, each of type ``M^Y -> M^{{y}}``.

    ``labels`` optionally names the options (for instance by the successor
    they move to) for display.
    """

    def __init__(self, kind, options, chain, labels=None):
        if kind not in (MIN, MAX):
            raise ValueError(f"kind must be {MIN!r} or {MAX!r}")
        self.kind = kind
        self.chain = chain
        self.options = {}
        for y, opts in dict(options).items():
            opts = tuple(opts)
            if not opts:
                raise ValueError(f"no options for position {y!r}")
            for h in opts:
                if tuple(h.cod) != (y,):
                    raise ValueError(f"option for {y!r} must have codomain ({y!r},)")
            self.options[y] = opts
        self.positions = tuple(self.options)
        self.labels = {y: tuple(labels[y]) if labels and y in labels else tuple(range(len(o)))
                       for y, o in self.options.items()}
        self._induced = None

    def count(self) -> int:
        """Number of strategies, i.e. the product of option counts."""
        return prod(len(o) for o in self.options.values())

    def initial(self) -> Strategy:
        return Strategy({y: 0 for y in self.positions})

    def random_initial(self, rng) -> Strategy:
        return Strategy({y: rng.randrange(len(o)) for y, o in self.options.items()})

    def strategies(self):
        keys = self.positions
        for combo in product(*(range(len(self.options[y])) for y in keys)):
            yield Strategy(dict(zip(keys, combo)))

    def _check_total(self, C):
        for y in self.positions:
            if y not in C:
                raise ValueError(f"strategy has no choice for {y!r}")
            if not 0 <= C[y] < len(self.options[y]):
                raise ValueError(f"choice {C[y]} out of range at {y!r}")

    def restrict(self, C) -> DisjointUnion:
        """``f_C``: the chosen option at every position."""
        self._check_total(C)
        return DisjointUnion([self.options[y][C[y]] for y in self.positions])

    def induced(self):
        """``f`` as ``min_u . (disjoint union of all options)`` (or ``max_u``)."""
        if self._induced is None:
            parts, pre = [], {}
            for y, opts in self.options.items():
                pre[y] = []
                for i, h in enumerate(opts):
                    parts.append(Compose(Reindex({(y, i): y}), h))
                    pre[y].append((y, i))
            outer = MinRel(pre) if self.kind == MIN else MaxRel(pre)
            self._induced = Compose(outer, DisjointUnion(parts))
        return self._induced

    def option_values(self, a: Assignment) -> dict:
        """``y -> [h(a)(y) for each option h]``."""
        vals, chain = a._values, a.chain
        return {y: [h._eval(vals, chain)[y] for h in opts] for y, opts in self.options.items()}

    def _best(self, values):
        best = min(values) if self.kind == MIN else max(values)
        return values.index(best), best

    def argbest(self, a: Assignment) -> Strategy:
        """Optimal option at ``a`` everywhere; lowest index on ties."""
        return Strategy({y: self._best(v)[0] for y, v in self.option_values(a).items()})

    def check_fixpoint(self, C, mu: Assignment):
        if self.restrict(C).evaluate(mu) != mu:
            raise NotAFixpoint("inner solver returned a non-fixpoint of f_C")

    def improve(self, C, mu: Assignment):
        """Stable improvement at ``mu = mu f_C``, or None if ``mu`` is a fixpoint of f.

        A choice changes only where some option is strictly better than the
        current value; there the lowest-index optimal option is taken.
        """
        self.check_fixpoint(C, mu)
        changes = {}
        better = (lambda x, y: x < y) if self.kind == MIN else (lambda x, y: x > y)
        for y, v in self.option_values(mu).items():
            i, best = self._best(v)
            if better(best, mu[y]):
                changes[y] = i
        return Strategy(C).replace(changes) if changes else None

    def plain_improve(self, C, mu: Assignment, prefer_last=False):
        """Non-stable improvement: an optimal option at every position.

        Only meant to exhibit why stability matters when iterating from below.
        """
        self.check_fixpoint(C, mu)
        choice = {}
        for y, v in self.option_values(mu).items():
            best = min(v) if self.kind == MIN else max(v)
            idx = [i for i, x in enumerate(v) if x == best]
            choice[y] = idx[-1] if prefer_last else idx[0]
        if self.induced().evaluate(mu) == mu:
            return None
        return Strategy(choice)

    def describe(self, C) -> dict:
        return {y: self.labels[y][C[y]] for y in self.positions if len(self.options[y]) > 1}


def induced_function(dec):
    return dec.induced()


def restrict(dec, C):
    return dec.restrict(C)


def min_improve(dec, C, mu):
    if dec.kind != MIN:
        raise ValueError("min_improve needs a min-decomposition")
    return dec.improve(C, mu)


def max_improve_stable(dec, C, mu):
    if dec.kind != MAX:
        raise ValueError("max_improve_stable needs a max-decomposition")
    return dec.improve(C, mu)


def _solve_checked(dec, solver, C):
    mu = solver(C)
    dec.check_fixpoint(C, mu)
    return mu


def si_above(dec, solver, *, initial=None, f=None, delta_hint=None) -> Solution:
    """Least fixpoint from above, driven by a min-decomposition.

    ``f`` optionally replaces ``dec.induced()`` for the fixpoint check and
    the skip step (it must agree with the induced function); ``delta_hint``
    maps ``(a, cycle)`` to decrements worth trying first.
    """
    if dec.kind != MIN:
        raise ValueError("si_above needs a min-decomposition")
    F = f if f is not None else dec.induced()
    C = initial if initial is not None else dec.initial()
    trace, i = [], 0
    while True:
        mu = _solve_checked(dec, solver, C)
        trace.append(TraceStep(i, C, mu))
        nxt = dec.improve(C, mu)
        if nxt is None:
            cycle = nu_approx(F, mu)
            if not cycle:
                return Solution(mu, C, trace)
            hint = delta_hint(mu, cycle) if delta_hint else ()
            lowered, delta = decrease_to_prefixpoint(F, mu, cycle, hint)
            trace[-1] = trace[-1]._replace(skip=Skip(cycle, delta, lowered))
            nxt = dec.argbest(lowered)
        C, i = nxt, i + 1


def si_below(dec, solver, *, initial=None) -> Solution:
    """Least fixpoint from below, driven by a max-decomposition."""
    if dec.kind != MAX:
        raise ValueError("si_below needs a max-decomposition")
    C = initial if initial is not None else dec.initial()
    trace, i = [], 0
    while True:
        mu = _solve_checked(dec, solver, C)
        trace.append(TraceStep(i, C, mu))
        nxt = dec.improve(C, mu)
        if nxt is None:
            return Solution(mu, C, trace)
        C, i = nxt, i + 1


def brute_force_mu(dec, solver, limit=10**5) -> Assignment:
    """Pointwise min (max) of ``mu f_C`` over every strategy ``C``."""
    count = dec.count() if hasattr(dec, "count") else None
    if count is not None and count > limit:
        raise StrategySpaceTooLarge(f"{count} strategies exceed the limit {limit}")
    pick = min if dec.kind == MIN else max
    best = None
    for n, C in enumerate(dec.strategies()):
        if n >= limit:
            raise StrategySpaceTooLarge(f"more than {limit} strategies")
        mu = solver(C)
        if best is None:
            best = mu.raw()
        else:
            for y, v in mu.items():
                best[y] = pick(best[y], v)
    return Assignment(mu.chain, best, mu.domain, check=False)


def recover_min_strategy(dec, mu: Assignment):
    """An optimal strategy for the minimising side, read off at ``mu = mu f``."""
    if dec.induced().evaluate(mu) != mu:
        raise NotAFixpoint("recover_min_strategy needs the least fixpoint")
    return dec.argbest(mu)
