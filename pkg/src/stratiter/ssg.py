"""Simple stochastic games.

States are MIN, MAX, AV (random) or SINK.  The value function maps
``a in [0,1]^V`` to the one-step game value; its least fixpoint is the
probability (or expected payoff) that MAX can guarantee.  Strategies of the
player fixed by a decomposition are solved exactly by linear programming.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .lp import EQ, GE, LE, LinearProgram, solve_min
from .mv import Assignment, UnitInterval
from .nonexp import Average, Const, DisjointUnion, MaxRel, MinRel, Reindex
from .strategy import MAX, MIN, Decomposition, si_above, si_below

AV, SINK = "av", "sink"
KINDS = (MIN, MAX, AV, SINK)
UNIT = UnitInterval()


class InvalidGame(ValueError):
    pass


@dataclass
class SSG:
    """``kind`` lists every state in order; the other maps are per kind."""

    kind: dict
    succ: dict = field(default_factory=dict)
    dist: dict = field(default_factory=dict)
    payoff: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.kind:
            raise InvalidGame("no states")
        for v, k in self.kind.items():
            if k not in KINDS:
                raise InvalidGame(f"unknown kind {k!r} for {v!r}")
            if k in (MIN, MAX):
                ws = tuple(self.succ.get(v, ()))
                if not ws:
                    raise InvalidGame(f"{k} state {v!r} has no successor")
                if len(set(ws)) != len(ws):
                    raise InvalidGame(f"duplicate successor of {v!r}")
                for w in ws:
                    if w not in self.kind:
                        raise InvalidGame(f"unknown successor {w!r} of {v!r}")
                self.succ[v] = ws
            elif k == AV:
                p = {w: Fraction(m) for w, m in dict(self.dist.get(v, {})).items() if m != 0}
                if not p or any(m < 0 for m in p.values()) or sum(p.values()) != 1:
                    raise InvalidGame(f"distribution of {v!r} does not sum to 1")
                for w in p:
                    if w not in self.kind:
                        raise InvalidGame(f"unknown successor {w!r} of {v!r}")
                self.dist[v] = p
            else:
                if v not in self.payoff:
                    raise InvalidGame(f"sink {v!r} has no payoff")
                try:
                    self.payoff[v] = UNIT.coerce(self.payoff[v])
                except (TypeError, ValueError) as exc:
                    raise InvalidGame(f"payoff of {v!r}: {exc}") from None
        extra = (set(self.succ) | set(self.dist) | set(self.payoff)) - set(self.kind)
        if extra:
            raise InvalidGame(f"data for undeclared states {sorted(extra)}")

    @property
    def states(self) -> tuple:
        return tuple(self.kind)

    def of_kind(self, k) -> list:
        return [v for v, kk in self.kind.items() if kk == k]

    def successors(self, v) -> tuple:
        if self.kind[v] == AV:
            return tuple(self.dist[v])
        return self.succ.get(v, ())


def value_term(g: SSG):
    """The value function as a combinator term over positions V."""
    parts = []
    maxs, mins = g.of_kind(MAX), g.of_kind(MIN)
    avs, sinks = g.of_kind(AV), g.of_kind(SINK)
    if maxs:
        parts.append(MaxRel({v: g.succ[v] for v in maxs}))
    if mins:
        parts.append(MinRel({v: g.succ[v] for v in mins}))
    if avs:
        parts.append(Average({v: g.dist[v] for v in avs}))
    if sinks:
        parts.append(Const({v: g.payoff[v] for v in sinks}))
    return DisjointUnion(parts)


def value_direct(g: SSG, a) -> dict:
    """Straight-line evaluation of the value function (test oracle)."""
    out = {}
    for v, k in g.kind.items():
        if k == MAX:
            out[v] = max(a[w] for w in g.succ[v])
        elif k == MIN:
            out[v] = min(a[w] for w in g.succ[v])
        elif k == AV:
            out[v] = sum((m * a[w] for w, m in g.dist[v].items()), Fraction(0))
        else:
            out[v] = g.payoff[v]
    return out


def _decomposition(g: SSG, kind) -> Decomposition:
    options, labels = {}, {}
    for v, k in g.kind.items():
        if k == kind:
            options[v] = [Reindex({v: w}) for w in g.succ[v]]
            labels[v] = g.succ[v]
        elif k == MAX:
            options[v] = [MaxRel({v: g.succ[v]})]
        elif k == MIN:
            options[v] = [MinRel({v: g.succ[v]})]
        elif k == AV:
            options[v] = [Average({v: g.dist[v]})]
        else:
            options[v] = [Const({v: g.payoff[v]})]
    return Decomposition(kind, options, UNIT, labels)


def min_decomposition(g: SSG) -> Decomposition:
    return _decomposition(g, MIN)


def max_decomposition(g: SSG) -> Decomposition:
    return _decomposition(g, MAX)


def _chosen(g, C, v):
    return g.succ[v][C[v]]


def _lp_frame(g):
    lp = LinearProgram()
    for v in g.states:
        lp.add_variable(v, 0, 1)
    for v in g.of_kind(SINK):
        lp.add_constraint({v: 1}, EQ, g.payoff[v])
    for v in g.of_kind(AV):
        row = {v: Fraction(1)}
        for w, m in g.dist[v].items():
            row[w] = row.get(w, 0) - m
        lp.add_constraint(row, EQ, 0)
    return lp


def _pin(lp, v, w):
    if v != w:
        lp.add_constraint({v: 1, w: -1}, EQ, 0)


def solve_fixed_min_strategy(g: SSG, C) -> Assignment:
    """Least fixpoint of the value function with MIN's choices fixed by ``C``.

    The feasible region is the set of pre-fixpoints (with equality where
    there is no choice left), so the minimum of the sum is the least fixpoint.
    """
    lp = _lp_frame(g)
    for v in g.of_kind(MAX):
        for w in g.succ[v]:
            if v != w:
                lp.add_constraint({v: 1, w: -1}, GE, 0)
    for v in g.of_kind(MIN):
        _pin(lp, v, _chosen(g, C, v))
    lp.set_objective({v: 1 for v in g.states})
    _, point = solve_min(lp)
    return Assignment(UNIT, point, g.states, check=False)


def trap_set(g: SSG, C) -> frozenset:
    """States from which MIN keeps the play away from sinks forever (MAX fixed by C)."""
    S = set(g.states) - set(g.of_kind(SINK))
    changed = True
    while changed:
        changed = False
        for v in list(S):
            k = g.kind[v]
            if k == MIN:
                ok = any(w in S for w in g.succ[v])
            elif k == AV:
                ok = all(w in S for w in g.dist[v])
            else:
                ok = _chosen(g, C, v) in S
            if not ok:
                S.discard(v)
                changed = True
    return frozenset(S)


def solve_fixed_max_strategy(g: SSG, C) -> Assignment:
    """Least fixpoint with MAX's choices fixed by ``C``.

    States in :func:`trap_set` get value 0; the rest is the greatest
    post-fixpoint, found by maximising the sum subject to ``a <= V_C(a)``.
    """
    zero = trap_set(g, C)
    lp = _lp_frame(g)
    for v in zero:
        lp.add_constraint({v: 1}, EQ, 0)
    for v in g.of_kind(MIN):
        for w in g.succ[v]:
            if v != w:
                lp.add_constraint({v: 1, w: -1}, LE, 0)
    for v in g.of_kind(MAX):
        _pin(lp, v, _chosen(g, C, v))
    lp.set_objective({v: -1 for v in g.states})
    _, point = solve_min(lp)
    return Assignment(UNIT, point, g.states, check=False)


def solve_ssg_above(g: SSG, initial=None):
    dec = min_decomposition(g)
    return si_above(dec, lambda C: solve_fixed_min_strategy(g, C), initial=initial)


def solve_ssg_below(g: SSG, initial=None):
    dec = max_decomposition(g)
    return si_below(dec, lambda C: solve_fixed_max_strategy(g, C), initial=initial)
