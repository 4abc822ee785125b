"""Behavioural distances on probabilistic automata.

The distance is the least fixpoint of ``M`` on ``[0,1]^{S x S}``:
label mismatch gives 1, otherwise the Hausdorff lifting of the Kantorovich
lifting of ``d`` between the two sets of outgoing distributions.  It is
computed from above; a strategy is a coupling structure ``(rho, F)``
choosing a set-coupling per state pair and a transport plan per pair of
distributions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from .lp import EQ, GE, Infeasible, LinearProgram, TransportPlan, solve_min, transport, \
    transport_vertices
from .mv import Assignment, UnitInterval
from .nonexp import Average, Compose, Const, DisjointUnion, MaxRel, NotAFixpoint
from .strategy import MIN, Decomposition, StrategySpaceTooLarge, si_above

UNIT = UnitInterval()


class InvalidAutomaton(ValueError):
    pass


@dataclass
class PA:
    """``label`` lists every state in order; ``dists`` maps a distribution
    name to ``(owner state, {state: mass})``."""

    label: dict
    dists: dict

    def __post_init__(self):
        if not self.label:
            raise InvalidAutomaton("no states")
        clean = {}
        for name, (owner, p) in self.dists.items():
            if owner not in self.label:
                raise InvalidAutomaton(f"distribution {name!r} belongs to unknown state {owner!r}")
            q = {u: Fraction(m) for u, m in dict(p).items() if m != 0}
            if any(u not in self.label for u in q):
                raise InvalidAutomaton(f"distribution {name!r} reaches an unknown state")
            if any(m < 0 for m in q.values()) or sum(q.values()) != 1:
                raise InvalidAutomaton(f"distribution {name!r} does not sum to 1")
            clean[name] = (owner, q)
        self.dists = clean
        self.delta = {s: [] for s in self.label}
        for name, (owner, _) in clean.items():
            self.delta[owner].append(name)
        for s, ds in self.delta.items():
            if not ds:
                raise InvalidAutomaton(f"state {s!r} has no distribution")

    @property
    def states(self) -> tuple:
        return tuple(self.label)

    def pairs(self) -> tuple:
        S = self.states
        return tuple((s, t) for s in S for t in S)

    def dist(self, name) -> dict:
        return self.dists[name][1]


def hausdorff(kvals, X, X2):
    """Closed form of the Hausdorff lifting of ``kvals`` between X and X2."""
    X, X2 = list(X), list(X2)
    if not X or not X2:
        raise ValueError("Hausdorff lifting of an empty set")
    left = max(min(kvals[x, y] for y in X2) for x in X)
    right = max(min(kvals[x, y] for x in X) for y in X2)
    return max(left, right)


def set_couplings(X, X2, minimal=False):
    """All relations R with both projections full (optionally only minimal ones)."""
    X, X2 = list(X), list(X2)
    cells = [(x, y) for x in X for y in X2]
    out = []
    for r in range(max(len(X), len(X2)), len(cells) + 1):
        for R in combinations(cells, r):
            if {x for x, _ in R} != set(X) or {y for _, y in R} != set(X2):
                continue
            if minimal:
                lefts = [x for x, _ in R]
                rights = [y for _, y in R]
                if any(lefts.count(x) > 1 and rights.count(y) > 1 for x, y in R):
                    continue
            out.append(frozenset(R))
    return out


def hausdorff_brute(kvals, X, X2):
    """Min over all set-couplings of the max entry (test oracle)."""
    return min(max(kvals[c] for c in R) for R in set_couplings(X, X2))


def _same_label(pa, s, t):
    return pa.label[s] == pa.label[t]


def _needed_pairs(pa):
    pairs = []
    for s, t in pa.pairs():
        if _same_label(pa, s, t):
            pairs.extend(product(pa.delta[s], pa.delta[t]))
    return list(dict.fromkeys(pairs))


def kantorovich(pa: PA, d, b1, b2):
    return transport(d, pa.dist(b1), pa.dist(b2))


def _all_transports(pa, d):
    return {bb: kantorovich(pa, d, *bb) for bb in _needed_pairs(pa)}


def m_eval(pa: PA, d: Assignment, transports=None) -> Assignment:
    """One application of ``M``."""
    if transports is None:
        transports = _all_transports(pa, d)
    kvals = {bb: v for bb, (v, _) in transports.items()}
    out = {}
    for s, t in pa.pairs():
        if _same_label(pa, s, t):
            out[s, t] = hausdorff(kvals, pa.delta[s], pa.delta[t])
        else:
            out[s, t] = Fraction(1)
    return Assignment(UNIT, out, pa.pairs(), check=False)


@dataclass(frozen=True)
class CouplingStructure:
    """``rho`` maps label-matching state pairs to a set-coupling; ``F`` maps
    distribution pairs to transport plans."""

    rho: dict
    F: dict

    def __hash__(self):
        return hash(frozenset(self.rho.items()))

    def describe(self) -> dict:
        return {st: sorted(R) for st, R in self.rho.items()}


def _optimal_coupling(pa, kvals, s, t):
    X, X2 = pa.delta[s], pa.delta[t]
    R = set()
    for x in X:
        best = min(kvals[x, y] for y in X2)
        R.add((x, next(y for y in X2 if kvals[x, y] == best)))
    for y in X2:
        best = min(kvals[x, y] for x in X)
        R.add((next(x for x in X if kvals[x, y] == best), y))
    # drop pairs whose endpoints are both covered elsewhere, costliest first
    for pair in sorted(R, key=lambda bb: (-kvals[bb], bb)):
        rest = R - {pair}
        if any(x == pair[0] for x, _ in rest) and any(y == pair[1] for _, y in rest):
            R = rest
    return frozenset(R)


def fresh_structure(pa: PA, d: Assignment, transports=None) -> CouplingStructure:
    """An optimal coupling structure at ``d``."""
    if transports is None:
        transports = _all_transports(pa, d)
    kvals = {bb: v for bb, (v, _) in transports.items()}
    rho = {(s, t): _optimal_coupling(pa, kvals, s, t)
           for s, t in pa.pairs() if _same_label(pa, s, t)}
    F = {bb: transports[bb][1] for R in rho.values() for bb in R}
    return CouplingStructure(rho, F)


def improve_coupling(pa: PA, C: CouplingStructure, d: Assignment, transports=None):
    """Stable improvement: re-optimise only pairs whose value ``M(d)`` drops below ``d``."""
    if transports is None:
        transports = _all_transports(pa, d)
    kvals = {bb: v for bb, (v, _) in transports.items()}
    md = m_eval(pa, d, transports)
    rho = {}
    for st, R in C.rho.items():
        rho[st] = R if md[st] == d[st] else _optimal_coupling(pa, kvals, *st)
    F = {}
    for R in rho.values():
        for bb in R:
            old = C.F.get(bb)
            F[bb] = old if old is not None and old.cost(d) == kvals[bb] else transports[bb][1]
    return CouplingStructure(rho, F)


def _coupling_lp(pa: PA, rows) -> Assignment:
    """Least fixpoint of ``M_C`` where ``rows`` maps each label-matching
    pair to the list of plans whose costs it maximises over."""
    lp = LinearProgram()
    pairs = pa.pairs()
    for st in pairs:
        lp.add_variable(st, 0, 1)
    for s, t in pairs:
        if not _same_label(pa, s, t):
            lp.add_constraint({(s, t): 1}, EQ, 1)
            continue
        for plan in rows[s, t]:
            row = {(s, t): Fraction(1)}
            for cell, m in plan.mass.items():
                row[cell] = row.get(cell, 0) - m
            lp.add_constraint(row, GE, 0)
    lp.set_objective({st: 1 for st in pairs})
    _, point = solve_min(lp)
    return Assignment(UNIT, point, pairs, check=False)


def solve_fixed_coupling(pa: PA, C: CouplingStructure) -> Assignment:
    return _coupling_lp(pa, {st: [C.F[bb] for bb in sorted(R)] for st, R in C.rho.items()})


def coupling_term(pa: PA, C: CouplingStructure):
    """``M_C`` as a combinator term (max over R of averages over the plans)."""
    parts, pre, dists = [], {}, {}
    for s, t in pa.pairs():
        if not _same_label(pa, s, t):
            parts.append(Const({(s, t): 1}))
            continue
        pre[s, t] = []
        for bb in sorted(C.rho[s, t]):
            key = ((s, t), bb)
            pre[s, t].append(key)
            dists[key] = C.F[bb].mass
    if pre:
        parts.append(Compose(MaxRel(pre), Average(dists)))
    return DisjointUnion(parts)


def discrete_metric(pa: PA) -> Assignment:
    return Assignment(UNIT, {(s, t): int(s != t) for s, t in pa.pairs()}, pa.pairs())


class BehaviouralOperator:
    """``M`` with its approximation, via the min-decomposition closed form.

    ``(s, t)`` is in ``M#d(Y')`` iff the labels agree, ``M(d)(s,t) = m > 0``
    and every distribution on either side has an allowed partner, where a
    pair is allowed if its Kantorovich value is below ``m``, or equals ``m``
    with an optimal plan supported inside ``Y'``.
    """

    def __init__(self, pa: PA):
        self.pa = pa
        self.cod = pa.pairs()

    def evaluate(self, d: Assignment) -> Assignment:
        return m_eval(self.pa, d)

    def approximation(self, d: Assignment):
        pa = self.pa
        transports = _all_transports(pa, d)
        kvals = {bb: v for bb, (v, _) in transports.items()}
        md = m_eval(pa, d, transports)
        carrier = d.support()
        memo = {}

        def inside(bb, subset):
            b1, b2 = pa.dist(bb[0]), pa.dist(bb[1])
            cells = frozenset(c for c in product(b1, b2) if c in subset)
            key = (bb, cells)
            if key not in memo:
                memo[key] = _restricted_optimum(b1, b2, cells, d) == kvals[bb]
            return memo[key]

        def approx(subset):
            subset = frozenset(subset)
            if not subset <= carrier:
                raise ValueError("approximation argument must lie inside the support of d")
            res = set()
            for s, t in pa.pairs():
                m = md[s, t]
                if m == 0 or not _same_label(pa, s, t):
                    continue

                def allowed(bb):
                    k = kvals[bb]
                    return k < m or (k == m and inside(bb, subset))

                X, X2 = pa.delta[s], pa.delta[t]
                if all(any(allowed((x, y)) for y in X2) for x in X) and \
                        all(any(allowed((x, y)) for x in X) for y in X2):
                    res.add((s, t))
            return frozenset(res)

        return approx


def _restricted_optimum(b1, b2, cells, d):
    """Optimal transport cost using only ``cells``, or None if infeasible."""
    lp = LinearProgram()
    for c in cells:
        lp.add_variable(c)
    for u, m in b1.items():
        lp.add_constraint({c: 1 for c in cells if c[0] == u}, EQ, m)
    for v, m in b2.items():
        lp.add_constraint({c: 1 for c in cells if c[1] == v}, EQ, m)
    lp.set_objective({c: d[c] for c in cells})
    try:
        value, _ = solve_min(lp)
    except Infeasible:
        return None
    return value


class PADecomposition:
    """The min-decomposition of ``M`` with coupling structures as strategies."""

    kind = MIN

    def __init__(self, pa: PA):
        self.pa = pa
        self._op = BehaviouralOperator(pa)

    def initial(self) -> CouplingStructure:
        return fresh_structure(self.pa, discrete_metric(self.pa))

    def induced(self) -> BehaviouralOperator:
        return self._op

    def restrict(self, C):
        return coupling_term(self.pa, C)

    def argbest(self, a):
        return fresh_structure(self.pa, a)

    def check_fixpoint(self, C, mu):
        if coupling_term(self.pa, C).evaluate(mu) != mu:
            raise NotAFixpoint("inner solver returned a non-fixpoint of M_C")

    def improve(self, C, mu):
        self.check_fixpoint(C, mu)
        transports = _all_transports(self.pa, mu)
        if m_eval(self.pa, mu, transports) == mu:
            return None
        return improve_coupling(self.pa, C, mu, transports)

    def describe(self, C) -> dict:
        return C.describe()


def solve_pa_above(pa: PA):
    dec = PADecomposition(pa)
    return si_above(dec, lambda C: solve_fixed_coupling(pa, C))


# explicit decomposition with local plans, for oracles on tiny automata

def local_options(pa: PA, s, t) -> list:
    """Every ``(R, plans)`` option at ``(s, t)``: minimal set-couplings
    combined with vertex plans for each member pair."""
    vertices = {}
    opts = []
    for R in set_couplings(pa.delta[s], pa.delta[t], minimal=True):
        members = sorted(R)
        for bb in members:
            if bb not in vertices:
                vertices[bb] = transport_vertices(pa.dist(bb[0]), pa.dist(bb[1]))
        for plans in product(*(vertices[bb] for bb in members)):
            opts.append((tuple(members), plans))
    return opts


def explicit_decomposition(pa: PA, limit=10**5) -> Decomposition:
    """``M`` as a generic :class:`Decomposition` of combinator terms."""
    options, labels = {}, {}
    total = 1
    for s, t in pa.pairs():
        if not _same_label(pa, s, t):
            options[s, t] = [Const({(s, t): 1})]
            continue
        terms = []
        opts = local_options(pa, s, t)
        total *= len(opts)
        if total > limit:
            raise StrategySpaceTooLarge("explicit decomposition is too large")
        for members, plans in opts:
            keys = [((s, t), bb, i) for i, bb in enumerate(members)]
            terms.append(Compose(MaxRel({(s, t): keys}),
                                 Average({key: p.mass for key, p in zip(keys, plans)})))
        options[s, t] = terms
        labels[s, t] = [members for members, _ in opts]
    return Decomposition(MIN, options, UNIT, labels)


def explicit_solver(pa: PA, dec: Decomposition):
    """Inner solver for :func:`explicit_decomposition` strategies."""
    table = {st: local_options(pa, *st) for st in pa.pairs() if _same_label(pa, *st)}

    def solve(C):
        return _coupling_lp(pa, {st: list(table[st][C[st]][1]) for st in table})

    return solve


__all__ = [
    "PA", "CouplingStructure", "BehaviouralOperator", "PADecomposition", "hausdorff",
    "hausdorff_brute", "set_couplings", "m_eval", "kantorovich", "improve_coupling",
    "fresh_structure", "solve_fixed_coupling", "coupling_term", "solve_pa_above",
    "discrete_metric", "local_options", "explicit_decomposition", "explicit_solver",
    "TransportPlan",
]
