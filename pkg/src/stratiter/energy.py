"""Energy games.

Player 0 owns ``V0`` and wants to keep the accumulated energy non-negative
forever; the solution maps each state to the least initial energy that
suffices (or infinity).  Values are computed on a transformed game whose
values are all finite, over the chain ``{0..k}``, and mapped back.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import inf

from .mv import Assignment, FiniteChain
from .nonexp import Compose, DisjointUnion, MaxRel, MinRel, Reindex, SubWeight
from .strategy import MAX, MIN, Decomposition, si_above, si_below

INF = inf


class InvalidGame(ValueError):
    pass


@dataclass(frozen=True)
class EnergyGame:
    """``owner`` maps every state (in order) to 0 or 1; ``edges`` are (v, v', w)."""

    owner: dict
    edges: tuple

    def __post_init__(self):
        if not self.owner:
            raise InvalidGame("no states")
        for v, p in self.owner.items():
            if p not in (0, 1):
                raise InvalidGame(f"owner of {v!r} must be 0 or 1")
        edges, seen = [], set()
        for v, t, w in self.edges:
            if v not in self.owner or t not in self.owner:
                raise InvalidGame(f"edge {v!r} -> {t!r} mentions an unknown state")
            if (v, t) in seen:
                raise InvalidGame(f"duplicate edge {v!r} -> {t!r}")
            if not isinstance(w, int) or isinstance(w, bool):
                raise InvalidGame(f"weight of {v!r} -> {t!r} is not an integer")
            seen.add((v, t))
            edges.append((v, t, w))
        object.__setattr__(self, "edges", tuple(edges))
        out = self.out_edges()
        for v in self.owner:
            if not out[v]:
                raise InvalidGame(f"state {v!r} has no outgoing edge")

    @property
    def states(self) -> tuple:
        return tuple(self.owner)

    def out_edges(self) -> dict:
        out = {v: [] for v in self.owner}
        for v, t, w in self.edges:
            out[v].append((t, w))
        return out

    def max_weight(self) -> int:
        """``W``, taken to be at least 1 so the bounds below stay positive."""
        return max([1] + [abs(w) for _, _, w in self.edges])

    def restrict_edges(self, keep) -> EnergyGame:
        keep = set(keep)
        return EnergyGame(dict(self.owner), tuple(e for e in self.edges if (e[0], e[1]) in keep))


def energy_term(g: EnergyGame, k: int):
    """``(min over V0 edges ⊎ max over V1 edges) . sub_w . (target projection)``."""
    out = g.out_edges()
    proj = Reindex({(v, t): t for v, t, _ in g.edges})
    sub = SubWeight({(v, t): w for v, t, w in g.edges}, k)
    parts = []
    v0 = {v: [(v, t) for t, _ in out[v]] for v in g.states if g.owner[v] == 0}
    v1 = {v: [(v, t) for t, _ in out[v]] for v in g.states if g.owner[v] == 1}
    if v0:
        parts.append(MinRel(v0))
    if v1:
        parts.append(MaxRel(v1))
    return Compose(DisjointUnion(parts), Compose(sub, proj))


def _clamp(x, k):
    return 0 if x < 0 else (k if x > k else x)


def energy_direct(g: EnergyGame, k: int, a) -> dict:
    """Straight-line evaluation of the energy function (test oracle)."""
    out = g.out_edges()
    res = {}
    for v in g.states:
        vals = [_clamp(a[t] - w, k) for t, w in out[v]]
        res[v] = min(vals) if g.owner[v] == 0 else max(vals)
    return res


def _option(v, t, w, k):
    return Compose(Reindex({v: (v, t)}), Compose(SubWeight({(v, t): w}, k), Reindex({(v, t): t})))


def _decomposition(g: EnergyGame, k: int, player: int) -> Decomposition:
    out = g.out_edges()
    options, labels = {}, {}
    for v in g.states:
        if g.owner[v] == player:
            options[v] = [_option(v, t, w, k) for t, w in out[v]]
            labels[v] = [t for t, _ in out[v]]
        else:
            rel = {v: [(v, t) for t, _ in out[v]]}
            ext = MinRel(rel) if g.owner[v] == 0 else MaxRel(rel)
            sub = SubWeight({(v, t): w for t, w in out[v]}, k)
            options[v] = [Compose(ext, Compose(sub, Reindex({(v, t): t for t, _ in out[v]})))]
    return Decomposition(MIN if player == 0 else MAX, options, FiniteChain(k), labels)


def min_decomposition(g: EnergyGame, k: int) -> Decomposition:
    """Player 0 picks edges; one option per outgoing edge of each V0 state."""
    return _decomposition(g, k, 0)


def max_decomposition(g: EnergyGame, k: int) -> Decomposition:
    """Player 1 picks edges; one option per outgoing edge of each V1 state."""
    return _decomposition(g, k, 1)


def strategy_game(g: EnergyGame, dec: Decomposition, C) -> EnergyGame:
    """The game in which the deciding player's edges are fixed by ``C``."""
    player = 0 if dec.kind == MIN else 1
    keep = []
    for v, edges in g.out_edges().items():
        if g.owner[v] == player:
            keep.append((v, edges[C[v]][0]))
        else:
            keep.extend((v, t) for t, _ in edges)
    return g.restrict_edges(keep)


@dataclass(frozen=True)
class Transformed:
    game: EnergyGame
    removed: frozenset
    k: int
    threshold: int
    sink: str
    original: tuple


def negative_player1_states(g: EnergyGame) -> frozenset:
    """V1 states that reach a negative cycle through V1 states only."""
    v1 = [v for v in g.states if g.owner[v] == 1]
    v1set = set(v1)
    # reversed V1-only subgraph
    redges = [(t, v, w) for v, t, w in g.edges if v in v1set and t in v1set]
    dist = {v: 0 for v in v1}
    for _ in range(len(v1)):
        changed = False
        for a, b, w in redges:
            if dist[a] + w < dist[b]:
                dist[b] = dist[a] + w
                changed = True
        if not changed:
            return frozenset()
    marked = {b for a, b, w in redges if dist[a] + w < dist[b]}
    succ = {v: [] for v in v1}
    for a, b, _ in redges:
        succ[a].append(b)
    stack = list(marked)
    while stack:
        x = stack.pop()
        for y in succ[x]:
            if y not in marked:
                marked.add(y)
                stack.append(y)
    return frozenset(marked)


def _fresh(name, taken):
    while name in taken:
        name += "'"
    return name


def transform_finite(g: EnergyGame) -> Transformed:
    """Remove V1-forced negative cycles and add an emergency exit for Player 0."""
    n, W = len(g.owner), g.max_weight()
    removed = negative_player1_states(g)
    sink = _fresh("sink", g.owner)
    owner = {v: p for v, p in g.owner.items() if v not in removed}
    owner[sink] = 0
    edges = [e for e in g.edges if e[0] not in removed and e[1] not in removed]
    edges.extend((v, sink, -2 * n * W) for v, p in g.owner.items() if p == 0 and v not in removed)
    edges.append((sink, sink, 0))
    out = {v: 0 for v in owner}
    for v, _, _ in edges:
        out[v] += 1
    for v, c in out.items():
        if not c:
            raise InvalidGame(f"state {v!r} lost all outgoing edges in the transformation")
    return Transformed(EnergyGame(owner, tuple(edges)), removed, 3 * n * W, n * W, sink, g.states)


def reconstruct(sol: Assignment, t: Transformed) -> dict:
    """Map a solution of the transformed game back; values >= threshold become inf."""
    res = {}
    for v in t.original:
        if v in t.removed:
            res[v] = INF
        else:
            x = sol[v]
            res[v] = x if x < t.threshold else INF
    return res


def kleene_solve(f, domain, k: int):
    """Iterate ``f`` from 0 on ``{0..k}^domain``; returns (mu f, steps)."""
    a = Assignment.constant(FiniteChain(k), domain)
    steps = 0
    while True:
        b = f.evaluate(a)
        if b == a:
            return a, steps
        a, steps = b, steps + 1


def value_iteration(g: EnergyGame, k: int):
    """Worklist iteration from 0; returns (mu E, number of raises)."""
    out = g.out_edges()
    pred = {v: set() for v in g.states}
    for v, t, _ in g.edges:
        pred[t].add(v)
    val = {v: 0 for v in g.states}

    def demand(v):
        xs = [_clamp(val[t] - w, k) for t, w in out[v]]
        return min(xs) if g.owner[v] == 0 else max(xs)

    queue = deque(v for v in g.states if demand(v) > val[v])
    queued = set(queue)
    raises = 0
    while queue:
        v = queue.popleft()
        queued.discard(v)
        need = demand(v)
        if need <= val[v]:
            continue
        val[v] = need
        raises += 1
        for u in pred[v]:
            if u not in queued and demand(u) > val[u]:
                queue.append(u)
                queued.add(u)
    return Assignment(FiniteChain(k), val, g.states, check=False), raises


class FixpointApprox:
    """The energy function with the simplified approximation valid at fixpoints."""

    def __init__(self, g: EnergyGame, k: int):
        self.g, self.k = g, k
        self.term = energy_term(g, k)
        self.cod = self.term.cod
        self._out = g.out_edges()

    def evaluate(self, a):
        return self.term.evaluate(a)

    def approximation(self, a):
        g, k, out = self.g, self.k, self._out
        carrier = a.support()
        # edges realising the value at each state, and whether they propagate
        tight = {}
        for v in carrier:
            tight[v] = [(t, 0 < a[t] - w <= k) for t, w in out[v] if _clamp(a[t] - w, k) == a[v]]

        def approx(subset):
            subset = frozenset(subset)
            if not subset <= carrier:
                raise ValueError("approximation argument must lie inside the support of a")
            res = set()
            for v, edges in tight.items():
                hits = [ok and t in subset for t, ok in edges]
                if (any(hits) if g.owner[v] == 0 else all(hits)):
                    res.add(v)
            return frozenset(res)

        return approx


def delta_hint(g: EnergyGame):
    """Decrement candidates for skipping a fixpoint of the energy function."""
    def hint(a, cycle):
        cands = {a[t] - w for v, t, w in g.edges if a[t] > w}
        cands.update(a[v] - a[t] for v, t, _ in g.edges if a[v] > a[t])
        m = a.min_support_value()
        if m is not None:
            cands.add(m)
        return [min(cands)] if cands else []
    return hint


def _prepare(g):
    t = transform_finite(g)
    return t, t.game


def solve_kleene(g: EnergyGame):
    t, h = _prepare(g)
    mu, steps = kleene_solve(energy_term(h, t.k), h.states, t.k)
    return reconstruct(mu, t), steps


def solve_vi(g: EnergyGame):
    t, h = _prepare(g)
    mu, raises = value_iteration(h, t.k)
    return reconstruct(mu, t), raises


def solve_energy_above(g: EnergyGame, initial=None):
    """Returns (solution, Solution record on the transformed game, transform)."""
    t, h = _prepare(g)
    dec = min_decomposition(h, t.k)
    sol = si_above(dec, lambda C: value_iteration(strategy_game(h, dec, C), t.k)[0],
                   initial=initial, f=FixpointApprox(h, t.k), delta_hint=delta_hint(h))
    return reconstruct(sol.values, t), sol, dec


def solve_energy_below(g: EnergyGame, initial=None):
    t, h = _prepare(g)
    dec = max_decomposition(h, t.k)
    sol = si_below(dec, lambda C: value_iteration(strategy_game(h, dec, C), t.k)[0],
                   initial=initial)
    return reconstruct(sol.values, t), sol, dec
