"""Exact rational linear programming and discrete optimal transport.

The solver is a textbook two-phase primal simplex on a dense tableau of
``Fraction`` entries with Bland's rule, which is slow but exact and always
terminates.  Instances in this package are small (tens of variables).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

LE, EQ, GE = "<=", "==", ">="


class Infeasible(ValueError):
    pass


class Unbounded(ValueError):
    pass


class LinearProgram:
    """``minimize c.x`` subject to linear rows and per-variable bounds.

    Variables default to the bounds ``[0, +inf)``; ``None`` stands for an
    infinite bound.
    """

    def __init__(self):
        self.variables = []
        self.bounds = {}
        self.objective = {}
        self.constraints = []

    def add_variable(self, name, lo=0, hi=None):
        if name in self.bounds:
            raise ValueError(f"duplicate variable {name!r}")
        lo = None if lo is None else Fraction(lo)
        hi = None if hi is None else Fraction(hi)
        if lo is not None and hi is not None and lo > hi:
            raise ValueError(f"empty bounds for {name!r}")
        self.variables.append(name)
        self.bounds[name] = (lo, hi)
        return name

    def add_constraint(self, coeffs, rel, rhs):
        if rel not in (LE, EQ, GE):
            raise ValueError(f"unknown relation {rel!r}")
        row = {}
        for v, c in dict(coeffs).items():
            if v not in self.bounds:
                raise KeyError(f"unknown variable {v!r}")
            c = Fraction(c)
            if c:
                row[v] = row.get(v, 0) + c
        self.constraints.append((row, rel, Fraction(rhs)))

    def set_objective(self, coeffs):
        for v in coeffs:
            if v not in self.bounds:
                raise KeyError(f"unknown variable {v!r}")
        self.objective = {v: Fraction(c) for v, c in dict(coeffs).items()}

    def check(self, point) -> bool:
        """Whether ``point`` satisfies every row and bound exactly."""
        for v, (lo, hi) in self.bounds.items():
            x = point[v]
            if (lo is not None and x < lo) or (hi is not None and x > hi):
                return False
        for row, rel, rhs in self.constraints:
            lhs = sum((c * point[v] for v, c in row.items()), Fraction(0))
            if rel == LE and lhs > rhs or rel == GE and lhs < rhs or rel == EQ and lhs != rhs:
                return False
        return True

    def value(self, point) -> Fraction:
        return sum((c * point[v] for v, c in self.objective.items()), Fraction(0))


def _pivot(T, basis, r, c):
    row = T[r]
    p = row[c]
    if p != 1:
        T[r] = row = [x / p for x in row]
    for i, other in enumerate(T):
        if i != r:
            f = other[c]
            if f:
                T[i] = [x - f * y for x, y in zip(other, row)]
    basis[r] = c


def _simplex(T, basis, cost, ncols):
    """Minimise ``cost`` over the canonical tableau ``T`` using columns < ncols.

    Bland's rule: entering column is the lowest index with negative reduced
    cost; ties in the ratio test go to the lowest basic index.
    """
    while True:
        cb = [cost[b] for b in basis]
        entering = None
        for j in range(ncols):
            r = cost[j] - sum((cb[i] * T[i][j] for i in range(len(T)) if cb[i]), Fraction(0))
            if r < 0:
                entering = j
                break
        if entering is None:
            return
        best = None
        for i, row in enumerate(T):
            a = row[entering]
            if a > 0:
                ratio = row[-1] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            raise Unbounded("objective is unbounded below")
        _pivot(T, basis, best[1], entering)


def solve_min(lp: LinearProgram):
    """Return ``(optimum, point)`` with an optimal basic solution.

    Raises :class:`Infeasible` or :class:`Unbounded`.
    """
    # Substitute bounds so that every internal column is >= 0.
    # each original variable becomes offset + sum(sign * column)
    cols = []
    expand = {}
    extra_rows = []
    for v in lp.variables:
        lo, hi = lp.bounds[v]
        if lo is not None:
            j = len(cols)
            cols.append(v)
            expand[v] = (lo, [(j, 1)])
            if hi is not None:
                extra_rows.append(({j: Fraction(1)}, LE, hi - lo))
        elif hi is not None:
            j = len(cols)
            cols.append(v)
            expand[v] = (hi, [(j, -1)])
        else:
            j = len(cols)
            cols.extend([(v, "+"), (v, "-")])
            expand[v] = (Fraction(0), [(j, 1), (j + 1, -1)])

    rows = []
    for row, rel, rhs in lp.constraints:
        internal = {}
        for v, c in row.items():
            off, parts = expand[v]
            rhs -= c * off
            for j, s in parts:
                internal[j] = internal.get(j, 0) + s * c
        rows.append((internal, rel, rhs))
    rows.extend(extra_rows)

    n = len(cols)
    # normalise to non-negative right-hand sides
    norm_rows = []
    for internal, rel, rhs in rows:
        if rhs < 0:
            internal = {j: -c for j, c in internal.items()}
            rhs = -rhs
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        norm_rows.append((internal, rel, rhs))

    n_slack = sum(1 for _, rel, _ in norm_rows if rel != EQ)
    n_art = sum(1 for _, rel, _ in norm_rows if rel != LE)
    total = n + n_slack + n_art
    T, basis = [], []
    s_col, a_col = n, n + n_slack
    for internal, rel, rhs in norm_rows:
        line = [Fraction(0)] * (total + 1)
        for j, c in internal.items():
            line[j] = Fraction(c)
        line[-1] = rhs
        if rel == LE:
            line[s_col] = Fraction(1)
            basis.append(s_col)
            s_col += 1
        else:
            if rel == GE:
                line[s_col] = Fraction(-1)
                s_col += 1
            line[a_col] = Fraction(1)
            basis.append(a_col)
            a_col += 1
        T.append(line)

    first_art = n + n_slack
    if n_art:
        phase1 = [Fraction(0)] * first_art + [Fraction(1)] * n_art
        _simplex(T, basis, phase1, total)
        if sum((T[i][-1] for i, b in enumerate(basis) if b >= first_art), Fraction(0)) != 0:
            raise Infeasible("no point satisfies the constraints")
        # drive remaining (zero-level) artificials out of the basis
        i = 0
        while i < len(T):
            if basis[i] >= first_art:
                j = next((j for j in range(first_art) if T[i][j] != 0), None)
                if j is None:
                    del T[i]
                    del basis[i]
                    continue
                _pivot(T, basis, i, j)
            i += 1

    cost = [Fraction(0)] * total
    for v, c in lp.objective.items():
        for j, s in expand[v][1]:
            cost[j] += s * c
    _simplex(T, basis, cost, first_art)

    xs = [Fraction(0)] * total
    for i, b in enumerate(basis):
        xs[b] = T[i][-1]
    point = {}
    for v in lp.variables:
        off, parts = expand[v]
        point[v] = off + sum((s * xs[j] for j, s in parts), Fraction(0))
    if not lp.check(point):
        raise ArithmeticError("simplex produced a point violating the constraints")
    return lp.value(point), point


@dataclass(frozen=True)
class TransportPlan:
    """A coupling of two distributions; ``mass`` lists the non-zero cells."""

    source: dict
    target: dict
    mass: dict = field(default_factory=dict)

    def check(self) -> bool:
        rows, cols = {}, {}
        for (u, v), m in self.mass.items():
            if m < 0:
                return False
            rows[u] = rows.get(u, 0) + m
            cols[v] = cols.get(v, 0) + m
        src = {u: m for u, m in self.source.items() if m}
        tgt = {v: m for v, m in self.target.items() if m}
        return rows == src and cols == tgt

    def cost(self, d) -> Fraction:
        return sum((m * d[cell] for cell, m in self.mass.items()), Fraction(0))


def _distribution(beta, name):
    out = {}
    for u, m in dict(beta).items():
        if isinstance(m, float):
            raise TypeError("floating point masses are not accepted")
        m = Fraction(m)
        if m < 0:
            raise ValueError(f"negative mass in {name}")
        if m:
            out[u] = m
    if sum(out.values()) != 1:
        raise ValueError(f"{name} does not sum to 1")
    return out


def transport(d, beta, beta2):
    """Exact Kantorovich value and an optimal vertex plan.

    ``d`` maps pairs ``(u, v)`` to costs; only pairs over the supports are read.
    """
    beta = _distribution(beta, "source distribution")
    beta2 = _distribution(beta2, "target distribution")
    lp = LinearProgram()
    cells = [(u, v) for u in beta for v in beta2]
    for cell in cells:
        lp.add_variable(cell)
    for u, m in beta.items():
        lp.add_constraint({(u, v): 1 for v in beta2}, EQ, m)
    for v, m in beta2.items():
        lp.add_constraint({(u, v): 1 for u in beta}, EQ, m)
    lp.set_objective({cell: d[cell] for cell in cells})
    value, point = solve_min(lp)
    plan = TransportPlan(beta, beta2, {c: m for c, m in point.items() if m})
    return value, plan


def _spanning_trees(nodes, cells, size):
    """Cell subsets of the given size forming a forest, pruned at the first cycle."""
    def walk(start, chosen, comp):
        if len(chosen) == size:
            yield tuple(chosen)
            return
        for i in range(start, len(cells) - (size - len(chosen)) + 1):
            u, v = cells[i]
            a, b = comp[("r", u)], comp[("c", v)]
            if a == b:
                continue
            merged = {x: (a if c == b else c) for x, c in comp.items()}
            chosen.append(cells[i])
            yield from walk(i + 1, chosen, merged)
            chosen.pop()

    yield from walk(0, [], {x: x for x in nodes})


def transport_vertices(beta, beta2) -> list:
    """All vertices of the coupling polytope, by enumerating spanning-tree bases.

    Independent of the simplex code; meant as an oracle for small supports.
    """
    beta = _distribution(beta, "source distribution")
    beta2 = _distribution(beta2, "target distribution")
    us, vs = list(beta), list(beta2)
    nodes = [("r", u) for u in us] + [("c", v) for v in vs]
    # peel in integers: scale by the common denominator
    scale = lcm(*(m.denominator for m in (*beta.values(), *beta2.values())))
    supply = {("r", u): int(beta[u] * scale) for u in us}
    supply.update({("c", v): int(beta2[v] * scale) for v in vs})
    cells = [(u, v) for u in us for v in vs]
    size = len(us) + len(vs) - 1
    seen, out = set(), []
    for basis in _spanning_trees(nodes, cells, size):
        # peel leaves of the spanning tree
        remaining = dict(supply)
        adj = {x: set() for x in nodes}
        for u, v in basis:
            adj[("r", u)].add(("c", v))
            adj[("c", v)].add(("r", u))
        flows = {}
        leaves = [x for x in nodes if len(adj[x]) == 1]
        while leaves:
            x = leaves.pop()
            if len(adj[x]) != 1:
                continue
            (y,) = adj[x]
            f = remaining[x]
            cell = (x[1], y[1]) if x[0] == "r" else (y[1], x[1])
            flows[cell] = f
            remaining[y] -= f
            remaining[x] = 0
            adj[x].clear()
            adj[y].discard(x)
            if len(adj[y]) == 1:
                leaves.append(y)
        if any(f < 0 for f in flows.values()):
            continue
        key = frozenset((c, m) for c, m in flows.items() if m)
        if key not in seen:
            seen.add(key)
            out.append(TransportPlan(beta, beta2, {c: Fraction(m, scale) for c, m in key}))
    return out
