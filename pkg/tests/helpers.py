"""Random instance generators and independent oracles shared by the tests."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from pathlib import Path

from stratiter.bench import random_energy_game
from stratiter.energy import energy_direct, solve_kleene
from stratiter.formats import load
from stratiter.mv import Assignment, FiniteChain, UnitInterval
from stratiter.nonexp import (
    Average,
    Compose,
    Const,
    DisjointUnion,
    MaxRel,
    MinRel,
    Reindex,
    SubWeight,
)
from stratiter.pametrics import PA
from stratiter.ssg import SSG

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
UNIT = UnitInterval()


def fixture(name):
    return load(FIXTURES / name)[1]


def rand_fraction(rng, den=None):
    den = den or rng.choice([1, 2, 3, 4, 5, 6, 8])
    return Fraction(rng.randint(0, den), den)


def rand_distribution(rng, support):
    weights = [rng.randint(1, 4) for _ in support]
    total = sum(weights)
    return {s: Fraction(w, total) for s, w in zip(support, weights)}


def random_assignment(rng, chain, domain):
    if isinstance(chain, FiniteChain):
        return Assignment(chain, {y: rng.randint(0, chain.k) for y in domain}, domain)
    return Assignment(chain, {y: rand_fraction(rng) for y in domain}, domain)


def random_ssg(rng, n):
    names = [f"s{i}" for i in range(n)]
    kind, succ, dist, payoff = {}, {}, {}, {}
    for v in names:
        k = rng.choice(["min", "max", "av", "sink"])
        kind[v] = k
        if k in ("min", "max"):
            succ[v] = rng.sample(names, rng.randint(1, min(3, n)))
        elif k == "av":
            dist[v] = rand_distribution(rng, rng.sample(names, rng.randint(1, min(3, n))))
        else:
            payoff[v] = rand_fraction(rng, 4)
    return SSG(kind, succ, dist, payoff)


def value_iterate_ssg(g, rounds=2000):
    """Kleene iteration of the value function from 0 (float-free, exact)."""
    from stratiter.ssg import value_direct

    a = {v: Fraction(0) for v in g.states}
    for _ in range(rounds):
        b = value_direct(g, a)
        if b == a:
            break
        a = b
    return a


def random_game(rng, n, W, p=None):
    p = Fraction(2, n) if p is None else p
    return random_energy_game(n, p, W, rng.randrange(10**9))


def finite_games(count, seed, max_n=10, max_w=10):
    """Random energy games all of whose values are finite (rejection sampling)."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n, W = rng.randint(2, max_n), rng.randint(1, max_w)
        g = random_game(rng, n, W)
        sol, _ = solve_kleene(g)
        if all(v != math.inf for v in sol.values()):
            out.append(g)
    return out


def energy_kleene_direct(g, k):
    """Kleene from 0 with the straight-line formula (independent of the terms)."""
    a = {v: 0 for v in g.states}
    while True:
        b = energy_direct(g, k, a)
        if b == a:
            return a
        a = b


def random_pa(rng, n, labels="ab", max_dists=2, max_support=3):
    names = [f"p{i}" for i in range(n)]
    label = {s: rng.choice(labels) for s in names}
    dists, c = {}, 0
    for s in names:
        for _ in range(rng.randint(1, max_dists)):
            supp = rng.sample(names, rng.randint(1, min(max_support, n)))
            dists[f"d{c}"] = (s, rand_distribution(rng, supp))
            c += 1
    return PA(label, dists)


def random_term(rng, chain, ys, zs):
    """A random combinator term from positions ys to positions zs."""
    options = ["const", "reindex", "min", "max", "compose", "union"]
    if isinstance(chain, UnitInterval):
        options.append("average")
    else:
        options.append("sub")
    kind = rng.choice(options)
    if kind == "const":
        return Const({z: random_assignment(rng, chain, [z])[z] for z in zs})
    if kind == "reindex":
        return Reindex({z: rng.choice(ys) for z in zs})
    if kind in ("min", "max"):
        pre = {z: rng.sample(ys, rng.randint(1, len(ys))) for z in zs}
        return MinRel(pre) if kind == "min" else MaxRel(pre)
    if kind == "average":
        return Average({z: rand_distribution(rng, rng.sample(ys, rng.randint(1, len(ys))))
                        for z in zs})
    if kind == "sub":
        # sub_w keeps positions: reindex first, then subtract
        inner = Reindex({z: rng.choice(ys) for z in zs})
        k = chain.k
        return Compose(SubWeight({z: rng.randint(-k, k) for z in zs}, k), inner)
    if kind == "compose":
        ws = [f"w{i}" for i in range(rng.randint(1, 3))]
        return Compose(random_term(rng, chain, ws, zs), random_term(rng, chain, ys, ws))
    cut = rng.randint(1, len(zs)) if len(zs) > 1 else 1
    parts = [random_term(rng, chain, ys, zs[:cut])]
    if zs[cut:]:
        parts.append(random_term(rng, chain, ys, zs[cut:]))
    return DisjointUnion(parts)


def random_endo(rng, chain, n):
    ys = [f"y{i}" for i in range(n)]
    return random_term(rng, chain, ys, ys), ys


def assignment_norm_gap(f, a, b):
    """``(||f(b) - f(a)||, ||b - a||)`` with truncated subtraction."""
    fa, fb = f.evaluate(a), f.evaluate(b)
    return fb.ominus(fa).norm() if fa.domain else 0, b.ominus(a).norm()
