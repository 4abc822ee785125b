"""Non-expansive functions built from combinators, and their approximations.

A term denotes a function ``M^Y -> M^Z``.  ``dom`` is the set of positions a
term reads and ``cod`` the ordered tuple of positions it writes.  Every term
supports

* ``evaluate(a)``: the function itself, and
* ``approximation(a)``: the set map ``Y' -> f#a(Y')`` on subsets of the
  support of ``a``, via the closed forms for each constructor.

The fixpoint machinery at the bottom of the module (``nu_approx``,
``nu_star``, ``decrease_to_prefixpoint``) only relies on those two methods,
so anything providing them (for instance the behavioural-distance operator
in :mod:`stratiter.pametrics`) can be plugged in.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .mv import Assignment, DomainMismatch, FiniteChain, UnitInterval


class NotAFixpoint(ValueError):
    """The assignment handed in is not a (post-)fixpoint as required."""


class SoundnessError(RuntimeError):
    """An internal guarantee failed; this indicates a bug, not bad input."""


class FunTerm:
    dom: frozenset
    cod: tuple

    def _eval(self, vals: dict, chain) -> dict:
        raise NotImplementedError

    def _prepare(self, vals: dict, chain):
        """Return ``(f(a) as dict, closure computing f#a)``."""
        raise NotImplementedError

    def _check_input(self, a: Assignment):
        if not self.dom <= a._values.keys():
            missing = sorted(map(repr, self.dom - a._values.keys()))[:5]
            raise DomainMismatch(f"assignment lacks positions {', '.join(missing)}")

    def evaluate(self, a: Assignment) -> Assignment:
        self._check_input(a)
        return Assignment(a.chain, self._eval(a._values, a.chain), self.cod, check=False)

    __call__ = evaluate

    def approximation(self, a: Assignment):
        """The set map ``Y' -> f#a(Y')`` for subsets of the support of ``a``."""
        self._check_input(a)
        _, fn = self._prepare(a._values, a.chain)
        carrier = a.support()

        def approx(subset):
            subset = frozenset(subset)
            if not subset <= carrier:
                raise ValueError("approximation argument must lie inside the support of a")
            return frozenset(fn(subset))

        return approx


class Const(FunTerm):
    """The constant function with value ``k`` (an assignment over Z)."""

    def __init__(self, values):
        self.values = dict(values)
        self.dom = frozenset()
        self.cod = tuple(self.values)

    def _eval(self, vals, chain):
        return {z: chain.coerce(v) for z, v in self.values.items()}

    def _prepare(self, vals, chain):
        return self._eval(vals, chain), lambda subset: ()


class Reindex(FunTerm):
    """``a -> a . u`` for a map ``u: Z -> Y``."""

    def __init__(self, u):
        self.u = dict(u)
        self.dom = frozenset(self.u.values())
        self.cod = tuple(self.u)

    def _eval(self, vals, chain):
        return {z: vals[y] for z, y in self.u.items()}

    def _prepare(self, vals, chain):
        u = self.u
        return self._eval(vals, chain), lambda subset: [z for z, y in u.items() if y in subset]


class _Extremum(FunTerm):
    def __init__(self, preimage):
        # preimage: z -> the positions y with y R z
        self.pre = {z: tuple(ys) for z, ys in dict(preimage).items()}
        for z, ys in self.pre.items():
            if not ys:
                raise ValueError(f"relation is not left-total: nothing is related to {z!r}")
        self.dom = frozenset(y for ys in self.pre.values() for y in ys)
        self.cod = tuple(self.pre)

    @classmethod
    def from_pairs(cls, pairs):
        pre = {}
        for y, z in pairs:
            pre.setdefault(z, []).append(y)
        return cls(pre)

    def _argsets(self, vals, pick):
        out, args = {}, {}
        for z, ys in self.pre.items():
            best = pick(vals[y] for y in ys)
            out[z] = best
            if best != 0:
                args[z] = frozenset(y for y in ys if vals[y] == best)
        return out, args


class MinRel(_Extremum):
    """``f(a)(z) = min over y R z of a(y)``."""

    def _eval(self, vals, chain):
        return {z: min(vals[y] for y in ys) for z, ys in self.pre.items()}

    def _prepare(self, vals, chain):
        out, args = self._argsets(vals, min)
        return out, lambda subset: [z for z, s in args.items() if not s.isdisjoint(subset)]


class MaxRel(_Extremum):
    """``f(a)(z) = max over y R z of a(y)``."""

    def _eval(self, vals, chain):
        return {z: max(vals[y] for y in ys) for z, ys in self.pre.items()}

    def _prepare(self, vals, chain):
        out, args = self._argsets(vals, max)
        return out, lambda subset: [z for z, s in args.items() if s <= subset]


class Average(FunTerm):
    """Expectation under finitely many distributions (unit interval only).

    ``dists`` maps each output position to a distribution over Y given as a
    mapping ``y -> Fraction`` whose masses sum to exactly one.
    """

    def __init__(self, dists):
        self.dists = {}
        for z, p in dict(dists).items():
            p = {y: Fraction(m) for y, m in dict(p).items() if m != 0}
            if any(m < 0 for m in p.values()) or sum(p.values()) != 1:
                raise ValueError(f"distribution for {z!r} does not sum to 1")
            self.dists[z] = p
        self.dom = frozenset(y for p in self.dists.values() for y in p)
        self.cod = tuple(self.dists)
        self._supp = {z: frozenset(p) for z, p in self.dists.items()}

    def _eval(self, vals, chain):
        if not isinstance(chain, UnitInterval):
            raise TypeError("average is only defined on the unit interval")
        return {z: sum((m * vals[y] for y, m in p.items()), Fraction(0))
                for z, p in self.dists.items()}

    def _prepare(self, vals, chain):
        out = self._eval(vals, chain)
        supp = self._supp
        return out, lambda subset: [z for z, s in supp.items() if out[z] != 0 and s <= subset]


class SubWeight(FunTerm):
    """``f(a)(e) = min(max(a(e) - w(e), 0), k)`` on the finite chain {0..k}."""

    def __init__(self, weights, k):
        self.w = {e: int(x) for e, x in dict(weights).items()}
        self.k = k
        self.dom = frozenset(self.w)
        self.cod = tuple(self.w)

    def _check_chain(self, chain):
        if not isinstance(chain, FiniteChain) or chain.k != self.k:
            raise TypeError(f"weight subtraction needs the chain {{0..{self.k}}}, got {chain}")

    def _eval(self, vals, chain):
        self._check_chain(chain)
        k = self.k
        out = {}
        for e, w in self.w.items():
            x = vals[e] - w
            out[e] = 0 if x < 0 else (k if x > k else x)
        return out

    def _prepare(self, vals, chain):
        out = self._eval(vals, chain)
        k, w = self.k, self.w
        return out, lambda subset: [e for e in subset if e in w and 0 < vals[e] - w[e] <= k]


class Compose(FunTerm):
    """``outer . inner``."""

    def __init__(self, outer: FunTerm, inner: FunTerm):
        if not outer.dom <= set(inner.cod):
            raise ValueError("outer term reads positions the inner term does not produce")
        self.outer, self.inner = outer, inner
        self.dom = inner.dom
        self.cod = outer.cod

    def _eval(self, vals, chain):
        return self.outer._eval(self.inner._eval(vals, chain), chain)

    def _prepare(self, vals, chain):
        mid, inner_fn = self.inner._prepare(vals, chain)
        out, outer_fn = self.outer._prepare(mid, chain)
        return out, lambda subset: outer_fn(frozenset(inner_fn(subset)))


class DisjointUnion(FunTerm):
    """Juxtaposition of terms whose codomains are pairwise disjoint."""

    def __init__(self, parts):
        self.parts = tuple(parts)
        cod, seen = [], set()
        for p in self.parts:
            for z in p.cod:
                if z in seen:
                    raise ValueError(f"codomains overlap at {z!r}")
                seen.add(z)
                cod.append(z)
        self.dom = frozenset().union(*(p.dom for p in self.parts))
        self.cod = tuple(cod)

    def _eval(self, vals, chain):
        out = {}
        for p in self.parts:
            out.update(p._eval(vals, chain))
        return out

    def _prepare(self, vals, chain):
        out, fns = {}, []
        for p in self.parts:
            o, fn = p._prepare(vals, chain)
            out.update(o)
            fns.append(fn)

        def approx(subset):
            res = []
            for fn in fns:
                res.extend(fn(subset))
            return res

        return out, approx


def evaluate(f, a: Assignment) -> Assignment:
    return f.evaluate(a)


def approx(f, a: Assignment, subset) -> frozenset:
    return f.approximation(a)(subset)


def greatest_fixpoint(step, top: frozenset) -> frozenset:
    """Descending Kleene iteration of a monotone set map from ``top``."""
    current = frozenset(top)
    while True:
        nxt = frozenset(step(current)) & current
        if nxt == current:
            return current
        current = nxt


def _check_endo(f, a):
    if set(f.cod) != set(a.domain):
        raise DomainMismatch("term is not an endo-function on the assignment's domain")


def nu_approx(f, a: Assignment, *, fa: Assignment | None = None) -> frozenset:
    """Greatest fixpoint of ``f#a`` at a fixpoint ``a``; empty iff ``a`` is least."""
    _check_endo(f, a)
    if fa is None:
        fa = f.evaluate(a)
    if fa != a:
        raise NotAFixpoint("nu_approx needs a fixpoint of f")
    return greatest_fixpoint(f.approximation(a), a.support())


def nu_star(f, a: Assignment) -> frozenset:
    """Greatest fixpoint of ``Y' -> f#a(Y') ∩ [Y]^{a=f(a)}`` at a post-fixpoint ``a``.

    Emptiness certifies ``a <= mu f``.
    """
    _check_endo(f, a)
    fa = f.evaluate(a)
    if not a <= fa:
        raise NotAFixpoint("nu_star needs a post-fixpoint of f")
    carrier = frozenset(y for y in a.support() if a[y] == fa[y])
    step = f.approximation(a)
    return greatest_fixpoint(lambda s: step(s) & carrier, carrier)


def delta_candidates(a: Assignment) -> list:
    """Candidate decrements: occurring values, their positive differences, the
    least non-zero value and the chain's unit (finite chains)."""
    values = sorted(set(a._values.values()))
    cands = {v for v in values if v != 0}
    cands.update(y - x for x, y in combinations(values, 2))
    if isinstance(a.chain, FiniteChain):
        cands.add(1)
    return sorted(cands, reverse=True)


def decrease_to_prefixpoint(f, a: Assignment, subset, preferred=()):
    """Lower a non-least fixpoint on its vicious cycle to a strict pre-fixpoint.

    Returns ``(a', delta)`` with ``a' = a ⊖ delta`` on ``subset`` and
    ``f(a') <= a'``.  ``preferred`` candidates are tried first, in order;
    then the generic candidates from :func:`delta_candidates` in descending
    order; on the unit interval the smallest candidate is finally halved up
    to 64 times.
    """
    subset = frozenset(subset)
    if not subset:
        raise ValueError("cannot decrease on an empty set")
    if not subset <= a.support():
        raise ValueError("decrease set must lie inside the support")
    chain = a.chain
    tried = set()

    def attempt(delta):
        if delta in tried or not 0 < delta <= chain.top:
            return None
        tried.add(delta)
        lowered = a.decrease(subset, delta)
        if f.evaluate(lowered) <= lowered:
            return lowered
        return None

    for delta in list(preferred) + delta_candidates(a):
        lowered = attempt(delta)
        if lowered is not None:
            return lowered, delta
    if isinstance(chain, UnitInterval):
        delta = min(tried) if tried else a.min_support_value()
        for _ in range(64):
            delta = delta / 2
            lowered = attempt(delta)
            if lowered is not None:
                return lowered, delta
    raise SoundnessError("no decrement yields a pre-fixpoint; the function is not non-expansive?")
