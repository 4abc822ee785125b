import random
from fractions import Fraction

import pytest

from helpers import UNIT, fixture, random_assignment, random_ssg, value_iterate_ssg
from stratiter import ssg
from stratiter.mv import Assignment
from stratiter.ssg import SSG, InvalidGame
from stratiter.strategy import Strategy

H, Q = Fraction(1, 2), Fraction(1, 4)


def test_validation():
    with pytest.raises(InvalidGame):
        SSG({})
    with pytest.raises(InvalidGame):
        SSG({"a": "max"})
    with pytest.raises(InvalidGame):
        SSG({"a": "max"}, succ={"a": ["b"]})
    with pytest.raises(InvalidGame):
        SSG({"a": "max"}, succ={"a": ["a", "a"]})
    with pytest.raises(InvalidGame):
        SSG({"a": "av"}, dist={"a": {"a": H}})
    with pytest.raises(InvalidGame):
        SSG({"a": "sink"})
    with pytest.raises(InvalidGame):
        SSG({"a": "sink"}, payoff={"a": 2})
    with pytest.raises(InvalidGame):
        SSG({"a": "sink"}, payoff={"a": 1, "b": 0})
    with pytest.raises(InvalidGame):
        SSG({"a": "chance"})


@pytest.mark.parametrize("seed", range(20))
def test_value_term_matches_direct_evaluation(seed):
    rng = random.Random(seed)
    g = random_ssg(rng, rng.randint(1, 6))
    f = ssg.value_term(g)
    for _ in range(10):
        a = random_assignment(rng, UNIT, g.states)
        assert f.evaluate(a).raw() == ssg.value_direct(g, a)


def test_eps_sink_fixed_strategies():
    g = fixture("eps_sink.ssg")
    to_one = ssg.solve_fixed_min_strategy(g, Strategy({"min": 0}))
    assert to_one.raw() == {"1": 1, "eps": Q, "av": 1, "max": 1, "min": 1}
    to_av = ssg.solve_fixed_min_strategy(g, Strategy({"min": 1}))
    assert to_av["min"] == Q
    via_av = ssg.solve_fixed_max_strategy(g, Strategy({"max": 0}))
    assert all(via_av[v] == 0 for v in ("av", "max", "min"))
    via_eps = ssg.solve_fixed_max_strategy(g, Strategy({"max": 1}))
    assert via_eps["min"] == Q


def test_trap_set():
    g = fixture("eps_sink.ssg")
    assert ssg.trap_set(g, Strategy({"max": 0})) == {"av", "max", "min"}
    assert ssg.trap_set(g, Strategy({"max": 1})) == frozenset()
    g4 = fixture("two_max.ssg")
    assert ssg.trap_set(g4, Strategy({"max1": 1, "max2": 1})) == {"max1", "max2"}
    assert ssg.trap_set(g4, Strategy({"max1": 0, "max2": 1})) == {"max2"}


def _is_least_fixpoint_of(g, decide, C, mu):
    """``mu`` is a fixpoint of the game with ``decide``'s states fixed, and
    every Kleene iterate from 0 stays below it."""
    h = _fixed_game(g, decide, C)
    assert ssg.value_direct(h, mu) == mu.raw()
    a = {v: Fraction(0) for v in g.states}
    for _ in range(60):
        a = ssg.value_direct(h, a)
        assert all(a[v] <= mu[v] for v in g.states)


def _fixed_game(g, decide, C):
    succ = dict(g.succ)
    for v in g.of_kind(decide):
        succ[v] = [g.succ[v][C[v]]]
    return SSG(dict(g.kind), succ, dict(g.dist), dict(g.payoff))


@pytest.mark.parametrize("seed", range(25))
def test_fixed_strategy_solvers_give_least_fixpoints(seed):
    rng = random.Random(seed)
    g = random_ssg(rng, rng.randint(1, 6))
    for decide, solve, dec in (("min", ssg.solve_fixed_min_strategy, ssg.min_decomposition(g)),
                               ("max", ssg.solve_fixed_max_strategy, ssg.max_decomposition(g))):
        C = dec.random_initial(rng)
        _is_least_fixpoint_of(g, decide, C, solve(g, C))


@pytest.mark.parametrize("seed", range(20))
def test_solution_is_least_fixpoint(seed):
    rng = random.Random(1000 + seed)
    g = random_ssg(rng, rng.randint(1, 6))
    mu = ssg.solve_ssg_above(g).values
    assert ssg.value_direct(g, mu) == mu.raw()
    approx = value_iterate_ssg(g, rounds=80)
    assert all(approx[v] <= mu[v] for v in g.states)


def test_single_sink_game():
    g = SSG({"s": "sink"}, payoff={"s": Fraction(2, 3)})
    assert ssg.solve_ssg_above(g).values.raw() == {"s": Fraction(2, 3)}
    assert ssg.solve_ssg_below(g).iterations == 0


def test_self_loops_have_value_zero():
    g = SSG({"m": "max", "n": "min", "a": "av"},
            succ={"m": ["m", "n"], "n": ["n"]}, dist={"a": {"m": H, "a": H}})
    assert ssg.solve_ssg_above(g).values == Assignment.constant(UNIT, g.states)
    assert ssg.solve_ssg_below(g).values == Assignment.constant(UNIT, g.states)
