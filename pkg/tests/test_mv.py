from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stratiter.mv import (
    Assignment,
    ChainMismatch,
    DomainMismatch,
    FiniteChain,
    MVValue,
    UnitInterval,
    complement,
    decrease,
    join,
    meet,
    norm,
    ominus,
    oplus,
)

UNIT = UnitInterval()
unit_vals = st.fractions(min_value=0, max_value=1, max_denominator=12)


@st.composite
def chain_triples(draw):
    if draw(st.booleans()):
        chain = UNIT
        xs = [draw(unit_vals) for _ in range(3)]
    else:
        chain = FiniteChain(draw(st.integers(1, 20)))
        xs = [draw(st.integers(0, chain.k)) for _ in range(3)]
    return [MVValue(chain, x) for x in xs]


def test_unit_interval_ops():
    h, q = Fraction(1, 2), Fraction(3, 4)
    assert UNIT.oplus(h, q) == 1
    assert UNIT.ominus(h, q) == 0
    assert UNIT.ominus(q, h) == Fraction(1, 4)
    assert UNIT.complement(q) == Fraction(1, 4)


def test_finite_chain_ops():
    c = FiniteChain(10)
    assert c.oplus(7, 5) == 10
    assert c.ominus(3, 5) == 0
    assert c.complement(3) == 7


def test_rejects_floats_and_out_of_range():
    with pytest.raises(TypeError):
        MVValue(UNIT, 0.5)
    with pytest.raises(ValueError):
        MVValue(UNIT, Fraction(3, 2))
    with pytest.raises(ValueError):
        MVValue(FiniteChain(3), 4)
    with pytest.raises(ValueError):
        MVValue(FiniteChain(3), Fraction(1, 2))
    with pytest.raises(ValueError):
        FiniteChain(0)


def test_chain_mismatch():
    with pytest.raises(ChainMismatch):
        oplus(MVValue(UNIT, 0), MVValue(FiniteChain(2), 0))


@given(chain_triples())
def test_mv_axioms(t):
    x, y, z = t
    zero = MVValue(x.chain, x.chain.bottom)
    assert oplus(x, oplus(y, z)) == oplus(oplus(x, y), z)
    assert oplus(x, y) == oplus(y, x)
    assert oplus(x, zero) == x
    assert complement(complement(x)) == x
    assert oplus(x, complement(zero)) == complement(zero)
    # Łukasiewicz axiom
    assert oplus(complement(oplus(complement(x), y)), y) == \
        oplus(complement(oplus(complement(y), x)), x)


@given(chain_triples())
def test_lattice_and_adjunction(t):
    x, y, z = t
    assert join(x, y).value == max(x.value, y.value)
    assert meet(x, y).value == min(x.value, y.value)
    # x ⊖ y ⊑ z  iff  x ⊑ z ⊕ y
    assert (ominus(x, y) <= z) == (x <= oplus(z, y))
    assert ominus(x, y) == complement(oplus(complement(x), y))


@given(st.lists(unit_vals, min_size=1, max_size=5), unit_vals)
def test_decrease_and_norm(vals, delta):
    dom = [f"y{i}" for i in range(len(vals))]
    a = Assignment(UNIT, dict(zip(dom, vals)), dom)
    b = decrease(a, dom[:1], delta)
    assert b <= a
    assert b[dom[0]] == max(vals[0] - delta, 0)
    assert all(b[y] == a[y] for y in dom[1:])
    assert a.ominus(b).norm() <= delta
    assert norm(a).value == max(vals)


def test_assignment_basics():
    a = Assignment(UNIT, {"x": Fraction(1, 2), "y": 0})
    assert a.support() == {"x"}
    assert a.min_support_value() == Fraction(1, 2)
    assert Assignment.constant(UNIT, ["x", "y"]).min_support_value() is None
    assert a.restrict({"x"}).domain == ("x",)
    assert a.replace({"y": 1})["y"] == 1
    assert a < a.replace({"y": 1})
    assert list(a) == ["x", "y"]
    raw = a.raw()
    raw["x"] = 0
    assert a["x"] == Fraction(1, 2)


def test_assignment_errors():
    a = Assignment(UNIT, {"x": 0})
    with pytest.raises(DomainMismatch):
        a <= Assignment(UNIT, {"y": 0})
    with pytest.raises(ChainMismatch):
        a <= Assignment(FiniteChain(1), {"x": 0})
    with pytest.raises(DomainMismatch):
        a.decrease({"z"}, Fraction(1, 2))
    with pytest.raises(DomainMismatch):
        Assignment(UNIT, {"x": 0}, ["x", "y"])
    with pytest.raises(DomainMismatch):
        Assignment(UNIT, {}, []).norm()
