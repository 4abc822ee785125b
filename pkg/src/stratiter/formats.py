"""Line-oriented text formats for games and automata.

Every file starts with a header line naming the kind.  Blank lines and
``#`` comments are ignored.  Rationals are written ``p/q`` or as integers;
decimal literals are rejected.

SSG::

    ssg eps=1/4
    state one sink 1
    state e sink eps          # a parameter from the header
    state a av min:1/2 max:1/2
    state max max a e
    state min min one a

Energy game::

    energy
    state x 1
    state u 0
    edge x u -12

Probabilistic automaton::

    pa
    state s a
    dist b1 s u:1/2 s:1/2
"""

from __future__ import annotations

import re
from fractions import Fraction

from .energy import EnergyGame
from .energy import InvalidGame as InvalidEnergyGame
from .pametrics import PA, InvalidAutomaton
from .ssg import SSG, InvalidGame as InvalidSSG

_RATIONAL = re.compile(r"^-?\d+(?:/\d+)?$")
_NAME = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_'.-]*$")


class GameFileError(ValueError):
    """Malformed input; ``line`` is 1-based or None."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class InvariantError(GameFileError):
    """Well-formed input describing an invalid model."""


def format_value(x) -> str:
    if x == float("inf"):
        return "inf"
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(x)


def parse_rational(tok: str, line=None) -> Fraction:
    if not _RATIONAL.match(tok):
        raise GameFileError(f"not an exact rational: {tok!r}", line)
    num, _, den = tok.partition("/")
    if den and int(den) == 0:
        raise GameFileError(f"zero denominator in {tok!r}", line)
    return Fraction(int(num), int(den) if den else 1)


def _name(tok, line):
    if not _NAME.match(tok):
        raise GameFileError(f"bad name {tok!r}", line)
    return tok


def _lines(text):
    for i, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].split()
        if body:
            yield i, body


def _masses(tokens, line):
    p = {}
    for tok in tokens:
        target, sep, mass = tok.partition(":")
        if not sep:
            raise GameFileError(f"expected state:mass, got {tok!r}", line)
        target = _name(target, line)
        if target in p:
            raise GameFileError(f"{target!r} listed twice", line)
        p[target] = parse_rational(mass, line)
    if not p:
        raise GameFileError("empty distribution", line)
    return p


def parse(text: str):
    """Parse a file; returns ``(kind, model, params)``."""
    lines = list(_lines(text))
    if not lines:
        raise GameFileError("empty file")
    lineno, header = lines[0]
    kind = header[0]
    parsers = {"ssg": _parse_ssg, "energy": _parse_energy, "pa": _parse_pa}
    if kind not in parsers:
        raise GameFileError(f"unknown kind {kind!r}", lineno)
    params = {}
    for tok in header[1:]:
        key, sep, val = tok.partition("=")
        if not sep:
            raise GameFileError(f"expected key=value, got {tok!r}", lineno)
        params[_name(key, lineno)] = parse_rational(val, lineno)
    body = lines[1:]
    if not body:
        raise GameFileError("no states", lineno)
    model = parsers[kind](body, params)
    return kind, model, params


def _declare(seen, name, line):
    if name in seen:
        raise InvariantError(f"state {name!r} declared twice", line)
    seen[name] = line


def _check_refs(refs, seen):
    for name, line in refs:
        if name not in seen:
            raise InvariantError(f"unknown state {name!r}", line)


def _parse_ssg(body, params):
    kind, succ, dist, payoff, seen, refs = {}, {}, {}, {}, {}, []
    for line, toks in body:
        if toks[0] != "state" or len(toks) < 3:
            raise GameFileError("expected: state NAME KIND ...", line)
        v, k, rest = _name(toks[1], line), toks[2], toks[3:]
        _declare(seen, v, line)
        if k in ("min", "max"):
            if not rest:
                raise InvariantError(f"{k} state {v!r} has no successor", line)
            succ[v] = [_name(w, line) for w in rest]
            refs.extend((w, line) for w in succ[v])
        elif k == "av":
            dist[v] = _masses(rest, line)
            if any(m < 0 for m in dist[v].values()) or sum(dist[v].values()) != 1:
                raise InvariantError(f"distribution of {v!r} does not sum to 1", line)
            refs.extend((w, line) for w in dist[v])
        elif k == "sink":
            if len(rest) != 1:
                raise GameFileError("sink needs exactly one payoff", line)
            tok = rest[0]
            if tok in params:
                payoff[v] = params[tok]
            else:
                payoff[v] = parse_rational(tok, line)
            if not 0 <= payoff[v] <= 1:
                raise InvariantError(f"payoff {tok} outside [0,1]", line)
        else:
            raise GameFileError(f"unknown state kind {k!r}", line)
        kind[v] = k
    _check_refs(refs, seen)
    try:
        return SSG(kind, succ, dist, payoff)
    except InvalidSSG as exc:
        raise InvariantError(str(exc)) from None


def _parse_energy(body, params):
    owner, edges, seen, refs = {}, [], {}, []
    for line, toks in body:
        if toks[0] == "state":
            if len(toks) != 3 or toks[2] not in ("0", "1"):
                raise GameFileError("expected: state NAME 0|1", line)
            v = _name(toks[1], line)
            _declare(seen, v, line)
            owner[v] = int(toks[2])
        elif toks[0] == "edge":
            if len(toks) != 4:
                raise GameFileError("expected: edge FROM TO WEIGHT", line)
            v, t = _name(toks[1], line), _name(toks[2], line)
            w = parse_rational(toks[3], line)
            if w.denominator != 1:
                raise GameFileError(f"weight {toks[3]} is not an integer", line)
            refs.extend([(v, line), (t, line)])
            edges.append((v, t, int(w), line))
        else:
            raise GameFileError(f"unknown record {toks[0]!r}", line)
    if not owner:
        raise GameFileError("no states", body[0][0])
    _check_refs(refs, seen)
    pairs = {}
    for v, t, _, line in edges:
        if (v, t) in pairs:
            raise InvariantError(f"duplicate edge {v} -> {t}", line)
        pairs[v, t] = line
    sources = {v for v, _, _, _ in edges}
    for v, line in seen.items():
        if v not in sources:
            raise InvariantError(f"state {v!r} has no outgoing edge", line)
    try:
        return EnergyGame(owner, tuple((v, t, w) for v, t, w, _ in edges))
    except InvalidEnergyGame as exc:
        raise InvariantError(str(exc)) from None


def _parse_pa(body, params):
    label, dists, seen, refs, owners = {}, {}, {}, [], []
    names = set()
    for line, toks in body:
        if toks[0] == "state":
            if len(toks) != 3:
                raise GameFileError("expected: state NAME LABEL", line)
            s = _name(toks[1], line)
            _declare(seen, s, line)
            label[s] = _name(toks[2], line)
        elif toks[0] == "dist":
            if len(toks) < 4:
                raise GameFileError("expected: dist NAME OWNER state:mass ...", line)
            name, owner = _name(toks[1], line), _name(toks[2], line)
            if name in names:
                raise InvariantError(f"distribution {name!r} declared twice", line)
            names.add(name)
            p = _masses(toks[3:], line)
            if any(m < 0 for m in p.values()) or sum(p.values()) != 1:
                raise InvariantError(f"distribution {name!r} does not sum to 1", line)
            refs.append((owner, line))
            refs.extend((u, line) for u in p)
            owners.append(owner)
            dists[name] = (owner, p)
        else:
            raise GameFileError(f"unknown record {toks[0]!r}", line)
    if not label:
        raise GameFileError("no states", body[0][0])
    _check_refs(refs, seen)
    for s, line in seen.items():
        if s not in owners:
            raise InvariantError(f"state {s!r} has no distribution", line)
    try:
        return PA(label, dists)
    except InvalidAutomaton as exc:
        raise InvariantError(str(exc)) from None


def load(path):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def _masses_str(p):
    return " ".join(f"{u}:{format_value(m)}" for u, m in p.items())


def emit_ssg(g: SSG) -> str:
    out = ["ssg"]
    for v, k in g.kind.items():
        if k in ("min", "max"):
            out.append(f"state {v} {k} {' '.join(g.succ[v])}")
        elif k == "av":
            out.append(f"state {v} av {_masses_str(g.dist[v])}")
        else:
            out.append(f"state {v} sink {format_value(g.payoff[v])}")
    return "\n".join(out) + "\n"


def emit_energy(g: EnergyGame) -> str:
    out = ["energy"]
    out += [f"state {v} {p}" for v, p in g.owner.items()]
    out += [f"edge {v} {t} {w}" for v, t, w in g.edges]
    return "\n".join(out) + "\n"


def emit_pa(pa: PA) -> str:
    out = ["pa"]
    out += [f"state {s} {lab}" for s, lab in pa.label.items()]
    out += [f"dist {n} {o} {_masses_str(p)}" for n, (o, p) in pa.dists.items()]
    return "\n".join(out) + "\n"


def emit(model) -> str:
    if isinstance(model, SSG):
        return emit_ssg(model)
    if isinstance(model, EnergyGame):
        return emit_energy(model)
    if isinstance(model, PA):
        return emit_pa(model)
    raise TypeError(f"cannot emit {type(model).__name__}")
