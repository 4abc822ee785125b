"""Random energy games and the cross-solver benchmark."""

from __future__ import annotations

import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .energy import (
    EnergyGame,
    solve_energy_above,
    solve_energy_below,
    solve_kleene,
    solve_vi,
    transform_finite,
)
from .formats import emit_energy

SOLVERS = ("TF", "KLE", "VI", "SI0", "SI1")
WORKERS_ENV = "STRATITER_WORKERS"


class Disagreement(RuntimeError):
    def __init__(self, message, path):
        super().__init__(f"{message}; counterexample written to {path}")
        self.path = path


@dataclass(frozen=True)
class BenchConfig:
    n: int
    p: Fraction | None = None
    W: int | None = None
    seed: int = 0
    runs: int = 1
    solvers: tuple = SOLVERS

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        p = Fraction(2, self.n) if self.p is None else Fraction(self.p)
        if not 0 < p <= 1:
            raise ValueError("p must lie in (0, 1]")
        W = self.n if self.W is None else self.W
        if W < 1:
            raise ValueError("W must be at least 1")
        if self.runs < 1:
            raise ValueError("runs must be positive")
        bad = [s for s in self.solvers if s not in SOLVERS]
        if bad or not self.solvers:
            raise ValueError(f"unknown solvers {bad}; choose from {', '.join(SOLVERS)}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "solvers", tuple(self.solvers))


def random_energy_game(n, p, W, seed) -> EnergyGame:
    """Erdős–Rényi style game: every ordered pair (self-loops included) is an
    edge with probability ``p``; a state left without edges gets one uniform
    edge.  Owners and weights in ``[-W, W]`` are uniform."""
    rng = random.Random(seed)
    p = Fraction(p)
    names = [f"v{i}" for i in range(n)]
    owner = {v: rng.randrange(2) for v in names}
    edges = []
    for v in names:
        mine = []
        for t in names:
            # exact Bernoulli(p) draw
            if rng.randrange(p.denominator) < p.numerator:
                mine.append((v, t, rng.randint(-W, W)))
        if not mine:
            mine.append((v, rng.choice(names), rng.randint(-W, W)))
        edges.extend(mine)
    return EnergyGame(owner, tuple(edges))


def instance_seed(seed, index) -> str:
    return f"{seed}:{index}"


def _run_tf(g):
    transform_finite(g)
    return None, 0, None


def _run_kle(g):
    sol, steps = solve_kleene(g)
    return sol, steps, None


def _run_vi(g):
    sol, raises = solve_vi(g)
    return sol, raises, None


def _run_si0(g):
    sol, rec, dec = solve_energy_above(g)
    return sol, rec.iterations, dec.count()


def _run_si1(g):
    sol, rec, dec = solve_energy_below(g)
    return sol, rec.iterations, dec.count()


RUNNERS = {"TF": _run_tf, "KLE": _run_kle, "VI": _run_vi, "SI0": _run_si0, "SI1": _run_si1}


@dataclass
class InstanceResult:
    index: int
    game: EnergyGame
    times: dict = field(default_factory=dict)
    iterations: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    solutions: dict = field(default_factory=dict)

    @property
    def agree(self) -> bool:
        sols = [s for s in self.solutions.values() if s is not None]
        return all(s == sols[0] for s in sols)

    @property
    def within_bound(self) -> bool:
        return all(self.iterations[s] < b for s, b in self.bounds.items() if b is not None)


def run_instance(index, game, solvers, runners=None) -> InstanceResult:
    runners = runners or RUNNERS
    res = InstanceResult(index, game)
    for name in solvers:
        t0 = time.perf_counter()
        sol, its, bound = runners[name](game)
        res.times[name] = time.perf_counter() - t0
        res.iterations[name] = its
        res.bounds[name] = bound
        res.solutions[name] = sol
    return res


def _job(args):
    cfg, index = args
    game = random_energy_game(cfg.n, cfg.p, cfg.W, instance_seed(cfg.seed, index))
    return run_instance(index, game, cfg.solvers)


def workers_from_env() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


def bench(cfg: BenchConfig, runners=None, dump_dir=".", workers=None):
    """Run every instance; raises :class:`Disagreement` on mismatching solutions."""
    workers = workers_from_env() if workers is None else workers
    if runners is not None or workers == 1:
        results = []
        for i in range(cfg.runs):
            game = random_energy_game(cfg.n, cfg.p, cfg.W, instance_seed(cfg.seed, i))
            results.append(run_instance(i, game, cfg.solvers, runners))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_job, [(cfg, i) for i in range(cfg.runs)]))
    for r in results:
        if not r.agree:
            path = os.path.join(dump_dir, f"counterexample-{cfg.seed}-{r.index}.eg")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(f"# solvers disagree: {r.solutions}\n")
                fh.write(emit_energy(r.game))
            raise Disagreement(f"solvers disagree on instance {r.index}", path)
    return results


def summary(cfg: BenchConfig, results) -> list:
    rows = []
    for name in cfg.solvers:
        rows.append({
            "solver": name,
            "time": sum(r.times[name] for r in results),
            "iterations": sum(r.iterations[name] for r in results),
            "max_iterations": max(r.iterations[name] for r in results),
            "within_bound": all(r.bounds[name] is None or r.iterations[name] < r.bounds[name]
                                for r in results),
        })
    return rows


def render_table(cfg: BenchConfig, results, show_time=True) -> str:
    """Aligned text table; ``show_time=False`` makes the output reproducible."""
    rows = summary(cfg, results)
    agree = all(r.agree for r in results)
    head = f"n={cfg.n} p={cfg.p} W={cfg.W} seed={cfg.seed} runs={cfg.runs} agree={str(agree).lower()}"
    cols = f"{'solver':<7}" + (f"{'time[s]':>10}" if show_time else "")
    lines = [head, cols + f"{'iters':>9}{'max':>7}{'<bound':>8}"]
    for r in rows:
        t = f"{r['time']:>10.4f}" if show_time else ""
        lines.append(f"{r['solver']:<7}{t}{r['iterations']:>9}"
                     f"{r['max_iterations']:>7}{str(r['within_bound']).lower():>8}")
    return "\n".join(lines)


def render_csv(cfg: BenchConfig, results, show_time=True) -> str:
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["instance", "solver", "time", "iterations", "bound", "agree"])
    for r in results:
        for name in cfg.solvers:
            b = r.bounds[name]
            t = f"{r.times[name]:.6f}" if show_time else ""
            w.writerow([r.index, name, t, r.iterations[name],
                        "" if b is None else b, str(r.agree).lower()])
    return buf.getvalue()


__all__ = ["BenchConfig", "random_energy_game", "bench", "run_instance", "render_table",
           "render_csv", "summary", "Disagreement", "SOLVERS"]
