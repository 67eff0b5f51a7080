"""Planning for grounded LTL in the toy OO-MDP.

Formula progression rewrites the specification against each step's labels,
so pairing environment states with progressed formulas yields a product
MDP whose accepting states carry the residual ``true``.  Synchronous value
iteration solves the product; a greedy rollout over the value table
produces the action plan.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import ltl
from .grounding import PropRegistry, label_state
from .world import (
    Action,
    Cell,
    HeldByAgent,
    InContainer,
    StateExplosion,
    ToyState,
    WorldConfig,
    action_to_str,
    available_actions,
    transition,
)


class PlannerError(Exception):
    pass


class HorizonExceeded(PlannerError):
    def __init__(self, message: str, dead_end: bool = False, steps_taken: int = 0):
        super().__init__(message)
        self.dead_end = dead_end
        self.steps_taken = steps_taken


@dataclass(frozen=True)
class ProductState:
    env: ToyState
    spec: ltl.LtlFormula

    @property
    def accepting(self) -> bool:
        return isinstance(self.spec, ltl.TrueConst)

    @property
    def dead(self) -> bool:
        return isinstance(self.spec, ltl.FalseConst)


def progress(f: ltl.LtlFormula, labels: frozenset[str]) -> ltl.LtlFormula:
    """One progression step: rewrite ``f`` against one step's label set.

    Residual true means the obligation is met; residual false means it can
    no longer be met.
    """
    return ltl.canonical(_progress(f, labels))


def _progress(f: ltl.LtlFormula, labels: frozenset[str]) -> ltl.LtlFormula:
    if isinstance(f, ltl.Atom):
        return ltl.TRUE if f.name in labels else ltl.FALSE
    if isinstance(f, (ltl.TrueConst, ltl.FalseConst)):
        return f
    if isinstance(f, ltl.Not):
        return ltl.Not(_progress(f.child, labels))
    if isinstance(f, ltl.And):
        return ltl.And(_progress(f.left, labels), _progress(f.right, labels))
    if isinstance(f, ltl.Or):
        return ltl.Or(_progress(f.left, labels), _progress(f.right, labels))
    if isinstance(f, ltl.Finally):
        return ltl.Or(_progress(f.child, labels), f)
    if isinstance(f, ltl.Globally):
        return ltl.And(_progress(f.child, labels), f)
    if isinstance(f, ltl.Until):
        return ltl.Or(_progress(f.right, labels),
                      ltl.And(_progress(f.left, labels), f))
    raise TypeError(f"not an LTL formula: {f!r}")


@dataclass
class ProductMdp:
    initial: ProductState
    states: set[ProductState]
    # state -> list of (action, successor, reward); absorbing states have no entries
    transitions: dict[ProductState, list[tuple[Action, "ProductState", float]]]
    gamma: float

    @property
    def accepting_states(self) -> set[ProductState]:
        return {s for s in self.states if s.accepting}


def build_product(w: WorldConfig, s0: ToyState, f: ltl.LtlFormula, reg: PropRegistry,
                  cap: int = 10**6) -> ProductMdp:
    """BFS the product of the environment with the progressed formula.

    Reward 1 on any transition entering the accepting residual from a
    non-accepting one; accepting and dead residuals are absorbing.
    """
    f = ltl.canonical(f)
    relevant = ltl.atoms(f)

    def labels(s: ToyState) -> frozenset[str]:
        return label_state(reg, w, s, restrict=relevant)

    initial = ProductState(s0, progress(f, labels(s0)))
    states = {initial}
    transitions: dict[ProductState, list[tuple[Action, ProductState, float]]] = {}
    frontier = [initial]
    while frontier:
        nxt = []
        for ps in frontier:
            if ps.accepting or ps.dead:
                transitions[ps] = []
                continue
            outgoing = []
            for a in available_actions(w, ps.env):
                env2 = transition(w, ps.env, a)
                spec2 = progress(ps.spec, labels(env2))
                ps2 = ProductState(env2, spec2)
                reward = 1.0 if (ps2.accepting and not ps.accepting) else 0.0
                outgoing.append((a, ps2, reward))
                if ps2 not in states:
                    states.add(ps2)
                    if len(states) > cap:
                        raise StateExplosion(f"product exceeds {cap} states")
                    nxt.append(ps2)
            transitions[ps] = outgoing
        frontier = nxt
    return ProductMdp(initial=initial, states=states, transitions=transitions, gamma=w.gamma)


@dataclass
class ValueTable:
    values: dict[ProductState, float]
    gamma: float
    epsilon: float
    sweeps: int = 0

    def __getitem__(self, ps: ProductState) -> float:
        return self.values.get(ps, 0.0)


def bellman_sweep(product: ProductMdp, values: dict[ProductState, float],
                  gamma: float) -> tuple[dict[ProductState, float], float]:
    """One synchronous Bellman backup over all states; returns the new
    table and the largest single-state change."""
    updated = {}
    delta = 0.0
    for ps in product.states:
        outgoing = product.transitions.get(ps, [])
        if outgoing:
            best = max(r + gamma * values.get(ps2, 0.0) for _, ps2, r in outgoing)
        else:
            best = 0.0
        updated[ps] = best
        delta = max(delta, abs(best - values.get(ps, 0.0)))
    return updated, delta


def value_iterate(product: ProductMdp, gamma: float, epsilon: float) -> ValueTable:
    values = {ps: 0.0 for ps in product.states}
    sweeps = 0
    while True:
        values, delta = bellman_sweep(product, values, gamma)
        sweeps += 1
        if delta < epsilon:
            return ValueTable(values=values, gamma=gamma, epsilon=epsilon, sweeps=sweeps)


@dataclass
class PlanResult:
    actions: list[Action]
    steps: list[ProductState]  # product states visited, initial first
    accepted: bool
    wall_time_ms: float
    value_sweeps: int = 0

    def to_json(self) -> dict:
        return {
            "actions": [action_to_str(a) for a in self.actions],
            "steps": [
                {"state": _state_digest(ps.env), "spec": ltl.format_ltl(ps.spec)}
                for ps in self.steps
            ],
            "accepted": self.accepted,
            "wall_time_ms": round(self.wall_time_ms, 3),
        }


def _state_digest(s: ToyState) -> str:
    def loc_str(loc) -> str:
        if isinstance(loc, Cell):
            return str(loc.cell)
        if isinstance(loc, HeldByAgent):
            return "held"
        if isinstance(loc, InContainer):
            return f"in:{loc.container}"
        return "?"

    parts = [f"agent@{s.agent_cell}"]
    parts += [f"{cid}@{loc_str(loc)}" for cid, loc in s.box_location]
    parts += [f"{tid}@{loc_str(loc)}" for tid, loc in s.toy_location]
    return ";".join(parts)


def plan(w: WorldConfig, s0: ToyState, f: ltl.LtlFormula, reg: PropRegistry,
         gamma: float | None = None, epsilon: float = 1e-6,
         horizon: int = 200, cap: int = 10**6) -> PlanResult:
    """Build the product, solve it, and roll out greedily until the
    residual specification is true or the horizon runs out."""
    started = time.perf_counter()
    gamma = w.gamma if gamma is None else gamma
    product = build_product(w, s0, f, reg, cap=cap)
    table = value_iterate(product, gamma, epsilon)

    current = product.initial
    steps = [current]
    actions: list[Action] = []
    if current.dead:
        raise HorizonExceeded(
            "specification is unsatisfiable from the initial state (dead end)",
            dead_end=True)
    if not current.accepting and table[current] <= 0.0:
        raise HorizonExceeded(
            "no accepting state is reachable from the initial state",
            dead_end=True)
    while not current.accepting:
        if len(actions) >= horizon:
            raise HorizonExceeded(
                f"no acceptance within horizon {horizon}", steps_taken=len(actions))
        best = None
        for a, ps2, r in product.transitions[current]:
            score = r + gamma * table[ps2]
            if best is None or score > best[0]:
                best = (score, a, ps2)
        assert best is not None
        actions.append(best[1])
        current = best[2]
        steps.append(current)
    elapsed = (time.perf_counter() - started) * 1000.0
    return PlanResult(actions=actions, steps=steps, accepted=True,
                      wall_time_ms=elapsed, value_sweeps=table.sweeps)


def bfs_shortest_accepting_path(product: ProductMdp) -> int | None:
    """Independent oracle: length of the shortest action sequence from
    the initial product state to any accepting one, or None."""
    if product.initial.accepting:
        return 0
    seen = {product.initial}
    frontier = [product.initial]
    depth = 0
    while frontier:
        depth += 1
        nxt = []
        for ps in frontier:
            for _, ps2, _ in product.transitions.get(ps, []):
                if ps2.accepting:
                    return depth
                if ps2 not in seen:
                    seen.add(ps2)
                    nxt.append(ps2)
        frontier = nxt
    return None
