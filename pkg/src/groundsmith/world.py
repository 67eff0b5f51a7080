"""Deterministic discrete OO-MDP: a gripper agent on a grid that picks up
toys, places them in containers, and moves containers between rooms.

States are immutable and hashable; the transition function is total (an
action whose precondition fails leaves the state unchanged).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Union


class WorldError(Exception):
    pass


class InvalidState(WorldError):
    pass


class StateExplosion(WorldError):
    pass


class ArityMismatch(WorldError):
    pass


class SortMismatch(WorldError):
    pass


DIRECTIONS = ("north", "south", "east", "west")


# --- locations -------------------------------------------------------------


@dataclass(frozen=True)
class Cell:
    cell: int


@dataclass(frozen=True)
class HeldByAgent:
    pass


@dataclass(frozen=True)
class InContainer:
    container: str


HELD = HeldByAgent()
ContainerLoc = Union[Cell, HeldByAgent]
ToyLoc = Union[Cell, HeldByAgent, InContainer]


# --- configuration ---------------------------------------------------------


@dataclass(frozen=True)
class ToyDef:
    id: str
    shape: str
    color: str
    cell: int


@dataclass(frozen=True)
class ContainerDef:
    id: str
    kind: str
    cell: int


@dataclass(frozen=True)
class RoomDef:
    id: str
    cells: frozenset[int]


@dataclass(frozen=True)
class WorldConfig:
    grid_width: int
    grid_height: int
    toys: tuple[ToyDef, ...]
    containers: tuple[ContainerDef, ...]
    rooms: tuple[RoomDef, ...]
    agent_start: int
    gamma: float = 0.95

    def __post_init__(self):
        if self.grid_width < 1 or self.grid_height < 1:
            raise WorldError("grid dimensions must be positive")
        if not 0.0 < self.gamma < 1.0:
            raise WorldError("gamma must lie in (0, 1)")
        n = self.cell_count
        ids = [t.id for t in self.toys] + [c.id for c in self.containers] + [r.id for r in self.rooms]
        if len(ids) != len(set(ids)):
            raise WorldError("toy/container/room ids must be unique")
        for t in self.toys:
            if not 0 <= t.cell < n:
                raise WorldError(f"toy {t.id} starts outside the grid")
        for c in self.containers:
            if not 0 <= c.cell < n:
                raise WorldError(f"container {c.id} starts outside the grid")
        for r in self.rooms:
            if not r.cells:
                raise WorldError(f"room {r.id} has no cells")
            if any(not 0 <= cell < n for cell in r.cells):
                raise WorldError(f"room {r.id} has cells outside the grid")
        if not 0 <= self.agent_start < n:
            raise WorldError("agent starts outside the grid")

    @property
    def cell_count(self) -> int:
        return self.grid_width * self.grid_height

    def toy(self, toy_id: str) -> ToyDef:
        for t in self.toys:
            if t.id == toy_id:
                return t
        raise KeyError(toy_id)

    def container(self, container_id: str) -> ContainerDef:
        for c in self.containers:
            if c.id == container_id:
                return c
        raise KeyError(container_id)

    def room(self, room_id: str) -> RoomDef:
        for r in self.rooms:
            if r.id == room_id:
                return r
        raise KeyError(room_id)

    @property
    def toy_ids(self) -> tuple[str, ...]:
        return tuple(t.id for t in self.toys)

    @property
    def container_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.containers)

    @property
    def room_ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.rooms)

    def to_json(self) -> dict:
        return {
            "grid_width": self.grid_width,
            "grid_height": self.grid_height,
            "toys": [{"id": t.id, "shape": t.shape, "color": t.color, "cell": t.cell} for t in self.toys],
            "containers": [{"id": c.id, "kind": c.kind, "cell": c.cell} for c in self.containers],
            "rooms": [{"id": r.id, "cells": sorted(r.cells)} for r in self.rooms],
            "agent_start": self.agent_start,
            "gamma": self.gamma,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "WorldConfig":
        try:
            return cls(
                grid_width=doc["grid_width"],
                grid_height=doc["grid_height"],
                toys=tuple(ToyDef(t["id"], t["shape"], t["color"], t["cell"]) for t in doc["toys"]),
                containers=tuple(ContainerDef(c["id"], c["kind"], c["cell"]) for c in doc["containers"]),
                rooms=tuple(RoomDef(r["id"], frozenset(r["cells"])) for r in doc["rooms"]),
                agent_start=doc["agent_start"],
                gamma=doc.get("gamma", 0.95),
            )
        except (KeyError, TypeError) as exc:
            raise WorldError(f"malformed world config: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> "WorldConfig":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def save(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")


# --- state -----------------------------------------------------------------


@dataclass(frozen=True)
class ToyState:
    agent_cell: int
    box_location: tuple[tuple[str, ContainerLoc], ...]
    toy_location: tuple[tuple[str, ToyLoc], ...]

    @classmethod
    def create(cls, agent_cell: int, containers: dict[str, ContainerLoc], toys: dict[str, ToyLoc]) -> "ToyState":
        return cls(
            agent_cell=agent_cell,
            box_location=tuple(sorted(containers.items())),
            toy_location=tuple(sorted(toys.items())),
        )

    def container_loc(self, container_id: str) -> ContainerLoc:
        for cid, loc in self.box_location:
            if cid == container_id:
                return loc
        raise KeyError(container_id)

    def toy_loc(self, toy_id: str) -> ToyLoc:
        for tid, loc in self.toy_location:
            if tid == toy_id:
                return loc
        raise KeyError(toy_id)

    def held_entity(self) -> str | None:
        for cid, loc in self.box_location:
            if isinstance(loc, HeldByAgent):
                return cid
        for tid, loc in self.toy_location:
            if isinstance(loc, HeldByAgent):
                return tid
        return None

    def with_agent(self, cell: int) -> "ToyState":
        return ToyState(cell, self.box_location, self.toy_location)

    def with_container(self, container_id: str, loc: ContainerLoc) -> "ToyState":
        updated = tuple((cid, loc if cid == container_id else old) for cid, old in self.box_location)
        return ToyState(self.agent_cell, updated, self.toy_location)

    def with_toy(self, toy_id: str, loc: ToyLoc) -> "ToyState":
        updated = tuple((tid, loc if tid == toy_id else old) for tid, old in self.toy_location)
        return ToyState(self.agent_cell, self.box_location, updated)


def initial_state(w: WorldConfig) -> ToyState:
    return ToyState.create(
        w.agent_start,
        {c.id: Cell(c.cell) for c in w.containers},
        {t.id: Cell(t.cell) for t in w.toys},
    )


def validate_state(w: WorldConfig, s: ToyState) -> None:
    """Raise InvalidState unless ``s`` satisfies the state invariants for ``w``."""
    n = w.cell_count
    if not 0 <= s.agent_cell < n:
        raise InvalidState("agent outside the grid")
    if tuple(cid for cid, _ in s.box_location) != tuple(sorted(w.container_ids)):
        raise InvalidState("container set does not match the world")
    if tuple(tid for tid, _ in s.toy_location) != tuple(sorted(w.toy_ids)):
        raise InvalidState("toy set does not match the world")
    held = 0
    for cid, loc in s.box_location:
        if isinstance(loc, HeldByAgent):
            held += 1
        elif isinstance(loc, Cell):
            if not 0 <= loc.cell < n:
                raise InvalidState(f"container {cid} outside the grid")
        else:
            raise InvalidState(f"container {cid} has a non-container location")
    container_ids = set(w.container_ids)
    for tid, loc in s.toy_location:
        if isinstance(loc, HeldByAgent):
            held += 1
        elif isinstance(loc, Cell):
            if not 0 <= loc.cell < n:
                raise InvalidState(f"toy {tid} outside the grid")
        elif isinstance(loc, InContainer):
            if loc.container not in container_ids:
                raise InvalidState(f"toy {tid} is in unknown container {loc.container}")
        else:
            raise InvalidState(f"toy {tid} has an unknown location kind")
    if held > 1:
        raise InvalidState("more than one entity held by the agent")


def container_cell(w: WorldConfig, s: ToyState, container_id: str) -> int:
    """Effective cell of a container; a held container rides with the agent."""
    loc = s.container_loc(container_id)
    if isinstance(loc, HeldByAgent):
        return s.agent_cell
    return loc.cell


def toy_cell(w: WorldConfig, s: ToyState, toy_id: str) -> int:
    loc = s.toy_loc(toy_id)
    if isinstance(loc, HeldByAgent):
        return s.agent_cell
    if isinstance(loc, InContainer):
        return container_cell(w, s, loc.container)
    return loc.cell


def entity_cell(w: WorldConfig, s: ToyState, entity_id: str) -> int:
    if entity_id in w.toy_ids:
        return toy_cell(w, s, entity_id)
    if entity_id in w.container_ids:
        return container_cell(w, s, entity_id)
    raise KeyError(entity_id)


# --- actions ---------------------------------------------------------------


@dataclass(frozen=True)
class Move:
    direction: str

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise WorldError(f"unknown direction {self.direction!r}")


@dataclass(frozen=True)
class Pickup:
    entity: str


@dataclass(frozen=True)
class PutDown:
    pass


@dataclass(frozen=True)
class PlaceInContainer:
    container: str


Action = Union[Move, Pickup, PutDown, PlaceInContainer]


def action_to_str(a: Action) -> str:
    if isinstance(a, Move):
        return f"move {a.direction}"
    if isinstance(a, Pickup):
        return f"pickup {a.entity}"
    if isinstance(a, PutDown):
        return "putdown"
    if isinstance(a, PlaceInContainer):
        return f"place {a.container}"
    raise TypeError(f"not an action: {a!r}")


def action_from_str(text: str) -> Action:
    parts = text.split()
    if parts[:1] == ["move"] and len(parts) == 2:
        return Move(parts[1])
    if parts[:1] == ["pickup"] and len(parts) == 2:
        return Pickup(parts[1])
    if parts == ["putdown"]:
        return PutDown()
    if parts[:1] == ["place"] and len(parts) == 2:
        return PlaceInContainer(parts[1])
    raise WorldError(f"unparseable action {text!r}")


def _move_cell(w: WorldConfig, cell: int, direction: str) -> int:
    x, y = cell % w.grid_width, cell // w.grid_width
    if direction == "north":
        y -= 1
    elif direction == "south":
        y += 1
    elif direction == "east":
        x += 1
    elif direction == "west":
        x -= 1
    if 0 <= x < w.grid_width and 0 <= y < w.grid_height:
        return y * w.grid_width + x
    return cell


def transition(w: WorldConfig, s: ToyState, a: Action) -> ToyState:
    """Deterministic dynamics; failed preconditions self-loop."""
    validate_state(w, s)
    if isinstance(a, Move):
        return s.with_agent(_move_cell(w, s.agent_cell, a.direction))
    if isinstance(a, Pickup):
        if s.held_entity() is not None:
            return s
        if a.entity in w.toy_ids:
            loc = s.toy_loc(a.entity)
            # Toys inside a container can only move with the container.
            if isinstance(loc, InContainer):
                return s
            if toy_cell(w, s, a.entity) != s.agent_cell:
                return s
            return s.with_toy(a.entity, HELD)
        if a.entity in w.container_ids:
            if container_cell(w, s, a.entity) != s.agent_cell:
                return s
            return s.with_container(a.entity, HELD)
        return s
    if isinstance(a, PutDown):
        held = s.held_entity()
        if held is None:
            return s
        if held in w.toy_ids:
            return s.with_toy(held, Cell(s.agent_cell))
        return s.with_container(held, Cell(s.agent_cell))
    if isinstance(a, PlaceInContainer):
        held = s.held_entity()
        if held is None or held not in w.toy_ids:
            return s
        if a.container not in w.container_ids:
            return s
        if container_cell(w, s, a.container) != s.agent_cell:
            return s
        return s.with_toy(held, InContainer(a.container))
    raise TypeError(f"not an action: {a!r}")


def available_actions(w: WorldConfig, s: ToyState) -> list[Action]:
    """All actions whose preconditions hold, in deterministic order:
    moves N,S,E,W, then pickups by id, PutDown, placements by id."""
    validate_state(w, s)
    actions: list[Action] = [Move(d) for d in DIRECTIONS]
    held = s.held_entity()
    if held is None:
        for tid in sorted(w.toy_ids):
            loc = s.toy_loc(tid)
            if not isinstance(loc, InContainer) and toy_cell(w, s, tid) == s.agent_cell:
                actions.append(Pickup(tid))
        for cid in sorted(w.container_ids):
            if container_cell(w, s, cid) == s.agent_cell:
                actions.append(Pickup(cid))
    else:
        actions.append(PutDown())
        if held in w.toy_ids:
            for cid in sorted(w.container_ids):
                if container_cell(w, s, cid) == s.agent_cell:
                    actions.append(PlaceInContainer(cid))
    return actions


def state_bound(w: WorldConfig) -> int:
    """Upper bound N(N+1)(N+2)^k on reachable states: N agent cells,
    N+1 container placements (cells or held), (N+2)^k toy placements
    (cells, held, or in-container)."""
    n = w.cell_count
    k = len(w.toys)
    return n * (n + 1) * (n + 2) ** k


def reachable_states(w: WorldConfig, s0: ToyState, cap: int = 10**6) -> set[ToyState]:
    """BFS closure of ``s0`` under the transition function."""
    validate_state(w, s0)
    seen = {s0}
    frontier = [s0]
    while frontier:
        nxt = []
        for s in frontier:
            for a in available_actions(w, s):
                s2 = transition(w, s, a)
                if s2 not in seen:
                    seen.add(s2)
                    if len(seen) > cap:
                        raise StateExplosion(f"more than {cap} reachable states")
                    nxt.append(s2)
        frontier = nxt
    return seen


# --- propositional functions -----------------------------------------------

SORTS = ("agent", "toy", "container", "room", "location", "color", "shape")


@dataclass(frozen=True)
class PropositionalFunction:
    """Named Boolean predicate over object states with a sorted signature.

    Sort ``location`` ranges over positionable entities (toys and
    containers).
    """

    name: str
    signature: tuple[str, ...]
    evaluator: Callable[[WorldConfig, ToyState, tuple[str, ...]], bool] = field(compare=False)

    @property
    def arity(self) -> int:
        return len(self.signature)


def _sort_domain(w: WorldConfig, sort: str, colors: frozenset[str], shapes: frozenset[str]) -> tuple[str, ...]:
    if sort == "toy":
        return tuple(sorted(w.toy_ids))
    if sort == "container":
        return tuple(sorted(w.container_ids))
    if sort == "room":
        return tuple(sorted(w.room_ids))
    if sort == "location":
        return tuple(sorted(w.toy_ids) + sorted(w.container_ids))
    if sort == "color":
        return tuple(sorted(colors))
    if sort == "shape":
        return tuple(sorted(shapes))
    if sort == "agent":
        return ("agent",)
    raise WorldError(f"unknown sort {sort!r}")


def builtin_functions() -> tuple[PropositionalFunction, ...]:
    return (
        PropositionalFunction(
            "agent_at", ("room",),
            lambda w, s, a: s.agent_cell in w.room(a[0]).cells),
        PropositionalFunction(
            "agent_at_object", ("location",),
            lambda w, s, a: entity_cell(w, s, a[0]) == s.agent_cell),
        PropositionalFunction(
            "holding", ("toy",),
            lambda w, s, a: isinstance(s.toy_loc(a[0]), HeldByAgent)),
        PropositionalFunction(
            "in_container", ("toy", "container"),
            lambda w, s, a: s.toy_loc(a[0]) == InContainer(a[1])),
        PropositionalFunction(
            "container_in_room", ("container", "room"),
            lambda w, s, a: container_cell(w, s, a[0]) in w.room(a[1]).cells),
        PropositionalFunction(
            "has_color", ("toy", "color"),
            lambda w, s, a: w.toy(a[0]).color == a[1]),
        PropositionalFunction(
            "has_shape", ("toy", "shape"),
            lambda w, s, a: w.toy(a[0]).shape == a[1]),
    )


def check_sorts(w: WorldConfig, fn: PropositionalFunction, args: tuple[str, ...],
                colors: frozenset[str] = frozenset(), shapes: frozenset[str] = frozenset()) -> None:
    if len(args) != fn.arity:
        raise ArityMismatch(f"{fn.name} expects {fn.arity} arguments, got {len(args)}")
    world_colors = colors | {t.color for t in w.toys}
    world_shapes = shapes | {t.shape for t in w.toys}
    for sort, arg in zip(fn.signature, args):
        ok = (
            (sort == "toy" and arg in w.toy_ids)
            or (sort == "container" and arg in w.container_ids)
            or (sort == "room" and arg in w.room_ids)
            or (sort == "location" and (arg in w.toy_ids or arg in w.container_ids))
            or (sort == "color" and arg in world_colors)
            or (sort == "shape" and arg in world_shapes)
            or (sort == "agent" and arg == "agent")
        )
        if not ok:
            raise SortMismatch(f"{fn.name}: argument {arg!r} is not of sort {sort}")


def eval_prop(fn: PropositionalFunction, args: tuple[str, ...], w: WorldConfig, s: ToyState,
              colors: frozenset[str] = frozenset(), shapes: frozenset[str] = frozenset()) -> bool:
    check_sorts(w, fn, args, colors, shapes)
    return fn.evaluator(w, s, tuple(args))


def all_applications(w: WorldConfig, fn: PropositionalFunction,
                     colors: frozenset[str] = frozenset(),
                     shapes: frozenset[str] = frozenset()) -> Iterator[tuple[str, ...]]:
    """Every well-sorted argument tuple for ``fn`` in world ``w``."""
    domains = [_sort_domain(w, sort, colors, shapes) for sort in fn.signature]
    yield from itertools.product(*domains)
