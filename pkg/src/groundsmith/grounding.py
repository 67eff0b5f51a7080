"""Bidirectional symbol-world mapping.

Three pieces live here: a lexicon grounding nouns/adjectives to objects,
rooms, and attribute values; the canonical atomic-proposition naming
scheme with its reverse index; and the labeling function from states to
the set of true atomic propositions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .world import (
    PropositionalFunction,
    ToyState,
    WorldConfig,
    all_applications,
    builtin_functions,
    eval_prop,
)


class GroundingError(Exception):
    pass


class UnknownToken(GroundingError):
    pass


class AmbiguousGrounding(GroundingError):
    def __init__(self, token: str, candidates):
        super().__init__(f"token {token!r} grounds to {len(candidates)} referents")
        self.token = token
        self.candidates = tuple(candidates)


class NameCollision(GroundingError):
    pass


class UnresolvableAP(GroundingError):
    pass


# --- referents ---------------------------------------------------------------


@dataclass(frozen=True)
class ObjectRef:
    id: str


@dataclass(frozen=True)
class RoomRef:
    id: str


@dataclass(frozen=True)
class ColorRef:
    value: str


@dataclass(frozen=True)
class ShapeRef:
    value: str


@dataclass(frozen=True)
class ContainerKindRef:
    value: str


Referent = Union[ObjectRef, RoomRef, ColorRef, ShapeRef, ContainerKindRef]

_REFERENT_KINDS = {
    "object": ObjectRef,
    "room": RoomRef,
    "color": ColorRef,
    "shape": ShapeRef,
    "container_kind": ContainerKindRef,
}


def referent_to_json(ref: Referent) -> dict:
    for kind, cls in _REFERENT_KINDS.items():
        if isinstance(ref, cls):
            value = ref.id if hasattr(ref, "id") else ref.value
            return {"kind": kind, "value": value}
    raise TypeError(f"not a referent: {ref!r}")


def referent_from_json(doc: dict) -> Referent:
    try:
        cls = _REFERENT_KINDS[doc["kind"]]
        return cls(doc["value"])
    except (KeyError, TypeError) as exc:
        raise GroundingError(f"malformed referent: {doc!r}") from exc


def referent_name(ref: Referent) -> str:
    """The identifier used when the referent appears as a proposition argument."""
    return ref.id if isinstance(ref, (ObjectRef, RoomRef)) else ref.value


# --- lexicon -----------------------------------------------------------------

POS_HINTS = ("noun", "adjective", "proper-noun")


@dataclass(frozen=True)
class LexiconEntry:
    token: str
    hint: str
    referent: Referent


@dataclass(frozen=True)
class GroundingResult:
    referent: Referent
    note: str  # unambiguous | disambiguated-by-pos | ambiguous
    candidates: tuple[Referent, ...] = ()


class GroundingLexicon:
    """Case-insensitive token -> referent map with POS hints.

    (token, hint) pairs are unique; a token may carry several entries that
    differ in hint (the homonym case).
    """

    def __init__(self, entries):
        self.entries = tuple(entries)
        self._by_token: dict[str, list[LexiconEntry]] = {}
        seen = set()
        for e in self.entries:
            if e.hint not in POS_HINTS:
                raise GroundingError(f"bad POS hint {e.hint!r} for token {e.token!r}")
            key = (e.token.lower(), e.hint)
            if key in seen:
                raise GroundingError(f"duplicate lexicon entry {key}")
            seen.add(key)
            self._by_token.setdefault(e.token.lower(), []).append(e)

    def __contains__(self, token: str) -> bool:
        return token.lower() in self._by_token

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, token: str) -> list[LexiconEntry]:
        return list(self._by_token.get(token.lower(), ()))

    @property
    def tokens(self) -> set[str]:
        return set(self._by_token)

    def to_json(self) -> list[dict]:
        return [
            {"token": e.token, "hint": e.hint, "referent": referent_to_json(e.referent)}
            for e in self.entries
        ]

    @classmethod
    def from_json(cls, docs: list[dict]) -> "GroundingLexicon":
        try:
            entries = [LexiconEntry(d["token"], d["hint"], referent_from_json(d["referent"])) for d in docs]
        except (KeyError, TypeError) as exc:
            raise GroundingError(f"malformed lexicon: {exc}") from exc
        return cls(entries)

    @classmethod
    def load(cls, path: str | Path) -> "GroundingLexicon":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def save(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")


def lexicon_from_world(w: WorldConfig) -> GroundingLexicon:
    """Derive the obvious lexicon for a world: every entity id is a noun
    for itself and every toy color an adjective."""
    entries = [LexiconEntry(t.id, "noun", ObjectRef(t.id)) for t in w.toys]
    entries += [LexiconEntry(c.id, "noun", ObjectRef(c.id)) for c in w.containers]
    entries += [LexiconEntry(r.id, "noun", RoomRef(r.id)) for r in w.rooms]
    for color in sorted({t.color for t in w.toys}):
        entries.append(LexiconEntry(color, "adjective", ColorRef(color)))
    return GroundingLexicon(entries)


def ground_token(lex: GroundingLexicon, token: str, hint: str | None = None) -> GroundingResult:
    """Exact-match, case-insensitive grounding with optional POS hint."""
    entries = lex.lookup(token)
    if not entries:
        raise UnknownToken(f"token {token!r} is not in the lexicon")
    if len(entries) == 1:
        return GroundingResult(entries[0].referent, "unambiguous")
    if hint is not None:
        hinted = [e for e in entries if e.hint == hint]
        if len(hinted) == 1:
            return GroundingResult(hinted[0].referent, "disambiguated-by-pos")
    return GroundingResult(entries[0].referent, "ambiguous", tuple(e.referent for e in entries))


# --- canonical AP naming ------------------------------------------------------


def canonical_ap_name(fn_name: str, args) -> str:
    """Deterministic AP identifier for a propositional-function application."""
    args = tuple(args)
    if not args:
        raise GroundingError("canonical_ap_name requires at least one argument")
    if fn_name == "agent_at":
        return args[0]
    if fn_name == "agent_at_object":
        return f"at_{args[0]}"
    if fn_name == "holding":
        return f"holding_{args[0]}"
    if fn_name == "in_container":
        return f"{args[0]}_in_{args[1]}"
    if fn_name == "container_in_room":
        return f"{args[0]}_in_{args[1]}"
    if fn_name in ("has_color", "has_shape"):
        return f"{args[0]}_is_{args[1]}"
    raise GroundingError(f"no naming rule for function {fn_name!r}")


# --- registry and labeling ----------------------------------------------------


@dataclass
class PropRegistry:
    """All well-sorted propositional-function applications of one world,
    indexed by canonical AP name."""

    world: WorldConfig
    functions: tuple[PropositionalFunction, ...]
    reverse: dict[str, tuple[str, tuple[str, ...]]] = field(repr=False)
    colors: frozenset[str]
    shapes: frozenset[str]

    def resolve_ap(self, name: str) -> tuple[str, tuple[str, ...]]:
        try:
            return self.reverse[name]
        except KeyError:
            raise UnresolvableAP(f"no propositional function application named {name!r}") from None

    def function(self, fn_name: str) -> PropositionalFunction:
        for fn in self.functions:
            if fn.name == fn_name:
                return fn
        raise GroundingError(f"unknown propositional function {fn_name!r}")

    def eval_ap(self, name: str, s: ToyState) -> bool:
        fn_name, args = self.resolve_ap(name)
        return eval_prop(self.function(fn_name), args, self.world, s, self.colors, self.shapes)

    @property
    def ap_names(self) -> set[str]:
        return set(self.reverse)


def build_registry(w: WorldConfig, lex: GroundingLexicon | None = None) -> PropRegistry:
    """Enumerate every well-sorted application of the built-in functions.

    Color and shape domains are the values configured on toys plus any
    color/shape referents in the lexicon, so corpus attributes that no toy
    happens to carry still name resolvable propositions.
    """
    colors = {t.color for t in w.toys}
    shapes = {t.shape for t in w.toys}
    if lex is not None:
        for e in lex.entries:
            if isinstance(e.referent, ColorRef):
                colors.add(e.referent.value)
            elif isinstance(e.referent, ShapeRef):
                shapes.add(e.referent.value)
    colors_f, shapes_f = frozenset(colors), frozenset(shapes)
    reverse: dict[str, tuple[str, tuple[str, ...]]] = {}
    functions = builtin_functions()
    for fn in functions:
        for args in all_applications(w, fn, colors_f, shapes_f):
            name = canonical_ap_name(fn.name, args)
            other = reverse.get(name)
            if other is not None and other != (fn.name, args):
                raise NameCollision(
                    f"AP {name!r} names both {other} and {(fn.name, args)}")
            reverse[name] = (fn.name, args)
    return PropRegistry(world=w, functions=functions, reverse=reverse,
                        colors=colors_f, shapes=shapes_f)


def resolve_ap(reg: PropRegistry, name: str) -> tuple[str, tuple[str, ...]]:
    return reg.resolve_ap(name)


def label_state(reg: PropRegistry, w: WorldConfig, s: ToyState,
                restrict: set[str] | None = None) -> frozenset[str]:
    """The set of AP names true in ``s``; optionally restricted to a
    subset of names (the planner only needs the atoms of its formula)."""
    names = reg.reverse.keys() if restrict is None else (restrict & reg.ap_names)
    return frozenset(name for name in names if reg.eval_ap(name, s))
