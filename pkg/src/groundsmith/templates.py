"""One-shot learning of templated LTL from a single (contextual query,
grounded LTL) example, and instantiation of learned templates on fresh
arguments.

Learning has two steps: *lift* replaces every atomic proposition with the
propositional function application that generated it, turning arguments
into slots that remember their example referent; *match_parameters*
grounds the contextual-query parameters and binds each slot to the unique
parameter with the same grounding.  Instantiating a template with a new
query substitutes the new groundings into the slots and collapses each
application back to its canonical atomic proposition.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from . import ltl
from .frontend import ContextualQuery, TASK_ARITY
from .grounding import (
    AmbiguousGrounding,
    ColorRef,
    GroundingError,
    GroundingLexicon,
    ObjectRef,
    PropRegistry,
    Referent,
    RoomRef,
    ShapeRef,
    canonical_ap_name,
    ground_token,
    referent_from_json,
    referent_name,
    referent_to_json,
)
from .world import builtin_functions

log = logging.getLogger(__name__)


class TemplateError(Exception):
    pass


class NonDistinctGroundings(TemplateError):
    pass


class UnboundSlot(TemplateError):
    pass


class UnusedParameter(TemplateError):
    pass


class DescriptorMismatch(TemplateError):
    pass


class SortMismatch(TemplateError):
    pass


class CorruptLibrary(TemplateError):
    pass


# --- lifted formulas ---------------------------------------------------------


@dataclass(frozen=True)
class Variable:
    slot_id: str
    sort: str
    example: Referent


@dataclass(frozen=True)
class Constant:
    referent: Referent


Slot = Union[Variable, Constant]


@dataclass(frozen=True)
class SlotAtom(ltl.LtlFormula):
    """Leaf of a lifted formula: a propositional function whose arguments
    are unresolved slots."""

    function: str
    slots: tuple[Slot, ...]


@dataclass(frozen=True)
class TemplatedLtl:
    task_class: str
    lifted: ltl.LtlFormula
    binding: tuple[tuple[str, int], ...]  # slot id -> parameter index

    @property
    def binding_map(self) -> dict[str, int]:
        return dict(self.binding)

    def __post_init__(self):
        arity = TASK_ARITY[self.task_class]
        for slot_id, idx in self.binding:
            if not 0 <= idx < arity:
                raise TemplateError(f"slot {slot_id} bound to parameter {idx} outside arity {arity}")


def _referent_for_arg(reg: PropRegistry, sort: str, arg: str) -> Referent:
    if sort in ("toy", "container", "location"):
        return ObjectRef(arg)
    if sort == "room":
        return RoomRef(arg)
    if sort == "color":
        return ColorRef(arg)
    if sort == "shape":
        return ShapeRef(arg)
    raise TemplateError(f"no referent kind for sort {sort!r}")


def _sort_accepts(sort: str, ref: Referent, reg: PropRegistry) -> bool:
    w = reg.world
    if sort == "toy":
        return isinstance(ref, ObjectRef) and ref.id in w.toy_ids
    if sort == "container":
        return isinstance(ref, ObjectRef) and ref.id in w.container_ids
    if sort == "location":
        return isinstance(ref, ObjectRef)
    if sort == "room":
        return isinstance(ref, RoomRef)
    if sort == "color":
        return isinstance(ref, ColorRef)
    if sort == "shape":
        return isinstance(ref, ShapeRef)
    return False


def lift(g: ltl.LtlFormula, reg: PropRegistry) -> ltl.LtlFormula:
    """Replace every Atom with the SlotAtom of its generating application.

    Slot identity follows the example referent: every occurrence of the
    same referent, in any function or position, shares one slot, so the
    repeated atom of a ship-shaped formula and a container mentioned by
    two different functions stay consistent under substitution.
    """
    slot_ids: dict[Referent, Variable] = {}

    def walk(f: ltl.LtlFormula) -> ltl.LtlFormula:
        if isinstance(f, ltl.Atom):
            fn_name, args = reg.resolve_ap(f.name)
            signature = reg.function(fn_name).signature
            slots = []
            for sort, arg in zip(signature, args):
                ref = _referent_for_arg(reg, sort, arg)
                var = slot_ids.get(ref)
                if var is None:
                    var = Variable(f"v{len(slot_ids)}", sort, ref)
                    slot_ids[ref] = var
                slots.append(var)
            return SlotAtom(fn_name, tuple(slots))
        if isinstance(f, (ltl.TrueConst, ltl.FalseConst)):
            return f
        return ltl.map_children(f, walk)

    return walk(g)


def _variables(lifted: ltl.LtlFormula) -> list[Variable]:
    """Distinct Variable slots in first-appearance (depth-first) order."""
    out: list[Variable] = []
    seen: set[str] = set()

    def walk(f: ltl.LtlFormula) -> None:
        if isinstance(f, SlotAtom):
            for slot in f.slots:
                if isinstance(slot, Variable) and slot.slot_id not in seen:
                    seen.add(slot.slot_id)
                    out.append(slot)
        elif isinstance(f, (ltl.Not, ltl.Finally, ltl.Globally)):
            walk(f.child)
        elif isinstance(f, (ltl.And, ltl.Or, ltl.Until)):
            walk(f.left)
            walk(f.right)

    walk(lifted)
    return out


def ground_params(cq: ContextualQuery, lex: GroundingLexicon,
                  strict: bool = True) -> list[Referent]:
    """Ground every parameter, using the query's POS metadata as hints
    when present.  In strict mode an ambiguous grounding raises."""
    referents = []
    for i, token in enumerate(cq.params):
        hint = cq.param_pos[i] if cq.param_pos is not None else None
        if hint not in ("noun", "adjective", "proper-noun"):
            hint = None
        result = ground_token(lex, token, hint)
        if result.note == "ambiguous" and strict:
            raise AmbiguousGrounding(token, result.candidates)
        referents.append(result.referent)
    return referents


def match_parameters(cq: ContextualQuery, lifted: ltl.LtlFormula, lex: GroundingLexicon,
                     background: frozenset[Referent] = frozenset(),
                     strict_unused: bool = True) -> TemplatedLtl:
    """Bind every Variable slot to the parameter whose grounding equals the
    slot's example referent.

    Slots matching no parameter fold to constants when their referent is a
    designated background referent, and fail loudly otherwise.  Parameter
    groundings must be pairwise distinct or the binding would be ambiguous.
    """
    referents = ground_params(cq, lex)
    for i in range(len(referents)):
        for j in range(i + 1, len(referents)):
            if referents[i] == referents[j]:
                raise NonDistinctGroundings(
                    f"parameters {cq.params[i]!r} and {cq.params[j]!r} both ground to "
                    f"{referents[i]}")

    binding: dict[str, int] = {}
    folds: dict[str, Constant] = {}
    for var in _variables(lifted):
        matches = [i for i, ref in enumerate(referents) if ref == var.example]
        if len(matches) == 1:
            binding[var.slot_id] = matches[0]
        elif var.example in background:
            folds[var.slot_id] = Constant(var.example)
        else:
            raise UnboundSlot(
                f"slot {var.slot_id} ({var.example}) matches no contextual-query parameter")

    unused = [cq.params[i] for i in range(len(referents)) if i not in binding.values()]
    if unused:
        message = f"parameters {unused} match no slot in the lifted formula"
        if strict_unused:
            raise UnusedParameter(message)
        log.warning("%s", message)

    folded = _fold_constants(lifted, folds) if folds else lifted
    return TemplatedLtl(
        task_class=cq.descriptor,
        lifted=folded,
        binding=tuple(sorted(binding.items())),
    )


def _fold_constants(lifted: ltl.LtlFormula, folds: dict[str, Constant]) -> ltl.LtlFormula:
    def walk(f: ltl.LtlFormula) -> ltl.LtlFormula:
        if isinstance(f, SlotAtom):
            slots = tuple(
                folds.get(s.slot_id, s) if isinstance(s, Variable) else s
                for s in f.slots)
            return SlotAtom(f.function, slots)
        if isinstance(f, (ltl.TrueConst, ltl.FalseConst)):
            return f
        return ltl.map_children(f, walk)

    return walk(lifted)


def learn_template(cq: ContextualQuery, g: ltl.LtlFormula, reg: PropRegistry,
                   lex: GroundingLexicon,
                   background: frozenset[Referent] = frozenset()) -> TemplatedLtl:
    """The two-step one-shot learner: lift, then match parameters."""
    return match_parameters(cq, lift(g, reg), lex, background=background)


def instantiate(t: TemplatedLtl, cq: ContextualQuery, reg: PropRegistry,
                lex: GroundingLexicon) -> ltl.LtlFormula:
    """Evaluate a template with a contextual query, producing grounded LTL."""
    if cq.descriptor != t.task_class:
        raise DescriptorMismatch(f"template is for {t.task_class}, query is {cq.descriptor}")
    referents = ground_params(cq, lex)
    binding = t.binding_map

    def resolve_slot(slot: Slot) -> Referent:
        if isinstance(slot, Constant):
            return slot.referent
        return referents[binding[slot.slot_id]]

    def walk(f: ltl.LtlFormula) -> ltl.LtlFormula:
        if isinstance(f, SlotAtom):
            signature = reg.function(f.function).signature
            args = []
            for sort, slot in zip(signature, f.slots):
                ref = resolve_slot(slot)
                if not _sort_accepts(sort, ref, reg):
                    raise SortMismatch(f"{f.function} needs a {sort}, got {ref}")
                args.append(referent_name(ref))
            return ltl.Atom(canonical_ap_name(f.function, args))
        if isinstance(f, (ltl.TrueConst, ltl.FalseConst)):
            return f
        return ltl.map_children(f, walk)

    return walk(t.lifted)


# --- template library ----------------------------------------------------------

SCHEMA_VERSION = 1
_KNOWN_FUNCTIONS = {fn.name: fn for fn in builtin_functions()}


class TemplateLibrary:
    """At most one templated-LTL entry per task class."""

    def __init__(self, templates: dict[str, TemplatedLtl] | None = None):
        self.templates: dict[str, TemplatedLtl] = dict(templates or {})

    def __contains__(self, task_class: str) -> bool:
        return task_class in self.templates

    def __len__(self) -> int:
        return len(self.templates)

    def get(self, task_class: str) -> TemplatedLtl | None:
        return self.templates.get(task_class)

    def add(self, template: TemplatedLtl) -> None:
        if template.task_class in self.templates:
            log.warning("replacing existing template for %s", template.task_class)
        self.templates[template.task_class] = template

    def __eq__(self, other) -> bool:
        return isinstance(other, TemplateLibrary) and self.templates == other.templates


def _slot_to_json(slot: Slot) -> dict:
    if isinstance(slot, Variable):
        return {"kind": "variable", "id": slot.slot_id, "sort": slot.sort,
                "example": referent_to_json(slot.example)}
    return {"kind": "constant", "referent": referent_to_json(slot.referent)}


def _slot_from_json(doc: dict) -> Slot:
    try:
        if doc["kind"] == "variable":
            return Variable(doc["id"], doc["sort"], referent_from_json(doc["example"]))
        if doc["kind"] == "constant":
            return Constant(referent_from_json(doc["referent"]))
    except (KeyError, TypeError, GroundingError) as exc:
        raise CorruptLibrary(f"malformed slot: {doc!r}") from exc
    raise CorruptLibrary(f"unknown slot kind {doc.get('kind')!r}")


def _lifted_to_json(f: ltl.LtlFormula) -> dict:
    if isinstance(f, SlotAtom):
        return {"op": "apply", "function": f.function,
                "slots": [_slot_to_json(s) for s in f.slots]}
    if isinstance(f, ltl.TrueConst):
        return {"op": "true"}
    if isinstance(f, ltl.FalseConst):
        return {"op": "false"}
    if isinstance(f, ltl.Not):
        return {"op": "!", "children": [_lifted_to_json(f.child)]}
    if isinstance(f, ltl.Finally):
        return {"op": "F", "children": [_lifted_to_json(f.child)]}
    if isinstance(f, ltl.Globally):
        return {"op": "G", "children": [_lifted_to_json(f.child)]}
    if isinstance(f, ltl.And):
        return {"op": "&", "children": [_lifted_to_json(f.left), _lifted_to_json(f.right)]}
    if isinstance(f, ltl.Or):
        return {"op": "|", "children": [_lifted_to_json(f.left), _lifted_to_json(f.right)]}
    if isinstance(f, ltl.Until):
        return {"op": "U", "children": [_lifted_to_json(f.left), _lifted_to_json(f.right)]}
    raise TemplateError(f"cannot serialize {f!r}")


def _lifted_from_json(doc: dict) -> ltl.LtlFormula:
    try:
        op = doc["op"]
    except (KeyError, TypeError) as exc:
        raise CorruptLibrary(f"malformed formula node: {doc!r}") from exc
    if op == "apply":
        fn = doc.get("function")
        if fn not in _KNOWN_FUNCTIONS:
            raise CorruptLibrary(f"unknown propositional function {fn!r}")
        slots = tuple(_slot_from_json(s) for s in doc.get("slots", ()))
        if len(slots) != _KNOWN_FUNCTIONS[fn].arity:
            raise CorruptLibrary(f"{fn} expects {_KNOWN_FUNCTIONS[fn].arity} slots")
        return SlotAtom(fn, slots)
    if op == "true":
        return ltl.TRUE
    if op == "false":
        return ltl.FALSE
    children = [_lifted_from_json(c) for c in doc.get("children", ())]
    unary = {"!": ltl.Not, "F": ltl.Finally, "G": ltl.Globally}
    binary = {"&": ltl.And, "|": ltl.Or, "U": ltl.Until}
    if op in unary and len(children) == 1:
        return unary[op](children[0])
    if op in binary and len(children) == 2:
        return binary[op](children[0], children[1])
    raise CorruptLibrary(f"malformed operator node: {doc!r}")


def save_library(library: TemplateLibrary, path: str | Path) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "templates": {
            cls: {
                "formula": _lifted_to_json(t.lifted),
                "binding": {slot: idx for slot, idx in t.binding},
            }
            for cls, t in sorted(library.templates.items())
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_library(path: str | Path) -> TemplateLibrary:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CorruptLibrary(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        raise CorruptLibrary(f"unsupported schema_version {doc.get('schema_version')!r}"
                             if isinstance(doc, dict) else "library document must be an object")
    templates = {}
    raw = doc.get("templates")
    if not isinstance(raw, dict):
        raise CorruptLibrary("missing templates map")
    for cls, entry in raw.items():
        if cls not in TASK_ARITY:
            raise CorruptLibrary(f"unknown task class {cls!r}")
        try:
            lifted = _lifted_from_json(entry["formula"])
            binding = tuple(sorted((slot, int(idx)) for slot, idx in entry["binding"].items()))
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptLibrary(f"malformed template for {cls}: {exc}") from exc
        try:
            templates[cls] = TemplatedLtl(task_class=cls, lifted=lifted, binding=binding)
        except TemplateError as exc:
            raise CorruptLibrary(str(exc)) from exc
    return TemplateLibrary(templates)
