"""Deterministic natural-language front-end: POS tagging from the lexicon,
rule-based task classification, and ordered parameter extraction into a
contextual query.

The tagger is lexicon-driven rather than statistical.  Tokens found in
the grounding lexicon take their lexicon hint, then a closed
function-word list applies, then a closed verb list; anything else is
``unknown``.  An optional fault flag re-tags the verb "pickup" as a noun
to reproduce a known tagger failure mode for demos.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .grounding import GroundingLexicon


class FrontendError(Exception):
    pass


class UnclassifiableUtterance(FrontendError):
    pass


class ArityMismatch(FrontendError):
    pass


TASK_ARITY = {
    "move_to": 1,
    "pickup": 1,
    "pickup_colored": 2,
    "ship": 3,
    "navigate_one": 1,
    "navigate_two": 2,
    "navigate_three": 3,
}

FUNCTION_WORDS = frozenset({
    "the", "a", "an", "to", "in", "into", "on", "at", "of", "then", "and",
    "up", "me", "please", "it", "them",
})

PICKUP_VERBS = frozenset({"pickup", "pick", "grab", "take", "fetch", "collect"})
MOVE_VERBS = frozenset({"move", "approach"})
NAVIGATE_VERBS = frozenset({"go", "head", "navigate", "walk", "travel", "drive"})
PUT_VERBS = frozenset({"put", "place", "drop"})
VERBS = PICKUP_VERBS | MOVE_VERBS | NAVIGATE_VERBS | PUT_VERBS

CONTENT_POS = frozenset({"noun", "adjective", "proper-noun"})

_TOKEN_RE = re.compile(r"[a-z0-9_']+")


@dataclass(frozen=True)
class TaggedToken:
    token: str
    pos: str


@dataclass(frozen=True)
class ContextualQuery:
    """Task descriptor plus ordered surface-token parameters.

    ``param_pos`` carries the tagger's POS for each parameter when the
    query came through the front-end; it is advisory metadata and does
    not participate in equality.
    """

    descriptor: str
    params: tuple[str, ...]
    param_pos: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        arity = TASK_ARITY.get(self.descriptor)
        if arity is None:
            raise FrontendError(f"unknown task class {self.descriptor!r}")
        if len(self.params) != arity:
            raise ArityMismatch(
                f"{self.descriptor} takes {arity} parameters, got {len(self.params)}")

    def __str__(self) -> str:
        return f"{self.descriptor}({', '.join(self.params)})"


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def tag_tokens(text: str, lex: GroundingLexicon, pickup_as_noun: bool = False) -> list[TaggedToken]:
    """Lowercased tokenization plus deterministic POS tags.

    A token with several lexicon entries (a homonym) prefers its
    adjective reading when the next lexicon token reads as a noun, and
    its noun reading otherwise.
    """
    tokens = tokenize(text)
    tagged = []
    for i, tok in enumerate(tokens):
        if pickup_as_noun and tok == "pickup":
            tagged.append(TaggedToken(tok, "noun"))
            continue
        entries = lex.lookup(tok)
        if entries:
            hints = {e.hint for e in entries}
            if len(hints) == 1:
                tagged.append(TaggedToken(tok, entries[0].hint))
            elif "adjective" in hints and _next_reads_as_noun(tokens, i, lex):
                tagged.append(TaggedToken(tok, "adjective"))
            elif "noun" in hints:
                tagged.append(TaggedToken(tok, "noun"))
            else:
                tagged.append(TaggedToken(tok, sorted(hints)[0]))
        elif tok in FUNCTION_WORDS:
            tagged.append(TaggedToken(tok, "function-word"))
        elif tok in VERBS:
            tagged.append(TaggedToken(tok, "verb"))
        else:
            tagged.append(TaggedToken(tok, "unknown"))
    return tagged


def _next_reads_as_noun(tokens: list[str], i: int, lex: GroundingLexicon) -> bool:
    for tok in tokens[i + 1:]:
        if tok in FUNCTION_WORDS or tok in VERBS:
            return False
        entries = lex.lookup(tok)
        if entries:
            return any(e.hint in ("noun", "proper-noun") for e in entries)
        return False
    return False


def _clauses(tags: list[TaggedToken]) -> list[list[TaggedToken]]:
    """Split on the clause separator `then` (an immediately preceding
    `and` belongs to the separator)."""
    clauses: list[list[TaggedToken]] = [[]]
    for t in tags:
        if t.token == "then":
            if clauses[-1] and clauses[-1][-1].token == "and":
                clauses[-1].pop()
            clauses.append([])
        else:
            clauses[-1].append(t)
    return [c for c in clauses if c]


def _content(tags) -> list[TaggedToken]:
    return [t for t in tags if t.pos in CONTENT_POS]


def _has_verb(tags, verbs) -> bool:
    return any(t.token in verbs for t in tags)


def _is_put_clause(clause: list[TaggedToken]) -> bool:
    """Matches "put X in Y": a put-verb, then two content tokens separated
    by the preposition in/into."""
    if not _has_verb(clause, PUT_VERBS):
        return False
    content = _content(clause)
    if len(content) < 2:
        return False
    tokens = [t.token for t in clause]
    first = tokens.index(content[0].token)
    second = tokens.index(content[1].token, first + 1)
    return any(tok in ("in", "into") for tok in tokens[first + 1:second])


def classify_task(tags: list[TaggedToken]) -> str:
    """Rule-based task classification, checked in fixed order."""
    clauses = _clauses(tags)

    # ship: "put X in Y, then put/move Y ..." with the container repeated.
    if len(clauses) == 2 and _is_put_clause(clauses[0]):
        second = clauses[1]
        if _has_verb(second, PUT_VERBS | MOVE_VERBS):
            c1, c2 = _content(clauses[0]), _content(second)
            if len(c2) >= 2 and c2[0].token == c1[1].token:
                return "ship"

    if _has_verb(tags, PICKUP_VERBS):
        content = _content(tags)
        for i in range(len(content) - 1):
            if content[i].pos == "adjective" and content[i + 1].pos in ("noun", "proper-noun"):
                return "pickup_colored"
        return "pickup"

    if _has_verb(tags, MOVE_VERBS) and _content(tags):
        return "move_to"

    go_clauses = [c for c in clauses if _has_verb(c, NAVIGATE_VERBS)]
    if go_clauses and len(go_clauses) == len(clauses):
        names = {1: "navigate_one", 2: "navigate_two", 3: "navigate_three"}
        if len(clauses) in names and all(len(_content(c)) == 1 for c in clauses):
            return names[len(clauses)]

    raise UnclassifiableUtterance(f"no rule matches: {' '.join(t.token for t in tags)!r}")


def extract_cq(text: str, lex: GroundingLexicon, pickup_as_noun: bool = False) -> ContextualQuery:
    """Tag, classify, and pull the ordered parameters of the task class."""
    tags = tag_tokens(text, lex, pickup_as_noun=pickup_as_noun)
    descriptor = classify_task(tags)
    clauses = _clauses(tags)

    if descriptor == "ship":
        c1, c2 = _content(clauses[0]), _content(clauses[1])
        if len(c1) != 2 or len(c2) != 2:
            raise ArityMismatch(
                f"ship expects two objects then a destination, got {len(c1)}+{len(c2)}")
        picked = [c1[0], c1[1], c2[1]]
    elif descriptor == "pickup_colored":
        content = _content(tags)
        adjectives = [t for t in content if t.pos == "adjective"]
        others = [t for t in content if t.pos != "adjective"]
        if len(adjectives) != 1 or len(others) != 1:
            raise ArityMismatch(
                f"pickup_colored expects one attribute and one object, got {len(content)} tokens")
        picked = [adjectives[0], others[0]]
    else:
        picked = _content(tags)

    arity = TASK_ARITY[descriptor]
    if len(picked) != arity:
        raise ArityMismatch(
            f"{descriptor} takes {arity} parameters, got {len(picked)}: "
            f"{[t.token for t in picked]}")
    return ContextualQuery(
        descriptor=descriptor,
        params=tuple(t.token for t in picked),
        param_pos=tuple(t.pos for t in picked),
    )
