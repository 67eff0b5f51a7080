"""LTL abstract syntax, parser, printer, and finite-trace satisfaction.

Formulas are immutable trees built from :class:`Atom`, the constants
``TRUE``/``FALSE``, Boolean connectives, and the temporal operators
F (finally), G (globally), and U (until).  Satisfaction is interpreted
over finite traces: a trace is a sequence of label sets, each the set of
atomic propositions true at that step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence


class LtlError(Exception):
    """Base class for LTL-related errors."""


class LtlSyntaxError(LtlError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (token {position})")
        self.position = position


class EmptyInput(LtlError):
    pass


class EmptyTrace(LtlError):
    pass


# Tokens that can never be atom names: they would be re-read as grammar
# symbols and break parse/format round-tripping.
RESERVED_TOKENS = frozenset({"!", "&", "|", "G", "F", "U", "(", ")", "true", "false"})
_METACHARS = set("!&|()")


@dataclass(frozen=True)
class LtlFormula:
    """Base class; concrete nodes below."""

    def __str__(self) -> str:
        return format_ltl(self)


@dataclass(frozen=True)
class TrueConst(LtlFormula):
    pass


@dataclass(frozen=True)
class FalseConst(LtlFormula):
    pass


@dataclass(frozen=True)
class Atom(LtlFormula):
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("atom name must be nonempty")
        if self.name in RESERVED_TOKENS:
            raise ValueError(f"atom name {self.name!r} is a reserved token")
        if any(ch.isspace() or ch in _METACHARS for ch in self.name):
            raise ValueError(f"atom name {self.name!r} contains whitespace or metacharacters")


@dataclass(frozen=True)
class Not(LtlFormula):
    child: LtlFormula


@dataclass(frozen=True)
class And(LtlFormula):
    left: LtlFormula
    right: LtlFormula


@dataclass(frozen=True)
class Or(LtlFormula):
    left: LtlFormula
    right: LtlFormula


@dataclass(frozen=True)
class Finally(LtlFormula):
    child: LtlFormula


@dataclass(frozen=True)
class Globally(LtlFormula):
    child: LtlFormula


@dataclass(frozen=True)
class Until(LtlFormula):
    left: LtlFormula
    right: LtlFormula


TRUE = TrueConst()
FALSE = FalseConst()

Trace = Sequence[frozenset]


def normalize_trace(steps: Iterable[Iterable[str]]) -> tuple[frozenset, ...]:
    """Coerce a sequence of label collections into a canonical trace."""
    return tuple(frozenset(step) for step in steps)


# --- parsing ---------------------------------------------------------------
#
# Grammar (whitespace-tokenized), loosest to tightest:
#   or    := and ( '|' and )*
#   and   := until ( '&' until )*
#   until := unary ( 'U' unary )*
#   unary := ('!' | 'G' | 'F') unary | '(' or ')' | 'true' | 'false' | atom
# Binary operators associate left.


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise LtlSyntaxError("unexpected end of input", self.pos)
        self.pos += 1
        return tok

    def parse_or(self) -> LtlFormula:
        node = self.parse_and()
        while self.peek() == "|":
            self.take()
            node = Or(node, self.parse_and())
        return node

    def parse_and(self) -> LtlFormula:
        node = self.parse_until()
        while self.peek() == "&":
            self.take()
            node = And(node, self.parse_until())
        return node

    def parse_until(self) -> LtlFormula:
        node = self.parse_unary()
        while self.peek() == "U":
            self.take()
            node = Until(node, self.parse_unary())
        return node

    def parse_unary(self) -> LtlFormula:
        tok = self.peek()
        if tok is None:
            raise LtlSyntaxError("unexpected end of input", self.pos)
        if tok == "!":
            self.take()
            return Not(self.parse_unary())
        if tok == "G":
            self.take()
            return Globally(self.parse_unary())
        if tok == "F":
            self.take()
            return Finally(self.parse_unary())
        if tok == "(":
            self.take()
            node = self.parse_or()
            if self.peek() != ")":
                raise LtlSyntaxError("expected ')'", self.pos)
            self.take()
            return node
        if tok == "true":
            self.take()
            return TRUE
        if tok == "false":
            self.take()
            return FALSE
        if tok in RESERVED_TOKENS:
            raise LtlSyntaxError(f"unexpected token {tok!r}", self.pos)
        self.take()
        try:
            return Atom(tok)
        except ValueError as exc:
            raise LtlSyntaxError(str(exc), self.pos - 1) from exc


def parse_ltl(text: str) -> LtlFormula:
    """Parse a whitespace-tokenized LTL formula string."""
    tokens = text.split()
    if not tokens:
        raise EmptyInput("no tokens in input")
    parser = _Parser(tokens)
    node = parser.parse_or()
    if parser.peek() is not None:
        raise LtlSyntaxError(f"trailing token {parser.peek()!r}", parser.pos)
    return node


def format_ltl(f: LtlFormula) -> str:
    """Canonical fully parenthesized text form; inverse of parse_ltl."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, TrueConst):
        return "true"
    if isinstance(f, FalseConst):
        return "false"
    if isinstance(f, Not):
        return f"! ( {_body(f.child)} )"
    if isinstance(f, Finally):
        return f"F ( {_body(f.child)} )"
    if isinstance(f, Globally):
        return f"G ( {_body(f.child)} )"
    if isinstance(f, And):
        return f"( {format_ltl(f.left)} & {format_ltl(f.right)} )"
    if isinstance(f, Or):
        return f"( {format_ltl(f.left)} | {format_ltl(f.right)} )"
    if isinstance(f, Until):
        return f"( {format_ltl(f.left)} U {format_ltl(f.right)} )"
    raise TypeError(f"not an LTL formula: {f!r}")


def _body(f: LtlFormula) -> str:
    # Parent already supplies parentheses; strip the redundant outer pair
    # that binary nodes would add.
    if isinstance(f, (And, Or, Until)):
        return format_ltl(f)[2:-2]
    return format_ltl(f)


# --- semantics -------------------------------------------------------------


def evaluate_trace(f: LtlFormula, trace: Trace, pos: int = 0) -> bool:
    """Finite-trace satisfaction of ``f`` at position ``pos``."""
    if len(trace) == 0:
        raise EmptyTrace("satisfaction is undefined on the empty trace")
    n = len(trace)
    if isinstance(f, Atom):
        return f.name in trace[pos]
    if isinstance(f, TrueConst):
        return True
    if isinstance(f, FalseConst):
        return False
    if isinstance(f, Not):
        return not evaluate_trace(f.child, trace, pos)
    if isinstance(f, And):
        return evaluate_trace(f.left, trace, pos) and evaluate_trace(f.right, trace, pos)
    if isinstance(f, Or):
        return evaluate_trace(f.left, trace, pos) or evaluate_trace(f.right, trace, pos)
    if isinstance(f, Finally):
        return any(evaluate_trace(f.child, trace, j) for j in range(pos, n))
    if isinstance(f, Globally):
        return all(evaluate_trace(f.child, trace, j) for j in range(pos, n))
    if isinstance(f, Until):
        for j in range(pos, n):
            if evaluate_trace(f.right, trace, j):
                return all(evaluate_trace(f.left, trace, k) for k in range(pos, j))
        return False
    raise TypeError(f"not an LTL formula: {f!r}")


def substitute_atoms(f: LtlFormula, mapping: Mapping[str, LtlFormula]) -> LtlFormula:
    """Replace every mapped Atom leaf; unmapped atoms pass through."""
    if isinstance(f, Atom):
        return mapping.get(f.name, f)
    return map_children(f, lambda child: substitute_atoms(child, mapping))


def atoms(f: LtlFormula) -> set[str]:
    if isinstance(f, Atom):
        return {f.name}
    if isinstance(f, (TrueConst, FalseConst)):
        return set()
    if isinstance(f, (Not, Finally, Globally)):
        return atoms(f.child)
    if isinstance(f, (And, Or, Until)):
        return atoms(f.left) | atoms(f.right)
    raise TypeError(f"not an LTL formula: {f!r}")


def map_children(f: LtlFormula, fn: Callable[[LtlFormula], LtlFormula]) -> LtlFormula:
    if isinstance(f, Not):
        return Not(fn(f.child))
    if isinstance(f, Finally):
        return Finally(fn(f.child))
    if isinstance(f, Globally):
        return Globally(fn(f.child))
    if isinstance(f, And):
        return And(fn(f.left), fn(f.right))
    if isinstance(f, Or):
        return Or(fn(f.left), fn(f.right))
    if isinstance(f, Until):
        return Until(fn(f.left), fn(f.right))
    return f


def simplify(f: LtlFormula) -> LtlFormula:
    """Apply Boolean identities bottom-up to a fixed point.

    Rules: x&true=x, x&false=false, x|true=true, x|false=x, !true=false,
    !false=true, x&x=x, x|x=x.  Temporal operators are preserved (their
    children are still simplified).
    """
    if isinstance(f, (Atom, TrueConst, FalseConst)):
        return f
    if isinstance(f, Not):
        child = simplify(f.child)
        if isinstance(child, TrueConst):
            return FALSE
        if isinstance(child, FalseConst):
            return TRUE
        return Not(child)
    if isinstance(f, And):
        left, right = simplify(f.left), simplify(f.right)
        if isinstance(left, FalseConst) or isinstance(right, FalseConst):
            return FALSE
        if isinstance(left, TrueConst):
            return right
        if isinstance(right, TrueConst):
            return left
        if left == right:
            return left
        return And(left, right)
    if isinstance(f, Or):
        left, right = simplify(f.left), simplify(f.right)
        if isinstance(left, TrueConst) or isinstance(right, TrueConst):
            return TRUE
        if isinstance(left, FalseConst):
            return right
        if isinstance(right, FalseConst):
            return left
        if left == right:
            return left
        return Or(left, right)
    if isinstance(f, Finally):
        return Finally(simplify(f.child))
    if isinstance(f, Globally):
        return Globally(simplify(f.child))
    if isinstance(f, Until):
        return Until(simplify(f.left), simplify(f.right))
    raise TypeError(f"not an LTL formula: {f!r}")


def canonical(f: LtlFormula) -> LtlFormula:
    """Simplify plus an associative-commutative normal form for And/Or.

    Nested conjunctions/disjunctions are flattened, deduplicated, and
    reassembled with operands in a fixed order, so semantically identical
    residuals produced by formula progression compare equal and the set of
    progressed formulas stays finite.
    """
    if isinstance(f, (Atom, TrueConst, FalseConst)):
        return f
    if isinstance(f, Not):
        child = canonical(f.child)
        if isinstance(child, TrueConst):
            return FALSE
        if isinstance(child, FalseConst):
            return TRUE
        return Not(child)
    if isinstance(f, (And, Or)):
        cls = type(f)
        absorb, drop = (FalseConst, TrueConst) if cls is And else (TrueConst, FalseConst)
        operands: list[LtlFormula] = []
        seen: set[LtlFormula] = set()

        def collect(node: LtlFormula) -> bool:
            if isinstance(node, cls):
                return collect(node.left) and collect(node.right)
            node = canonical(node)
            if isinstance(node, cls):
                return collect(node.left) and collect(node.right)
            if isinstance(node, absorb):
                return False
            if isinstance(node, drop) or node in seen:
                return True
            seen.add(node)
            operands.append(node)
            return True

        if not collect(f):
            return FALSE if cls is And else TRUE
        if not operands:
            return TRUE if cls is And else FALSE
        operands.sort(key=format_ltl)
        node = operands[0]
        for operand in operands[1:]:
            node = cls(node, operand)
        return node
    if isinstance(f, Finally):
        return Finally(canonical(f.child))
    if isinstance(f, Globally):
        return Globally(canonical(f.child))
    if isinstance(f, Until):
        return Until(canonical(f.left), canonical(f.right))
    raise TypeError(f"not an LTL formula: {f!r}")
