"""Corpus generation, the end-to-end pipeline, and scoring.

Corpora are generated by expanding NL templates over the split
vocabularies with pairwise-distinct fills, then subsampling (seeded,
order-stable) to the exact published class counts.  Gold labels are
produced alongside: the contextual query from the fill tuple, the
grounded LTL from the task structure over canonically named atoms.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from . import ltl
from .frontend import ContextualQuery, FrontendError, extract_cq
from .grounding import GroundingError, GroundingLexicon, PropRegistry
from .templates import TemplateError, TemplateLibrary, instantiate, learn_template
from .vocab import CLASS_COUNTS, DOMAIN_CLASSES, NL_TEMPLATES, SplitVocab, VOCABS


class CorpusError(Exception):
    pass


class InsufficientVocabulary(CorpusError):
    pass


class NoValidExample(CorpusError):
    def __init__(self, task_class: str):
        super().__init__(f"no record of class {task_class} has pairwise-distinct groundings")
        self.task_class = task_class


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    split: str
    task_class: str
    text: str
    gold_cq: ContextualQuery
    gold_ltl: str

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "split": self.split,
            "task_class": self.task_class,
            "text": self.text,
            "gold_cq": {"descriptor": self.gold_cq.descriptor, "params": list(self.gold_cq.params)},
            "gold_ltl": self.gold_ltl,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CorpusRecord":
        try:
            return cls(
                id=doc["id"],
                split=doc["split"],
                task_class=doc["task_class"],
                text=doc["text"],
                gold_cq=ContextualQuery(doc["gold_cq"]["descriptor"], tuple(doc["gold_cq"]["params"])),
                gold_ltl=doc["gold_ltl"],
            )
        except (KeyError, TypeError) as exc:
            raise CorpusError(f"malformed corpus record: {exc}") from exc


def save_corpus(records: Iterable[CorpusRecord], path: str | Path) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json(), sort_keys=True))
            fh.write("\n")


def load_corpus(path: str | Path) -> list[CorpusRecord]:
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(CorpusRecord.from_json(json.loads(line)))
    return records


# --- gold label construction ---------------------------------------------------


def gold_formula(task_class: str, fills: Sequence[str]) -> ltl.LtlFormula:
    """The task structure of a class instantiated over canonical atom names."""
    A = ltl.Atom
    if task_class == "move_to":
        return ltl.Finally(A(f"at_{fills[0]}"))
    if task_class == "pickup":
        return ltl.Finally(A(f"holding_{fills[0]}"))
    if task_class == "pickup_colored":
        color, toy = fills
        return ltl.Finally(ltl.And(A(f"holding_{toy}"), A(f"{toy}_is_{color}")))
    if task_class == "ship":
        toy, container, room = fills
        inner = ltl.And(A(f"{toy}_in_{container}"), A(f"{container}_in_{room}"))
        return ltl.Finally(ltl.And(A(f"{toy}_in_{container}"), ltl.Finally(inner)))
    if task_class == "navigate_one":
        return ltl.Finally(A(fills[0]))
    if task_class == "navigate_two":
        return ltl.Finally(ltl.And(A(fills[0]), ltl.Finally(A(fills[1]))))
    if task_class == "navigate_three":
        inner = ltl.Finally(ltl.And(A(fills[1]), ltl.Finally(A(fills[2]))))
        return ltl.Finally(ltl.And(A(fills[0]), inner))
    raise CorpusError(f"unknown task class {task_class!r}")


# --- generation -----------------------------------------------------------------


def _stable_seed(*parts: str) -> int:
    digest = hashlib.sha256(":".join(parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _fill_space(task_class: str, vocab: SplitVocab) -> tuple[int, Iterator[tuple[str, ...]]]:
    """Size and iterator of the pairwise-distinct fill tuples of a class."""
    toys = vocab.fill_toys()
    colors = vocab.fill_colors()
    containers = vocab.fill_containers()
    rooms = vocab.manip_rooms
    locations = vocab.nav_locations
    if task_class in ("move_to", "pickup"):
        return len(toys), iter([(t,) for t in toys])
    if task_class == "pickup_colored":
        count = len(colors) * len(toys)
        return count, itertools.product(colors, toys)
    if task_class == "ship":
        count = len(toys) * len(containers) * len(rooms)
        return count, itertools.product(toys, containers, rooms)
    if task_class in ("navigate_one", "navigate_two", "navigate_three"):
        k = {"navigate_one": 1, "navigate_two": 2, "navigate_three": 3}[task_class]
        count = 1
        for j in range(k):
            count *= len(locations) - j
        return count, itertools.permutations(locations, k)
    raise CorpusError(f"unknown task class {task_class!r}")


def _select_ranks(total: int, wanted: int, rng: random.Random) -> list[int]:
    return sorted(rng.sample(range(total), wanted))


def generate_class(task_class: str, split: str, domain: str, count: int,
                   vocab: SplitVocab, seed: int) -> list[CorpusRecord]:
    templates = NL_TEMPLATES[task_class]
    n_fills, _ = _fill_space(task_class, vocab)
    total = len(templates) * n_fills
    if total < count:
        raise InsufficientVocabulary(
            f"{task_class}/{split}: only {total} template x fill combinations "
            f"for a target of {count}")
    rng = random.Random(_stable_seed(str(seed), split, domain, task_class))
    ranks = _select_ranks(total, count, rng)

    records = []
    rank_iter = iter(ranks)
    wanted = next(rank_iter, None)
    position = 0
    for t_idx, template in enumerate(templates):
        if wanted is None:
            break
        _, fills_iter = _fill_space(task_class, vocab)
        for fills in fills_iter:
            if wanted is None:
                break
            if position == wanted:
                seq = len(records)
                records.append(CorpusRecord(
                    id=f"{split}-{domain}-{task_class}-{seq:05d}",
                    split=split,
                    task_class=task_class,
                    text=template.format(*fills),
                    gold_cq=ContextualQuery(task_class, tuple(fills)),
                    gold_ltl=ltl.format_ltl(gold_formula(task_class, fills)),
                ))
                wanted = next(rank_iter, None)
            position += 1
    return records


def generate_corpus(split: str, domain: str, seed: int = 7,
                    include_homonyms: bool = False) -> list[CorpusRecord]:
    """All records of one split x domain, class counts exactly as published.

    ``include_homonyms`` appends extra records (beyond the published
    counts) whose fills use the homonym token, for failure-mode demos.
    """
    if split not in VOCABS:
        raise CorpusError(f"unknown split {split!r}")
    if domain not in DOMAIN_CLASSES:
        raise CorpusError(f"unknown domain {domain!r}")
    vocab = VOCABS[split]
    records = []
    for task_class in DOMAIN_CLASSES[domain]:
        count = CLASS_COUNTS[(split, domain)][task_class]
        records.extend(generate_class(task_class, split, domain, count, vocab, seed))
    if include_homonyms and split == "seen" and domain == "manipulation":
        records.extend(homonym_records())
    return records


def homonym_records() -> list[CorpusRecord]:
    """Hand-written records whose fills are the homonym token "orange"
    (a color adjective and a fruit noun in the seen lexicon)."""
    specs = [
        ("pickup", "pickup the orange", ("orange",)),
        ("move_to", "move to the orange", ("orange",)),
        ("pickup_colored", "pick up the orange ball", ("orange", "ball")),
        ("ship", "put the orange in the box, then put the box in the northwing",
         ("orange", "box", "northwing")),
    ]
    records = []
    for seq, (task_class, text, fills) in enumerate(specs):
        records.append(CorpusRecord(
            id=f"seen-manipulation-homonym-{seq:02d}",
            split="seen",
            task_class=task_class,
            text=text,
            gold_cq=ContextualQuery(task_class, tuple(fills)),
            gold_ltl=ltl.format_ltl(gold_formula(task_class, fills)),
        ))
    return records


def sample_training_subset(records: Sequence[CorpusRecord], size: int, seed: int = 7) -> list[CorpusRecord]:
    """Seeded, order-stable subset of a corpus (the published training
    draw is unspecified; template learning needs one example per class)."""
    if size > len(records):
        raise CorpusError(f"cannot draw {size} of {len(records)} records")
    rng = random.Random(_stable_seed(str(seed), "training-subset", str(size)))
    ranks = sorted(rng.sample(range(len(records)), size))
    return [records[r] for r in ranks]


# --- pipeline --------------------------------------------------------------------


@dataclass
class PipelineResult:
    record_id: str
    split: str
    task_class: str
    cq: ContextualQuery | None
    cq_correct: bool
    ltl_text: str | None
    ltl_correct: bool
    error_kind: str | None = None
    error_detail: str | None = None


def run_pipeline(record: CorpusRecord, library: TemplateLibrary, lex: GroundingLexicon,
                 reg: PropRegistry, pos_mode: bool = True, use_gold_cq: bool = False,
                 pickup_as_noun: bool = False) -> PipelineResult:
    """NL -> CQ -> template -> grounded LTL on one record; every failure is
    captured in the result rather than raised."""
    result = PipelineResult(
        record_id=record.id, split=record.split, task_class=record.task_class,
        cq=None, cq_correct=False, ltl_text=None, ltl_correct=False)

    try:
        if use_gold_cq:
            cq = record.gold_cq
        else:
            cq = extract_cq(record.text, lex, pickup_as_noun=pickup_as_noun)
            if not pos_mode:
                cq = ContextualQuery(cq.descriptor, cq.params, param_pos=None)
    except (FrontendError, GroundingError) as exc:
        result.error_kind = type(exc).__name__
        result.error_detail = str(exc)
        return result

    result.cq = cq
    result.cq_correct = (cq == record.gold_cq)

    template = library.get(cq.descriptor)
    if template is None:
        result.error_kind = "MissingTemplate"
        result.error_detail = f"no template learned for class {cq.descriptor}"
        return result

    try:
        grounded = instantiate(template, cq, reg, lex)
    except (TemplateError, GroundingError) as exc:
        result.error_kind = type(exc).__name__
        result.error_detail = str(exc)
        return result

    result.ltl_text = ltl.format_ltl(grounded)
    result.ltl_correct = (grounded == ltl.parse_ltl(record.gold_ltl))
    return result


def train_templates(records: Sequence[CorpusRecord], reg: PropRegistry,
                    lex: GroundingLexicon) -> TemplateLibrary:
    """Learn one template per task class from the first record whose gold
    contextual query grounds to pairwise-distinct referents."""
    by_class: dict[str, list[CorpusRecord]] = {}
    for rec in records:
        by_class.setdefault(rec.task_class, []).append(rec)

    library = TemplateLibrary()
    for task_class, class_records in by_class.items():
        template = None
        for rec in class_records:
            try:
                template = learn_template(rec.gold_cq, ltl.parse_ltl(rec.gold_ltl), reg, lex)
                break
            except (TemplateError, GroundingError):
                continue
        if template is None:
            raise NoValidExample(task_class)
        library.add(template)
    return library


# --- scoring ---------------------------------------------------------------------


@dataclass
class ClassStats:
    total: int = 0
    cq_correct: int = 0
    ltl_correct: int = 0

    @property
    def accuracy(self) -> float:
        return self.ltl_correct / self.total if self.total else 0.0

    @property
    def cq_accuracy(self) -> float:
        return self.cq_correct / self.total if self.total else 0.0


@dataclass
class Metrics:
    per_class: dict[tuple[str, str], ClassStats] = field(default_factory=dict)
    errors: Counter = field(default_factory=Counter)

    def add(self, result: PipelineResult) -> None:
        stats = self.per_class.setdefault((result.split, result.task_class), ClassStats())
        stats.total += 1
        stats.cq_correct += int(result.cq_correct)
        stats.ltl_correct += int(result.ltl_correct)
        if result.error_kind:
            self.errors[result.error_kind] += 1

    def overall(self, split: str) -> ClassStats:
        agg = ClassStats()
        for (s, _), stats in self.per_class.items():
            if s == split:
                agg.total += stats.total
                agg.cq_correct += stats.cq_correct
                agg.ltl_correct += stats.ltl_correct
        return agg

    @property
    def splits(self) -> list[str]:
        return sorted({s for s, _ in self.per_class})


def evaluate(records: Iterable[CorpusRecord], library: TemplateLibrary,
             lex: GroundingLexicon, reg: PropRegistry, pos_mode: bool = True,
             use_gold_cq: bool = False, pickup_as_noun: bool = False) -> Metrics:
    metrics = Metrics()
    for rec in records:
        metrics.add(run_pipeline(rec, library, lex, reg, pos_mode=pos_mode,
                                 use_gold_cq=use_gold_cq, pickup_as_noun=pickup_as_noun))
    return metrics
