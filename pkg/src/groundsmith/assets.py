"""Bundled data files: sample worlds and lexicons.

``python -m groundsmith.assets`` regenerates everything under
``groundsmith/data/``; the files are committed so installs need no build
step.  The corpus lexicons are the world-derived ones (every entity id is
a noun, every color an adjective), which automatically carries the
color/fruit homonym "orange" in the seen split.
"""

from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

from .grounding import GroundingLexicon, lexicon_from_world
from .vocab import SEEN_VOCAB, UNSEEN_VOCAB, build_demo_world, build_world
from .world import WorldConfig

DATA_PACKAGE = "groundsmith.data"

BUNDLED_WORLDS = ("toy_4x1", "toy_seen", "toy_unseen")


def data_path(name: str) -> Path:
    return Path(str(resources.files(DATA_PACKAGE).joinpath(name)))


def load_bundled_world(name: str) -> WorldConfig:
    if name not in BUNDLED_WORLDS:
        raise KeyError(f"unknown bundled world {name!r}")
    return WorldConfig.load(data_path(f"{name}.json"))


def load_bundled_lexicon(split: str) -> GroundingLexicon:
    if split not in ("seen", "unseen"):
        raise KeyError(f"unknown split {split!r}")
    return GroundingLexicon.load(data_path(f"lexicon_{split}.json"))


def regenerate(out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    worlds = {
        "toy_4x1": build_demo_world(),
        "toy_seen": build_world(SEEN_VOCAB),
        "toy_unseen": build_world(UNSEEN_VOCAB),
    }
    for name, world in worlds.items():
        path = out / f"{name}.json"
        world.save(path)
        written.append(path)

    for split, world_name in (("seen", "toy_seen"), ("unseen", "toy_unseen")):
        lexicon = lexicon_from_world(worlds[world_name])
        path = out / f"lexicon_{split}.json"
        lexicon.save(path)
        written.append(path)
    return written


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent / "data"
    for path in regenerate(target):
        print(path)
