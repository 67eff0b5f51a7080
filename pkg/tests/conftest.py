from __future__ import annotations

import pytest

from groundsmith.assets import load_bundled_lexicon, load_bundled_world
from groundsmith.corpus import generate_corpus, train_templates
from groundsmith.grounding import build_registry, lexicon_from_world
from groundsmith.world import ContainerDef, RoomDef, ToyDef, WorldConfig


@pytest.fixture(scope="session")
def demo_world():
    return load_bundled_world("toy_4x1")


@pytest.fixture(scope="session")
def demo_lexicon(demo_world):
    return lexicon_from_world(demo_world)


@pytest.fixture(scope="session")
def demo_registry(demo_world, demo_lexicon):
    return build_registry(demo_world, demo_lexicon)


@pytest.fixture(scope="session")
def seen_world():
    return load_bundled_world("toy_seen")


@pytest.fixture(scope="session")
def seen_lexicon():
    return load_bundled_lexicon("seen")


@pytest.fixture(scope="session")
def seen_registry(seen_world, seen_lexicon):
    return build_registry(seen_world, seen_lexicon)


@pytest.fixture(scope="session")
def unseen_world():
    return load_bundled_world("toy_unseen")


@pytest.fixture(scope="session")
def unseen_lexicon():
    return load_bundled_lexicon("unseen")


@pytest.fixture(scope="session")
def unseen_registry(unseen_world, unseen_lexicon):
    return build_registry(unseen_world, unseen_lexicon)


@pytest.fixture(scope="session")
def seen_corpora():
    return (generate_corpus("seen", "manipulation"),
            generate_corpus("seen", "navigation"))


@pytest.fixture(scope="session")
def unseen_corpora():
    return (generate_corpus("unseen", "manipulation"),
            generate_corpus("unseen", "navigation"))


@pytest.fixture(scope="session")
def library(seen_corpora, seen_registry, seen_lexicon):
    manip, nav = seen_corpora
    return train_templates(list(manip) + list(nav), seen_registry, seen_lexicon)


@pytest.fixture()
def tiny_world():
    """2x1 strip with a single toy and no containers."""
    return WorldConfig(
        grid_width=2, grid_height=1,
        toys=(ToyDef("pebble", "pebble", "gray", 1),),
        containers=(),
        rooms=(RoomDef("left", frozenset({0})), RoomDef("right", frozenset({1}))),
        agent_start=0)


@pytest.fixture()
def homonym_world():
    """Small world carrying the color/fruit homonym "orange"."""
    return WorldConfig(
        grid_width=4, grid_height=1,
        toys=(ToyDef("orange", "fruit", "yellow", 1),
              ToyDef("ball", "ball", "orange", 2)),
        containers=(ContainerDef("box", "box", 3),),
        rooms=(RoomDef("bedroom", frozenset({0})),),
        agent_start=0)
