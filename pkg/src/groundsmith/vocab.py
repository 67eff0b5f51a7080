"""Vocabularies, NL templates, and world builders for the seen/unseen
corpora.

Sizing (distinct fill tokens per split and domain):

  manipulation seen    360 = 30 colors + 241 toys + 15 containers + 75 rooms
                             minus 1 for the color/fruit homonym "orange"
  manipulation unseen  340 = 25 colors + 250 toys + 10 containers + 55 rooms
  navigation seen       42 locations
  navigation unseen     23 locations

Toy and room tokens are prefix x base compounds so the sets stay large,
pronounceable, and disjoint across splits.  Every token doubles as the
entity id in the generated world, which keeps the lexicon derivable from
the world config.  The homonym "orange" (color adjective and fruit noun)
is carried by the lexicon but excluded from default corpus fills; the
failure-mode corpus injects it explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .world import ContainerDef, RoomDef, ToyDef, WorldConfig

SEEN_COLORS = (
    "red", "blue", "green", "yellow", "purple",
    "pink", "brown", "black", "white", "gray",
    "cyan", "magenta", "violet", "indigo", "maroon",
    "olive", "navy", "teal", "coral", "salmon",
    "khaki", "crimson", "scarlet", "amber", "beige",
    "turquoise", "lavender", "ivory", "gold", "orange",
)

UNSEEN_COLORS = (
    "plum", "rust", "mint", "jade", "lime",
    "aqua", "azure", "cobalt", "copper", "bronze",
    "silver", "pearl", "slate", "charcoal", "mustard",
    "peach", "apricot", "cherry", "ruby", "emerald",
    "sapphire", "topaz", "onyx", "sienna", "ochre",
)

_SEEN_TOY_BASES = (
    "ball", "cube", "disc", "ring", "block",
    "prism", "wedge", "cone", "torus", "gear",
    "peg", "dice", "marble", "token", "chip",
    "coin", "bead", "spool", "crayon", "magnet",
    "dart", "domino", "jack", "yoyo", "puck",
    "brick", "tile", "knob", "bolt", "washer",
    "spring", "lever", "crank", "pulley", "bearing",
    "rivet", "dowel", "spindle", "cog", "pebble",
)
_SEEN_TOY_PREFIXES = ("", "mini", "mega", "micro", "twin", "jumbo")

_UNSEEN_TOY_BASES = (
    "orb", "sphere", "cylinder", "cuboid", "ovoid",
    "helix", "spiral", "lattice", "rod", "tube",
    "slab", "plank", "panel", "shard", "crystal",
    "ingot", "nugget", "widget", "gizmo", "gadget",
    "doodad", "trinket", "bauble", "charm", "locket",
    "pendant", "button", "buckle", "clasp", "pin",
    "needle", "spike", "stud", "nail", "screw",
    "nut", "clamp", "hinge", "bracket", "flange",
    "gasket", "piston", "rotor", "stator", "cam",
    "shaft", "axle", "wheel", "roller", "slider",
)
_UNSEEN_TOY_PREFIXES = ("", "nano", "ultra", "giga", "poly")

SEEN_CONTAINERS = (
    "box", "bin", "crate", "basket", "bucket",
    "tub", "jar", "chest", "hamper", "tray",
    "pot", "barrel", "carton", "canister", "bag",
)

UNSEEN_CONTAINERS = (
    "pouch", "satchel", "keg", "urn", "vat",
    "flask", "churn", "cask", "tote", "creel",
)

_SEEN_ROOM_BASES = (
    "wing", "hall", "bay", "loft", "den",
    "nook", "vault", "studio", "atrium", "alcove",
    "annex", "cellar", "garret", "parlor", "foyer",
)
_SEEN_ROOM_PREFIXES = ("north", "south", "east", "west", "upper")

_UNSEEN_ROOM_BASES = (
    "ward", "gallery", "chamber", "suite", "lounge",
    "attic", "basement", "corridor", "landing", "porch",
    "balcony",
)
_UNSEEN_ROOM_PREFIXES = ("inner", "outer", "lower", "mid", "rear")

SEEN_LOCATIONS = (
    "cvs", "park", "store", "museum", "library",
    "cafe", "bank", "gym", "plaza", "school",
    "station", "harbor", "market", "bakery", "cinema",
    "church", "hospital", "pharmacy", "diner", "hotel",
    "airport", "zoo", "pier", "stadium", "courthouse",
    "mall", "garage", "office", "theater", "arcade",
    "aquarium", "chapel", "clinic", "college", "depot",
    "dock", "farm", "foundry", "mill", "forge",
    "bridge", "tower",
)

UNSEEN_LOCATIONS = (
    "observatory", "planetarium", "conservatory", "boardwalk", "marina",
    "motel", "tavern", "winery", "brewery", "orchard",
    "quarry", "ranch", "reef", "sawmill", "shipyard",
    "smithy", "solarium", "spa", "temple", "terrace",
    "vineyard", "lighthouse", "castle",
)


def _compound(prefixes, bases) -> tuple[tuple[str, str], ...]:
    """(token, base) pairs, prefix-major so the bare bases come first."""
    return tuple((prefix + base, base) for prefix in prefixes for base in bases)


@dataclass(frozen=True)
class SplitVocab:
    split: str
    colors: tuple[str, ...]
    toys: tuple[tuple[str, str], ...]  # (token == toy id, shape)
    containers: tuple[str, ...]
    manip_rooms: tuple[str, ...]
    nav_locations: tuple[str, ...]
    homonym_tokens: frozenset[str]

    @property
    def manipulation_tokens(self) -> set[str]:
        return (
            set(self.colors)
            | {tok for tok, _ in self.toys}
            | set(self.containers)
            | set(self.manip_rooms)
        )

    @property
    def navigation_tokens(self) -> set[str]:
        return set(self.nav_locations)

    def fill_toys(self) -> tuple[str, ...]:
        return tuple(tok for tok, _ in self.toys if tok not in self.homonym_tokens)

    def fill_colors(self) -> tuple[str, ...]:
        return tuple(c for c in self.colors if c not in self.homonym_tokens)

    def fill_containers(self) -> tuple[str, ...]:
        return tuple(c for c in self.containers if c not in self.homonym_tokens)


SEEN_VOCAB = SplitVocab(
    split="seen",
    colors=SEEN_COLORS,
    toys=_compound(_SEEN_TOY_PREFIXES, _SEEN_TOY_BASES) + (("orange", "fruit"),),
    containers=SEEN_CONTAINERS,
    manip_rooms=tuple(p + b for p in _SEEN_ROOM_PREFIXES for b in _SEEN_ROOM_BASES),
    nav_locations=SEEN_LOCATIONS,
    homonym_tokens=frozenset({"orange"}),
)

UNSEEN_VOCAB = SplitVocab(
    split="unseen",
    colors=UNSEEN_COLORS,
    toys=_compound(_UNSEEN_TOY_PREFIXES, _UNSEEN_TOY_BASES),
    containers=UNSEEN_CONTAINERS,
    manip_rooms=tuple(p + b for p in _UNSEEN_ROOM_PREFIXES for b in _UNSEEN_ROOM_BASES),
    nav_locations=UNSEEN_LOCATIONS,
    homonym_tokens=frozenset(),
)

VOCABS = {"seen": SEEN_VOCAB, "unseen": UNSEEN_VOCAB}


# Natural-language templates, shared across splits.  {0}, {1}, {2} are the
# contextual-query parameters in canonical slot order.
NL_TEMPLATES: dict[str, tuple[str, ...]] = {
    "move_to": (
        "move to the {0}",
        "approach the {0}",
    ),
    "pickup": (
        "pickup the {0}",
        "pick up the {0}",
    ),
    "pickup_colored": (
        "pick up the {0} {1}",
        "grab the {0} {1}",
    ),
    "ship": (
        "put the {0} in the {1}, then put the {1} in the {2}",
        "place the {0} in the {1}, then move the {1} to the {2}",
    ),
    "navigate_one": (
        "go to the {0}",
        "head to the {0}",
        "walk to the {0}",
    ),
    "navigate_two": (
        "go to the {0} and then go to the {1}",
        "head to the {0} then walk to the {1}",
    ),
    "navigate_three": (
        "go to the {0} then go to the {1} then go to the {2}",
        "head to the {0} then head to the {1} then head to the {2}",
    ),
}

MANIPULATION_CLASSES = ("move_to", "pickup", "pickup_colored", "ship")
NAVIGATION_CLASSES = ("navigate_one", "navigate_two", "navigate_three")
DOMAIN_CLASSES = {"manipulation": MANIPULATION_CLASSES, "navigation": NAVIGATION_CLASSES}

# Class counts per split (|T_S|, |T_U| columns of the dataset table).
CLASS_COUNTS: dict[tuple[str, str], dict[str, int]] = {
    ("seen", "manipulation"): {
        "move_to": 150, "pickup": 450, "pickup_colored": 2700, "ship": 1350,
    },
    ("unseen", "manipulation"): {
        "move_to": 36, "pickup": 108, "pickup_colored": 648, "ship": 972,
    },
    ("seen", "navigation"): {
        "navigate_one": 51, "navigate_two": 612, "navigate_three": 7344,
    },
    ("unseen", "navigation"): {
        "navigate_one": 18, "navigate_two": 72, "navigate_three": 288,
    },
}

GRID_WIDTH = 8
GRID_HEIGHT = 8


def build_world(vocab: SplitVocab) -> WorldConfig:
    """Corpus world for one split: every vocabulary referent exists.

    Placement is arbitrary but deterministic; colors cycle so that every
    color in the vocabulary appears on some toy (the derived lexicon then
    covers the full color set).
    """
    n = GRID_WIDTH * GRID_HEIGHT
    toys = tuple(
        ToyDef(id=tok, shape=shape, color=vocab.colors[i % len(vocab.colors)], cell=i % n)
        for i, (tok, shape) in enumerate(vocab.toys)
    )
    containers = tuple(
        ContainerDef(id=tok, kind=tok, cell=(3 * i + 1) % n)
        for i, tok in enumerate(vocab.containers)
    )
    room_ids = vocab.manip_rooms + vocab.nav_locations
    rooms = tuple(
        RoomDef(id=tok, cells=frozenset({(5 * i + 2) % n}))
        for i, tok in enumerate(room_ids)
    )
    return WorldConfig(
        grid_width=GRID_WIDTH,
        grid_height=GRID_HEIGHT,
        toys=toys,
        containers=containers,
        rooms=rooms,
        agent_start=0,
        gamma=0.95,
    )


def build_demo_world() -> WorldConfig:
    """The 4x1 planning-demo world: gripper, cylinder, sphere, one box,
    and bedroom/kitchen rooms at the ends of the strip."""
    return WorldConfig(
        grid_width=4,
        grid_height=1,
        toys=(
            ToyDef(id="cylinder", shape="cylinder", color="green", cell=1),
            ToyDef(id="sphere", shape="sphere", color="red", cell=3),
        ),
        containers=(ContainerDef(id="box", kind="box", cell=2),),
        rooms=(
            RoomDef(id="bedroom", cells=frozenset({0})),
            RoomDef(id="kitchen", cells=frozenset({3})),
        ),
        agent_start=0,
        gamma=0.95,
    )
