"""template engine: lift, parameter matching, instantiation, library."""

from __future__ import annotations

import random

import pytest

from groundsmith import ltl
from groundsmith.frontend import ContextualQuery
from groundsmith.grounding import (
    AmbiguousGrounding,
    ColorRef,
    GroundingLexicon,
    LexiconEntry,
    ObjectRef,
    RoomRef,
    UnresolvableAP,
    build_registry,
    lexicon_from_world,
)
from groundsmith.templates import (
    Constant,
    CorruptLibrary,
    DescriptorMismatch,
    NonDistinctGroundings,
    SlotAtom,
    SortMismatch,
    TemplateLibrary,
    UnboundSlot,
    Variable,
    instantiate,
    learn_template,
    lift,
    load_library,
    match_parameters,
    save_library,
)
from groundsmith.world import ContainerDef, RoomDef, ToyDef, WorldConfig


@pytest.fixture()
def nav_world():
    return WorldConfig(
        grid_width=3, grid_height=1,
        toys=(), containers=(),
        rooms=(RoomDef("cvs", frozenset({0})), RoomDef("park", frozenset({1})),
               RoomDef("store", frozenset({2})), RoomDef("museum", frozenset({0}))),
        agent_start=0)


@pytest.fixture()
def nav_lex(nav_world):
    return lexicon_from_world(nav_world)


@pytest.fixture()
def nav_reg(nav_world, nav_lex):
    return build_registry(nav_world, nav_lex)


@pytest.fixture()
def bucket_world():
    return WorldConfig(
        grid_width=2, grid_height=1,
        toys=(ToyDef("ball", "ball", "red", 0),),
        containers=(ContainerDef("small_bucket", "bucket", 1),),
        rooms=(RoomDef("den", frozenset({0})),),
        agent_start=0)


class TestLift:
    def test_manipulation_atom(self, bucket_world):
        reg = build_registry(bucket_world)
        lifted = lift(ltl.parse_ltl("F ( ball_in_small_bucket )"), reg)
        assert lifted == ltl.Finally(SlotAtom("in_container", (
            Variable("v0", "toy", ObjectRef("ball")),
            Variable("v1", "container", ObjectRef("small_bucket")))))

    def test_navigation_two_slots(self, nav_reg):
        lifted = lift(ltl.parse_ltl("F ( cvs & F ( park ) )"), nav_reg)
        assert lifted == ltl.Finally(ltl.And(
            SlotAtom("agent_at", (Variable("v0", "room", RoomRef("cvs")),)),
            ltl.Finally(SlotAtom("agent_at", (Variable("v1", "room", RoomRef("park")),)))))

    def test_ship_slot_sharing(self, demo_registry):
        g = ltl.parse_ltl("F ( cylinder_in_box & F ( cylinder_in_box & box_in_bedroom ) )")
        lifted = lift(g, demo_registry)
        toy_slot = Variable("v0", "toy", ObjectRef("cylinder"))
        box_slot = Variable("v1", "container", ObjectRef("box"))
        room_slot = Variable("v2", "room", RoomRef("bedroom"))
        first = SlotAtom("in_container", (toy_slot, box_slot))
        second = SlotAtom("container_in_room", (box_slot, room_slot))
        assert lifted == ltl.Finally(ltl.And(first, ltl.Finally(ltl.And(first, second))))

    def test_unresolvable_atom(self, nav_reg):
        with pytest.raises(UnresolvableAP):
            lift(ltl.parse_ltl("F ( xyzzy )"), nav_reg)

    def test_lift_then_substitute_equals_grounded(self, demo_registry):
        # substituting each atom back over the lifted structure recovers it
        g = ltl.parse_ltl("F ( cylinder_in_box & F ( cylinder_in_box & box_in_bedroom ) )")
        lifted = lift(g, demo_registry)
        assert ltl.atoms(g) == {"cylinder_in_box", "box_in_bedroom"}
        # operator skeleton is preserved
        def skeleton(f):
            if isinstance(f, (ltl.Atom, SlotAtom)):
                return "leaf"
            if isinstance(f, ltl.Finally):
                return ("F", skeleton(f.child))
            if isinstance(f, ltl.And):
                return ("&", skeleton(f.left), skeleton(f.right))
            raise AssertionError(f)
        assert skeleton(lifted) == skeleton(g)


class TestMatchParameters:
    def test_navigation_binding(self, nav_reg, nav_lex):
        lifted = lift(ltl.parse_ltl("F ( cvs & F ( park ) )"), nav_reg)
        cq = ContextualQuery("navigate_two", ("cvs", "park"))
        t = match_parameters(cq, lifted, nav_lex)
        assert t.binding_map == {"v0": 0, "v1": 1}

    def test_non_distinct_groundings(self, nav_reg, nav_lex):
        lifted = lift(ltl.parse_ltl("F ( cvs & F ( park ) )"), nav_reg)
        cq = ContextualQuery("navigate_two", ("park", "park"))
        with pytest.raises(NonDistinctGroundings):
            match_parameters(cq, lifted, nav_lex)

    def test_ship_binding(self, demo_registry, demo_lexicon):
        g = ltl.parse_ltl("F ( cylinder_in_box & F ( cylinder_in_box & box_in_bedroom ) )")
        cq = ContextualQuery("ship", ("cylinder", "box", "bedroom"))
        t = match_parameters(cq, lift(g, demo_registry), demo_lexicon)
        assert t.binding_map == {"v0": 0, "v1": 1, "v2": 2}

    def test_unbound_slot(self, demo_registry, demo_lexicon):
        g = ltl.parse_ltl("F ( holding_sphere & sphere_in_box )")
        cq = ContextualQuery("pickup", ("sphere",))
        with pytest.raises(UnboundSlot):
            match_parameters(cq, lift(g, demo_registry), demo_lexicon)

    def test_background_constant_folding(self, demo_registry, demo_lexicon):
        g = ltl.parse_ltl("F ( holding_sphere & sphere_in_box )")
        cq = ContextualQuery("pickup", ("sphere",))
        t = match_parameters(cq, lift(g, demo_registry), demo_lexicon,
                             background=frozenset({ObjectRef("box")}))
        constants = [s for atom in _slot_atoms(t.lifted) for s in atom.slots
                     if isinstance(s, Constant)]
        assert constants == [Constant(ObjectRef("box"))]
        grounded = instantiate(t, cq, demo_registry, demo_lexicon)
        assert grounded == g


def _slot_atoms(f):
    out = []
    def walk(g):
        if isinstance(g, SlotAtom):
            out.append(g)
        elif isinstance(g, (ltl.Not, ltl.Finally, ltl.Globally)):
            walk(g.child)
        elif isinstance(g, (ltl.And, ltl.Or, ltl.Until)):
            walk(g.left)
            walk(g.right)
    walk(f)
    return out


class TestLearnAndInstantiate:
    def test_navigation_round_trip(self, nav_reg, nav_lex):
        g = ltl.parse_ltl("F ( cvs & F ( park ) )")
        cq = ContextualQuery("navigate_two", ("cvs", "park"))
        t = learn_template(cq, g, nav_reg, nav_lex)
        assert instantiate(t, cq, nav_reg, nav_lex) == g

    def test_navigation_generalizes(self, nav_reg, nav_lex):
        g = ltl.parse_ltl("F ( cvs & F ( park ) )")
        t = learn_template(ContextualQuery("navigate_two", ("cvs", "park")), g, nav_reg, nav_lex)
        fresh = ContextualQuery("navigate_two", ("store", "museum"))
        assert instantiate(t, fresh, nav_reg, nav_lex) == ltl.parse_ltl("F ( store & F ( museum ) )")

    def test_pickup_single_slot(self, demo_registry, demo_lexicon):
        g = ltl.parse_ltl("F ( holding_sphere )")
        cq = ContextualQuery("pickup", ("sphere",))
        t = learn_template(cq, g, demo_registry, demo_lexicon)
        assert t.binding_map == {"v0": 0}
        fresh = ContextualQuery("pickup", ("cylinder",))
        assert instantiate(t, fresh, demo_registry, demo_lexicon) == ltl.parse_ltl("F ( holding_cylinder )")

    def test_pickup_colored_binding_order(self, homonym_world):
        lex = lexicon_from_world(homonym_world)
        reg = build_registry(homonym_world, lex)
        g = ltl.parse_ltl("F ( holding_ball & ball_is_orange )")
        cq = ContextualQuery("pickup_colored", ("orange", "ball"),
                             param_pos=("adjective", "noun"))
        t = learn_template(cq, g, reg, lex)
        # toy slot (v0, shared across both atoms) binds to parameter 1,
        # color slot (v1) to parameter 0
        assert t.binding_map == {"v0": 1, "v1": 0}
        shared = [a.slots[0] for a in _slot_atoms(t.lifted)]
        assert shared[0] == shared[1]

    def test_ship_round_trip_and_transfer(self, demo_registry, demo_lexicon):
        g = ltl.parse_ltl("F ( cylinder_in_box & F ( cylinder_in_box & box_in_bedroom ) )")
        cq = ContextualQuery("ship", ("cylinder", "box", "bedroom"))
        t = learn_template(cq, g, demo_registry, demo_lexicon)
        assert instantiate(t, cq, demo_registry, demo_lexicon) == g
        fresh = ContextualQuery("ship", ("sphere", "box", "kitchen"))
        assert instantiate(t, fresh, demo_registry, demo_lexicon) == ltl.parse_ltl(
            "F ( sphere_in_box & F ( sphere_in_box & box_in_kitchen ) )")

    def test_descriptor_mismatch(self, nav_reg, nav_lex):
        g = ltl.parse_ltl("F ( cvs )")
        t = learn_template(ContextualQuery("navigate_one", ("cvs",)), g, nav_reg, nav_lex)
        with pytest.raises(DescriptorMismatch):
            instantiate(t, ContextualQuery("navigate_two", ("cvs", "park")), nav_reg, nav_lex)

    def test_sort_mismatch(self, demo_registry, demo_lexicon):
        g = ltl.parse_ltl("F ( holding_sphere )")
        t = learn_template(ContextualQuery("pickup", ("sphere",)), g,
                           demo_registry, demo_lexicon)
        # "green" grounds to a color; the slot needs a toy
        with pytest.raises(SortMismatch):
            instantiate(t, ContextualQuery("pickup", ("green",)), demo_registry, demo_lexicon)

    def test_ambiguous_grounding_strict(self, homonym_world):
        lex = lexicon_from_world(homonym_world)
        reg = build_registry(homonym_world, lex)
        g = ltl.parse_ltl("F ( holding_orange )")
        cq = ContextualQuery("pickup", ("orange",))  # no POS metadata
        with pytest.raises(AmbiguousGrounding):
            learn_template(cq, g, reg, lex)

    def test_structure_preservation_random(self, nav_reg, nav_lex):
        rng = random.Random(11)
        rooms = ["cvs", "park", "store", "museum"]
        g = ltl.parse_ltl("F ( cvs & F ( park ) )")
        t = learn_template(ContextualQuery("navigate_two", ("cvs", "park")), g, nav_reg, nav_lex)
        for _ in range(50):
            pair = rng.sample(rooms, 2)
            out = instantiate(t, ContextualQuery("navigate_two", tuple(pair)), nav_reg, nav_lex)
            assert out == ltl.Finally(ltl.And(ltl.Atom(pair[0]),
                                              ltl.Finally(ltl.Atom(pair[1]))))
            assert ltl.atoms(out) == set(pair)


class TestLibrary:
    def test_empty_round_trip(self, tmp_path):
        path = tmp_path / "lib.json"
        save_library(TemplateLibrary(), path)
        assert load_library(path) == TemplateLibrary()

    def test_full_round_trip(self, library, tmp_path):
        path = tmp_path / "lib.json"
        save_library(library, path)
        again = load_library(path)
        assert again == library
        assert len(again) == 7

    def test_unknown_function_rejected(self, library, tmp_path):
        import json

        path = tmp_path / "lib.json"
        save_library(library, path)
        doc = json.loads(path.read_text())
        doc["templates"]["pickup"]["formula"]["children"][0]["function"] = "frobnicate"
        path.write_text(json.dumps(doc))
        with pytest.raises(CorruptLibrary):
            load_library(path)

    def test_bad_schema_version(self, tmp_path):
        path = tmp_path / "lib.json"
        path.write_text('{"schema_version": 99, "templates": {}}')
        with pytest.raises(CorruptLibrary):
            load_library(path)

    def test_not_json(self, tmp_path):
        path = tmp_path / "lib.json"
        path.write_text("not json")
        with pytest.raises(CorruptLibrary):
            load_library(path)

    def test_replacement_warns(self, library, caplog):
        import logging

        t = library.get("pickup")
        lib = TemplateLibrary({"pickup": t})
        with caplog.at_level(logging.WARNING):
            lib.add(t)
        assert "replacing" in caplog.text
