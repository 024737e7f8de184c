import pytest
from hypothesis import given, settings

from conftest import P, entries_as_tuples
from oracle import oracle_effective_set
from treegen import all_paths, tree_with_registry

from lexitree.model import (
    AltGroup,
    Atomic,
    Composite,
    DependencyRule,
    DependencyViolation,
    FeatureClass,
    FeatureClassRegistry,
    FeatureName,
    Node,
    OverwriteConflict,
    OverwriteViolation,
    PathOutOfRange,
    Property,
    UnexpandedAlternatives,
    attach_property,
    check_consistency,
    effective_set,
    enumerate_traversals,
    partial_traversals,
    resolve_path,
    values_equal,
)

# ---------------------------------------------------------------------------
# Types


def test_feature_names_fold_case_and_compare_equal():
    assert FeatureName("Orth") == FeatureName("orth") == "orth"


@pytest.mark.parametrize("bad", ["", "two words", "UPPER SPACE", "-lead", "a_b", "café"])
def test_invalid_feature_names_rejected(bad):
    with pytest.raises(ValueError):
        FeatureName(bad)


def test_property_rejects_duplicate_attr_names():
    with pytest.raises(ValueError):
        Property("xr", "x", (("type", "a"), ("type", "b")))


def test_property_rejects_unusable_attr_names():
    with pytest.raises(ValueError):
        Property("xr", "x", (("bad name", "a"),))
    with pytest.raises(ValueError):
        Property("xr", "x", (("", "a"),))


def test_alt_group_needs_two_nonempty_alternatives():
    with pytest.raises(ValueError):
        AltGroup([[P("pos", "n")]])
    with pytest.raises(ValueError):
        AltGroup([[P("pos", "n")], []])


def test_registry_rejects_non_overwriting_governor():
    with pytest.raises(ValueError):
        FeatureClassRegistry({"gen": FeatureClass.LOCAL}, [DependencyRule("x", "gen", "n")])


def test_values_compare_normalized():
    assert values_equal(Atomic("  café "), Atomic("café"))
    assert not values_equal(Atomic("a"), Composite([P("a", "b")]))
    assert values_equal(
        Composite([P("ex", "x ", n="1")]),
        Composite([P("ex", "x", n="1")]),
    )


# ---------------------------------------------------------------------------
# classify


def test_classify_default_registry(registry):
    assert registry.classify("orth") is FeatureClass.OVERWRITING
    assert registry.classify("def") is FeatureClass.CUMULATIVE
    assert registry.classify("ex") is FeatureClass.LOCAL


def test_classify_falls_back_to_default_class():
    empty = FeatureClassRegistry()
    assert empty.classify("zzz") is FeatureClass.LOCAL


def test_classify_warns_once_per_unregistered_feature(caplog):
    empty = FeatureClassRegistry()
    with caplog.at_level("WARNING", logger="lexitree.model"):
        empty.classify("zzz")
        empty.classify("zzz")
    assert sum("zzz" in r.message for r in caplog.records) == 1


# ---------------------------------------------------------------------------
# attach_property


def test_attach_to_empty_leaf(registry):
    node = attach_property(Node(), P("pos", "noun"), registry)
    assert node.properties == (P("pos", "noun"),)


def test_attach_second_overwriting_value_rejected(registry):
    node = Node([P("orth", "gendarme")])
    with pytest.raises(OverwriteConflict):
        attach_property(node, P("orth", "le gendarme"), registry)


def test_attach_cumulative_values_accumulate(registry):
    node = Node([P("def", "d1")])
    node = attach_property(node, P("def", "d2"), registry)
    assert [str(p.feature) for p in node.properties] == ["def", "def"]


# ---------------------------------------------------------------------------
# effective_set on the worked entries

GENDARME_ROOT = [
    ("orth", "gendarme", (), 0),
    ("pron", "...", (), 0),
]
GENDARME_L2 = GENDARME_ROOT + [
    ("pos", "noun", (), 1),
    ("gen", "mas", (), 1),
    ("etym", "XV°; gendarmes; de gens, et arme", (), 1),
]
GENDARME_L3 = GENDARME_ROOT + [
    ("pos", "noun", (), 1),
    ("gen", "mas", (), 1),
    ("etym", "1790", (), 2),
    ("time", "modern", (), 2),
    ("def", "Militaire appartenant à un corps ...", (), 2),
    ("xr", "Gendarmerie", (("type", "see"),), 2),
    ("xr", "Marechaussée", (("type", "see"),), 2),
    ("brack", "[ex : Brigade de gendarmes, xr : brigadier]", (), 2),
    ("ex", "Etre arrêté par les gendarmes.", (), 2),
    ("ex", "Jouer au gendarme et au voleur.", (), 2),
]
GENDARME_LEAF = [
    ("pron", "...", (), 0),
    ("pos", "noun", (), 1),
    ("gen", "mas", (), 1),
    ("etym", "1790", (), 2),
    ("time", "modern", (), 2),
    ("def", "Militaire appartenant à un corps ...", (), 2),
    ("orth", "le gendarme", (), 3),
    ("def", "symbole de la force publique, de l'ordre.", (), 3),
    ("ex", "La peur du gendarme", (), 3),
]

OVERDRESS_VERB = [
    ("orth", "overdress", (), 0),
    ("pos", "verb", (), 1),
    ("pron", "pron1", (), 1),
    ("def", "To dress (oneself or another) too elaborately or finely", (), 1),
]
OVERDRESS_NOUN = [
    ("orth", "overdress", (), 0),
    ("pos", "noun", (), 1),
    ("pron", "pron2", (), 1),
    ("def", "A dress that may be worn over a jumper, blouse, etc.", (), 1),
]


@pytest.mark.parametrize(
    "path, expected",
    [
        ((), GENDARME_ROOT),
        ((0,), GENDARME_L2),
        ((0, 0), GENDARME_L3),
        ((0, 0, 0), GENDARME_LEAF),
    ],
    ids=["root", "grammatical", "sense", "subentry"],
)
def test_gendarme_trace(gendarme, registry, path, expected):
    assert entries_as_tuples(effective_set(gendarme, path, registry)) == expected


def test_gendarme_trace_agrees_with_oracle(gendarme, registry):
    for path in [(), (0,), (0, 0), (0, 0, 0)]:
        eff = effective_set(gendarme, path, registry)
        assert list(eff.items()) == oracle_effective_set(gendarme, path, registry)


def test_overdress_traversal_sets(overdress, registry):
    assert entries_as_tuples(effective_set(overdress, (0,), registry)) == OVERDRESS_VERB
    assert entries_as_tuples(effective_set(overdress, (1,), registry)) == OVERDRESS_NOUN


def test_single_leaf_effective_set_is_its_own_properties(registry):
    leaf = Node([P("orth", "solo"), P("ex", "an example")])
    eff = effective_set(leaf, (), registry)
    assert eff.entries == leaf.properties
    assert eff.depths == (0, 0)


def test_effective_set_ignores_unexpanded_alternatives(registry, pinna):
    eff = effective_set(pinna, (0,), registry)
    assert [str(p.feature) for p in eff.entries] == ["orth", "pron", "pos"]


def test_effective_set_bad_path(overdress, registry):
    with pytest.raises(PathOutOfRange):
        effective_set(overdress, (2,), registry)
    with pytest.raises(PathOutOfRange):
        effective_set(overdress, (0, 0), registry)


def test_effective_set_rejects_doubled_overwriting_feature(registry):
    bad = Node([P("orth", "one"), P("orth", "two")])
    with pytest.raises(OverwriteConflict):
        effective_set(bad, (), registry)


def test_dependency_blocking_removes_inherited_dependent():
    registry = FeatureClassRegistry(
        {"pos": FeatureClass.OVERWRITING, "gen": FeatureClass.OVERWRITING},
        [DependencyRule("gen", "pos", "n")],
    )
    tree = Node([P("pos", "n"), P("gen", "f")], children=[Node([P("pos", "v")])])
    child = entries_as_tuples(effective_set(tree, (0,), registry))
    assert child == [("pos", "v", (), 1)]
    root = entries_as_tuples(effective_set(tree, (), registry))
    assert root == [("pos", "n", (), 0), ("gen", "f", (), 0)]


def test_redundant_overwrite_keeps_position_and_does_not_block():
    registry = FeatureClassRegistry(
        {"pos": FeatureClass.OVERWRITING, "gen": FeatureClass.OVERWRITING},
        [DependencyRule("gen", "pos", "n")],
    )
    # re-specifying pos=n at the child is a no-op, so the inherited gen survives
    tree = Node([P("pos", "n"), P("gen", "f")], children=[Node([P("pos", "n")])])
    child = entries_as_tuples(effective_set(tree, (0,), registry))
    assert child == [("pos", "n", (), 0), ("gen", "f", (), 0)]


# ---------------------------------------------------------------------------
# check_consistency


def test_gendarme_is_consistent(gendarme, registry):
    assert check_consistency(gendarme, registry) == []


def test_empty_leaf_is_consistent(registry):
    assert check_consistency(Node(), registry) == []


def test_doubled_overwriting_feature_reported(registry):
    bad = Node(children=[Node([P("orth", "one"), P("orth", "two")])])
    violations = check_consistency(bad, registry)
    assert len(violations) == 1
    violation = violations[0]
    assert isinstance(violation, OverwriteViolation)
    assert violation.path == (0,)
    assert violation.feature == "orth"


def test_dependent_under_wrong_governor_reported():
    registry = FeatureClassRegistry(
        {"pos": FeatureClass.OVERWRITING, "gen": FeatureClass.OVERWRITING},
        [DependencyRule("gen", "pos", "n")],
    )
    bad = Node([P("pos", "v"), P("gen", "f")])
    violations = check_consistency(bad, registry)
    assert len(violations) == 1
    violation = violations[0]
    assert isinstance(violation, DependencyViolation)
    assert violation.path == ()
    assert (violation.dependent, violation.actual_value) == ("gen", "v")


def test_dependent_with_absent_governor_not_reported():
    registry = FeatureClassRegistry(
        {"pos": FeatureClass.OVERWRITING, "gen": FeatureClass.OVERWRITING},
        [DependencyRule("gen", "pos", "n")],
    )
    assert check_consistency(Node([P("gen", "f")]), registry) == []


def test_inherited_governor_covers_descendants():
    registry = FeatureClassRegistry(
        {"pos": FeatureClass.OVERWRITING, "gen": FeatureClass.OVERWRITING},
        [DependencyRule("gen", "pos", "n")],
    )
    good = Node([P("pos", "n")], children=[Node([P("gen", "f")])])
    assert check_consistency(good, registry) == []
    bad = Node([P("pos", "v")], children=[Node([P("gen", "f")])])
    assert [type(v) for v in check_consistency(bad, registry)] == [DependencyViolation]


# ---------------------------------------------------------------------------
# traversals


def test_overdress_full_traversals(overdress):
    assert enumerate_traversals(overdress) == [(0,), (1,)]


def test_disproof_has_one_traversal_per_sense(disproof):
    assert enumerate_traversals(disproof) == [(0,), (1,)]


def test_single_leaf_traversals():
    assert enumerate_traversals(Node()) == [()]
    assert partial_traversals(Node()) == [()]


def test_overdress_partial_traversals(overdress):
    assert partial_traversals(overdress) == [(), (0,), (1,)]


def test_gendarme_partial_traversals(gendarme):
    assert partial_traversals(gendarme) == [(), (0,), (0, 0), (0, 0, 0)]


def test_traversals_refuse_unexpanded_alternatives(pinna):
    with pytest.raises(UnexpandedAlternatives):
        enumerate_traversals(pinna)
    with pytest.raises(UnexpandedAlternatives):
        partial_traversals(pinna)


# ---------------------------------------------------------------------------
# Properties


@given(tree_with_registry())
def test_effective_set_matches_oracle(tree_and_registry):
    tree, registry = tree_and_registry
    for path in all_paths(tree):
        eff = effective_set(tree, path, registry)
        assert list(eff.items()) == oracle_effective_set(tree, path, registry)


@given(tree_with_registry())
def test_overwriting_features_occur_at_most_once(tree_and_registry):
    tree, registry = tree_and_registry
    for path in all_paths(tree):
        eff = effective_set(tree, path, registry)
        overwriting = [
            str(p.feature)
            for p in eff.entries
            if registry.classify(p.feature) is FeatureClass.OVERWRITING
        ]
        assert len(overwriting) == len(set(overwriting))


def _governor_touched(tree, q, start_depth, governor):
    """True when `governor` appears at any node of q strictly below start_depth."""
    node = tree
    for depth, index in enumerate(q, start=1):
        node = node.children[index]
        if depth > start_depth and any(p.feature == governor for p in node.properties):
            return True
    return False


@given(tree_with_registry())
def test_cumulative_entries_persist_down_prefixes(tree_and_registry):
    tree, registry = tree_and_registry
    for q in all_paths(tree):
        eff_q = effective_set(tree, q, registry)
        for cut in range(len(q)):
            p = q[:cut]
            for prop, depth in effective_set(tree, p, registry).items():
                if registry.classify(prop.feature) is not FeatureClass.CUMULATIVE:
                    continue
                governors = [r.governor for r in registry.rules if r.dependent == prop.feature]
                if any(_governor_touched(tree, q, cut, g) for g in governors):
                    continue  # the governor moved; persistence is not promised
                assert (prop, depth) in list(eff_q.items())


@given(tree_with_registry())
def test_local_properties_confined_to_their_node(tree_and_registry):
    tree, registry = tree_and_registry
    for path in all_paths(tree):
        eff = effective_set(tree, path, registry)
        endpoint = resolve_path(tree, path)
        local = [(p, d) for p, d in eff.items() if registry.classify(p.feature) is FeatureClass.LOCAL]
        assert all(d == len(path) for _, d in local)
        assert [p for p, _ in local] == [
            p for p in endpoint.properties if registry.classify(p.feature) is FeatureClass.LOCAL
        ]


def _replace_node(root, path, new_node):
    if not path:
        return new_node
    children = list(root.children)
    children[path[0]] = _replace_node(children[path[0]], path[1:], new_node)
    return Node(root.properties, root.alt_groups, children)


@given(tree_with_registry())
def test_redundant_overwrite_is_a_no_op(tree_and_registry):
    tree, registry = tree_and_registry
    paths = all_paths(tree)
    for path in paths:
        if not path:
            continue
        endpoint = resolve_path(tree, path)
        eff = effective_set(tree, path, registry)
        for prop, depth in eff.items():
            if registry.classify(prop.feature) is not FeatureClass.OVERWRITING:
                continue
            if depth == len(path):
                continue
            if any(p.feature == prop.feature for p in endpoint.properties):
                continue
            modified = _replace_node(tree, path, attach_property(endpoint, prop, registry))
            for q in paths:
                assert list(effective_set(modified, q, registry).items()) == list(
                    effective_set(tree, q, registry).items()
                )


@given(tree_with_registry())
def test_blocked_dependents_never_survive(tree_and_registry):
    tree, registry = tree_and_registry
    for q in all_paths(tree):
        eff = effective_set(tree, q, registry)
        chain = [tree]
        for index in q:
            chain.append(chain[-1].children[index])
        for rule in registry.rules:
            # replay the governor's value to find the deepest blocking point
            current = None
            block_depth = None
            for depth, node in enumerate(chain):
                for prop in node.properties:
                    if prop.feature != rule.governor:
                        continue
                    if current is not None and values_equal(current, prop.value):
                        continue
                    current = prop.value
                    if not values_equal(prop.value, Atomic(rule.required_value)):
                        block_depth = depth
            if block_depth is None:
                continue
            for prop, depth in eff.items():
                if prop.feature == rule.dependent:
                    assert depth >= block_depth


@given(tree_with_registry())
@settings(max_examples=60)
def test_attach_built_trees_have_no_overwrite_violations(tree_and_registry):
    tree, registry = tree_and_registry
    assert not any(isinstance(v, OverwriteViolation) for v in check_consistency(tree, registry))


@given(tree_with_registry())
@settings(max_examples=60)
def test_rule_free_registries_validate_clean(tree_and_registry):
    tree, registry = tree_and_registry
    rule_free = FeatureClassRegistry(registry.classes, ())
    assert check_consistency(tree, rule_free) == []
