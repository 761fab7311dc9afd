import random

import pytest

from polartree.descriptions import (
    DEFAULT,
    EMPTY,
    FULL,
    PTD,
    DescNode,
    Dom,
    FeatureState,
    LDom,
    NodeType,
    Prec,
)
from polartree.features import (
    Polarity,
    PolarizedFeature,
    PolarizedFeatureStructure,
)
from polartree.trees import (
    NotAncestorError,
    check_model,
    find_interpretations,
    from_dict,
    leaf,
    loads,
    node,
    path,
    phonological_projection,
    to_bracketed,
    to_dict,
)

from .oracles import naive_check, random_instance


def small_tree():
    return node(
        [
            node([leaf("jean", id="l1")], {"cat": "np"}, id="n1"),
            leaf("dort", {"cat": "v"}, id="l2"),
            leaf("", id="l3"),
        ],
        {"cat": "s"},
        id="r",
    )


def test_leaf_invariant():
    with pytest.raises(ValueError):
        node([], {"cat": "s"})  # internal node needs children
    with pytest.raises(ValueError):
        from polartree.trees import TreeNode

        TreeNode({}, (leaf("x"),), "y")  # children plus phon


def test_phonological_projection_skips_empty_leaves():
    assert phonological_projection(small_tree()) == ["jean", "dort"]


def test_path_inclusive_and_failure():
    tree = small_tree()
    np_node = tree.children[0]
    word = np_node.children[0]
    assert path(tree, word) == [tree, np_node, word]
    assert path(tree, tree) == [tree]
    with pytest.raises(NotAncestorError):
        path(np_node, tree.children[1])


def test_serialization_round_trip():
    tree = small_tree()
    assert from_dict(to_dict(tree)) == tree
    assert loads(__import__("json").dumps(to_dict(tree))) == tree
    assert to_bracketed(tree) == "(cat=s (cat=np (<jean>)) (cat=v <dort>) (<eps>))"


def _single(node_id, polarity, values, ntype=DEFAULT, name="cat"):
    return DescNode(
        node_id,
        {name: FeatureState(name, (polarity,), frozenset(values))},
        ntype,
        frozenset({("1", node_id)}),
    )


def test_check_model_accepts_planted_example():
    tree = node(
        [leaf("w", {"cat": "np"}, id="l")],
        {"cat": "s"},
        id="r",
    )
    desc = PTD(
        {
            "A": _single("A", Polarity.NEUTRAL, {"s"}),
            "B": _single("B", Polarity.NEUTRAL, {"np"}, NodeType.anchor("w")),
        },
        frozenset({Dom("A", "B")}),
    )
    verdict = check_model(tree, [desc], {"A.1": "r", "B.1": "l"})
    assert verdict.ok, verdict.violations


def test_check_model_flags_wrong_dom_and_feature():
    tree = node([leaf("w", {"cat": "np"}, id="l")], {"cat": "s"}, id="r")
    desc = PTD(
        {
            "A": _single("A", Polarity.NEUTRAL, {"np"}),  # wrong value for the root
            "B": _single("B", Polarity.NEUTRAL, {"np"}, NodeType.anchor("w")),
        },
        frozenset({Dom("B", "A")}),  # inverted dominance
    )
    verdict = check_model(tree, [desc], {"A.1": "r", "B.1": "l"})
    tags = {t for t, _, _ in verdict.violations}
    assert "DOM" in tags and "FEAT" in tags


def test_check_model_ldom_filter_over_path():
    tree = node(
        [node([leaf("w", {"cat": "np"}, id="l")], {"cat": "v"}, id="m")],
        {"cat": "s"},
        id="r",
    )
    filt = PolarizedFeatureStructure.of(
        PolarizedFeature("cat", Polarity.NEUTRAL, frozenset({"s", "np"}))
    )
    desc = PTD(
        {
            "A": _single("A", Polarity.NEUTRAL, {"s"}),
            "B": _single("B", Polarity.NEUTRAL, {"np"}, NodeType.anchor("w")),
        },
        frozenset({LDom("A", "B", filt)}),
    )
    verdict = check_model(tree, [desc], {"A.1": "r", "B.1": "l"})
    # the intermediate cat=v node is on the dominance path and fails the filter
    assert any(t == "LDOM" for t, _, _ in verdict.violations)
    # MIN-EDGE is also violated: no dominance backs the tree edges
    assert any(t == "MIN-EDGE" for t, _, _ in verdict.violations)


def test_check_model_minimality_surjective():
    tree = node([leaf("w", {}, id="l"), leaf("", id="l2")], {}, id="r")
    desc = PTD(
        {"A": _single("A", Polarity.NEUTRAL, {"s"}), "B": DescNode("B", {}, NodeType.anchor("w"), frozenset({("1", "B")}))},
        frozenset({Dom("A", "B")}),
    )
    verdict = check_model(tree, [desc], {"A.1": "r", "B.1": "l"})
    assert ("MIN-SURJ", ("l2",), "tree node has no preimage") in verdict.violations


def test_find_interpretations_matches_direct_check():
    tree = node([leaf("w", {}, id="l")], {}, id="r")
    desc = PTD(
        {"A": DescNode("A", {}, DEFAULT, frozenset({("1", "A")})), "B": DescNode("B", {}, NodeType.anchor("w"), frozenset({("1", "B")}))},
        frozenset({Dom("A", "B")}),
    )
    found = find_interpretations(tree, [desc])
    assert found == [{"A.1": "r", "B.1": "l"}]


def test_check_model_agrees_with_naive_oracle_smoke():
    rng = random.Random(7)
    for _ in range(40):
        tree, descriptions, interpretation = random_instance(rng)
        verdict = check_model(tree, descriptions, interpretation)
        assert verdict.ok == (not naive_check(tree, descriptions, interpretation))
