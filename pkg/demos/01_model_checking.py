"""Model checking from first principles.

A tree description is a set of polarized nodes plus structural
constraints; a syntactic tree is a *model* of a description multiset
when some interpretation maps every description node onto a tree node so
that all adequacy conditions hold.  This demo builds both objects by
hand and asks the checker to explain its verdicts.

Run:  python3 demos/01_model_checking.py
"""

from polartree.descriptions import (
    DEFAULT,
    PTD,
    DescNode,
    Dom,
    FeatureState,
    LDom,
    NodeType,
)
from polartree.features import Polarity, PolarizedFeature, PolarizedFeatureStructure
from polartree.trees import check_model, find_interpretations, leaf, node, to_bracketed


def desc_node(node_id, polarity, values, ntype=DEFAULT):
    feats = {"cat": FeatureState("cat", (polarity,), frozenset(values))}
    return DescNode(node_id, feats, ntype, frozenset({("1", node_id)}))


def main() -> None:
    # an ordered tree for "jean dort": s over an np and the verb
    tree = node(
        [
            node([leaf("jean", id="leaf-jean")], {"cat": "np"}, id="np"),
            leaf("dort", {"cat": "v"}, id="v"),
        ],
        {"cat": "s"},
        id="root",
    )
    print("tree:", to_bracketed(tree))

    # one description: a sentence node dominating an np and an anchored verb
    description = PTD(
        {
            "S": desc_node("S", Polarity.NEUTRAL, {"s"}),
            "N": desc_node("N", Polarity.NEUTRAL, {"np"}),
            "J": DescNode("J", {}, NodeType.anchor("jean"), frozenset({("1", "J")})),
            "V": desc_node("V", Polarity.NEUTRAL, {"v"}, NodeType.anchor("dort")),
        },
        frozenset({Dom("S", "N"), Dom("S", "V"), Dom("N", "J")}),
    )

    good = {"S.1": "root", "N.1": "np", "J.1": "leaf-jean", "V.1": "v"}
    verdict = check_model(tree, [description], good)
    print("\ncorrect interpretation ->", "model" if verdict.ok else "not a model")

    # swap two images and watch the conditions fail, each tagged
    bad = dict(good, **{"N.1": "v", "V.1": "np"})
    verdict = check_model(tree, [description], bad)
    print("\nswapped interpretation violates:")
    for tag, ids, message in verdict.violations:
        print(f"  {tag:9s} {list(ids)}: {message}")

    # the exhaustive search recovers exactly the one good interpretation
    print("\nall interpretations found:", find_interpretations(tree, [description]))

    # large dominance carries a filter over the whole path: adding a
    # non-np/s node between S and J breaks it
    filt = PolarizedFeatureStructure.of(
        PolarizedFeature("cat", Polarity.NEUTRAL, frozenset({"s", "np"}))
    )
    filtered = PTD(dict(description.nodes), frozenset({LDom("S", "J", filt), Dom("S", "N"), Dom("S", "V"), Dom("N", "J")}))
    print(
        "\nwith a path filter cat: s|np the same map is",
        "a model" if check_model(tree, [filtered], good).ok else "not a model",
    )


if __name__ == "__main__":
    main()
