import pytest

from polartree.descriptions import (
    DEFAULT,
    EMPTY,
    FULL,
    PTD,
    DescNode,
    Dom,
    FeatureState,
    LPrec,
    MergeError,
    NodeType,
    Prec,
    active_polarity_count,
    candidate_merges,
    canonical_key,
    export_ptd,
    is_saturated,
    juxtapose,
    merge_nodes,
    node_type_combine,
    origin_id,
    saturation_status,
    validate_iptd,
    validate_ptd,
)
from polartree.features import Polarity


def mk(node_id, polarity=None, values=("x",), ntype=DEFAULT, name="cat", coref=()):
    feats = {}
    if polarity is not None:
        feats[name] = FeatureState(name, (polarity,), frozenset(values), frozenset(coref))
    return DescNode(node_id, feats, ntype, frozenset({("1", node_id)}))


def test_node_type_combination_table():
    assert node_type_combine(DEFAULT, FULL) == FULL
    assert node_type_combine(FULL, NodeType.anchor("w")) == NodeType.anchor("w")
    assert node_type_combine(EMPTY, EMPTY) == EMPTY
    with pytest.raises(MergeError) as e:
        node_type_combine(FULL, EMPTY)
    assert e.value.kind == "TYPE_CLASH"
    with pytest.raises(MergeError) as e:
        node_type_combine(NodeType.anchor("a"), NodeType.anchor("b"))
    assert e.value.kind == "ANCHOR_CLASH"
    with pytest.raises(MergeError) as e:
        node_type_combine(NodeType.anchor("a"), EMPTY)
    assert e.value.kind == "TYPE_CLASH"


def test_origin_id_is_sorted_and_stable():
    assert origin_id({("2", "A"), ("3", "A")}) == "A.2|A.3"


def test_juxtapose_rejects_overlap():
    p = PTD({"A": mk("A")})
    with pytest.raises(ValueError):
        juxtapose([p, p])


def test_merge_dual_pair_neutralizes():
    ptd = juxtapose(
        [
            PTD({"A": mk("A", Polarity.POSITIVE)}),
            PTD({"B": mk("B", Polarity.NEGATIVE)}),
        ]
    )
    assert active_polarity_count(ptd) == 2
    assert candidate_merges(ptd) == [("A", "B", "cat", "dual")]
    merged = merge_nodes(ptd, "A", "B")
    assert is_saturated(merged)
    assert active_polarity_count(merged) == 0
    (nid,) = merged.nodes
    assert nid == "A.1|B.1"


def test_merge_value_intersection_and_clash():
    ptd = juxtapose(
        [
            PTD({"A": mk("A", Polarity.POSITIVE, ("x", "y"))}),
            PTD({"B": mk("B", Polarity.NEGATIVE, ("y", "z"))}),
        ]
    )
    merged = merge_nodes(ptd, "A", "B")
    assert next(iter(merged.nodes.values())).features["cat"].values == frozenset({"y"})

    clash = juxtapose(
        [
            PTD({"A": mk("A", Polarity.POSITIVE, ("x",))}),
            PTD({"B": mk("B", Polarity.NEGATIVE, ("z",))}),
        ]
    )
    with pytest.raises(MergeError) as e:
        merge_nodes(clash, "A", "B")
    assert e.value.kind == "VALUE_CLASH"


def test_merge_polarity_clash():
    ptd = juxtapose(
        [
            PTD({"A": mk("A", Polarity.POSITIVE)}),
            PTD({"B": mk("B", Polarity.POSITIVE)}),
        ]
    )
    with pytest.raises(MergeError) as e:
        merge_nodes(ptd, "A", "B")
    assert e.value.kind == "POLARITY_CLASH"


def test_merge_propagates_mother_merging():
    # two dominance mothers of one daughter must themselves merge
    left = PTD(
        {"M": mk("M", Polarity.POSITIVE, name="f"), "D": mk("D", Polarity.POSITIVE)},
        frozenset({Dom("M", "D")}),
    )
    right = PTD(
        {"N": mk("N", Polarity.NEGATIVE, name="f"), "E": mk("E", Polarity.NEGATIVE)},
        frozenset({Dom("N", "E")}),
    )
    merged = merge_nodes(juxtapose([left, right]), "D", "E")
    assert len(merged.nodes) == 2
    assert is_saturated(merged)


def test_merge_detects_dominance_cycle():
    left = PTD({"A": mk("A", Polarity.POSITIVE), "B": mk("B")}, frozenset({Dom("A", "B")}))
    right = PTD({"C": mk("C", Polarity.NEGATIVE), "D": mk("D")}, frozenset({Dom("C", "D")}))
    ptd = juxtapose([left, right])
    # identify A with D and B with C: A > B=C > D=A is a cycle
    step = merge_nodes(ptd, "A", "D")
    with pytest.raises(MergeError) as e:
        merge_nodes(step, "B", "C")
    assert e.value.kind == "STRUCT_CLASH"


def test_merge_detects_order_cycle():
    shared = PTD(
        {
            "M": mk("M"),
            "A": mk("A", Polarity.POSITIVE),
            "B": mk("B", Polarity.POSITIVE),
        },
        frozenset({Dom("M", "A"), Dom("M", "B"), LPrec("A", "B")}),
    )
    other = PTD(
        {
            "N": mk("N"),
            "C": mk("C", Polarity.NEGATIVE),
            "D": mk("D", Polarity.NEGATIVE),
        },
        frozenset({Dom("N", "C"), Dom("N", "D"), LPrec("C", "D")}),
    )
    ptd = juxtapose([shared, other])
    step = merge_nodes(ptd, "A", "D")
    with pytest.raises(MergeError) as e:
        merge_nodes(step, "B", "C")
    assert e.value.kind == "ORDER_CLASH"


def test_virtual_candidate_listed():
    ptd = juxtapose(
        [
            PTD({"V": mk("V", Polarity.VIRTUAL)}),
            PTD({"C": mk("C", Polarity.NEUTRAL)}),
        ]
    )
    assert ("C", "V", "cat", "virtual") in candidate_merges(ptd) or (
        "V",
        "C",
        "cat",
        "virtual",
    ) in candidate_merges(ptd)


def test_saturation_status_lists_unsaturated_features():
    ptd = PTD({"A": mk("A", Polarity.POSITIVE)})
    status = saturation_status(ptd)
    assert [(nid, name) for nid, name, _ in status] == [("A", "cat")]
    assert not is_saturated(ptd)


def test_canonical_key_invariant_under_merge_order():
    parts = [
        PTD({"A": mk("A", Polarity.POSITIVE, name="f")}),
        PTD({"B": mk("B", Polarity.NEGATIVE, name="f")}),
        PTD({"C": mk("C", Polarity.POSITIVE, name="g")}),
        PTD({"D": mk("D", Polarity.NEGATIVE, name="g")}),
    ]
    ptd = juxtapose(parts)
    one = merge_nodes(merge_nodes(ptd, "A", "B"), "C", "D")
    two = merge_nodes(merge_nodes(ptd, "C", "D"), "A", "B")
    assert canonical_key(one) == canonical_key(two)


def test_validate_ptd_flags_dangling_endpoint_and_prec_without_mother():
    ptd = PTD({"A": mk("A")}, frozenset({Dom("A", "missing")}))
    tags = {t for t, _, _ in validate_ptd(ptd).violations}
    assert tags == {"UNKNOWN_NODE"}

    no_mother = PTD({"A": mk("A"), "B": mk("B")}, frozenset({Prec("A", "B")}))
    tags = {t for t, _, _ in validate_ptd(no_mother).violations}
    assert tags == {"NO_COMMON_MOTHER"}


def test_validate_iptd_requires_single_tree():
    forest = PTD({"A": mk("A"), "B": mk("B")})
    tags = {t for t, _, _ in validate_iptd(forest).violations}
    assert tags == {"NOT_A_TREE"}


def test_export_ptd_is_plain_data():
    ptd = PTD({"A": mk("A", Polarity.POSITIVE, coref=("c@1",))}, frozenset())
    doc = export_ptd(ptd)
    assert doc["nodes"][0]["id"] == "A"
    assert doc["nodes"][0]["features"][0]["polarities"] == ["->"]
    assert doc["nodes"][0]["features"][0]["corefs"] == ["c@1"]
    import json

    json.dumps(doc)  # must serialize untouched
