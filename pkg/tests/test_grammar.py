import json

import pytest

from polartree.features import FeatureSignature, Polarity
from polartree.grammar import (
    GrammarError,
    ParseError,
    ValidationError,
    anchor,
    build_selection_graph,
    dumps_grammar,
    loads_grammar,
    loads_lexicon,
    parse_feature,
    tokenize,
    unparse_feature,
)

from .conftest import fixture_pair


@pytest.fixture
def sig():
    return FeatureSignature({"cat": frozenset({"s", "np", "v"})})


def test_parse_feature_polarities_and_values(sig):
    feat = parse_feature(sig, "cat", "-> np|v")
    assert feat.polarity is Polarity.POSITIVE
    assert feat.values == frozenset({"np", "v"})
    assert parse_feature(sig, "cat", "<- s").polarity is Polarity.NEGATIVE
    assert parse_feature(sig, "cat", "~ s").polarity is Polarity.VIRTUAL
    assert parse_feature(sig, "cat", "= s").polarity is Polarity.NEUTRAL


def test_parse_feature_wildcard_and_coref(sig):
    feat = parse_feature(sig, "cat", "= <tag> ?")
    assert feat.values == frozenset({"s", "np", "v"})
    assert feat.coref == "tag"


def test_parse_feature_round_trip(sig):
    for spec in ["-> np|v", "<- s", "= <t> ?", "~ np"]:
        feat = parse_feature(sig, "cat", spec)
        assert parse_feature(sig, "cat", unparse_feature(feat, sig)) == feat


def test_parse_feature_rejects_unknown_value(sig):
    from polartree.features import SignatureError

    with pytest.raises(SignatureError):
        parse_feature(sig, "cat", "-> adj")


def test_grammar_round_trip():
    grammar, _ = fixture_pair("clitic")
    again = loads_grammar(dumps_grammar(grammar))
    assert dumps_grammar(again) == dumps_grammar(grammar)


def test_grammar_rejects_malformed_template():
    doc = {
        "signature": {"cat": ["s"]},
        "templates": {"bad": {"anchor": "X", "nodes": {"X": {}, "Y": {}}, "relations": []}},
    }
    with pytest.raises(ValidationError):
        loads_grammar(json.dumps(doc))  # Y unreachable: not a tree


def test_lexicon_validates_against_signature(sig):
    with pytest.raises(ValidationError):
        loads_lexicon(json.dumps({"words": {"w": [{"cat": "adj"}]}}), sig)
    lex = loads_lexicon(json.dumps({"words": {"w": [{"cat": "np"}]}}), sig)
    assert lex.usages("w") == ({"cat": "np"},)


def test_tokenize_linear_sentence():
    tg = tokenize("jean la voit .")
    words = sorted((e.src, e.dst, e.word) for e in tg.edges)
    assert words == [(0, 1, "jean"), (1, 2, "la"), (2, 3, "voit"), (3, 4, ".")]
    assert [[e.word for e in p] for p in tg.paths()] == [["jean", "la", "voit", "."]]


def test_tokenize_contraction_branches():
    tg = tokenize("qu'aime marie", {"qu'aime": ["qu'", "aime"]})
    paths = sorted([e.word for e in p] for p in tg.paths())
    assert paths == [["qu'", "aime", "marie"], ["qu'aime", "marie"]]


def test_tokenize_rejects_empty():
    from polartree.grammar import EmptyInput

    with pytest.raises(EmptyInput):
        tokenize("   ")


def test_anchor_narrows_interface_and_rejects_mismatch():
    grammar, _ = fixture_pair("clitic")
    det = grammar.templates["determiner"]
    assert anchor(det, "la", {"cat": "det"}, "1") is not None
    assert anchor(det, "la", {"cat": "clit"}, "1") is None


def test_anchor_instances_get_fresh_ids():
    grammar, _ = fixture_pair("clitic")
    inst = anchor(grammar.templates["proper-noun"], "jean", {"cat": "np"}, "7")
    assert set(inst.ptd.nodes) == {"B.7", "C.7"}
    assert inst.ptd.nodes["C.7"].ntype.kind == "anchor"
    assert inst.ptd.nodes["C.7"].ntype.phon == "jean"


def test_selection_graph_counts_and_unknown_words():
    grammar, lexicon = fixture_pair("clitic")
    tg = tokenize("jean la voit .", grammar.contractions)
    sg = build_selection_graph(tg, lexicon, grammar)
    # "la" anchors as clitic and determiner: two full selections
    assert sg.path_count() == 2
    assert len(sg.selections()) == 2
    assert sg.unknown_words == ()

    tg = tokenize("jean mange", grammar.contractions)
    sg = build_selection_graph(tg, lexicon, grammar)
    assert sg.unknown_words == ("mange",)
    assert sg.selections() == []
