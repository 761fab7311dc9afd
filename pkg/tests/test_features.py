import pytest

from polartree.features import (
    FeatureSignature,
    PolarizedFeature,
    PolarizedFeatureStructure,
    Polarity,
    SignatureError,
    ValueClash,
    compatible,
    filtering_structure,
    globally_saturated,
    intersect_values,
    is_active,
)


@pytest.fixture
def sig():
    return FeatureSignature({"cat": frozenset({"s", "np", "v"}), "funct": frozenset({"subj", "obj"})})


def test_signature_rejects_unknown_name_and_value(sig):
    with pytest.raises(SignatureError):
        sig.check_value("bogus", "s")
    with pytest.raises(SignatureError):
        sig.check_value("cat", "adj")
    sig.check_value("cat", "np")


def test_value_set_wildcard_is_whole_domain(sig):
    assert sig.value_set("cat", None) == frozenset({"s", "np", "v"})
    assert sig.value_set("cat", frozenset({"np"})) == frozenset({"np"})


def test_polarized_feature_requires_nonempty_values():
    with pytest.raises(ValueError):
        PolarizedFeature("cat", Polarity.POSITIVE, frozenset())


def test_is_active():
    assert is_active(Polarity.POSITIVE)
    assert is_active(Polarity.NEGATIVE)
    assert not is_active(Polarity.NEUTRAL)
    assert not is_active(Polarity.VIRTUAL)


@pytest.mark.parametrize(
    "pols,expected",
    [
        ([], True),
        ([Polarity.POSITIVE, Polarity.NEGATIVE], True),
        ([Polarity.POSITIVE], False),
        ([Polarity.NEGATIVE], False),
        ([Polarity.NEUTRAL], True),
        ([Polarity.VIRTUAL], False),
        ([Polarity.VIRTUAL, Polarity.NEUTRAL], True),
        ([Polarity.POSITIVE, Polarity.NEGATIVE, Polarity.VIRTUAL], True),
        ([Polarity.POSITIVE, Polarity.POSITIVE, Polarity.NEGATIVE], False),
    ],
)
def test_globally_saturated(pols, expected):
    assert globally_saturated(pols) is expected


def test_intersect_values_and_clash():
    assert intersect_values("f", frozenset({"a", "b"}), frozenset({"b", "c"})) == frozenset({"b"})
    with pytest.raises(ValueClash):
        intersect_values("f", frozenset({"a"}), frozenset({"c"}))


def _filter(values_by_name):
    return PolarizedFeatureStructure(
        {n: PolarizedFeature(n, Polarity.NEUTRAL, vs) for n, vs in values_by_name.items()}
    )


def test_compatible_ignores_missing_names():
    psi = _filter({"cat": frozenset({"s", "np"})})
    assert compatible({"cat": "np"}, psi)
    assert compatible({"funct": "subj"}, psi)
    assert not compatible({"cat": "v"}, psi)


def test_filtering_structure_rejects_active_features():
    ok = _filter({"cat": frozenset({"s"})})
    assert filtering_structure(ok) is ok
    bad = PolarizedFeatureStructure.of(
        PolarizedFeature("cat", Polarity.POSITIVE, frozenset({"s"}))
    )
    with pytest.raises(ValueError):
        filtering_structure(bad)


def test_structure_iteration_and_of():
    pfs = PolarizedFeatureStructure.of(
        PolarizedFeature("funct", Polarity.NEUTRAL, frozenset({"subj"})),
        PolarizedFeature("cat", Polarity.NEUTRAL, frozenset({"np"})),
    )
    assert {f.name for f in pfs} == {"cat", "funct"}
    with pytest.raises(ValueError):
        PolarizedFeatureStructure.of(
            PolarizedFeature("cat", Polarity.NEUTRAL, frozenset({"np"})),
            PolarizedFeature("cat", Polarity.NEUTRAL, frozenset({"s"})),
        )


def test_structure_is_hashable():
    assert hash(_filter({"cat": frozenset({"s"})})) == hash(_filter({"cat": frozenset({"s"})}))
