import random

from hypothesis import given, settings
from hypothesis import strategies as st

from polartree.descriptions import (
    MergeError,
    candidate_merges,
    canonical_key,
    is_saturated,
    juxtapose,
    merge_nodes,
)
from polartree.features import Polarity, globally_saturated
from polartree.filtering import Interval
from polartree.trees import check_model, phonological_projection

from .oracles import naive_check, planted_instance, random_instance

intervals = st.builds(
    lambda a, b: Interval(min(a, b), max(a, b)),
    st.integers(-5, 5),
    st.integers(-5, 5),
)


@given(intervals, intervals, intervals)
def test_interval_addition_commutative_associative(x, y, z):
    assert x + y == y + x
    assert (x + y) + z == x + (y + z)


@given(st.lists(st.sampled_from(list(Polarity)), max_size=8))
def test_saturation_invariant_under_permutation(pols):
    shuffled = list(pols)
    random.Random(0).shuffle(shuffled)
    assert globally_saturated(pols) == globally_saturated(shuffled)


@given(st.lists(st.sampled_from(list(Polarity)), max_size=6))
def test_adding_a_dual_pair_preserves_saturation(pols):
    if globally_saturated(pols) and not any(
        p in (Polarity.POSITIVE, Polarity.NEGATIVE) for p in pols
    ):
        assert globally_saturated(pols + [Polarity.POSITIVE, Polarity.NEGATIVE])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_checker_agrees_with_oracle(seed):
    tree, descriptions, interpretation = random_instance(random.Random(seed))
    verdict = check_model(tree, descriptions, interpretation)
    assert {t for t, _, _ in verdict.violations} == naive_check(
        tree, descriptions, interpretation
    )


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_merge_order_commutes_on_planted_descriptions(seed):
    rng = random.Random(seed)
    tree, descriptions, interpretation, _ = planted_instance(rng)
    state = juxtapose(descriptions)
    pairs = [(a, b) for a, b, _, _ in candidate_merges(state)]
    if len(pairs) < 2:
        return
    forward = state
    backward = state
    try:
        for a, b in pairs:
            forward = merge_nodes(forward, a, b)
        for a, b in reversed(pairs):
            backward = merge_nodes(backward, a, b)
    except MergeError:
        return
    assert canonical_key(forward) == canonical_key(backward)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_saturated_planted_state_projects_planted_words(seed):
    rng = random.Random(seed)
    tree, descriptions, interpretation, _ = planted_instance(rng)
    state = juxtapose(descriptions)
    while not is_saturated(state):
        merged = None
        for a, b, _, _ in candidate_merges(state):
            try:
                merged = merge_nodes(state, a, b)
                break
            except MergeError:
                continue
        assert merged is not None
        state = merged
    anchors = sorted(
        node.ntype.phon for node in state.nodes.values() if node.ntype.kind == "anchor"
    )
    assert anchors == sorted(phonological_projection(tree))
