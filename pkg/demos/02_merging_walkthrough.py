"""A merge, one step at a time.

Parsing is controlled node merging: lexical descriptions are juxtaposed
and pairs of nodes are identified until every polarity is saturated.
This demo walks the sentence "qu'aime marie" through tokenization (the
contraction "qu'" splits into two edges), lexical selection, polarity
filtering, and a hand-driven merge loop, printing the saturation ledger
after every step.

Run:  python3 demos/02_merging_walkthrough.py
"""

import pathlib

from polartree.descriptions import (
    candidate_merges,
    is_saturated,
    juxtapose,
    merge_nodes,
    saturation_status,
)
from polartree.engines import ParseOptions, extract_models
from polartree.filtering import filter_selections
from polartree.grammar import build_selection_graph, load_grammar, load_lexicon, tokenize
from polartree.trees import to_bracketed

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "contraction"


def show_status(state) -> None:
    for name, value, polarities in saturation_status(state):
        marks = " ".join(p.value for p in polarities)
        print(f"    {name}={value:<4s} [{marks}]")


def main() -> None:
    grammar = load_grammar(FIXTURES / "grammar.json")
    lexicon = load_lexicon(FIXTURES / "lexicon.json", grammar.signature)

    sentence = "qu'aime marie"
    tg = tokenize(sentence, grammar.contractions)
    print(f"token graph for {sentence!r}:")
    for path in tg.paths():
        print("  path:", " ".join(edge.word for edge in path))

    sg = build_selection_graph(tg, lexicon, grammar)
    print(f"\nlexical selections through the graph: {sg.path_count()}")

    filtered = filter_selections(sg, grammar)
    print(
        f"polarity filter kept {filtered.stats.kept_selections}"
        f" of {filtered.stats.total_selections}"
    )

    selection = filtered.automaton.accepted_selections()[0]
    print("\nchosen selection:")
    for item in selection:
        print(f"  {item.instance}: {item.word!r} via template {item.template}")

    state = juxtapose([item.ptd for item in selection])
    step = 0
    while not is_saturated(state):
        print(f"\n-- step {step}: unsaturated features --")
        show_status(state)
        for a, b, feature, kind in candidate_merges(state):
            try:
                merged = merge_nodes(state, a, b)
            except Exception as exc:  # a clash just rules this pair out
                print(f"  {kind:7s} {a} + {b} on {feature}: {exc}")
                continue
            print(f"  {kind:7s} {a} + {b} on {feature}: merged")
            state = merged
            break
        else:
            raise SystemExit("dead end: no candidate merge succeeds")
        step += 1

    print(f"\nsaturated after {step} merges")
    spoken = {item.word for item in selection}
    words = next(
        [edge.word for edge in path]
        for path in tg.paths()
        if {edge.word for edge in path} <= spoken
    )
    for model in extract_models(state, words, ParseOptions()):
        print("model:", to_bracketed(model.tree))


if __name__ == "__main__":
    main()
