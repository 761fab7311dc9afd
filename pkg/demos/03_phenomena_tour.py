"""A tour of the bundled grammars.

Each fixture grammar isolates one phenomenon: clitic placement,
elision/contraction, negative concord, extraction islands, free word
order, clitic climbing, and deliberately non-contiguous constituents.
This demo parses a representative sentence from each, compares the two
engines, and shows where they are expected to disagree.

Run:  python3 demos/03_phenomena_tour.py
"""

import pathlib

from polartree.engines import ParseOptions, parse
from polartree.grammar import load_grammar, load_lexicon
from polartree.trees import to_bracketed

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

TOUR = [
    ("clitic", "jean la voit .", "object clitic climbs before the verb"),
    ("contraction", "qu'aime marie", "elided wh-word plus subject inversion"),
    ("negation", "jean ne voit aucun homme", "negative concord licenses 'aucun'"),
    ("negation", "aucun homme dort", "an unlicensed negative has no model"),
    ("freeorder", "jean demande cela amarie", "free argument order, reading 1"),
    ("freeorder", "jean demande amarie cela", "free argument order, reading 2"),
    ("cliticpair", "jean la lui demande", "two clitics, empty categories in situ"),
]


def pair(name):
    grammar = load_grammar(FIXTURES / name / "grammar.json")
    return grammar, load_lexicon(FIXTURES / name / "lexicon.json", grammar.signature)


def main() -> None:
    for name, sentence, blurb in TOUR:
        grammar, lexicon = pair(name)
        result = parse(sentence, grammar, lexicon)
        print(f"[{name}] {sentence!r}  -- {blurb}")
        print(
            f"  selections {result.stats.selections_kept}/{result.stats.selections_total}"
            f" after filtering, {result.stats.saturated} saturated states,"
            f" {result.stats.steps} steps"
        )
        if result.models:
            for model in result.models:
                print("  model:", to_bracketed(model.tree))
        else:
            print("  no parse")
        print()

    # long-distance extraction needs a deeper polarity bound: the wh-word's
    # unsatisfied polarity travels through every intermediate clause
    grammar, lexicon = pair("island")
    for sentence in (
        "jean que marie aime dort",
        "jean que marie pense que marie aime dort",
    ):
        result = parse(sentence, grammar, lexicon, ParseOptions(polarity_bound=4))
        print(f"[island] {sentence!r}")
        for model in result.models:
            print("  model:", to_bracketed(model.tree))

    # a grammar with non-contiguous constituents: the incremental engine
    # finds the model, while the chart engine (which only ever combines
    # adjacent spans) correctly reports nothing
    grammar, lexicon = pair("noncontig")
    for engine in ("incremental", "cky"):
        result = parse("wa wm wb", grammar, lexicon, ParseOptions(engine=engine))
        trees = [to_bracketed(m.tree) for m in result.models]
        print(f"\n[noncontig] engine={engine}: {trees or 'no parse'}")


if __name__ == "__main__":
    main()
