"""Command-line entry point for the parsing pipeline.

Five subcommands expose the library for batch use and golden testing:

- ``parse``  runs the full pipeline on sentences and prints trees;
- ``filter`` reports lexical-selection counts before and after the
  polarity filter, with a per-key rejection table;
- ``check``  verifies a tree + selection + interpretation triple against
  every model condition;
- ``lint``   validates a grammar (and optionally a lexicon) template by
  template;
- ``serve``  runs the interactive debug service over local HTTP.

Contract: results go to standard output, diagnostics to standard error,
and identical inputs produce byte-identical reports.  Exit status is 0 on
full success, 1 when a sentence has no parse (or a check fails, or lint
finds issues) and 2 on usage or format errors.
"""

from __future__ import annotations

import concurrent.futures
import json
import sys
from typing import Optional, Sequence

import click

from polartree.engines import (
    ParseOptions,
    ParseResult,
    model_document,
    parse,
    result_document,
)
from polartree.features import FeatureSignature, SignatureError
from polartree.filtering import filter_selections, selection_interval
from polartree.grammar import (
    GrammarError,
    anchor,
    build_selection_graph,
    load_grammar,
    load_lexicon,
    loads_lexicon,
    tokenize,
)
from polartree.grammar import _parse_template  # lenient per-template linting
from polartree.trees import CONDITION_TAGS, check_model, loads


def _fail(message: str, code: int = 2) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_pair(grammar_path: str, lexicon_path: Optional[str]):
    try:
        grammar = load_grammar(grammar_path)
    except OSError as exc:
        _fail(f"cannot read grammar: {exc}")
    except GrammarError as exc:
        _fail(f"bad grammar: {exc}")
    lexicon = None
    if lexicon_path is not None:
        try:
            lexicon = load_lexicon(lexicon_path, grammar.signature)
        except OSError as exc:
            _fail(f"cannot read lexicon: {exc}")
        except GrammarError as exc:
            _fail(f"bad lexicon: {exc}")
    return grammar, lexicon


def _gather_sentences(sentences: Sequence[str]) -> list:
    if sentences:
        return [s for s in sentences if s.strip()]
    return [line.rstrip("\n") for line in sys.stdin if line.strip()]


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False)


def _tree_graph(tree) -> dict:
    """Node/edge list form of a model tree (ids are preorder positions)."""
    nodes: list = []
    edges: list = []

    def walk(n, parent: Optional[int]) -> None:
        my = len(nodes)
        entry: dict = {"index": my, "fs": dict(sorted(n.fs.items()))}
        if n.id is not None:
            entry["id"] = n.id
        if n.is_leaf:
            entry["phon"] = n.phon
        nodes.append(entry)
        if parent is not None:
            edges.append([parent, my])
        for child in n.children:
            walk(child, my)

    walk(tree, None)
    return {"nodes": nodes, "edges": edges}


def _render(result: ParseResult, fmt: str) -> str:
    if fmt == "structured":
        return _dump(result_document(result))
    if fmt == "graph":
        doc = {
            "sentence": result.sentence,
            "ok": result.ok,
            "models": [_tree_graph(m.tree) for m in result.models],
        }
        return _dump(doc)
    lines = [f"# {result.sentence}"]
    if not result.models:
        lines.append("no parse")
    for i, model in enumerate(result.models, 1):
        doc = model_document(model)
        lines.append(f"model {i}: {doc['bracketed']}")
    return "\n".join(lines)


_COMMON = [
    click.option("--grammar", "grammar_path", required=True, help="Grammar document path."),
    click.option("--lexicon", "lexicon_path", required=True, help="Lexicon document path."),
    click.option(
        "--engine",
        type=click.Choice(["incremental", "cky"]),
        default="incremental",
        show_default=True,
    ),
    click.option("--bound", type=int, default=6, show_default=True, help="Polarity bound."),
    click.option("--no-filter", "no_filter", is_flag=True, help="Skip the polarity filter."),
    click.option(
        "--format",
        "fmt",
        type=click.Choice(["text", "structured", "graph"]),
        default="text",
        show_default=True,
    ),
    click.option("--jobs", type=int, default=1, show_default=True, help="Parallel sentences."),
    click.option("--max-models", type=int, default=None, help="Stop after this many models."),
    click.option("--max-steps", type=int, default=200000, show_default=True),
]


def _with_common(fn):
    for option in reversed(_COMMON):
        fn = option(fn)
    return fn


def _options(engine: str, bound: int, no_filter: bool, max_models, max_steps: int) -> ParseOptions:
    try:
        return ParseOptions(
            engine=engine,
            polarity_bound=bound,
            use_filter=not no_filter,
            max_models=max_models,
            max_steps=max_steps,
        )
    except ValueError as exc:
        _fail(str(exc))


@click.group()
def main() -> None:
    """Parsing toolkit for polarized tree descriptions."""


@main.command(name="parse")
@_with_common
@click.argument("sentences", nargs=-1)
def cmd_parse(grammar_path, lexicon_path, engine, bound, no_filter, fmt, jobs, max_models, max_steps, sentences):
    """Parse sentences (arguments, or one per line on standard input)."""
    grammar, lexicon = _load_pair(grammar_path, lexicon_path)
    options = _options(engine, bound, no_filter, max_models, max_steps)
    lines = _gather_sentences(sentences)

    def run(sentence: str) -> ParseResult:
        return parse(sentence, grammar, lexicon, options)

    if jobs > 1 and len(lines) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, lines))
    else:
        results = [run(s) for s in lines]

    status = 0
    for result in results:  # input order, regardless of completion order
        for note in result.diagnostics:
            click.echo(f"{result.sentence}: {note}", err=True)
        click.echo(_render(result, fmt))
        if not result.ok:
            status = 1
    sys.exit(status)


@main.command(name="filter")
@_with_common
@click.argument("sentences", nargs=-1)
def cmd_filter(grammar_path, lexicon_path, engine, bound, no_filter, fmt, jobs, max_models, max_steps, sentences):
    """Report selection counts before/after filtering, per sentence."""
    grammar, lexicon = _load_pair(grammar_path, lexicon_path)
    lines = _gather_sentences(sentences)
    keys = grammar.active_keys()

    status = 0
    docs = []
    for sentence in lines:
        tg = tokenize(sentence, grammar.contractions)
        sgraph = build_selection_graph(tg, lexicon, grammar)
        for word in sgraph.unknown_words:
            click.echo(f"{sentence}: unknown word: {word}", err=True)
        before = sgraph.path_count()
        rejected = {key: 0 for key in keys}
        if no_filter:
            after = before
        else:
            filtered = filter_selections(sgraph, grammar)
            after = filtered.automaton.accepted_count()
            for selection in sgraph.selections():
                for key in keys:
                    if not selection_interval(selection, key).contains(0):
                        rejected[key] += 1
        doc = {
            "sentence": sentence,
            "selections_before": before,
            "selections_after": after,
            "rejected_by_key": {f"{n}={v}": c for (n, v), c in sorted(rejected.items())},
        }
        docs.append(doc)
        if after == 0 and before > 0:
            status = max(status, 0)  # filtering everything out is a valid report

    if fmt == "text":
        blocks = []
        for doc in docs:
            lines_out = [
                f"# {doc['sentence']}",
                f"selections before: {doc['selections_before']}",
                f"selections after:  {doc['selections_after']}",
            ]
            for key, count in doc["rejected_by_key"].items():
                if count:
                    lines_out.append(f"rejected by {key}: {count}")
            blocks.append("\n".join(lines_out))
        click.echo("\n".join(blocks))
    else:
        click.echo(_dump({"reports": docs}))
    sys.exit(status)


@main.command(name="check")
@click.option("--grammar", "grammar_path", required=True, help="Grammar document path.")
@click.argument("tree_file")
@click.argument("selection_file")
@click.argument("interpretation_file")
def cmd_check(grammar_path, tree_file, selection_file, interpretation_file):
    """Check a tree/selection/interpretation triple; print pass/fail per condition."""
    grammar, _ = _load_pair(grammar_path, None)
    try:
        with open(tree_file, encoding="utf-8") as handle:
            tree = loads(handle.read())
        with open(selection_file, encoding="utf-8") as handle:
            selection_doc = json.load(handle)
        with open(interpretation_file, encoding="utf-8") as handle:
            interpretation = json.load(handle)
    except OSError as exc:
        _fail(f"cannot read input: {exc}")
    except (json.JSONDecodeError, ValueError) as exc:
        _fail(f"bad input document: {exc}")

    if not isinstance(selection_doc, list) or not isinstance(interpretation, dict):
        _fail("selection must be a list and interpretation an object")

    descriptions: list = []
    for entry in selection_doc:
        try:
            template = grammar.templates[entry["template"]]
            inst = anchor(template, entry["word"], entry.get("usage", {}), str(entry["instance"]))
        except (KeyError, TypeError) as exc:
            _fail(f"bad selection entry {entry!r}: {exc}")
        if inst is None:
            _fail(f"selection entry {entry!r} does not anchor")
        descriptions.append(inst.ptd)

    verdict = check_model(tree, descriptions, interpretation)
    failed = {tag for tag, _, _ in verdict.violations}
    for tag in CONDITION_TAGS:
        click.echo(f"{tag}: {'fail' if tag in failed else 'pass'}")
    for tag, ids, message in verdict.violations:
        click.echo(f"{tag} {list(ids)}: {message}", err=True)
    sys.exit(0 if verdict.ok else 1)


@main.command(name="lint")
@click.option("--grammar", "grammar_path", required=True, help="Grammar document path.")
@click.option("--lexicon", "lexicon_path", default=None, help="Optional lexicon to lint too.")
def cmd_lint(grammar_path, lexicon_path):
    """Validate every grammar template (and lexicon entries) independently."""
    try:
        with open(grammar_path, encoding="utf-8") as handle:
            text = handle.read()
        data = json.loads(text)
    except OSError as exc:
        _fail(f"cannot read grammar: {exc}")
    except json.JSONDecodeError as exc:
        _fail(f"grammar is not valid object notation: {exc}")
    if not isinstance(data, dict) or "signature" not in data:
        _fail("grammar document must be an object with a 'signature' section")

    issues: list = []
    try:
        signature = FeatureSignature(
            {name: frozenset(values) for name, values in data["signature"].items()}
        )
    except (SignatureError, AttributeError, TypeError) as exc:
        _fail(f"bad signature: {exc}")

    for name in sorted(data.get("templates", {})):
        try:
            _parse_template(name, data["templates"][name], signature)
        except GrammarError as exc:
            issues.append(str(exc))

    if lexicon_path is not None:
        try:
            with open(lexicon_path, encoding="utf-8") as handle:
                loads_lexicon(handle.read(), signature)
        except OSError as exc:
            _fail(f"cannot read lexicon: {exc}")
        except GrammarError as exc:
            issues.append(str(exc))

    for issue in issues:
        click.echo(issue)
    click.echo(f"{len(issues)} issue(s)")
    sys.exit(1 if issues else 0)


@main.command(name="serve")
@click.option("--grammar", "grammar_paths", multiple=True, required=True, help="Grammar path (repeatable).")
@click.option("--lexicon", "lexicon_paths", multiple=True, required=True, help="Lexicon path, parallel to --grammar.")
@click.option("--id", "ids", multiple=True, help="Grammar id, parallel to --grammar (default: grammar directory name).")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8642, show_default=True)
def cmd_serve(grammar_paths, lexicon_paths, ids, host, port):
    """Serve the interactive debug sessions over local HTTP."""
    import pathlib

    import uvicorn

    from polartree.service import create_app, load_service

    if len(grammar_paths) != len(lexicon_paths):
        _fail("--grammar and --lexicon must be given in parallel")
    if ids and len(ids) != len(grammar_paths):
        _fail("--id must be given once per --grammar")
    names = list(ids) or [pathlib.Path(g).resolve().parent.name for g in grammar_paths]
    if len(set(names)) != len(names):
        _fail("grammar ids must be unique (disambiguate with --id)")
    try:
        service = load_service(dict(zip(names, zip(grammar_paths, lexicon_paths))))
    except (OSError, GrammarError) as exc:
        _fail(f"cannot load grammars: {exc}")
    click.echo(f"serving {', '.join(names)} on http://{host}:{port}", err=True)
    uvicorn.run(create_app(service), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
