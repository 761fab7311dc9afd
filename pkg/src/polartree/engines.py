"""Deep parsing engines and model extraction.

Parsing a lexical selection means juxtaposing its anchored descriptions
and merging nodes until every polarity is saturated.  Two engines search
that space:

- the *incremental* engine scans the selection left to right, shifting
  the next description while the number of unmatched active polarities
  stays within a bound and reducing (merging) otherwise;
- the *chart* engine fills a CKY-style table over selection spans, where
  combining two adjacent spans requires at least one dual merge across
  the boundary.  The chart engine is faster on long sentences but cannot
  combine non-adjacent material first, so selections whose only dual
  pair spans an intervening word are beyond it.

Both engines deduplicate search states through the canonical identity of
descriptions (node ids are origin-derived), so commuting merge orders
collapse.  Saturated descriptions are then linearized into ordered trees
that are checked to be minimal saturated models of the original input.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from polartree.descriptions import (
    PTD,
    DescNode,
    MergeError,
    active_polarity_count,
    candidate_merges,
    canonical_key,
    is_saturated,
    juxtapose,
    merge_nodes,
    saturation_status,
)
from polartree.features import compatible
from polartree.grammar import AnchoredIPTD, Grammar, Lexicon, build_selection_graph, tokenize
from polartree.filtering import filter_selections
from polartree.trees import (
    TreeNode,
    check_model,
    desc_node_key,
    phonological_projection,
    to_bracketed,
    to_dict,
)


@dataclass(frozen=True)
class ParseOptions:
    engine: str = "incremental"  # "incremental" | "cky"
    polarity_bound: int = 6
    use_filter: bool = True
    max_models: Optional[int] = None
    max_steps: int = 200000
    max_orderings: int = 20000

    def __post_init__(self):
        if self.engine not in ("incremental", "cky"):
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.polarity_bound < 2:
            raise ValueError("polarity bound must be at least 2")


@dataclass(frozen=True)
class ParseModel:
    """One extracted model: an ordered tree plus its interpretation."""

    tree: TreeNode
    interpretation: Mapping[str, str]
    #: tree node id -> {feature: sorted list of residual values} where the
    #: saturated description left a feature underspecified
    underspecified: Mapping[str, dict]
    words: tuple

    def __post_init__(self):
        object.__setattr__(self, "interpretation", dict(self.interpretation))
        object.__setattr__(self, "underspecified", dict(self.underspecified))
        object.__setattr__(self, "words", tuple(self.words))


@dataclass
class ParseStats:
    selections_total: int = 0
    selections_kept: int = 0
    steps: int = 0
    saturated: int = 0
    truncated: bool = False


@dataclass
class ParseResult:
    sentence: str
    models: list = field(default_factory=list)
    stats: ParseStats = field(default_factory=ParseStats)
    diagnostics: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return bool(self.models)


class _Budget:
    def __init__(self, max_steps: int):
        self.max_steps = max_steps
        self.steps = 0
        self.exhausted = False

    def tick(self) -> bool:
        self.steps += 1
        if self.steps > self.max_steps:
            self.exhausted = True
        return not self.exhausted


# --------------------------------------------------------------------------
# the REDUCE closure (shared by both engines)


def reduce_closure(
    ptd: PTD,
    budget: _Budget,
    seen: Optional[set] = None,
    out: Optional[dict] = None,
) -> dict:
    """All saturated descriptions reachable from ``ptd`` by merging.

    The search is target-driven: the first unsaturated feature occurrence
    (in canonical order) must eventually be resolved by one of its
    current partners in any saturated outcome, so only its own candidates
    are branched on.  This collapses the permutations of independent
    merges without losing results.
    """
    seen = set() if seen is None else seen
    out = {} if out is None else out

    def go(state: PTD) -> None:
        if budget.exhausted:
            return
        key = canonical_key(state)
        if key in seen:
            return
        seen.add(key)
        status = saturation_status(state)
        if not status:
            out.setdefault(key, state)
            return
        candidates = candidate_merges(state)
        # fail-first: branch on the unsaturated feature with the fewest
        # resolution candidates; zero candidates is an immediate dead end
        best = None
        for node, name, _pols in status:
            mine = [c for c in candidates if c[2] == name and node in (c[0], c[1])]
            if best is None or len(mine) < len(best):
                best = mine
            if not mine:
                return
        for a, b, _cname, _kind in best:
            if not budget.tick():
                return
            try:
                merged = merge_nodes(state, a, b)
            except MergeError:
                continue
            go(merged)

    go(ptd)
    return out


# --------------------------------------------------------------------------
# incremental engine


def parse_incremental(
    selection: Sequence[AnchoredIPTD], options: ParseOptions, budget: Optional[_Budget] = None
) -> list:
    """Saturated descriptions of one selection, by bounded shift/reduce search."""
    budget = budget or _Budget(options.max_steps)
    parts = [iptd.ptd for iptd in selection]
    n = len(parts)
    seen: set = set()
    closure_seen: set = set()
    out: dict = {}

    def step(ptd: PTD, i: int, last: Optional[tuple] = None) -> None:
        if budget.exhausted:
            return
        key = (canonical_key(ptd), i)
        if key in seen:
            return
        seen.add(key)
        if i < n and active_polarity_count(ptd) <= options.polarity_bound:
            # merging commutes with juxtaposition, so shifting eagerly while
            # within the bound loses no saturated description
            if budget.tick():
                step(juxtapose([ptd, parts[i]]), i + 1)
            return
        if i == n:
            reduce_closure(ptd, budget, closure_seen, out)
            return
        # over the bound with input remaining: reduce until shifting reopens.
        # Independent consecutive merges commute, so only their canonically
        # ordered interleaving is explored (partial-order reduction).
        for a, b, name, _kind in candidate_merges(ptd):
            ckey = (name, a, b)
            if last is not None and ckey < last[0] and last[1] not in (a, b):
                continue
            if not budget.tick():
                return
            try:
                merged = merge_nodes(ptd, a, b)
            except MergeError:
                continue
            created = next(
                nid
                for nid, nd in merged.nodes.items()
                if ptd.nodes[a].origins <= nd.origins
            )
            step(merged, i, (ckey, created))

    step(PTD({}, frozenset()), 0)
    return [out[k] for k in sorted(out)]


# --------------------------------------------------------------------------
# chart engine


def parse_cky(
    selection: Sequence[AnchoredIPTD], options: ParseOptions, budget: Optional[_Budget] = None
) -> list:
    """Saturated descriptions of one selection, by span combination.

    Each cell combination performs exactly one dual merge between the two
    spans (plus its propagation); the full-span cell is then completed
    with the same REDUCE closure the incremental engine uses.
    """
    budget = budget or _Budget(options.max_steps)
    n = len(selection)
    origins_of: dict = {}

    def span_origins(ptd: PTD) -> frozenset:
        return frozenset().union(*(nd.origins for nd in ptd.nodes.values()))

    cells: dict = {}
    for i, iptd in enumerate(selection):
        cells[(i, i + 1)] = {canonical_key(iptd.ptd): iptd.ptd}
    for width in range(2, n + 1):
        for i in range(0, n - width + 1):
            j = i + width
            items: dict = {}
            for k in range(i + 1, j):
                for left in cells[(i, k)].values():
                    left_origins = span_origins(left)
                    for right in cells[(k, j)].values():
                        if budget.exhausted:
                            break
                        joined = juxtapose([left, right])
                        for a, b, _name, kind in candidate_merges(joined):
                            if kind != "dual":
                                continue
                            in_left_a = joined.nodes[a].origins <= left_origins
                            in_left_b = joined.nodes[b].origins <= left_origins
                            if in_left_a == in_left_b:
                                continue
                            if not budget.tick():
                                break
                            try:
                                merged = merge_nodes(joined, a, b)
                            except MergeError:
                                continue
                            items.setdefault(canonical_key(merged), merged)
            cells[(i, j)] = items
    out: dict = {}
    closure_seen: set = set()
    for key in sorted(cells.get((0, n), {})):
        reduce_closure(cells[(0, n)][key], budget, closure_seen, out)
    return [out[k] for k in sorted(out)]


# --------------------------------------------------------------------------
# model extraction


class ExtractionError(ValueError):
    pass


def _tree_shape(ptd: PTD) -> Optional[dict]:
    """Children map of the dominance edges if they form one spanning tree."""
    children: dict = {nid: [] for nid in ptd.nodes}
    mothers: dict = {}
    for rel in ptd.doms():
        if rel.daughter in mothers and mothers[rel.daughter] != rel.mother:
            return None
        if rel.daughter not in mothers:
            mothers[rel.daughter] = rel.mother
            children[rel.mother].append(rel.daughter)
    roots = sorted(nid for nid in ptd.nodes if nid not in mothers)
    if len(roots) != 1:
        return None
    reached = {roots[0]}
    frontier = [roots[0]]
    while frontier:
        nid = frontier.pop()
        for child in children[nid]:
            if child in reached:
                return None
            reached.add(child)
            frontier.append(child)
    if reached != set(ptd.nodes):
        return None
    return {"root": roots[0], "children": children, "mothers": mothers}


def _instantiate_features(node: DescNode) -> tuple:
    """Atomic feature structure plus the residual sets left underspecified."""
    fs = {}
    residual = {}
    for name in sorted(node.features):
        values = sorted(node.features[name].values)
        fs[name] = values[0]
        if len(values) > 1:
            residual[name] = values
    return fs, residual


def _discharge_ldoms(ptd: PTD, shape: dict, fs_by_node: dict) -> bool:
    """Check every large-dominance obligation over the dominance tree."""
    mothers = shape["mothers"]
    for rel in ptd.ldoms():
        chain = [rel.daughter]
        nid = rel.daughter
        while nid != rel.mother:
            if nid not in mothers:
                return False
            nid = mothers[nid]
            chain.append(nid)
        if rel.filter is not None:
            for hop in chain:
                if not compatible(fs_by_node[hop], rel.filter):
                    return False
    return True


def _orderings(ptd: PTD, mother: str, daughters: list, cap: int) -> list:
    """Sister permutations satisfying the local order constraints."""
    lprecs = [(r.left, r.right) for r in ptd.lprecs() if r.left in daughters and r.right in daughters]
    precs = [(r.left, r.right) for r in ptd.precs() if r.left in daughters and r.right in daughters]
    leftmost = {r.daughter for r in ptd.doms() if r.mother == mother and r.pos == "leftmost"}
    rightmost = {r.daughter for r in ptd.doms() if r.mother == mother and r.pos == "rightmost"}
    for rel in ptd.arities():
        if rel.mother == mother and set(daughters) != set(rel.daughters):
            return []
    out = []
    for perm in itertools.permutations(sorted(daughters)):
        index = {nid: k for k, nid in enumerate(perm)}
        if any(index[a] > index[b] for a, b in lprecs):
            continue
        if any(index[b] != index[a] + 1 for a, b in precs):
            continue
        if any(index[nid] != 0 for nid in leftmost):
            continue
        if any(index[nid] != len(perm) - 1 for nid in rightmost):
            continue
        out.append(list(perm))
        if len(out) >= cap:
            break
    return out


def _projects_nothing(nid: str, shape: dict, ptd: PTD) -> bool:
    if not shape["children"][nid]:
        return ptd.nodes[nid].ntype.kind != "anchor"
    return all(_projects_nothing(c, shape, ptd) for c in shape["children"][nid])


def _canonical_child_order(ptd: PTD, shape: dict, order: list) -> list:
    """Sort maximal runs of silent sisters by id (canonical representative)."""
    out = list(order)
    i = 0
    while i < len(out):
        if _projects_nothing(out[i], shape, ptd):
            j = i
            while j < len(out) and _projects_nothing(out[j], shape, ptd):
                j += 1
            out[i:j] = sorted(out[i:j])
            i = j
        else:
            i += 1
    return out


def extract_models(
    ptd: PTD,
    words: Sequence[str],
    options: ParseOptions,
) -> list:
    """Linearize a saturated description into the models projecting ``words``.

    Dominance edges must already form one spanning tree (minimality makes
    tree edges and imaged dominance edges coincide); sister orders are
    enumerated under the order constraints, large-dominance obligations
    are discharged over the tree, and only linearizations whose
    phonological projection equals the input survive.  Orders that differ
    only in the relative position of adjacent silent sisters are
    collapsed to one canonical model.
    """
    shape = _tree_shape(ptd)
    if shape is None:
        return []
    fs_by_node = {}
    residual_by_node = {}
    for nid in ptd.sorted_node_ids():
        fs_by_node[nid], residual_by_node[nid] = _instantiate_features(ptd.nodes[nid])
    if not _discharge_ldoms(ptd, shape, fs_by_node):
        return []

    internal = sorted(nid for nid in ptd.nodes if shape["children"][nid])
    per_node = []
    for nid in internal:
        options_here = _orderings(ptd, nid, shape["children"][nid], options.max_orderings)
        if not options_here:
            return []
        per_node.append(options_here)

    models = []
    seen: set = set()
    count = 0
    for combo in itertools.product(*per_node):
        count += 1
        if count > options.max_orderings:
            break
        order = {nid: _canonical_child_order(ptd, shape, list(o)) for nid, o in zip(internal, combo)}

        def build(nid: str) -> TreeNode:
            kids = order.get(nid)
            if not kids:
                ntype = ptd.nodes[nid].ntype
                phon = ntype.phon if ntype.kind == "anchor" else ""
                return TreeNode(fs_by_node[nid], (), phon, nid)
            return TreeNode(fs_by_node[nid], tuple(build(c) for c in kids), None, nid)

        tree = build(shape["root"])
        if phonological_projection(tree) != list(words):
            continue
        key = to_bracketed(tree) + "//" + ";".join(
            f"{nid}:{','.join(order[nid])}" for nid in internal
        )
        if key in seen:
            continue
        seen.add(key)
        interpretation = {
            desc_node_key(origin): nid
            for nid in ptd.sorted_node_ids()
            for origin in ptd.nodes[nid].origins
        }
        residual = {nid: res for nid, res in residual_by_node.items() if res}
        models.append(ParseModel(tree, interpretation, residual, tuple(words)))
    models.sort(key=lambda m: to_bracketed(m.tree))
    return models


# --------------------------------------------------------------------------
# plain-data reports


def model_document(model: ParseModel) -> dict:
    """Deterministic plain-data form of one model, for reports and wire use."""
    groups: dict = {}
    for desc_key, node_id in model.interpretation.items():
        groups.setdefault(node_id, []).append(desc_key)
    return {
        "bracketed": to_bracketed(model.tree),
        "tree": to_dict(model.tree),
        "words": list(model.words),
        "interpretation": dict(sorted(model.interpretation.items())),
        "interpretation_groups": {nid: sorted(ks) for nid, ks in sorted(groups.items())},
        "underspecified": {
            nid: {name: sorted(values) for name, values in sorted(residual.items())}
            for nid, residual in sorted(model.underspecified.items())
        },
    }


def result_document(result: ParseResult) -> dict:
    """Deterministic plain-data form of a full parse result."""
    return {
        "sentence": result.sentence,
        "ok": result.ok,
        "models": [model_document(m) for m in result.models],
        "stats": {
            "selections_total": result.stats.selections_total,
            "selections_kept": result.stats.selections_kept,
            "saturated": result.stats.saturated,
            "steps": result.stats.steps,
            "truncated": result.stats.truncated,
        },
        "diagnostics": list(result.diagnostics),
    }


# --------------------------------------------------------------------------
# the pipeline


def parse_selection(
    selection: Sequence[AnchoredIPTD],
    options: ParseOptions,
    budget: Optional[_Budget] = None,
    stats: Optional[ParseStats] = None,
) -> list:
    engine = parse_cky if options.engine == "cky" else parse_incremental
    saturated = engine(selection, options, budget)
    if stats is not None:
        stats.saturated += len(saturated)
    words = [iptd.word for iptd in selection]
    models = []
    originals = [iptd.ptd for iptd in selection]
    for ptd in saturated:
        for model in extract_models(ptd, words, options):
            verdict = check_model(model.tree, originals, model.interpretation)
            if verdict.ok:
                models.append(model)
    return models


def parse(
    sentence: str,
    grammar: Grammar,
    lexicon: Lexicon,
    options: Optional[ParseOptions] = None,
) -> ParseResult:
    """Parse a sentence end to end: tokenize, anchor, filter, merge, extract.

    Every returned model has been re-checked against the anchored input
    descriptions; the result is deterministic for fixed inputs.
    """
    options = options or ParseOptions()
    result = ParseResult(sentence)
    tg = tokenize(sentence, grammar.contractions)
    sgraph = build_selection_graph(tg, lexicon, grammar)
    for word in sgraph.unknown_words:
        result.diagnostics.append(f"unknown word: {word}")
    result.stats.selections_total = sgraph.path_count()
    if options.use_filter:
        filtered = filter_selections(sgraph, grammar)
        selections = filtered.automaton.accepted_selections()
    else:
        selections = sgraph.selections()
    result.stats.selections_kept = len(selections)

    budget = _Budget(options.max_steps)
    seen: set = set()
    for selection in selections:
        for model in parse_selection(selection, options, budget, result.stats):
            key = to_bracketed(model.tree)
            if key in seen:
                continue
            seen.add(key)
            result.models.append(model)
            if options.max_models is not None and len(result.models) >= options.max_models:
                break
        if options.max_models is not None and len(result.models) >= options.max_models:
            break
        if budget.exhausted:
            break
    result.stats.steps = budget.steps
    result.stats.truncated = budget.exhausted
    if budget.exhausted:
        result.diagnostics.append("search truncated: step budget exhausted")
    result.models.sort(key=lambda m: to_bracketed(m.tree))
    return result
