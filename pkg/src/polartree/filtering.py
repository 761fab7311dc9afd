"""Polarity-counting filter over lexical selection graphs.

Before any merging happens, many lexical selections can be discarded by
global counting alone: in a saturated description every active feature
occurrence with value ``v`` of feature ``f`` must pair a positive with a
negative, so the positive and negative counts for the key ``(f, v)``
must cancel over the whole selection.  Because value sets are
disjunctions, a description does not always contribute an exact count;
it contributes an *interval* of possible counts, and a selection is kept
only when zero lies in the interval sum for every key.

The criterion is regular, so it runs on the selection graph itself as an
interval-counting automaton (one subset-construction product over all
keys), without enumerating the paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from polartree.descriptions import PTD
from polartree.features import Polarity
from polartree.grammar import AnchoredIPTD, Grammar, SelectionEdge, SelectionGraph


@dataclass(frozen=True)
class Interval:
    """Closed integer interval of possible signed counts."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def contains(self, value: int) -> bool:
        return self.lo <= value <= self.hi


ZERO = Interval(0, 0)


def contribution(ptd: PTD, key: tuple) -> Interval:
    """Interval of possible signed counts of key ``(name, value)`` in ``ptd``.

    Each positive feature occurrence contributes +1 when its value set is
    exactly ``{value}`` and 0-or-1 when ``value`` is one disjunct among
    others; negative occurrences contribute the mirrored negatives.
    Virtual and neutral occurrences never count.
    """
    name, value = key
    total = ZERO
    for node_id in ptd.sorted_node_ids():
        state = ptd.nodes[node_id].features.get(name)
        if state is None or value not in state.values:
            continue
        exact = len(state.values) == 1
        for polarity in state.polarities:
            if polarity is Polarity.POSITIVE:
                total = total + (Interval(1, 1) if exact else Interval(0, 1))
            elif polarity is Polarity.NEGATIVE:
                total = total + (Interval(-1, -1) if exact else Interval(-1, 0))
    return total


def selection_interval(selection: Sequence[AnchoredIPTD], key: tuple) -> Interval:
    total = ZERO
    for iptd in selection:
        total = total + contribution(iptd.ptd, key)
    return total


def passes(selection: Sequence[AnchoredIPTD], keys: Iterable[tuple]) -> bool:
    """Exact per-selection criterion: zero count attainable for every key."""
    return all(selection_interval(selection, key).contains(0) for key in keys)


# --------------------------------------------------------------------------
# counting automaton


@dataclass(frozen=True)
class AutomatonStats:
    keys: tuple
    state_count: int
    total_selections: int
    kept_selections: int


@dataclass
class CountingAutomaton:
    """Deterministic interval-counting automaton over a selection graph.

    States are pairs of a graph vertex and one count interval per key,
    built forward from the source; a sink state accepts when every
    interval contains zero.
    """

    graph: SelectionGraph
    keys: tuple
    #: state -> list of (edge, successor state); a state is (vertex, intervals)
    transitions: Mapping[tuple, list] = field(default_factory=dict)
    initial: tuple = ()

    def accepting(self, state: tuple) -> bool:
        vertex, intervals = state
        return vertex == self.graph.sink and all(iv.contains(0) for iv in intervals)

    @property
    def states(self) -> list:
        return sorted(
            self.transitions,
            key=lambda s: (s[0], tuple((iv.lo, iv.hi) for iv in s[1])),
        )

    def live_edges(self) -> frozenset:
        """Edges on at least one accepted source-to-sink run."""
        alive = set()
        cache: dict = {}

        def live(state: tuple) -> bool:
            if state not in cache:
                cache[state] = False  # cycle guard; the graph is acyclic
                if self.accepting(state):
                    cache[state] = True
                else:
                    cache[state] = any(live(nxt) for _, nxt in self.transitions[state])
            return cache[state]

        def walk(state: tuple) -> None:
            for edge, nxt in self.transitions[state]:
                if live(nxt) and edge not in alive:
                    alive.add(edge)
                    walk(nxt)

        if self.initial in self.transitions:
            walk(self.initial)
        return frozenset(alive)

    def accepted_count(self) -> int:
        """Number of accepted source-to-sink runs (exact kept-selection count)."""
        cache: dict = {}

        def count(state: tuple) -> int:
            if state not in cache:
                cache[state] = (1 if self.accepting(state) else 0) + sum(
                    count(nxt) for _, nxt in self.transitions[state]
                )
            return cache[state]

        return count(self.initial) if self.initial in self.transitions else 0

    def accepted_selections(self, cap: Optional[int] = None) -> list:
        """Accepted selections, each a list of anchored instances, in graph order."""
        out: list = []

        def walk(state: tuple, acc: list) -> bool:
            if cap is not None and len(out) >= cap:
                return False
            if self.accepting(state):
                out.append([e.iptd for e in acc])
            for edge, nxt in sorted(
                self.transitions[state],
                key=lambda t: (t[0].dst, t[0].iptd.word, t[0].iptd.template),
            ):
                acc.append(edge)
                more = walk(nxt, acc)
                acc.pop()
                if not more:
                    return False
            return True

        if self.initial in self.transitions:
            walk(self.initial, [])
        return out


def build_automaton(graph: SelectionGraph, keys: Sequence[tuple]) -> CountingAutomaton:
    keys = tuple(sorted(keys))
    initial = (0, tuple(ZERO for _ in keys))
    transitions: dict = {}
    queue = [initial]
    while queue:
        state = queue.pop()
        if state in transitions:
            continue
        vertex, intervals = state
        outgoing = []
        for edge in graph.outgoing(vertex):
            deltas = tuple(contribution(edge.iptd.ptd, key) for key in keys)
            nxt = (edge.dst, tuple(iv + d for iv, d in zip(intervals, deltas)))
            outgoing.append((edge, nxt))
            if nxt not in transitions:
                queue.append(nxt)
        transitions[state] = outgoing
    return CountingAutomaton(graph, keys, transitions, initial)


@dataclass(frozen=True)
class FilterResult:
    graph: SelectionGraph
    stats: AutomatonStats
    automaton: CountingAutomaton


def filter_selections(
    graph: SelectionGraph,
    grammar: Grammar,
    keys: Optional[Sequence[tuple]] = None,
) -> FilterResult:
    """Prune the selection graph down to the edges on neutralizable paths.

    Keys default to every (feature, value) pair active anywhere in the
    grammar.  The pruned graph drops every edge that lies on no accepted
    selection; the accepted selections themselves (the exact path-level
    criterion) are read off the returned automaton, since an edge kept
    for one path may still combine into rejected ones.
    """
    keys = tuple(sorted(keys if keys is not None else grammar.active_keys()))
    automaton = build_automaton(graph, keys)
    alive = automaton.live_edges()
    kept_edges = tuple(e for e in graph.edges if e in alive)
    filtered = SelectionGraph(kept_edges, graph.sink, graph.unknown_words)
    stats = AutomatonStats(
        keys=keys,
        state_count=len(automaton.transitions),
        total_selections=graph.path_count(),
        kept_selections=automaton.accepted_count(),
    )
    return FilterResult(filtered, stats, automaton)
