"""Polarized tree descriptions and the node-merging engine.

A description is a set of polarized nodes related by (large) dominance
and (large) precedence constraints.  Parsing identifies description
nodes two at a time; each merge intersects value sets, concatenates
polarity multisets and propagates structural consequences (mother
merging, co-reference refresh, order consistency) to a fixpoint.

Merged nodes keep the full multiset of polarities contributed by their
origin nodes; saturation is always judged on that multiset.  Node
identifiers are derived canonically from origin sets, so two search
branches that build the same description produce identical objects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from polartree.features import (
    POLARITY_ORDER,
    Polarity,
    PolarizedFeatureStructure,
    ValueClash,
    intersect_values,
)

# --------------------------------------------------------------------------
# node types


@dataclass(frozen=True)
class NodeType:
    """Constraint on the phonological projection of a node's image.

    ``anchor`` nodes carry a non-empty phonological form and must project
    exactly that form; ``full`` nodes project something, ``empty`` nodes
    project nothing and ``default`` nodes are unconstrained.
    """

    kind: str  # "anchor" | "full" | "empty" | "default"
    phon: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("anchor", "full", "empty", "default"):
            raise ValueError(f"unknown node type kind {self.kind!r}")
        if self.kind == "anchor":
            if not self.phon:
                raise ValueError("anchor node type needs a non-empty phon")
        elif self.phon is not None:
            raise ValueError(f"{self.kind} node type cannot carry a phon")

    @classmethod
    def anchor(cls, phon: str) -> "NodeType":
        return cls("anchor", phon)


DEFAULT = NodeType("default")
FULL = NodeType("full")
EMPTY = NodeType("empty")


class MergeError(Exception):
    """A node merge that cannot succeed.

    ``kind`` is one of POLARITY_CLASH, VALUE_CLASH, TYPE_CLASH,
    ORDER_CLASH, STRUCT_CLASH, ANCHOR_CLASH.
    """

    def __init__(self, kind: str, message: str):
        self.kind = kind
        super().__init__(f"{kind}: {message}")


def node_type_combine(x: NodeType, y: NodeType) -> NodeType:
    """Combine the node types of two merged nodes.

    ``default`` is the identity; contradictory projection constraints
    clash; an anchor absorbs ``full`` (its projection is non-empty
    anyway).  Two anchors never merge, even with equal phonological
    forms: a phonological leaf has exactly one anchor in its preimage.
    """
    if x.kind == "default":
        return y
    if y.kind == "default":
        return x
    if x.kind == "anchor" and y.kind == "anchor":
        raise MergeError("ANCHOR_CLASH", f"two anchors {x.phon!r} and {y.phon!r}")
    if {x.kind, y.kind} == {"full", "empty"}:
        raise MergeError("TYPE_CLASH", "full node merged with empty node")
    if "anchor" in (x.kind, y.kind):
        other = y if x.kind == "anchor" else x
        anchor = x if x.kind == "anchor" else y
        if other.kind == "empty":
            raise MergeError("TYPE_CLASH", f"anchor {anchor.phon!r} merged with empty node")
        return anchor  # anchor + full
    return x  # full+full or empty+empty


# --------------------------------------------------------------------------
# nodes and relations


@dataclass(frozen=True)
class FeatureState:
    """Accumulated state of one feature name on a (possibly merged) node."""

    name: str
    polarities: tuple  # multiset of Polarity, canonically sorted
    values: frozenset
    corefs: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(
            self,
            "polarities",
            tuple(sorted(self.polarities, key=lambda p: POLARITY_ORDER[p])),
        )
        object.__setattr__(self, "values", frozenset(self.values))
        object.__setattr__(self, "corefs", frozenset(self.corefs))

    @property
    def positive_count(self) -> int:
        return sum(1 for p in self.polarities if p is Polarity.POSITIVE)

    @property
    def negative_count(self) -> int:
        return sum(1 for p in self.polarities if p is Polarity.NEGATIVE)


@dataclass(frozen=True)
class DescNode:
    """A polarized node; ``origins`` records its provenance through merges."""

    id: str
    features: Mapping[str, FeatureState]
    ntype: NodeType = DEFAULT
    origins: frozenset = frozenset()  # of (instance id, original node id)

    def __post_init__(self):
        object.__setattr__(self, "features", dict(self.features))
        origins = frozenset(self.origins) or frozenset({("0", self.id)})
        object.__setattr__(self, "origins", origins)


def origin_id(origins: Iterable) -> str:
    """Canonical node identifier derived from an origin set."""
    return "|".join(sorted(f"{name}.{inst}" for inst, name in origins))


def node_from_structure(
    node_id: str,
    pfs: PolarizedFeatureStructure,
    ntype: NodeType = DEFAULT,
    origins: Optional[Iterable] = None,
) -> DescNode:
    feats = {
        f.name: FeatureState(
            f.name,
            (f.polarity,),
            f.values,
            frozenset() if f.coref is None else frozenset({f.coref}),
        )
        for f in pfs
    }
    return DescNode(node_id, feats, ntype, frozenset(origins or ()))


@dataclass(frozen=True)
class Dom:
    mother: str
    daughter: str
    pos: str = "any"  # "any" | "leftmost" | "rightmost"


@dataclass(frozen=True)
class Arity:
    mother: str
    daughters: frozenset

    def __post_init__(self):
        object.__setattr__(self, "daughters", frozenset(self.daughters))


@dataclass(frozen=True)
class LDom:
    mother: str
    daughter: str
    filter: Optional[PolarizedFeatureStructure] = None


@dataclass(frozen=True)
class Prec:
    left: str
    right: str


@dataclass(frozen=True)
class LPrec:
    left: str
    right: str


Relation = object  # Dom | Arity | LDom | Prec | LPrec


def _relation_key(rel) -> tuple:
    if isinstance(rel, Dom):
        return (0, rel.mother, rel.daughter, rel.pos)
    if isinstance(rel, LDom):
        filt = _filter_key(rel.filter)
        return (1, rel.mother, rel.daughter, filt)
    if isinstance(rel, Prec):
        return (2, rel.left, rel.right, "")
    if isinstance(rel, LPrec):
        return (3, rel.left, rel.right, "")
    if isinstance(rel, Arity):
        return (4, rel.mother, "|".join(sorted(rel.daughters)), "")
    raise TypeError(f"not a relation: {rel!r}")


def _filter_key(filt: Optional[PolarizedFeatureStructure]) -> str:
    if filt is None:
        return ""
    parts = [
        f"{name}={'|'.join(sorted(feat.values))}"
        for name, feat in sorted(filt.features.items())
    ]
    return ";".join(parts)


@dataclass(frozen=True)
class PTD:
    """A polarized tree description: nodes plus relational constraints."""

    nodes: Mapping[str, DescNode]
    relations: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "nodes", dict(self.nodes))
        object.__setattr__(self, "relations", frozenset(self.relations))

    # -- convenience accessors ------------------------------------------

    def sorted_relations(self) -> list:
        cached = self.__dict__.get("_sorted_relations")
        if cached is None:
            cached = sorted(self.relations, key=_relation_key)
            object.__setattr__(self, "_sorted_relations", cached)
        return cached

    def doms(self) -> list:
        return [r for r in self.sorted_relations() if isinstance(r, Dom)]

    def ldoms(self) -> list:
        return [r for r in self.sorted_relations() if isinstance(r, LDom)]

    def precs(self) -> list:
        return [r for r in self.sorted_relations() if isinstance(r, Prec)]

    def lprecs(self) -> list:
        return [r for r in self.sorted_relations() if isinstance(r, LPrec)]

    def arities(self) -> list:
        return [r for r in self.sorted_relations() if isinstance(r, Arity)]

    def dom_children(self, mother: str) -> list:
        return sorted({r.daughter for r in self.relations if isinstance(r, Dom) and r.mother == mother})

    def dom_mothers(self, daughter: str) -> list:
        return sorted({r.mother for r in self.relations if isinstance(r, Dom) and r.daughter == daughter})

    def sorted_node_ids(self) -> list:
        return sorted(self.nodes)


def juxtapose(parts: Sequence[PTD]) -> PTD:
    """Disjoint union of descriptions (node id sets must not overlap)."""
    nodes: dict = {}
    relations: set = set()
    for part in parts:
        overlap = nodes.keys() & part.nodes.keys()
        if overlap:
            raise ValueError(f"node id collision: {sorted(overlap)}")
        nodes.update(part.nodes)
        relations.update(part.relations)
    return PTD(nodes, frozenset(relations))


# --------------------------------------------------------------------------
# validation


@dataclass
class Verdict:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, tag: str, ids: Sequence[str], message: str) -> None:
        self.violations.append((tag, tuple(ids), message))


def _dom_cycle(ptd: PTD) -> Optional[list]:
    """Return a cycle through DOM edges, or None."""
    children: dict = {}
    for rel in ptd.doms():
        children.setdefault(rel.mother, []).append(rel.daughter)
    state: dict = {}
    stack: list = []

    def visit(n):
        state[n] = 1
        stack.append(n)
        for c in children.get(n, ()):
            if state.get(c) == 1:
                return stack[stack.index(c):] + [c]
            if c not in state:
                cycle = visit(c)
                if cycle:
                    return cycle
        stack.pop()
        state[n] = 2
        return None

    for n in sorted(children):
        if n not in state:
            cycle = visit(n)
            if cycle:
                return cycle
    return None


def _order_cycle(ptd: PTD) -> Optional[list]:
    """Return a cycle through precedence edges (including x before x)."""
    succ: dict = {}
    for rel in ptd.precs() + ptd.lprecs():
        if rel.left == rel.right:
            return [rel.left, rel.left]
        succ.setdefault(rel.left, set()).add(rel.right)
    state: dict = {}
    stack: list = []

    def visit(n):
        state[n] = 1
        stack.append(n)
        for c in sorted(succ.get(n, ())):
            if state.get(c) == 1:
                return stack[stack.index(c):] + [c]
            if c not in state:
                cycle = visit(c)
                if cycle:
                    return cycle
        stack.pop()
        state[n] = 2
        return None

    for n in sorted(succ):
        if n not in state:
            cycle = visit(n)
            if cycle:
                return cycle
    return None


def validate_ptd(ptd: PTD) -> Verdict:
    """Check the invariants every description must satisfy."""
    verdict = Verdict()
    known = set(ptd.nodes)
    for rel in ptd.sorted_relations():
        if isinstance(rel, (Dom, LDom)):
            ends = [rel.mother, rel.daughter]
        elif isinstance(rel, (Prec, LPrec)):
            ends = [rel.left, rel.right]
        else:
            ends = [rel.mother, *sorted(rel.daughters)]
        for end in ends:
            if end not in known:
                verdict.add("UNKNOWN_NODE", [end], f"relation endpoint {end!r} not a node")
    if not verdict.ok:
        return verdict

    # precedence endpoints need an explicit common DOM mother
    for rel in ptd.precs() + ptd.lprecs():
        left_mothers = set(ptd.dom_mothers(rel.left))
        right_mothers = set(ptd.dom_mothers(rel.right))
        if not (left_mothers & right_mothers):
            kind = "prec" if isinstance(rel, Prec) else "lprec"
            verdict.add(
                "NO_COMMON_MOTHER",
                [rel.left, rel.right],
                f"{kind} endpoints lack a common dominance mother",
            )

    cycle = _dom_cycle(ptd)
    if cycle:
        verdict.add("DOM_CYCLE", cycle, "dominance edges form a cycle")
    return verdict


def validate_iptd(ptd: PTD) -> Verdict:
    """Additionally require DOM together with LDOM to form a tree."""
    verdict = validate_ptd(ptd)
    if not verdict.ok:
        return verdict

    incoming: dict = {n: [] for n in ptd.nodes}
    for rel in ptd.doms():
        incoming[rel.daughter].append(rel.mother)
    for rel in ptd.ldoms():
        incoming[rel.daughter].append(rel.mother)

    roots = sorted(n for n, ms in incoming.items() if not ms)
    if len(roots) != 1:
        verdict.add("NOT_A_TREE", roots, f"expected one root, found {len(roots)}")
    for n, ms in sorted(incoming.items()):
        if len(ms) > 1:
            verdict.add("NOT_A_TREE", [n, *sorted(ms)], "node has several dominance parents")
    if verdict.ok:
        # connectivity: everything reachable from the root
        reached = {roots[0]}
        frontier = [roots[0]]
        children: dict = {}
        for rel in ptd.doms() + ptd.ldoms():
            children.setdefault(rel.mother, []).append(rel.daughter)
        while frontier:
            n = frontier.pop()
            for c in children.get(n, ()):
                if c not in reached:
                    reached.add(c)
                    frontier.append(c)
        missing = sorted(set(ptd.nodes) - reached)
        if missing:
            verdict.add("NOT_A_TREE", missing, "nodes unreachable from the root")
    return verdict


# --------------------------------------------------------------------------
# saturation bookkeeping


def saturation_status(ptd: PTD) -> list:
    """List every (node id, feature name, polarity multiset) not yet saturated."""
    from polartree.features import globally_saturated

    out = []
    for node_id in ptd.sorted_node_ids():
        node = ptd.nodes[node_id]
        for name in sorted(node.features):
            state = node.features[name]
            if not globally_saturated(state.polarities):
                out.append((node_id, name, state.polarities))
    return out


def is_saturated(ptd: PTD) -> bool:
    return not saturation_status(ptd)


def active_polarity_count(ptd: PTD) -> int:
    """Number of active polarities still waiting for a dual partner."""
    count = 0
    for node in ptd.nodes.values():
        for state in node.features.values():
            pos, neg = state.positive_count, state.negative_count
            if not (pos == 1 and neg == 1):
                count += pos + neg
    return count


# --------------------------------------------------------------------------
# merging


def _combine_features(x: DescNode, y: DescNode) -> dict:
    feats: dict = {}
    for name in sorted(set(x.features) | set(y.features)):
        fx, fy = x.features.get(name), y.features.get(name)
        if fx is None:
            feats[name] = fy
            continue
        if fy is None:
            feats[name] = fx
            continue
        pols = fx.polarities + fy.polarities
        pos = sum(1 for p in pols if p is Polarity.POSITIVE)
        neg = sum(1 for p in pols if p is Polarity.NEGATIVE)
        if pos > 1 or neg > 1:
            side = "positive" if pos > 1 else "negative"
            raise MergeError(
                "POLARITY_CLASH",
                f"feature {name!r} accumulates {max(pos, neg)} {side} polarities "
                f"on {x.id} + {y.id}",
            )
        try:
            values = intersect_values(name, fx.values, fy.values)
        except ValueClash as exc:
            raise MergeError("VALUE_CLASH", str(exc)) from exc
        feats[name] = FeatureState(name, pols, values, fx.corefs | fy.corefs)
    return feats


def _refresh_corefs(nodes: dict) -> dict:
    """Intersect value sets across co-reference groups, to a fixpoint."""
    groups: dict = {}
    for node in nodes.values():
        for state in node.features.values():
            for tag in state.corefs:
                groups.setdefault(tag, []).append((node.id, state.name))
    updates: dict = {}
    for tag in sorted(groups):
        members = groups[tag]
        common = None
        for node_id, name in members:
            values = nodes[node_id].features[name].values
            common = values if common is None else (common & values)
        if not common:
            raise MergeError("VALUE_CLASH", f"co-reference group <{tag}> has no common value")
        for node_id, name in members:
            if nodes[node_id].features[name].values != common:
                updates.setdefault(node_id, {})[name] = common
    for node_id, names in updates.items():
        node = nodes[node_id]
        feats = dict(node.features)
        for name, values in names.items():
            feats[name] = replace(feats[name], values=values)
        nodes[node_id] = replace(node, features=feats)
    return nodes


def merge_nodes(ptd: PTD, a: str, b: str) -> PTD:
    """Merge nodes ``a`` and ``b`` and propagate consequences to a fixpoint.

    Propagation covers mother merging (two dominance mothers of one node
    are necessarily the same model node), co-reference value refresh and
    re-homing of every relation onto the merged identifiers.  Raises
    :class:`MergeError` when the merged description can have no model.
    """
    if a == b:
        raise ValueError("cannot merge a node with itself")
    if a not in ptd.nodes or b not in ptd.nodes:
        raise KeyError(f"unknown node in merge: {a!r}, {b!r}")

    nodes = dict(ptd.nodes)
    relations = set(ptd.relations)
    forward: dict = {}  # old id -> replacement id

    def find(node_id: str) -> str:
        while node_id in forward:
            node_id = forward[node_id]
        return node_id

    queue = [(a, b)]
    while queue:
        x, y = queue.pop(0)
        x, y = find(x), find(y)
        if x == y:
            continue
        nx, ny = nodes[x], nodes[y]
        ntype = node_type_combine(nx.ntype, ny.ntype)
        feats = _combine_features(nx, ny)
        origins = nx.origins | ny.origins
        new_id = origin_id(origins)
        merged = DescNode(new_id, feats, ntype, origins)
        del nodes[x]
        del nodes[y]
        nodes[new_id] = merged
        forward[x] = new_id
        forward[y] = new_id

        # rehome relations touching x or y
        rehomed = set()
        for rel in relations:
            if isinstance(rel, Dom):
                rehomed.add(Dom(find(rel.mother), find(rel.daughter), rel.pos))
            elif isinstance(rel, LDom):
                rehomed.add(LDom(find(rel.mother), find(rel.daughter), rel.filter))
            elif isinstance(rel, Prec):
                rehomed.add(Prec(find(rel.left), find(rel.right)))
            elif isinstance(rel, LPrec):
                rehomed.add(LPrec(find(rel.left), find(rel.right)))
            else:
                rehomed.add(Arity(find(rel.mother), frozenset(find(d) for d in rel.daughters)))
        relations = rehomed

        # mother propagation: a node with two dominance mothers forces their merge
        mothers: dict = {}
        for rel in relations:
            if isinstance(rel, Dom):
                mothers.setdefault(rel.daughter, set()).add(rel.mother)
        for daughter in sorted(mothers):
            ms = sorted(mothers[daughter])
            if len(ms) > 1:
                queue.append((ms[0], ms[1]))

    nodes = _refresh_corefs(nodes)
    result = PTD(nodes, frozenset(relations))

    cycle = _dom_cycle(result)
    if cycle:
        raise MergeError("STRUCT_CLASH", f"dominance cycle through {cycle}")
    order_cycle = _order_cycle(result)
    if order_cycle:
        raise MergeError("ORDER_CLASH", f"precedence cycle through {order_cycle}")
    return result


# --------------------------------------------------------------------------
# merge candidates

_DUAL = "dual"
_VIRTUAL = "virtual"


def candidate_merges(ptd: PTD) -> list:
    """All node pairs whose merge can advance saturation.

    Dual candidates pair an unmatched positive with an unmatched negative
    of the same feature name; virtual candidates attach a node whose
    feature occurrences are all virtual to a node carrying the feature
    with a non-virtual polarity.  Pairs are returned in a canonical
    order: (feature name, node ids).
    """
    out = []
    seen = set()
    ids = ptd.sorted_node_ids()
    for n1 in ids:
        node1 = ptd.nodes[n1]
        for name in sorted(node1.features):
            s1 = node1.features[name]
            unmatched_pos = s1.positive_count == 1 and s1.negative_count == 0
            all_virtual = all(p is Polarity.VIRTUAL for p in s1.polarities)
            if not (unmatched_pos or all_virtual):
                continue
            for n2 in ids:
                if n2 == n1:
                    continue
                node2 = ptd.nodes[n2]
                s2 = node2.features.get(name)
                if s2 is None or not (s1.values & s2.values):
                    continue
                if unmatched_pos and s2.negative_count == 1 and s2.positive_count == 0:
                    kind = _DUAL
                elif all_virtual and any(p is not Polarity.VIRTUAL for p in s2.polarities):
                    kind = _VIRTUAL
                else:
                    continue
                key = (name, min(n1, n2), max(n1, n2))
                if key in seen:
                    continue
                seen.add(key)
                out.append((key[1], key[2], name, kind))
    out.sort(key=lambda c: (c[2], c[0], c[1]))
    return out


# --------------------------------------------------------------------------
# canonical serialization (graph export / dedup keys)


def export_ptd(ptd: PTD) -> dict:
    """Deterministic plain-data form of a description (graph export)."""
    nodes = []
    for node_id in ptd.sorted_node_ids():
        node = ptd.nodes[node_id]
        feats = []
        for name in sorted(node.features):
            state = node.features[name]
            feats.append(
                {
                    "name": name,
                    "polarities": [p.value for p in state.polarities],
                    "values": sorted(state.values),
                    "corefs": sorted(state.corefs),
                }
            )
        nodes.append(
            {
                "id": node_id,
                "type": node.ntype.kind,
                "phon": node.ntype.phon,
                "features": feats,
                "origins": sorted(f"{name}.{inst}" for inst, name in node.origins),
            }
        )
    edges = []
    for rel in ptd.sorted_relations():
        if isinstance(rel, Dom):
            edges.append({"kind": "dom", "mother": rel.mother, "daughter": rel.daughter, "pos": rel.pos})
        elif isinstance(rel, LDom):
            edges.append(
                {
                    "kind": "ldom",
                    "mother": rel.mother,
                    "daughter": rel.daughter,
                    "filter": _filter_key(rel.filter) or None,
                }
            )
        elif isinstance(rel, Prec):
            edges.append({"kind": "prec", "left": rel.left, "right": rel.right})
        elif isinstance(rel, LPrec):
            edges.append({"kind": "lprec", "left": rel.left, "right": rel.right})
        else:
            edges.append({"kind": "arity", "mother": rel.mother, "daughters": sorted(rel.daughters)})
    return {"nodes": nodes, "edges": edges}


def canonical_key(ptd: PTD) -> tuple:
    """Canonical hashable identity of a description (node ids are origin-derived)."""
    cached = ptd.__dict__.get("_canonical_key")
    if cached is not None:
        return cached
    nodes = tuple(
        (
            nid,
            node.ntype.kind,
            node.ntype.phon or "",
            tuple(
                (
                    name,
                    tuple(p.value for p in state.polarities),
                    tuple(sorted(state.values)),
                    tuple(sorted(state.corefs)),
                )
                for name, state in sorted(node.features.items())
            ),
        )
        for nid, node in sorted(ptd.nodes.items())
    )
    rels = tuple(_relation_key(rel) for rel in ptd.sorted_relations())
    key = (nodes, rels)
    object.__setattr__(ptd, "_canonical_key", key)
    return key
