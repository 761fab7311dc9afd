"""Ordered syntactic trees and the model checker.

A syntactic tree is a finite, totally ordered tree whose nodes carry
atomic feature structures; leaves carry a phonological form that may be
the empty string.  ``check_model`` decides whether a tree together with
an interpretation function is a minimal saturated model of a multiset
of descriptions, reporting each violated condition as data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from polartree.descriptions import PTD, Arity, Dom, LDom, LPrec, Prec
from polartree.features import compatible, globally_saturated


class NotAncestorError(ValueError):
    """path() called on nodes without a dominance relationship."""


class OracleTooLarge(ValueError):
    """Exhaustive interpretation search refused above the size bound."""


@dataclass(frozen=True)
class TreeNode:
    """A syntactic tree node; leaves (and only leaves) carry a phon."""

    fs: Mapping[str, str]
    children: tuple = ()
    phon: Optional[str] = None
    id: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "fs", dict(self.fs))
        object.__setattr__(self, "children", tuple(self.children))
        if self.children and self.phon is not None:
            raise ValueError("internal node cannot carry a phonological form")
        if not self.children and self.phon is None:
            raise ValueError("leaf must carry a phonological form (may be '')")

    @property
    def is_leaf(self) -> bool:
        return not self.children


def leaf(phon: str, fs: Optional[Mapping[str, str]] = None, id: Optional[str] = None) -> TreeNode:
    return TreeNode(fs or {}, (), phon, id)


def node(children: Sequence[TreeNode], fs: Optional[Mapping[str, str]] = None, id: Optional[str] = None) -> TreeNode:
    return TreeNode(fs or {}, tuple(children), None, id)


def phonological_projection(n: TreeNode) -> list:
    """Left-to-right list of the non-empty phonological forms under ``n``."""
    if n.is_leaf:
        return [] if n.phon == "" else [n.phon]
    out: list = []
    for child in n.children:
        out.extend(phonological_projection(child))
    return out


def path(m: TreeNode, d: TreeNode) -> list:
    """The unique node list from ``m`` down to ``d``, both inclusive."""
    if m is d:
        return [m]
    for child in m.children:
        try:
            return [m] + path(child, d)
        except NotAncestorError:
            continue
    raise NotAncestorError("first node does not dominate the second")


# --------------------------------------------------------------------------
# tree indexing helpers


def preorder(root: TreeNode) -> list:
    out = [root]
    for child in root.children:
        out.extend(preorder(child))
    return out


def tree_node_id(root: TreeNode, n: TreeNode) -> str:
    """Stable identifier: the explicit id if set, else the preorder index."""
    if n.id is not None:
        return n.id
    for i, x in enumerate(preorder(root)):
        if x is n:
            return str(i)
    raise ValueError("node not in tree")


def _index(root: TreeNode) -> dict:
    """Map node id -> node, with parents and child positions."""
    nodes = {}
    parents = {}
    position = {}
    order = preorder(root)
    for i, n in enumerate(order):
        nid = n.id if n.id is not None else str(i)
        if nid in nodes:
            raise ValueError(f"duplicate tree node id {nid!r}")
        nodes[nid] = n
    ids = {id(n): nid for nid, n in nodes.items()}
    for n in order:
        for pos, child in enumerate(n.children):
            parents[ids[id(child)]] = ids[id(n)]
            position[ids[id(child)]] = pos
    return {"nodes": nodes, "parents": parents, "position": position, "ids": ids, "order": order}


# --------------------------------------------------------------------------
# interpretations and verdicts


Interpretation = Mapping[str, str]  # description-node key -> tree-node id


def desc_node_key(origin) -> str:
    inst, name = origin
    return f"{name}.{inst}"


def description_keys(descriptions: Sequence[PTD]) -> list:
    """All description-node keys of a multiset, from origin provenance."""
    keys = []
    for desc in descriptions:
        for node_id in desc.sorted_node_ids():
            for origin in sorted(desc.nodes[node_id].origins):
                keys.append(desc_node_key(origin))
    return sorted(keys)


#: every condition tag a verdict can carry, in report order
CONDITION_TAGS = (
    "DOM",
    "LDOM",
    "PREC",
    "LPREC",
    "FEAT",
    "COREF",
    "NODETYPE",
    "SAT",
    "MIN-SURJ",
    "MIN-EDGE",
    "MIN-FEAT",
    "MIN-PHON",
)


@dataclass
class ModelVerdict:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, tag: str, ids: Sequence[str], message: str) -> None:
        self.violations.append((tag, tuple(ids), message))


# --------------------------------------------------------------------------
# the model checker


def check_model(tree: TreeNode, descriptions: Sequence[PTD], interpretation: Interpretation) -> ModelVerdict:
    """Check every model condition of a tree against a description multiset.

    The interpretation maps description-node keys (``name.instance``) to
    tree node ids.  Violations are returned as data, tagged DOM, LDOM,
    PREC, LPREC, FEAT, COREF, NODETYPE, SAT, MIN-SURJ, MIN-EDGE,
    MIN-FEAT or MIN-PHON.
    """
    verdict = ModelVerdict()
    idx = _index(tree)
    tnodes: dict = idx["nodes"]
    parents: dict = idx["parents"]
    position: dict = idx["position"]

    # flatten description nodes; every origin is its own logical node here,
    # so pre-merged descriptions are checked through their provenance
    desc_nodes: dict = {}  # key -> (desc, node)
    for desc in descriptions:
        for node_id in desc.sorted_node_ids():
            dnode = desc.nodes[node_id]
            for origin in sorted(dnode.origins):
                desc_nodes[desc_node_key(origin)] = dnode

    missing = sorted(k for k in desc_nodes if k not in interpretation)
    if missing:
        verdict.add("MIN-SURJ", missing, "interpretation does not cover every description node")
        return verdict
    unknown = sorted(k for k in desc_nodes if interpretation[k] not in tnodes)
    if unknown:
        verdict.add("MIN-SURJ", unknown, "interpretation targets unknown tree nodes")
        return verdict

    def image(desc: PTD, node_id: str) -> str:
        origin = min(desc.nodes[node_id].origins)
        return interpretation[desc_node_key(origin)]

    pp_cache: dict = {}

    def pp(tid: str) -> list:
        if tid not in pp_cache:
            pp_cache[tid] = phonological_projection(tnodes[tid])
        return pp_cache[tid]

    def is_ancestor(m: str, n: str) -> bool:
        while True:
            if m == n:
                return True
            if n not in parents:
                return False
            n = parents[n]

    def tree_path(m: str, n: str) -> list:
        chain = [n]
        while n != m:
            n = parents[n]
            chain.append(n)
        return list(reversed(chain))

    # relational adequacy -------------------------------------------------
    for desc in descriptions:
        for rel in desc.sorted_relations():
            if isinstance(rel, Dom):
                im, inn = image(desc, rel.mother), image(desc, rel.daughter)
                if parents.get(inn) != im:
                    verdict.add("DOM", [rel.mother, rel.daughter], "image is not the mother of the daughter image")
                    continue
                if rel.pos == "leftmost" and position[inn] != 0:
                    verdict.add("DOM", [rel.mother, rel.daughter], "daughter image is not leftmost")
                if rel.pos == "rightmost" and position[inn] != len(tnodes[im].children) - 1:
                    verdict.add("DOM", [rel.mother, rel.daughter], "daughter image is not rightmost")
            elif isinstance(rel, Arity):
                im = image(desc, rel.mother)
                want = {image(desc, d) for d in rel.daughters}
                have = {idx["ids"][id(c)] for c in tnodes[im].children}
                if want != have or len(tnodes[im].children) != len(rel.daughters):
                    verdict.add("DOM", [rel.mother], "daughter set does not match the arity constraint")
            elif isinstance(rel, LDom):
                im, inn = image(desc, rel.mother), image(desc, rel.daughter)
                if not is_ancestor(im, inn):
                    verdict.add("LDOM", [rel.mother, rel.daughter], "image is not an ancestor of the daughter image")
                elif rel.filter is not None:
                    for tid in tree_path(im, inn):
                        if not compatible(tnodes[tid].fs, rel.filter):
                            verdict.add(
                                "LDOM",
                                [rel.mother, rel.daughter, tid],
                                "a node along the dominance path fails the filter",
                            )
            elif isinstance(rel, Prec):
                il, ir = image(desc, rel.left), image(desc, rel.right)
                same = parents.get(il) is not None and parents.get(il) == parents.get(ir)
                if not same or position[ir] != position[il] + 1:
                    verdict.add("PREC", [rel.left, rel.right], "images are not immediate sisters in order")
            elif isinstance(rel, LPrec):
                il, ir = image(desc, rel.left), image(desc, rel.right)
                same = parents.get(il) is not None and parents.get(il) == parents.get(ir)
                if not same or not position[il] < position[ir]:
                    verdict.add("LPREC", [rel.left, rel.right], "images are not strictly ordered sisters")

    # feature adequacy ----------------------------------------------------
    preimage: dict = {tid: [] for tid in tnodes}
    for key in sorted(desc_nodes):
        preimage[interpretation[key]].append(key)

    for tid in sorted(tnodes):
        tnode = tnodes[tid]
        for name in sorted(tnode.fs):
            value = tnode.fs[name]
            for key in preimage[tid]:
                state = desc_nodes[key].features.get(name)
                if state is not None and value not in state.values:
                    verdict.add("FEAT", [tid, key, name], f"tree value {value!r} not admissible")

    # co-reference equality
    groups: dict = {}
    for key in sorted(desc_nodes):
        for name in sorted(desc_nodes[key].features):
            for tag in sorted(desc_nodes[key].features[name].corefs):
                groups.setdefault(tag, []).append((key, name))
    for tag in sorted(groups):
        values = set()
        for key, name in groups[tag]:
            tnode = tnodes[interpretation[key]]
            if name in tnode.fs:
                values.add(tnode.fs[name])
        if len(values) > 1:
            verdict.add("COREF", [tag], f"co-referenced values differ: {sorted(values)}")

    # node type adequacy --------------------------------------------------
    for key in sorted(desc_nodes):
        ntype = desc_nodes[key].ntype
        tid = interpretation[key]
        if ntype.kind == "anchor" and pp(tid) != [ntype.phon]:
            verdict.add("NODETYPE", [key, tid], f"anchor image projects {pp(tid)} instead of [{ntype.phon!r}]")
        elif ntype.kind == "empty" and pp(tid) != []:
            verdict.add("NODETYPE", [key, tid], f"empty node image projects {pp(tid)}")
        elif ntype.kind == "full" and pp(tid) == []:
            verdict.add("NODETYPE", [key, tid], "full node image projects nothing")

    # saturation ----------------------------------------------------------
    for tid in sorted(tnodes):
        names = sorted({n for key in preimage[tid] for n in desc_nodes[key].features})
        for name in names:
            polarities = []
            for key in preimage[tid]:
                state = desc_nodes[key].features.get(name)
                if state is not None:
                    polarities.extend(state.polarities)
            if not globally_saturated(polarities):
                verdict.add("SAT", [tid, name], f"polarity multiset {[p.value for p in polarities]} not saturated")

    # minimality ----------------------------------------------------------
    empty_preimage = sorted(tid for tid in tnodes if not preimage[tid])
    for tid in empty_preimage:
        verdict.add("MIN-SURJ", [tid], "tree node has no preimage")

    backed = set()
    for desc in descriptions:
        for rel in desc.doms():
            backed.add((image(desc, rel.mother), image(desc, rel.daughter)))
    for child_id, parent_id in sorted(parents.items()):
        if (parent_id, child_id) not in backed:
            verdict.add("MIN-EDGE", [parent_id, child_id], "tree edge backed by no dominance relation")

    for tid in sorted(tnodes):
        for name in sorted(tnodes[tid].fs):
            if not any(name in desc_nodes[key].features for key in preimage[tid]):
                verdict.add("MIN-FEAT", [tid, name], "tree feature backed by no description feature")

    for tid in sorted(tnodes):
        tnode = tnodes[tid]
        if tnode.is_leaf and tnode.phon:
            anchors = [
                key
                for key in preimage[tid]
                if desc_nodes[key].ntype.kind == "anchor" and desc_nodes[key].ntype.phon == tnode.phon
            ]
            if len(anchors) != 1:
                verdict.add("MIN-PHON", [tid], f"leaf {tnode.phon!r} has {len(anchors)} matching anchors")

    return verdict


# --------------------------------------------------------------------------
# exhaustive interpretation search (the oracle)


def find_interpretations(
    tree: TreeNode,
    descriptions: Sequence[PTD],
    limit: int = 1000,
    oracle_bound: int = 14,
) -> list:
    """Enumerate all interpretations that make the tree a model.

    Exhaustive (pruned) backtracking over maps from description nodes to
    tree nodes; exact below the configured bound and refused above it.
    """
    keys = description_keys(descriptions)
    if len(keys) > oracle_bound:
        raise OracleTooLarge(f"{len(keys)} description nodes exceeds bound {oracle_bound}")

    idx = _index(tree)
    tnodes = idx["nodes"]
    parents = idx["parents"]

    desc_nodes: dict = {}
    key_owner: dict = {}  # key -> (desc index, merged node id)
    for d_i, desc in enumerate(descriptions):
        for node_id in desc.sorted_node_ids():
            for origin in sorted(desc.nodes[node_id].origins):
                key = desc_node_key(origin)
                desc_nodes[key] = desc.nodes[node_id]
                key_owner[key] = (d_i, node_id)

    pp_cache = {tid: phonological_projection(tnodes[tid]) for tid in tnodes}

    def locally_admissible(key: str, tid: str) -> bool:
        dnode = desc_nodes[key]
        tnode = tnodes[tid]
        for name, state in dnode.features.items():
            if name in tnode.fs and tnode.fs[name] not in state.values:
                return False
        ntype = dnode.ntype
        if ntype.kind == "anchor":
            return pp_cache[tid] == [ntype.phon]
        if ntype.kind == "empty":
            return pp_cache[tid] == []
        if ntype.kind == "full":
            return pp_cache[tid] != []
        return True

    candidates = {
        key: [tid for tid in sorted(tnodes) if locally_admissible(key, tid)] for key in keys
    }

    # pre-collect binary dominance/precedence constraints between keys
    pair_constraints: list = []
    for desc in descriptions:
        anchor_key = {}
        for node_id in desc.sorted_node_ids():
            for origin in sorted(desc.nodes[node_id].origins):
                anchor_key[node_id] = desc_node_key(min(desc.nodes[node_id].origins))
        for rel in desc.sorted_relations():
            if isinstance(rel, Dom):
                pair_constraints.append(("dom", anchor_key[rel.mother], anchor_key[rel.daughter]))
            elif isinstance(rel, LDom):
                pair_constraints.append(("ldom", anchor_key[rel.mother], anchor_key[rel.daughter]))

    def is_ancestor(m: str, n: str) -> bool:
        while True:
            if m == n:
                return True
            if n not in parents:
                return False
            n = parents[n]

    # origins of one merged node must share an image
    merged_groups: dict = {}
    for key, owner in key_owner.items():
        merged_groups.setdefault(owner, []).append(key)

    results: list = []
    assignment: dict = {}

    def consistent(key: str, tid: str) -> bool:
        owner = key_owner[key]
        for other in merged_groups[owner]:
            if other in assignment and assignment[other] != tid:
                return False
        for kind, km, kn in pair_constraints:
            im = tid if km == key else assignment.get(km)
            inn = tid if kn == key else assignment.get(kn)
            if im is None or inn is None:
                continue
            if kind == "dom" and parents.get(inn) != im:
                return False
            if kind == "ldom" and not is_ancestor(im, inn):
                return False
        return True

    def search(i: int) -> None:
        if len(results) >= limit:
            return
        if i == len(keys):
            verdict = check_model(tree, descriptions, dict(assignment))
            if verdict.ok:
                results.append(dict(assignment))
            return
        key = keys[i]
        for tid in candidates[key]:
            if consistent(key, tid):
                assignment[key] = tid
                search(i + 1)
                del assignment[key]
                if len(results) >= limit:
                    return

    search(0)
    return results


# --------------------------------------------------------------------------
# serialization


def to_dict(n: TreeNode) -> dict:
    out: dict = {"fs": dict(sorted(n.fs.items()))}
    if n.id is not None:
        out["id"] = n.id
    if n.is_leaf:
        out["phon"] = n.phon
    else:
        out["children"] = [to_dict(c) for c in n.children]
    return out


def from_dict(data: Mapping) -> TreeNode:
    if "children" in data:
        children = tuple(from_dict(c) for c in data["children"])
        return TreeNode(data.get("fs", {}), children, None, data.get("id"))
    return TreeNode(data.get("fs", {}), (), data.get("phon", ""), data.get("id"))


def to_bracketed(n: TreeNode) -> str:
    """Compact deterministic one-line form, for golden tests."""
    fs = ",".join(f"{k}={v}" for k, v in sorted(n.fs.items()))
    if n.is_leaf:
        phon = n.phon if n.phon else "eps"
        return f"({fs} <{phon}>)" if fs else f"(<{phon}>)"
    inner = " ".join(to_bracketed(c) for c in n.children)
    return f"({fs} {inner})" if fs else f"({inner})"


def dumps(n: TreeNode) -> str:
    return json.dumps(to_dict(n), indent=2, sort_keys=True)


def loads(text: str) -> TreeNode:
    return from_dict(json.loads(text))
