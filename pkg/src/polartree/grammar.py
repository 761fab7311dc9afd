"""Grammar and lexicon files, tokenization, anchoring, selection graphs.

A grammar document is a single JSON object with three sections:

- ``signature``: feature names mapped to their value domains;
- ``templates``: unanchored descriptions, each with a neutral interface
  and exactly one designated anchor slot (strict lexicalization);
- ``contractions``: surface forms that may expand into word sequences.

Polarities are spelled ``->``, ``<-``, ``~`` and ``=``; the wildcard
value ``?`` expands to the full domain at load time.  A lexicon document
maps word forms to usages (atomic feature structures); anchoring a
template to a word succeeds when one of the word's usages is compatible
with the template interface.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from polartree.descriptions import (
    DEFAULT,
    EMPTY,
    FULL,
    PTD,
    Arity,
    DescNode,
    Dom,
    LDom,
    LPrec,
    NodeType,
    Prec,
    node_from_structure,
    validate_iptd,
)
from polartree.features import (
    FeatureSignature,
    Polarity,
    PolarizedFeature,
    PolarizedFeatureStructure,
    SignatureError,
    compatible,
)


class GrammarError(Exception):
    """Base class for grammar/lexicon loading problems."""


class ParseError(GrammarError):
    """Malformed document (syntax or shape)."""


class ValidationError(GrammarError):
    """Well-formed document describing an invalid grammar."""


class EmptyInput(ValueError):
    """Tokenizer called on a blank sentence."""


_POLARITIES = {"->": Polarity.POSITIVE, "<-": Polarity.NEGATIVE, "~": Polarity.VIRTUAL, "=": Polarity.NEUTRAL}
_POLARITY_SYMBOL = {v: k for k, v in _POLARITIES.items()}
_NODE_TYPES = {"default": DEFAULT, "full": FULL, "empty": EMPTY}


def _parse_values(signature: FeatureSignature, name: str, text: str):
    """Parse ``"np|pp"`` / ``"?"``, with an optional leading ``<tag>``."""
    text = text.strip()
    coref = None
    m = re.match(r"^<([^<>\s]+)>\s*", text)
    if m:
        coref = m.group(1)
        text = text[m.end():]
    if text == "?":
        return signature.value_set(name, None), coref
    values = [v.strip() for v in text.split("|") if v.strip()]
    if not values:
        raise ParseError(f"empty value list for feature {name!r}")
    return signature.value_set(name, values), coref


def parse_feature(signature: FeatureSignature, name: str, spec: str) -> PolarizedFeature:
    """Parse a polarized feature string such as ``"-> np|pp"`` or ``"= <2> ?"``."""
    parts = spec.strip().split(None, 1)
    if not parts or parts[0] not in _POLARITIES:
        raise ParseError(f"feature {name!r}: expected a polarity symbol, got {spec!r}")
    if len(parts) == 1:
        raise ParseError(f"feature {name!r}: missing value part in {spec!r}")
    values, coref = _parse_values(signature, name, parts[1])
    return PolarizedFeature(name, _POLARITIES[parts[0]], values, coref)


def unparse_feature(feat: PolarizedFeature, signature: FeatureSignature) -> str:
    values = "?" if feat.values == signature.domain(feat.name) else "|".join(sorted(feat.values))
    coref = f"<{feat.coref}> " if feat.coref else ""
    return f"{_POLARITY_SYMBOL[feat.polarity]} {coref}{values}"


def parse_filter(signature: FeatureSignature, data: Mapping) -> PolarizedFeatureStructure:
    """Parse a neutral (filtering) structure given as ``{name: values}``."""
    feats = {}
    for name in sorted(data):
        values, coref = _parse_values(signature, name, str(data[name]))
        feats[name] = PolarizedFeature(name, Polarity.NEUTRAL, values, coref)
    return PolarizedFeatureStructure(feats)


def unparse_filter(pfs: PolarizedFeatureStructure, signature: FeatureSignature) -> dict:
    out = {}
    for name in sorted(pfs.features):
        feat = pfs.features[name]
        values = "?" if feat.values == signature.domain(name) else "|".join(sorted(feat.values))
        out[name] = f"<{feat.coref}> {values}" if feat.coref else values
    return out


# --------------------------------------------------------------------------
# templates and grammars


@dataclass(frozen=True)
class Template:
    """An unanchored description with an interface and one anchor slot."""

    name: str
    nodes: Mapping[str, tuple]  # node name -> (PolarizedFeatureStructure, NodeType)
    relations: tuple
    interface: PolarizedFeatureStructure
    anchor_node: str

    def __post_init__(self):
        object.__setattr__(self, "nodes", dict(self.nodes))
        object.__setattr__(self, "relations", tuple(self.relations))

    def skeleton(self, phon: str = "*") -> PTD:
        """The template as a description, with a placeholder anchor form."""
        return _instantiate(self, "0", phon)


@dataclass(frozen=True)
class Grammar:
    signature: FeatureSignature
    templates: Mapping[str, Template]
    contractions: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "templates", dict(self.templates))
        object.__setattr__(
            self, "contractions", {k: tuple(v) for k, v in dict(self.contractions).items()}
        )

    def active_keys(self) -> list:
        """All (feature name, value) pairs active somewhere in the grammar."""
        keys = set()
        for template in self.templates.values():
            for pfs, _ in template.nodes.values():
                for feat in pfs:
                    if feat.polarity in (Polarity.POSITIVE, Polarity.NEGATIVE):
                        for value in feat.values:
                            keys.add((feat.name, value))
        return sorted(keys)


@dataclass(frozen=True)
class Lexicon:
    entries: Mapping[str, tuple]  # word -> tuple of usages (each a dict)

    def __post_init__(self):
        object.__setattr__(
            self, "entries", {w: tuple(dict(u) for u in us) for w, us in dict(self.entries).items()}
        )

    def usages(self, word: str) -> tuple:
        return self.entries.get(word, ())


# --------------------------------------------------------------------------
# document parsing


def _parse_relation(entry: Sequence, nodes: Mapping, signature: FeatureSignature):
    if not entry or entry[0] not in ("dom", "ldom", "prec", "lprec", "arity"):
        raise ParseError(f"bad relation entry: {entry!r}")
    kind = entry[0]
    if kind == "dom":
        if len(entry) == 3:
            return Dom(entry[1], entry[2])
        if len(entry) == 4 and entry[3] in ("any", "leftmost", "rightmost"):
            return Dom(entry[1], entry[2], entry[3])
    elif kind == "ldom":
        if len(entry) == 3:
            return LDom(entry[1], entry[2])
        if len(entry) == 4:
            return LDom(entry[1], entry[2], parse_filter(signature, entry[3]))
    elif kind == "prec" and len(entry) == 3:
        return Prec(entry[1], entry[2])
    elif kind == "lprec" and len(entry) == 3:
        return LPrec(entry[1], entry[2])
    elif kind == "arity" and len(entry) == 3:
        return Arity(entry[1], frozenset(entry[2]))
    raise ParseError(f"bad {kind} relation entry: {entry!r}")


def _parse_template(name: str, data: Mapping, signature: FeatureSignature) -> Template:
    if "nodes" not in data or "anchor" not in data:
        raise ParseError(f"template {name!r}: missing 'nodes' or 'anchor'")
    anchor_node = data["anchor"]
    nodes = {}
    for node_name in sorted(data["nodes"]):
        spec = data["nodes"][node_name] or {}
        feats = {}
        for fname in sorted(spec.get("features", {})):
            try:
                feats[fname] = parse_feature(signature, fname, spec["features"][fname])
            except SignatureError as exc:
                raise ValidationError(f"template {name!r}, node {node_name!r}: {exc}") from exc
        type_name = spec.get("type", "default")
        if type_name not in _NODE_TYPES:
            raise ParseError(f"template {name!r}, node {node_name!r}: bad type {type_name!r}")
        ntype = _NODE_TYPES[type_name]
        if node_name == anchor_node and type_name != "default":
            raise ParseError(f"template {name!r}: anchor slot must have default type")
        nodes[node_name] = (PolarizedFeatureStructure(feats), ntype)
    if anchor_node not in nodes:
        raise ParseError(f"template {name!r}: anchor {anchor_node!r} is not a node")
    relations = tuple(
        _parse_relation(entry, nodes, signature) for entry in data.get("relations", ())
    )
    try:
        interface = parse_filter(signature, data.get("interface", {}))
    except SignatureError as exc:
        raise ValidationError(f"template {name!r}: {exc}") from exc
    template = Template(name, nodes, relations, interface, anchor_node)

    verdict = validate_iptd(template.skeleton())
    if not verdict.ok:
        details = "; ".join(f"{tag} {list(ids)}: {msg}" for tag, ids, msg in verdict.violations)
        raise ValidationError(f"template {name!r} is not a well-formed description: {details}")
    return template


def loads_grammar(text: str) -> Grammar:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict) or "signature" not in data:
        raise ParseError("grammar document must be an object with a 'signature' section")
    try:
        signature = FeatureSignature(
            {name: frozenset(values) for name, values in data["signature"].items()}
        )
    except SignatureError as exc:
        raise ValidationError(str(exc)) from exc
    templates = {}
    for name in sorted(data.get("templates", {})):
        templates[name] = _parse_template(name, data["templates"][name], signature)
    contractions = {}
    for form in sorted(data.get("contractions", {})):
        expansion = data["contractions"][form]
        if not isinstance(expansion, list) or len(expansion) < 2:
            raise ParseError(f"contraction {form!r} must expand to at least two words")
        contractions[form] = tuple(expansion)
    return Grammar(signature, templates, contractions)


def load_grammar(path) -> Grammar:
    with open(path, "r", encoding="utf-8") as handle:
        return loads_grammar(handle.read())


def grammar_document(grammar: Grammar) -> dict:
    """Canonical plain-data form of a grammar."""
    sig = grammar.signature
    doc: dict = {"signature": {n: sorted(sig.domain(n)) for n in sorted(sig.names)}}
    doc["contractions"] = {f: list(ws) for f, ws in sorted(grammar.contractions.items())}
    templates: dict = {}
    for name in sorted(grammar.templates):
        template = grammar.templates[name]
        nodes: dict = {}
        for node_name in sorted(template.nodes):
            pfs, ntype = template.nodes[node_name]
            entry: dict = {}
            if ntype.kind != "default":
                entry["type"] = ntype.kind
            feats = {f.name: unparse_feature(f, sig) for f in pfs}
            if feats:
                entry["features"] = dict(sorted(feats.items()))
            nodes[node_name] = entry
        relations = []
        for rel in template.relations:
            if isinstance(rel, Dom):
                relations.append(["dom", rel.mother, rel.daughter] + ([rel.pos] if rel.pos != "any" else []))
            elif isinstance(rel, LDom):
                entry = ["ldom", rel.mother, rel.daughter]
                if rel.filter is not None:
                    entry.append(unparse_filter(rel.filter, sig))
                relations.append(entry)
            elif isinstance(rel, Prec):
                relations.append(["prec", rel.left, rel.right])
            elif isinstance(rel, LPrec):
                relations.append(["lprec", rel.left, rel.right])
            else:
                relations.append(["arity", rel.mother, sorted(rel.daughters)])
        templates[name] = {
            "anchor": template.anchor_node,
            "interface": unparse_filter(template.interface, sig),
            "nodes": nodes,
            "relations": relations,
        }
    doc["templates"] = templates
    return doc


def dumps_grammar(grammar: Grammar) -> str:
    return json.dumps(grammar_document(grammar), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def save_grammar(grammar: Grammar, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps_grammar(grammar))


def loads_lexicon(text: str, signature: Optional[FeatureSignature] = None) -> Lexicon:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict) or "words" not in data:
        raise ParseError("lexicon document must be an object with a 'words' section")
    entries = {}
    for word in sorted(data["words"]):
        if not word:
            raise ValidationError("lexicon contains an empty word form")
        usages = data["words"][word]
        if signature is not None:
            for usage in usages:
                for name, value in usage.items():
                    try:
                        signature.check_value(name, value)
                    except SignatureError as exc:
                        raise ValidationError(f"word {word!r}: {exc}") from exc
        entries[word] = tuple(dict(sorted(u.items())) for u in usages)
    return Lexicon(entries)


def load_lexicon(path, signature: Optional[FeatureSignature] = None) -> Lexicon:
    with open(path, "r", encoding="utf-8") as handle:
        return loads_lexicon(handle.read(), signature)


# --------------------------------------------------------------------------
# tokenization


@dataclass(frozen=True)
class TokenEdge:
    src: int
    dst: int
    word: str


@dataclass(frozen=True)
class TokenGraph:
    """Acyclic word graph: one source (0), one sink, tokenization ambiguity as branches."""

    edges: tuple
    sink: int

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))

    def outgoing(self, vertex: int) -> list:
        return sorted(
            (e for e in self.edges if e.src == vertex), key=lambda e: (e.dst, e.word)
        )

    def paths(self) -> list:
        """All source-to-sink paths as lists of edges."""
        out: list = []

        def walk(vertex: int, acc: list) -> None:
            if vertex == self.sink:
                out.append(list(acc))
                return
            for edge in self.outgoing(vertex):
                acc.append(edge)
                walk(edge.dst, acc)
                acc.pop()

        walk(0, [])
        return out


_TOKEN_RE = re.compile(r"[^\W\d_]+(?:['’][^\W\d_]+)*(?:['’])?|\d+|[^\w\s]", re.UNICODE)


def tokenize(sentence: str, contractions: Optional[Mapping[str, Sequence[str]]] = None) -> TokenGraph:
    """Segment a sentence into a token graph.

    Whitespace and punctuation delimit tokens (final punctuation is a
    token of its own); every form listed in ``contractions`` produces two
    parallel branches, the surface form and its expansion.
    """
    contractions = contractions or {}
    tokens = _TOKEN_RE.findall(sentence)
    if not tokens:
        raise EmptyInput("no tokens in input sentence")
    edges: list = []
    next_extra = len(tokens) + 1
    for i, token in enumerate(tokens):
        edges.append(TokenEdge(i, i + 1, token))
        if token in contractions:
            expansion = list(contractions[token])
            prev = i
            for word in expansion[:-1]:
                edges.append(TokenEdge(prev, next_extra, word))
                prev = next_extra
                next_extra += 1
            edges.append(TokenEdge(prev, i + 1, expansion[-1]))
    return TokenGraph(tuple(edges), len(tokens))


# --------------------------------------------------------------------------
# anchoring


def _instantiate(template: Template, instance: str, phon: str) -> PTD:
    nodes = {}
    rename = {}
    for node_name in sorted(template.nodes):
        pfs, ntype = template.nodes[node_name]
        node_id = f"{node_name}.{instance}"
        rename[node_name] = node_id
        feats = PolarizedFeatureStructure(
            {
                f.name: PolarizedFeature(
                    f.name, f.polarity, f.values, None if f.coref is None else f"{f.coref}@{instance}"
                )
                for f in pfs
            }
        )
        if node_name == template.anchor_node:
            ntype = NodeType.anchor(phon)
        nodes[node_id] = node_from_structure(node_id, feats, ntype, {(instance, node_name)})
    relations = set()
    for rel in template.relations:
        if isinstance(rel, Dom):
            relations.add(Dom(rename[rel.mother], rename[rel.daughter], rel.pos))
        elif isinstance(rel, LDom):
            relations.add(LDom(rename[rel.mother], rename[rel.daughter], rel.filter))
        elif isinstance(rel, Prec):
            relations.add(Prec(rename[rel.left], rename[rel.right]))
        elif isinstance(rel, LPrec):
            relations.add(LPrec(rename[rel.left], rename[rel.right]))
        else:
            relations.add(Arity(rename[rel.mother], frozenset(rename[d] for d in rel.daughters)))
    return PTD(nodes, frozenset(relations))


@dataclass(frozen=True)
class AnchoredIPTD:
    """A template instance anchored to a word occurrence."""

    instance: str
    word: str
    template: str
    usage: Mapping[str, str]
    ptd: PTD
    interface: PolarizedFeatureStructure

    def __post_init__(self):
        object.__setattr__(self, "usage", dict(self.usage))


def anchor(
    template: Template,
    word: str,
    usage: Mapping[str, str],
    instance: str = "1",
) -> Optional[AnchoredIPTD]:
    """Anchor a template to a word usage, or return None on interface mismatch.

    The instance gets fresh node ids and co-reference tags; interface
    features are narrowed to the usage values, and that narrowing is
    propagated to node features linked by a shared co-reference tag.
    """
    if not compatible(usage, template.interface):
        return None
    ptd = _instantiate(template, instance, word)

    narrowed = {}
    tag_values = {}
    for name, feat in sorted(template.interface.features.items()):
        values = feat.values
        if name in usage:
            values = frozenset({usage[name]})
        narrowed[name] = PolarizedFeature(name, Polarity.NEUTRAL, values, feat.coref)
        if feat.coref is not None:
            tag_values[f"{feat.coref}@{instance}"] = values

    if tag_values:
        nodes = dict(ptd.nodes)
        for node_id in list(nodes):
            dnode = nodes[node_id]
            feats = dict(dnode.features)
            changed = False
            for fname in list(feats):
                state = feats[fname]
                for tag in state.corefs:
                    if tag in tag_values:
                        values = state.values & tag_values[tag]
                        if not values:
                            return None
                        if values != state.values:
                            from dataclasses import replace

                            feats[fname] = replace(state, values=values)
                            changed = True
            if changed:
                nodes[node_id] = DescNode(dnode.id, feats, dnode.ntype, dnode.origins)
        ptd = PTD(nodes, ptd.relations)

    return AnchoredIPTD(
        instance, word, template.name, usage, ptd, PolarizedFeatureStructure(narrowed)
    )


# --------------------------------------------------------------------------
# lexical selection graphs


@dataclass(frozen=True, eq=False)
class SelectionEdge:
    src: int
    dst: int
    iptd: AnchoredIPTD


@dataclass(frozen=True)
class SelectionGraph:
    """Acyclic graph whose source-to-sink paths are the lexical selections."""

    edges: tuple
    sink: int
    unknown_words: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "unknown_words", tuple(self.unknown_words))

    def outgoing(self, vertex: int) -> list:
        return sorted(
            (e for e in self.edges if e.src == vertex),
            key=lambda e: (e.dst, e.iptd.word, e.iptd.template, _usage_key(e.iptd.usage)),
        )

    def selections(self, cap: Optional[int] = None) -> list:
        """Source-to-sink paths as lists of anchored instances (deterministic order)."""
        out: list = []

        def walk(vertex: int, acc: list) -> bool:
            if cap is not None and len(out) >= cap:
                return False
            if vertex == self.sink:
                out.append([e.iptd for e in acc])
                return True
            for edge in self.outgoing(vertex):
                acc.append(edge)
                more = walk(edge.dst, acc)
                acc.pop()
                if not more:
                    return False
            return True

        walk(0, [])
        return out

    def path_count(self) -> int:
        counts = {self.sink: 1}

        def count(vertex: int) -> int:
            if vertex not in counts:
                counts[vertex] = sum(count(e.dst) for e in self.outgoing(vertex))
            return counts[vertex]

        return count(0)


def _usage_key(usage: Mapping[str, str]) -> str:
    return ";".join(f"{k}={v}" for k, v in sorted(usage.items()))


def build_selection_graph(tg: TokenGraph, lexicon: Lexicon, grammar: Grammar) -> SelectionGraph:
    """One selection edge per successful (usage, template) anchoring per token.

    Words with zero anchorings are reported in ``unknown_words``; they
    simply contribute no edges, so downstream stages report no parse.
    """
    edges: list = []
    unknown: list = []
    for tedge in sorted(tg.edges, key=lambda e: (e.src, e.dst, e.word)):
        instance = str(tedge.src + 1)
        found = False
        for usage in lexicon.usages(tedge.word):
            for tname in sorted(grammar.templates):
                inst = anchor(grammar.templates[tname], tedge.word, usage, instance)
                if inst is not None:
                    edges.append(SelectionEdge(tedge.src, tedge.dst, inst))
                    found = True
        if not found and tedge.word not in grammar.contractions:
            unknown.append(tedge.word)
    return SelectionGraph(tuple(edges), tg.sink, tuple(sorted(set(unknown))))
