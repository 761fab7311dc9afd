"""Feature signatures, polarities and polarized feature structures.

Features live in a finite signature: a set of feature names, each with a
finite non-empty domain of atomic values.  In tree descriptions every
feature carries a polarity and a value set (a disjunction of atomic
values); in final syntactic trees features are plain name/value pairs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional


class Polarity(enum.Enum):
    """Polarity of a feature in a tree description.

    Positive features are available resources, negative features are
    needed resources; the two are the *active* polarities.  A virtual
    feature waits for unification with a non-virtual one, and a neutral
    feature only acts as a filter.
    """

    POSITIVE = "->"
    NEGATIVE = "<-"
    VIRTUAL = "~"
    NEUTRAL = "="

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Polarity.{self.name}"


#: Stable sort order for polarities (used for canonical serialization).
POLARITY_ORDER = {
    Polarity.POSITIVE: 0,
    Polarity.NEGATIVE: 1,
    Polarity.VIRTUAL: 2,
    Polarity.NEUTRAL: 3,
}


class ValueClash(Exception):
    """Raised when a value-set intersection is empty."""

    def __init__(self, name: str, a: frozenset, b: frozenset):
        self.name = name
        super().__init__(
            f"empty intersection for feature {name!r}: "
            f"{sorted(a)} vs {sorted(b)}"
        )


class SignatureError(ValueError):
    """Raised for features or values that are not declared in the signature."""


@dataclass(frozen=True)
class FeatureSignature:
    """Finite map from feature names to their domains of atomic values."""

    domains: Mapping[str, frozenset]

    def __post_init__(self):
        frozen = {name: frozenset(vals) for name, vals in self.domains.items()}
        for name, vals in frozen.items():
            if not vals:
                raise SignatureError(f"feature {name!r} has an empty domain")
        object.__setattr__(self, "domains", frozen)

    @property
    def names(self) -> frozenset:
        return frozenset(self.domains)

    def domain(self, name: str) -> frozenset:
        if name not in self.domains:
            raise SignatureError(f"unknown feature name {name!r}")
        return self.domains[name]

    def check_value(self, name: str, value: str) -> None:
        if value not in self.domain(name):
            raise SignatureError(f"value {value!r} not in domain of {name!r}")

    def value_set(self, name: str, values: Iterable[str] | None) -> frozenset:
        """Build a value set for ``name``; ``None`` is the wildcard (full domain)."""
        domain = self.domain(name)
        if values is None:
            return domain
        vs = frozenset(values)
        if not vs:
            raise SignatureError(f"empty value set for feature {name!r}")
        extra = vs - domain
        if extra:
            raise SignatureError(
                f"values {sorted(extra)} not in domain of {name!r}"
            )
        return vs


@dataclass(frozen=True)
class PolarizedFeature:
    """A feature name with polarity, value set and optional co-reference tag."""

    name: str
    polarity: Polarity
    values: frozenset
    coref: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "values", frozenset(self.values))
        if not self.values:
            raise ValueError(f"feature {self.name!r} built with empty value set")


@dataclass(frozen=True)
class PolarizedFeatureStructure:
    """Set of polarized features, at most one per feature name."""

    features: Mapping[str, PolarizedFeature] = field(default_factory=dict)

    def __post_init__(self):
        feats = dict(self.features)
        for name, feat in feats.items():
            if feat.name != name:
                raise ValueError(f"feature keyed {name!r} is named {feat.name!r}")
        object.__setattr__(self, "features", feats)

    @classmethod
    def of(cls, *feats: PolarizedFeature) -> "PolarizedFeatureStructure":
        mapping = {}
        for feat in feats:
            if feat.name in mapping:
                raise ValueError(f"duplicate feature name {feat.name!r}")
            mapping[feat.name] = feat
        return cls(mapping)

    def __iter__(self):
        return iter(self.features.values())

    def __hash__(self):
        return hash(tuple(sorted(self.features.items())))

    def get(self, name: str) -> Optional[PolarizedFeature]:
        return self.features.get(name)


def filtering_structure(pfs: PolarizedFeatureStructure) -> PolarizedFeatureStructure:
    """Validate that ``pfs`` is usable as a filter (all polarities neutral)."""
    for feat in pfs:
        if feat.polarity is not Polarity.NEUTRAL:
            raise ValueError(
                f"filtering structure has non-neutral feature {feat.name!r}"
            )
    return pfs


def is_active(p: Polarity) -> bool:
    """True for the positive and negative polarities."""
    return p is Polarity.POSITIVE or p is Polarity.NEGATIVE


def globally_saturated(polarities: Iterable[Polarity]) -> bool:
    """Decide whether a multiset of polarities is globally saturated.

    A multiset is globally saturated if it holds exactly one positive and
    one negative polarity, or no active polarity at all and at least one
    neutral one.  The empty multiset is saturated vacuously: no feature
    occurrence means no constraint.
    """
    pos = neg = neutral = total = 0
    for p in polarities:
        total += 1
        if p is Polarity.POSITIVE:
            pos += 1
        elif p is Polarity.NEGATIVE:
            neg += 1
        elif p is Polarity.NEUTRAL:
            neutral += 1
    if total == 0:
        return True
    if pos == 1 and neg == 1:
        return True
    return pos == 0 and neg == 0 and neutral >= 1


def compatible(
    phi: Mapping[str, str], psi: PolarizedFeatureStructure
) -> bool:
    """Compatibility of an atomic feature structure with a filter.

    For every feature name defined on both sides, the atomic value must
    belong to the filter's disjunction.  Names present on one side only
    impose no constraint.
    """
    for name, feat in psi.features.items():
        if name in phi and phi[name] not in feat.values:
            return False
    return True


def intersect_values(name: str, a: frozenset, b: frozenset) -> frozenset:
    """Intersect two value sets for the same feature name.

    An empty intersection is a clash, never a value set: it raises
    :class:`ValueClash`.
    """
    out = frozenset(a) & frozenset(b)
    if not out:
        raise ValueClash(name, frozenset(a), frozenset(b))
    return out
