"""Core data model for dictionary-entry trees and the feature propagation engine.

An entry is a tree of nodes. Each node carries an ordered list of properties
(feature-value pairs, values atomic or composite), optional groups of
alternatives, and an ordered list of child nodes. Features belong to one of
three classes that determine how values travel down the tree:

* cumulative: values accumulate along a root-to-node path,
* overwriting: a single value at a time; a deeper value replaces the
  inherited one,
* local: the value holds only at the node that carries it.

Dependency rules tie a dependent feature to a required value of an
overwriting governor feature; overwriting the governor to a different value
blocks inherited values of the dependent.

Everything here is an immutable value; the functions are pure and safe to
call concurrently.
"""

from __future__ import annotations

import logging
import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping, Sequence, Union

log = logging.getLogger(__name__)

NodePath = tuple[int, ...]

_FEATURE_NAME_RE = re.compile(r"[a-z0-9][a-z0-9-]*")


class LexitreeError(Exception):
    """Base class for errors raised by this package."""


class OverwriteConflict(LexitreeError):
    """An overwriting feature would carry two values at a single node."""

    def __init__(self, feature: "FeatureName", existing: "FeatureValue", new: "FeatureValue"):
        self.feature = feature
        self.existing = existing
        self.new = new
        super().__init__(
            f"overwriting feature {feature!r} already set at this node "
            f"({format_value(existing)!r} vs {format_value(new)!r})"
        )


class PathOutOfRange(LexitreeError):
    """A node path does not resolve inside the tree."""

    def __init__(self, path: Sequence[int], step: int):
        self.path = tuple(path)
        self.step = step
        super().__init__(f"path {'.'.join(map(str, path)) or '(root)'} invalid at step {step}")


class UnexpandedAlternatives(LexitreeError):
    """The operation requires a tree with no alternative groups."""

    def __init__(self, path: NodePath):
        self.path = path
        super().__init__(
            f"node {'.'.join(map(str, path)) or '(root)'} still carries alternatives; "
            "expand them first"
        )


class FeatureName(str):
    """A feature identifier. Lowercase token of letters, digits, and hyphens.

    Names compare case-insensitively by construction: the lowercase form is
    what gets stored.
    """

    def __new__(cls, name: str) -> "FeatureName":
        folded = name.lower()
        if not _FEATURE_NAME_RE.fullmatch(folded):
            raise ValueError(f"invalid feature name {name!r}")
        return super().__new__(cls, folded)


@dataclass(frozen=True)
class Atomic:
    """A plain text feature value. Empty text is allowed (empty source element)."""

    text: str


@dataclass(frozen=True)
class Composite:
    """A feature value that is itself an ordered list of properties."""

    properties: tuple["Property", ...]

    def __init__(self, properties: Iterable["Property"] = ()):
        object.__setattr__(self, "properties", tuple(properties))


FeatureValue = Union[Atomic, Composite]


@dataclass(frozen=True)
class Property:
    """One feature-value pair, plus carried-verbatim attributes.

    Attributes never take part in propagation decisions; they ride along with
    the property wherever it goes.
    """

    feature: FeatureName
    value: FeatureValue
    attrs: tuple[tuple[str, str], ...] = ()

    def __init__(
        self,
        feature: FeatureName | str,
        value: FeatureValue | str,
        attrs: Iterable[tuple[str, str]] = (),
    ):
        object.__setattr__(self, "feature", FeatureName(feature))
        if isinstance(value, str):
            value = Atomic(value)
        object.__setattr__(self, "value", value)
        attrs = tuple((str(k), str(v)) for k, v in attrs)
        names = [k for k, _ in attrs]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate attribute names on {self.feature!r}: {names}")
        for name in names:
            if not name or any(c.isspace() for c in name):
                raise ValueError(f"bad attribute name {name!r} on {self.feature!r}")
        object.__setattr__(self, "attrs", attrs)


@dataclass(frozen=True)
class AltGroup:
    """Parallel alternatives: at least two, each a nonempty property bundle."""

    alternatives: tuple[tuple[Property, ...], ...]

    def __init__(self, alternatives: Iterable[Iterable[Property]]):
        alts = tuple(tuple(a) for a in alternatives)
        if len(alts) < 2:
            raise ValueError("an alternative group needs at least two alternatives")
        if any(not a for a in alts):
            raise ValueError("alternatives must be nonempty")
        object.__setattr__(self, "alternatives", alts)


@dataclass(frozen=True)
class Node:
    """One partition of an entry's lexical space.

    A node is a leaf when it has no children. The node-local constraint that
    an overwriting feature appears at most once is registry-relative, so it is
    enforced by attach_property / check_consistency rather than here.
    """

    properties: tuple[Property, ...] = ()
    alt_groups: tuple[AltGroup, ...] = ()
    children: tuple["Node", ...] = ()

    def __init__(
        self,
        properties: Iterable[Property] = (),
        alt_groups: Iterable[AltGroup] = (),
        children: Iterable["Node"] = (),
    ):
        object.__setattr__(self, "properties", tuple(properties))
        object.__setattr__(self, "alt_groups", tuple(alt_groups))
        object.__setattr__(self, "children", tuple(children))

    def is_leaf(self) -> bool:
        return not self.children


class FeatureClass(Enum):
    CUMULATIVE = "cum"
    OVERWRITING = "over"
    LOCAL = "loc"


@dataclass(frozen=True)
class DependencyRule:
    """`dependent` is licensed only while `governor` effectively equals `required_value`.

    Governors must be overwriting features; the rule blocks inherited values
    of the dependent the moment the governor is overwritten to anything else.
    """

    dependent: FeatureName
    governor: FeatureName
    required_value: str

    def __init__(self, dependent: FeatureName | str, governor: FeatureName | str, required_value: str):
        object.__setattr__(self, "dependent", FeatureName(dependent))
        object.__setattr__(self, "governor", FeatureName(governor))
        object.__setattr__(self, "required_value", required_value)


@dataclass(frozen=True)
class FeatureClassRegistry:
    """Feature classifications plus dependency rules.

    Unregistered features fall back to `default_class` (local by default:
    the inert choice; a warning is logged the first time such a feature is
    seen so silently non-propagating data does not go unnoticed).
    """

    classes: Mapping[FeatureName, FeatureClass] = field(default_factory=dict)
    rules: tuple[DependencyRule, ...] = ()
    default_class: FeatureClass = FeatureClass.LOCAL
    _warned: set = field(default_factory=set, compare=False, repr=False)

    def __init__(
        self,
        classes: Mapping[FeatureName | str, FeatureClass] | Iterable[tuple[FeatureName | str, FeatureClass]] = (),
        rules: Iterable[DependencyRule] = (),
        default_class: FeatureClass = FeatureClass.LOCAL,
    ):
        items = classes.items() if isinstance(classes, Mapping) else classes
        mapping = {FeatureName(f): c for f, c in items}
        rules = tuple(rules)
        for rule in rules:
            if mapping.get(rule.governor) is not FeatureClass.OVERWRITING:
                raise ValueError(
                    f"dependency rule governor {rule.governor!r} is not an overwriting feature"
                )
        object.__setattr__(self, "classes", mapping)
        object.__setattr__(self, "rules", rules)
        object.__setattr__(self, "default_class", default_class)
        object.__setattr__(self, "_warned", set())

    def classify(self, feature: FeatureName | str) -> FeatureClass:
        feature = FeatureName(feature)
        cls = self.classes.get(feature)
        if cls is not None:
            return cls
        if feature not in self._warned:
            self._warned.add(feature)
            log.warning(
                "feature %r is not registered; treating it as %s", str(feature), self.default_class.value
            )
        return self.default_class


@dataclass(frozen=True)
class EffectiveFeatureSet:
    """All properties holding at one node along one root-to-node path.

    `depths[i]` is the depth (0 = root) of the node that contributed
    `entries[i]`. Cumulative entries sit in ancestor-first order; an
    overwriting feature occurs at most once; local entries always carry the
    endpoint's depth.
    """

    entries: tuple[Property, ...]
    depths: tuple[int, ...]

    def __init__(self, entries: Iterable[Property], depths: Iterable[int]):
        entries = tuple(entries)
        depths = tuple(depths)
        if len(entries) != len(depths):
            raise ValueError("entries and depths must have equal length")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "depths", depths)

    def __iter__(self) -> Iterator[Property]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def items(self) -> Iterator[tuple[Property, int]]:
        return iter(zip(self.entries, self.depths))

    def values(self, feature: FeatureName | str) -> tuple[FeatureValue, ...]:
        feature = FeatureName(feature)
        return tuple(p.value for p in self.entries if p.feature == feature)


# ---------------------------------------------------------------------------
# Violations reported by check_consistency


@dataclass(frozen=True)
class OverwriteViolation:
    """Two occurrences of one overwriting feature at a single node."""

    path: NodePath
    feature: FeatureName
    existing: FeatureValue
    conflicting: FeatureValue

    def describe(self) -> str:
        where = ".".join(map(str, self.path)) or "(root)"
        return (
            f"{where}: overwriting feature {str(self.feature)!r} appears twice "
            f"({format_value(self.existing)!r} vs {format_value(self.conflicting)!r})"
        )


@dataclass(frozen=True)
class DependencyViolation:
    """A dependent feature attached where its governor's effective value is wrong."""

    path: NodePath
    dependent: FeatureName
    governor: FeatureName
    required_value: str
    actual_value: str

    def describe(self) -> str:
        where = ".".join(map(str, self.path)) or "(root)"
        return (
            f"{where}: feature {str(self.dependent)!r} requires "
            f"{str(self.governor)!r}={self.required_value!r} but the effective value "
            f"is {self.actual_value!r}"
        )


Violation = Union[OverwriteViolation, DependencyViolation]


# ---------------------------------------------------------------------------
# Value comparison

def normalize_text(text: str) -> str:
    """NFC-normalize and trim. The comparison form for atomic values."""
    return unicodedata.normalize("NFC", text).strip()


def values_equal(a: FeatureValue, b: FeatureValue) -> bool:
    """Structural value equality with normalized atomic text."""
    if isinstance(a, Atomic) and isinstance(b, Atomic):
        return normalize_text(a.text) == normalize_text(b.text)
    if isinstance(a, Composite) and isinstance(b, Composite):
        return len(a.properties) == len(b.properties) and all(
            pa.feature == pb.feature and pa.attrs == pb.attrs and values_equal(pa.value, pb.value)
            for pa, pb in zip(a.properties, b.properties)
        )
    return False


def _matches_required(value: FeatureValue, required: str) -> bool:
    return isinstance(value, Atomic) and normalize_text(value.text) == normalize_text(required)


def format_value(value: FeatureValue) -> str:
    """Render a value for listings: atomic text, or `[f : v, ...]` for composites."""
    if isinstance(value, Atomic):
        return value.text
    inner = ", ".join(f"{str(p.feature)} : {format_value(p.value)}" for p in value.properties)
    return f"[{inner}]"


# ---------------------------------------------------------------------------
# Tree access

def resolve_path(root: Node, path: Sequence[int]) -> Node:
    """Follow child indices from the root; raise PathOutOfRange on a bad step."""
    node = root
    for step, index in enumerate(path):
        if not 0 <= index < len(node.children):
            raise PathOutOfRange(path, step)
        node = node.children[index]
    return node


def iter_nodes(root: Node) -> Iterator[tuple[NodePath, Node]]:
    """Yield (path, node) pairs in document (preorder) order."""
    stack: list[tuple[NodePath, Node]] = [((), root)]
    while stack:
        path, node = stack.pop()
        yield path, node
        for i in range(len(node.children) - 1, -1, -1):
            stack.append((path + (i,), node.children[i]))


def _require_alt_free(root: Node) -> None:
    for path, node in iter_nodes(root):
        if node.alt_groups:
            raise UnexpandedAlternatives(path)


# ---------------------------------------------------------------------------
# Operations

def attach_property(node: Node, prop: Property, registry: FeatureClassRegistry) -> Node:
    """Return `node` with `prop` appended.

    Rejects a second occurrence of an overwriting feature at the node, which
    keeps node-local value uniqueness enforced at build time.
    """
    if registry.classify(prop.feature) is FeatureClass.OVERWRITING:
        for existing in node.properties:
            if existing.feature == prop.feature:
                raise OverwriteConflict(prop.feature, existing.value, prop.value)
    return Node(node.properties + (prop,), node.alt_groups, node.children)


def effective_set(
    root: Node, path: Sequence[int], registry: FeatureClassRegistry
) -> EffectiveFeatureSet:
    """Compute the feature set holding at the endpoint of `path`.

    The walk visits root through endpoint and folds each node's properties in
    document order:

    * cumulative values append, with exact duplicates (feature, value, attrs)
      collapsed onto their first occurrence;
    * an overwriting value replaces the inherited entry for its feature and
      moves it to the overwriting node's position; re-specifying the value
      already in force is a no-op. Every effective (non-no-op) assignment
      whose value differs from a dependency rule's required value evicts the
      inherited entries of that rule's dependent feature;
    * local values appear only when the contributing node is the endpoint.

    Raises PathOutOfRange for an unresolvable path and OverwriteConflict when
    a visited node doubles up an overwriting feature.
    """
    chain = [root]
    node = root
    for step, index in enumerate(path):
        if not 0 <= index < len(node.children):
            raise PathOutOfRange(path, step)
        node = node.children[index]
        chain.append(node)
    endpoint = len(chain) - 1

    entries: list[Property] = []
    depths: list[int] = []
    for depth, current in enumerate(chain):
        seen_here: dict[FeatureName, Property] = {}
        for prop in current.properties:
            cls = registry.classify(prop.feature)
            if cls is FeatureClass.OVERWRITING:
                if prop.feature in seen_here:
                    raise OverwriteConflict(prop.feature, seen_here[prop.feature].value, prop.value)
                seen_here[prop.feature] = prop
                at = next((i for i, e in enumerate(entries) if e.feature == prop.feature), None)
                if (
                    at is not None
                    and entries[at].attrs == prop.attrs
                    and values_equal(entries[at].value, prop.value)
                ):
                    continue  # value already in force; nothing is overwritten
                if at is not None:
                    del entries[at]
                    del depths[at]
                entries.append(prop)
                depths.append(depth)
                for rule in registry.rules:
                    if rule.governor == prop.feature and not _matches_required(prop.value, rule.required_value):
                        keep = [
                            i
                            for i in range(len(entries))
                            if not (entries[i].feature == rule.dependent and depths[i] < depth)
                        ]
                        entries = [entries[i] for i in keep]
                        depths = [depths[i] for i in keep]
            elif cls is FeatureClass.CUMULATIVE:
                if any(
                    e.feature == prop.feature and e.attrs == prop.attrs and values_equal(e.value, prop.value)
                    for e in entries
                ):
                    continue
                entries.append(prop)
                depths.append(depth)
            else:  # LOCAL
                if depth == endpoint:
                    entries.append(prop)
                    depths.append(depth)
    return EffectiveFeatureSet(entries, depths)


def check_consistency(root: Node, registry: FeatureClassRegistry) -> list[Violation]:
    """Report constraint violations anywhere in the tree.

    Two kinds are checked: an overwriting feature carrying two values at one
    node, and a dependent feature attached at a node whose governor's
    effective value is present but different from the rule's required value.
    A governor with no effective value at all is not reported; there is no
    value to contradict.
    """
    violations: list[Violation] = []

    def walk(node: Node, path: NodePath, inherited: dict[FeatureName, FeatureValue]) -> None:
        env = dict(inherited)
        seen_here: dict[FeatureName, Property] = {}
        for prop in node.properties:
            if registry.classify(prop.feature) is not FeatureClass.OVERWRITING:
                continue
            if prop.feature in seen_here:
                violations.append(
                    OverwriteViolation(path, prop.feature, seen_here[prop.feature].value, prop.value)
                )
            else:
                seen_here[prop.feature] = prop
                env[prop.feature] = prop.value
        for rule in registry.rules:
            governor_value = env.get(rule.governor)
            if governor_value is None or _matches_required(governor_value, rule.required_value):
                continue
            for prop in node.properties:
                if prop.feature == rule.dependent:
                    violations.append(
                        DependencyViolation(
                            path,
                            rule.dependent,
                            rule.governor,
                            rule.required_value,
                            format_value(governor_value),
                        )
                    )
        for i, child in enumerate(node.children):
            walk(child, path + (i,), env)

    walk(root, (), {})
    return violations


def enumerate_traversals(root: Node) -> list[NodePath]:
    """One path per leaf, in left-to-right document order.

    The tree must contain no alternative groups; expand them first.
    """
    _require_alt_free(root)
    return [path for path, node in iter_nodes(root) if node.is_leaf()]


def partial_traversals(root: Node) -> list[NodePath]:
    """One path per node, root and leaves included, in document order."""
    _require_alt_free(root)
    return [path for path, _ in iter_nodes(root)]
