"""Binary decision trees as prefix-closed maps from 0/1 node paths to constraints.

A node path is a string over {'0', '1'}; the empty string is the root.
The class of a non-root node is its last bit, so the positive region of
a tree is the union of the regions of its leaves ending in '1'. Trees
are immutable values: `split_leaf` returns a new tree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import DocumentParseError, DomainError, TreeStructureError
from .features import (
    And,
    CandidateSplit,
    Constraint,
    Example,
    FeatureSpace,
    Not,
    Or,
    TRUE,
    FALSE,
    _Const,
    conjoin,
    format_split,
    satisfies,
    satisfies_all,
)

NodePath = str

TREE_FORMAT = "pactree-tree"
TREE_VERSION = 1

#: Fixed metadata slots carried by serialized trees.
META_KEYS = ("feature_space_id", "epsilon", "delta", "k", "m", "n", "seed", "model_id")


def node_class(path: NodePath) -> int:
    """Class of a node: its last bit. The bare root counts as negative."""
    return int(path[-1]) if path else 0


@dataclass(frozen=True)
class DecisionTree:
    """Relation from node paths to (possibly empty) constraint sets."""

    nodes: dict[NodePath, tuple[Constraint, ...]]

    def __post_init__(self):
        nodes = dict(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if "" not in nodes:
            raise TreeStructureError("tree has no root node")
        for path in nodes:
            if any(ch not in "01" for ch in path):
                raise TreeStructureError(f"bad node path {path!r}")
            if path and path[:-1] not in nodes:
                raise TreeStructureError(f"node {path!r} has no parent in the tree")
        for path, constraints in nodes.items():
            zero, one = path + "0" in nodes, path + "1" in nodes
            if zero != one:
                missing = path + ("0" if one else "1")
                raise TreeStructureError(f"node {path!r} is missing child {missing!r}")
            if zero and not constraints:
                raise TreeStructureError(f"internal node {path!r} has no constraint")
            if not zero and constraints:
                raise TreeStructureError(f"leaf {path!r} carries constraints")

    # -- structure ---------------------------------------------------------

    @classmethod
    def root_only(cls) -> "DecisionTree":
        return cls({"": ()})

    def __contains__(self, path: NodePath) -> bool:
        return path in self.nodes

    def is_leaf(self, path: NodePath) -> bool:
        self._require(path)
        return path + "0" not in self.nodes

    @property
    def size(self) -> int:
        """Number of internal nodes."""
        return sum(1 for p in self.nodes if p + "0" in self.nodes)

    def leaves(self) -> list[NodePath]:
        return sorted(
            (p for p in self.nodes if p + "0" not in self.nodes),
            key=lambda p: (len(p), p),
        )

    def internal_nodes(self) -> list[NodePath]:
        return sorted(
            (p for p in self.nodes if p + "0" in self.nodes),
            key=lambda p: (len(p), p),
        )

    def _require(self, path: NodePath) -> None:
        if path not in self.nodes:
            raise TreeStructureError(f"unknown node {path!r}")

    def node_constraints(self, path: NodePath) -> tuple[Constraint, ...]:
        self._require(path)
        return self.nodes[path]

    def node_formula(self, path: NodePath) -> Constraint:
        """The constraint set of a node read as a single conjunction."""
        return conjoin(self.node_constraints(path))

    # -- semantics ----------------------------------------------------------

    def constraints_to_reach(self, path: NodePath) -> tuple[Constraint, ...]:
        """All constraints an example must satisfy to reach `path`.

        Built inductively from the root; each step prepends either the
        node's constraints (bit 1) or their negated conjunction (bit 0).
        """
        self._require(path)
        acc: tuple[Constraint, ...] = ()
        current = ""
        for bit in path:
            constraints = self.nodes[current]
            if bit == "1":
                acc = tuple(constraints) + acc
            else:
                acc = (Not(conjoin(constraints)),) + acc
            current += bit
        return acc

    def reached_leaf(self, example: Example) -> NodePath:
        """The unique leaf whose path constraints the example satisfies."""
        path = ""
        while path + "0" in self.nodes:
            test = satisfies_all(example, self.nodes[path])
            path += "1" if test else "0"
        return path

    def classify(self, example: Example) -> int:
        """1 iff the example reaches a leaf whose path ends in 1, else 0."""
        return node_class(self.reached_leaf(example))

    def split_leaf(
        self, leaf: NodePath, constraint: Constraint | Sequence[Constraint]
    ) -> "DecisionTree":
        """Turn a leaf into an internal node with two fresh leaf children."""
        self._require(leaf)
        if not self.is_leaf(leaf):
            raise TreeStructureError(f"node {leaf!r} is internal, cannot split")
        constraints = (
            tuple(constraint) if isinstance(constraint, (tuple, list)) else (constraint,)
        )
        if not constraints:
            raise TreeStructureError("cannot split on an empty constraint set")
        nodes = dict(self.nodes)
        nodes[leaf] = constraints
        nodes[leaf + "0"] = ()
        nodes[leaf + "1"] = ()
        return DecisionTree(nodes)


# -- rules ------------------------------------------------------------------


@dataclass(frozen=True)
class Literal:
    """A candidate split or its negation."""

    split: CandidateSplit
    positive: bool = True

    def holds(self, example: Example) -> bool:
        return self.split.holds(example) == self.positive


@dataclass(frozen=True)
class Rule:
    """Conjunction of literals implying a class bit."""

    literals: tuple[Literal, ...]
    label: int

    def matches(self, example: Example) -> bool:
        return all(lit.holds(example) for lit in self.literals)


def _flatten_literal(constraint: Constraint) -> Literal:
    positive = True
    while isinstance(constraint, Not):
        positive = not positive
        constraint = constraint.inner
    if isinstance(constraint, CandidateSplit):
        return Literal(constraint, positive)
    raise DomainError(f"constraint does not flatten to a literal: {constraint!r}")


def extract_rules(tree: DecisionTree) -> list[Rule]:
    """One rule per leaf: path constraints as literals, class as consequent.

    Only defined for trees whose node constraints are single candidate
    splits (possibly negated), which is all the extraction algorithms
    ever produce.
    """
    rules = []
    for leaf in tree.leaves():
        literals = tuple(
            _flatten_literal(c) for c in tree.constraints_to_reach(leaf)
        )
        rules.append(Rule(literals, node_class(leaf)))
    return rules


def simplify_rule_one_hot(rule: Rule, groups: Iterable[Iterable[int]]) -> Rule:
    """Drop negative literals implied by a positive literal of the same one-hot group.

    Within a one-hot group, `f = 1` entails `g = 1` is false for every other
    member g, so literals of the form ¬(g = 1) are redundant. Opt-in: rules
    are never simplified silently.
    """
    groups = [frozenset(g) for g in groups]
    positives = {
        lit.split.feature_index
        for lit in rule.literals
        if lit.positive and lit.split.comparator == "=" and lit.split.value == 1
    }
    covered: set[int] = set()
    for group in groups:
        if positives & group:
            covered |= group
    kept = []
    seen = set()
    for lit in rule.literals:
        if (
            not lit.positive
            and lit.split.comparator == "="
            and lit.split.value == 1
            and lit.split.feature_index in covered
            and lit.split.feature_index not in positives
        ):
            continue
        if lit in seen:
            continue
        seen.add(lit)
        kept.append(lit)
    return Rule(tuple(kept), rule.label)


def format_rule(rule: Rule, space: FeatureSpace | None = None) -> str:
    if not rule.literals:
        antecedent = "true"
    else:
        parts = []
        for lit in rule.literals:
            text = format_split(lit.split, space)
            parts.append(text if lit.positive else f"not ({text})")
        antecedent = " and ".join(parts)
    return f"{antecedent} -> {rule.label}"


# -- serialization ------------------------------------------------------------


def _constraint_to_doc(constraint: Constraint):
    if isinstance(constraint, CandidateSplit):
        return {
            "split": {
                "feature": constraint.feature_index,
                "op": constraint.comparator,
                "value": constraint.value,
            }
        }
    if isinstance(constraint, Not):
        return {"not": _constraint_to_doc(constraint.inner)}
    if isinstance(constraint, And):
        return {"and": [_constraint_to_doc(constraint.left), _constraint_to_doc(constraint.right)]}
    if isinstance(constraint, Or):
        return {"or": [_constraint_to_doc(constraint.left), _constraint_to_doc(constraint.right)]}
    if isinstance(constraint, _Const):
        return {"const": constraint.value}
    raise DomainError(f"cannot serialize constraint {constraint!r}")


def _constraint_from_doc(doc, where: str) -> Constraint:
    if not isinstance(doc, dict) or len(doc) != 1:
        raise DocumentParseError(f"bad constraint at node {where!r}: {doc!r}")
    kind, body = next(iter(doc.items()))
    if kind == "split":
        try:
            return CandidateSplit(body["feature"], body["op"], body["value"])
        except (TypeError, KeyError, DomainError) as exc:
            raise DocumentParseError(f"bad split at node {where!r}: {exc}") from exc
    if kind == "not":
        return Not(_constraint_from_doc(body, where))
    if kind in ("and", "or"):
        if not isinstance(body, list) or len(body) != 2:
            raise DocumentParseError(f"{kind} needs two operands at node {where!r}")
        left, right = (_constraint_from_doc(b, where) for b in body)
        return And(left, right) if kind == "and" else Or(left, right)
    if kind == "const":
        return TRUE if body else FALSE
    raise DocumentParseError(f"unknown constraint kind {kind!r} at node {where!r}")


def tree_to_document(tree: DecisionTree, meta: Mapping | None = None) -> dict:
    meta = dict(meta or {})
    unknown = set(meta) - set(META_KEYS)
    if unknown:
        raise DomainError(f"unknown tree metadata keys: {sorted(unknown)}")
    return {
        "format": TREE_FORMAT,
        "version": TREE_VERSION,
        "meta": {key: meta.get(key) for key in META_KEYS},
        "nodes": [
            {
                "path": path,
                "constraints": [_constraint_to_doc(c) for c in tree.nodes[path]],
            }
            for path in sorted(tree.nodes, key=lambda p: (len(p), p))
        ],
    }


def tree_from_document(doc: dict) -> tuple[DecisionTree, dict]:
    if not isinstance(doc, dict):
        raise DocumentParseError("tree document must be an object")
    if doc.get("format") != TREE_FORMAT:
        raise DocumentParseError(f"not a {TREE_FORMAT} document")
    if doc.get("version") != TREE_VERSION:
        raise DocumentParseError(f"unsupported document version {doc.get('version')!r}")
    entries = doc.get("nodes")
    if not isinstance(entries, list):
        raise DocumentParseError("document has no node list")
    nodes: dict[NodePath, tuple[Constraint, ...]] = {}
    for entry in entries:
        path = entry.get("path") if isinstance(entry, dict) else None
        if not isinstance(path, str) or any(ch not in "01" for ch in path):
            raise DocumentParseError(f"bad node path in document: {path!r}")
        if path in nodes:
            raise DocumentParseError(f"duplicate node {path!r}")
        constraints = entry.get("constraints", [])
        if not isinstance(constraints, list):
            raise DocumentParseError(f"bad constraint list at node {path!r}")
        nodes[path] = tuple(_constraint_from_doc(c, path) for c in constraints)
    try:
        tree = DecisionTree(nodes)
    except TreeStructureError as exc:
        raise DocumentParseError(str(exc)) from exc
    meta = doc.get("meta") or {}
    if not isinstance(meta, dict):
        raise DocumentParseError("meta must be an object")
    return tree, {key: meta.get(key) for key in META_KEYS}


def dumps_tree(tree: DecisionTree, meta: Mapping | None = None) -> str:
    return json.dumps(tree_to_document(tree, meta), indent=2) + "\n"


def loads_tree(text: str) -> tuple[DecisionTree, dict]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentParseError(f"invalid JSON: {exc}") from exc
    return tree_from_document(doc)


def save_tree(tree: DecisionTree, path: str | Path, meta: Mapping | None = None) -> None:
    Path(path).write_text(dumps_tree(tree, meta), encoding="utf-8")


def load_tree(path: str | Path) -> tuple[DecisionTree, dict]:
    return loads_tree(Path(path).read_text(encoding="utf-8"))


# -- human-readable rendering -------------------------------------------------


def _format_constraints(constraints: tuple[Constraint, ...], space) -> str:
    def fmt(c: Constraint) -> str:
        if isinstance(c, CandidateSplit):
            return format_split(c, space)
        if isinstance(c, Not):
            return f"not ({fmt(c.inner)})"
        if isinstance(c, And):
            return f"({fmt(c.left)} and {fmt(c.right)})"
        if isinstance(c, Or):
            return f"({fmt(c.left)} or {fmt(c.right)})"
        if isinstance(c, _Const):
            return "true" if c.value else "false"
        return repr(c)

    return " and ".join(fmt(c) for c in constraints)


def render_tree(tree: DecisionTree, space: FeatureSpace | None = None) -> str:
    """Indented text rendering: each internal node with its yes/no branches."""

    lines: list[str] = []

    def walk(path: NodePath, prefix: str, label: str) -> None:
        if tree.is_leaf(path):
            lines.append(f"{prefix}{label}class {node_class(path)}")
            return
        test = _format_constraints(tree.nodes[path], space)
        lines.append(f"{prefix}{label}{test}?")
        child_prefix = prefix + ("   " if label else "")
        walk(path + "1", child_prefix, "├─ yes: ")
        walk(path + "0", child_prefix, "└─ no:  ")

    walk("", "", "")
    return "\n".join(lines)
