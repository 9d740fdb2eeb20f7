"""Hierarchical process trees: operators, node identities, coalition
substitution and bounded trace semantics.

A tree node is either an operator (Seq, Xor, And, Loop), an activity leaf,
or a silent tau leaf.  Tau leaves come in two flavors: *mined* taus that
belong to the discovered model, and *removed* taus that mark subtrees
excluded by a coalition.  The distinction carries semantics: in ``blocked``
mode a removed tau can never complete, in ``skip`` mode it behaves like a
mined tau.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterator, Mapping


class Op(str, Enum):
    SEQ = "Seq"
    XOR = "Xor"
    AND = "And"
    LOOP = "Loop"


class TauMode(str, Enum):
    """How a removed tau behaves: ``blocked`` never completes, ``skip``
    completes silently (making every coalition trivially satisfiable)."""

    BLOCKED = "blocked"
    SKIP = "skip"


@dataclass(frozen=True)
class NodeId:
    """Stable node identity: ``<Kind><arity>@<preorder>`` for operators
    (e.g. ``Seq2@18``), ``<label>@<preorder>`` for leaves."""

    text: str
    index: int


@dataclass(frozen=True)
class ProcessTree:
    op: Op | None = None
    label: str | None = None
    removed: bool = False
    children: tuple["ProcessTree", ...] = ()
    node_id: NodeId | None = None

    def __post_init__(self) -> None:
        if self.op is None:
            if self.children:
                raise ValueError("leaves have no children")
        elif self.op is Op.LOOP:
            if len(self.children) != 2:
                raise ValueError("Loop takes exactly two children (do, redo)")
        elif not self.children:
            raise ValueError(f"{self.op.value} needs at least one child")

    @property
    def is_leaf(self) -> bool:
        return self.op is None

    @property
    def is_activity(self) -> bool:
        return self.op is None and self.label is not None

    @property
    def is_tau(self) -> bool:
        return self.op is None and self.label is None

    def kind_label(self) -> str:
        if self.op is not None:
            return f"{self.op.value}{len(self.children)}"
        if self.is_activity:
            return self.label  # type: ignore[return-value]
        return "tau"

    def describe(self) -> str:
        if self.node_id is not None:
            return self.node_id.text
        return self.kind_label()


def seq(*children: ProcessTree) -> ProcessTree:
    return ProcessTree(op=Op.SEQ, children=tuple(children))


def xor(*children: ProcessTree) -> ProcessTree:
    return ProcessTree(op=Op.XOR, children=tuple(children))


def par(*children: ProcessTree) -> ProcessTree:
    return ProcessTree(op=Op.AND, children=tuple(children))


def loop(do: ProcessTree, redo: ProcessTree) -> ProcessTree:
    return ProcessTree(op=Op.LOOP, children=(do, redo))


def activity(label: str) -> ProcessTree:
    if not label:
        raise ValueError("activity label must be non-empty")
    return ProcessTree(label=label)


def tau() -> ProcessTree:
    return ProcessTree()


def removed_tau(node_id: NodeId | None = None) -> ProcessTree:
    return ProcessTree(removed=True, node_id=node_id)


def assign_node_ids(tree: ProcessTree) -> ProcessTree:
    """Return a copy of *tree* with deterministic preorder node ids."""

    counter = itertools.count()

    def walk(node: ProcessTree) -> ProcessTree:
        index = next(counter)
        node_id = NodeId(text=f"{node.kind_label()}@{index}", index=index)
        children = tuple(walk(c) for c in node.children)
        return replace(node, node_id=node_id, children=children)

    return walk(tree)


def iter_nodes(tree: ProcessTree) -> Iterator[ProcessTree]:
    """Preorder traversal."""
    stack = [tree]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def node_count(tree: ProcessTree) -> int:
    return sum(1 for _ in iter_nodes(tree))


@dataclass(frozen=True)
class Coalition:
    """Subset of node indices kept in the model, as a bit mask over the
    preorder indices 0..n-1."""

    n: int
    mask: int = 0

    def __post_init__(self) -> None:
        if self.n < 0 or self.mask < 0 or self.mask >> self.n:
            raise ValueError("coalition mask out of range for n players")

    @classmethod
    def full(cls, n: int) -> "Coalition":
        return cls(n, (1 << n) - 1)

    @classmethod
    def empty(cls, n: int) -> "Coalition":
        return cls(n, 0)

    @classmethod
    def of(cls, n: int, indices) -> "Coalition":
        mask = 0
        for i in indices:
            if not 0 <= i < n:
                raise ValueError(f"index {i} outside 0..{n - 1}")
            mask |= 1 << i
        return cls(n, mask)

    def contains(self, index: int) -> bool:
        return bool(self.mask >> index & 1)

    def add(self, index: int) -> "Coalition":
        return Coalition(self.n, self.mask | 1 << index)

    def remove(self, index: int) -> "Coalition":
        return Coalition(self.n, self.mask & ~(1 << index))

    def members(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.mask >> i & 1)

    def __len__(self) -> int:
        return bin(self.mask).count("1")


def substitute(tree: ProcessTree, coalition: Coalition) -> ProcessTree:
    """Replace every maximal subtree whose root is not in *coalition* by a
    single removed-tau leaf.  Surviving nodes keep their node ids."""

    if tree.node_id is None:
        raise ValueError("substitute requires an id-assigned tree (assign_node_ids)")

    def walk(node: ProcessTree) -> ProcessTree:
        index = node.node_id.index  # type: ignore[union-attr]
        if not coalition.contains(index):
            return removed_tau(NodeId(text=f"tau@{index}", index=index))
        if node.is_leaf:
            return node
        return replace(node, children=tuple(walk(c) for c in node.children))

    return walk(tree)


class LanguageSizeError(RuntimeError):
    """Raised when a bounded trace language exceeds the explosion guard."""


def _checked(traces: set, guard: int, node: ProcessTree) -> set:
    if len(traces) > guard:
        raise LanguageSizeError(
            f"trace language of node {node.describe()} exceeds guard of {guard}"
        )
    return traces


def _shuffle_pair(u: tuple, v: tuple) -> set:
    if not u:
        return {v}
    if not v:
        return {u}
    return {(u[0],) + rest for rest in _shuffle_pair(u[1:], v)} | {
        (v[0],) + rest for rest in _shuffle_pair(u, v[1:])
    }


def trace_language(
    tree: ProcessTree,
    bound: int = 1,
    mode: TauMode = TauMode.BLOCKED,
    guard: int = 10**6,
) -> frozenset[tuple[str, ...]]:
    """Bounded trace semantics: the set of activity sequences the tree can
    produce with loops unrolled up to *bound* redo iterations.

    Removed taus contribute the empty trace in ``skip`` mode and nothing
    (no completing run) in ``blocked`` mode.
    """

    if bound < 0:
        raise ValueError("loop bound must be >= 0")

    def lang(node: ProcessTree) -> set:
        if node.is_leaf:
            if node.removed:
                return {()} if mode is TauMode.SKIP else set()
            if node.is_activity:
                return {(node.label,)}
            return {()}
        if node.op is Op.SEQ:
            acc = {()}
            for child in node.children:
                cl = lang(child)
                acc = _checked({u + v for u in acc for v in cl}, guard, node)
                if not acc:
                    return acc
            return acc
        if node.op is Op.XOR:
            acc: set = set()
            for child in node.children:
                acc = _checked(acc | lang(child), guard, node)
            return acc
        if node.op is Op.AND:
            acc = {()}
            for child in node.children:
                cl = lang(child)
                merged: set = set()
                for u in acc:
                    for v in cl:
                        merged |= _shuffle_pair(u, v)
                        if len(merged) > guard:
                            raise LanguageSizeError(
                                f"trace language of node {node.describe()} exceeds "
                                f"guard of {guard}"
                            )
                acc = merged
                if not acc:
                    return acc
            return acc
        # Loop(do, redo): do (redo do)^j for j = 0..bound
        do, redo = (lang(c) for c in node.children)
        acc = set(do)
        tails = {()}
        for _ in range(bound):
            tails = _checked(
                {t + r + d for t in tails for r in redo for d in do}, guard, node
            )
            acc = _checked(acc | {d + t for d in do for t in tails}, guard, node)
            if not tails:
                break
        return acc

    return frozenset(lang(tree))


def tree_to_text(tree: ProcessTree) -> str:
    """Line-based debug serialization, one node per line, two-space indent."""

    lines: list[str] = []

    def walk(node: ProcessTree, depth: int) -> None:
        if node.is_activity:
            head = f"act {node.label}"
        elif node.is_tau:
            head = "removed-tau" if node.removed else "tau"
        else:
            head = node.op.value.lower()  # type: ignore[union-attr]
        lines.append("  " * depth + head)
        for child in node.children:
            walk(child, depth + 1)

    walk(tree, 0)
    return "\n".join(lines) + "\n"


def tree_from_text(text: str) -> ProcessTree:
    """Parse the ``tree_to_text`` format back into an id-assigned tree."""

    entries: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        stripped = raw.lstrip(" ")
        indent = len(raw) - len(stripped)
        if indent % 2:
            raise ValueError(f"line {lineno}: odd indentation")
        entries.append((indent // 2, stripped.rstrip()))
    if not entries:
        raise ValueError("empty tree text")

    pos = 0

    def parse(depth: int) -> ProcessTree:
        nonlocal pos
        d, head = entries[pos]
        if d != depth:
            raise ValueError(f"unexpected indentation at entry {pos}")
        pos += 1
        children = []
        while pos < len(entries) and entries[pos][0] == depth + 1:
            children.append(parse(depth + 1))
        if head == "tau":
            node = tau()
        elif head == "removed-tau":
            node = removed_tau()
        elif head.startswith("act "):
            node = activity(head[4:])
        else:
            ops = {"seq": Op.SEQ, "xor": Op.XOR, "and": Op.AND, "loop": Op.LOOP}
            if head not in ops:
                raise ValueError(f"unknown node kind {head!r}")
            node = ProcessTree(op=ops[head], children=tuple(children))
            children = None  # consumed
        if children:
            raise ValueError(f"leaf {head!r} cannot have children")
        return node

    root = parse(0)
    if pos != len(entries):
        raise ValueError("trailing content after root subtree")
    return assign_node_ids(root)


def _color(phi: float, lo: float, hi: float) -> str:
    """Blue -> white -> red interpolation anchored at lo -> 0 -> hi."""
    if phi < 0 and lo < 0:
        t = phi / lo  # 0..1 toward pure blue
        r = g = round(255 * (1 - t))
        return f"#{r:02x}{g:02x}ff"
    if phi > 0 and hi > 0:
        t = phi / hi
        g = b = round(255 * (1 - t))
        return f"#ff{g:02x}{b:02x}"
    return "#ffffff"


def export_dot(
    tree: ProcessTree, values: Mapping[str, float] | None = None
) -> str:
    """Render the tree as a Graphviz digraph with nodes colored by their
    attribution value on a blue/white/red scale.

    *values* maps node id text to a value; missing nodes render neutral.
    The output is byte-stable for a fixed input.
    """

    if tree.node_id is None:
        tree = assign_node_ids(tree)
    values = dict(values or {})
    lo = min((min(values.values()), 0.0)) if values else 0.0
    hi = max((max(values.values()), 0.0)) if values else 0.0

    lines = ["digraph process_tree {", "  node [shape=box, style=filled];"]
    nodes = list(iter_nodes(tree))
    for node in nodes:
        nid = node.node_id
        phi = values.get(nid.text)
        if phi is None:
            label = nid.text
            fill = "#ffffff"
        else:
            label = f"{nid.text}\\n{phi:.3f}"
            fill = _color(phi, lo, hi)
        lines.append(f'  n{nid.index} [label="{label}", fillcolor="{fill}"];')
    for node in nodes:
        for child in node.children:
            lines.append(f"  n{node.node_id.index} -> n{child.node_id.index};")
    lines.append("}")
    return "\n".join(lines) + "\n"
