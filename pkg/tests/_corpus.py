"""Seeded generators shared by the test modules: random process trees,
random boolean games, and the tree corpus used by the exhaustive
oracle/encoder comparisons."""

from __future__ import annotations

import random

from procshap.process_tree import (
    ProcessTree,
    activity,
    assign_node_ids,
    loop,
    par,
    seq,
    tau,
    xor,
)

LABEL_POOL = ["a", "b", "c", "d", "e"]


def random_tree(
    rng: random.Random,
    max_nodes: int = 10,
    label_pool: list[str] | None = None,
    allow_loops: bool = True,
    allow_taus: bool = True,
) -> ProcessTree:
    """A random well-formed tree with at most *max_nodes* nodes.
    Labels are drawn with repetition so activities can recur."""

    pool = label_pool or LABEL_POOL

    def leaf() -> ProcessTree:
        if allow_taus and rng.random() < 0.15:
            return tau()
        return activity(rng.choice(pool))

    def build(budget: int) -> tuple[ProcessTree, int]:
        if budget < 3 or rng.random() < 0.3:
            return leaf(), 1
        ops = [seq, xor, par] + ([loop] if allow_loops else [])
        op = rng.choice(ops)
        if op is loop:
            do, used_do = build((budget - 1) // 2)
            redo, used_redo = build(budget - 1 - used_do)
            return loop(do, redo), 1 + used_do + used_redo
        arity = rng.randint(2, min(3, budget - 1))
        children = []
        used = 1
        for i in range(arity):
            remaining = budget - used - (arity - 1 - i)
            child, child_used = build(max(remaining, 1))
            children.append(child)
            used += child_used
        return op(*children), used

    tree, used = build(max_nodes)
    assert used <= max_nodes, (used, max_nodes)
    return assign_node_ids(tree)


def corpus(count: int, max_nodes: int = 10, seed: int = 2024) -> list[ProcessTree]:
    rng = random.Random(seed)
    return [random_tree(rng, max_nodes) for _ in range(count)]


def distinct_label_tree(rng: random.Random, depth: int) -> ProcessTree:
    """Loop-free tree with globally distinct activity labels, for the
    miner rediscovery suite."""

    counter = [0]

    def fresh() -> ProcessTree:
        counter[0] += 1
        return activity(f"x{counter[0]}")

    def build(d: int) -> ProcessTree:
        if d == 0 or rng.random() < 0.25:
            return fresh()
        op = rng.choice([seq, xor, par])
        arity = rng.randint(2, 3)
        children = [build(d - 1) for _ in range(arity)]
        if op is xor and rng.random() < 0.25:
            children[rng.randrange(len(children))] = tau()
        return op(*children)

    root = build(depth)
    if root.is_leaf:  # ensure at least one operator so the log is non-trivial
        root = seq(root, fresh())
    return assign_node_ids(root)


def random_boolean_game_table(rng: random.Random, n: int) -> dict[int, int]:
    """A uniformly random boolean value table over all 2^n masks."""
    return {mask: rng.randint(0, 1) for mask in range(1 << n)}


def threshold_game_table(rng: random.Random, n: int) -> dict[int, int]:
    """v(S) = 1 iff |S & T| >= t for a random subset T and threshold t.
    Members of T are symmetric, non-members are dummies."""
    size = rng.randint(1, n)
    members = rng.sample(range(n), size)
    t = rng.randint(1, size)
    t_mask = 0
    for m in members:
        t_mask |= 1 << m
    return {
        mask: int(bin(mask & t_mask).count("1") >= t) for mask in range(1 << n)
    }
