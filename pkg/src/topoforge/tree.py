"""Partition tree and the optimal-frontier dynamic program.

The whole user set sits at the root (heap index 1); splitting node k yields
children 2k and 2k+1. Every node carries a transmission cost t (total link
cost to the node's own best station), a station cost q, and the hardware
cost d = t + q.

The dynamic program labels every node with L = d, then computes final labels
bottom-up: F = L on leaves and F = min(L, F_left + F_right) inside. A node
with L == F is flagged; walking down from the root and stopping at the first
flagged node on each path yields the optimal frontier: the cheapest
collection of indivisible subnetworks, with total cost F at the root. The
label passes work on bare (t, q) tables, so reference cost trees without any
geometry run through the same code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bipartition import bipartition_cluster, cluster_cost
from .instance import CostModel, Instance, SolverConfig, Thresholds

ROOT = 1


@dataclass
class TreeNode:
    k: int
    t: float
    q: float
    leaf: bool
    members: np.ndarray | None = None  # indices into the instance arrays
    center: np.ndarray | None = None
    label: float | None = None
    final: float | None = None
    flag: int | None = None

    @property
    def d(self) -> float:
        return self.t + self.q


@dataclass
class PartitionTree:
    nodes: dict[int, TreeNode] = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self):
        if ROOT not in self.nodes:
            raise ValueError("tree has no root node (index 1)")
        for k, node in self.nodes.items():
            if node.k != k:
                raise ValueError(f"node stored under {k} carries index {node.k}")
            if k != ROOT and k // 2 not in self.nodes:
                raise ValueError(f"orphan node {k}: parent {k // 2} missing")
            left, right = 2 * k in self.nodes, 2 * k + 1 in self.nodes
            if node.leaf:
                if left or right:
                    raise ValueError(f"leaf node {k} has children")
            elif not (left and right):
                raise ValueError(f"internal node {k} must have both children")

    def children(self, k: int) -> tuple[int, int]:
        return 2 * k, 2 * k + 1

    def ancestors(self, k: int):
        k //= 2
        while k >= ROOT:
            yield k
            k //= 2

    def depth(self, k: int) -> int:
        return k.bit_length() - 1

    def leaves(self) -> list[int]:
        return [k for k, n in self.nodes.items() if n.leaf]


def grow_tree(
    instance: Instance,
    model: CostModel,
    config: SolverConfig,
    thresholds: Thresholds,
) -> PartitionTree:
    """Recursively bipartition the instance into a binary tree of clusters.

    A node is split while it has at least 2 users, meets the designer floors
    on weight and size, and sits above the depth cap; a split that leaves one
    side empty also ends the branch. Node costs: t is the link cost to the
    node's own best station, q the station cost of the node's total flow.
    """
    coords = instance.coords
    weights = instance.weights
    nodes: dict[int, TreeNode] = {}

    def build(k: int, members: np.ndarray, center, t) -> None:
        if center is None:
            center, t = cluster_cost(coords[members], weights[members], model, config.epsilon)
        total_w = float(weights[members].sum())
        q = model.es_cost(total_w)
        divisible = (
            len(members) >= 2
            and len(members) >= thresholds.min_users
            and total_w >= thresholds.min_weight
            and k.bit_length() - 1 < thresholds.max_depth
        )
        if divisible:
            split = bipartition_cluster(coords[members], weights[members], model, config)
            if not split.empty_side:
                nodes[k] = TreeNode(k, t, q, leaf=False, members=members, center=center)
                build(2 * k, members[split.s1], split.c1, split.g1)
                build(2 * k + 1, members[split.s2], split.c2, split.g2)
                return
        nodes[k] = TreeNode(k, t, q, leaf=True, members=members, center=center)

    build(ROOT, np.arange(instance.n), None, None)
    return PartitionTree(nodes)


def bottom_up_labels(tree: PartitionTree) -> PartitionTree:
    """Assign L = d everywhere and final labels F children-first."""
    for k in sorted(tree.nodes, reverse=True):
        node = tree.nodes[k]
        node.label = node.d
        if node.leaf:
            node.final = node.label
        else:
            left, right = tree.children(k)
            node.final = min(node.label, tree.nodes[left].final + tree.nodes[right].final)
    return tree


def mark_flags(tree: PartitionTree) -> PartitionTree:
    """Flag nodes whose own cost already equals their best frontier cost."""
    for node in tree.nodes.values():
        if node.label is None or node.final is None:
            raise ValueError("labels must be computed before flags")
        node.flag = 1 if node.label == node.final else 0
    return tree


def optimal_frontier(tree: PartitionTree) -> list[int]:
    """Top-down extraction: stop at the first flagged node on each path."""
    frontier = []
    stack = [ROOT]
    while stack:
        k = stack.pop()
        node = tree.nodes[k]
        if node.flag is None:
            raise ValueError("flags must be marked before extracting the frontier")
        if node.flag == 1:
            frontier.append(k)
        else:
            stack.extend(tree.children(k))
    return sorted(frontier)


@dataclass
class ClusterInfo:
    node: int
    user_ids: list[int]
    center: tuple[float, float]
    t: float
    q: float
    weight: float


@dataclass
class Solution:
    frontier: list[int]
    clusters: list[ClusterInfo]
    total_cost: float
    tree: PartitionTree

    def to_dict(self) -> dict:
        """Stable JSON-ready form of the solution (audit tree included)."""
        return {
            "version": 1,
            "total_cost": self.total_cost,
            "frontier": list(self.frontier),
            "clusters": [
                {
                    "node": c.node,
                    "user_ids": list(c.user_ids),
                    "center": [c.center[0], c.center[1]],
                    "t": c.t,
                    "q": c.q,
                    "weight": c.weight,
                }
                for c in self.clusters
            ],
            "tree": {
                "nodes": [
                    {
                        "k": n.k,
                        "t": n.t,
                        "q": n.q,
                        "d": n.d,
                        "label": n.label,
                        "final": n.final,
                        "flag": n.flag,
                        "leaf": n.leaf,
                        "user_ids": None if n.members is None else [int(i) for i in n.members],
                    }
                    for _, n in sorted(self.tree.nodes.items())
                ]
            },
        }


def solve_topology(
    instance: Instance,
    model: CostModel | None = None,
    config: SolverConfig | None = None,
    thresholds: Thresholds | None = None,
) -> Solution:
    """End-to-end: grow the tree, run the labeling passes, cut the frontier."""
    model = model or CostModel()
    config = config or SolverConfig()
    thresholds = thresholds or Thresholds()
    tree = grow_tree(instance, model, config, thresholds)
    bottom_up_labels(tree)
    mark_flags(tree)
    frontier = optimal_frontier(tree)
    weights = instance.weights
    clusters = []
    for k in frontier:
        node = tree.nodes[k]
        # user_ids stay in instance order inside each cluster
        clusters.append(
            ClusterInfo(
                node=k,
                user_ids=[instance.users[i].id for i in node.members],
                center=(float(node.center[0]), float(node.center[1])),
                t=node.t,
                q=node.q,
                weight=float(weights[node.members].sum()),
            )
        )
    return Solution(frontier, clusters, tree.nodes[ROOT].final, tree)


def load_cost_tree(rows) -> PartitionTree:
    """Build a geometry-free tree from (k, t, q, leaf) rows.

    This is the entry point for pre-computed cost tables: the labeling passes
    and the frontier cut run on it unchanged.
    """
    nodes: dict[int, TreeNode] = {}
    for row in rows:
        k = int(row["k"])
        if k < 1:
            raise ValueError(f"invalid node index {k}")
        if k in nodes:
            raise ValueError(f"duplicate node index {k}")
        nodes[k] = TreeNode(k, float(row["t"]), float(row["q"]), leaf=bool(row["leaf"]))
    return PartitionTree(nodes)


def load_cost_tree_file(path) -> PartitionTree:
    doc = json.loads(Path(path).read_text())
    if not isinstance(doc, dict) or not isinstance(doc.get("nodes"), list):
        raise ValueError(f"{path}: expected a JSON object with a 'nodes' array")
    return load_cost_tree(doc["nodes"])


def verify_growth_inequalities(tree: PartitionTree, rel_slack: float = 1e-7) -> list[str]:
    """Check q_k >= q_child and t_k >= t_left + t_right at every internal node.

    Returns human-readable violation messages (empty when all hold). The
    transmission inequality gets a small relative slack because node costs
    come from an iterative solver.
    """
    problems = []
    for k, node in sorted(tree.nodes.items()):
        if node.leaf:
            continue
        left, right = (tree.nodes[c] for c in tree.children(k))
        if node.q < left.q or node.q < right.q:
            problems.append(f"node {k}: station cost below a child's")
        slack = rel_slack * max(1.0, abs(node.t))
        if node.t + slack < left.t + right.t:
            problems.append(
                f"node {k}: transmission cost {node.t} below children sum {left.t + right.t}"
            )
    return problems
