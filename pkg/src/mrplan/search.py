"""Skeleton-level tree search.

The tree's nodes store sequences of grounded joint actions; each edge stores
a task skeleton proposed to be grounded in front of its tail node's sequence.
Iterations select an unevaluated edge by upper confidence bound, ground its
skeleton, and either return a finished plan, expand the tree with new
skeletons for the grounding conflicts, or prune the edge on failure.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

from . import mip
from .facts import FactSet, compute_facts
from .grounding import (Failure, Full, GroundingConfig, GroundingContext,
                        Partial, context_from_steps, ground)
from .mip import TaskSkeleton, enumerate_skeletons
from .plans import Plan
from .scene import Scene
from .taskgraph import build_cmtg
from .validator import validate_plan


class SearchError(RuntimeError):
    """Internal consistency failure (e.g. an emitted plan fails validation)."""


@dataclass
class PlannerConfig:
    c: float = 1.0
    alpha: float = 1.0
    t_max: int = 4
    k_max: int = 10
    max_iterations: int = 200
    time_budget: float = 60.0
    seed: int = 0
    node_budget: int = mip.DEFAULT_NODE_BUDGET
    placement_attempts: int = 100
    step_restarts: int = 10
    exhaust: bool = False

    def __post_init__(self):
        if self.c < 0 or self.alpha < 0:
            raise ValueError("c and alpha must be nonnegative")

    def grounding(self) -> GroundingConfig:
        return GroundingConfig(placement_attempts=self.placement_attempts,
                               step_restarts=self.step_restarts)


@dataclass
class SearchNode:
    id: int
    stored_steps: tuple = ()     # grounded joint actions accumulated so far
    visits: int = 0
    terminal: bool = False
    children: list = field(default_factory=list)  # edge ids


@dataclass
class SearchEdge:
    id: int
    tail: int                    # node id
    skeleton: TaskSkeleton
    prior: float
    head: int | None = None
    value: float = 0.0
    visits: int = 0
    evaluated: bool = False
    pruned: bool = False


@dataclass(frozen=True)
class NoPlan:
    reason: str                  # no_initial_skeletons | all_branches_pruned
    iterations: int              # | budget_exhausted
    tree_size: int

    def to_doc(self) -> dict:
        return {"no_plan": self.reason, "iterations": self.iterations,
                "tree_size": self.tree_size}


def ucb(node: SearchNode, edge: SearchEdge, c: float) -> float:
    return (edge.value / (edge.visits + 1)
            + c * edge.prior * math.sqrt(node.visits) / (edge.visits + 1))


def backpropagate(path, r: float) -> None:
    """path is a root-to-edge alternation: [(node, edge), ...]."""
    for node, edge in path:
        node.visits += 1
        edge.visits += 1
        edge.value += r


def reward(outcome, new_skeletons, alpha: float) -> float:
    if isinstance(outcome, Failure):
        return 0.0
    if isinstance(outcome, Full):
        moved = set()
        for s in outcome.steps:
            moved |= s.moved_objects()
        return 1.0 + alpha / len(moved)
    # partial
    if not new_skeletons:
        return 0.0
    best = min(new_skeletons,
               key=lambda sk: (sk.makespan, len(sk.moved_objects),
                               sk.structure_key()))
    grounded_len = len(outcome.steps)
    grounded_objs = len({o for s in outcome.steps for o in s.moved_objects()})
    return (grounded_len / (grounded_len + best.makespan)
            + alpha / (grounded_objs + len(best.moved_objects)))


class _Tree:
    def __init__(self):
        self.nodes: dict[int, SearchNode] = {}
        self.edges: dict[int, SearchEdge] = {}

    def new_node(self, stored_steps=()) -> SearchNode:
        node = SearchNode(id=len(self.nodes), stored_steps=tuple(stored_steps))
        self.nodes[node.id] = node
        return node

    def new_edge(self, tail: SearchNode, skeleton: TaskSkeleton) -> SearchEdge:
        prior = 1.0 / len(skeleton.moved_objects)
        edge = SearchEdge(id=len(self.edges), tail=tail.id,
                          skeleton=skeleton, prior=prior)
        self.edges[edge.id] = edge
        tail.children.append(edge.id)
        return edge

    def edge_exhausted(self, edge: SearchEdge) -> bool:
        if edge.pruned:
            return True
        if not edge.evaluated:
            return False
        return self.node_exhausted(self.nodes[edge.head])

    def node_exhausted(self, node: SearchNode) -> bool:
        if node.terminal:
            return True
        if not node.children:
            return True
        return all(self.edge_exhausted(self.edges[e]) for e in node.children)


def _new_skeletons_for(conflicts, grounded_steps, facts: FactSet, scene: Scene,
                       cfg: PlannerConfig):
    moved = set()
    for s in grounded_steps:
        moved |= s.moved_objects()
    targets = set(conflicts) - moved
    if not targets:
        return []
    graph = build_cmtg(targets, facts, scene, excluded=frozenset(moved))
    return enumerate_skeletons(graph, cfg.t_max, cfg.k_max, cfg.node_budget,
                               robot_names=sorted(scene.robots))


def plan(scene: Scene, cfg: PlannerConfig = PlannerConfig(), trace=None):
    """Search for a valid plan. Returns a Plan or a NoPlan report."""
    if not scene.goal:
        raise ValueError("scene has an empty goal specification")
    if trace is None:
        trace = []

    def emit(line: str):
        trace.append(line)

    if scene.goal_satisfied():
        return Plan(steps=())

    facts = compute_facts(scene)
    tree = _Tree()
    root = tree.new_node()
    goal_objects = set(scene.goal_objects())
    root_graph = build_cmtg(goal_objects, facts, scene)
    for sk in enumerate_skeletons(root_graph, cfg.t_max, cfg.k_max,
                                  cfg.node_budget,
                                  robot_names=sorted(scene.robots)):
        tree.new_edge(root, sk)
    if not root.children:
        return NoPlan("no_initial_skeletons", 0, 1)

    deadline = time.monotonic() + cfg.time_budget
    best_plan: Plan | None = None
    iterations = 0

    for iteration in range(1, cfg.max_iterations + 1):
        if time.monotonic() > deadline:
            break
        if tree.node_exhausted(root):
            if best_plan is not None:
                return best_plan
            return NoPlan("all_branches_pruned", iterations, len(tree.nodes))
        iterations = iteration

        # selection: descend by max UCB over non-exhausted edges
        node = root
        path = []
        edge = None
        while True:
            candidates = [tree.edges[e] for e in node.children
                          if not tree.edge_exhausted(tree.edges[e])]
            edge = max(candidates, key=lambda e: (ucb(node, e, cfg.c), -e.id))
            path.append((node, edge))
            if not edge.evaluated:
                break
            node = tree.nodes[edge.head]

        # evaluation
        ctx = context_from_steps(node.stored_steps, scene)
        rng = random.Random(f"{cfg.seed}:{edge.id}")
        outcome = ground(edge.skeleton, ctx, scene, rng, cfg.grounding())
        edge.evaluated = True

        if isinstance(outcome, Full):
            candidate = Plan(steps=outcome.steps)
            report = validate_plan(scene, candidate)
            if not report.ok:
                raise SearchError(
                    "grounded plan failed validation: "
                    + "; ".join(v.message for v in report.violations))
            r = reward(outcome, None, cfg.alpha)
            emit(f"iter={iteration} edge={edge.id} outcome=full reward={r:.6f}")
            head = tree.new_node(outcome.steps)
            head.terminal = True
            edge.head = head.id
            backpropagate(path, r)
            head.visits += 1
            if not cfg.exhaust:
                return candidate
            if best_plan is None or ((candidate.motion_cost, candidate.makespan)
                                     < (best_plan.motion_cost, best_plan.makespan)):
                best_plan = candidate
            continue

        if isinstance(outcome, Failure):
            edge.pruned = True
            emit(f"iter={iteration} edge={edge.id} outcome=failure reward=0.000000")
            backpropagate(path, 0.0)
            continue

        # partial: expand with skeletons for the conflict set
        head = tree.new_node(outcome.steps)
        edge.head = head.id
        new_sks = _new_skeletons_for(outcome.conflicts, outcome.steps, facts,
                                     scene, cfg)
        for sk in new_sks:
            tree.new_edge(head, sk)
        if not head.children:
            head.terminal = True
        r = reward(outcome, new_sks, cfg.alpha)
        emit(f"iter={iteration} edge={edge.id} outcome=partial reward={r:.6f} "
             f"children={len(head.children)}")
        backpropagate(path, r)
        head.visits += 1

    if best_plan is not None:
        return best_plan
    return NoPlan("budget_exhausted", iterations, len(tree.nodes))
