"""Core course model: objects, tasks, activities and the precedent multigraph.

A learning environment is a directed labeled multigraph whose nodes are
learning activities (an object paired with a task) and whose edges form a
bag of labeled precedents: duplicate edges are meaningful and kept.
Reference nodes (dictionary, calculator, discussion, ...) are implicitly
adjacent to every other node in both directions; that adjacency is computed,
never stored as edges.

Environment values are immutable once built.  The ``add_*`` functions return
a new environment and never touch the input, so environments are safe to
share across threads.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property

from .errors import DanglingRef, DuplicateId


class ObjectKind(str, Enum):
    ATOMIC = "atomic"
    COMPOSITE = "composite"


class EdgeTag(str, Enum):
    """Coarse classification of a precedent edge; the label text stays authoritative."""

    DIFFICULTY = "difficulty"
    INTEREST = "interest"
    FAILURE = "failure"
    SEQUENCE = "sequence"
    UNTAGGED = "untagged"


@dataclass(frozen=True)
class LearningObject:
    """A piece of content, either atomic (has a locator) or composite (has children)."""

    id: str
    title: str
    kind: ObjectKind = ObjectKind.ATOMIC
    locator: str = ""
    children: tuple[str, ...] = ()


@dataclass(frozen=True)
class LearningTask:
    """What the learner is asked to do with an object (read, write, exerc, ...)."""

    id: str
    verb: str
    description: str = ""


@dataclass(frozen=True)
class LearningActivity:
    """A graph node: one object paired with one task."""

    id: str
    object_id: str
    task_id: str
    is_reference: bool = False
    expected_duration_minutes: float | None = None


@dataclass(frozen=True)
class PrecedentEdge:
    """One bag entry: a labeled, tagged precedent between two activities.

    Several edges may share endpoints and label; only ``edge_id`` tells
    them apart.
    """

    edge_id: str
    from_id: str
    to_id: str
    label: str = ""
    tag: EdgeTag = EdgeTag.UNTAGGED


@dataclass(frozen=True)
class Violation:
    """One problem found by :func:`validate`."""

    code: str
    subject: str
    message: str


@dataclass(frozen=True)
class LearningEnvironment:
    """The whole course graph.  Treat instances as immutable values."""

    activities: dict[str, LearningActivity] = field(default_factory=dict)
    edges: tuple[PrecedentEdge, ...] = ()
    objects: dict[str, LearningObject] = field(default_factory=dict)
    tasks: dict[str, LearningTask] = field(default_factory=dict)

    @cached_property
    def edge_endpoints(self) -> frozenset[tuple[str, str]]:
        return frozenset((e.from_id, e.to_id) for e in self.edges)

    @cached_property
    def reference_ids(self) -> frozenset[str]:
        return frozenset(a.id for a in self.activities.values() if a.is_reference)


def empty_environment() -> LearningEnvironment:
    return LearningEnvironment()


def add_object(env: LearningEnvironment, obj: LearningObject) -> LearningEnvironment:
    if obj.id in env.objects:
        raise DuplicateId(obj.id, "object")
    objects = dict(env.objects)
    objects[obj.id] = obj
    return replace(env, objects=objects)


def add_task(env: LearningEnvironment, task: LearningTask) -> LearningEnvironment:
    if task.id in env.tasks:
        raise DuplicateId(task.id, "task")
    tasks = dict(env.tasks)
    tasks[task.id] = task
    return replace(env, tasks=tasks)


def add_activity(env: LearningEnvironment, activity: LearningActivity) -> LearningEnvironment:
    """Add one activity; its object and task must already exist."""
    if activity.id in env.activities:
        raise DuplicateId(activity.id, "activity")
    if activity.object_id not in env.objects:
        raise DanglingRef(activity.object_id)
    if activity.task_id not in env.tasks:
        raise DanglingRef(activity.task_id)
    activities = dict(env.activities)
    activities[activity.id] = activity
    return replace(env, activities=activities)


def add_edge(
    env: LearningEnvironment,
    from_id: str,
    to_id: str,
    label: str = "",
    tag: EdgeTag | str = EdgeTag.UNTAGGED,
) -> LearningEnvironment:
    """Append a precedent to the bag.  Duplicates are allowed and kept."""
    if from_id not in env.activities:
        raise DanglingRef(from_id)
    if to_id not in env.activities:
        raise DanglingRef(to_id)
    edge = PrecedentEdge(_fresh_edge_id(env), from_id, to_id, label, EdgeTag(tag))
    return replace(env, edges=env.edges + (edge,))


def _fresh_edge_id(env: LearningEnvironment) -> str:
    highest = 0
    for e in env.edges:
        if e.edge_id.startswith("e") and e.edge_id[1:].isdigit():
            highest = max(highest, int(e.edge_id[1:]))
    return f"e{highest + 1}"


def is_adjacent(env: LearningEnvironment, u_id: str, v_id: str) -> bool:
    """True when an edge u->v is stored, or either endpoint is a reference node."""
    if u_id not in env.activities:
        raise DanglingRef(u_id)
    if v_id not in env.activities:
        raise DanglingRef(v_id)
    if env.activities[u_id].is_reference or env.activities[v_id].is_reference:
        return True
    return (u_id, v_id) in env.edge_endpoints


def validate(env: LearningEnvironment) -> list[Violation]:
    """Check every structural invariant; returns violations instead of raising."""
    report: list[Violation] = []

    for tid in sorted(env.tasks):
        if not env.tasks[tid].verb:
            report.append(Violation("empty_verb", tid, f"task {tid!r} has an empty verb"))

    for oid in sorted(env.objects):
        obj = env.objects[oid]
        if obj.kind is ObjectKind.ATOMIC:
            if not obj.locator:
                report.append(Violation("bad_object", oid, f"atomic object {oid!r} has no locator"))
            if obj.children:
                report.append(Violation("bad_object", oid, f"atomic object {oid!r} has children"))
        elif obj.kind is ObjectKind.COMPOSITE:
            if not obj.children:
                report.append(Violation("bad_object", oid, f"composite object {oid!r} has no children"))
            for child in obj.children:
                if child not in env.objects:
                    report.append(
                        Violation("dangling_ref", oid, f"object {oid!r} contains missing object {child!r}")
                    )
        else:
            report.append(Violation("bad_object", oid, f"object {oid!r} has unknown kind {obj.kind!r}"))

    report.extend(_containment_cycles(env))

    for aid in sorted(env.activities):
        act = env.activities[aid]
        if act.object_id not in env.objects:
            report.append(
                Violation("dangling_ref", aid, f"activity {aid!r} references missing object {act.object_id!r}")
            )
        if act.task_id not in env.tasks:
            report.append(
                Violation("dangling_ref", aid, f"activity {aid!r} references missing task {act.task_id!r}")
            )
        if act.expected_duration_minutes is not None and act.expected_duration_minutes < 0:
            report.append(
                Violation("bad_duration", aid, f"activity {aid!r} has negative expected duration")
            )

    seen_edge_ids: set[str] = set()
    for edge in env.edges:
        if edge.edge_id in seen_edge_ids:
            report.append(
                Violation("duplicate_edge_id", edge.edge_id, f"edge id {edge.edge_id!r} used twice")
            )
        seen_edge_ids.add(edge.edge_id)
        for endpoint in (edge.from_id, edge.to_id):
            if endpoint not in env.activities:
                report.append(
                    Violation(
                        "dangling_ref",
                        edge.edge_id,
                        f"edge {edge.edge_id!r} touches missing activity {endpoint!r}",
                    )
                )
        if not isinstance(edge.tag, EdgeTag):
            report.append(Violation("bad_tag", edge.edge_id, f"edge {edge.edge_id!r} has unknown tag {edge.tag!r}"))

    return report


def _containment_cycles(env: LearningEnvironment) -> list[Violation]:
    # Iterative DFS over the containment relation; each distinct cycle is
    # reported once, keyed by its node set.
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {oid: WHITE for oid in env.objects}
    found: list[Violation] = []
    reported: set[frozenset[str]] = set()

    for root in sorted(env.objects):
        if color[root] != WHITE:
            continue
        path: list[str] = []
        stack: list[tuple[str, bool]] = [(root, False)]
        while stack:
            node, leaving = stack.pop()
            if leaving:
                color[node] = BLACK
                path.pop()
                continue
            if color[node] == BLACK:
                continue
            if color[node] == GRAY:
                continue
            color[node] = GRAY
            path.append(node)
            stack.append((node, True))
            for child in env.objects[node].children:
                if child not in env.objects:
                    continue
                if color[child] == GRAY:
                    cycle = path[path.index(child):] + [child]
                    key = frozenset(cycle)
                    if key not in reported:
                        reported.add(key)
                        found.append(
                            Violation(
                                "containment_cycle",
                                child,
                                "containment cycle: " + " -> ".join(cycle),
                            )
                        )
                elif color[child] == WHITE:
                    stack.append((child, False))
    return found


def isomorphic(a: LearningEnvironment, b: LearningEnvironment) -> bool:
    """Same nodes (by id and resolved payload) and same edge bag up to edge-id renaming."""
    if set(a.activities) != set(b.activities):
        return False
    for aid, act_a in a.activities.items():
        act_b = b.activities[aid]
        if (act_a.is_reference, act_a.expected_duration_minutes) != (
            act_b.is_reference,
            act_b.expected_duration_minutes,
        ):
            return False
        obj_a, obj_b = a.objects.get(act_a.object_id), b.objects.get(act_b.object_id)
        if obj_a is None or obj_b is None:
            return False
        if (obj_a.title, obj_a.kind, obj_a.locator) != (obj_b.title, obj_b.kind, obj_b.locator):
            return False
        task_a, task_b = a.tasks.get(act_a.task_id), b.tasks.get(act_b.task_id)
        if task_a is None or task_b is None or task_a.verb != task_b.verb:
            return False
    bag_a = Counter((e.from_id, e.to_id, e.label, e.tag) for e in a.edges)
    bag_b = Counter((e.from_id, e.to_id, e.label, e.tag) for e in b.edges)
    return bag_a == bag_b
