"""Experience analytics: detours, strategy paths, visit order and coverage.

A cycle in a learning experience is a detour: the learner left a node and
came back to it.  Two complementary views are provided:

* :func:`detect_cycles` lists every first-return detour in the raw visit
  sequence (anchored at the latest prior occurrence, so nested detours are
  each reported once).
* :func:`erase_cycles` removes loops in visit order, leaving the strategy
  path: where the learner was heading.  :func:`split_strategy_tactics`
  additionally returns the detours the erasure removed; those account for
  every erased visit, so ``strategy + interiors + one anchor per detour``
  is exactly the input multiset.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .errors import DanglingRef
from .model import LearningEnvironment
from .sessions import LearningExperience


@dataclass(frozen=True)
class Cycle:
    """A detour: the visit at ``end_index`` returns to the ``start_index`` anchor."""

    anchor_activity: str
    start_index: int
    end_index: int
    interior: tuple[str, ...]


class DetourKind(str, Enum):
    REFERENCE = "reference_detour"
    CONTENT = "content_detour"


@dataclass(frozen=True)
class CoverageReport:
    visited: frozenset[str]
    total: int
    ratio: float


def _visit_ids(experience: LearningExperience | Sequence[str]) -> list[str]:
    if isinstance(experience, LearningExperience):
        return [v.activity_id for v in experience.visits]
    return list(experience)


def detect_cycles(experience: LearningExperience | Sequence[str]) -> list[Cycle]:
    """Every first-return cycle, in order of the returning visit.

    Whenever a visit repeats an earlier node, one cycle is emitted, anchored
    at the latest prior occurrence of that node; its interior is the raw
    visit slice strictly between anchor and return.
    """
    ids = _visit_ids(experience)
    latest: dict[str, int] = {}
    cycles: list[Cycle] = []
    for j, node in enumerate(ids):
        i = latest.get(node)
        if i is not None:
            cycles.append(Cycle(node, i, j, tuple(ids[i + 1:j])))
        latest[node] = j
    return cycles


def classify_cycle(cycle: Cycle, env: LearningEnvironment) -> DetourKind:
    """Reference detour when every interior node is a reference node (or none)."""
    for node in (cycle.anchor_activity, *cycle.interior):
        if node not in env.activities:
            raise DanglingRef(node)
    if all(env.activities[node].is_reference for node in cycle.interior):
        return DetourKind.REFERENCE
    return DetourKind.CONTENT


def split_strategy_tactics(
    experience: LearningExperience | Sequence[str],
) -> tuple[list[str], list[Cycle]]:
    """Loop-erase the visits; return (strategy path, erased detours).

    The erasure walks the visits keeping a stack; returning to a node still
    on the stack pops everything above it and drops the returning visit.
    Each pop event yields one detour spanning the anchor's latest visit to
    the returning visit, its interior holding the popped nodes (survivors of
    inner detours, in stack order).  Together the detours account for every
    erased visit: strategy + interiors + one anchor per detour = input.
    """
    ids = _visit_ids(experience)
    stack: list[tuple[int, str]] = []
    position: dict[str, int] = {}
    cycles: list[Cycle] = []
    for j, node in enumerate(ids):
        p = position.get(node)
        if p is None:
            position[node] = len(stack)
            stack.append((j, node))
        else:
            popped = stack[p + 1:]
            for _, dropped in popped:
                del position[dropped]
            del stack[p + 1:]
            cycles.append(Cycle(node, stack[p][0], j, tuple(n for _, n in popped)))
            stack[p] = (j, node)  # later detours leave from this visit
    return [node for _, node in stack], cycles


def erase_cycles(experience: LearningExperience | Sequence[str]) -> list[str]:
    """The strategy path: visits with every loop erased, in visit order."""
    return split_strategy_tactics(experience)[0]


def visit_order(experience: LearningExperience | Sequence[str]) -> dict[str, int]:
    """First-visit ordinal (1-based) per distinct activity."""
    order: dict[str, int] = {}
    for node in _visit_ids(experience):
        if node not in order:
            order[node] = len(order) + 1
    return order


def coverage(
    experiences: Iterable[LearningExperience | Sequence[str]],
    env: LearningEnvironment,
) -> CoverageReport:
    """Which share of the course the given experiences touched."""
    visited: set[str] = set()
    for experience in experiences:
        visited.update(_visit_ids(experience))
    visited &= set(env.activities)
    total = len(env.activities)
    ratio = len(visited) / total if total else 0.0
    return CoverageReport(frozenset(visited), total, ratio)
