"""Traces, condition markings, trace generation and trace validation.

A trace is the tuple of action ids the agent performed. A marking maps node
ids to ``True`` (condition held when the node was reached), ``False`` (it did
not hold) or is silent (unknown).

Trace document format (JSON)::

    {
      "tree": "coffee.json",
      "actions": ["getOwnCard", "goto(kitchen)", "getCoffee(kitchen)"],
      "markings": {"getOwnCard": "true", "getOfficeCoffee": "false", ...}
    }

Marking values are "true", "false" or "unknown"; omitted nodes are unknown.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .errors import NotAnActionError, TreeFormatError
from .rng import Xoshiro256
from .tree import GoalPlanTree, NodeKind

Trace = tuple[str, ...]
Marking = dict[str, bool]

_MARK_TEXT = {"true": True, "false": False, "unknown": None}


def held(tree: GoalPlanTree, marking: Mapping[str, bool], n: str) -> bool:
    """Condition of ``n`` held when reached; a node without a condition holds
    unless explicitly marked otherwise."""
    m = marking.get(n)
    if m is True:
        return True
    return m is None and not tree.cond(n)


def nheld(tree: GoalPlanTree, marking: Mapping[str, bool], n: str) -> bool:
    return marking.get(n) is False and bool(tree.cond(n))


@dataclass
class TraceRecord:
    """A trace document: the action sequence plus its markings."""

    actions: Trace
    marking: Marking = field(default_factory=dict)
    tree: str | None = None

    def to_document(self) -> dict[str, Any]:
        doc: dict[str, Any] = {}
        if self.tree is not None:
            doc["tree"] = self.tree
        doc["actions"] = list(self.actions)
        doc["markings"] = {k: ("true" if v else "false") for k, v in sorted(self.marking.items())}
        return doc

    def dumps(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_document(), indent=indent)


def parse_trace(data: bytes | str) -> TraceRecord:
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise TreeFormatError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, Mapping):
        raise TreeFormatError("trace document must be a JSON object")
    actions = doc.get("actions")
    if not isinstance(actions, list) or not all(isinstance(a, str) for a in actions):
        raise TreeFormatError("'actions' must be a list of node ids")
    raw = doc.get("markings") or {}
    if not isinstance(raw, Mapping):
        raise TreeFormatError("'markings' must be an object")
    marking: Marking = {}
    for k, v in raw.items():
        if isinstance(v, bool):
            val = v
        elif isinstance(v, str) and v.lower() in _MARK_TEXT:
            val = _MARK_TEXT[v.lower()]
        else:
            raise TreeFormatError(f"marking for {k!r} must be true/false/unknown, got {v!r}")
        if val is not None:
            marking[k] = val
    tree = doc.get("tree")
    return TraceRecord(tuple(actions), marking, tree if isinstance(tree, str) else None)


def load_trace(path) -> TraceRecord:
    with open(path, "rb") as fh:
        return parse_trace(fh.read())


def interleave(traces: Sequence[Sequence[str]], rng: Xoshiro256) -> list[str]:
    """Uniformly random merge of several sequences, each keeping its order.

    Each step takes the next element of sequence i with probability
    proportional to its remaining length, which makes every merge equally
    likely.
    """
    queues = [list(t) for t in traces if t]
    pos = [0] * len(queues)
    remaining = [len(q) for q in queues]
    total = sum(remaining)
    out: list[str] = []
    while total:
        live = [i for i, r in enumerate(remaining) if r]
        if len(live) == 1:
            i = live[0]
            out.extend(queues[i][pos[i]:])
            break
        r = rng.randbelow(total)
        for i in live:
            if r < remaining[i]:
                break
            r -= remaining[i]
        out.append(queues[i][pos[i]])
        pos[i] += 1
        remaining[i] -= 1
        total -= 1
    return out


OFF_PATH_MODES = ("random", "skip")


def generate_trace(tree: GoalPlanTree, n: str, rng: Xoshiro256, p_true: float = 0.5,
                   off_path: str = "random") -> tuple[Trace, Marking]:
    """Generate one execution trace in which action ``n`` is performed.

    An OR goal above ``n`` descends into the child leading to ``n``. An OR goal
    elsewhere picks a child uniformly at random (``off_path="random"``) or
    contributes no actions at all (``off_path="skip"``). Siblings of the chosen
    child are marked at random under ``one`` (with probability ``p_true`` of
    holding), False under ``xone``, and False for older siblings under
    ``sone``. AND goals run all children: ``seq`` in order, ``all`` randomly
    interleaved.
    """
    if not tree.node(n).is_action:
        raise NotAnActionError(f"{n!r} is not an action")
    if off_path not in OFF_PATH_MODES:
        raise ValueError(f"off_path must be one of {OFF_PATH_MODES}")
    marking: Marking = {}

    def visit(r: str) -> list[str]:
        kind = tree.kind(r)
        if kind is NodeKind.ACTION:
            marking[r] = True
            return [r]
        if kind.is_or:
            if tree.ancest(r, n):
                n_x = tree.child_toward(r, n)
            elif off_path == "skip":
                return []
            else:
                n_x = rng.choice(tree.children(r))
            marking[r] = True
            for n_i in tree.children(r):
                if n_i == n_x:
                    continue
                has_cond = bool(tree.cond(n_i))
                if kind is NodeKind.ONE:
                    marking[n_i] = rng.random() < p_true if has_cond else True
                elif kind is NodeKind.XONE:
                    if has_cond:
                        marking[n_i] = False
                elif tree.seqn(n_i) < tree.seqn(n_x) and has_cond:
                    marking[n_i] = False
            return visit(n_x)
        marking[r] = True
        parts = [visit(c) for c in tree.children(r)]
        if kind is NodeKind.SEQ:
            return [a for p in parts for a in p]
        return interleave(parts, rng)

    return tuple(visit(tree.root.id)), marking


def validate_trace(tree: GoalPlanTree, trace: Sequence[str], marking: Mapping[str, bool]) -> list[str]:
    """Return human-readable diagnostics; an empty list means the trace and
    marking are consistent with the tree."""
    diags: list[str] = []
    actions = []
    for a in trace:
        if a not in tree:
            diags.append(f"unknown node {a!r} in trace")
        elif not tree.node(a).is_action:
            diags.append(f"{a!r} in trace is not an action")
        else:
            actions.append(a)

    for i, a in enumerate(actions):
        for b in actions[i + 1:]:
            if tree.seq_bef(b, a):
                diags.append(f"seq order violated: {b!r} must precede {a!r}")

    traced = set(actions)
    for c in tree:
        kind = tree.kind(c)
        if not kind.is_or:
            continue
        contributing = [k for k in tree.children(c) if traced.intersection(tree.subtree(k))]
        if len(contributing) > 1:
            diags.append(f"OR goal {c!r} has actions from several children: {contributing}")
        if len(contributing) != 1:
            continue
        n_x = contributing[0]
        for n_i in tree.children(c):
            if n_i == n_x or not tree.cond(n_i):
                continue
            must_fail = kind is NodeKind.XONE or (kind is NodeKind.SONE and tree.seqn(n_i) < tree.seqn(n_x))
            if must_fail and marking.get(n_i) is not False:
                diags.append(f"{kind.value} sibling {n_i!r} of chosen {n_x!r} must be marked false")

    on_path: set[str] = set()
    for a in actions:
        on_path.add(a)
        on_path.update(tree.ancestors(a))
    order = {k: i for i, k in enumerate(tree.ids)}
    for p in sorted(on_path, key=order.__getitem__):
        if marking.get(p) is not True:
            diags.append(f"{p!r} lies on the path to a traced action but is not marked true")

    for k, v in marking.items():
        if k not in tree:
            diags.append(f"marking for unknown node {k!r}")
        elif v is False and not tree.cond(k):
            diags.append(f"{k!r} has no condition but is marked false")
    return diags
