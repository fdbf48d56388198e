"""Explanatory-factor sets for "why did you do X (instead of F)?" questions.

An explanation is a set of factors: desires (goals being pursued), beliefs
(conditions that held or did not hold) and valuings (an available option that
was passed over in favour of the one chosen). Positive beliefs are kept at one
proposition per factor, so the size of an explanation is simply ``len``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence, Union

from .errors import InvalidFoilError, NoValidFoilsError, NotAnActionError, NotInTraceError
from .trace import held, nheld
from .tree import GoalPlanTree, NodeKind


@dataclass(frozen=True)
class Desire:
    node: str

    def __str__(self) -> str:
        return f"D:{self.node}"


@dataclass(frozen=True)
class Belief:
    content: frozenset[str]
    negated: bool = False

    def __post_init__(self):
        if not self.content:
            raise ValueError("belief content must be non-empty")

    @classmethod
    def of(cls, *atoms: str, negated: bool = False) -> "Belief":
        return cls(frozenset(atoms), negated)

    def __str__(self) -> str:
        body = " & ".join(sorted(self.content))
        if not self.negated:
            return f"B:{body}"
        return f"B:~{body}" if len(self.content) == 1 else f"B:~({body})"


@dataclass(frozen=True)
class Valuing:
    less: str
    more: str

    def __post_init__(self):
        if self.less == self.more:
            raise ValueError("a valuing compares two different nodes")

    def __str__(self) -> str:
        return f"V:{self.less}<{self.more}"


Factor = Union[Desire, Belief, Valuing]
FactorSet = frozenset  # frozenset[Factor]


def _positive(atoms: Iterable[str]) -> set[Factor]:
    return {Belief(frozenset({a})) for a in atoms}


def _first_index(trace: Sequence[str], x: str) -> int:
    try:
        return list(trace).index(x)
    except ValueError:
        raise NotInTraceError(x) from None


def filter_pre(a: str, trace: Sequence[str], tree: GoalPlanTree) -> frozenset[str]:
    """Preconditions of ``a`` not already achieved by an action of the trace
    that necessarily runs before ``a``."""
    if a not in trace:
        raise NotInTraceError(a)
    pre = tree.node(a).pre
    if not pre:
        return frozenset()
    producers = [n for n in dict.fromkeys(trace) if tree.node(n).post & pre]
    achieved = set()
    for n in producers:
        if tree.seq_bef(n, a):
            achieved |= tree.node(n).post
    return pre - achieved


def _explain(tree: GoalPlanTree, trace: Sequence[str], marking: Mapping[str, bool],
             x: str, foil: str | None) -> frozenset[Factor]:
    j = _first_index(trace, x)
    anc = tree.ancestors(x)
    if foil is None:
        anc_f = list(anc)
        anc_ca = anc_f
    else:
        ca = tree.ca(x, foil)
        anc_f = [n for n in anc if not tree.ancest(n, foil)]
        anc_ca = anc_f + [ca]

    out: set[Factor] = set()
    for n in anc_f:
        if not tree.kind(n).is_or:
            out.add(Desire(n))

    positions = [j] if foil is not None else range(j + 1)
    for i in positions:
        out |= _positive(filter_pre(trace[i], trace, tree))

    out |= _positive(tree.cond(x))
    for n in anc_f:
        out |= _positive(tree.cond(n))

    for n in anc_ca:
        kind = tree.kind(n)
        if kind is NodeKind.ONE:
            for n_x, n_i in tree.sib(n, x):
                if nheld(tree, marking, n_i):
                    out.add(Belief(tree.cond(n_i), negated=True))
                elif held(tree, marking, n_i):
                    out.add(Valuing(n_i, n_x))
        elif kind is NodeKind.SONE:
            if foil is None:
                lower = 1
            elif tree.ancest(n, foil):
                lower = tree.seqn(tree.child_toward(n, foil))
            else:
                # no child of n leads to the foil, so the range condition is unsatisfiable
                continue
            for n_x, n_i in tree.sib(n, x):
                if lower <= tree.seqn(n_i) < tree.seqn(n_x) and tree.cond(n_i):
                    out.add(Belief(tree.cond(n_i), negated=True))
    return frozenset(out)


def _require_action(tree: GoalPlanTree, x: str) -> None:
    if not tree.node(x).is_action:
        raise NotAnActionError(f"{x!r} is not an action")


def explain_full(tree: GoalPlanTree, trace: Sequence[str], marking: Mapping[str, bool], x: str) -> frozenset[Factor]:
    """Why did you do ``x``?"""
    _require_action(tree, x)
    return _explain(tree, trace, marking, x, None)


def explain_contrastive(tree: GoalPlanTree, trace: Sequence[str], marking: Mapping[str, bool],
                        x: str, f: str) -> frozenset[Factor]:
    """Why did you do ``x`` instead of ``f``?"""
    _require_action(tree, x)
    _first_index(trace, x)
    if f == x or f not in tree.valid_foils(x):
        raise InvalidFoilError(x, f)
    return _explain(tree, trace, marking, x, f)


def explain_implicit(tree: GoalPlanTree, trace: Sequence[str], marking: Mapping[str, bool], x: str) -> frozenset[Factor]:
    """Why did you do ``x`` (instead of whatever else you could have done)?

    The union of the contrastive explanations over every valid foil.
    """
    _require_action(tree, x)
    _first_index(trace, x)
    foils = tree.valid_foils(x)
    if not foils:
        raise NoValidFoilsError(x)
    out: set[Factor] = set()
    for f in sorted(foils):
        out |= _explain(tree, trace, marking, x, f)
    return frozenset(out)


def size(fs: Iterable[Factor]) -> int:
    return len(set(fs))


_GROUP = {Desire: 0, Belief: 1, Valuing: 2}


def _line(factor: Factor, name) -> str:
    if isinstance(factor, Desire):
        return f"I want to {name(factor.node)}"
    if isinstance(factor, Valuing):
        return f"I prefer {name(factor.more)} over {name(factor.less)}"
    atoms = sorted(factor.content)
    if not factor.negated:
        return f"because {' and '.join(atoms)}"
    if len(atoms) == 1:
        return f"because not {atoms[0]}"
    return f"because not ({' and '.join(atoms)})"


def _ordered(fs: Iterable[Factor], tree: GoalPlanTree | None) -> list[tuple[Factor, str]]:
    name = tree.name if tree is not None else (lambda n: n)
    rows = [(f, _line(f, name)) for f in set(fs)]
    rows.sort(key=lambda r: (_GROUP[type(r[0])], r[1], str(r[0])))
    return rows


def render_text(fs: Iterable[Factor], tree: GoalPlanTree | None = None) -> str:
    """One line per factor: desires, then beliefs, then valuings, each group
    sorted. Node names come from ``tree`` when given, else ids are shown."""
    rows = _ordered(fs, tree)
    if not rows:
        return "(no factors)"
    return "\n".join(line for _, line in rows)


def factor_to_dict(f: Factor) -> dict[str, Any]:
    if isinstance(f, Desire):
        return {"kind": "desire", "content": f.node}
    if isinstance(f, Valuing):
        return {"kind": "valuing", "less": f.less, "more": f.more}
    return {"kind": "belief", "polarity": "negated" if f.negated else "positive", "content": sorted(f.content)}


def factor_from_dict(d: Mapping[str, Any]) -> Factor:
    kind = d.get("kind")
    if kind == "desire":
        return Desire(d["content"])
    if kind == "valuing":
        return Valuing(d["less"], d["more"])
    if kind == "belief":
        return Belief(frozenset(d["content"]), d.get("polarity", "positive") == "negated")
    raise ValueError(f"unknown factor kind {kind!r}")


def to_document(fs: Iterable[Factor]) -> dict[str, Any]:
    rows = _ordered(fs, None)
    return {"factors": [factor_to_dict(f) for f, _ in rows], "size": len(rows)}


def dumps(fs: Iterable[Factor], indent: int | None = 2) -> str:
    return json.dumps(to_document(fs), indent=indent)


def loads(data: str | bytes) -> frozenset[Factor]:
    doc = json.loads(data)
    return frozenset(factor_from_dict(d) for d in doc["factors"])
