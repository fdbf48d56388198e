"""Goal-plan tree model, its JSON document format, and structural predicates.

A tree is either an action ``(name, pre, post)`` or a goal ``(name, kind,
children)`` whose children are ``(cond, subtree)`` edges. Nodes are addressed
by a unique ``id``; the display ``name`` may repeat.

Document format (JSON)::

    {
      "format": "goal-plan-tree/1",
      "cond": ["..."],                 # optional condition on the root
      "root": {
        "id": "getcoffee", "name": "getcoffee", "kind": "one",
        "children": [
          {"cond": ["staffCardAvailable"], "node": {...}},
          ...
        ]
      }
    }

``kind`` is one of action/all/seq/one/sone/xone. Actions carry ``pre`` and
``post`` (lists of atoms) and no ``children``. Children of ``seq``/``sone``
goals carry ``seqn`` numbered 1..n in list order; other children must not.
A bare node object (with ``kind`` at top level) is also accepted.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Iterator, Mapping

from .errors import (
    NoCommonAncestorError,
    NotAnActionError,
    TreeFormatError,
    UnknownNodeError,
)

FORMAT_TAG = "goal-plan-tree/1"


class NodeKind(str, Enum):
    ACTION = "action"
    ALL = "all"
    SEQ = "seq"
    ONE = "one"
    SONE = "sone"
    XONE = "xone"

    @property
    def is_or(self) -> bool:
        return self in OR_KINDS

    @property
    def is_and(self) -> bool:
        return self in AND_KINDS

    @property
    def is_sequenced(self) -> bool:
        return self in (NodeKind.SEQ, NodeKind.SONE)


OR_KINDS = frozenset({NodeKind.ONE, NodeKind.SONE, NodeKind.XONE})
AND_KINDS = frozenset({NodeKind.ALL, NodeKind.SEQ})

PropSet = frozenset  # conjunction of proposition atoms


@dataclass(frozen=True)
class ChildEdge:
    node: "Node"
    cond: frozenset[str] = frozenset()
    seqn: int | None = None


@dataclass(frozen=True)
class Node:
    id: str
    name: str
    kind: NodeKind
    pre: frozenset[str] = frozenset()
    post: frozenset[str] = frozenset()
    children: tuple[ChildEdge, ...] = ()

    @property
    def is_action(self) -> bool:
        return self.kind is NodeKind.ACTION

    @classmethod
    def action(cls, id: str, pre: Iterable[str] = (), post: Iterable[str] = (), name: str | None = None) -> "Node":
        return cls(id, name or id, NodeKind.ACTION, frozenset(pre), frozenset(post))

    @classmethod
    def goal(cls, id: str, kind: NodeKind | str, children: Iterable[ChildEdge | "Node"], name: str | None = None) -> "Node":
        """Build a goal node; bare ``Node`` children get no condition, and
        ``seqn`` is filled in automatically under seq/sone goals."""
        kind = NodeKind(kind)
        edges = []
        for k, c in enumerate(children, start=1):
            edge = c if isinstance(c, ChildEdge) else ChildEdge(c)
            if kind.is_sequenced and edge.seqn is None:
                edge = ChildEdge(edge.node, edge.cond, k)
            edges.append(edge)
        return cls(id, name or id, kind, children=tuple(edges))


def edge(node: Node, cond: Iterable[str] = (), seqn: int | None = None) -> ChildEdge:
    return ChildEdge(node, frozenset(cond), seqn)


class GoalPlanTree:
    """An immutable, indexed goal-plan tree.

    All structural predicates take node ids and raise ``UnknownNodeError`` for
    ids that are not in the tree.
    """

    def __init__(self, root: Node, root_cond: Iterable[str] = ()):
        self.root = root
        self.root_cond = frozenset(root_cond)
        self._nodes: dict[str, Node] = {}
        self._parent: dict[str, str | None] = {}
        self._cond: dict[str, frozenset[str]] = {}
        self._seqn: dict[str, int | None] = {}
        self._depth: dict[str, int] = {}
        self._ancestors: dict[str, tuple[str, ...]] = {}
        self._order: list[str] = []
        self._index(root, None, self.root_cond, None, 1, ())
        self._ancestor_sets = {k: frozenset(v) for k, v in self._ancestors.items()}
        self._first: dict[str, frozenset[str]] = {}
        self._foils: dict[str, frozenset[str]] = {}
        self._validate()

    def _index(self, node: Node, parent, cond, seqn, depth, ancestors):
        # iterative to survive deep user trees
        stack = [(node, parent, cond, seqn, depth, ancestors)]
        while stack:
            node, parent, cond, seqn, depth, ancestors = stack.pop()
            if node.id in self._nodes:
                raise TreeFormatError(f"duplicate node id {node.id!r}")
            self._nodes[node.id] = node
            self._parent[node.id] = parent
            self._cond[node.id] = cond
            self._seqn[node.id] = seqn
            self._depth[node.id] = depth
            self._ancestors[node.id] = ancestors  # nearest first
            self._order.append(node.id)
            inner = (node.id,) + ancestors
            for e in reversed(node.children):
                stack.append((e.node, node.id, e.cond, e.seqn, depth + 1, inner))

    def _validate(self) -> None:
        for node in self._nodes.values():
            if node.is_action:
                if node.children:
                    raise TreeFormatError(f"action {node.id!r} has children")
                continue
            if node.pre or node.post:
                raise TreeFormatError(f"goal {node.id!r} has pre/post conditions")
            if not node.children:
                raise TreeFormatError(f"goal {node.id!r} has no children")
            seqns = [e.seqn for e in node.children]
            if node.kind.is_sequenced:
                if seqns != list(range(1, len(seqns) + 1)):
                    raise TreeFormatError(f"children of {node.id!r} must have seqn 1..{len(seqns)} in order, got {seqns}")
            elif any(s is not None for s in seqns):
                raise TreeFormatError(f"seqn given under non-sequenced goal {node.id!r}")
        for nid, cond in self._cond.items():
            if any(not isinstance(a, str) or not a for a in cond):
                raise TreeFormatError(f"condition of {nid!r} has an empty or non-string atom")

    # -- basic accessors ---------------------------------------------------

    def __contains__(self, node_id: object) -> bool:
        return node_id in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def __iter__(self) -> Iterator[str]:
        return iter(self._order)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GoalPlanTree):
            return NotImplemented
        return self.root == other.root and self.root_cond == other.root_cond

    def __hash__(self) -> int:
        return hash((self.root, self.root_cond))

    def __repr__(self) -> str:
        return f"GoalPlanTree(root={self.root.id!r}, size={len(self)})"

    @property
    def ids(self) -> list[str]:
        """All node ids in pre-order."""
        return list(self._order)

    @property
    def action_ids(self) -> list[str]:
        return [n for n in self._order if self._nodes[n].is_action]

    def node(self, node_id: str) -> Node:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNodeError(node_id) from None

    def kind(self, node_id: str) -> NodeKind:
        return self.node(node_id).kind

    def name(self, node_id: str) -> str:
        return self.node(node_id).name

    def parent(self, node_id: str) -> str | None:
        self.node(node_id)
        return self._parent[node_id]

    def children(self, node_id: str) -> list[str]:
        return [e.node.id for e in self.node(node_id).children]

    def cond(self, node_id: str) -> frozenset[str]:
        self.node(node_id)
        return self._cond[node_id]

    def seqn(self, node_id: str) -> int | None:
        self.node(node_id)
        return self._seqn[node_id]

    def depth(self, node_id: str) -> int:
        self.node(node_id)
        return self._depth[node_id]

    def ancestors(self, node_id: str) -> tuple[str, ...]:
        """Strict ancestors, nearest first."""
        self.node(node_id)
        return self._ancestors[node_id]

    def subtree(self, node_id: str) -> list[str]:
        out, stack = [], [self.node(node_id)]
        while stack:
            n = stack.pop()
            out.append(n.id)
            stack.extend(e.node for e in reversed(n.children))
        return out

    # -- predicates --------------------------------------------------------

    def ancest(self, a: str, b: str) -> bool:
        """True iff ``a`` is a strict ancestor of ``b``."""
        self.node(a)
        self.node(b)
        return a in self._ancestor_sets[b]

    def child_toward(self, n: str, x: str) -> str:
        """The child of ``n`` that is ``x`` or an ancestor of ``x``."""
        if not self.ancest(n, x):
            raise NoCommonAncestorError(f"{n!r} is not an ancestor of {x!r}")
        anc = self._ancestors[x]
        i = anc.index(n)
        return anc[i - 1] if i > 0 else x

    def ca(self, x: str, f: str) -> str:
        """Closest strict common ancestor of two unrelated nodes."""
        self.node(x)
        self.node(f)
        if x == f:
            raise NoCommonAncestorError("ca is undefined for a node and itself")
        if self.ancest(x, f) or self.ancest(f, x):
            raise NoCommonAncestorError(f"{x!r} and {f!r} are ancestor-related")
        fa = self._ancestor_sets[f]
        for a in self._ancestors[x]:
            if a in fa:
                return a
        raise AssertionError("nodes of one tree always share the root")  # pragma: no cover

    def sib(self, n: str, x: str) -> set[tuple[str, str]]:
        """Pairs ``(n_x, n_i)``: ``n_x`` is n's child toward x, ``n_i`` another child of n."""
        n_x = self.child_toward(n, x)
        return {(n_x, c) for c in self.children(n) if c != n_x}

    def seq_bef(self, n1: str, n2: str) -> bool:
        """True iff n1 necessarily precedes n2: they sit under different
        children of a seq goal, n1's branch being the earlier one."""
        self.node(n1)
        self.node(n2)
        if n1 == n2 or self.ancest(n1, n2) or self.ancest(n2, n1):
            return False
        c = self.ca(n1, n2)
        if self._nodes[c].kind is not NodeKind.SEQ:
            return False
        return self._seqn[self.child_toward(c, n1)] < self._seqn[self.child_toward(c, n2)]

    def first(self, n: str) -> frozenset[str]:
        """Actions that can be the first one performed when pursuing ``n``."""
        cached = self._first.get(n)
        if cached is not None:
            return cached
        node = self.node(n)
        if node.is_action:
            out = frozenset({n})
        elif node.kind is NodeKind.SEQ:
            head = next(e.node.id for e in node.children if e.seqn == 1)
            out = self.first(head)
        else:
            out = frozenset().union(*(self.first(e.node.id) for e in node.children))
        self._first[n] = out
        return out

    def valid_foils(self, x: str) -> frozenset[str]:
        """Actions F whose closest common ancestor with ``x`` is an OR goal at
        which both x and F are possible first actions of their branches."""
        cached = self._foils.get(x)
        if cached is not None:
            return cached
        if not self.node(x).is_action:
            raise NotAnActionError(f"{x!r} is not an action")
        out: set[str] = set()
        for c in self._ancestors[x]:
            if not self._nodes[c].kind.is_or:
                continue
            n_x = self.child_toward(c, x)
            if x not in self.first(n_x):
                continue
            for n_f in self.children(c):
                if n_f != n_x:
                    out |= self.first(n_f)
        result = frozenset(out)
        self._foils[x] = result
        return result

    # -- serialization -----------------------------------------------------

    def to_document(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"format": FORMAT_TAG}
        if self.root_cond:
            doc["cond"] = sorted(self.root_cond)
        doc["root"] = _node_to_dict(self.root)
        return doc

    def dumps(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_document(), indent=indent)

    def fingerprint(self) -> str:
        """SHA-256 of the canonical compact serialization."""
        canon = json.dumps(self.to_document(), separators=(",", ":"), sort_keys=True)
        return hashlib.sha256(canon.encode()).hexdigest()


def _node_to_dict(node: Node) -> dict[str, Any]:
    d: dict[str, Any] = {"id": node.id}
    if node.name != node.id:
        d["name"] = node.name
    d["kind"] = node.kind.value
    if node.is_action:
        d["pre"] = sorted(node.pre)
        d["post"] = sorted(node.post)
        return d
    kids = []
    for e in node.children:
        k: dict[str, Any] = {}
        if e.cond:
            k["cond"] = sorted(e.cond)
        if e.seqn is not None:
            k["seqn"] = e.seqn
        k["node"] = _node_to_dict(e.node)
        kids.append(k)
    d["children"] = kids
    return d


def _atoms(value: Any, where: str) -> frozenset[str]:
    if value is None:
        return frozenset()
    if not isinstance(value, list) or not all(isinstance(a, str) and a for a in value):
        raise TreeFormatError(f"{where}: expected a list of non-empty strings")
    return frozenset(value)


def _node_from_dict(d: Any, path: str) -> Node:
    if not isinstance(d, Mapping):
        raise TreeFormatError(f"{path}: node must be an object")
    try:
        nid = d["id"]
        kind = NodeKind(d["kind"])
    except KeyError as exc:
        raise TreeFormatError(f"{path}: missing field {exc.args[0]!r}") from None
    except ValueError:
        raise TreeFormatError(f"{path}: unknown kind {d.get('kind')!r}") from None
    if not isinstance(nid, str) or not nid:
        raise TreeFormatError(f"{path}: id must be a non-empty string")
    name = d.get("name", nid)
    where = f"{path}({nid})"
    if kind is NodeKind.ACTION:
        if d.get("children"):
            raise TreeFormatError(f"{where}: action nodes cannot have children")
        return Node(nid, name, kind, _atoms(d.get("pre"), f"{where}.pre"), _atoms(d.get("post"), f"{where}.post"))
    if "pre" in d or "post" in d:
        raise TreeFormatError(f"{where}: goal nodes cannot have pre/post")
    kids = d.get("children")
    if not isinstance(kids, list) or not kids:
        raise TreeFormatError(f"{where}: goal nodes need a non-empty children list")
    edges = []
    for k, c in enumerate(kids):
        if not isinstance(c, Mapping) or "node" not in c:
            raise TreeFormatError(f"{where}.children[{k}]: expected an object with a 'node' field")
        seqn = c.get("seqn")
        if seqn is not None and (not isinstance(seqn, int) or isinstance(seqn, bool)):
            raise TreeFormatError(f"{where}.children[{k}]: seqn must be an integer")
        edges.append(ChildEdge(_node_from_dict(c["node"], f"{where}.children[{k}]"),
                               _atoms(c.get("cond"), f"{where}.children[{k}].cond"), seqn))
    return Node(nid, name, kind, children=tuple(edges))


def from_document(doc: Any, strict: bool = False) -> GoalPlanTree:
    if not isinstance(doc, Mapping):
        raise TreeFormatError("tree document must be a JSON object")
    if "root" in doc:
        tag = doc.get("format", FORMAT_TAG)
        if tag != FORMAT_TAG:
            raise TreeFormatError(f"unsupported format {tag!r}")
        tree = GoalPlanTree(_node_from_dict(doc["root"], "root"), _atoms(doc.get("cond"), "cond"))
    elif "kind" in doc:
        tree = GoalPlanTree(_node_from_dict(doc, "root"))
    else:
        raise TreeFormatError("tree document needs a 'root' node")
    if strict:
        problems = strict_bdi_diagnostics(tree)
        if problems:
            raise TreeFormatError("; ".join(problems))
    return tree


def parse_tree(data: bytes | str, strict: bool = False) -> GoalPlanTree:
    """Parse and validate a serialized tree document."""
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise TreeFormatError(f"not valid JSON: {exc}") from None
    return from_document(doc, strict=strict)


def load_tree(path, strict: bool = False) -> GoalPlanTree:
    with open(path, "rb") as fh:
        return parse_tree(fh.read(), strict=strict)


def strict_bdi_diagnostics(tree: GoalPlanTree, check_conditions: bool = True) -> list[str]:
    """Problems with respect to the traditional alternating AND/OR structure.

    With ``check_conditions`` a condition on a child of an AND goal is also
    reported; generated trees put conditions on every node, so callers checking
    those pass ``check_conditions=False``.
    """
    out = []
    for nid in tree:
        kind = tree.kind(nid)
        if kind is NodeKind.ACTION:
            continue
        for c in tree.children(nid):
            ck = tree.kind(c)
            if kind.is_or and ck.is_or:
                out.append(f"OR goal {nid!r} has OR child {c!r}")
            if kind.is_and and ck.is_and:
                out.append(f"AND goal {nid!r} has AND child {c!r}")
            if check_conditions and kind.is_and and tree.cond(c):
                out.append(f"child {c!r} of AND goal {nid!r} has a condition")
    return out
