"""Random goal-plan trees with the traditional alternating AND/OR structure."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .rng import Xoshiro256, derive_seed
from .tree import ChildEdge, GoalPlanTree, Node, NodeKind

_OR_CHOICES = (NodeKind.ONE, NodeKind.SONE, NodeKind.XONE)
_AND_CHOICES = (NodeKind.ALL, NodeKind.SEQ)

# stream tags for derive_seed
TREE_STREAM = 1
TRACE_STREAM = 2


@dataclass(frozen=True)
class GenParams:
    """alpha: chance a non-root node is an action; delta: maximum depth
    (root is depth 1); epsilon: maximum children per goal; theta: minimum
    node count for corpus trees; post_prob: chance an action gets a
    postcondition copied from another action's precondition (0 keeps
    posts empty)."""

    alpha: float = 0.5
    delta: int = 5
    epsilon: int = 5
    theta: int = 20
    seed: int = 0
    post_prob: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")
        if self.delta < 2:
            raise ValueError("delta must be >= 2")
        if self.epsilon < 2:
            raise ValueError("epsilon must be >= 2")
        if self.theta < 0:
            raise ValueError("theta must be >= 0")
        if not 0.0 <= self.post_prob <= 1.0:
            raise ValueError("post_prob must be in [0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)


def gen_tree(params: GenParams, rng: Xoshiro256) -> GoalPlanTree:
    """Draw one tree.

    Nodes are numbered N1, N2, ... in creation (pre-)order. Node i gets the
    condition atom Ci and, if it is an action, the precondition atom Pi.
    """
    counter = 0
    actions: list[str] = []

    def build(typ: str, dep: int) -> tuple[Node, str]:
        nonlocal counter
        counter += 1
        i = counter
        nid = f"N{i}"
        if (dep > 1 and rng.random() < params.alpha) or dep >= params.delta:
            actions.append(nid)
            return Node(nid, nid, NodeKind.ACTION, frozenset({f"P{i}"})), f"C{i}"
        kind = rng.choice(_OR_CHOICES if typ == "or" else _AND_CHOICES)
        n_children = rng.randint(2, params.epsilon)
        kids_type = "and" if typ == "or" else "or"
        edges = []
        for k in range(1, n_children + 1):
            child, cond = build(kids_type, dep + 1)
            edges.append(ChildEdge(child, frozenset({cond}), k if kind.is_sequenced else None))
        return Node(nid, nid, kind, children=tuple(edges)), f"C{i}"

    root, root_cond = build("or", 1)
    if params.post_prob > 0 and len(actions) > 1:
        posts = {}
        for a in actions:
            if rng.random() < params.post_prob:
                other = rng.choice([b for b in actions if b != a])
                posts[a] = frozenset({f"P{other[1:]}"})
        root = _with_posts(root, posts)
    return GoalPlanTree(root, {root_cond})


def _with_posts(node: Node, posts: dict[str, frozenset[str]]) -> Node:
    if node.is_action:
        post = posts.get(node.id)
        return node if post is None else Node(node.id, node.name, node.kind, node.pre, post)
    edges = tuple(ChildEdge(_with_posts(e.node, posts), e.cond, e.seqn) for e in node.children)
    return Node(node.id, node.name, node.kind, children=edges)


def tree_rng(params: GenParams, index: int) -> Xoshiro256:
    return Xoshiro256(derive_seed(params.seed, TREE_STREAM, index))


def gen_corpus_tree(params: GenParams, index: int) -> GoalPlanTree:
    """Tree ``index`` of the corpus: redrawn from its own stream until it has
    at least ``theta`` nodes."""
    rng = tree_rng(params, index)
    while True:
        tree = gen_tree(params, rng)
        if len(tree) >= params.theta:
            return tree


def gen_corpus(params: GenParams, count: int) -> list[GoalPlanTree]:
    if count < 1:
        raise ValueError("count must be >= 1")
    return [gen_corpus_tree(params, k) for k in range(count)]
