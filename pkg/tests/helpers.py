from bdi_explain.tree import GoalPlanTree, Node, edge


def act(id, pre=(), post=()):
    return Node.action(id, pre, post)


def goal(id, kind, *children):
    return Node.goal(id, kind, children)


def tree(root, root_cond=()):
    return GoalPlanTree(root, root_cond)


__all__ = ["act", "goal", "edge", "tree"]
