"""Brute-force evaluator for the explanation definitions.

Built only from the raw ``Node``/``ChildEdge`` structure: its own parent map,
ancestry by walking parents, and every quantifier written as a loop over all
nodes. It deliberately shares no predicate code with ``bdi_explain.tree`` so
that agreement between the two is evidence, not tautology.
"""

from __future__ import annotations

from bdi_explain.explain import Belief, Desire, Valuing


class Naive:
    def __init__(self, tree):
        self.nodes = {}
        self.parent = {}
        self.cond_of = {}
        self.seqn_of = {}
        self.root = tree.root.id
        stack = [(tree.root, None, frozenset(tree.root_cond), None)]
        while stack:
            n, p, c, s = stack.pop()
            self.nodes[n.id] = n
            self.parent[n.id] = p
            self.cond_of[n.id] = c
            self.seqn_of[n.id] = s
            for e in n.children:
                stack.append((e.node, n.id, e.cond, e.seqn))
        self.all = sorted(self.nodes)

    # auxiliary predicates
    def kind(self, n):
        return self.nodes[n].kind.value

    def is_act(self, n):
        return self.kind(n) == "action"

    def child(self, a, b):
        return self.parent[a] == b

    def children(self, n):
        return [m for m in self.all if self.child(m, n)]

    def ancest(self, a, b):
        p = self.parent[b]
        while p is not None:
            if p == a:
                return True
            p = self.parent[p]
        return False

    def ca(self, c, a, b):
        return (self.ancest(c, a) and self.ancest(c, b)
                and not any(self.ancest(m, a) and self.ancest(m, b) and self.ancest(c, m) for m in self.all))

    def sib(self, n, x, n_x, n_i):
        return (self.child(n_x, n) and (self.ancest(n_x, x) or n_x == x)
                and self.child(n_i, n) and n_x != n_i)

    def seq_bef(self, n1, n2):
        for a in self.all:
            if not (self.ancest(a, n1) or a == n1):
                continue
            for b in self.all:
                if not (self.ancest(b, n2) or b == n2):
                    continue
                pa, pb = self.parent[a], self.parent[b]
                if pa is not None and pa == pb and self.kind(pa) == "seq" and self.seqn_of[a] < self.seqn_of[b]:
                    return True
        return False

    def first(self, n):
        if self.is_act(n):
            return {n}
        if self.kind(n) != "seq":
            out = set()
            for c in self.children(n):
                out |= self.first(c)
            return out
        for c in self.children(n):
            if self.seqn_of[c] == 1:
                return self.first(c)
        raise AssertionError("seq goal without a seqn=1 child")

    def vf(self, x):
        out = set()
        for f in self.all:
            if f == x:  # ca(C, X, X) holds for X's parent; a fact is never its own foil
                continue
            for c in self.all:
                if not self.ca(c, x, f) or self.kind(c) not in ("one", "xone", "sone"):
                    continue
                ok_x = any(self.child(nx, c) and (self.ancest(nx, x) or nx == x) and x in self.first(nx) for nx in self.all)
                ok_f = any(self.child(nf, c) and (self.ancest(nf, f) or nf == f) and f in self.first(nf) for nf in self.all)
                if ok_x and ok_f:
                    out.add(f)
        return out

    def filter(self, a, trace):
        pre = self.nodes[a].pre
        removed = set()
        for c in pre:
            for n in self.all:
                if n in trace and self.is_act(n) and c in self.nodes[n].post and self.seq_bef(n, a):
                    removed.add(c)
        return pre - removed

    # the definitions themselves
    def explain(self, trace, marking, x, foil=None):
        def held(n):
            return marking.get(n) is True or (marking.get(n) is None and not self.cond_of[n])

        def nheld(n):
            return marking.get(n) is False and bool(self.cond_of[n])

        def anc_f(n):
            if foil is None:
                return self.ancest(n, x)
            return self.ancest(n, x) and not self.ancest(n, foil)

        def anc_ca(n):
            if foil is None:
                return self.ancest(n, x)
            return anc_f(n) or self.ca(n, x, foil)

        def is_or(n):
            return self.kind(n) in ("one", "xone", "sone")

        out = set()
        for n in self.all:
            if anc_f(n) and not is_or(n):
                out.add(Desire(n))

        j = list(trace).index(x)
        for i in range(len(trace)):
            if (foil is None and i <= j) or (foil is not None and i == j):
                for p in self.filter(trace[i], trace):
                    out.add(Belief(frozenset({p})))

        for n in self.all:
            if n == x or anc_f(n):
                for p in self.cond_of[n]:
                    out.add(Belief(frozenset({p})))

        for n in self.all:
            if not anc_ca(n):
                continue
            for n_x in self.all:
                for n_i in self.all:
                    if not self.sib(n, x, n_x, n_i):
                        continue
                    if self.kind(n) == "one" and nheld(n_i):
                        out.add(Belief(self.cond_of[n_i], True))
                    if self.kind(n) == "one" and held(n_i):
                        out.add(Valuing(n_i, n_x))
                    if self.kind(n) == "sone" and self.cond_of[n_i]:
                        if foil is None:
                            if self.seqn_of[n_i] < self.seqn_of[n_x]:
                                out.add(Belief(self.cond_of[n_i], True))
                        else:
                            for n_f in self.all:
                                if any(self.sib(n, foil, n_f, other) for other in self.all) \
                                        and self.seqn_of[n_f] <= self.seqn_of[n_i] < self.seqn_of[n_x]:
                                    out.add(Belief(self.cond_of[n_i], True))
        return frozenset(out)
