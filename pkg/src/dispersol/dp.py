"""Distance-d independent set over a nice tree decomposition.

Every selected vertex ``x`` owns the ball of radius ``R = (d-1)//2`` around
it.  A vertex set is d-scattered exactly when these balls are disjoint and,
for even ``d``, no edge joins two different balls.  The DP labels each bag
vertex with its distance to the owner of its ball (or ``FREE``) and groups
bag vertices already known to share a ball (merged along processed edges
that force it):

* a labelled vertex ``t > 0`` needs a neighbour labelled ``t-1`` (its
  certificate, collected while edges are introduced);
* a vertex with ``t < R`` forces every neighbour into its ball with a label
  within one of its own;
* different balls may only touch along an edge of two radius-``R``
  vertices, and only when ``d`` is odd;
* each ball has one owner, so a group whose owner was already forgotten on
  one side of a join cannot have been forgotten on the other.
"""

from __future__ import annotations

from .graph import FORGET, INTRODUCE, JOIN, LEAF, Graph, NiceDecomposition, tree_decomposition

FREE = -1


class BudgetError(RuntimeError):
    """The DP would exceed its state budget."""


def state_estimate(d: int, width: int) -> int:
    return (2 * d) ** max(width, 1)


def _normalize(labels, groups, certs, past):
    """Renumber groups by first appearance; drop groups with no bag member."""
    remap = {}
    out = []
    for gid in groups:
        if gid == FREE:
            out.append(FREE)
        else:
            if gid not in remap:
                remap[gid] = len(remap)
            out.append(remap[gid])
    new_past = [False] * len(remap)
    for old, new in remap.items():
        new_past[new] = past[old]
    return (tuple(labels), tuple(out), tuple(certs), tuple(new_past))


def _flatten(wit):
    out = []
    stack = [wit]
    while stack:
        w = stack.pop()
        if w is None:
            continue
        if w[0] == "J":
            stack.append(w[1])
            stack.append(w[2])
        else:
            out.append(w[0])
            stack.append(w[1])
    return sorted(set(out))


def _owned(labels, groups, past, gid):
    return past[gid] or any(lab == 0 and g == gid for lab, g in zip(labels, groups))


def _merge(labels, groups, past, a, b):
    """Merge groups ``a`` and ``b``; ``None`` if both already have an owner."""
    if a == b:
        return groups, past
    if _owned(labels, groups, past, a) and _owned(labels, groups, past, b):
        return None
    groups = [a if g == b else g for g in groups]
    past = list(past)
    past[a] = past[a] or past[b]
    return groups, past


def dis_dp(g: Graph, d: int, nice: NiceDecomposition | None = None, *, budget: int | None = None) -> tuple[int, list[int]]:
    """Exact maximum size of a vertex set with pairwise distance ``>= d``,
    with a witness."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if nice is None:
        nice = tree_decomposition(g)
    R = (d - 1) // 2
    odd = d % 2 == 1
    labels_for_new = (FREE,) + tuple(range(R + 1))
    tables: list[dict | None] = [None] * len(nice.nodes)
    refs = [0] * len(nice.nodes)
    for node in nice.nodes:
        for c in node.children:
            refs[c] += 1

    def keep(table, key, val):
        old = table.get(key)
        if old is None or val[0] > old[0]:
            table[key] = val

    for idx, node in enumerate(nice.nodes):
        if node.kind == LEAF:
            table = {((), (), (), ()): (0, None)}
        elif node.kind == INTRODUCE:
            ctab = tables[node.children[0]]
            v = node.vertex
            pos = node.bag.index(v)
            nbr_pos = [i for i, w in enumerate(node.bag) if w != v and g.has_edge(v, w)]
            table = {}
            for (labels, groups, certs, past), (cnt, wit) in ctab.items():
                for t in labels_for_new:
                    L = labels[:pos] + (t,) + labels[pos:]
                    G = list(groups[:pos] + (FREE if t == FREE else len(past),) + groups[pos:])
                    C = list(certs[:pos] + (t <= 0,) + certs[pos:])
                    P = list(past) + ([False] if t != FREE else [])
                    ok = True
                    for j in nbr_pos:
                        lw = L[j]
                        if t == FREE or lw == FREE:
                            if (t == FREE) != (lw == FREE) and max(t, lw) != R:
                                ok = False
                                break
                            continue
                        if abs(t - lw) > 1:
                            ok = False
                            break
                        if odd and t == R and lw == R:
                            continue
                        merged = _merge(L, G, P, G[pos], G[j])
                        if merged is None:
                            ok = False
                            break
                        G, P = merged
                        if t == lw + 1:
                            C[pos] = True
                        elif lw == t + 1:
                            C[j] = True
                    if not ok:
                        continue
                    key = _normalize(L, G, C, P)
                    keep(table, key, (cnt + 1, (v, wit)) if t == 0 else (cnt, wit))
        elif node.kind == FORGET:
            ctab = tables[node.children[0]]
            pos = nice.nodes[node.children[0]].bag.index(node.vertex)
            table = {}
            for (labels, groups, certs, past), val in ctab.items():
                t, gid = labels[pos], groups[pos]
                if t > 0 and not certs[pos]:
                    continue
                P = list(past)
                if gid != FREE:
                    alone = all(groups[i] != gid for i in range(len(groups)) if i != pos)
                    if alone and not (t == 0 or past[gid]):
                        continue
                    if t == 0:
                        P[gid] = True
                L = labels[:pos] + labels[pos + 1:]
                G = groups[:pos] + groups[pos + 1:]
                C = certs[:pos] + certs[pos + 1:]
                keep(table, _normalize(L, G, C, P), val)
        elif node.kind == JOIN:
            left, right = (tables[c] for c in node.children)
            index: dict = {}
            for key, val in right.items():
                index.setdefault(key[0], []).append((key, val))
            table = {}
            for (labels, groups, certs, past), (c1, w1) in left.items():
                selected = sum(1 for lab in labels if lab == 0)
                for (_, groups2, certs2, past2), (c2, w2) in index.get(labels, ()):
                    key = _join(labels, groups, certs, past, groups2, certs2, past2)
                    if key is not None:
                        keep(table, key, (c1 + c2 - selected, ("J", w1, w2)))
        else:  # pragma: no cover
            raise ValueError(f"unknown node kind {node.kind}")
        if budget is not None and len(table) > budget:
            raise BudgetError(f"DP table grew beyond {budget} states")
        tables[idx] = table
        for c in node.children:
            refs[c] -= 1
            if refs[c] == 0:
                tables[c] = None
    root = tables[nice.root]
    if not root:
        raise RuntimeError("DP found no consistent labelling")
    cnt, wit = max(root.values(), key=lambda x: x[0])
    return cnt, _flatten(wit)


def _join(labels, groups, certs, past, groups2, certs2, past2):
    """Combine two partial solutions that agree on the bag labels."""
    k = len(labels)
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for grp in (groups, groups2):
        first = {}
        for i, gid in enumerate(grp):
            if gid == FREE:
                continue
            if gid in first:
                parent[find(i)] = find(first[gid])
            else:
                first[gid] = i
    owners: dict[int, int] = {}
    for grp, pst in ((groups, past), (groups2, past2)):
        counted = set()
        for i, gid in enumerate(grp):
            if gid != FREE and pst[gid] and gid not in counted:
                counted.add(gid)
                r = find(i)
                owners[r] = owners.get(r, 0) + 1
    for i, lab in enumerate(labels):
        if lab == 0:
            r = find(i)
            owners[r] = owners.get(r, 0) + 1
    if any(c > 1 for c in owners.values()):
        return None
    G = [FREE if groups[i] == FREE else find(i) for i in range(k)]
    P = {r: True for i, r in enumerate(G) if r != FREE and (past[groups[i]] or past2[groups2[i]])}
    C = [a or b for a, b in zip(certs, certs2)]
    P_list = [P.get(r, False) for r in range(k)]
    return _normalize(labels, G, C, P_list)
