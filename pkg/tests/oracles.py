"""Independent reference implementations used only by the tests.

Trees here are parent arrays (node 0 is the root, ``parent[i] < i``) and
everything is compared through canonical bracket strings, so none of this
code shares logic with the package.
"""

from itertools import combinations, product


def encode(parent, root):
    kids = sorted(encode(parent, c) for c in range(len(parent)) if parent[c] == root and c != root)
    return "[" + "".join(kids) + "]"


def forest_encoding(codes):
    return ".".join(sorted(codes)) if codes else "1"


def all_parent_arrays(n):
    """Every labelled recursive tree on n nodes: (n-1)! parent arrays."""
    for choice in product(*[range(i) for i in range(1, n)]):
        yield (None,) + choice


def trees_by_parent_arrays(n):
    return sorted({encode(p, 0) for p in all_parent_arrays(n)})


def parse_brackets(code):
    """Bracket string -> parent array."""
    parent = []
    stack = []
    for ch in code:
        if ch == "[":
            parent.append(stack[-1] if stack else None)
            stack.append(len(parent) - 1)
        else:
            stack.pop()
    return parent


def _below(parent, node):
    out = {node}
    changed = True
    while changed:
        changed = False
        for i, p in enumerate(parent):
            if p in out and i not in out:
                out.add(i)
                changed = True
    return out


def _is_ancestor(parent, a, b):
    while b is not None:
        if b == a:
            return True
        b = parent[b]
    return False


def _sub_encoding(parent, keep, root):
    kids = sorted(_sub_encoding(parent, keep, c) for c in keep if parent[c] == root)
    return "[" + "".join(kids) + "]"


def admissible_cut_coproduct(code):
    """``Delta(T) = T (x) 1 + 1 (x) T + sum over admissible cuts P^c(T) (x) R^c(T)``.

    A cut is a nonempty set of edges (identified by their lower node) with at
    most one edge on any path from the root.
    """
    parent = parse_brackets(code)
    n = len(parent)
    out = {}

    def add(left, right):
        key = (left, right)
        out[key] = out.get(key, 0) + 1

    add(forest_encoding([code]), "1")
    add("1", forest_encoding([code]))
    edges = list(range(1, n))
    for k in range(1, len(edges) + 1):
        for cut in combinations(edges, k):
            if any(_is_ancestor(parent, a, b) for a in cut for b in cut if a != b):
                continue
            pruned, removed = [], set()
            for c in cut:
                sub = _below(parent, c)
                removed |= sub
                pruned.append(_sub_encoding(parent, sub - {c}, c))
            trunk = set(range(n)) - removed
            add(forest_encoding(pruned), forest_encoding([_sub_encoding(parent, trunk - {0}, 0)]))
    return out


def tree_factorial(code):
    parent = parse_brackets(code)
    out = 1
    for i in range(len(parent)):
        out *= len(_below(parent, i))
    return out


def ladder_counterterm_coefficient(code):
    """Ladder rule: phi_-(T) = (-g/eps)^n / T!, returned as the rational in front."""
    from fractions import Fraction

    n = code.count("[")
    return Fraction((-1) ** n, tree_factorial(code))


def rooted_tree_counts(limit):
    """Counts via the divisor-sum recurrence a(n+1) = (1/n) sum_k (sum_{d|k} d a(d)) a(n-k+1)."""
    a = [0, 1]
    for n in range(1, limit):
        total = 0
        for k in range(1, n + 1):
            s = sum(d * a[d] for d in range(1, k + 1) if k % d == 0)
            total += s * a[n - k + 1]
        a.append(total // n)
    return a[1:limit + 1]
