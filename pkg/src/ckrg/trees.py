"""Rooted trees, forests and the Connes-Kreimer Hopf algebra structure.

Trees are unlabelled, non-planar and stored canonically: children sorted by
their bracket encoding, so isomorphic trees compare and hash equal.  The
encoding is ``[]`` for a single node and ``"[" + children + "]"`` otherwise;
a forest is its tree encodings joined by ``"."`` in ascending order and the
empty forest is ``"1"``.

Linear combinations are plain dicts ``{basis element: coefficient}``.  The
coproduct of a forest is ``{(left, right): int}`` with the pruned pieces on
the left and the trunk (the part containing the roots) on the right.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement

from .errors import DegreeCapExceeded, ParseError

__all__ = [
    "RootedTree",
    "Forest",
    "TreeAlgebra",
    "canonicalize",
    "parse_tree",
    "parse_forest",
    "enumerate_trees",
    "enumerate_forests",
    "b_plus",
    "coproduct",
    "antipode",
    "counit",
    "grading_Y",
    "product",
    "count_rooted_trees",
]


class RootedTree:
    __slots__ = ("children", "encoding", "degree", "_hash")

    def __init__(self, children=()):
        kids = tuple(sorted(children, key=lambda c: c.encoding))
        self.children = kids
        self.encoding = "[" + "".join(c.encoding for c in kids) + "]"
        self.degree = 1 + sum(c.degree for c in kids)
        self._hash = hash(self.encoding)

    def __eq__(self, other):
        return isinstance(other, RootedTree) and self.encoding == other.encoding

    def __lt__(self, other):
        return (self.degree, self.encoding) < (other.degree, other.encoding)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"RootedTree({self.encoding!r})"

    def __str__(self):
        return self.encoding

    def as_forest(self):
        return Forest((self,))

    def tree_factorial(self):
        out = self.degree
        for c in self.children:
            out *= c.tree_factorial()
        return out


class Forest:
    """Commutative monomial of rooted trees; the empty forest is the unit."""

    __slots__ = ("trees", "encoding", "degree", "_hash")

    def __init__(self, trees=()):
        ts = tuple(sorted(trees, key=lambda c: c.encoding))
        self.trees = ts
        self.encoding = ".".join(c.encoding for c in ts) if ts else "1"
        self.degree = sum(c.degree for c in ts)
        self._hash = hash(self.encoding)

    def __eq__(self, other):
        return isinstance(other, Forest) and self.encoding == other.encoding

    def __lt__(self, other):
        return (self.degree, self.encoding) < (other.degree, other.encoding)

    def __hash__(self):
        return self._hash

    def __len__(self):
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)

    def __mul__(self, other):
        return Forest(self.trees + other.trees)

    def __repr__(self):
        return f"Forest({self.encoding!r})"

    def __str__(self):
        return self.encoding

    def is_empty(self):
        return not self.trees

    def is_tree(self):
        return len(self.trees) == 1


ONE = Forest()
DOT = RootedTree()


def canonicalize(raw):
    """Build a canonical tree from nested sequences: ``[]`` is a node, ``[a, b]`` has children a, b."""
    if isinstance(raw, RootedTree):
        return raw
    return RootedTree(canonicalize(c) for c in raw)


def parse_tree(text):
    """Parse a bracket encoding (any child order) into a canonical tree."""
    text = text.strip()
    stack = []
    root = None
    for col, ch in enumerate(text, start=1):
        if ch == "[":
            stack.append([])
        elif ch == "]":
            if not stack:
                raise ParseError(f"unbalanced ']' in {text!r}", column=col)
            node = RootedTree(stack.pop())
            if stack:
                stack[-1].append(node)
            elif root is None and col == len(text):
                root = node
            else:
                raise ParseError(f"trailing input after tree in {text!r}", column=col)
        else:
            raise ParseError(f"unexpected character {ch!r} in tree {text!r}", column=col)
    if root is None:
        raise ParseError(f"incomplete tree {text!r}", column=len(text) + 1)
    return root


def parse_forest(text):
    text = text.strip()
    if text == "1":
        return ONE
    return Forest(parse_tree(p) for p in text.split("."))


def b_plus(forest):
    """Graft the trees of ``forest`` onto a new common root."""
    if isinstance(forest, RootedTree):
        forest = forest.as_forest()
    return RootedTree(forest.trees)


def product(f1, f2):
    return f1 * f2


def counit(forest):
    return 1 if forest.is_empty() else 0


@lru_cache(maxsize=None)
def enumerate_trees(n):
    """All rooted trees with ``n`` nodes, one per isomorphism class, sorted by encoding."""
    if n < 1:
        raise ValueError("tree degree must be >= 1")
    if n == 1:
        return (DOT,)
    return tuple(sorted((b_plus(f) for f in enumerate_forests(n - 1)), key=lambda t: t.encoding))


@lru_cache(maxsize=None)
def enumerate_forests(n):
    """All forests of total degree ``n`` (``(ONE,)`` for n = 0), sorted by encoding."""
    if n == 0:
        return (ONE,)
    out = set()
    # partition n into tree degrees, then choose trees per part
    for parts in _partitions(n, n):
        pools = {}
        for p in parts:
            pools[p] = pools.get(p, 0) + 1
        choices = [()]
        for deg, mult in pools.items():
            choices = [c + combo for c in choices
                       for combo in combinations_with_replacement(enumerate_trees(deg), mult)]
        for c in choices:
            out.add(Forest(c))
    return tuple(sorted(out, key=lambda f: f.encoding))


def _partitions(n, largest):
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def count_rooted_trees(n):
    """Number of rooted trees with n nodes from the Euler-Cayley recurrence."""
    a = [0, 1]
    for m in range(1, n):
        s = 0
        for k in range(1, m + 1):
            d_sum = sum(d * a[d] for d in range(1, k + 1) if k % d == 0)
            s += d_sum * a[m - k + 1]
        a.append(s // m)
    return a[n]


def _add(acc, key, c):
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


@lru_cache(maxsize=None)
def _tree_coproduct(tree):
    # Delta(B+(F)) = B+(F) (x) 1 + (id (x) B+) Delta(F)
    out = {(tree.as_forest(), ONE): 1}
    for (left, right), c in coproduct(Forest(tree.children)).items():
        _add(out, (left, b_plus(right).as_forest()), c)
    return out


@lru_cache(maxsize=None)
def coproduct(forest):
    """Coproduct of a forest, multiplicative over its trees."""
    if isinstance(forest, RootedTree):
        forest = forest.as_forest()
    if forest.is_empty():
        return {(ONE, ONE): 1}
    if forest.is_tree():
        return _tree_coproduct(forest.trees[0])
    first, rest = forest.trees[0], Forest(forest.trees[1:])
    out = {}
    for (l1, r1), c1 in _tree_coproduct(first).items():
        for (l2, r2), c2 in coproduct(rest).items():
            _add(out, (l1 * l2, r1 * r2), c1 * c2)
    return out


def reduced_coproduct(forest):
    """Coproduct minus the two primitive terms ``X (x) 1`` and ``1 (x) X``."""
    out = dict(coproduct(forest))
    if not forest.is_empty():
        out.pop((forest, ONE), None)
        out.pop((ONE, forest), None)
    return out


@lru_cache(maxsize=None)
def _tree_antipode(tree):
    # S(T) = -T - sum' S(T') T''
    f = tree.as_forest()
    out = {f: -1}
    for (left, right), c in reduced_coproduct(f).items():
        for sf, sc in antipode(left).items():
            _add(out, sf * right, -c * sc)
    return out


@lru_cache(maxsize=None)
def antipode(forest):
    """Antipode as a linear combination of forests."""
    if isinstance(forest, RootedTree):
        forest = forest.as_forest()
    if forest.is_empty():
        return {ONE: 1}
    out = {ONE: 1}
    for tree in forest.trees:
        nxt = {}
        for f, c in out.items():
            for sf, sc in _tree_antipode(tree).items():
                _add(nxt, f * sf, c * sc)
        out = nxt
    return out


def grading_Y(element):
    """The grading derivation ``Y(X) = deg(X) X`` on a linear combination of forests."""
    out = {}
    for f, c in element.items():
        if f.degree:
            _add(out, f, c * f.degree)
    return out


class TreeAlgebra:
    """The Hopf algebra truncated at a degree cap.

    All structure maps are shared memoized pure functions; the workspace only
    refuses forests above ``max_degree`` and lists the basis.
    """

    def __init__(self, max_degree):
        if max_degree < 0:
            raise ValueError("max_degree must be >= 0")
        self.max_degree = max_degree

    def __repr__(self):
        return f"TreeAlgebra(max_degree={self.max_degree})"

    def __eq__(self, other):
        return isinstance(other, TreeAlgebra) and other.max_degree == self.max_degree

    def __hash__(self):
        return hash(("TreeAlgebra", self.max_degree))

    def check(self, forest):
        if forest.degree > self.max_degree:
            raise DegreeCapExceeded(
                f"{forest} has degree {forest.degree} > cap {self.max_degree}")
        return forest

    def trees(self, degree=None):
        """Trees of one degree, or of every degree up to the cap."""
        if degree is not None:
            if degree > self.max_degree:
                raise DegreeCapExceeded(f"degree {degree} > cap {self.max_degree}")
            return list(enumerate_trees(degree))
        return [t for n in range(1, self.max_degree + 1) for t in enumerate_trees(n)]

    def forests(self, degree=None):
        if degree is not None:
            if degree > self.max_degree:
                raise DegreeCapExceeded(f"degree {degree} > cap {self.max_degree}")
            return list(enumerate_forests(degree))
        return [f for n in range(self.max_degree + 1) for f in enumerate_forests(n)]

    def coproduct(self, forest):
        return coproduct(self.check(_as_forest(forest)))

    def antipode(self, forest):
        return antipode(self.check(_as_forest(forest)))


def _as_forest(x):
    return x.as_forest() if isinstance(x, RootedTree) else x
