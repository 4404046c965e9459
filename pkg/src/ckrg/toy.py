"""Toy Feynman rules.

A rule only supplies an eps-dependent factor ``f_T`` for every tree; the
character is then ``phi(T) = g^n E^n f_T`` for a tree with n nodes, so the
dependence on coupling and unit mass always enters through ``x + eps t``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

from .characters import Functional
from .coeffs import EpsLaurent, Poly
from .errors import DuplicateTree, ParseError, RuleIncomplete
from .reports import FlowReport
from .trees import parse_tree

__all__ = [
    "ToyRule",
    "GraftingRule",
    "ExplicitRule",
    "LADDER",
    "MELLIN",
    "BUILTIN_RULES",
    "build_character",
    "covariance_check",
    "parse_rule_config",
    "load_rule",
]


class ToyRule:
    name = "rule"

    def factor(self, tree):
        raise NotImplementedError


class GraftingRule(ToyRule):
    """``f_{B+(F)} = f_F * K((deg F + 1) eps)`` for a Laurent kernel ``K(z) = sum k_j z^j``.

    The ladder rule is ``K(z) = 1/z``.
    """

    def __init__(self, name, kernel):
        self.name = name
        self.kernel = {int(j): Fraction(c) for j, c in kernel.items() if c}
        self._memo = {}

    def __repr__(self):
        return f"GraftingRule({self.name!r}, {self.kernel})"

    def factor(self, tree):
        hit = self._memo.get(tree)
        if hit is not None:
            return hit
        value = EpsLaurent.one()
        for child in tree.children:
            value = value * self.factor(child)
        n = tree.degree
        value = value * EpsLaurent({j: Poly.constant(c * Fraction(n) ** j)
                                    for j, c in self.kernel.items()})
        self._memo[tree] = value
        return value


LADDER = GraftingRule("ladder", {-1: 1})

# K(z) = 1/z + 1 + 2z: still local, but its beta does not commute with the
# counterterm, so operator-ordering mistakes show up under this rule.
MELLIN = GraftingRule("mellin", {-1: 1, 0: 1, 1: 2})

BUILTIN_RULES = {"ladder": LADDER, "mellin": MELLIN}


class ExplicitRule(ToyRule):
    """Factors listed per canonical tree encoding."""

    def __init__(self, name, table):
        self.name = name
        self.table = dict(table)

    def __repr__(self):
        return f"ExplicitRule({self.name!r}, {len(self.table)} trees)"

    def factor(self, tree):
        try:
            return self.table[tree.encoding]
        except KeyError:
            raise RuleIncomplete(f"rule {self.name!r} has no factor for tree {tree}") from None


def build_character(rule, algebra):
    """The character ``T -> g^n E^n f_T`` on every tree up to the algebra's cap."""
    values = {}
    for t in algebra.trees():
        n = t.degree
        scale = Poly.monomial((n, 0, 0, n))
        values[t] = rule.factor(t) * scale
    return Functional(algebra, values, "character")


def covariance_check(phi):
    """Check that each degree-n tree value is ``g^n E^n`` times a g-, t-free factor.

    The residual at a tree is the part of its value that breaks this shape.
    """
    report = FlowReport("scaling_covariance")
    for t in phi.algebra.trees():
        n = t.degree
        value = phi(t)
        bad = {}
        for k, p in value.coeffs.items():
            off = {m: c for m, c in p.terms.items() if m != (n, 0, 0, n)}
            if off:
                bad[k] = Poly(off)
        report.add(t.encoding, EpsLaurent(bad, value.trunc))
    return report


_LINE = re.compile(r"^\s*(?P<tree>\S+?)\s*:\s*(?P<body>\{.*\})\s*$")
_ENTRY = re.compile(r'\s*"(?P<exp>[^"]*)"\s*:\s*(?P<val>[^,}]+?)\s*(,|$)')
_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rule_config(text, name="config"):
    """Parse ``<tree>: { "<eps power>": <rational>, ... }`` lines into an ``ExplicitRule``.

    ``#`` starts a comment.  Tree encodings are canonicalized, so two lines
    naming isomorphic trees are a ``DuplicateTree`` error.
    """
    table = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _LINE.match(line)
        if m is None:
            raise ParseError("expected '<tree>: { ... }'", lineno, 1)
        try:
            tree = parse_tree(m.group("tree"))
        except ParseError as exc:
            raise ParseError(f"bad tree encoding {m.group('tree')!r}", lineno,
                             m.start("tree") + (exc.column or 1)) from None
        if tree.encoding in table:
            raise DuplicateTree(f"tree {tree.encoding} defined twice (line {lineno})")
        body = m.group("body")
        inner = body[1:-1]
        base = m.start("body") + 2
        coeffs = {}
        pos = 0
        while inner[pos:].strip():
            em = _ENTRY.match(inner, pos)
            if em is None:
                raise ParseError("expected '\"<exponent>\": <rational>'", lineno, base + pos)
            exp_text, val_text = em.group("exp"), em.group("val").strip()
            if not re.fullmatch(r"[+-]?\d+", exp_text):
                raise ParseError(f"malformed exponent key {exp_text!r}", lineno,
                                 base + em.start("exp"))
            if not _RATIONAL.match(val_text):
                raise ParseError(f"malformed rational {val_text!r}", lineno,
                                 base + em.start("val"))
            k = int(exp_text)
            if k in coeffs:
                raise ParseError(f"exponent {k} repeated", lineno, base + em.start("exp"))
            coeffs[k] = Fraction(val_text)
            pos = em.end()
        table[tree.encoding] = EpsLaurent({k: Poly.constant(c) for k, c in coeffs.items()})
    return ExplicitRule(name, table)


def load_rule(name_or_path):
    """A builtin rule name (``ladder``, ``mellin``) or a path to a rule config file."""
    if name_or_path in BUILTIN_RULES:
        return BUILTIN_RULES[name_or_path]
    path = Path(name_or_path)
    return parse_rule_config(path.read_text(encoding="utf-8"), name=path.name)

