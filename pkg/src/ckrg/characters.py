"""Linear functionals on the tree Hopf algebra and the extended group.

A ``Functional`` is stored by kind:

* ``character``: values on trees; forests multiply, the empty forest gives 1;
* ``infinitesimal``: values on trees; zero on the unit and on products;
* ``general``: explicit values on every forest up to the degree cap.

The grading generator Z0 is never a functional.  It appears only through
``ExtendedLie`` (``functional + z0 * Z0``) and ``ExtendedGroup``
(``character * exp(angle * Z0)``), and through composition with the grading
derivation, ``[Z0, f] = f o Y``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coeffs import E, EpsLaurent, Poly, Q, T, mono_mul, mono_pow, unit_mono, var_index
from .errors import (
    DivergentEvolution,
    NotACharacter,
    NotInfinitesimal,
    UnrepresentableAngle,
)
from .trees import RootedTree

__all__ = [
    "Functional",
    "ExtendedLie",
    "ExtendedGroup",
    "convolve",
    "conv_inverse",
    "conv_unit",
    "lie_bracket",
    "commutator",
    "theta_act",
    "exp_angle",
    "y_compose",
    "conv_exp",
    "conv_log",
    "pair_mul",
    "pair_inverse",
    "pair_exp",
    "adjoint",
    "log_derivative",
    "lie_residuals",
]

KINDS = ("character", "infinitesimal", "general")
_ZERO = EpsLaurent()
_ONE = EpsLaurent.one()


def _key(x):
    if isinstance(x, RootedTree):
        return x.as_forest()
    return x


def _scalar(c):
    return c if isinstance(c, EpsLaurent) else EpsLaurent.const(c)


class Functional:
    def __init__(self, algebra, values, kind="general"):
        if kind not in KINDS:
            raise ValueError(f"unknown functional kind {kind!r}")
        self.algebra = algebra
        self.kind = kind
        vals = {}
        for k, v in values.items():
            k = _key(k)
            if kind != "general" and not k.is_tree():
                raise ValueError(f"{kind} functionals are stored on trees only, got {k}")
            v = _scalar(v)
            if v.coeffs or v.trunc is not None:
                vals[k] = v
        self.values = vals
        self._cache = {}

    def __repr__(self):
        return f"Functional({self.kind}, {len(self.values)} values, cap={self.algebra.max_degree})"

    def __call__(self, x):
        f = _key(x)
        if self.kind == "general":
            return self.values.get(f, _ZERO)
        if f.is_empty():
            return _ONE if self.kind == "character" else _ZERO
        if f.is_tree():
            return self.values.get(f, _ZERO)
        if self.kind == "infinitesimal":
            return _ZERO
        hit = self._cache.get(f)
        if hit is None:
            hit = _ONE
            for t in f.trees:
                hit = hit * self.values.get(t.as_forest(), _ZERO)
            self._cache[f] = hit
        return hit

    def evaluation_domain(self):
        """Forests on which the stored data lives (trees for structured kinds)."""
        if self.kind == "general":
            return self.algebra.forests()
        return [t.as_forest() for t in self.algebra.trees()]

    def full(self):
        """Equivalent general functional with explicit values on all forests."""
        if self.kind == "general":
            return self
        return Functional(self.algebra, {f: self(f) for f in self.algebra.forests()}, "general")

    def map(self, fn, kind=None):
        """Apply ``fn`` to every stored value.

        For characters ``fn`` must be a ring homomorphism (substitutions,
        expansions) for the result to stay a character.
        """
        return Functional(self.algebra, {f: fn(v) for f, v in self.values.items()},
                          kind or self.kind)

    def derivative(self, var):
        """Derivative of every forest value; the result is a general functional."""
        return Functional(self.algebra,
                          {f: self(f).differentiate(var) for f in self.algebra.forests()},
                          "general")

    def scale(self, c):
        c = _scalar(c)
        kind = self.kind if self.kind != "character" else "general"
        src = self if self.kind != "character" else self.full()
        return Functional(self.algebra, {f: v * c for f, v in src.values.items()}, kind)

    def __neg__(self):
        return self.scale(-1)

    def __add__(self, other):
        if self.kind == other.kind == "infinitesimal":
            keys = set(self.values) | set(other.values)
            return Functional(self.algebra, {f: self(f) + other(f) for f in keys}, "infinitesimal")
        return Functional(self.algebra,
                          {f: self(f) + other(f) for f in self.algebra.forests()}, "general")

    def __sub__(self, other):
        return self + (-other)

    def residuals(self, other, domain=None):
        """``{forest: self(f) - other(f)}`` over ``domain`` (default: all forests)."""
        if domain is None:
            domain = self.algebra.forests()
        return {f: self(f) - other(f) for f in domain}

    def equals(self, other, domain=None):
        return all(r.is_zero() for r in self.residuals(other, domain).values())

    def to_json(self):
        return {f.encoding: v.to_json() for f, v in sorted(self.values.items(), key=lambda kv: kv[0])}


def conv_unit(algebra):
    """The convolution unit: 1 on the empty forest, 0 elsewhere."""
    return Functional(algebra, {}, "character")


def _conv_value(a, b, f):
    total = _ZERO
    for (left, right), c in a.algebra.coproduct(f).items():
        va = a(left)
        if not va.coeffs and va.trunc is None:
            continue
        vb = b(right)
        if not vb.coeffs and vb.trunc is None:
            continue
        prod = va * vb
        total = total + (prod if c == 1 else prod.scale(c))
    return total


def convolve(a, b):
    """``(a * b)(X) = sum a(X') b(X'')`` over the coproduct of X."""
    algebra = a.algebra
    if a.kind == b.kind == "character":
        return Functional(algebra, {t: _conv_value(a, b, t.as_forest()) for t in algebra.trees()},
                          "character")
    return Functional(algebra, {f: _conv_value(a, b, f) for f in algebra.forests()}, "general")


def conv_inverse(a):
    """Inverse of a character: the character composed with the antipode."""
    if a.kind != "character":
        raise NotACharacter("convolution inverse is implemented for characters only")
    algebra = a.algebra
    vals = {}
    for t in algebra.trees():
        total = _ZERO
        for f, c in algebra.antipode(t).items():
            total = total + a(f).scale(c)
        vals[t] = total
    return Functional(algebra, vals, "character")


def commutator(a, b):
    return convolve(a, b) - convolve(b, a)


def lie_bracket(d1, d2):
    if d1.kind != "infinitesimal" or d2.kind != "infinitesimal":
        raise NotInfinitesimal("the Lie bracket is defined on infinitesimal characters")
    algebra = d1.algebra
    vals = {t: _conv_value(d1, d2, t.as_forest()) - _conv_value(d2, d1, t.as_forest())
            for t in algebra.trees()}
    return Functional(algebra, vals, "infinitesimal")


def y_compose(a):
    """``a o Y``: the value on a degree-n forest times n."""
    if a.kind == "infinitesimal":
        return Functional(a.algebra, {f: v.scale(f.degree) for f, v in a.values.items()},
                          "infinitesimal")
    return Functional(a.algebra, {f: a(f).scale(f.degree) for f in a.algebra.forests()}, "general")


def exp_angle(angle, n):
    """``exp(n * angle)`` as a monomial in the exponential variables.

    ``angle`` must be a linear form in t and the hierarchy times whose
    exponentials are ring variables: ``eps t -> E``, ``-t -> q``,
    ``eps^N tauN -> EtauN``; integer multiples of these are allowed.
    """
    if _is_scalar_zero(angle):
        return _ONE
    angle = _scalar(angle)
    if angle.trunc is not None:
        raise UnrepresentableAngle(f"angle {angle} is not exact")
    mono = (0, 0, 0, 0)
    for k, p in angle.coeffs.items():
        for m, c in p.terms.items():
            nz = [(i, e) for i, e in enumerate(m) if e]
            if len(nz) != 1 or nz[0][1] != 1 or c.denominator != 1:
                raise UnrepresentableAngle(f"cannot exponentiate angle {angle}")
            idx = nz[0][0]
            c = int(c)
            if idx == T and k == 1:
                target = unit_mono(E, c * n)
            elif idx == T and k == 0:
                target = unit_mono(Q, -c * n)
            elif idx >= 4 and (idx - 4) % 2 == 0 and k == (idx - 4) // 2 + 2:
                target = unit_mono(idx + 1, c * n)
            else:
                raise UnrepresentableAngle(f"cannot exponentiate angle {angle}")
            mono = mono_mul(mono, target)
    return EpsLaurent({0: Poly.monomial(mono)})


def _is_scalar_zero(x):
    if isinstance(x, EpsLaurent):
        return not x.coeffs and x.trunc is None
    return x == 0


def theta_act(a, angle):
    """Grading automorphism: degree-n values times ``exp(n * angle)``."""
    factors = {}

    def fac(n):
        if n not in factors:
            factors[n] = exp_angle(angle, n)
        return factors[n]

    return Functional(a.algebra, {f: v * fac(f.degree) for f, v in a.values.items()}, a.kind)


def _power_series(d, coeffs):
    """``sum_k coeffs[k] * d^{*k}`` on all forests (``d`` must vanish on the unit)."""
    algebra = d.algebra
    full = d.full()
    total = {f: _ZERO for f in algebra.forests()}
    power = conv_unit(algebra).full()
    for k, ck in enumerate(coeffs):
        if k:
            power = convolve(full, power)
        if ck:
            for f in total:
                total[f] = total[f] + power(f).scale(ck)
    return Functional(algebra, total, "general")


def conv_exp(d):
    """Convolution exponential of an infinitesimal character (terminates by degree)."""
    if d.kind != "infinitesimal":
        raise NotInfinitesimal("conv_exp needs an infinitesimal character")
    n = d.algebra.max_degree
    coeffs = [Fraction(1)]
    for k in range(1, n + 1):
        coeffs.append(coeffs[-1] / k)
    full = _power_series(d, coeffs)
    return Functional(d.algebra, {t: full(t) for t in d.algebra.trees()}, "character")


def conv_log(a):
    """Convolution logarithm of a character; an infinitesimal character."""
    if a.kind != "character":
        raise NotACharacter("conv_log needs a character")
    n = a.algebra.max_degree
    shifted = Functional(a.algebra, {f: a(f) for f in a.algebra.forests() if not f.is_empty()},
                         "general")
    coeffs = [Fraction(0)] + [Fraction((-1) ** (k + 1), k) for k in range(1, n + 1)]
    full = _power_series(shifted, coeffs)
    return Functional(a.algebra, {t: full(t) for t in a.algebra.trees()}, "infinitesimal")


@dataclass(frozen=True)
class ExtendedLie:
    """``functional + z0 * Z0`` in the Lie algebra extended by the grading generator."""

    functional: Functional
    z0: EpsLaurent

    def __post_init__(self):
        object.__setattr__(self, "z0", _scalar(self.z0))


@dataclass(frozen=True)
class ExtendedGroup:
    """``character * exp(angle * Z0)`` in the semidirect product."""

    character: Functional
    angle: EpsLaurent

    def __post_init__(self):
        if self.character.kind != "character":
            raise NotACharacter("ExtendedGroup needs a character")
        object.__setattr__(self, "angle", _scalar(self.angle))


def pair_mul(a, b):
    """``(p1, s1)(p2, s2) = (p1 * theta_{s1}(p2), s1 + s2)``."""
    return ExtendedGroup(convolve(a.character, theta_act(b.character, a.angle)), a.angle + b.angle)


def pair_inverse(a):
    return ExtendedGroup(theta_act(conv_inverse(a.character), -a.angle), -a.angle)


def pair_exp(d, param):
    """``exp(s (delta + c Z0))`` with ``s`` the symbolic flow parameter ``param``.

    Returns ``(h_s, c s)``, where ``h`` solves ``dh/ds = delta * h + c (h o Y)``
    with ``h_0 = 1``.  Degree by degree the source term is a combination of
    ``exp(c m s)`` with ``m`` below the degree, so the solution is a closed
    form in the exponential variable attached to ``c s``.
    """
    delta, c = d.functional, d.z0
    if delta.kind != "infinitesimal":
        raise NotInfinitesimal("pair_exp needs an infinitesimal functional part")
    algebra = delta.algebra
    s = EpsLaurent.var(param)
    pidx = var_index(param)
    if not c.coeffs and c.trunc is None:
        return ExtendedGroup(conv_exp(delta.scale(s)), EpsLaurent())
    angle = c * s
    try:
        v1 = exp_angle(angle, 1)
    except UnrepresentableAngle as exc:
        raise DivergentEvolution(str(exc)) from exc
    ((vmono, _),) = v1.coeffs[0].terms.items()
    nz = [(i, e) for i, e in enumerate(vmono) if e]
    if len(nz) != 1:
        raise DivergentEvolution(f"flow exponential {v1} is not a single variable")
    vidx, vexp = nz[0]
    if len(c.coeffs) != 1:
        raise DivergentEvolution(f"Z0 coefficient {c} is not a monomial")
    for f, val in delta.values.items():
        for p in val.coeffs.values():
            if p.has_var(pidx) or p.has_var(vidx):
                raise DivergentEvolution(
                    f"generator value at {f} depends on the flow parameter {param}")
    c_inv = c.invert()
    h = {}
    hfun = Functional(algebra, {}, "character")
    for t in algebra.trees():
        n = t.degree
        source = _ZERO
        for (left, right), k in algebra.coproduct(t).items():
            if not left.is_tree():
                continue
            dv = delta(left)
            if not dv.coeffs:
                continue
            source = source + (dv * hfun(right)).scale(k)
        groups = {}
        for pw, p in source.coeffs.items():
            for m, coef in p.terms.items():
                e = m[vidx] if vidx < len(m) else 0
                if e % vexp:
                    raise DivergentEvolution(f"unexpected exponential content at {t}")
                groups.setdefault(e // vexp, {}).setdefault(pw, {})[m] = coef
        value = _ZERO
        for mm, coeffs in groups.items():
            if mm == n:
                raise DivergentEvolution(f"resonant source term at {t}")
            part = EpsLaurent({pw: Poly(terms) for pw, terms in coeffs.items()}, source.trunc)
            lifted = part * EpsLaurent({0: Poly.monomial(mono_pow(vmono, n - mm))})
            value = value + (part - lifted) * c_inv.scale(Fraction(1, mm - n))
        if source.trunc is not None:
            value = value.truncate(source.trunc)
        h[t] = value
        hfun = Functional(algebra, h, "character")
    return ExtendedGroup(hfun, angle)


def adjoint(g, x):
    """``g (delta + c Z0) g^{-1} = (g * delta * g^{-1} + c g * (g^{-1} o Y), c)``."""
    ginv = conv_inverse(g)
    func = convolve(convolve(g, x.functional), ginv)
    if x.z0.coeffs or x.z0.trunc is not None:
        func = func + convolve(g, y_compose(ginv)).scale(x.z0)
    return ExtendedLie(func, x.z0)


def log_derivative(a, var):
    """``(d/dvar a) a^{-1}`` for ``a`` in the extended group, as an extended Lie element."""
    char = a.character
    inv = conv_inverse(char)
    func = convolve(char.derivative(var), inv)
    dangle = a.angle.differentiate(var)
    if dangle.coeffs:
        func = func + convolve(char, y_compose(inv)).scale(dangle)
    return ExtendedLie(func, dangle)


def lie_residuals(x, y):
    """Forest-wise residuals of two extended Lie elements plus the Z0 residual (key ``"Z0"``)."""
    out = {f.encoding: r for f, r in x.functional.residuals(y.functional).items()}
    out["Z0"] = x.z0 - y.z0
    return out


def unit_mass(a):
    """The character evaluated at t = 0."""
    return a.map(EpsLaurent.at_unit_mass)

