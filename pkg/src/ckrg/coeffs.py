"""Exact coefficient arithmetic.

Two layers live here:

``Poly``
    sparse multivariate polynomials with ``Fraction`` coefficients in the
    formal variables

    ======  ==============================================================
    g       the coupling, ``g = e^x``; x-derivatives act as ``g d/dg``
    t       log of the unit mass
    q       ``e^{-t}``, used when taking ``t -> oo`` limits
    E       ``e^{eps t}``, kept unexpanded until a pole projection
    tauN    hierarchy time number N (N >= 2; tau1 is identified with t)
    EtauN   ``e^{eps^N tauN}``, the hierarchy analogue of E
    ======  ==============================================================

``EpsLaurent``
    Laurent series in eps whose coefficients are ``Poly``.  A series is either
    exact (``trunc is None``: a finite Laurent polynomial) or known only up to
    ``eps**trunc``.  Arithmetic narrows ``trunc`` conservatively.

Nothing in this module uses floating point.
"""

from __future__ import annotations

import ast
import math
from fractions import Fraction

from .errors import (
    DivergentLimit,
    ExpandedInput,
    NotInvertible,
    TruncationExhausted,
    UnexpandedExponential,
)

__all__ = [
    "Poly",
    "EpsLaurent",
    "var_index",
    "var_name",
    "series",
    "G",
    "T",
    "Q",
    "E",
    "tau_index",
    "etau_index",
]

G, T, Q, E = 0, 1, 2, 3
_BASE = 4
ONE = (0, 0, 0, 0)


def tau_index(n):
    if n == 1:
        return T
    if n < 2:
        raise ValueError(f"hierarchy time index must be >= 1, got {n}")
    return _BASE + 2 * (n - 2)


def etau_index(n):
    if n == 1:
        return E
    if n < 2:
        raise ValueError(f"hierarchy time index must be >= 1, got {n}")
    return _BASE + 2 * (n - 2) + 1


def var_index(name):
    if name == "g":
        return G
    if name in ("t", "tau1"):
        return T
    if name == "q":
        return Q
    if name in ("E", "Etau1"):
        return E
    if name.startswith("Etau") and name[4:].isdigit():
        return etau_index(int(name[4:]))
    if name.startswith("tau") and name[3:].isdigit():
        return tau_index(int(name[3:]))
    raise KeyError(f"unknown variable {name!r}")


def var_name(idx):
    if idx < _BASE:
        return "gtqE"[idx]
    n = (idx - _BASE) // 2 + 2
    return f"tau{n}" if (idx - _BASE) % 2 == 0 else f"Etau{n}"


def _exp_vars(mono):
    """(index, eps weight, polynomial variable) for each exponential variable present."""
    out = []
    if mono[E]:
        out.append((E, 1, T))
    for idx in range(_BASE + 1, len(mono), 2):
        if mono[idx]:
            out.append((idx, (idx - _BASE) // 2 + 2, idx - 1))
    return out


def _strip(m):
    n = len(m)
    while n > _BASE and m[n - 1] == 0:
        n -= 1
    return m if n == len(m) else m[:n]


def mono_mul(a, b):
    la, lb = len(a), len(b)
    if la == lb:
        r = tuple(x + y for x, y in zip(a, b))
        return _strip(r) if la > _BASE else r
    if la < lb:
        a = a + (0,) * (lb - la)
    else:
        b = b + (0,) * (la - lb)
    return _strip(tuple(x + y for x, y in zip(a, b)))


def mono_pow(a, k):
    return _strip(tuple(x * k for x in a))


def _mono_with(mono, idx, value):
    if idx >= len(mono):
        if value == 0:
            return mono
        mono = mono + (0,) * (idx + 1 - len(mono))
    m = list(mono)
    m[idx] = value
    return _strip(tuple(m))


def unit_mono(idx, power=1):
    return _mono_with(ONE, idx, power)


def _exp(mono, idx):
    return mono[idx] if idx < len(mono) else 0


def _is_scalar(x):
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


class Poly:
    """Sparse polynomial ``{monomial: Fraction}``; monomials are exponent tuples."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None, *, _clean=False):
        if terms is None:
            terms = {}
        elif not _clean:
            terms = {m: Fraction(c) for m, c in terms.items() if c}
        self.terms = terms
        self._hash = None

    @classmethod
    def constant(cls, c):
        return cls({ONE: Fraction(c)} if c else {}, _clean=True)

    @classmethod
    def variable(cls, name, power=1):
        return cls({unit_mono(var_index(name), power): Fraction(1)}, _clean=True)

    @classmethod
    def monomial(cls, mono, c=1):
        return cls({_strip(tuple(mono)): Fraction(c)} if c else {}, _clean=True)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if _is_scalar(other):
            other = Poly.constant(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()}, _clean=True)

    def __add__(self, other):
        if _is_scalar(other):
            other = Poly.constant(other)
        if not isinstance(other, Poly):
            return NotImplemented
        if len(other.terms) > len(self.terms):
            self, other = other, self
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Poly(out, _clean=True)

    __radd__ = __add__

    def __sub__(self, other):
        if _is_scalar(other):
            other = Poly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            if not other:
                return Poly()
            return Poly({m: c * other for m, c in self.terms.items()}, _clean=True)
        if not isinstance(other, Poly):
            return NotImplemented
        out = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = mono_mul(ma, mb)
                v = out.get(m, 0) + ca * cb
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Poly(out, _clean=True)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            if len(self.terms) != 1:
                raise NotInvertible(f"cannot raise {self} to a negative power")
            ((m, c),) = self.terms.items()
            _check_unit_mono(m)
            return Poly({mono_pow(m, k): Fraction(c) ** k}, _clean=True)
        out = Poly.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def degree(self, idx):
        return max((_exp(m, idx) for m in self.terms), default=0)

    def min_degree(self, idx):
        return min((_exp(m, idx) for m in self.terms), default=0)

    def has_var(self, idx):
        return any(_exp(m, idx) for m in self.terms)

    def variables(self):
        names = set()
        for m in self.terms:
            for idx, e in enumerate(m):
                if e:
                    names.add(var_name(idx))
        return names

    def euler(self, idx):
        """``x d/dx`` in variable ``idx``: scale each term by its exponent."""
        out = {}
        for m, c in self.terms.items():
            e = _exp(m, idx)
            if e:
                out[m] = c * e
        return Poly(out, _clean=True)

    def diff(self, idx):
        out = {}
        for m, c in self.terms.items():
            e = _exp(m, idx)
            if e:
                nm = _mono_with(m, idx, e - 1)
                out[nm] = out.get(nm, 0) + c * e
        return Poly(out)

    def times_mono(self, mono):
        return Poly({mono_mul(m, mono): c for m, c in self.terms.items()}, _clean=True)

    def subs(self, rules):
        """Substitute variables by monomials.

        ``rules`` maps a variable index to ``None`` (meaning zero) or to a
        monomial tuple (``ONE`` sets the variable to 1).
        """
        out = {}
        for m, c in self.terms.items():
            nm = m
            dead = False
            for idx, image in rules.items():
                e = _exp(m, idx)
                if not e:
                    continue
                if image is None:
                    dead = True
                    break
                nm = mono_mul(_mono_with(nm, idx, 0), mono_pow(image, e))
            if dead:
                continue
            v = out.get(nm, 0) + c
            if v:
                out[nm] = v
            else:
                out.pop(nm, None)
        return Poly(out, _clean=True)

    def part(self, idx, k):
        """Terms with exponent ``k`` in variable ``idx`` (variable kept)."""
        return Poly({m: c for m, c in self.terms.items() if _exp(m, idx) == k}, _clean=True)

    def split_by(self, idx):
        out = {}
        for m, c in self.terms.items():
            out.setdefault(_exp(m, idx), {})[_mono_with(m, idx, 0)] = c
        return {k: Poly(v, _clean=True) for k, v in out.items()}

    def _sorted_items(self):
        return sorted(self.terms.items(), key=lambda mc: mc[0])

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self._sorted_items():
            factors = []
            for idx, e in enumerate(m):
                if e == 1:
                    factors.append(var_name(idx))
                elif e:
                    factors.append(f"{var_name(idx)}^{e}")
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")


def _check_unit_mono(m):
    for idx, e in enumerate(m):
        if e and (idx in (G, T) or (idx >= _BASE and (idx - _BASE) % 2 == 0)):
            raise NotInvertible(f"variable {var_name(idx)} is not a unit")


def _as_poly(c):
    return c if isinstance(c, Poly) else Poly.constant(c)


def _tmin(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class EpsLaurent:
    """Laurent series in eps over ``Poly``.

    ``coeffs`` maps eps-exponents to nonzero ``Poly`` values.  ``trunc`` is
    ``None`` for an exact Laurent polynomial, otherwise the highest power
    whose coefficient is known.
    """

    __slots__ = ("coeffs", "trunc", "_hash")

    def __init__(self, coeffs=None, trunc=None):
        clean = {}
        if coeffs:
            for k, p in coeffs.items():
                if trunc is not None and k > trunc:
                    continue
                p = _as_poly(p)
                if p.terms:
                    clean[int(k)] = p
        self.coeffs = clean
        self.trunc = trunc
        self._hash = None

    # constructors -------------------------------------------------------

    @classmethod
    def zero(cls, trunc=None):
        return cls({}, trunc)

    @classmethod
    def one(cls):
        return cls({0: Poly.constant(1)})

    @classmethod
    def const(cls, c):
        return cls({0: _as_poly(c)})

    @classmethod
    def eps(cls, k=1, c=1):
        return cls({k: Poly.constant(c)})

    @classmethod
    def var(cls, name, power=1):
        return cls({0: Poly.variable(name, power)})

    # structure ----------------------------------------------------------

    @property
    def min_power(self):
        return min(self.coeffs) if self.coeffs else 0

    @property
    def max_power(self):
        return max(self.coeffs) if self.coeffs else 0

    def valuation(self):
        """Lowest power that may be nonzero; ``None`` for the exact zero."""
        if self.coeffs:
            return min(self.coeffs)
        return None if self.trunc is None else self.trunc + 1

    def is_exact(self):
        return self.trunc is None

    def is_zero(self):
        """True when every known coefficient vanishes."""
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def coefficient(self, k):
        if self.trunc is not None and k > self.trunc:
            raise TruncationExhausted(f"coefficient of eps^{k} unknown beyond order {self.trunc}")
        return self.coeffs.get(k, Poly())

    def variables(self):
        names = set()
        for p in self.coeffs.values():
            names |= p.variables()
        return names

    def has_var(self, name):
        idx = var_index(name)
        return any(p.has_var(idx) for p in self.coeffs.values())

    def free_of(self, *names):
        return not any(self.has_var(n) for n in names)

    def q_support(self):
        out = set()
        for p in self.coeffs.values():
            for m in p.terms:
                out.add(m[Q])
        return out

    def __eq__(self, other):
        if _is_scalar(other):
            other = EpsLaurent.const(other)
        if not isinstance(other, EpsLaurent):
            return NotImplemented
        return self.trunc == other.trunc and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.trunc, frozenset(self.coeffs.items())))
        return self._hash

    # arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, EpsLaurent):
            return other
        if _is_scalar(other) or isinstance(other, Poly):
            return EpsLaurent.const(other)
        return None

    def __neg__(self):
        return EpsLaurent({k: -p for k, p in self.coeffs.items()}, self.trunc)

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        trunc = _tmin(self.trunc, other.trunc)
        out = dict(self.coeffs)
        for k, p in other.coeffs.items():
            out[k] = out[k] + p if k in out else p
        return EpsLaurent(out, trunc)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        if not c:
            return EpsLaurent({}, self.trunc)
        return EpsLaurent({k: p * c for k, p in self.coeffs.items()}, self.trunc)

    def shift(self, k):
        """Multiply by ``eps**k``."""
        trunc = None if self.trunc is None else self.trunc + k
        return EpsLaurent({j + k: p for j, p in self.coeffs.items()}, trunc)

    def __mul__(self, other):
        if _is_scalar(other):
            return self.scale(other)
        if isinstance(other, Poly):
            return EpsLaurent({k: p * other for k, p in self.coeffs.items()}, self.trunc)
        if not isinstance(other, EpsLaurent):
            return NotImplemented
        va, vb = self.valuation(), other.valuation()
        if (not self.coeffs and self.trunc is None) or (not other.coeffs and other.trunc is None):
            return EpsLaurent()
        trunc = None
        if self.trunc is not None:
            trunc = self.trunc + vb
        if other.trunc is not None:
            trunc = _tmin(trunc, other.trunc + va)
        out = {}
        for ka, pa in self.coeffs.items():
            for kb, pb in other.coeffs.items():
                k = ka + kb
                if trunc is not None and k > trunc:
                    continue
                prod = pa * pb
                out[k] = out[k] + prod if k in out else prod
        return EpsLaurent(out, trunc)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.invert() ** (-k)
        out = EpsLaurent.one()
        for _ in range(k):
            out = out * self
        return out

    def __truediv__(self, other):
        if _is_scalar(other):
            return self.scale(Fraction(1) / Fraction(other))
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.invert()

    def __rtruediv__(self, other):
        return EpsLaurent.const(other) * self.invert()

    def invert(self, order=None):
        """Multiplicative inverse.

        The leading coefficient must be a rational times a unit monomial
        (units: q, E, EtauN).  An exact single-term series inverts exactly;
        otherwise the result is known up to ``order`` (default: the input's
        truncation, or 8 above the valuation for exact input).
        """
        if not self.coeffs:
            raise NotInvertible("zero series")
        v = min(self.coeffs)
        lead = self.coeffs[v]
        if len(lead.terms) != 1:
            raise NotInvertible(f"leading coefficient {lead} is not a unit")
        ((m, c),) = lead.terms.items()
        _check_unit_mono(m)
        inv_lead = Poly({mono_pow(m, -1): 1 / c}, _clean=True)
        if len(self.coeffs) == 1 and self.trunc is None:
            return EpsLaurent({-v: inv_lead})
        # a = lead eps^v (1 + r), r of positive valuation
        if order is None:
            order = self.trunc - 2 * v if self.trunc is not None else 8 - v
        rel = order + v  # 1/(1+r) is needed up to eps^rel
        r = EpsLaurent({k - v: p * inv_lead for k, p in self.coeffs.items() if k != v},
                       None if self.trunc is None else self.trunc - v)
        r = EpsLaurent(r.coeffs, _tmin(r.trunc, rel))
        total = EpsLaurent.one()
        power = EpsLaurent.one()
        for _ in range(max(rel, 0)):
            power = -(power * r)
            power = EpsLaurent(power.coeffs, _tmin(power.trunc, rel))
            if not power.coeffs and power.trunc is None:
                break
            total = total + power
        total = EpsLaurent(total.coeffs, _tmin(total.trunc, rel))
        if total.trunc is None and r.coeffs:
            total = EpsLaurent(total.coeffs, rel)
        return total.shift(-v) * EpsLaurent({0: inv_lead})

    def truncate(self, order):
        return EpsLaurent(self.coeffs, _tmin(self.trunc, order))

    def map_coeffs(self, fn):
        return EpsLaurent({k: fn(p) for k, p in self.coeffs.items()}, self.trunc)

    # projections --------------------------------------------------------

    def _require_expanded(self):
        for p in self.coeffs.values():
            for m in p.terms:
                if _exp_vars(m):
                    raise UnexpandedExponential(
                        f"pole projection of {self} needs exponential variables expanded first")

    def pole_part(self):
        """Minimal-subtraction projection: all strictly negative eps powers (exact)."""
        self._require_expanded()
        if self.trunc is not None and self.trunc < -1:
            raise TruncationExhausted(f"pole part unknown: series known only to eps^{self.trunc}")
        return EpsLaurent({k: p for k, p in self.coeffs.items() if k < 0})

    def regular_part(self):
        self._require_expanded()
        return EpsLaurent({k: p for k, p in self.coeffs.items() if k >= 0}, self.trunc)

    def pole_content(self):
        """Negative-power terms without the expansion requirement (diagnostics only)."""
        return EpsLaurent({k: p for k, p in self.coeffs.items() if k < 0})

    def at_eps_zero(self):
        """Value at eps = 0 of a series regular there."""
        if any(k < 0 for k in self.coeffs):
            raise DivergentLimit(f"{self} has a pole at eps = 0")
        return self.coefficient(0)

    # exponentials -------------------------------------------------------

    def expand(self, order):
        """Replace every E^n and EtauN^n by its exponential series.

        The result is known up to ``eps**order`` (or the input truncation, if
        lower).  Input without exponential variables is returned unchanged.
        """
        if not any(_exp_vars(m) for p in self.coeffs.values() for m in p.terms):
            return self
        top = _tmin(order, self.trunc)
        out = {}
        for k, poly in self.coeffs.items():
            if k > top:
                continue
            budget = top - k
            for mono, c in poly.terms.items():
                evars = _exp_vars(mono)
                base = mono
                for idx, _, _ in evars:
                    base = _mono_with(base, idx, 0)
                acc = {0: {base: c}}
                for idx, weight, pvar in evars:
                    n = mono[idx]
                    factor = []
                    coef = Fraction(1)
                    for j in range(budget // weight + 1):
                        if j:
                            coef = coef * n / j
                        factor.append((j * weight, unit_mono(pvar, j), coef))
                    nxt = {}
                    for pw, terms in acc.items():
                        for fpw, fm, fc in factor:
                            tot = pw + fpw
                            if tot > budget:
                                break
                            bucket = nxt.setdefault(tot, {})
                            for tm, tc in terms.items():
                                nm = mono_mul(tm, fm)
                                bucket[nm] = bucket.get(nm, 0) + tc * fc
                    acc = nxt
                for pw, terms in acc.items():
                    p = Poly(terms)
                    key = k + pw
                    out[key] = out[key] + p if key in out else p
        return EpsLaurent(out, top)

    # calculus -----------------------------------------------------------

    def differentiate(self, var):
        """Formal derivative in ``eps``, ``t``, ``x`` or a hierarchy time ``tauN``.

        ``d/dx`` is the Euler operator ``g d/dg``.  Exponential variables obey
        ``dE/dt = eps E``, ``dE/deps = t E``, ``dq/dt = -q`` and the analogous
        rules for EtauN.
        """
        if var == "x":
            return self.map_coeffs(lambda p: p.euler(G))
        if var == "eps":
            return self._d_eps()
        idx = var_index(var)
        if idx == T:
            out = {}
            for k, p in self.coeffs.items():
                _acc(out, k, p.diff(T) - p.euler(Q))
                _acc(out, k + 1, p.euler(E))
            return EpsLaurent(out, self.trunc)
        if idx >= _BASE and (idx - _BASE) % 2 == 0:
            n = (idx - _BASE) // 2 + 2
            out = {}
            for k, p in self.coeffs.items():
                _acc(out, k, p.diff(idx))
                _acc(out, k + n, p.euler(idx + 1))
            return EpsLaurent(out, self.trunc)
        raise ValueError(f"cannot differentiate with respect to {var!r}")

    def _d_eps(self):
        out = {}
        t1 = unit_mono(T)
        for k, p in self.coeffs.items():
            if k:
                _acc(out, k - 1, p * k)
            if p.has_var(E):
                _acc(out, k, p.euler(E).times_mono(t1))
            for idx in range(_BASE + 1, max(len(m) for m in p.terms), 2):
                if p.has_var(idx):
                    n = (idx - _BASE) // 2 + 2
                    _acc(out, k + n - 1, p.euler(idx).times_mono(unit_mono(idx - 1)) * n)
        return EpsLaurent(out, None if self.trunc is None else self.trunc - 1)

    # substitutions ------------------------------------------------------

    def subs(self, rules):
        """Apply ``Poly.subs`` to every coefficient (rules keyed by variable name)."""
        irules = {var_index(k): v for k, v in rules.items()}
        return self.map_coeffs(lambda p: p.subs(irules))

    def at_unit_mass(self):
        """Set t = 0 (so E = 1, q = 1)."""
        return self.map_coeffs(lambda p: p.subs({T: None, E: ONE, Q: ONE}))

    def substitute_recovery(self):
        """x -> x - t together with t -> t/eps, i.e. g -> g q and E -> 1/q."""
        for p in self.coeffs.values():
            if p.has_var(T):
                raise ExpandedInput(f"{self} carries explicit t; recovery needs the E-closed form")
            for m in p.terms:
                if len(m) > _BASE:
                    raise ValueError("recovery substitution is defined for unit-mass flows only")
        gq = mono_mul(unit_mono(G), unit_mono(Q))
        qinv = unit_mono(Q, -1)
        return self.map_coeffs(lambda p: p.subs({G: gq, E: qinv}))

    def limit_q0(self):
        """q^0 part, certified: any surviving negative power of q is a divergence."""
        out = {}
        for k, p in self.coeffs.items():
            if p.min_degree(Q) < 0:
                raise DivergentLimit(f"negative power of q in {self}")
            part = p.part(Q, 0)
            if part:
                out[k] = part
        return EpsLaurent(out, self.trunc)

    # serialization ------------------------------------------------------

    def to_json(self):
        coeffs = []
        for k in sorted(self.coeffs):
            terms = []
            for m, c in self.coeffs[k]._sorted_items():
                taus = [m[i] for i in range(_BASE, len(m), 2)]
                etaus = [m[i] for i in range(_BASE + 1, len(m), 2)]
                if len(etaus) < len(taus):
                    etaus.append(0)
                terms.append({
                    "mono": {"g": m[G], "t": m[T], "q": m[Q], "E": m[E], "tau": taus, "Etau": etaus},
                    "num": str(c.numerator),
                    "den": str(c.denominator),
                })
            coeffs.append({"eps": k, "terms": terms})
        return {"min_power": self.min_power, "trunc_order": self.trunc, "coeffs": coeffs}

    @classmethod
    def from_json(cls, data):
        out = {}
        for entry in data["coeffs"]:
            terms = {}
            for term in entry["terms"]:
                mono = term["mono"]
                m = [mono.get("g", 0), mono.get("t", 0), mono.get("q", 0), mono.get("E", 0)]
                taus = mono.get("tau", [])
                etaus = mono.get("Etau", [])
                for i in range(max(len(taus), len(etaus))):
                    m.append(taus[i] if i < len(taus) else 0)
                    m.append(etaus[i] if i < len(etaus) else 0)
                terms[_strip(tuple(m))] = Fraction(int(term["num"]), int(term["den"]))
            out[int(entry["eps"])] = Poly(terms)
        trunc = data.get("trunc_order")
        return cls(out, None if trunc is None else int(trunc))

    def __repr__(self):
        return f"EpsLaurent({self})"

    def __str__(self):
        parts = []
        for k in sorted(self.coeffs):
            p = str(self.coeffs[k])
            if k == 0:
                parts.append(p)
                continue
            if len(self.coeffs[k].terms) > 1:
                p = f"({p})"
            epart = "eps" if k == 1 else f"eps^{k}"
            parts.append(epart if p == "1" else f"{p}*{epart}")
        body = " + ".join(parts) if parts else "0"
        if self.trunc is not None:
            body += f" + O(eps^{self.trunc + 1})"
        return body.replace("+ -", "- ")


def _acc(out, k, p):
    if p.terms:
        out[k] = out[k] + p if k in out else p


_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
}


def series(text):
    """Build an exact ``EpsLaurent`` from an arithmetic expression.

    >>> str(series("g^2*(E-1)^2/(2*eps^2)")) == str(series("g^2*(E^2 - 2*E + 1)/2 * eps^-2"))
    True

    Names are ``eps`` plus the variables listed in the module docstring;
    division is allowed by units only.
    """
    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and _is_scalar(node.value):
            return EpsLaurent.const(node.value)
        if isinstance(node, ast.Name):
            if node.id == "eps":
                return EpsLaurent.eps(1)
            return EpsLaurent.var(node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                k = ast.literal_eval(node.right)
                if not isinstance(k, int):
                    raise ValueError(f"non-integer exponent in {text!r}")
                return ev(node.left) ** k
            op = _BINOPS.get(type(node.op))
            if op is not None:
                return op(ev(node.left), ev(node.right))
        raise ValueError(f"unsupported syntax in {text!r}")

    return ev(tree)


def factorial_fraction(n):
    return Fraction(1, math.factorial(n))
