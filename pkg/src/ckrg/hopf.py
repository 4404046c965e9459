"""Exact checks of the Hopf-algebra axioms on every forest up to a degree cap."""

from __future__ import annotations

from .reports import FlowReport, LinComb
from .trees import ONE, antipode, coproduct, counit, grading_Y

__all__ = ["hopf_reports"]


def _acc(out, key, c):
    v = out.get(key, 0) + c
    if v:
        out[key] = v
    else:
        out.pop(key, None)


def _diff(a, b):
    out = LinComb(a)
    for k, c in b.items():
        _acc(out, k, -c)
    return out


def _mul(a, b):
    out = {}
    for f, c in a.items():
        for h, d in b.items():
            _acc(out, f * h, c * d)
    return out


def _tensor_mul(a, b):
    out = {}
    for (l1, r1), c in a.items():
        for (l2, r2), d in b.items():
            _acc(out, (l1 * l2, r1 * r2), c * d)
    return out


def _coassociativity(f):
    left, right = {}, {}
    for (a, b), c in coproduct(f).items():
        for (a1, a2), d in coproduct(a).items():
            _acc(left, (a1, a2, b), c * d)
        for (b1, b2), d in coproduct(b).items():
            _acc(right, (a, b1, b2), c * d)
    return _diff(left, right)


def _counit_laws(f):
    left, right = {}, {}
    for (a, b), c in coproduct(f).items():
        _acc(left, b, c * counit(a))
        _acc(right, a, c * counit(b))
    ident = {f: 1}
    return _diff(left, ident), _diff(right, ident)


def _antipode_laws(f):
    unit = {ONE: counit(f)} if counit(f) else {}
    left, right = {}, {}
    for (a, b), c in coproduct(f).items():
        for s, d in antipode(a).items():
            _acc(left, s * b, c * d)
        for s, d in antipode(b).items():
            _acc(right, a * s, c * d)
    return _diff(left, unit), _diff(right, unit)


def _coderivation(f):
    lhs = {}
    for (a, b), c in coproduct(f).items():
        _acc(lhs, (a, b), c * f.degree)
    rhs = {}
    for (a, b), c in coproduct(f).items():
        _acc(rhs, (a, b), c * (a.degree + b.degree))
    return _diff(lhs, rhs)


def _pairs(forests, max_degree):
    for i, f1 in enumerate(forests):
        for f2 in forests[i:]:
            if f1.degree and f2.degree and f1.degree + f2.degree <= max_degree:
                yield f1, f2


def hopf_reports(algebra):
    """One report per axiom; residuals are integer linear combinations of basis tensors."""
    forests = algebra.forests()
    coassoc = FlowReport("coassociativity")
    counit_l = FlowReport("counit_left")
    counit_r = FlowReport("counit_right")
    anti_l = FlowReport("antipode_left")
    anti_r = FlowReport("antipode_right")
    involution = FlowReport("antipode_involution")
    coder = FlowReport("grading_coderivation")
    for f in forests:
        k = f.encoding
        coassoc.add(k, _coassociativity(f))
        a, b = _counit_laws(f)
        counit_l.add(k, a)
        counit_r.add(k, b)
        a, b = _antipode_laws(f)
        anti_l.add(k, a)
        anti_r.add(k, b)
        twice = {}
        for s, c in antipode(f).items():
            for s2, d in antipode(s).items():
                _acc(twice, s2, c * d)
        involution.add(k, _diff(twice, {f: 1}))
        coder.add(k, _coderivation(f))

    delta_hom = FlowReport("coproduct_multiplicative")
    s_hom = FlowReport("antipode_multiplicative")
    y_der = FlowReport("grading_derivation")
    for f1, f2 in _pairs(forests, algebra.max_degree):
        k = f"{f1.encoding}*{f2.encoding}"
        prod = f1 * f2
        delta_hom.add(k, _diff(coproduct(prod), _tensor_mul(coproduct(f1), coproduct(f2))))
        s_hom.add(k, _diff(antipode(prod), _mul(antipode(f1), antipode(f2))))
        leibniz = {}
        for t, c in _mul(grading_Y({f1: 1}), {f2: 1}).items():
            _acc(leibniz, t, c)
        for t, c in _mul({f1: 1}, grading_Y({f2: 1})).items():
            _acc(leibniz, t, c)
        y_der.add(k, _diff(grading_Y({prod: 1}), leibniz))
    return [coassoc, counit_l, counit_r, anti_l, anti_r, involution,
            delta_hom, s_hom, y_der, coder]
