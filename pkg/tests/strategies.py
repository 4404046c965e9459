"""Hypothesis strategies for small exact series."""

from fractions import Fraction

from hypothesis import strategies as st

from ckrg.coeffs import EpsLaurent, Poly

rationals = st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3))

# (g, t, q, E) exponents; q and E kept non-negative so products stay polynomial
monomials = st.tuples(st.integers(0, 2), st.integers(0, 1), st.integers(0, 1), st.integers(0, 2))

polys = st.dictionaries(monomials, rationals, max_size=3).map(Poly)

exact_series = st.dictionaries(st.integers(-2, 2), polys, max_size=3).map(EpsLaurent)

# E-free series, so pole projection applies without expansion
plain_monomials = st.tuples(st.integers(0, 2), st.integers(0, 2))
plain_polys = st.dictionaries(plain_monomials, rationals, max_size=3).map(
    lambda d: Poly({(g, t, 0, 0): c for (g, t), c in d.items()}))
plain_series = st.dictionaries(st.integers(-3, 3), plain_polys, max_size=4).map(EpsLaurent)


@st.composite
def truncated_series(draw):
    s = draw(exact_series)
    trunc = draw(st.integers(-1, 4))
    return EpsLaurent(s.coeffs, trunc)


@st.composite
def unit_led_series(draw):
    """Rational leading coefficient, so the series is invertible."""
    v = draw(st.integers(-2, 1))
    lead = draw(rationals.filter(bool))
    rest = draw(st.dictionaries(st.integers(v + 1, v + 3), plain_polys, max_size=2))
    coeffs = dict(rest)
    coeffs[v] = Poly.constant(lead)
    return EpsLaurent(coeffs)
