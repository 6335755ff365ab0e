from fractions import Fraction

from hypothesis import strategies as st

from riexact.exactfun import StepFunction, make

small = st.fractions(min_value=-8, max_value=8, max_denominator=6)
positive = st.fractions(min_value=Fraction(1, 6), max_value=8, max_denominator=6)


@st.composite
def steps(draw, nonneg=False, max_pieces=8):
    m = draw(st.integers(1, max_pieces))
    grid = draw(st.lists(st.integers(0, 48), min_size=m + 1, max_size=m + 1, unique=True))
    pts = [Fraction(x, 4) for x in sorted(grid)]
    vals = draw(st.lists(positive if nonneg else small, min_size=m, max_size=m))
    return StepFunction.from_values(pts, vals)


@st.composite
def affine_pieces(draw, max_pieces=4):
    """Piecewise affine functions with rational level-set measures."""
    m = draw(st.integers(1, max_pieces))
    grid = draw(st.lists(st.integers(0, 24), min_size=m + 1, max_size=m + 1, unique=True))
    pts = [Fraction(x, 2) for x in sorted(grid)]
    pieces = []
    for lo, hi in zip(pts, pts[1:]):
        c0 = draw(small)
        c1 = draw(st.fractions(min_value=-4, max_value=4, max_denominator=4))
        pieces.append((lo, hi, (c0 - c1 * lo, c1)))
    return make(pieces)
