import pytest
from hypothesis import given, settings, strategies as st

from hfpss.errors import NonTerminating, ParseError, WindowExceeded
from hfpss.gradedring import (
    DegreeBox,
    RingGenerator,
    RingPresentation,
    apply_derivation,
    basis_in_bidegree,
    parse_polynomial,
    rule,
    weight_zero_line,
)
from hfpss.scenarios import kq_ring, ku_e2_ring

P = ku_e2_ring()
D3 = {"h1": {}, "a": P.parse("h1^3"), "z": P.parse("h1*z^2")}


def nf(text):
    return P.render_poly(P.normalize(P.parse(text)))


def test_normal_forms():
    assert nf("a^2*z^2") == "h1^4"
    assert nf("h1^4") == "h1^4"
    assert nf("2*h1^3") == "0"


def test_two_h1_squared_vanishes():
    assert P.normalize(P.parse("a*z + h1^2")) == {}


def test_no_violations_for_ku_ring():
    assert P.order_violations() == []
    assert P.degree_violations() == []
    assert P.sign_ambiguities() == []
    assert P.confluence_failures() == []


def test_increasing_rule_is_reported():
    bad = RingPresentation(P.generators, (rule("h1^2", "a*z"),))
    assert bad.order_violations()


def test_inhomogeneous_rule_is_reported():
    bad = RingPresentation(P.generators, (rule("a*z", "h1"),))
    assert bad.degree_violations()


def test_nonterminating_rewrite():
    gens = (RingGenerator("x", 2), RingGenerator("y", 2))
    # both rules raise the leading exponent of the other: x -> y -> x ...
    loop = RingPresentation(gens, (rule("x", "y"), rule("y", "x")))
    with pytest.raises(NonTerminating):
        loop.normalize(loop.parse("x"))


def test_basis_examples():
    box = DegreeBox(-6, 30, 0, 16)
    assert basis_in_bidegree(P, 2, 1, box) == [(P.gen("h1"), 2)]
    assert basis_in_bidegree(P, 4, 0, box) == [(P.gen("a"), 0)]
    assert basis_in_bidegree(P, 4, 1, box) == []
    with pytest.raises(WindowExceeded):
        basis_in_bidegree(P, 40, 0, box)


def test_leibniz_values():
    def d(text):
        return P.render_poly(apply_derivation(P, P.parse(text), D3))

    assert d("a*z") == "0"
    assert d("a^2") == "0"
    assert d("h1*a") == "h1^4"
    assert d("h1*z") == "h1^2*z^2"
    assert d("h1^2*z") == "h1^3*z^2"
    assert d("h1^3*z^2") == "0"
    assert d("1") == "0"


def test_parse_polynomial_forms():
    assert parse_polynomial("2h1 - a^2*z + 4*b^-1") == [
        (2, [("h1", 1)]),
        (-1, [("a", 2), ("z", 1)]),
        (4, [("b", -1)]),
    ]
    with pytest.raises(ParseError):
        parse_polynomial("h1 + ")
    with pytest.raises(ParseError):
        parse_polynomial("h1^x")


def test_kq_weight_zero_line():
    line = weight_zero_line(kq_ring(), range(9))
    assert [line[t].label() for t in range(9)] == ["Z_2", "Z/2", "Z/2", "0", "Z_2", "0", "0", "0", "Z_2"]
    assert line[1].generator_names == ("tau*h1",)
    assert line[4].generator_names == ("tau^2*a",)
    assert line[8].generator_names == ("tau^4*b",)


def test_kq_relations_present():
    texts = [r.text() for r in kq_ring().relations]
    assert ("a^2", "4*b") in texts


monomial_text = st.builds(
    lambda i, j, k: f"h1^{i}*a^{j}*z^{k}",
    st.integers(0, 5),
    st.integers(0, 4),
    st.integers(0, 4),
)


@given(st.lists(st.tuples(st.integers(-5, 5), monomial_text), min_size=1, max_size=4))
@settings(max_examples=100, deadline=None)
def test_normalize_idempotent(terms):
    poly = P.parse(" + ".join(f"{c}*{m}" if c >= 0 else f"0 - {-c}*{m}" for c, m in terms))
    once = P.normalize(poly)
    assert P.normalize(once) == once
    assert all(P.is_normal(m) for m in once)


@given(monomial_text, monomial_text)
@settings(max_examples=100, deadline=None)
def test_derivation_squares_to_zero_and_is_leibniz(x, y):
    px, py = P.parse(x), P.parse(y)
    prod = P.multiply_poly(px, py)
    dd = apply_derivation(P, apply_derivation(P, prod, D3), D3)
    assert dd == {}
    # d(xy) = d(x) y + (-1)^|x| x d(y)
    (mx,) = px
    sign = -1 if P.stem(mx) % 2 else 1
    lhs = apply_derivation(P, prod, D3)
    rhs = P.multiply_poly(apply_derivation(P, px, D3), py)
    for m, c in P.multiply_poly(px, apply_derivation(P, py, D3)).items():
        rhs[m] = rhs.get(m, 0) + sign * c
    assert lhs == P.normalize(rhs)
