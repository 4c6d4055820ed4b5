import pytest
from hypothesis import given, settings, strategies as st

from hfpss.abgroup import FgAbGroup, IntMatrix
from hfpss.c2cohomology import C2Module, cohomology_bar, cohomology_periodic
from hfpss.errors import InvalidModule, OracleLimitExceeded

from corpus import module_corpus

Z = FgAbGroup.integers("x")


def labels(M, degrees):
    return [cohomology_periodic(M, s).label() for s in degrees]


def test_integers_sign():
    assert labels(C2Module.sign(Z), range(5)) == ["0", "Z/2", "0", "Z/2", "0"]


def test_integers_trivial():
    assert labels(C2Module.trivial(Z), range(3)) == ["Z", "0", "Z/2"]


def test_regular_module_is_free():
    M = C2Module(FgAbGroup.from_orders([0, 0]), IntMatrix.from_rows([[0, 1], [1, 0]]))
    assert labels(M, range(4)) == ["Z", "0", "0", "0"]


def test_odd_order_is_acyclic():
    M = C2Module.sign(FgAbGroup.cyclic(3))
    assert [cohomology_periodic(M, s).is_trivial() for s in range(1, 5)] == [True] * 4


def test_generator_names_are_cocycles():
    # H^1 = ker(N) = ker(2) on Z/4 is spanned by 2x
    M = C2Module.trivial(FgAbGroup.cyclic(4, "x"))
    assert cohomology_periodic(M, 1).generator_names == ("2x",)
    assert cohomology_periodic(M, 2).generator_names == ("x",)


def test_invalid_involutions():
    with pytest.raises(InvalidModule):
        C2Module(FgAbGroup.from_orders([0, 0]), IntMatrix.from_rows([[0, 1], [1, 1]]))
    with pytest.raises(InvalidModule):
        C2Module(FgAbGroup.from_orders([0, 0]), IntMatrix.from_rows([[1, 0, 0], [0, 1, 0]]))
    with pytest.raises(InvalidModule):
        # 3 on Z/4 is an involution, 2 is not even an automorphism
        C2Module(FgAbGroup.cyclic(4), IntMatrix.from_rows([[2]]))


def test_bar_oracle_limit():
    with pytest.raises(OracleLimitExceeded):
        cohomology_bar(C2Module.trivial(Z), 9)


def test_negative_degree_rejected():
    with pytest.raises(ValueError):
        cohomology_periodic(C2Module.trivial(Z), -1)


def test_oracle_agrees_on_corpus():
    for name, M in module_corpus():
        for s in range(7):
            assert cohomology_periodic(M, s).invariants() == cohomology_bar(M, s).invariants(), (name, s)


@given(st.sampled_from(module_corpus()), st.integers(1, 20))
@settings(max_examples=80, deadline=None)
def test_periodicity(named, s):
    _, M = named
    assert cohomology_periodic(M, s + 2).invariants() == cohomology_periodic(M, s).invariants()


@given(st.sampled_from(module_corpus()), st.integers(1, 8))
@settings(max_examples=60, deadline=None)
def test_positive_degrees_are_2_torsion(named, s):
    _, M = named
    h = cohomology_periodic(M, s)
    assert h.free_rank == 0
    assert all(d == 2 for d in h.torsion)
