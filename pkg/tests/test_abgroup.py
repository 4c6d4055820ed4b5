import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix
from sympy.matrices.normalforms import invariant_factors as sympy_invariants

from hfpss.abgroup import (
    FgAbGroup,
    IntMatrix,
    extension_consistent,
    format_combination,
    group_from_presentation,
    invariant_factors,
    lr_positive,
    smith_normal_form,
    subquotient,
    subquotient_in,
)
from hfpss.errors import CompositionNonzero

small_ints = st.integers(min_value=-6, max_value=6)


@st.composite
def matrices(draw, max_dim=4):
    m = draw(st.integers(1, max_dim))
    n = draw(st.integers(1, max_dim))
    rows = draw(st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=m, max_size=m))
    return IntMatrix.from_rows(rows, n)


def test_snf_diag_2_3():
    U, D, V = smith_normal_form(IntMatrix.diag([2, 3]))
    assert D == IntMatrix.diag([1, 6])
    assert abs(U.det()) == 1 and abs(V.det()) == 1
    assert U @ IntMatrix.diag([2, 3]) @ V == D


def test_presentation_with_unit_relation():
    g = group_from_presentation(IntMatrix.from_rows([[2, 0], [1, 1]]))
    assert g.invariants() == (0, (2,))


def test_kernel_of_reduction_mod_2():
    # Z{a} -> Z/2: kernel generated by 2a
    g = subquotient(IntMatrix.zeros(1, 0), IntMatrix.from_rows([[1]]), FgAbGroup.integers("a"), [2])
    assert g.invariants() == (1, ())
    assert g.generator_names == ("2a",)


def test_cokernel_of_times_2():
    g = subquotient(IntMatrix.from_rows([[2]]), IntMatrix.zeros(0, 1))
    assert g.invariants() == (0, (2,))


def test_composition_nonzero_raises():
    with pytest.raises(CompositionNonzero):
        subquotient(IntMatrix.from_rows([[1]]), IntMatrix.from_rows([[1]]))


def test_zero_group_label():
    assert FgAbGroup().label() == "0"
    assert FgAbGroup.from_orders([4, 0]).label() == "Z ⊕ Z/4"
    assert FgAbGroup.integers("u", pro2=True).label() == "Z_2"


def test_format_combination():
    assert format_combination([2, 0, -1], ["a", "b", "h1"]) == "2a - h1"
    assert format_combination([0, 0], ["a", "b"]) == "0"


def test_extension_examples():
    z2, z4 = FgAbGroup.cyclic(2), FgAbGroup.cyclic(4)
    assert extension_consistent(z4, [z2, z2])
    assert extension_consistent(FgAbGroup.from_orders([2, 2]), [z2, z2])
    assert not extension_consistent(z2, [z2, z2])
    assert not extension_consistent(FgAbGroup.from_orders([2, 2, 2]), [z4, z2])
    assert extension_consistent(FgAbGroup.from_orders([4, 0]), [FgAbGroup.integers(), z2, z2])


def test_lr_small_cases():
    assert lr_positive((2,), (1,), (1,))
    assert lr_positive((1, 1), (1,), (1,))
    assert not lr_positive((2, 1), (1,), (1,))


@given(matrices())
@settings(max_examples=150, deadline=None)
def test_snf_is_unimodular_and_diagonal(A):
    U, D, V = smith_normal_form(A)
    assert abs(U.det()) == 1 and abs(V.det()) == 1
    assert U @ A @ V == D
    diag = [D[i, i] for i in range(min(D.rows, D.cols))]
    assert all(D[i, j] == 0 for i in range(D.rows) for j in range(D.cols) if i != j)
    nonzero = [d for d in diag if d]
    assert all(d > 0 for d in nonzero)
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))


@given(matrices())
@settings(max_examples=100, deadline=None)
def test_invariant_factors_match_sympy(A):
    ours = [d for d in invariant_factors(A) if d]
    theirs = [abs(int(d)) for d in sympy_invariants(Matrix(A.tolist())) if d]
    assert ours == theirs


@given(matrices(), st.data())
@settings(max_examples=100, deadline=None)
def test_presentation_invariant_under_unimodular_change(A, data):
    # cokernel does not depend on the choice of basis on either side
    U, _, V = smith_normal_form(
        IntMatrix.from_rows(data.draw(st.lists(st.lists(small_ints, min_size=A.rows, max_size=A.rows), min_size=A.rows, max_size=A.rows)), A.rows)
    )
    _, _, W = smith_normal_form(
        IntMatrix.from_rows(data.draw(st.lists(st.lists(small_ints, min_size=A.cols, max_size=A.cols), min_size=A.cols, max_size=A.cols)), A.cols)
    )
    g1 = group_from_presentation(A)
    g2 = group_from_presentation(U @ A @ W)
    assert g1.invariants() == g2.invariants()


@given(st.lists(st.sampled_from([0, 2, 3, 4, 8]), min_size=1, max_size=3), st.data())
@settings(max_examples=100, deadline=None)
def test_subquotient_order_divides(orders, data):
    # kernel of an endomorphism modulo the image of a map composing to zero
    n = len(orders)
    g_rows = [[data.draw(small_ints) for _ in range(n)] for _ in range(n)]
    try:
        sq = subquotient_in([], g_rows, orders, orders)
    except ValueError:
        return
    b = FgAbGroup.from_orders(orders)
    h = sq.group
    assert h.free_rank <= b.free_rank
    if b.free_rank == 0:
        assert b.torsion_order % h.torsion_order == 0
