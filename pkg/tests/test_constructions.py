import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import ce_cohomology_trivial
from stackycdga import samples
from stackycdga.cdga import MorphismPresentation, check_d_squared, cohomology_dim
from stackycdga.constructions import (
    ActionData,
    AffineData,
    LieAlgebraData,
    abelian,
    ce_flatness_equivalence,
    check_action,
    check_jacobi,
    chevalley_eilenberg,
    de_rham,
    gl,
    sl2,
)
from stackycdga.errors import InvalidAction, InvalidLie, ValidationError


def broken_sl2():
    return LieAlgebraData(["h", "e", "f"], {("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"e": 1}})


def test_jacobi_examples():
    assert check_jacobi(abelian(4)).passed
    assert check_jacobi(sl2()).passed
    assert check_jacobi(gl(3)).passed
    rep = check_jacobi(broken_sl2())
    assert not rep.passed
    assert sorted(rep.witness["triple"]) == ["e", "f", "h"]


def test_lie_data_validation():
    with pytest.raises(ValidationError):
        LieAlgebraData(["a", "a"])
    with pytest.raises(ValidationError):
        LieAlgebraData(["a", "b"], {("a", "a"): {"b": 1}})
    with pytest.raises(ValidationError):
        LieAlgebraData(["a", "b"], {("a", "c"): {"b": 1}})
    # swapped pairs are stored antisymmetrically
    g = LieAlgebraData(["a", "b"], {("b", "a"): {"a": 1}})
    assert g.structure_constant(0, 1, 0) == -1
    assert g.structure_constant(1, 0, 0) == 1


def test_ce_gm():
    A = samples.gm_over_gl1()
    assert A.d(A.gen("t")) == A.parse("t*ev")
    assert not A.d(A.gen("ev"))


def test_ce_zero_lie_algebra():
    Y = AffineData.affine_space(2)
    A = chevalley_eilenberg(Y, LieAlgebraData([]))
    assert A.presentation.names == Y.names
    assert all(not v for v in A.differential.values())


def test_ce_sl2_differentials():
    A = samples.sl2_ce()
    assert A.d(A.gen("hv")) == A.parse("-ev*fv")
    assert A.d(A.gen("ev")) == A.parse("-2*hv*ev")
    assert A.d(A.gen("fv")) == A.parse("2*hv*fv")
    assert check_d_squared(A).passed


@pytest.mark.parametrize("g", [sl2(), gl(2), abelian(3)], ids=["sl2", "gl2", "abelian3"])
def test_ce_cohomology_matches_definition(g):
    A = chevalley_eilenberg(AffineData.point(), g)
    ours = [cohomology_dim(A, n, 0) for n in range(g.dim + 1)]
    assert ours == ce_cohomology_trivial(g.dim, g.bracket_basis)


def test_ce_rejects_invalid_inputs():
    Y = AffineData.point()
    with pytest.raises(InvalidLie):
        chevalley_eilenberg(Y, broken_sl2())
    Y = AffineData.affine_space(1)
    g = abelian(2)
    alpha = ActionData(Y, g, {"e1": {"x": 1}, "e2": {"x": "x"}})
    with pytest.raises(InvalidAction):
        chevalley_eilenberg(Y, g, alpha, dual_weights={"e1": 1})
    with pytest.raises(ValidationError):
        ActionData(Y, g, {"e3": {"x": 1}})
    with pytest.raises(ValidationError):
        chevalley_eilenberg(Y, g, dual_weights={"zz": 1})


def test_de_rham_examples():
    pt = de_rham(AffineData.point())
    assert not list(pt.presentation.names)
    assert cohomology_dim(pt, 0, 0) == 1
    A1 = samples.de_rham_affine(1)
    assert A1.d(A1.gen("x")) == A1.gen("dx")
    assert [len(A1.slice_basis(n, 2)) for n in range(3)] == [1, 1, 0]
    Gm = de_rham(AffineData.gm("t", weight=1))
    assert Gm.d(Gm.parse("t^-1")) == Gm.parse("-t^-2*dt")
    assert cohomology_dim(Gm, 1, 0) == 1
    # t^-1 dt is closed and, since degree-0 weight 0 is spanned by 1, not exact
    assert not Gm.d(Gm.parse("t^-1*dt"))
    assert len(Gm.slice_basis(0, 0)) == 1 and not Gm.d(Gm.one())


@pytest.mark.parametrize("k,wmax", [(1, 10), (2, 10), (3, 10)])
def test_poincare_lemma(k, wmax):
    A = samples.de_rham_affine(k)
    for w in range(wmax + 1):
        for n in range(k + 1):
            want = 1 if (n, w) == (0, 0) else 0
            assert cohomology_dim(A, n, w) == want, (n, w)


def test_flatness_equivalence_examples():
    pt = AffineData.point()
    assert ce_flatness_equivalence(pt, sl2()).passed
    rep = ce_flatness_equivalence(pt, broken_sl2())
    assert rep.passed
    assert "jacobi=fail" in rep.message.lower() and "d_squared=fail" in rep.message.lower()
    Y = AffineData.affine_space(1)
    g = abelian(2)
    alpha = ActionData(Y, g, {"e1": {"x": 1}, "e2": {"x": "x"}})
    assert not check_action(alpha).passed
    rep = ce_flatness_equivalence(Y, g, alpha, dual_weights={"e1": 1})
    assert rep.passed
    assert "action=fail" in rep.message.lower() and "d_squared=fail" in rep.message.lower()


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6))
def test_random_gl2_actions_square_to_zero(seed):
    Y, g, alpha = samples.gl2_linear_action(random.Random(seed))
    assert check_action(alpha).passed
    assert check_d_squared(chevalley_eilenberg(Y, g, alpha)).passed


def test_functoriality_smoke():
    # Y = A^2 scaled by e, Y' = A^1 with weight-2 coordinate, u -> x*y is equivariant
    g = abelian(1)
    Y = AffineData.affine_space(2)
    Yp = AffineData.build(("u", 0, 2))
    A = chevalley_eilenberg(Y, g, ActionData(Y, g, {"e": {"x1": "x1", "x2": "x2"}}))
    Ap = chevalley_eilenberg(Yp, g, ActionData(Yp, g, {"e": {"u": "2*u"}}))
    f = MorphismPresentation(Ap, A, {"u": "x1*x2", "ev": "ev"})
    assert f.check_chain_map().passed
    assert MorphismPresentation(Ap, A, {"u": "x1^2", "ev": "ev"}).check_chain_map().passed
    # with e acting on u by weight 1 the same map is no longer equivariant
    Aq = chevalley_eilenberg(Yp, g, ActionData(Yp, g, {"e": {"u": "u"}}))
    assert not MorphismPresentation(Aq, A, {"u": "x1*x2", "ev": "ev"}).check_chain_map().passed
