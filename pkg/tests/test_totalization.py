import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_total_cohomology
from stackycdga import samples
from stackycdga.cdga import FreeDGModule, MorphismPresentation, check_module_d_squared, ground_field, structure_map
from stackycdga.errors import SizeMismatch, UnsupportedMorphism, ValidationError
from stackycdga.totalization import (
    ChainCochainComplex,
    check_bicomplex,
    hat_hhom,
    hat_tot,
    internal_hom,
    tangent_base_change,
    tangent_complex,
    total_hom,
    unit_module,
)


def square(sign=-1):
    # V^0_1 -> V^1_1 (d), V^0_1 -> V^0_0 (delta), both landing in V^1_0
    return ChainCochainComplex(
        {(0, 1): 1, (1, 1): 1, (0, 0): 1, (1, 0): 1},
        d={(0, 1): [[1]], (0, 0): [[1]]},
        delta={(0, 1): [[1]], (1, 1): [[sign]]},
    )


def test_bicomplex_checks():
    assert check_bicomplex(ChainCochainComplex({(0, 0): 2, (1, 0): 1})).passed
    assert check_bicomplex(square()).passed
    rep = check_bicomplex(square(sign=1))
    assert not rep.passed and rep.witness["identity"] == "d delta + delta d"


def test_bicomplex_shape_errors():
    with pytest.raises(SizeMismatch):
        ChainCochainComplex({(0, 0): 1, (1, 0): 2}, d={(0, 0): [[1]]})


def test_hat_tot_examples():
    one = hat_tot(ChainCochainComplex({(0, 0): 3}))
    assert one.dims == {0: 3} and one.cohomology() == {0: 3}
    iso = hat_tot(ChainCochainComplex({(0, 0): 1, (1, 0): 1}, d={(0, 0): [[1]]}))
    assert iso.check_d_squared().passed and iso.cohomology() == {0: 0, 1: 0}
    diag = hat_tot(ChainCochainComplex({(1, 1): 1}))
    assert diag.degrees == [0]


def test_hat_tot_square():
    T = hat_tot(square())
    assert T.check_d_squared().passed
    assert T.dims == {-1: 1, 0: 2, 1: 1}
    assert T.cohomology() == {-1: 0, 0: 0, 1: 0}


def test_alternating_convention_fails():
    assert not hat_tot(square(), convention="alternating").check_d_squared().passed
    with pytest.raises(ValidationError):
        hat_tot(square(), convention="other")


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_hat_tot_matches_brute_force(seed):
    V = samples.random_bicomplex(random.Random(seed))
    assert check_bicomplex(V).passed
    T = hat_tot(V)
    assert T.check_d_squared().passed
    brute = brute_total_cohomology(V)
    assert {m: T.cohomology_dim(m) for m in brute} == brute


# --- internal Hom ---------------------------------------------------------------------


def test_internal_hom_shift():
    M = ChainCochainComplex({(0, 0): 1})
    N = ChainCochainComplex({(1, 0): 1})
    H = internal_hom(M, N)
    assert H.support == [(1, 0)]


def test_internal_hom_identity_cocycle():
    B = samples.de_rham_affine(1)
    E = internal_hom(unit_module(B), unit_module(B))
    assert E.rank == 1 and E.basis[0].degree == 0
    assert not E.differential[0][0]


def small_bicomplexes():
    return [
        ChainCochainComplex({(0, 0): 1, (1, 0): 1}, d={(0, 0): [[1]]}),
        ChainCochainComplex({(0, 0): 1, (0, -1): 1}, delta={(0, 0): [[2]]}),
        square(),
        ChainCochainComplex({(0, 0): 2}),
        ChainCochainComplex({(1, 0): 1, (0, 0): 1}),
    ]


@pytest.mark.parametrize("i", range(5))
@pytest.mark.parametrize("k", range(5))
def test_hat_hhom_agrees_with_total_hom(i, k):
    M, N = small_bicomplexes()[i], small_bicomplexes()[k]
    H = hat_hhom(M, N)
    T = total_hom(hat_tot(M), hat_tot(N))
    assert H.check_d_squared().passed and T.check_d_squared().passed
    assert {m: n for m, n in H.dims.items() if n} == {m: n for m, n in T.dims.items() if n}
    assert H.cohomology() == {m: T.cohomology_dim(m) for m in H.degrees}


def test_internal_hom_type_errors():
    B = samples.de_rham_affine(1)
    with pytest.raises(ValidationError):
        internal_hom(unit_module(B), ChainCochainComplex({(0, 0): 1}))


# --- tangent complexes -------------------------------------------------------------------


def test_tangent_of_ground_field():
    assert tangent_complex(ground_field()).rank == 0


def test_tangent_de_rham():
    T = tangent_complex(samples.de_rham_affine(1))
    got = {(b.name, b.degree) for b in T.basis}
    assert got == {("d(x)^v", 0), ("d(dx)^v", -1)}
    assert check_module_d_squared(T).passed


@pytest.mark.parametrize("B", [samples.gm_over_gl1(), samples.sl2_ce(), samples.koszul_line()], ids=["gm", "sl2", "koszul"])
def test_tangent_d_squared(B):
    assert check_module_d_squared(tangent_complex(B)).passed


def test_tangent_base_change_etale():
    rep = tangent_base_change(structure_map(samples.ga_over_lie()), weight_bound=5)
    assert rep.passed
    assert rep.witness["weights"][1] == 5


def test_tangent_base_change_gm():
    assert tangent_base_change(structure_map(samples.gm_over_gl1()), weight_bound=3).passed


def test_tangent_base_change_not_etale():
    rep = tangent_base_change(structure_map(samples.trivial_action_line()), weight_bound=3)
    assert not rep.passed


def test_tangent_base_change_needs_inclusion():
    A = samples.exterior("a")
    B = samples.exterior("b")
    with pytest.raises(UnsupportedMorphism):
        tangent_base_change(MorphismPresentation(A, B, {"a": "2*b"}))


def test_module_hom_free_modules():
    B = samples.de_rham_affine(1)
    M = FreeDGModule(B, [("m", 0, 1), ("n", 0, 0)], [[0, 0], ["dx", 0]])
    H = internal_hom(M, M)
    assert H.rank == 4 and check_module_d_squared(H).passed
