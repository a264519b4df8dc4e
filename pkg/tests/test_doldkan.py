import random

import pytest
from hypothesis import given, strategies as st

from oracles import reduce_word
from stackycdga import doldkan as dk
from stackycdga import samples
from stackycdga.algebra import random_element
from stackycdga.cdga import CDGA
from stackycdga.errors import IndexOutOfRange, LevelMismatch, ValidationError


@pytest.fixture
def A():
    # a in A^0, xi, eta in A^1
    return CDGA.build([("a", 0, 1), ("xi", 1, 1), ("eta", 1, 1)], {"a": "xi"})


def test_coface_examples(A):
    a = dk.embed(A, A.gen("a"))
    assert dk.coface(1, a) == dk.term(A, 1, (1,), A.gen("a"))
    assert dk.coface(0, a) == dk.embed(A, A.gen("xi")) + dk.term(A, 1, (1,), A.gen("a"))
    x = dk.term(A, 1, (1,), A.gen("a"))
    assert dk.coface(2, x) == dk.term(A, 2, (1, 2), A.gen("a"))
    with pytest.raises(IndexOutOfRange):
        dk.coface(3, x)


def test_codegeneracy_examples(A):
    x = dk.term(A, 1, (1,), A.gen("a"))
    assert dk.codegeneracy(0, x) == dk.embed(A, A.gen("a"))
    v = dk.embed(A, A.gen("xi"))
    assert not dk.codegeneracy(0, v)
    assert not dk.codegeneracy(0, dk.zero(A, 1))
    with pytest.raises(IndexOutOfRange):
        dk.codegeneracy(1, v)


def test_shuffle_examples(A):
    a, xi, eta = A.gen("a"), A.gen("xi"), A.gen("eta")
    assert dk.shuffle(dk.embed(A, a), dk.embed(A, a)) == dk.embed(A, a * a)
    lhs = dk.shuffle(dk.term(A, 1, (1,), a), dk.embed(A, xi))
    assert lhs == dk.embed(A, a * xi)
    lhs = dk.shuffle(dk.term(A, 2, (1,), xi), dk.term(A, 2, (2,), eta))
    assert lhs == dk.embed(A, -(xi * eta))
    with pytest.raises(LevelMismatch):
        dk.shuffle(dk.embed(A, a), dk.embed(A, xi))


def test_shuffle_sign():
    assert dk.shuffle_sign([], [1]) == 1
    assert dk.shuffle_sign([2], [1]) == -1
    assert dk.shuffle_sign([1, 3], [2]) == -1
    assert dk.shuffle_sign([3], [1, 2]) == 1


def test_level_element_invariants(A):
    with pytest.raises(ValidationError):
        dk.DLevelElement(A, 2, {(1,): A.gen("a")})
    with pytest.raises(ValidationError):
        dk.DLevelElement(A, 2, {(2, 1): A.gen("a")})
    assert not dk.DLevelElement(A, 1, {(1,): A.zero()}).terms


def test_normalise_low_levels(A):
    view = dk.CosimplicialAlgebraView(A)
    n0 = dk.normalise(view, 0, 1)
    assert n0.basis == A.slice_basis(0, 1) and n0.kernel_is_normalised_part
    n1 = dk.normalise(view, 1, 1)
    assert n1.kernel_dim == len(A.slice_basis(1, 1))
    assert n1.kernel_is_normalised_part and n1.differential_lands_in_normalised


@pytest.mark.parametrize("n", [0, 1, 2])
def test_augmentation_nilpotency(n):
    for A in (samples.koszul_line(), samples.exterior("a"), samples.de_rham_affine(1)):
        assert dk.augmentation_nilpotency(A, n, weight_bound=2).passed


def test_augmentation_kernel_not_trivially_small():
    # at level 2 the kernel of the augmentation has nonzero square
    A = samples.koszul_line()
    rep = dk.augmentation_nilpotency(A, 2, weight_bound=2)
    assert rep.passed and sum(rep.witness["kernel_dims"].values()) > 0


def test_augmentation_kernel_nonzero_at_level_one():
    # d^0 x - d^1 x = xi lies in the kernel, so K itself is nonzero
    A = samples.koszul_line()
    x = dk.embed(A, A.gen("x"))
    k = dk.coface(0, x) - dk.coface(1, x)
    assert k and not dk.augmentation(k)


def test_identities_and_roundtrip_small():
    A = samples.gm_over_gl1()
    assert dk.check_cosimplicial_identities(A, 3, range(-1, 2)).passed
    assert dk.normalisation_roundtrip(A, 3, range(-1, 2)).passed


ALGEBRAS = [samples.koszul_line(), samples.gm_over_gl1(), samples.sl2_ce()] + samples.random_cdgas(21, 4)


@given(st.sampled_from(ALGEBRAS), st.integers(0, 10 ** 6))
def test_coface_words_match_rewriting_oracle(A, seed):
    rng = random.Random(seed)
    m = rng.randint(0, 2)
    w = rng.choice([-1, 0, 1, 2] if A.presentation.inverted else [0, 1, 2])
    a = random_element(rng, A.presentation, m, w)
    if not a:
        return
    word, level = [], m
    for _ in range(rng.randint(1, 3)):
        word.insert(0, rng.randint(0, level + 1))
        level += 1
    x = dk.embed(A, a)
    for i in reversed(word):
        x = dk.coface(i, x)
    assert x.terms == reduce_word(A, word, a)


@given(st.sampled_from(ALGEBRAS), st.integers(0, 10 ** 6), st.integers(1, 3))
def test_cofaces_multiplicative_random(A, seed, n):
    rng = random.Random(seed)
    ws = [0, 1]
    B = [dk.basis_element(A, n, k) for w in ws for k in dk.level_basis(A, n, w)]
    if not B:
        return
    x = rng.choice(B).scale(rng.randint(1, 3)) + rng.choice(B)
    y = rng.choice(B) - rng.choice(B)
    for i in range(n + 2):
        assert dk.coface(i, dk.shuffle(x, y)) == dk.shuffle(dk.coface(i, x), dk.coface(i, y))
    for i in range(n):
        assert dk.codegeneracy(i, dk.shuffle(x, y)) == dk.shuffle(dk.codegeneracy(i, x), dk.codegeneracy(i, y))


def test_dimension_formula_small():
    A = samples.koszul_line()
    # A^0_1 = {x}, A^1_1 = {xi}: D^n A in weight 1 has C(n,0) + C(n,1) basis elements
    for n in range(6):
        assert len(dk.level_basis(A, n, 1)) == 1 + n
