"""Named example algebras and seeded random generators for tests and scripts."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .algebra import Element, GeneratorSpec, Presentation
from .cdga import CDGA, slice_matrix
from .constructions import (
    ActionData,
    AffineData,
    LieAlgebraData,
    abelian,
    chevalley_eilenberg,
    de_rham,
    gl,
    sl2,
)
from .errors import InfiniteSlice
from .totalization import ChainCochainComplex

# ----------------------------------------------------------------------
# named examples
# ----------------------------------------------------------------------


def gm_over_gl1() -> CDGA:
    """O([G_m/gl_1]): d t = t e^v."""
    Y = AffineData.gm("t")
    g = abelian(1)
    return chevalley_eilenberg(Y, g, ActionData(Y, g, {"e": {"t": "t"}}))


def ga_over_lie() -> CDGA:
    """O([G_a/Lie G_a]): d x = e^v, with e^v given the weight of x."""
    Y = AffineData.affine_space(1)
    g = abelian(1)
    return chevalley_eilenberg(Y, g, ActionData(Y, g, {"e": {"x": 1}}), dual_weights={"e": 1})


def trivial_action_line() -> CDGA:
    """Q.e acting trivially on Q[x]."""
    Y = AffineData.affine_space(1)
    return chevalley_eilenberg(Y, abelian(1))


def sl2_ce() -> CDGA:
    return chevalley_eilenberg(AffineData.point(), sl2())


def gl2_ce() -> CDGA:
    return chevalley_eilenberg(AffineData.point(), gl(2))


def de_rham_affine(k: int) -> CDGA:
    return de_rham(AffineData.affine_space(k))


def exterior(*names: str) -> CDGA:
    """Lambda(names) with zero differential, all generators of degree 1, weight 0."""
    return CDGA(Presentation([GeneratorSpec(n, 1, 0) for n in names]))


def koszul_line() -> CDGA:
    """Free on {x; xi} with d x = xi (x of weight 1)."""
    return CDGA.build([("x", 0, 1), ("xi", 1, 1)], {"x": "xi"})


# ----------------------------------------------------------------------
# random CDGAs
# ----------------------------------------------------------------------


def _cocycles(A: CDGA, degree: int, weight: int) -> List[Element]:
    src, _, mat = slice_matrix(A, degree, weight)
    out = []
    for v in linalg.nullspace(mat, len(src)):
        out.append(Element(A.presentation, {m: c for m, c in zip(src, v) if c}))
    return out


def random_cdga(
    rng: random.Random,
    max_degree: int = 4,
    max_slice_dim: int = 3,
    weight_bound: int = 4,
    max_generators: int = 4,
    attempts: int = 200,
) -> CDGA:
    """A random weight-graded CDGA with every slice (n <= max_degree, w <= bound) small.

    Generators are added one at a time; the differential of each new
    generator is a random cocycle of the sub-CDGA on the earlier ones, so
    d^2 = 0 holds by construction.
    """
    for _ in range(attempts):
        k = rng.randint(1, max_generators)
        gens: List[GeneratorSpec] = []
        diff: Dict[str, Element] = {}
        for idx in range(k):
            deg = rng.randint(0, max_degree)
            wt = rng.randint(1, 3)
            gens.append(GeneratorSpec(f"g{idx}", deg, wt))
        gens.sort(key=lambda g: (g.degree, g.weight, g.name))
        gens = [GeneratorSpec(f"g{i}", g.degree, g.weight) for i, g in enumerate(gens)]
        P_all = Presentation(gens)
        images: Dict[str, Element] = {}
        for i, g in enumerate(gens):
            img = P_all.zero()
            if i:
                Psub = Presentation(gens[:i])
                sub = CDGA(Psub, {h.name: images[h.name].transport(Psub) for h in gens[:i]})
                cyc = _cocycles(sub, g.degree + 1, g.weight)
                if cyc and rng.random() < 0.8:
                    for c in cyc:
                        img = img + c.transport(P_all).scale(rng.randint(-2, 2))
            images[g.name] = img
        A = CDGA(P_all, images)
        try:
            ok = all(
                len(A.slice_basis(n, w)) <= max_slice_dim
                for n in range(max_degree + 1)
                for w in range(weight_bound + 1)
            )
        except InfiniteSlice:
            ok = False
        if ok and any(A.differential.values()):
            return A
    raise RuntimeError("no random CDGA met the slice bound")


def random_cdgas(seed: int, count: int, **kw) -> List[CDGA]:
    rng = random.Random(seed)
    return [random_cdga(rng, **kw) for _ in range(count)]


# ----------------------------------------------------------------------
# random Lie data
# ----------------------------------------------------------------------


def random_invertible(rng: random.Random, n: int, lo: int = -2, hi: int = 2) -> List[List[Fraction]]:
    while True:
        m = [[Fraction(rng.randint(lo, hi)) for _ in range(n)] for _ in range(n)]
        if linalg.rank(m, n) == n:
            return m


def _inverse(m: List[List[Fraction]]) -> List[List[Fraction]]:
    n = len(m)
    aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    red, _ = linalg.rref(aug, 2 * n)
    return [row[n:] for row in red]


def gl2_linear_action(rng: random.Random) -> Tuple[AffineData, LieAlgebraData, ActionData]:
    """gl_2 acting on Q[x, y] through a random conjugate of the standard representation.

    E_ij acts as the vector field ``sum (P E_ij P^-1)_{ab} x_a d/dx_b``.
    """
    Y = AffineData.build(("x", 0, 1), ("y", 0, 1))
    g = gl(2)
    P = random_invertible(rng, 2)
    Pi = _inverse(P)
    xs = ["x", "y"]
    fields: Dict[str, Dict[str, str]] = {}
    for name in g.basis:
        i, j = int(name[1]) - 1, int(name[2]) - 1
        E = [[Fraction(int(a == i and b == j)) for b in range(2)] for a in range(2)]
        C = linalg.matmul(linalg.matmul(P, E, 2, 2), Pi, 2, 2)
        # the field x_a d/dx_b sends x_b to x_a
        row: Dict[str, str] = {}
        for b in range(2):
            terms = [f"{C[a][b]}*{xs[a]}" for a in range(2) if C[a][b]]
            row[xs[b]] = " + ".join(terms) if terms else "0"
        fields[name] = row
    return Y, g, ActionData(Y, g, fields)


def perturbed_lie(rng: random.Random, base: LieAlgebraData) -> LieAlgebraData:
    """Change one structure constant by a nonzero amount."""
    pairs = [(i, j) for i in range(base.dim) for j in range(i + 1, base.dim)]
    consts = {k: dict(v) for k, v in base.constants.items()}
    i, j = rng.choice(pairs)
    k = rng.randrange(base.dim)
    delta = Fraction(rng.choice([-2, -1, 1, 2]))
    vec = consts.setdefault((i, j), {})
    vec[k] = vec.get(k, Fraction(0)) + delta
    return LieAlgebraData(base.basis, {(base.basis[a], base.basis[b]): {base.basis[c]: x for c, x in v.items()} for (a, b), v in consts.items()})


# ----------------------------------------------------------------------
# random bicomplexes
# ----------------------------------------------------------------------


def _pieces(rng: random.Random, budget: int) -> List[Tuple[Dict[Tuple[int, int], int], List, List]]:
    """Indecomposable-ish building blocks: dots, arrows, squares and staircases.

    Each piece lists its cells as ``(i, j)`` and arrows as
    ``(kind, src_cell_index, tgt_cell_index, coefficient)``.
    """
    pieces = []
    used = 0
    while used < budget:
        i, j = rng.randint(-2, 2), rng.randint(-2, 2)
        kind = rng.choice(["dot", "d", "delta", "square", "stair"])
        if kind == "dot":
            cells, arrows = [(i, j)], []
        elif kind == "d":
            cells, arrows = [(i, j), (i + 1, j)], [("d", 0, 1, 1)]
        elif kind == "delta":
            cells, arrows = [(i, j), (i, j - 1)], [("delta", 0, 1, 1)]
        elif kind == "square":
            # x -> d x, x -> delta x, and d(delta x) = -delta(d x)
            cells = [(i, j), (i + 1, j), (i, j - 1), (i + 1, j - 1)]
            arrows = [("d", 0, 1, 1), ("delta", 0, 2, 1), ("delta", 1, 3, 1), ("d", 2, 3, -1)]
        else:
            L = rng.randint(2, 3)
            cells, arrows = [], []
            for k in range(L):
                cells.append((i + k, j + k))  # x_k
                cells.append((i + k + 1, j + k))  # y_k
                arrows.append(("d", 2 * k, 2 * k + 1, 1))
                if k:
                    arrows.append(("delta", 2 * k, 2 * k - 1, 1))
        if used + len(cells) > budget:
            kind, cells, arrows = "dot", [(i, j)], []
        pieces.append((cells, arrows))
        used += len(cells)
    return pieces


def random_bicomplex(rng: random.Random, max_total: int = 20) -> ChainCochainComplex:
    """Direct sum of random pieces, then a random change of basis in every bidegree."""
    budget = rng.randint(1, max_total)
    pieces = _pieces(rng, budget)
    dims: Dict[Tuple[int, int], int] = {}
    where: List[List[Tuple[Tuple[int, int], int]]] = []
    for cells, _ in pieces:
        loc = []
        for c in cells:
            loc.append((c, dims.get(c, 0)))
            dims[c] = dims.get(c, 0) + 1
        where.append(loc)
    d = {k: linalg.zeros(dims.get((k[0] + 1, k[1]), 0), n) for k, n in dims.items()}
    delta = {k: linalg.zeros(dims.get((k[0], k[1] - 1), 0), n) for k, n in dims.items()}
    for (cells, arrows), loc in zip(pieces, where):
        for kind, s, t, c in arrows:
            (sc, si), (tc, ti) = loc[s], loc[t]
            (d if kind == "d" else delta)[sc][ti][si] += c
    # change of basis g_{ij} in every bidegree: d' = g d g^-1
    G = {k: random_invertible(rng, n, -1, 1) for k, n in dims.items()}
    Gi = {k: _inverse(m) for k, m in G.items()}

    def conj(mats, shift):
        out = {}
        for k, m in mats.items():
            t = shift(k)
            if t not in dims:
                continue
            out[k] = linalg.matmul(linalg.matmul(G[t], m, dims[t], dims[k]), Gi[k], dims[k], dims[k])
        return out

    return ChainCochainComplex(dims, conj(d, lambda k: (k[0] + 1, k[1])), conj(delta, lambda k: (k[0], k[1] - 1)))
